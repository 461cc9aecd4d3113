#include "manifest.hpp"

#include <array>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "fraclap/error.hpp"

#ifndef FRACLAP_VERSION
#define FRACLAP_VERSION "unknown"
#endif

namespace fraclap::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCategory::io, "cannot read " + path.string() + " for digest");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  require(ctx && EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) == 1, ErrorCategory::io,
          "sha256 initialisation failed");
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    char pair[3];
    std::snprintf(pair, sizeof pair, "%02x", md[i]);
    hex += pair;
  }
  return hex;
}

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t secs = std::chrono::system_clock::to_time_t(t);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char frac[8];
  std::snprintf(frac, sizeof frac, ".%03dZ", static_cast<int>(ms));
  return std::string(buf) + frac;
}

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["artifact"] = "fraclap";
  j["version"] = FRACLAP_VERSION;
  j["command"] = command;
  j["config"] = config;
  j["started"] = started;
  j["finished"] = finished;
  j["exit_status"] = exit_status;
  if (!error.empty()) j["error"] = error;
  auto files = nlohmann::ordered_json::array();
  for (const auto& p : outputs) {
    nlohmann::ordered_json f;
    f["path"] = p.string();
    // a failed command may not have produced everything it announced
    if (std::filesystem::is_regular_file(p)) f["sha256"] = sha256_file(p);
    else f["sha256"] = nullptr;
    files.push_back(std::move(f));
  }
  j["outputs"] = std::move(files);
  return j;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCategory::io, "cannot write manifest " + path.string());
  out << manifest.to_json().dump(2) << '\n';
  require(static_cast<bool>(out), ErrorCategory::io, "write failed for manifest " + path.string());
}

}  // namespace fraclap::cli
