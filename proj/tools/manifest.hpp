#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fraclap::cli {

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Record of one CLI invocation: what was asked, when, how it ended and what it wrote.
struct RunManifest {
  std::string command;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::string started;
  std::string finished;
  int exit_status = 0;
  std::string error;
  std::vector<std::filesystem::path> outputs;

  nlohmann::ordered_json to_json() const;
};

/// ISO 8601 UTC with millisecond resolution.
std::string utc_timestamp(std::chrono::system_clock::time_point t);

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

}  // namespace fraclap::cli
