#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace fcmarket::cli {

std::string sha256_hex(const std::string& bytes);

// Output files are held in memory and written together at the end, so a
// failing command leaves nothing behind.
class Artifacts {
 public:
  void add(std::string name, std::string content);
  const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

struct Timing {
  std::string stage;
  double seconds = 0.0;
};

class Stopwatch {
 public:
  explicit Stopwatch(std::vector<Timing>& into) : into_(into) {}
  void lap(std::string stage);

 private:
  std::vector<Timing>& into_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

struct RunManifest {
  std::string command;
  std::string config;  // path, or "preset:<name>"
  std::uint64_t seed = 0;
  std::filesystem::path out;
  std::vector<Timing> timings;
  std::vector<std::string> warnings;
};

// Writes every artifact plus manifest.json into manifest.out.
void write_outputs(const Artifacts& artifacts, const RunManifest& manifest);

struct VerifyResult {
  std::size_t checked = 0;
  std::vector<std::string> mismatched;  // missing files included
};

VerifyResult verify_manifest(const std::filesystem::path& manifest_path);

}  // namespace fcmarket::cli
