#include "artifacts.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "fcmarket/errors.hpp"
#include "json.hpp"

namespace fcmarket::cli {

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  require(EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) == 1, ErrorCode::io,
          "sha256 failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int{md[i]};
  return out.str();
}

void Artifacts::add(std::string name, std::string content) {
  for (const auto& f : files_) require(f.first != name, ErrorCode::io, "artifact " + name + " written twice");
  files_.emplace_back(std::move(name), std::move(content));
}

void Stopwatch::lap(std::string stage) {
  const auto now = std::chrono::steady_clock::now();
  into_.push_back({std::move(stage), std::chrono::duration<double>(now - last_).count()});
  last_ = now;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::io, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  require(out.good(), ErrorCode::io, "write failed for " + path.string());
}

}  // namespace

void write_outputs(const Artifacts& artifacts, const RunManifest& m) {
  std::error_code ec;
  std::filesystem::create_directories(m.out, ec);
  require(!ec, ErrorCode::io, "cannot create output directory " + m.out.string() + ": " + ec.message());

  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& [name, content] : artifacts.files()) {
    write_file(m.out / name, content);
    files.push_back({{"path", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
  }
  nlohmann::ordered_json timings = nlohmann::ordered_json::array();
  for (const auto& t : m.timings) timings.push_back({{"stage", t.stage}, {"seconds", t.seconds}});

  nlohmann::ordered_json doc{{"command", m.command},
                             {"config", m.config},
                             {"seed", m.seed},
                             {"output_dir", m.out.generic_string()},
                             {"timings", timings},
                             {"artifacts", files},
                             {"warnings", m.warnings}};
  write_file(m.out / "manifest.json", doc.dump(2) + "\n");
}

VerifyResult verify_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io, "cannot open manifest " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::schema, std::string("manifest is not valid JSON: ") + e.what());
  }
  require(doc.contains("artifacts") && doc["artifacts"].is_array(), ErrorCode::schema, "manifest lists no artifacts");
  VerifyResult r;
  const auto dir = path.parent_path();
  for (const auto& a : doc["artifacts"]) {
    const std::string name = a.at("path").get<std::string>();
    std::ifstream f(dir / name, std::ios::binary);
    ++r.checked;
    if (!f.good()) {
      r.mismatched.push_back(name);
      continue;
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    if (sha256_hex(ss.str()) != a.at("sha256").get<std::string>()) r.mismatched.push_back(name);
  }
  return r;
}

}  // namespace fcmarket::cli
