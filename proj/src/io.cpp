#include "qsq/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"

#include "qsq/error.hpp"

#ifndef QSQ_BUILD_STAMP
#define QSQ_BUILD_STAMP "unknown"
#endif

namespace qsq {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIo, "SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << contents;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::string file_sha256(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row(header); }

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) {
    throw Error(ErrorCode::kDimensionMismatch, "CSV row has " + std::to_string(cells.size()) +
                                                   " cells, header has " +
                                                   std::to_string(columns_));
  }
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) text_ += ',';
    text_ += cells[k];
  }
  text_ += '\n';
  return *this;
}

CsvWriter& CsvWriter::row(const std::vector<double>& cells) {
  std::vector<std::string> text;
  text.reserve(cells.size());
  for (double v : cells) text.push_back(format_double(v));
  return row(text);
}

ResultBundle::ResultBundle(std::filesystem::path root, std::string command,
                           std::string config_hash, std::uint64_t seed)
    : root_(std::move(root)), command_(std::move(command)),
      config_hash_(std::move(config_hash)), seed_(seed) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + root_.string() + ": " + ec.message());
}

std::filesystem::path ResultBundle::write(const std::string& name, const std::string& contents) {
  const auto path = root_ / name;
  write_file(path, contents);
  if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
  return path;
}

std::filesystem::path ResultBundle::finalize() {
  // Merge with an existing manifest so several commands can share one directory.
  const auto manifest_path = root_ / "manifest.json";
  nlohmann::json files = nlohmann::json::object();
  nlohmann::json runs = nlohmann::json::object();
  if (std::filesystem::exists(manifest_path)) {
    try {
      const auto old = nlohmann::json::parse(read_file(manifest_path));
      files = old.value("files", nlohmann::json::object());
      runs = old.value("runs", nlohmann::json::object());
    } catch (const nlohmann::json::exception&) {
      // unreadable manifest: rebuilt from this run only
    }
  }
  for (const auto& name : files_) {
    files[name] = {{"sha256", file_sha256(root_ / name)}, {"command", command_}};
  }
  const std::string run_id = command_ + "-" + config_hash_.substr(0, 12) + "-" + std::to_string(seed_);
  runs[command_] = {{"run_id", run_id}, {"config_hash", config_hash_}, {"seed", seed_}};
  nlohmann::json manifest = {{"build", build_stamp()}, {"runs", runs}, {"files", files}};
  write_file(manifest_path, manifest.dump(1) + "\n");
  return manifest_path;
}

std::string build_stamp() { return QSQ_BUILD_STAMP; }

}  // namespace qsq
