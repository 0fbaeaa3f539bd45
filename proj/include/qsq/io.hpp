#ifndef QSQ_IO_HPP_
#define QSQ_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace qsq {

std::string sha256_hex(const std::string& bytes);
std::string file_sha256(const std::filesystem::path& path);

// Shortest text that reads back to the same double; "nan"/"inf" otherwise.
std::string format_double(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& row(const std::vector<std::string>& cells);
  CsvWriter& row(const std::vector<double>& cells);
  std::string str() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

// Output directory whose files are tracked in manifest.json with their
// SHA-256 digests. Paths are relative to the bundle root.
class ResultBundle {
 public:
  ResultBundle(std::filesystem::path root, std::string command, std::string config_hash,
               std::uint64_t seed);

  std::filesystem::path write(const std::string& name, const std::string& contents);
  const std::filesystem::path& root() const { return root_; }
  // Writes manifest.json (sorted, no timestamps) and returns its path.
  std::filesystem::path finalize();

 private:
  std::filesystem::path root_;
  std::string command_;
  std::string config_hash_;
  std::uint64_t seed_;
  std::vector<std::string> files_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

// Build identifier baked in at configure time.
std::string build_stamp();

}  // namespace qsq

#endif  // QSQ_IO_HPP_
