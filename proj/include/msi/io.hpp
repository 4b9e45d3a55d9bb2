#pragma once

#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace msi {

// Streams a file line by line through fn(line_number, line) with a single
// reusable buffer. Lines exclude the trailing '\n'; a final '\r' is stripped
// so CRLF files parse the same as LF. Throws DataError if unreadable.
void for_each_line(const std::string& path,
                   const std::function<void(size_t, std::string_view)>& fn);

// Splits `line` on commas into `out`. Returns false if the field count
// differs from expected. No quoting: tokens are opaque ids that must not
// contain commas (documented in the file format contract).
bool split_fields(std::string_view line, size_t expected,
                  std::vector<std::string_view>& out);

// Strict non-negative integer parse; nullopt on any stray character.
std::optional<int64_t> parse_int(std::string_view s);

std::optional<double> parse_double(std::string_view s);

// Shortest round-trip decimal form (std::to_chars), locale-free, so repeated
// runs serialize bit-identical artifacts.
std::string format_double(double v);

// Buffered text-file writer; throws DataError on open/write failure.
class FileWriter {
public:
  explicit FileWriter(const std::string& path);
  ~FileWriter();
  FileWriter(const FileWriter&) = delete;
  FileWriter& operator=(const FileWriter&) = delete;

  void write(std::string_view s);
  void write_double(double v);
  void close();
  const std::string& path() const { return path_; }

private:
  std::string path_;
  std::FILE* f_;
  std::string buf_;
  void flush_buf();
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);
bool file_exists(const std::string& path);
void ensure_dir(const std::string& path);

}  // namespace msi
