#include "msi/io.hpp"

#include <sys/stat.h>

#include <charconv>
#include <cstring>

#include "msi/common.hpp"

namespace msi {

void for_each_line(const std::string& path,
                   const std::function<void(size_t, std::string_view)>& fn) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw DataError("cannot open input file: " + path);

  constexpr size_t kBuf = 1 << 20;
  std::vector<char> buf(kBuf);
  std::string carry;
  size_t line_no = 0;

  auto emit = [&](const char* begin, size_t len) {
    ++line_no;
    if (len > 0 && begin[len - 1] == '\r') --len;
    fn(line_no, std::string_view(begin, len));
  };

  size_t n;
  while ((n = std::fread(buf.data(), 1, kBuf, f)) > 0) {
    const char* p = buf.data();
    const char* end = p + n;
    for (;;) {
      const char* nl = static_cast<const char*>(std::memchr(p, '\n', end - p));
      if (!nl) {
        carry.append(p, end - p);
        break;
      }
      if (!carry.empty()) {
        carry.append(p, nl - p);
        emit(carry.data(), carry.size());
        carry.clear();
      } else {
        emit(p, nl - p);
      }
      p = nl + 1;
    }
  }
  if (std::ferror(f)) {
    std::fclose(f);
    throw DataError("read error on input file: " + path);
  }
  std::fclose(f);
  if (!carry.empty()) emit(carry.data(), carry.size());
}

bool split_fields(std::string_view line, size_t expected,
                  std::vector<std::string_view>& out) {
  out.clear();
  size_t start = 0;
  while (true) {
    size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out.size() == expected;
}

std::optional<int64_t> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string format_double(double v) {
  char tmp[32];
  auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof(tmp), v);
  (void)ec;
  return std::string(tmp, ptr);
}

FileWriter::FileWriter(const std::string& path) : path_(path) {
  f_ = std::fopen(path.c_str(), "wb");
  if (!f_) throw DataError("cannot open output file: " + path);
  buf_.reserve(1 << 20);
}

FileWriter::~FileWriter() {
  if (f_) {
    flush_buf();
    std::fclose(f_);
  }
}

void FileWriter::flush_buf() {
  if (!buf_.empty() && f_) {
    if (std::fwrite(buf_.data(), 1, buf_.size(), f_) != buf_.size())
      throw DataError("write error on output file: " + path_);
    buf_.clear();
  }
}

void FileWriter::write(std::string_view s) {
  buf_.append(s);
  if (buf_.size() >= (1 << 20)) flush_buf();
}

void FileWriter::write_double(double v) {
  char tmp[32];
  auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof(tmp), v);
  (void)ec;
  buf_.append(tmp, ptr - tmp);
  if (buf_.size() >= (1 << 20)) flush_buf();
}

void FileWriter::close() {
  if (f_) {
    flush_buf();
    std::fclose(f_);
    f_ = nullptr;
  }
}

std::string read_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw DataError("cannot open file: " + path);
  std::string out;
  char buf[1 << 16];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) out.append(buf, n);
  std::fclose(f);
  return out;
}

void write_file(const std::string& path, std::string_view content) {
  FileWriter w(path);
  w.write(content);
  w.close();
}

bool file_exists(const std::string& path) {
  struct stat st;
  return ::stat(path.c_str(), &st) == 0;
}

void ensure_dir(const std::string& path) {
  if (path.empty()) return;
  std::string partial;
  for (size_t i = 0; i <= path.size(); ++i) {
    if (i == path.size() || path[i] == '/') {
      partial = path.substr(0, i);
      if (!partial.empty()) ::mkdir(partial.c_str(), 0755);
    }
  }
  struct stat st;
  if (::stat(path.c_str(), &st) != 0 || !S_ISDIR(st.st_mode))
    throw DataError("cannot create output directory: " + path);
}

}  // namespace msi
