#pragma once

#include <cstdint>
#include <string>

namespace msi {

// FIPS 180-4 SHA-256, enough for manifest input digests.
class Sha256 {
public:
  Sha256();
  void update(const void* data, size_t len);
  std::string hex_digest();  // finalizes

  static std::string of_file(const std::string& path);  // throws DataError
  static std::string of_string(const std::string& s);

private:
  void process_block(const uint8_t* block);
  uint32_t h_[8];
  uint8_t buffer_[64];
  size_t buffer_len_ = 0;
  uint64_t total_bits_ = 0;
};

}  // namespace msi
