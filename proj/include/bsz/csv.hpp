#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace bsz {

// Shortest decimal form that parses back to the same double; keeps file
// output byte-stable for a given seed.
inline std::string fmt_double(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

inline std::string fmt_int(long long v) {
  char buf[24];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

void write_file(const std::string& path, const std::string& content);

}  // namespace bsz
