#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

#include "curvyaqm/cli.hpp"

namespace curvyaqm::cli {

namespace {

std::string special(double v) {
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

std::string format_exact(double v) {
  if (!std::isfinite(v)) return special(v);
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_sig(double v, int digits) {
  if (!std::isfinite(v)) return special(v);
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v,
                                 std::chars_format::general, digits);
  return std::string(buf, res.ptr);
}

}  // namespace curvyaqm::cli
