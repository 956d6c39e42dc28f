#pragma once

#include <cstdio>
#include <string>

namespace homog {

// Fixed 17-significant-digit formatting so numeric output is byte-stable.
inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace homog
