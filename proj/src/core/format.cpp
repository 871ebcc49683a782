#include "rdsdiag/format.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace rdsdiag {

std::string fmt_num(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double round6(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return std::strtod(buf, nullptr);
}

}  // namespace rdsdiag
