#pragma once

#include <string>

namespace rdsdiag {

// Six significant digits, "%.6g". NaN prints as NA, infinities as Inf/-Inf.
std::string fmt_num(double v);

// Round to six significant digits and back, for JSON emission.
double round6(double v);

}  // namespace rdsdiag
