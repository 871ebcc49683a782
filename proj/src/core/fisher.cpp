#include "rdsdiag/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "rdsdiag/error.hpp"

namespace rdsdiag {

namespace {

// Conditional distribution of the first cell, support lo..hi.
class NoncentralHypergeometric {
 public:
  NoncentralHypergeometric(int row1, int row2, int col1)
      : lo_(std::max(0, col1 - row2)), hi_(std::min(col1, row1)) {
    // log C(row1, x) C(row2, col1 - x) by the ratio recurrence
    log_base_.resize(static_cast<std::size_t>(hi_ - lo_ + 1));
    log_base_[0] = 0.0;
    for (int x = lo_ + 1; x <= hi_; ++x) {
      const double ratio = static_cast<double>(row1 - x + 1) / x *
                           static_cast<double>(col1 - x + 1) / static_cast<double>(row2 - col1 + x);
      log_base_[static_cast<std::size_t>(x - lo_)] = log_base_[static_cast<std::size_t>(x - lo_ - 1)] + std::log(ratio);
    }
  }

  int lo() const noexcept { return lo_; }
  int hi() const noexcept { return hi_; }

  std::vector<double> pmf(double log_psi) const {
    std::vector<double> w(log_base_.size());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] = log_base_[i] + static_cast<double>(lo_ + static_cast<int>(i)) * log_psi;
      top = std::max(top, w[i]);
    }
    double total = 0.0;
    for (double& v : w) {
      v = std::exp(v - top);
      total += v;
    }
    for (double& v : w) v /= total;
    return w;
  }

  double upper_tail(int x, double log_psi) const {
    const auto p = pmf(log_psi);
    double s = 0.0;
    for (int k = std::max(x, lo_); k <= hi_; ++k) s += p[static_cast<std::size_t>(k - lo_)];
    return std::min(1.0, s);
  }

  double lower_tail(int x, double log_psi) const {
    const auto p = pmf(log_psi);
    double s = 0.0;
    for (int k = lo_; k <= std::min(x, hi_); ++k) s += p[static_cast<std::size_t>(k - lo_)];
    return std::min(1.0, s);
  }

  double mean(double log_psi) const {
    const auto p = pmf(log_psi);
    double m = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) m += p[i] * static_cast<double>(lo_ + static_cast<int>(i));
    return m;
  }

 private:
  int lo_;
  int hi_;
  std::vector<double> log_base_;
};

// Root of an increasing function of log psi.
template <class F>
double solve_increasing(F f) {
  double a = -1.0, b = 1.0;
  while (f(a) > 0.0) a *= 2.0;
  while (f(b) < 0.0) b *= 2.0;
  boost::uintmax_t iters = 200;
  auto tol = [](double u, double v) { return std::fabs(u - v) <= 1e-13 * std::max(1.0, std::fabs(u)); };
  const auto r = boost::math::tools::toms748_solve(f, a, b, tol, iters);
  return (r.first + r.second) / 2.0;
}

}  // namespace

double noncentral_upper_tail(int x, int row1, int row2, int col1, double psi) {
  return NoncentralHypergeometric(row1, row2, col1).upper_tail(x, std::log(psi));
}

double noncentral_lower_tail(int x, int row1, int row2, int col1, double psi) {
  return NoncentralHypergeometric(row1, row2, col1).lower_tail(x, std::log(psi));
}

OddsRatioResult fisher_odds_ratio(int a, int b, int c, int d, double confidence) {
  if (a < 0 || b < 0 || c < 0 || d < 0) fail(ErrorCode::DegenerateTable, "negative cell count");
  if (a + b == 0 || c + d == 0 || a + c == 0 || b + d == 0) {
    fail(ErrorCode::DegenerateTable, "2x2 table has a zero margin");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) fail(ErrorCode::InvalidConfig, "confidence must be in (0,1)");
  const double inf = std::numeric_limits<double>::infinity();
  const double alpha = 1.0 - confidence;
  const NoncentralHypergeometric dist(a + b, c + d, a + c);

  OddsRatioResult out;
  out.confidence = confidence;
  const double ad = static_cast<double>(a) * d;
  const double bc = static_cast<double>(b) * c;
  out.estimate = bc == 0.0 ? inf : ad / bc;

  if (dist.lo() == dist.hi()) {
    fail(ErrorCode::DegenerateTable, "2x2 table has a single admissible configuration");
  }
  if (a == dist.lo()) {
    out.conditional_mle = 0.0;
    out.lower = 0.0;
  } else {
    out.lower = std::exp(solve_increasing([&](double t) { return dist.upper_tail(a, t) - alpha / 2.0; }));
  }
  if (a == dist.hi()) {
    out.conditional_mle = inf;
    out.upper = inf;
  } else {
    out.upper = std::exp(solve_increasing([&](double t) { return alpha / 2.0 - dist.lower_tail(a, t); }));
  }
  if (a != dist.lo() && a != dist.hi()) {
    out.conditional_mle = std::exp(solve_increasing([&](double t) { return dist.mean(t) - a; }));
  }
  return out;
}

}  // namespace rdsdiag
