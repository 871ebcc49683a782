#include "rdsdiag/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "rdsdiag/error.hpp"

namespace rdsdiag {

namespace {

void require_same_length(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) fail(ErrorCode::InsufficientData, "paired vectors differ in length");
}

// Pairs with x tied contribute to n1, with y tied to n2, with both to n3.
struct TieCounts {
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
  std::int64_t n3 = 0;
};

std::int64_t tied_pairs_in_sorted(const std::vector<double>& v) {
  std::int64_t total = 0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= v.size(); ++i) {
    if (i < v.size() && v[i] == v[i - 1]) {
      ++run;
    } else {
      total += static_cast<std::int64_t>(run) * static_cast<std::int64_t>(run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

// Merge sort counting inversions (strict y decreases).
std::int64_t sort_counting_swaps(std::vector<double>& v, std::vector<double>& buf, std::size_t lo,
                                 std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = sort_counting_swaps(v, buf, lo, mid) + sort_counting_swaps(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

}  // namespace

std::vector<double> average_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double quantile(std::vector<double> v, double p) {
  if (v.empty()) fail(ErrorCode::InsufficientData, "quantile of empty sample");
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  require_same_length(x, y);
  if (x.size() < 2) fail(ErrorCode::InsufficientData, "least squares needs two points");
  // Shift by the first observation so constant inputs give exact zeros.
  const double x0 = x[0], y0 = y[0];
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i] - x0;
    sy += y[i] - y0;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = (x[i] - x0) - mx;
    sxx += dx * dx;
    sxy += dx * ((y[i] - y0) - my);
  }
  if (sxx == 0.0) fail(ErrorCode::InsufficientData, "least squares with constant x");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = (y0 + my) - fit.slope * (x0 + mx);
  return fit;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  require_same_length(x, y);
  const std::size_t n = x.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mx = mean(x), my = mean(y);
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

// Doubled average ranks are integers, so every sum is exact; only the final
// quotient rounds.
std::optional<double> spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  require_same_length(x, y);
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  __int128 sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = static_cast<__int128>(2 * rx[i]);
    const auto b = static_cast<__int128>(2 * ry[i]);
    sa += a;
    sb += b;
    saa += a * a;
    sbb += b * b;
    sab += a * b;
  }
  const auto m = static_cast<__int128>(n);
  const __int128 num = m * sab - sa * sb;
  const __int128 dx = m * saa - sa * sa;
  const __int128 dy = m * sbb - sb * sb;
  if (dx == 0 || dy == 0) return std::nullopt;
  const long double r = static_cast<long double>(num) /
                        std::sqrt(static_cast<long double>(dx) * static_cast<long double>(dy));
  return std::clamp(static_cast<double>(r), -1.0, 1.0);
}

// Knight's algorithm: sort by (x, y), count ties, then count discordant
// pairs as merge-sort swaps on y.
std::optional<double> kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  require_same_length(x, y);
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });
  std::vector<double> xs(n), ys(n);
  for (std::size_t k = 0; k < n; ++k) {
    xs[k] = x[idx[k]];
    ys[k] = y[idx[k]];
  }
  TieCounts t;
  t.n1 = tied_pairs_in_sorted(xs);
  // joint ties: runs equal in both x and y
  {
    std::size_t run = 1;
    for (std::size_t k = 1; k <= n; ++k) {
      if (k < n && xs[k] == xs[k - 1] && ys[k] == ys[k - 1]) {
        ++run;
      } else {
        t.n3 += static_cast<std::int64_t>(run) * static_cast<std::int64_t>(run - 1) / 2;
        run = 1;
      }
    }
  }
  std::vector<double> buf(n);
  const std::int64_t swaps = sort_counting_swaps(ys, buf, 0, n);
  t.n2 = tied_pairs_in_sorted(ys);

  const std::int64_t n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  // concordant - discordant
  const std::int64_t s = n0 - t.n1 - t.n2 + t.n3 - 2 * swaps;
  if (n0 == t.n1 || n0 == t.n2) return std::nullopt;
  const auto prod = static_cast<__int128>(n0 - t.n1) * static_cast<__int128>(n0 - t.n2);
  const long double tau = static_cast<long double>(s) / std::sqrt(static_cast<long double>(prod));
  return std::clamp(static_cast<double>(tau), -1.0, 1.0);
}

double theil_sen_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require_same_length(x, y);
  std::vector<double> slopes;
  const std::size_t n = x.size();
  slopes.reserve(n * (n > 0 ? n - 1 : 0) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (x[i] != x[j]) slopes.push_back((y[j] - y[i]) / (x[j] - x[i]));
    }
  }
  if (slopes.empty()) fail(ErrorCode::InsufficientData, "theil-sen needs two distinct x values");
  const std::size_t m = slopes.size();
  auto mid = slopes.begin() + static_cast<std::ptrdiff_t>(m / 2);
  std::nth_element(slopes.begin(), mid, slopes.end());
  const double upper = *mid;
  if (m % 2 == 1) return upper;
  const double lower = *std::max_element(slopes.begin(), mid);
  return (lower + upper) / 2.0;
}

int sign_of(double v) noexcept { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

}  // namespace rdsdiag
