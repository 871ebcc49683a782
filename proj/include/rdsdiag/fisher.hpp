#pragma once

namespace rdsdiag {

// 2x2 table        outcome+  outcome-
//   exposed            a         b
//   unexposed          c         d
struct OddsRatioResult {
  double estimate = 0.0;        // ad / bc, may be 0 or +inf
  double conditional_mle = 0.0; // maximizer of the conditional likelihood
  double lower = 0.0;
  double upper = 0.0;           // +inf when a sits at its upper support bound
  double confidence = 0.95;
};

// Interval from inverting the conditional (noncentral hypergeometric) exact
// test, equal tails. Throws DegenerateTable when a margin is zero.
OddsRatioResult fisher_odds_ratio(int a, int b, int c, int d, double confidence = 0.95);

// P(X >= x) and P(X <= x) for the first cell given the margins and odds
// ratio psi.
double noncentral_upper_tail(int x, int row1, int row2, int col1, double psi);
double noncentral_lower_tail(int x, int row1, int row2, int col1, double psi);

}  // namespace rdsdiag
