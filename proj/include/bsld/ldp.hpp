#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bsld/bowen_series.hpp"
#include "bsld/errors.hpp"
#include "bsld/thermo.hpp"

namespace bsld {

// Tail-measure record for one alpha: per-depth Lebesgue estimates of
// {xi : (1/n) log |(f^n)'(xi)| on the requested side of alpha}.
struct TailEstimate {
  double alpha = 0.0;
  bool upper = true;  // tail [alpha, inf) if true, (-inf, alpha] otherwise
  std::vector<int> n;
  std::vector<double> m_hat;    // measure estimate per depth, in [0, 1]
  std::vector<double> se;       // binomial standard error (monte-carlo only)
  std::vector<long long> hits;  // raw tail counts (monte-carlo only)
  double slope = 0.0;           // fitted -(1/n) log m_hat trend
  bool slope_ok = false;        // enough well-populated depths to fit
  std::string method;           // "monte-carlo" | "cylinder"
};

// Uniform boundary sampling of the derivative Birkhoff average. Weighted
// least squares of -log m_hat against n over depths with >= 50 hits; throws
// ZeroHits when no depth is well-populated (the message carries the implied
// 95% upper confidence bound 3/N).
TailEstimate birkhoff_tail_mc(const BowenSeriesMap& f, double alpha, bool upper,
                              const std::vector<int>& n_list, long long N,
                              std::uint64_t seed);

// Exact Lebesgue mass of the depth-n cylinders whose derivative supremum
// reaches e^(alpha n), with subtree pruning by composable sup bounds.
double cylinder_tail(const MarkovPartition& part, double alpha, int n);

struct MarginRow {
  double alpha = 0.0;
  int n = 0;
  double margin = 0.0;  // log m_hat - bound; <= 0 when the bound holds
};

struct MarginTable {
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  bool polynomial_factor = true;  // whether the 2 log n term is in the bound
  std::vector<MarginRow> calibration;
  std::vector<MarginRow> held_out;
};

// Bound shape: log m_n(alpha) <= log k1 + I'(alpha) log k2 + 2 log n
// - I(alpha) n, with the 2 log n term dropped in the compact case. The
// smallest (k1, k2) covering the calibration set is found by a scan over
// log k2 >= 0; held-out rows are then evaluated against the frozen pair.
// I'(alpha) = 1 - beta(alpha) exactly under the Legendre transform.
MarginTable theorem_b_margin(const PressureCurve& curve,
                             const std::vector<TailEstimate>& calibration,
                             const std::vector<TailEstimate>& held_out,
                             bool polynomial_factor);

}  // namespace bsld
