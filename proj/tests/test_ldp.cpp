#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <vector>

#include "bsld/bowen_series.hpp"
#include "bsld/ldp.hpp"
#include "bsld/thermo.hpp"
#include "doctest.h"

using namespace bsld;

namespace {


const MarkovPartition& octagon_partition() {
  static FundamentalDomain dom = FundamentalDomain::octagon();
  static BowenSeriesMap f(dom);
  static MarkovPartition part(f);
  return part;
}

const MarkovPartition& quad_partition() {
  static FundamentalDomain dom = FundamentalDomain::quadrilateral();
  static BowenSeriesMap f(dom);
  static MarkovPartition part(f);
  return part;
}

const PressureCurve& octagon_curve() {
  static PressureCurve c = pressure_curve(octagon_partition());
  return c;
}

const PressureCurve& quad_curve() {
  static PressureCurve c = pressure_curve(quad_partition());
  return c;
}

double octagon_alpha_g() { return -octagon_curve().dp(1.0); }

// Tail mass at depth n computed with the pruning disabled, for comparison
// against the pruned path.
double unpruned_tail(const MarkovPartition& part, double alpha, int n) {
  double total = 0.0;
  enumerate_cylinders(part, n, nullptr, [&](const CylinderWord& w) {
    double sup_log = std::log(derivative_bracket(w.g, w.arc).second);
    if (sup_log >= alpha * n) total += w.arc.len;
  });
  return total;
}

// Largest log distortion sup/inf of the word derivative over depth-n
// cylinders.
double max_log_distortion(const MarkovPartition& part, int n) {
  double worst = 0.0;
  enumerate_cylinders(part, n, nullptr, [&](const CylinderWord& w) {
    auto [lo, hi] = derivative_bracket(w.g, w.arc);
    worst = std::max(worst, std::log(hi / lo));
  });
  return worst;
}

}  // namespace

TEST_CASE("cylinder tail saturates below the lower growth bound") {
  const MarkovPartition& part = octagon_partition();
  auto [lo, hi] = alpha_bounds(part, 4);
  CHECK(cylinder_tail(part, lo - 0.1, 4) == doctest::Approx(kTwoPi).epsilon(1e-9));
  // Membership is by the cylinder supremum, so the tail is only guaranteed
  // empty above the largest supremum average (hi is the largest infimum
  // average; they differ by the distortion).
  double sup_ceiling = hi + max_log_distortion(part, 4) / 4.0;
  CHECK(cylinder_tail(part, sup_ceiling + 0.01, 4) == 0.0);
  // In between, the mass is strictly between the extremes and decreasing
  // in alpha.
  double mid_lo = cylinder_tail(part, lo + 0.3 * (hi - lo), 4);
  double mid_hi = cylinder_tail(part, lo + 0.7 * (hi - lo), 4);
  CHECK(mid_lo > mid_hi);
  CHECK(mid_hi > 0.0);
  CHECK(mid_lo < kTwoPi);
}

TEST_CASE("pruning does not change the tail mass") {
  for (const MarkovPartition* part : {&octagon_partition(), &quad_partition()}) {
    auto [lo, hi] = alpha_bounds(*part, 4);
    for (double frac : {0.2, 0.5, 0.8}) {
      double alpha = lo + frac * (hi - lo);
      CHECK(cylinder_tail(*part, alpha, 4) ==
            doctest::Approx(unpruned_tail(*part, alpha, 4)).epsilon(1e-12));
    }
  }
}

TEST_CASE("monte-carlo tails are deterministic and well-formed") {
  const BowenSeriesMap& f = octagon_partition().map();
  double ag = octagon_alpha_g();
  std::vector<int> ns{4, 8, 12};
  TailEstimate a = birkhoff_tail_mc(f, ag + 0.3, true, ns, 20000, 7);
  TailEstimate b = birkhoff_tail_mc(f, ag + 0.3, true, ns, 20000, 7);
  REQUIRE(a.n == ns);
  for (size_t i = 0; i < ns.size(); ++i) {
    CHECK(a.m_hat[i] == b.m_hat[i]);
    CHECK(a.m_hat[i] >= 0.0);
    CHECK(a.m_hat[i] <= 1.0);
    CHECK(a.se[i] >= 0.0);
  }
  CHECK(a.method == "monte-carlo");
  // A different seed moves the estimates but not by more than a few
  // standard errors.
  TailEstimate c = birkhoff_tail_mc(f, ag + 0.3, true, ns, 20000, 8);
  for (size_t i = 0; i < ns.size(); ++i)
    CHECK(std::abs(c.m_hat[i] - a.m_hat[i]) < 8.0 * (a.se[i] + c.se[i]) + 1e-12);
  CHECK_THROWS_AS(birkhoff_tail_mc(f, ag, true, {5, 5}, 100, 1), BadConfig);
}

TEST_CASE("tail decay is flat at the typical growth rate") {
  const BowenSeriesMap& f = octagon_partition().map();
  double ag = octagon_alpha_g();
  for (bool upper : {true, false}) {
    TailEstimate est = birkhoff_tail_mc(f, ag, upper, {10, 15, 20, 25, 30},
                                        200000, 11);
    REQUIRE(est.slope_ok);
    CHECK(std::abs(est.slope) < 0.02);
  }
}

TEST_CASE("tail decay slope tracks the rate function off-center") {
  const MarkovPartition& part = octagon_partition();
  const PressureCurve& curve = octagon_curve();
  double ag = octagon_alpha_g();
  double hi = alpha_bounds(part, 6).second;
  double alpha = ag + 0.3 * (hi - ag);
  LegendrePoint lp = legendre_data(curve, alpha);
  TailEstimate est = birkhoff_tail_mc(part.map(), alpha, true,
                                      {10, 14, 18, 22, 26, 30}, 200000, 3);
  REQUIRE(est.slope_ok);
  // Desk-scale sample: a looser envelope than the full-size run in the
  // acceptance gate.
  CHECK(std::abs(est.slope - lp.I) < std::max(0.35 * lp.I, 0.08));
}

TEST_CASE("empty tails beyond the growth ceiling raise ZeroHits") {
  const MarkovPartition& part = octagon_partition();
  double hi = alpha_bounds(part, 6).second;
  CHECK_THROWS_AS(
      birkhoff_tail_mc(part.map(), hi + 0.1, true, {8, 12, 16}, 20000, 5),
      ZeroHits);
}

TEST_CASE("monte-carlo and cylinder tails agree within distortion") {
  const MarkovPartition& part = quad_partition();
  auto [lo, hi] = alpha_bounds(part, 8);
  double alpha = lo + 0.55 * (hi - lo);
  const int n = 8;
  double mass = cylinder_tail(part, alpha, n);
  REQUIRE(mass > 0.0);
  double cyl_rate = -std::log(mass / kTwoPi) / n;
  TailEstimate est = birkhoff_tail_mc(part.map(), alpha, true, {n}, 200000, 19);
  REQUIRE(est.m_hat[0] > 0.0);
  double mc_rate = -std::log(est.m_hat[0]) / n;
  double slack = max_log_distortion(part, n) / n + 0.05;
  CHECK(std::abs(cyl_rate - mc_rate) < slack);
}

TEST_CASE("fitted bound covers the calibration tails") {
  const MarkovPartition& part = octagon_partition();
  const PressureCurve& curve = octagon_curve();
  double ag = octagon_alpha_g();
  double hi = alpha_bounds(part, 6).second;
  std::vector<int> ns{8, 12, 16, 20};
  std::vector<TailEstimate> cal, held;
  for (double frac : {0.15, 0.35}) {
    cal.push_back(birkhoff_tail_mc(part.map(), ag + frac * (hi - ag), true, ns,
                                   100000, 23));
  }
  held.push_back(birkhoff_tail_mc(part.map(), ag + 0.25 * (hi - ag), true, ns,
                                  100000, 29));
  MarginTable table = theorem_b_margin(curve, cal, held, false);
  CHECK(table.kappa1 > 0.0);
  CHECK(table.kappa2 >= 1.0 - 1e-9);
  for (const MarginRow& r : table.calibration) CHECK(r.margin <= 1e-9);
  // At least one calibration row is tight: the fit is minimal, not padded.
  double tightest = -1e300;
  for (const MarginRow& r : table.calibration)
    tightest = std::max(tightest, r.margin);
  CHECK(tightest > -1e-6);
  // Held-out tails at an interpolating alpha stay close to the fitted
  // envelope (the strict <= 0 claim is the acceptance gate's, at full
  // sample size).
  REQUIRE(!table.held_out.empty());
  for (const MarginRow& r : table.held_out) CHECK(r.margin < 0.5);
  CHECK_THROWS_AS(theorem_b_margin(curve, {}, held, false), CalibrationFailed);
}

TEST_CASE("cusped tails need the polynomial factor at shallow depth") {
  const MarkovPartition& part = quad_partition();
  const PressureCurve& curve = quad_curve();
  auto [lo, hi] = alpha_bounds(part, 8);
  std::vector<int> ns{4, 8, 12, 16, 20};
  std::vector<TailEstimate> cal, held;
  for (double frac : {0.3, 0.6}) {
    cal.push_back(birkhoff_tail_mc(part.map(), lo + frac * (hi - lo), true, ns,
                                   100000, 31));
  }
  held.push_back(birkhoff_tail_mc(part.map(), lo + 0.45 * (hi - lo), true, ns,
                                  100000, 37));
  // With the n^2 factor the fitted constants stay moderate.
  MarginTable with = theorem_b_margin(curve, cal, held, true);
  CHECK(std::log(with.kappa1) < 50.0);
  for (const MarginRow& r : with.calibration) CHECK(r.margin <= 1e-9);
  // Without it the fit must absorb the polynomial correction into the
  // constants: the combined cost grows by at least 2 log(n_min).
  MarginTable without = theorem_b_margin(curve, cal, held, false);
  double cost_with = std::log(with.kappa1) + std::log(with.kappa2);
  double cost_without = std::log(without.kappa1) + std::log(without.kappa2);
  CHECK(cost_without > cost_with + 2.0 * std::log(4.0) - 0.05);
}
