#include "bsld/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace bsld {

namespace {


// Weighted least-squares line y = a + b*x; returns b. The weight of a
// point is the inverse variance of y.
double wls_slope(const std::vector<double>& x, const std::vector<double>& y,
                 const std::vector<double>& w) {
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
    sxx += w[i] * x[i] * x[i];
    sxy += w[i] * x[i] * y[i];
  }
  double det = sw * sxx - sx * sx;
  return (sw * sxy - sx * sy) / det;
}

}  // namespace

TailEstimate birkhoff_tail_mc(const BowenSeriesMap& f, double alpha, bool upper,
                              const std::vector<int>& n_list, long long N,
                              std::uint64_t seed) {
  if (n_list.empty()) throw BadConfig("birkhoff_tail_mc: empty depth list");
  for (size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1 || (i > 0 && n_list[i] <= n_list[i - 1]))
      throw BadConfig("birkhoff_tail_mc: depths must be increasing and >= 1");
  }
  if (N < 1) throw BadConfig("birkhoff_tail_mc: need at least one sample");

  TailEstimate est;
  est.alpha = alpha;
  est.upper = upper;
  est.n = n_list;
  est.method = "monte-carlo";
  est.hits.assign(n_list.size(), 0);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, kTwoPi);
  const int n_max = n_list.back();
  for (long long s = 0; s < N; ++s) {
    BoundaryPoint x(unif(rng));
    double birkhoff = 0.0;
    size_t idx = 0;
    for (int k = 1; k <= n_max; ++k) {
      birkhoff += std::log(f.derivative(x));
      x = f.apply(x);
      if (k == n_list[idx]) {
        double avg = birkhoff / k;
        if (upper ? (avg >= alpha) : (avg <= alpha)) ++est.hits[idx];
        ++idx;
      }
    }
  }

  long long total = 0;
  for (long long h : est.hits) total += h;
  if (total == 0) {
    std::ostringstream msg;
    msg << "no sample in the " << (upper ? "upper" : "lower")
        << " tail at alpha=" << alpha << " for any depth (first n="
        << n_list.front() << "); 95% upper confidence bound on the measure: "
        << 3.0 / static_cast<double>(N);
    throw ZeroHits(msg.str());
  }

  est.m_hat.resize(n_list.size());
  est.se.resize(n_list.size());
  std::vector<double> fx, fy, fw;
  for (size_t i = 0; i < n_list.size(); ++i) {
    double m = static_cast<double>(est.hits[i]) / static_cast<double>(N);
    est.m_hat[i] = m;
    est.se[i] = std::sqrt(std::max(m * (1.0 - m), 0.0) / static_cast<double>(N));
    if (est.hits[i] >= 50 && m < 1.0) {
      // var(log m_hat) ~ (1-m)/(m N) by the delta method
      fx.push_back(static_cast<double>(n_list[i]));
      fy.push_back(-std::log(m));
      fw.push_back(m * static_cast<double>(N) / (1.0 - m));
    }
  }
  if (fx.size() >= 2) {
    est.slope = wls_slope(fx, fy, fw);
    est.slope_ok = true;
  }
  return est;
}

double cylinder_tail(const MarkovPartition& part, double alpha, int n) {
  if (n < 1) throw BadConfig("cylinder_tail: depth must be >= 1");
  // Per-step cap on the log derivative: the largest cell supremum. A prefix
  // whose supremum cannot reach alpha*n even at this rate per remaining step
  // contains no qualifying cylinder.
  double step_max = -std::numeric_limits<double>::infinity();
  const BowenSeriesMap& f = part.map();
  for (int a = 0; a < part.size(); ++a) {
    auto br = derivative_bracket(f.branch(part.branch_of(a)).g, part.arc(a));
    step_max = std::max(step_max, std::log(br.second));
  }
  const double target = alpha * n;
  double total = 0.0;
  enumerate_cylinders(
      part, n,
      [&](const CylinderWord& w) {
        int k = static_cast<int>(w.symbols.size());
        double sup_log = std::log(derivative_bracket(w.g, w.arc).second);
        return sup_log + (n - k) * step_max < target;
      },
      [&](const CylinderWord& w) { total += w.arc.len; });
  return total;
}

MarginTable theorem_b_margin(const PressureCurve& curve,
                             const std::vector<TailEstimate>& calibration,
                             const std::vector<TailEstimate>& held_out,
                             bool polynomial_factor) {
  struct Row {
    double alpha, n, log_m, rate, slope;  // rate = I(alpha), slope = I'(alpha)
  };
  auto collect = [&](const std::vector<TailEstimate>& src) {
    std::vector<Row> rows;
    for (const TailEstimate& est : src) {
      LegendrePoint lp = legendre_data(curve, est.alpha);
      double iprime = 1.0 - lp.beta;  // exact under the Legendre transform
      for (size_t i = 0; i < est.n.size(); ++i) {
        if (est.m_hat[i] <= 0.0) continue;
        rows.push_back(Row{est.alpha, static_cast<double>(est.n[i]),
                           std::log(est.m_hat[i]), lp.I, iprime});
      }
    }
    return rows;
  };
  std::vector<Row> cal = collect(calibration);
  if (cal.empty())
    throw CalibrationFailed("no calibration row has a positive tail estimate");

  // Feasibility: x + c_i*y >= b_i with x = log k1, y = log k2 >= 0,
  // c_i = I'(alpha_i). Scan y, take the tight x, keep the smallest x + y.
  auto required_x = [&](double y) {
    double x = -std::numeric_limits<double>::infinity();
    for (const Row& r : cal) {
      double poly = polynomial_factor ? 2.0 * std::log(r.n) : 0.0;
      x = std::max(x, r.log_m + r.rate * r.n - poly - r.slope * y);
    }
    return x;
  };
  double best_y = 0.0, best_cost = std::numeric_limits<double>::infinity();
  for (double y = 0.0; y <= 10.0 + 1e-12; y += 0.01) {
    double cost = required_x(y) + y;
    if (cost < best_cost) {
      best_cost = cost;
      best_y = y;
    }
  }
  double best_x = required_x(best_y);
  if (!std::isfinite(best_x) || best_x > 50.0)
    throw CalibrationFailed("no moderate constants cover the calibration set");

  MarginTable table;
  table.kappa1 = std::exp(best_x);
  table.kappa2 = std::exp(best_y);
  table.polynomial_factor = polynomial_factor;
  auto margins = [&](const std::vector<Row>& rows) {
    std::vector<MarginRow> out;
    for (const Row& r : rows) {
      double poly = polynomial_factor ? 2.0 * std::log(r.n) : 0.0;
      double bound = best_x + r.slope * best_y + poly - r.rate * r.n;
      out.push_back(MarginRow{r.alpha, static_cast<int>(r.n), r.log_m - bound});
    }
    return out;
  };
  table.calibration = margins(cal);
  table.held_out = margins(collect(held_out));
  return table;
}

}  // namespace bsld
