#include "bsld/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bsld {

namespace {

// Streaming log-sum-exp accumulator.
struct LogSum {
  double mx = -1e300;
  double acc = 0.0;
  void add(double e) {
    if (e <= mx) {
      acc += std::exp(e - mx);
    } else {
      acc = acc * std::exp(mx - e) + 1.0;
      mx = e;
    }
  }
  double value() const { return mx + std::log(acc); }
};

}  // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw BadConfig("interpolant needs >= 2 knots");
  std::vector<double> d(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) {
    double h = x_[i + 1] - x_[i];
    if (h <= 0.0) throw BadConfig("interpolant knots must increase");
    d[i] = (y_[i + 1] - y_[i]) / h;
  }
  m_.assign(n, 0.0);
  m_[0] = d[0];
  m_[n - 1] = d[n - 2];
  for (size_t i = 1; i + 1 < n; ++i)
    m_[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
  // Fritsch-Carlson limiting: keep the tangent vector inside the disc of
  // radius 3 around the secant slope so each segment stays monotone.
  for (size_t i = 0; i + 1 < n; ++i) {
    if (d[i] == 0.0) {
      m_[i] = m_[i + 1] = 0.0;
      continue;
    }
    double a = m_[i] / d[i], b = m_[i + 1] / d[i];
    double r = a * a + b * b;
    if (r > 9.0) {
      double t = 3.0 / std::sqrt(r);
      m_[i] = t * a * d[i];
      m_[i + 1] = t * b * d[i];
    }
  }
}

size_t MonotoneCubic::segment(double x) const {
  size_t lo = 0, hi = x_.size() - 1;
  while (hi - lo > 1) {
    size_t mid = (lo + hi) / 2;
    (x_[mid] <= x ? lo : hi) = mid;
  }
  return lo;
}

double MonotoneCubic::eval(double x) const {
  x = std::clamp(x, x_.front(), x_.back());
  size_t i = segment(x);
  double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
  double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  return h00 * y_[i] + h * h10 * m_[i] + h01 * y_[i + 1] + h * h11 * m_[i + 1];
}

double MonotoneCubic::deriv(double x) const {
  x = std::clamp(x, x_.front(), x_.back());
  size_t i = segment(x);
  double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
  double d00 = (6 * t * t - 6 * t) / h, d10 = 3 * t * t - 4 * t + 1;
  double d01 = (6 * t - 6 * t * t) / h, d11 = 3 * t * t - 2 * t;
  return d00 * y_[i] + d10 * m_[i] + d01 * y_[i + 1] + d11 * m_[i + 1];
}

TransferOperator::TransferOperator(const MarkovPartition& part, int bins)
    : bins_(bins) {
  if (bins < 1000) throw BadConfig("transfer operator needs >= 1000 bins");
  const BowenSeriesMap& f = part.map();
  const double tau = 2.0 * std::numbers::pi;
  const double w = tau / bins;
  into_.assign(static_cast<size_t>(bins), {});
  for (int j = 0; j < bins; ++j) {
    double center = (j + 0.5) * w;
    int cell = part.cell_at(BoundaryPoint(center));
    int br = part.branch_of(cell);
    // Clip the bin to its Markov cell so the branch applies on all of it.
    Arc bin = Arc::from_lo_len(j * w, w);
    Arc cell_arc = part.arc(cell);
    std::optional<Arc> clip = bin.intersect(cell_arc);
    Arc src = clip ? *clip : bin;
    const MoebiusMap& g = f.branch(br).g;
    double lo = g.apply(BoundaryPoint(src.lo)).theta;
    double hi = g.apply(BoundaryPoint(src.hi())).theta;
    double len = ang::ccw(lo, hi);
    double log_dfc = std::log(f.derivative(BoundaryPoint(center)));
    // Spread the image arc over the target bins it covers.
    double start = ang::norm(lo);
    double end = start + len;  // may exceed tau; indices wrap below
    long long first = static_cast<long long>(std::floor(start / w));
    for (long long ia = first; ia * w < end; ++ia) {
      double seg = std::min(end, (ia + 1) * w) - std::max(start, ia * w);
      if (seg <= 1e-15) continue;
      int i = static_cast<int>(ia % bins);
      into_[static_cast<size_t>(i)].push_back(Entry{j, seg / w, log_dfc});
    }
  }
}

double TransferOperator::log_spectral_radius(double beta) const {
  size_t k = static_cast<size_t>(bins_);
  std::vector<double> wsrc(k, 0.0);
  // One representative log-derivative per source bin (identical across its
  // entries by construction).
  std::vector<double> v(k, 1.0 / static_cast<double>(k)), nv(k, 0.0);
  for (const auto& row : into_)
    for (const Entry& e : row) wsrc[static_cast<size_t>(e.from)] = e.log_dfc;
  for (size_t j = 0; j < k; ++j) wsrc[j] = std::exp(-beta * wsrc[j]);

  double lambda = 0.0;
  for (int it = 0; it < 10000; ++it) {
    double total = 0.0;
    for (size_t i = 0; i < k; ++i) {
      double s = 0.0;
      for (const Entry& e : into_[i])
        s += e.frac * wsrc[static_cast<size_t>(e.from)] *
             v[static_cast<size_t>(e.from)];
      nv[i] = s;
      total += s;
    }
    if (!(total > 0.0)) throw PowerIterationStall("operator annihilated the iterate");
    for (size_t i = 0; i < k; ++i) nv[i] /= total;
    v.swap(nv);
    if (std::abs(total - lambda) <= 1e-10 * std::max(1.0, std::abs(total)))
      return std::log(total);
    lambda = total;
  }
  throw PowerIterationStall("power iteration did not settle in 10^4 sweeps");
}

std::pair<double, double> cylinder_pressure(const MarkovPartition& part,
                                            double beta, int n) {
  LogSum hi, lo;
  enumerate_cylinders(part, n, nullptr, [&](const CylinderWord& cw) {
    auto [dmin, dmax] = derivative_bracket(cw.g, cw.arc);
    double e1 = -beta * std::log(dmin);
    double e2 = -beta * std::log(dmax);
    hi.add(std::max(e1, e2));
    lo.add(std::min(e1, e2));
  });
  return {lo.value() / n, hi.value() / n};
}

double transfer_pressure(const MarkovPartition& part, double beta, int bins) {
  return TransferOperator(part, bins).log_spectral_radius(beta);
}

PressureCurve::PressureCurve(std::vector<PressurePoint> pts, bool parabolic,
                             ThermoConfig cfg)
    : points_(std::move(pts)), parabolic_(parabolic), cfg_(std::move(cfg)) {
  std::vector<double> xs, ys;
  for (const PressurePoint& p : points_) {
    xs.push_back(p.beta);
    ys.push_back(p.p_hat);
  }
  if (xs.front() <= 1.0 && xs.back() >= 1.0) {
    MonotoneCubic raw(xs, ys);
    gibbs_shift_ = raw.eval(1.0);
    for (double& y : ys) y -= gibbs_shift_;
  }
  fit_ = MonotoneCubic(std::move(xs), std::move(ys));
}

double PressureCurve::beta_hi() const {
  return parabolic_ ? std::min(fit_.x_max(), cfg_.parabolic_beta_cap)
                    : fit_.x_max();
}

PressureCurve pressure_curve(const MarkovPartition& part,
                             const ThermoConfig& cfg) {
  std::vector<double> grid;
  for (double b = cfg.beta_min; b <= cfg.beta_max + 1e-12; b += cfg.beta_step)
    grid.push_back(b);
  for (double b = cfg.fine_lo; b <= cfg.fine_hi + 1e-12; b += cfg.fine_step)
    grid.push_back(b);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-9; }),
             grid.end());

  TransferOperator op(part, cfg.bins);
  std::vector<PressurePoint> pts;
  for (double b : grid) {
    PressurePoint p;
    p.beta = b;
    p.p_hat = op.log_spectral_radius(b);
    for (double c : cfg.checkpoints)
      if (std::abs(c - b) < 1e-9)
        p.bracket = cylinder_pressure(part, b, cfg.bracket_depth);
    pts.push_back(p);
  }
  return PressureCurve(std::move(pts),
                       part.map().domain().has_cusps(), cfg);
}

LegendrePoint legendre_data(const PressureCurve& curve, double alpha) {
  if (alpha == 0.0) throw BadConfig("alpha = 0 is excluded from the transform");
  double lo = curve.beta_lo(), hi = curve.beta_hi();
  // -P' is non-increasing in beta by convexity; locate a sign change of
  // -P'(beta) - alpha on a scan grid, then bisect.
  const int scan = 400;
  double prev_b = lo, prev_g = -curve.dp(lo) - alpha;
  double blo = 0.0, bhi = 0.0;
  bool found = false;
  for (int i = 1; i <= scan; ++i) {
    double b = lo + (hi - lo) * i / scan;
    double g = -curve.dp(b) - alpha;
    if (prev_g == 0.0 || prev_g * g < 0.0) {
      blo = prev_b;
      bhi = b;
      found = true;
      break;
    }
    prev_b = b;
    prev_g = g;
  }
  if (!found) {
    if (prev_g == 0.0) {
      blo = bhi = prev_b;
      found = true;
    } else {
      throw AlphaOutOfRange("no beta with -P'(beta) = alpha on the usable grid");
    }
  }
  for (int it = 0; it < 100 && bhi - blo > 1e-13; ++it) {
    double mid = 0.5 * (blo + bhi);
    double g = -curve.dp(mid) - alpha;
    double glo = -curve.dp(blo) - alpha;
    if (glo * g <= 0.0)
      bhi = mid;
    else
      blo = mid;
  }
  LegendrePoint out;
  out.alpha = alpha;
  out.beta = 0.5 * (blo + bhi);
  out.b = (curve.p(out.beta) + alpha * out.beta) / alpha;
  out.I = alpha * (1.0 - out.b);
  return out;
}

std::pair<double, double> alpha_bounds(const MarkovPartition& part, int n) {
  double lo = 1e300, hi = -1e300;
  enumerate_cylinders(part, n, nullptr, [&](const CylinderWord& cw) {
    auto [dmin, dmax] = derivative_bracket(cw.g, cw.arc);
    lo = std::min(lo, std::log(dmax) / n);
    hi = std::max(hi, std::log(dmin) / n);
  });
  return {lo, hi};
}

SpectrumCurve spectrum_curve(const PressureCurve& curve, int grid_size) {
  if (grid_size < 5) throw BadConfig("spectrum grid too small");
  SpectrumCurve out;
  double eps = 1e-6 * (curve.beta_hi() - curve.beta_lo());
  double a_hi = -curve.dp(curve.beta_lo() + eps);
  double a_lo = -curve.dp(curve.beta_hi() - eps);
  double margin = curve.config().alpha_margin * (a_hi - a_lo);
  out.alpha_lo = a_lo + margin;
  out.alpha_hi = a_hi - margin;
  if (!(out.alpha_hi > out.alpha_lo))
    throw AlphaOutOfRange("usable spectrum range is empty");
  out.alpha_G = curve.parabolic() ? 0.0 : -curve.dp(1.0);
  for (int i = 0; i < grid_size; ++i) {
    double a = out.alpha_lo +
               (out.alpha_hi - out.alpha_lo) * i / (grid_size - 1);
    LegendrePoint lp = legendre_data(curve, a);
    SpectrumPoint sp;
    sp.alpha = lp.alpha;
    sp.beta = lp.beta;
    sp.b = lp.b;
    sp.I = lp.I;
    sp.b_prime = -curve.p(lp.beta) / (a * a);
    out.points.push_back(sp);
  }
  for (size_t i = 0; i < out.points.size(); ++i) {
    size_t l = (i == 0) ? 0 : i - 1;
    size_t r = (i + 1 == out.points.size()) ? i : i + 1;
    out.points[i].I_prime = (out.points[r].I - out.points[l].I) /
                            (out.points[r].alpha - out.points[l].alpha);
  }
  return out;
}

}  // namespace bsld
