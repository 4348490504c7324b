#include "bsld/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bsld {

namespace {

DiscPoint on_circle(BoundaryPoint p) {
  Complex u = p.unit();
  return DiscPoint(u.real(), u.imag());
}

struct Crossing {
  int side;
  double t;       // parameter along the travelling geodesic
  DiscPoint at;
};

// The base domain is the intersection of the Right half-planes of its side
// carriers, so the trace of a geodesic inside it is one parameter interval:
// lower bounds come from carriers whose Left side holds the source endpoint,
// upper bounds from carriers whose Left side holds the destination endpoint.
struct DomainTrace {
  double lo = -1e300;
  double hi = 1e300;
  std::optional<Crossing> exit;   // realizes hi
  std::optional<Crossing> entry;  // realizes lo
  bool misses = false;
};

DomainTrace trace_through_domain(const FundamentalDomain& dom,
                                 const OrientedGeodesic& geo) {
  DomainTrace out;
  for (int i = 0; i < dom.num_sides(); ++i) {
    const OrientedGeodesic& carrier = dom.side(i).carrier;
    double off_src = carrier.signed_offset(on_circle(geo.src()));
    double off_dst = carrier.signed_offset(on_circle(geo.dst()));
    bool src_left = off_src < 0.0;
    bool dst_left = off_dst < 0.0;
    if (!src_left && !dst_left) continue;  // whole geodesic on the domain side
    if (src_left && dst_left) {            // whole geodesic outside this half-plane
      out.misses = true;
      return out;
    }
    std::optional<DiscPoint> q = geo.intersect(carrier);
    if (!q) {
      // Transversality is implied by the opposite endpoint sides; a missing
      // intersection means the endpoints sit on the carrier within tolerance.
      out.misses = true;
      return out;
    }
    double t = geo.param_of(*q);
    if (dst_left) {
      if (t < out.hi) {
        out.hi = t;
        out.exit = Crossing{i, t, *q};
      }
    } else {
      if (t > out.lo) {
        out.lo = t;
        out.entry = Crossing{i, t, *q};
      }
    }
  }
  if (out.hi <= out.lo) out.misses = true;
  return out;
}

// Right-deformation tie-break at an interior vertex: the curve deformed to
// the right of the travelling geodesic leaves the vertex on its left and
// crosses whichever incident side lies on the geodesic's right.
int deformed_exit_side(const FundamentalDomain& dom, const OrientedGeodesic& geo,
                       int vertex) {
  int n = dom.num_sides();
  int s_in = (vertex - 1 + n) % n;  // side ending at this vertex
  int s_out = vertex;               // side starting at this vertex
  auto away_point = [&](int side) {
    const DomainSide& s = dom.side(side);
    DiscPoint far_end = (side == s_in) ? s.v0 : s.v1;
    DiscPoint v = dom.vertices()[static_cast<size_t>(vertex)].p;
    // A point on the side segment well clear of the vertex.
    OrientedGeodesic c = s.carrier;
    double tv = c.param_of(v), tf = c.param_of(far_end);
    return c.point_at(tv + 0.25 * (tf - tv));
  };
  // Side::Left is the geometric right-hand side of the travel direction
  // (pinned by side_of(diameter 0->pi, i/2) == Left).
  bool in_right = geo.side_of(away_point(s_in)) == Side::Left;
  bool out_right = geo.side_of(away_point(s_out)) == Side::Left;
  if (in_right == out_right) return -1;  // no clean discrimination
  return in_right ? s_in : s_out;
}

}  // namespace

std::optional<std::pair<double, double>> domain_interval(
    const FundamentalDomain& dom, const OrientedGeodesic& geo) {
  DomainTrace tr = trace_through_domain(dom, geo);
  if (tr.misses) return std::nullopt;
  return std::make_pair(tr.lo, tr.hi);
}

CuttingSequence cutting_sequence(const FundamentalDomain& dom,
                                 const OrientedGeodesic& geo, int n,
                                 double eps_vertex) {
  CuttingSequence out;
  out.geodesic = geo;
  out.eps_vertex = eps_vertex;
  OrientedGeodesic eta = geo;
  for (int k = 0; k < n; ++k) {
    DomainTrace tr = trace_through_domain(dom, eta);
    if (tr.misses) {
      std::ostringstream os;
      os << "pulled-back geodesic misses the base domain at step " << k;
      throw NotEnteringDomain(os.str());
    }
    if (!tr.exit) {
      std::ostringstream os;
      os << "no forward boundary crossing at step " << k
         << " (positive endpoint too close to a cusp?)";
      throw NoExitSide(os.str());
    }
    int exit_side = tr.exit->side;
    // Near-vertex crossing: apply the right-deformation rule and record it.
    const DomainSide& es = dom.side(exit_side);
    int nv = dom.num_sides();
    for (int which = 0; which < 2; ++which) {
      int vtx = (exit_side + which) % nv;  // v0 of side i is vertex i
      const DomainVertex& v = dom.vertices()[static_cast<size_t>(vtx)];
      if (v.ideal) continue;
      DiscPoint corner = (which == 0) ? es.v0 : es.v1;
      double dx = tr.exit->at.re - corner.re, dy = tr.exit->at.im - corner.im;
      if (std::sqrt(dx * dx + dy * dy) < eps_vertex) {
        int chosen = deformed_exit_side(dom, eta, vtx);
        if (chosen >= 0) exit_side = chosen;
        out.deformation_events.push_back(k);
        break;
      }
    }
    GeneratorLabel g = dom.side(exit_side).label;
    out.symbols.push_back(g);
    eta = eta.image(dom.matrix(g).inverse());
  }
  return out;
}

GrowthTrace growth_trace(const FundamentalDomain& dom, const BowenSeriesMap& f,
                         const OrientedGeodesic& geo, int n,
                         double eps_vertex) {
  GrowthTrace out;
  out.cut = cutting_sequence(dom, geo, n, eps_vertex);
  out.t.reserve(static_cast<size_t>(n) + 1);
  out.s.reserve(static_cast<size_t>(n) + 1);
  out.u.reserve(static_cast<size_t>(n) + 1);
  out.t.push_back(0.0);
  out.s.push_back(0.0);
  out.u.push_back(0.0);

  // Raw product of the cutting-sequence matrices with explicit rescaling:
  // renormalizing to unit determinant needs a difference of squares that
  // cancels catastrophically once entries reach e^{t/2}, but the determinant
  // of the raw product is exactly 1 by construction, so only the rescale
  // factor has to be tracked. cosh d(0, g*0) = |a|^2 + |b|^2 for unit g.
  Complex pa(1.0, 0.0), pb(0.0, 0.0);
  double log_scale = 0.0;

  BoundaryPoint xi_f = geo.dst();   // forward f-orbit of gamma^+
  BoundaryPoint xi_u = geo.dst();   // pull-back orbit along the cutting word
  double sum_s = 0.0, sum_u = 0.0;

  for (int k = 0; k < n; ++k) {
    MoebiusMap g = dom.matrix(out.cut.symbols[static_cast<size_t>(k)]);
    Complex na = pa * g.a + pb * std::conj(g.b);
    Complex nb = pa * g.b + pb * std::conj(g.a);
    pa = na;
    pb = nb;
    double m = std::max(std::abs(pa), std::abs(pb));
    if (m > 1e100) {
      pa /= m;
      pb /= m;
      log_scale += std::log(m);
    }
    double x = std::log(std::norm(pa) + std::norm(pb)) + 2.0 * log_scale;
    double tk = (x > 40.0) ? x + std::log(2.0)
                           : std::acosh(std::exp(x));
    out.t.push_back(tk);

    sum_s += std::log(f.derivative(xi_f));
    xi_f = f.apply(xi_f);
    out.s.push_back(sum_s);

    MoebiusMap gi = g.inverse();
    sum_u += std::log(gi.boundary_derivative(xi_u));
    xi_u = gi.apply(xi_u);
    out.u.push_back(sum_u);
  }
  return out;
}

GeodesicSampler::GeodesicSampler(const FundamentalDomain& dom,
                                 std::uint64_t seed,
                                 std::optional<double> k_radius)
    : dom_(dom), k_radius_(k_radius), rng_(seed) {
  for (int i = 0; i < dom_.num_sides(); ++i)
    guard_angles_.push_back(dom_.p_point(i).theta);
  for (const DomainVertex& v : dom_.vertices())
    if (v.ideal) guard_angles_.push_back(std::atan2(v.p.im, v.p.re));
}

OrientedGeodesic GeodesicSampler::next() {
  std::uniform_real_distribution<double> unif(0.0, 2.0 * std::numbers::pi);
  for (;;) {
    if (proposals_ > 10000 &&
        static_cast<double>(accepted_ + 1) <
            1e-3 * static_cast<double>(proposals_))
      throw RejectionStall("geodesic sampler acceptance below 1e-3");
    ++proposals_;
    double a = unif(rng_), b = unif(rng_);
    if (std::abs(ang::norm_pm(a - b)) < 1e-6) continue;
    bool guarded = false;
    for (double gth : guard_angles_)
      if (std::abs(ang::norm_pm(b - gth)) < 1e-9) guarded = true;
    if (guarded) continue;
    OrientedGeodesic geo{BoundaryPoint(a), BoundaryPoint(b)};
    if (k_radius_ && geo.euclid_dist_origin() > *k_radius_) continue;
    auto iv = domain_interval(dom_, geo);
    if (!iv || iv->second - iv->first < 1e-9) continue;
    ++accepted_;
    return geo;
  }
}

double erdos_renyi_statistic(const GrowthTrace& trace, double I_alpha, int n) {
  if (I_alpha <= 0.0) throw BadConfig("rate value must be positive");
  if (n < 2 || trace.t.size() < static_cast<size_t>(n) + 1)
    throw BadConfig("trace shorter than requested depth");
  double logn = std::log(static_cast<double>(n));
  int w = static_cast<int>(std::floor(logn / I_alpha));
  if (w > n) throw WindowTooLong("window exceeds trace depth");
  double best = -1e300;
  for (int m = 0; m + w <= n; ++m)
    best = std::max(best, trace.t[static_cast<size_t>(m + w)] -
                              trace.t[static_cast<size_t>(m)]);
  return best / logn;
}

}  // namespace bsld
