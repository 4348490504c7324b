#ifndef BSLD_GEOMETRY_HPP
#define BSLD_GEOMETRY_HPP

// Geometry kernel for the Poincare disc: boundary angles, Moebius isometries
// in SU(1,1) normal form, oriented geodesics, Busemann function and Poisson
// kernel. All types are immutable values and all operations are pure.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>

#include "bsld/errors.hpp"

namespace bsld {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Named tolerances, single source of truth for all geometric predicates.
namespace tol {
inline constexpr double kDiscGuard = 1e-14;     // |z|^2 < 1 - guard
inline constexpr double kOn = 1e-10;            // incidence predicates
inline constexpr double kVertex = 1e-9;         // vertex proximity
inline constexpr double kAntipodal = 1e-9;      // diameter switch-over
inline constexpr double kDegenerate = 1e-12;    // coincident endpoints
}  // namespace tol

namespace ang {

// Normalize into [0, 2pi).
inline double norm(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

// Normalize into (-pi, pi].
inline double norm_pm(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t > std::numbers::pi) t -= kTwoPi;
  if (t <= -std::numbers::pi) t += kTwoPi;
  return t;
}

// Anticlockwise distance from a to b, in [0, 2pi).
inline double ccw(double a, double b) { return norm(b - a); }

}  // namespace ang

struct BoundaryPoint {
  double theta = 0.0;  // radians in [0, 2pi)

  BoundaryPoint() = default;
  explicit BoundaryPoint(double t) : theta(ang::norm(t)) {}

  Complex unit() const { return {std::cos(theta), std::sin(theta)}; }
  static BoundaryPoint from_complex(Complex z) { return BoundaryPoint(std::arg(z)); }
};

struct DiscPoint {
  double re = 0.0;
  double im = 0.0;

  DiscPoint() = default;
  DiscPoint(double x, double y) : re(x), im(y) {}
  explicit DiscPoint(Complex z) : re(z.real()), im(z.imag()) {}

  Complex c() const { return {re, im}; }
  double abs2() const { return re * re + im * im; }
  bool in_disc() const { return abs2() < 1.0 - tol::kDiscGuard; }
};

// Unit-determinant disc isometry z -> (a z + b) / (conj(b) z + conj(a)).
struct MoebiusMap {
  Complex a{1.0, 0.0};
  Complex b{0.0, 0.0};

  MoebiusMap() = default;
  MoebiusMap(Complex a_, Complex b_) : a(a_), b(b_) {}

  static MoebiusMap identity() { return {}; }

  static MoebiusMap rotation(double phi) {
    return {Complex(std::cos(phi / 2), std::sin(phi / 2)), Complex(0, 0)};
  }

  // Hyperbolic translation of length ell along the axis through 0 in the
  // direction e^{i phi}; moves 0 to tanh(ell/2) e^{i phi}.
  static MoebiusMap translation(double phi, double ell) {
    Complex u(std::cos(phi), std::sin(phi));
    return {Complex(std::cosh(ell / 2), 0.0), u * std::sinh(ell / 2)};
  }

  // Disc translation taking p to 0.
  static MoebiusMap to_origin(DiscPoint p) {
    Complex z = p.c();
    double n = std::sqrt(1.0 - std::norm(z));
    return {Complex(1.0 / n, 0.0), -z / n};
  }

  double det_defect() const { return std::norm(a) - std::norm(b) - 1.0; }

  MoebiusMap normalized() const {
    double n = std::norm(a) - std::norm(b);
    double s = 1.0 / std::sqrt(n);
    return {a * s, b * s};
  }

  MoebiusMap inverse() const { return {std::conj(a), -b}; }

  Complex apply(Complex z) const {
    return (a * z + b) / (std::conj(b) * z + std::conj(a));
  }

  DiscPoint apply(DiscPoint p) const { return DiscPoint(apply(p.c())); }

  BoundaryPoint apply(BoundaryPoint xi) const {
    Complex e = xi.unit();
    return BoundaryPoint(std::arg(a * e + b) - std::arg(std::conj(b) * e + std::conj(a)));
  }

  // |g'(xi)| on the circle; the derivative cocycle atom.
  double boundary_derivative(BoundaryPoint xi) const {
    return 1.0 / std::norm(std::conj(b) * xi.unit() + std::conj(a));
  }

  bool close_to(const MoebiusMap& o, double eps) const {
    return std::abs(a - o.a) <= eps && std::abs(b - o.b) <= eps;
  }

  // Up to the SL/PSL sign ambiguity.
  bool same_isometry(const MoebiusMap& o, double eps) const {
    return close_to(o, eps) || close_to(MoebiusMap{-o.a, -o.b}, eps);
  }

  // Real trace magnitude of the SU(1,1) matrix: |a + conj(a)| = 2 |Re a|.
  double trace_abs() const { return 2.0 * std::abs(a.real()); }
};

inline MoebiusMap compose(const MoebiusMap& g, const MoebiusMap& h) {
  MoebiusMap r{g.a * h.a + g.b * std::conj(h.b), g.a * h.b + g.b * std::conj(h.a)};
  return r.normalized();
}

inline double disc_distance(DiscPoint z, DiscPoint w) {
  double d2 = std::norm(z.c() - w.c());
  double x = 1.0 + 2.0 * d2 / ((1.0 - z.abs2()) * (1.0 - w.abs2()));
  return std::acosh(std::max(1.0, x));
}

inline double poisson_kernel(DiscPoint x, BoundaryPoint xi) {
  return (1.0 - x.abs2()) / std::norm(xi.unit() - x.c());
}

// B_xi(a, b) = log P(b, xi) - log P(a, xi).
inline double busemann(BoundaryPoint xi, DiscPoint a, DiscPoint b) {
  return std::log(poisson_kernel(b, xi)) - std::log(poisson_kernel(a, xi));
}

enum class Side { Left, Right, On };

// Oriented complete geodesic from src (gamma^-) to dst (gamma^+). Backed by
// its Euclidean circle orthogonal to the unit circle, or by a diameter when
// the endpoints are antipodal within tolerance.
class OrientedGeodesic {
public:
  OrientedGeodesic(BoundaryPoint src, BoundaryPoint dst);

  // Real-axis diameter; placeholder for containers of geodesics.
  OrientedGeodesic() : OrientedGeodesic(BoundaryPoint(std::numbers::pi), BoundaryPoint(0.0)) {}

  static OrientedGeodesic from_endpoints(BoundaryPoint src, BoundaryPoint dst) {
    return OrientedGeodesic(src, dst);
  }

  // Complete geodesic through two points of the closed disc (orientation is
  // the anticlockwise order of the computed boundary endpoints as seen from
  // the segment; callers reorient as needed).
  static OrientedGeodesic through(DiscPoint p, DiscPoint q);

  BoundaryPoint src() const { return src_; }
  BoundaryPoint dst() const { return dst_; }
  bool is_diameter() const { return diameter_; }
  Complex center() const { return center_; }  // valid when !is_diameter()
  double radius() const { return radius_; }

  // Arc-length parametrization; t = 0 at the point closest to the origin,
  // increasing towards dst.
  DiscPoint point_at(double t) const;
  double param_of(DiscPoint z) const;

  // Orientation convention pinned by: side_of(diameter 0->pi, i/2) == Left.
  Side side_of(DiscPoint z, double eps = tol::kOn) const;

  // Signed offset used by side_of; negative on the Left side.
  double signed_offset(DiscPoint z) const;

  // Intersection point inside the open disc, if the geodesics cross.
  std::optional<DiscPoint> intersect(const OrientedGeodesic& other) const;

  // Intersection of this geodesic with the geodesic segment [p, q]
  // (p, q in the closed disc).
  std::optional<DiscPoint> crosses_segment(DiscPoint p, DiscPoint q) const;

  // Euclidean distance from the origin to the geodesic.
  double euclid_dist_origin() const;

  // Image under a Moebius map (endpoints mapped, circle recomputed).
  OrientedGeodesic image(const MoebiusMap& g) const {
    return OrientedGeodesic(g.apply(src_), g.apply(dst_));
  }

private:
  // Straightening map: sends the geodesic to the real diameter oriented
  // from -1 to +1, with the closest point to the origin at 0.
  Complex straighten(Complex z) const;
  Complex unstraighten(Complex z) const;

  BoundaryPoint src_, dst_;
  bool diameter_ = false;
  Complex center_{0, 0};
  double radius_ = 0.0;
  MoebiusMap T_;      // straightening map
  MoebiusMap Tinv_;
};

// Boundary arc, left-closed right-open anticlockwise: [lo, hi).
struct Arc {
  double lo = 0.0;   // in [0, 2pi)
  double len = 0.0;  // in (0, 2pi]

  Arc() = default;
  Arc(BoundaryPoint lo_, BoundaryPoint hi_)
      : lo(lo_.theta), len(ang::ccw(lo_.theta, hi_.theta)) {
    if (len == 0.0) len = kTwoPi;  // full circle when endpoints coincide
  }
  static Arc from_lo_len(double lo_, double len_) {
    Arc a;
    a.lo = ang::norm(lo_);
    a.len = len_;
    return a;
  }

  double hi() const { return ang::norm(lo + len); }
  double mid() const { return ang::norm(lo + len / 2.0); }

  bool contains(double theta) const { return ang::ccw(lo, theta) < len; }
  bool contains(BoundaryPoint p) const { return contains(p.theta); }

  // Containment of arcs up to eps slack at the endpoints.
  bool contains_arc(const Arc& o, double eps) const {
    if (len >= kTwoPi - 1e-15) return true;
    double off = ang::ccw(lo, o.lo);
    if (off > len + eps && off < kTwoPi - eps) return false;
    if (off >= kTwoPi - eps) off = 0.0;
    return off + o.len <= len + eps;
  }

  // Intersection assuming o overlaps this arc in a single sub-arc.
  std::optional<Arc> intersect(const Arc& o) const {
    double start = ang::ccw(lo, o.lo) < len ? o.lo : (o.contains(lo) ? lo : -1.0);
    if (start < 0.0) return std::nullopt;
    double end_off = std::min(ang::ccw(start, ang::norm(lo + len)),
                              ang::ccw(start, ang::norm(o.lo + o.len)));
    if (end_off <= 0.0) return std::nullopt;
    return Arc::from_lo_len(start, end_off);
  }
};

}  // namespace bsld

#endif
