#include "bsld/geometry.hpp"

#include <algorithm>

namespace bsld {

namespace {

// Root of s^2 - 2 m s + 1 = 0 with |s| < 1, if any. The two roots have
// product 1, so exactly one lies inside the unit interval iff |m| > 1.
std::optional<double> inner_root(double m) {
  if (std::abs(m) <= 1.0) return std::nullopt;
  double s = (m > 0 ? 1.0 : -1.0) * (std::abs(m) - std::sqrt(m * m - 1.0));
  return s;
}

}  // namespace

OrientedGeodesic::OrientedGeodesic(BoundaryPoint src, BoundaryPoint dst)
    : src_(src), dst_(dst) {
  double sep = ang::ccw(src.theta, dst.theta);
  if (std::min(sep, kTwoPi - sep) <= tol::kDegenerate)
    throw DegenerateGeodesic("geodesic endpoints coincide");

  diameter_ = std::abs(sep - std::numbers::pi) < tol::kAntipodal;
  DiscPoint p0(0.0, 0.0);
  if (!diameter_) {
    double t1 = src.theta, t2 = dst.theta;
    double det = std::sin(t2 - t1);
    center_ = Complex((std::sin(t2) - std::sin(t1)) / det,
                      (std::cos(t1) - std::cos(t2)) / det);
    radius_ = std::sqrt(std::max(0.0, std::norm(center_) - 1.0));
    double ac = std::abs(center_);
    p0 = DiscPoint(center_ * ((ac - radius_) / ac));
  }
  MoebiusMap t1m = MoebiusMap::to_origin(p0);
  double d_angle = t1m.apply(dst).theta;
  T_ = compose(MoebiusMap::rotation(-d_angle), t1m);
  Tinv_ = T_.inverse();
}

Complex OrientedGeodesic::straighten(Complex z) const { return T_.apply(z); }
Complex OrientedGeodesic::unstraighten(Complex z) const { return Tinv_.apply(z); }

DiscPoint OrientedGeodesic::point_at(double t) const {
  return DiscPoint(unstraighten(Complex(std::tanh(t / 2.0), 0.0)));
}

double OrientedGeodesic::param_of(DiscPoint z) const {
  double x = std::clamp(straighten(z.c()).real(), -1.0 + 1e-16, 1.0 - 1e-16);
  return 2.0 * std::atanh(x);
}

double OrientedGeodesic::signed_offset(DiscPoint z) const {
  return straighten(z.c()).imag();
}

Side OrientedGeodesic::side_of(DiscPoint z, double eps) const {
  double o = signed_offset(z);
  if (std::abs(o) <= eps) return Side::On;
  return o < 0.0 ? Side::Left : Side::Right;
}

double OrientedGeodesic::euclid_dist_origin() const {
  return diameter_ ? 0.0 : std::abs(center_) - radius_;
}

std::optional<DiscPoint> OrientedGeodesic::intersect(const OrientedGeodesic& other) const {
  // Geodesic circles satisfy |c|^2 - r^2 = 1, so the radical line of any two
  // of them passes through the origin; intersections lie on a line s * u.
  Complex u;
  Complex qc;  // a circle to intersect the line with, if any
  bool have_circle = true;
  if (diameter_ && other.diameter_) {
    Complex u1 = dst_.unit(), u2 = other.dst_.unit();
    if (std::abs(u1.real() * u2.imag() - u1.imag() * u2.real()) < 1e-14)
      return std::nullopt;  // parallel diameters
    return DiscPoint(0.0, 0.0);
  } else if (diameter_) {
    u = dst_.unit();
    qc = other.center_;
  } else if (other.diameter_) {
    u = other.dst_.unit();
    qc = center_;
  } else {
    Complex d = other.center_ - center_;
    if (std::abs(d) < 1e-14) return std::nullopt;  // same carrier circle
    u = Complex(0, 1) * d / std::abs(d);
    qc = center_;
  }
  (void)have_circle;
  double m = (std::conj(u) * qc).real();
  auto s = inner_root(m);
  if (!s) return std::nullopt;
  DiscPoint w(u * *s);
  if (!w.in_disc()) return std::nullopt;
  return w;
}

OrientedGeodesic OrientedGeodesic::through(DiscPoint p, DiscPoint q) {
  Complex pc = p.c(), qc = q.c();
  if (std::abs(pc - qc) < tol::kDegenerate)
    throw DegenerateGeodesic("carrier points coincide");
  double cross = pc.real() * qc.imag() - pc.imag() * qc.real();

  if (std::abs(cross) < 1e-13) {
    Complex u = (qc - pc) / std::abs(qc - pc);
    return OrientedGeodesic(BoundaryPoint::from_complex(-u), BoundaryPoint::from_complex(u));
  }

  // Circle through p, q orthogonal to the unit circle:
  // 2 Re(conj(c) p) = 1 + |p|^2 and likewise for q.
  double bp = 0.5 * (1.0 + p.abs2());
  double bq = 0.5 * (1.0 + q.abs2());
  Complex c((bp * qc.imag() - bq * pc.imag()) / cross,
            (pc.real() * bq - qc.real() * bp) / cross);
  double r2 = std::norm(c) - 1.0;
  if (r2 <= 0.0) throw DegenerateGeodesic("carrier circle not orthogonal to boundary");
  double ac = std::abs(c);
  double half = std::acos(std::clamp((1.0 + std::norm(c) - r2) / (2.0 * ac), -1.0, 1.0));
  double mid = std::arg(c);
  return OrientedGeodesic(BoundaryPoint(mid - half), BoundaryPoint(mid + half));
}

std::optional<DiscPoint> OrientedGeodesic::crosses_segment(DiscPoint p, DiscPoint q) const {
  Complex pc = p.c(), qc = q.c();
  if (std::abs(pc - qc) < tol::kDegenerate)
    throw DegenerateGeodesic("segment endpoints coincide");
  double cross = pc.real() * qc.imag() - pc.imag() * qc.real();

  if (std::abs(cross) < 1e-13) {
    // Carrier is a diameter through p and q.
    Complex u = (qc - pc) / std::abs(qc - pc);
    OrientedGeodesic carrier(BoundaryPoint::from_complex(-u), BoundaryPoint::from_complex(u));
    auto w = intersect(carrier);
    if (!w) return std::nullopt;
    double sp = (std::conj(u) * pc).real(), sq = (std::conj(u) * qc).real();
    double sw = (std::conj(u) * w->c()).real();
    if (sw < std::min(sp, sq) - tol::kOn || sw > std::max(sp, sq) + tol::kOn)
      return std::nullopt;
    return w;
  }

  OrientedGeodesic carrier = through(p, q);
  Complex c = carrier.center();
  auto w = intersect(carrier);
  if (!w) return std::nullopt;

  // Betweenness along the carrier via angles about its center; the in-disc
  // arc subtends less than pi.
  double a_p = std::arg(pc - c), a_q = std::arg(qc - c), a_w = std::arg(w->c() - c);
  double full = ang::norm_pm(a_q - a_p), part = ang::norm_pm(a_w - a_p);
  if (full * part < -1e-12 || std::abs(part) > std::abs(full) + 1e-12)
    return std::nullopt;
  return w;
}

}  // namespace bsld
