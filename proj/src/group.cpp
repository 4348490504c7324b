#include "bsld/group.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <set>
#include <unordered_map>

#include "bsld/errors.hpp"

namespace bsld {

namespace {

// Euclidean tangent direction at `from` of the geodesic segment toward `to`
// (the disc model is conformal, so Euclidean angles are hyperbolic angles).
double ray_direction(DiscPoint from, DiscPoint to) {
  OrientedGeodesic line = OrientedGeodesic::through(from, to);
  Complex d = to.c() - from.c();
  if (line.is_diameter()) return std::arg(d);
  Complex t = Complex(0, 1) * (from.c() - line.center());
  if ((std::conj(t) * d).real() < 0.0) t = -t;
  return std::arg(t);
}

}  // namespace

FundamentalDomain::FundamentalDomain(std::vector<DomainSide> sides,
                                     std::vector<std::pair<GeneratorLabel, MoebiusMap>> pairings)
    : sides_(std::move(sides)) {
  const int m = num_sides();
  if (m < 3) throw BadDomainFile("fundamental polygon needs at least 3 sides");

  for (int i = 0; i < m; ++i) {
    const DomainSide& s = sides_[static_cast<size_t>(i)];
    const DomainSide& prev = sides_[static_cast<size_t>((i + m - 1) % m)];
    if (std::abs(s.v0.c() - prev.v1.c()) > 1e-8)
      throw BadDomainFile("polygon sides are not consecutive at vertex " + std::to_string(i));
    if (s.carrier.side_of(DiscPoint(0, 0)) != Side::Right)
      throw BadDomainFile("side carrier " + std::to_string(i) +
                          " is not oriented with the origin on its right");
    for (DiscPoint v : {s.v0, s.v1})
      if (std::abs(s.carrier.signed_offset(v)) > 1e-8)
        throw BadDomainFile("side " + std::to_string(i) + " does not lie on its carrier");
    if (side_of_label_.count(s.label))
      throw BadDomainFile("duplicate exterior label " + s.label.str());
    side_of_label_[s.label] = i;
  }

  vertices_.reserve(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    DomainVertex v;
    v.p = sides_[static_cast<size_t>(i)].v0;
    v.ideal = v.p.abs2() >= 1.0 - tol::kVertex;
    has_cusps_ = has_cusps_ || v.ideal;
    vertices_.push_back(v);
  }

  for (const auto& [label, g] : pairings) {
    gens_[label] = g.normalized();
    if (!gens_.count(label.inverse())) gens_[label.inverse()] = g.inverse().normalized();
  }
  for (const auto& s : sides_)
    if (!gens_.count(s.label))
      throw BadDomainFile("no pairing matrix for exterior label " + s.label.str());

  std::set<int> idx;
  for (const auto& s : sides_) idx.insert(s.label.index);
  gen_indices_.assign(idx.begin(), idx.end());
}

const MoebiusMap& FundamentalDomain::matrix(GeneratorLabel l) const {
  auto it = gens_.find(l);
  if (it == gens_.end()) throw BadDomainFile("unknown generator label " + l.str());
  return it->second;
}

int FundamentalDomain::side_with_label(GeneratorLabel l) const {
  auto it = side_of_label_.find(l);
  if (it == side_of_label_.end()) throw BadDomainFile("no side with exterior label " + l.str());
  return it->second;
}

std::vector<GeneratorLabel> FundamentalDomain::all_labels() const {
  std::vector<GeneratorLabel> out;
  out.reserve(sides_.size());
  for (const auto& s : sides_) out.push_back(s.label);
  return out;
}

Arc FundamentalDomain::branch_arc(int i) const {
  double lo = p_point(i).theta;
  double hi = p_point((i + 1) % num_sides()).theta;
  return Arc::from_lo_len(lo, ang::ccw(lo, hi));
}

void FundamentalDomain::verify_side_pairing(double eps) const {
  for (int i = 0; i < num_sides(); ++i) {
    const DomainSide& s = sides_[static_cast<size_t>(i)];
    const MoebiusMap& g = matrix(s.label);
    const MoebiusMap& ginv = matrix(s.label.inverse());
    if (!compose(g, ginv).same_isometry(MoebiusMap::identity(), 1e-10))
      throw PairingMismatch("matrices of " + s.label.str() + " and its inverse do not cancel");

    const DomainSide& partner = sides_[static_cast<size_t>(side_with_label(s.label.inverse()))];
    Complex a = g.apply(partner.v0.c());
    Complex b = g.apply(partner.v1.c());
    bool direct = std::abs(a - s.v0.c()) < eps && std::abs(b - s.v1.c()) < eps;
    bool flipped = std::abs(a - s.v1.c()) < eps && std::abs(b - s.v0.c()) < eps;
    if (!direct && !flipped)
      throw PairingMismatch("pairing " + s.label.str() + " does not carry side " +
                            partner.label.str() + " onto side " + std::to_string(i));
  }
}

std::vector<VertexCycle> FundamentalDomain::vertex_cycles(int max_steps) const {
  const int m = num_sides();
  std::vector<VertexCycle> cycles;
  cycles.reserve(static_cast<size_t>(m));

  for (int v = 0; v < m; ++v) {
    VertexCycle cyc;
    cyc.vertex = v;
    cyc.ideal = vertices_[static_cast<size_t>(v)].ideal;

    MoebiusMap h = MoebiusMap::identity();
    int t = v;        // vertex of R currently mapped onto the cycled vertex
    int s = v;        // side of R crossed next (v0 of side v is vertex v)
    const int t0 = t, s0 = s;

    for (int step = 0;; ++step) {
      if (step > max_steps)
        throw CycleNotClosing("vertex " + std::to_string(v) + " cycle exceeded " +
                              std::to_string(max_steps) + " copies");
      cyc.steps.push_back({h, t, s});

      GeneratorLabel l = sides_[static_cast<size_t>(s)].label;
      h = compose(h, matrix(l));
      int k = side_with_label(l.inverse());
      // The copy entered shares the image of side k; locate the vertex of R
      // carried onto the cycled vertex.
      Complex u = matrix(l.inverse()).apply(vertices_[static_cast<size_t>(t)].p.c());
      const DomainSide& ks = sides_[static_cast<size_t>(k)];
      double d0 = std::abs(u - ks.v0.c()), d1 = std::abs(u - ks.v1.c());
      if (std::min(d0, d1) > 1e-6)
        throw PairingMismatch("vertex cycle at vertex " + std::to_string(v) +
                              " left the vertex set");
      t = d0 < d1 ? k : (k + 1) % m;
      s = (k == t) ? (t + m - 1) % m : t;
      if (t == t0 && s == s0) break;
    }
    cyc.closing = h;
    if (!cyc.ideal && !cyc.closing.same_isometry(MoebiusMap::identity(), 1e-8))
      throw CycleNotClosing("interior vertex " + std::to_string(v) +
                            " cycle transformation is not the identity");
    cycles.push_back(std::move(cyc));
  }
  return cycles;
}

void FundamentalDomain::verify_even_corners(double eps) const {
  for (const VertexCycle& cyc : vertex_cycles()) {
    if (cyc.ideal) continue;
    DiscPoint v = vertices_[static_cast<size_t>(cyc.vertex)].p;

    // One ray per copy: the side crossed by that copy, as seen from v. The
    // cycle visits each shared side once per period.
    std::vector<double> rays;
    for (const VertexCycleStep& st : cyc.steps) {
      const DomainSide& side = sides_[static_cast<size_t>(st.crossed_side)];
      DiscPoint other = (st.crossed_side == st.local_vertex) ? side.v1 : side.v0;
      rays.push_back(ray_direction(v, DiscPoint(st.h.apply(other.c()))));
    }

    std::vector<bool> matched(rays.size(), false);
    for (size_t i = 0; i < rays.size(); ++i) {
      if (matched[i]) continue;
      bool found = false;
      for (size_t j = 0; j < rays.size(); ++j) {
        if (j == i || matched[j]) continue;
        if (std::abs(ang::norm_pm(rays[i] - rays[j] - std::numbers::pi)) < eps) {
          matched[i] = matched[j] = true;
          found = true;
          break;
        }
      }
      if (!found)
        throw OddCorner("side ray at vertex " + std::to_string(cyc.vertex) +
                        " has no opposite continuation");
    }
  }
}

AdmissibilityReport FundamentalDomain::check_admissible() const {
  AdmissibilityReport rep;
  rep.enough_sides = num_sides() >= 4;
  try {
    verify_side_pairing();
    rep.side_pairing_ok = true;
  } catch (const Error&) {
  }
  try {
    verify_even_corners();
    rep.even_corners_ok = true;
    if (num_sides() == 4 && !has_cusps_) {
      // With only four sides every interior vertex must still be met by at
      // least three complete geodesics of the net.
      for (const VertexCycle& cyc : vertex_cycles()) {
        std::set<long long> lines;
        DiscPoint v = vertices_[static_cast<size_t>(cyc.vertex)].p;
        for (const VertexCycleStep& st : cyc.steps) {
          const DomainSide& side = sides_[static_cast<size_t>(st.crossed_side)];
          DiscPoint other = (st.crossed_side == st.local_vertex) ? side.v1 : side.v0;
          double dir = ang::norm(ray_direction(v, DiscPoint(st.h.apply(other.c()))));
          double line = std::fmod(dir, std::numbers::pi);
          lines.insert(llround(line / 1e-6));
        }
        if (lines.size() < 3) rep.even_corners_ok = false;
      }
    }
  } catch (const Error&) {
  }
  return rep;
}

void FundamentalDomain::require_admissible() const {
  if (num_sides() < 4) throw BadDomainFile("admissible domains need at least 4 sides");
  verify_side_pairing();
  verify_even_corners();
  AdmissibilityReport rep = check_admissible();
  if (!rep.ok()) throw OddCorner("fundamental domain is not admissible");
}

std::vector<BoundaryPoint> FundamentalDomain::network_endpoints(int vertex,
                                                                double cusp_gap) const {
  const VertexCycle cyc = vertex_cycles()[static_cast<size_t>(vertex)];
  const DiscPoint vp = vertices_[static_cast<size_t>(vertex)].p;

  std::vector<double> thetas;
  auto add = [&thetas](BoundaryPoint p) { thetas.push_back(p.theta); };

  const int m = num_sides();
  for (const VertexCycleStep& st : cyc.steps) {
    for (int side_idx : {(st.local_vertex + m - 1) % m, st.local_vertex}) {
      OrientedGeodesic img = sides_[static_cast<size_t>(side_idx)].carrier.image(st.h);
      add(img.src());
      add(img.dst());
    }
  }

  if (cyc.ideal) {
    // The cusp's parabolic cycle transformation generates the rest of the
    // (infinite) pencil; stop once new endpoints cluster at the cusp.
    double cusp_theta = std::arg(vp.c());
    std::vector<double> base = thetas;
    for (const MoebiusMap& p : {cyc.closing, cyc.closing.inverse()}) {
      for (double th : base) {
        BoundaryPoint w(th);
        for (long k = 0; k < 100'000'000L; ++k) {
          BoundaryPoint next = p.apply(w);
          double step = std::abs(ang::norm_pm(next.theta - w.theta));
          w = next;
          if (std::abs(ang::norm_pm(w.theta - cusp_theta)) > cusp_gap) thetas.push_back(w.theta);
          if (step <= cusp_gap) break;
        }
      }
    }
    thetas.push_back(ang::norm(cusp_theta));
  }

  std::sort(thetas.begin(), thetas.end());
  std::vector<BoundaryPoint> out;
  for (double th : thetas)
    if (out.empty() || th - out.back().theta > 1e-9) out.push_back(BoundaryPoint(th));
  if (out.size() > 1 && ang::ccw(out.back().theta, out.front().theta) <= 1e-9) out.pop_back();
  return out;
}

double FundamentalDomain::alpha_word() const {
  double best = 0.0;
  DiscPoint o(0, 0);
  for (const auto& [label, g] : gens_)
    best = std::max(best, disc_distance(o, g.apply(o)));
  return best;
}

FundamentalDomain FundamentalDomain::octagon() {
  // Regular octagon with vertex angle pi/4 (genus-2 surface group), opposite
  // sides paired. Side midpoints sit at distance d0 with cosh d0 = cot(pi/8);
  // vertices at distance r with cosh r = cot^2(pi/8).
  const double pi = std::numbers::pi;
  const double d0 = std::acosh(1.0 / std::tan(pi / 8.0));
  const double rv = std::acosh(std::pow(1.0 / std::tan(pi / 8.0), 2));
  const double rho_v = std::tanh(rv / 2.0);
  const double delta = std::asin(1.0 / std::cosh(d0));  // carrier half-angle

  std::vector<DomainSide> sides;
  std::vector<std::pair<GeneratorLabel, MoebiusMap>> pairings;
  for (int k = 0; k < 8; ++k) {
    double phi = k * pi / 4.0;
    DomainSide s;
    s.label = (k < 4) ? GeneratorLabel{k, false} : GeneratorLabel{k - 4, true};
    double a0 = (2 * k - 1) * pi / 8.0, a1 = (2 * k + 1) * pi / 8.0;
    s.v0 = DiscPoint(rho_v * std::cos(a0), rho_v * std::sin(a0));
    s.v1 = DiscPoint(rho_v * std::cos(a1), rho_v * std::sin(a1));
    s.carrier = OrientedGeodesic(BoundaryPoint(phi - delta), BoundaryPoint(phi + delta));
    sides.push_back(s);
    if (k < 4) pairings.push_back({{k, false}, MoebiusMap::translation(phi, 2.0 * d0)});
  }
  return FundamentalDomain(std::move(sides), std::move(pairings));
}

FundamentalDomain FundamentalDomain::quadrilateral() {
  // Free group generated by z -> z + 2 and z -> z / (2z + 1) in the upper
  // half-plane, with the ideal quadrilateral |Re z| <= 1, |z +/- 1/2| >= 1/2
  // as fundamental domain, conjugated to the disc by z -> (z - i) / (z + i).
  auto to_disc = [](double m00, double m01, double m10, double m11) {
    Complex i(0.0, 1.0);
    Complex C[2][2] = {{1.0, -i}, {1.0, i}};
    Complex M[2][2] = {{m00, m01}, {m10, m11}};
    Complex Ci[2][2] = {{i, i}, {-1.0, 1.0}};  // 2i * C^{-1}
    Complex CM[2][2], N[2][2];
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) CM[r][c] = C[r][0] * M[0][c] + C[r][1] * M[1][c];
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        N[r][c] = (CM[r][0] * Ci[0][c] + CM[r][1] * Ci[1][c]) / (2.0 * i);
    MoebiusMap g{N[0][0], N[0][1]};
    if (std::abs(N[1][0] - std::conj(g.b)) > 1e-12 || std::abs(N[1][1] - std::conj(g.a)) > 1e-12)
      throw BadDomainFile("conjugated matrix is not a disc isometry");
    return g.normalized();
  };
  MoebiusMap A = to_disc(1, 2, 0, 1);
  MoebiusMap B = to_disc(1, 0, 2, 1);

  const double pi = std::numbers::pi;
  auto cusp = [&pi](int q) {
    return DiscPoint(std::cos(q * pi / 2.0), std::sin(q * pi / 2.0));
  };
  auto carrier = [&pi](int q) {
    return OrientedGeodesic(BoundaryPoint(q * pi / 2.0), BoundaryPoint((q + 1) * pi / 2.0));
  };

  std::vector<DomainSide> sides(4);
  const GeneratorLabel labels[4] = {{0, true}, {1, true}, {1, false}, {0, false}};
  for (int q = 0; q < 4; ++q) {
    sides[static_cast<size_t>(q)] =
        DomainSide{labels[q], cusp(q), cusp(q + 1), carrier(q)};
  }
  return FundamentalDomain(std::move(sides),
                           {{GeneratorLabel{0, false}, A}, {GeneratorLabel{1, false}, B}});
}

namespace {

struct MatKey {
  std::array<long long, 4> q;
  bool operator==(const MatKey& o) const { return q == o.q; }
};

struct MatKeyHash {
  size_t operator()(const MatKey& k) const {
    size_t h = 1469598103934665603ull;
    for (long long v : k.q) {
      h ^= static_cast<size_t>(v);
      h *= 1099511628211ull;
    }
    return h;
  }
};

MatKey key_of(const MoebiusMap& g) {
  // Deduplicate up to sign on a 1e-6 grid.
  std::array<double, 4> e{g.a.real(), g.a.imag(), g.b.real(), g.b.imag()};
  double s = 1.0;
  for (double v : e)
    if (std::abs(v) > 1e-9) {
      s = v > 0 ? 1.0 : -1.0;
      break;
    }
  MatKey k;
  for (int i = 0; i < 4; ++i) k.q[static_cast<size_t>(i)] = llround(s * e[static_cast<size_t>(i)] / 1e-6);
  return k;
}

std::vector<GroupElement> bfs_ball(const FundamentalDomain& dom, int radius,
                                   const MoebiusMap* target, int* found_length) {
  std::vector<GeneratorLabel> labels = dom.all_labels();
  std::vector<GroupElement> ball;
  std::unordered_map<MatKey, int, MatKeyHash> seen;

  GroupElement id{{}, MoebiusMap::identity()};
  seen.emplace(key_of(id.g), 0);
  ball.push_back(id);
  if (target && target->same_isometry(id.g, 1e-6)) {
    *found_length = 0;
    return ball;
  }

  size_t frontier_begin = 0;
  for (int r = 1; r <= radius; ++r) {
    size_t frontier_end = ball.size();
    for (size_t i = frontier_begin; i < frontier_end; ++i) {
      GroupElement cur = ball[i];
      for (const GeneratorLabel& l : labels) {
        if (!cur.word.empty() && cur.word.back() == l.inverse()) continue;
        MoebiusMap g = compose(cur.g, dom.matrix(l));
        if (!seen.emplace(key_of(g), r).second) continue;
        GroupElement next{cur.word, g};
        next.word.push_back(l);
        if (target && target->same_isometry(g, 1e-6)) {
          *found_length = r;
          ball.push_back(std::move(next));
          return ball;
        }
        ball.push_back(std::move(next));
      }
    }
    frontier_begin = frontier_end;
  }
  return ball;
}

}  // namespace

std::optional<int> word_length_bfs(const FundamentalDomain& dom, const MoebiusMap& g,
                                   int max_radius) {
  int len = -1;
  bfs_ball(dom, max_radius, &g, &len);
  if (len < 0) return std::nullopt;
  return len;
}

std::vector<GroupElement> ball_bfs(const FundamentalDomain& dom, int radius) {
  return bfs_ball(dom, radius, nullptr, nullptr);
}

}  // namespace bsld
