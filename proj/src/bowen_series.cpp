#include "bsld/bowen_series.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

#include "bsld/errors.hpp"

namespace bsld {

BowenSeriesMap::BowenSeriesMap(const FundamentalDomain& dom) : dom_(dom) {
  const int m = dom.num_sides();
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    Branch br;
    br.side = i;
    br.label = dom.side(i).label;
    br.g = dom.matrix(br.label).inverse();
    br.arc = dom.branch_arc(i);
    if (br.arc.len <= 0.0)
      throw CarrierOrderViolation("carrier source endpoints are not cyclically ordered");
    total += br.arc.len;
    branches_.push_back(br);
  }
  if (std::abs(total - 2.0 * std::numbers::pi) > 1e-9)
    throw CarrierOrderViolation("branch arcs do not tile the circle");
}

int BowenSeriesMap::branch_at(BoundaryPoint xi) const {
  for (int i = 0; i < num_branches(); ++i)
    if (branches_[static_cast<size_t>(i)].arc.contains(xi)) return i;
  return num_branches() - 1;  // unreachable: arcs tile the circle
}

BoundaryPoint BowenSeriesMap::apply(BoundaryPoint xi) const {
  return branches_[static_cast<size_t>(branch_at(xi))].g.apply(xi);
}

double BowenSeriesMap::derivative(BoundaryPoint xi) const {
  return branches_[static_cast<size_t>(branch_at(xi))].g.boundary_derivative(xi);
}

std::vector<GeneratorLabel> BowenSeriesMap::expansion(BoundaryPoint xi, int n) const {
  std::vector<GeneratorLabel> out;
  out.reserve(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    const Branch& br = branches_[static_cast<size_t>(branch_at(xi))];
    out.push_back(br.label);
    xi = br.g.apply(xi);
  }
  return out;
}

std::pair<double, double> derivative_bracket(const MoebiusMap& g, const Arc& arc) {
  // |g'(e^{i theta})| = 1 / (|a|^2 + |b|^2 + 2|a||b| cos(theta + psi)),
  // psi = arg(a conj(b)); unimodal on any arc shorter than the full circle.
  // The denominator is evaluated as (na-nb)^2 + 4 na nb cos^2(theta/2) --
  // a sum of non-negative terms -- because the direct form cancels
  // catastrophically near cos(theta) = -1 once the matrix entries are large
  // (long words), and (na-nb) itself is recovered stably from the
  // determinant: na - nb = (|a|^2 - |b|^2) / (na + nb).
  double na = std::abs(g.a), nb = std::abs(g.b);
  double det = std::norm(g.a) - std::norm(g.b);
  double gap2 = (det / (na + nb)) * (det / (na + nb));
  double c4 = 4.0 * na * nb;
  auto value = [&](double theta) {
    double half = std::cos(0.5 * theta);
    return 1.0 / (gap2 + c4 * half * half);
  };

  double psi = (nb > 0.0) ? std::arg(g.a * std::conj(g.b)) : 0.0;
  double lo = 1e300, hi = -1e300;
  auto consider = [&](double theta) {
    double v = value(theta + psi);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  };
  consider(arc.lo);
  consider(arc.lo + arc.len);
  consider(arc.mid());
  for (double crit : {-psi, std::numbers::pi - psi})
    if (arc.contains(ang::norm(crit))) consider(crit);
  return {lo, hi};
}

namespace {

struct RawCut {
  double theta;
  int vertex;
};

double wrap_dist(double a, double b) { return std::abs(ang::norm_pm(a - b)); }

}  // namespace

MarkovPartition::MarkovPartition(const BowenSeriesMap& f) : f_(f) {
  const FundamentalDomain& dom = f.domain();
  const int m = dom.num_sides();
  const auto cycles = dom.vertex_cycles();

  std::vector<RawCut> raw;
  // Neutral cusp regions as (start, length) arcs; resolved to cells below.
  std::vector<Arc> neutral_regions;

  for (int i = 0; i < m; ++i) raw.push_back({dom.p_point(i).theta, -1});

  for (int v = 0; v < m; ++v) {
    if (!dom.vertex(v).ideal) {
      for (BoundaryPoint p : dom.network_endpoints(v)) raw.push_back({p.theta, v});
      continue;
    }

    // Cusp: the two incident carriers end at the cusp; their far endpoints
    // seed the one-sided families pushed towards the cusp by the parabolic
    // cycle transformation. The anticlockwise side keeps the first pushed
    // point, the clockwise side the first two.
    const MoebiusMap& p = cycles[static_cast<size_t>(v)].closing;
    const MoebiusMap pinv = p.inverse();
    double tv = ang::norm(std::arg(dom.vertex(v).p.c()));
    raw.push_back({tv, v});

    std::vector<double> seeds;
    for (int side_idx : {(v + m - 1) % m, v}) {
      const OrientedGeodesic& carrier = dom.side(side_idx).carrier;
      for (BoundaryPoint e : {carrier.src(), carrier.dst()})
        if (wrap_dist(e.theta, tv) > tol::kVertex) seeds.push_back(e.theta);
    }
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end(),
                            [](double a, double b) { return wrap_dist(a, b) < 1e-9; }),
                seeds.end());

    for (double eta : seeds) {
      // The parabolic rotates every orbit towards the cusp from one side
      // only; pick the power that keeps the seed on its own side.
      bool ccw_side = ang::ccw(tv, eta) < std::numbers::pi;
      auto same_side_and_closer = [&](const MoebiusMap& g) {
        double img = g.apply(BoundaryPoint(eta)).theta;
        return (ang::ccw(tv, img) < std::numbers::pi) == ccw_side &&
               wrap_dist(img, tv) < wrap_dist(eta, tv);
      };
      const MoebiusMap& push = same_side_and_closer(p) ? p : pinv;
      if (&push == &pinv && !same_side_and_closer(pinv))
        throw NotMarkov("cusp family seed is not pushed towards the cusp");
      double q1 = push.apply(BoundaryPoint(eta)).theta;
      double q2 = push.apply(BoundaryPoint(q1)).theta;
      raw.push_back({q1, v});
      if (ccw_side) {
        neutral_regions.push_back(Arc::from_lo_len(tv, ang::ccw(tv, q1)));
      } else {
        raw.push_back({q2, v});
        neutral_regions.push_back(Arc::from_lo_len(q2, ang::ccw(q2, tv)));
      }
    }
  }

  // Deduplicate on a 1e-9 angular grid, preferring vertex provenance.
  auto add_cut = [this](double theta, int vertex) {
    theta = ang::norm(theta);
    for (CutPoint& c : cuts_)
      if (wrap_dist(c.p.theta, theta) < 1e-9) {
        if (c.vertex < 0) c.vertex = vertex;
        return false;
      }
    cuts_.push_back({BoundaryPoint(theta), vertex});
    return true;
  };
  for (const RawCut& r : raw) add_cut(r.theta, r.vertex);

  // Close under the map (the construction should already be closed; a few
  // rounds absorb borderline cases, unbounded growth is a real failure).
  for (int round = 0;; ++round) {
    if (round > 50 || cuts_.size() > 5000)
      throw NotMarkov("cut set does not close under the boundary map");
    bool grew = false;
    size_t count = cuts_.size();
    for (size_t i = 0; i < count; ++i) {
      BoundaryPoint img = f.apply(cuts_[i].p);
      grew = add_cut(img.theta, cuts_[i].vertex) || grew;
    }
    if (!grew) break;
  }

  std::sort(cuts_.begin(), cuts_.end(),
            [](const CutPoint& a, const CutPoint& b) { return a.p.theta < b.p.theta; });
  const int K = static_cast<int>(cuts_.size());

  // Cell 0 starts at the cut opening the arc that contains angle 0.
  start_ = (cuts_.front().p.theta <= 1e-12) ? 0 : K - 1;
  const int start = start_;

  cells_.resize(static_cast<size_t>(K));
  branch_of_.resize(static_cast<size_t>(K));
  for (int j = 0; j < K; ++j) {
    double lo = cuts_[static_cast<size_t>((start + j) % K)].p.theta;
    double hi = cuts_[static_cast<size_t>((start + j + 1) % K)].p.theta;
    Arc cell = Arc::from_lo_len(lo, ang::ccw(lo, hi));
    cells_[static_cast<size_t>(j)] = cell;
    int br = f.branch_at(BoundaryPoint(cell.mid()));
    if (!f.branch(br).arc.contains_arc(cell, 1e-9))
      throw NotMarkov("cell " + std::to_string(j) + " straddles a branch endpoint");
    branch_of_[static_cast<size_t>(j)] = br;
  }

  // Transition lists from endpoint images snapped to cut points.
  auto cut_near = [&](double theta) -> int {
    for (int k = 0; k < K; ++k)
      if (wrap_dist(cuts_[static_cast<size_t>(k)].p.theta, theta) < 1e-9) return k;
    return -1;
  };
  auto cell_of_cut = [&](int k) { return (k - start + K) % K; };

  succ_.resize(static_cast<size_t>(K));
  for (int a = 0; a < K; ++a) {
    const Arc& cell = cells_[static_cast<size_t>(a)];
    const MoebiusMap& g = f.branch(branch_of_[static_cast<size_t>(a)]).g;
    double ilo = g.apply(BoundaryPoint(cell.lo)).theta;
    double ihi = g.apply(BoundaryPoint(cell.hi())).theta;
    int ka = cut_near(ilo), kb = cut_near(ihi);
    if (ka < 0 || kb < 0)
      throw NotMarkov("image of cell " + std::to_string(a) + " is not a union of cells");
    for (int k = ka; k != kb; k = (k + 1) % K)
      succ_[static_cast<size_t>(a)].push_back(cell_of_cut(k));
  }

  // Random interior spot checks of the transition structure.
  std::mt19937_64 rng(20260826);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * std::numbers::pi);
  for (int trial = 0; trial < 1000; ++trial) {
    BoundaryPoint xi(unif(rng));
    int a = cell_at(xi), b = cell_at(f.apply(xi));
    if (!allowed(a, b))
      throw NotMarkov("interior point maps outside the transition structure");
  }

  for (const Arc& region : neutral_regions)
    for (int a = 0; a < K; ++a)
      if (region.contains_arc(cells_[static_cast<size_t>(a)], 1e-9))
        neutral_cells_.push_back(a);
  std::sort(neutral_cells_.begin(), neutral_cells_.end());
  neutral_cells_.erase(std::unique(neutral_cells_.begin(), neutral_cells_.end()),
                       neutral_cells_.end());
}

bool MarkovPartition::allowed(int a, int b) const {
  const auto& s = succ_[static_cast<size_t>(a)];
  return std::find(s.begin(), s.end(), b) != s.end();
}

int MarkovPartition::cell_at(BoundaryPoint xi) const {
  // Cut angles are ascending; the cell opened by cut k has label (k - start_) mod K.
  const int K = size();
  int k;
  if (xi.theta < cuts_.front().p.theta) {
    k = K - 1;
  } else {
    int lo = 0, hi = K;  // last cut with theta <= xi
    while (hi - lo > 1) {
      int mid = (lo + hi) / 2;
      if (cuts_[static_cast<size_t>(mid)].p.theta <= xi.theta)
        lo = mid;
      else
        hi = mid;
    }
    k = lo;
  }
  return (k - start_ + K) % K;
}

bool MarkovPartition::irreducible() const {
  const int K = size();
  auto reach = [&](bool forward) {
    std::vector<bool> seen(static_cast<size_t>(K), false);
    std::deque<int> q{0};
    seen[0] = true;
    int count = 1;
    while (!q.empty()) {
      int a = q.front();
      q.pop_front();
      for (int b = 0; b < K; ++b) {
        bool edge = forward ? allowed(a, b) : allowed(b, a);
        if (edge && !seen[static_cast<size_t>(b)]) {
          seen[static_cast<size_t>(b)] = true;
          ++count;
          q.push_back(b);
        }
      }
    }
    return count == K;
  };
  return reach(true) && reach(false);
}

// Pulls the last cell back through single inverse branch maps, newest first.
// Composing the whole word into one matrix first would put entries of size
// e^{s/2} into the product (s = cylinder log-derivative), so long words are
// evaluated pointwise instead.
Arc MarkovPartition::cylinder_arc(const std::vector<int>& symbols) const {
  if (symbols.empty()) throw BadConfig("empty cylinder word");
  for (size_t k = 1; k < symbols.size(); ++k)
    if (!allowed(symbols[k - 1], symbols[k]))
      throw BadConfig("cylinder word is not admissible");
  const Arc& last = cells_[static_cast<size_t>(symbols.back())];
  BoundaryPoint lo(last.lo), hi(last.hi());
  for (size_t k = symbols.size() - 1; k-- > 0;) {
    MoebiusMap h = f_.branch(branch_of_[static_cast<size_t>(symbols[k])]).g.inverse();
    lo = h.apply(lo);
    hi = h.apply(hi);
  }
  return Arc::from_lo_len(lo.theta, ang::ccw(lo.theta, hi.theta));
}

MoebiusMap MarkovPartition::cylinder_matrix(const std::vector<int>& symbols) const {
  MoebiusMap G = MoebiusMap::identity();
  for (int a : symbols) G = compose(f_.branch(branch_of_[static_cast<size_t>(a)]).g, G);
  return G;
}

BoundaryPoint MarkovPartition::code_point(const std::vector<int>& symbols) const {
  Arc arc = cylinder_arc(symbols);
  if (symbols.size() >= 2 &&
      arc.len > cells_[static_cast<size_t>(symbols[0])].len + 1e-15)
    throw SlowContraction("nested coding intervals stopped shrinking");
  return BoundaryPoint(arc.mid());
}

double MarkovPartition::coding_residual(const std::vector<int>& symbols) const {
  std::vector<int> shifted(symbols.begin() + 1, symbols.end());
  BoundaryPoint a = f_.apply(code_point(symbols));
  BoundaryPoint b = code_point(shifted);
  return wrap_dist(a.theta, b.theta);
}

void enumerate_cylinders(const MarkovPartition& part, int n,
                         const std::function<bool(const CylinderWord&)>& prune,
                         const std::function<void(const CylinderWord&)>& emit,
                         long long cap) {
  if (n < 1) throw BadConfig("cylinder length must be positive");
  long long emitted = 0;

  struct Frame {
    std::vector<int> symbols;
    Arc arc;
    MoebiusMap pullback;  // product of the first |symbols|-1 branch maps
  };

  std::function<void(Frame&)> dfs = [&](Frame& fr) {
    MoebiusMap full = compose(
        part.map().branch(part.branch_of(fr.symbols.back())).g, fr.pullback);
    CylinderWord word{fr.symbols, fr.arc, full};
    if (prune && prune(word)) return;
    if (static_cast<int>(fr.symbols.size()) == n) {
      if (cap >= 0 && ++emitted > cap)
        throw Overflow("cylinder enumeration exceeded cap");
      emit(word);
      return;
    }
    MoebiusMap Gi = full.inverse();
    for (int b : part.successors()[static_cast<size_t>(fr.symbols.back())]) {
      const Arc cell = part.arc(b);
      double lo = Gi.apply(BoundaryPoint(cell.lo)).theta;
      double hi = Gi.apply(BoundaryPoint(cell.hi())).theta;
      Frame next{fr.symbols, Arc::from_lo_len(lo, ang::ccw(lo, hi)), full};
      next.symbols.push_back(b);
      dfs(next);
    }
  };

  for (int a = 0; a < part.size(); ++a) {
    Frame fr{{a}, part.arc(a), MoebiusMap::identity()};
    dfs(fr);
  }
}

InducedMap build_induced_map(const MarkovPartition& part, int t_max) {
  InducedMap out;
  out.t_max = t_max;

  std::vector<bool> is_neutral(static_cast<size_t>(part.size()), false);
  for (int a : part.neutral_cells()) is_neutral[static_cast<size_t>(a)] = true;
  for (int a = 0; a < part.size(); ++a)
    if (!is_neutral[static_cast<size_t>(a)]) out.base_cells.push_back(a);
  if (out.base_cells.empty()) throw EmptyBase("no cells outside the neutral cusp regions");

  // Depth-first over words base (neutral)* base, capped at return time t_max.
  struct Frame {
    std::vector<int> symbols;
    Arc arc;
    MoebiusMap pullback;  // product of the first |symbols|-1 branch maps
  };
  std::function<void(Frame&)> dfs = [&](Frame& fr) {
    int t = static_cast<int>(fr.symbols.size()) - 1;
    int last = fr.symbols.back();
    if (t >= 1 && !is_neutral[static_cast<size_t>(last)]) {
      out.branches.push_back({fr.symbols, fr.arc, fr.pullback, t});
      return;
    }
    if (t >= t_max) {
      if (t >= 1) out.unresolved_measure += fr.arc.len;
      return;
    }
    MoebiusMap full = compose(part.map().branch(part.branch_of(last)).g, fr.pullback);
    MoebiusMap Gi = full.inverse();
    for (int b : part.successors()[static_cast<size_t>(last)]) {
      const Arc cell = part.arc(b);
      double lo = Gi.apply(BoundaryPoint(cell.lo)).theta;
      double hi = Gi.apply(BoundaryPoint(cell.hi())).theta;
      Frame next{fr.symbols, Arc::from_lo_len(lo, ang::ccw(lo, hi)), full};
      next.symbols.push_back(b);
      dfs(next);
    }
  };
  for (int a : out.base_cells) {
    Frame fr{{a}, part.arc(a), MoebiusMap::identity()};
    dfs(fr);
  }
  return out;
}

}  // namespace bsld
