#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "bsld/group.hpp"

namespace bsld {

// One branch of the boundary map: on the arc [P_i, P_{i+1}) the map applies
// the inverse of the side-pairing generator whose exterior label is e_i.
struct Branch {
  int side = 0;
  GeneratorLabel label;  // e_i; the branch applies matrix(e_i)^{-1}
  MoebiusMap g;          // the branch Moebius map
  Arc arc;
};

// Piecewise-Moebius boundary map of an admissible fundamental domain. The
// circle is cut at the source endpoints P_i of the side carriers; each arc
// is pushed across its side by the inverse pairing generator.
class BowenSeriesMap {
 public:
  explicit BowenSeriesMap(const FundamentalDomain& dom);

  const FundamentalDomain& domain() const { return dom_; }
  int num_branches() const { return static_cast<int>(branches_.size()); }
  const Branch& branch(int i) const { return branches_[static_cast<size_t>(i)]; }
  int branch_at(BoundaryPoint xi) const;

  BoundaryPoint apply(BoundaryPoint xi) const;
  double derivative(BoundaryPoint xi) const;  // |f'(xi)|

  // Symbols a_0 ... a_{n-1} of the expansion of xi: a_k is the exterior
  // label of the branch containing f^k(xi), so that the inverse of the word
  // a_0...a_{n-1} carries xi to f^n(xi).
  std::vector<GeneratorLabel> expansion(BoundaryPoint xi, int n) const;

 private:
  FundamentalDomain dom_;
  std::vector<Branch> branches_;
};

struct CutPoint {
  BoundaryPoint p;
  int vertex = -1;  // provenance: vertex whose net produced it; -1 = branch endpoint
};

// Finite Markov partition refining the branch arcs: cells are the gaps
// between consecutive cut points, left-closed right-open anticlockwise,
// numbered from the cell containing angle 0.
class MarkovPartition {
 public:
  explicit MarkovPartition(const BowenSeriesMap& f);

  const BowenSeriesMap& map() const { return f_; }
  int size() const { return static_cast<int>(cells_.size()); }
  Arc arc(int a) const { return cells_[static_cast<size_t>(a)]; }
  int branch_of(int a) const { return branch_of_[static_cast<size_t>(a)]; }
  const std::vector<CutPoint>& cut_points() const { return cuts_; }

  bool allowed(int a, int b) const;
  const std::vector<std::vector<int>>& successors() const { return succ_; }
  int cell_at(BoundaryPoint xi) const;
  bool irreducible() const;

  // Interior cut points (excluding the cusp itself) of the two one-sided
  // neutral regions at each cusp, and the cells they bound; empty when the
  // group has no cusps.
  const std::vector<int>& neutral_cells() const { return neutral_cells_; }

  // Nested-interval coding limit of an admissible symbol sequence: midpoint
  // of the deepest cylinder. Throws SlowContraction if widths fail to shrink
  // between depth n/2 and n.
  BoundaryPoint code_point(const std::vector<int>& symbols) const;
  // Conjugacy residual: angular distance between f(code(x)) and code(shift x).
  double coding_residual(const std::vector<int>& symbols) const;

  // Cylinder arc of an admissible word (nonempty by the Markov property).
  Arc cylinder_arc(const std::vector<int>& symbols) const;
  // Branch matrix of the word: the composition applied by |word| map steps.
  MoebiusMap cylinder_matrix(const std::vector<int>& symbols) const;

 private:
  BowenSeriesMap f_;
  int start_ = 0;                       // cut index opening cell label 0
  std::vector<CutPoint> cuts_;          // sorted by angle
  std::vector<Arc> cells_;
  std::vector<int> branch_of_;
  std::vector<std::vector<int>> succ_;  // successor cell lists
  std::vector<int> neutral_cells_;
};

struct CylinderWord {
  std::vector<int> symbols;
  Arc arc;
  MoebiusMap g;  // the composed map applied over the word's length
};

// Exact extrema of |g'| on the closed arc: the derivative is unimodal in the
// angle, so extrema sit at the endpoints or at one interior critical angle.
std::pair<double, double> derivative_bracket(const MoebiusMap& g, const Arc& arc);

// Depth-first enumeration of admissible words of length n. `prune` may
// abandon a subtree from its prefix cylinder (depth = symbols seen); `emit`
// receives every surviving full-length word. Throws Overflow when more than
// `cap` words are emitted (cap < 0 disables the check).
void enumerate_cylinders(const MarkovPartition& part, int n,
                         const std::function<bool(const CylinderWord&)>& prune,
                         const std::function<void(const CylinderWord&)>& emit,
                         long long cap = -1);

struct InducedBranch {
  std::vector<int> symbols;  // first and last in the base, middle outside
  Arc domain;
  MoebiusMap g;  // equals the t-step map on `domain`
  int return_time = 1;
};

// First-return map to the complement of the neutral cusp regions.
struct InducedMap {
  std::vector<int> base_cells;
  std::vector<InducedBranch> branches;
  double unresolved_measure = 0.0;  // Lebesgue mass with return time > t_max
  int t_max = 0;
};

InducedMap build_induced_map(const MarkovPartition& part, int t_max);

}  // namespace bsld
