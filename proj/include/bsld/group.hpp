#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bsld/geometry.hpp"

namespace bsld {

// Label of a side-pairing generator: generator `index` or its inverse when
// `bar` is set. The pairing involution flips the bar flag.
struct GeneratorLabel {
  int index = 0;
  bool bar = false;

  GeneratorLabel inverse() const { return {index, !bar}; }
  bool operator==(const GeneratorLabel& o) const { return index == o.index && bar == o.bar; }
  bool operator!=(const GeneratorLabel& o) const { return !(*this == o); }
  bool operator<(const GeneratorLabel& o) const {
    return index != o.index ? index < o.index : bar < o.bar;
  }
  std::string str() const {
    return (bar ? "E" : "e") + std::to_string(index);
  }
};

// One side of the fundamental polygon, listed anticlockwise. `v0` precedes
// `v1` anticlockwise; either may lie on the unit circle (ideal vertex).
// `carrier` is the complete geodesic containing the side, oriented so that
// the origin lies on its Right; its source endpoint is the P-point of the
// side and its destination the Q-point.
struct DomainSide {
  GeneratorLabel label;  // exterior label
  DiscPoint v0, v1;
  OrientedGeodesic carrier;
};

struct DomainVertex {
  DiscPoint p;
  bool ideal = false;
  // incident sides: vertex i is v1 of side (i-1 mod m) and v0 of side i
};

// A group element tracked as a reduced word together with its matrix.
struct GroupElement {
  std::vector<GeneratorLabel> word;
  MoebiusMap g;
};

// One step of a vertex cycle: the copy h*R of the domain meeting the vertex,
// and the side of R crossed to reach the next copy.
struct VertexCycleStep {
  MoebiusMap h;
  int local_vertex = 0;  // vertex index of R mapped onto the cycled vertex
  int crossed_side = 0;  // side of R whose h-image is crossed next
};

struct VertexCycle {
  int vertex = 0;
  bool ideal = false;
  std::vector<VertexCycleStep> steps;
  // Product over one period. +/- identity at an interior vertex; the
  // parabolic cycle transformation at a cusp.
  MoebiusMap closing;
};

struct AdmissibilityReport {
  bool side_pairing_ok = false;
  bool even_corners_ok = false;
  bool enough_sides = false;
  bool ok() const { return side_pairing_ok && even_corners_ok && enough_sides; }
};

// A fundamental polygon for a Fuchsian group, with side pairings. Sides are
// stored anticlockwise; the origin is interior.
class FundamentalDomain {
 public:
  FundamentalDomain(std::vector<DomainSide> sides,
                    std::vector<std::pair<GeneratorLabel, MoebiusMap>> pairings);

  int num_sides() const { return static_cast<int>(sides_.size()); }
  const DomainSide& side(int i) const { return sides_[static_cast<size_t>(i)]; }
  const std::vector<DomainSide>& sides() const { return sides_; }
  const DomainVertex& vertex(int i) const { return vertices_[static_cast<size_t>(i)]; }
  const std::vector<DomainVertex>& vertices() const { return vertices_; }
  bool has_cusps() const { return has_cusps_; }

  // Matrix of a generator label (bar = inverse).
  const MoebiusMap& matrix(GeneratorLabel l) const;
  // Side whose exterior label is l.
  int side_with_label(GeneratorLabel l) const;
  // Distinct unbarred generator indices, sorted.
  const std::vector<int>& generator_indices() const { return gen_indices_; }
  // All 2g labels (each generator and its inverse) in side order.
  std::vector<GeneratorLabel> all_labels() const;

  // P-point of side i (source endpoint of its carrier) and the branch arc
  // [P_i, P_{i+1}) of the boundary map with that side's bar label.
  BoundaryPoint p_point(int i) const { return sides_[static_cast<size_t>(i)].carrier.src(); }
  Arc branch_arc(int i) const;

  // Checks that each pairing maps the side with the barred label onto the
  // side with the unbarred label (endpoints within eps) and that the matrices
  // of l and l-bar are mutually inverse. Throws PairingMismatch on failure.
  void verify_side_pairing(double eps = 1e-9) const;

  // Walks the cycle of domain copies around each vertex. Throws
  // CycleNotClosing if a cycle fails to return within `max_steps` copies.
  std::vector<VertexCycle> vertex_cycles(int max_steps = 64) const;

  // Even-corner check: at each interior vertex the side rays of the copies in
  // its cycle must pair into complete geodesics (opposite tangent directions
  // within eps). Throws OddCorner on failure.
  void verify_even_corners(double eps = 1e-8) const;

  // Full admissibility report; `require` throws on the first failed clause.
  AdmissibilityReport check_admissible() const;
  void require_admissible() const;

  // Network endpoints W(v): boundary endpoints of every complete geodesic of
  // the net through vertex v, from its vertex cycle. At a cusp the family is
  // infinite; the parabolic orbit is followed towards the cusp until its
  // per-step motion drops below `cusp_gap`.
  std::vector<BoundaryPoint> network_endpoints(int vertex, double cusp_gap = 1e-9) const;

  // max over generators of d(0, g 0); word-length upper bound scale.
  double alpha_word() const;

  // Fundamental polygons used throughout: the regular octagon domain of a
  // genus-2 surface group, and the ideal quadrilateral domain of the free
  // parabolic group generated by z->z+2 and z->z/(2z+1) (upper half-plane
  // model), moved to the disc.
  static FundamentalDomain octagon();
  static FundamentalDomain quadrilateral();

 private:
  std::vector<DomainSide> sides_;
  std::vector<DomainVertex> vertices_;
  std::map<GeneratorLabel, MoebiusMap> gens_;
  std::map<GeneratorLabel, int> side_of_label_;
  std::vector<int> gen_indices_;
  bool has_cusps_ = false;
};

// Breadth-first word length of g over the domain's generators, up to
// `max_radius`; nullopt if g is not reached. Matrices are deduplicated up to
// sign on a 1e-6 grid.
std::optional<int> word_length_bfs(const FundamentalDomain& dom, const MoebiusMap& g,
                                   int max_radius);

// All group elements of word length <= radius, as reduced words with
// matrices (one representative per element).
std::vector<GroupElement> ball_bfs(const FundamentalDomain& dom, int radius);

}  // namespace bsld
