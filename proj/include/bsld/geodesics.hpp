#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "bsld/bowen_series.hpp"
#include "bsld/errors.hpp"
#include "bsld/geometry.hpp"
#include "bsld/group.hpp"

namespace bsld {

// Symbol stream of an oriented geodesic through the tessellation by copies of
// the fundamental domain: symbols[k] is the exterior label of the side across
// which the geodesic crosses from the k-th copy into the (k+1)-th.
struct CuttingSequence {
  OrientedGeodesic geodesic;
  std::vector<GeneratorLabel> symbols;
  // Indices where the crossing passed within eps_vertex of an interior vertex
  // and the right-deformation tie-break chose the exit side.
  std::vector<int> deformation_events;
  double eps_vertex = 1e-9;
};

// All walking happens in the base copy: the geodesic is pulled back by the
// inverse of the accumulated word and its exit side from the base domain is
// located by intersecting with the bounding half-planes. Throws
// NotEnteringDomain if the (pulled-back) geodesic misses the interior, and
// NoExitSide if no forward boundary crossing can be identified (e.g. the
// positive endpoint is numerically at a cusp).
CuttingSequence cutting_sequence(const FundamentalDomain& dom,
                                 const OrientedGeodesic& geo, int n,
                                 double eps_vertex = 1e-9);

// Per-depth growth records along one geodesic, indices 0..n:
//   t[k] = d(0, g_0...g_{k-1} * 0)        (orbit displacement)
//   s[k] = log |(f^k)'(gamma^+)|          (boundary-map derivative)
//   u[k] = log |((g_0...g_{k-1})^-1)'(gamma^+)|
// t is evaluated from a rescaled raw matrix product (stable at any depth) and
// s, u by chain-rule sums along orbits.
struct GrowthTrace {
  CuttingSequence cut;
  std::vector<double> t;
  std::vector<double> s;
  std::vector<double> u;
};

GrowthTrace growth_trace(const FundamentalDomain& dom, const BowenSeriesMap& f,
                         const OrientedGeodesic& geo, int n,
                         double eps_vertex = 1e-9);

// Deterministic rejection sampler: endpoint angles i.i.d. uniform on the
// circle, kept only if the geodesic meets the interior of the base domain,
// stays clear (1e-9) of branch cuts and cusps with its positive endpoint,
// and, when a constraint radius is given, passes within that Euclidean
// distance of the origin. Throws RejectionStall if acceptance drops below
// 1e-3.
class GeodesicSampler {
 public:
  GeodesicSampler(const FundamentalDomain& dom, std::uint64_t seed,
                  std::optional<double> k_radius = std::nullopt);

  OrientedGeodesic next();

  long long proposals() const { return proposals_; }
  long long accepted() const { return accepted_; }

 private:
  FundamentalDomain dom_;
  std::optional<double> k_radius_;
  std::mt19937_64 rng_;
  std::vector<double> guard_angles_;  // branch cuts and cusps for gamma^+
  long long proposals_ = 0;
  long long accepted_ = 0;
};

// Windowed growth statistic: max over 0 <= m <= n-w of (t[m+w]-t[m])/log n
// with window w = floor(log n / I_alpha). Throws WindowTooLong if w > n.
double erdos_renyi_statistic(const GrowthTrace& trace, double I_alpha, int n);

// Parameter interval of geo inside the closed base domain (empty optional if
// it misses), in the geodesic's own arc-length parameter.
std::optional<std::pair<double, double>> domain_interval(
    const FundamentalDomain& dom, const OrientedGeodesic& geo);

}  // namespace bsld
