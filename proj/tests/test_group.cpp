#include <cmath>
#include <random>

#include "bsld/errors.hpp"
#include "bsld/bowen_series.hpp"
#include "bsld/group.hpp"
#include "bsld/json_io.hpp"
#include "doctest.h"

using namespace bsld;

namespace {
const double kPi = std::numbers::pi;
}

TEST_CASE("octagon domain is admissible") {
  FundamentalDomain dom = FundamentalDomain::octagon();
  CHECK(dom.num_sides() == 8);
  CHECK(!dom.has_cusps());
  CHECK_NOTHROW(dom.verify_side_pairing());
  CHECK_NOTHROW(dom.verify_even_corners());
  CHECK(dom.check_admissible().ok());

  // Opposite-side pairing: the label of side k+4 is the inverse of side k's.
  for (int k = 0; k < 4; ++k)
    CHECK(dom.side(k + 4).label == dom.side(k).label.inverse());
}

TEST_CASE("octagon vertex cycles close with the surface-group relator") {
  FundamentalDomain dom = FundamentalDomain::octagon();
  auto cycles = dom.vertex_cycles();
  REQUIRE(cycles.size() == 8);
  for (const VertexCycle& cyc : cycles) {
    CHECK(!cyc.ideal);
    CHECK(cyc.steps.size() == 8);  // eight octagon copies meet at each vertex
    CHECK(cyc.closing.same_isometry(MoebiusMap::identity(), 1e-9));
    // The relator word visits every side exactly once.
    std::vector<int> crossed;
    for (const auto& st : cyc.steps) crossed.push_back(st.crossed_side);
    std::sort(crossed.begin(), crossed.end());
    for (int i = 0; i < 8; ++i) CHECK(crossed[static_cast<size_t>(i)] == i);
  }
}

TEST_CASE("octagon net: four complete geodesics through each vertex") {
  FundamentalDomain dom = FundamentalDomain::octagon();
  for (int v = 0; v < 8; ++v) {
    auto w = dom.network_endpoints(v);
    CHECK(w.size() == 8);  // 4 geodesics x 2 endpoints
  }
}

TEST_CASE("octagon branch arcs tile the circle") {
  FundamentalDomain dom = FundamentalDomain::octagon();
  double total = 0.0;
  for (int i = 0; i < 8; ++i) {
    Arc a = dom.branch_arc(i);
    CHECK(a.len == doctest::Approx(kPi / 4.0).epsilon(1e-12));
    total += a.len;
  }
  CHECK(total == doctest::Approx(2.0 * kPi).epsilon(1e-12));

  const double d0 = std::acosh(1.0 + std::sqrt(2.0));
  const double delta = std::asin(1.0 / std::cosh(d0));
  CHECK(dom.p_point(0).theta == doctest::Approx(2.0 * kPi - delta).epsilon(1e-12));
}

TEST_CASE("perturbed pairing matrix is rejected") {
  FundamentalDomain good = FundamentalDomain::octagon();
  std::vector<DomainSide> sides = good.sides();
  const double d0 = std::acosh(1.0 + std::sqrt(2.0));
  std::vector<std::pair<GeneratorLabel, MoebiusMap>> pairings;
  for (int k = 0; k < 4; ++k) {
    MoebiusMap g = MoebiusMap::translation(k * kPi / 4.0, 2.0 * d0);
    if (k == 2) g = MoebiusMap{g.a, g.b + Complex(1e-3, 0.0)}.normalized();
    pairings.push_back({{k, false}, g});
  }
  FundamentalDomain bad(std::move(sides), std::move(pairings));
  CHECK_THROWS_AS(bad.verify_side_pairing(), PairingMismatch);
}

TEST_CASE("word length by breadth-first search") {
  FundamentalDomain dom = FundamentalDomain::octagon();
  const MoebiusMap e0 = dom.matrix({0, false});
  const MoebiusMap e1 = dom.matrix({1, false});

  CHECK(word_length_bfs(dom, MoebiusMap::identity(), 3) == 0);
  CHECK(word_length_bfs(dom, e0, 3) == 1);
  CHECK(word_length_bfs(dom, e0.inverse(), 3) == 1);
  CHECK(word_length_bfs(dom, compose(e0, e1), 3) == 2);
  CHECK(word_length_bfs(dom, compose(e0, e0.inverse()), 3) == 0);
  CHECK(!word_length_bfs(dom, compose(compose(e0, e1), compose(e0, e1)), 3).has_value());
}

TEST_CASE("ball growth matches free nesting below the relator length") {
  FundamentalDomain oct = FundamentalDomain::octagon();
  // Relators have length 8, so balls of radius <= 3 are free on 8 letters.
  CHECK(ball_bfs(oct, 0).size() == 1);
  CHECK(ball_bfs(oct, 1).size() == 9);
  CHECK(ball_bfs(oct, 2).size() == 65);

  FundamentalDomain quad = FundamentalDomain::quadrilateral();
  // Free on 2 generators: |B(r)| = 1 + 4 * (3^r - 1) / 2.
  CHECK(ball_bfs(quad, 3).size() == 53);
  CHECK(ball_bfs(quad, 5).size() == 485);
}

TEST_CASE("displacement bounded by word length") {
  FundamentalDomain dom = FundamentalDomain::octagon();
  const double aw = dom.alpha_word();
  CHECK(aw == doctest::Approx(2.0 * std::acosh(1.0 + std::sqrt(2.0))).epsilon(1e-12));

  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pick(0, 7);
  DiscPoint o(0, 0);
  auto labels = dom.all_labels();
  for (int trial = 0; trial < 200; ++trial) {
    MoebiusMap g = MoebiusMap::identity();
    int len = 1 + static_cast<int>(rng() % 5);
    std::vector<GeneratorLabel> word;
    for (int i = 0; i < len; ++i) {
      GeneratorLabel l = labels[static_cast<size_t>(pick(rng))];
      if (!word.empty() && word.back() == l.inverse()) {
        --i;
        continue;
      }
      word.push_back(l);
      g = compose(g, dom.matrix(l));
    }
    CHECK(disc_distance(o, g.apply(o)) <= aw * static_cast<double>(word.size()) + 1e-9);
  }
}

TEST_CASE("quadrilateral domain: four cusps, parabolic cycles") {
  FundamentalDomain dom = FundamentalDomain::quadrilateral();
  CHECK(dom.num_sides() == 4);
  CHECK(dom.has_cusps());
  CHECK_NOTHROW(dom.verify_side_pairing());
  CHECK(dom.check_admissible().ok());

  for (const DomainVertex& v : dom.vertices()) CHECK(v.ideal);

  for (const VertexCycle& cyc : dom.vertex_cycles()) {
    CHECK(cyc.ideal);
    CHECK(cyc.closing.trace_abs() == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(!cyc.closing.same_isometry(MoebiusMap::identity(), 1e-6));
    // Parabolic fixed point is the cusp itself.
    DiscPoint cusp = dom.vertex(cyc.vertex).p;
    CHECK(std::abs(cyc.closing.apply(cusp.c()) - cusp.c()) < 1e-9);
  }
}

TEST_CASE("quadrilateral generators match the half-plane matrices") {
  FundamentalDomain dom = FundamentalDomain::quadrilateral();
  const MoebiusMap A = dom.matrix({0, false});
  const MoebiusMap B = dom.matrix({1, false});
  // z -> z + 2 fixes the cusp at angle 0; z -> z/(2z+1) the one at angle pi.
  CHECK(std::abs(A.apply(Complex(1, 0)) - Complex(1, 0)) < 1e-12);
  CHECK(std::abs(B.apply(Complex(-1, 0)) - Complex(-1, 0)) < 1e-12);
  CHECK(A.trace_abs() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(B.trace_abs() == doctest::Approx(2.0).epsilon(1e-12));
  // A maps the cusp at angle pi/2 (half-plane -1) to angle 3pi/2 (half-plane 1).
  CHECK(std::abs(A.apply(Complex(0, 1)) - Complex(0, -1)) < 1e-12);
}

TEST_CASE("cusp network accumulates at the cusp") {
  FundamentalDomain dom = FundamentalDomain::quadrilateral();
  auto w = dom.network_endpoints(0, 1e-8);  // cusp at angle 0
  CHECK(w.size() > 10);
  bool has_cusp = false, has_left = false, has_right = false;
  for (const BoundaryPoint& p : w) {
    if (std::abs(ang::norm_pm(p.theta)) < 1e-12) has_cusp = true;
    if (std::abs(p.theta - kPi / 2.0) < 1e-9) has_left = true;
    if (std::abs(p.theta - 3.0 * kPi / 2.0) < 1e-9) has_right = true;
  }
  CHECK(has_cusp);
  CHECK(has_left);
  CHECK(has_right);
  // Smallest gap to the cusp on either side is below the requested cluster gap.
  double best = 10.0;
  for (const BoundaryPoint& p : w) {
    double off = std::abs(ang::norm_pm(p.theta));
    if (off > 1e-12) best = std::min(best, off);
  }
  CHECK(best < 1e-3);
}

TEST_CASE("parabolic displacement grows like 2 log n") {
  FundamentalDomain dom = FundamentalDomain::quadrilateral();
  MoebiusMap An = MoebiusMap::identity();
  const MoebiusMap A = dom.matrix({0, false});
  DiscPoint o(0, 0);
  double d32 = 0.0, d64 = 0.0;
  for (int n = 1; n <= 64; ++n) {
    An = compose(An, A);
    if (n == 32) d32 = disc_distance(o, An.apply(o));
    if (n == 64) d64 = disc_distance(o, An.apply(o));
  }
  CHECK(d64 - d32 == doctest::Approx(2.0 * std::log(2.0)).epsilon(0.02));
}

TEST_CASE("domain JSON round-trips both built-ins") {
  for (bool cusped : {false, true}) {
    FundamentalDomain dom = cusped ? FundamentalDomain::quadrilateral()
                                   : FundamentalDomain::octagon();
    FundamentalDomain back = domain_from_json(domain_to_json(dom));
    REQUIRE(back.num_sides() == dom.num_sides());
    CHECK(back.has_cusps() == dom.has_cusps());
    for (int i = 0; i < dom.num_sides(); ++i) {
      CHECK(back.side(i).label == dom.side(i).label);
      CHECK(std::abs(back.side(i).v0.c() - dom.side(i).v0.c()) < 1e-12);
      CHECK(std::abs(back.side(i).v1.c() - dom.side(i).v1.c()) < 1e-12);
      CHECK(std::abs(back.p_point(i).theta - dom.p_point(i).theta) < 1e-9);
    }
    for (int idx : dom.generator_indices())
      CHECK(back.matrix({idx, false}).same_isometry(dom.matrix({idx, false}), 1e-9));
    // The loader re-ran admissibility, so a partition builds directly.
    MarkovPartition part((BowenSeriesMap(back)));
    CHECK(part.irreducible());
  }
}

TEST_CASE("domain JSON loader rejects malformed documents") {
  nlohmann::json good = domain_to_json(FundamentalDomain::octagon());
  CHECK_THROWS_AS(domain_from_json(nlohmann::json::array()), BadDomainFile);
  CHECK_THROWS_AS(domain_from_json({{"sides", nlohmann::json::array()}}),
                  BadDomainFile);
  nlohmann::json miss = good;
  miss["sides"][0].erase("v0");
  CHECK_THROWS_AS(domain_from_json(miss), BadDomainFile);
  nlohmann::json badmat = good;
  badmat["pairings"][0]["matrix"] = {0.0, 0.0, 1.0, 0.0};
  CHECK_THROWS_AS(domain_from_json(badmat), BadDomainFile);
  // A shuffled vertex breaks the polygon chain; verification catches it.
  nlohmann::json torn = good;
  torn["sides"][2]["v0"] = {0.0, 0.1};
  CHECK_THROWS_AS(domain_from_json(torn), BadDomainFile);
  // Valid geometry with a mispaired generator fails the re-checks.
  nlohmann::json swapped = good;
  std::swap(swapped["pairings"][0]["matrix"], swapped["pairings"][1]["matrix"]);
  CHECK_THROWS_AS(domain_from_json(swapped), Error);
}

TEST_CASE("partition JSON export is structurally consistent") {
  FundamentalDomain dom = FundamentalDomain::quadrilateral();
  BowenSeriesMap f(dom);
  MarkovPartition part(f);
  nlohmann::json j = partition_to_json(part);
  REQUIRE(j["alphabet"].get<int>() == part.size());
  REQUIRE(static_cast<int>(j["cells"].size()) == part.size());
  double total = 0.0;
  for (const auto& c : j["cells"]) {
    int a = c["index"].get<int>();
    CHECK(c["lo"].get<double>() == part.arc(a).lo);
    total += ang::ccw(c["lo"].get<double>(), c["hi"].get<double>());
  }
  CHECK(total == doctest::Approx(kTwoPi).epsilon(1e-9));
  REQUIRE(static_cast<int>(j["transitions"].size()) == part.size());
  for (int a = 0; a < part.size(); ++a) {
    const auto& row = j["transitions"][static_cast<size_t>(a)];
    CHECK(row.get<std::vector<int>>() == part.successors()[static_cast<size_t>(a)]);
  }
  // Cusped group: some cut points carry a vertex provenance, and every
  // recorded vertex index is valid.
  bool from_vertex = false;
  for (const auto& c : j["cut_points"]) {
    int v = c["vertex"].get<int>();
    CHECK(v >= -1);
    CHECK(v < dom.num_sides());
    from_vertex = from_vertex || v >= 0;
  }
  CHECK(from_vertex);
}
