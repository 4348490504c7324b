#include "bsld/json_io.hpp"

#include <fstream>

#include "bsld/errors.hpp"

namespace bsld {

namespace {

using nlohmann::json;

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw BadDomainFile(what + " is not a number");
  return j.get<double>();
}

DiscPoint point(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2)
    throw BadDomainFile(what + " must be a [x, y] pair");
  return DiscPoint(number(j[0], what + "[0]"), number(j[1], what + "[1]"));
}

const json& field(const json& j, const char* key, const std::string& what) {
  auto it = j.find(key);
  if (it == j.end()) throw BadDomainFile(what + " is missing \"" + key + "\"");
  return *it;
}

}  // namespace

FundamentalDomain domain_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw BadDomainFile("domain document is not an object");
  const json& jsides = field(j, "sides", "domain");
  const json& jpair = field(j, "pairings", "domain");
  if (!jsides.is_array() || jsides.empty())
    throw BadDomainFile("\"sides\" must be a non-empty array");
  if (!jpair.is_array() || jpair.empty())
    throw BadDomainFile("\"pairings\" must be a non-empty array");

  std::vector<DomainSide> sides;
  for (size_t i = 0; i < jsides.size(); ++i) {
    std::string what = "sides[" + std::to_string(i) + "]";
    const json& s = jsides[i];
    if (!s.is_object()) throw BadDomainFile(what + " is not an object");
    DomainSide side;
    const json& lbl = field(s, "label", what);
    if (!lbl.is_number_integer()) throw BadDomainFile(what + ".label must be an integer");
    side.label.index = lbl.get<int>();
    const json& bar = field(s, "bar", what);
    if (!bar.is_boolean()) throw BadDomainFile(what + ".bar must be a boolean");
    side.label.bar = bar.get<bool>();
    side.v0 = point(field(s, "v0", what), what + ".v0");
    side.v1 = point(field(s, "v1", what), what + ".v1");
    try {
      side.carrier = OrientedGeodesic::through(side.v0, side.v1);
    } catch (const DegenerateGeodesic& e) {
      throw BadDomainFile(what + ": " + e.what());
    }
    if (side.carrier.side_of(DiscPoint(0, 0)) != Side::Right)
      side.carrier = OrientedGeodesic(side.carrier.dst(), side.carrier.src());
    if (side.carrier.side_of(DiscPoint(0, 0)) != Side::Right)
      throw BadDomainFile(what + ": origin lies on the side carrier");
    sides.push_back(side);
  }

  std::vector<std::pair<GeneratorLabel, MoebiusMap>> pairings;
  for (size_t i = 0; i < jpair.size(); ++i) {
    std::string what = "pairings[" + std::to_string(i) + "]";
    const json& p = jpair[i];
    if (!p.is_object()) throw BadDomainFile(what + " is not an object");
    const json& lbl = field(p, "label", what);
    if (!lbl.is_number_integer()) throw BadDomainFile(what + ".label must be an integer");
    const json& m = field(p, "matrix", what);
    if (!m.is_array() || m.size() != 4)
      throw BadDomainFile(what + ".matrix must be [a_re, a_im, b_re, b_im]");
    MoebiusMap g{Complex(number(m[0], what), number(m[1], what)),
                 Complex(number(m[2], what), number(m[3], what))};
    if (std::norm(g.a) - std::norm(g.b) < 1e-6)
      throw BadDomainFile(what + ".matrix is not a disc isometry (|a|^2-|b|^2 <= 0)");
    pairings.emplace_back(GeneratorLabel{lbl.get<int>(), false}, g);
  }

  FundamentalDomain dom(std::move(sides), std::move(pairings));
  dom.require_admissible();
  return dom;
}

FundamentalDomain load_domain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadDomainFile("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw BadDomainFile(path + ": " + e.what());
  }
  return domain_from_json(j);
}

nlohmann::json domain_to_json(const FundamentalDomain& dom) {
  json jsides = json::array();
  for (const DomainSide& s : dom.sides()) {
    jsides.push_back({{"label", s.label.index},
                      {"bar", s.label.bar},
                      {"v0", {s.v0.re, s.v0.im}},
                      {"v1", {s.v1.re, s.v1.im}}});
  }
  json jpair = json::array();
  for (int idx : dom.generator_indices()) {
    const MoebiusMap& g = dom.matrix(GeneratorLabel{idx, false});
    jpair.push_back({{"label", idx},
                     {"matrix", {g.a.real(), g.a.imag(), g.b.real(), g.b.imag()}}});
  }
  return {{"sides", jsides}, {"pairings", jpair}};
}

nlohmann::json partition_to_json(const MarkovPartition& part) {
  json cells = json::array();
  for (int a = 0; a < part.size(); ++a) {
    Arc arc = part.arc(a);
    const Branch& br = part.map().branch(part.branch_of(a));
    cells.push_back({{"index", a},
                     {"lo", arc.lo},
                     {"hi", arc.hi()},
                     {"branch", br.side},
                     {"branch_label", br.label.str()}});
  }
  json transitions = json::array();
  for (const std::vector<int>& row : part.successors()) transitions.push_back(row);
  json cuts = json::array();
  for (const CutPoint& c : part.cut_points())
    cuts.push_back({{"theta", c.p.theta}, {"vertex", c.vertex}});
  return {{"alphabet", part.size()},
          {"cells", cells},
          {"transitions", transitions},
          {"cut_points", cuts}};
}

}  // namespace bsld
