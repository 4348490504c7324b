#pragma once

#include <string>

#include "json.hpp"

#include "bsld/bowen_series.hpp"
#include "bsld/group.hpp"

namespace bsld {

// Parses a fundamental domain from its JSON description:
//   { "sides":    [ { "label": int, "bar": bool, "v0": [x,y], "v1": [x,y] } ],
//     "pairings": [ { "label": int, "matrix": [a_re, a_im, b_re, b_im] } ] }
// Sides are anticlockwise; carriers are reconstructed from the vertex pairs
// and oriented with the origin on the right. All admissibility checks are
// re-run on the loaded domain. Throws BadDomainFile on malformed input.
FundamentalDomain domain_from_json(const nlohmann::json& j);
FundamentalDomain load_domain(const std::string& path);

// Inverse of domain_from_json for the built-ins (round-trip fidelity is
// limited only by the 17-significant-digit serialization below).
nlohmann::json domain_to_json(const FundamentalDomain& dom);

// Partition description: alphabet size, per-cell arc endpoints in radians,
// branch assignment, transition matrix as row-index lists, and cut-point
// provenance (the vertex whose boundary network produced each cut).
nlohmann::json partition_to_json(const MarkovPartition& part);

}  // namespace bsld
