#pragma once

#include <json.hpp>
#include <string>

#include "latcov/covering.hpp"
#include "latcov/evasive.hpp"
#include "latcov/incidence.hpp"
#include "latcov/minima.hpp"
#include "latcov/oracle.hpp"

namespace latcov::io {

// Keys keep insertion order so dumps are stable.
using Json = nlohmann::ordered_json;

Json q_json(const Q& q);  // "p/q" string
Q q_from(const Json& j);  // string or integer
Json vec_json(const Vec& v);
Vec vec_from(const Json& j);

Json lattice_json(const Lattice& l);
Lattice lattice_from(const Json& j);
Json body_json(const Body& b);
Body body_from(const Json& j);

Json flat_json(const LinearFlat& f);
Json flat_json(const AffineFlat& f);
LinearFlat linear_flat_from(const Json& j, int ambient);
AffineFlat affine_flat_from(const Json& j, int ambient);

// Artifacts carry an "artifact" tag and everything revalidation needs.
Json minima_json(const Lattice& l, const Body& b, const MinimaProfile& m);
MinimaProfile minima_from(const Json& j);
Json cover_json(const CoverResult& c, const Lattice& l, const Body& b);
CoverResult cover_from(const Json& j);
Json evasive_json(const EvasiveSet& s, const Lattice* l = nullptr, const Body* b = nullptr);
EvasiveSet evasive_from(const Json& j);
Json incidence_json(const IncidenceConfig& c);
IncidenceConfig incidence_from(const Json& j);
Json oracle_cover_json(int d, long n, int k, FlatKind kind, const OracleResult& r);
Json oracle_evasive_json(int d, long n, int k, int r, FlatKind kind, const EvasiveOracle& e,
                         const std::vector<std::vector<int64_t>>& points);

struct Revalidation {
    bool ok = false;
    std::string artifact;
    std::string detail;
};
// Parses the artifact back into domain objects and reruns its certificate.
Revalidation revalidate(const Json& j);

Json read_file(const std::string& path);
std::string dump(const Json& j);  // two-space indent, trailing newline
void write_file(const std::string& path, const Json& j);

}  // namespace latcov::io
