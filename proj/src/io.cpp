#include "latcov/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "latcov/errors.hpp"

namespace latcov::io {

namespace {

template <class T>
T get(const Json& j, const char* key) {
    if (!j.contains(key)) fail(ErrorCode::Parse, std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Parse, std::string("field '") + key + "': " + e.what());
    }
}

const Json& field(const Json& j, const char* key) {
    if (!j.contains(key)) fail(ErrorCode::Parse, std::string("missing field '") + key + "'");
    return j.at(key);
}

Json z_json(const Z& z) { return to_string(z); }
Z z_from(const Json& j) {
    if (j.is_number_integer()) return Z(j.get<long>());
    if (!j.is_string()) fail(ErrorCode::Parse, "integer must be a string or number");
    Z z;
    if (z.set_str(j.get<std::string>(), 10) != 0) fail(ErrorCode::Parse, "bad integer '" + j.get<std::string>() + "'");
    return z;
}

Json mat_json(const Mat& m) {
    Json a = Json::array();
    for (const auto& r : m) a.push_back(vec_json(r));
    return a;
}
Mat mat_from(const Json& j) {
    if (!j.is_array()) fail(ErrorCode::Parse, "matrix must be an array of rows");
    Mat m;
    for (const auto& r : j) m.push_back(vec_from(r));
    return m;
}

using IPts = std::vector<std::vector<int64_t>>;

IPts ipts_from(const Json& j) {
    try {
        return j.get<IPts>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Parse, std::string("integer point list: ") + e.what());
    }
}

const char* ambient_name(EvasiveAmbient a) {
    switch (a) {
        case EvasiveAmbient::Fp: return "fp";
        case EvasiveAmbient::Grid: return "grid";
        case EvasiveAmbient::Lattice: return "lattice";
    }
    return "fp";
}

EvasiveAmbient ambient_from(const std::string& s) {
    if (s == "fp") return EvasiveAmbient::Fp;
    if (s == "grid") return EvasiveAmbient::Grid;
    if (s == "lattice") return EvasiveAmbient::Lattice;
    fail(ErrorCode::Parse, "unknown ambient '" + s + "'");
}

int64_t mod(int64_t a, int64_t p) {
    int64_t m = a % p;
    return m < 0 ? m + p : m;
}

// every r-subset has rank >= k+1; false also when the check would be too large
bool linear_subsets_ok(const IPts& S, int k, int r, std::string* why) {
    size_t n = S.size();
    if (static_cast<size_t>(r) > n) return true;
    double combos = 1;
    for (int i = 0; i < r; ++i) combos = combos * static_cast<double>(n - i) / (i + 1);
    if (combos > 2e6) {
        *why = "too many r-subsets to recheck";
        return false;
    }
    std::vector<size_t> idx(r);
    for (int i = 0; i < r; ++i) idx[i] = i;
    for (;;) {
        IPts rows;
        for (size_t i : idx) rows.push_back(S[i]);
        if (rank_rational(rows) <= k) {
            *why = "an r-subset lies in a linear k-flat";
            return false;
        }
        int i = r;
        while (i > 0 && idx[i - 1] == n - r + i - 1) --i;
        if (i == 0) return true;
        ++idx[i - 1];
        for (int t = i; t < r; ++t) idx[t] = idx[t - 1] + 1;
    }
}

FlatKind kind_from(const std::string& s) {
    if (s == "linear") return FlatKind::Linear;
    if (s == "affine") return FlatKind::Affine;
    fail(ErrorCode::Parse, "unknown flat kind '" + s + "'");
}

}  // namespace

Json q_json(const Q& q) { return to_string(q); }

Q q_from(const Json& j) {
    if (j.is_number_integer()) return Q(j.get<long>());
    if (!j.is_string()) fail(ErrorCode::Parse, "rational must be a \"p/q\" string");
    return parse_rational(j.get<std::string>());
}

Json vec_json(const Vec& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(q_json(x));
    return a;
}

Vec vec_from(const Json& j) {
    if (!j.is_array()) fail(ErrorCode::Parse, "vector must be an array");
    Vec v;
    for (const auto& x : j) v.push_back(q_from(x));
    return v;
}

Json lattice_json(const Lattice& l) {
    Json j;
    j["dim"] = l.n;
    j["basis"] = mat_json(l.basis);
    return j;
}

Lattice lattice_from(const Json& j) {
    int n = get<int>(j, "dim");
    return Lattice::make(mat_from(field(j, "basis")), n);
}

Json body_json(const Body& b) {
    Json j;
    if (b.is_ball())
        j["ball"] = Json{{"radius", q_json(b.radius)}};
    else
        j["ellipsoid"] = Json{{"matrix", mat_json(b.matrix)}};
    return j;
}

Body body_from(const Json& j) {
    if (j.contains("ball")) return Body::ball(q_from(field(j["ball"], "radius")));
    if (j.contains("ellipsoid")) return Body::ellipsoid(mat_from(field(j["ellipsoid"], "matrix")));
    fail(ErrorCode::Parse, "body must be {\"ball\": ...} or {\"ellipsoid\": ...}");
}

Json flat_json(const LinearFlat& f) {
    Json j;
    j["dim"] = f.dim;
    j["generators"] = mat_json(f.rows);
    return j;
}

Json flat_json(const AffineFlat& f) {
    Json j = flat_json(f.dir);
    j["base_point"] = vec_json(f.base);
    return j;
}

LinearFlat linear_flat_from(const Json& j, int ambient) {
    Mat g = mat_from(field(j, "generators"));
    for (const auto& v : g)
        if (static_cast<int>(v.size()) != ambient) fail(ErrorCode::Parse, "generator length mismatch");
    LinearFlat f = canonical_linear_flat(g, ambient);
    if (f.dim != get<int>(j, "dim")) fail(ErrorCode::Parse, "flat dim does not match its generators");
    return f;
}

AffineFlat affine_flat_from(const Json& j, int ambient) {
    Vec base = vec_from(field(j, "base_point"));
    if (static_cast<int>(base.size()) != ambient) fail(ErrorCode::Parse, "base point length mismatch");
    LinearFlat dir = linear_flat_from(j, ambient);
    return canonical_affine_flat(base, dir.rows, ambient);
}

Json minima_json(const Lattice& l, const Body& b, const MinimaProfile& m) {
    Json j;
    j["artifact"] = "minima";
    j["lattice"] = lattice_json(l);
    j["body"] = body_json(b);
    Json ls = Json::array();
    for (const auto& x : m.lambda_sq) ls.push_back(q_json(x));
    j["lambdas_squared"] = ls;
    j["witnesses"] = m.witness;
    Json wp = Json::array();
    for (const auto& v : m.witness_points) wp.push_back(vec_json(v));
    j["witness_points"] = wp;
    Json tried = Json::array();
    for (const auto& x : m.bounds_tried) tried.push_back(q_json(x));
    j["transcript"] = Json{{"bounds_tried", tried}, {"points_enumerated", m.points_enumerated}};
    return j;
}

MinimaProfile minima_from(const Json& j) {
    MinimaProfile m;
    Lattice l = lattice_from(field(j, "lattice"));
    m.n = l.n;
    m.r = l.rank();
    for (const auto& x : field(j, "lambdas_squared")) m.lambda_sq.push_back(q_from(x));
    m.witness = ipts_from(field(j, "witnesses"));
    for (const auto& c : m.witness) m.witness_points.push_back(l.point(c));
    if (static_cast<int>(m.lambda_sq.size()) != m.r || static_cast<int>(m.witness.size()) != m.r)
        fail(ErrorCode::Parse, "minima arrays must have one entry per basis vector");
    return m;
}

Json cover_json(const CoverResult& c, const Lattice& l, const Body& b) {
    Json j;
    j["artifact"] = "cover";
    j["mode"] = c.affine ? "affine" : "linear";
    j["k"] = c.k;
    j["lattice"] = lattice_json(l);
    j["body"] = body_json(b);
    j["path"] = c.path;
    j["size"] = c.size();
    j["covered_points"] = c.covered_points;
    Json flats = Json::array();
    if (c.affine)
        for (const auto& f : c.flats_affine) flats.push_back(flat_json(f));
    else
        for (const auto& f : c.linear) flats.push_back(flat_json(f));
    j["flats"] = flats;
    Json ls = Json::array();
    for (const auto& x : c.minima.lambda_sq) ls.push_back(q_json(x));
    Json derived;
    derived["lambdas_squared"] = ls;
    if (c.ab) {
        derived["alpha_sq"] = Json{{"base", q_json(c.ab->alpha_sq.base)}, {"root", c.ab->alpha_sq.e}};
        derived["beta_sq"] = Json{{"base", q_json(c.ab->beta_sq.base)}, {"root", c.ab->beta_sq.e}};
        derived["q"] = c.ab->q;
    }
    if (c.path == "dual-box") {
        derived["box_c"] = q_json(c.box_c);
        derived["box_q"] = c.box_q;
        derived["box_d_plus"] = z_json(c.box_d_plus);
        derived["box_d"] = z_json(c.box_d);
        derived["box_d_prime"] = c.box_d_prime;
    }
    derived["radius_sq"] = q_json(c.radius_sq);
    j["derived"] = derived;
    // floating decorations
    j["decorations"] = Json{{"alpha_pow", c.alpha_pow}, {"beta_pow", c.beta_pow}, {"minima_bound", c.minima_bound}};
    return j;
}

CoverResult cover_from(const Json& j) {
    CoverResult c;
    std::string mode = get<std::string>(j, "mode");
    if (mode != "linear" && mode != "affine") fail(ErrorCode::Parse, "mode must be linear or affine");
    c.affine = mode == "affine";
    c.k = get<int>(j, "k");
    Lattice l = lattice_from(field(j, "lattice"));
    c.n = l.n;
    c.path = j.value("path", std::string());
    for (const auto& f : field(j, "flats")) {
        if (c.affine)
            c.flats_affine.push_back(affine_flat_from(f, l.n));
        else
            c.linear.push_back(linear_flat_from(f, l.n));
    }
    c.covered_points = j.value("covered_points", size_t{0});
    return c;
}

Json evasive_json(const EvasiveSet& s, const Lattice* l, const Body* b) {
    Json j;
    j["artifact"] = "evasive";
    j["ambient"] = ambient_name(s.ambient);
    j["flat_kind"] = s.flat_kind;
    j["d"] = s.d;
    j["k"] = s.k;
    j["epsilon"] = q_json(s.epsilon);
    j["p"] = s.p;
    j["r"] = s.r;
    j["seed"] = s.seed;
    j["points"] = s.points;
    j["verification"] = s.verification;
    Json t;
    t["attempts"] = s.attempts;
    t["flats_checked"] = s.flats_checked;
    t["subsets_checked"] = s.subsets_checked;
    t["violations"] = s.violations;
    t["size_floor"] = s.size_floor;
    t["size_ok"] = s.size_ok;
    t["proof_precondition"] = s.proof_precondition;
    t["our_r_formula"] = s.our_r_formula;
    if (s.ambient == EvasiveAmbient::Lattice) {
        t["prime_bound"] = s.prime_bound;
        t["congruences_ok"] = s.congruences_ok;
        t["rank_agreement_checked"] = s.rank_agreement_checked;
        Json lifts = Json::array();
        for (const auto& lf : s.lifts)
            lifts.push_back(Json{{"j", lf.j}, {"w", lf.w}, {"fallback", lf.fallback}, {"tries", lf.tries}});
        t["lifts"] = lifts;
    }
    j["transcript"] = t;
    if (s.ambient == EvasiveAmbient::Lattice) {
        j["residues"] = s.residues;
        Json ap = Json::array();
        for (const auto& v : s.ambient_points) ap.push_back(vec_json(v));
        j["ambient_points"] = ap;
        if (l) j["lattice"] = lattice_json(*l);
        if (b) j["body"] = body_json(*b);
    }
    return j;
}

EvasiveSet evasive_from(const Json& j) {
    EvasiveSet s;
    s.ambient = ambient_from(get<std::string>(j, "ambient"));
    s.flat_kind = j.value("flat_kind", std::string());
    s.d = get<int>(j, "d");
    s.k = get<int>(j, "k");
    s.epsilon = q_from(field(j, "epsilon"));
    s.p = get<int64_t>(j, "p");
    s.r = get<int>(j, "r");
    s.seed = j.value("seed", uint64_t{0});
    s.points = ipts_from(field(j, "points"));
    s.verification = j.value("verification", std::string());
    if (s.ambient == EvasiveAmbient::Lattice) {
        s.residues = ipts_from(field(j, "residues"));
        if (s.residues.size() != s.points.size()) fail(ErrorCode::Parse, "one residue per point expected");
        const Json& t = field(j, "transcript");
        for (const auto& lf : field(t, "lifts")) {
            Lift x;
            x.j = get<int64_t>(lf, "j");
            x.w = lf.value("w", std::vector<int64_t>{});
            x.fallback = lf.value("fallback", false);
            s.lifts.push_back(x);
        }
        if (s.lifts.size() != s.points.size()) fail(ErrorCode::Parse, "one lift per point expected");
        for (size_t i = 0; i < s.points.size(); ++i) s.lifts[i].coeffs = s.points[i];
    }
    return s;
}

Json incidence_json(const IncidenceConfig& c) {
    Json j;
    j["artifact"] = "incidence";
    j["d"] = c.d;
    j["k"] = c.k;
    j["s"] = c.s;
    j["t"] = c.t;
    j["epsilon"] = q_json(c.epsilon);
    j["delta"] = q_json(c.delta);
    j["seed"] = c.seed;
    j["r1"] = c.r1;
    j["r2"] = c.r2;
    j["r2_measured"] = c.r2_measured;
    j["normals_source"] = c.normals_source;
    j["prime"] = c.prime;
    j["incidences"] = z_json(c.incidences);
    j["sizes"] = Json{{"P", c.P.size()}, {"N", c.N.size()}, {"H", c.H.size()}};
    j["hyperplane_bound_ok"] = c.hyperplane_bound_ok;
    Json fr;
    fr["free"] = c.freeness.free;
    fr["mode"] = c.freeness.mode;
    fr["work"] = c.freeness.work;
    if (c.freeness.witness)
        fr["witness"] = Json{{"points", c.freeness.witness->points}, {"hyperplanes", c.freeness.witness->hyperplanes}};
    j["freeness"] = fr;
    j["decorations"] = Json{{"c1", c.c1}, {"c2", c.c2}, {"n_target", c.n_target}, {"m_target", c.m_target}};
    j["histogram"] = c.histogram;
    j["P"] = c.P;
    j["N"] = c.N;
    Json H = Json::array();
    for (const auto& h : c.H) H.push_back(Json{{"z", h.z}, {"c", h.c}});
    j["H"] = H;
    return j;
}

IncidenceConfig incidence_from(const Json& j) {
    IncidenceConfig c;
    c.d = get<int>(j, "d");
    c.k = get<int>(j, "k");
    c.s = j.value("s", 0L);
    c.t = j.value("t", 0L);
    if (j.contains("epsilon")) c.epsilon = q_from(j["epsilon"]);
    if (j.contains("delta")) c.delta = q_from(j["delta"]);
    c.seed = j.value("seed", uint64_t{0});
    c.r1 = get<int>(j, "r1");
    c.r2 = get<int>(j, "r2");
    c.r2_measured = j.value("r2_measured", false);
    c.normals_source = j.value("normals_source", std::string());
    c.prime = j.value("prime", int64_t{0});
    c.P = ipts_from(field(j, "P"));
    c.N = j.contains("N") ? ipts_from(j["N"]) : IPts{};
    for (const auto& h : field(j, "H")) c.H.push_back(Hyperplane{get<std::vector<int64_t>>(h, "z"), get<int64_t>(h, "c")});
    if (j.contains("incidences")) c.incidences = z_from(j["incidences"]);
    if (j.contains("freeness")) {
        c.freeness.free = j["freeness"].value("free", false);
        c.freeness.mode = j["freeness"].value("mode", std::string());
        c.freeness.work = j["freeness"].value("work", size_t{0});
    }
    for (const auto& p : c.P)
        if (static_cast<int>(p.size()) != c.d) fail(ErrorCode::Parse, "point length mismatch");
    for (const auto& h : c.H)
        if (static_cast<int>(h.z.size()) != c.d) fail(ErrorCode::Parse, "normal length mismatch");
    return c;
}

Json oracle_cover_json(int d, long n, int k, FlatKind kind, const OracleResult& r) {
    Json j;
    j["artifact"] = "oracle-cover";
    j["d"] = d;
    j["n"] = n;
    j["k"] = k;
    j["kind"] = kind == FlatKind::Linear ? "linear" : "affine";
    j["optimum"] = r.optimum;
    j["optimal"] = r.optimal;
    j["greedy"] = r.greedy;
    j["nodes"] = r.nodes;
    j["candidates"] = r.candidates;
    j["points"] = r.points;
    Json flats = Json::array();
    if (kind == FlatKind::Linear)
        for (const auto& f : r.linear) flats.push_back(flat_json(f));
    else
        for (const auto& f : r.affine) flats.push_back(flat_json(f));
    j["flats"] = flats;
    return j;
}

Json oracle_evasive_json(int d, long n, int k, int r, FlatKind kind, const EvasiveOracle& e,
                         const std::vector<std::vector<int64_t>>& points) {
    Json j;
    j["artifact"] = "oracle-evasive";
    j["d"] = d;
    j["n"] = n;
    j["k"] = k;
    j["r"] = r;
    j["kind"] = kind == FlatKind::Linear ? "linear" : "affine";
    j["optimum"] = e.optimum;
    j["optimal"] = e.optimal;
    j["nodes"] = e.nodes;
    j["constraints"] = e.constraints;
    IPts chosen;
    for (size_t i : e.chosen) chosen.push_back(points[i]);
    j["chosen"] = chosen;
    return j;
}

Revalidation revalidate(const Json& j) {
    Revalidation v;
    v.artifact = get<std::string>(j, "artifact");
    if (v.artifact == "minima") {
        Lattice l = lattice_from(field(j, "lattice"));
        Body b = body_from(field(j, "body"));
        MinimaProfile m = minima_from(j);
        v.ok = certify_minima(l, b.form(l.n), m);
        v.detail = v.ok ? "minima certificate holds" : "minima certificate failed";
    } else if (v.artifact == "cover") {
        Lattice l = lattice_from(field(j, "lattice"));
        Body b = body_from(field(j, "body"));
        CoverResult c = cover_from(j);
        CoverCheck chk = verify_cover(c, l, b);
        v.ok = chk.ok && c.size() == get<size_t>(j, "size");
        v.detail = chk.ok ? std::to_string(chk.points) + " points covered" : "a point is uncovered";
    } else if (v.artifact == "evasive") {
        EvasiveSet s = evasive_from(j);
        std::set<IPts::value_type> distinct(s.points.begin(), s.points.end());
        if (distinct.size() != s.points.size()) {
            v.detail = "repeated points";
            return v;
        }
        if (s.ambient == EvasiveAmbient::Fp) {
            make_prime_field(s.p);
            for (const auto& x : s.points)
                for (auto c : x)
                    if (c < 0 || c >= s.p) fail(ErrorCode::Parse, "residue out of range");
            v.ok = verify_flat_evasive(s.points, s.k, s.r, s.p);
            v.detail = "affine flat enumeration";
        } else if (s.ambient == EvasiveAmbient::Grid) {
            v.ok = verify_affine_evasive(s.points, s.k, s.r);
            v.detail = "affine hull enumeration";
        } else {
            Lattice l = lattice_from(field(j, "lattice"));
            Body b = body_from(field(j, "body"));
            make_prime_field(s.p);
            // lifts stay in the body and reduce to j times their residue
            bool lifts_ok = true;
            for (size_t i = 0; i < s.points.size(); ++i) {
                const auto& c = s.points[i];
                const auto& u = s.residues[i];
                if (static_cast<int>(c.size()) != l.rank() || u.size() != c.size() || u.back() != 1) {
                    lifts_ok = false;
                    break;
                }
                int64_t jj = s.lifts[i].j;
                if (jj <= 0 || jj >= s.p) lifts_ok = false;
                for (size_t t = 0; t < c.size(); ++t)
                    if (mod(c[t] - jj * u[t], s.p) != 0) lifts_ok = false;
                if (b.value(l.point(c)) > 1) lifts_ok = false;
            }
            // residues with the trailing 1 dropped must be flat-evasive in F_p^{d-1};
            // then every r lifts have F_p rank, hence rational rank, >= k+1
            IPts base;
            for (const auto& u : s.residues) base.push_back(IPts::value_type(u.begin(), u.end() - 1));
            bool flats_ok = verify_flat_evasive(base, s.k, s.r, s.p);
            v.ok = lifts_ok && flats_ok;
            v.detail = !lifts_ok ? "lift congruence or body membership failed"
                                 : (flats_ok ? "congruences and residue flat certificate hold" : "residues not flat-evasive");
        }
        if (v.ok && v.detail.empty()) v.detail = "ok";
    } else if (v.artifact == "incidence") {
        IncidenceConfig c = incidence_from(j);
        IncidenceCount cnt = count_incidences(c.P, c.H);
        bool count_ok = cnt.total == c.incidences;
        std::set<Hyperplane> hs(c.H.begin(), c.H.end());
        bool distinct = hs.size() == c.H.size();
        FreenessReport fr = check_krr_free(c.P, c.H, c.r1, c.r2, c.freeness.mode != "sampled", Rng(c.seed).split(3).next());
        v.ok = count_ok && distinct && fr.free == c.freeness.free;
        v.detail = "incidences " + to_string(cnt.total) + (count_ok ? " match" : " differ") + ", freeness " + fr.mode +
                   (fr.free ? " free" : " not free");
    } else if (v.artifact == "oracle-cover") {
        int d = get<int>(j, "d"), k = get<int>(j, "k");
        long n = get<long>(j, "n");
        FlatKind kind = kind_from(get<std::string>(j, "kind"));
        CoverInstance inst = CoverInstance::grid(d, n, k, kind);
        std::vector<LinearFlat> lin;
        std::vector<AffineFlat> aff;
        for (const auto& f : field(j, "flats")) {
            if (kind == FlatKind::Linear)
                lin.push_back(linear_flat_from(f, d));
            else
                aff.push_back(affine_flat_from(f, d));
        }
        bool ok = static_cast<long>(lin.size() + aff.size()) == get<long>(j, "optimum");
        for (const auto& f : lin) ok = ok && f.dim <= k;
        for (const auto& f : aff) ok = ok && f.dir.dim <= k;
        size_t uncovered = 0;
        for (const auto& p : inst.points) {
            Vec x = to_q(p);
            bool hit = false;
            for (const auto& f : lin) hit = hit || f.contains(x);
            for (const auto& f : aff) hit = hit || f.contains(x);
            uncovered += !hit;
        }
        v.ok = ok && uncovered == 0;
        v.detail = std::to_string(inst.points.size() - uncovered) + "/" + std::to_string(inst.points.size()) + " points covered";
    } else if (v.artifact == "oracle-evasive") {
        int k = get<int>(j, "k"), r = get<int>(j, "r");
        FlatKind kind = kind_from(get<std::string>(j, "kind"));
        IPts chosen = ipts_from(field(j, "chosen"));
        CoverInstance inst = CoverInstance::grid(get<int>(j, "d"), get<long>(j, "n"), k, kind);
        std::set<IPts::value_type> grid(inst.points.begin(), inst.points.end());
        bool inside = true;
        for (const auto& p : chosen) inside = inside && grid.count(p);
        bool cap;
        if (kind == FlatKind::Affine) {
            cap = verify_affine_evasive(chosen, k, r);
            v.detail = "affine hull enumeration";
        } else {
            cap = linear_subsets_ok(chosen, k, r, &v.detail);
            if (cap) v.detail = "r-subset ranks";
        }
        v.ok = inside && cap && static_cast<long>(chosen.size()) == get<long>(j, "optimum");
    } else {
        fail(ErrorCode::Parse, "unknown artifact '" + v.artifact + "'");
    }
    return v;
}

Json read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Parse, "cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Parse, path + ": " + e.what());
    }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_file(const std::string& path, const Json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Parse, "cannot write " + path);
    out << dump(j);
}

}  // namespace latcov::io
