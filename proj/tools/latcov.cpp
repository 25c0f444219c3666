// Command-line front end.  Every command prints a deterministic artifact on
// stdout; timings go only into the optional manifest.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "latcov/covering.hpp"
#include "latcov/errors.hpp"
#include "latcov/evasive.hpp"
#include "latcov/incidence.hpp"
#include "latcov/io.hpp"
#include "latcov/minima.hpp"
#include "latcov/oracle.hpp"
#include "latcov/parallel.hpp"

using namespace latcov;
using io::Json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Geometry {
    std::string lattice_file, body_file;
    long grid = 0;
    int d = 0;
};

void add_geometry(CLI::App* sub, Geometry& g) {
    sub->add_option("--lattice", g.lattice_file, "lattice JSON file");
    sub->add_option("--body", g.body_file, "body JSON file");
    sub->add_option("--grid", g.grid, "use Z^d intersected with B^d(n)");
    sub->add_option("-d,--d", g.d, "dimension for --grid");
}

std::pair<Lattice, Body> load_geometry(const Geometry& g) {
    if (g.grid > 0) {
        if (g.d < 1) fail(ErrorCode::Parse, "--grid needs -d");
        return {Lattice::integer_grid(g.d), Body::ball(Q(g.grid))};
    }
    if (g.lattice_file.empty() || g.body_file.empty())
        fail(ErrorCode::Parse, "give --grid n -d d or both --lattice and --body");
    return {io::lattice_from(io::read_file(g.lattice_file)), io::body_from(io::read_file(g.body_file))};
}

FlatKind parse_kind(const std::string& s) {
    if (s == "linear") return FlatKind::Linear;
    if (s == "affine") return FlatKind::Affine;
    fail(ErrorCode::Parse, "kind must be linear or affine");
}

// "a..b" or a single integer
std::pair<long, long> parse_range(const std::string& s) {
    size_t dots = s.find("..");
    try {
        if (dots == std::string::npos) {
            long v = std::stol(s);
            return {v, v};
        }
        long a = std::stol(s.substr(0, dots)), b = std::stol(s.substr(dots + 2));
        if (b < a) fail(ErrorCode::Parse, "empty sweep '" + s + "'");
        return {a, b};
    } catch (const std::logic_error&) {
        fail(ErrorCode::Parse, "bad range '" + s + "'");
    }
}

std::string fixed(double x, int digits = 6) {
    std::ostringstream o;
    o << std::fixed << std::setprecision(digits) << x;
    return o.str();
}

double q_double(const Q& q) { return q.get_d(); }

struct Context {
    bool json = false, csv = false;
    uint64_t seed = 1;
    Json derived = Json::object();
    std::vector<std::string> emitted;
    std::ostream* out = &std::cout;
};

void emit(Context& ctx, const std::string& path, const Json& j) {
    io::write_file(path, j);
    ctx.emitted.push_back(path);
}

// ---- minima ---------------------------------------------------------------

struct MinimaOpts {
    Geometry g;
    std::vector<std::string> checks;
};

int cmd_minima(Context& ctx, const MinimaOpts& o) {
    auto [l, b] = load_geometry(o.g);
    MinimaProfile m = successive_minima(l, b);
    Json j = io::minima_json(l, b, m);
    Json checks = Json::object();
    bool ok = certify_minima(l, b.form(l.n), m);
    checks["certificate"] = ok;
    for (const auto& c : o.checks) {
        if (c == "minkowski") {
            MinkowskiReport r = check_minkowski2(l, b, m);
            checks["minkowski"] = Json{{"lower_ok", r.lower_ok}, {"upper_ok", r.upper_ok},
                                       {"lower_interval", r.lower_interval}, {"upper_interval", r.upper_interval}};
            ok = ok && r.lower_ok && r.upper_ok;
        } else if (c == "transference") {
            TransferenceReport r = check_transference(l, b);
            Json prods = Json::array();
            for (const auto& x : r.products_sq) prods.push_back(io::q_json(x));
            checks["transference"] = Json{{"ok", r.ok}, {"products_squared", prods}};
            ok = ok && r.ok;
        } else if (c == "count") {
            PointCountReport r = point_count_check(l, b, m);
            checks["count"] = Json{{"ok", r.ok}, {"points", r.count}, {"bound", to_string(r.bound)}};
            ok = ok && r.ok;
        } else {
            fail(ErrorCode::Parse, "unknown check '" + c + "'");
        }
    }
    j["checks"] = checks;
    Json ls = Json::array();
    for (const auto& x : m.lambda_sq) ls.push_back(io::q_json(x));
    ctx.derived["lambdas_squared"] = ls;
    if (ctx.csv) {
        *ctx.out << "i,lambda_squared,lambda\n";
        for (size_t i = 0; i < m.lambda_sq.size(); ++i)
            *ctx.out << i + 1 << "," << to_string(m.lambda_sq[i]) << "," << fixed(std::sqrt(q_double(m.lambda_sq[i])))
                     << "\n";
    } else {
        *ctx.out << io::dump(j);
    }
    return ok ? 0 : 2;
}

// ---- cover ----------------------------------------------------------------

struct CoverOpts {
    Geometry g;
    std::string mode = "linear";
    int k = 1;
    std::string emit_path;
    bool verify = false;
};

int cmd_cover(Context& ctx, const CoverOpts& o) {
    auto [l, b] = load_geometry(o.g);
    CoverResult c = o.mode == "affine" ? cover_affine(l, b, o.k) : cover_linear(l, b, o.k);
    Json j = io::cover_json(c, l, b);
    bool ok = true;
    if (o.verify) {
        CoverCheck chk = verify_cover(c, l, b);
        ok = chk.ok;
        j["verified"] = Json{{"ok", chk.ok}, {"points", chk.points}};
    }
    ctx.derived = j["derived"];
    ctx.derived["path"] = c.path;
    ctx.derived["size"] = c.size();
    if (!o.emit_path.empty()) emit(ctx, o.emit_path, j);
    if (ctx.csv) {
        *ctx.out << "index,dim,base_point,generators\n";
        for (size_t i = 0; i < j["flats"].size(); ++i) {
            const Json& f = j["flats"][i];
            *ctx.out << i << "," << f["dim"].get<int>() << ",\"" << (f.contains("base_point") ? f["base_point"].dump() : "")
                     << "\",\"" << f["generators"].dump() << "\"\n";
        }
    } else {
        *ctx.out << io::dump(j);
    }
    return ok ? 0 : 2;
}

// ---- evasive --------------------------------------------------------------

struct EvasiveOpts {
    Geometry g;
    std::string ambient = "fp";
    int k = 1;
    std::string epsilon = "1/2";
    long scale = 0;
    std::string emit_path;
};

int cmd_evasive(Context& ctx, EvasiveOpts o) {
    Q eps = parse_rational(o.epsilon);
    EvasiveSet s;
    Json j;
    if (o.ambient == "fp") {
        if (o.g.d < 1 || o.scale < 2) fail(ErrorCode::Parse, "fp ambient needs -d and --scale p");
        s = build_flat_evasive(o.g.d, o.k, eps, o.scale, ctx.seed);
        j = io::evasive_json(s);
    } else if (o.ambient == "grid") {
        if (o.g.d < 1 || o.scale < 1) fail(ErrorCode::Parse, "grid ambient needs -d and --scale s");
        s = build_affine_evasive(o.g.d, o.k, o.scale, eps, ctx.seed);
        j = io::evasive_json(s);
    } else if (o.ambient == "lattice") {
        if (o.g.grid == 0 && o.g.lattice_file.empty()) o.g.grid = o.scale;
        auto [l, b] = load_geometry(o.g);
        s = build_linear_evasive(l, b, o.k, eps, ctx.seed);
        j = io::evasive_json(s, &l, &b);
    } else {
        fail(ErrorCode::Parse, "ambient must be fp, grid or lattice");
    }
    ctx.derived["r"] = s.r;
    ctx.derived["p"] = s.p;
    ctx.derived["size"] = s.points.size();
    if (!o.emit_path.empty()) emit(ctx, o.emit_path, j);
    if (ctx.csv) {
        *ctx.out << "index,point\n";
        for (size_t i = 0; i < s.points.size(); ++i) *ctx.out << i << ",\"" << Json(s.points[i]).dump() << "\"\n";
    } else {
        *ctx.out << io::dump(j);
    }
    bool ok = s.violations == 0 && (s.ambient != EvasiveAmbient::Lattice || s.congruences_ok);
    return ok ? 0 : 2;
}

// ---- incidence ------------------------------------------------------------

struct IncidenceOpts {
    int d = 2, k = 0;
    long s = 4, t = 4;
    std::string epsilon = "1/2";
    std::string emit_path;
    size_t exhaustive_limit = 50'000'000;
    std::string check_file;
    int r1 = 0, r2 = 0;
    bool sampled = false;
    int d_min = 3, d_max = 6;
};

Json incidence_summary(const IncidenceConfig& c) {
    Json j = io::incidence_json(c);
    j.erase("P");
    j.erase("N");
    j.erase("H");
    j.erase("histogram");
    return j;
}

int cmd_incidence_build(Context& ctx, const IncidenceOpts& o) {
    IncidenceConfig c = build_incidence_config(o.d, o.k, o.s, o.t, parse_rational(o.epsilon), ctx.seed, o.exhaustive_limit);
    ctx.derived["delta"] = io::q_json(c.delta);
    ctx.derived["r1"] = c.r1;
    ctx.derived["r2"] = c.r2;
    ctx.derived["p"] = c.prime;
    if (!o.emit_path.empty()) emit(ctx, o.emit_path, io::incidence_json(c));
    Json j = incidence_summary(c);
    if (ctx.csv) {
        *ctx.out << "d,k,s,t,P,N,H,incidences,r1,r2,free,mode\n"
                 << c.d << "," << c.k << "," << c.s << "," << c.t << "," << c.P.size() << "," << c.N.size() << ","
                 << c.H.size() << "," << to_string(c.incidences) << "," << c.r1 << "," << c.r2 << ","
                 << (c.freeness.free ? "true" : "false") << "," << c.freeness.mode << "\n";
    } else {
        *ctx.out << io::dump(j);
    }
    Z floor = Z(static_cast<unsigned long>(c.P.size())) * Z(static_cast<unsigned long>(c.N.size()));
    return c.freeness.free && c.incidences >= floor ? 0 : 2;
}

int cmd_incidence_check(Context& ctx, const IncidenceOpts& o) {
    IncidenceConfig c = io::incidence_from(io::read_file(o.check_file));
    int r1 = o.r1 > 0 ? o.r1 : c.r1, r2 = o.r2 > 0 ? o.r2 : c.r2;
    IncidenceCount cnt = count_incidences(c.P, c.H);
    FreenessReport fr = check_krr_free(c.P, c.H, r1, r2, !o.sampled, ctx.seed);
    Json j;
    j["artifact"] = "incidence-check";
    j["r1"] = r1;
    j["r2"] = r2;
    j["incidences"] = to_string(cnt.total);
    j["recorded_incidences"] = to_string(c.incidences);
    j["free"] = fr.free;
    j["mode"] = fr.mode;
    j["work"] = fr.work;
    if (fr.witness) j["witness"] = Json{{"points", fr.witness->points}, {"hyperplanes", fr.witness->hyperplanes}};
    *ctx.out << io::dump(j);
    return fr.free && cnt.total == c.incidences ? 0 : 2;
}

int cmd_incidence_exponents(Context& ctx, const IncidenceOpts& o) {
    if (o.d_min < 2 || o.d_max < o.d_min) fail(ErrorCode::Parse, "need 2 <= d-min <= d-max");
    Json rows = Json::array();
    if (!ctx.json) *ctx.out << "d,exponent,decimal,previous,previous_decimal,gap,gap_formula\n";
    for (int d = o.d_min; d <= o.d_max; ++d) {
        ExponentRow r = incidence_exponents(d);
        std::string prev = r.previous ? to_string(*r.previous) : "";
        std::string prevd = r.previous ? fixed(q_double(*r.previous)) : "";
        std::string gap = r.gap ? to_string(*r.gap) : "";
        std::string gf = d > 3 ? to_string(exponent_gap_formula(d)) : "";
        if (ctx.json)
            rows.push_back(Json{{"d", d}, {"exponent", to_string(r.exponent)}, {"previous", prev}, {"gap", gap},
                                {"gap_formula", gf}, {"k", r.k}});
        else
            *ctx.out << d << "," << to_string(r.exponent) << "," << fixed(q_double(r.exponent)) << "," << prev << ","
                     << prevd << "," << gap << "," << gf << "\n";
    }
    if (ctx.json) *ctx.out << io::dump(rows);
    return 0;
}

// ---- oracle ---------------------------------------------------------------

struct OracleOpts {
    long grid = 1;
    int d = 2, k = 1, r = 2;
    std::string kind = "linear";
    std::string sweep;
    uint64_t budget = 100'000'000;
};

int cmd_oracle_cover(Context& ctx, const OracleOpts& o) {
    FlatKind kind = parse_kind(o.kind);
    if (o.sweep.empty()) {
        OracleResult r = min_cover_exact(CoverInstance::grid(o.d, o.grid, o.k, kind), o.budget);
        ctx.derived["optimum"] = r.optimum;
        *ctx.out << io::dump(io::oracle_cover_json(o.d, o.grid, o.k, kind, r));
        return 0;
    }
    auto [a, b] = parse_range(o.sweep);
    Json rows = Json::array();
    if (!ctx.json) *ctx.out << "n,optimum,optimal,nodes,candidates\n";
    for (long n = a; n <= b; ++n) {
        OracleResult r = min_cover_exact(CoverInstance::grid(o.d, n, o.k, kind), o.budget);
        if (ctx.json)
            rows.push_back(Json{{"n", n}, {"optimum", r.optimum}, {"optimal", r.optimal}, {"nodes", r.nodes}});
        else
            *ctx.out << n << "," << r.optimum << "," << (r.optimal ? "true" : "false") << "," << r.nodes << ","
                     << r.candidates << "\n";
    }
    if (ctx.json) *ctx.out << io::dump(rows);
    return 0;
}

int cmd_oracle_evasive(Context& ctx, const OracleOpts& o) {
    FlatKind kind = parse_kind(o.kind);
    auto [a, b] = o.sweep.empty() ? std::pair<long, long>{o.grid, o.grid} : parse_range(o.sweep);
    Json rows = Json::array();
    if (!o.sweep.empty() && !ctx.json) *ctx.out << "n,optimum,optimal,nodes\n";
    for (long n = a; n <= b; ++n) {
        CoverInstance inst = CoverInstance::grid(o.d, n, o.k, kind);
        EvasiveOracle e = max_evasive_exact(inst.points, o.k, o.r, kind, o.budget);
        if (o.sweep.empty()) {
            ctx.derived["optimum"] = e.optimum;
            *ctx.out << io::dump(io::oracle_evasive_json(o.d, n, o.k, o.r, kind, e, inst.points));
        } else if (ctx.json) {
            rows.push_back(Json{{"n", n}, {"optimum", e.optimum}, {"optimal", e.optimal}, {"nodes", e.nodes}});
        } else {
            *ctx.out << n << "," << e.optimum << "," << (e.optimal ? "true" : "false") << "," << e.nodes << "\n";
        }
    }
    if (!o.sweep.empty() && ctx.json) *ctx.out << io::dump(rows);
    return 0;
}

// ---- report ---------------------------------------------------------------

struct ReportOpts {
    std::string sweep;
    int d = 2, k = 1;
    std::string kind = "linear";
    std::vector<std::string> artifacts;
    uint64_t budget = 2'000'000;
};

int cmd_report(Context& ctx, const ReportOpts& o) {
    if (o.sweep.empty() && o.artifacts.empty()) fail(ErrorCode::Parse, "report needs --sweep or --artifact");
    FlatKind kind = parse_kind(o.kind);
    std::ostream& out = *ctx.out;
    bool all_ok = true;

    struct Row {
        long n;
        std::optional<long> oracle;
        bool optimal = false;
        size_t construction;
        double alpha_pow, beta_pow, minima_bound;
        bool roundtrip;
    };
    std::vector<Row> rows;
    if (!o.sweep.empty()) {
        auto [a, b] = parse_range(o.sweep);
        if (a < 1) fail(ErrorCode::Parse, "sweep starts at n >= 1");
        for (long n = a; n <= b; ++n) {
            Lattice l = Lattice::integer_grid(o.d);
            Body body = Body::ball(Q(n));
            CoverResult c = kind == FlatKind::Affine ? cover_affine(l, body, o.k) : cover_linear(l, body, o.k);
            Row r{n, std::nullopt, false, c.size(), c.alpha_pow, c.beta_pow, c.minima_bound, false};
            // round trip: dump, parse back, rerun the certificate
            io::Revalidation v = io::revalidate(Json::parse(io::dump(io::cover_json(c, l, body))));
            r.roundtrip = v.ok;
            try {
                OracleResult orc = min_cover_exact(CoverInstance::grid(o.d, n, o.k, kind), o.budget);
                r.oracle = orc.optimum;
                r.optimal = orc.optimal;
                io::Revalidation ov =
                    io::revalidate(Json::parse(io::dump(io::oracle_cover_json(o.d, n, o.k, kind, orc))));
                r.roundtrip = r.roundtrip && ov.ok;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::TooManyPoints && e.code() != ErrorCode::TooManyFlats) throw;
            }
            all_ok = all_ok && r.roundtrip;
            rows.push_back(r);
        }
    }

    if (ctx.csv) {
        out << "n,oracle,construction\n";
        for (const auto& r : rows)
            out << r.n << "," << (r.oracle ? std::to_string(*r.oracle) + (r.optimal ? "" : "+") : "") << ","
                << r.construction << "\n";
    } else if (!rows.empty()) {
        out << "# Cover sweep d=" << o.d << " k=" << o.k << " " << o.kind << "\n\n";
        out << "| n | oracle | construction |\n|---|---|---|\n";
        for (const auto& r : rows)
            out << "| " << r.n << " | "
                << (r.oracle ? std::to_string(*r.oracle) + (r.optimal ? "" : " (budget)") : "-") << " | "
                << r.construction << " |\n";
        out << "\n## Construction against minima\n\n"
            << "| n | construction | alpha^(d-k) | beta^(d-k) | minima bound | round trip |\n"
            << "|---|---|---|---|---|---|\n";
        for (const auto& r : rows)
            out << "| " << r.n << " | " << r.construction << " | " << fixed(r.alpha_pow, 3) << " | "
                << fixed(r.beta_pow, 3) << " | " << fixed(r.minima_bound, 3) << " | " << (r.roundtrip ? "ok" : "FAIL")
                << " |\n";
        out << "\n## Slopes\n\n";
        std::vector<std::pair<Z, Z>> cs, os;
        for (const auto& r : rows) {
            if (r.construction > 0) cs.push_back({Z(r.n), Z(static_cast<unsigned long>(r.construction))});
            if (r.oracle && r.optimal && *r.oracle > 0) os.push_back({Z(r.n), Z(*r.oracle)});
        }
        double predicted = o.d > 1 ? static_cast<double>(o.d * (o.d - o.k)) / (o.d - 1) : 0;
        out << "predicted d(d-k)/(d-1) = " << fixed(predicted, 3) << "\n\n";
        auto line = [&](const char* name, const std::vector<std::pair<Z, Z>>& s, double band) {
            if (s.size() < 3) {
                out << "- " << name << ": fewer than 3 points\n";
                return;
            }
            SlopeFit f = fit_exponent(s);
            out << "- " << name << ": " << fixed(f.slope, 3) << " +- " << fixed(f.stderr_, 3) << " (band +-" << band
                << ": " << (std::abs(f.slope - predicted) <= band ? "inside" : "outside") << ")\n";
        };
        line("construction", cs, 0.15);
        line("oracle", os, 0.2);
    }

    if (!o.artifacts.empty()) {
        if (!ctx.csv) out << "\n## Artifacts\n\n";
        for (const auto& path : o.artifacts) {
            io::Revalidation v = io::revalidate(io::read_file(path));
            all_ok = all_ok && v.ok;
            if (ctx.csv)
                out << path << "," << v.artifact << "," << (v.ok ? "ok" : "FAIL") << "\n";
            else
                out << "- " << path << " (" << v.artifact << "): " << (v.ok ? "ok" : "FAIL") << ", " << v.detail << "\n";
        }
    }
    ctx.derived["rows"] = rows.size();
    return all_ok ? 0 : 2;
}

// ---- driver ---------------------------------------------------------------

Json options_json(const CLI::App* app) {
    Json j = Json::object();
    for (const CLI::Option* opt : app->get_options()) {
        if (opt->count() == 0 || opt->get_name() == "--help") continue;
        std::vector<std::string> res = opt->results();
        if (res.size() == 1)
            j[opt->get_name()] = res[0];
        else
            j[opt->get_name()] = res;
    }
    return j;
}

int run(const std::vector<std::string>& args);

int run_parsed(const std::vector<std::string>& args) {
    CLI::App app{"Exact lattice covering, evasive sets and incidence constructions", "latcov"};
    app.set_version_flag("--version", kVersion);
    Context ctx;
    std::string manifest_path, replay_path;
    app.add_flag("--json", ctx.json, "emit JSON where a command also supports CSV");
    app.add_flag("--csv", ctx.csv, "emit CSV");
    app.add_option("--seed", ctx.seed, "64-bit seed");
    app.add_option("--manifest", manifest_path, "write a run manifest");
    app.add_option("--replay", replay_path, "rerun the command stored in a manifest");
    app.require_subcommand(0, 1);

    MinimaOpts mo;
    CLI::App* minima = app.add_subcommand("minima", "successive minima with optional checks");
    add_geometry(minima, mo.g);
    minima->add_option("--check", mo.checks, "minkowski | transference | count")
        ->check(CLI::IsMember({"minkowski", "transference", "count"}));

    CoverOpts co;
    CLI::App* cover = app.add_subcommand("cover", "cover lattice points by k-flats");
    add_geometry(cover, co.g);
    cover->add_option("--mode", co.mode)->check(CLI::IsMember({"linear", "affine"}));
    cover->add_option("-k", co.k)->required();
    cover->add_option("--emit", co.emit_path, "write flats JSON");
    cover->add_flag("--verify", co.verify, "rerun the cover certificate");

    EvasiveOpts eo;
    CLI::App* evasive = app.add_subcommand("evasive", "build an evasive set");
    add_geometry(evasive, eo.g);
    evasive->add_option("--ambient", eo.ambient)->check(CLI::IsMember({"fp", "grid", "lattice"}));
    evasive->add_option("-k", eo.k)->required();
    evasive->add_option("--epsilon", eo.epsilon);
    evasive->add_option("--scale", eo.scale, "p for fp, radius for grid and lattice");
    evasive->add_option("--emit", eo.emit_path);

    IncidenceOpts io_;
    CLI::App* incidence = app.add_subcommand("incidence", "incidence constructions");
    incidence->require_subcommand(1);
    CLI::App* ibuild = incidence->add_subcommand("build", "build a point/hyperplane configuration");
    ibuild->add_option("-d,--d", io_.d);
    ibuild->add_option("-k", io_.k);
    ibuild->add_option("-s", io_.s);
    ibuild->add_option("-t", io_.t);
    ibuild->add_option("--epsilon", io_.epsilon);
    ibuild->add_option("--emit", io_.emit_path);
    ibuild->add_option("--exhaustive-limit", io_.exhaustive_limit);
    CLI::App* icheck = incidence->add_subcommand("check", "recount and recheck a configuration");
    icheck->add_option("config", io_.check_file)->required();
    icheck->add_option("--r1", io_.r1);
    icheck->add_option("--r2", io_.r2);
    icheck->add_flag("--sampled", io_.sampled);
    CLI::App* iexp = incidence->add_subcommand("exponents", "exponent table");
    iexp->add_option("--d-min", io_.d_min);
    iexp->add_option("--d-max", io_.d_max);

    OracleOpts oo;
    CLI::App* oracle = app.add_subcommand("oracle", "exact small-instance oracles");
    oracle->require_subcommand(1);
    CLI::App* ocover = oracle->add_subcommand("cover", "minimum cover");
    CLI::App* oev = oracle->add_subcommand("evasive", "maximum evasive subset");
    for (CLI::App* s : {ocover, oev}) {
        s->add_option("--grid", oo.grid);
        s->add_option("-d,--d", oo.d);
        s->add_option("-k", oo.k);
        s->add_option("--kind", oo.kind)->check(CLI::IsMember({"linear", "affine"}));
        s->add_option("--sweep", oo.sweep, "n1..n2, CSV series");
        s->add_option("--budget", oo.budget);
    }
    oev->add_option("-r", oo.r);

    ReportOpts ro;
    CLI::App* report = app.add_subcommand("report", "construction vs oracle tables and artifact checks");
    report->add_option("--sweep", ro.sweep, "n1..n2");
    report->add_option("-d,--d", ro.d);
    report->add_option("-k", ro.k);
    report->add_option("--kind", ro.kind)->check(CLI::IsMember({"linear", "affine"}));
    report->add_option("--artifact", ro.artifacts, "JSON artifact to revalidate");
    report->add_option("--budget", ro.budget);

    std::vector<const char*> argv{"latcov"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 4;
    }

    if (!replay_path.empty()) {
        Json m = io::read_file(replay_path);
        std::vector<std::string> cmd = m.at("command").get<std::vector<std::string>>();
        return run(cmd);
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return 4;
    }

    auto start = std::chrono::steady_clock::now();
    CLI::App* sub = app.get_subcommands()[0];
    CLI::App* leaf = sub->get_subcommands().empty() ? sub : sub->get_subcommands()[0];
    int rc;
    if (sub == minima) rc = cmd_minima(ctx, mo);
    else if (sub == cover) rc = cmd_cover(ctx, co);
    else if (sub == evasive) rc = cmd_evasive(ctx, eo);
    else if (leaf == ibuild) rc = cmd_incidence_build(ctx, io_);
    else if (leaf == icheck) rc = cmd_incidence_check(ctx, io_);
    else if (leaf == iexp) rc = cmd_incidence_exponents(ctx, io_);
    else if (leaf == ocover) rc = cmd_oracle_cover(ctx, oo);
    else if (leaf == oev) rc = cmd_oracle_evasive(ctx, oo);
    else rc = cmd_report(ctx, ro);
    std::cout.flush();
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    if (!manifest_path.empty()) {
        // the stored command excludes --manifest so a replay does not rewrite it
        std::vector<std::string> cmd;
        for (size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--manifest") {
                ++i;
                continue;
            }
            if (args[i].rfind("--manifest=", 0) == 0) continue;
            cmd.push_back(args[i]);
        }
        Json m;
        m["command"] = cmd;
        m["subcommand"] = leaf == sub ? sub->get_name() : sub->get_name() + " " + leaf->get_name();
        m["seed"] = ctx.seed;
        m["parameters"] = options_json(leaf);
        m["module_versions"] = Json{{"latcov", kVersion}, {"lattice-core", kVersion}, {"minima", kVersion},
                                    {"covering", kVersion}, {"evasive", kVersion}, {"incidence", kVersion},
                                    {"oracle", kVersion}, {"cli", kVersion}};
        m["derived"] = ctx.derived;
        m["outputs"] = ctx.emitted;
        m["exit_code"] = rc;
        m["threads"] = thread_count();
        m["timings_ms"] = Json{{"total", ms}};
        io::write_file(manifest_path, m);
    }
    return rc;
}

int run(const std::vector<std::string>& args) {
    try {
        return run_parsed(args);
    } catch (const Error& e) {
        std::cout.flush();
        std::cerr << "latcov: " << e.what() << "\n";
        return error_exit_code(e.code());
    } catch (const std::bad_alloc&) {
        std::cerr << "latcov: out of memory\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "latcov: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);
    return run(std::vector<std::string>(argv + 1, argv + argc));
}
