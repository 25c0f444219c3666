#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "latcov/errors.hpp"
#include "latcov/io.hpp"

using namespace latcov;
using io::Json;

namespace {

Json reparse(const Json& j) { return Json::parse(io::dump(j)); }

int cli(const std::string& args, std::string* out = nullptr) {
    std::string file = (std::filesystem::temp_directory_path() / "latcov_io_test.out").string();
    std::string cmd = std::string("'") + LATCOV_CLI + "' " + args + " > '" + file + "' 2>/dev/null";
    int st = std::system(cmd.c_str());
    if (out) {
        std::ifstream in(file);
        std::ostringstream s;
        s << in.rdbuf();
        *out = s.str();
    }
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("rationals serialize as strings") {
    CHECK(io::q_json(Q(-3, 4)) == "-3/4");
    CHECK(io::q_json(Q(5)) == "5");
    CHECK(io::q_from(Json("6/8")) == Q(3, 4));
    CHECK(io::q_from(Json(7)) == Q(7));
    CHECK_THROWS_AS(io::q_from(Json(0.5)), Error);
    CHECK_THROWS_AS(io::q_from(Json("1/0")), Error);
}

TEST_CASE("lattice and body round trip") {
    Lattice l = Lattice::make({Vec{Q(1), Q(0)}, Vec{Q(1, 2), Q(3, 2)}}, 2);
    Lattice back = io::lattice_from(reparse(io::lattice_json(l)));
    CHECK(back.basis == l.basis);
    Body e = Body::ellipsoid({Vec{Q(2), Q(1)}, Vec{Q(1), Q(3)}});
    Body eb = io::body_from(reparse(io::body_json(e)));
    CHECK_FALSE(eb.is_ball());
    CHECK(eb.matrix == e.matrix);
    CHECK(io::body_from(reparse(io::body_json(Body::ball(Q(5, 2))))).radius == Q(5, 2));
    CHECK_THROWS_AS(io::lattice_from(Json::parse(R"({"dim": 2, "basis": [["1","0"],["2","0"]]})")), Error);
    CHECK_THROWS_AS(io::body_from(Json::parse(R"({"cube": 1})")), Error);
}

TEST_CASE("cover artifacts revalidate and catch tampering") {
    Lattice l = Lattice::integer_grid(2);
    Body b = Body::ball(3);
    for (bool affine : {false, true}) {
        CoverResult c = affine ? cover_affine(l, b, 1) : cover_linear(l, b, 1);
        Json j = reparse(io::cover_json(c, l, b));
        io::Revalidation v = io::revalidate(j);
        CHECK(v.ok);
        CoverResult back = io::cover_from(j);
        CHECK(back.size() == c.size());
        j["flats"].erase(0);
        j["size"] = c.size() - 1;
        CHECK_FALSE(io::revalidate(j).ok);
    }
}

TEST_CASE("evasive and incidence artifacts revalidate") {
    EvasiveSet fp = build_flat_evasive(4, 2, Q(1, 2), 13, 3);
    Json jf = reparse(io::evasive_json(fp));
    CHECK(io::revalidate(jf).ok);
    // a planted line: r points on one affine line of F_13^3
    Json bad = jf;
    bad["points"] = Json::array();
    for (int i = 0; i < fp.r; ++i) bad["points"].push_back(std::vector<int64_t>{i, 0, 0});
    CHECK_FALSE(io::revalidate(bad).ok);

    Lattice z4 = Lattice::integer_grid(4);
    Body ball = Body::ball(256);
    EvasiveSet lin = build_linear_evasive(z4, ball, 2, Q(1, 2), 3);
    Json jl = reparse(io::evasive_json(lin, &z4, &ball));
    CHECK(io::revalidate(jl).ok);
    jl["points"][0][0] = jl["points"][0][0].get<int64_t>() + 1;
    CHECK_FALSE(io::revalidate(jl).ok);

    IncidenceConfig c = build_incidence_config(2, 0, 4, 4, Q(1, 2), 2);
    Json ji = reparse(io::incidence_json(c));
    CHECK(io::revalidate(ji).ok);
    IncidenceConfig back = io::incidence_from(ji);
    CHECK(back.H == c.H);
    CHECK(back.P == c.P);
    ji["incidences"] = "1";
    CHECK_FALSE(io::revalidate(ji).ok);
}

TEST_CASE("oracle artifacts revalidate") {
    OracleResult r = min_cover_exact(CoverInstance::grid(2, 2, 1, FlatKind::Affine));
    Json j = reparse(io::oracle_cover_json(2, 2, 1, FlatKind::Affine, r));
    CHECK(io::revalidate(j).ok);
    j["flats"].erase(0);
    CHECK_FALSE(io::revalidate(j).ok);
    CoverInstance g = CoverInstance::grid(2, 2, 1, FlatKind::Linear);
    EvasiveOracle e = max_evasive_exact(g.points, 1, 3, FlatKind::Linear);
    Json je = reparse(io::oracle_evasive_json(2, 2, 1, 3, FlatKind::Linear, e, g.points));
    CHECK(io::revalidate(je).ok);
    je["chosen"].push_back(std::vector<int64_t>{0, 0});
    je["optimum"] = e.optimum + 1;
    CHECK_FALSE(io::revalidate(je).ok);
}

TEST_CASE("command line exit codes") {
    std::string out;
    CHECK(cli("cover --grid 2 -d 2 -k 1 --verify", &out) == 0);
    CHECK(Json::parse(out)["artifact"] == "cover");
    CHECK(cli("cover --grid 2 -d 2 -k 1 --unknown-flag") == 4);
    CHECK(cli("") == 4);
    CHECK(cli("report --sweep 4..2") == 4);
    CHECK(cli("incidence exponents --d-max 6", &out) == 0);
    CHECK(out.find("3,7/10,") != std::string::npos);
    CHECK(out.find("4,49/66,") != std::string::npos);
    CHECK(out.find("5,43/56,") != std::string::npos);
    CHECK(out.find("6,73/92,") != std::string::npos);
    CHECK(cli("--csv report --sweep 1..3 -d 2 -k 1", &out) == 0);
    CHECK(out == "n,oracle,construction\n1,2,2\n2,4,4\n3,8,8\n");
    // guard: oracle beyond its point limit
    CHECK(cli("oracle evasive --grid 5 -d 2 -k 1 -r 2") == 3);
    // no usable prime is a guard error
    CHECK(cli("evasive --ambient lattice -d 4 -k 2 --scale 64") == 3);
}
