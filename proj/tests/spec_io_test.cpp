#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "netcomp/components_directed.hpp"
#include "netcomp/spec_io.hpp"
#include "netcomp/toml_lite.hpp"
#include "oracles.hpp"

using namespace netcomp;

namespace {

struct TempFile {
    std::string path;
    TempFile(const std::string& name, const std::string& content) : path("/tmp/netcomp_spec_" + name) {
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

const char* kFig3Toml = R"(# directed two-Gaussian mixture
kind = "directed"
dims = 2
cutoffs = [20, 20]

[[mixture]]
weight = 0.5167
center = [0, 0]
gauss = 1.0

[[mixture]]
weight = 0.0052
center = [4, 4]
gauss = 2.5
)";

}  // namespace

TEST_CASE("toml reader covers the spec-file subset") {
    auto j = parse_toml(
        "title = \"x\"\n"
        "n = 42\n"
        "f = 1.5e-3\n"
        "flag = true\n"
        "arr = [1, 2, 3]\n"
        "nested = [[1, 2], [3]]\n"
        "[table]\n"
        "shape = [2, 2]\n"
        "values = [0.0, 0.5,\n          0.5, 0.0]  # continued line\n"
        "[[mixture]]\n"
        "weight = 0.1\n"
        "[[mixture]]\n"
        "weight = 0.2\n");
    CHECK(j["title"] == "x");
    CHECK(j["n"] == 42);
    CHECK(j["f"].get<double>() == doctest::Approx(1.5e-3));
    CHECK(j["flag"] == true);
    CHECK(j["arr"].size() == 3);
    CHECK(j["nested"][0][1] == 2);
    CHECK(j["table"]["values"].size() == 4);
    CHECK(j["mixture"].size() == 2);
    CHECK(j["mixture"][1]["weight"].get<double>() == doctest::Approx(0.2));
}

TEST_CASE("toml reader rejects malformed input") {
    CHECK_THROWS_WITH_AS(static_cast<void>(parse_toml("key 42\n")), doctest::Contains("line 1"),
                         std::runtime_error);
    CHECK_THROWS(static_cast<void>(parse_toml("a = [1, 2\n")));
    CHECK_THROWS(static_cast<void>(parse_toml("a = \"unterminated\n")));
    CHECK_THROWS(static_cast<void>(parse_toml("a = 1 b = 2\n")));
}

TEST_CASE("point-mass table spec") {
    TempFile f("delta.json", R"({"kind":"directed","dims":2,"table":{"shape":[1,1],"values":[1.0]}})");
    auto u = load_distribution(f.path);
    CHECK(u.mass.flat()[0] == 1.0);
    CHECK(u.renormalization == doctest::Approx(1.0));
}

TEST_CASE("fig3 mixture spec: TOML and JSON agree, renormalization reported") {
    TempFile ft("fig3.toml", kFig3Toml);
    auto ut = load_distribution(ft.path);
    TempFile fj("fig3.json", R"({
      "kind": "directed", "dims": 2, "cutoffs": [20, 20],
      "mixture": [
        {"weight": 0.5167, "center": [0, 0], "gauss": 1.0},
        {"weight": 0.0052, "center": [4, 4], "gauss": 2.5}
      ]})");
    auto uj = load_distribution(fj.path);
    CHECK((ut.mass.flat() - uj.mass.flat()).abs().maxCoeff() == 0.0);

    // against the direct grid evaluation
    auto ref = oracles::fig3_raw();
    const double raw_mass = ref.sum();
    ref.flat() /= raw_mass;
    CHECK((ut.mass.flat() - ref.flat()).abs().maxCoeff() < 1e-15);
    CHECK(ut.renormalization == doctest::Approx(raw_mass).epsilon(1e-12));
    // the printed prefactors nearly normalize on this grid
    CHECK(std::abs(ut.renormalization - 1.0) < 1e-3);
}

TEST_CASE("renormalization factor is insensitive to the truncation, within the tail") {
    TempFile f20("fig3k20.json", R"({"kind":"directed","dims":2,"cutoffs":[20,20],
      "mixture":[{"weight":0.5167,"center":[0,0],"gauss":1.0},
                 {"weight":0.0052,"center":[4,4],"gauss":2.5}]})");
    TempFile f40("fig3k40.json", R"({"kind":"directed","dims":2,"cutoffs":[40,40],
      "mixture":[{"weight":0.5167,"center":[0,0],"gauss":1.0},
                 {"weight":0.0052,"center":[4,4],"gauss":2.5}]})");
    auto u20 = load_distribution(f20.path);
    auto u40 = load_distribution(f40.path);
    const double t = u20.truncation_tail;
    CHECK(std::abs(u40.renormalization - u20.renormalization) / u40.renormalization <= 2 * t + 1e-12);
    // doubling the cutoff leaves the size distribution unchanged
    auto w20 = weak_components(u20, 50);
    auto w40 = weak_components(u40, 50);
    for (int n = 1; n <= 50; ++n) CHECK(w20.w[n] == doctest::Approx(w40.w[n]).epsilon(1e-9));
}

TEST_CASE("automatic cutoff choice keeps the tail below 1e-10") {
    TempFile f("auto.json", R"({"kind":"directed","dims":2,
      "mixture":[{"weight":1.0,"center":[0,0],"gauss":0.5}]})");
    auto u = load_distribution(f.path);
    CHECK(u.truncation_tail < 1e-10);
    CHECK(u.mass.shape()[0] >= 8);
}

TEST_CASE("mixture profiles: exponential rows and point masks build fig4") {
    TempFile f("fig4.json", R"({
      "kind": "directed", "dims": 2, "cutoffs": [1, 40],
      "mixture": [
        {"weight": 0.09403931254742193, "center": [0, 0], "point": [true, false], "expo": [0.0, 2.266]},
        {"weight": 0.45059515051066055, "center": [1, 0], "point": [true, false], "expo": [0.0, 0.7]}
      ]})");
    auto u = load_distribution(f.path);
    auto ref = oracles::fig4_raw(40, 0.7);
    double max_err = 0;
    for (Eigen::Index l = 0; l <= 40; ++l) {
        max_err = std::max(max_err, std::abs(u.mass.at2(0, l) - ref.at2(0, l)));
        max_err = std::max(max_err, std::abs(u.mass.at2(1, l) - ref.at2(1, l)));
    }
    CHECK(max_err < 1e-9);
}

TEST_CASE("spec errors") {
    SUBCASE("nonexistent path") {
        CHECK_THROWS_WITH_AS(static_cast<void>(load_distribution("/nonexistent/spec.toml")),
                             doctest::Contains("not found"), std::runtime_error);
    }
    SUBCASE("all-zero table") {
        TempFile f("zero.json", R"({"kind":"directed","dims":2,"table":{"shape":[2,2],"values":[0,0,0,0]}})");
        CHECK_THROWS_AS(static_cast<void>(load_distribution(f.path)), DegreeError);
    }
    SUBCASE("negative weight makes negative entries") {
        TempFile f("neg.json", R"({"kind":"directed","dims":2,"cutoffs":[4,4],
          "mixture":[{"weight":-1.0,"center":[0,0],"gauss":1.0}]})");
        CHECK_THROWS_AS(static_cast<void>(load_distribution(f.path)), DegreeError);
    }
    SUBCASE("balance violation after truncation") {
        TempFile f("unbal.json", R"({"kind":"directed","dims":2,
          "table":{"shape":[2,2],"values":[0.0,0.7,0.3,0.0]}})");
        CHECK_THROWS_WITH_AS(static_cast<void>(load_distribution(f.path)), doctest::Contains("balance"),
                             DegreeError);
    }
    SUBCASE("two sources") {
        TempFile f("two.json", R"({"kind":"directed","dims":2,"cutoffs":[1,1],
          "table":{"shape":[2,2],"values":[0,0.5,0.5,0]},
          "mixture":[{"weight":1.0,"center":[0,0],"gauss":1.0}]})");
        CHECK_THROWS_WITH_AS(static_cast<void>(load_distribution(f.path)),
                             doctest::Contains("exactly one"), std::runtime_error);
    }
    SUBCASE("bad kind") {
        TempFile f("kind.json", R"({"kind":"oriented","dims":2,"table":{"shape":[1,1],"values":[1]}})");
        CHECK_THROWS(static_cast<void>(load_distribution(f.path)));
    }
}

TEST_CASE("empirical reference resolves through a table spec") {
    auto u = make_distribution(DistributionKind::directed, oracles::fig3_raw(6));
    TempFile table("emp_table.json", "");
    write_table_spec(table.path, u);
    TempFile ref("emp_ref.json", std::string(R"({"kind":"directed","dims":2,"empirical":")") +
                                     table.path + R"("})");
    auto back = load_distribution(ref.path);
    CHECK((back.mass.flat() - u.mass.flat()).abs().maxCoeff() < 1e-15);
}
