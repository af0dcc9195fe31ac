#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "osgrf/recipe.hpp"
#include "osgrf/report.hpp"

using namespace osgrf;

namespace {

const char* const kNormRecipes[] = {
    R"({"kind": "euclidean", "dim": 3})",
    R"({"kind": "generic1", "lambda": 0.5, "dim": 1})",
    R"({"kind": "generic2", "lambda": 2, "dim": 3})",
    R"({"kind": "generic3", "alpha": 1, "beta": 0.7, "dim": 2})",
    R"({"kind": "generic4", "alpha": 1.5, "beta": -0.3, "dim": 4})",
    R"({"kind": "assembled", "P": [[1, -1], [0, 1]], "p": 1,
        "blocks": [{"kind": "generic1", "lambda": 2, "dim": 1}, {"kind": "generic1", "lambda": 1, "dim": 1}]})",
    R"({"kind": "assembled", "P": [[2, 0, 1], [0, 1, 0], [1, 0, 1]], "p": "inf",
        "blocks": [{"kind": "generic3", "alpha": 1, "beta": 2, "dim": 2}, {"kind": "euclidean", "dim": 1}]})",
    R"({"kind": "jordan", "P": [[1, 0], [0, 1]], "blocks": [{"kind": "scalar_jordan", "size": 2, "lambda": 1}]})",
    R"({"kind": "jordan", "P": [[1, 0], [0, 1]],
        "blocks": [{"kind": "rotation_diag", "size": 2, "alpha": 1, "beta": -1}]})",
    R"({"kind": "transferred", "base": {"kind": "euclidean", "dim": 2}, "g": {"kind": "constant", "value": 2.5}})",
    R"({"kind": "transferred", "base": {"kind": "euclidean", "dim": 2},
        "g": {"kind": "expr", "text": "2 + t1 * t2"}})",
    R"({"kind": "phase_ratio", "alpha": 1, "beta": 1, "unverified": true})",
};

std::string error_of(const std::string& text) {
    try {
        (void)pseudonorm_from_json(parse_json(text));
    } catch (const RecipeError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("pseudo-norm recipes survive a serialization round trip") {
    std::mt19937_64 gen(8);
    std::normal_distribution<double> n(0.0, 1.0);
    for (const char* text : kNormRecipes) {
        CAPTURE(text);
        const PseudoNorm rho = pseudonorm_from_json(parse_json(text));
        const Json out = pseudonorm_to_json(rho);
        const PseudoNorm back = pseudonorm_from_json(parse_json(out.dump()));
        CHECK(back.dim() == rho.dim());
        CHECK(back.homogeneity() == rho.homogeneity());
        CHECK(out.contains("homogeneity"));
        for (int k = 0; k < 20; ++k) {
            Vector xi(rho.dim());
            for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = n(gen);
            CHECK(back(xi) == rho(xi));
        }
    }
}

TEST_CASE("the worked example recipe evaluates in closed form") {
    const PseudoNorm rho = pseudonorm_from_json(parse_json(kNormRecipes[5]));
    Matrix want(2, 2);
    want << 2, 0, 1, 1;
    CHECK(rho.homogeneity().isApprox(want, 1e-12));
    Vector xi(2);
    xi << 4.0, 1.0;
    CHECK(rho(xi) == doctest::Approx(2.0 + 3.0).epsilon(1e-12));
}

TEST_CASE("table sphere functions round trip") {
    Json j = parse_json(R"({"kind": "transferred", "base": {"kind": "euclidean", "dim": 2},
        "g": {"kind": "table", "points": [[1, 0], [0, 1], [-1, 0], [0, -1]], "values": [1, 2, 1, 2]}})");
    const PseudoNorm rho = pseudonorm_from_json(j);
    const PseudoNorm back = pseudonorm_from_json(pseudonorm_to_json(rho));
    Vector xi(2);
    xi << 0.3, -0.8;
    CHECK(back(xi) == rho(xi));
    j["g"]["values"] = {1, 2};
    CHECK_THROWS_AS(pseudonorm_from_json(j), RecipeError);
}

TEST_CASE("malformed JSON reports the byte offset") {
    const std::string text = "{\"kind\": \"euclidean\",\n \"dim\": }";
    try {
        (void)parse_json(text);
        FAIL("expected RecipeParseError");
    } catch (const RecipeParseError& e) {
        CHECK(e.byte() == text.find('}'));
        CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
    CHECK_THROWS_AS(load_json_file("/nonexistent/recipe.json"), RecipeError);
}

TEST_CASE("schema violations name the field") {
    CHECK(error_of(R"({"dim": 2})").find("\"kind\"") != std::string::npos);
    CHECK(error_of(R"({"kind": "ellipse"})").find("ellipse") != std::string::npos);
    CHECK(error_of(R"({"kind": "generic1", "lambda": "x"})").find("\"lambda\"") != std::string::npos);
    CHECK(error_of(R"({"kind": "euclidean", "dim": 1.5})").find("\"dim\"") != std::string::npos);
    CHECK(error_of(R"({"kind": "assembled", "P": [[1, 0], [0]], "blocks": []})").find("\"P\"") != std::string::npos);
    CHECK(error_of(R"({"kind": "assembled", "P": [[1]], "blocks": [{"kind": "euclidean", "dim": 1}], "p": "two"})")
              .find("\"p\"") != std::string::npos);
    CHECK_FALSE(error_of(R"({"kind": "generic1", "lambda": -1, "dim": 1})").empty());
    CHECK_FALSE(error_of(R"({"kind": "transferred", "base": {"kind": "euclidean"}, "g": {"kind": "expr", "text": "1 +"}})")
                    .empty());
}

TEST_CASE("declared homogeneity must match") {
    Json j = parse_json(kNormRecipes[5]);
    j["homogeneity"] = {{2, 0}, {1, 1}};
    CHECK_NOTHROW(pseudonorm_from_json(j));
    j["homogeneity"] = {{2, 1}, {0, 1}};
    CHECK(error_of(j.dump()).find("homogeneity") != std::string::npos);
}

TEST_CASE("phase ratio requires an explicit opt-in") {
    CHECK(error_of(R"({"kind": "phase_ratio", "alpha": 1, "beta": 1})").find("unverified") != std::string::npos);
    CHECK(error_of(R"({"kind": "phase_ratio", "alpha": 1, "beta": 1, "unverified": false})").find("unverified") !=
          std::string::npos);
}

TEST_CASE("density recipes") {
    const SpectralDensity f = density_from_json(parse_json(R"({"pseudonorm": {"kind": "jordan", "P": [[1, 0], [0, 1]],
        "blocks": [{"kind": "rotation_diag", "size": 2, "alpha": 1, "beta": -1}]}, "H": 0.4, "E": [[1, -1], [1, 1]]})"));
    CHECK(f.hurst() == 0.4);
    CHECK(f.exponent() == doctest::Approx(2.8));

    // E alone: the canonical pseudo-norm of its real Jordan form.
    const SpectralDensity g = density_from_json(parse_json(R"({"E": [[1, 0], [0, 0.5]], "H": 0.2})"));
    CHECK(g.rho().homogeneity().isApprox(g.E().matrix().transpose(), 1e-12));
    Vector xi(2);
    xi << 0.4, -1.1;
    const SpectralDensity g2 = density_from_json(density_to_json(g));
    CHECK(g2(xi) == doctest::Approx(g(xi)).epsilon(1e-14));

    CHECK(density_from_json(parse_json(R"({"E": [[1, 0], [0, 1]], "H": 0.2})"), 0.7).hurst() == 0.7);

    CHECK_THROWS_AS(density_from_json(parse_json(R"({"E": [[1, 0], [0, 0.5]], "H": 0.9})")), InadmissibleHurst);
    CHECK_THROWS_AS(density_from_json(parse_json(R"({"E": [[1, 0], [0, 0.5]]})")), RecipeError);
    CHECK_THROWS_AS(density_from_json(parse_json(R"({"H": 0.3})")), RecipeError);
    CHECK_THROWS_AS(density_from_json(parse_json(R"({"pseudonorm": {"kind": "euclidean", "dim": 2}, "H": 0.3,
        "E": [[1, 0], [0, 0.5]]})")),
                    RecipeError);
}

TEST_CASE("report serialization") {
    CovarianceReport c;
    c.value = 1.5;
    c.error_estimate = 1e-9;
    c.nodes_used = 12;
    const Json cj = to_json(c);
    CHECK(cj.at("value") == 1.5);
    CHECK(cj.at("flagged") == false);

    PositivityReport p;
    p.positive = false;
    Vector w(2);
    w << 0.0, 1.0;
    p.witness = w;
    const Json pj = to_json(p);
    CHECK(pj.at("witness") == Json::array({0.0, 1.0}));
    CHECK(to_json(PositivityReport{}).at("witness").is_null());

    VariogramRow row;
    row.lag = {1, -2};
    row.count = 7;
    row.value = 0.25;
    CHECK(variogram_csv({row}) == "hx,hy,count,v\n1,-2,7,0.25\n");
    row.lag = {1, 0, 3};
    CHECK(variogram_csv({row}).rfind("hx,hy,hz,count,v\n1,0,3,7,", 0) == 0);
}
