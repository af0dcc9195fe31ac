#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "osgrf/pseudonorm.hpp"

using namespace osgrf;

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

// Max relative homogeneity defect over random (xi, a), computed here rather
// than through check_homogeneity.
double homogeneity_defect(const PseudoNorm& rho, int samples, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> la(std::log(0.1), std::log(10.0));
    std::uniform_real_distribution<double> lr(std::log(1e-2), std::log(1e2));
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        Vector xi(rho.dim());
        for (int i = 0; i < rho.dim(); ++i) xi(i) = n(gen);
        xi *= std::exp(lr(gen)) / xi.norm();
        const double a = std::exp(la(gen));
        const double lhs = rho(Vector(mat_pow(rho.homogeneity(), a) * xi));
        const double rhs = a * rho(xi);
        worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    }
    return worst;
}

PseudoNorm reference_norm(int which) {
    JordanSpec spec;
    spec.P = Matrix::Identity(2, 2);
    switch (which) {
        case 0: spec.blocks = {GenericBlock::scalar_diag(1.0, 2)}; break;
        case 1: spec.blocks = {GenericBlock::rotation_diag(1.0, -1.0, 2)}; break;
        case 2: spec.blocks = {GenericBlock::scalar_diag(1.0, 1), GenericBlock::scalar_diag(0.5, 1)}; break;
        default: spec.blocks = {GenericBlock::scalar_jordan(1.0, 2)}; break;
    }
    return canonical_pseudonorm(spec);
}

const Matrix kReferenceE[4] = {Matrix::Identity(2, 2), mat2(1, -1, 1, 1), mat2(1, 0, 0, 0.5), mat2(1, 1, 0, 1)};

}  // namespace

TEST_CASE("generic evaluators on simple inputs") {
    const std::vector<double> p = {3.0, 4.0};
    CHECK(rho1(p, 1.0) == doctest::Approx(5.0));
    CHECK(rho1(p, 0.5) == doctest::Approx(25.0));
    CHECK(rho3(p, 2.0) == doctest::Approx(std::sqrt(5.0)));
    CHECK(PseudoNorm::euclidean(2)(vec({3, 4})) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(rho2(std::vector<double>{0.0, 0.0}, 1.0) == 0.0);
    CHECK(rho4(std::vector<double>{0.0, 0.0, 0.0, 0.0}, 1.0) == 0.0);
}

TEST_CASE("nilpotent block norm matches its two-dimensional closed form") {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> n(0.0, 2.0);
    for (double lambda : {0.5, 1.0, 2.0}) {
        double worst = 0.0;
        for (int s = 0; s < 10000; ++s) {
            const double x1 = n(gen);
            const double x2 = n(gen);
            const double closed = std::pow(std::abs(x1) + std::abs(x2 - x1 / lambda * std::log(std::abs(x1))),
                                           1.0 / lambda);
            const double got = rho2(std::vector<double>{x1, x2}, lambda);
            worst = std::max(worst, std::abs(got - closed) / closed);
        }
        CHECK(worst < 1e-12);
    }
    // On the axis xi1 = 0 the log term drops out.
    CHECK(rho2(std::vector<double>{0.0, -3.0}, 1.0) == doctest::Approx(3.0));
}

TEST_CASE("diagonalizable example assembles to |xi1|^(1/2) + |xi2 - xi1|") {
    const Matrix P = mat2(1, -1, 0, 1);
    const PseudoNorm rho = assemble(P, {PseudoNorm::generic1(2.0, 1), PseudoNorm::generic1(1.0, 1)}, 1.0);
    const Matrix E = mat2(2, 1, 0, 1);
    CHECK(relative_frobenius_error(rho.homogeneity(), E.transpose()) < 1e-14);
    std::mt19937_64 gen(8);
    std::normal_distribution<double> n(0.0, 3.0);
    double worst = 0.0;
    for (int s = 0; s < 10000; ++s) {
        const Vector xi = vec({n(gen), n(gen)});
        const double closed = std::sqrt(std::abs(xi(0))) + std::abs(xi(1) - xi(0));
        worst = std::max(worst, std::abs(rho(xi) - closed) / closed);
    }
    CHECK(worst < 1e-12);
    CHECK(rho(vec({1, 1})) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("homogeneity of the generic families") {
    for (double lambda : {0.5, 1.0, 2.0}) {
        CHECK(homogeneity_defect(PseudoNorm::generic1(lambda, 3), 500, 1) < 1e-9);
        for (int d : {2, 3, 4}) CHECK(homogeneity_defect(PseudoNorm::generic2(lambda, d), 500, 2) < 1e-9);
    }
    for (double alpha : {0.5, 1.0}) {
        for (double beta : {0.0, 1.0, 5.0}) {
            CHECK(homogeneity_defect(PseudoNorm::generic3(alpha, beta, 2), 500, 3) < 1e-9);
            CHECK(homogeneity_defect(PseudoNorm::generic4(alpha, beta, 4), 500, 4) < 1e-9);
        }
    }
    for (int k = 0; k < 4; ++k) {
        const PseudoNorm rho = reference_norm(k);
        CHECK(relative_frobenius_error(rho.homogeneity(), Matrix(kReferenceE[k].transpose())) < 1e-14);
        CHECK(homogeneity_defect(rho, 500, 5) < 1e-9);
    }
}

TEST_CASE("library homogeneity check agrees with the direct computation") {
    const HomogeneityReport r = check_homogeneity(PseudoNorm::generic2(0.7, 3), 2000, 9);
    CHECK(r.samples == 2000);
    CHECK(r.max_relative_error < 1e-9);
    CHECK(check_homogeneity(PseudoNorm::phase_ratio(1.0, 1.0), 2000, 9).max_relative_error > 1e-3);
}

TEST_CASE("rotation-Jordan norm against the pair-radii shortcut") {
    // d = 2 has a single pair and both agree with |xi|^(1/alpha).
    const std::vector<double> one = {0.6, -0.8};
    CHECK(rho4(one, 0.5) == doctest::Approx(1.0));
    CHECK(rho4_pair_radii(one, 0.5) == doctest::Approx(1.0));

    // With the first pair on the unit circle the log coupling vanishes and
    // the second pair enters unchanged, so both forms agree.
    const std::vector<double> unit = {0.0, 1.0, 0.3, 0.4};
    CHECK(rho4(unit, 1.0) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(rho4_pair_radii(unit, 1.0) == doctest::Approx(1.5).epsilon(1e-14));

    // Off the unit circle the coupling mixes pair vectors; only rho4 keeps
    // homogeneity.
    const PseudoNorm shortcut = PseudoNorm::custom(GenericBlock::rotation_jordan(1.0, 0.0, 4).matrix().transpose(),
                                                   [](std::span<const double> xi) { return rho4_pair_radii(xi, 1.0); });
    CHECK(homogeneity_defect(shortcut, 300, 6) > 1e-3);
    CHECK(homogeneity_defect(PseudoNorm::generic4(1.0, 0.0, 4), 300, 6) < 1e-9);
}

TEST_CASE("assembled norms with non-trivial change of basis") {
    std::mt19937_64 gen(17);
    std::normal_distribution<double> n(0.0, 1.0);
    JordanSpec spec;
    spec.P = Matrix::Identity(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) spec.P(i, j) += 0.3 * n(gen);
    spec.blocks = {GenericBlock::rotation_jordan(0.8, 1.5, 4), GenericBlock::scalar_diag(1.2, 1)};
    for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
        const PseudoNorm rho = canonical_pseudonorm(spec, p);
        CHECK(relative_frobenius_error(rho.homogeneity(), Matrix(jordan_assemble(spec).matrix().transpose())) <
              1e-10);
        CHECK(homogeneity_defect(rho, 300, 21) < 1e-9);
    }
    CHECK_THROWS_AS(assemble(Matrix::Identity(2, 2), {PseudoNorm::euclidean(2)}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(assemble(Matrix::Identity(3, 3), {PseudoNorm::euclidean(2)}), std::invalid_argument);
    JordanSpec mismatch{Matrix::Identity(2, 2), {GenericBlock::scalar_diag(1.0, 2)}};
    CHECK_THROWS_AS(assemble(mismatch, {PseudoNorm::generic1(2.0, 2)}), std::invalid_argument);
}

TEST_CASE("positivity: valid norms pass, the phase-ratio formula yields a witness") {
    for (int k = 0; k < 4; ++k) CHECK(check_positivity(reference_norm(k), 2048, 1).positive);

    const PseudoNorm bad = PseudoNorm::phase_ratio(1.0, 1.0);
    const PositivityReport r = check_positivity(bad, 2048, 1);
    CHECK_FALSE(r.positive);
    REQUIRE(r.witness.has_value());
    CHECK(r.witness->norm() == doctest::Approx(1.0));
    CHECK(bad(*r.witness) <= 1e-9 * r.median_on_sphere);
    // The whole ray through the witness is a zero set once the phase is
    // accounted for: rho vanishes at some radius on every scaled copy.
    CHECK(bad(vec({0.0, 1.0})) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("quasi-triangle constants") {
    const double euclid = quasi_triangle_constant(PseudoNorm::euclidean(2), 20000, 4);
    CHECK(euclid <= 1.0 + 1e-12);
    CHECK(euclid > 0.9);
    const double squared = quasi_triangle_constant(PseudoNorm::generic1(0.5, 2), 20000, 4);
    CHECK(squared > 1.0);
    CHECK(squared <= 2.0 + 1e-12);  // |x + y|^2 <= 2 (|x|^2 + |y|^2)
    CHECK(std::isfinite(quasi_triangle_constant(reference_norm(3), 5000, 4)));
    CHECK(quasi_triangle_constant(PseudoNorm::euclidean(2), 2000, 7) ==
          quasi_triangle_constant(PseudoNorm::euclidean(2), 2000, 7));
}

TEST_CASE("transfer round trip reproduces the target norm") {
    JordanSpec spec{mat2(1, 0.5, -0.3, 1), {GenericBlock::scalar_diag(1.0, 1), GenericBlock::scalar_diag(0.5, 1)}};
    const PseudoNorm a = canonical_pseudonorm(spec, 2.0);
    const PseudoNorm b = canonical_pseudonorm(spec, std::numeric_limits<double>::infinity());
    REQUIRE(same_homogeneity(a, b));
    const std::vector<Vector> rays = random_directions(2, 256, 12);
    const PseudoNorm t = transfer(a, recover_g(a, b, rays));
    double worst = 0.0;
    // The table is exact along the dilation orbit of every sample.
    for (const Vector& u : rays) {
        for (double s : {0.01, 1.0, 50.0}) {
            const Vector xi = mat_pow(a.homogeneity(), s) * u;
            worst = std::max(worst, std::abs(t(xi) - b(xi)) / b(xi));
        }
    }
    CHECK(worst < 1e-10);

    CHECK_THROWS_AS(recover_g(PseudoNorm::euclidean(2), reference_norm(2), rays), std::invalid_argument);
}

TEST_CASE("transfer with closed-form sphere functions") {
    const PseudoNorm base = PseudoNorm::euclidean(2);
    const PseudoNorm doubled = transfer(base, SphereFunction::constant(2.0));
    CHECK(doubled(vec({3, 4})) == doctest::Approx(10.0));
    const PseudoNorm shaped = transfer(base, SphereFunction::expression("2 + t1"));
    CHECK(shaped(vec({2, 0})) == doctest::Approx(6.0));
    CHECK(shaped(vec({0, 2})) == doctest::Approx(4.0));
    CHECK(homogeneity_defect(shaped, 300, 3) < 1e-12);
    CHECK_THROWS(transfer(base, SphereFunction::expression("t1")));
    CHECK_THROWS(transfer(base, SphereFunction::constant(-1.0)));
}

TEST_CASE("radial projection lands on the unit level set") {
    const PseudoNorm rho = reference_norm(3);
    std::mt19937_64 gen(1);
    std::normal_distribution<double> n(0.0, 5.0);
    for (int s = 0; s < 200; ++s) {
        const Vector xi = vec({n(gen), n(gen)});
        CHECK(rho(radial_project(xi, rho)) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(radial_project(Vector::Zero(2), rho), std::domain_error);
}

TEST_CASE("level sets") {
    SUBCASE("euclidean unit circle") {
        for (const LevelSetPoint& p : level_set(PseudoNorm::euclidean(2), 1.0, 360)) {
            CHECK_FALSE(p.degenerate);
            CHECK(std::abs(std::hypot(p.x, p.y) - 1.0) < 1e-10);
        }
    }
    SUBCASE("diag(1, 1/2) quartic curve and homogeneity of levels") {
        const PseudoNorm rho = reference_norm(2);
        const auto one = level_set(rho, 1.0, 720);
        for (const LevelSetPoint& p : one) CHECK(std::abs(p.x * p.x + std::pow(p.y, 4) - 1.0) < 1e-9);
        const Matrix up = mat_pow(rho.homogeneity(), 2.0);
        const Matrix down = mat_pow(rho.homogeneity(), 0.5);
        for (const LevelSetPoint& p : one) CHECK(std::abs(rho(Vector(up * vec({p.x, p.y}))) - 2.0) < 1e-8);
        for (const LevelSetPoint& p : level_set(rho, 2.0, 720)) {
            CHECK(std::abs(rho(Vector(down * vec({p.x, p.y}))) - 1.0) < 1e-8);
        }
    }
    SUBCASE("phase-ratio formula has degenerate rays") {
        bool any = false;
        for (const LevelSetPoint& p : level_set(PseudoNorm::phase_ratio(1.0, 1.0), 1.0, 64)) any = any || p.degenerate;
        CHECK(any);
    }
    CHECK_THROWS(level_set(PseudoNorm::euclidean(3), 1.0, 10));
}

TEST_CASE("trace_ray solves rho(r u) = c") {
    const RaySolution s = trace_ray(PseudoNorm::euclidean(2), vec({0.6, 0.8}), 3.0);
    CHECK(s.bracketed);
    CHECK(s.radius == doctest::Approx(3.0).epsilon(1e-13));
    const RaySolution far = trace_ray(PseudoNorm::generic1(0.05, 2), vec({1.0, 0.0}), 1e-30);
    CHECK(far.bracketed);
    CHECK(rho1(std::vector<double>{far.radius, 0.0}, 0.05) == doctest::Approx(1e-30).epsilon(1e-10));
}

TEST_CASE("sphere function tables interpolate between samples") {
    std::vector<Vector> pts;
    std::vector<double> vals;
    for (int k = 0; k < 8; ++k) {
        const double t = 2.0 * M_PI * k / 8.0;
        pts.push_back(vec({std::cos(t), std::sin(t)}));
        vals.push_back(1.0 + 0.5 * std::cos(t));
    }
    const SphereFunction g = SphereFunction::table(pts, vals);
    CHECK(g(pts[3]) == doctest::Approx(vals[3]));
    const double mid = g(vec({std::cos(M_PI / 8.0), std::sin(M_PI / 8.0)}));
    CHECK(mid == doctest::Approx(0.5 * (vals[0] + vals[1])));
    CHECK(g.interpolation_error() > 0.0);
    CHECK(SphereFunction::constant(3.0).interpolation_error() == 0.0);
}

TEST_CASE("concurrent evaluation is consistent") {
    const PseudoNorm rho = canonical_pseudonorm(
        JordanSpec{Matrix::Identity(4, 4), {GenericBlock::rotation_jordan(1.0, 2.0, 4)}});
    const Vector xi = vec({0.3, -1.2, 2.0, 0.1});
    const double want = rho(xi);
    std::vector<double> got(8);
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < got.size(); ++t) {
        threads.emplace_back([&, t] {
            double acc = 0.0;
            for (int i = 0; i < 1000; ++i) acc = rho(xi);
            got[t] = acc;
        });
    }
    for (auto& th : threads) th.join();
    for (double g : got) CHECK(g == want);
}
