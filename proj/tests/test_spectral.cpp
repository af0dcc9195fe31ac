#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include "osgrf/spectral.hpp"

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

// Isotropic fBm variograms for f = |xi|^(-2H-d):
//   d = 1: 4 Gamma(1-2H) cos(pi H) / (2H) |h|^(2H)   (pi/2 at H = 1/2)
//   d = 2: 4 pi 2^(-2H) Gamma(1-H) / (2H Gamma(1+H)) |h|^(2H)
//   d = 3, H = 1/2: 2 pi^2 |h|
double fbm1(double H, double h) {
    const double a = 2.0 * H;
    const double c = std::abs(a - 1.0) < 1e-12 ? std::numbers::pi / 2.0
                                               : std::tgamma(1.0 - a) * std::cos(std::numbers::pi * a / 2.0) / a;
    return 4.0 * c * std::pow(std::abs(h), a);
}

double fbm2(double H, double r) {
    return 4.0 * std::numbers::pi * std::pow(2.0, -2.0 * H) * std::tgamma(1.0 - H) /
           (2.0 * H * std::tgamma(1.0 + H)) * std::pow(r, 2.0 * H);
}

SpectralDensity reference_density(int which, double H) {
    JordanSpec spec;
    spec.P = Matrix::Identity(2, 2);
    Matrix E;
    switch (which) {
        case 0: spec.blocks = {GenericBlock::scalar_diag(1.0, 2)}; E = Matrix::Identity(2, 2); break;
        case 1: spec.blocks = {GenericBlock::rotation_diag(1.0, -1.0, 2)}; E = mat2(1, -1, 1, 1); break;
        case 2:
            spec.blocks = {GenericBlock::scalar_diag(1.0, 1), GenericBlock::scalar_diag(0.5, 1)};
            E = mat2(1, 0, 0, 0.5);
            break;
        default: spec.blocks = {GenericBlock::scalar_jordan(1.0, 2)}; E = mat2(1, 1, 0, 1); break;
    }
    return SpectralDensity(canonical_pseudonorm(spec), H, AnisotropyMatrix(E));
}

}  // namespace

TEST_CASE("density values and homogeneity") {
    const SpectralDensity f(PseudoNorm::euclidean(2), 0.5);
    CHECK(f.exponent() == doctest::Approx(3.0));
    CHECK(f(vec({3, 4})) == doctest::Approx(std::pow(5.0, -3.0)));
    CHECK(std::isinf(f(vec({0, 0}))));

    const SpectralDensity g = reference_density(3, 0.4);
    const Matrix M = g.rho().homogeneity();
    for (double a : {0.3, 2.0, 7.0}) {
        const Vector xi = vec({0.7, -1.3});
        CHECK(g(Vector(mat_pow(M, a) * xi)) ==
              doctest::Approx(std::pow(a, -g.exponent()) * g(xi)).epsilon(1e-12));
    }
}

TEST_CASE("admissibility") {
    CHECK(admissible(0.3, AnisotropyMatrix(mat2(1, 0, 0, 0.5))));
    CHECK_FALSE(admissible(0.5, AnisotropyMatrix(mat2(1, 0, 0, 0.5))));
    CHECK_FALSE(admissible(0.0, AnisotropyMatrix(Matrix::Identity(2, 2))));

    const PseudoNorm rho = canonical_pseudonorm(
        JordanSpec{Matrix::Identity(2, 2), {GenericBlock::scalar_diag(1.0, 1), GenericBlock::scalar_diag(0.5, 1)}});
    try {
        SpectralDensity(rho, 0.9);
        FAIL("expected InadmissibleHurst");
    } catch (const InadmissibleHurst& e) {
        CHECK(std::string(e.what()).find("H must lie in (0, 0.5)") != std::string::npos);
        CHECK(e.lambda_min() == doctest::Approx(0.5));
    }
    CHECK_THROWS_AS(SpectralDensity(rho, -0.1), InadmissibleHurst);
    CHECK_THROWS_AS(SpectralDensity(PseudoNorm::euclidean(2), 0.5, AnisotropyMatrix(mat2(1, 0, 0, 0.5))),
                    std::invalid_argument);
    CHECK(SpectralDensity::unchecked(PseudoNorm::euclidean(2), 1.5, AnisotropyMatrix(Matrix::Identity(2, 2)))
              .hurst() == 1.5);
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(0.1) == "0.1");
}

TEST_CASE("one-dimensional variogram matches the fBm closed form") {
    for (double H : {0.2, 0.5, 0.8}) {
        const CovarianceQuadrature q(SpectralDensity(PseudoNorm::euclidean(1), H));
        for (double h : {0.01, 0.7, 30.0}) {
            const CovarianceReport r = q.variogram(vec({h}));
            CHECK(r.value == doctest::Approx(fbm1(H, h)).epsilon(1e-6));
            CHECK_FALSE(r.flagged);
        }
    }
}

TEST_CASE("two-dimensional isotropic variogram matches the Bessel closed form") {
    for (double H : {0.3, 0.5, 0.7}) {
        const CovarianceQuadrature q(SpectralDensity(PseudoNorm::euclidean(2), H));
        for (const Vector& h : {vec({0.1, 0.03}), vec({-1.5, 2.0})}) {
            const CovarianceReport r = q.variogram(h);
            CHECK(r.value == doctest::Approx(fbm2(H, h.norm())).epsilon(1e-3));
            CHECK(std::abs(r.value - fbm2(H, h.norm())) <= 10.0 * r.error_estimate + 1e-12);
        }
    }
}

TEST_CASE("three-dimensional Brownian variogram") {
    const CovarianceQuadrature q(SpectralDensity(PseudoNorm::euclidean(3), 0.5));
    const Vector h = vec({0.2, -0.1, 0.3});
    CHECK(q.variogram(h).value == doctest::Approx(2.0 * std::numbers::pi * std::numbers::pi * h.norm()).epsilon(2e-3));
}

TEST_CASE("covariance identities") {
    const CovarianceQuadrature q(reference_density(1, 0.4));
    const Vector x = vec({0.3, 0.1});
    const Vector y = vec({-0.2, 0.25});
    CHECK(q.covariance(x, y).value == doctest::Approx(q.covariance(y, x).value).epsilon(1e-14));
    CHECK(q.covariance(x, x).value == doctest::Approx(q.variogram(x).value).epsilon(1e-14));
    CHECK(q.covariance(Vector::Zero(2), y).value == doctest::Approx(0.0));
    CHECK(q.variogram(Vector::Zero(2)).value == 0.0);
    // v(h) = v(-h) exactly through canonicalization.
    CHECK(q.variogram(x).value == q.variogram(Vector(-x)).value);
    // Cauchy-Schwarz for a valid covariance.
    const double cxy = q.covariance(x, y).value;
    CHECK(cxy * cxy <= q.variogram(x).value * q.variogram(y).value);
}

TEST_CASE("variogram scaling along dilation orbits") {
    const double lambda_min[4] = {1.0, 1.0, 0.5, 1.0};
    for (int k = 0; k < 4; ++k) {
        const SpectralDensity f = reference_density(k, 0.4 * lambda_min[k]);
        const CovarianceQuadrature q(f);
        const Vector h = vec({0.3, -0.2});
        const CovarianceReport base = q.variogram(h);
        for (double a : {0.5, 4.0}) {
            const CovarianceReport scaled = q.variogram(Vector(mat_pow(f.E().matrix(), a) * h));
            const double want = std::pow(a, 2.0 * f.hurst()) * base.value;
            CHECK(std::abs(scaled.value - want) <= 1e-3 * want);
        }
    }
}

TEST_CASE("orbit measure mass equals Tr(E) times the unit-ball area") {
    const CovarianceQuadrature iso(SpectralDensity(PseudoNorm::euclidean(2), 0.5));
    CHECK(iso.sphere_mass() == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-6));

    // {x^2 + y^4 <= 1} has area 2 * int_{-1}^{1} sqrt(1 - y^4) dy.
    const int n = 200000;
    double area = 0.0;
    for (int i = 0; i < n; ++i) {
        const double y = -1.0 + (i + 0.5) * 2.0 / n;
        area += 2.0 * std::sqrt(1.0 - std::pow(y, 4)) * 2.0 / n;
    }
    const CovarianceQuadrature quartic(reference_density(2, 0.2));
    CHECK(quartic.sphere_mass() == doctest::Approx(1.5 * area).epsilon(1e-5));
}

TEST_CASE("integrability of admissible densities") {
    const IntegrabilityReport ok = integrability_check(reference_density(2, 0.2), 8);
    CHECK(ok.converged);
    CHECK(ok.ratio == doctest::Approx(std::pow(2.0, -0.4)).epsilon(1e-3));
    CHECK(ok.expected_outer_ratio == doctest::Approx(std::pow(2.0, -0.4)));
    CHECK(ok.shell_sums.size() == ok.shell_index.size());

    const PseudoNorm euclid = PseudoNorm::euclidean(2);
    const AnisotropyMatrix I(Matrix::Identity(2, 2));
    CHECK_FALSE(integrability_check(SpectralDensity::unchecked(euclid, 1.2, I), 8).converged);
    CHECK_FALSE(integrability_check(SpectralDensity::unchecked(euclid, -0.2, I), 8).converged);
    CHECK_THROWS(integrability_check(reference_density(0, 0.4), 2));
}

TEST_CASE("quadrature results do not depend on the thread count") {
    const CovarianceQuadrature q(reference_density(3, 0.4));
    const Vector h = vec({0.2, 0.45});
    setenv("OSGRF_THREADS", "1", 1);
    const double one = q.variogram(h).value;
    setenv("OSGRF_THREADS", "4", 1);
    const double four = q.variogram(h).value;
    unsetenv("OSGRF_THREADS");
    CHECK(one == four);
}

TEST_CASE("Monte Carlo directions in four dimensions") {
    const CovarianceQuadrature q(SpectralDensity(PseudoNorm::euclidean(4), 0.5));
    const Vector h = vec({0.3, 0.0, 0.1, -0.2});
    const CovarianceReport r = q.variogram(h);
    // Scaling by a = 2 multiplies the variogram by 2 exactly along each orbit.
    const CovarianceReport r2 = q.variogram(Vector(2.0 * h));
    CHECK(r2.value == doctest::Approx(2.0 * r.value).epsilon(1e-6));
    CHECK(r.error_estimate > 0.0);
}

TEST_CASE("quadrature option validation") {
    QuadratureOptions o;
    o.angular_nodes = 2;
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
    o = {};
    o.tolerance = 0.0;
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
    CHECK_THROWS_AS(CovarianceQuadrature(SpectralDensity(PseudoNorm::euclidean(2), 0.5)).variogram(vec({1.0})),
                    std::invalid_argument);
}
