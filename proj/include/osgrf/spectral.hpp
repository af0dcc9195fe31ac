#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "osgrf/linalg.hpp"
#include "osgrf/pseudonorm.hpp"

namespace osgrf {

/// Raised when H falls outside (0, lambda_min(E)).
class InadmissibleHurst : public std::invalid_argument {
public:
    InadmissibleHurst(double hurst, double lambda_min);
    [[nodiscard]] double hurst() const { return hurst_; }
    [[nodiscard]] double lambda_min() const { return lambda_min_; }

private:
    double hurst_;
    double lambda_min_;
};

/// 0 < H < lambda_min(E).
bool admissible(double hurst, const AnisotropyMatrix& E);

/// Shortest decimal that round-trips, e.g. 0.5 -> "0.5".
std::string format_number(double v);

/// f(xi) = rho(xi)^(-2H - Tr E), with rho homogeneous for E^t.
class SpectralDensity {
public:
    /// Validates admissibility and that rho's homogeneity matrix is E^t.
    SpectralDensity(PseudoNorm rho, double hurst, AnisotropyMatrix E);
    /// E taken as the transpose of rho's homogeneity matrix.
    SpectralDensity(PseudoNorm rho, double hurst);

    /// Skips the admissibility check. Test hook for divergence studies.
    static SpectralDensity unchecked(PseudoNorm rho, double hurst, AnisotropyMatrix E);

    /// +inf at the origin.
    double operator()(std::span<const double> xi) const;
    double operator()(const Vector& xi) const {
        return (*this)(std::span<const double>(xi.data(), static_cast<std::size_t>(xi.size())));
    }

    [[nodiscard]] const PseudoNorm& rho() const { return rho_; }
    [[nodiscard]] double hurst() const { return hurst_; }
    [[nodiscard]] const AnisotropyMatrix& E() const { return E_; }
    [[nodiscard]] double trace_E() const { return trace_E_; }
    [[nodiscard]] double exponent() const { return 2.0 * hurst_ + trace_E_; }
    [[nodiscard]] int dim() const { return rho_.dim(); }

    /// Same rho and E with a different (checked) Hurst index.
    [[nodiscard]] SpectralDensity with_hurst(double hurst) const;

private:
    struct Unchecked {};
    SpectralDensity(PseudoNorm rho, double hurst, AnisotropyMatrix E, Unchecked);

    PseudoNorm rho_;
    double hurst_;
    AnisotropyMatrix E_;
    double trace_E_;
};

// ---------------------------------------------------------------------------
// Quadrature

/// Controls for the spectral integrals. Directions: trapezoid in angle
/// (d = 2), Gauss-Legendre in cos(theta) times trapezoid in azimuth (d = 3),
/// random directions (d >= 4). Along each direction the integral runs over
/// the dilation orbit s^(E^t) theta, s = e^t, in Gauss-Legendre panels.
struct QuadratureOptions {
    int angular_nodes = 256;
    int polar_nodes = 32;
    int monte_carlo_directions = 4096;
    int panel_order = 8;
    /// Orbit integration stops once the phase rate |d/dt <s^E h, theta>|
    /// exceeds this; the remainder is handled asymptotically.
    double cutoff_phase_rate = 2.0 * 3.141592653589793 * 128.0;
    /// The orbit starts where |s^E h| max|theta| drops below this.
    double origin_amplitude = 1e-7;
    /// Results whose error estimate exceeds tolerance * scale are flagged.
    double tolerance = 1e-3;
    std::uint64_t seed = 1;

    void validate() const;
};

struct CovarianceQuery {
    Vector x;
    Vector y;
    QuadratureOptions quadrature;
};

struct CovarianceReport {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t nodes_used = 0;
    bool flagged = false;
};

/// Quadrature for the variogram v(h) = int 2(1 - cos<h, xi>) f(xi) dxi and the
/// covariance C(x, y) = (v(x) + v(y) - v(x - y)) / 2, which equals the real
/// form int [1 + cos<x-y,xi> - cos<x,xi> - cos<y,xi>] f(xi) dxi.
///
/// Substituting xi = s^(E^t) theta with theta on {rho = 1} turns f into the
/// pure power s^(-2H-1) and <h, xi> into <s^E h, theta>, so the origin and
/// tail behaviour along each orbit is known in closed form.
class CovarianceQuadrature {
public:
    explicit CovarianceQuadrature(SpectralDensity f, QuadratureOptions options = {});

    [[nodiscard]] CovarianceReport variogram(const Vector& h) const;
    [[nodiscard]] CovarianceReport covariance(const Vector& x, const Vector& y) const;

    [[nodiscard]] const SpectralDensity& density() const { return f_; }
    [[nodiscard]] const QuadratureOptions& options() const { return options_; }

    /// Total mass of the orbit measure on {rho = 1}; equals
    /// Tr(E) * Lebesgue({rho <= 1}).
    [[nodiscard]] double sphere_mass() const;
    [[nodiscard]] std::size_t direction_count() const { return nodes_.size(); }

    struct SphereNode {
        Vector theta;         // point on {rho = 1}
        double weight;        // angular weight times orbit-measure density
        double coarse_weight; // weight in the half-resolution rule
    };
    [[nodiscard]] const std::vector<SphereNode>& sphere_nodes() const { return nodes_; }

private:
    double orbit_integral(const Vector& start, double t_lo, const Vector& theta, double& error,
                          std::size_t& nodes) const;

    SpectralDensity f_;
    QuadratureOptions options_;
    std::vector<SphereNode> nodes_;
    bool monte_carlo_ = false;
    double theta_radius_ = 0.0;  // max |theta|
    double panel_width_ = 0.5;
    double lambda_max_abs_ = 0.0;
    double rotation_rate_ = 0.0;  // max |Im eig(E)|
    double real_max_ = 0.0;       // max Re eig(E)
    std::vector<double> gl_nodes_;
    std::vector<double> gl_weights_;
    std::vector<Matrix> step_;          // exp(w_k E)
    std::vector<std::vector<Matrix>> node_step_;  // exp(w_k x_j E)
    std::vector<std::vector<double>> node_decay_;  // exp(-2H w_k x_j)
};

/// One-shot covariance(x, y).
CovarianceReport covariance(const SpectralDensity& f, const CovarianceQuery& query);

struct IntegrabilityReport {
    bool converged = false;
    std::vector<int> shell_index;       // j
    std::vector<double> shell_sums;     // S_j over {2^j <= rho < 2^(j+1)}
    double ratio = 0.0;                 // S_J / S_(J-1), outermost shells
    double inner_ratio = 0.0;           // S_-J / S_-(J-1), innermost shells
    double expected_outer_ratio = 0.0;  // 2^(-2H)
};

/// S_j = int over the dyadic shell of (1 ^ |xi|^2) f. Both geometric series
/// must be summable (ratios below 1) for converged = true.
IntegrabilityReport integrability_check(const SpectralDensity& f, int shells,
                                        const QuadratureOptions& options = {});

}  // namespace osgrf
