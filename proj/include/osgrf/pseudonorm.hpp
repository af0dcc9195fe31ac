#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "osgrf/expression.hpp"
#include "osgrf/linalg.hpp"

namespace osgrf {

/// Largest dimension handled by the allocation-free evaluators.
inline constexpr int kMaxDim = 16;

// ---------------------------------------------------------------------------
// Generic block pseudo-norms. Each is homogeneous for the transpose of the
// corresponding generic block matrix.

/// |xi|^(1/lambda); homogeneous for lambda * I.
double rho1(std::span<const double> xi, double lambda);

/// Nilpotent-block pseudo-norm Phi_d(xi)^(1/lambda). The partial sums
/// Phi_i accumulate |tau_i| where tau_i is the i-th coordinate of
/// exp(-log(Phi_{i-1}) N) xi, N = S / lambda, S the lower shift. When
/// Phi_{i-1} is exactly zero the first i-1 coordinates vanish and
/// tau_i = |xi_i|.
double rho2(std::span<const double> xi, double lambda);

/// |xi|^(1/alpha); rotation blocks are isometries, so beta does not enter.
double rho3(std::span<const double> xi, double alpha);

/// Rotation-Jordan block pseudo-norm. Works on coordinate pairs z_i:
/// Phi_1 = |z_1|, and tau_i is the length of the i-th pair of
/// exp(-log(Phi_{i-1}) N) xi with N the pair shift divided by alpha.
/// beta does not enter because the rotation is a common isometry.
double rho4(std::span<const double> xi, double alpha);

/// rho2 applied to the pair radii |z_i|. Agrees with rho4 only for d = 2
/// or when the coupling terms vanish; it is not homogeneous in general and
/// is kept for the verification suite.
double rho4_pair_radii(std::span<const double> xi, double alpha);

/// Candidate rotation-block formula
///   |xi1 cos(beta/alpha ln r) - xi2 sin(beta/alpha ln r)| / r^(2/alpha).
/// It vanishes on whole rays and is not homogeneous; it exists so the
/// verification suite can demonstrate both failures.
double phase_ratio_value(std::span<const double> xi, double alpha, double beta);

/// The transpose of the generic block matrix, i.e. the homogeneity matrix
/// of the matching block pseudo-norm.
Matrix block_homogeneity(const GenericBlock& block);

// ---------------------------------------------------------------------------

/// Continuous positive function on the unit sphere {rho_base = 1} used by
/// the transfer construction.
class SphereFunction {
public:
    enum class Kind { Constant, Expression, Table, Closure };

    static SphereFunction constant(double c);
    /// Text over coordinates t1..td of the sphere point.
    static SphereFunction expression(const std::string& text);
    /// Tabulated samples. Interpolation is piecewise linear in the polar
    /// angle for d = 2 and nearest-neighbour (by direction) otherwise.
    static SphereFunction table(std::vector<Vector> points, std::vector<double> values);
    static SphereFunction closure(std::function<double(std::span<const double>)> fn,
                                  std::string description = "closure");

    double operator()(std::span<const double> theta) const;
    double operator()(const Vector& theta) const {
        return (*this)(std::span<const double>(theta.data(), static_cast<std::size_t>(theta.size())));
    }

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] double constant_value() const { return constant_; }
    [[nodiscard]] const std::string& description() const { return description_; }
    [[nodiscard]] const std::vector<Vector>& table_points() const { return points_; }
    [[nodiscard]] const std::vector<double>& table_values() const { return values_; }

    /// Leave-one-out interpolation error over the table (0 for closed forms).
    [[nodiscard]] double interpolation_error() const;

private:
    SphereFunction() = default;
    double interpolate(std::span<const double> theta, std::optional<std::size_t> skip) const;

    Kind kind_ = Kind::Constant;
    double constant_ = 1.0;
    std::string description_;
    std::shared_ptr<const Expression> expression_;
    std::function<double(std::span<const double>)> closure_;
    std::vector<Vector> points_;
    std::vector<double> values_;
    // d = 2 tables: sample indices sorted by polar angle, and those angles.
    std::vector<std::size_t> order_;
    std::vector<double> angles_;
};

enum class NormKind {
    Euclidean,
    Generic1,
    Generic2,
    Generic3,
    Generic4,
    Assembled,
    Transferred,
    PhaseRatio,
    Custom
};

const char* to_string(NormKind kind);

/// A (R^d, M) pseudo-norm: continuous, positive off the origin, and
/// rho(a^M xi) = a rho(xi) for every a > 0. Immutable value type; copies
/// share the evaluator.
class PseudoNorm {
public:
    using Evaluator = std::function<double(std::span<const double>)>;

    static PseudoNorm euclidean(int dim);
    static PseudoNorm generic1(double lambda, int dim);
    static PseudoNorm generic2(double lambda, int dim);
    static PseudoNorm generic3(double alpha, double beta, int dim);
    static PseudoNorm generic4(double alpha, double beta, int dim);
    /// The canonical generic pseudo-norm for a block (rho1..rho4).
    static PseudoNorm for_block(const GenericBlock& block);
    /// Unverified rotation-phase formula in d = 2 (fails positivity).
    static PseudoNorm phase_ratio(double alpha, double beta);
    /// Arbitrary evaluator; only the invariant checks vouch for it.
    static PseudoNorm custom(Matrix homogeneity, Evaluator fn, std::string name = "custom");

    double operator()(std::span<const double> xi) const;
    double operator()(const Vector& xi) const {
        return (*this)(std::span<const double>(xi.data(), static_cast<std::size_t>(xi.size())));
    }

    [[nodiscard]] int dim() const;
    [[nodiscard]] NormKind kind() const;
    [[nodiscard]] const Matrix& homogeneity() const;
    [[nodiscard]] std::string describe() const;

    // Construction parameters, for serialization.
    [[nodiscard]] double lambda() const;
    [[nodiscard]] double alpha() const;
    [[nodiscard]] double beta() const;
    [[nodiscard]] double combiner() const;
    [[nodiscard]] const Matrix& change_of_basis() const;
    [[nodiscard]] const std::vector<PseudoNorm>& blocks() const;
    [[nodiscard]] const PseudoNorm& base() const;
    [[nodiscard]] const SphereFunction& sphere_function() const;

    struct Data;

private:
    explicit PseudoNorm(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
    friend PseudoNorm assemble(const Matrix&, std::vector<PseudoNorm>, double);
    friend PseudoNorm transfer(const PseudoNorm&, SphereFunction);

    std::shared_ptr<const Data> data_;
};

/// rho(xi) = || (tau_1(zeta_1), ..., tau_m(zeta_m)) ||_p with zeta = P^t xi
/// split by block dimension. The result is homogeneous for
/// P^-t blockdiag(M_l) P^t where M_l are the block homogeneity matrices.
/// p must lie in [1, inf]; use std::numeric_limits<double>::infinity() for max.
PseudoNorm assemble(const Matrix& P, std::vector<PseudoNorm> block_norms, double p = 2.0);

/// As above, additionally checking that block_norms[l] is homogeneous for
/// the transpose of spec.blocks[l].
PseudoNorm assemble(const JordanSpec& spec, std::vector<PseudoNorm> block_norms, double p = 2.0);

/// assemble(spec, [for_block(b) for b in spec.blocks], p).
PseudoNorm canonical_pseudonorm(const JordanSpec& spec, double p = 2.0);

/// xi -> g(radial_project(xi, base)) * base(xi). Throws if g is not positive
/// and finite on a deterministic sample of the base unit sphere.
PseudoNorm transfer(const PseudoNorm& base, SphereFunction g);

/// a^-M xi with a = rho(xi); lies on {rho = 1}. Throws std::domain_error at 0.
Vector radial_project(const Vector& xi, const PseudoNorm& rho);

/// Tabulates g = rho_b / rho_a at the radial projections of the samples
/// onto {rho_a = 1}. Throws std::invalid_argument when the homogeneity
/// matrices differ.
SphereFunction recover_g(const PseudoNorm& rho_a, const PseudoNorm& rho_b,
                         const std::vector<Vector>& samples);

bool same_homogeneity(const PseudoNorm& a, const PseudoNorm& b, double rel_tol = 1e-12);

/// Empirical lower bound for the quasi-triangle constant: the maximum of
/// rho(x+y) / (rho(x)+rho(y)) over random pairs whose rho-radii are spread
/// log-uniformly over [1e-3, 1e3].
double quasi_triangle_constant(const PseudoNorm& rho, std::size_t n_samples, std::uint64_t seed);

/// Uniform directions on the Euclidean unit sphere (deterministic per seed).
std::vector<Vector> random_directions(int dim, std::size_t count, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Ray tracing and level sets.

struct RaySolution {
    double radius = std::numeric_limits<double>::quiet_NaN();
    bool bracketed = false;
    int iterations = 0;
};

/// Solves rho(r u) = level for r > 0 by bisection on log r. The initial
/// bracket [1e-8, 1e8] is widened geometrically if needed.
RaySolution trace_ray(const PseudoNorm& rho, const Vector& direction, double level);

struct LevelSetPoint {
    double theta = 0.0;
    double x = 0.0;
    double y = 0.0;
    bool degenerate = false;
};

/// Traces {rho = level} in d = 2 along `resolution` equally spaced rays.
std::vector<LevelSetPoint> level_set(const PseudoNorm& rho, double level, int resolution);

// ---------------------------------------------------------------------------
// Invariant checks.

struct HomogeneityReport {
    std::size_t samples = 0;
    double max_relative_error = 0.0;
    Vector worst_point;
    double worst_scale = 1.0;
};

/// Draws (xi, a) with |xi| log-uniform in [1e-3, 1e3] and a log-uniform in
/// [0.1, 10]; reports max |rho(a^M xi) - a rho(xi)| / (a rho(xi)).
HomogeneityReport check_homogeneity(const PseudoNorm& rho, std::size_t samples,
                                    std::uint64_t seed);

struct PositivityReport {
    bool positive = true;
    bool origin_zero = true;
    double min_on_sphere = 0.0;  // min of rho over sampled Euclidean unit directions
    double median_on_sphere = 0.0;
    std::optional<Vector> witness;  // direction where rho vanishes, if found
};

/// Samples rho on the Euclidean unit sphere (dense angle scan in d = 2 with
/// golden-section refinement) and reports a witness direction when the
/// minimum falls below 1e-9 times the median.
PositivityReport check_positivity(const PseudoNorm& rho, std::size_t samples, std::uint64_t seed);

}  // namespace osgrf
