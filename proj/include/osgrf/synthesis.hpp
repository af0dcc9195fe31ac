#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "osgrf/spectral.hpp"

namespace osgrf {

/// Origin-anchored grid x_j = j * (L / n), j in {0..n-1}^d, stored row-major
/// (last axis fastest).
struct GridSpec {
    int dim = 2;
    double extent = 1.0;
    int n = 256;

    void validate() const;
    [[nodiscard]] double spacing() const { return extent / n; }
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] std::size_t flat_index(std::span<const int> index) const;
    [[nodiscard]] Vector point(std::span<const int> index) const;
};

struct SynthesisParams {
    int freq_cutoff = 512;   // K: lattice {k * step : k in [-K, K]^d, k != 0}
    double freq_step = 0.0;  // 0 selects pi * n / (L * K)
    std::uint64_t seed = 0;
    /// Nested sub-lattices (step / 3^l) filling the excluded cell at the
    /// origin, added by direct summation.
    int refinement_levels = 8;
    /// Allow direct summation when the lattice does not align with the grid.
    bool allow_direct = true;

    void validate() const;
};

double default_freq_step(const GridSpec& grid, int freq_cutoff);

struct FieldRealization {
    GridSpec grid;
    SynthesisParams params;
    std::vector<double> values;
    /// max |Im W| over the grid before it was discarded.
    double imag_residue = 0.0;

    [[nodiscard]] double at(std::span<const int> index) const { return values[grid.flat_index(index)]; }
};

/// Discretized harmonizable representation
///   X(x) = W(x) - W(0),  W(x) = sum_k e^(i<x, k step>) A_k Z_k,
/// A_k^2 the mass of (f(xi) + f(-xi)) / 2 over the lattice cell of k
/// (adaptive cubature) and Z_-k = conj(Z_k). Cells within two steps of the
/// origin (one in 3-D) and a geometric refinement of the origin cell are
/// carried by nodes at the centres of their sub-cells instead. Noise comes
/// from a counter-based generator keyed by the seed, with the node index as
/// counter.
class Synthesizer {
public:
    Synthesizer(SpectralDensity f, GridSpec grid, SynthesisParams params);

    [[nodiscard]] FieldRealization generate(std::uint64_t seed) const;
    [[nodiscard]] FieldRealization generate() const { return generate(params_.seed); }

    /// X at arbitrary points by direct summation over the same noise.
    [[nodiscard]] std::vector<double> evaluate_at(std::uint64_t seed,
                                                  const std::vector<Vector>& points) const;

    /// E[(X(x + h) - X(x))^2] of the discrete model, summed exactly.
    [[nodiscard]] double model_variogram(const Vector& h) const;

    [[nodiscard]] bool aligned() const { return fft_size_ > 0; }
    [[nodiscard]] int fft_size() const { return fft_size_; }
    [[nodiscard]] double freq_step() const { return step_; }
    [[nodiscard]] const GridSpec& grid() const { return grid_; }
    [[nodiscard]] const SynthesisParams& params() const { return params_; }
    [[nodiscard]] const SpectralDensity& density() const { return f_; }
    [[nodiscard]] const std::vector<std::string>& warnings() const { return warnings_; }

private:
    using Complex = std::complex<double>;

    struct Extra {
        Vector xi;
        double amplitude;
        std::array<std::uint32_t, 4> counter;
    };

    void lattice_coefficients(std::uint64_t seed, std::vector<Complex>& out) const;
    [[nodiscard]] std::vector<Complex> extra_coefficients(std::uint64_t seed) const;
    [[nodiscard]] std::vector<double> grid_by_fft(const std::vector<Complex>& c, double& imag) const;
    [[nodiscard]] std::vector<double> grid_by_direct(const std::vector<Complex>& c, double& imag) const;

    SpectralDensity f_;
    GridSpec grid_;
    SynthesisParams params_;
    double step_ = 0.0;
    int side_ = 0;              // 2K + 1
    std::size_t lattice_size_ = 0;
    std::vector<double> amp_;   // A_k over [-K, K]^d, row-major
    std::vector<Extra> extra_;  // lexicographically positive sub-cell nodes near the origin
    int fft_size_ = 0;
    std::vector<std::string> warnings_;
    struct Plan;
    std::shared_ptr<Plan> plan_;
};

FieldRealization synthesize(const SpectralDensity& f, const GridSpec& grid,
                            const SynthesisParams& params);

/// X(x + h) - X(x) over the sub-grid where both points exist. The result is
/// row-major over the overlap, whose extent along axis i is n - |h_i|.
std::vector<double> increment_field(const FieldRealization& r, std::span<const int> lag);

}  // namespace osgrf
