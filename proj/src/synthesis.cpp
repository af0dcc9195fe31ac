#include "osgrf/synthesis.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <numeric>
#include <numbers>

#include "osgrf/parallel.hpp"
#include "osgrf/random.hpp"

namespace osgrf {

namespace {

constexpr std::size_t kMaxLatticePoints = std::size_t{1} << 26;

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::size_t ipow(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::uint32_t as_word(int v) { return static_cast<std::uint32_t>(v); }

using Point = std::array<double, 3>;

// Adaptive ternary cubature of the symmetrized density over axis-aligned
// cubes. A cube is accepted when the midpoint sum over its 3^d children
// agrees with the one-point rule; otherwise every child is integrated the
// same way. Ternary splits keep the centre of a cube at the centre of its
// middle child, so a ridge through the centre stays resolved.
class CellCubature {
public:
    static constexpr double kTolerance = 1e-3;
    static constexpr int kMaxDepth = 10;

    CellCubature(const SpectralDensity& f, int dim) : f_(f), d_(dim), children_(ipow(3, dim)) {}

    double sym(const Point& xi) const {
        const auto dd = static_cast<std::size_t>(d_);
        Point neg{};
        for (std::size_t i = 0; i < dd; ++i) neg[i] = -xi[i];
        return 0.5 * (f_(std::span<const double>(xi.data(), dd)) + f_(std::span<const double>(neg.data(), dd)));
    }

    /// Integral over the cube of side s centred at c, where fc = sym(c).
    double integrate(const Point& c, double s, double fc) {
        Children ch = split(c, s, fc);
        const double coarse = fc * std::pow(s, d_);
        const bool ok = std::abs(ch.fine - coarse) <= kTolerance * std::abs(ch.fine);
        if (ok) return ch.fine;
        return refine(ch, s / 3.0, kTolerance * std::abs(ch.fine), 1);
    }

    [[nodiscard]] std::size_t depth_limit_hits() const { return depth_limit_hits_; }

private:
    struct Children {
        std::array<Point, 27> centres{};
        std::array<double, 27> values{};
        double fine = 0.0;  // midpoint sum over the children
    };

    Children split(const Point& c, double s, double fc) const {
        Children ch;
        const double sub = s / 3.0;
        double sum = 0.0;
        for (std::size_t j = 0; j < children_; ++j) {
            Point p = c;
            std::size_t rest = j;
            for (int i = d_ - 1; i >= 0; --i) {
                p[static_cast<std::size_t>(i)] += (static_cast<int>(rest % 3) - 1) * sub;
                rest /= 3;
            }
            ch.centres[j] = p;
            ch.values[j] = j == children_ / 2 ? fc : sym(p);
            sum += ch.values[j];
        }
        ch.fine = sum * std::pow(sub, d_);
        if (!std::isfinite(ch.fine)) {
            throw std::domain_error("synthesis: spectral density is not finite on the lattice");
        }
        return ch;
    }

    // Integrates each child of side s to an absolute tolerance shared
    // among the children.
    double refine(const Children& parent, double s, double tol, int depth) {
        const double child_tol = tol / std::sqrt(static_cast<double>(children_));
        double total = 0.0;
        for (std::size_t j = 0; j < children_; ++j) {
            const Children ch = split(parent.centres[j], s, parent.values[j]);
            const double coarse = parent.values[j] * std::pow(s, d_);
            if (std::abs(ch.fine - coarse) <= child_tol) {
                total += ch.fine;
            } else if (depth >= kMaxDepth) {
                ++depth_limit_hits_;
                total += ch.fine;
            } else {
                total += refine(ch, s / 3.0, child_tol, depth + 1);
            }
        }
        return total;
    }

    const SpectralDensity& f_;
    int d_;
    std::size_t children_;
    std::size_t depth_limit_hits_ = 0;
};

}  // namespace

void GridSpec::validate() const {
    if (dim < 1 || dim > 3) throw std::invalid_argument("grid: dimension must be 1, 2 or 3");
    if (n < 2 || !is_power_of_two(n)) {
        throw std::invalid_argument("grid: points per axis must be a power of two >= 2");
    }
    if (!(extent > 0.0) || !std::isfinite(extent)) {
        throw std::invalid_argument("grid: extent must be positive and finite");
    }
}

std::size_t GridSpec::size() const { return ipow(static_cast<std::size_t>(n), dim); }

std::size_t GridSpec::flat_index(std::span<const int> index) const {
    if (index.size() != static_cast<std::size_t>(dim)) {
        throw std::invalid_argument("grid index has the wrong dimension");
    }
    std::size_t flat = 0;
    for (int v : index) {
        if (v < 0 || v >= n) throw std::out_of_range("grid index outside the grid");
        flat = flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(v);
    }
    return flat;
}

Vector GridSpec::point(std::span<const int> index) const {
    Vector p(dim);
    for (int i = 0; i < dim; ++i) p(i) = index[static_cast<std::size_t>(i)] * spacing();
    return p;
}

void SynthesisParams::validate() const {
    if (freq_cutoff < 1) throw std::invalid_argument("synthesis: frequency cutoff K must be >= 1");
    if (freq_step < 0.0 || !std::isfinite(freq_step)) {
        throw std::invalid_argument("synthesis: frequency step must be positive (or 0 for default)");
    }
    if (refinement_levels < 0 || refinement_levels > 30) {
        throw std::invalid_argument("synthesis: refinement levels must lie in [0, 30]");
    }
}

double default_freq_step(const GridSpec& grid, int freq_cutoff) {
    return std::numbers::pi * grid.n / (grid.extent * freq_cutoff);
}

struct Synthesizer::Plan {
    fftw_plan plan = nullptr;
    std::size_t elements = 0;

    ~Plan() {
        if (plan) {
            std::lock_guard<std::mutex> lock(planner_mutex());
            fftw_destroy_plan(plan);
        }
    }
};

Synthesizer::Synthesizer(SpectralDensity f, GridSpec grid, SynthesisParams params)
    : f_(std::move(f)), grid_(grid), params_(params) {
    grid_.validate();
    params_.validate();
    const int d = grid_.dim;
    if (f_.dim() != d) {
        throw std::invalid_argument("synthesis: density dimension " + std::to_string(f_.dim()) +
                                    " does not match grid dimension " + std::to_string(d));
    }
    const int K = params_.freq_cutoff;
    step_ = params_.freq_step > 0.0 ? params_.freq_step : default_freq_step(grid_, K);
    params_.freq_step = step_;
    side_ = 2 * K + 1;
    if (std::pow(static_cast<double>(side_), d) > static_cast<double>(kMaxLatticePoints)) {
        throw std::invalid_argument("synthesis: frequency lattice (2K+1)^d exceeds 2^26 points");
    }
    lattice_size_ = ipow(static_cast<std::size_t>(side_), d);

    const double nyquist = std::numbers::pi * grid_.n / grid_.extent;
    if (step_ * K < nyquist * (1.0 - 1e-12)) {
        warnings_.push_back("frequency lattice radius K*step = " + format_number(step_ * K) +
                            " is below the grid Nyquist frequency " + format_number(nyquist));
    }

    // Amplitudes: A_k^2 is the mass of the symmetrized density over the
    // cell of k, so A_k = A_-k. Near the origin f can change by orders of
    // magnitude inside one cell (anisotropic densities concentrate along
    // thin ridges there), which the one-point rule misses.
    amp_.assign(lattice_size_, 0.0);
    const std::size_t center = (lattice_size_ - 1) / 2;
    const std::size_t half = lattice_size_ - center - 1;
    std::vector<std::size_t> hits(chunk_count(half), 0);
    parallel_chunks(half, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        CellCubature cubature(f_, d);
        Point xi{};
        for (std::size_t off = begin; off < end; ++off) {
            const std::size_t flat = center + 1 + off;
            std::size_t rest = flat;
            for (int i = d - 1; i >= 0; --i) {
                const auto idx = static_cast<int>(rest % static_cast<std::size_t>(side_));
                rest /= static_cast<std::size_t>(side_);
                xi[static_cast<std::size_t>(i)] = (idx - K) * step_;
            }
            const double a = std::sqrt(cubature.integrate(xi, step_, cubature.sym(xi)));
            amp_[flat] = a;
            amp_[lattice_size_ - 1 - flat] = a;
        }
        hits[chunk] = cubature.depth_limit_hits();
    });
    CellCubature cubature(f_, d);

    // Cells next to the origin are replaced by their 3^d children, each its
    // own node, so that no node sits far from the mass of its cell. Nodes of
    // level l live on the lattice of spacing step / 3^l with integer
    // coordinates q; the counter {q, l} keeps them apart from the main
    // lattice, whose last counter word is 0.
    const std::size_t children = ipow(3, d);
    auto split = [&](const std::array<int, 3>& parent, int level) {
        const double side = step_ / std::pow(3.0, level);
        for (std::size_t c = 0; c < children; ++c) {
            Extra e;
            e.xi = Vector(d);
            e.counter = {0, 0, 0, as_word(level)};
            Point centre{};
            std::size_t rest = c;
            for (int i = d - 1; i >= 0; --i) {
                const auto u = static_cast<std::size_t>(i);
                const int q = 3 * parent[u] + static_cast<int>(rest % 3) - 1;
                rest /= 3;
                centre[u] = q * side;
                e.xi(i) = centre[u];
                e.counter[u] = as_word(q);
            }
            e.amplitude = std::sqrt(cubature.integrate(centre, side, cubature.sym(centre)));
            extra_.push_back(std::move(e));
        }
    };
    // Lexicographically positive points of {-r..r}^d \ {0}.
    auto positive_block = [&](int r) {
        std::vector<std::array<int, 3>> out;
        const auto width = static_cast<std::size_t>(2 * r + 1);
        const std::size_t count = ipow(width, d);
        for (std::size_t flat = (count - 1) / 2 + 1; flat < count; ++flat) {
            std::array<int, 3> k{};
            std::size_t rest = flat;
            for (int i = d - 1; i >= 0; --i) {
                k[static_cast<std::size_t>(i)] = static_cast<int>(rest % width) - r;
                rest /= width;
            }
            out.push_back(k);
        }
        return out;
    };
    for (const auto& k : positive_block(std::min(d <= 2 ? 2 : 1, K))) {
        std::size_t flat = 0;
        for (int i = 0; i < d; ++i) {
            flat = flat * static_cast<std::size_t>(side_) + static_cast<std::size_t>(k[static_cast<std::size_t>(i)] + K);
        }
        amp_[flat] = 0.0;
        amp_[lattice_size_ - 1 - flat] = 0.0;
        split(k, 1);
    }
    // The excluded origin cell: level l contributes its 3^d - 1 outer cells
    // of side step / 3^l, split in turn.
    for (int level = 1; level <= params_.refinement_levels; ++level) {
        for (const auto& k : positive_block(1)) split(k, level + 1);
    }
    const std::size_t limit_hits =
        std::accumulate(hits.begin(), hits.end(), cubature.depth_limit_hits());
    if (limit_hits > 0) {
        warnings_.push_back("cell mass cubature reached its depth limit in " + std::to_string(limit_hits) +
                            " sub-cells");
    }

    // FFT applies when 2 pi n / (L step) is an integer N >= n.
    const double ratio = 2.0 * std::numbers::pi * grid_.n / (grid_.extent * step_);
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) <= 1e-9 * ratio && rounded >= grid_.n &&
        std::pow(rounded, d) <= static_cast<double>(kMaxLatticePoints)) {
        fft_size_ = static_cast<int>(rounded);
        plan_ = std::make_shared<Plan>();
        plan_->elements = ipow(static_cast<std::size_t>(fft_size_), d);
        std::vector<int> dims(static_cast<std::size_t>(d), fft_size_);
        std::lock_guard<std::mutex> lock(planner_mutex());
        auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * plan_->elements));
        if (!buf) throw std::bad_alloc();
        plan_->plan = fftw_plan_dft(d, dims.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        fftw_free(buf);
        if (!plan_->plan) throw std::runtime_error("synthesis: FFTW planning failed");
    } else if (!params_.allow_direct) {
        throw std::invalid_argument(
            "synthesis: the frequency lattice does not align with the grid (2 pi n / (L step) = " +
            format_number(ratio) + " is not an integer) and direct summation is disabled");
    }
}

void Synthesizer::lattice_coefficients(std::uint64_t seed, std::vector<Complex>& out) const {
    out.assign(lattice_size_, Complex(0.0, 0.0));
    const int d = grid_.dim;
    const int K = params_.freq_cutoff;
    const std::size_t center = (lattice_size_ - 1) / 2;
    parallel_for(lattice_size_ - center - 1, [&](std::size_t begin, std::size_t end) {
        for (std::size_t off = begin; off < end; ++off) {
            const std::size_t flat = center + 1 + off;
            std::array<std::uint32_t, 4> counter{0, 0, 0, 0};
            std::size_t rest = flat;
            for (int i = d - 1; i >= 0; --i) {
                const auto idx = static_cast<int>(rest % static_cast<std::size_t>(side_));
                rest /= static_cast<std::size_t>(side_);
                counter[static_cast<std::size_t>(i)] = as_word(idx - K);
            }
            const auto [n1, n2] = normal_pair(seed, counter);
            const Complex c = amp_[flat] * std::numbers::sqrt2 * 0.5 * Complex(n1, n2);
            out[flat] = c;
            out[lattice_size_ - 1 - flat] = std::conj(c);
        }
    });
}

std::vector<Synthesizer::Complex> Synthesizer::extra_coefficients(std::uint64_t seed) const {
    std::vector<Complex> c;
    c.reserve(extra_.size());
    for (const Extra& e : extra_) {
        const auto [n1, n2] = normal_pair(seed, e.counter);
        c.push_back(e.amplitude * std::numbers::sqrt2 * 0.5 * Complex(n1, n2));
    }
    return c;
}

std::vector<double> Synthesizer::grid_by_fft(const std::vector<Complex>& c, double& imag) const {
    const int d = grid_.dim;
    const int K = params_.freq_cutoff;
    const auto N = static_cast<std::size_t>(fft_size_);
    auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * plan_->elements));
    if (!buf) throw std::bad_alloc();
    std::fill_n(&buf[0][0], 2 * plan_->elements, 0.0);
    for (std::size_t flat = 0; flat < lattice_size_; ++flat) {
        std::size_t rest = flat;
        std::size_t pos = 0;
        std::size_t stride = 1;
        for (int i = d - 1; i >= 0; --i) {
            const auto idx = static_cast<long>(rest % static_cast<std::size_t>(side_)) - K;
            rest /= static_cast<std::size_t>(side_);
            const long wrapped = ((idx % static_cast<long>(N)) + static_cast<long>(N)) % static_cast<long>(N);
            pos += static_cast<std::size_t>(wrapped) * stride;
            stride *= N;
        }
        buf[pos][0] += c[flat].real();
        buf[pos][1] += c[flat].imag();
    }
    fftw_execute_dft(plan_->plan, buf, buf);

    std::vector<double> w(grid_.size());
    const auto n = static_cast<std::size_t>(grid_.n);
    imag = 0.0;
    for (std::size_t g = 0; g < w.size(); ++g) {
        std::size_t rest = g;
        std::size_t pos = 0;
        std::size_t stride = 1;
        for (int i = d - 1; i >= 0; --i) {
            pos += (rest % n) * stride;
            rest /= n;
            stride *= N;
        }
        w[g] = buf[pos][0];
        imag = std::max(imag, std::abs(buf[pos][1]));
    }
    fftw_free(buf);
    return w;
}

std::vector<double> Synthesizer::grid_by_direct(const std::vector<Complex>& c, double& imag) const {
    const int d = grid_.dim;
    const int K = params_.freq_cutoff;
    const auto n = static_cast<std::size_t>(grid_.n);
    const auto side = static_cast<std::size_t>(side_);
    // phase[j * side + k] = exp(i x_j (k - K) step)
    std::vector<Complex> phase(n * side);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < side; ++k) {
            const double arg = static_cast<double>(j) * grid_.spacing() *
                               (static_cast<double>(k) - K) * step_;
            phase[j * side + k] = std::polar(1.0, arg);
        }
    }
    // Transform one axis at a time, last axis first.
    std::vector<std::size_t> shape(static_cast<std::size_t>(d), side);
    std::vector<Complex> cur = c;
    for (int axis = d - 1; axis >= 0; --axis) {
        std::size_t outer = 1;
        std::size_t inner = 1;
        for (int i = 0; i < axis; ++i) outer *= shape[static_cast<std::size_t>(i)];
        for (int i = axis + 1; i < d; ++i) inner *= shape[static_cast<std::size_t>(i)];
        std::vector<Complex> next(outer * n * inner);
        parallel_for(outer, [&](std::size_t begin, std::size_t end) {
            for (std::size_t o = begin; o < end; ++o) {
                for (std::size_t j = 0; j < n; ++j) {
                    for (std::size_t q = 0; q < inner; ++q) {
                        Complex s(0.0, 0.0);
                        for (std::size_t k = 0; k < side; ++k) {
                            s += phase[j * side + k] * cur[(o * side + k) * inner + q];
                        }
                        next[(o * n + j) * inner + q] = s;
                    }
                }
            }
        });
        shape[static_cast<std::size_t>(axis)] = n;
        cur.swap(next);
    }
    std::vector<double> w(cur.size());
    imag = 0.0;
    for (std::size_t g = 0; g < cur.size(); ++g) {
        w[g] = cur[g].real();
        imag = std::max(imag, std::abs(cur[g].imag()));
    }
    return w;
}

FieldRealization Synthesizer::generate(std::uint64_t seed) const {
    std::vector<Complex> c;
    lattice_coefficients(seed, c);
    FieldRealization r;
    r.grid = grid_;
    r.params = params_;
    r.params.seed = seed;
    std::vector<double> w = aligned() ? grid_by_fft(c, r.imag_residue) : grid_by_direct(c, r.imag_residue);

    // Extra nodes, each paired with its conjugate: 2 Re(c e^(i<x, xi>)).
    // The phase factorizes over axes, so the sum over nodes is a product of
    // an (outer grid x nodes) matrix with a (nodes x last axis) matrix.
    const std::vector<Complex> ec = extra_coefficients(seed);
    const int d = grid_.dim;
    const auto n = static_cast<Eigen::Index>(grid_.n);
    const auto nodes = static_cast<Eigen::Index>(extra_.size());
    if (nodes > 0) {
        Eigen::Index outer = 1;
        for (int i = 0; i + 1 < d; ++i) outer *= n;
        Eigen::MatrixXcd left(outer, nodes);
        Eigen::MatrixXcd right(nodes, n);
        for (Eigen::Index e = 0; e < nodes; ++e) {
            const Extra& x = extra_[static_cast<std::size_t>(e)];
            for (Eigen::Index j = 0; j < n; ++j) {
                right(e, j) = std::polar(1.0, static_cast<double>(j) * grid_.spacing() * x.xi(d - 1));
            }
            for (Eigen::Index o = 0; o < outer; ++o) {
                Eigen::Index rest = o;
                double phase = 0.0;
                for (int i = d - 2; i >= 0; --i) {
                    phase += static_cast<double>(rest % n) * grid_.spacing() * x.xi(i);
                    rest /= n;
                }
                left(o, e) = 2.0 * ec[static_cast<std::size_t>(e)] * std::polar(1.0, phase);
            }
        }
        const Eigen::MatrixXcd sum = left * right;
        for (Eigen::Index o = 0; o < outer; ++o) {
            for (Eigen::Index j = 0; j < n; ++j) w[static_cast<std::size_t>(o * n + j)] += sum(o, j).real();
        }
    }

    const double origin = w[0];
    r.values.resize(w.size());
    for (std::size_t g = 0; g < w.size(); ++g) r.values[g] = w[g] - origin;
    return r;
}

std::vector<double> Synthesizer::evaluate_at(std::uint64_t seed,
                                             const std::vector<Vector>& points) const {
    const int d = grid_.dim;
    for (const Vector& p : points) {
        if (p.size() != d) throw std::invalid_argument("evaluate_at: point dimension mismatch");
    }
    std::vector<Complex> c;
    lattice_coefficients(seed, c);
    const std::vector<Complex> ec = extra_coefficients(seed);
    const int K = params_.freq_cutoff;
    const auto side = static_cast<std::size_t>(side_);

    auto field = [&](const Vector& p) {
        std::vector<Complex> cur = c;
        std::vector<Complex> table(side);
        for (int axis = d - 1; axis >= 0; --axis) {
            for (std::size_t k = 0; k < side; ++k) {
                table[k] = std::polar(1.0, p(axis) * (static_cast<double>(k) - K) * step_);
            }
            std::vector<Complex> next(cur.size() / side);
            for (std::size_t o = 0; o < next.size(); ++o) {
                Complex s(0.0, 0.0);
                for (std::size_t k = 0; k < side; ++k) s += cur[o * side + k] * table[k];
                next[o] = s;
            }
            cur.swap(next);
        }
        double w = cur[0].real();
        for (std::size_t e = 0; e < extra_.size(); ++e) {
            w += 2.0 * (ec[e] * std::polar(1.0, p.dot(extra_[e].xi))).real();
        }
        return w;
    };

    const double origin = field(Vector::Zero(d));
    std::vector<double> out(points.size());
    parallel_for(points.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            out[i] = points[i].isZero(0.0) ? 0.0 : field(points[i]) - origin;
        }
    });
    return out;
}

double Synthesizer::model_variogram(const Vector& h) const {
    const int d = grid_.dim;
    if (h.size() != d) throw std::invalid_argument("model_variogram: lag dimension mismatch");
    const int K = params_.freq_cutoff;
    const std::size_t center = (lattice_size_ - 1) / 2;
    const std::size_t count = lattice_size_ - center - 1;
    const std::size_t chunks = chunk_count(count);
    std::vector<double> partial(chunks, 0.0);
    parallel_chunks(count, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        double s = 0.0;
        for (std::size_t off = begin; off < end; ++off) {
            const std::size_t flat = center + 1 + off;
            std::size_t rest = flat;
            double phase = 0.0;
            for (int i = d - 1; i >= 0; --i) {
                const auto idx = static_cast<int>(rest % static_cast<std::size_t>(side_));
                rest /= static_cast<std::size_t>(side_);
                phase += h(i) * (idx - K) * step_;
            }
            const double sn = std::sin(0.5 * phase);
            s += 4.0 * sn * sn * amp_[flat] * amp_[flat];
        }
        partial[chunk] = s;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    for (const Extra& e : extra_) {
        const double sn = std::sin(0.5 * h.dot(e.xi));
        total += 4.0 * sn * sn * e.amplitude * e.amplitude;
    }
    // Each lexicographically positive k stands for the pair {k, -k}.
    return 2.0 * total;
}

FieldRealization synthesize(const SpectralDensity& f, const GridSpec& grid,
                            const SynthesisParams& params) {
    return Synthesizer(f, grid, params).generate(params.seed);
}

std::vector<double> increment_field(const FieldRealization& r, std::span<const int> lag) {
    const int d = r.grid.dim;
    const int n = r.grid.n;
    if (lag.size() != static_cast<std::size_t>(d)) {
        throw std::invalid_argument("increment_field: lag has the wrong dimension");
    }
    std::vector<int> lo(static_cast<std::size_t>(d));
    std::vector<int> len(static_cast<std::size_t>(d));
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) {
        const int h = lag[static_cast<std::size_t>(i)];
        if (std::abs(h) >= n) {
            throw std::invalid_argument("increment_field: lag leaves no overlap with the grid");
        }
        lo[static_cast<std::size_t>(i)] = std::max(0, -h);
        len[static_cast<std::size_t>(i)] = n - std::abs(h);
        total *= static_cast<std::size_t>(len[static_cast<std::size_t>(i)]);
    }
    std::vector<double> out(total);
    std::vector<int> base(static_cast<std::size_t>(d));
    std::vector<int> shifted(static_cast<std::size_t>(d));
    for (std::size_t g = 0; g < total; ++g) {
        std::size_t rest = g;
        for (int i = d - 1; i >= 0; --i) {
            const auto len_i = static_cast<std::size_t>(len[static_cast<std::size_t>(i)]);
            base[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)] + static_cast<int>(rest % len_i);
            rest /= len_i;
            shifted[static_cast<std::size_t>(i)] = base[static_cast<std::size_t>(i)] + lag[static_cast<std::size_t>(i)];
        }
        out[g] = r.at(shifted) - r.at(base);
    }
    return out;
}

}  // namespace osgrf
