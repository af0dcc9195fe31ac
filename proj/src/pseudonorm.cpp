#include "osgrf/pseudonorm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace osgrf {

// ---------------------------------------------------------------------------
// Generic block pseudo-norms

double rho1(std::span<const double> xi, double lambda) {
    double sq = 0.0;
    for (double v : xi) sq += v * v;
    return std::pow(std::sqrt(sq), 1.0 / lambda);
}

double rho2(std::span<const double> xi, double lambda) {
    if (xi.empty()) return 0.0;
    double phi = std::abs(xi[0]);
    std::array<double, kMaxDim> coeff{};
    for (std::size_t i = 1; i < xi.size(); ++i) {
        double tau = 0.0;
        if (phi == 0.0) {
            tau = std::abs(xi[i]);
        } else {
            // coeff[k] = (-log(phi) / lambda)^k / k!
            const double step = -std::log(phi) / lambda;
            coeff[0] = 1.0;
            for (std::size_t k = 1; k <= i; ++k) {
                coeff[k] = coeff[k - 1] * step / static_cast<double>(k);
            }
            for (std::size_t k = 0; k <= i; ++k) tau += coeff[k] * xi[i - k];
        }
        phi += std::abs(tau);
    }
    return std::pow(phi, 1.0 / lambda);
}

double rho3(std::span<const double> xi, double alpha) { return rho1(xi, alpha); }

double rho4(std::span<const double> xi, double alpha) {
    const std::size_t pairs = xi.size() / 2;
    if (pairs == 0) return 0.0;
    double phi = std::hypot(xi[0], xi[1]);
    std::array<double, kMaxDim> coeff{};
    for (std::size_t i = 1; i < pairs; ++i) {
        double t1 = 0.0;
        double t2 = 0.0;
        if (phi == 0.0) {
            t1 = xi[2 * i];
            t2 = xi[2 * i + 1];
        } else {
            // The rotation part of phi^(-E^t/alpha) is a common isometry of
            // every pair, so only the nilpotent coupling affects the radius.
            const double step = -std::log(phi) / alpha;
            coeff[0] = 1.0;
            for (std::size_t k = 1; k <= i; ++k) {
                coeff[k] = coeff[k - 1] * step / static_cast<double>(k);
            }
            for (std::size_t k = 0; k <= i; ++k) {
                t1 += coeff[k] * xi[2 * (i - k)];
                t2 += coeff[k] * xi[2 * (i - k) + 1];
            }
        }
        phi += std::hypot(t1, t2);
    }
    return std::pow(phi, 1.0 / alpha);
}

double rho4_pair_radii(std::span<const double> xi, double alpha) {
    std::array<double, kMaxDim / 2> radii{};
    const std::size_t pairs = xi.size() / 2;
    for (std::size_t i = 0; i < pairs; ++i) {
        radii[i] = std::hypot(xi[2 * i], xi[2 * i + 1]);
    }
    return rho2(std::span<const double>(radii.data(), pairs), alpha);
}

double phase_ratio_value(std::span<const double> xi, double alpha, double beta) {
    const double r = std::hypot(xi[0], xi[1]);
    if (r == 0.0) return 0.0;
    const double phase = beta / alpha * std::log(r);
    return std::abs(xi[0] * std::cos(phase) - xi[1] * std::sin(phase)) /
           std::pow(r, 2.0 / alpha);
}

Matrix block_homogeneity(const GenericBlock& block) { return block.matrix().transpose(); }

// ---------------------------------------------------------------------------
// SphereFunction

SphereFunction SphereFunction::constant(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw std::invalid_argument("SphereFunction: constant must be positive and finite");
    }
    SphereFunction g;
    g.kind_ = Kind::Constant;
    g.constant_ = c;
    std::ostringstream os;
    os.precision(17);
    os << c;
    g.description_ = os.str();
    return g;
}

SphereFunction SphereFunction::expression(const std::string& text) {
    SphereFunction g;
    g.kind_ = Kind::Expression;
    g.expression_ = std::make_shared<const Expression>(text);
    g.description_ = text;
    return g;
}

SphereFunction SphereFunction::closure(std::function<double(std::span<const double>)> fn,
                                       std::string description) {
    if (!fn) throw std::invalid_argument("SphereFunction: empty closure");
    SphereFunction g;
    g.kind_ = Kind::Closure;
    g.closure_ = std::move(fn);
    g.description_ = std::move(description);
    return g;
}

SphereFunction SphereFunction::table(std::vector<Vector> points, std::vector<double> values) {
    if (points.empty() || points.size() != values.size()) {
        throw std::invalid_argument("SphereFunction: table needs matching, non-empty points/values");
    }
    const auto dim = points.front().size();
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != dim || points[i].norm() == 0.0 || !points[i].allFinite()) {
            throw std::invalid_argument("SphereFunction: table points must be finite, nonzero, "
                                        "and share one dimension");
        }
        if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
            throw std::invalid_argument("SphereFunction: table values must be positive");
        }
    }
    SphereFunction g;
    g.kind_ = Kind::Table;
    g.points_ = std::move(points);
    g.values_ = std::move(values);
    g.description_ = "table(" + std::to_string(g.points_.size()) + ")";
    if (dim == 2) {
        g.order_.resize(g.points_.size());
        for (std::size_t i = 0; i < g.order_.size(); ++i) g.order_[i] = i;
        std::vector<double> raw(g.points_.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            raw[i] = std::atan2(g.points_[i](1), g.points_[i](0));
        }
        std::sort(g.order_.begin(), g.order_.end(),
                  [&](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });
        g.angles_.resize(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) g.angles_[i] = raw[g.order_[i]];
    }
    return g;
}

double SphereFunction::operator()(std::span<const double> theta) const {
    switch (kind_) {
        case Kind::Constant: return constant_;
        case Kind::Expression: return expression_->evaluate(theta);
        case Kind::Closure: return closure_(theta);
        case Kind::Table: return interpolate(theta, std::nullopt);
    }
    return 0.0;
}

double SphereFunction::interpolate(std::span<const double> theta,
                                   std::optional<std::size_t> skip) const {
    const auto dim = static_cast<std::size_t>(points_.front().size());
    if (theta.size() != dim) {
        throw std::invalid_argument("SphereFunction: point dimension mismatch");
    }
    if (dim == 2 && order_.size() - (skip ? 1 : 0) >= 2) {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        const double angle = std::atan2(theta[1], theta[0]);
        // Sorted samples excluding `skip`, viewed periodically.
        std::vector<std::size_t> idx;
        idx.reserve(order_.size());
        for (std::size_t k = 0; k < order_.size(); ++k) {
            if (!skip || order_[k] != *skip) idx.push_back(k);
        }
        const std::size_t m = idx.size();
        auto upper = std::upper_bound(idx.begin(), idx.end(), angle,
                                      [&](double a, std::size_t k) { return a < angles_[k]; });
        const std::size_t hi_pos = static_cast<std::size_t>(upper - idx.begin()) % m;
        const std::size_t lo_pos = (hi_pos + m - 1) % m;
        const std::size_t lo = idx[lo_pos];
        const std::size_t hi = idx[hi_pos];
        double a0 = angles_[lo];
        double a1 = angles_[hi];
        double q = angle;
        if (a1 <= a0) a1 += two_pi;
        if (q < a0) q += two_pi;
        const double span = a1 - a0;
        const double t = span > 0.0 ? (q - a0) / span : 0.0;
        return (1.0 - t) * values_[order_[lo]] + t * values_[order_[hi]];
    }
    double norm = 0.0;
    for (double v : theta) norm += v * v;
    norm = std::sqrt(norm);
    std::size_t best = 0;
    double best_dot = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (skip && i == *skip) continue;
        double dot = 0.0;
        for (std::size_t k = 0; k < dim; ++k) dot += points_[i](static_cast<Eigen::Index>(k)) * theta[k];
        dot /= points_[i].norm() * norm;
        if (dot > best_dot) {
            best_dot = dot;
            best = i;
        }
    }
    return values_[best];
}

double SphereFunction::interpolation_error() const {
    if (kind_ != Kind::Table || points_.size() < 3) return 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const Vector& p = points_[i];
        const double est = interpolate(
            std::span<const double>(p.data(), static_cast<std::size_t>(p.size())), i);
        worst = std::max(worst, std::abs(est - values_[i]));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// PseudoNorm

const char* to_string(NormKind kind) {
    switch (kind) {
        case NormKind::Euclidean: return "euclidean";
        case NormKind::Generic1: return "generic1";
        case NormKind::Generic2: return "generic2";
        case NormKind::Generic3: return "generic3";
        case NormKind::Generic4: return "generic4";
        case NormKind::Assembled: return "assembled";
        case NormKind::Transferred: return "transferred";
        case NormKind::PhaseRatio: return "phase_ratio";
        case NormKind::Custom: return "custom";
    }
    return "unknown";
}

struct PseudoNorm::Data {
    NormKind kind = NormKind::Euclidean;
    int dim = 0;
    Matrix homogeneity;
    std::string name;
    double lambda = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double p = 2.0;
    Matrix P;
    Matrix Pt;
    std::vector<PseudoNorm> blocks;
    std::vector<int> offsets;
    std::vector<PseudoNorm> base;  // zero or one element
    std::optional<SphereFunction> g;
    Evaluator custom;
};

namespace {

void require_dim(int dim, const char* what) {
    if (dim < 1 || dim > kMaxDim) {
        throw std::invalid_argument(std::string(what) + ": dimension must lie in [1, " +
                                    std::to_string(kMaxDim) + "]");
    }
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + " must be positive and finite");
    }
}

}  // namespace

PseudoNorm PseudoNorm::euclidean(int dim) {
    require_dim(dim, "euclidean");
    auto d = std::make_shared<Data>();
    d->kind = NormKind::Euclidean;
    d->dim = dim;
    d->homogeneity = Matrix::Identity(dim, dim);
    return PseudoNorm(std::move(d));
}

PseudoNorm PseudoNorm::generic1(double lambda, int dim) {
    require_dim(dim, "generic1");
    require_positive(lambda, "generic1: lambda");
    auto d = std::make_shared<Data>();
    d->kind = NormKind::Generic1;
    d->dim = dim;
    d->lambda = lambda;
    d->homogeneity = block_homogeneity(GenericBlock::scalar_diag(lambda, dim));
    return PseudoNorm(std::move(d));
}

PseudoNorm PseudoNorm::generic2(double lambda, int dim) {
    require_dim(dim, "generic2");
    require_positive(lambda, "generic2: lambda");
    auto d = std::make_shared<Data>();
    d->kind = NormKind::Generic2;
    d->dim = dim;
    d->lambda = lambda;
    // A 1x1 "Jordan" block degenerates to lambda; keep it usable.
    d->homogeneity = dim == 1 ? Matrix::Constant(1, 1, lambda)
                              : block_homogeneity(GenericBlock::scalar_jordan(lambda, dim));
    return PseudoNorm(std::move(d));
}

PseudoNorm PseudoNorm::generic3(double alpha, double beta, int dim) {
    require_dim(dim, "generic3");
    auto d = std::make_shared<Data>();
    d->kind = NormKind::Generic3;
    d->dim = dim;
    d->alpha = alpha;
    d->beta = beta;
    d->homogeneity = block_homogeneity(GenericBlock::rotation_diag(alpha, beta, dim));
    return PseudoNorm(std::move(d));
}

PseudoNorm PseudoNorm::generic4(double alpha, double beta, int dim) {
    require_dim(dim, "generic4");
    auto d = std::make_shared<Data>();
    d->kind = NormKind::Generic4;
    d->dim = dim;
    d->alpha = alpha;
    d->beta = beta;
    d->homogeneity = block_homogeneity(GenericBlock::rotation_jordan(alpha, beta, dim));
    return PseudoNorm(std::move(d));
}

PseudoNorm PseudoNorm::for_block(const GenericBlock& block) {
    block.validate();
    switch (block.kind) {
        case BlockKind::ScalarDiag: return generic1(block.lambda, block.size);
        case BlockKind::ScalarJordan: return generic2(block.lambda, block.size);
        case BlockKind::RotationDiag: return generic3(block.alpha, block.beta, block.size);
        case BlockKind::RotationJordan: return generic4(block.alpha, block.beta, block.size);
    }
    throw std::invalid_argument("for_block: unknown block kind");
}

PseudoNorm PseudoNorm::phase_ratio(double alpha, double beta) {
    auto d = std::make_shared<Data>();
    d->kind = NormKind::PhaseRatio;
    d->dim = 2;
    d->alpha = alpha;
    d->beta = beta;
    d->homogeneity = block_homogeneity(GenericBlock::rotation_diag(alpha, beta, 2));
    return PseudoNorm(std::move(d));
}

PseudoNorm PseudoNorm::custom(Matrix homogeneity, Evaluator fn, std::string name) {
    if (homogeneity.rows() != homogeneity.cols()) {
        throw std::invalid_argument("custom pseudo-norm: homogeneity matrix must be square");
    }
    require_dim(static_cast<int>(homogeneity.rows()), "custom");
    if (!fn) throw std::invalid_argument("custom pseudo-norm: empty evaluator");
    auto d = std::make_shared<Data>();
    d->kind = NormKind::Custom;
    d->dim = static_cast<int>(homogeneity.rows());
    d->homogeneity = std::move(homogeneity);
    d->custom = std::move(fn);
    d->name = std::move(name);
    return PseudoNorm(std::move(d));
}

double PseudoNorm::operator()(std::span<const double> xi) const {
    const Data& d = *data_;
    if (xi.size() != static_cast<std::size_t>(d.dim)) {
        throw std::invalid_argument("pseudo-norm of dimension " + std::to_string(d.dim) +
                                    " evaluated at a point of dimension " +
                                    std::to_string(xi.size()));
    }
    switch (d.kind) {
        case NormKind::Euclidean: return rho1(xi, 1.0);
        case NormKind::Generic1: return rho1(xi, d.lambda);
        case NormKind::Generic2: return rho2(xi, d.lambda);
        case NormKind::Generic3: return rho3(xi, d.alpha);
        case NormKind::Generic4: return rho4(xi, d.alpha);
        case NormKind::PhaseRatio: return phase_ratio_value(xi, d.alpha, d.beta);
        case NormKind::Custom: return d.custom(xi);
        case NormKind::Assembled: {
            std::array<double, kMaxDim> zeta{};
            const auto n = static_cast<std::size_t>(d.dim);
            for (std::size_t i = 0; i < n; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    s += d.Pt(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * xi[j];
                }
                zeta[i] = s;
            }
            double acc = 0.0;
            for (std::size_t b = 0; b < d.blocks.size(); ++b) {
                const auto off = static_cast<std::size_t>(d.offsets[b]);
                const auto len = static_cast<std::size_t>(d.blocks[b].dim());
                const double v = d.blocks[b](std::span<const double>(zeta.data() + off, len));
                if (std::isinf(d.p)) {
                    acc = std::max(acc, v);
                } else if (d.p == 1.0) {
                    acc += v;
                } else if (d.p == 2.0) {
                    acc += v * v;
                } else {
                    acc += std::pow(v, d.p);
                }
            }
            if (std::isinf(d.p) || d.p == 1.0) return acc;
            if (d.p == 2.0) return std::sqrt(acc);
            return std::pow(acc, 1.0 / d.p);
        }
        case NormKind::Transferred: {
            const PseudoNorm& base = d.base.front();
            const double r = base(xi);
            if (r == 0.0) return 0.0;
            const Vector v = Eigen::Map<const Vector>(xi.data(), d.dim);
            const Vector theta = mat_pow(d.homogeneity, 1.0 / r) * v;
            return (*d.g)(theta) * r;
        }
    }
    return 0.0;
}

int PseudoNorm::dim() const { return data_->dim; }
NormKind PseudoNorm::kind() const { return data_->kind; }
const Matrix& PseudoNorm::homogeneity() const { return data_->homogeneity; }
double PseudoNorm::lambda() const { return data_->lambda; }
double PseudoNorm::alpha() const { return data_->alpha; }
double PseudoNorm::beta() const { return data_->beta; }
double PseudoNorm::combiner() const { return data_->p; }
const Matrix& PseudoNorm::change_of_basis() const { return data_->P; }
const std::vector<PseudoNorm>& PseudoNorm::blocks() const { return data_->blocks; }

const PseudoNorm& PseudoNorm::base() const {
    if (data_->base.empty()) throw std::logic_error("pseudo-norm has no base");
    return data_->base.front();
}

const SphereFunction& PseudoNorm::sphere_function() const {
    if (!data_->g) throw std::logic_error("pseudo-norm has no sphere function");
    return *data_->g;
}

std::string PseudoNorm::describe() const {
    const Data& d = *data_;
    std::ostringstream os;
    os << to_string(d.kind) << "(d=" << d.dim;
    switch (d.kind) {
        case NormKind::Generic1:
        case NormKind::Generic2: os << ", lambda=" << d.lambda; break;
        case NormKind::Generic3:
        case NormKind::Generic4:
        case NormKind::PhaseRatio: os << ", alpha=" << d.alpha << ", beta=" << d.beta; break;
        case NormKind::Assembled:
            os << ", p=" << d.p << ", blocks=[";
            for (std::size_t i = 0; i < d.blocks.size(); ++i) {
                os << (i ? ", " : "") << d.blocks[i].describe();
            }
            os << "]";
            break;
        case NormKind::Transferred:
            os << ", base=" << d.base.front().describe() << ", g=" << d.g->description();
            break;
        case NormKind::Custom: os << ", name=" << d.name; break;
        case NormKind::Euclidean: break;
    }
    os << ")";
    return os.str();
}

PseudoNorm assemble(const Matrix& P, std::vector<PseudoNorm> block_norms, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("assemble: combiner exponent must lie in [1, inf]");
    if (block_norms.empty()) throw std::invalid_argument("assemble: no block pseudo-norms given");
    if (P.rows() != P.cols()) throw std::invalid_argument("assemble: P must be square");
    int total = 0;
    std::vector<int> offsets;
    std::vector<Matrix> homs;
    for (const auto& b : block_norms) {
        offsets.push_back(total);
        total += b.dim();
        homs.push_back(b.homogeneity());
    }
    if (total != P.rows()) {
        throw std::invalid_argument("assemble: block dimensions sum to " + std::to_string(total) +
                                    " but P is " + std::to_string(P.rows()) + "x" +
                                    std::to_string(P.cols()));
    }
    require_dim(total, "assemble");
    Eigen::JacobiSVD<Matrix> svd(P);
    const auto& s = svd.singularValues();
    if (!(s(s.size() - 1) > 1e-12 * s(0))) {
        throw std::invalid_argument("assemble: P is numerically singular");
    }
    auto d = std::make_shared<PseudoNorm::Data>();
    d->kind = NormKind::Assembled;
    d->dim = total;
    d->p = p;
    d->P = P;
    d->Pt = P.transpose();
    // rho(a^M xi) = phi(P^t a^M xi) = phi(a^{B} P^t xi) with B = blockdiag(M_l).
    d->homogeneity = d->Pt.inverse() * block_diagonal(homs) * d->Pt;
    d->blocks = std::move(block_norms);
    d->offsets = std::move(offsets);
    return PseudoNorm(std::move(d));
}

PseudoNorm assemble(const JordanSpec& spec, std::vector<PseudoNorm> block_norms, double p) {
    spec.validate();
    if (block_norms.size() != spec.blocks.size()) {
        throw std::invalid_argument("assemble: " + std::to_string(block_norms.size()) +
                                    " block pseudo-norms for " +
                                    std::to_string(spec.blocks.size()) + " Jordan blocks");
    }
    for (std::size_t i = 0; i < block_norms.size(); ++i) {
        const Matrix expected = block_homogeneity(spec.blocks[i]);
        if (block_norms[i].dim() != spec.blocks[i].size) {
            throw std::invalid_argument("assemble: block " + std::to_string(i) + " has dimension " +
                                        std::to_string(block_norms[i].dim()) + ", expected " +
                                        std::to_string(spec.blocks[i].size));
        }
        if (relative_frobenius_error(block_norms[i].homogeneity(), expected) > 1e-12) {
            throw std::invalid_argument("assemble: block " + std::to_string(i) +
                                        " pseudo-norm is not homogeneous for the transposed "
                                        "Jordan block");
        }
    }
    return assemble(spec.P, std::move(block_norms), p);
}

PseudoNorm canonical_pseudonorm(const JordanSpec& spec, double p) {
    std::vector<PseudoNorm> norms;
    for (const auto& b : spec.blocks) norms.push_back(PseudoNorm::for_block(b));
    return assemble(spec, std::move(norms), p);
}

Vector radial_project(const Vector& xi, const PseudoNorm& rho) {
    if (xi.size() != rho.dim()) throw std::invalid_argument("radial_project: dimension mismatch");
    if (xi.isZero(0.0)) throw std::domain_error("radial_project: xi must be nonzero");
    const double r = rho(xi);
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw std::domain_error("radial_project: pseudo-norm is not positive at xi");
    }
    return mat_pow(rho.homogeneity(), 1.0 / r) * xi;
}

std::vector<Vector> random_directions(int dim, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<Vector> dirs;
    dirs.reserve(count);
    while (dirs.size() < count) {
        Vector v(dim);
        for (int i = 0; i < dim; ++i) v(i) = normal(rng);
        const double n = v.norm();
        if (n > 1e-12) dirs.push_back(v / n);
    }
    return dirs;
}

PseudoNorm transfer(const PseudoNorm& base, SphereFunction g) {
    const int dim = base.dim();
    if (g.kind() == SphereFunction::Kind::Table &&
        g.table_points().front().size() != dim) {
        throw std::invalid_argument("transfer: table dimension does not match the base norm");
    }
    // Spot-check positivity of g on the base unit sphere.
    for (const Vector& u : random_directions(dim, 256, 0x5eed'9e37ULL)) {
        const Vector theta = radial_project(u, base);
        const double v = g(theta);
        if (!(v > 0.0) || !std::isfinite(v)) {
            std::ostringstream os;
            os << "transfer: g must be positive on the unit sphere; g = " << v << " at ("
               << theta.transpose() << ")";
            throw std::invalid_argument(os.str());
        }
    }
    auto d = std::make_shared<PseudoNorm::Data>();
    d->kind = NormKind::Transferred;
    d->dim = dim;
    d->homogeneity = base.homogeneity();
    d->base.push_back(base);
    d->g = std::move(g);
    return PseudoNorm(std::move(d));
}

bool same_homogeneity(const PseudoNorm& a, const PseudoNorm& b, double rel_tol) {
    if (a.dim() != b.dim()) return false;
    return relative_frobenius_error(a.homogeneity(), b.homogeneity()) <= rel_tol;
}

SphereFunction recover_g(const PseudoNorm& rho_a, const PseudoNorm& rho_b,
                         const std::vector<Vector>& samples) {
    if (!same_homogeneity(rho_a, rho_b)) {
        throw std::invalid_argument("recover_g: pseudo-norms have different homogeneity matrices");
    }
    std::vector<Vector> points;
    std::vector<double> values;
    points.reserve(samples.size());
    values.reserve(samples.size());
    for (const Vector& s : samples) {
        const Vector theta = radial_project(s, rho_a);
        values.push_back(rho_b(theta) / rho_a(theta));
        points.push_back(theta);
    }
    return SphereFunction::table(std::move(points), std::move(values));
}

double quasi_triangle_constant(const PseudoNorm& rho, std::size_t n_samples, std::uint64_t seed) {
    if (n_samples == 0) throw std::invalid_argument("quasi_triangle_constant: n_samples >= 1");
    const int dim = rho.dim();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> log_radius(-3.0, 3.0);
    const Matrix& M = rho.homogeneity();
    auto draw = [&]() {
        Vector u(dim);
        do {
            for (int i = 0; i < dim; ++i) u(i) = normal(rng);
        } while (u.norm() < 1e-12);
        const double radius = std::pow(10.0, log_radius(rng));
        return Vector(mat_pow(M, radius) * radial_project(u, rho));
    };
    double best = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const Vector x = draw();
        const Vector y = draw();
        const double denom = rho(x) + rho(y);
        const double ratio = rho(Vector(x + y)) / denom;
        if (std::isfinite(ratio)) best = std::max(best, ratio);
    }
    return best;
}

// ---------------------------------------------------------------------------
// Ray tracing

RaySolution trace_ray(const PseudoNorm& rho, const Vector& direction, double level) {
    RaySolution out;
    const int dim = rho.dim();
    if (direction.size() != dim) throw std::invalid_argument("trace_ray: dimension mismatch");
    std::array<double, kMaxDim> buf{};
    auto at = [&](double r) {
        for (int i = 0; i < dim; ++i) buf[static_cast<std::size_t>(i)] = r * direction(i);
        return rho(std::span<const double>(buf.data(), static_cast<std::size_t>(dim)));
    };
    double lo = 1e-8;
    double hi = 1e8;
    for (int k = 0; k < 36 && !(at(lo) <= level); ++k) lo *= 1e-8;
    for (int k = 0; k < 36 && !(at(hi) >= level); ++k) hi *= 1e8;
    if (!(at(lo) <= level) || !(at(hi) >= level)) return out;
    out.bracketed = true;
    double log_lo = std::log(lo);
    double log_hi = std::log(hi);
    while (log_hi - log_lo > 1e-15 * std::max(1.0, std::abs(log_hi)) && out.iterations < 200) {
        const double mid = 0.5 * (log_lo + log_hi);
        if (at(std::exp(mid)) < level) {
            log_lo = mid;
        } else {
            log_hi = mid;
        }
        ++out.iterations;
    }
    out.radius = std::exp(0.5 * (log_lo + log_hi));
    return out;
}

std::vector<LevelSetPoint> level_set(const PseudoNorm& rho, double level, int resolution) {
    if (rho.dim() != 2) throw std::invalid_argument("level_set: pseudo-norm must be 2-dimensional");
    if (!(level > 0.0)) throw std::invalid_argument("level_set: level must be positive");
    if (resolution < 1) throw std::invalid_argument("level_set: resolution must be >= 1");
    std::vector<LevelSetPoint> pts;
    pts.reserve(static_cast<std::size_t>(resolution));
    for (int k = 0; k < resolution; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / resolution;
        Vector u(2);
        u << std::cos(theta), std::sin(theta);
        const RaySolution sol = trace_ray(rho, u, level);
        LevelSetPoint p;
        p.theta = theta;
        if (sol.bracketed) {
            p.x = sol.radius * u(0);
            p.y = sol.radius * u(1);
        } else {
            p.degenerate = true;
            p.x = std::numeric_limits<double>::quiet_NaN();
            p.y = std::numeric_limits<double>::quiet_NaN();
        }
        pts.push_back(p);
    }
    return pts;
}

// ---------------------------------------------------------------------------
// Checks

HomogeneityReport check_homogeneity(const PseudoNorm& rho, std::size_t samples,
                                    std::uint64_t seed) {
    HomogeneityReport rep;
    rep.samples = samples;
    const int dim = rho.dim();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> log_r(-3.0, 3.0);
    std::uniform_real_distribution<double> log_a(-1.0, 1.0);
    const auto dirs = random_directions(dim, samples, seed ^ 0xd1b54a32d192ed03ULL);
    rep.worst_point = Vector::Zero(dim);
    for (std::size_t i = 0; i < samples; ++i) {
        const Vector xi = std::pow(10.0, log_r(rng)) * dirs[i];
        const double a = std::pow(10.0, log_a(rng));
        const double rhs = a * rho(xi);
        const double lhs = rho(Vector(mat_pow(rho.homogeneity(), a) * xi));
        double err = 0.0;
        if (rhs > 0.0) {
            err = std::abs(lhs - rhs) / rhs;
        } else if (lhs != rhs) {
            err = std::numeric_limits<double>::infinity();
        }
        if (!std::isfinite(lhs) || !std::isfinite(rhs)) err = std::numeric_limits<double>::infinity();
        if (err > rep.max_relative_error || i == 0) {
            rep.max_relative_error = std::max(rep.max_relative_error, err);
            rep.worst_point = xi;
            rep.worst_scale = a;
        }
    }
    return rep;
}

PositivityReport check_positivity(const PseudoNorm& rho, std::size_t samples, std::uint64_t seed) {
    PositivityReport rep;
    const int dim = rho.dim();
    rep.origin_zero = rho(Vector(Vector::Zero(dim))) == 0.0;

    std::vector<Vector> dirs;
    std::vector<double> values;
    if (dim == 2) {
        for (std::size_t k = 0; k < samples; ++k) {
            const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(samples);
            Vector u(2);
            u << std::cos(t), std::sin(t);
            dirs.push_back(u);
        }
    } else {
        dirs = random_directions(dim, samples, seed);
        for (int i = 0; i < dim; ++i) {
            Vector e = Vector::Zero(dim);
            e(i) = 1.0;
            dirs.push_back(e);
            dirs.push_back(-e);
        }
    }
    values.reserve(dirs.size());
    for (const auto& u : dirs) values.push_back(rho(u));

    std::size_t arg = 0;
    bool finite = true;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) finite = false;
        if (values[i] < values[arg]) arg = i;
    }
    Vector best = dirs[arg];
    double best_value = values[arg];

    if (dim == 2 && samples >= 3) {
        // Golden-section refinement of the angle around the scan minimum.
        const double h = 2.0 * std::numbers::pi / static_cast<double>(samples);
        const double center = std::atan2(best(1), best(0));
        double a = center - h;
        double b = center + h;
        auto f = [&](double t) {
            Vector u(2);
            u << std::cos(t), std::sin(t);
            return rho(u);
        };
        const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = b - ratio * (b - a);
        double d = a + ratio * (b - a);
        double fc = f(c);
        double fd = f(d);
        for (int it = 0; it < 100; ++it) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - ratio * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + ratio * (b - a);
                fd = f(d);
            }
        }
        const double t = fc < fd ? c : d;
        const double ft = std::min(fc, fd);
        if (ft < best_value) {
            best_value = ft;
            best = Vector(2);
            best << std::cos(t), std::sin(t);
        }
    }

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    rep.median_on_sphere = sorted[sorted.size() / 2];
    rep.min_on_sphere = best_value;
    rep.positive = finite && rep.origin_zero && best_value > 1e-9 * rep.median_on_sphere;
    if (!(best_value > 1e-9 * rep.median_on_sphere)) rep.witness = best;
    return rep;
}

}  // namespace osgrf
