#include "osgrf/spectral.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "osgrf/parallel.hpp"
#include "osgrf/quadrature.hpp"

namespace osgrf {

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

InadmissibleHurst::InadmissibleHurst(double hurst, double lambda_min)
    : std::invalid_argument("H = " + format_number(hurst) +
                            " is not admissible: H must lie in (0, " + format_number(lambda_min) +
                            ")"),
      hurst_(hurst),
      lambda_min_(lambda_min) {}

bool admissible(double hurst, const AnisotropyMatrix& E) {
    return hurst > 0.0 && hurst < E.lambda_min();
}

SpectralDensity::SpectralDensity(PseudoNorm rho, double hurst, AnisotropyMatrix E, Unchecked)
    : rho_(std::move(rho)), hurst_(hurst), E_(std::move(E)), trace_E_(E_.trace()) {
    if (rho_.dim() != E_.dim()) {
        throw std::invalid_argument("spectral density: pseudo-norm dimension " +
                                    std::to_string(rho_.dim()) + " does not match E dimension " +
                                    std::to_string(E_.dim()));
    }
    const Matrix Et = E_.matrix().transpose();
    if (relative_frobenius_error(rho_.homogeneity(), Et) > 1e-9) {
        throw std::invalid_argument(
            "spectral density: the pseudo-norm's homogeneity matrix must equal E^t");
    }
    if (!std::isfinite(hurst_)) throw std::invalid_argument("spectral density: H must be finite");
}

SpectralDensity::SpectralDensity(PseudoNorm rho, double hurst, AnisotropyMatrix E)
    : SpectralDensity(std::move(rho), hurst, std::move(E), Unchecked{}) {
    if (!admissible(hurst_, E_)) throw InadmissibleHurst(hurst_, E_.lambda_min());
}

SpectralDensity::SpectralDensity(PseudoNorm rho, double hurst)
    : SpectralDensity(rho, hurst, AnisotropyMatrix(rho.homogeneity().transpose())) {}

SpectralDensity SpectralDensity::unchecked(PseudoNorm rho, double hurst, AnisotropyMatrix E) {
    return SpectralDensity(std::move(rho), hurst, std::move(E), Unchecked{});
}

double SpectralDensity::operator()(std::span<const double> xi) const {
    const double r = rho_(xi);
    if (r == 0.0) return std::numeric_limits<double>::infinity();
    return std::pow(r, -exponent());
}

SpectralDensity SpectralDensity::with_hurst(double hurst) const {
    return SpectralDensity(rho_, hurst, E_);
}

// ---------------------------------------------------------------------------

void QuadratureOptions::validate() const {
    if (angular_nodes < 4 || angular_nodes % 2 != 0) {
        throw std::invalid_argument("quadrature: angular_nodes must be even and >= 4");
    }
    if (polar_nodes < 1) throw std::invalid_argument("quadrature: polar_nodes must be >= 1");
    if (monte_carlo_directions < 2) {
        throw std::invalid_argument("quadrature: monte_carlo_directions must be >= 2");
    }
    if (panel_order < 1) throw std::invalid_argument("quadrature: panel_order must be >= 1");
    if (!(cutoff_phase_rate > 1.0)) {
        throw std::invalid_argument("quadrature: cutoff_phase_rate must exceed 1");
    }
    if (!(origin_amplitude > 0.0) || !(origin_amplitude < 1.0)) {
        throw std::invalid_argument("quadrature: origin_amplitude must lie in (0, 1)");
    }
    if (!(tolerance > 0.0)) throw std::invalid_argument("quadrature: tolerance must be positive");
}

namespace {

constexpr int kMaxLevel = 30;

/// Radial derivative of rho along u at radius r, by central difference.
double radial_derivative(const PseudoNorm& rho, const Vector& u, double r) {
    const double eps = 1e-5;
    const double up = rho(Vector(r * (1.0 + eps) * u));
    const double down = rho(Vector(r * (1.0 - eps) * u));
    return (up - down) / (2.0 * eps * r);
}

double sphere_area(int d) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

}  // namespace

CovarianceQuadrature::CovarianceQuadrature(SpectralDensity f, QuadratureOptions options)
    : f_(std::move(f)), options_(options) {
    options_.validate();
    const int d = f_.dim();
    const PseudoNorm& rho = f_.rho();

    // Euclidean directions with their angular weights.
    std::vector<Vector> dirs;
    std::vector<double> base;
    std::vector<double> coarse;
    if (d == 1) {
        dirs = {Vector::Constant(1, 1.0), Vector::Constant(1, -1.0)};
        base = {1.0, 1.0};
        coarse = base;
    } else if (d == 2) {
        const int n = options_.angular_nodes;
        for (int i = 0; i < n; ++i) {
            const double psi = 2.0 * std::numbers::pi * i / n;
            Vector u(2);
            u << std::cos(psi), std::sin(psi);
            dirs.push_back(u);
            base.push_back(2.0 * std::numbers::pi / n);
            coarse.push_back(i % 2 == 0 ? 4.0 * std::numbers::pi / n : 0.0);
        }
    } else if (d == 3) {
        const GaussRule polar = gauss_legendre(options_.polar_nodes);
        const int n = options_.angular_nodes;
        for (std::size_t p = 0; p < polar.nodes.size(); ++p) {
            const double c = polar.nodes[p];
            const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
            for (int i = 0; i < n; ++i) {
                const double phi = 2.0 * std::numbers::pi * i / n;
                Vector u(3);
                u << s * std::cos(phi), s * std::sin(phi), c;
                dirs.push_back(u);
                base.push_back(polar.weights[p] * 2.0 * std::numbers::pi / n);
                coarse.push_back(i % 2 == 0 ? polar.weights[p] * 4.0 * std::numbers::pi / n : 0.0);
            }
        }
    } else {
        monte_carlo_ = true;
        const auto m = static_cast<std::size_t>(options_.monte_carlo_directions);
        dirs = random_directions(d, m, options_.seed);
        base.assign(m, sphere_area(d) / static_cast<double>(m));
        coarse = base;
    }

    nodes_.reserve(dirs.size());
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        const RaySolution ray = trace_ray(rho, dirs[i], 1.0);
        if (!ray.bracketed) {
            throw std::domain_error("covariance quadrature: the ray does not cross {rho = 1}");
        }
        const double slope = radial_derivative(rho, dirs[i], ray.radius);
        if (!(slope > 0.0) || !std::isfinite(slope)) {
            throw std::domain_error(
                "covariance quadrature: rho must increase along rays through the origin");
        }
        // Orbit measure density: r^(d-1) / (d rho / dr) at the crossing.
        const double jac = std::pow(ray.radius, d - 1) / slope;
        nodes_.push_back({ray.radius * dirs[i], base[i] * jac, coarse[i] * jac});
        theta_radius_ = std::max(theta_radius_, ray.radius);
    }

    const Matrix& E = f_.E().matrix();
    const auto& eig = f_.E().eigenvalues();
    for (Eigen::Index i = 0; i < eig.size(); ++i) {
        lambda_max_abs_ = std::max(lambda_max_abs_, std::abs(eig(i)));
        rotation_rate_ = std::max(rotation_rate_, std::abs(eig(i).imag()));
        real_max_ = std::max(real_max_, eig(i).real());
    }
    panel_width_ = std::min(0.5, 0.5 / std::max(1e-300, lambda_max_abs_));

    const GaussRule rule = gauss_legendre(options_.panel_order);
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        gl_nodes_.push_back(0.5 * (rule.nodes[j] + 1.0));
        gl_weights_.push_back(0.5 * rule.weights[j]);
    }
    const double two_h = 2.0 * f_.hurst();
    for (int k = 0; k <= kMaxLevel; ++k) {
        const double w = std::ldexp(panel_width_, -k);
        step_.push_back(expm(w * E));
        std::vector<Matrix> inner;
        std::vector<double> decay;
        for (double x : gl_nodes_) {
            inner.push_back(expm(w * x * E));
            decay.push_back(std::exp(-two_h * w * x));
        }
        node_step_.push_back(std::move(inner));
        node_decay_.push_back(std::move(decay));
    }
}

double CovarianceQuadrature::sphere_mass() const {
    double total = 0.0;
    for (const auto& n : nodes_) total += n.weight;
    return total;
}

double CovarianceQuadrature::orbit_integral(const Vector& start, double t_lo, const Vector& theta,
                                            double& error, std::size_t& nodes) const {
    const Matrix& E = f_.E().matrix();
    const double H = f_.hurst();
    const double two_h = 2.0 * H;
    const double cutoff = options_.cutoff_phase_rate;
    const double lam = f_.E().lambda_min();
    const double theta_norm = theta.norm();
    const double amp_cap = 1e6 * cutoff;
    const double e_norm = E.norm();

    Vector v = start;
    double t = t_lo;
    double phi = v.dot(theta);
    double dphi = (E * v).dot(theta);
    double decay = std::exp(-two_h * t);
    double acc = 0.0;

    // Below t_lo the integrand is ~ phi^2 e^(-2Ht) with phi growing like e^(mu t),
    // lambda_min <= mu <= max Re eig(E). The local log-derivative estimates mu.
    if (lam > H && phi != 0.0) {
        const double mu = std::clamp(dphi / phi, lam, std::max(lam, real_max_));
        const double rem = phi * phi * decay / (2.0 * mu - two_h);
        const double worst = phi * phi * decay / (2.0 * lam - two_h);
        acc += rem;
        error += 0.5 * (worst - rem) + 1e-3 * rem;
    }

    int level = 0;
    Vector vb(v.size());
    Vector vj(v.size());
    for (;;) {
        int k = std::max(0, level - 1);
        double dphib = 0.0;
        for (;; ++k) {
            vb.noalias() = step_[static_cast<std::size_t>(k)] * v;
            dphib = (E * vb).dot(theta);
            const double w = std::ldexp(panel_width_, -k);
            if (w * 2.0 * std::max(std::abs(dphi), std::abs(dphib)) <= 0.5 * std::numbers::pi ||
                k == kMaxLevel) {
                break;
            }
        }
        level = k;
        const auto ks = static_cast<std::size_t>(k);
        const double w = std::ldexp(panel_width_, -k);
        double panel = 0.0;
        for (std::size_t j = 0; j < gl_nodes_.size(); ++j) {
            vj.noalias() = node_step_[ks][j] * v;
            const double s = std::sin(0.5 * vj.dot(theta));
            panel += gl_weights_[j] * node_decay_[ks][j] * 4.0 * s * s;
        }
        acc += w * decay * panel;
        nodes += gl_nodes_.size();

        v = vb;
        t += w;
        decay = std::exp(-two_h * t);
        phi = v.dot(theta);
        dphi = dphib;

        if (std::abs(dphi) >= cutoff) {
            // int_T^inf 2(1 - cos phi) e^(-2Ht) dt, integrating the cosine by parts once.
            acc += decay / H + 2.0 * std::sin(phi) * decay / dphi;
            error += 2.0 * decay * (two_h + e_norm) / (dphi * dphi);
            if (rotation_rate_ > 0.0) {
                // Stationary points of the rotating phase beyond the cutoff.
                error += 2.0 * decay * std::sqrt(2.0 * std::numbers::pi / cutoff) /
                         (1.0 - std::exp(-two_h * std::numbers::pi / rotation_rate_));
            }
            break;
        }
        if (v.norm() * theta_norm >= amp_cap) {
            acc += (1.0 - std::cos(phi)) * decay / H;
            error += 2.0 * decay / H;
            break;
        }
    }
    return acc;
}

CovarianceReport CovarianceQuadrature::variogram(const Vector& h_in) const {
    const int d = f_.dim();
    if (h_in.size() != d) {
        throw std::invalid_argument("variogram: lag has dimension " + std::to_string(h_in.size()) +
                                    ", expected " + std::to_string(d));
    }
    if (!h_in.allFinite()) throw std::invalid_argument("variogram: lag must be finite");
    CovarianceReport rep;
    if (h_in.isZero(0.0)) return rep;

    // v(h) = v(-h); a canonical sign makes the result exactly even.
    Vector h = h_in;
    for (int i = 0; i < d; ++i) {
        if (h(i) != 0.0) {
            if (h(i) < 0.0) h = -h;
            break;
        }
    }

    const Matrix& E = f_.E().matrix();
    const double threshold = options_.origin_amplitude;
    auto amplitude = [&](double t) { return (expm(t * E) * h).norm() * theta_radius_; };
    double t_lo = 0.0;
    if (amplitude(t_lo) > threshold) {
        for (int i = 0; i < 4000 && amplitude(t_lo) > threshold; ++i) t_lo -= 1.0;
    } else {
        for (int i = 0; i < 4000 && amplitude(t_lo + 1.0) <= threshold; ++i) t_lo += 1.0;
    }
    const Vector start = expm(t_lo * E) * h;

    const std::size_t m = nodes_.size();
    std::vector<double> values(m, 0.0);
    std::vector<double> errors(m, 0.0);
    std::vector<std::size_t> counts(m, 0);
    parallel_for(m, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            values[i] = orbit_integral(start, t_lo, nodes_[i].theta, errors[i], counts[i]);
        }
    });

    double fine = 0.0;
    double coarse = 0.0;
    double radial_error = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        fine += nodes_[i].weight * values[i];
        coarse += nodes_[i].coarse_weight * values[i];
        radial_error += nodes_[i].weight * errors[i];
        rep.nodes_used += counts[i];
    }
    double angular_error = 0.0;
    if (monte_carlo_) {
        double sq = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double y = static_cast<double>(m) * nodes_[i].weight * values[i] - fine;
            sq += y * y;
        }
        angular_error = std::sqrt(sq / static_cast<double>(m - 1) / static_cast<double>(m));
    } else if (d >= 2) {
        angular_error = std::abs(fine - coarse);
    }
    rep.value = fine;
    rep.error_estimate = angular_error + radial_error;
    rep.flagged = !std::isfinite(rep.value) || rep.error_estimate > options_.tolerance * std::abs(rep.value);
    return rep;
}

CovarianceReport CovarianceQuadrature::covariance(const Vector& x, const Vector& y) const {
    const CovarianceReport vx = variogram(x);
    const CovarianceReport vy = variogram(y);
    const CovarianceReport vd = variogram(Vector(x - y));
    CovarianceReport rep;
    rep.value = 0.5 * (vx.value + vy.value - vd.value);
    rep.error_estimate = 0.5 * (vx.error_estimate + vy.error_estimate + vd.error_estimate);
    rep.nodes_used = vx.nodes_used + vy.nodes_used + vd.nodes_used;
    const double scale = std::max(std::abs(rep.value), 0.5 * (vx.value + vy.value));
    rep.flagged = !std::isfinite(rep.value) || rep.error_estimate > options_.tolerance * scale;
    return rep;
}

CovarianceReport covariance(const SpectralDensity& f, const CovarianceQuery& query) {
    const CovarianceQuadrature quad(f, query.quadrature);
    return quad.covariance(query.x, query.y);
}

IntegrabilityReport integrability_check(const SpectralDensity& f, int shells,
                                        const QuadratureOptions& options) {
    if (shells < 4) throw std::invalid_argument("integrability_check: shells must be >= 4");
    const CovarianceQuadrature quad(f, options);
    const Matrix& M = f.rho().homogeneity();
    const double H = f.hurst();
    const GaussRule rule = gauss_legendre(16);
    const double ln2 = std::numbers::ln2;

    IntegrabilityReport rep;
    rep.expected_outer_ratio = std::exp2(-2.0 * H);
    for (int j = -shells; j <= shells; ++j) {
        double sum = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double t = ln2 * (j + 0.5 * (rule.nodes[q] + 1.0));
            const double wt = 0.5 * ln2 * rule.weights[q] * std::exp(-2.0 * H * t);
            const Matrix A = expm(t * M);
            double inner = 0.0;
            for (const auto& node : quad.sphere_nodes()) {
                inner += node.weight * std::min(1.0, (A * node.theta).squaredNorm());
            }
            sum += wt * inner;
        }
        if (!std::isfinite(sum)) {
            throw std::runtime_error("integrability_check: quadrature produced a non-finite shell sum");
        }
        rep.shell_index.push_back(j);
        rep.shell_sums.push_back(sum);
    }
    const std::size_t last = rep.shell_sums.size() - 1;
    rep.ratio = rep.shell_sums[last] / rep.shell_sums[last - 1];
    rep.inner_ratio = rep.shell_sums[0] / rep.shell_sums[1];
    rep.converged = std::isfinite(rep.ratio) && std::isfinite(rep.inner_ratio) &&
                    rep.ratio < 1.0 - 1e-6 && rep.inner_ratio < 1.0 - 1e-6;
    return rep;
}

}  // namespace osgrf
