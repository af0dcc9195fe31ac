#include "osgrf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "osgrf/parallel.hpp"
#include "osgrf/random.hpp"

namespace osgrf {

namespace {

void require_in_box(const Vector& p, double lo, double hi, const char* what) {
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (!(p(i) >= lo && p(i) <= hi)) {
            throw std::out_of_range(std::string(what) + " lies outside the synthesis grid");
        }
    }
}

}  // namespace

ScalingReport scaling_test(const Synthesizer& synth, double a, const std::vector<Vector>& points,
                           std::size_t n_realizations, std::uint64_t seed, double tol_rel,
                           std::optional<double> reported_hurst) {
    if (!(a > 0.0)) throw std::invalid_argument("scaling_test: a must be positive");
    if (n_realizations < 100) throw std::invalid_argument("scaling_test: need at least 100 realizations");
    if (points.empty()) throw std::invalid_argument("scaling_test: no test points");
    const SpectralDensity& f = synth.density();
    const double L = synth.grid().extent;
    const Matrix scale = mat_pow(f.E().matrix(), a);

    ScalingReport rep;
    rep.a = a;
    rep.hurst_tested = reported_hurst.value_or(f.hurst());
    rep.expected = std::pow(a, 2.0 * rep.hurst_tested);
    rep.n_realizations = n_realizations;

    std::vector<Vector> eval;
    for (const Vector& x : points) {
        if (x.size() != f.dim()) throw std::invalid_argument("scaling_test: point dimension mismatch");
        require_in_box(x, 0.0, L, "test point");
        const Vector image = scale * x;
        require_in_box(image, -L, L, "scaled test point");
        eval.push_back(x);
        eval.push_back(image);
    }

    std::vector<std::vector<double>> samples(n_realizations);
    parallel_for(n_realizations, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) samples[r] = synth.evaluate_at(mix_seed(seed, r), eval);
    });

    const double true_expected = std::pow(a, 2.0 * f.hurst());
    const auto n = static_cast<double>(n_realizations);
    rep.pass = true;
    for (std::size_t p = 0; p < points.size(); ++p) {
        ScalingPoint sp;
        sp.x = eval[2 * p];
        sp.image = eval[2 * p + 1];
        double su = 0.0;
        double sw = 0.0;
        for (const auto& s : samples) {
            su += s[2 * p] * s[2 * p];
            sw += s[2 * p + 1] * s[2 * p + 1];
        }
        const double mu = su / n;
        const double mw = sw / n;
        double vu = 0.0;
        double vw = 0.0;
        double cuw = 0.0;
        for (const auto& s : samples) {
            const double du = s[2 * p] * s[2 * p] - mu;
            const double dw = s[2 * p + 1] * s[2 * p + 1] - mw;
            vu += du * du;
            vw += dw * dw;
            cuw += du * dw;
        }
        vu /= n - 1.0;
        vw /= n - 1.0;
        cuw /= n - 1.0;
        sp.var_x = mu;
        sp.var_image = mw;
        sp.ratio = mw / mu;
        // Delta method for a ratio of correlated means.
        const double rel2 = vu / (n * mu * mu) + vw / (n * mw * mw) - 2.0 * cuw / (n * mu * mw);
        sp.standard_error = sp.ratio * std::sqrt(std::max(0.0, rel2));
        const double model_ratio = synth.model_variogram(sp.image) / synth.model_variogram(sp.x);
        sp.truncation_bias = std::abs(model_ratio / true_expected - 1.0);
        sp.deviation = std::abs(sp.ratio - rep.expected) / rep.expected;
        sp.budget = tol_rel + 2.0 * (sp.standard_error / rep.expected + sp.truncation_bias);
        sp.pass = std::isfinite(sp.ratio) && sp.ratio > 0.0 && sp.deviation <= sp.budget;
        rep.pass = rep.pass && sp.pass;
        rep.points.push_back(std::move(sp));
    }
    return rep;
}

CovarianceScalingReport covariance_scaling_check(const CovarianceQuadrature& quad, double a,
                                                 const std::vector<std::pair<Vector, Vector>>& pairs,
                                                 double tol_rel) {
    if (!(a > 0.0)) throw std::invalid_argument("covariance_scaling_check: a must be positive");
    const SpectralDensity& f = quad.density();
    const Matrix scale = mat_pow(f.E().matrix(), a);
    const double factor = std::pow(a, 2.0 * f.hurst());
    CovarianceScalingReport rep;
    rep.a = a;
    rep.pass = true;
    for (const auto& [x, y] : pairs) {
        CovariancePairCheck c;
        c.x = x;
        c.y = y;
        const CovarianceReport base = quad.covariance(x, y);
        const CovarianceReport scaled = quad.covariance(Vector(scale * x), Vector(scale * y));
        c.base = base.value;
        c.scaled = scaled.value;
        c.expected = factor * base.value;
        c.deviation = std::abs(c.scaled - c.expected);
        c.budget = std::max(tol_rel * std::abs(c.expected),
                            2.0 * (factor * base.error_estimate + scaled.error_estimate));
        c.flagged = base.flagged || scaled.flagged;
        c.pass = std::isfinite(c.deviation) && c.deviation <= c.budget;
        rep.pass = rep.pass && c.pass;
        rep.pairs.push_back(std::move(c));
    }
    return rep;
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");
    double lo = -40.0;
    double hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (0.5 * std::erfc(-mid / std::numbers::sqrt2) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double ks_coefficient(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ks_coefficient: alpha in (0, 1)");
    return std::sqrt(-std::log(alpha / 2.0) / 2.0);
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const auto na = static_cast<double>(a.size());
    const auto nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

StationarityReport stationarity_test(const Synthesizer& synth, const std::vector<int>& lag,
                                     const std::vector<std::vector<int>>& base_points,
                                     std::size_t n_per_base, std::uint64_t seed, double alpha) {
    const GridSpec& grid = synth.grid();
    if (lag.size() != static_cast<std::size_t>(grid.dim)) {
        throw std::invalid_argument("stationarity_test: lag has the wrong dimension");
    }
    if (base_points.size() < 2) throw std::invalid_argument("stationarity_test: need >= 2 base points");
    if (n_per_base < 1000) {
        throw std::invalid_argument("stationarity_test: need at least 1000 samples per base point");
    }
    std::vector<std::vector<int>> shifted;
    for (const auto& b : base_points) {
        if (b.size() != lag.size()) throw std::invalid_argument("stationarity_test: base point dimension");
        std::vector<int> s(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) {
            s[i] = b[i] + lag[i];
            if (b[i] < 0 || b[i] >= grid.n || s[i] < 0 || s[i] >= grid.n) {
                throw std::out_of_range("stationarity_test: insufficient overlap, x or x + h leaves the grid");
            }
        }
        shifted.push_back(std::move(s));
    }

    const std::size_t B = base_points.size();
    std::vector<std::vector<double>> inc(B, std::vector<double>(n_per_base));
    parallel_for(B * n_per_base, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            const std::size_t b = r / n_per_base;
            const FieldRealization field = synth.generate(mix_seed(seed, r));
            inc[b][r % n_per_base] = field.at(shifted[b]) - field.at(base_points[b]);
        }
    });

    StationarityReport rep;
    rep.lag = lag;
    Vector h(grid.dim);
    for (int i = 0; i < grid.dim; ++i) h(i) = lag[static_cast<std::size_t>(i)] * grid.spacing();
    rep.model_variance = synth.model_variogram(h);
    const auto n = static_cast<double>(n_per_base);
    double pooled = 0.0;
    for (std::size_t b = 0; b < B; ++b) {
        IncrementSample s;
        s.base = base_points[b];
        s.count = n_per_base;
        s.mean = std::accumulate(inc[b].begin(), inc[b].end(), 0.0) / n;
        double ss = 0.0;
        for (double v : inc[b]) ss += (v - s.mean) * (v - s.mean);
        s.variance = ss / (n - 1.0);
        pooled += s.variance;
        rep.samples.push_back(std::move(s));
    }
    rep.pooled_variance = pooled / static_cast<double>(B);

    const std::size_t pair_count = B * (B - 1) / 2;
    rep.mean_z_critical = normal_quantile(1.0 - alpha / (2.0 * static_cast<double>(B)));
    rep.variance_z_critical = normal_quantile(1.0 - alpha / (2.0 * static_cast<double>(pair_count)));
    rep.ks_critical = ks_coefficient(alpha) * std::sqrt(2.0 / n);

    for (const auto& s : rep.samples) {
        const double se = std::sqrt(s.variance / n);
        const double z = se > 0.0 ? std::abs(s.mean) / se : (s.mean == 0.0 ? 0.0 : INFINITY);
        rep.max_mean_z = std::max(rep.max_mean_z, z);
    }
    for (std::size_t i = 0; i < B; ++i) {
        for (std::size_t j = i + 1; j < B; ++j) {
            const double vi = rep.samples[i].variance;
            const double vj = rep.samples[j].variance;
            double z = 0.0;
            if (vi > 0.0 && vj > 0.0) {
                z = std::abs(std::log(vi / vj)) / std::sqrt(4.0 / (n - 1.0));
            } else if (vi != vj) {
                z = INFINITY;
            }
            rep.max_log_variance_z = std::max(rep.max_log_variance_z, z);
            rep.max_ks = std::max(rep.max_ks, ks_statistic(inc[i], inc[j]));
        }
    }
    rep.pass = rep.max_mean_z <= rep.mean_z_critical &&
               rep.max_log_variance_z <= rep.variance_z_critical && rep.max_ks <= rep.ks_critical;
    return rep;
}

std::vector<VariogramRow> empirical_variogram(const std::vector<FieldRealization>& realizations,
                                              const std::vector<std::vector<int>>& lags) {
    if (realizations.empty()) throw std::invalid_argument("empirical_variogram: no realizations");
    if (lags.empty()) throw std::invalid_argument("empirical_variogram: no lags");
    const GridSpec& grid = realizations.front().grid;
    for (const auto& r : realizations) {
        if (r.grid.dim != grid.dim || r.grid.n != grid.n || r.grid.extent != grid.extent) {
            throw std::invalid_argument("empirical_variogram: realizations must share one grid");
        }
    }
    std::vector<VariogramRow> rows;
    for (const auto& lag : lags) {
        VariogramRow row;
        row.lag = lag;
        double sq = 0.0;
        for (int v : lag) sq += static_cast<double>(v) * v;
        row.distance = std::sqrt(sq) * grid.spacing();
        double total = 0.0;
        for (const auto& r : realizations) {
            for (double v : increment_field(r, lag)) total += v * v;
            row.count += [&] {
                std::size_t c = 1;
                for (int v : lag) c *= static_cast<std::size_t>(grid.n - std::abs(v));
                return c;
            }();
        }
        row.value = total / static_cast<double>(row.count);
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const VariogramRow& a, const VariogramRow& b) { return a.distance < b.distance; });
    return rows;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("loglog_slope: need two equally long series of length >= 2");
    }
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::domain_error("loglog_slope: values must be positive");
        sx += std::log(x[i]);
        sy += std::log(y[i]);
    }
    const double mx = sx / static_cast<double>(x.size());
    const double my = sy / static_cast<double>(x.size());
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y[i]) - my);
    }
    return sxy / sxx;
}

FieldSummary summarize(const FieldRealization& r) {
    FieldSummary s;
    const auto n = static_cast<double>(r.values.size());
    s.mean = std::accumulate(r.values.begin(), r.values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : r.values) ss += (v - s.mean) * (v - s.mean);
    s.variance = ss / n;
    const auto [lo, hi] = std::minmax_element(r.values.begin(), r.values.end());
    s.min = *lo;
    s.max = *hi;
    std::vector<std::vector<int>> lags;
    for (int axis = 0; axis < r.grid.dim; ++axis) {
        for (int step : {1, 2, 4, 8}) {
            if (step >= r.grid.n) continue;
            std::vector<int> lag(static_cast<std::size_t>(r.grid.dim), 0);
            lag[static_cast<std::size_t>(axis)] = step;
            lags.push_back(lag);
        }
    }
    s.axis_variogram = empirical_variogram({r}, lags);
    return s;
}

}  // namespace osgrf
