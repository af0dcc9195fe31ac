#include "osgrf/report.hpp"

namespace osgrf {

Json vector_to_json(const Vector& v) { return std::vector<double>(v.begin(), v.end()); }

Json to_json(const CovarianceReport& r) {
    return {{"value", r.value}, {"error_estimate", r.error_estimate}, {"nodes_used", r.nodes_used},
            {"flagged", r.flagged}};
}

Json to_json(const HomogeneityReport& r) {
    return {{"samples", r.samples},
            {"max_relative_error", r.max_relative_error},
            {"worst_point", vector_to_json(r.worst_point)},
            {"worst_scale", r.worst_scale}};
}

Json to_json(const PositivityReport& r) {
    Json j = {{"positive", r.positive},
              {"origin_zero", r.origin_zero},
              {"min_on_sphere", r.min_on_sphere},
              {"median_on_sphere", r.median_on_sphere}};
    j["witness"] = r.witness ? vector_to_json(*r.witness) : Json(nullptr);
    return j;
}

Json to_json(const IntegrabilityReport& r) {
    return {{"converged", r.converged},
            {"shell_index", r.shell_index},
            {"shell_sums", r.shell_sums},
            {"outer_ratio", r.ratio},
            {"inner_ratio", r.inner_ratio},
            {"expected_outer_ratio", r.expected_outer_ratio}};
}

Json to_json(const ScalingReport& r) {
    Json points = Json::array();
    for (const ScalingPoint& p : r.points) {
        points.push_back({{"x", vector_to_json(p.x)},
                          {"image", vector_to_json(p.image)},
                          {"var_x", p.var_x},
                          {"var_image", p.var_image},
                          {"ratio", p.ratio},
                          {"standard_error", p.standard_error},
                          {"truncation_bias", p.truncation_bias},
                          {"deviation", p.deviation},
                          {"budget", p.budget},
                          {"pass", p.pass}});
    }
    return {{"a", r.a},
            {"hurst_tested", r.hurst_tested},
            {"expected", r.expected},
            {"n_realizations", r.n_realizations},
            {"points", points},
            {"pass", r.pass}};
}

Json to_json(const CovarianceScalingReport& r) {
    Json pairs = Json::array();
    for (const CovariancePairCheck& c : r.pairs) {
        pairs.push_back({{"x", vector_to_json(c.x)},
                         {"y", vector_to_json(c.y)},
                         {"base", c.base},
                         {"scaled", c.scaled},
                         {"expected", c.expected},
                         {"deviation", c.deviation},
                         {"budget", c.budget},
                         {"flagged", c.flagged},
                         {"pass", c.pass}});
    }
    return {{"a", r.a}, {"pairs", pairs}, {"pass", r.pass}};
}

Json to_json(const StationarityReport& r) {
    Json samples = Json::array();
    for (const IncrementSample& s : r.samples) {
        samples.push_back({{"base", s.base}, {"mean", s.mean}, {"variance", s.variance}, {"count", s.count}});
    }
    return {{"lag", r.lag},
            {"samples", samples},
            {"pooled_variance", r.pooled_variance},
            {"model_variance", r.model_variance},
            {"max_mean_z", r.max_mean_z},
            {"mean_z_critical", r.mean_z_critical},
            {"max_log_variance_z", r.max_log_variance_z},
            {"variance_z_critical", r.variance_z_critical},
            {"max_ks", r.max_ks},
            {"ks_critical", r.ks_critical},
            {"pass", r.pass}};
}

Json to_json(const std::vector<VariogramRow>& rows) {
    Json out = Json::array();
    for (const VariogramRow& row : rows) {
        out.push_back({{"lag", row.lag}, {"distance", row.distance}, {"count", row.count}, {"v", row.value}});
    }
    return out;
}

Json to_json(const FieldSummary& s) {
    return {{"mean", s.mean},
            {"variance", s.variance},
            {"min", s.min},
            {"max", s.max},
            {"axis_variogram", to_json(s.axis_variogram)}};
}

std::string variogram_csv(const std::vector<VariogramRow>& rows) {
    const std::size_t dim = rows.empty() ? 2 : std::max<std::size_t>(2, rows.front().lag.size());
    std::string out = dim == 3 ? "hx,hy,hz,count,v\n" : "hx,hy,count,v\n";
    for (const VariogramRow& row : rows) {
        for (std::size_t i = 0; i < dim; ++i) out += std::to_string(i < row.lag.size() ? row.lag[i] : 0) + ",";
        out += std::to_string(row.count) + "," + format_number(row.value) + "\n";
    }
    return out;
}

}  // namespace osgrf
