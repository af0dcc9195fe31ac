// osgrf command-line front end.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or recipe error,
// 3 inadmissible Hurst index.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "osgrf/analysis.hpp"
#include "osgrf/field_io.hpp"
#include "osgrf/pseudonorm.hpp"
#include "osgrf/recipe.hpp"
#include "osgrf/report.hpp"
#include "osgrf/spectral.hpp"
#include "osgrf/synthesis.hpp"

namespace fs = std::filesystem;
using namespace osgrf;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;
constexpr int kInadmissible = 3;

struct Options {
    std::string recipe;
    std::string out;
    std::string input;
    std::string format = "bin";
    std::string suite = "all";
    std::uint64_t seed = 0;
    int grid_n = 256;
    double grid_extent = 1.0;
    int freq_cutoff = 512;
    double scale = 2.0;
    std::optional<double> hurst;
    double tol = -1.0;  // < 0: per-suite default
    int resolution = 360;
    double level = 1.0;
    std::size_t realizations = 500;
    std::size_t samples = 10000;
    std::vector<std::string> points;
    std::string points_file;
    std::string variogram_out;
};

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
    } else {
        write_file_atomic(path, text);
    }
}

Vector parse_point(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0) throw std::invalid_argument("bad coordinate \"" + item + "\" in point \"" + text + "\"");
        values.push_back(v);
    }
    if (values.empty()) throw std::invalid_argument("empty point");
    return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

GridSpec grid_from(const Options& o, int dim) {
    GridSpec g;
    g.dim = dim;
    g.n = o.grid_n;
    g.extent = o.grid_extent;
    g.validate();
    return g;
}

SynthesisParams params_from(const Options& o) {
    SynthesisParams p;
    p.freq_cutoff = o.freq_cutoff;
    p.seed = o.seed;
    p.validate();
    return p;
}

double tol_or(const Options& o, double fallback) { return o.tol >= 0.0 ? o.tol : fallback; }

// A recipe is either a density ({"H", ...}) or a bare pseudo-norm ({"kind", ...}).
struct Loaded {
    Json json;
    std::optional<PseudoNorm> rho;
    std::optional<SpectralDensity> density;
};

Loaded load(const Options& o, bool need_density) {
    if (o.recipe.empty()) throw RecipeError("--recipe is required");
    Loaded l;
    l.json = load_json_file(o.recipe);
    if (l.json.is_object() && l.json.contains("kind")) {
        if (need_density) throw RecipeError("recipe: a density recipe (with \"H\") is required here");
        l.rho = pseudonorm_from_json(l.json);
    } else {
        l.density = density_from_json(l.json, o.hurst);
        l.rho = l.density->rho();
    }
    return l;
}

std::vector<std::pair<Vector, Vector>> default_pairs(int dim, std::uint64_t seed) {
    std::vector<std::pair<Vector, Vector>> pairs;
    if (dim == 2) pairs.emplace_back(Vector{{0.3, 0.0}}, Vector{{0.0, 0.2}});
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    while (pairs.size() < 5) {
        Vector x(dim);
        Vector y(dim);
        for (int i = 0; i < dim; ++i) x(i) = u(gen);
        for (int i = 0; i < dim; ++i) y(i) = u(gen);
        pairs.emplace_back(x, y);
    }
    return pairs;
}

std::vector<Vector> default_scaling_points(int dim, double extent) {
    std::vector<Vector> pts;
    for (double s : {0.1, 0.2, 0.3}) pts.emplace_back(Vector::Constant(dim, s * extent));
    return pts;
}

struct SuiteResult {
    Json report;
    bool pass = true;
};

const std::vector<std::string> kNormSuites = {"homogeneity", "positivity", "quasi-triangle"};
const std::vector<std::string> kDensitySuites = {"integrability", "covariance-scaling", "field-scaling",
                                                 "stationarity", "statistics"};

SuiteResult run_suite(const std::string& name, const Loaded& l, const Options& o) {
    SuiteResult r;
    const PseudoNorm& rho = *l.rho;
    if (name == "homogeneity") {
        const HomogeneityReport h = check_homogeneity(rho, o.samples, o.seed);
        const double tol = tol_or(o, 1e-9);
        r.report = to_json(h);
        r.report["tolerance"] = tol;
        r.pass = h.max_relative_error <= tol;
    } else if (name == "positivity") {
        const PositivityReport p = check_positivity(rho, o.samples, o.seed);
        r.report = to_json(p);
        r.pass = p.positive && p.origin_zero;
    } else if (name == "quasi-triangle") {
        const double c = quasi_triangle_constant(rho, o.samples, o.seed);
        r.report = {{"constant_lower_bound", c}};
        r.pass = std::isfinite(c);
    } else {
        if (!l.density) throw RecipeError("suite \"" + name + "\" needs a density recipe");
        const SpectralDensity& f = *l.density;
        if (name == "integrability") {
            const IntegrabilityReport ir = integrability_check(f, 8);
            r.report = to_json(ir);
            r.pass = ir.converged;
        } else if (name == "covariance-scaling") {
            const CovarianceQuadrature quad(f);
            const CovarianceScalingReport cs =
                covariance_scaling_check(quad, o.scale, default_pairs(f.dim(), o.seed), tol_or(o, 1e-2));
            r.report = to_json(cs);
            r.pass = cs.pass;
        } else if (name == "field-scaling") {
            const Synthesizer synth(f, grid_from(o, f.dim()), params_from(o));
            const ScalingReport sr = scaling_test(synth, o.scale, default_scaling_points(f.dim(), o.grid_extent),
                                                  o.realizations, o.seed, tol_or(o, 0.15));
            r.report = to_json(sr);
            r.pass = sr.pass;
        } else if (name == "stationarity") {
            const Synthesizer synth(f, grid_from(o, f.dim()), params_from(o));
            const int n = o.grid_n;
            std::vector<std::vector<int>> bases;
            for (int frac : {8, 4, 2}) bases.emplace_back(static_cast<std::size_t>(f.dim()), n / frac);
            std::vector<int> lag(static_cast<std::size_t>(f.dim()), 0);
            lag[0] = std::max(1, n / 16);
            const StationarityReport st =
                stationarity_test(synth, lag, bases, std::max<std::size_t>(1000, o.realizations), o.seed,
                                  tol_or(o, 0.01));
            r.report = to_json(st);
            r.pass = st.pass;
        } else if (name == "statistics") {
            if (o.input.empty()) throw RecipeError("suite \"statistics\" needs --input");
            const FieldRealization file = decode_binary(read_file(o.input), o.grid_extent);
            const FieldSummary from_file = summarize(file);
            Options regen = o;
            regen.grid_n = file.grid.n;
            const fs::path sidecar = o.input + ".json";
            if (fs::exists(sidecar)) {
                const Json side = load_json_file(sidecar);
                regen.seed = side.at("seed").get<std::uint64_t>();
                regen.freq_cutoff = side.at("params").at("freq_cutoff").get<int>();
                regen.grid_extent = side.at("params").at("grid_extent").get<double>();
            }
            const Synthesizer synth(f, grid_from(regen, file.grid.dim), params_from(regen));
            const FieldRealization fresh = synth.generate(regen.seed);
            const FieldSummary in_process = summarize(fresh);
            const bool identical = fresh.values == file.values;
            r.report = {{"file", to_json(from_file)}, {"in_process", to_json(in_process)},
                        {"identical", identical}, {"seed", regen.seed}};
            r.pass = identical;
            if (!o.variogram_out.empty()) write_file_atomic(o.variogram_out, variogram_csv(from_file.axis_variogram));
        } else {
            throw CLI::ValidationError("--suite", "unknown suite \"" + name + "\"");
        }
    }
    r.report["pass"] = r.pass;
    return r;
}

int run_suites(const Options& o, bool pseudonorm_only) {
    std::vector<std::string> names;
    if (o.suite == "all") {
        names = kNormSuites;
        if (!pseudonorm_only) names.insert(names.end(), {"integrability", "covariance-scaling", "field-scaling"});
    } else {
        names.push_back(o.suite);
    }
    for (const std::string& n : names) {
        const bool known = std::find(kNormSuites.begin(), kNormSuites.end(), n) != kNormSuites.end() ||
                           (!pseudonorm_only &&
                            std::find(kDensitySuites.begin(), kDensitySuites.end(), n) != kDensitySuites.end());
        if (!known) throw CLI::ValidationError("--suite", "unknown suite \"" + n + "\"");
    }
    Loaded l = load(o, false);
    if (o.suite == "all" && !l.density) names = kNormSuites;
    Json report = Json::object();
    bool pass = true;
    for (const std::string& n : names) {
        SuiteResult s = run_suite(n, l, o);
        pass = pass && s.pass;
        report["checks"][n] = std::move(s.report);
    }
    report["pass"] = pass;
    emit(report.dump(2) + "\n", o.out);
    return pass ? kOk : kFailed;
}

int cmd_eval(const Options& o) {
    const PseudoNorm rho = load(o, false).rho.value();
    std::vector<Vector> pts;
    for (const std::string& p : o.points) pts.push_back(parse_point(p));
    if (!o.points_file.empty()) {
        std::istringstream in(read_file(o.points_file));
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) pts.push_back(parse_point(line));
        }
    }
    if (pts.empty()) throw CLI::ValidationError("--point", "no points given");
    std::string out;
    for (const Vector& p : pts) {
        if (p.size() != rho.dim()) {
            throw CLI::ValidationError("--point", "point dimension " + std::to_string(p.size()) +
                                                      " does not match the recipe dimension " +
                                                      std::to_string(rho.dim()));
        }
        for (Eigen::Index i = 0; i < p.size(); ++i) out += format_number(p(i)) + ",";
        out += format_number(rho(p)) + "\n";
    }
    emit(out, o.out);
    return kOk;
}

int cmd_levelset(const Options& o) {
    const PseudoNorm rho = load(o, false).rho.value();
    if (rho.dim() != 2) throw RecipeError("levelset needs a two-dimensional pseudo-norm");
    if (!(o.level > 0.0)) throw CLI::ValidationError("--level", "level must be positive");
    if (o.resolution < 1) throw CLI::ValidationError("--resolution", "resolution must be positive");
    const std::vector<LevelSetPoint> pts = level_set(rho, o.level, o.resolution);
    std::string out = "theta,x,y,status\n";
    bool degenerate = false;
    for (const LevelSetPoint& p : pts) {
        degenerate = degenerate || p.degenerate;
        out += format_number(p.theta) + "," + format_number(p.x) + "," + format_number(p.y) + "," +
               (p.degenerate ? "degenerate" : "ok") + "\n";
    }
    emit(out, o.out);
    if (degenerate) std::cerr << "osgrf: level set is degenerate on some rays (rho does not reach the level)\n";
    return degenerate ? kFailed : kOk;
}

int cmd_density_check(const Options& o) {
    const Loaded l = load(o, true);
    const SpectralDensity& f = *l.density;
    const IntegrabilityReport ir = integrability_check(f, 8);
    Json report = {{"H", f.hurst()},
                   {"lambda_min", f.E().lambda_min()},
                   {"trace_E", f.trace_E()},
                   {"admissible", true},
                   {"integrability", to_json(ir)},
                   {"pass", ir.converged}};
    emit(report.dump(2) + "\n", o.out);
    return ir.converged ? kOk : kFailed;
}

int cmd_generate(const Options& o) {
    if (o.out.empty()) throw CLI::ValidationError("--out", "an output path is required");
    const FieldFormat format = field_format_from_string(o.format);
    const Loaded l = load(o, true);
    const SpectralDensity& f = *l.density;
    const Synthesizer synth(f, grid_from(o, f.dim()), params_from(o));
    const FieldRealization r = synth.generate(o.seed);
    for (const std::string& w : synth.warnings()) std::cerr << "osgrf: warning: " << w << "\n";

    Json side = {{"seed", o.seed},
                 {"format", o.format},
                 {"params",
                  {{"dim", r.grid.dim},
                   {"grid_n", r.grid.n},
                   {"grid_extent", r.grid.extent},
                   {"freq_cutoff", synth.params().freq_cutoff},
                   {"freq_step", synth.freq_step()},
                   {"refinement_levels", synth.params().refinement_levels},
                   {"fft", synth.aligned()}}},
                 {"density", density_to_json(f)},
                 {"imag_residue", r.imag_residue}};
    switch (format) {
        case FieldFormat::Binary: write_file_atomic(o.out, encode_binary(r)); break;
        case FieldFormat::Csv: write_file_atomic(o.out, encode_csv(r)); break;
        case FieldFormat::Pgm: {
            const PgmImage img = encode_pgm(r);
            write_file_atomic(o.out, img.bytes);
            side["min"] = img.min;
            side["max"] = img.max;
            break;
        }
    }
    if (!side.contains("min")) {
        const auto [lo, hi] = std::minmax_element(r.values.begin(), r.values.end());
        side["min"] = *lo;
        side["max"] = *hi;
    }
    write_file_atomic(o.out + ".json", side.dump(2) + "\n");
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Operator scaling Gaussian random fields"};
    app.require_subcommand(1);
    Options o;

    auto recipe = [&](CLI::App* c) { c->add_option("--recipe", o.recipe, "Recipe JSON file")->required(); };
    auto out = [&](CLI::App* c) { c->add_option("--out", o.out, "Output path (default stdout)"); };
    auto hurst = [&](CLI::App* c) { c->add_option("--hurst", o.hurst, "Override the recipe's H"); };
    auto seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "Random seed"); };
    auto grid = [&](CLI::App* c) {
        c->add_option("--grid-n", o.grid_n, "Grid points per axis (power of two)");
        c->add_option("--grid-extent", o.grid_extent, "Physical side length L");
        c->add_option("--freq-cutoff", o.freq_cutoff, "Frequency lattice half-width K");
    };
    auto suites = [&](CLI::App* c) {
        c->add_option("--suite", o.suite, "Check to run, or all");
        c->add_option("--tol", o.tol, "Tolerance for the selected suite");
        c->add_option("--samples", o.samples, "Random samples for pseudo-norm checks");
    };

    CLI::App* pn = app.add_subcommand("pseudonorm", "Pseudo-norm evaluation and checks");
    pn->require_subcommand(1);
    CLI::App* eval = pn->add_subcommand("eval", "Evaluate rho at points, CSV x1,...,xd,rho");
    recipe(eval);
    out(eval);
    eval->add_option("--point", o.points, "Comma-separated coordinates (repeatable)");
    eval->add_option("--points", o.points_file, "File with one comma-separated point per line");
    CLI::App* check = pn->add_subcommand("check", "Homogeneity, positivity and quasi-triangle checks");
    recipe(check);
    out(check);
    seed(check);
    suites(check);
    CLI::App* levelset = pn->add_subcommand("levelset", "Trace {rho = level} in d = 2 as CSV");
    recipe(levelset);
    out(levelset);
    levelset->add_option("--level", o.level, "Level c > 0");
    levelset->add_option("--resolution", o.resolution, "Number of rays");

    CLI::App* density = app.add_subcommand("density", "Spectral density checks");
    density->require_subcommand(1);
    CLI::App* dcheck = density->add_subcommand("check", "Admissibility and integrability");
    recipe(dcheck);
    out(dcheck);
    hurst(dcheck);

    CLI::App* field = app.add_subcommand("field", "Field synthesis and verification");
    field->require_subcommand(1);
    CLI::App* gen = field->add_subcommand("generate", "Synthesize one realization");
    recipe(gen);
    gen->add_option("--out", o.out, "Output file; a sidecar <out>.json is written next to it")->required();
    gen->add_option("--format", o.format, "bin, csv or pgm");
    hurst(gen);
    seed(gen);
    grid(gen);
    CLI::App* verify = field->add_subcommand("verify", "Run verification suites and write a JSON report");
    recipe(verify);
    out(verify);
    hurst(verify);
    seed(verify);
    grid(verify);
    suites(verify);
    verify->add_option("--scale", o.scale, "Scale factor a");
    verify->add_option("--realizations", o.realizations, "Monte Carlo realizations");
    verify->add_option("--input", o.input, "Binary field file for the statistics suite");
    verify->add_option("--variogram-out", o.variogram_out, "CSV of the input's axis variogram");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (eval->parsed()) return cmd_eval(o);
        if (check->parsed()) return run_suites(o, true);
        if (levelset->parsed()) return cmd_levelset(o);
        if (dcheck->parsed()) return cmd_density_check(o);
        if (gen->parsed()) return cmd_generate(o);
        if (verify->parsed()) return run_suites(o, false);
    } catch (const InadmissibleHurst& e) {
        std::cerr << "osgrf: " << e.what() << "\n";
        return kInadmissible;
    } catch (const CLI::Error& e) {
        std::cerr << "osgrf: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "osgrf: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
