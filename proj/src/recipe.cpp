#include "osgrf/recipe.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace osgrf {

namespace {

const Json& require(const Json& j, const char* field) {
    if (!j.is_object()) throw RecipeError("recipe: expected a JSON object");
    const auto it = j.find(field);
    if (it == j.end()) throw RecipeError(std::string("recipe: missing field \"") + field + "\"");
    return *it;
}

double number(const Json& j, const char* field) {
    const Json& v = require(j, field);
    if (!v.is_number()) throw RecipeError(std::string("recipe: \"") + field + "\" must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw RecipeError(std::string("recipe: \"") + field + "\" must be finite");
    return x;
}

int integer(const Json& j, const char* field) {
    const Json& v = require(j, field);
    if (!v.is_number_integer()) throw RecipeError(std::string("recipe: \"") + field + "\" must be an integer");
    return v.get<int>();
}

int dimension(const Json& j, int fallback) {
    if (!j.contains("dim")) return fallback;
    const int d = integer(j, "dim");
    if (d < 1 || d > kMaxDim) throw RecipeError("recipe: \"dim\" must lie in [1, 16]");
    return d;
}

double combiner(const Json& j) {
    if (!j.contains("p")) return 2.0;
    const Json& p = j.at("p");
    if (p.is_string() && p.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    if (!p.is_number()) throw RecipeError("recipe: \"p\" must be a number or \"inf\"");
    const double v = p.get<double>();
    if (!(v >= 1.0)) throw RecipeError("recipe: combiner \"p\" must be >= 1");
    return v;
}

Json combiner_to_json(double p) {
    if (std::isinf(p)) return "inf";
    return p;
}

std::string kind_of(const Json& j) {
    const Json& k = require(j, "kind");
    if (!k.is_string()) throw RecipeError("recipe: \"kind\" must be a string");
    return k.get<std::string>();
}

template <class Fn>
auto wrap(Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const RecipeError&) {
        throw;
    } catch (const InadmissibleHurst&) {
        throw;
    } catch (const DefectiveMatrix& e) {
        throw RecipeError(std::string("recipe: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw RecipeError(std::string("recipe: ") + e.what());
    } catch (const std::domain_error& e) {
        throw RecipeError(std::string("recipe: ") + e.what());
    } catch (const Json::exception& e) {
        throw RecipeError(std::string("recipe: ") + e.what());
    }
}

SphereFunction sphere_function_from_json(const Json& g) {
    const std::string kind = kind_of(g);
    if (kind == "constant") return SphereFunction::constant(number(g, "value"));
    if (kind == "expr") {
        const Json& text = require(g, "text");
        if (!text.is_string()) throw RecipeError("recipe: g.text must be a string");
        return SphereFunction::expression(text.get<std::string>());
    }
    if (kind == "table") {
        const Matrix pts = matrix_from_json(require(g, "points"), "g.points");
        const Json& vals = require(g, "values");
        if (!vals.is_array()) throw RecipeError("recipe: g.values must be an array");
        std::vector<Vector> points;
        for (Eigen::Index r = 0; r < pts.rows(); ++r) points.emplace_back(pts.row(r).transpose());
        std::vector<double> values;
        for (const Json& v : vals) {
            if (!v.is_number()) throw RecipeError("recipe: g.values must hold numbers");
            values.push_back(v.get<double>());
        }
        return SphereFunction::table(std::move(points), std::move(values));
    }
    throw RecipeError("recipe: unknown g kind \"" + kind + "\"");
}

Json sphere_function_to_json(const SphereFunction& g) {
    switch (g.kind()) {
        case SphereFunction::Kind::Constant: return {{"kind", "constant"}, {"value", g.constant_value()}};
        case SphereFunction::Kind::Expression: return {{"kind", "expr"}, {"text", g.description()}};
        case SphereFunction::Kind::Table: {
            Json points = Json::array();
            for (const Vector& p : g.table_points()) points.push_back(std::vector<double>(p.begin(), p.end()));
            return {{"kind", "table"}, {"points", points}, {"values", g.table_values()}};
        }
        case SphereFunction::Kind::Closure: break;
    }
    throw std::invalid_argument("sphere function closures cannot be serialized");
}

PseudoNorm build(const Json& j) {
    const std::string kind = kind_of(j);
    if (kind == "euclidean") return PseudoNorm::euclidean(dimension(j, 2));
    if (kind == "generic1") return PseudoNorm::generic1(number(j, "lambda"), dimension(j, 1));
    if (kind == "generic2") return PseudoNorm::generic2(number(j, "lambda"), dimension(j, 2));
    if (kind == "generic3") return PseudoNorm::generic3(number(j, "alpha"), number(j, "beta"), dimension(j, 2));
    if (kind == "generic4") return PseudoNorm::generic4(number(j, "alpha"), number(j, "beta"), dimension(j, 4));
    if (kind == "assembled") {
        const Matrix P = matrix_from_json(require(j, "P"), "P");
        const Json& blocks = require(j, "blocks");
        if (!blocks.is_array() || blocks.empty()) throw RecipeError("recipe: \"blocks\" must be a non-empty array");
        std::vector<PseudoNorm> norms;
        for (const Json& b : blocks) norms.push_back(pseudonorm_from_json(b));
        return assemble(P, std::move(norms), combiner(j));
    }
    if (kind == "jordan") return canonical_pseudonorm(jordan_from_json(j), combiner(j));
    if (kind == "transferred") {
        return transfer(pseudonorm_from_json(require(j, "base")), sphere_function_from_json(require(j, "g")));
    }
    if (kind == "phase_ratio") {
        const auto it = j.find("unverified");
        if (it == j.end() || !it->is_boolean() || !it->get<bool>()) {
            throw RecipeError("recipe: phase_ratio is not a valid pseudo-norm; set \"unverified\": true to use it");
        }
        return PseudoNorm::phase_ratio(number(j, "alpha"), number(j, "beta"));
    }
    throw RecipeError("recipe: unknown pseudo-norm kind \"" + kind + "\"");
}

}  // namespace

Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        // nlohmann counts bytes read; report the zero-based offset of the offending one.
        const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
        throw RecipeParseError("malformed JSON at byte " + std::to_string(offset) + ": " + e.what(), offset);
    }
}

Json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RecipeError("cannot read recipe file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_json(ss.str());
}

Matrix matrix_from_json(const Json& j, const char* field) {
    if (!j.is_array() || j.empty()) throw RecipeError(std::string("recipe: \"") + field + "\" must be an array of rows");
    const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
    if (cols == 0) throw RecipeError(std::string("recipe: \"") + field + "\" rows must be non-empty arrays");
    Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols) {
            throw RecipeError(std::string("recipe: \"") + field + "\" rows must have equal length");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[r][c].is_number()) throw RecipeError(std::string("recipe: \"") + field + "\" entries must be numbers");
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
        }
    }
    return m;
}

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

JordanSpec jordan_from_json(const Json& j) {
    return wrap([&] {
        JordanSpec spec;
        spec.P = matrix_from_json(require(j, "P"), "P");
        const Json& blocks = require(j, "blocks");
        if (!blocks.is_array()) throw RecipeError("recipe: \"blocks\" must be an array");
        for (const Json& b : blocks) {
            GenericBlock block;
            block.kind = block_kind_from_string(kind_of(b));
            block.size = integer(b, "size");
            if (block.kind == BlockKind::ScalarDiag || block.kind == BlockKind::ScalarJordan) {
                block.lambda = number(b, "lambda");
            } else {
                block.alpha = number(b, "alpha");
                block.beta = number(b, "beta");
            }
            spec.blocks.push_back(block);
        }
        spec.validate();
        return spec;
    });
}

Json jordan_to_json(const JordanSpec& spec) {
    Json blocks = Json::array();
    for (const GenericBlock& b : spec.blocks) {
        Json jb = {{"kind", to_string(b.kind)}, {"size", b.size}};
        if (b.kind == BlockKind::ScalarDiag || b.kind == BlockKind::ScalarJordan) {
            jb["lambda"] = b.lambda;
        } else {
            jb["alpha"] = b.alpha;
            jb["beta"] = b.beta;
        }
        blocks.push_back(std::move(jb));
    }
    return {{"P", matrix_to_json(spec.P)}, {"blocks", blocks}};
}

PseudoNorm pseudonorm_from_json(const Json& j) {
    return wrap([&] {
        PseudoNorm rho = build(j);
        if (j.contains("homogeneity")) {
            const Matrix declared = matrix_from_json(j.at("homogeneity"), "homogeneity");
            if (declared.rows() != rho.dim() || declared.cols() != rho.dim() ||
                relative_frobenius_error(declared, rho.homogeneity()) > 1e-9) {
                throw RecipeError("recipe: declared \"homogeneity\" does not match the " +
                                  std::string(to_string(rho.kind())) + " construction");
            }
        }
        return rho;
    });
}

Json pseudonorm_to_json(const PseudoNorm& rho) {
    Json j = {{"kind", to_string(rho.kind())}};
    switch (rho.kind()) {
        case NormKind::Euclidean: j["dim"] = rho.dim(); break;
        case NormKind::Generic1:
        case NormKind::Generic2:
            j["lambda"] = rho.lambda();
            j["dim"] = rho.dim();
            break;
        case NormKind::Generic3:
        case NormKind::Generic4:
            j["alpha"] = rho.alpha();
            j["beta"] = rho.beta();
            j["dim"] = rho.dim();
            break;
        case NormKind::PhaseRatio:
            j["alpha"] = rho.alpha();
            j["beta"] = rho.beta();
            j["unverified"] = true;
            break;
        case NormKind::Assembled: {
            j["P"] = matrix_to_json(rho.change_of_basis());
            Json blocks = Json::array();
            for (const PseudoNorm& b : rho.blocks()) blocks.push_back(pseudonorm_to_json(b));
            j["blocks"] = blocks;
            j["p"] = combiner_to_json(rho.combiner());
            break;
        }
        case NormKind::Transferred:
            j["base"] = pseudonorm_to_json(rho.base());
            j["g"] = sphere_function_to_json(rho.sphere_function());
            break;
        case NormKind::Custom: throw std::invalid_argument("custom pseudo-norms cannot be serialized");
    }
    j["homogeneity"] = matrix_to_json(rho.homogeneity());
    return j;
}

SpectralDensity density_from_json(const Json& j, std::optional<double> hurst_override) {
    return wrap([&] {
        const double H = hurst_override ? *hurst_override : number(j, "H");
        if (j.contains("pseudonorm")) {
            PseudoNorm rho = pseudonorm_from_json(j.at("pseudonorm"));
            if (!j.contains("E")) return SpectralDensity(rho, H);
            AnisotropyMatrix E(matrix_from_json(j.at("E"), "E"));
            if (E.dim() != rho.dim() ||
                relative_frobenius_error(rho.homogeneity(), E.matrix().transpose()) > 1e-9) {
                throw RecipeError("recipe: pseudo-norm homogeneity is not the transpose of \"E\"");
            }
            return SpectralDensity(rho, H, E);
        }
        if (!j.contains("E")) throw RecipeError("recipe: density needs \"pseudonorm\" or \"E\"");
        AnisotropyMatrix E(matrix_from_json(j.at("E"), "E"));
        const JordanSpec spec = jordan_decompose(E);
        return SpectralDensity(canonical_pseudonorm(spec, combiner(j)), H, E);
    });
}

Json density_to_json(const SpectralDensity& f) {
    return {{"pseudonorm", pseudonorm_to_json(f.rho())}, {"H", f.hurst()}, {"E", matrix_to_json(f.E().matrix())}};
}

}  // namespace osgrf
