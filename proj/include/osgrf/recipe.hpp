#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "osgrf/linalg.hpp"
#include "osgrf/pseudonorm.hpp"
#include "osgrf/spectral.hpp"

namespace osgrf {

using Json = nlohmann::json;

/// A recipe that is well-formed JSON but violates a schema rule or a model
/// invariant. The message names the offending field.
class RecipeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed JSON text.
class RecipeParseError : public RecipeError {
public:
    RecipeParseError(const std::string& what, std::size_t byte)
        : RecipeError(what), byte_(byte) {}
    [[nodiscard]] std::size_t byte() const { return byte_; }

private:
    std::size_t byte_;
};

/// Parses JSON text; RecipeParseError carries the zero-based byte offset of the fault.
Json parse_json(const std::string& text);
Json load_json_file(const std::filesystem::path& path);

Matrix matrix_from_json(const Json& j, const char* field);
Json matrix_to_json(const Matrix& m);

/// {"P": [[...]], "blocks": [{"kind": "scalar_diag", "size": n, "lambda": x}, ...]}
JordanSpec jordan_from_json(const Json& j);
Json jordan_to_json(const JordanSpec& spec);

/// Pseudo-norm recipes, by "kind":
///   euclidean        {"dim"}
///   generic1|2       {"lambda", "dim"}
///   generic3|4       {"alpha", "beta", "dim"}
///   assembled        {"P", "blocks": [recipe...], "p": number | "inf"}
///   jordan           {"P", "blocks": [jordan block...], "p"}  canonical norm
///   transferred      {"base": recipe, "g": {"kind": "constant"|"expr"|"table", ...}}
///   phase_ratio      {"alpha", "beta", "unverified": true}
/// An optional "homogeneity" matrix must match the constructed one.
PseudoNorm pseudonorm_from_json(const Json& j);

/// Inverse of pseudonorm_from_json for every kind except custom evaluators
/// and closure sphere functions.
Json pseudonorm_to_json(const PseudoNorm& rho);

/// {"pseudonorm": recipe, "H": x, "E": matrix?}; or {"E": matrix, "H": x}
/// alone, which uses the canonical pseudo-norm of E's real Jordan form.
/// InadmissibleHurst propagates unchanged; `hurst_override` replaces "H".
SpectralDensity density_from_json(const Json& j, std::optional<double> hurst_override = std::nullopt);
Json density_to_json(const SpectralDensity& f);

}  // namespace osgrf
