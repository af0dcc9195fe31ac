#pragma once

#include <string>
#include <vector>

#include "osgrf/analysis.hpp"
#include "osgrf/pseudonorm.hpp"
#include "osgrf/recipe.hpp"
#include "osgrf/spectral.hpp"

namespace osgrf {

Json vector_to_json(const Vector& v);

Json to_json(const CovarianceReport& r);
Json to_json(const HomogeneityReport& r);
Json to_json(const PositivityReport& r);
Json to_json(const IntegrabilityReport& r);
Json to_json(const ScalingReport& r);
Json to_json(const CovarianceScalingReport& r);
Json to_json(const StationarityReport& r);
Json to_json(const FieldSummary& s);
Json to_json(const std::vector<VariogramRow>& rows);

/// Columns hx, hy (and hz for d = 3), count, v; lag components in grid steps.
std::string variogram_csv(const std::vector<VariogramRow>& rows);

}  // namespace osgrf
