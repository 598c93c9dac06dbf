#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "orbitlab/dynamics.hpp"

namespace orbitlab {

/// How a known value was obtained.
///  - reference:  stated for this map in the source literature
///  - elementary: immediate from the formula (identities, fixed points)
///  - computed:   derived by an independent argument named in `oracle`
enum class Basis { reference, elementary, computed };
std::string_view to_string(Basis b) noexcept;

struct Provenance {
  Basis basis = Basis::elementary;
  std::string oracle;  // empty unless basis == computed
};

/// Known quantities of a catalog map. Rates and dilations are in the doubled
/// convention. Boundary points are unit vectors of the domain's ball chart.
struct TruthRecord {
  std::optional<MapType> type;
  std::optional<double> rate;
  std::optional<Point> dw_point;
  std::optional<Point> interior_fixed_point;
  std::optional<double> dw_dilation;
  std::optional<BoundaryPoint> repelling_point;
  std::optional<double> repelling_dilation;
  std::string stable_set;
  std::map<std::string, Provenance> provenance;  // keyed by field name
};

struct ParamSpec {
  std::string name;
  Complex default_value;
  std::string range;  // human-readable constraint
  bool real = true;
};

struct CatalogEntry {
  std::string name;
  std::string description;
  std::vector<ParamSpec> params;
  Bindings values;  // the instantiated parameter values
  MapDef map;
  TruthRecord truth;
  Point base_point;  // a convenient stable start point
};

/// Instantiates a catalog map. Unlisted parameters take their defaults.
/// Throws CatalogError for unknown names, unknown parameters and values out
/// of range.
CatalogEntry catalog_get(std::string_view name, const Bindings& params = {});

std::vector<std::string> catalog_names();

}  // namespace orbitlab
