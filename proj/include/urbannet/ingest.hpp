#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "urbannet/errors.hpp"
#include "urbannet/geo.hpp"

namespace urbannet::ingest {

enum class FacilityKind { School, Hospital, Subway };

const char* facility_kind_name(FacilityKind k);
FacilityKind facility_kind_from_name(const std::string& name);

/// Census tract: the prediction unit. Label 1 = gentrified, 0 = non-gentrified,
/// absent = to be predicted.
struct Tract {
  std::string id;
  geo::GeoPoint center;
  std::optional<int> label;
};

struct Facility {
  std::string id;
  FacilityKind kind;
  geo::GeoPoint location;
};

/// Raw per-tract socioeconomic rows, pre-selection. Missing cells are NaN until
/// join_dataset imputes them.
struct SocioTable {
  std::vector<std::string> feature_names;
  std::vector<std::string> tract_ids;
  std::vector<std::vector<double>> rows;  // aligned with tract_ids
};

struct FootprintStats {
  long long building_count = 0;
  double total_perimeter_m = 0.0;
  double total_area_m2 = 0.0;
  double mean_area_m2 = 0.0;
};

/// Everything joined on tract id. socio/footprints rows align 1:1 with tracts.
/// Immutable after construction by convention.
struct Dataset {
  std::vector<Tract> tracts;
  std::vector<Facility> facilities;
  std::vector<std::string> socio_names;
  std::vector<std::vector<double>> socio;       // finite after imputation
  std::vector<FootprintStats> footprints;
  int dropped_missing_socio = 0;                // tracts dropped for lacking a socio row
  int imputed_missing_footprints = 0;           // tracts given all-zero footprints

  std::vector<const Facility*> facilities_of(FacilityKind kind) const;
  std::optional<std::size_t> tract_index(const std::string& id) const;
  /// Indices of tracts that carry a label, in tract order.
  std::vector<int> labeled_indices() const;
};

// --- loaders ------------------------------------------------------------
// All CSV readers skip blank lines and lines starting with '#'.

std::vector<Tract> load_tracts(const std::string& path);
std::vector<Facility> load_facilities(const std::string& path, FacilityKind kind);
SocioTable load_socio(const std::string& path);
std::unordered_map<std::string, FootprintStats> load_footprints(const std::string& path);

/// Replace tract centers with polygon centroids computed from a GeoJSON
/// FeatureCollection (Polygon features keyed by properties.geoid). Tracts not
/// present in the file keep their CSV coordinates.
void apply_geojson_centers(std::vector<Tract>& tracts, const std::string& geojson_path);

/// Join everything on tract id. Tracts without a socio row are dropped (counted);
/// missing footprint rows are imputed as zeros (counted); missing socio cells are
/// imputed with the column median over labeled tracts.
Dataset join_dataset(const std::vector<Tract>& tracts,
                     const std::vector<Facility>& facilities,
                     const SocioTable& socio,
                     const std::unordered_map<std::string, FootprintStats>& footprints);

// --- writers ------------------------------------------------------------
// `comment` lines (if any) are emitted first, each prefixed with "# ".

void write_tracts(const std::vector<Tract>& tracts, const std::string& path,
                  const std::vector<std::string>& comment = {});
void write_facilities(const std::vector<Facility>& facilities, FacilityKind kind,
                      const std::string& path, const std::vector<std::string>& comment = {});
void write_socio(const std::vector<std::string>& names, const std::vector<std::string>& ids,
                 const std::vector<std::vector<double>>& rows, const std::string& path,
                 const std::vector<std::string>& comment = {});
void write_footprints(const std::vector<std::string>& ids,
                      const std::vector<FootprintStats>& stats, const std::string& path,
                      const std::vector<std::string>& comment = {});

/// Write a joined dataset back to the standard per-file layout under `dir`
/// (tracts.csv, facilities_school.csv, ..., socio.csv, footprints.csv).
void write_dataset(const Dataset& ds, const std::string& dir,
                   const std::vector<std::string>& comment = {});

/// Load the standard layout written by write_dataset / the synthetic generator.
Dataset load_dataset(const std::string& dir);

}  // namespace urbannet::ingest
