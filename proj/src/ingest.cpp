#include "urbannet/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "urbannet/util.hpp"

namespace urbannet::ingest {

namespace fs = std::filesystem;

const char* facility_kind_name(FacilityKind k) {
  switch (k) {
    case FacilityKind::School: return "school";
    case FacilityKind::Hospital: return "hospital";
    case FacilityKind::Subway: return "subway";
  }
  return "?";
}

FacilityKind facility_kind_from_name(const std::string& name) {
  if (name == "school") return FacilityKind::School;
  if (name == "hospital") return FacilityKind::Hospital;
  if (name == "subway") return FacilityKind::Subway;
  throw ConfigError("unknown facility kind '" + name + "' (expected school|hospital|subway)");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

/// Reads a CSV file, skipping '#' comments and blank lines. Returns rows plus
/// their 1-based line numbers; the first surviving row is the header.
struct CsvFile {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

CsvFile read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  CsvFile out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    out.rows.push_back(split_csv_line(line));
    out.line_numbers.push_back(lineno);
  }
  if (out.rows.empty()) throw Error("file has no header row: " + path);
  return out;
}

void expect_header(const CsvFile& csv, const std::vector<std::string>& expected,
                   const std::string& path) {
  if (csv.rows[0] != expected) {
    std::string want;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    throw ParseError(csv.line_numbers[0], path + ": bad header (expected '" + want + "')");
  }
}

double field_double(const std::string& s, std::size_t lineno, const std::string& what) {
  try {
    return util::parse_double(s);
  } catch (const std::exception&) {
    throw ParseError(lineno, what + ": '" + s + "'");
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  return out;
}

void write_comments(std::ofstream& out, const std::vector<std::string>& comment) {
  for (const auto& c : comment) out << "# " << c << "\n";
}

}  // namespace

std::vector<Tract> load_tracts(const std::string& path) {
  CsvFile csv = read_csv(path);
  expect_header(csv, {"geoid", "lat", "lon", "label"}, path);
  std::vector<Tract> tracts;
  std::set<std::string> seen;
  for (std::size_t i = 1; i < csv.rows.size(); ++i) {
    const auto& f = csv.rows[i];
    const std::size_t ln = csv.line_numbers[i];
    if (f.size() != 4) throw ParseError(ln, "expected 4 fields, got " + std::to_string(f.size()));
    if (f[0].empty()) throw ParseError(ln, "empty geoid");
    if (!seen.insert(f[0]).second) throw DuplicateId(f[0]);
    const double lat = field_double(f[1], ln, "bad lat");
    const double lon = field_double(f[2], ln, "bad lon");
    std::optional<int> label;
    if (f[3] != "NA") {
      if (f[3] == "0") label = 0;
      else if (f[3] == "1") label = 1;
      else throw ParseError(ln, "label must be 0, 1 or NA, got '" + f[3] + "'");
    }
    try {
      tracts.push_back(Tract{f[0], geo::GeoPoint(lat, lon), label});
    } catch (const Error& e) {
      throw ParseError(ln, e.what());
    }
  }
  return tracts;
}

std::vector<Facility> load_facilities(const std::string& path, FacilityKind kind) {
  CsvFile csv = read_csv(path);
  expect_header(csv, {"id", "lat", "lon"}, path);
  std::vector<Facility> out;
  std::set<std::string> seen;
  for (std::size_t i = 1; i < csv.rows.size(); ++i) {
    const auto& f = csv.rows[i];
    const std::size_t ln = csv.line_numbers[i];
    if (f.size() != 3) throw ParseError(ln, "expected 3 fields, got " + std::to_string(f.size()));
    if (f[0].empty()) throw ParseError(ln, "empty id");
    if (!seen.insert(f[0]).second) throw DuplicateId(f[0]);
    const double lat = field_double(f[1], ln, "bad lat");
    const double lon = field_double(f[2], ln, "bad lon");
    try {
      out.push_back(Facility{f[0], kind, geo::GeoPoint(lat, lon)});
    } catch (const Error& e) {
      throw ParseError(ln, e.what());
    }
  }
  return out;
}

SocioTable load_socio(const std::string& path) {
  CsvFile csv = read_csv(path);
  const auto& header = csv.rows[0];
  if (header.empty() || header[0] != "geoid") {
    throw ParseError(csv.line_numbers[0], path + ": first socio column must be 'geoid'");
  }
  SocioTable table;
  table.feature_names.assign(header.begin() + 1, header.end());
  std::set<std::string> seen;
  for (std::size_t i = 1; i < csv.rows.size(); ++i) {
    const auto& f = csv.rows[i];
    const std::size_t ln = csv.line_numbers[i];
    if (f.size() != header.size()) {
      throw ParseError(ln, "expected " + std::to_string(header.size()) + " fields, got " +
                               std::to_string(f.size()));
    }
    if (!seen.insert(f[0]).second) throw DuplicateId(f[0]);
    std::vector<double> row(table.feature_names.size());
    for (std::size_t c = 1; c < f.size(); ++c) {
      row[c - 1] = f[c].empty() ? std::nan("") : field_double(f[c], ln, "bad value");
    }
    table.tract_ids.push_back(f[0]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::unordered_map<std::string, FootprintStats> load_footprints(const std::string& path) {
  CsvFile csv = read_csv(path);
  expect_header(csv, {"geoid", "building_count", "total_perimeter_m", "total_area_m2", "mean_area_m2"},
                path);
  std::unordered_map<std::string, FootprintStats> out;
  for (std::size_t i = 1; i < csv.rows.size(); ++i) {
    const auto& f = csv.rows[i];
    const std::size_t ln = csv.line_numbers[i];
    if (f.size() != 5) throw ParseError(ln, "expected 5 fields, got " + std::to_string(f.size()));
    FootprintStats s;
    try {
      s.building_count = util::parse_int(f[1]);
    } catch (const std::exception&) {
      throw ParseError(ln, "bad building_count: '" + f[1] + "'");
    }
    s.total_perimeter_m = field_double(f[2], ln, "bad total_perimeter_m");
    s.total_area_m2 = field_double(f[3], ln, "bad total_area_m2");
    s.mean_area_m2 = field_double(f[4], ln, "bad mean_area_m2");
    if (s.building_count < 0 || s.total_perimeter_m < 0 || s.total_area_m2 < 0 ||
        s.mean_area_m2 < 0) {
      throw ParseError(ln, "footprint stats must be non-negative");
    }
    if (s.building_count > 0) {
      const double product = s.mean_area_m2 * static_cast<double>(s.building_count);
      const double scale = std::max(1.0, std::fabs(s.total_area_m2));
      if (std::fabs(product - s.total_area_m2) > 1e-6 * scale) {
        throw ParseError(ln, "mean_area_m2 * building_count inconsistent with total_area_m2");
      }
    }
    if (!out.emplace(f[0], s).second) throw DuplicateId(f[0]);
  }
  return out;
}

void apply_geojson_centers(std::vector<Tract>& tracts, const std::string& geojson_path) {
  std::ifstream in(geojson_path);
  if (!in) throw Error("cannot open file: " + geojson_path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw ParseError(0, std::string("invalid GeoJSON: ") + e.what());
  }
  if (doc.value("type", "") != "FeatureCollection") {
    throw ParseError(0, "GeoJSON root must be a FeatureCollection");
  }
  std::unordered_map<std::string, geo::GeoPoint> centers;
  for (const auto& feature : doc.value("features", nlohmann::json::array())) {
    const auto& props = feature.value("properties", nlohmann::json::object());
    if (!props.contains("geoid")) continue;
    const std::string geoid = props["geoid"].is_string()
                                  ? props["geoid"].get<std::string>()
                                  : props["geoid"].dump();
    const auto& geom = feature.value("geometry", nlohmann::json::object());
    if (geom.value("type", "") != "Polygon") continue;
    const auto& rings = geom["coordinates"];
    if (!rings.is_array() || rings.empty()) continue;
    std::vector<geo::GeoPoint> ring;
    for (const auto& pos : rings[0]) {  // outer ring only; GeoJSON order is [lon, lat]
      ring.emplace_back(pos.at(1).get<double>(), pos.at(0).get<double>());
    }
    // GeoJSON rings repeat the first vertex at the end; our rings are implicitly closed.
    if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
    centers.insert_or_assign(geoid, geo::polygon_centroid(geo::GeoPolygon(std::move(ring))));
  }
  for (auto& t : tracts) {
    auto it = centers.find(t.id);
    if (it != centers.end()) t.center = it->second;
  }
}

std::vector<const Facility*> Dataset::facilities_of(FacilityKind kind) const {
  std::vector<const Facility*> out;
  for (const auto& f : facilities) {
    if (f.kind == kind) out.push_back(&f);
  }
  return out;
}

std::optional<std::size_t> Dataset::tract_index(const std::string& id) const {
  for (std::size_t i = 0; i < tracts.size(); ++i) {
    if (tracts[i].id == id) return i;
  }
  return std::nullopt;
}

std::vector<int> Dataset::labeled_indices() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < tracts.size(); ++i) {
    if (tracts[i].label.has_value()) out.push_back(static_cast<int>(i));
  }
  return out;
}

Dataset join_dataset(const std::vector<Tract>& tracts, const std::vector<Facility>& facilities,
                     const SocioTable& socio,
                     const std::unordered_map<std::string, FootprintStats>& footprints) {
  std::unordered_map<std::string, std::size_t> tract_pos;
  for (std::size_t i = 0; i < tracts.size(); ++i) {
    if (!tract_pos.emplace(tracts[i].id, i).second) throw DuplicateId(tracts[i].id);
  }
  for (const auto& id : socio.tract_ids) {
    if (!tract_pos.count(id)) throw UnknownTractId(id);
  }
  for (const auto& [id, stats] : footprints) {
    if (!tract_pos.count(id)) throw UnknownTractId(id);
  }

  std::unordered_map<std::string, const std::vector<double>*> socio_by_id;
  for (std::size_t i = 0; i < socio.tract_ids.size(); ++i) {
    socio_by_id.emplace(socio.tract_ids[i], &socio.rows[i]);
  }

  // An entirely empty socio table means "no socio mode": keep every tract with
  // an empty feature vector instead of dropping them all.
  const bool no_socio = socio.feature_names.empty() && socio.tract_ids.empty();

  Dataset ds;
  ds.facilities = facilities;
  ds.socio_names = socio.feature_names;
  for (const auto& t : tracts) {
    if (!no_socio) {
      auto it = socio_by_id.find(t.id);
      if (it == socio_by_id.end()) {
        ++ds.dropped_missing_socio;
        continue;
      }
      ds.socio.push_back(*it->second);
    } else {
      ds.socio.emplace_back();
    }
    ds.tracts.push_back(t);
    auto fit = footprints.find(t.id);
    if (fit == footprints.end()) {
      ++ds.imputed_missing_footprints;
      ds.footprints.push_back(FootprintStats{});
    } else {
      ds.footprints.push_back(fit->second);
    }
  }

  // Impute missing socio cells with the column median over labeled tracts.
  const std::size_t m = ds.socio_names.size();
  for (std::size_t c = 0; c < m; ++c) {
    std::vector<double> train_vals;
    for (std::size_t i = 0; i < ds.tracts.size(); ++i) {
      if (ds.tracts[i].label.has_value() && !std::isnan(ds.socio[i][c])) {
        train_vals.push_back(ds.socio[i][c]);
      }
    }
    double median = 0.0;
    if (!train_vals.empty()) {
      std::sort(train_vals.begin(), train_vals.end());
      const std::size_t h = train_vals.size() / 2;
      median = (train_vals.size() % 2 == 1) ? train_vals[h]
                                            : 0.5 * (train_vals[h - 1] + train_vals[h]);
    }
    for (std::size_t i = 0; i < ds.tracts.size(); ++i) {
      if (std::isnan(ds.socio[i][c])) ds.socio[i][c] = median;
    }
  }
  return ds;
}

void write_tracts(const std::vector<Tract>& tracts, const std::string& path,
                  const std::vector<std::string>& comment) {
  auto out = open_out(path);
  write_comments(out, comment);
  out << "geoid,lat,lon,label\n";
  for (const auto& t : tracts) {
    out << t.id << ',' << util::format_double(t.center.lat()) << ','
        << util::format_double(t.center.lon()) << ','
        << (t.label ? std::to_string(*t.label) : std::string("NA")) << '\n';
  }
}

void write_facilities(const std::vector<Facility>& facilities, FacilityKind kind,
                      const std::string& path, const std::vector<std::string>& comment) {
  auto out = open_out(path);
  write_comments(out, comment);
  out << "id,lat,lon\n";
  for (const auto& f : facilities) {
    if (f.kind != kind) continue;
    out << f.id << ',' << util::format_double(f.location.lat()) << ','
        << util::format_double(f.location.lon()) << '\n';
  }
}

void write_socio(const std::vector<std::string>& names, const std::vector<std::string>& ids,
                 const std::vector<std::vector<double>>& rows, const std::string& path,
                 const std::vector<std::string>& comment) {
  auto out = open_out(path);
  write_comments(out, comment);
  out << "geoid";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out << ids[i];
    for (double v : rows[i]) {
      out << ',';
      if (!std::isnan(v)) out << util::format_double(v);
    }
    out << '\n';
  }
}

void write_footprints(const std::vector<std::string>& ids,
                      const std::vector<FootprintStats>& stats, const std::string& path,
                      const std::vector<std::string>& comment) {
  auto out = open_out(path);
  write_comments(out, comment);
  out << "geoid,building_count,total_perimeter_m,total_area_m2,mean_area_m2\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& s = stats[i];
    out << ids[i] << ',' << s.building_count << ',' << util::format_double(s.total_perimeter_m)
        << ',' << util::format_double(s.total_area_m2) << ','
        << util::format_double(s.mean_area_m2) << '\n';
  }
}

void write_dataset(const Dataset& ds, const std::string& dir,
                   const std::vector<std::string>& comment) {
  fs::create_directories(dir);
  std::vector<std::string> ids;
  ids.reserve(ds.tracts.size());
  for (const auto& t : ds.tracts) ids.push_back(t.id);

  write_tracts(ds.tracts, (fs::path(dir) / "tracts.csv").string(), comment);
  for (FacilityKind k : {FacilityKind::School, FacilityKind::Hospital, FacilityKind::Subway}) {
    write_facilities(ds.facilities, k,
                     (fs::path(dir) / ("facilities_" + std::string(facility_kind_name(k)) + ".csv"))
                         .string(),
                     comment);
  }
  write_socio(ds.socio_names, ids, ds.socio, (fs::path(dir) / "socio.csv").string(), comment);
  write_footprints(ids, ds.footprints, (fs::path(dir) / "footprints.csv").string(), comment);
}

Dataset load_dataset(const std::string& dir) {
  auto tracts = load_tracts((fs::path(dir) / "tracts.csv").string());
  std::vector<Facility> facilities;
  for (FacilityKind k : {FacilityKind::School, FacilityKind::Hospital, FacilityKind::Subway}) {
    const auto path =
        (fs::path(dir) / ("facilities_" + std::string(facility_kind_name(k)) + ".csv")).string();
    if (fs::exists(path)) {
      auto fk = load_facilities(path, k);
      facilities.insert(facilities.end(), fk.begin(), fk.end());
    }
  }
  SocioTable socio;
  if (fs::exists(fs::path(dir) / "socio.csv")) {
    socio = load_socio((fs::path(dir) / "socio.csv").string());
  }
  std::unordered_map<std::string, FootprintStats> fps;
  if (fs::exists(fs::path(dir) / "footprints.csv")) {
    fps = load_footprints((fs::path(dir) / "footprints.csv").string());
  }
  const auto geojson = fs::path(dir) / "tracts.geojson";
  if (fs::exists(geojson)) apply_geojson_centers(tracts, geojson.string());
  return join_dataset(tracts, facilities, socio, fps);
}

}  // namespace urbannet::ingest
