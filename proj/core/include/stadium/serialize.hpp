#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stadium/fields.hpp"
#include "stadium/spectra.hpp"

namespace stadium {

/// Identifies the run that produced a file; written into every output.
struct Provenance {
  std::string config_hash;
  std::string version;
};

Provenance make_provenance(std::string config_hash);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

/// Writes to "<path>.tmp" and renames over path, so readers never see partial files.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

// Fields ----------------------------------------------------------------------------------

/// "# provenance" line, then "x,y,value" rows in node order.
std::string field_to_csv(const ScalarField& field, const Provenance& provenance);

/// Little-endian binary dump: f64 h, f64 xmin, f64 xmax, f64 ymin, f64 ymax (domain bounding
/// box), u64 node count, then count records of f64 (x, y, value). A trailer of u64 length
/// plus that many bytes of provenance JSON follows.
std::string field_to_binary(const ScalarField& field, const Provenance& provenance);

struct FieldDump {
  double h = 0.0;
  BoundingBox box;
  std::vector<Point> points;
  std::vector<double> values;
  std::optional<Provenance> provenance;
};

/// Throws FormatError on truncated or inconsistent input.
FieldDump parse_field_binary(std::string_view bytes);

/// Rebuilds a full-domain field from a dump. Without an explicit geometry the dump is taken
/// to be a stadium with r = ymax and a = xmax - r.
ScalarField field_from_dump(const FieldDump& dump, std::optional<Geometry> geometry = std::nullopt);

// Sweeps ----------------------------------------------------------------------------------

std::string sweep_config_to_json(const SweepConfig& config);
SweepConfig sweep_config_from_json(std::string_view text);

/// "a,class,curve_index,lambda" rows (curve_index starts at 1); holes are omitted.
std::string curve_table_to_csv(const CurveTable& table, const Provenance& provenance);
/// Table plus full sweep configuration; holes are null.
std::string curve_table_to_json(const CurveTable& table, const SweepConfig& config, const Provenance& provenance);

struct StoredCurves {
  CurveTable table;
  SweepConfig config;
  Provenance provenance;
};

StoredCurves curve_table_from_json(std::string_view text);

/// JSON array of crossing reports; curve numbers are written 1-based.
std::string crossings_to_json(const std::vector<CrossingReport>& reports, const Provenance& provenance);
std::vector<CrossingReport> crossings_from_json(std::string_view text);

/// Cache record for one sweep point (eigenvalues only).
std::string sweep_point_to_json(const SweepPoint& point, const std::string& point_hash);
/// nullopt when the record belongs to a different configuration or is unreadable.
std::optional<SweepPoint> sweep_point_from_json(std::string_view text, const std::string& point_hash);

}  // namespace stadium
