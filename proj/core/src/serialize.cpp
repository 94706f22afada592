#include "stadium/serialize.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "stadium/error.hpp"
#include "stadium/version.hpp"

namespace stadium {

using nlohmann::json;

Provenance make_provenance(std::string config_hash) { return {std::move(config_hash), kVersion}; }

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string provenance_line(const Provenance& p) {
  return "# stadium " + p.version + " config=" + p.config_hash + "\n";
}

json provenance_json(const Provenance& p) { return {{"tool", "stadium"}, {"version", p.version}, {"config_hash", p.config_hash}}; }

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put_le(std::string& out, T value) {
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  out.append(reinterpret_cast<const char*>(bits.data()), bits.size());
}

template <class T>
T get_le(std::string_view bytes, std::size_t& offset) {
  if (offset + sizeof(T) > bytes.size()) throw FormatError("field dump is truncated");
  std::array<unsigned char, sizeof(T)> bits{};
  std::memcpy(bits.data(), bytes.data() + offset, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  offset += sizeof(T);
  return std::bit_cast<T>(bits);
}

SymmetryClass class_from(const std::string& s) {
  const auto cls = parse_symmetry_class(s);
  if (!cls) throw FormatError("unknown symmetry class '" + s + "'");
  return *cls;
}

}  // namespace

std::string field_to_csv(const ScalarField& field, const Provenance& provenance) {
  std::string out = provenance_line(provenance);
  out += "x,y,value\n";
  const auto points = field.grid().points();
  for (std::size_t k = 0; k < field.size(); ++k) {
    out += format_double(points[k].x);
    out += ',';
    out += format_double(points[k].y);
    out += ',';
    out += format_double(field[k]);
    out += '\n';
  }
  return out;
}

std::string field_to_binary(const ScalarField& field, const Provenance& provenance) {
  const Grid& grid = field.grid();
  const BoundingBox box = bounding_box(grid.geometry());
  std::string out;
  out.reserve(48 + 24 * field.size());
  put_le(out, grid.h());
  put_le(out, box.xmin);
  put_le(out, box.xmax);
  put_le(out, box.ymin);
  put_le(out, box.ymax);
  put_le(out, static_cast<std::uint64_t>(field.size()));
  const auto points = grid.points();
  for (std::size_t k = 0; k < field.size(); ++k) {
    put_le(out, points[k].x);
    put_le(out, points[k].y);
    put_le(out, field[k]);
  }
  const std::string trailer = provenance_json(provenance).dump();
  put_le(out, static_cast<std::uint64_t>(trailer.size()));
  out += trailer;
  return out;
}

FieldDump parse_field_binary(std::string_view bytes) {
  FieldDump dump;
  std::size_t offset = 0;
  dump.h = get_le<double>(bytes, offset);
  dump.box.xmin = get_le<double>(bytes, offset);
  dump.box.xmax = get_le<double>(bytes, offset);
  dump.box.ymin = get_le<double>(bytes, offset);
  dump.box.ymax = get_le<double>(bytes, offset);
  const auto count = get_le<std::uint64_t>(bytes, offset);
  if (!(dump.h > 0.0)) throw FormatError("field dump has a non-positive spacing");
  if (count > (bytes.size() - offset) / 24) throw FormatError("field dump node count exceeds the data");
  dump.points.reserve(count);
  dump.values.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    const double x = get_le<double>(bytes, offset);
    const double y = get_le<double>(bytes, offset);
    dump.points.push_back({x, y});
    dump.values.push_back(get_le<double>(bytes, offset));
  }
  if (offset < bytes.size()) {
    const auto length = get_le<std::uint64_t>(bytes, offset);
    if (length > bytes.size() - offset) throw FormatError("field dump trailer is truncated");
    const json meta = json::parse(bytes.substr(offset, length), nullptr, false);
    if (meta.is_object() && meta.contains("config_hash") && meta.contains("version")) {
      dump.provenance = Provenance{meta["config_hash"].get<std::string>(), meta["version"].get<std::string>()};
    }
  }
  return dump;
}

ScalarField field_from_dump(const FieldDump& dump, std::optional<Geometry> geometry) {
  Geometry geo = geometry ? *geometry : Geometry(StadiumGeometry(dump.box.xmax - dump.box.ymax, dump.box.ymax));
  std::vector<LatticeIndex> nodes;
  nodes.reserve(dump.points.size());
  for (const Point& p : dump.points) {
    nodes.push_back({static_cast<int>(std::lround(p.x / dump.h - 0.5)), static_cast<int>(std::lround(p.y / dump.h - 0.5))});
  }
  auto grid = std::make_shared<const Grid>(Grid::from_lattice(geo, GridSpec::full(dump.h), nodes));
  // from_lattice sorts nodes canonically; map values through the lattice positions.
  std::vector<double> values(grid->size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto idx = grid->index_of(nodes[k].i, nodes[k].j);
    if (!idx) throw FormatError("field dump node not found in rebuilt grid");
    values[*idx] = dump.values[k];
  }
  return ScalarField(std::move(grid), std::move(values));
}

namespace {

json config_json(const SweepConfig& c) {
  json classes = json::array();
  for (SymmetryClass cls : c.classes) classes.push_back(std::string(to_string(cls)));
  const auto& s = c.spectrum;
  return {{"a_values", c.a_values},
          {"classes", classes},
          {"r", s.r},
          {"h", s.h},
          {"mode", std::string(to_string(s.mode))},
          {"k", s.k},
          {"tol", s.tol},
          {"seed", s.seed},
          {"threshold", s.threshold}};
}

SweepConfig config_from(const json& j) {
  SweepConfig c;
  c.a_values = j.at("a_values").get<std::vector<double>>();
  c.classes.clear();
  for (const auto& cls : j.at("classes")) c.classes.push_back(class_from(cls.get<std::string>()));
  c.spectrum.r = j.at("r").get<double>();
  c.spectrum.h = j.at("h").get<double>();
  const auto mode = j.at("mode").get<std::string>();
  if (mode != "full" && mode != "quadrant") throw FormatError("unknown grid mode '" + mode + "'");
  c.spectrum.mode = mode == "full" ? GridMode::FullDomain : GridMode::Quadrant;
  c.spectrum.k = j.at("k").get<std::size_t>();
  c.spectrum.tol = j.at("tol").get<double>();
  c.spectrum.seed = j.at("seed").get<std::uint64_t>();
  c.spectrum.threshold = j.at("threshold").get<double>();
  return c;
}

}  // namespace

std::string sweep_config_to_json(const SweepConfig& config) { return config_json(config).dump(2) + "\n"; }

SweepConfig sweep_config_from_json(std::string_view text) {
  try {
    return config_from(json::parse(text));
  } catch (const json::exception& e) {
    throw FormatError(std::string("sweep config: ") + e.what());
  }
}

std::string curve_table_to_csv(const CurveTable& table, const Provenance& provenance) {
  std::string out = provenance_line(provenance);
  out += "a,class,curve_index,lambda\n";
  for (std::size_t j = 0; j < table.a_values().size(); ++j) {
    for (SymmetryClass cls : table.classes()) {
      for (std::size_t i = 0; i < table.k(); ++i) {
        const auto v = table.lambda(cls, i, j);
        if (!v) continue;
        out += format_double(table.a_values()[j]) + "," + std::string(to_string(cls)) + "," +
               std::to_string(i + 1) + "," + format_double(*v) + "\n";
      }
    }
  }
  return out;
}

std::string curve_table_to_json(const CurveTable& table, const SweepConfig& config, const Provenance& provenance) {
  json j = provenance_json(provenance);
  j["config"] = config_json(config);
  j["a_values"] = table.a_values();
  j["k"] = table.k();
  json curves = json::object();
  for (SymmetryClass cls : table.classes()) {
    json rows = json::array();
    for (std::size_t i = 0; i < table.k(); ++i) {
      json row = json::array();
      for (const auto& v : table.curve(cls, i)) row.push_back(v ? json(*v) : json(nullptr));
      rows.push_back(std::move(row));
    }
    curves[std::string(to_string(cls))] = std::move(rows);
  }
  j["curves"] = std::move(curves);
  return j.dump(2) + "\n";
}

StoredCurves curve_table_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    StoredCurves stored;
    stored.provenance = {j.at("config_hash").get<std::string>(), j.at("version").get<std::string>()};
    stored.config = config_from(j.at("config"));
    const auto a_values = j.at("a_values").get<std::vector<double>>();
    const auto k = j.at("k").get<std::size_t>();
    std::vector<SymmetryClass> classes;
    for (const auto& [name, rows] : j.at("curves").items()) classes.push_back(class_from(name));
    // Keep the configured class order rather than the JSON object's key order.
    std::vector<SymmetryClass> ordered;
    for (SymmetryClass c : stored.config.classes) {
      if (std::find(classes.begin(), classes.end(), c) != classes.end()) ordered.push_back(c);
    }
    stored.table = CurveTable(a_values, ordered, k, stored.provenance.config_hash);
    for (SymmetryClass cls : ordered) {
      const auto& rows = j.at("curves").at(std::string(to_string(cls)));
      if (rows.size() != k) throw FormatError("curve count does not match k");
      for (std::size_t i = 0; i < k; ++i) {
        if (rows[i].size() != a_values.size()) throw FormatError("curve length does not match a_values");
        for (std::size_t a = 0; a < a_values.size(); ++a) {
          if (!rows[i][a].is_null()) stored.table.set(cls, i, a, rows[i][a].get<double>());
        }
      }
    }
    return stored;
  } catch (const json::exception& e) {
    throw FormatError(std::string("curve table: ") + e.what());
  }
}

std::string crossings_to_json(const std::vector<CrossingReport>& reports, const Provenance& provenance) {
  json arr = json::array();
  for (const auto& r : reports) {
    json j = {{"config_hash", provenance.config_hash},
              {"version", provenance.version},
              {"class", std::string(to_string(r.symmetry))},
              {"lower_curve", r.lower + 1},
              {"upper_curve", r.lower + 2},
              {"a_index", r.a_index},
              {"a_star", r.a_star},
              {"min_gap", r.min_gap},
              {"prominence", r.prominence},
              {"bracket", {r.bracket_lo, r.bracket_hi}},
              {"refined", r.refined},
              {"lost_bracket", r.lost_bracket}};
    if (r.swap) {
      const auto& s = *r.swap;
      j["swap"] = {{s[0][0], s[0][1]}, {s[1][0], s[1][1]}};
      j["swapped"] = is_swapped(s);
    } else {
      j["swap"] = nullptr;
    }
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::vector<CrossingReport> crossings_from_json(std::string_view text) {
  try {
    std::vector<CrossingReport> reports;
    for (const auto& j : json::parse(text)) {
      CrossingReport r;
      r.symmetry = class_from(j.at("class").get<std::string>());
      r.lower = j.at("lower_curve").get<std::size_t>() - 1;
      r.a_index = j.at("a_index").get<std::size_t>();
      r.a_star = j.at("a_star").get<double>();
      r.min_gap = j.at("min_gap").get<double>();
      r.prominence = j.at("prominence").get<double>();
      r.bracket_lo = j.at("bracket").at(0).get<double>();
      r.bracket_hi = j.at("bracket").at(1).get<double>();
      r.refined = j.at("refined").get<bool>();
      r.lost_bracket = j.at("lost_bracket").get<bool>();
      if (!j.at("swap").is_null()) {
        SwapMatrix s{};
        for (std::size_t p = 0; p < 2; ++p) {
          for (std::size_t q = 0; q < 2; ++q) s[p][q] = j["swap"][p][q].get<double>();
        }
        r.swap = s;
      }
      reports.push_back(r);
    }
    return reports;
  } catch (const json::exception& e) {
    throw FormatError(std::string("crossings: ") + e.what());
  }
}

std::string sweep_point_to_json(const SweepPoint& point, const std::string& point_hash) {
  json lambdas = json::object();
  for (const auto& [cls, values] : point.lambdas) lambdas[std::string(to_string(cls))] = values;
  const json j = {{"point_hash", point_hash}, {"a_index", point.a_index}, {"a", point.a},
                  {"ok", point.ok},           {"error", point.error},     {"lambdas", lambdas}};
  return j.dump() + "\n";
}

std::optional<SweepPoint> sweep_point_from_json(std::string_view text, const std::string& point_hash) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  try {
    if (j.at("point_hash").get<std::string>() != point_hash) return std::nullopt;
    SweepPoint p;
    p.a_index = j.at("a_index").get<std::size_t>();
    p.a = j.at("a").get<double>();
    p.ok = j.at("ok").get<bool>();
    p.error = j.at("error").get<std::string>();
    for (const auto& [name, values] : j.at("lambdas").items()) {
      p.lambdas[class_from(name)] = values.get<std::vector<double>>();
    }
    return p;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace stadium
