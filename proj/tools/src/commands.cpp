#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <ostream>

#include "stadium/contour.hpp"
#include "stadium/error.hpp"
#include "stadium/serialize.hpp"
#include "stadium/svg.hpp"
#include "stadium_cli/cli.hpp"

namespace stadium::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string comment_of(const Provenance& p) { return "stadium " + p.version + " config=" + p.config_hash; }

std::string mode_stem(SymmetryClass cls, std::size_t index, const Geometry& geometry) {
  std::string stem = lower(to_string(cls)) + std::to_string(index + 1);
  if (const auto* s = std::get_if<StadiumGeometry>(&geometry)) stem += "_a" + format_a(s->a());
  return stem;
}

void write_contours(const fs::path& path, const ScalarField& field, const std::string& title, const Provenance& p) {
  FieldPlotStyle style;
  style.title = title;
  style.comment = comment_of(p);
  const auto levels = default_levels(field);
  write_file_atomic(path, render_field_svg(field, levels, style));
}

class DirectoryCache final : public SweepCache {
 public:
  DirectoryCache(fs::path dir, const SweepConfig& config) : dir_(std::move(dir)), config_(config) {
    fs::create_directories(dir_);
  }

  std::optional<SweepPoint> load(std::size_t a_index, double a) override {
    const std::string key = point_hash(a);
    const fs::path path = dir_ / (key + ".json");
    if (!fs::exists(path)) return std::nullopt;
    auto point = sweep_point_from_json(read_file(path), key);
    if (!point || !point->ok || point->a != a) return std::nullopt;
    point->a_index = a_index;
    return point;
  }

  void store(const SweepPoint& point) override {
    if (!point.ok) return;  // failed points are retried on the next run
    const std::string key = point_hash(point.a);
    write_file_atomic(dir_ / (key + ".json"), sweep_point_to_json(point, key));
  }

 private:
  std::string point_hash(double a) const {
    SweepConfig single = config_;
    single.a_values = {a};
    return config_hash(single);
  }

  fs::path dir_;
  SweepConfig config_;
};

}  // namespace

int cmd_solve(const RunConfig& config, std::ostream& log, std::ostream& err) {
  validate_common(config);
  SpectrumOptions options = to_spectrum_options(config);
  options.keep_fields = true;
  const Provenance prov = make_provenance(run_hash(config));

  std::vector<ClassSpectrum> spectra;
  try {
    spectra = solve_spectrum(config.geometry, config.classes, options);
  } catch (const EmptyGridError& e) {
    throw ConfigError(e.what());
  }

  json classes = json::array();
  bool all_converged = true;
  for (const auto& s : spectra) {
    all_converged = all_converged && s.converged;
    classes.push_back({{"class", std::string(to_string(s.symmetry))}, {"converged", s.converged}, {"lambdas", s.lambdas}});
  }
  json doc = {{"tool", "stadium"},
              {"version", prov.version},
              {"config_hash", prov.config_hash},
              {"geometry", describe(config.geometry)},
              {"config", json::parse(science_config_json(config))},
              {"spectra", classes}};
  write_file_atomic(config.output / "eigenvalues.json", doc.dump(2) + "\n");

  for (const auto& s : spectra) {
    for (std::size_t i = 0; i < s.fields.size(); ++i) {
      const std::string stem = mode_stem(s.symmetry, i, config.geometry);
      write_file_atomic(config.output / (stem + ".bin"), field_to_binary(s.fields[i], prov));
      write_file_atomic(config.output / (stem + ".csv"), field_to_csv(s.fields[i], prov));
      char title[96];
      std::snprintf(title, sizeof title, "%s mode %zu, lambda = %.6g", std::string(to_string(s.symmetry)).c_str(),
                    i + 1, s.lambdas[i]);
      write_contours(config.output / (stem + ".svg"), s.fields[i], title, prov);
    }
    log << to_string(s.symmetry) << ':';
    for (double l : s.lambdas) log << ' ' << format_double(l);
    log << (s.converged ? "" : "  (not converged)") << '\n';
  }
  if (!all_converged) {
    err << "solve: eigensolver did not converge for every class\n";
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_sweep(const RunConfig& config, std::ostream& log, std::ostream& err) {
  validate_common(config);
  if (config.a_values.empty()) throw ConfigError("sweep needs a values (a_min/a_max/step or a_values)");
  const SweepConfig sweep = to_sweep_config(config);
  const Provenance prov = make_provenance(config_hash(sweep));

  DirectoryCache cache(config.output / "points", sweep);
  const SweepResult result = run_sweep(sweep, &cache);
  log << "sweep: " << sweep.a_values.size() << " points, " << result.computed << " computed, " << result.cached
      << " cached, " << result.failed << " failed\n";
  for (const auto& p : result.points) {
    if (!p.ok) err << "sweep: a = " << format_double(p.a) << " failed: " << p.error << '\n';
  }

  write_file_atomic(config.output / "curves.csv", curve_table_to_csv(result.table, prov));
  write_file_atomic(config.output / "curves.json", curve_table_to_json(result.table, sweep, prov));
  std::vector<std::size_t> all(sweep.spectrum.k);
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  for (SymmetryClass cls : sweep.classes) {
    ChartStyle style;
    style.title = std::string(to_string(cls)) + " eigenvalues";
    style.comment = comment_of(prov);
    try {
      write_file_atomic(config.output / ("correlation_" + std::string(to_string(cls)) + ".svg"),
                        render_correlation_svg(result.table, cls, all, style));
    } catch (const EmptyTableError& e) {
      err << "sweep: no correlation chart for " << to_string(cls) << ": " << e.what() << '\n';
    }
  }
  return result.failed > 0 ? kExitPartial : kExitOk;
}

int cmd_crossings(const RunConfig& config, const CrossingsInput& input, std::ostream& log, std::ostream& err) {
  validate_common(config);
  const fs::path path = input.curves.empty() ? config.output / "curves.json" : input.curves;
  if (!fs::exists(path)) throw ConfigError("no sweep output at " + path.string());
  StoredCurves stored;
  try {
    stored = curve_table_from_json(read_file(path));
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  }
  const Provenance prov = stored.provenance;
  const CurveTable& table = stored.table;

  std::vector<CrossingReport> reports;
  for (SymmetryClass cls : table.classes()) {
    for (const auto& r : detect_avoided_crossings(table, cls, config.min_prominence)) reports.push_back(r);
  }
  if (reports.empty()) {
    write_file_atomic(config.output / "crossings.json", crossings_to_json(reports, prov));
    err << "crossings: none with prominence >= " << format_double(config.min_prominence) << '\n';
    return kExitNoCrossings;
  }

  if (!config.refine) {
    write_file_atomic(config.output / "crossings.json", crossings_to_json(reports, prov));
    for (const auto& r : reports) {
      log << to_string(r.symmetry) << " curves " << r.lower + 1 << "/" << r.lower + 2
          << ": sampled minimum at a = " << format_double(r.a_star) << '\n';
    }
    return kExitOk;
  }

  bool partial = false;
  std::vector<json> extras;
  SpectrumOptions options = stored.config.spectrum;
  options.keep_fields = true;
  for (auto& report : reports) {
    const SymmetryClass cls = report.symmetry;
    const std::size_t i = report.lower;
    RefineOptions refine;
    refine.width = config.refine_width;
    report = refine_crossing(report, table, make_gap_function(stored.config, cls, i), refine);

    json extra = {{"delta", config.delta}};
    const double a_lo = std::max(0.0, report.a_star - config.delta);
    const double a_hi = report.a_star + config.delta;
    SpectrumOptions pair_options = options;
    pair_options.k = i + 3;
    auto solve_pair = [&](double a) -> std::optional<std::array<ScalarField, 2>> {
      const auto s = solve_spectrum(StadiumGeometry(a, options.r), {cls}, pair_options).front();
      if (!s.converged || s.fields.size() < i + 2) return std::nullopt;
      return std::array<ScalarField, 2>{s.fields[i], s.fields[i + 1]};
    };
    const auto before = solve_pair(a_lo);
    const auto at = solve_pair(report.a_star);
    const auto after = solve_pair(a_hi);
    if (!before || !at || !after) {
      partial = true;
      err << "crossings: solves near a = " << format_double(report.a_star) << " did not converge\n";
      extras.push_back(extra);
      continue;
    }
    report.swap = swap_diagnostic(*before, *after);

    const std::string pair = std::to_string(i + 1) + "_" + std::to_string(i + 2);
    const std::string cname(to_string(cls));
    for (const auto& [a, fields] : {std::pair{a_lo, *before}, std::pair{report.a_star, *at}, std::pair{a_hi, *after}}) {
      for (std::size_t p = 0; p < 2; ++p) {
        const StadiumGeometry g(a, options.r);
        write_contours(config.output / (mode_stem(cls, i + p, g) + ".svg"), fields[p],
                       cname + " mode " + std::to_string(i + p + 1) + ", a = " + format_a(a), prov);
      }
      for (const auto sign : {Combination::Sum, Combination::Difference}) {
        const bool plus = sign == Combination::Sum;
        write_contours(config.output / ("sumdiff_" + pair + "_a" + format_a(a) + (plus ? "_plus" : "_minus") + ".svg"),
                       combine(fields[0], fields[1], sign),
                       cname + " modes " + std::to_string(i + 1) + (plus ? " + " : " - ") + std::to_string(i + 2) +
                           ", a = " + format_a(a),
                       prov);
      }
    }
    // How the sum and difference at a_star resemble the pair on either side.
    const ScalarField sum = combine((*at)[0], (*at)[1], Combination::Sum);
    const ScalarField diff = combine((*at)[0], (*at)[1], Combination::Difference);
    auto affinity = [&](const ScalarField& f) {
      return json{{"lower_before", std::abs(overlap(f, (*before)[0]))},
                  {"upper_before", std::abs(overlap(f, (*before)[1]))},
                  {"lower_after", std::abs(overlap(f, (*after)[0]))},
                  {"upper_after", std::abs(overlap(f, (*after)[1]))}};
    };
    extra["affinity"] = {{"sum", affinity(sum)}, {"difference", affinity(diff)}};
    extras.push_back(extra);

    log << cname << " curves " << i + 1 << "/" << i + 2 << ": a* = " << format_double(report.a_star)
        << ", gap = " << format_double(report.min_gap) << (report.lost_bracket ? " (unrefined)" : "")
        << (is_swapped(*report.swap) ? ", swapped" : ", no swap") << '\n';
  }

  json doc = json::parse(crossings_to_json(reports, prov));
  for (std::size_t r = 0; r < doc.size(); ++r) doc[r].update(extras[r]);
  write_file_atomic(config.output / "crossings.json", doc.dump(2) + "\n");
  return partial ? kExitPartial : kExitOk;
}

int cmd_render(const RunConfig& config, const RenderInput& input, std::ostream& log, std::ostream&) {
  if (input.out.empty()) throw ConfigError("render needs --out");
  if (input.field.has_value() == input.curves.has_value()) throw ConfigError("render takes exactly one of --field or --curves");
  std::string svg;
  if (input.field) {
    if (!fs::exists(*input.field)) throw ConfigError("no such field dump: " + input.field->string());
    FieldDump dump;
    try {
      dump = parse_field_binary(read_file(*input.field));
    } catch (const FormatError& e) {
      throw ConfigError(e.what());
    }
    std::optional<Geometry> geometry;
    if (std::holds_alternative<RectangleGeometry>(config.geometry)) {
      geometry = RectangleGeometry(dump.box.xmax - dump.box.xmin, dump.box.ymax - dump.box.ymin);
    }
    const ScalarField field = field_from_dump(dump, geometry);
    const auto levels = input.levels.empty() ? default_levels(field) : input.levels;
    FieldPlotStyle style;
    if (dump.provenance) style.comment = comment_of(*dump.provenance);
    svg = render_field_svg(field, levels, style);
  } else {
    if (!fs::exists(*input.curves)) throw ConfigError("no such curve table: " + input.curves->string());
    StoredCurves stored;
    try {
      stored = curve_table_from_json(read_file(*input.curves));
    } catch (const FormatError& e) {
      throw ConfigError(e.what());
    }
    const SymmetryClass cls = config.classes.front();
    std::vector<std::size_t> curves;
    for (std::size_t c : input.curve_indices) {
      if (c == 0 || c > stored.table.k()) throw ConfigError("curve index out of range: " + std::to_string(c));
      curves.push_back(c - 1);
    }
    if (input.curve_indices.empty()) {
      for (std::size_t c = 0; c < stored.table.k(); ++c) curves.push_back(c);
    }
    ChartStyle style;
    style.title = std::string(to_string(cls)) + " eigenvalues";
    style.comment = comment_of(stored.provenance);
    svg = render_correlation_svg(stored.table, cls, curves, style);
  }
  write_file_atomic(input.out, svg);
  log << "wrote " << input.out.string() << '\n';
  return kExitOk;
}

}  // namespace stadium::cli
