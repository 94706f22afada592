#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <ostream>

#include "stadium/error.hpp"
#include "stadium/serialize.hpp"
#include "stadium/version.hpp"
#include "stadium_cli/cli.hpp"

namespace stadium::cli {

namespace {

constexpr const char* kThreadsEnv = "STADIUM_THREADS";

struct Flags {
  std::string config;
  std::optional<double> a, r, lx, ly, h;
  std::optional<std::string> mode;
  std::vector<std::string> classes;
  std::optional<std::size_t> k, threads;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> a_min, a_max, step;
  std::vector<double> a_values;
  std::optional<double> threshold, min_prominence, delta, refine_width;
  bool detect_only = false;
};

void add_science(CLI::App* sub, Flags& f, bool sweep, bool analysis) {
  sub->add_option("--config", f.config, "JSON run config; flags given here override it")->check(CLI::ExistingFile);
  sub->add_option("--a", f.a, "stadium straight half-length");
  sub->add_option("--r", f.r, "stadium cap radius (default 1)");
  sub->add_option("--lx", f.lx, "rectangle width (with --ly selects a rectangle)");
  sub->add_option("--ly", f.ly, "rectangle height");
  sub->add_option("--h", f.h, "grid spacing (default 1/64)");
  sub->add_option("--mode", f.mode, "full | quadrant (default quadrant)");
  sub->add_option("--class", f.classes, "symmetry class(es): EE EO OE OO (default EE)")->delimiter(',');
  sub->add_option("--k", f.k, "eigenpairs per class (default 8)");
  sub->add_option("--tol", f.tol, "relative residual tolerance (default 1e-7)");
  sub->add_option("--seed", f.seed, "solver start-block seed");
  sub->add_option("--out", f.out, "output directory (default runs)");
  sub->add_option("--threads", f.threads, std::string("worker threads (else $") + kThreadsEnv + ", else 1)");
  if (sweep) {
    sub->add_option("--a-min", f.a_min, "first a of the sweep");
    sub->add_option("--a-max", f.a_max, "last a of the sweep");
    sub->add_option("--step", f.step, "sweep step");
    sub->add_option("--a-values", f.a_values, "explicit sweep abscissae")->delimiter(',');
  }
  if (analysis) {
    sub->add_option("--threshold", f.threshold, "symmetry classification threshold (default 0.9)");
    sub->add_option("--min-prominence", f.min_prominence, "gap-minimum prominence (default 0.5)");
    sub->add_option("--delta", f.delta, "swap diagnostic offset (default 0.05)");
    sub->add_option("--refine-width", f.refine_width, "refinement bracket width (default 1e-3)");
    sub->add_flag("--detect-only", f.detect_only, "report sampled gap minima without fresh solves");
  }
}

RunConfig resolve(const Flags& f) {
  RunConfig c;
  if (!f.config.empty()) c = parse_run_config(read_file(f.config), c);
  try {
    if (f.lx || f.ly) {
      if (!f.lx || !f.ly) throw ConfigError("--lx and --ly go together");
      if (f.a || f.r) throw ConfigError("--a/--r and --lx/--ly are exclusive");
      c.geometry = RectangleGeometry(*f.lx, *f.ly);
    } else if (f.a || f.r) {
      const auto* s = std::get_if<StadiumGeometry>(&c.geometry);
      c.geometry = StadiumGeometry(f.a.value_or(s ? s->a() : 1.0), f.r.value_or(s ? s->r() : 1.0));
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (f.h) c.h = *f.h;
  if (f.mode) {
    if (*f.mode == "full") {
      c.mode = GridMode::FullDomain;
    } else if (*f.mode == "quadrant") {
      c.mode = GridMode::Quadrant;
    } else {
      throw ConfigError("--mode must be full or quadrant");
    }
  }
  if (!f.classes.empty()) {
    c.classes.clear();
    for (const auto& s : f.classes) {
      const auto cls = parse_symmetry_class(s);
      if (!cls || *cls == SymmetryClass::Ambiguous) throw ConfigError("unknown symmetry class '" + s + "'");
      c.classes.push_back(*cls);
    }
  }
  if (f.k) c.k = *f.k;
  if (f.tol) c.tol = *f.tol;
  if (f.seed) c.seed = *f.seed;
  if (f.out) c.output = *f.out;
  if (!f.a_values.empty()) {
    if (f.a_min || f.a_max || f.step) throw ConfigError("--a-values and --a-min/--a-max/--step are exclusive");
    c.a_values = f.a_values;
  } else if (f.a_min || f.a_max || f.step) {
    if (!f.a_min || !f.a_max || !f.step) throw ConfigError("--a-min, --a-max and --step go together");
    try {
      c.a_values = a_range(*f.a_min, *f.a_max, *f.step);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  if (f.threshold) c.threshold = *f.threshold;
  if (f.min_prominence) c.min_prominence = *f.min_prominence;
  if (f.delta) c.delta = *f.delta;
  if (f.refine_width) c.refine_width = *f.refine_width;
  if (f.detect_only) c.refine = false;
  if (f.threads) {
    c.threads = *f.threads;
  } else if (const char* env = std::getenv(kThreadsEnv); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ConfigError(std::string(kThreadsEnv) + " must be a positive integer");
    c.threads = static_cast<std::size_t>(v);
  }
  return c;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"stadium: Dirichlet eigenmodes of the stadium billiard"};
  app.set_help_flag("--help", "print this help and exit");  // -h is taken by the grid spacing
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.footer(
      "Precedence: command-line flags > --config JSON > built-in defaults. The worker count comes from\n"
      "--threads, else the STADIUM_THREADS environment variable, else 1.\n"
      "Exit codes: 0 ok, 1 config error, 2 partial convergence or failed sweep points,\n"
      "3 no crossings found, 4 validation failure.");

  Flags solve_flags, sweep_flags, cross_flags, render_flags;
  auto* solve = app.add_subcommand("solve", "eigenpairs, field dumps and contour plots for one geometry");
  add_science(solve, solve_flags, false, false);
  auto* sweep = app.add_subcommand("sweep", "eigenvalue curves over a range of a (resumable)");
  add_science(sweep, sweep_flags, true, false);
  auto* crossings = app.add_subcommand("crossings", "detect, refine and diagnose avoided crossings of a sweep");
  add_science(crossings, cross_flags, false, true);
  CrossingsInput cross_input;
  crossings->add_option("--curves", cross_input.curves, "curves.json (default <out>/curves.json)");
  auto* render = app.add_subcommand("render", "SVG from a field dump or a curve table");
  add_science(render, render_flags, false, false);
  RenderInput render_input;
  std::string render_field, render_curves, render_out;
  render->add_option("--field", render_field, "binary field dump");
  render->add_option("--curves", render_curves, "curves.json");
  render->add_option("--curve", render_input.curve_indices, "1-based curve numbers to plot")->delimiter(',');
  render->add_option("--levels", render_input.levels, "contour levels")->delimiter(',');
  render->add_option("--svg", render_out, "output SVG path")->required();
  auto* validate = app.add_subcommand("validate", "built-in oracle suite");
  ValidationOptions vopt;
  validate->add_flag("--quick", vopt.quick, "coarse grids only");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*solve) return cmd_solve(resolve(solve_flags), out, err);
    if (*sweep) return cmd_sweep(resolve(sweep_flags), out, err);
    if (*crossings) return cmd_crossings(resolve(cross_flags), cross_input, out, err);
    if (*render) {
      if (!render_field.empty()) render_input.field = render_field;
      if (!render_curves.empty()) render_input.curves = render_curves;
      render_input.out = render_out;
      return cmd_render(resolve(render_flags), render_input, out, err);
    }
    if (*validate) return cmd_validate(vopt, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace stadium::cli
