#include <loewner/acceptance.hpp>
#include <loewner/io.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

using namespace loewner;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

struct Output {
  std::string dir;
  bool svg = false;

  std::string path(const std::string& name) const {
    fs::create_directories(dir);
    return (fs::path(dir) / name).string();
  }

  void json_file(const std::string& name, const json& j) const {
    auto f = io_detail::open_out(path(name));
    f << j.dump(2) << '\n';
  }

  void svg_file(const std::string& name, const std::vector<std::vector<cplx>>& curves) const {
    if (!svg) return;
    auto f = io_detail::open_out(path(name));
    write_svg(f, curves);
  }
};

std::vector<cplx> trace_points(const Trace& g) {
  std::vector<cplx> z;
  for (const auto& p : g.pts) z.push_back(p.z);
  return z;
}

std::vector<cplx> driving_graph(const DrivingTerm& l) {
  std::vector<cplx> z;
  for (std::size_t k = 0; k < l.t.size(); ++k) z.emplace_back(l.t[k], l.value[k]);
  return z;
}

CompactSet read_set(const std::string& path) {
  auto f = io_detail::open_in(path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), 0);
  }
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const auto& c = j.at("center");
    const cplx center(c.at(0).get<double>(), c.at(1).get<double>());
    if (kind == "disk") return CompactSet::disk(center, j.at("radius").get<double>());
    if (kind == "segment") return CompactSet::segment(center, j.at("half_length").get<double>());
    throw ArgumentError("set descriptor: unknown kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("set descriptor: ") + e.what());
  }
}

void run_exact(const Output& out, double kappa, int samples, double s_max) {
  if (samples < 2) throw ArgumentError("exact: --samples must be at least 2");
  const FamilyParams p = params_from_kappa(kappa);
  const double t_end = -std::expm1(-s_max);
  std::vector<double> s;
  for (int k = 0; k < samples; ++k) s.push_back(-std::log1p(-t_end * k / (samples - 1)));
  s.front() = 0.0;
  const Trace g = trace_explicit(p, s);
  json j;
  j["command"] = "exact";
  j["kappa"] = kappa;
  j["samples"] = samples;
  j["smax"] = s_max;
  j["regime"] = regime_name(p.regime);
  j["theta"] = p.theta;
  j["A"] = p.A;
  j["B"] = p.B;
  j["beta"] = to_json(p.beta);
  j["endpoint"] = to_json(p.endpoint);
  j["collision_angle"] = p.regime == Regime::collision ? json(p.collision_angle()) : json(nullptr);
  out.json_file("params.json", j);
  write_file(out.path("trace.csv"), [](std::ostream& o, const Trace& t) { write_trace_csv(o, t); }, g);
  out.svg_file("trace.svg", {trace_points(g)});
}

SolverConfig solver_config(int steps, const std::string& grid) {
  SolverConfig cfg;
  cfg.n_steps = steps;
  if (grid == "geometric_s") {
    cfg.grid = GridKind::geometric_s;
  } else if (grid != "uniform") {
    throw ArgumentError("unknown grid '" + grid + "'");
  }
  validate(cfg);
  return cfg;
}

void run_trace(const Output& out, const std::string& driving, int steps, const std::string& grid) {
  const DrivingTerm l = read_driving_csv(driving);
  const Trace g = solve_trace(l, solver_config(steps, grid));
  json j;
  j["command"] = "trace";
  j["driving"] = driving;
  j["steps"] = steps;
  j["grid"] = grid;
  j["T"] = g.T;
  j["endpoint"] = to_json(g.pts.back().z);
  out.json_file("run.json", j);
  write_file(out.path("trace.csv"), [](std::ostream& o, const Trace& t) { write_trace_csv(o, t); }, g);
  out.svg_file("trace.svg", {trace_points(g)});
}

void run_drive(const Output& out, const std::string& curve) {
  const CurveSamples c = read_curve_csv(curve);
  const DrivingTerm l = drive_curve(c);
  json j;
  j["command"] = "drive";
  j["curve"] = curve;
  j["samples"] = c.points.size();
  j["capacity"] = l.T;
  out.json_file("run.json", j);
  write_file(out.path("driving.csv"), [](std::ostream& o, const DrivingTerm& d) { write_driving_csv(o, d); }, l);
  out.svg_file("driving.svg", {driving_graph(l)});
}

void run_spiral(const Output& out, const std::string& set, double t_max, int samples) {
  if (!(t_max > 0.0 && t_max < 1.0)) throw ArgumentError("spiral: --tmax must be in (0,1)");
  const CompactSet a = read_set(set);
  const SpiralDriving sd = spiral_driving_full(a, samples);
  const DrivingTerm l = truncate_driving(sd.full, 1.0 - t_max);
  json j;
  j["command"] = "spiral";
  j["set"] = set;
  j["kind"] = a.kind == CompactSet::Kind::disk ? "disk" : "segment";
  j["center"] = to_json(a.center);
  j["size"] = a.size;
  j["tmax"] = t_max;
  j["samples"] = samples;
  j["capacity"] = sd.capacity;
  out.json_file("run.json", j);
  write_file(out.path("curve.csv"), [](std::ostream& o, const CurveSamples& c) { write_curve_csv(o, c); },
             sd.curve.samples);
  write_file(out.path("driving.csv"), [](std::ostream& o, const DrivingTerm& d) { write_driving_csv(o, d); }, l);
  out.svg_file("curve.svg", {sd.curve.samples.points});
}

void run_analyze(const Output& out, const std::string& driving, double a, int steps) {
  const DrivingTerm l = read_driving_csv(driving);
  const AsymptoteReport rep = estimate_sqrt_asymptote(l, a);
  const RegularityReport reg = regularity(l, {0.04, 0.01, 0.0025});
  json j;
  j["command"] = "analyze";
  j["driving"] = driving;
  j["a"] = a;
  j["steps"] = steps;
  j["lambda_at_1"] = rep.lambda_at_1;
  j["lambda_at_1_error"] = rep.lambda_at_1_error;
  j["kappa_limit"] = rep.kappa_limit;
  j["truncated"] = rep.truncated;
  json hats = json::array();
  for (std::size_t n = 0; n < rep.kappa_hats.size(); ++n)
    hats.push_back({{"rem", rep.rem_n[n + 1]}, {"kappa_hat", rep.kappa_hats[n].second}});
  j["kappa_hats"] = hats;
  j["deltas"] = reg.deltas;
  j["local_lip_norms"] = reg.local_lip_norms;
  const Trace g = solve_trace(l, acceptance::detail::deep_config(steps));
  const TailGeometry tg = measure_tail_geometry(g, rep.kappa_limit);
  j["regime"] = tail_regime_name(tg.regime);
  j["endpoint"] = to_json(tg.endpoint);
  j["endpoint_error"] = tg.endpoint_error;
  j["angle"] = tg.angle;
  j["contact_angle"] = tg.contact_angle;
  j["center"] = to_json(tg.center);
  j["pitch"] = tg.pitch;
  j["diagnostics"] = tg.diagnostics;
  out.json_file("report.json", j);
  out.svg_file("trace.svg", {trace_points(g)});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chordal Loewner evolution toolkit"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  Output out;
  const char* env = std::getenv("LOEWNER_OUT_DIR");
  out.dir = env && *env ? env : ".";
  app.add_option("--out", out.dir, "output directory (default: $LOEWNER_OUT_DIR or .)");
  app.add_flag("--svg", out.svg, "also write SVG plots");

  auto* exact = app.add_subcommand("exact", "explicit family parameters and trace");
  double kappa = 0.0, s_max = 20.0;
  int samples = 1000;
  exact->add_option("--kappa", kappa)->required();
  exact->add_option("--samples", samples)->capture_default_str();
  exact->add_option("--smax", s_max, "last sample at log-time smax")->capture_default_str();

  auto* trace = app.add_subcommand("trace", "forward solve a driving CSV");
  std::string driving, grid = "uniform";
  int steps = 1024;
  trace->add_option("--driving", driving)->required();
  trace->add_option("--steps", steps)->capture_default_str();
  trace->add_option("--grid", grid)->check(CLI::IsMember({"uniform", "geometric_s"}))->capture_default_str();

  auto* drive = app.add_subcommand("drive", "driving term of a curve CSV");
  std::string curve;
  drive->add_option("--curve", curve)->required();

  auto* spiral = app.add_subcommand("spiral", "spiral onto a compact set and its driving term");
  std::string set;
  double t_max = 1.0 - std::ldexp(1.0, -16);
  int spiral_samples = 12000;
  spiral->add_option("--set", set)->required();
  spiral->add_option("--tmax", t_max)->capture_default_str();
  spiral->add_option("--samples", spiral_samples)->capture_default_str();

  auto* analyze = app.add_subcommand("analyze", "sqrt asymptote, regularity and tail geometry");
  double a = 0.5;
  int analyze_steps = 8192;
  analyze->add_option("--driving", driving)->required();
  analyze->add_option("--a", a)->capture_default_str();
  analyze->add_option("--steps", analyze_steps, "forward solve steps for the tail")->capture_default_str();

  auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*exact) run_exact(out, kappa, samples, s_max);
    if (*trace) run_trace(out, driving, steps, grid);
    if (*drive) run_drive(out, curve);
    if (*spiral) run_spiral(out, set, t_max, spiral_samples);
    if (*analyze) run_analyze(out, driving, a, analyze_steps);
    if (*selftest) return acceptance::run(std::cout) ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
