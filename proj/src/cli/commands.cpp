#include "ifm/cli/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "ifm/beam_optics.hpp"
#include "ifm/cli/run_config.hpp"
#include "ifm/errors.hpp"
#include "ifm/interferometer.hpp"
#include "ifm/object_profile.hpp"
#include "ifm/scan_analysis.hpp"
#include "ifm/scan_engine.hpp"
#include "ifm/scan_io.hpp"
#include "ifm/svg_plot.hpp"

namespace ifm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json report_header(const std::string& kind, const std::string& source) {
  return {{"tool", "ifm"}, {"tool_version", IFM_VERSION}, {"kind", kind}, {"source", source}};
}

json width_json(const analysis::WidthEstimate& w) {
  return {{"channel", analysis::to_string(w.channel)},
          {"fwhm_um", w.fwhm_um},
          {"half_max_level", w.half_max_level},
          {"left_um", w.left_um},
          {"right_um", w.right_um}};
}

json resolution_json(const analysis::ResolutionEstimate& r) {
  return {{"spot_fwhm_um", r.spot_fwhm_um}, {"rayleigh_um", r.rayleigh_um}};
}

json phase_json(const std::vector<analysis::PhasePoint>& pts) {
  json arr = json::array();
  for (const auto& p : pts) {
    arr.push_back({{"x_um", p.x_um},
                   {"phi_rad", p.phi ? json(*p.phi) : json(nullptr)},
                   {"phi_deg", p.phi ? json(*p.phi * 180.0 / std::numbers::pi) : json(nullptr)}});
  }
  return arr;
}

json sweep_json(const analysis::SweepTable& t) {
  json arr = json::array();
  for (const auto& r : t.rows) arr.push_back({{"r", r.r}, {"p_ifm", r.p_ifm}, {"eta", r.eta}});
  return arr;
}

std::string scan_csv(const scan::ScanResult& r) {
  std::ostringstream ss;
  io::write_scan_csv(ss, r.records);
  return ss.str();
}

plot::PlotSpec scan_plot(const scan::ScanResult& r, const std::string& title) {
  plot::Series ifm{"P_ifm", {}, {}, false, "#d62728"};
  plot::Series norm{"P_norm", {}, {}, true, "#1f77b4"};
  for (const auto& rec : r.records) {
    ifm.x.push_back(rec.x_um);
    ifm.y.push_back(rec.p_ifm);
    norm.x.push_back(rec.x_um);
    norm.y.push_back(rec.p_norm);
  }
  return {title, "position (um)", "P_ifm", "P_norm", {ifm, norm}};
}

plot::PlotSpec sweep_plot(const std::vector<std::pair<std::string, analysis::SweepTable>>& tables) {
  plot::PlotSpec spec{"Efficiency and P_ifm vs reflectance", "reflectance R", "probability / efficiency", "", {}};
  const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"};
  std::size_t c = 0;
  for (const auto& [label, t] : tables) {
    plot::Series eta{"eta " + label, {}, {}, false, colors[c++ % 4]};
    plot::Series pifm{"P_ifm " + label, {}, {}, false, colors[c++ % 4]};
    for (const auto& row : t.rows) {
      eta.x.push_back(row.r);
      eta.y.push_back(row.eta);
      pifm.x.push_back(row.r);
      pifm.y.push_back(row.p_ifm);
    }
    spec.series.push_back(std::move(eta));
    spec.series.push_back(std::move(pifm));
  }
  return spec;
}

std::string sweep_csv(const analysis::SweepTable& t) {
  std::ostringstream ss;
  io::write_sweep_csv(ss, t);
  return ss.str();
}

void write_scan_outputs(const scan::ScanResult& result, const fs::path& csv, bool plot, const std::string& title) {
  io::write_text_file(csv, scan_csv(result));
  io::write_text_file(io::sidecar_path(csv), dump(io::metadata_to_json(result.metadata)));
  if (plot) {
    fs::path svg = csv;
    svg.replace_extension(".svg");
    io::write_text_file(svg, plot::render_svg(scan_plot(result, title)));
  }
}

// ---- scan ---------------------------------------------------------------

struct ScanArgs {
  std::string config;
  std::string output;
  bool plot = false;
  unsigned threads = 1;
};

int cmd_scan(const ScanArgs& a, std::ostream& out) {
  const RunConfig cfg = load_run_config(a.config);
  if (!cfg.beam_fwhm_um) throw ConfigError(0, "scan needs a [beam] section");
  if (!cfg.object) throw ConfigError(0, "scan needs an [object] section");
  if (!cfg.scan) throw ConfigError(0, "scan needs a [scan] section");
  const fs::path csv = resolve_output(a.output.empty() ? fs::path(a.config).stem().string() + ".csv" : a.output);
  scan::ScanOptions opts;
  opts.threads = a.threads;
  const auto result = scan::run_scan(*cfg.scan, cfg.interferometer, *cfg.object, *cfg.beam_fwhm_um, opts);
  write_scan_outputs(result, csv, a.plot, "Scan: " + cfg.object->kind());
  out << fmt::format("wrote {} records to {}\n", result.records.size(), csv.string());
  return kExitOk;
}

// ---- sweep --------------------------------------------------------------

struct SweepArgs {
  double eps = 0.0;
  int points = 19;
  double t = 0.0;
  double phi = 0.0;
  std::string output = "sweep.csv";
  bool plot = false;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  const auto rs = analysis::reflectance_grid(a.points);
  const auto table = analysis::efficiency_sweep(rs, ObjectSample{a.t, a.phi}, a.eps);
  const fs::path csv = resolve_output(a.output);
  io::write_text_file(csv, sweep_csv(table));
  if (a.plot) {
    fs::path svg = csv;
    svg.replace_extension(".svg");
    io::write_text_file(svg, plot::render_svg(sweep_plot({{fmt::format("eps={:g}", a.eps), table}})));
  }
  out << fmt::format("wrote {} rows to {}\n", table.rows.size(), csv.string());
  return kExitOk;
}

// ---- mc -----------------------------------------------------------------

struct McArgs {
  std::string config;
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> seed;
  unsigned shards = 1;
  std::string output;
};

int cmd_mc(const McArgs& a, std::ostream& out) {
  const RunConfig cfg = load_run_config(a.config);
  const auto n = a.n ? a.n : cfg.mc.n;
  const auto seed = a.seed ? a.seed : cfg.mc.seed;
  if (!n) throw ConfigError(0, "photon count missing: give --n or [mc] n");
  if (*n == 0) throw ConfigError(0, "photon count must be at least 1");
  if (!seed) throw ConfigError(0, "seed missing: give --seed or [mc] seed");
  if (a.shards == 0) throw ConfigError(0, "--shards must be at least 1");
  const auto tally = scan::monte_carlo(cfg.interferometer, cfg.mc.sample, *n, *seed, a.shards);
  json j = io::tally_to_json(tally);
  const auto p = measure(cfg.interferometer, cfg.mc.sample);
  j["expected"] = {{"ifm", p.p_ifm}, {"abs", p.p_abs}, {"noresult", p.p_noresult}};
  if (a.output.empty()) {
    out << dump(j);
  } else {
    io::write_text_file(resolve_output(a.output), dump(j));
  }
  return kExitOk;
}

// ---- analyze ------------------------------------------------------------

struct AnalyzeArgs {
  std::string scan;
  std::string kind = "width";
  std::string channel = "both";
  std::string output;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  scan::ScanResult result;
  {
    std::istringstream in(io::read_text_file(a.scan));
    result.records = io::read_scan_csv(in);
  }
  const fs::path meta_path = io::sidecar_path(a.scan);
  const bool have_meta = fs::exists(meta_path);
  if (have_meta) {
    try {
      result.metadata = io::metadata_from_json(json::parse(io::read_text_file(meta_path)));
    } catch (const json::exception& e) {
      throw IoError("malformed metadata " + meta_path.string() + ": " + e.what());
    }
  }

  json report = report_header(a.kind, a.scan);
  if (a.kind == "width") {
    std::vector<analysis::Channel> channels;
    if (a.channel == "both" || a.channel == "transmission") channels.push_back(analysis::Channel::transmission);
    if (a.channel == "both" || a.channel == "ifm") channels.push_back(analysis::Channel::ifm);
    report["widths"] = json::array();
    for (auto ch : channels) report["widths"].push_back(width_json(analysis::width_fwhm(result, ch)));
  } else if (a.kind == "edge") {
    report["resolution"] = resolution_json(analysis::knife_edge_resolution(result));
  } else if (a.kind == "phase") {
    if (!have_meta) throw IoError("phase analysis needs the metadata sidecar " + meta_path.string());
    report["phase_profile"] = phase_json(analysis::phase_profile(result, result.metadata.config));
  } else {
    throw ConfigError(0, "--kind must be width, edge or phase");
  }

  if (a.output.empty()) {
    out << dump(report);
  } else {
    io::write_text_file(resolve_output(a.output), dump(report));
  }
  return kExitOk;
}

// ---- spot ---------------------------------------------------------------

struct SpotArgs {
  double wavelength_nm = 0.0;
  double focal_mm = 0.0;
  double aperture_mm = 0.0;
  double beam_mm = 0.0;
};

int cmd_spot(const SpotArgs& a, std::ostream& out) {
  const beam::BeamSpec spec{a.wavelength_nm * 1e-9, a.focal_mm * 1e-3, a.aperture_mm * 1e-3, a.beam_mm * 1e-3};
  const auto p = beam::spot_fwhm(spec);
  out << fmt::format("T = {:.6f}\nK = {:.6f}\nd_um = {:.6f}\nd_R_um = {:.6f}\n", spec.truncation(), p.k_factor,
                     p.fwhm_m * 1e6, p.rayleigh_m * 1e6);
  return kExitOk;
}

// ---- demo-figures -------------------------------------------------------

struct DemoScan {
  std::string name;
  std::string title;
  EvConfig config;
  objects::ObjectProfile object;
  scan::ScanPlan plan;
  double fwhm_um;
};

objects::Tabulated illustrative_thin_fiber() {
  // Opaque flanks, a transparent core with P_norm = 0.69 and a 104 degree
  // phase lag at the centre.
  const double t_core = std::sqrt(0.69);
  const double phi_core = 103.58 * std::numbers::pi / 180.0;
  return {{{-41.0, 1.0, 0.0},
           {-40.0, 0.0, 0.0},
           {-12.0, 0.0, 0.0},
           {-4.0, t_core, phi_core},
           {4.0, t_core, phi_core},
           {12.0, 0.0, 0.0},
           {40.0, 0.0, 0.0},
           {41.0, 1.0, 0.0}}};
}

int cmd_demo(const std::string& dir_arg, std::ostream& out) {
  const fs::path dir = resolve_output(dir_arg);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  const EvConfig knife_cfg{0.467, 0.422, 0.933, 0.0};
  const EvConfig wire_cfg{0.525, 0.462, 0.951, 0.0};
  const double fwhm = 9.1;

  std::vector<DemoScan> scans{
      {"knife_edge_scan", "Knife edge", knife_cfg, objects::ObjectProfile(objects::KnifeEdge{95.0, objects::Side::right}),
       {40.0, 150.0, 0.5, scan::ScanMode::intensity_averaged, std::nullopt}, fwhm},
      {"wire_scan", "Metal wire (95.5 um)", wire_cfg, objects::ObjectProfile(objects::Wire{0.0, 95.5}),
       {-130.0, 130.0, 0.91, scan::ScanMode::intensity_averaged, scan::Drift{5e-5, 110.0}}, fwhm},
      {"thin_fiber_scan", "Thin optical fiber (illustrative)", EvConfig{0.5, 0.5, 1.0, 0.0},
       objects::ObjectProfile(illustrative_thin_fiber()),
       {-70.0, 70.0, 0.91, scan::ScanMode::point_sampled, std::nullopt}, fwhm},
      {"slit_scan", "Narrow slit", EvConfig{0.525, 0.462, 0.96, 0.0},
       objects::ObjectProfile(objects::Slit{0.0, 1.5, 0.0}),
       {-30.0, 30.0, 0.91, scan::ScanMode::intensity_averaged, std::nullopt}, fwhm},
  };

  json summary = report_header("demo", "demo-figures");
  for (const auto& s : scans) {
    const auto result = scan::run_scan(s.plan, s.config, s.object, s.fwhm_um);
    write_scan_outputs(result, dir / (s.name + ".csv"), true, s.title);
    if (s.name == "knife_edge_scan") {
      summary["resolution"] = resolution_json(analysis::knife_edge_resolution(result));
    } else if (s.name == "thin_fiber_scan") {
      json phase = report_header("phase", s.name + ".csv");
      phase["phase_profile"] = phase_json(analysis::phase_profile(result, s.config));
      io::write_text_file(dir / "thin_fiber_phase.json", dump(phase));
    }
  }

  // Efficiency sweeps with an opaque object.
  const auto rs = analysis::reflectance_grid(99);
  const auto ideal = analysis::efficiency_sweep(rs, ObjectSample::opaque(), 0.0);
  const auto leaky = analysis::efficiency_sweep(rs, ObjectSample::opaque(), 0.01);
  io::write_text_file(dir / "efficiency_sweep.csv", sweep_csv(ideal));
  io::write_text_file(dir / "efficiency_sweep_crosstalk.csv", sweep_csv(leaky));
  io::write_text_file(dir / "efficiency_sweep.svg", plot::render_svg(sweep_plot({{"eps=0", ideal}, {"eps=0.01", leaky}})));
  summary["sweep"] = sweep_json(analysis::efficiency_sweep(analysis::reflectance_grid(19), ObjectSample::opaque(), 0.0));

  // Width recovery for opaque wires at the scale of the measured objects.
  json widths = report_header("width", "simulated wires");
  widths["objects"] = json::array();
  bool all_ok = true;
  for (double w : {20.0, 50.0, 95.5, 159.1, 207.9}) {
    const double half = 0.5 * w + 5.0 * fwhm;
    const scan::ScanPlan plan{-half, half, fwhm / 10.0, scan::ScanMode::intensity_averaged, std::nullopt};
    const auto result = scan::run_scan(plan, EvConfig{0.525, 0.462, 1.0, 0.0},
                                       objects::ObjectProfile(objects::Wire{0.0, w}), fwhm);
    json entry{{"true_width_um", w}, {"widths", json::array()}};
    for (auto ch : {analysis::Channel::transmission, analysis::Channel::ifm}) {
      const auto est = analysis::width_fwhm(result, ch);
      const double rel = std::abs(est.fwhm_um - w) / w;
      all_ok = all_ok && rel < 0.02;
      json wj = width_json(est);
      wj["relative_error"] = rel;
      entry["widths"].push_back(wj);
    }
    widths["objects"].push_back(entry);
  }
  widths["all_within_2pct"] = all_ok;
  io::write_text_file(dir / "wire_widths.json", dump(widths));
  summary["widths"] = widths["objects"];

  const auto tally = scan::monte_carlo(EvConfig::balanced(), ObjectSample::opaque(), 1'000'000, 1998);
  io::write_text_file(dir / "mc_balanced_opaque.json", dump(io::tally_to_json(tally)));

  io::write_text_file(dir / "report.json", dump(summary));
  out << fmt::format("wrote demo figures to {}\n", dir.string());
  return kExitOk;
}

}  // namespace

fs::path resolve_output(const fs::path& p) {
  const char* env = std::getenv(kOutputDirEnv);
  if (env != nullptr && *env != '\0' && p.is_relative()) return fs::path(env) / p;
  return p;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interaction-free measurement and imaging simulator", "ifm"};
  app.require_subcommand(1);
  app.set_version_flag("--version", IFM_VERSION);

  std::function<int()> action;

  ScanArgs scan_args;
  auto* scan_cmd = app.add_subcommand("scan", "Simulate a raster scan from a config file");
  scan_cmd->add_option("config", scan_args.config, "Run configuration")->required();
  scan_cmd->add_option("-o,--output", scan_args.output, "Scan CSV path (default <config stem>.csv)");
  scan_cmd->add_flag("--plot", scan_args.plot, "Also write an SVG plot");
  scan_cmd->add_option("--threads", scan_args.threads, "Worker threads (0 = all cores)");
  scan_cmd->callback([&] { action = [&] { return cmd_scan(scan_args, out); }; });

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Efficiency and P_ifm versus reflectance (R1 = T2 = R)");
  sweep_cmd->add_option("--eps", sweep_args.eps, "PBS cross-talk");
  sweep_cmd->add_option("--points", sweep_args.points, "Number of reflectances, r_k = k/(points+1)");
  sweep_cmd->add_option("--t", sweep_args.t, "Object amplitude transmittance (default opaque)");
  sweep_cmd->add_option("--phi", sweep_args.phi, "Object phase, radians");
  sweep_cmd->add_option("-o,--output", sweep_args.output, "Sweep CSV path");
  sweep_cmd->add_flag("--plot", sweep_args.plot, "Also write an SVG plot");
  sweep_cmd->callback([&] { action = [&] { return cmd_sweep(sweep_args, out); }; });

  McArgs mc_args;
  auto* mc_cmd = app.add_subcommand("mc", "Single-photon Monte Carlo tally");
  mc_cmd->add_option("config", mc_args.config, "Run configuration")->required();
  mc_cmd->add_option("--n", mc_args.n, "Photon count (overrides [mc] n)");
  mc_cmd->add_option("--seed", mc_args.seed, "RNG seed (overrides [mc] seed)");
  mc_cmd->add_option("--shards", mc_args.shards, "Parallel shards");
  mc_cmd->add_option("-o,--output", mc_args.output, "Tally JSON path (default stdout)");
  mc_cmd->callback([&] { action = [&] { return cmd_mc(mc_args, out); }; });

  AnalyzeArgs an_args;
  auto* an_cmd = app.add_subcommand("analyze", "Analyze a scan CSV");
  an_cmd->add_option("scan", an_args.scan, "Scan CSV")->required();
  an_cmd->add_option("--kind", an_args.kind, "width | edge | phase")
      ->check(CLI::IsMember({"width", "edge", "phase"}));
  an_cmd->add_option("--channel", an_args.channel, "transmission | ifm | both (width only)")
      ->check(CLI::IsMember({"transmission", "ifm", "both"}));
  an_cmd->add_option("-o,--output", an_args.output, "Report JSON path (default stdout)");
  an_cmd->callback([&] { action = [&] { return cmd_analyze(an_args, out); }; });

  SpotArgs spot_args;
  auto* spot_cmd = app.add_subcommand("spot", "Predicted focused spot size and Rayleigh resolution");
  spot_cmd->add_option("--wavelength-nm", spot_args.wavelength_nm)->required();
  spot_cmd->add_option("--focal-mm", spot_args.focal_mm)->required();
  spot_cmd->add_option("--aperture-mm", spot_args.aperture_mm)->required();
  spot_cmd->add_option("--beam-mm", spot_args.beam_mm)->required();
  spot_cmd->callback([&] { action = [&] { return cmd_spot(spot_args, out); }; });

  std::string demo_dir = "figures";
  auto* demo_cmd = app.add_subcommand("demo-figures", "Write the demonstration scans, sweeps and width table");
  demo_cmd->add_option("outdir", demo_dir, "Output directory");
  demo_cmd->callback([&] { action = [&] { return cmd_demo(demo_dir, out); }; });

  std::vector<const char*> argv{"ifm"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return action();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const AnalysisError& e) {
    err << "analysis error: " << e.what() << '\n';
    return kExitAnalysis;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitAnalysis;
  }
}

}  // namespace ifm::cli
