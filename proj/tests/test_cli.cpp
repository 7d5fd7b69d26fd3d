#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "ifm/cli/commands.hpp"
#include "ifm/interferometer.hpp"
#include "ifm/scan_io.hpp"

namespace fs = std::filesystem;
using doctest::Approx;
using nlohmann::json;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = ifm::cli::run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("ifm_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  fs::path operator/(const std::string& name) const { return path_ / name; }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

fs::path write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<ifm::scan::ScanRecord> read_records(const fs::path& p) {
  std::ifstream in(p);
  return ifm::io::read_scan_csv(in);
}

const char* kWireConfig = R"(# opaque wire
[interferometer]
t1 = 0.525
t2 = 0.462

[beam]
fwhm_um = 9.1

[object]
type = wire
center_um = 0
width_um = 95.5

[scan]
start_um = -120
stop_um = 120
step_um = 0.91
)";

const char* kAbsentConfig = R"([interferometer]
t1 = 0.5
t2 = 0.5
visibility = 0.933
[beam]
fwhm_um = 9.1
[object]
type = absent
[scan]
start_um = -20
stop_um = 20
step_um = 1
)";

const char* kKnifeConfig = R"([interferometer]
t1 = 0.467
t2 = 0.422
visibility = 0.933
[beam]
fwhm_um = 9.1
[object]
type = knife_edge
edge_um = 95
[scan]
start_um = 40
stop_um = 150
step_um = 0.5
)";

const char* kMcConfig = R"([interferometer]
t1 = 0.5
t2 = 0.5
[mc]
n = 50000
seed = 1998
)";

struct EnvGuard {
  explicit EnvGuard(const fs::path& dir) { ::setenv(ifm::cli::kOutputDirEnv, dir.c_str(), 1); }
  ~EnvGuard() { ::unsetenv(ifm::cli::kOutputDirEnv); }
};

}  // namespace

TEST_CASE("scan: wire config writes CSV, metadata and plot") {
  TempDir dir;
  const auto cfg = write_file(dir / "wire.cfg", kWireConfig);
  const auto csv = dir / "wire.csv";
  const auto o = run_cli({"scan", cfg.string(), "-o", csv.string(), "--plot"});
  REQUIRE(o.code == 0);
  CHECK(o.out.find("wrote") != std::string::npos);
  CHECK(slurp(csv).rfind("x_um,p_norm,p_ifm,p_abs,p_noresult\n", 0) == 0);
  const auto recs = read_records(csv);
  REQUIRE(recs.size() > 200);
  const auto& mid = recs[recs.size() / 2];
  CHECK(mid.p_ifm == Approx(0.2426).epsilon(1e-3));
  const json meta = json::parse(slurp(dir / "wire.meta.json"));
  CHECK(meta["object"]["type"] == "wire");
  CHECK(meta["mode"] == "intensity-averaged");
  CHECK(slurp(dir / "wire.svg").find("<svg") != std::string::npos);
}

TEST_CASE("scan: absent object with finite visibility") {
  TempDir dir;
  const auto cfg = write_file(dir / "absent.cfg", kAbsentConfig);
  REQUIRE(run_cli({"scan", cfg.string(), "-o", (dir / "absent.csv").string()}).code == 0);
  for (const auto& r : read_records(dir / "absent.csv")) CHECK(r.p_ifm == Approx(0.0347).epsilon(1e-3));
}

TEST_CASE("scan: bad configurations") {
  TempDir dir;
  SUBCASE("malformed line") {
    const auto cfg = write_file(dir / "bad.cfg", "[interferometer]\nt1 0.5\n");
    const auto o = run_cli({"scan", cfg.string()});
    CHECK(o.code == 2);
    CHECK(o.err.find("line 2") != std::string::npos);
  }
  SUBCASE("unknown key") {
    std::string text = kWireConfig;
    text += "colour = blue\n";
    const auto cfg = write_file(dir / "unknown.cfg", text);
    const auto o = run_cli({"scan", cfg.string()});
    CHECK(o.code == 2);
    CHECK(o.err.find("colour") != std::string::npos);
  }
  SUBCASE("out-of-range value") {
    const auto cfg = write_file(dir / "range.cfg", "[interferometer]\nt1 = 1.5\nt2 = 0.5\n");
    CHECK(run_cli({"scan", cfg.string()}).code == 2);
  }
  SUBCASE("missing file") { CHECK(run_cli({"scan", (dir / "nope.cfg").string()}).code == 3); }
  SUBCASE("no subcommand") { CHECK(run_cli({}).code == 2); }
  SUBCASE("unknown flag") { CHECK(run_cli({"sweep", "--frobnicate"}).code == 2); }
}

TEST_CASE("scan: thread count does not change output") {
  TempDir dir;
  const auto cfg = write_file(dir / "wire.cfg", kWireConfig);
  REQUIRE(run_cli({"scan", cfg.string(), "-o", (dir / "a.csv").string()}).code == 0);
  REQUIRE(run_cli({"scan", cfg.string(), "-o", (dir / "b.csv").string(), "--threads", "4"}).code == 0);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
}

TEST_CASE("sweep") {
  TempDir dir;
  SUBCASE("ideal") {
    const auto csv = dir / "sweep.csv";
    REQUIRE(run_cli({"sweep", "--eps", "0", "--points", "19", "-o", csv.string()}).code == 0);
    std::istringstream in(slurp(csv));
    std::string line;
    std::getline(in, line);
    CHECK(line == "r,p_ifm,eta");
    int rows = 0;
    bool saw_half = false;
    while (std::getline(in, line)) {
      ++rows;
      double r = 0, p = 0, eta = 0;
      char c1 = 0, c2 = 0;
      std::istringstream(line) >> r >> c1 >> p >> c2 >> eta;
      CHECK(eta == Approx(ifm::efficiency_ideal(r)).epsilon(1e-10));
      if (std::abs(r - 0.5) < 1e-12) {
        saw_half = true;
        CHECK(eta == Approx(1.0 / 3.0).epsilon(1e-10));
      }
    }
    CHECK(rows == 19);
    CHECK(saw_half);
  }
  SUBCASE("single point") {
    const auto csv = dir / "one.csv";
    REQUIRE(run_cli({"sweep", "--points", "1", "-o", csv.string(), "--plot"}).code == 0);
    CHECK(slurp(csv) == "r,p_ifm,eta\n" + ifm::io::format_number(0.5) + "," + ifm::io::format_number(0.25) + "," +
                            ifm::io::format_number(1.0 / 3.0) + "\n");
    CHECK(fs::exists(dir / "one.svg"));
  }
  SUBCASE("invalid point count") { CHECK(run_cli({"sweep", "--points", "0", "-o", (dir / "z.csv").string()}).code == 2); }
}

TEST_CASE("mc") {
  TempDir dir;
  const auto cfg = write_file(dir / "mc.cfg", kMcConfig);
  const auto a = run_cli({"mc", cfg.string()});
  const auto b = run_cli({"mc", cfg.string()});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const json j = json::parse(a.out);
  CHECK(j["n_total"] == 50000);
  CHECK(j["expected"]["ifm"].get<double>() == Approx(0.25));
  CHECK(j["n_ifm"].get<double>() / 50000.0 == Approx(0.25).epsilon(0.04));

  const auto sharded = run_cli({"mc", cfg.string(), "--shards", "3"});
  CHECK(sharded.out == run_cli({"mc", cfg.string(), "--shards", "3"}).out);
  CHECK(run_cli({"mc", cfg.string(), "--seed", "7"}).out != a.out);

  CHECK(run_cli({"mc", cfg.string(), "--n", "0"}).code == 2);
  const auto noseed = write_file(dir / "noseed.cfg", "[interferometer]\nt1 = 0.5\nt2 = 0.5\n");
  CHECK(run_cli({"mc", noseed.string(), "--n", "10"}).code == 2);

  REQUIRE(run_cli({"mc", cfg.string(), "-o", (dir / "tally.json").string()}).code == 0);
  CHECK(slurp(dir / "tally.json") == a.out);
}

TEST_CASE("analyze") {
  TempDir dir;
  SUBCASE("width of a wire") {
    const auto cfg = write_file(dir / "wire.cfg", kWireConfig);
    REQUIRE(run_cli({"scan", cfg.string(), "-o", (dir / "wire.csv").string()}).code == 0);
    const auto o = run_cli({"analyze", (dir / "wire.csv").string(), "--kind", "width"});
    REQUIRE(o.code == 0);
    const json j = json::parse(o.out);
    REQUIRE(j["widths"].size() == 2);
    for (const auto& w : j["widths"]) CHECK(std::abs(w["fwhm_um"].get<double>() - 95.5) / 95.5 < 0.02);
    CHECK(j["tool"] == "ifm");
    CHECK(j["kind"] == "width");

    const auto edge = run_cli({"analyze", (dir / "wire.csv").string(), "--kind", "edge"});
    CHECK(edge.code == 4);
    const auto phase = run_cli({"analyze", (dir / "wire.csv").string(), "--kind", "phase"});
    CHECK(phase.code == 4);  // intensity-averaged scans carry no phase
  }
  SUBCASE("knife edge resolution") {
    const auto cfg = write_file(dir / "knife.cfg", kKnifeConfig);
    REQUIRE(run_cli({"scan", cfg.string(), "-o", (dir / "knife.csv").string()}).code == 0);
    const auto o = run_cli({"analyze", (dir / "knife.csv").string(), "--kind", "edge", "-o",
                            (dir / "edge.json").string()});
    REQUIRE(o.code == 0);
    const json j = json::parse(slurp(dir / "edge.json"));
    CHECK(j["resolution"]["spot_fwhm_um"].get<double>() == Approx(9.1).epsilon(0.1 / 9.1));
  }
  SUBCASE("phase needs the sidecar") {
    const auto cfg = write_file(dir / "absent.cfg", kAbsentConfig);
    REQUIRE(run_cli({"scan", cfg.string(), "-o", (dir / "absent.csv").string()}).code == 0);
    fs::remove(dir / "absent.meta.json");
    CHECK(run_cli({"analyze", (dir / "absent.csv").string(), "--kind", "phase"}).code == 3);
  }
  SUBCASE("absent object has no width") {
    const auto cfg = write_file(dir / "absent.cfg", kAbsentConfig);
    REQUIRE(run_cli({"scan", cfg.string(), "-o", (dir / "absent.csv").string()}).code == 0);
    CHECK(run_cli({"analyze", (dir / "absent.csv").string()}).code == 4);
  }
  SUBCASE("bad inputs") {
    CHECK(run_cli({"analyze", (dir / "missing.csv").string()}).code == 3);
    write_file(dir / "junk.csv", "a,b\n1,2\n");
    CHECK(run_cli({"analyze", (dir / "junk.csv").string()}).code == 3);
    write_file(dir / "x.csv", "x_um,p_norm,p_ifm,p_abs,p_noresult\n");
    CHECK(run_cli({"analyze", (dir / "x.csv").string(), "--kind", "shape"}).code == 2);
  }
}

TEST_CASE("spot") {
  const auto o = run_cli({"spot", "--wavelength-nm", "670", "--focal-mm", "60", "--aperture-mm", "5", "--beam-mm", "25"});
  REQUIRE(o.code == 0);
  CHECK(o.out.find("T = 5.000000") != std::string::npos);
  CHECK(o.out.find("K = 1.032599") != std::string::npos);
  CHECK(o.out.find("d_um = 8.302098") != std::string::npos);
  CHECK(o.out.find("d_R_um = 9.796475") != std::string::npos);

  const auto k2 = run_cli({"spot", "--wavelength-nm", "670", "--focal-mm", "60", "--aperture-mm", "5", "--beam-mm", "10"});
  REQUIRE(k2.code == 0);
  CHECK(k2.out.find("K = 1.052650") != std::string::npos);

  CHECK(run_cli({"spot", "--wavelength-nm", "670", "--focal-mm", "60", "--aperture-mm", "5", "--beam-mm", "1"}).code == 2);
  CHECK(run_cli({"spot", "--wavelength-nm", "670"}).code == 2);
}

TEST_CASE("demo-figures") {
  TempDir dir;
  const auto out = dir / "figs";
  const auto o = run_cli({"demo-figures", out.string()});
  REQUIRE(o.code == 0);
  for (const char* f : {"knife_edge_scan.csv", "knife_edge_scan.meta.json", "knife_edge_scan.svg",
                        "wire_scan.csv", "thin_fiber_scan.csv", "thin_fiber_phase.json", "slit_scan.csv",
                        "efficiency_sweep.csv", "efficiency_sweep_crosstalk.csv", "efficiency_sweep.svg", "wire_widths.json",
                        "mc_balanced_opaque.json", "report.json"}) {
    CHECK_MESSAGE(fs::exists(out / f), f);
  }
  const json widths = json::parse(slurp(out / "wire_widths.json"));
  CHECK(widths["all_within_2pct"] == true);
  CHECK(widths["objects"].size() == 5);

  std::istringstream sweep(slurp(out / "efficiency_sweep.csv"));
  std::string line;
  std::getline(sweep, line);
  int rows = 0;
  while (std::getline(sweep, line)) {
    double r = 0, p = 0, eta = 0;
    char c = 0;
    std::istringstream(line) >> r >> c >> p >> c >> eta;
    CHECK(eta == Approx(ifm::efficiency_ideal(r)).epsilon(1e-10));
    ++rows;
  }
  CHECK(rows == 99);

  const json report = json::parse(slurp(out / "report.json"));
  CHECK(report["resolution"]["spot_fwhm_um"].get<double>() == Approx(9.1).epsilon(0.01));

  // Wire scan stops at lock loss.
  CHECK(read_records(out / "wire_scan.csv").back().x_um <= 110.0);

  const auto again = dir / "figs2";
  REQUIRE(run_cli({"demo-figures", again.string()}).code == 0);
  for (const auto& e : fs::directory_iterator(out)) {
    CHECK_MESSAGE(slurp(e.path()) == slurp(again / e.path().filename()), e.path().filename().string());
  }
}

TEST_CASE("output directory override") {
  TempDir dir;
  const auto cfg = write_file(dir / "wire.cfg", kWireConfig);
  const auto target = dir / "redirected";
  fs::create_directories(target);
  {
    EnvGuard env(target);
    CHECK(ifm::cli::resolve_output("a.csv") == target / "a.csv");
    CHECK(ifm::cli::resolve_output(dir / "abs.csv") == dir / "abs.csv");
    REQUIRE(run_cli({"scan", cfg.string(), "-o", "wire.csv"}).code == 0);
    REQUIRE(run_cli({"sweep", "--points", "3"}).code == 0);
  }
  CHECK(fs::exists(target / "wire.csv"));
  CHECK(fs::exists(target / "wire.meta.json"));
  CHECK(fs::exists(target / "sweep.csv"));
  CHECK(ifm::cli::resolve_output("a.csv") == fs::path("a.csv"));
}

TEST_CASE("unwritable output maps to the IO exit code") {
  TempDir dir;
  const auto cfg = write_file(dir / "wire.cfg", kWireConfig);
  CHECK(run_cli({"scan", cfg.string(), "-o", (dir / "no" / "such" / "dir" / "w.csv").string()}).code == 3);
}

TEST_CASE("bundled configs") {
  TempDir dir;
  const fs::path configs = IFM_CONFIG_DIR;
  for (const char* name : {"wire", "absent", "knife_edge", "filament", "hair"}) {
    const auto csv = dir / (std::string(name) + ".csv");
    CHECK_MESSAGE(run_cli({"scan", (configs / (std::string(name) + ".toml")).string(), "-o", csv.string()}).code == 0,
                  name);
  }
  const auto wire = read_records(dir / "wire.csv");
  CHECK(wire[wire.size() / 2].p_ifm == Approx(0.2426).epsilon(1e-3));
  const json phase = json::parse(run_cli({"analyze", (dir / "filament.csv").string(), "--kind", "phase"}).out);
  CHECK(phase["phase_profile"].size() == read_records(dir / "filament.csv").size());
  const json edge = json::parse(run_cli({"analyze", (dir / "knife_edge.csv").string(), "--kind", "edge"}).out);
  CHECK(edge["resolution"]["spot_fwhm_um"].get<double>() == Approx(8.30).epsilon(0.01));
  CHECK(read_records(dir / "hair.csv").back().x_um <= 80.0);
  const json mc = json::parse(run_cli({"mc", (configs / "balanced_mc.toml").string(), "--n", "1000"}).out);
  CHECK(mc["n_total"] == 1000);
}
