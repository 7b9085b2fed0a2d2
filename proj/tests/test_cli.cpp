#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "collapse/csv.hpp"
#include "collapse/runner.hpp"

using namespace collapse;
using namespace collapse::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("collapse_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> violations_of(std::string_view text, std::optional<ExperimentKind> kind = std::nullopt) {
  try {
    parse_config(text, kind);
  } catch (const ValidationError& e) {
    return e.violations();
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, std::string_view needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

std::vector<std::vector<double>> numeric_rows(const std::string& csv) {
  std::vector<std::vector<double>> rows;
  std::stringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("parse_config fills defaults", "[cli]") {
  const auto cfg = parse_config(R"({"kind": "SternGerlach", "u_mean": 1, "d_mean": 2, "t": 0.5})");
  CHECK(cfg.kind == ExperimentKind::SternGerlach);
  CHECK(cfg.hbar == 1.0);
  CHECK(cfg.seed == 0);
  const auto& p = std::get<SternGerlachParams>(cfg.params);
  CHECK(p.distribution == sg::NoiseDistribution::UniformSymmetric);
  CHECK(p.t_grid == std::vector<double>{0.5});
  CHECK(p.samples == 10'000);

  const auto echoed = parse_config(cfg.to_json().dump());
  CHECK(echoed.to_json() == cfg.to_json());
}

TEST_CASE("parse_config reports every violation", "[cli]") {
  CHECK(mentions(violations_of(R"({"kind": "SternGerlach", "u_mean": 1, "d_mean": 1, "t": 1, "samples": 0})"),
                 "samples"));
  CHECK(mentions(violations_of(R"({"kind": "SternGerlach", "u_mean": 1, "d_mean": 1, "t_grid": [0, 1, 1]})"),
                 "t_grid[2]"));

  const auto many = violations_of(
      R"({"kind": "SternGerlach", "u_mean": -1, "d_mean": "x", "t": 1, "hbar": 0, "samples": 0, "bogus": 3,
          "distribution": "Cauchy"})");
  CHECK(many.size() == 6);
  CHECK(mentions(many, "u_mean"));
  CHECK(mentions(many, "d_mean"));
  CHECK(mentions(many, "hbar"));
  CHECK(mentions(many, "samples"));
  CHECK(mentions(many, "bogus"));
  CHECK(mentions(many, "distribution"));

  CHECK(mentions(violations_of(R"({"u_mean": 1, "d_mean": 1, "t": 1})"), "kind"));
  CHECK(mentions(violations_of(R"({"kind": "Environment", "u_mean": 1, "d_mean": 1, "t": 1})",
                               ExperimentKind::SternGerlach),
                 "kind"));
  CHECK(mentions(violations_of(R"({"kind": "VisibilityCurve", "a_grid": [1, 0.5]})"), "a_grid[1]"));
  CHECK(mentions(violations_of(R"({"kind": "Scaling", "n_max": 13, "backends": ["DenseExpm"]})"), "n_max"));
  CHECK(mentions(violations_of(R"({"kind": "Scaling", "repeats": 1})"), "repeats"));
  CHECK(mentions(violations_of(R"({"kind": "Scaling", "backends": ["Magic"]})"), "backends[0]"));
  CHECK(mentions(violations_of(R"({"kind": "SternGerlach", "u_mean": 1, "d_mean": 1, "t": 1, "t_grid": [1]})"),
                 "t"));
  CHECK(mentions(violations_of(R"({"kind": "SternGerlach", "seed": -4, "u_mean": 1, "d_mean": 1, "t": 1})"),
                 "seed"));
}

TEST_CASE("parse_config rejects malformed text", "[cli]") {
  CHECK_THROWS_AS(parse_config("{ not json"), ParseError);
  CHECK_THROWS_AS(parse_config("[1, 2]"), ParseError);
}

TEST_CASE("kind defaults to the subcommand", "[cli]") {
  const auto cfg = parse_config(R"({"a_grid": [0, 1, 2]})", ExperimentKind::VisibilityCurve);
  CHECK(cfg.kind == ExperimentKind::VisibilityCurve);
  CHECK(subcommand_name(cfg.kind) == "visibility");
}

TEST_CASE("number formatting", "[cli]") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_number(std::uint64_t{18446744073709551615ULL}) == "18446744073709551615");
}

TEST_CASE("stern-gerlach run is deterministic and well-formed", "[cli]") {
  const auto cfg = parse_config(R"({"kind": "SternGerlach", "seed": 5, "u_mean": 3, "d_mean": 1.5,
                                    "t_grid": [0, 0.25, 1, 4], "samples": 20000})");
  const fs::path a = scratch("sg_a"), b = scratch("sg_b");
  RunOptions oa{a, ".", 1}, ob{b, ".", 3};
  const auto ra = run(cfg, oa);
  const auto rb = run(cfg, ob);
  CHECK(slurp(ra.csv) == slurp(rb.csv));

  const std::string csv = slurp(ra.csv);
  CHECK(csv.rfind("u_mean,d_mean,t,samples,mc_mean,mc_stderr,analytic_paper,analytic_exact\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
  const auto rows = numeric_rows(csv);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    for (int col : {4, 6, 7}) {
      CHECK(r[col] >= 0.0);
      CHECK(r[col] <= 1.0);
    }
    CHECK(r[5] >= 0.0);
    CHECK(std::abs(r[4] - r[7]) <= 4.0 * r[5] + 1e-12);
  }
  CHECK(rows[0][4] == Catch::Approx(1.0).margin(1e-15));

  const auto manifest = nlohmann::json::parse(slurp(ra.manifest));
  CHECK(manifest["seed"] == 5);
  CHECK(manifest["version"] == COLLAPSE_SIM_VERSION);
  CHECK(manifest["columns"].contains("mc_stderr"));
  CHECK(manifest["results"] == "stern_gerlach.csv");

  SECTION("manifest round trip") {
    const auto again = parse_config(manifest["config"].dump());
    const fs::path c = scratch("sg_c");
    CHECK(slurp(run(again, RunOptions{c, ".", 2}).csv) == csv);
  }
}

TEST_CASE("visibility run", "[cli]") {
  const auto cfg = parse_config(R"({"kind": "VisibilityCurve", "seed": 3, "a_grid": [0, 1, 3.141592653589793, 10],
                                    "t": 2, "samples": 20000})");
  const auto out = run(cfg, RunOptions{scratch("vis"), ".", 0});
  const std::string csv = slurp(out.csv);
  CHECK(csv.rfind("a,u_mean,d_mean,t,mean_cos_paper,mean_cos_exact,mc_mean,mc_stderr\n", 0) == 0);
  const auto rows = numeric_rows(csv);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0][4] == Catch::Approx(1.0).margin(1e-15));
  CHECK(rows[1][4] == Catch::Approx(std::sin(1.0)).margin(1e-15));
  for (const auto& r : rows) {
    CHECK((r[1] + r[2]) * r[3] == Catch::Approx(r[0]).margin(1e-12));
    CHECK(std::abs(r[6] - r[5]) <= 4.0 * r[7] + 1e-12);
  }
}

TEST_CASE("environment runs", "[cli]") {
  SECTION("sampled spectrum") {
    const auto cfg = parse_config(R"({"kind": "Environment", "seed": 8, "u_mean": 10, "d_mean": 10,
                                      "t_grid": [0, 1], "samples": 1000})");
    const auto rows = numeric_rows(slurp(run(cfg, RunOptions{scratch("env"), ".", 0}).csv));
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
      CHECK(r[0] == 1000);
      CHECK(r[4] <= 1e-10);
      CHECK(r[5] <= 0.5 + 1e-15);
    }
    CHECK(rows[0][2] == Catch::Approx(1.0).margin(1e-15));
  }
  SECTION("spectrum file") {
    const auto cfg = parse_config(R"({"kind": "Environment", "seed": 1, "spectrum_file": "spectrum.csv",
                                      "t": 1, "samples": 40000})");
    const auto rows = numeric_rows(slurp(run(cfg, RunOptions{scratch("env_file"), COLLAPSE_TEST_DATA, 0}).csv));
    REQUIRE(rows.size() == 1);
    CHECK(rows[0][0] == 2);
    CHECK(rows[0][2] == Catch::Approx(0.5).margin(1e-15));
    CHECK(rows[0][4] <= 0.02);
  }
  SECTION("bad spectrum file") {
    const fs::path dir = scratch("env_bad");
    std::ofstream(dir / "s.csv") << "u,d,w\n1,2,0.3\n";
    CHECK_THROWS_AS(read_spectrum_csv(dir / "s.csv"), BadSpectrum);
    std::ofstream(dir / "t.csv") << "x,y\n";
    CHECK_THROWS_AS(read_spectrum_csv(dir / "t.csv"), BadSpectrum);
  }
}

TEST_CASE("hbar rescales phases", "[cli]") {
  const auto one = parse_config(R"({"kind": "SternGerlach", "u_mean": 2, "d_mean": 1, "t": 1, "samples": 100})");
  const auto two = parse_config(R"({"kind": "SternGerlach", "u_mean": 2, "d_mean": 1, "t": 2, "hbar": 2,
                                    "samples": 100})");
  const auto r1 = numeric_rows(slurp(run(one, RunOptions{scratch("hbar1"), ".", 1}).csv));
  const auto r2 = numeric_rows(slurp(run(two, RunOptions{scratch("hbar2"), ".", 1}).csv));
  for (int col : {4, 5, 6, 7}) CHECK(r1[0][col] == r2[0][col]);
}

TEST_CASE("bench run schema", "[cli]") {
  const auto cfg = parse_config(R"({"kind": "Scaling", "n_min": 4, "n_max": 6,
                                    "backends": ["SparseStep", "DenseExpm", "ProductExact"],
                                    "product_sizes": [8, 64, 100]})");
  const auto out = run(cfg, RunOptions{scratch("bench"), ".", 0});
  const std::string csv = slurp(out.csv);
  CHECK(csv.rfind("n_spins,dim,param_count,backend,matvec_count,wall_time_s,peak_state_bytes\n", 0) == 0);
  CHECK(csv.find("\n4,16,15,SparseStep,") != std::string::npos);
  CHECK(csv.find("\n6,64,63,DenseExpm,") != std::string::npos);
  CHECK(csv.find("\n100,1267650600228229401496703205376,1267650600228229401496703205375,ProductExact,") !=
        std::string::npos);
  const auto manifest = nlohmann::json::parse(slurp(out.manifest));
  CHECK(manifest["fits"].contains("SparseStep_log2_time_per_spin"));
  CHECK(manifest["fits"].contains("ProductExact_loglog_degree"));
}

TEST_CASE("thread count from the environment", "[cli]") {
  ::setenv("COLLAPSE_SIM_THREADS", "3", 1);
  CHECK(threads_from_environment() == 3);
  ::setenv("COLLAPSE_SIM_THREADS", "abc", 1);
  CHECK_THROWS_AS(threads_from_environment(), InvalidArgument);
  ::unsetenv("COLLAPSE_SIM_THREADS");
  CHECK(threads_from_environment() == 0);
}

TEST_CASE("command-line binary", "[cli]") {
  const fs::path out = scratch("exe");
  const std::string base = std::string(COLLAPSE_SIM_EXE) + " stern-gerlach --config " + COLLAPSE_TEST_DATA +
                           "/stern_gerlach.json --out ";
  CHECK(std::system((base + (out / "a").string() + " > /dev/null").c_str()) == 0);
  CHECK(std::system((base + (out / "b").string() + " --seed 2024 > /dev/null").c_str()) == 0);
  CHECK(slurp(out / "a" / "stern_gerlach.csv") == slurp(out / "b" / "stern_gerlach.csv"));
  CHECK(std::system((base + (out / "c").string() + " --seed 99 > /dev/null").c_str()) == 0);
  CHECK(slurp(out / "a" / "stern_gerlach.csv") != slurp(out / "c" / "stern_gerlach.csv"));

  const std::string wrong_kind = std::string(COLLAPSE_SIM_EXE) + " visibility --config " + COLLAPSE_TEST_DATA +
                                 "/stern_gerlach.json --out " + (out / "d").string() + " 2> /dev/null";
  CHECK(WEXITSTATUS(std::system(wrong_kind.c_str())) == 1);
}
