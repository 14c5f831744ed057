#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "doctest.h"
#include "swnehari/functional.hpp"
#include "swnehari/grid.hpp"
#include "swnehari/rayleigh.hpp"

using namespace swnehari;
namespace fs = std::filesystem;

namespace {

const char* kP0 = R"(dim_n = 3
alpha = 0.25
mu = 1
p = 2.5
q = 1.5
lambda = 0.1
gamma1 = 2
gamma2 = 2
beta = 10
v0 = 1
v_inf = 1
box_half_width = 4
points_per_axis = 16
)";

struct Sandbox {
  fs::path dir;
  explicit Sandbox(const std::string& name) : dir(fs::temp_directory_path() / ("swnehari_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }

  fs::path config(const std::string& text, const std::string& name = "run.conf") const {
    const auto path = dir / name;
    std::ofstream(path) << text;
    return path;
  }
};

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "swnehari");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  return nlohmann::json::parse(f);
}

std::string slurp(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("validate") {
  Sandbox sb("validate");
  const std::string out = (sb.dir / "o").string();

  auto r = run({"validate", "--config", sb.config(kP0).string(), "--out", out});
  CHECK(r.code == cli::kOk);
  const auto j = read_json(fs::path(out) / "validation.json");
  CHECK(j.contains("params"));

  r = run({"validate", "--config", sb.config(replace(kP0, "q = 1.5", "q = 2"), "q2.conf").string(), "--out", out});
  CHECK(r.code == cli::kAssertionFailure);
  CHECK(r.err.find("H2") != std::string::npos);

  r = run({"validate", "--config", sb.config(replace(kP0, "mu = 1\n", ""), "nomu.conf").string(), "--out", out});
  CHECK(r.code == cli::kConfigError);

  CHECK(run({"validate"}).code == cli::kConfigError);
  CHECK(run({}).code == cli::kConfigError);
  CHECK(run({"validate", "--config", (sb.dir / "absent.conf").string()}).code == cli::kConfigError);
  CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("numeric commands refuse invalid parameters") {
  Sandbox sb("refuse");
  const auto bad = sb.config(replace(kP0, "q = 1.5", "q = 2")).string();
  const std::string out = (sb.dir / "o").string();
  CHECK(run({"estimate-lambda", "--config", bad, "--out", out}).code == cli::kAssertionFailure);
  CHECK(run({"solve", "--config", bad, "--out", out, "--lambda", "1"}).code == cli::kAssertionFailure);
  CHECK(run({"trichotomy", "--config", bad, "--out", out}).code == cli::kAssertionFailure);
  CHECK_FALSE(fs::exists(fs::path(out) / "lambda_star.json"));

  const auto odd = sb.config(kP0, "odd.conf").string();
  CHECK(run({"estimate-lambda", "--config", odd, "--out", out, "--grid-m", "15"}).code == cli::kConfigError);
  const auto n4 = sb.config(replace(kP0, "dim_n = 3", "dim_n = 4"), "n4.conf").string();
  CHECK(run({"estimate-lambda", "--config", n4, "--out", out}).code == cli::kConfigError);
}

TEST_CASE("estimate-lambda") {
  Sandbox sb("estimate");
  const auto cfg = sb.config(kP0).string();
  const fs::path a = sb.dir / "a", b = sb.dir / "b", c = sb.dir / "c";

  auto r = run({"estimate-lambda", "--config", cfg, "--out", a.string(), "--seed", "11"});
  REQUIRE(r.code == cli::kOk);
  const auto star = read_json(a / "lambda_star.json");
  const auto lower = read_json(a / "lambda_star_lower.json");
  CHECK(lower["value"].get<double>() < star["value"].get<double>());
  CHECK(lower["ratio_relative_error"].get<double>() <= 1e-6);
  CHECK(star["relative_spread"].get<double>() <= 1e-4);
  CHECK(fs::exists(a / "lambda_star_minimizer.field"));
  CHECK(fs::exists(a / "lambda_star_lower_minimizer.field"));

  REQUIRE(run({"estimate-lambda", "--config", cfg, "--out", b.string(), "--seed", "11"}).code == cli::kOk);
  CHECK(slurp(a / "lambda_star.json") == slurp(b / "lambda_star.json"));
  CHECK(slurp(a / "lambda_star_lower.json") == slurp(b / "lambda_star_lower.json"));

  r = run({"estimate-lambda", "--config", cfg, "--out", c.string(), "--inject-ratio-fault", "1.001"});
  CHECK(r.code == cli::kAssertionFailure);
}

TEST_CASE("solve") {
  Sandbox sb("solve");
  const auto cfg = sb.config(kP0).string();
  const fs::path out = sb.dir / "o";
  REQUIRE(run({"estimate-lambda", "--config", cfg, "--out", out.string()}).code == cli::kOk);
  const double lower = read_json(out / "lambda_star_lower.json")["value"].get<double>();
  const double star = read_json(out / "lambda_star.json")["value"].get<double>();

  auto r = run({"solve", "--config", cfg, "--out", out.string(), "--lambda", std::to_string(0.25 * lower)});
  REQUIRE(r.code == cli::kOk);
  const auto s = read_json(out / "solve.json");
  CHECK(s["energy_u"].get<double>() < 0.0);
  CHECK(s["energy_v"].get<double>() > 0.0);
  CHECK(s["second_u"].get<double>() > 0.0);
  CHECK(s["second_v"].get<double>() < 0.0);
  CHECK(read_json(out / "solution_plus.json")["manifold"] == "Nplus");
  CHECK(read_json(out / "solution_minus.json")["manifold"] == "Nminus");
  CHECK(fs::exists(out / "solution_plus.field"));

  r = run({"solve", "--config", cfg, "--out", out.string(), "--lambda", std::to_string(1.01 * star)});
  CHECK(r.code == cli::kAssertionFailure);
  CHECK(run({"solve", "--config", cfg, "--out", out.string()}).code == cli::kConfigError);
}

TEST_CASE("trichotomy") {
  Sandbox sb("trichotomy");
  const fs::path out = sb.dir / "o";
  REQUIRE(run({"trichotomy", "--config", sb.config(kP0).string(), "--out", out.string()}).code == cli::kOk);
  const auto j = read_json(out / "trichotomy.json");
  REQUIRE(j["rows"].size() >= 3);
  for (const auto& row : j["rows"]) CHECK(row["match"].get<bool>());

  std::ifstream csv(out / "trichotomy.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header.find("match") != std::string::npos);
}

TEST_CASE("fibering") {
  Sandbox sb("fibering");
  const auto cfg = sb.config(kP0).string();
  const GridSpec g{4.0, 16, 3};
  const Problem pr(ModelParams{}, g);
  Field w = gaussian_bump(g);
  w = (1.0 / h1v_norm(w, pr.potential())) * w;
  const auto dir = (sb.dir / "unit.field").string();
  write_field_binary(w, dir);
  const fs::path out = sb.dir / "o";

  const int samples = 400;
  auto r = run({"fibering", "--config", cfg, "--out", out.string(), "--direction", dir, "--samples",
                std::to_string(samples)});
  REQUIRE(r.code == cli::kOk);
  const auto j = read_json(out / "fibering.json");
  const double t_n = j["t_n"].get<double>();
  const double t_max = j["t_max"].get<double>();
  CHECK(j["t_e"].get<double>() > t_n);

  std::ifstream csv(out / "fibering.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line == "t,Q_n,Q_e");
  double best_t = 0.0, best_q = -1e300;
  int rows = 0;
  while (std::getline(csv, line)) {
    double t, qn, qe;
    char c1, c2;
    std::istringstream(line) >> t >> c1 >> qn >> c2 >> qe;
    if (qn > best_q) best_q = qn, best_t = t;
    ++rows;
  }
  CHECK(rows == samples);
  CHECK(std::abs(best_t - t_n) <= t_max / samples);

  CHECK(run({"fibering", "--config", cfg, "--out", out.string(), "--direction", (sb.dir / "none").string()}).code ==
        cli::kConfigError);
}
