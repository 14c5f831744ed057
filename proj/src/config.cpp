#include "swnehari/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "swnehari/errors.hpp"

namespace swnehari {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = first + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) throw ConfigError("invalid value for '" + key + "': '" + value + "'");
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

template <class T, class F>
Setter number(F field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) { field(c) = parse_number<T>(k, v); };
}

struct Key {
  bool required;
  Setter set;
};

const std::map<std::string, Key>& schema() {
  static const std::map<std::string, Key> keys = {
      {"dim_n", {true, number<int>([](RunConfig& c) -> int& { return c.model.dim_n; })}},
      {"alpha", {true, number<double>([](RunConfig& c) -> double& { return c.model.alpha; })}},
      {"mu", {true, number<double>([](RunConfig& c) -> double& { return c.model.mu; })}},
      {"p", {true, number<double>([](RunConfig& c) -> double& { return c.model.p; })}},
      {"q", {true, number<double>([](RunConfig& c) -> double& { return c.model.q; })}},
      {"lambda", {true, number<double>([](RunConfig& c) -> double& { return c.model.lambda; })}},
      {"gamma1", {true, number<double>([](RunConfig& c) -> double& { return c.model.gamma1; })}},
      {"gamma2", {true, number<double>([](RunConfig& c) -> double& { return c.model.gamma2; })}},
      {"beta", {true, number<double>([](RunConfig& c) -> double& { return c.model.beta; })}},
      {"v0", {true, number<double>([](RunConfig& c) -> double& { return c.model.v0; })}},
      {"v_inf", {true, number<double>([](RunConfig& c) -> double& { return c.model.v_inf; })}},
      {"box_half_width", {true, number<double>([](RunConfig& c) -> double& { return c.grid.half_width; })}},
      {"points_per_axis", {true, number<int>([](RunConfig& c) -> int& { return c.grid.points_per_axis; })}},
      {"extremal_tol", {false, number<double>([](RunConfig& c) -> double& { return c.extremal.descent.tol; })}},
      {"extremal_max_iter",
       {false, number<int>([](RunConfig& c) -> int& { return c.extremal.descent.max_iter; })}},
      {"multistart", {false, number<int>([](RunConfig& c) -> int& { return c.extremal.starts; })}},
      {"multistart_perturbation",
       {false, number<double>([](RunConfig& c) -> double& { return c.extremal.perturbation; })}},
      {"solver_tol", {false, number<double>([](RunConfig& c) -> double& { return c.solver.descent.tol; })}},
      {"solver_max_iter", {false, number<int>([](RunConfig& c) -> int& { return c.solver.descent.max_iter; })}},
      {"slope_tol", {false, number<double>([](RunConfig& c) -> double& { return c.solver.slope_tol; })}},
      {"restarts", {false, number<int>([](RunConfig& c) -> int& { return c.solver.restarts; })}},
      {"seed",
       {false,
        [](RunConfig& c, const std::string& k, const std::string& v) { c.apply_seed(parse_number<std::uint64_t>(k, v)); }}},
      {"out_dir",
       {false,
        [](RunConfig& c, const std::string& k, const std::string& v) {
          if (v.empty()) throw ConfigError("empty value for '" + k + "'");
          c.out_dir = v;
        }}},
  };
  return keys;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void RunConfig::apply_seed(std::uint64_t s) {
  seed = s;
  extremal.seed = s;
  solver.seed = s;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  cfg.apply_seed(cfg.seed);
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto it = schema().find(key);
    if (it == schema().end()) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    it->second.set(cfg, key, value);
  }
  for (const auto& [key, spec] : schema())
    if (spec.required && !seen.count(key)) throw ConfigError("missing required key '" + key + "'");
  cfg.grid.dim = 3;
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const RunConfig& c) {
  std::ostringstream os;
  os << "dim_n = " << c.model.dim_n << "\n"
     << "alpha = " << fmt(c.model.alpha) << "\n"
     << "mu = " << fmt(c.model.mu) << "\n"
     << "p = " << fmt(c.model.p) << "\n"
     << "q = " << fmt(c.model.q) << "\n"
     << "lambda = " << fmt(c.model.lambda) << "\n"
     << "gamma1 = " << fmt(c.model.gamma1) << "\n"
     << "gamma2 = " << fmt(c.model.gamma2) << "\n"
     << "beta = " << fmt(c.model.beta) << "\n"
     << "v0 = " << fmt(c.model.v0) << "\n"
     << "v_inf = " << fmt(c.model.v_inf) << "\n"
     << "box_half_width = " << fmt(c.grid.half_width) << "\n"
     << "points_per_axis = " << c.grid.points_per_axis << "\n"
     << "extremal_tol = " << fmt(c.extremal.descent.tol) << "\n"
     << "extremal_max_iter = " << c.extremal.descent.max_iter << "\n"
     << "multistart = " << c.extremal.starts << "\n"
     << "multistart_perturbation = " << fmt(c.extremal.perturbation) << "\n"
     << "solver_tol = " << fmt(c.solver.descent.tol) << "\n"
     << "solver_max_iter = " << c.solver.descent.max_iter << "\n"
     << "slope_tol = " << fmt(c.solver.slope_tol) << "\n"
     << "restarts = " << c.solver.restarts << "\n"
     << "seed = " << c.seed << "\n"
     << "out_dir = " << c.out_dir << "\n";
  return os.str();
}

void to_json(nlohmann::json& j, const RunConfig& c) {
  j = nlohmann::json{{"model", c.model},
                     {"grid", {{"dim", c.grid.dim}, {"half_width", c.grid.half_width}, {"points_per_axis", c.grid.points_per_axis}}},
                     {"extremal",
                      {{"tol", c.extremal.descent.tol},
                       {"max_iter", c.extremal.descent.max_iter},
                       {"starts", c.extremal.starts},
                       {"perturbation", c.extremal.perturbation}}},
                     {"solver",
                      {{"tol", c.solver.descent.tol},
                       {"max_iter", c.solver.descent.max_iter},
                       {"slope_tol", c.solver.slope_tol},
                       {"restarts", c.solver.restarts}}},
                     {"seed", c.seed}};
}

}  // namespace swnehari
