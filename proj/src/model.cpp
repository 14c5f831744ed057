#include "swnehari/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace swnehari {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double sobolev_star(int n) { return 2.0 * n / (n - 2.0); }

void require_dimension(const ModelParams& params) {
  if (params.dim_n < 3) {
    throw std::invalid_argument("dimension N must be at least 3, got " + std::to_string(params.dim_n));
  }
}

HypothesisCheck greater(std::string hyp, std::string name, std::string cond, double value, double threshold) {
  return {std::move(hyp), std::move(name), std::move(cond), value, threshold, value > threshold};
}

HypothesisCheck less(std::string hyp, std::string name, std::string cond, double value, double threshold) {
  return {std::move(hyp), std::move(name), std::move(cond), value, threshold, value < threshold};
}

// (1+|x|^2)^{-γ} lies in L^t(R^N) iff 2γt > N.
bool decay_in_lebesgue(const PotentialSpec& spec, double t, int n) {
  if (spec.family == PotentialFamily::constant) return false;
  return 2.0 * spec.decay * t > n;
}

}  // namespace

CriticalExponents critical_exponents(const ModelParams& params) {
  require_dimension(params);
  const double n = params.dim_n;
  const double num = 2.0 * n - 2.0 * params.alpha - params.mu;
  return {num / n, num / (n - 2.0)};
}

IntegrabilityIndices integrability_indices(const ModelParams& params) {
  require_dimension(params);
  const double n = params.dim_n;
  const double star = sobolev_star(params.dim_n);
  const double denom = 2.0 * n - 2.0 * params.alpha - params.mu - params.p * (n - 2.0);
  if (!(denom > 0.0)) {
    throw std::invalid_argument("sigma undefined: p must stay below 2*_{alpha,mu}");
  }
  return {star / (star - params.q), 2.0 * n / denom};
}

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const HypothesisCheck& c) { return c.passed; });
}

std::vector<std::string> ValidationReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.passed) out.push_back(c.hypothesis + ":" + c.name);
  }
  return out;
}

const HypothesisCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

ValidationReport validate_hypotheses(const ModelParams& pr) {
  ValidationReport rep;
  auto& ch = rep.checks;
  const double n = pr.dim_n;

  // (H1)
  ch.push_back(greater("H1", "dimension", "N >= 3", n, 2.5));
  ch.push_back(greater("H1", "v0_positive", "V0 > 0", pr.v0, 0.0));
  ch.push_back({"H1", "v_bounds", "V0 <= V_inf", pr.v0, pr.v_inf, pr.v0 <= pr.v_inf});
  ch.push_back(greater("H1", "lambda_positive", "lambda > 0", pr.lambda, 0.0));
  ch.push_back({"H1", "alpha_range", "0 < alpha < N", pr.alpha, n, pr.alpha > 0.0 && pr.alpha < n});
  ch.push_back({"H1", "mu_range", "0 < mu < N", pr.mu, n, pr.mu > 0.0 && pr.mu < n});
  const double am = 2.0 * pr.alpha + pr.mu;
  ch.push_back({"H1", "weight_sum", "0 < 2 alpha + mu < N", am, n, am > 0.0 && am < n});

  // (H2)
  const PotentialSpec a = weight_a(pr);
  const PotentialSpec b = weight_b(pr);
  ch.push_back(greater("H2", "a_positive", "a > 0", a.coefficient, 0.0));
  ch.push_back(greater("H2", "b_positive", "b > 0", b.coefficient, 0.0));
  ch.push_back({"H2", "q_range", "1 <= q < 2", pr.q, 2.0, pr.q >= 1.0 && pr.q < 2.0});

  if (pr.dim_n < 3) {
    // Every remaining check divides by N-2.
    ch.push_back({"H2", "p_range", "2_{a,m} < p < 2*_{a,m}", pr.p, kNaN, false});
    return rep;
  }
  const auto ex = critical_exponents(pr);
  ch.push_back(greater("H2", "p_lower", "p > 2_{alpha,mu}", pr.p, ex.lower));
  ch.push_back(less("H2", "p_upper", "p < 2*_{alpha,mu}", pr.p, ex.upper));

  const double star = sobolev_star(pr.dim_n);
  const double nam = n - 2.0 * pr.alpha - pr.mu;

  // (H3): a ∈ L^r, b ∈ L^σ ∩ L^{σ(1+η0)}.
  const double r = star / (star - pr.q);
  const double g1_thr = (2.0 * n - pr.q * (n - 2.0)) / 4.0;
  ch.push_back({"H3", "a_in_Lr", "gamma1 > (2N - q(N-2))/4", pr.gamma1, g1_thr, decay_in_lebesgue(a, r, pr.dim_n)});
  const double sig_denom = 2.0 * n - 2.0 * pr.alpha - pr.mu - pr.p * (n - 2.0);
  if (sig_denom > 0.0) {
    const double sigma = 2.0 * n / sig_denom;
    const double g2_thr = sig_denom / 4.0;
    ch.push_back({"H3", "b_in_Lsigma", "gamma2 > (2N-2alpha-mu-p(N-2))/4", pr.gamma2, g2_thr,
                  decay_in_lebesgue(b, sigma, pr.dim_n)});
    ch.push_back({"H3", "b_in_Lsigma_eta", "b in L^{sigma(1+eta0)}", pr.gamma2, g2_thr / (1.0 + kSigmaMargin),
                  decay_in_lebesgue(b, sigma * (1.0 + kSigmaMargin), pr.dim_n)});
  } else {
    ch.push_back({"H3", "b_in_Lsigma", "sigma finite (p < 2*_{alpha,mu})", sig_denom, 0.0, false});
  }

  // (H4)
  ch.push_back({"H4", "a_in_LN2", "gamma1 > 1 (a in L^{N/2})", pr.gamma1, 1.0, decay_in_lebesgue(a, n / 2.0, pr.dim_n)});
  const double beta_den = 4.0 - (n - 2.0) * (pr.p - 2.0);
  const double beta_thr = beta_den > 0.0 ? 2.0 * n / beta_den : std::numeric_limits<double>::infinity();
  ch.push_back({"H4", "beta_lower", "beta > 2N/(4-(N-2)(p-2))", pr.beta, beta_thr, beta_den > 0.0 && pr.beta > beta_thr});

  const double gamma_den = pr.beta * (2.0 - (n - 2.0) * (pr.p - 1.0) + nam) - n;
  const bool gamma_ok = gamma_den > 0.0;
  ch.push_back(greater("H4", "gamma_denominator", "beta[2-(N-2)(p-1)+(N-2alpha-mu)] - N > 0", gamma_den, 0.0));
  ch.push_back(greater("H4", "b_in_Lbeta", "gamma2 > N/(2 beta)", pr.gamma2, n / (2.0 * pr.beta)));
  if (gamma_ok) {
    const double gamma = n * pr.beta / gamma_den;
    ch.push_back(greater("H4", "b_in_Lgamma", "gamma2 > N/(2 gamma)", pr.gamma2, n / (2.0 * gamma)));
  } else {
    ch.push_back({"H4", "b_in_Lgamma", "gamma2 > N/(2 gamma)", pr.gamma2, kNaN, false});
  }
  const double p_thr = 2.0 * nam / (n - 2.0) - star / pr.beta;
  ch.push_back(greater("H4", "p_regularity", "p > 2(N-2alpha-mu)/(N-2) - 2*/beta", pr.p, p_thr));

  // Consolidated Example 1.2 threshold for gamma2.
  double g2_max = sig_denom / 4.0;
  g2_max = std::max(g2_max, n / (2.0 * pr.beta));
  if (gamma_ok) g2_max = std::max(g2_max, n / (2.0 * (n * pr.beta / gamma_den)));
  ch.push_back({"H4", "gamma2_example", "gamma2 > max{...}", pr.gamma2, g2_max, gamma_ok && pr.gamma2 > g2_max});
  return rep;
}

void to_json(nlohmann::json& j, const HypothesisCheck& c) {
  j = nlohmann::json{{"hypothesis", c.hypothesis}, {"name", c.name},   {"condition", c.condition},
                     {"passed", c.passed},         {"value", c.value}};
  if (std::isfinite(c.threshold)) {
    j["threshold"] = c.threshold;
  } else {
    j["threshold"] = nullptr;
  }
}

void to_json(nlohmann::json& j, const ValidationReport& r) {
  j = nlohmann::json{{"all_passed", r.all_passed()}, {"checks", r.checks}, {"failures", r.failures()}};
}

void to_json(nlohmann::json& j, const ModelParams& p) {
  j = nlohmann::json{{"dim_n", p.dim_n}, {"alpha", p.alpha},   {"mu", p.mu},         {"p", p.p},
                     {"q", p.q},         {"lambda", p.lambda}, {"v0", p.v0},         {"v_inf", p.v_inf},
                     {"gamma1", p.gamma1}, {"gamma2", p.gamma2}, {"beta", p.beta}};
}

void PotentialSpec::validate() const {
  if (!(coefficient > 0.0)) throw std::invalid_argument("potential coefficient must be positive");
  if (!(decay >= 0.0)) throw std::invalid_argument("potential decay must be nonnegative");
}

double eval_potential(const PotentialSpec& spec, std::span<const double> x) {
  if (spec.family == PotentialFamily::constant) return spec.coefficient;
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  return spec.coefficient * std::pow(1.0 + r2, -spec.decay);
}

PotentialSpec weight_a(const ModelParams& params) {
  return {PotentialFamily::inverse_quadratic_decay, 1.0, params.gamma1};
}

PotentialSpec weight_b(const ModelParams& params) {
  return {PotentialFamily::inverse_quadratic_decay, 1.0, params.gamma2};
}

double eval_confining(const ModelParams& params, std::span<const double> x) {
  if (params.v_inf == params.v0) return params.v0;
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  return params.v0 + (params.v_inf - params.v0) * r2 / (1.0 + r2);
}

}  // namespace swnehari
