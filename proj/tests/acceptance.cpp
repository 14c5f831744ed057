// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "support.hpp"
#include "swnehari/errors.hpp"
#include "swnehari/fibering.hpp"
#include "swnehari/functional.hpp"
#include "swnehari/rayleigh.hpp"
#include "swnehari/solver.hpp"
#include "swnehari/steinweiss.hpp"

using namespace swnehari;
using namespace swnehari::testing;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Fourth-order central difference of g at 0.
double deriv(const std::function<double(double)>& g, double h) {
  return (8.0 * (g(h) - g(-h)) - (g(2 * h) - g(-2 * h))) / (12.0 * h);
}

Field b_field(const GridSpec& g, double gamma2) {
  return Field::from_function(
      g, [&](const Point& x) { return std::pow(1.0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2], -gamma2); });
}

// Strictly positive random field, so every |u|^r stays smooth under small perturbations.
Field positive_field(const GridSpec& g, std::mt19937_64& rng) {
  return random_bump(g, rng) + 0.05 * random_field(g, rng, 0.1, 1.0);
}

Outcome oracle_equivalence() {
  const GridSpec g{3.0, 8, 3};
  const struct {
    NonlocalParams params;
    double gamma2;
  } cases[] = {{{0.25, 1.0, 2.5}, 2.0}, {{0.1, 0.5, 2.2}, 1.5}, {{0.6, 1.6, 3.0}, 3.0}};
  std::mt19937_64 rng(101);
  double worst = 0.0;
  int fields = 0;
  for (const auto& c : cases) {
    const Field b = b_field(g, c.gamma2);
    for (int r = 0; r < 8; ++r, ++fields) {
      const Field u = r % 2 ? random_field(g, rng) : random_bump(g, rng);
      const Field phi = random_field(g, rng);
      worst = std::max(worst, rel_err(nonlocal_energy(u, b, c.params), nonlocal_energy_oracle(u, b, c.params)));
      worst = std::max(worst, rel_err(nonlocal_pairing(u, phi, b, c.params),
                                      nonlocal_pairing_oracle(u, phi, b, c.params)));
      const Field fast = choquard_field(u, b, c.params), slow = choquard_field_oracle(u, b, c.params);
      for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, rel_err(fast[i], slow[i]));
    }
  }
  return {worst <= 1e-10 && fields >= 20,
          fmt("max rel err %.2e over %d fields, 3 parameter sets (tol 1e-10)", worst, fields)};
}

Outcome homogeneity(const Problem& pr) {
  std::mt19937_64 rng(202);
  const double p = pr.p(), q = pr.q();
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const Field u = k % 2 ? random_field(pr.grid(), rng) : random_bump(pr.grid(), rng);
    const auto e = energy(pr, u, 0.0);
    const double ln = lambda_n(fiber_triple(pr, u), p, q);
    for (double t : {0.5, 2.0, 10.0}) {
      const Field tu = t * u;
      const auto et = energy(pr, tu, 0.0);
      worst = std::max(worst, rel_err(et.norm_sq / e.norm_sq, t * t));
      worst = std::max(worst, rel_err(et.A_val / e.A_val, std::pow(t, q)));
      worst = std::max(worst, rel_err(et.B_val / e.B_val, std::pow(t, 2 * p)));
      worst = std::max(worst, rel_err(lambda_n(fiber_triple(pr, tu), p, q), ln));
    }
  }
  return {worst <= 1e-12, fmt("max rel err %.2e, t in {0.5, 2, 10} (tol 1e-12)", worst)};
}

Outcome algebraic_identities() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> ld(-2.0, 2.0), td(0.05, 5.0);
  double worst = 0.0;
  bool ratio_ok = true;
  int samples = 0;
  for (double p : {2.1, 2.5, 3.0, 4.0})
    for (double q : {1.0, 1.25, 1.5, 1.9}) {
      const double ratio = q * std::pow(p, (2.0 - q) / (2.0 * (p - 1.0))) / 2.0;
      ratio_ok = ratio_ok && ratio > 0.0 && ratio < 1.0 && rel_err(constants(p, q).ratio, ratio) <= 1e-12;
      for (int k = 0; k < 100; ++k, ++samples) {
        const FiberTriple tr{std::exp(ld(rng)), std::exp(ld(rng)), std::exp(ld(rng))};
        const double t = td(rng);
        const double qn = q_n(t, tr, p, q), qe = q_e(t, tr, p, q);
        const double rhs = t / q * q_e_prime(t, tr, p, q);
        worst = std::max(worst, std::abs(qn - qe - rhs) / std::max(std::abs(qn), std::abs(qe)));
        worst = std::max(worst, rel_err(t_e(tr, p, q), std::pow(p, 1.0 / (2.0 * p - 2.0)) * t_n(tr, p, q)));
        worst = std::max(worst, rel_err(lambda_e(tr, p, q), ratio * lambda_n(tr, p, q)));
      }
    }
  return {worst <= 1e-12 && ratio_ok,
          fmt("max rel err %.2e over %d samples, 16 (p,q) pairs, ratio in (0,1): %s (tol 1e-12)", worst, samples,
              ratio_ok ? "yes" : "no")};
}

Outcome derivative_bridges(const Problem& pr) {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> td(0.3, 3.0), ld(0.1, 5.0);
  const double p = pr.p(), q = pr.q();
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Field u = positive_field(pr.grid(), rng);
    const double t = td(rng), lambda = ld(rng);
    const Field w = t * u;
    const auto e = energy(pr, w, lambda);
    const double sl = slope(pr, w, lambda), sec = second_along(pr, w, lambda);
    const double h = 1e-3 * t;

    const double dj = deriv([&](double d) { return energy(pr, (t + d) * u, lambda).J_val; }, h);
    worst = std::max(worst, rel_err(dj, sl / t));

    auto rn = [&](double d) { return rayleigh_n(fiber_triple(pr, (t + d) * u)); };
    worst = std::max(worst, rel_err(deriv(rn, h), (sec - (q - 1.0) * sl) / (t * e.A_val)));

    auto re = [&](double d) { return rayleigh_e(fiber_triple(pr, (t + d) * u), p, q); };
    worst = std::max(worst, rel_err(deriv(re, h), q * (sl - q * e.J_val) / (t * e.A_val)));
  }
  return {worst <= 1e-6, fmt("max rel err %.2e at 20 random (u, t, lambda) (tol 1e-6)", worst)};
}

Outcome gradient_checks(const Problem& pr) {
  std::mt19937_64 rng(505);
  const double p = pr.p(), q = pr.q();
  const double lambda = 1.3;
  const Field u = positive_field(pr.grid(), rng);
  const auto lq = log_lambda_n(pr, u);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Field d = random_field(pr.grid(), rng);
    const double h = 1e-4;
    const double fj = deriv([&](double s) { return energy(pr, u + s * d, lambda).J_val; }, h);
    worst = std::max(worst, rel_err(first_variation(pr, u, d, lambda), fj));
    const double fl = deriv([&](double s) { return std::log(lambda_n(fiber_triple(pr, u + s * d), p, q)); }, h);
    worst = std::max(worst, rel_err(integrate_product(lq.gradient, d), fl));
  }
  return {worst <= 1e-6, fmt("max rel err %.2e over 20 directions, J and log Lambda_n (tol 1e-6)", worst)};
}

struct Extremes {
  MultistartEstimate star, lower;
};

Outcome extremal_consistency(const Problem& pr, const Extremes& ex) {
  const double expected = constants(pr.p(), pr.q()).ratio;
  const double rel = std::abs(ex.lower.best.value / ex.star.best.value / expected - 1.0);
  const double spread = ex.star.relative_spread;
  return {rel <= 1e-6 && spread <= 1e-4,
          fmt("lambda* = %.8f, lambda_* = %.8f, ratio rel err %.2e (tol 1e-6), spread %.2e (tol 1e-4)",
              ex.star.best.value, ex.lower.best.value, rel, spread)};
}

struct Structure {
  bool ok;
  std::string detail;
};

Structure theorem_structure(const Problem& pr, const Extremes& ex) {
  const double lambda = 0.25 * ex.lower.best.value;
  SolverOptions opts;
  opts.fallback_direction = ex.star.best.minimizer;
  try {
    const auto u = minimize_on_nplus(pr, lambda, default_init(pr.grid(), Branch::plus), opts);
    const auto v = minimize_on_nminus(pr, lambda, default_init(pr.grid(), Branch::minus, opts.seed), opts);
    const double ru = u.residual_norm / u.norm, rv = v.residual_norm / v.norm;
    const double distinct = h1v_norm(u.field - v.field, pr.potential()) / u.norm;
    const bool ok = ru <= 1e-6 && rv <= 1e-6 && u.energy < 0.0 && u.second > 0.0 && v.second < 0.0 && distinct > 1e-2;
    return {ok, fmt("res/|u| %.1e, res/|v| %.1e, J(u) %.4e, J''(u) %.3e, J''(v) %.3e, |u-v|/|u| %.3f", ru, rv,
                    u.energy, u.second, v.second, distinct)};
  } catch (const std::exception& e) {
    return {false, std::string("solver failed: ") + e.what()};
  }
}

int sign_with_band(const NehariSolution& v) {
  if (std::abs(v.energy) <= 1e-3 * v.norm * v.norm) return 0;
  return v.energy > 0.0 ? 1 : -1;
}

Structure trichotomy(const Problem& pr, const Extremes& ex) {
  const double lower = ex.lower.best.value, star = ex.star.best.value;
  const struct {
    double lambda;
    int expected;
    const char* label;
  } rows[] = {{0.5 * lower, 1, "0.5"}, {lower, 0, "1.0"}, {0.5 * (lower + star), -1, "mid"}};
  SolverOptions opts;
  opts.fallback_direction = ex.star.best.minimizer;
  bool ok = true;
  std::string detail;
  for (const auto& r : rows) {
    try {
      const auto v = minimize_on_nminus(pr, r.lambda, default_init(pr.grid(), Branch::minus, opts.seed), opts);
      const int s = sign_with_band(v);
      ok = ok && s == r.expected;
      detail += fmt("%s%s: J(v)/|v|^2 = %+.3e sign %+d want %+d", detail.empty() ? "" : "; ", r.label,
                    v.energy / (v.norm * v.norm), s, r.expected);
    } catch (const std::exception& e) {
      ok = false;
      detail += fmt("%s%s: failed (%s)", detail.empty() ? "" : "; ", r.label, e.what());
    }
  }
  return {ok, detail};
}

Extremes extremes(const Problem& pr) { return {estimate_lambda_star(pr), estimate_lambda_lower(pr)}; }

void report(int id, const char* name, const Outcome& o, bool& all) {
  std::printf("criterion %d (%s): %s | %s\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
  std::fflush(stdout);
  all = all && o.pass;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  bool all = true;
  const Problem p0(ModelParams{}, GridSpec{4.0, 16, 3});

  report(1, "oracle equivalence", oracle_equivalence(), all);
  report(2, "homogeneity", homogeneity(p0), all);
  report(3, "algebraic identities", algebraic_identities(), all);
  report(4, "derivative bridges", derivative_bridges(p0), all);
  report(5, "gradient checks", gradient_checks(p0), all);

  const Extremes ex = extremes(p0);
  report(6, "extremal consistency", extremal_consistency(p0, ex), all);

  const Structure s7 = theorem_structure(p0, ex);
  report(7, "two solutions at 0.25 lambda_*", {s7.ok, s7.detail}, all);
  const Structure s8 = trichotomy(p0, ex);
  report(8, "energy sign trichotomy", {s8.ok, s8.detail}, all);

  bool robust = true;
  std::string detail;
  for (const GridSpec g : {GridSpec{4.0, 24, 3}, GridSpec{6.0, 24, 3}}) {
    const Problem pr(ModelParams{}, g);
    const Extremes e = extremes(pr);
    const Structure a = theorem_structure(pr, e), b = trichotomy(pr, e);
    robust = robust && a.ok && b.ok;
    detail += fmt("%sL=%g M=%d: lambda* %.4f lambda_* %.4f, structure %s, trichotomy %s", detail.empty() ? "" : "; ",
                  g.half_width, g.points_per_axis, e.star.best.value, e.lower.best.value, a.ok ? "ok" : a.detail.c_str(),
                  b.ok ? "ok" : b.detail.c_str());
  }
  report(9, "robustness under refinement", {robust, detail}, all);

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("acceptance: %s (%.1f s)\n", all ? "PASS" : "FAIL", secs);
  return all ? 0 : 1;
}
