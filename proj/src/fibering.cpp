#include "swnehari/fibering.hpp"

#include <cmath>
#include <stdexcept>

namespace swnehari {

FiberTriple FiberTriple::scaled(double t, double p, double q) const {
  return {t * t * s, std::pow(t, q) * a_val, std::pow(t, 2.0 * p) * b_val};
}

FiberTriple fiber_triple(const Problem& pr, const Field& u) {
  const auto e = energy(pr, u, 0.0);
  return {e.norm_sq, e.A_val, e.B_val};
}

FiberingConstants constants(double p, double q) {
  if (!(q >= 1.0 && q < 2.0)) throw std::invalid_argument("fibering constants need 1 <= q < 2");
  if (!(p > 1.0)) throw std::invalid_argument("fibering constants need p > 1");
  const double e = (2.0 - q) / (2.0 * p - 2.0);
  const double c = std::pow((2.0 - q) / (2.0 * p - q), e) * (2.0 * p - 2.0) / (2.0 * p - q);
  const double ct = std::pow(p, e) * std::pow((2.0 - q) / (2.0 * p - q), e) * q * (p - 1.0) / (2.0 * p - q);
  return {c, ct, ct / c};
}

double q_n(double t, const FiberTriple& tr, double p, double q) {
  return (std::pow(t, 2.0 - q) * tr.s - std::pow(t, 2.0 * p - q) * tr.b_val) / tr.a_val;
}

double q_e(double t, const FiberTriple& tr, double p, double q) {
  return q * (0.5 * tr.s * std::pow(t, 2.0 - q) - std::pow(t, 2.0 * p - q) * tr.b_val / (2.0 * p)) / tr.a_val;
}

double q_n_prime(double t, const FiberTriple& tr, double p, double q) {
  return ((2.0 - q) * std::pow(t, 1.0 - q) * tr.s - (2.0 * p - q) * std::pow(t, 2.0 * p - q - 1.0) * tr.b_val) /
         tr.a_val;
}

double q_e_prime(double t, const FiberTriple& tr, double p, double q) {
  return q *
         (0.5 * (2.0 - q) * tr.s * std::pow(t, 1.0 - q) -
          (2.0 * p - q) / (2.0 * p) * std::pow(t, 2.0 * p - q - 1.0) * tr.b_val) /
         tr.a_val;
}

double t_n(const FiberTriple& tr, double p, double q) {
  return std::pow((2.0 - q) * tr.s / ((2.0 * p - q) * tr.b_val), 1.0 / (2.0 * p - 2.0));
}

double t_e(const FiberTriple& tr, double p, double q) {
  return std::pow(p * (2.0 - q) * tr.s / ((2.0 * p - q) * tr.b_val), 1.0 / (2.0 * p - 2.0));
}

namespace {

double homogeneous_part(const FiberTriple& tr, double p, double q) {
  return std::pow(tr.s, (2.0 * p - q) / (2.0 * (p - 1.0))) /
         (tr.a_val * std::pow(tr.b_val, (2.0 - q) / (2.0 * p - 2.0)));
}

}  // namespace

double lambda_n(const FiberTriple& tr, double p, double q) { return constants(p, q).c_pq * homogeneous_part(tr, p, q); }

double lambda_e(const FiberTriple& tr, double p, double q) {
  return constants(p, q).c_tilde_pq * homogeneous_part(tr, p, q);
}

NehariRoots nehari_roots(const FiberTriple& tr, double lambda, double p, double q) {
  NehariRoots out;
  const double tn = t_n(tr, p, q);
  const double peak = lambda_n(tr, p, q);
  if (std::abs(lambda - peak) <= kTangencyBand * std::max(1.0, std::abs(peak))) {
    out.kind = NehariRoots::Kind::tangent;
    out.t_tangent = tn;
    return out;
  }
  if (lambda > peak) return out;

  // Q_n - λ is increasing on (0, t_n] and decreasing on [t_n, ∞).
  auto g = [&](double t) { return q_n(t, tr, p, q) - lambda; };
  auto bisect = [&](double lo, double hi, bool rising) {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const bool above = g(mid) > 0.0;
      if (above == rising) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return 0.5 * (lo + hi);
  };
  double lo = 1e-30;
  out.t_plus = bisect(lo, tn, true);
  double hi = 2.0 * tn;
  while (g(hi) >= 0.0) hi *= 2.0;
  out.t_minus = bisect(tn, hi, false);
  out.kind = NehariRoots::Kind::two_roots;
  return out;
}

const char* to_string(Manifold m) {
  switch (m) {
    case Manifold::n_plus: return "Nplus";
    case Manifold::n_minus: return "Nminus";
    case Manifold::n_zero: return "Nzero";
    case Manifold::off_manifold: return "OffManifold";
  }
  return "Unknown";
}

Manifold classify(const FiberTriple& tr, double lambda, double p, double q) {
  const double sl = tr.s - lambda * tr.a_val - tr.b_val;
  if (std::abs(sl) > kNehariTol * tr.s) return Manifold::off_manifold;
  const double sec = tr.s - lambda * (q - 1.0) * tr.a_val - (2.0 * p - 1.0) * tr.b_val;
  const double band = kSecondTol * tr.s;
  if (sec > band) return Manifold::n_plus;
  if (sec < -band) return Manifold::n_minus;
  return Manifold::n_zero;
}

Manifold classify(const Problem& pr, const Field& u, double lambda) {
  if (u.max_abs() == 0.0) throw std::invalid_argument("cannot classify the zero field");
  return classify(fiber_triple(pr, u), lambda, pr.p(), pr.q());
}

double rayleigh_n(const FiberTriple& tr) { return (tr.s - tr.b_val) / tr.a_val; }

double rayleigh_e(const FiberTriple& tr, double p, double q) {
  return q * (0.5 * tr.s - tr.b_val / (2.0 * p)) / tr.a_val;
}

FiberingReport fibering_report(const FiberTriple& tr, double p, double q, std::optional<double> lambda) {
  FiberingReport r{t_n(tr, p, q), t_e(tr, p, q), lambda_n(tr, p, q), lambda_e(tr, p, q), std::nullopt};
  if (lambda) {
    const auto roots = nehari_roots(tr, *lambda, p, q);
    if (roots.kind == NehariRoots::Kind::two_roots) r.roots = std::pair{roots.t_plus, roots.t_minus};
  }
  return r;
}

void to_json(nlohmann::json& j, const FiberTriple& t) {
  j = nlohmann::json{{"norm_sq", t.s}, {"A", t.a_val}, {"B", t.b_val}};
}

void to_json(nlohmann::json& j, const FiberingReport& r) {
  j = nlohmann::json{{"t_n", r.t_n}, {"t_e", r.t_e}, {"lambda_n", r.lambda_n}, {"lambda_e", r.lambda_e}};
  if (r.roots) {
    j["t_plus"] = r.roots->first;
    j["t_minus"] = r.roots->second;
  } else {
    j["t_plus"] = nullptr;
    j["t_minus"] = nullptr;
  }
}

}  // namespace swnehari
