#pragma once

// Closed-form fibering algebra along a fixed direction u, expressed through
// the scalar triple s = ‖u‖², A(u), B(u):
//   Q_n(t) = R_n(tu) = (t^{2-q} s - t^{2p-q} B) / A
//   Q_e(t) = R_e(tu) = q (½ s t^{2-q} - t^{2p-q} B / 2p) / A

#include <optional>

#include "swnehari/functional.hpp"

namespace swnehari {

struct FiberTriple {
  double s;      // ‖u‖²
  double a_val;  // A(u)
  double b_val;  // B(u)

  /// Triple of t u from the homogeneities t², t^q, t^{2p}.
  FiberTriple scaled(double t, double p, double q) const;
};

FiberTriple fiber_triple(const Problem& pr, const Field& u);

struct FiberingConstants {
  double c_pq;        // C_{p,q} = ((2-q)/(2p-q))^{(2-q)/(2p-2)} (2p-2)/(2p-q)
  double c_tilde_pq;  // C̃_{p,q}
  double ratio;       // C̃/C = q p^{(2-q)/(2(p-1))} / 2, in (0,1)
};

/// Throws std::invalid_argument unless 1 <= q < 2 and p > 1.
FiberingConstants constants(double p, double q);

double q_n(double t, const FiberTriple& tr, double p, double q);
double q_e(double t, const FiberTriple& tr, double p, double q);
double q_n_prime(double t, const FiberTriple& tr, double p, double q);
double q_e_prime(double t, const FiberTriple& tr, double p, double q);

/// Unique maximizer of Q_n.
double t_n(const FiberTriple& tr, double p, double q);
/// Unique maximizer of Q_e; equals p^{1/(2p-2)} t_n.
double t_e(const FiberTriple& tr, double p, double q);

/// Λ_n = max Q_n = C_{p,q} s^{(2p-q)/(2(p-1))} / (A B^{(2-q)/(2p-2)}).
double lambda_n(const FiberTriple& tr, double p, double q);
/// Λ_e = max Q_e = C̃_{p,q} s^{(2p-q)/(2(p-1))} / (A B^{(2-q)/(2p-2)}).
double lambda_e(const FiberTriple& tr, double p, double q);

/// Relative dead-band around λ = Λ_n treated as tangency.
inline constexpr double kTangencyBand = 1e-12;

struct NehariRoots {
  enum class Kind { two_roots, tangent, no_root };
  Kind kind = Kind::no_root;
  double t_plus = 0.0;   // two_roots: root on the rising branch (N⁺)
  double t_minus = 0.0;  // two_roots: root on the falling branch (N⁻)
  double t_tangent = 0.0;
};

/// Solves Q_n(t) = λ by bisection on each side of t_n.
NehariRoots nehari_roots(const FiberTriple& tr, double lambda, double p, double q);

enum class Manifold { n_plus, n_minus, n_zero, off_manifold };

const char* to_string(Manifold m);

inline constexpr double kNehariTol = 1e-8;
inline constexpr double kSecondTol = 1e-8;

/// OffManifold when |J'(u)u| > kNehariTol ‖u‖², else by the sign of
/// J''(u)(u,u) with dead-band kSecondTol ‖u‖². Throws on u ≡ 0.
Manifold classify(const Problem& pr, const Field& u, double lambda);
Manifold classify(const FiberTriple& tr, double lambda, double p, double q);

/// R_n(u) = (‖u‖² - B)/A and R_e(u) = q(½‖u‖² - B/2p)/A.
double rayleigh_n(const FiberTriple& tr);
double rayleigh_e(const FiberTriple& tr, double p, double q);

struct FiberingReport {
  double t_n = 0.0;
  double t_e = 0.0;
  double lambda_n = 0.0;
  double lambda_e = 0.0;
  std::optional<std::pair<double, double>> roots;  // (t_plus, t_minus)
};

FiberingReport fibering_report(const FiberTriple& tr, double p, double q, std::optional<double> lambda = {});

void to_json(nlohmann::json& j, const FiberTriple& t);
void to_json(nlohmann::json& j, const FiberingReport& r);

}  // namespace swnehari
