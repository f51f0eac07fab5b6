#pragma once
// Linear-quadratic-normal Cournot duopoly with misperceived signal correlation.
//
// Firms see s_i = w + e_i with e_i = (k z + (1-k) eta_i)/sqrt(k^2+(1-k)^2),
// price P = w - r (q_1+q_2)/2 + zeta, profit q_i P - q_i^2/2, and play linear
// strategies q_i = alpha_i s_i. Everything here is closed form.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ez::lqn {

struct LqnError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename Scalar = double>
struct Params {
  Scalar sigma_w2 = 1;
  Scalar sigma_e2 = 1;
  Scalar r_true = 1;
  Scalar kappa_true = Scalar(0.3);
  Scalar sigma_z2 = 1;
  // Strategy and inference bounds; zero means "use the default".
  Scalar m_alpha = 0;
  Scalar m_r = 0;
};

template <typename Scalar>
void validate(const Params<Scalar>& p) {
  if (!(p.sigma_w2 > 0) || !(p.sigma_e2 > 0)) throw LqnError("variances must be positive");
  if (!(p.r_true >= 0)) throw LqnError("elasticity must be nonnegative");
  if (!(p.kappa_true >= 0 && p.kappa_true <= 1)) throw LqnError("kappa_true outside [0,1]");
  if (!(p.sigma_z2 >= 0)) throw LqnError("price-shock variance must be nonnegative");
}

template <typename Scalar>
Scalar signal_second_moment(const Params<Scalar>& p) {
  return p.sigma_w2 + p.sigma_e2;
}

template <typename Scalar>
Scalar psi(Scalar kappa, const Params<Scalar>& p) {
  if (!(kappa >= 0 && kappa <= 1)) throw LqnError("kappa outside [0,1]");
  const Scalar n = kappa * kappa + (1 - kappa) * (1 - kappa);
  const Scalar inv = 1 + (1 - kappa) * (1 - kappa) * p.sigma_e2 / (n * p.sigma_w2 + kappa * kappa * p.sigma_e2);
  return 1 / inv;
}

template <typename Scalar>
Scalar gamma(const Params<Scalar>& p) {
  return (1 / p.sigma_e2) / (1 / p.sigma_e2 + 1 / p.sigma_w2);
}

template <typename Scalar>
Scalar alpha_max(const Params<Scalar>& p) {
  return p.m_alpha > 0 ? p.m_alpha : 10 * gamma(p);
}

template <typename Scalar>
Scalar r_max(const Params<Scalar>& p) {
  return p.m_r > 0 ? p.m_r : 10 * p.r_true * (1 + 1 / psi(Scalar(0), p));
}

template <typename Scalar>
struct Slope {
  Scalar value;
  bool clamped = false;
};

// Subjectively optimal slope against alpha_opp under belief (kappa, r).
template <typename Scalar>
Slope<Scalar> alpha_br(Scalar alpha_opp, Scalar kappa, Scalar r, const Params<Scalar>& p) {
  if (!(r >= 0)) throw LqnError("believed elasticity must be nonnegative");
  const Scalar a = (gamma(p) - Scalar(0.5) * r * psi(kappa, p) * alpha_opp) / (1 + r);
  if (a < 0) return {Scalar(0), true};
  return {a, false};
}

// Zero-KL elasticity inference given the slopes and believed kappa.
template <typename Scalar>
Scalar r_inf(Scalar alpha_i, Scalar alpha_opp, Scalar kappa, const Params<Scalar>& p) {
  const Scalar den = alpha_i + alpha_opp * psi(kappa, p);
  if (!(den > 0)) throw LqnError("r_inf: both slopes are zero");
  return p.r_true * (alpha_i + alpha_opp * psi(p.kappa_true, p)) / den;
}

// E[P | s_i] per unit signal under elasticity r and correlation kappa.
template <typename Scalar>
Scalar price_mean(Scalar s, Scalar alpha_i, Scalar alpha_opp, Scalar r, Scalar kappa, const Params<Scalar>& p) {
  return s * (gamma(p) - Scalar(0.5) * r * (alpha_i + alpha_opp * psi(kappa, p)));
}

// Interim expected profit from quantity q at signal s under belief (r, kappa).
template <typename Scalar>
Scalar interim_payoff(Scalar q, Scalar s, Scalar alpha_opp, Scalar r, Scalar kappa, const Params<Scalar>& p) {
  return q * (gamma(p) * s - Scalar(0.5) * r * q - Scalar(0.5) * r * alpha_opp * psi(kappa, p) * s) -
         Scalar(0.5) * q * q;
}

template <typename Scalar>
Scalar objective_payoff(Scalar alpha_i, Scalar alpha_opp, const Params<Scalar>& p) {
  const Scalar r = p.r_true, ps = psi(p.kappa_true, p);
  return signal_second_moment(p) * (alpha_i * gamma(p) - Scalar(0.5) * r * alpha_i * alpha_i -
                                    Scalar(0.5) * r * ps * alpha_i * alpha_opp - Scalar(0.5) * alpha_i * alpha_i);
}

template <typename Scalar>
Scalar alpha_rational(const Params<Scalar>& p) {
  return gamma(p) / (1 + p.r_true + Scalar(0.5) * p.r_true * psi(p.kappa_true, p));
}

template <typename Scalar>
Scalar alpha_team(const Params<Scalar>& p) {
  return gamma(p) / (1 + p.r_true + p.r_true * psi(p.kappa_true, p));
}

// Rational response to a mutant slope x.
template <typename Scalar>
Scalar ell(Scalar x, const Params<Scalar>& p) {
  return (gamma(p) - Scalar(0.5) * p.r_true * psi(p.kappa_true, p) * x) / (1 + p.r_true);
}

template <typename Scalar>
Scalar H(Scalar x, Scalar kappa, const Params<Scalar>& p) {
  const Scalar r = p.r_true, ps = psi(p.kappa_true, p), pk = psi(kappa, p), l = ell(x, p);
  return x * x * (-1 - r) + x * l * (-pk - Scalar(0.5) * r * pk - r * ps) - l * l * (Scalar(0.5) * r * ps * pk) +
         gamma(p) * (x + l * pk);
}

template <typename Scalar>
Scalar h_upper(const Params<Scalar>& p) {
  return gamma(p) / (Scalar(0.5) * p.r_true * psi(p.kappa_true, p));
}

// Roots of H on [0, gamma / (r psi(kappa_true)/2)].
template <typename Scalar>
std::vector<Scalar> h_roots(Scalar kappa, const Params<Scalar>& p) {
  using std::abs;
  using std::sqrt;
  const Scalar hi = h_upper(p);
  // H is exactly quadratic, so three evaluations give its coefficients.
  const Scalar h0 = H(Scalar(0), kappa, p), h1 = H(hi / 2, kappa, p), h2 = H(hi, kappa, p);
  const Scalar m = hi / 2;
  const Scalar a = (h2 - 2 * h1 + h0) / (2 * m * m);
  const Scalar b = (h1 - h0) / m - a * m;
  const Scalar c = h0;
  const Scalar tol = Scalar(1e-12) * (1 + hi);
  std::vector<Scalar> roots;
  auto keep = [&](Scalar x) {
    if (x >= -tol && x <= hi + tol) roots.push_back(x < 0 ? Scalar(0) : x > hi ? hi : x);
  };
  if (abs(a) < Scalar(1e-10)) {
    // Nearly linear: bisection on the sign change.
    if ((h0 <= 0) == (h2 <= 0)) return roots;
    Scalar lo = 0, up = hi;
    for (int it = 0; it < 200 && up - lo > Scalar(1e-15); ++it) {
      const Scalar mid = (lo + up) / 2;
      ((H(mid, kappa, p) <= 0) == (h0 <= 0) ? lo : up) = mid;
    }
    roots.push_back((lo + up) / 2);
    return roots;
  }
  const Scalar disc = b * b - 4 * a * c;
  if (disc < 0) return roots;
  const Scalar sq = sqrt(disc);
  // Numerically stable pair.
  const Scalar qv = b >= 0 ? -(b + sq) / 2 : -(b - sq) / 2;
  const Scalar x1 = qv / a;
  const Scalar x2 = qv != 0 ? c / qv : x1;
  keep(x1);
  if (abs(x2 - x1) > tol) keep(x2);
  std::sort(roots.begin(), roots.end());
  return roots;
}

template <typename Scalar>
struct Ez {
  Scalar alpha_aa = 0, alpha_ab = 0, alpha_ba = 0, alpha_bb = 0;
  Scalar r_a = 0, r_b = 0;
  Scalar fitness_a = 0, fitness_b = 0;
};

// Uniform matching, p = (1,0): residents hold the correct kappa, mutants kappa_m.
template <typename Scalar>
Ez<Scalar> solve_ez_uniform(const Params<Scalar>& p, Scalar kappa_m) {
  validate(p);
  const auto roots = h_roots(kappa_m, p);
  if (roots.size() != 1)
    throw LqnError("H has " + std::to_string(roots.size()) + " roots in the admissible interval");
  Ez<Scalar> ez;
  ez.alpha_aa = alpha_rational(p);
  ez.r_a = p.r_true;
  ez.alpha_ba = roots[0];
  ez.alpha_ab = ell(ez.alpha_ba, p);
  ez.r_b = r_inf(ez.alpha_ba, ez.alpha_ab, kappa_m, p);
  ez.alpha_bb = gamma(p) / (1 + ez.r_b + Scalar(0.5) * ez.r_b * psi(kappa_m, p));
  ez.fitness_a = objective_payoff(ez.alpha_aa, ez.alpha_aa, p);
  ez.fitness_b = objective_payoff(ez.alpha_ba, ez.alpha_ab, p);
  return ez;
}

// Cross-group slopes where each side best responds under its own (kappa, r).
template <typename Scalar>
std::pair<Scalar, Scalar> mutual_best_response(Scalar kappa_1, Scalar r_1, Scalar kappa_2, Scalar r_2,
                                               const Params<Scalar>& p) {
  const Scalar g = gamma(p);
  const Scalar c1 = Scalar(0.5) * r_1 * psi(kappa_1, p) / (1 + r_1);
  const Scalar c2 = Scalar(0.5) * r_2 * psi(kappa_2, p) / (1 + r_2);
  const Scalar g1 = g / (1 + r_1), g2 = g / (1 + r_2);
  // a1 = g1 - c1 a2, a2 = g2 - c2 a1, each clamped at zero.
  Scalar a1 = (g1 - c1 * g2) / (1 - c1 * c2);
  Scalar a2 = (g2 - c2 * g1) / (1 - c1 * c2);
  if (a1 < 0) {
    a1 = 0;
    a2 = g2;
  } else if (a2 < 0) {
    a2 = 0;
    a1 = g1;
  }
  return {a1, a2};
}

// Perfectly assortative matching.
template <typename Scalar>
Ez<Scalar> solve_ez_assortative(const Params<Scalar>& p, Scalar kappa_a, Scalar kappa_b) {
  validate(p);
  const Scalar ps = psi(p.kappa_true, p), r = p.r_true, g = gamma(p);
  auto slope = [&](Scalar k) {
    return g / (1 + r / 2 * (1 + ps) + r / 2 * ((1 + ps) / (1 + psi(k, p))));
  };
  Ez<Scalar> ez;
  ez.r_a = (1 + ps) / (1 + psi(kappa_a, p)) * r;
  ez.r_b = (1 + ps) / (1 + psi(kappa_b, p)) * r;
  ez.alpha_aa = slope(kappa_a);
  ez.alpha_bb = slope(kappa_b);
  const auto cross = mutual_best_response(kappa_a, ez.r_a, kappa_b, ez.r_b, p);
  ez.alpha_ab = cross.first;
  ez.alpha_ba = cross.second;
  ez.fitness_a = objective_payoff(ez.alpha_aa, ez.alpha_aa, p);
  ez.fitness_b = objective_payoff(ez.alpha_bb, ez.alpha_bb, p);
  return ez;
}

template <typename Scalar>
struct NoLearning {
  Scalar alpha_ba;
  Scalar fitness_vs_rational;  // lambda = 0
  Scalar alpha_bb;
  Scalar fitness_assortative;  // lambda = 1
};

// Mutant dogmatic on (r_true, kappa).
template <typename Scalar>
NoLearning<Scalar> no_learning_alpha(const Params<Scalar>& p, Scalar kappa) {
  validate(p);
  const Scalar r = p.r_true, g = gamma(p), pk = psi(kappa, p), ps = psi(p.kappa_true, p);
  NoLearning<Scalar> out;
  out.alpha_ba = g * (1 + r - Scalar(0.5) * pk * r) / (1 + 2 * r + r * r - Scalar(0.25) * pk * ps * r * r);
  out.fitness_vs_rational = objective_payoff(out.alpha_ba, ell(out.alpha_ba, p), p);
  out.alpha_bb = g / (1 + r + Scalar(0.5) * r * pk);
  out.fitness_assortative = objective_payoff(out.alpha_bb, out.alpha_bb, p);
  return out;
}

// Sign condition for small deviations of kappa around kappa_true; positive means
// a slightly higher kappa invades, negative a slightly lower one.
template <typename Scalar>
Scalar fragility_direction(const Params<Scalar>& p, int lambda, Scalar h = Scalar(1e-5)) {
  if (lambda != 0 && lambda != 1) throw LqnError("fragility_direction needs lambda in {0,1}");
  const Scalar k0 = p.kappa_true;
  const Scalar kl = k0 - h < 0 ? Scalar(0) : k0 - h, kh = k0 + h > 1 ? Scalar(1) : k0 + h;
  Scalar d;
  if (lambda == 0)
    d = (solve_ez_uniform(p, kh).alpha_ab - solve_ez_uniform(p, kl).alpha_ab) / (kh - kl);
  else
    d = (solve_ez_assortative(p, k0, kh).alpha_bb - solve_ez_assortative(p, k0, kl).alpha_bb) / (kh - kl);
  return signal_second_moment(p) * (-Scalar(0.5) * psi(k0, p) * p.r_true * alpha_rational(p)) * d;
}

// Largest grid interval around kappa_true on which H has exactly one root.
template <typename Scalar>
std::optional<std::pair<Scalar, Scalar>> unique_root_interval(const Params<Scalar>& p, int grid = 1000) {
  std::vector<char> ok(grid + 1);
  for (int i = 0; i <= grid; ++i) ok[i] = h_roots(Scalar(i) / grid, p).size() == 1;
  int c = static_cast<int>(std::lround(static_cast<double>(p.kappa_true) * grid));
  if (!ok[c]) return std::nullopt;
  int lo = c, hi = c;
  while (lo > 0 && ok[lo - 1]) --lo;
  while (hi < grid && ok[hi + 1]) ++hi;
  return std::make_pair(Scalar(lo) / grid, Scalar(hi) / grid);
}

// ---- two situations r_true in {0, r_bar}, q(r_bar) = eps ----

template <typename Scalar>
struct MultiSituationReport {
  Scalar rational_fitness = 0;
  Scalar best_singleton_fitness = 0;
  Scalar best_singleton_r = 0, best_singleton_kappa = 0;
  bool rational_beats_all_singletons = false;
  Scalar rational_at_rbar = 0;
  Scalar projection_at_rbar = 0;  // mutant fitness at r_bar; both equal rational at r_true = 0
  Scalar projection_fitness = 0;
  bool projection_beats_rational = false;
};

// Singleton mutant (r, kappa) against residents who know the situation.
template <typename Scalar>
Scalar singleton_payoff(const Params<Scalar>& situation, Scalar r, Scalar kappa) {
  const auto ab = mutual_best_response(kappa, r, situation.kappa_true, situation.r_true, situation);
  return objective_payoff(ab.first, ab.second, situation);
}

template <typename Scalar>
MultiSituationReport<Scalar> multi_situation_comparison(const Params<Scalar>& base, Scalar r_bar, Scalar eps,
                                                        Scalar kappa_proj, const std::vector<Scalar>& r_grid,
                                                        const std::vector<Scalar>& kappa_grid) {
  if (!(eps > 0 && eps < 1)) throw LqnError("eps must lie in (0,1)");
  Params<Scalar> s0 = base, s1 = base;
  s0.r_true = 0;
  s1.r_true = r_bar;
  MultiSituationReport<Scalar> rep;
  const Scalar g = gamma(base);
  const Scalar u0 = signal_second_moment(base) * g * g / 2;
  rep.rational_at_rbar = objective_payoff(alpha_rational(s1), alpha_rational(s1), s1);
  rep.rational_fitness = (1 - eps) * u0 + eps * rep.rational_at_rbar;
  bool first = true;
  for (Scalar r : r_grid)
    for (Scalar k : kappa_grid) {
      const Scalar f = (1 - eps) * singleton_payoff(s0, r, k) + eps * singleton_payoff(s1, r, k);
      if (first || f > rep.best_singleton_fitness) {
        rep.best_singleton_fitness = f;
        rep.best_singleton_r = r;
        rep.best_singleton_kappa = k;
        first = false;
      }
    }
  rep.rational_beats_all_singletons = rep.best_singleton_fitness < rep.rational_fitness - Scalar(1e-9);
  // At r_true = 0 the projection learner infers r = 0 and plays gamma, like the resident.
  rep.projection_at_rbar = solve_ez_uniform(s1, kappa_proj).fitness_b;
  rep.projection_fitness = (1 - eps) * u0 + eps * rep.projection_at_rbar;
  rep.projection_beats_rational = rep.projection_at_rbar > rep.rational_at_rbar + Scalar(1e-12);
  return rep;
}

}  // namespace ez::lqn
