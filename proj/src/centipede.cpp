#include "ez/centipede.hpp"

#include "ez/inference.hpp"

#include <cmath>
#include <sstream>

namespace ez::centipede {

void validate(const Spec& s) {
  if (s.K < 4 || s.K % 2 != 0) throw ValidationError("centipede: K must be an even integer >= 4");
  if (!(s.g > 0.0) || !(s.l > 0.0)) throw ValidationError("centipede: g and l must be positive");
}

bool continuation_condition(const Spec& s) { return s.g > 2.0 * s.l / (s.K - 2); }

TreeGame terminal_payoffs(const Spec& s) {
  validate(s);
  TreeGame t;
  t.K = s.K;
  for (int k = 1; k <= s.K; ++k) {
    if (k % 2 == 1)
      t.z.push_back({s.g * (k - 1) / 2.0, s.g * (k - 1) / 2.0});
    else
      t.z.push_back({(k - 2) / 2.0 * s.g - s.l, k / 2.0 * s.g + s.l});
  }
  t.z_end = {s.K * s.g / 2.0, s.K * s.g / 2.0};
  return t;
}

TreeGame dollar_tree(int K) {
  if (K < 2 || K % 2 != 0) throw ValidationError("dollar game: K must be even");
  TreeGame t;
  t.K = K;
  for (int k = 1; k <= K; ++k) t.z.push_back(k % 2 == 1 ? Payoff{double(k), 0.0} : Payoff{0.0, double(k)});
  t.z_end = {K + 2.0, 0.0};
  return t;
}

namespace {

int mover(int k) { return k % 2 == 1 ? 0 : 1; }

void check_strategy(const TreeGame& t, const Strategy& d) {
  if (static_cast<int>(d.size()) != t.K) throw ValidationError("strategy length differs from K");
  for (double x : d)
    if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("drop probability outside [0,1]");
}

}  // namespace

std::vector<double> terminal_distribution(const TreeGame& t, const Strategy& p1, const Strategy& p2) {
  check_strategy(t, p1);
  check_strategy(t, p2);
  std::vector<double> out(t.K + 1, 0.0);
  double reach = 1.0;
  for (int k = 1; k <= t.K; ++k) {
    const double d = mover(k) == 0 ? p1[k - 1] : p2[k - 1];
    out[k - 1] = reach * d;
    reach *= 1.0 - d;
  }
  out[t.K] = reach;
  return out;
}

std::vector<double> reach_probabilities(const TreeGame& t, const Strategy& p1, const Strategy& p2) {
  std::vector<double> out(t.K, 0.0);
  double reach = 1.0;
  for (int k = 1; k <= t.K; ++k) {
    out[k - 1] = reach;
    reach *= 1.0 - (mover(k) == 0 ? p1[k - 1] : p2[k - 1]);
  }
  return out;
}

Payoff expected_payoffs(const TreeGame& t, const Strategy& p1, const Strategy& p2) {
  const auto dist = terminal_distribution(t, p1, p2);
  Payoff u{0.0, 0.0};
  for (int k = 0; k < t.K; ++k)
    for (int r = 0; r < 2; ++r) u[r] += dist[k] * t.z[k][r];
  for (int r = 0; r < 2; ++r) u[r] += dist[t.K] * t.z_end[r];
  return u;
}

double symmetric_payoff(const TreeGame& t, const Strategy& own, const Strategy& opp) {
  return 0.5 * expected_payoffs(t, own, opp)[0] + 0.5 * expected_payoffs(t, opp, own)[1];
}

BehaviorProfile maximal_continuation_profile(const Spec& s) {
  validate(s);
  const int K = s.K;
  BehaviorProfile p;
  p.at(Group::A, Group::A) = Strategy(K, 1.0);
  Strategy bb(K, 0.0);
  bb[K - 1] = 1.0;
  p.at(Group::B, Group::B) = bb;
  Strategy ab(K, 0.0);
  ab[K - 2] = ab[K - 1] = 1.0;
  p.at(Group::A, Group::B) = ab;
  p.at(Group::B, Group::A) = bb;
  return p;
}

BehaviorProfile all_drop_profile(int K) {
  BehaviorProfile p;
  for (auto& d : p.d) d = Strategy(K, 1.0);
  return p;
}

double analogy_log_loss(int K, double x) {
  if (x <= 0.0 || x >= 1.0) return kInf;
  return 0.5 * -((K / 2.0 - 1.0) * std::log1p(-x) + std::log(x));
}

double analogy_conjecture(int K) {
  if (K < 4 || K % 2 != 0) throw ValidationError("analogy conjecture needs even K >= 4");
  return 2.0 / K;
}

namespace {

double kl_terms(const std::vector<double>& p, const std::vector<double>& q) {
  double d = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return kInf;
    d += p[i] * std::log(p[i] / q[i]);
  }
  return d;
}

}  // namespace

double conjecture_kl(const TreeGame& t, const Strategy& own, const Strategy& actual, const Strategy& conj) {
  const double as_p1 = kl_terms(terminal_distribution(t, own, actual), terminal_distribution(t, own, conj));
  const double as_p2 = kl_terms(terminal_distribution(t, actual, own), terminal_distribution(t, conj, own));
  return 0.5 * as_p1 + 0.5 * as_p2;
}

Strategy parity_strategy(int K, double x_odd, double x_even) {
  Strategy d(K);
  for (int k = 1; k <= K; ++k) d[k - 1] = k % 2 == 1 ? x_odd : x_even;
  return d;
}

std::array<double, 2> best_analogy_conjecture(const TreeGame& t, const Strategy& own, const Strategy& actual) {
  // Opponent moves at odd nodes when it is P1 (own is P2) and at even nodes otherwise.
  const auto reach_odd = reach_probabilities(t, actual, own);
  const auto reach_even = reach_probabilities(t, own, actual);
  std::array<double, 2> num{0.0, 0.0}, den{0.0, 0.0};
  for (int k = 1; k <= t.K; ++k) {
    const int par = k % 2 == 1 ? 0 : 1;
    const double r = par == 0 ? reach_odd[k - 1] : reach_even[k - 1];
    num[par] += r * actual[k - 1];
    den[par] += r;
  }
  return {den[0] > 0.0 ? num[0] / den[0] : 0.0, den[1] > 0.0 ? num[1] / den[1] : 0.0};
}

int backward_induction_violation(const TreeGame& t, int role, const Strategy& own, const Strategy& conj,
                                 double tol) {
  check_strategy(t, own);
  check_strategy(t, conj);
  double v = t.z_end[role];
  int first = 0;
  for (int k = t.K; k >= 1; --k) {
    const double drop = t.z[k - 1][role];
    if (mover(k) != role) {
      v = conj[k - 1] * drop + (1.0 - conj[k - 1]) * v;
      continue;
    }
    const double d = own[k - 1];
    bool ok;
    if (d >= 1.0 - 1e-12)
      ok = drop >= v - tol;
    else if (d <= 1e-12)
      ok = v >= drop - tol;
    else
      ok = std::abs(v - drop) <= tol;
    if (!ok) first = k;
    v = d * drop + (1.0 - d) * v;
  }
  return first;
}

namespace {

const char* gname(Group g) { return g == Group::A ? "A" : "B"; }

}  // namespace

TreeVerdict verify_tree_ezsu(const TreeGame& t, const BehaviorProfile& profile, const Shares& shares, double lambda,
                             TreeTheory theory_a, TreeTheory theory_b, double tol, int kl_grid) {
  for (const auto& d : profile.d) check_strategy(t, d);
  TreeVerdict out;
  for (Group g : {Group::A, Group::B}) {
    const TreeTheory th = g == Group::A ? theory_a : theory_b;
    const MatchWeights w = match_weights(shares, lambda, g);
    for (Group vs : {Group::A, Group::B}) {
      const Strategy& own = profile.at(g, vs);
      const Strategy& actual = profile.at(vs, g);
      Strategy conj = actual;
      if (th == TreeTheory::Analogy) {
        const auto x = best_analogy_conjecture(t, own, actual);
        conj = parity_strategy(t.K, x[0], x[1]);
        const double weight = vs == g ? w.own : w.other;
        if (weight > 0.0) {
          // The objective separates by parity, so a grid scan along each
          // coordinate is enough to certify minimality.
          const double k_star = conjecture_kl(t, own, actual, conj);
          for (int par = 0; par < 2; ++par)
            for (int i = 0; i < kl_grid; ++i) {
              auto y = x;
              y[par] = static_cast<double>(i) / (kl_grid - 1);
              const double k = conjecture_kl(t, own, actual, parity_strategy(t.K, y[0], y[1]));
              if (k < k_star - tol) {
                std::ostringstream os;
                os << "group " << gname(g) << " vs " << gname(vs) << ": conjecture is not KL-minimal";
                out.ok = false;
                out.violation = os.str();
                return out;
              }
            }
        }
      }
      for (int role = 0; role < 2; ++role) {
        const int node = backward_induction_violation(t, role, own, conj, tol);
        if (node) {
          std::ostringstream os;
          os << "group " << gname(g) << " vs " << gname(vs) << " as P" << role + 1 << ": not optimal at node "
             << node;
          out.ok = false;
          out.violation = os.str();
          return out;
        }
      }
    }
  }
  return out;
}

TreeVerdict verify_maximal_ezsu(const Spec& s, const Shares& shares, double lambda) {
  return verify_tree_ezsu(terminal_payoffs(s), maximal_continuation_profile(s), shares, lambda, TreeTheory::Rational,
                          TreeTheory::Analogy);
}

TreeVerdict verify_maximal_ezsu_dollar(int K, const Shares& shares, double lambda) {
  Spec s{K, 1.0, 1.0};
  return verify_tree_ezsu(dollar_tree(K), maximal_continuation_profile(s), shares, lambda, TreeTheory::Rational,
                          TreeTheory::Analogy);
}

std::array<double, 2> tree_fitness(const TreeGame& t, const BehaviorProfile& profile, const Shares& shares,
                                   double lambda) {
  std::array<double, 2> f{0.0, 0.0};
  for (Group g : {Group::A, Group::B}) {
    const MatchWeights w = match_weights(shares, lambda, g);
    f[gi(g)] = w.own * symmetric_payoff(t, profile.at(g, g), profile.at(g, g)) +
               w.other * symmetric_payoff(t, profile.at(g, other(g)), profile.at(other(g), g));
  }
  return f;
}

FitnessPair centipede_fitness(const Spec& s, double p) {
  validate(s);
  const double K = s.K, g = s.g, l = s.l;
  FitnessPair f;
  f.rational = p * 0.0 + (1.0 - p) * (0.5 * g * (K - 2) / 2.0 + 0.5 * (g * K / 2.0 + l));
  f.analogy = p * (0.5 * (g * (K - 2) / 2.0 - l) + 0.5 * g * (K - 2) / 2.0) +
              (1.0 - p) * (0.5 * (g * (K - 2) / 2.0 - l) + 0.5 * (g * K / 2.0 + l));
  return f;
}

FitnessPair dollar_fitness(int K, double p) {
  FitnessPair f;
  f.rational = 0.5 * p + (1.0 - p) * (0.5 * (K - 1) + 0.5 * K);
  f.analogy = (1.0 - p) * K / 2.0;
  return f;
}

double stable_share_centipede(const Spec& s) {
  validate(s);
  if (!continuation_condition(s)) throw ValidationError("stable share needs g > 2l/(K-2)");
  return 1.0 - s.l / (s.g * (s.K - 2));
}

int pure_index(const std::string& plan) {
  int idx = 0;
  for (char c : plan) idx = 2 * idx + (c == 'D' ? 1 : 0);
  return idx;
}

StageGame finite_game(const TreeGame& t) {
  const int K = t.K, n = 1 << K;
  StageGame g;
  std::vector<Strategy> plans(n);
  for (int i = 0; i < n; ++i) {
    std::string label(K, 'A');
    plans[i] = Strategy(K, 0.0);
    for (int k = 0; k < K; ++k)
      if (i >> (K - 1 - k) & 1) {
        label[k] = 'D';
        plans[i][k] = 1.0;
      }
    g.strategies.push_back(label);
  }
  for (int role = 1; role <= 2; ++role) {
    for (int k = 1; k <= K; ++k) g.consequences.push_back(std::to_string(role) + ":z" + std::to_string(k));
    g.consequences.push_back(std::to_string(role) + ":zend");
  }
  const int ny = 2 * (K + 1);
  g.utility.resize(ny);
  for (int role = 0; role < 2; ++role) {
    for (int k = 0; k < K; ++k) g.utility(role * (K + 1) + k) = t.z[k][role];
    g.utility(role * (K + 1) + K) = t.z_end[role];
  }
  Kernel ker = Kernel::Zero(n * n, ny);
  for (int ai = 0; ai < n; ++ai)
    for (int aj = 0; aj < n; ++aj) {
      const auto d1 = terminal_distribution(t, plans[ai], plans[aj]);
      const auto d2 = terminal_distribution(t, plans[aj], plans[ai]);
      for (int z = 0; z <= K; ++z) {
        ker(kernel_row(ai, aj, n), z) = 0.5 * d1[z];
        ker(kernel_row(ai, aj, n), (K + 1) + z) = 0.5 * d2[z];
      }
    }
  g.situations.push_back({"G", ker});
  g.q = Eigen::VectorXd::Ones(1);
  return make_game(std::move(g));
}

}  // namespace ez::centipede
