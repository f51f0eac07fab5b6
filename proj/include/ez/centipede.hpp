#pragma once
// Centipede and dollar games under random role assignment, analogy-class
// conjectures, and the maximal continuation EZ-SU.
//
// Nodes are 1..K; P1 moves at odd nodes, P2 at even ones. A strategy is a
// length-K vector of Drop probabilities; in role P1 only the odd entries are
// used, in role P2 only the even ones.

#include "ez/game.hpp"

#include <array>
#include <string>
#include <vector>

namespace ez::centipede {

struct Spec {
  int K = 6;
  double g = 1.0;
  double l = 1.0;
};

void validate(const Spec& s);
bool continuation_condition(const Spec& s);  // g > 2 l / (K - 2)

using Payoff = std::array<double, 2>;  // (P1, P2)

struct TreeGame {
  int K = 0;
  std::vector<Payoff> z;  // z[k-1]: Drop at node k
  Payoff z_end{0.0, 0.0};
};

TreeGame terminal_payoffs(const Spec& s);
TreeGame dollar_tree(int K);

using Strategy = std::vector<double>;

// Terminal distribution (z_1..z_K, z_end) when `p1` plays P1 and `p2` plays P2.
std::vector<double> terminal_distribution(const TreeGame& t, const Strategy& p1, const Strategy& p2);
// Probability that node k (1-based) is reached.
std::vector<double> reach_probabilities(const TreeGame& t, const Strategy& p1, const Strategy& p2);
Payoff expected_payoffs(const TreeGame& t, const Strategy& p1, const Strategy& p2);
// Role-averaged payoff of `own` against `opp`.
double symmetric_payoff(const TreeGame& t, const Strategy& own, const Strategy& opp);

// Cells in the order AA, AB, BA, BB; cell (g,g') is g's strategy against g'.
struct BehaviorProfile {
  std::array<Strategy, 4> d;
  Strategy& at(Group g, Group vs) { return d[2 * gi(g) + gi(vs)]; }
  const Strategy& at(Group g, Group vs) const { return d[2 * gi(g) + gi(vs)]; }
};

BehaviorProfile maximal_continuation_profile(const Spec& s);
BehaviorProfile all_drop_profile(int K);

// Proof's log-loss for the analogy conjecture under maximal continuation data.
double analogy_log_loss(int K, double x);
// Its minimizer, 2/K.
double analogy_conjecture(int K);

// Expected-data KL of a conjectured opponent strategy, with own play fixed and
// roles drawn 50-50. Uses 0 ln 0 = 0; +inf if the conjecture rules out data.
double conjecture_kl(const TreeGame& t, const Strategy& own, const Strategy& opp_actual, const Strategy& opp_conj);

// Best parity-constant conjecture (x_odd, x_even) about an opponent; the
// Bernoulli MLE at the opponent's reached nodes for each parity. Parities that
// are never reached get 0.
std::array<double, 2> best_analogy_conjecture(const TreeGame& t, const Strategy& own, const Strategy& opp_actual);
Strategy parity_strategy(int K, double x_odd, double x_even);

enum class TreeTheory { Rational, Analogy };

struct TreeVerdict {
  bool ok = true;
  std::string violation;
};

// First own node (1-based) where `own` is not sequentially optimal against the
// conjecture in role `role` (0 = P1, 1 = P2), or 0.
int backward_induction_violation(const TreeGame& t, int role, const Strategy& own, const Strategy& conj,
                                 double tol = 1e-9);

TreeVerdict verify_tree_ezsu(const TreeGame& t, const BehaviorProfile& profile, const Shares& shares, double lambda,
                             TreeTheory theory_a, TreeTheory theory_b, double tol = 1e-9, int kl_grid = 1001);

// Maximal continuation profile is an EZ-SU of (rational, analogy).
TreeVerdict verify_maximal_ezsu(const Spec& s, const Shares& shares, double lambda);
TreeVerdict verify_maximal_ezsu_dollar(int K, const Shares& shares, double lambda);

// Fitness of both groups from tree play under lambda-matching.
std::array<double, 2> tree_fitness(const TreeGame& t, const BehaviorProfile& profile, const Shares& shares,
                                   double lambda);

struct FitnessPair {
  double rational = 0.0;
  double analogy = 0.0;
};

// Uniform matching; p_rational is the share of the rational theory.
FitnessPair centipede_fitness(const Spec& s, double p_rational);
FitnessPair dollar_fitness(int K, double p_rational);
double stable_share_centipede(const Spec& s);

// Finite strategic form over pure Drop/Across plans with consequences
// (role, terminal) and the 50-50 role kernel. Strategy labels are strings of
// 'D'/'A' by node.
StageGame finite_game(const TreeGame& t);
int pure_index(const std::string& plan);

}  // namespace ez::centipede
