#pragma once
// Finite symmetric stage games, theories and zeitgeists.

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace ez {

inline constexpr double kPmfTol = 1e-12;
inline constexpr double kTieTol = 1e-9;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A kernel maps a strategy pair to a pmf over consequences. Row ai*n+aj holds
// the pmf for own strategy ai against opponent strategy aj.
using Kernel = Eigen::MatrixXd;

inline Eigen::Index kernel_row(int ai, int aj, int n_actions) {
  return static_cast<Eigen::Index>(ai) * n_actions + aj;
}

struct Situation {
  std::string id;
  Kernel kernel;
};

struct Model {
  std::string label;
  Kernel kernel;
};

struct Theory {
  std::string name;
  std::vector<Model> models;
};

struct StageGame {
  std::vector<std::string> strategies;
  std::vector<std::string> consequences;
  Eigen::VectorXd utility;
  std::vector<Situation> situations;
  Eigen::VectorXd q;

  int n_actions() const { return static_cast<int>(strategies.size()); }
  int n_consequences() const { return static_cast<int>(consequences.size()); }
  int n_situations() const { return static_cast<int>(situations.size()); }
  int strategy_index(const std::string& label) const;
  int consequence_index(const std::string& label) const;
};

struct ExtendedModel {
  int conj_a = 0;
  int conj_b = 0;
  Model model;
};

struct ExtendedTheory {
  std::string name;
  std::vector<ExtendedModel> models;
};

// Every conjecture pair crossed with every model of the theory.
ExtendedTheory unrestricted_extension(const Theory& theory, int n_actions);
ExtendedTheory fixed_conjecture_extension(const Theory& theory, int conj_a, int conj_b);

enum class Group { A = 0, B = 1 };
inline Group other(Group g) { return g == Group::A ? Group::B : Group::A; }
inline int gi(Group g) { return static_cast<int>(g); }

// Strategies in the four match cells of one situation, in the order
// (a_AA, a_AB, a_BA, a_BB). Cell (g,g') is what a g-agent plays against g'.
struct Profile {
  std::array<int, 4> a{0, 0, 0, 0};
  int& at(Group g, Group vs) { return a[2 * gi(g) + gi(vs)]; }
  int at(Group g, Group vs) const { return a[2 * gi(g) + gi(vs)]; }
  bool operator==(const Profile&) const = default;
};

struct Shares {
  double p_a = 1.0;
  double p_b = 0.0;
  double of(Group g) const { return g == Group::A ? p_a : p_b; }
};

struct MatchWeights {
  double own = 1.0;
  double other = 0.0;
};

MatchWeights match_weights(const Shares& shares, double lambda, Group group);
void validate_shares(const Shares& shares, double lambda);

// Beliefs are pmfs over the model indices of the group's theory.
using BeliefWeights = Eigen::VectorXd;

struct Zeitgeist {
  std::vector<BeliefWeights> belief_a;  // one per situation
  std::vector<BeliefWeights> belief_b;
  Shares shares;
  double lambda = 0.0;
  std::vector<Profile> profile;  // one per situation

  const BeliefWeights& belief(Group g, int s) const {
    return g == Group::A ? belief_a[s] : belief_b[s];
  }
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_game(const StageGame& game);
ValidationReport validate_theory(const Theory& theory, int n_actions, int n_consequences);
ValidationReport validate_belief(const BeliefWeights& w, int n_models);

// Throws ValidationError listing every violation; renormalizes pmfs that are
// within tolerance.
StageGame make_game(StageGame game);
Theory make_theory(Theory theory, int n_actions, int n_consequences);

// Expected utility of each kernel row: rows indexed like the kernel, reshaped
// to an n x n matrix (own strategy is the row).
Eigen::MatrixXd expected_utility(const Kernel& kernel, const Eigen::VectorXd& utility, int n_actions);

// The correctly specified theory {F(.,.,G) : G}.
Theory correct_theory(const StageGame& game, const std::string& name = "correct");

// Kernel for a binary-consequence game (g,b) from a table of P(g) by profile.
Kernel binary_kernel(const Eigen::MatrixXd& prob_good);

}  // namespace ez
