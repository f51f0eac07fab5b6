#pragma once
// Evolutionary stability of theories, stability reversal, assortativity sweeps,
// stable population shares, and the Theorem 1 toolkit (Nash/Stackelberg values,
// v^b correspondences, hull test, illusion-of-control theory).

#include "ez/solver.hpp"

#include <functional>
#include <optional>

namespace ez {

inline constexpr double kStrictMargin = 1e-9;

enum class StabilityKind { Stable, Fragile, Indeterminate, NoEz };
const char* to_string(StabilityKind k);

struct StabilityVerdict {
  StabilityKind kind = StabilityKind::NoEz;
  std::vector<EzRecord> witnesses;
};

StabilityVerdict classify_records(std::vector<EzRecord> ez);
StabilityVerdict classify_stability(const GameTables& game, const TheoryTables& ta, const TheoryTables& tb,
                                    double lambda, const EnumerateOptions& opt = {});
StabilityVerdict classify_stability(const StageGame& game, const Theory& ta, const Theory& tb, double lambda,
                                    const EnumerateOptions& opt = {});

struct ReversalReport {
  bool reversal = false;
  std::vector<EzRecord> resident_a;  // EZs at p = (1,0), lambda = 0
  std::vector<EzRecord> resident_b;  // EZs at p = (0,1), lambda = 0
};

ReversalReport detect_stability_reversal(const GameTables& game, const TheoryTables& ta, const TheoryTables& tb,
                                         const EnumerateOptions& opt = {});

struct SweepRow {
  double lambda = 0.0;
  int ez_index = 0;
  double fitness_a = 0.0;
  double fitness_b = 0.0;
  std::string belief_label;  // group B belief, situations joined by ';'
};

std::vector<SweepRow> assortativity_sweep(const GameTables& game, const TheoryTables& ta, const TheoryTables& tb,
                                          const std::vector<double>& lambda_grid, const EnumerateOptions& opt = {});

// Picks one EZ from an enumeration, or none.
using EzSelector = std::function<std::optional<EzRecord>(const std::vector<EzRecord>&)>;

// Selector preferring EZs where group B's belief in every situation is on the named model.
EzSelector select_by_belief_b(const TheoryTables& tb, const std::string& label);

struct StableShareResult {
  std::optional<double> p_b;
  bool degenerate = false;  // fitness gap identically zero on the scan grid
};

// Scans p_B on a grid in (0,1) for a change in regime of the selected EZ. A
// regime is the sign of fitness_A - fitness_B, or the absence of a selected EZ.
// The first change is refined by bisection to 1e-9.
StableShareResult stable_share(const GameTables& game, const TheoryTables& ta, const TheoryTables& tb,
                               double lambda, const EzSelector& selector, const EnumerateOptions& opt = {},
                               int grid = 200);

// ---- Theorem 1 toolkit (single situation payoff matrix, row player's payoff) ----

struct NashValue {
  double value = 0.0;
  int action = 0;
};
NashValue symmetric_nash_value(const Eigen::MatrixXd& payoff, double tie_tol = kTieTol);

struct StackelbergValue {
  double value = 0.0;
  int leader = 0;
  int follower = 0;
};
StackelbergValue stackelberg(const Eigen::MatrixXd& payoff, double tie_tol = kTieTol);

// Worst-case follower response to ai: objective best responses, ties broken
// against the leader.
int adversarial_response(const Eigen::MatrixXd& payoff, int ai, double tie_tol = kTieTol);

// A correspondence b: bit ai of masks[a_opp] is set iff ai is in b(a_opp).
using Correspondence = std::vector<unsigned>;
double v_b(const Eigen::MatrixXd& payoff, const Correspondence& b, double tie_tol = kTieTol);

struct Theorem1Report {
  Eigen::VectorXd v_ne, v_bar;
  bool hull_condition_holds = false;  // some hull point of finite v^b weakly dominates v^NE
  std::optional<Eigen::VectorXd> separating_q;
  double separation = 0.0;  // max-min margin of the LP
  bool lower_bound_only = false;
  long correspondences = 0;
  long finite_vertices = 0;
  bool situation_identifiable = false;
  bool stackelberg_identifiable = false;
};

struct Theorem1Options {
  double tie_tol = kTieTol;
  long cap = 1000000;
  long samples = 100000;
  unsigned long long seed = 1;
};

Theorem1Report theorem1_part1(const StageGame& game, const Theorem1Options& opt = {});

// Every v^b vector (one row per correspondence, -inf where no profile qualifies).
Eigen::MatrixXd all_v_b(const GameTables& game, double tie_tol = kTieTol);

struct Identifiability {
  bool situation = false;
  bool stackelberg = false;
};
Identifiability identifiability_checks(const StageGame& game, double tie_tol = kTieTol);

Theory construct_illusion_theory(const StageGame& game, double epsilon = 0.0, int max_halvings = 60);

// Singleton theory whose subjective best-response correspondence is b.
Theory correspondence_theory(const StageGame& game, const Correspondence& b);

// Enumerates all nonempty-valued correspondences on the game's strategy set.
std::vector<Correspondence> all_correspondences(int n_actions);

}  // namespace ez
