#include "ez/game.hpp"

#include <cmath>
#include <sstream>

namespace ez {

int StageGame::strategy_index(const std::string& label) const {
  for (int i = 0; i < n_actions(); ++i)
    if (strategies[i] == label) return i;
  throw ValidationError("unknown strategy: " + label);
}

int StageGame::consequence_index(const std::string& label) const {
  for (int i = 0; i < n_consequences(); ++i)
    if (consequences[i] == label) return i;
  throw ValidationError("unknown consequence: " + label);
}

ExtendedTheory unrestricted_extension(const Theory& theory, int n_actions) {
  ExtendedTheory ext{theory.name, {}};
  for (const Model& m : theory.models)
    for (int ca = 0; ca < n_actions; ++ca)
      for (int cb = 0; cb < n_actions; ++cb) ext.models.push_back({ca, cb, m});
  return ext;
}

ExtendedTheory fixed_conjecture_extension(const Theory& theory, int conj_a, int conj_b) {
  ExtendedTheory ext{theory.name, {}};
  for (const Model& m : theory.models) ext.models.push_back({conj_a, conj_b, m});
  return ext;
}

void validate_shares(const Shares& s, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw ValidationError("assortativity must lie in [0,1]");
  if (s.p_a < 0.0 || s.p_b < 0.0 || std::abs(s.p_a + s.p_b - 1.0) > kPmfTol)
    throw ValidationError("shares must be nonnegative and sum to 1");
}

MatchWeights match_weights(const Shares& shares, double lambda, Group group) {
  validate_shares(shares, lambda);
  const double pg = shares.of(group);
  return {lambda + (1.0 - lambda) * pg, (1.0 - lambda) * (1.0 - pg)};
}

namespace {

void check_kernel(const Kernel& k, int n_actions, int n_cons, const std::string& what,
                  std::vector<std::string>& out) {
  const Eigen::Index rows = static_cast<Eigen::Index>(n_actions) * n_actions;
  if (k.rows() != rows || k.cols() != n_cons) {
    std::ostringstream os;
    os << what << ": kernel is " << k.rows() << "x" << k.cols() << ", expected " << rows << "x"
       << n_cons << " (missing entries)";
    out.push_back(os.str());
    return;
  }
  for (Eigen::Index r = 0; r < rows; ++r) {
    const int ai = static_cast<int>(r / n_actions), aj = static_cast<int>(r % n_actions);
    if (!k.row(r).allFinite() || (k.row(r).array() < 0.0).any()) {
      std::ostringstream os;
      os << what << " (" << ai << "," << aj << "): negative or non-finite probability";
      out.push_back(os.str());
    }
    const double sum = k.row(r).sum();
    if (std::abs(sum - 1.0) > kPmfTol) {
      std::ostringstream os;
      os.precision(15);
      os << what << " (" << ai << "," << aj << "): pmf sums to " << sum;
      out.push_back(os.str());
    }
  }
}

void normalize_rows(Kernel& k) {
  for (Eigen::Index r = 0; r < k.rows(); ++r) k.row(r) /= k.row(r).sum();
}

}  // namespace

ValidationReport validate_game(const StageGame& g) {
  ValidationReport rep;
  if (g.strategies.empty()) rep.violations.push_back("strategy set is empty");
  if (g.consequences.empty()) rep.violations.push_back("consequence set is empty");
  if (g.utility.size() != g.n_consequences())
    rep.violations.push_back("utility is not defined on every consequence");
  if (g.situations.empty()) rep.violations.push_back("no situations");
  if (g.q.size() != g.n_situations()) {
    rep.violations.push_back("situation distribution has wrong length");
  } else if (g.q.size() > 0) {
    if ((g.q.array() < 0.0).any()) rep.violations.push_back("situation distribution has a negative entry");
    if (std::abs(g.q.sum() - 1.0) > kPmfTol) {
      std::ostringstream os;
      os.precision(15);
      os << "situation distribution sums to " << g.q.sum();
      rep.violations.push_back(os.str());
    }
  }
  for (const Situation& s : g.situations)
    check_kernel(s.kernel, g.n_actions(), g.n_consequences(), "situation " + s.id, rep.violations);
  return rep;
}

ValidationReport validate_theory(const Theory& t, int n_actions, int n_cons) {
  ValidationReport rep;
  if (t.models.empty()) rep.violations.push_back("theory " + t.name + " is empty");
  for (const Model& m : t.models)
    check_kernel(m.kernel, n_actions, n_cons, "model " + m.label, rep.violations);
  return rep;
}

ValidationReport validate_belief(const BeliefWeights& w, int n_models) {
  ValidationReport rep;
  if (w.size() != n_models) {
    rep.violations.push_back("belief has wrong length");
    return rep;
  }
  if ((w.array() < 0.0).any()) rep.violations.push_back("belief has a negative weight");
  if (std::abs(w.sum() - 1.0) > kPmfTol) rep.violations.push_back("belief weights do not sum to 1");
  return rep;
}

namespace {
[[noreturn]] void throw_report(const std::string& head, const ValidationReport& rep) {
  std::string msg = head;
  for (const auto& v : rep.violations) msg += "\n  " + v;
  throw ValidationError(msg);
}
}  // namespace

StageGame make_game(StageGame g) {
  auto rep = validate_game(g);
  if (!rep.ok()) throw_report("invalid game:", rep);
  for (Situation& s : g.situations) normalize_rows(s.kernel);
  g.q /= g.q.sum();
  return g;
}

Theory make_theory(Theory t, int n_actions, int n_cons) {
  auto rep = validate_theory(t, n_actions, n_cons);
  if (!rep.ok()) throw_report("invalid theory:", rep);
  for (Model& m : t.models) normalize_rows(m.kernel);
  return t;
}

Eigen::MatrixXd expected_utility(const Kernel& kernel, const Eigen::VectorXd& utility, int n) {
  Eigen::VectorXd flat = kernel * utility;
  // Row-major reshape: entry (ai, aj) sits at flat[ai*n+aj].
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), n, n);
}

Theory correct_theory(const StageGame& game, const std::string& name) {
  Theory t{name, {}};
  for (const Situation& s : game.situations) t.models.push_back({"F*" + s.id, s.kernel});
  return t;
}

Kernel binary_kernel(const Eigen::MatrixXd& pg) {
  const Eigen::Index n = pg.rows();
  Kernel k(n * n, 2);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      k(i * n + j, 0) = pg(i, j);
      k(i * n + j, 1) = 1.0 - pg(i, j);
    }
  return k;
}

}  // namespace ez
