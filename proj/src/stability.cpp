#include "ez/stability.hpp"

#include "ez/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

namespace ez {

const char* to_string(StabilityKind k) {
  switch (k) {
    case StabilityKind::Stable: return "Stable";
    case StabilityKind::Fragile: return "Fragile";
    case StabilityKind::Indeterminate: return "Indeterminate";
    case StabilityKind::NoEz: return "NoEz";
  }
  return "?";
}

StabilityVerdict classify_records(std::vector<EzRecord> ez) {
  StabilityVerdict v;
  if (ez.empty()) return v;
  bool all_weak = true, all_strict_lower = true;
  for (const EzRecord& r : ez) {
    const double d = r.fitness_a - r.fitness_b;
    if (d < -kStrictMargin) all_weak = false;
    if (!(d < -kStrictMargin)) all_strict_lower = false;
  }
  v.kind = all_weak ? StabilityKind::Stable : all_strict_lower ? StabilityKind::Fragile : StabilityKind::Indeterminate;
  v.witnesses = std::move(ez);
  return v;
}

StabilityVerdict classify_stability(const GameTables& game, const TheoryTables& ta, const TheoryTables& tb,
                                    double lambda, const EnumerateOptions& opt) {
  return classify_records(enumerate_ez(game, ta, tb, {1.0, 0.0}, lambda, opt));
}

StabilityVerdict classify_stability(const StageGame& game, const Theory& ta, const Theory& tb, double lambda,
                                    const EnumerateOptions& opt) {
  return classify_stability(reduce(game), reduce(game, ta), reduce(game, tb), lambda, opt);
}

ReversalReport detect_stability_reversal(const GameTables& game, const TheoryTables& ta, const TheoryTables& tb,
                                         const EnumerateOptions& opt) {
  if (game.n_situations() != 1) throw ValidationError("stability reversal is defined for a single situation");
  ReversalReport rep;
  rep.resident_a = enumerate_ez(game, ta, tb, {1.0, 0.0}, 0.0, opt);
  rep.resident_b = enumerate_ez(game, ta, tb, {0.0, 1.0}, 0.0, opt);
  if (rep.resident_a.empty() || rep.resident_b.empty()) return rep;
  bool ok = true;
  for (const EzRecord& r : rep.resident_a) {
    const double vs_a = r.conditional(0, 0) - r.conditional(1, 0);
    const double vs_b = r.conditional(0, 1) - r.conditional(1, 1);
    if (!(vs_a > kStrictMargin && vs_b > kStrictMargin)) ok = false;
  }
  for (const EzRecord& r : rep.resident_b)
    if (!(r.fitness_b - r.fitness_a > kStrictMargin)) ok = false;
  rep.reversal = ok;
  return rep;
}

std::vector<SweepRow> assortativity_sweep(const GameTables& game, const TheoryTables& ta, const TheoryTables& tb,
                                          const std::vector<double>& grid, const EnumerateOptions& opt) {
  std::vector<SweepRow> rows;
  for (double lam : grid) {
    const auto ez = enumerate_ez(game, ta, tb, {1.0, 0.0}, lam, opt);
    for (size_t i = 0; i < ez.size(); ++i) {
      std::string label;
      for (size_t s = 0; s < ez[i].zeitgeist.belief_b.size(); ++s) {
        if (s) label += ";";
        label += belief_label(tb, ez[i].zeitgeist.belief_b[s]);
      }
      rows.push_back({lam, static_cast<int>(i), ez[i].fitness_a, ez[i].fitness_b, label});
    }
  }
  return rows;
}

EzSelector select_by_belief_b(const TheoryTables& tb, const std::string& label) {
  int idx = -1;
  for (int m = 0; m < tb.n_models(); ++m)
    if (tb.labels[m] == label) idx = m;
  if (idx < 0) throw ValidationError("no model labelled " + label);
  return [idx](const std::vector<EzRecord>& ez) -> std::optional<EzRecord> {
    for (const EzRecord& r : ez) {
      bool all = true;
      for (const auto& b : r.zeitgeist.belief_b)
        if (b(idx) < 1.0 - kPmfTol) all = false;
      if (all) return r;
    }
    return std::nullopt;
  };
}

StableShareResult stable_share(const GameTables& game, const TheoryTables& ta, const TheoryTables& tb,
                               double lambda, const EzSelector& selector, const EnumerateOptions& opt, int grid) {
  auto regime = [&](double pb, bool& zero_gap) {
    const auto ez = enumerate_ez(game, ta, tb, {1.0 - pb, pb}, lambda, opt);
    const auto pick = selector(ez);
    if (!pick) return 2;
    const double d = pick->fitness_a - pick->fitness_b;
    if (std::abs(d) > kStrictMargin) zero_gap = false;
    return d > kStrictMargin ? 1 : d < -kStrictMargin ? -1 : 0;
  };
  StableShareResult res;
  bool zero_gap = true, any_ez = false;
  double prev_p = 1.0 / grid;
  int prev = regime(prev_p, zero_gap);
  any_ez |= prev != 2;
  for (int i = 2; i < grid; ++i) {
    const double p = static_cast<double>(i) / grid;
    const int cur = regime(p, zero_gap);
    any_ez |= cur != 2;
    if (cur != prev && !res.p_b) {
      double lo = prev_p, hi = p;
      bool dummy = true;
      while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        (regime(mid, dummy) == prev ? lo : hi) = mid;
      }
      res.p_b = 0.5 * (lo + hi);
    }
    prev = cur;
    prev_p = p;
  }
  res.degenerate = any_ez && zero_gap;
  if (res.degenerate) res.p_b.reset();
  return res;
}

// ---- Theorem 1 toolkit ----

NashValue symmetric_nash_value(const Eigen::MatrixXd& u, double tol) {
  bool found = false;
  NashValue best;
  for (int a = 0; a < u.rows(); ++a) {
    if (u(a, a) < u.col(a).maxCoeff() - tol) continue;
    if (!found || u(a, a) > best.value + tol) best = {u(a, a), a};
    found = true;
  }
  if (!found) throw ValidationError("no symmetric pure Nash equilibrium (Theorem 1 hypothesis fails)");
  return best;
}

int adversarial_response(const Eigen::MatrixXd& u, int ai, double tol) {
  // Follower's payoff from playing aj against ai is u(aj, ai).
  const double hi = u.col(ai).maxCoeff();
  int pick = -1;
  for (int aj = 0; aj < u.rows(); ++aj)
    if (u(aj, ai) >= hi - tol && (pick < 0 || u(ai, aj) < u(ai, pick) - tol)) pick = aj;
  return pick;
}

StackelbergValue stackelberg(const Eigen::MatrixXd& u, double tol) {
  const int n = static_cast<int>(u.rows());
  Eigen::VectorXd val(n);
  for (int a = 0; a < n; ++a) val(a) = u(a, adversarial_response(u, a, tol));
  const double hi = val.maxCoeff();
  std::vector<int> args;
  for (int a = 0; a < n; ++a)
    if (val(a) >= hi - tol) args.push_back(a);
  if (args.size() != 1) throw ValidationError("Stackelberg strategy is not unique");
  const int lead = args[0];
  int n_br = 0;
  for (int aj = 0; aj < n; ++aj)
    if (u(aj, lead) >= u.col(lead).maxCoeff() - tol) ++n_br;
  if (n_br != 1) throw ValidationError("follower best response to the Stackelberg strategy is not unique");
  return {hi, lead, adversarial_response(u, lead, tol)};
}

double v_b(const Eigen::MatrixXd& u, const Correspondence& b, double tol) {
  const int n = static_cast<int>(u.rows());
  double lo = kInf;
  bool any = false;
  for (int ai = 0; ai < n; ++ai)
    for (int aj = 0; aj < n; ++aj) {
      if (!(b[aj] >> ai & 1u)) continue;
      if (u(aj, ai) < u.col(ai).maxCoeff() - tol) continue;
      lo = std::min(lo, u(ai, aj));
      any = true;
    }
  return any ? lo : -kInf;
}

std::vector<Correspondence> all_correspondences(int n) {
  const unsigned full = (1u << n) - 1u;
  std::vector<Correspondence> out;
  Correspondence c(n, 1u);
  while (true) {
    out.push_back(c);
    int k = n - 1;
    while (k >= 0 && c[k] == full) c[k--] = 1u;
    if (k < 0) break;
    ++c[k];
  }
  return out;
}

Eigen::MatrixXd all_v_b(const GameTables& game, double tol) {
  const auto cs = all_correspondences(game.n_actions());
  Eigen::MatrixXd out(cs.size(), game.n_situations());
  for (size_t k = 0; k < cs.size(); ++k)
    for (int s = 0; s < game.n_situations(); ++s) out(k, s) = v_b(game.payoff[s], cs[k], tol);
  return out;
}

Theorem1Report theorem1_part1(const StageGame& sg, const Theorem1Options& opt) {
  const GameTables game = reduce(sg);
  const int ns = game.n_situations(), n = game.n_actions();
  Theorem1Report rep;
  rep.v_ne.resize(ns);
  rep.v_bar.resize(ns);
  for (int s = 0; s < ns; ++s) {
    rep.v_ne(s) = symmetric_nash_value(game.payoff[s], opt.tie_tol).value;
    try {
      rep.v_bar(s) = stackelberg(game.payoff[s], opt.tie_tol).value;
    } catch (const ValidationError&) {
      rep.v_bar(s) = std::numeric_limits<double>::quiet_NaN();
    }
  }

  std::set<std::vector<double>> vertices;
  auto add = [&](const Correspondence& c) {
    std::vector<double> v(ns);
    for (int s = 0; s < ns; ++s) v[s] = v_b(game.payoff[s], c, opt.tie_tol);
    if (std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); })) vertices.insert(v);
  };
  const double count = std::pow(std::pow(2.0, n) - 1.0, n);
  if (count <= static_cast<double>(opt.cap)) {
    for (const auto& c : all_correspondences(n)) add(c);
    rep.correspondences = static_cast<long>(count);
  } else {
    rep.lower_bound_only = true;
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<unsigned> pick(1u, (1u << n) - 1u);
    for (long k = 0; k < opt.samples; ++k) {
      Correspondence c(n);
      for (auto& m : c) m = pick(rng);
      add(c);
    }
    rep.correspondences = opt.samples;
  }
  rep.finite_vertices = static_cast<long>(vertices.size());

  Eigen::VectorXd q;
  if (vertices.empty()) {
    rep.hull_condition_holds = false;
    rep.separation = kInf;
    q = Eigen::VectorXd::Constant(ns, 1.0 / ns);
  } else {
    Eigen::MatrixXd pts(vertices.size(), ns);
    int k = 0;
    for (const auto& v : vertices) pts.row(k++) = Eigen::Map<const Eigen::RowVectorXd>(v.data(), ns);
    const Separation sep = max_min_separation(rep.v_ne, pts);
    rep.separation = sep.t;
    rep.hull_condition_holds = sep.t <= 1e-12;
    q = sep.q;
  }
  if (!rep.hull_condition_holds) {
    q = q.cwiseMax(0.0);
    q /= q.sum();
    q = q.cwiseMax(1e-6);
    q /= q.sum();
    rep.separating_q = q;
  }
  const Identifiability id = identifiability_checks(sg, opt.tie_tol);
  rep.situation_identifiable = id.situation;
  rep.stackelberg_identifiable = id.stackelberg;
  return rep;
}

namespace {

bool pmf_differs(const Eigen::RowVectorXd& p, const Eigen::RowVectorXd& q) {
  return (p - q).cwiseAbs().maxCoeff() > kPmfTol;
}

}  // namespace

Identifiability identifiability_checks(const StageGame& sg, double tol) {
  const GameTables game = reduce(sg);
  const int n = sg.n_actions(), ns = sg.n_situations();
  Identifiability id{true, true};
  for (int s = 0; s < ns; ++s)
    for (int t = s + 1; t < ns; ++t)
      for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(n) * n; ++r)
        if (!pmf_differs(sg.situations[s].kernel.row(r), sg.situations[t].kernel.row(r))) id.situation = false;
  for (int s = 0; s < ns; ++s) {
    int lead;
    try {
      lead = stackelberg(game.payoff[s], tol).leader;
    } catch (const ValidationError&) {
      id.stackelberg = false;
      continue;
    }
    for (int t = 0; t < ns; ++t) {
      if (t == s) continue;
      const auto br_s = objective_best_responses(game.payoff[s], lead, tol);
      const auto br_t = objective_best_responses(game.payoff[t], lead, tol);
      for (int a : br_s)
        for (int b : br_t)
          if (!pmf_differs(sg.situations[s].kernel.row(kernel_row(lead, a, n)),
                           sg.situations[t].kernel.row(kernel_row(lead, b, n))))
            id.stackelberg = false;
    }
  }
  return id;
}

namespace {

Theory illusion_at(const StageGame& sg, const GameTables& game, double eps) {
  const int n = sg.n_actions(), ns = sg.n_situations(), ny = sg.n_consequences();
  Theory th;
  th.name = "illusion";
  const Eigen::RowVectorXd uniform = Eigen::RowVectorXd::Constant(ny, 1.0 / ny);
  for (int s = 0; s < ns; ++s) {
    const double t = eps * (s + 1) / ns;
    Kernel k(n * n, ny);
    for (int ai = 0; ai < n; ++ai) {
      const int f = adversarial_response(game.payoff[s], ai);
      const Eigen::RowVectorXd row = (1.0 - t) * sg.situations[s].kernel.row(kernel_row(ai, f, n)) + t * uniform;
      for (int aj = 0; aj < n; ++aj) k.row(kernel_row(ai, aj, n)) = row;
    }
    th.models.push_back({"F_" + sg.situations[s].id, k});
  }
  return th;
}

bool unique_inference(const StageGame& sg, const Theory& th) {
  const int n = sg.n_actions();
  for (const Situation& sit : sg.situations)
    for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(n) * n; ++r) {
      Eigen::VectorXd obj(th.models.size());
      for (size_t m = 0; m < th.models.size(); ++m)
        obj(m) = kl_divergence(sit.kernel.row(r).transpose(), th.models[m].kernel.row(r).transpose());
      const BestFit fit = best_fit_set(obj);
      if (fit.all_infinite || fit.members.size() != 1) return false;
    }
  return true;
}

}  // namespace

Theory construct_illusion_theory(const StageGame& sg, double eps, int max_halvings) {
  const GameTables game = reduce(sg);
  Theory th = illusion_at(sg, game, eps);
  if (unique_inference(sg, th)) return th;
  if (eps <= 0.0) eps = 0.05;
  for (int k = 0; k < max_halvings; ++k, eps *= 0.5) {
    th = illusion_at(sg, game, eps);
    if (unique_inference(sg, th)) return th;
  }
  throw ValidationError("illusion theory: could not make every best-fitting model unique");
}

Theory correspondence_theory(const StageGame& sg, const Correspondence& b) {
  const int n = sg.n_actions();
  Eigen::Index hi, lo;
  sg.utility.maxCoeff(&hi);
  sg.utility.minCoeff(&lo);
  if (!(sg.utility(hi) > sg.utility(lo))) throw ValidationError("utility is constant; no correspondence model");
  Kernel k = Kernel::Zero(n * n, sg.n_consequences());
  for (int ai = 0; ai < n; ++ai)
    for (int aj = 0; aj < n; ++aj) {
      const bool in = b[aj] >> ai & 1u;
      k(kernel_row(ai, aj, n), hi) = in ? 0.75 : 0.25;
      k(kernel_row(ai, aj, n), lo) = in ? 0.25 : 0.75;
    }
  std::ostringstream os;
  os << "F_b";
  for (unsigned m : b) os << "_" << m;
  return Theory{"singleton", {Model{os.str(), k}}};
}

}  // namespace ez
