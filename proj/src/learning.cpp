#include "ez/learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

namespace ez {

double LearningConfig::epsilon(int t) const { return std::max(eps0 * std::pow(eps_decay, t), 0.0); }

namespace {

BeliefWeights resolved_prior(const BeliefWeights& p, int n) {
  return p.size() == 0 ? BeliefWeights(BeliefWeights::Constant(n, 1.0 / n)) : p;
}

}  // namespace

void validate_config(const LearningConfig& c, int n_models_a, int n_models_b) {
  std::vector<std::string> bad;
  if (c.n_agents <= 0) bad.push_back("n_agents must be positive");
  if (!(c.tau >= 0.0 && c.tau < 1.0)) bad.push_back("tau must lie in [0,1)");
  if (c.horizon <= 0) bad.push_back("horizon must be positive");
  if (!(c.eps0 >= 0.0) || !(c.eps_decay > 0.0 && c.eps_decay <= 1.0))
    bad.push_back("epsilon schedule must be nonnegative and nonincreasing");
  if (c.situation_block < 0) bad.push_back("situation_block must be nonnegative");
  if (c.threads <= 0) bad.push_back("threads must be positive");
  try {
    validate_shares(c.shares, c.lambda);
  } catch (const ValidationError& e) {
    bad.push_back(e.what());
  }
  auto check_prior = [&](const BeliefWeights& p, int n, const char* who) {
    const BeliefWeights r = resolved_prior(p, n);
    const ValidationReport v = validate_belief(r, n);
    for (const auto& m : v.violations) bad.push_back(std::string(who) + ": " + m);
    if (v.ok() && (r.array() <= 0.0).any()) bad.push_back(std::string(who) + ": prior must have full support");
  };
  check_prior(c.prior_a, n_models_a, "prior_a");
  check_prior(c.prior_b, n_models_b, "prior_b");
  if (!bad.empty()) {
    std::string msg = "invalid learning config:";
    for (const auto& b : bad) msg += " " + b + ";";
    throw ValidationError(msg);
  }
}

double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  return 0.5 * (p - q).cwiseAbs().sum();
}

Eigen::VectorXd Trajectory::base_belief(int period, Group g) const {
  const auto& base = g == Group::A ? base_a : base_b;
  const auto& labels = g == Group::A ? labels_a : labels_b;
  const Eigen::VectorXd& b = g == Group::A ? periods.at(period).belief_a : periods.at(period).belief_b;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(labels.size());
  for (size_t e = 0; e < base.size(); ++e) out(base[e]) += b(e);
  return out;
}

Eigen::VectorXd Trajectory::conjecture(int period, Group g, Group vs) const {
  const auto& c = conj[2 * gi(g) + gi(vs)];
  const Eigen::VectorXd& b = g == Group::A ? periods.at(period).belief_a : periods.at(period).belief_b;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_actions);
  for (size_t e = 0; e < c.size(); ++e) out(c[e]) += b(e);
  return out;
}

BeliefWeights bayes_update(const BeliefWeights& prior, const ExtendedTheory& theory, const StageGame& game,
                           const Observation& obs, double tau) {
  const int n = game.n_actions();
  if (prior.size() != static_cast<Eigen::Index>(theory.models.size()))
    throw ValidationError("belief size differs from the number of extended models");
  BeliefWeights post(prior.size());
  for (size_t e = 0; e < theory.models.size(); ++e) {
    const ExtendedModel& m = theory.models[e];
    const int conj = obs.opp_group == Group::A ? m.conj_a : m.conj_b;
    const double f = m.model.kernel(kernel_row(obs.own, conj, n), obs.consequence);
    const double sig = tau * (obs.signal == conj ? 1.0 : 0.0) + (1.0 - tau) / n;
    post(e) = prior(e) * f * sig;
  }
  const double total = post.sum();
  if (!(total > 0.0)) throw ValidationError("observation has zero likelihood under every model in the support");
  return post / total;
}

void check_regularity(const StageGame& game, const ExtendedTheory& ta, const ExtendedTheory& tb) {
  const int n = game.n_actions(), ny = game.n_consequences();
  for (const ExtendedTheory* t : {&ta, &tb})
    for (const Situation& s : game.situations)
      for (int ai = 0; ai < n; ++ai)
        for (int aj = 0; aj < n; ++aj)
          for (int y = 0; y < ny; ++y) {
            if (s.kernel(kernel_row(ai, aj, n), y) <= 0.0) continue;
            for (const ExtendedModel& m : t->models)
              for (int conj : {m.conj_a, m.conj_b})
                if (!(m.model.kernel(kernel_row(ai, conj, n), y) > 0.0)) {
                  std::ostringstream os;
                  os << "regularity: theory " << t->name << " model " << m.model.label << " gives "
                     << game.consequences[y] << " zero probability at " << game.strategies[ai] << " vs "
                     << game.strategies[conj] << " in situation " << s.id;
                  throw ValidationError(os.str());
                }
          }
}

namespace {

struct SplitMix64 {
  std::uint64_t s;
  std::uint64_t next() {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

std::uint64_t mix(std::uint64_t a, std::uint64_t b) { return SplitMix64{a ^ SplitMix64{b}.next()}.next(); }

// Counter-based stream for one agent in one period.
SplitMix64 stream(std::uint64_t seed, std::uint64_t period, std::uint64_t who) {
  return SplitMix64{mix(mix(seed, period), who)};
}

int draw(const Eigen::Ref<const Eigen::RowVectorXd>& pmf, double u) {
  double c = 0.0;
  for (Eigen::Index y = 0; y < pmf.size(); ++y) {
    c += pmf(y);
    if (u < c) return static_cast<int>(y);
  }
  for (Eigen::Index y = pmf.size() - 1; y >= 0; --y)
    if (pmf(y) > 0.0) return static_cast<int>(y);
  return 0;
}

struct GroupTables {
  int E = 0;
  std::vector<Eigen::MatrixXd> util;                // [e]: n x n, own vs conjecture
  std::array<std::vector<int>, 2> conj;             // [vs][e]
  std::array<std::vector<Eigen::MatrixXd>, 2> logf;  // [vs][e]: n x ny
  Eigen::VectorXd log_prior;
};

GroupTables tables_for(const StageGame& game, const ExtendedTheory& t, const BeliefWeights& prior) {
  const int n = game.n_actions(), ny = game.n_consequences();
  GroupTables g;
  g.E = static_cast<int>(t.models.size());
  for (const ExtendedModel& m : t.models) {
    g.util.push_back(expected_utility(m.model.kernel, game.utility, n));
    g.conj[0].push_back(m.conj_a);
    g.conj[1].push_back(m.conj_b);
    for (int vs = 0; vs < 2; ++vs) {
      const int c = vs == 0 ? m.conj_a : m.conj_b;
      Eigen::MatrixXd lf(n, ny);
      for (int a = 0; a < n; ++a)
        for (int y = 0; y < ny; ++y) {
          const double f = m.model.kernel(kernel_row(a, c, n), y);
          lf(a, y) = f > 0.0 ? std::log(f) : -std::numeric_limits<double>::infinity();
        }
      g.logf[vs].push_back(std::move(lf));
    }
  }
  g.log_prior = prior.array().log();
  return g;
}

template <class F>
void parallel_for(int n, int threads, F&& f) {
  if (threads <= 1 || n < 2 * threads) {
    f(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (n + threads - 1) / threads;
  for (int lo = 0; lo < n; lo += chunk) pool.emplace_back([&f, lo, hi = std::min(n, lo + chunk)] { f(lo, hi); });
  for (auto& th : pool) th.join();
}

void base_index(const ExtendedTheory& t, std::vector<int>& base, std::vector<std::string>& labels) {
  std::map<std::string, int> seen;
  for (const ExtendedModel& m : t.models) {
    auto it = seen.find(m.model.label);
    if (it == seen.end()) {
      it = seen.emplace(m.model.label, static_cast<int>(labels.size())).first;
      labels.push_back(m.model.label);
    }
    base.push_back(it->second);
  }
}

}  // namespace

Trajectory simulate(const LearningConfig& cfg, const StageGame& game, const ExtendedTheory& ta,
                    const ExtendedTheory& tb) {
  const int Ea = static_cast<int>(ta.models.size()), Eb = static_cast<int>(tb.models.size());
  validate_config(cfg, Ea, Eb);
  if (cfg.situation_block == 0 && (cfg.situation < 0 || cfg.situation >= game.n_situations()))
    throw ValidationError("situation index out of range");
  check_regularity(game, ta, tb);

  const int n = game.n_actions(), N = cfg.n_agents;
  const std::array<GroupTables, 2> gt{tables_for(game, ta, resolved_prior(cfg.prior_a, Ea)),
                                      tables_for(game, tb, resolved_prior(cfg.prior_b, Eb))};
  const std::array<MatchWeights, 2> mw{match_weights(cfg.shares, cfg.lambda, Group::A),
                                       match_weights(cfg.shares, cfg.lambda, Group::B)};

  Trajectory traj;
  traj.n_actions = n;
  base_index(ta, traj.base_a, traj.labels_a);
  base_index(tb, traj.base_b, traj.labels_b);
  for (int g = 0; g < 2; ++g)
    for (int vs = 0; vs < 2; ++vs) traj.conj[2 * g + vs] = gt[g].conj[vs];
  traj.periods.reserve(cfg.horizon);

  std::array<std::vector<double>, 2> logb, weights;
  std::array<std::array<std::vector<int>, 2>, 2> strat;  // [g][vs][agent]
  std::array<std::vector<double>, 2> payoff;
  for (int g = 0; g < 2; ++g) {
    logb[g].assign(static_cast<size_t>(N) * gt[g].E, 0.0);
    weights[g].assign(logb[g].size(), 0.0);
    payoff[g].assign(N, 0.0);
    for (auto& v : strat[g]) v.assign(N, 0);
  }
  auto reset = [&](int g) {
    for (int i = 0; i < N; ++i)
      for (int e = 0; e < gt[g].E; ++e) logb[g][static_cast<size_t>(i) * gt[g].E + e] = gt[g].log_prior(e);
  };

  int s = cfg.situation;
  const std::uint64_t kSituationStream = ~0ULL;
  for (int t = 0; t < cfg.horizon; ++t) {
    if (cfg.situation_block > 0 && t % cfg.situation_block == 0) {
      SplitMix64 r = stream(cfg.seed, t / cfg.situation_block, kSituationStream);
      s = draw(game.q.transpose(), r.uniform());
      reset(0);
      reset(1);
    } else if (t == 0) {
      reset(0);
      reset(1);
    }
    const double eps = cfg.epsilon(t);
    const Kernel& truth = game.situations[s].kernel;

    // Beliefs and play from the start-of-period posterior.
    for (int g = 0; g < 2; ++g) {
      const GroupTables& G = gt[g];
      parallel_for(N, cfg.threads, [&](int lo, int hi) {
        Eigen::VectorXd u(n);
        for (int i = lo; i < hi; ++i) {
          double* lb = &logb[g][static_cast<size_t>(i) * G.E];
          double* w = &weights[g][static_cast<size_t>(i) * G.E];
          const double hiv = *std::max_element(lb, lb + G.E);
          double tot = 0.0;
          for (int e = 0; e < G.E; ++e) tot += (w[e] = std::exp(lb[e] - hiv));
          for (int e = 0; e < G.E; ++e) w[e] /= tot;
          for (int vs = 0; vs < 2; ++vs) {
            u.setZero();
            for (int e = 0; e < G.E; ++e)
              if (w[e] > 0.0) u += w[e] * G.util[e].col(G.conj[vs][e]);
            const double best = u.maxCoeff();
            int a = 0;
            while (u(a) < best - eps) ++a;
            strat[g][vs][i] = a;
          }
        }
      });
    }

    PeriodRecord rec;
    rec.situation = s;
    for (int g = 0; g < 2; ++g)
      for (int vs = 0; vs < 2; ++vs) {
        Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
        for (int a : strat[g][vs]) d(a) += 1.0;
        rec.play[2 * g + vs] = d / N;
      }
    for (int g = 0; g < 2; ++g) {
      Eigen::VectorXd m = Eigen::VectorXd::Zero(gt[g].E);
      for (int i = 0; i < N; ++i)
        m += Eigen::Map<const Eigen::VectorXd>(&weights[g][static_cast<size_t>(i) * gt[g].E], gt[g].E);
      (g == 0 ? rec.belief_a : rec.belief_b) = m / N;
    }

    // Matching, consequences, signals, and updating.
    for (int g = 0; g < 2; ++g) {
      const GroupTables& G = gt[g];
      parallel_for(N, cfg.threads, [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) {
          SplitMix64 r = stream(cfg.seed, t, static_cast<std::uint64_t>(g) * N + i);
          const int h = r.uniform() < mw[g].own ? g : 1 - g;
          const int j = std::min(N - 1, static_cast<int>(r.uniform() * N));
          const int a_opp = strat[h][g][j];
          const int own = strat[g][h][i];
          const int y = draw(truth.row(kernel_row(own, a_opp, n)), r.uniform());
          const double u_sig = r.uniform();
          const int signal = u_sig < cfg.tau ? a_opp : std::min(n - 1, static_cast<int>(r.uniform() * n));
          payoff[g][i] = game.utility(y);
          double* lb = &logb[g][static_cast<size_t>(i) * G.E];
          for (int e = 0; e < G.E; ++e) {
            const int c = G.conj[h][e];
            lb[e] += G.logf[h][e](own, y) + std::log(cfg.tau * (signal == c ? 1.0 : 0.0) + (1.0 - cfg.tau) / n);
          }
          const double hiv = *std::max_element(lb, lb + G.E);
          for (int e = 0; e < G.E; ++e) lb[e] -= hiv;
        }
      });
    }
    double pa = 0.0, pb = 0.0;
    for (int i = 0; i < N; ++i) {
      pa += payoff[0][i];
      pb += payoff[1][i];
    }
    rec.payoff_a = pa / N;
    rec.payoff_b = pb / N;
    traj.periods.push_back(std::move(rec));
  }
  return traj;
}

ConvergenceTarget target_of(const EzRecord& rec, int situation) {
  ConvergenceTarget t;
  t.profile = rec.zeitgeist.profile.at(situation);
  t.belief_a = rec.zeitgeist.belief_a.at(situation);
  t.belief_b = rec.zeitgeist.belief_b.at(situation);
  return t;
}

namespace {

void check_window(const Trajectory& traj, int window) {
  if (window <= 0 || window > static_cast<int>(traj.periods.size()))
    throw ValidationError("convergence window must be positive and no longer than the trajectory");
}

Profile modal_profile(const Trajectory& traj, int window) {
  const int T = static_cast<int>(traj.periods.size());
  Profile p;
  for (int c = 0; c < 4; ++c) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(traj.n_actions);
    for (int t = T - window; t < T; ++t) d += traj.periods[t].play[c];
    Eigen::Index a;
    d.maxCoeff(&a);
    p.a[c] = static_cast<int>(a);
  }
  return p;
}

const char* kCell[4] = {"AA", "AB", "BA", "BB"};

}  // namespace

ConvergenceReport convergence_check(const Trajectory& traj, const ConvergenceTarget& target, int window,
                                    double tol) {
  check_window(traj, window);
  const int T = static_cast<int>(traj.periods.size());
  ConvergenceReport rep;
  rep.modal = modal_profile(traj, window);
  std::ostringstream msg;
  for (int c = 0; c < 4; ++c) {
    rep.cell_agrees[c] = rep.modal.a[c] == target.profile.a[c];
    if (!rep.cell_agrees[c]) {
      rep.pass = false;
      msg << "cell " << kCell[c] << ": modal " << rep.modal.a[c] << " vs target " << target.profile.a[c] << "; ";
    }
  }
  for (Group g : {Group::A, Group::B}) {
    const auto& tb = g == Group::A ? target.belief_a : target.belief_b;
    if (!tb) continue;
    double worst = 0.0;
    for (int t = T - window; t < T; ++t) {
      const Eigen::VectorXd b = traj.base_belief(t, g);
      if (b.size() != tb->size()) throw ValidationError("target belief size differs from the theory");
      worst = std::max(worst, total_variation(b, *tb));
    }
    (g == Group::A ? rep.tv_a : rep.tv_b) = worst;
    if (worst > tol) {
      rep.pass = false;
      msg << "belief " << (g == Group::A ? "A" : "B") << ": TV " << worst << " > " << tol << "; ";
    }
  }
  rep.message = rep.pass ? "converged" : msg.str();
  return rep;
}

EzsuCandidate steady_state_candidate(const std::vector<Trajectory>& runs, const LearningConfig& cfg, int window,
                                     double floor) {
  EzsuCandidate c;
  c.shares = cfg.shares;
  c.lambda = cfg.lambda;
  for (const Trajectory& traj : runs) {
    check_window(traj, window);
    c.profile.push_back(modal_profile(traj, window));
    const int T = static_cast<int>(traj.periods.size());
    for (Group g : {Group::A, Group::B}) {
      Eigen::VectorXd m = Eigen::VectorXd::Zero(g == Group::A ? traj.periods[0].belief_a.size()
                                                               : traj.periods[0].belief_b.size());
      for (int t = T - window; t < T; ++t) m += g == Group::A ? traj.periods[t].belief_a : traj.periods[t].belief_b;
      m /= window;
      m = (m.array() < floor).select(0.0, m);
      m /= m.sum();
      (g == Group::A ? c.belief_a : c.belief_b).push_back(m);
    }
  }
  return c;
}

Zeitgeist restricted_zeitgeist(const EzsuCandidate& c, const std::vector<Trajectory>& runs) {
  if (runs.size() != c.profile.size()) throw ValidationError("one run per situation is required");
  Zeitgeist z;
  z.shares = c.shares;
  z.lambda = c.lambda;
  z.profile = c.profile;
  for (size_t s = 0; s < runs.size(); ++s) {
    const Trajectory& t = runs[s];
    Eigen::VectorXd a = Eigen::VectorXd::Zero(t.labels_a.size()), b = Eigen::VectorXd::Zero(t.labels_b.size());
    for (size_t e = 0; e < t.base_a.size(); ++e) a(t.base_a[e]) += c.belief_a[s](e);
    for (size_t e = 0; e < t.base_b.size(); ++e) b(t.base_b[e]) += c.belief_b[s](e);
    z.belief_a.push_back(a);
    z.belief_b.push_back(b);
  }
  return z;
}

}  // namespace ez
