#include "ez/io.hpp"

#include <fstream>
#include <limits>

namespace ez {

namespace {

std::string pair_key(const StageGame& g, int ai, int aj) {
  return g.strategies[ai] + "|" + g.strategies[aj];
}

json kernel_to_json(const Kernel& k, const StageGame& g) {
  json out = json::object();
  const int n = g.n_actions();
  for (int ai = 0; ai < n; ++ai)
    for (int aj = 0; aj < n; ++aj) {
      json pmf = json::object();
      for (int y = 0; y < g.n_consequences(); ++y) pmf[g.consequences[y]] = k(kernel_row(ai, aj, n), y);
      out[pair_key(g, ai, aj)] = pmf;
    }
  return out;
}

// Missing pairs or consequences are left as NaN so validation reports them.
Kernel kernel_from_json(const json& j, const StageGame& g) {
  const int n = g.n_actions(), ny = g.n_consequences();
  Kernel k = Kernel::Constant(n * n, ny, std::numeric_limits<double>::quiet_NaN());
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const auto bar = key.find('|');
    if (bar == std::string::npos) throw ValidationError("kernel key without '|': " + key);
    const int ai = g.strategy_index(key.substr(0, bar));
    const int aj = g.strategy_index(key.substr(bar + 1));
    auto row = k.row(kernel_row(ai, aj, n));
    row.setZero();
    for (auto y = it.value().begin(); y != it.value().end(); ++y)
      row(g.consequence_index(y.key())) = y.value().get<double>();
  }
  return k;
}

}  // namespace

json game_to_json(const StageGame& g) {
  json j;
  j["strategies"] = g.strategies;
  j["consequences"] = g.consequences;
  json u = json::object();
  for (int y = 0; y < g.n_consequences(); ++y) u[g.consequences[y]] = g.utility(y);
  j["utility"] = u;
  json sits = json::array();
  for (const Situation& s : g.situations) sits.push_back({{"id", s.id}, {"kernel", kernel_to_json(s.kernel, g)}});
  j["situations"] = sits;
  j["q"] = std::vector<double>(g.q.data(), g.q.data() + g.q.size());
  return j;
}

StageGame game_from_json(const json& j) {
  StageGame g;
  g.strategies = j.at("strategies").get<std::vector<std::string>>();
  g.consequences = j.at("consequences").get<std::vector<std::string>>();
  g.utility = Eigen::VectorXd::Constant(g.n_consequences(), std::numeric_limits<double>::quiet_NaN());
  for (auto it = j.at("utility").begin(); it != j.at("utility").end(); ++it)
    g.utility(g.consequence_index(it.key())) = it.value().get<double>();
  if (!g.utility.allFinite()) throw ValidationError("utility missing for some consequence");
  for (const json& s : j.at("situations"))
    g.situations.push_back({s.at("id").get<std::string>(), kernel_from_json(s.at("kernel"), g)});
  auto q = j.at("q").get<std::vector<double>>();
  g.q = Eigen::Map<Eigen::VectorXd>(q.data(), static_cast<Eigen::Index>(q.size()));
  return make_game(std::move(g));
}

json theory_to_json(const Theory& t, const StageGame& g) {
  json models = json::array();
  for (const Model& m : t.models) models.push_back({{"label", m.label}, {"kernel", kernel_to_json(m.kernel, g)}});
  return {{"name", t.name}, {"models", models}};
}

Theory theory_from_json(const json& j, const StageGame& g) {
  Theory t;
  t.name = j.value("name", std::string("theory"));
  for (const json& m : j.at("models"))
    t.models.push_back({m.value("label", std::string("F") + std::to_string(t.models.size())),
                        kernel_from_json(m.at("kernel"), g)});
  return make_theory(std::move(t), g.n_actions(), g.n_consequences());
}

json extended_theory_to_json(const ExtendedTheory& t, const StageGame& g) {
  json models = json::array();
  for (const ExtendedModel& e : t.models)
    models.push_back({{"label", e.model.label},
                      {"conj_a", g.strategies[e.conj_a]},
                      {"conj_b", g.strategies[e.conj_b]},
                      {"kernel", kernel_to_json(e.model.kernel, g)}});
  return {{"name", t.name}, {"models", models}};
}

ExtendedTheory extended_theory_from_json(const json& j, const StageGame& g) {
  Theory base = theory_from_json(j, g);
  if (j.value("conjectures", std::string()) == "all") return unrestricted_extension(base, g.n_actions());
  ExtendedTheory ext{base.name, {}};
  const json& ms = j.at("models");
  for (size_t i = 0; i < base.models.size(); ++i) {
    const int ca = g.strategy_index(ms[i].value("conj_a", g.strategies[0]));
    const int cb = g.strategy_index(ms[i].value("conj_b", g.strategies[0]));
    ext.models.push_back({ca, cb, base.models[i]});
  }
  return ext;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

}  // namespace ez
