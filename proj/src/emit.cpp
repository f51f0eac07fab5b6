#include "ez/emit.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ez {

void Table::add(std::vector<Value> row) {
  if (row.size() != columns.size()) throw ValidationError("row width differs from the table header");
  rows.push_back(std::move(row));
}

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw ValidationError("unknown format '" + s + "' (csv or json)");
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace {

std::string cell_text(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  if (const auto* d = std::get_if<double>(&v)) return format_number(*d);
  if (const auto* i = std::get_if<long long>(&v)) return std::to_string(*i);
  return std::get<bool>(v) ? "true" : "false";
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_csv(const Table& t) {
  std::ostringstream os;
  for (size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << csv_escape(t.columns[c]);
  os << "\n";
  for (const auto& row : t.rows) {
    for (size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << csv_escape(cell_text(row[c]));
    os << "\n";
  }
  return os.str();
}

nlohmann::ordered_json to_json(const Table& t) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json o = nlohmann::ordered_json::object();
    for (size_t c = 0; c < row.size(); ++c) {
      const Value& v = row[c];
      if (const auto* s = std::get_if<std::string>(&v))
        o[t.columns[c]] = *s;
      else if (const auto* d = std::get_if<double>(&v))
        o[t.columns[c]] = std::isfinite(*d) ? nlohmann::ordered_json(std::stod(format_number(*d)))
                                            : nlohmann::ordered_json(format_number(*d));
      else if (const auto* i = std::get_if<long long>(&v))
        o[t.columns[c]] = *i;
      else
        o[t.columns[c]] = std::get<bool>(v);
    }
    out.push_back(std::move(o));
  }
  return nlohmann::ordered_json{{"columns", t.columns}, {"rows", out}};
}

Table table_from_json(const nlohmann::ordered_json& j) {
  Table t;
  t.columns = j.at("columns").get<std::vector<std::string>>();
  for (const auto& o : j.at("rows")) {
    std::vector<Value> row;
    for (const auto& c : t.columns) {
      const auto& v = o.at(c);
      if (v.is_string())
        row.emplace_back(v.get<std::string>());
      else if (v.is_boolean())
        row.emplace_back(v.get<bool>());
      else if (v.is_number_integer())
        row.emplace_back(v.get<long long>());
      else
        row.emplace_back(v.get<double>());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void emit(const Table& t, Format f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  if (f == Format::Csv)
    os << to_csv(t);
  else
    os << to_json(t).dump(2) << "\n";
  if (!os) throw std::runtime_error("write failed for " + path);
}

Table ez_table(const std::vector<EzRecord>& ez, const GameTables& game, const TheoryTables& ta,
               const TheoryTables& tb) {
  Table t;
  t.columns = {"ez", "situation", "a_AA", "a_AB", "a_BA", "a_BB", "belief_A", "belief_B", "fitness_A", "fitness_B",
               "u_AA", "u_AB", "u_BA", "u_BB"};
  for (size_t i = 0; i < ez.size(); ++i) {
    const Zeitgeist& z = ez[i].zeitgeist;
    for (int s = 0; s < game.n_situations(); ++s) {
      const Profile& p = z.profile[s];
      t.add({static_cast<long long>(i), game.situation_ids[s], game.actions[p.a[0]], game.actions[p.a[1]],
             game.actions[p.a[2]], game.actions[p.a[3]], belief_label(ta, z.belief_a[s]),
             belief_label(tb, z.belief_b[s]), ez[i].fitness_a, ez[i].fitness_b, ez[i].conditional(0, 0),
             ez[i].conditional(0, 1), ez[i].conditional(1, 0), ez[i].conditional(1, 1)});
    }
  }
  return t;
}

Table sweep_table(const std::vector<SweepRow>& rows) {
  Table t;
  t.columns = {"lambda", "ez_index", "fitness_A", "fitness_B", "belief_label"};
  for (const auto& r : rows)
    t.add({r.lambda, static_cast<long long>(r.ez_index), r.fitness_a, r.fitness_b, r.belief_label});
  return t;
}

Table trajectory_table(const Trajectory& traj, const std::vector<std::string>& actions,
                       const ConvergenceTarget* target, int every) {
  static const char* kCells[4] = {"AA", "AB", "BA", "BB"};
  Table t;
  t.columns = {"period", "cell", "modal_strategy", "belief_tv_to_target"};
  for (size_t p = 0; p < traj.periods.size(); p += std::max(1, every)) {
    const PeriodRecord& rec = traj.periods[p];
    for (int c = 0; c < 4; ++c) {
      Eigen::Index a;
      rec.play[c].maxCoeff(&a);
      const Group g = c < 2 ? Group::A : Group::B;
      Value tv = std::string();
      if (target) {
        const auto& b = g == Group::A ? target->belief_a : target->belief_b;
        if (b) tv = total_variation(traj.base_belief(static_cast<int>(p), g), *b);
      }
      t.add({static_cast<long long>(p), std::string(kCells[c]), actions.at(a), tv});
    }
  }
  return t;
}

}  // namespace ez
