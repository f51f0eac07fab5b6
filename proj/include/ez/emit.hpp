#pragma once
// Tabular results and their CSV / JSON encodings. Numbers carry 12
// significant digits; column order is fixed by the table.

#include "ez/learning.hpp"
#include "ez/solver.hpp"
#include "ez/stability.hpp"

#include <json.hpp>

#include <string>
#include <variant>
#include <vector>

namespace ez {

using Value = std::variant<std::string, double, long long, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;

  void add(std::vector<Value> row);
};

enum class Format { Csv, Json };

Format parse_format(const std::string& s);
std::string format_number(double x);
std::string to_csv(const Table& t);
nlohmann::ordered_json to_json(const Table& t);
Table table_from_json(const nlohmann::ordered_json& j);
void emit(const Table& t, Format f, const std::string& path);

// One row per EZ per situation.
Table ez_table(const std::vector<EzRecord>& ez, const GameTables& game, const TheoryTables& ta,
               const TheoryTables& tb);
Table sweep_table(const std::vector<SweepRow>& rows);
// period, cell, modal_strategy, belief_tv_to_target (group B belief for BA/BB
// cells, group A for AA/AB; empty when no target belief is given).
Table trajectory_table(const Trajectory& traj, const std::vector<std::string>& actions,
                       const ConvergenceTarget* target = nullptr, int every = 1);

}  // namespace ez
