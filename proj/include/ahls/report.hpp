#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace ahls {

// One evaluated inequality chain: the terms, their error estimates, the
// required relations between them, and the resulting margins. A relation
// i >= j passes when values[i] - values[j] >= -(err[i] + err[j] + tol);
// equality relations pass when |values[i] - values[j]| <= err[i]+err[j]+tol.
struct ChainReport {
  enum class Dir { Ge, Le, Eq };

  struct Relation {
    int lhs = 0;
    int rhs = 0;
    Dir dir = Dir::Ge;
  };

  std::string name;
  std::vector<std::string> labels;
  std::vector<double> values;
  std::vector<double> error_bars;
  std::vector<Relation> relations;
  std::vector<double> margins;         // signed slack per relation (>= 0 is clean)
  std::vector<double> allowances;      // err[lhs]+err[rhs]+tol per relation
  std::vector<bool> relation_pass;
  std::vector<bool> near_equality;     // relative gap below the probe threshold
  bool pass = false;
  nlohmann::json metadata;             // resolved config, seeds, parameter values

  void add_term(const std::string& label, double value, double err);
  void add_relation(int lhs, int rhs, Dir dir);
  // computes margins/allowances/pass; near-equality uses near_gap (relative)
  void evaluate(double tol, double near_gap);

  nlohmann::json to_json() const;
  // flat one-line CSV (values, margins, pass); header() matches the row layout
  std::string csv_header() const;
  std::string csv_row() const;
};

std::string dir_name(ChainReport::Dir d);

}  // namespace ahls
