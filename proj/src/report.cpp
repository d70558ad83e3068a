#include "ahls/report.hpp"

#include <cmath>
#include <sstream>

namespace ahls {

std::string dir_name(ChainReport::Dir d) {
  switch (d) {
    case ChainReport::Dir::Ge: return ">=";
    case ChainReport::Dir::Le: return "<=";
    default: return "==";
  }
}

void ChainReport::add_term(const std::string& label, double value, double err) {
  labels.push_back(label);
  values.push_back(value);
  error_bars.push_back(err);
}

void ChainReport::add_relation(int lhs, int rhs, Dir dir) { relations.push_back({lhs, rhs, dir}); }

void ChainReport::evaluate(double tol, double near_gap) {
  margins.clear();
  allowances.clear();
  relation_pass.clear();
  near_equality.clear();
  pass = true;
  for (const auto& rel : relations) {
    double a = values[rel.lhs], b = values[rel.rhs];
    double allow = error_bars[rel.lhs] + error_bars[rel.rhs] + tol;
    double margin = 0;
    switch (rel.dir) {
      case Dir::Ge: margin = a - b; break;
      case Dir::Le: margin = b - a; break;
      case Dir::Eq: margin = -std::fabs(a - b); break;
    }
    bool ok = margin >= -allow;
    double scale = std::max(std::fabs(a), std::fabs(b));
    bool near = scale > 0 && std::fabs(a - b) <= near_gap * scale;
    margins.push_back(margin);
    allowances.push_back(allow);
    relation_pass.push_back(ok);
    near_equality.push_back(near);
    if (!ok) pass = false;
  }
}

nlohmann::json ChainReport::to_json() const {
  nlohmann::json rels = nlohmann::json::array();
  for (std::size_t i = 0; i < relations.size(); ++i) {
    rels.push_back({{"lhs", relations[i].lhs},
                    {"rhs", relations[i].rhs},
                    {"op", dir_name(relations[i].dir)},
                    {"margin", margins.empty() ? 0.0 : margins[i]},
                    {"allowance", allowances.empty() ? 0.0 : allowances[i]},
                    {"pass", relation_pass.empty() ? false : static_cast<bool>(relation_pass[i])},
                    {"near_equality",
                     near_equality.empty() ? false : static_cast<bool>(near_equality[i])}});
  }
  return nlohmann::json{{"schema_version", 1}, {"name", name},        {"labels", labels},
                        {"values", values},    {"error_bars", error_bars}, {"relations", rels},
                        {"pass", pass},        {"metadata", metadata}};
}

std::string ChainReport::csv_header() const {
  std::ostringstream os;
  os << "name";
  for (const auto& l : labels) os << "," << l;
  for (std::size_t i = 0; i < relations.size(); ++i) os << ",margin_" << i;
  os << ",pass";
  return os.str();
}

std::string ChainReport::csv_row() const {
  std::ostringstream os;
  os.precision(17);
  os << name;
  for (double v : values) os << "," << v;
  for (double m : margins) os << "," << m;
  os << "," << (pass ? 1 : 0);
  return os.str();
}

}  // namespace ahls
