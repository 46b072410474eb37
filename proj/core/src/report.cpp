#include "mql/report.hpp"

#include <sstream>

#include "json.hpp"

namespace mql {

namespace {

using nlohmann::ordered_json;

ordered_json labels_of(const std::vector<std::string>& labels, const IndexSet& set) {
  ordered_json out = ordered_json::array();
  for (int v : set) out.push_back(labels[static_cast<std::size_t>(v)]);
  return out;
}

ordered_json condition_l_json(const ConditionLReport& cl) {
  ordered_json j;
  j["verdict"] = to_string(cl.verdict);
  if (!cl.grid_sizes.empty()) j["grid_sizes"] = cl.grid_sizes;
  j["base_point_counts"] = cl.base_point_counts;
  if (!cl.witness_labels.empty()) j["witness_cycle"] = cl.witness_labels;
  if (cl.ambiguous) j["ambiguous"] = true;
  return j;
}

}  // namespace

std::string to_string(SimplicityVerdict v) {
  switch (v) {
    case SimplicityVerdict::Simple:
      return "simple";
    case SimplicityVerdict::NotSimple:
      return "not_simple";
    case SimplicityVerdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

std::string to_string(ConditionLVerdict v) {
  switch (v) {
    case ConditionLVerdict::Holds:
      return "holds";
    case ConditionLVerdict::Fails:
      return "fails";
    case ConditionLVerdict::CertifiedAtRefinements:
      return "certified_at_refinements";
  }
  return "fails";
}

std::string simplicity_report_json(const SimplicityReport& report) {
  ordered_json j;
  j["verdict"] = to_string(report.verdict);
  j["condition_l"] = condition_l_json(report.condition_l);

  ordered_json witnesses = ordered_json::array();
  for (const auto& w : report.witnesses) {
    ordered_json wj;
    wj["type"] = w.type;
    wj["vertices"] = w.labels;
    witnesses.push_back(std::move(wj));
  }
  j["witnesses"] = std::move(witnesses);

  j["saturated_hereditary_count"] = report.saturated_hereditary_count;
  ordered_json sh = ordered_json::array();
  for (const auto& s : report.saturated_hereditary_sets) {
    sh.push_back(labels_of(report.vertex_labels, s));
  }
  j["saturated_hereditary_sets"] = std::move(sh);

  j["strongly_absorbing_count"] = report.strongly_absorbing_count;
  ordered_json sa = ordered_json::array();
  for (const auto& s : report.strongly_absorbing_sets) {
    sa.push_back(labels_of(report.vertex_labels, s));
  }
  j["strongly_absorbing_sets"] = std::move(sa);
  if (report.truncated) j["witness_lists_truncated"] = true;

  ordered_json classes = ordered_json::array();
  for (const auto& c : report.classes.classes) {
    classes.push_back(labels_of(report.vertex_labels, c));
  }
  j["classes"] = std::move(classes);
  j["irreducible"] = report.classes.irreducible;

  if (report.used_continuum_heuristics) {
    ordered_json approx;
    approx["continuum_grids"] = report.condition_l.grid_sizes;
    approx["note"] =
        "condition (L) was evaluated on refined grids; the verdict is a certificate, not a proof";
    j["approximation"] = std::move(approx);
  }
  if (!report.notes.empty()) j["notes"] = report.notes;
  return j.dump(2) + "\n";
}

std::string simplicity_report_text(const SimplicityReport& report) {
  std::ostringstream out;
  out << "verdict: " << to_string(report.verdict) << "\n";
  out << "condition (L): " << to_string(report.condition_l.verdict);
  if (!report.condition_l.grid_sizes.empty()) {
    out << "  [grids";
    for (std::size_t i = 0; i < report.condition_l.grid_sizes.size(); ++i) {
      out << " " << report.condition_l.grid_sizes[i] << ":"
          << report.condition_l.base_point_counts[i];
    }
    out << " no-exit base points]";
  } else if (!report.condition_l.base_point_counts.empty()) {
    out << "  [" << report.condition_l.base_point_counts.front() << " no-exit base points]";
  }
  out << "\n";
  auto print_sets = [&](const char* name, long long count,
                        const std::vector<IndexSet>& sets) {
    out << name << ": " << count;
    if (count > 0 && !sets.empty()) {
      out << "  e.g.";
      std::size_t shown = 0;
      for (const auto& s : sets) {
        if (shown++ == 3) {
          out << " ...";
          break;
        }
        out << " {";
        for (std::size_t i = 0; i < s.size(); ++i) {
          if (i) out << ",";
          out << report.vertex_labels[static_cast<std::size_t>(s[i])];
        }
        out << "}";
      }
    }
    out << "\n";
  };
  print_sets("minimal nontrivial saturated hereditary sets", report.saturated_hereditary_count,
             report.saturated_hereditary_sets);
  print_sets("minimal nontrivial strongly absorbing sets", report.strongly_absorbing_count,
             report.strongly_absorbing_sets);
  out << "communicating classes: " << report.classes.classes.size()
      << (report.classes.irreducible ? " (irreducible)" : "") << "\n";
  for (const auto& w : report.witnesses) {
    out << "witness (" << w.type << "):";
    for (const auto& label : w.labels) out << " " << label;
    out << "\n";
  }
  for (const auto& note : report.notes) out << "note: " << note << "\n";
  return out.str();
}

}  // namespace mql
