#pragma once

// JSON and CSV renderings of evaluation reports.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qcorr/laws.hpp"

namespace qcorr {

using Json = nlohmann::ordered_json;

inline Json to_json(const OptimizerConfig& cfg) {
  return Json{{"restarts", cfg.restarts},
              {"max_iterations", cfg.max_iterations},
              {"convergence_tol", cfg.convergence_tol},
              {"seed", cfg.seed},
              {"ensemble_size_factor", cfg.ensemble_size_factor}};
}

inline Json to_json(const SubsystemSet& s) { return Json(s.indices()); }

inline Json to_json(const TermValue& t, int n_parties) {
  Json out{{"side", t.left ? "lhs" : "rhs"},
           {"kind", to_string(t.term.kind)},
           {"target", to_json(t.term.target)},
           {"other", to_json(t.term.other)},
           {"coefficient", t.term.coefficient},
           {"label", t.term.to_string(n_parties)},
           {"value", t.value},
           {"converged", t.converged}};
  return out;
}

inline Json to_json(const EvalReport& rep, int n_parties) {
  Json terms = Json::array();
  for (const auto& t : rep.terms) terms.push_back(to_json(t, n_parties));
  return Json{{"law", rep.law},
              {"state", rep.state},
              {"relation", to_string(rep.relation)},
              {"terms", std::move(terms)},
              {"lhs", rep.lhs_sum},
              {"rhs", rep.rhs_sum},
              {"slack", rep.slack},
              {"tolerance", rep.tolerance},
              {"pass", rep.pass},
              {"converged", rep.converged()},
              {"optimizer", to_json(rep.optimizer)}};
}

/// One evaluated (sample, law) pair of a campaign.
struct SampleReport {
  int index = 0;
  std::uint64_t state_seed = 0;
  int n_parties = 0;
  EvalReport report;
};

struct Aggregate {
  int total = 0;
  int pass_count = 0;
  std::optional<double> max_abs_slack_eq;
  std::optional<double> min_slack_ge;
  std::optional<double> max_slack_le;
  double wall_time_seconds = 0.0;
};

inline Aggregate aggregate(const std::vector<SampleReport>& samples, double wall_time_seconds) {
  Aggregate agg;
  agg.wall_time_seconds = wall_time_seconds;
  const auto fold = [](std::optional<double>& slot, double v, bool keep_max) {
    if (!slot) slot = v;
    else slot = keep_max ? std::max(*slot, v) : std::min(*slot, v);
  };
  for (const auto& s : samples) {
    ++agg.total;
    if (s.report.pass) ++agg.pass_count;
    switch (s.report.relation) {
      case Relation::Eq: fold(agg.max_abs_slack_eq, std::abs(s.report.slack), true); break;
      case Relation::Ge: fold(agg.min_slack_ge, s.report.slack, false); break;
      case Relation::Le: fold(agg.max_slack_le, s.report.slack, true); break;
    }
  }
  return agg;
}

inline Json to_json(const Aggregate& agg) {
  const auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  return Json{{"total", agg.total},
              {"pass_count", agg.pass_count},
              {"max_abs_slack_eq", opt(agg.max_abs_slack_eq)},
              {"min_slack_ge", opt(agg.min_slack_ge)},
              {"max_slack_le", opt(agg.max_slack_le)},
              {"wall_time_seconds", agg.wall_time_seconds}};
}

inline Json campaign_json(const Json& config, const std::vector<SampleReport>& samples, const Aggregate& agg) {
  Json list = Json::array();
  for (const auto& s : samples) {
    Json entry{{"index", s.index}, {"state_seed", s.state_seed}};
    entry.update(to_json(s.report, s.n_parties));
    list.push_back(std::move(entry));
  }
  return Json{{"config", config}, {"samples", std::move(list)}, {"aggregate", to_json(agg)}};
}

inline std::string format_real(double v) {
  std::ostringstream out;
  out.precision(std::numeric_limits<double>::max_digits10);
  out << v;
  return out.str();
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

/// Flat table: one row per (sample, law); terms spread over
/// term_k_{side,kind,target,other,value} columns, padded to the widest law.
inline std::string campaign_csv(const std::vector<SampleReport>& samples) {
  std::size_t width = 0;
  for (const auto& s : samples) width = std::max(width, s.report.terms.size());
  std::ostringstream out;
  out << "index,state_seed,law,state,relation,lhs,rhs,slack,tolerance,pass,converged";
  for (std::size_t k = 1; k <= width; ++k)
    out << ",term_" << k << "_side,term_" << k << "_kind,term_" << k << "_target,term_" << k << "_other,term_" << k
        << "_value";
  out << '\n';
  for (const auto& s : samples) {
    const auto& r = s.report;
    out << s.index << ',' << s.state_seed << ',' << csv_field(r.law) << ',' << csv_field(r.state) << ',' << to_string(r.relation) << ','
        << format_real(r.lhs_sum) << ',' << format_real(r.rhs_sum) << ',' << format_real(r.slack) << ','
        << format_real(r.tolerance) << ',' << (r.pass ? "true" : "false") << ','
        << (r.converged() ? "true" : "false");
    for (std::size_t k = 0; k < width; ++k) {
      if (k < r.terms.size()) {
        const auto& t = r.terms[k];
        out << ',' << (t.left ? "lhs" : "rhs") << ',' << to_string(t.term.kind) << ','
            << party_labels(t.term.target, s.n_parties) << ',' << party_labels(t.term.other, s.n_parties) << ','
            << format_real(t.value);
      } else {
        out << ",,,,,";
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace qcorr
