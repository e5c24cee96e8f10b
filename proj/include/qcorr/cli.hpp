#pragma once

// Subcommand bodies for the qcorr tool. Each returns a process exit code and
// writes human output to `out`; tools/qcorr.cpp only parses flags.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qcorr/laws.hpp"
#include "qcorr/report.hpp"
#include "qcorr/search.hpp"
#include "qcorr/states.hpp"

namespace qcorr::cli {

inline constexpr int kPass = 0;
inline constexpr int kFail = 1;
inline constexpr int kUsage = 2;

/// "0,1|3" or "0,1;3": sides separated by '|' or ';', indices by ','.
inline std::vector<SubsystemSet> parse_partition(const std::string& text) {
  std::vector<SubsystemSet> sides;
  std::string side;
  const auto flush = [&] {
    std::vector<int> labels;
    std::stringstream ss(side);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      int v = -1;
      try {
        v = std::stoi(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (item.empty() || used != item.size() || v < 0)
        throw InvalidPartition("bad index '" + item + "' in '" + text + "'");
      labels.push_back(v);
    }
    if (labels.empty()) throw InvalidPartition("empty side in '" + text + "'");
    sides.emplace_back(std::move(labels));
    side.clear();
  };
  for (char c : text) {
    if (c == '|' || c == ';') flush();
    else if (c != ' ') side += c;
  }
  flush();
  return sides;
}

inline void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path);
  if (!file) throw FormatError("cannot open " + path + " for writing");
  file << text;
  if (!file) throw FormatError("write to " + path + " failed");
}

/// Human-readable lines yield stdout to a report streamed there.
inline std::ostream& info_stream(const std::string& out_path, std::ostream& out) {
  return out_path == "-" ? std::cerr : out;
}

inline PureState load_state(const StateSpec& spec, std::uint64_t seed) { return spec.make(seed); }

/// Parallelism for campaigns: explicit value, else QCORR_JOBS, else 1.
inline int resolve_jobs(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("QCORR_JOBS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

struct OptimizerOverrides {
  std::optional<int> restarts;
  std::optional<int> max_iterations;

  OptimizerConfig apply(std::uint64_t seed) const {
    OptimizerConfig cfg;
    cfg.seed = seed;
    if (restarts) cfg.restarts = *restarts;
    if (max_iterations) cfg.max_iterations = *max_iterations;
    cfg.validate();
    return cfg;
  }
};

// ---------------------------------------------------------------- compute

struct ComputeOptions {
  std::string measure;
  std::string state;
  std::string partition;
  std::uint64_t seed = 0x5eed;
  OptimizerOverrides optimizer;
  std::string out_path;
};

inline const std::vector<std::string>& measure_names() {
  static const std::vector<std::string> names{"entropy", "cond-entropy", "mutual-info", "ef",
                                              "concurrence", "classical-corr", "discord"};
  return names;
}

inline int cmd_compute(const ComputeOptions& opt, std::ostream& out) {
  const StateSpec spec = StateSpec::parse(opt.state);
  const PureState psi = load_state(spec, opt.seed);
  const OptimizerConfig cfg = opt.optimizer.apply(opt.seed);
  const auto sides = parse_partition(opt.partition);
  for (const auto& s : sides) detail::check_within(s, psi.dims().size());
  const auto two_sides = [&] {
    if (sides.size() != 2) throw InvalidPartition(opt.measure + " needs two sides, got '" + opt.partition + "'");
    if (!sides[0].disjoint(sides[1])) throw InvalidPartition("sides of '" + opt.partition + "' overlap");
  };

  Estimate est;
  if (opt.measure == "entropy") {
    if (sides.size() != 1) throw InvalidPartition("entropy takes a single index list");
    est = {subset_entropy(psi, sides[0]), true};
  } else if (opt.measure == "cond-entropy") {
    two_sides();
    est = {conditional_entropy(psi, sides[0], sides[1]), true};
  } else if (opt.measure == "mutual-info") {
    two_sides();
    const SubsystemSet both = sides[0] | sides[1];
    est = {mutual_information(reduced_state(psi, both), sides[0].relative_to(both), sides[1].relative_to(both)), true};
  } else if (opt.measure == "ef") {
    two_sides();
    est = ef_marginal(psi, sides[0], sides[1], cfg);
  } else if (opt.measure == "concurrence") {
    two_sides();
    est = {concurrence_wootters(reduced_state(psi, sides[0] | sides[1])), true};
  } else if (opt.measure == "classical-corr") {
    two_sides();
    const auto j = classical_correlation_marginal(psi, sides[0], sides[1], cfg);
    est = {j.value, j.converged};
  } else if (opt.measure == "discord") {
    two_sides();
    est = discord_marginal(psi, sides[0], sides[1], cfg);
  } else {
    throw std::invalid_argument("unknown measure '" + opt.measure + "'");
  }

  char line[64];
  std::snprintf(line, sizeof line, "%.6f", est.value);
  info_stream(opt.out_path, out) << line << " converged=" << (est.converged ? "true" : "false") << '\n';
  if (!opt.out_path.empty()) {
    Json sides_json = Json::array();
    for (const auto& s : sides) sides_json.push_back(to_json(s));
    const Json rep{{"measure", opt.measure},     {"state", spec.to_string()},  {"partition", std::move(sides_json)},
                   {"value", est.value},         {"converged", est.converged}, {"optimizer", to_json(cfg)}};
    write_text(opt.out_path, rep.dump(2) + "\n", out);
  }
  return kPass;
}

// ---------------------------------------------------------------- certify

inline int cmd_certify(const std::string& id, std::ostream& out) {
  bool ok = true;
  for (const auto& law : resolve_laws(id)) {
    out << law.to_string() << '\n';
    try {
      const Certificate cert = certify(law);
      for (const auto& kw : cert.kw_instances)
        out << "  KW  E_{" << party_labels(kw.target, law.n_parties) << "|" << party_labels(kw.kept, law.n_parties)
            << "} = D_{" << party_labels(kw.target, law.n_parties) << "|" << party_labels(kw.measured, law.n_parties)
            << "} + S_{" << party_labels(kw.target, law.n_parties) << "|"
            << party_labels(kw.measured, law.n_parties) << "}\n";
      if (cert.zero()) {
        out << "  residue: 0 (certified)\n";
      } else {
        out << "  residue (lhs - rhs): " << cert.residue_string() << '\n';
      }
    } catch (const CertificationFailure& e) {
      out << "  " << e.what() << '\n';
      ok = false;
    }
  }
  return ok ? kPass : kFail;
}

// ---------------------------------------------------------------- list

inline int cmd_list(std::ostream& out) {
  std::size_t width = 0;
  for (const auto& law : catalog()) width = std::max(width, law.name.size());
  for (const auto& law : catalog())
    out << law.name << std::string(width + 2 - law.name.size(), ' ') << law.to_string() << '\n';
  out << "generated: gen:odd:N (odd N>=3), gen:even:N (even N>=4), gen:discord:N (N>=3), gen:onemeasured:N (N>=3)\n";
  return kPass;
}

// ---------------------------------------------------------------- verify

struct RunConfig {
  std::vector<std::string> laws;
  std::string state = "haar:2,2,2";
  int samples = 1;
  std::uint64_t seed = 0x5eed;
  std::optional<double> tolerance;
  OptimizerOverrides optimizer;
  std::string out_path;
  std::string format = "json";
  int jobs = 0;

  void validate() const {
    if (laws.empty()) throw std::invalid_argument("at least one --law is required");
    if (samples < 1) throw std::invalid_argument("--samples must be at least 1");
    if (tolerance && !(*tolerance > 0.0)) throw std::invalid_argument("--tol must be positive");
    if (format != "json" && format != "csv") throw std::invalid_argument("--format must be json or csv");
  }

  Json to_json() const {
    return Json{{"command", "verify"},
                {"laws", laws},
                {"states", state},
                {"samples", samples},
                {"seed", seed},
                {"tolerance", tolerance ? Json(*tolerance) : Json("default")},
                {"restarts", optimizer.restarts ? Json(*optimizer.restarts) : Json("default")},
                {"max_iterations", optimizer.max_iterations ? Json(*optimizer.max_iterations) : Json("default")}};
  }
};

struct Campaign {
  Json config;
  std::vector<SampleReport> samples;  // sample-major, then law order
  Aggregate aggregate;
};

/// Sample i uses state seed derive_seed(seed, i) and optimizer seed
/// derive_seed(state seed, 0), so results do not depend on the job count.
inline Campaign run_campaign(const RunConfig& rc) {
  rc.validate();
  const auto start = std::chrono::steady_clock::now();
  const StateSpec spec = StateSpec::parse(rc.state);
  std::vector<LawSpec> laws;
  for (const auto& id : rc.laws)
    for (auto& l : resolve_laws(id)) laws.push_back(std::move(l));

  std::optional<PureState> fixed;
  if (!spec.random()) fixed = load_state(spec, 0);
  const int n_parties = fixed ? fixed->n_parties() : spec.n_parties;
  for (const auto& l : laws)
    if (l.n_parties != n_parties)
      throw ArityError(l.name + " needs " + std::to_string(l.n_parties) + " parties, state " + spec.to_string() +
                       " has " + std::to_string(n_parties));
  (void)rc.optimizer.apply(0);  // reject bad overrides before spawning workers

  const std::size_t per_sample = laws.size();
  std::vector<SampleReport> results(static_cast<std::size_t>(rc.samples) * per_sample);
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto worker = [&] {
    for (int i = next++; i < rc.samples; i = next++) {
      try {
        const std::uint64_t state_seed = derive_seed(rc.seed, static_cast<std::uint64_t>(i));
        const PureState psi = fixed ? *fixed : spec.make(state_seed);
        const OptimizerConfig cfg = rc.optimizer.apply(derive_seed(state_seed, 0));
        for (std::size_t k = 0; k < per_sample; ++k) {
          const double tol = rc.tolerance ? *rc.tolerance : default_tolerance(laws[k]);
          results[static_cast<std::size_t>(i) * per_sample + k] = {
              i, state_seed, n_parties, evaluate(laws[k], psi, cfg, tol, spec.to_string())};
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = rc.samples;
      }
    }
  };
  const int jobs = std::min(resolve_jobs(rc.jobs), rc.samples);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Campaign c{rc.to_json(), std::move(results), {}};
  c.aggregate = aggregate(c.samples, wall);
  return c;
}

inline int cmd_verify(const RunConfig& rc, std::ostream& out) {
  const Campaign c = run_campaign(rc);
  std::vector<std::string> names;
  for (const auto& s : c.samples)
    if (std::find(names.begin(), names.end(), s.report.law) == names.end()) names.push_back(s.report.law);
  for (const auto& name : names) {
    int total = 0;
    int passed = 0;
    double worst = 0.0;
    Relation rel = Relation::Eq;
    for (const auto& s : c.samples) {
      if (s.report.law != name) continue;
      rel = s.report.relation;
      const double v = rel == Relation::Eq ? std::abs(s.report.slack) : rel == Relation::Ge ? -s.report.slack : s.report.slack;
      worst = total == 0 ? v : std::max(worst, v);
      ++total;
      passed += s.report.pass ? 1 : 0;
    }
    char line[160];
    const char* what = rel == Relation::Eq ? "max |slack|" : rel == Relation::Ge ? "min slack" : "max slack";
    std::snprintf(line, sizeof line, "%-28s %d/%d pass  %s %.3e", name.c_str(), passed, total, what,
                  rel == Relation::Ge ? -worst : worst);
    info_stream(rc.out_path, out) << line << '\n';
  }
  if (!rc.out_path.empty()) {
    const std::string text =
        rc.format == "csv" ? campaign_csv(c.samples) : campaign_json(c.config, c.samples, c.aggregate).dump(2) + "\n";
    write_text(rc.out_path, text, out);
  }
  return c.aggregate.pass_count == c.aggregate.total ? kPass : kFail;
}

// ---------------------------------------------------------------- search

struct SearchOptions {
  std::string law;
  std::string direction = "min";
  int budget = 200;
  std::uint64_t seed = 0x5eed;
  std::string states = "haar";  // haar, product, or any state spec
  std::optional<double> tolerance;
  OptimizerOverrides optimizer;
  std::string state_out = "search_best.json";
  std::string out_path;
};

inline StateSpec search_start(const std::string& text, int n_parties) {
  if (text == "haar" || text == "product") {
    StateSpec spec;
    spec.kind = text == "haar" ? StateSpec::Kind::HaarRandom : StateSpec::Kind::ProductRandom;
    spec.n_parties = n_parties;
    spec.dims.assign(static_cast<std::size_t>(n_parties), 2);
    return spec;
  }
  return StateSpec::parse(text);
}

inline int cmd_search(const SearchOptions& opt, std::ostream& out) {
  const LawSpec law = find_law(opt.law);
  if (law.relation == Relation::Eq)
    throw std::invalid_argument(law.name + " is an equality; search takes Ge or Le laws");
  if (opt.direction != "min" && opt.direction != "max")
    throw std::invalid_argument("--direction must be min or max");
  if (opt.tolerance && !(*opt.tolerance > 0.0)) throw std::invalid_argument("--tol must be positive");
  const StateSpec spec = search_start(opt.states, law.n_parties);
  const PureState start = load_state(spec, opt.seed);
  const OptimizerConfig cfg = opt.optimizer.apply(derive_seed(opt.seed, 0));

  SearchSettings settings;
  settings.direction = opt.direction == "min" ? Direction::Min : Direction::Max;
  settings.budget = opt.budget;
  settings.tolerance = opt.tolerance ? *opt.tolerance : default_tolerance(law);
  const SearchResult res = search_slack(law, start, cfg, settings, "search:" + spec.to_string());

  write_state(res.best, opt.state_out);
  char line[200];
  std::snprintf(line, sizeof line, "%s %s slack: start %.6e, best %.6e after %d evaluations", law.name.c_str(),
                opt.direction.c_str(), res.start_report.slack, res.report.slack, res.evaluations);
  info_stream(opt.out_path, out) << line << '\n' << "best state written to " << opt.state_out << '\n';
  if (!opt.out_path.empty()) {
    const Json rep{{"config",
                    {{"command", "search"},
                     {"law", law.name},
                     {"direction", opt.direction},
                     {"budget", opt.budget},
                     {"seed", opt.seed},
                     {"states", spec.to_string()},
                     {"tolerance", settings.tolerance}}},
                   {"evaluations", res.evaluations},
                   {"start", to_json(res.start_report, law.n_parties)},
                   {"best", to_json(res.report, law.n_parties)},
                   {"best_state", opt.state_out}};
    write_text(opt.out_path, rep.dump(2) + "\n", out);
  }
  // The proven direction must hold at the extremum; anything else is a bug signal.
  const bool against_bound = (law.relation == Relation::Ge && settings.direction == Direction::Min) ||
                             (law.relation == Relation::Le && settings.direction == Direction::Max);
  if (against_bound && !res.report.pass) {
    info_stream(opt.out_path, out) << "bound violated beyond tolerance " << settings.tolerance << '\n';
    return kFail;
  }
  return kPass;
}

/// Runs a subcommand, mapping library errors onto the exit-code contract.
template <class Fn>
int guarded(Fn&& fn, std::ostream& err = std::cerr) {
  try {
    return fn();
  } catch (const CertificationFailure& e) {
    err << "qcorr: " << e.what() << '\n';
    return kFail;
  } catch (const std::exception& e) {
    err << "qcorr: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace qcorr::cli
