#include <CLI11.hpp>

#include <iostream>

#include "qcorr/cli.hpp"

namespace {

void add_optimizer_flags(CLI::App* cmd, qcorr::cli::OptimizerOverrides& o) {
  cmd->add_option("--restarts", o.restarts, "optimizer restarts per measure")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iterations", o.max_iterations, "iteration cap per local search")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace qcorr::cli;
  CLI::App app{"Entanglement/discord conservation laws: compute, certify, verify, search"};
  app.require_subcommand(1);

  ComputeOptions compute;
  auto* c = app.add_subcommand("compute", "evaluate one measure on one state");
  c->add_option("--measure", compute.measure, "entropy|cond-entropy|mutual-info|ef|concurrence|classical-corr|discord")
      ->required()
      ->check(CLI::IsMember(measure_names()));
  c->add_option("--state", compute.state, "ghz:N, w:N, haar:d,.., product:d,.., file:PATH")->required();
  c->add_option("--partition", compute.partition, "index lists split by '|' or ';', e.g. 0,1|3")->required();
  c->add_option("--seed", compute.seed, "seed for random states and optimizers");
  c->add_option("--out", compute.out_path, "write a JSON report here ('-' for stdout)");
  add_optimizer_flags(c, compute.optimizer);

  std::string certify_id;
  auto* cert = app.add_subcommand("certify", "prove a law by entropy telescoping");
  cert->add_option("law", certify_id, "catalog name or gen:FAMILY:N")->required();

  app.add_subcommand("list", "print the law catalog");

  RunConfig verify;
  std::optional<double> verify_tol;
  auto* v = app.add_subcommand("verify", "Monte-Carlo check of laws on sampled states");
  v->add_option("--law", verify.laws, "law id (repeatable)")->required();
  v->add_option("--states", verify.state, "state spec")->capture_default_str();
  v->add_option("--samples", verify.samples, "number of states")->check(CLI::PositiveNumber)->capture_default_str();
  v->add_option("--seed", verify.seed, "campaign seed");
  v->add_option("--tol", verify_tol, "tolerance in bits (default by law class)")->check(CLI::PositiveNumber);
  v->add_option("--out", verify.out_path, "report path ('-' for stdout)");
  v->add_option("--format", verify.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  v->add_option("--jobs", verify.jobs, "worker threads (default $QCORR_JOBS or 1)")->check(CLI::NonNegativeNumber);
  add_optimizer_flags(v, verify.optimizer);

  SearchOptions search;
  std::optional<double> search_tol;
  auto* s = app.add_subcommand("search", "extremize the slack of an inequality over pure states");
  s->add_option("--law", search.law, "Ge or Le law id")->required();
  s->add_option("--direction", search.direction, "min or max")->check(CLI::IsMember({"min", "max"}))->capture_default_str();
  s->add_option("--budget", search.budget, "slack evaluations")->check(CLI::PositiveNumber)->capture_default_str();
  s->add_option("--seed", search.seed, "seed for the start state and optimizers");
  s->add_option("--states", search.states, "start: haar, product, or a state spec")->capture_default_str();
  s->add_option("--tol", search_tol, "tolerance in bits")->check(CLI::PositiveNumber);
  s->add_option("--state-out", search.state_out, "best state file")->capture_default_str();
  s->add_option("--out", search.out_path, "JSON report path ('-' for stdout)");
  add_optimizer_flags(s, search.optimizer);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }
  verify.tolerance = verify_tol;
  search.tolerance = search_tol;

  if (*c) return guarded([&] { return cmd_compute(compute, std::cout); });
  if (*cert) return guarded([&] { return cmd_certify(certify_id, std::cout); });
  if (*v) return guarded([&] { return cmd_verify(verify, std::cout); });
  if (*s) return guarded([&] { return cmd_search(search, std::cout); });
  return guarded([&] { return cmd_list(std::cout); });
}
