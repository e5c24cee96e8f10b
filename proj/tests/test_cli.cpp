#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "qcorr/cli.hpp"

using namespace qcorr;
using namespace qcorr::cli;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("qcorr_cli_" + name)).string();
}

// Strips the one field allowed to differ between identical runs.
Json without_wall_time(Json doc) {
  doc["aggregate"].erase("wall_time_seconds");
  return doc;
}

ComputeOptions compute_opts(std::string measure, std::string state, std::string partition) {
  ComputeOptions opt;
  opt.measure = std::move(measure);
  opt.state = std::move(state);
  opt.partition = std::move(partition);
  return opt;
}

Json campaign_doc(const RunConfig& rc) {
  const Campaign c = run_campaign(rc);
  return campaign_json(c.config, c.samples, c.aggregate);
}

}  // namespace

TEST(Partition, Parses) {
  const auto two = parse_partition("0,1|3");
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0], (SubsystemSet{0, 1}));
  EXPECT_EQ(two[1], (SubsystemSet{3}));
  EXPECT_EQ(parse_partition("2;0").size(), 2u);
  EXPECT_EQ(parse_partition("1,2").size(), 1u);
  for (const char* bad : {"", "0|", "a|1", "0,,1|2", "0|-1", "0,0|1"}) EXPECT_THROW(parse_partition(bad), InvalidPartition) << bad;
}

TEST(Compute, DocumentedValues) {
  std::ostringstream out;
  EXPECT_EQ(cmd_compute(compute_opts("ef", "ghz:2", "0|1"), out), kPass);
  EXPECT_EQ(out.str().substr(0, 8), "1.000000");
  out.str("");
  EXPECT_EQ(cmd_compute(compute_opts("concurrence", "w:3", "0|1"), out), kPass);
  EXPECT_EQ(out.str().substr(0, 8), "0.666667");
  out.str("");
  EXPECT_EQ(cmd_compute(compute_opts("entropy", "w:3", "0"), out), kPass);
  EXPECT_EQ(out.str().substr(0, 8), "0.918296");
}

TEST(Compute, DiscordAgreesWithKoashiWinter) {
  std::ostringstream out;
  const std::string path = temp_path("compute.json");
  ComputeOptions opt = compute_opts("discord", "w:3", "0|2");
  opt.out_path = path;
  EXPECT_EQ(cmd_compute(opt, out), kPass);
  std::ifstream in(path);
  const Json rep = Json::parse(in);
  const double via_kw = discord_via_kw(w_state(3), {0}, {2}, OptimizerConfig{}).value;
  EXPECT_NEAR(rep["value"].get<double>(), via_kw, 5e-3);
  EXPECT_TRUE(rep["converged"].get<bool>());
  std::filesystem::remove(path);
}

TEST(Compute, Errors) {
  std::ostringstream out;
  EXPECT_EQ(guarded([&] { return cmd_compute(compute_opts("ef", "ghz:2", "0|5"), out); }, out), kUsage);
  EXPECT_EQ(guarded([&] { return cmd_compute(compute_opts("ef", "ghz:2", "0"), out); }, out), kUsage);
  EXPECT_EQ(guarded([&] { return cmd_compute(compute_opts("concurrence", "ghz:3", "0|1,2"), out); }, out), kUsage);
  EXPECT_EQ(guarded([&] { return cmd_compute(compute_opts("ef", "nope:2", "0|1"), out); }, out), kUsage);
  EXPECT_EQ(guarded([&] { return cmd_compute(compute_opts("magic", "ghz:2", "0|1"), out); }, out), kUsage);
}

TEST(Certify, ExitCodes) {
  std::ostringstream out;
  EXPECT_EQ(cmd_certify("gen:odd:7", out), kPass);
  EXPECT_NE(out.str().find("residue: 0"), std::string::npos);
  out.str("");
  EXPECT_EQ(cmd_certify("four_cycle_ge", out), kPass);
  EXPECT_NE(out.str().find("2 S_{ab}"), std::string::npos);
  EXPECT_EQ(guarded([&] { return cmd_certify("gen:odd:4", out); }, out), kUsage);
  EXPECT_EQ(guarded([&] { return cmd_certify("unknown", out); }, out), kUsage);
}

TEST(Verify, GhzSlackVanishes) {
  RunConfig rc;
  rc.laws = {"tri_conservation"};
  rc.state = "ghz:3";
  const Campaign c = run_campaign(rc);
  ASSERT_EQ(c.samples.size(), 1u);
  EXPECT_NEAR(c.samples[0].report.slack, 0.0, 1e-9);
  EXPECT_EQ(c.aggregate.pass_count, 1);
}

TEST(Verify, AggregateMatchesSamples) {
  RunConfig rc;
  rc.laws = {"four_cycle_ge", "four_cycle_le", "four_discord"};
  rc.state = "haar:2,2,2,2";
  rc.samples = 3;
  const Campaign c = run_campaign(rc);
  ASSERT_EQ(c.samples.size(), 9u);
  double min_ge = 1e9;
  double max_le = -1e9;
  double max_eq = 0.0;
  int passed = 0;
  for (const auto& s : c.samples) {
    passed += s.report.pass;
    if (s.report.relation == Relation::Ge) min_ge = std::min(min_ge, s.report.slack);
    if (s.report.relation == Relation::Le) max_le = std::max(max_le, s.report.slack);
    if (s.report.relation == Relation::Eq) max_eq = std::max(max_eq, std::abs(s.report.slack));
  }
  EXPECT_EQ(c.aggregate.total, 9);
  EXPECT_EQ(c.aggregate.pass_count, passed);
  EXPECT_EQ(*c.aggregate.min_slack_ge, min_ge);
  EXPECT_EQ(*c.aggregate.max_slack_le, max_le);
  EXPECT_EQ(*c.aggregate.max_abs_slack_eq, max_eq);
}

TEST(Verify, DeterministicAcrossRunsAndJobCounts) {
  RunConfig rc;
  rc.laws = {"tri_conservation", "tri_discord_cycle"};
  rc.state = "haar:2,2,2";
  rc.samples = 6;
  rc.seed = 7;
  rc.jobs = 1;
  const Json one = without_wall_time(campaign_doc(rc));
  EXPECT_EQ(one.dump(), without_wall_time(campaign_doc(rc)).dump());
  rc.jobs = 3;
  EXPECT_EQ(one.dump(), without_wall_time(campaign_doc(rc)).dump());
}

TEST(Verify, JobsFromEnvironment) {
  ::setenv("QCORR_JOBS", "3", 1);
  EXPECT_EQ(resolve_jobs(0), 3);
  EXPECT_EQ(resolve_jobs(2), 2);
  ::setenv("QCORR_JOBS", "junk", 1);
  EXPECT_EQ(resolve_jobs(0), 1);
  ::unsetenv("QCORR_JOBS");
  EXPECT_EQ(resolve_jobs(0), 1);
}

TEST(Verify, ReportSchema) {
  RunConfig rc;
  rc.laws = {"tri_conservation"};
  rc.samples = 2;
  const Json doc = campaign_doc(rc);
  for (const char* key : {"config", "samples", "aggregate"}) EXPECT_TRUE(doc.contains(key)) << key;
  for (const char* key : {"total", "pass_count", "max_abs_slack_eq", "min_slack_ge", "max_slack_le", "wall_time_seconds"})
    EXPECT_TRUE(doc["aggregate"].contains(key)) << key;
  const Json& sample = doc["samples"][0];
  for (const char* key : {"index", "state_seed", "law", "state", "relation", "terms", "lhs", "rhs", "slack", "tolerance",
                          "pass", "converged", "optimizer"})
    EXPECT_TRUE(sample.contains(key)) << key;
  EXPECT_EQ(sample["terms"].size(), 4u);

  const Campaign c = run_campaign(rc);
  const std::string csv = campaign_csv(c.samples);
  const std::string header = csv.substr(0, csv.find('\n'));
  for (const char* col : {"term_1_kind", "term_1_target", "term_1_other", "term_1_value", "term_4_value"})
    EXPECT_NE(header.find(col), std::string::npos) << col;
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_NE(csv.find("\"haar:2,2,2\""), std::string::npos);
}

TEST(Verify, Errors) {
  std::ostringstream out;
  RunConfig rc;
  rc.laws = {"four_cycle_ge"};
  rc.state = "haar:2,2,2";
  EXPECT_EQ(guarded([&] { return cmd_verify(rc, out); }, out), kUsage);
  rc.laws = {};
  EXPECT_EQ(guarded([&] { return cmd_verify(rc, out); }, out), kUsage);
  rc.laws = {"tri_conservation"};
  rc.samples = 0;
  EXPECT_EQ(guarded([&] { return cmd_verify(rc, out); }, out), kUsage);
}

TEST(Verify, FailingCheckExitsOne) {
  std::ostringstream out;
  RunConfig rc;
  rc.laws = {"tri_conservation"};
  rc.state = "w:3";
  rc.optimizer.max_iterations = 1;
  rc.optimizer.restarts = 1;
  // An absurdly tight tolerance makes the optimizer error visible.
  rc.tolerance = 1e-300;
  EXPECT_EQ(cmd_verify(rc, out), kFail);
}

TEST(Search, ProductStartStaysAtBound) {
  std::ostringstream out;
  SearchOptions opt;
  opt.law = "four_central_ge";
  opt.states = "product";
  opt.budget = 40;
  opt.state_out = temp_path("best.json");
  opt.out_path = temp_path("search.json");
  EXPECT_EQ(cmd_search(opt, out), kPass);
  std::ifstream in(opt.out_path);
  const Json rep = Json::parse(in);
  EXPECT_NEAR(rep["start"]["slack"].get<double>(), 0.0, 1e-9);
  EXPECT_GE(rep["best"]["slack"].get<double>(), -5e-3);
  EXPECT_LE(rep["best"]["slack"].get<double>(), rep["start"]["slack"].get<double>());
  EXPECT_LE(rep["evaluations"].get<int>(), 40);
  const PureState best = read_state(opt.state_out);
  EXPECT_EQ(best.n_parties(), 4);
  std::filesystem::remove(opt.state_out);
  std::filesystem::remove(opt.out_path);
}

TEST(Search, MaximizeReportsGap) {
  std::ostringstream out;
  SearchOptions opt;
  opt.law = "four_cycle_le";
  opt.direction = "max";
  opt.budget = 40;
  opt.state_out = temp_path("best_le.json");
  EXPECT_EQ(cmd_search(opt, out), kPass);
  EXPECT_NE(out.str().find("best"), std::string::npos);
  std::filesystem::remove(opt.state_out);
}

TEST(Search, RejectsEqualities) {
  std::ostringstream out;
  SearchOptions opt;
  opt.law = "tri_conservation";
  EXPECT_EQ(guarded([&] { return cmd_search(opt, out); }, out), kUsage);
  opt.law = "four_central_ge";
  opt.direction = "sideways";
  EXPECT_EQ(guarded([&] { return cmd_search(opt, out); }, out), kUsage);
}
