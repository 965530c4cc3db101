#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "uqcpt/error.hpp"
#include "uqcpt/sim.hpp"

using namespace uqcpt;
using Catch::Approx;

namespace {

SimPlan small_plan() {
  SimPlan plan;
  plan.name = "small";
  plan.rows = {{MarginalDist::normal(), DependenceSpec::iid(), ChangeSpec::none()},
               {MarginalDist::scaled_t(1), DependenceSpec::ar1(0.4), ChangeSpec::location_jump(1.0, 0.5)},
               {MarginalDist::exponential(1), DependenceSpec::iid(), ChangeSpec::scale_change(2.0, 0.5)}};
  plan.tests = {TestKind::cusum(), TestKind::hodges_lehmann(), TestKind::median()};
  plan.modes = {LrvMode::Known, LrvMode::Marginal, LrvMode::Full};
  plan.n = 80;
  plan.replications = 40;
  plan.seed = 9;
  return plan;
}

bool same(const CellResult& a, const CellResult& b) {
  return a.table == b.table && a.row.marginal.label() == b.row.marginal.label() &&
         a.row.dependence.label() == b.row.dependence.label() && a.row.change.kind == b.row.change.kind &&
         a.row.change.mu == b.row.change.mu && a.row.change.lambda2 == b.row.change.lambda2 &&
         a.row.change.theta == b.row.change.theta && a.test == b.test && a.mode == b.mode && a.n == b.n &&
         a.replications == b.replications && a.seed == b.seed && a.skipped == b.skipped &&
         a.rejections == b.rejections && a.reject_rate == b.reject_rate && a.std_err == b.std_err;
}

}  // namespace

TEST_CASE("cells, skips and frequencies") {
  const auto plan = small_plan();
  const auto res = run_plan(plan);
  REQUIRE(res.size() == 27);
  for (const auto& c : res) {
    const bool t1_cusum_known = c.row.marginal.label() == "t1" && c.test == "cusum" && c.mode == LrvMode::Known;
    const bool scale_known = c.row.change.kind == ChangeSpec::Kind::ScaleChange && c.mode == LrvMode::Known;
    const bool ar_t_known = c.row.dependence.kind == DependenceSpec::Kind::Ar1 && c.mode == LrvMode::Known &&
                            c.test == "cusum";
    CHECK(c.skipped == (t1_cusum_known || scale_known || ar_t_known));
    if (!c.skipped) {
      CHECK(c.reject_rate == double(c.rejections) / double(c.replications));
      CHECK(c.std_err == Approx(std::sqrt(c.reject_rate * (1 - c.reject_rate) / 40.0)));
    }
  }
}

TEST_CASE("thread count does not change results") {
  auto plan = small_plan();
  plan.threads = 1;
  const auto serial = run_plan(plan);
  plan.threads = 4;
  const auto parallel = run_plan(plan);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) CHECK(same(serial[i], parallel[i]));
}

TEST_CASE("one replication gives 0 or 1") {
  auto plan = small_plan();
  plan.replications = 1;
  for (const auto& c : run_plan(plan)) {
    if (!c.skipped) CHECK((c.reject_rate == 0.0 || c.reject_rate == 1.0));
  }
}

TEST_CASE("results file round-trip") {
  const auto res = run_plan(small_plan());
  std::stringstream buf;
  write_results(res, buf);
  std::string header;
  std::getline(std::istringstream(buf.str()), header);
  CHECK(header == "table,marginal,dependence,theta,mu_or_lambda2,test,lrv_mode,n,R,reject_rate,std_err,seed");
  const auto back = read_results(buf);
  REQUIRE(back.size() == res.size());
  for (std::size_t i = 0; i < res.size(); ++i) CHECK(same(back[i], res[i]));

  std::stringstream again;
  write_results(back, again);
  std::stringstream first;
  write_results(res, first);
  CHECK(again.str() == first.str());

  std::stringstream empty;
  write_results({}, empty);
  CHECK(empty.str() == std::string(kResultsHeader) + "\n");
  CHECK(read_results(empty).empty());

  const auto dir = std::filesystem::temp_directory_path();
  export_results(res, dir / "uqcpt_roundtrip.csv");
  const auto file = import_results(dir / "uqcpt_roundtrip.csv");
  CHECK(file.size() == res.size());
  CHECK_THROWS_WITH(export_results(res, "/nonexistent-dir/x.csv"), Catch::Matchers::ContainsSubstring("/nonexistent-dir/x.csv"));
  CHECK_THROWS_WITH(import_results("/nonexistent-dir/x.csv"), Catch::Matchers::ContainsSubstring("/nonexistent-dir/x.csv"));
  std::stringstream bad("not,a,header\n");
  CHECK_THROWS_AS(read_results(bad), InvalidArgument);
}

TEST_CASE("presets encode the table grids") {
  CHECK(preset_names().size() == 4);
  const auto t1 = preset_plan("table1");
  CHECK(t1.rows.size() == 6);
  CHECK(t1.tests.size() == 3);
  CHECK(t1.modes.size() == 3);
  CHECK(t1.n == 240);
  CHECK(t1.replications == 1000);
  const auto t2 = preset_plan("table2");
  CHECK(t2.rows.size() == 18);
  CHECK(t2.tests.size() == 2);
  const auto t3 = preset_plan("table3");
  CHECK(t3.rows.size() == 18);
  CHECK(t3.modes == std::vector<LrvMode>{LrvMode::Known, LrvMode::Full});
  CHECK(t3.rows[0].dependence.phi == 0.4);
  const auto t4 = preset_plan("table4");
  CHECK(t4.rows.size() == 5);
  CHECK(t4.rows[3].change.lambda2 == 2.0);
  CHECK_THROWS_AS(preset_plan("table9"), InvalidArgument);
}

TEST_CASE("JSON plans") {
  const auto plan = plan_from_json_text(R"j({
    "name": "custom", "n": 100, "replications": 20, "seed": 5,
    "tests": ["hl", "qn", "uq:average:0.3"], "modes": ["full"],
    "rows": [{"marginal": "t3", "dependence": "ar1(0.2)", "change": {"type": "jump", "mu": 0.5, "theta": 0.25}},
             {"marginal": "exp(1)", "change": {"type": "scale", "lambda2": 1.5}}],
    "lrv": {"window": "bartlett", "b": 4}
  })j");
  CHECK(plan.n == 100);
  CHECK(plan.tests.size() == 3);
  CHECK(plan.tests[1].name() == "uq:absdiff:0.25");
  CHECK(plan.rows[0].dependence.phi == 0.2);
  CHECK(plan.rows[1].change.theta == 0.5);
  CHECK(plan.lrv.window.name == "bartlett");
  CHECK(*plan.lrv.fixed_hac_bandwidth == 4.0);
  const auto res = run_plan(plan);
  CHECK(res.size() == 6);

  const auto from_preset = plan_from_json_text(R"j({"preset": "table4", "replications": 10})j");
  CHECK(from_preset.rows.size() == 5);
  CHECK(from_preset.replications == 10);

  CHECK_THROWS_AS(plan_from_json_text("{"), InvalidArgument);
  CHECK_THROWS_AS(plan_from_json_text(R"j({"tests": ["hl"], "modes": ["full"], "rows": []})j"), InvalidArgument);
  CHECK_THROWS_AS(plan_from_json_text(R"j({"preset": "table1", "tests": ["bogus"]})j"), InvalidArgument);
  CHECK_THROWS_AS(plan_from_json_text(R"j({"preset": "table1", "replications": 0})j"), InvalidArgument);
  CHECK_THROWS_AS(plan_from_json_text(R"j({"preset": "table1", "n": "many"})j"), InvalidArgument);
}

TEST_CASE("rendered table") {
  auto plan = small_plan();
  plan.replications = 10;
  const auto text = render_table(run_plan(plan));
  CHECK(text.find("normal iid") != std::string::npos);
  CHECK(text.find("hl/full") != std::string::npos);
}

TEST_CASE("power grows with the jump height") {
  auto plan = preset_plan("table2");
  plan.rows.resize(3);  // normal, theta = 1/2, mu = 1/4, 1/2, 1
  plan.tests = {TestKind::hodges_lehmann()};
  plan.modes = {LrvMode::Full};
  plan.replications = 300;
  const auto res = run_plan(plan);
  CHECK(res[0].reject_rate < res[1].reject_rate);
  CHECK(res[1].reject_rate < res[2].reject_rate);
}

TEST_CASE("known-variance CUSUM size at n = 2000") {
  SimPlan plan;
  plan.rows = {{MarginalDist::normal(), DependenceSpec::iid(), ChangeSpec::none()}};
  plan.tests = {TestKind::cusum()};
  plan.modes = {LrvMode::Known};
  plan.n = 2000;
  plan.replications = 2000;
  const auto res = run_plan(plan);
  CHECK(res[0].reject_rate >= 0.035);
  CHECK(res[0].reject_rate <= 0.065);
}
