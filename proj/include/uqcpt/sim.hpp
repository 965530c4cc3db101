#pragma once

// Monte Carlo rejection frequencies of the change-point tests. Every
// replication draws one latent Gaussian path, maps it through each design
// row, and evaluates all (test, variance mode) cells on that same sample.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "uqcpt/cpt.hpp"
#include "uqcpt/dgp.hpp"
#include "uqcpt/lrv.hpp"

namespace uqcpt {

/// One design row: margin, dependence and change; n and the seed come from the plan.
struct DgpRow {
  MarginalDist marginal = MarginalDist::normal();
  DependenceSpec dependence = DependenceSpec::iid();
  ChangeSpec change = ChangeSpec::none();
};

struct SimPlan {
  std::string name = "custom";
  std::vector<DgpRow> rows;
  std::vector<TestKind> tests;
  std::vector<LrvMode> modes;
  std::size_t n = 240;
  std::size_t replications = 1000;
  std::uint64_t seed = 20160101;
  double alpha = 0.05;
  /// Kernels and bandwidth rules; the mode field is overridden per cell.
  LrvConfig lrv;
  /// 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;

  /// Throws InvalidArgument on an empty grid, R = 0 or alpha outside (0, 1).
  void validate() const;
};

struct CellResult {
  std::string table;
  DgpRow row;
  std::string test;
  LrvMode mode = LrvMode::Full;
  std::size_t n = 0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  bool skipped = false;
  std::size_t rejections = 0;
  /// Replications whose variance estimate failed; they count as non-rejections.
  std::size_t failures = 0;
  double reject_rate = 0.0;
  double std_err = 0.0;
};

/// Results ordered by row, then test, then mode. Identical for any thread count.
[[nodiscard]] std::vector<CellResult> run_plan(const SimPlan& plan);

/// Named grids "table1" .. "table4" at n = 240, R = 1000.
[[nodiscard]] SimPlan preset_plan(const std::string& name);
[[nodiscard]] std::vector<std::string> preset_names();

/// Reads a JSON plan file (schema in README).
[[nodiscard]] SimPlan load_plan(const std::filesystem::path& path);
[[nodiscard]] SimPlan plan_from_json_text(const std::string& text);

[[nodiscard]] std::string lrv_mode_name(LrvMode mode);
[[nodiscard]] LrvMode parse_lrv_mode(const std::string& name);
[[nodiscard]] TestKind parse_test_kind(const std::string& name);

/// Column order of the results file.
inline constexpr const char* kResultsHeader =
    "table,marginal,dependence,theta,mu_or_lambda2,test,lrv_mode,n,R,reject_rate,std_err,seed";

void write_results(const std::vector<CellResult>& results, std::ostream& out);
[[nodiscard]] std::vector<CellResult> read_results(std::istream& in);
/// Throws Error with the path on I/O failure.
void export_results(const std::vector<CellResult>& results, const std::filesystem::path& path);
[[nodiscard]] std::vector<CellResult> import_results(const std::filesystem::path& path);

/// Percentages rounded to integers, blank for skipped cells.
[[nodiscard]] std::string render_table(const std::vector<CellResult>& results);

}  // namespace uqcpt
