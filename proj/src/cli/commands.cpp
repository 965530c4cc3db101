#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "uqcpt/cli.hpp"
#include "uqcpt/cpt.hpp"
#include "uqcpt/dgp.hpp"
#include "uqcpt/dist.hpp"
#include "uqcpt/error.hpp"
#include "uqcpt/sim.hpp"

namespace uqcpt::cli {
namespace {

// Raised for flag combinations rejected before any computation.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(double v, const char* spec = "%.10g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

struct AnalysisFlags {
  std::string input;
  std::string column;
  std::string index_column;
  std::string test = "hl";
  std::string g = "average";
  double p = 0.5;
  std::string lrv = "full";
  double sigma2 = 0.0;
  double d = 0.0;
  double b = 0.0;
  double b_scale = 2.0;
  std::string K = "epanechnikov";
  std::string W = "quartic";
  std::size_t kmin = 0;
  double alpha = 0.05;
  std::string output;
  std::string qq;

  CLI::Option* column_opt = nullptr;
  CLI::Option* index_opt = nullptr;
  CLI::Option* g_opt = nullptr;
  CLI::Option* p_opt = nullptr;
  CLI::Option* sigma2_opt = nullptr;
  CLI::Option* d_opt = nullptr;
  CLI::Option* b_opt = nullptr;
  CLI::Option* kmin_opt = nullptr;
};

void add_analysis_flags(CLI::App& cmd, AnalysisFlags& f) {
  cmd.add_option("input", f.input, "CSV file with the series")->required();
  f.column_opt = cmd.add_option("--column", f.column, "column name or 1-based position (default: first numeric)");
  f.index_opt = cmd.add_option("--index-column", f.index_column, "column labelling the rows, e.g. a year");
  cmd.add_option("--test", f.test, "cusum, hl, median or uq")
      ->check(CLI::IsMember({"cusum", "hl", "median", "uq"}))
      ->capture_default_str();
  f.g_opt = cmd.add_option("--g", f.g, "pair kernel for --test uq")->check(CLI::IsMember({"average", "absdiff"}));
  f.p_opt = cmd.add_option("--p", f.p, "quantile level for --test uq");
  cmd.add_option("--lrv", f.lrv, "long-run variance: known, marginal or full")
      ->check(CLI::IsMember({"known", "marginal", "full"}))
      ->capture_default_str();
  f.sigma2_opt = cmd.add_option("--sigma2", f.sigma2, "long-run variance for --lrv known");
  f.d_opt = cmd.add_option("--d", f.d, "density bandwidth (default IQR n^(-1/3))");
  f.b_opt = cmd.add_option("--b", f.b, "HAC bandwidth (default 2 n^(1/3))");
  auto* scale = cmd.add_option("--b-scale", f.b_scale, "HAC bandwidth multiple of n^(1/3)");
  f.b_opt->excludes(scale);
  cmd.add_option("--K", f.K, "density kernel")->check(CLI::IsMember({"epanechnikov"}))->capture_default_str();
  cmd.add_option("--W", f.W, "HAC window")->check(CLI::IsMember({"quartic", "bartlett"}))->capture_default_str();
  f.kmin_opt = cmd.add_option("--kmin", f.kmin, "first k of the process (default 1 for cusum, 11 otherwise)");
  cmd.add_option("--alpha", f.alpha, "test level")->capture_default_str();
}

struct Analysis {
  TestKind kind = TestKind::cusum();
  LrvConfig config;
};

Analysis validate(const AnalysisFlags& f) {
  Analysis a;
  const bool uq = f.test == "uq";
  if (!uq && (f.g_opt->count() > 0 || f.p_opt->count() > 0)) throw UsageError("--g and --p require --test uq");
  if (uq && f.p_opt->count() == 0) throw UsageError("--test uq requires --p");
  if (uq && !(f.p > 0.0 && f.p < 1.0)) throw UsageError("--p must lie in (0, 1)");
  if (f.lrv == "known" && f.sigma2_opt->count() == 0) throw UsageError("--lrv known requires --sigma2");
  if (f.lrv != "known" && f.sigma2_opt->count() > 0) throw UsageError("--sigma2 is only used with --lrv known");
  if (f.sigma2_opt->count() > 0 && !(f.sigma2 > 0.0 && std::isfinite(f.sigma2))) {
    throw UsageError("--sigma2 must be positive");
  }
  if (f.d_opt->count() > 0 && !(f.d > 0.0)) throw UsageError("--d must be positive");
  if (f.b_opt->count() > 0 && !(f.b > 0.0)) throw UsageError("--b must be positive");
  if (!(f.b_scale > 0.0)) throw UsageError("--b-scale must be positive");
  if (!(f.alpha > 0.0 && f.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
  if (f.kmin_opt->count() > 0 && f.kmin < 1) throw UsageError("--kmin must be at least 1");

  if (f.test == "cusum") {
    a.kind = TestKind::cusum();
  } else if (f.test == "hl") {
    a.kind = TestKind::hodges_lehmann();
  } else if (f.test == "median") {
    a.kind = TestKind::median();
  } else {
    a.kind = TestKind::general({f.g == "absdiff" ? PairKernel::abs_diff() : PairKernel::average(), f.p});
  }
  if (f.kmin_opt->count() > 0 && f.kmin < a.kind.min_prefix()) {
    throw UsageError("--kmin must be at least " + std::to_string(a.kind.min_prefix()) + " for this test");
  }
  a.config = f.lrv == "known" ? LrvConfig::known(f.sigma2) : LrvConfig{};
  a.config.mode = parse_lrv_mode(f.lrv);
  a.config.window = f.W == "bartlett" ? HacWindow::bartlett() : HacWindow::quartic();
  if (f.d_opt->count() > 0) a.config.fixed_density_bandwidth = f.d;
  if (f.b_opt->count() > 0) a.config.fixed_hac_bandwidth = f.b;
  a.config.hac_scale = f.b_scale;
  return a;
}

Series load(const AnalysisFlags& f, std::ostream& err) {
  std::ifstream in(f.input);
  if (!in) throw Error("cannot read input file " + f.input);
  Series s = read_series(in, f.column_opt->count() ? std::optional(f.column) : std::nullopt,
                         f.index_opt->count() ? std::optional(f.index_column) : std::nullopt);
  if (s.values.size() < 20) {
    err << "warning: only " << s.values.size() << " observations; the asymptotic p-value is unreliable\n";
  }
  return s;
}

std::size_t effective_kmin(const AnalysisFlags& f, const Analysis& a, std::size_t n) {
  const std::size_t k = f.kmin_opt->count() > 0 ? f.kmin : a.kind.default_k_min();
  if (k > n) throw Error("--kmin " + std::to_string(k) + " exceeds the series length " + std::to_string(n));
  return k;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

int cmd_test(const AnalysisFlags& f, std::ostream& out, std::ostream& err) {
  const Analysis a = validate(f);
  const Series series = load(f, err);
  const Sample sample(series.values);
  const std::size_t kmin = effective_kmin(f, a, sample.size());
  const auto r = run_test(sample, a.kind, a.config, kmin, f.alpha);

  std::vector<std::pair<std::string, std::string>> fields{
      {"test", a.kind.name()},
      {"column", series.column},
      {"n", std::to_string(sample.size())},
      {"kmin", std::to_string(kmin)},
      {"lrv_mode", f.lrv},
      {"lrv", fmt(r.lrv_used)},
      {"statistic", fmt(r.statistic)},
      {"p_value", fmt(r.p_value)},
      {"alpha", fmt(f.alpha)},
      {"critical_value", fmt(r.critical_value)},
      {"reject", r.reject ? "true" : "false"},
      {"changepoint_k", std::to_string(r.changepoint_k)},
  };
  if (!series.labels.empty()) fields.emplace_back("changepoint_label", series.labels[r.changepoint_k - 1]);

  std::size_t width = 0;
  for (const auto& [k, v] : fields) width = std::max(width, k.size());
  for (const auto& [k, v] : fields) out << k << std::string(width + 2 - k.size(), ' ') << v << '\n';

  if (!f.output.empty()) {
    std::ofstream file(f.output);
    if (!file) throw Error("cannot write " + f.output);
    if (ends_with(f.output, ".json")) {
      nlohmann::ordered_json j;
      j["test"] = a.kind.name();
      j["column"] = series.column;
      j["n"] = sample.size();
      j["kmin"] = kmin;
      j["lrv_mode"] = f.lrv;
      j["lrv"] = r.lrv_used;
      j["statistic"] = r.statistic;
      j["p_value"] = r.p_value;
      j["alpha"] = f.alpha;
      j["critical_value"] = r.critical_value;
      j["reject"] = r.reject;
      j["changepoint_k"] = r.changepoint_k;
      if (!series.labels.empty()) j["changepoint_label"] = series.labels[r.changepoint_k - 1];
      file << j.dump(2) << '\n';
    } else {
      for (const auto& [k, v] : fields) file << k << '=' << v << '\n';
    }
  }
  return kOk;
}

int cmd_traj(const AnalysisFlags& f, std::ostream& out, std::ostream& err) {
  const Analysis a = validate(f);
  const Series series = load(f, err);
  const Sample sample(series.values);
  const std::size_t kmin = effective_kmin(f, a, sample.size());
  const Trajectory traj = trajectory(sample, a.kind, a.config, kmin);

  std::ofstream file;
  if (!f.output.empty()) {
    file.open(f.output);
    if (!file) throw Error("cannot write " + f.output);
  }
  std::ostream& dst = f.output.empty() ? out : file;
  dst << (series.labels.empty() ? "k,value\n" : "k,label,value\n");
  for (std::size_t i = 0; i < traj.values.size(); ++i) {
    const std::size_t k = traj.first_k + i;
    dst << k << ',';
    if (!series.labels.empty()) dst << series.labels[k - 1] << ',';
    dst << fmt(traj.values[i], "%.17g") << '\n';
  }

  if (!f.qq.empty()) {
    std::ofstream qq(f.qq);
    if (!qq) throw Error("cannot write " + f.qq);
    std::vector<double> sorted = series.values;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    qq << "sample,normal_quantile\n";
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      qq << fmt(sorted[i], "%.17g") << ',' << fmt(dist::normal_quantile((static_cast<double>(i) + 0.5) / n), "%.17g")
         << '\n';
    }
  }
  return kOk;
}

struct SimFlags {
  std::string preset;
  std::string plan;
  std::size_t reps = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  double alpha = 0.05;
  std::string output;
  CLI::Option* reps_opt = nullptr;
  CLI::Option* n_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* output_opt = nullptr;
};

int cmd_sim(const SimFlags& f, std::ostream& out) {
  if (f.preset.empty() == f.plan.empty()) throw UsageError("sim needs exactly one of --preset or --plan");
  SimPlan plan;
  try {
    plan = f.preset.empty() ? load_plan(f.plan) : preset_plan(f.preset);
    if (f.reps_opt->count() > 0) plan.replications = f.reps;
    if (f.n_opt->count() > 0) plan.n = f.n;
    if (f.seed_opt->count() > 0) plan.seed = f.seed;
    if (f.threads_opt->count() > 0) plan.threads = f.threads;
    if (f.alpha_opt->count() > 0) plan.alpha = f.alpha;
    plan.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  const std::string path = f.output_opt->count() > 0 ? f.output : plan.name + "_results.csv";
  const auto results = run_plan(plan);
  export_results(results, path);
  out << plan.name << ": n = " << plan.n << ", R = " << plan.replications << ", seed = " << plan.seed
      << " (rejection rates in %)\n"
      << render_table(results) << "results written to " << path << '\n';
  return kOk;
}

struct RefvalFlags {
  std::string dist = "normal";
  std::string dep = "iid";
  double phi = 0.4;
  std::string test = "hl";
  double crit = 0.05;
  CLI::Option* crit_opt = nullptr;
  CLI::Option* phi_opt = nullptr;
  CLI::Option* dist_opt = nullptr;
  CLI::Option* dep_opt = nullptr;
  CLI::Option* test_opt = nullptr;
};

int cmd_refval(const RefvalFlags& f, std::ostream& out) {
  if (f.crit_opt->count() > 0) {
    if (f.dist_opt->count() + f.dep_opt->count() + f.test_opt->count() + f.phi_opt->count() > 0) {
      throw UsageError("--crit cannot be combined with --dist, --dep, --phi or --test");
    }
    if (!(f.crit > 0.0 && f.crit < 1.0)) throw UsageError("--crit must lie in (0, 1)");
    out << fmt(critical_value(f.crit), "%.6f") << '\n';
    return kOk;
  }
  MarginalDist marginal;
  DependenceSpec dependence;
  try {
    marginal = MarginalDist::parse(f.dist);
    if (f.dep == "ar1") {
      dependence = DependenceSpec::ar1(f.phi);
    } else {
      if (f.phi_opt->count() > 0) throw UsageError("--phi requires --dep ar1");
      dependence = DependenceSpec::parse(f.dep);
    }
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  const auto variant = f.test == "cusum"    ? TestKind::Variant::Cusum
                       : f.test == "median" ? TestKind::Variant::Median
                                            : TestKind::Variant::HodgesLehmann;
  const auto ref = true_lrv(marginal, dependence, variant);
  if (ref.available()) {
    out << fmt(*ref.value, "%.6f") << '\n';
  } else {
    out << ref.reason << '\n';
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust change-point tests based on U-quantiles", "uqcpt"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "uqcpt 1.0.0");

  AnalysisFlags test_flags;
  auto* test_cmd = app.add_subcommand("test", "test a CSV series for a change in location");
  add_analysis_flags(*test_cmd, test_flags);
  test_cmd->add_option("-o,--output", test_flags.output, "result file (.json or key=value text)");

  AnalysisFlags traj_flags;
  auto* traj_cmd = app.add_subcommand("traj", "write the change-point process as k,value rows");
  add_analysis_flags(*traj_cmd, traj_flags);
  traj_cmd->add_option("-o,--output", traj_flags.output, "trajectory CSV (default: standard output)");
  traj_cmd->add_option("--qq", traj_flags.qq, "also write normal quantile plot pairs of the data");

  SimFlags sim_flags;
  auto* sim_cmd = app.add_subcommand("sim", "Monte Carlo rejection rates for a preset or plan");
  auto* preset = sim_cmd->add_option("--preset", sim_flags.preset, "table1, table2, table3 or table4")
                     ->check(CLI::IsMember(preset_names()));
  auto* plan = sim_cmd->add_option("--plan", sim_flags.plan, "JSON plan file")->check(CLI::ExistingFile);
  preset->excludes(plan);
  sim_flags.reps_opt = sim_cmd->add_option("--reps", sim_flags.reps, "replications")->check(CLI::PositiveNumber);
  sim_flags.n_opt = sim_cmd->add_option("--n", sim_flags.n, "sample size")->check(CLI::Range(12, 10000000));
  sim_flags.seed_opt = sim_cmd->add_option("--seed", sim_flags.seed, "master seed");
  sim_flags.threads_opt = sim_cmd->add_option("--threads", sim_flags.threads, "worker threads (0: all cores)");
  sim_flags.alpha_opt = sim_cmd->add_option("--alpha", sim_flags.alpha, "test level");
  sim_flags.output_opt = sim_cmd->add_option("-o,--output", sim_flags.output, "results CSV");

  RefvalFlags ref_flags;
  auto* ref_cmd = app.add_subcommand("refval", "population long-run variances and critical values");
  ref_flags.dist_opt = ref_cmd->add_option("--dist", ref_flags.dist, "normal, t<nu>, tu<nu> (unscaled t) or exp(<rate>)");
  ref_flags.dep_opt = ref_cmd->add_option("--dep", ref_flags.dep, "iid, ar1 or ar1(<phi>)");
  ref_flags.phi_opt = ref_cmd->add_option("--phi", ref_flags.phi, "AR(1) coefficient for --dep ar1");
  ref_flags.test_opt = ref_cmd->add_option("--test", ref_flags.test, "cusum, hl or median")
                           ->check(CLI::IsMember({"cusum", "hl", "median"}));
  ref_flags.crit_opt = ref_cmd->add_option("--crit", ref_flags.crit, "print the sup|B| quantile at level alpha");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*test_cmd) return cmd_test(test_flags, out, err);
    if (*traj_cmd) return cmd_traj(traj_flags, out, err);
    if (*sim_cmd) return cmd_sim(sim_flags, out);
    return cmd_refval(ref_flags, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const SingularDensity& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const DegenerateSample& e) {
    err << "numerical error: " << e.what()
        << " (a constant series needs --lrv known --sigma2 <value>)\n";
    return kNumerical;
  } catch (const Error& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"uqcpt"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace uqcpt::cli
