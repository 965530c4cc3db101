#include "uqcpt/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include "json.hpp"
#include <sstream>
#include <thread>

#include "uqcpt/error.hpp"

namespace uqcpt {
namespace {

struct Cell {
  std::size_t row;
  std::size_t test;
  LrvMode mode;
  bool skipped;
  double known;
};

enum Outcome : std::uint8_t { kAccept = 0, kReject = 1, kFailed = 2 };

std::string format_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw InvalidArgument("malformed number '" + s + "'");
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  std::size_t used = 0;
  const auto v = std::stoull(s, &used);
  if (used != s.size()) throw InvalidArgument("malformed integer '" + s + "'");
  return v;
}

ChangeSpec parse_change_fields(const std::string& theta, const std::string& size) {
  if (theta.empty() && size.empty()) return ChangeSpec::none();
  if (size.rfind("mu=", 0) == 0) return ChangeSpec::location_jump(to_double(size.substr(3)), to_double(theta));
  if (size.rfind("lambda2=", 0) == 0) {
    return ChangeSpec::scale_change(to_double(size.substr(8)), to_double(theta));
  }
  throw InvalidArgument("malformed change size '" + size + "'");
}

std::string change_size_field(const ChangeSpec& change) {
  switch (change.kind) {
    case ChangeSpec::Kind::None:
      return "";
    case ChangeSpec::Kind::LocationJump:
      return "mu=" + format_exact(change.mu);
    case ChangeSpec::Kind::ScaleChange:
      break;
  }
  return "lambda2=" + format_exact(change.lambda2);
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

void SimPlan::validate() const {
  if (rows.empty()) throw InvalidArgument("plan has no design rows");
  if (tests.empty()) throw InvalidArgument("plan has no tests");
  if (modes.empty()) throw InvalidArgument("plan has no long-run variance modes");
  if (replications == 0) throw InvalidArgument("plan needs at least one replication");
  if (n < 12) throw InvalidArgument("plan sample size must be at least 12");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
}

std::vector<CellResult> run_plan(const SimPlan& plan) {
  plan.validate();
  std::vector<Cell> cells;
  for (std::size_t r = 0; r < plan.rows.size(); ++r) {
    for (std::size_t t = 0; t < plan.tests.size(); ++t) {
      for (LrvMode mode : plan.modes) {
        Cell cell{r, t, mode, false, 0.0};
        if (mode == LrvMode::Known) {
          const DgpRow& row = plan.rows[r];
          const bool scale_shift = row.change.kind == ChangeSpec::Kind::ScaleChange && !row.change.is_null();
          const auto ref = true_lrv(row.marginal, row.dependence, plan.tests[t].variant());
          cell.skipped = scale_shift || !ref.available();
          cell.known = ref.value.value_or(0.0);
        }
        cells.push_back(cell);
      }
    }
  }

  const double critical = critical_value(plan.alpha);
  const std::size_t reps = plan.replications;
  std::vector<std::uint8_t> outcomes(reps * cells.size(), kAccept);

  const auto run_replication = [&](std::size_t rep) {
    const std::uint64_t seed = derive_seed(plan.seed, rep);
    std::uint8_t* out = outcomes.data() + rep * cells.size();
    std::size_t c = 0;
    for (const DgpRow& row : plan.rows) {
      const Sample sample = generate({row.marginal, row.dependence, row.change, plan.n, seed});
      for (const TestKind& kind : plan.tests) {
        const std::size_t k_min = kind.default_k_min();
        const double unscaled = test_statistic(trajectory_with_lrv(sample, kind, 1.0, k_min), k_min).statistic;
        for (std::size_t m = 0; m < plan.modes.size(); ++m, ++c) {
          const Cell& cell = cells[c];
          if (cell.skipped) continue;
          double lrv = cell.known;
          if (cell.mode != LrvMode::Known) {
            LrvConfig config = plan.lrv;
            config.mode = cell.mode;
            try {
              lrv = long_run_variance(sample, kind, config);
            } catch (const Error&) {
              out[c] = kFailed;
              continue;
            }
          }
          out[c] = unscaled / std::sqrt(lrv) > critical ? kReject : kAccept;
        }
      }
    }
  };

  unsigned threads = plan.threads != 0 ? plan.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, reps));
  if (threads <= 1) {
    for (std::size_t rep = 0; rep < reps; ++rep) run_replication(rep);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t rep = next++; rep < reps; rep = next++) run_replication(rep);
      });
    }
  }

  std::vector<CellResult> results;
  results.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell& cell = cells[c];
    CellResult result;
    result.table = plan.name;
    result.row = plan.rows[cell.row];
    result.test = plan.tests[cell.test].name();
    result.mode = cell.mode;
    result.n = plan.n;
    result.replications = reps;
    result.seed = plan.seed;
    result.skipped = cell.skipped;
    if (!cell.skipped) {
      for (std::size_t rep = 0; rep < reps; ++rep) {
        const std::uint8_t o = outcomes[rep * cells.size() + c];
        result.rejections += o == kReject ? 1 : 0;
        result.failures += o == kFailed ? 1 : 0;
      }
      result.reject_rate = static_cast<double>(result.rejections) / static_cast<double>(reps);
      result.std_err = std::sqrt(result.reject_rate * (1.0 - result.reject_rate) / static_cast<double>(reps));
    }
    results.push_back(std::move(result));
  }
  return results;
}

std::vector<std::string> preset_names() { return {"table1", "table2", "table3", "table4"}; }

SimPlan preset_plan(const std::string& name) {
  SimPlan plan;
  plan.name = name;
  const std::vector<MarginalDist> symmetric{MarginalDist::normal(), MarginalDist::scaled_t(3.0),
                                            MarginalDist::scaled_t(1.0)};
  const auto jump_rows = [&](DependenceSpec dependence) {
    for (const auto& marginal : symmetric) {
      for (double theta : {0.5, 0.75}) {
        for (double mu : {0.25, 0.5, 1.0}) {
          plan.rows.push_back({marginal, dependence, ChangeSpec::location_jump(mu, theta)});
        }
      }
    }
  };
  if (name == "table1") {
    for (auto dependence : {DependenceSpec::iid(), DependenceSpec::ar1(0.4)}) {
      for (const auto& marginal : symmetric) plan.rows.push_back({marginal, dependence, ChangeSpec::none()});
    }
    plan.tests = {TestKind::cusum(), TestKind::hodges_lehmann(), TestKind::median()};
    plan.modes = {LrvMode::Known, LrvMode::Marginal, LrvMode::Full};
  } else if (name == "table2") {
    jump_rows(DependenceSpec::iid());
    plan.tests = {TestKind::cusum(), TestKind::hodges_lehmann()};
    plan.modes = {LrvMode::Known, LrvMode::Marginal, LrvMode::Full};
  } else if (name == "table3") {
    jump_rows(DependenceSpec::ar1(0.4));
    plan.tests = {TestKind::cusum(), TestKind::hodges_lehmann()};
    plan.modes = {LrvMode::Known, LrvMode::Full};
  } else if (name == "table4") {
    // post-change means 1, 4/5, 2/3, 1/2, 1/3
    for (double lambda2 : {1.0, 1.25, 1.5, 2.0, 3.0}) {
      plan.rows.push_back({MarginalDist::exponential(1.0), DependenceSpec::iid(),
                           ChangeSpec::scale_change(lambda2, 0.5)});
    }
    plan.tests = {TestKind::cusum(), TestKind::hodges_lehmann(), TestKind::median()};
    plan.modes = {LrvMode::Known, LrvMode::Marginal, LrvMode::Full};
  } else {
    throw InvalidArgument("unknown preset '" + name + "' (expected table1..table4)");
  }
  return plan;
}

std::string lrv_mode_name(LrvMode mode) {
  switch (mode) {
    case LrvMode::Known:
      return "known";
    case LrvMode::Marginal:
      return "marginal";
    case LrvMode::Full:
      break;
  }
  return "full";
}

LrvMode parse_lrv_mode(const std::string& name) {
  if (name == "known") return LrvMode::Known;
  if (name == "marginal") return LrvMode::Marginal;
  if (name == "full") return LrvMode::Full;
  throw InvalidArgument("unknown long-run variance mode '" + name + "'");
}

TestKind parse_test_kind(const std::string& name) {
  if (name == "cusum") return TestKind::cusum();
  if (name == "hl") return TestKind::hodges_lehmann();
  if (name == "median") return TestKind::median();
  if (name == "qn") return TestKind::general(UQuantileSpec::qn());
  // uq:<kernel>:<p>
  if (name.rfind("uq:", 0) == 0) {
    const auto colon = name.find(':', 3);
    if (colon == std::string::npos) throw InvalidArgument("expected uq:<kernel>:<p>, got '" + name + "'");
    const std::string kernel = name.substr(3, colon - 3);
    const double p = to_double(name.substr(colon + 1));
    if (kernel == "average") return TestKind::general({PairKernel::average(), p});
    if (kernel == "absdiff") return TestKind::general({PairKernel::abs_diff(), p});
    throw InvalidArgument("unknown pair kernel '" + kernel + "'");
  }
  throw InvalidArgument("unknown test '" + name + "'");
}

SimPlan plan_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("plan is not valid JSON: ") + e.what());
  }
  try {
    SimPlan plan = j.contains("preset") ? preset_plan(j.at("preset").get<std::string>()) : SimPlan{};
    plan.name = j.value("name", plan.name);
    plan.n = j.value("n", plan.n);
    plan.replications = j.value("replications", plan.replications);
    plan.seed = j.value("seed", plan.seed);
    plan.alpha = j.value("alpha", plan.alpha);
    plan.threads = j.value("threads", plan.threads);
    if (j.contains("tests")) {
      plan.tests.clear();
      for (const auto& t : j.at("tests")) plan.tests.push_back(parse_test_kind(t.get<std::string>()));
    }
    if (j.contains("modes")) {
      plan.modes.clear();
      for (const auto& m : j.at("modes")) plan.modes.push_back(parse_lrv_mode(m.get<std::string>()));
    }
    if (j.contains("rows")) {
      plan.rows.clear();
      for (const auto& r : j.at("rows")) {
        DgpRow row;
        row.marginal = MarginalDist::parse(r.value("marginal", std::string("normal")));
        row.dependence = DependenceSpec::parse(r.value("dependence", std::string("iid")));
        if (r.contains("change")) {
          const auto& c = r.at("change");
          const std::string type = c.value("type", std::string("none"));
          const double theta = c.value("theta", 0.5);
          if (type == "jump") {
            row.change = ChangeSpec::location_jump(c.at("mu").get<double>(), theta);
          } else if (type == "scale") {
            row.change = ChangeSpec::scale_change(c.at("lambda2").get<double>(), theta);
          } else if (type != "none") {
            throw InvalidArgument("unknown change type '" + type + "'");
          }
        }
        plan.rows.push_back(row);
      }
    }
    if (j.contains("lrv")) {
      const auto& l = j.at("lrv");
      const std::string window = l.value("window", std::string("quartic"));
      if (window == "quartic") {
        plan.lrv.window = HacWindow::quartic();
      } else if (window == "bartlett") {
        plan.lrv.window = HacWindow::bartlett();
      } else {
        throw InvalidArgument("unknown HAC window '" + window + "'");
      }
      plan.lrv.hac_scale = l.value("hac_scale", plan.lrv.hac_scale);
      plan.lrv.hac_exponent = l.value("hac_exponent", plan.lrv.hac_exponent);
      if (l.contains("b")) plan.lrv.fixed_hac_bandwidth = l.at("b").get<double>();
      if (l.contains("d")) plan.lrv.fixed_density_bandwidth = l.at("d").get<double>();
    }
    plan.validate();
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("invalid plan: ") + e.what());
  }
}

SimPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open plan file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return plan_from_json_text(buffer.str());
}

void write_results(const std::vector<CellResult>& results, std::ostream& out) {
  out << kResultsHeader << '\n';
  for (const CellResult& r : results) {
    const bool change = r.row.change.kind != ChangeSpec::Kind::None;
    out << r.table << ',' << r.row.marginal.label() << ',' << r.row.dependence.label() << ','
        << (change ? format_exact(r.row.change.theta) : "") << ',' << change_size_field(r.row.change) << ','
        << r.test << ',' << lrv_mode_name(r.mode) << ',' << r.n << ',' << r.replications << ','
        << (r.skipped ? "" : format_exact(r.reject_rate)) << ','
        << (r.skipped ? "" : format_exact(r.std_err)) << ',' << r.seed << '\n';
  }
}

std::vector<CellResult> read_results(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader) {
    throw InvalidArgument("results file does not start with the expected header");
  }
  std::vector<CellResult> results;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 12) throw InvalidArgument("results line " + std::to_string(line_no) + ": expected 12 fields");
    CellResult r;
    r.table = f[0];
    r.row.marginal = MarginalDist::parse(f[1]);
    r.row.dependence = DependenceSpec::parse(f[2]);
    r.row.change = parse_change_fields(f[3], f[4]);
    r.test = f[5];
    r.mode = parse_lrv_mode(f[6]);
    r.n = to_u64(f[7]);
    r.replications = to_u64(f[8]);
    r.skipped = f[9].empty();
    if (!r.skipped) {
      r.reject_rate = to_double(f[9]);
      r.std_err = to_double(f[10]);
      r.rejections = static_cast<std::size_t>(std::llround(r.reject_rate * static_cast<double>(r.replications)));
    }
    r.seed = to_u64(f[11]);
    results.push_back(std::move(r));
  }
  return results;
}

void export_results(const std::vector<CellResult>& results, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open results file " + path.string() + " for writing");
  write_results(results, out);
  out.flush();
  if (!out) throw Error("failed writing results file " + path.string());
}

std::vector<CellResult> import_results(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open results file " + path.string());
  return read_results(in);
}

std::string render_table(const std::vector<CellResult>& results) {
  // columns: (test, mode) in order of first appearance; rows likewise
  std::vector<std::pair<std::string, LrvMode>> columns;
  std::vector<std::string> row_keys;
  std::map<std::pair<std::string, std::size_t>, const CellResult*> lookup;
  const auto row_key = [](const CellResult& r) {
    std::string key = r.row.marginal.label() + " " + r.row.dependence.label();
    if (r.row.change.kind == ChangeSpec::Kind::LocationJump) {
      key += " theta=" + short_number(r.row.change.theta) + " mu=" + short_number(r.row.change.mu);
    } else if (r.row.change.kind == ChangeSpec::Kind::ScaleChange) {
      key += " theta=" + short_number(r.row.change.theta) + " mean2=" + short_number(1.0 / r.row.change.lambda2);
    }
    return key;
  };
  for (const CellResult& r : results) {
    const auto col = std::make_pair(r.test, r.mode);
    auto cit = std::find(columns.begin(), columns.end(), col);
    if (cit == columns.end()) cit = columns.insert(columns.end(), col);
    const std::string key = row_key(r);
    auto rit = std::find(row_keys.begin(), row_keys.end(), key);
    if (rit == row_keys.end()) rit = row_keys.insert(row_keys.end(), key);
    lookup[{key, static_cast<std::size_t>(cit - columns.begin())}] = &r;
  }
  std::size_t width = 10;
  for (const auto& key : row_keys) width = std::max(width, key.size());

  std::vector<std::string> labels;
  std::size_t line = width + 2;
  for (const auto& [test, mode] : columns) {
    labels.push_back(test + "/" + lrv_mode_name(mode).substr(0, 4));
    line += 1 + std::max<std::size_t>(10, labels.back().size());
  }

  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(width)) << "design" << " |";
  for (const auto& label : labels) out << ' ' << std::right << std::setw(10) << label;
  out << '\n' << std::string(line, '-') << '\n';
  for (const auto& key : row_keys) {
    out << std::left << std::setw(static_cast<int>(width)) << key << " |";
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const auto it = lookup.find({key, c});
      std::string cell;
      if (it != lookup.end() && !it->second->skipped) {
        cell = std::to_string(static_cast<long>(std::lround(100.0 * it->second->reject_rate)));
      }
      out << ' ' << std::right << std::setw(static_cast<int>(std::max<std::size_t>(10, labels[c].size()))) << cell;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace uqcpt
