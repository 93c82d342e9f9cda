#include "tab/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <numbers>
#include <numeric>

#include "tab/config.hpp"
#include "tab/error.hpp"
#include "tab/learning.hpp"
#include "tab/parallel.hpp"

namespace tab {

// ---------------------------------------------------------------------------
// Tasks

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::sin: return "sin";
    case TaskKind::cube: return "cube";
    case TaskKind::sinc: return "sinc";
    case TaskKind::custom: return "custom";
  }
  return "unknown";
}

TaskKind parse_task(std::string_view name) {
  if (name == "sin") return TaskKind::sin;
  if (name == "cube") return TaskKind::cube;
  if (name == "sinc") return TaskKind::sinc;
  if (name == "custom") return TaskKind::custom;
  throw InvalidParameter("unknown task '" + std::string(name) + "' (expected sin, cube, sinc)");
}

void TaskSpec::validate() const {
  if (!(std::isfinite(x_lo) && std::isfinite(x_hi) && x_lo < x_hi)) {
    throw InvalidParameter("task domain requires x_lo < x_hi");
  }
  if (n_train < 2 || n_test < 2) throw InvalidParameter("task needs at least 2 train and 2 test points");
  if (name == TaskKind::custom && !custom) {
    throw InvalidParameter("custom task requires a target callback");
  }
}

double TaskSpec::target(double x) const {
  switch (name) {
    case TaskKind::sin: return std::sin(std::numbers::pi * x);
    case TaskKind::cube: return x * x * x;
    case TaskKind::sinc: {
      const double a = 8.0 * std::numbers::pi * x;
      return a == 0.0 ? 1.0 : std::sin(a) / a;
    }
    case TaskKind::custom: return custom(x);
  }
  return 0.0;
}

std::vector<double> TaskSpec::train_grid() const {
  validate();
  std::vector<double> xs(static_cast<std::size_t>(n_train));
  const double step = (x_hi - x_lo) / (n_train - 1);
  for (int i = 0; i < n_train; ++i) xs[static_cast<std::size_t>(i)] = x_lo + step * i;
  xs.back() = x_hi;
  return xs;
}

std::vector<double> TaskSpec::test_grid() const {
  validate();
  std::vector<double> xs(static_cast<std::size_t>(n_test));
  const double cell = (x_hi - x_lo) / n_test;
  for (int j = 0; j < n_test; ++j) xs[static_cast<std::size_t>(j)] = x_lo + cell * (j + 0.5);

  const auto train = train_grid();
  const double eps = 1e-9 * (x_hi - x_lo);
  for (double x : xs) {
    auto it = std::lower_bound(train.begin(), train.end(), x);
    const bool hit = (it != train.end() && *it - x <= eps) ||
                     (it != train.begin() && x - *(it - 1) <= eps);
    if (hit) throw InvalidParameter("test grid collides with training grid; change n_test");
  }
  return xs;
}

void ExperimentConfig::validate() const {
  task.validate();
  if (L < 1) throw InvalidParameter("neuron count L must be at least 1");
  tab::validate(offsets);
  mismatch.validate();
  if (quant_bits && (*quant_bits < 1 || *quant_bits > kMaxSplitterBits)) {
    throw InvalidParameter("quant_bits must be in [1, 24]");
  }
  nominal.validate();
  constants.validate();
  input_map.validate();
  if (!(ridge >= 0.0)) throw InvalidParameter("ridge must be non-negative");
}

// ---------------------------------------------------------------------------
// Shared fitting pass

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Eigen::MatrixXd targets_for(const TaskSpec& task, const std::vector<double>& xs) {
  Eigen::MatrixXd y(static_cast<Eigen::Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) y(static_cast<Eigen::Index>(i), 0) = task.target(xs[i]);
  if (!y.allFinite()) throw InvalidParameter("task target produced a non-finite value");
  return y;
}

struct Fit {
  std::vector<double> test_x;
  Eigen::MatrixXd h_train;
  Eigen::MatrixXd h_test;
  Eigen::MatrixXd y_train;
  Eigen::MatrixXd y_test;
  TrainReport trained;
  ConditionDiagnostics diag;
};

TabNetwork make_network(const ExperimentConfig& cfg) {
  auto population = sample_population(static_cast<std::size_t>(cfg.L), cfg.mismatch, cfg.offsets,
                                      cfg.nominal, cfg.seed);
  return TabNetwork(std::move(population), cfg.constants, cfg.input_map, cfg.nominal.bias_current);
}

Fit fit_task(const ExperimentConfig& cfg) {
  cfg.validate();
  const TabNetwork net = make_network(cfg);
  const auto train_x = cfg.task.train_grid();
  Fit fit;
  fit.test_x = cfg.task.test_grid();
  fit.h_train = build_hidden_matrix(net, train_x);
  fit.h_test = build_hidden_matrix(net, fit.test_x);
  fit.y_train = targets_for(cfg.task, train_x);
  fit.y_test = targets_for(cfg.task, fit.test_x);

  TrainOptions opts;
  opts.quant_bits = cfg.quant_bits;
  opts.ridge = cfg.ridge;
  fit.trained = train(fit.h_train, fit.y_train, opts);
  fit.diag = condition_diagnostics(fit.h_train);
  return fit;
}

RegressionOutcome outcome_of(const Fit& fit) {
  RegressionOutcome out;
  const Eigen::MatrixXd real_hat = fit.h_test * fit.trained.weights;
  Eigen::MatrixXd hat = real_hat;
  out.train_nrmse = fit.trained.train_nrmse;
  if (fit.trained.quantized) {
    hat = fit.h_test * fit.trained.quantized_weights();
    out.train_nrmse = *fit.trained.quantized_train_nrmse;
    out.test_nrmse_real = nrmse(fit.y_test, real_hat);
  }
  out.test_nrmse = nrmse(fit.y_test, hat);
  out.capacity = fit.trained.capacity;
  out.rank = fit.diag.rank;
  out.condition_number = fit.diag.condition_number;
  out.ridge_active = fit.trained.ridge_active;
  out.test_x = fit.test_x;
  out.y_target = fit.y_test.col(0);
  out.y_hat = hat.col(0);
  return out;
}

// ---------------------------------------------------------------------------
// Output

std::string fmt(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

class CsvTable {
 public:
  explicit CsvTable(const std::vector<std::string>& header) { append(header); }
  void add(const std::vector<std::string>& cells) {
    append(cells);
    ++rows_;
  }
  const std::string& text() const { return text_; }
  std::size_t rows() const { return rows_; }

 private:
  void append(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }

  std::string text_;
  std::size_t rows_ = 0;
};

struct PendingFile {
  std::string name;
  std::string contents;
};

// All contents are rendered before this is called, so a failed run leaves no
// partial output behind unless the filesystem itself fails mid-write.
void write_all(const std::filesystem::path& dir, const std::vector<PendingFile>& files) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& f : files) {
    const auto path = dir / f.name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << f.contents;
    out.close();
    if (!out) {
      for (const auto& p : written) std::filesystem::remove(p, ec);
      std::filesystem::remove(path, ec);
      throw IoError("failed writing " + path.string());
    }
    written.push_back(path);
  }
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace

// ---------------------------------------------------------------------------
// Regression

RegressionOutcome evaluate_regression(const ExperimentConfig& cfg) {
  return outcome_of(fit_task(cfg));
}

ExperimentReport run_regression(const ExperimentConfig& cfg, bool include_timing) {
  const auto start = Clock::now();
  const RegressionOutcome out = evaluate_regression(cfg);

  CsvTable curve({"x", "y_target", "y_hat"});
  for (std::size_t i = 0; i < out.test_x.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    curve.add({fmt(out.test_x[i]), fmt(out.y_target(r)), fmt(out.y_hat(r))});
  }

  ExperimentReport report;
  report.config = cfg;
  report.train_nrmse = out.train_nrmse;
  report.test_nrmse = out.test_nrmse;
  report.test_nrmse_real = out.test_nrmse_real;
  report.capacity = out.capacity;
  report.rank = out.rank;
  report.condition_number = out.condition_number;
  report.ridge_active = out.ridge_active;
  const std::string stem = "regress_" + to_string(cfg.task.name);
  report.files.push_back({stem + ".csv", curve.rows()});
  report.wall_clock_seconds = seconds_since(start);

  write_all(cfg.output_dir, {{stem + ".csv", curve.text()},
                             {stem + ".json", dump(to_json(report, include_timing))}});
  return report;
}

// ---------------------------------------------------------------------------
// Heterogeneity

const ArmResult& HeterogeneityReport::arm(std::string_view name) const {
  for (const auto& a : arms) {
    if (a.arm == name) return a;
  }
  throw InvalidParameter("no heterogeneity arm named " + std::string(name));
}

HeterogeneityReport evaluate_heterogeneity(const ExperimentConfig& cfg) {
  cfg.validate();
  const double mid = 0.5 * (cfg.input_map.v_lo + cfg.input_map.v_hi);

  ExperimentConfig homogeneous = cfg;
  homogeneous.offsets = ConstantOffset{mid};
  homogeneous.mismatch = MismatchSpec::ideal();
  homogeneous.quant_bits.reset();

  ExperimentConfig mismatch_only = homogeneous;
  mismatch_only.mismatch = cfg.mismatch.is_ideal() ? MismatchSpec{} : cfg.mismatch;

  ExperimentConfig uniform = homogeneous;
  uniform.offsets = std::holds_alternative<UniformSpan>(cfg.offsets)
                        ? cfg.offsets
                        : OffsetScheme{UniformSpan{std::min(cfg.input_map.v_lo, cfg.input_map.v_hi),
                                                   std::max(cfg.input_map.v_lo, cfg.input_map.v_hi)}};

  HeterogeneityReport report;
  report.config = cfg;
  Fit homogeneous_fit;
  const std::pair<const char*, const ExperimentConfig*> arms[] = {
      {"homogeneous", &homogeneous}, {"mismatch_only", &mismatch_only}, {"uniform_span", &uniform}};
  for (const auto& [name, arm_cfg] : arms) {
    Fit fit = fit_task(*arm_cfg);
    const RegressionOutcome out = outcome_of(fit);
    report.arms.push_back({name, out.rank, out.capacity, out.condition_number, out.train_nrmse,
                           out.test_nrmse});
    if (arm_cfg == &homogeneous) homogeneous_fit = std::move(fit);
  }

  // Baseline: y ~ a + b * h(x) with h the shared homogeneous tuning curve.
  auto with_constant = [](const Eigen::MatrixXd& h) {
    Eigen::MatrixXd a(h.rows(), 2);
    a.col(0).setOnes();
    a.col(1) = h.col(0);
    return a;
  };
  const Eigen::MatrixXd coeffs =
      pseudoinverse(with_constant(homogeneous_fit.h_train)).pinv * homogeneous_fit.y_train;
  report.baseline_nrmse =
      nrmse(homogeneous_fit.y_test, with_constant(homogeneous_fit.h_test) * coeffs);
  return report;
}

HeterogeneityReport heterogeneity_study(const ExperimentConfig& cfg, bool include_timing) {
  const auto start = Clock::now();
  HeterogeneityReport report = evaluate_heterogeneity(cfg);

  CsvTable table({"arm", "rank", "capacity", "condition_number", "train_nrmse", "test_nrmse"});
  for (const auto& a : report.arms) {
    table.add({a.arm, std::to_string(a.rank), std::to_string(a.capacity), fmt(a.condition_number),
               fmt(a.train_nrmse), fmt(a.test_nrmse)});
  }
  const std::string stem = "hetero_" + to_string(cfg.task.name);
  report.files.push_back({stem + ".csv", table.rows()});
  report.wall_clock_seconds = seconds_since(start);
  write_all(cfg.output_dir, {{stem + ".csv", table.text()},
                             {stem + ".json", dump(to_json(report, include_timing))}});
  return report;
}

// ---------------------------------------------------------------------------
// Bit depth

double BitDepthReport::real_test_nrmse() const {
  for (const auto& r : rows) {
    if (!r.bits) return r.test_nrmse;
  }
  throw InvalidParameter("bit-depth report has no real-weight row");
}

double BitDepthReport::test_nrmse(int bits) const {
  for (const auto& r : rows) {
    if (r.bits == bits) return r.test_nrmse;
  }
  throw InvalidParameter("bit-depth report has no row for " + std::to_string(bits) + " bits");
}

BitDepthReport evaluate_bitdepth(const ExperimentConfig& cfg, std::span<const int> bits_list) {
  if (bits_list.empty()) throw InvalidParameter("bit list is empty");
  for (int b : bits_list) {
    if (b < 1 || b > kMaxSplitterBits) throw InvalidParameter("bit widths must be in [1, 24]");
  }
  ExperimentConfig real_cfg = cfg;
  real_cfg.quant_bits.reset();
  const Fit fit = fit_task(real_cfg);

  BitDepthReport report;
  report.config = cfg;
  report.rows.push_back({std::nullopt, fit.trained.train_nrmse,
                         nrmse(fit.y_test, fit.h_test * fit.trained.weights)});
  for (int bits : bits_list) {
    Eigen::MatrixXd wq(fit.trained.weights.rows(), fit.trained.weights.cols());
    for (Eigen::Index k = 0; k < wq.cols(); ++k) {
      const Eigen::VectorXd col = fit.trained.weights.col(k);
      const auto q = quantize_vector(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), bits);
      for (Eigen::Index i = 0; i < wq.rows(); ++i) wq(i, k) = q.value(static_cast<std::size_t>(i));
    }
    report.rows.push_back({bits, nrmse(fit.y_train, fit.h_train * wq),
                           nrmse(fit.y_test, fit.h_test * wq)});
  }
  return report;
}

BitDepthReport bitdepth_sweep(const ExperimentConfig& cfg, std::span<const int> bits_list,
                              bool include_timing) {
  const auto start = Clock::now();
  BitDepthReport report = evaluate_bitdepth(cfg, bits_list);

  CsvTable table({"bits", "train_nrmse", "test_nrmse"});
  for (const auto& r : report.rows) {
    table.add({r.bits ? std::to_string(*r.bits) : std::string("real"), fmt(r.train_nrmse),
               fmt(r.test_nrmse)});
  }
  const std::string stem = "bits_" + to_string(cfg.task.name);
  report.files.push_back({stem + ".csv", table.rows()});
  report.wall_clock_seconds = seconds_since(start);
  write_all(cfg.output_dir, {{stem + ".csv", table.text()},
                             {stem + ".json", dump(to_json(report, include_timing))}});
  return report;
}

// ---------------------------------------------------------------------------
// Monte Carlo

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw InvalidParameter("cannot summarize an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  Summary s;
  const double n = static_cast<double>(sorted.size());
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / n);
  s.median = quantile(0.5);
  s.p95 = quantile(0.95);
  s.min = sorted.front();
  s.max = sorted.back();
  return s;
}

namespace {

ChipResult run_chip(const ExperimentConfig& cfg, int index) {
  ExperimentConfig chip = cfg;
  chip.seed = cfg.seed + static_cast<std::uint64_t>(index);
  const RegressionOutcome out = evaluate_regression(chip);
  return {chip.seed, out.train_nrmse, out.test_nrmse, out.capacity, out.rank, out.condition_number};
}

void check_chip_count(const ExperimentConfig& cfg, int n_chips) {
  if (n_chips < 1) throw InvalidParameter("n_chips must be at least 1");
  cfg.validate();
}

}  // namespace

std::vector<ChipResult> simulate_chips_serial(const ExperimentConfig& cfg, int n_chips) {
  check_chip_count(cfg, n_chips);
  std::vector<ChipResult> chips;
  chips.reserve(static_cast<std::size_t>(n_chips));
  for (int i = 0; i < n_chips; ++i) chips.push_back(run_chip(cfg, i));
  return chips;
}

std::vector<ChipResult> simulate_chips(const ExperimentConfig& cfg, int n_chips) {
  check_chip_count(cfg, n_chips);
  std::vector<ChipResult> chips(static_cast<std::size_t>(n_chips));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_chips));
  const int threads = worker_count();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < n_chips; ++i) {
    try {
      chips[static_cast<std::size_t>(i)] = run_chip(cfg, i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return chips;
}

MonteCarloReport evaluate_mismatch_mc(const ExperimentConfig& cfg, int n_chips) {
  MonteCarloReport report;
  report.config = cfg;
  report.n_chips = n_chips;
  report.chips = simulate_chips(cfg, n_chips);
  std::sort(report.chips.begin(), report.chips.end(),
            [](const ChipResult& a, const ChipResult& b) { return a.seed < b.seed; });
  std::vector<double> nrmses, capacities;
  for (const auto& c : report.chips) {
    nrmses.push_back(c.test_nrmse);
    capacities.push_back(static_cast<double>(c.capacity));
  }
  report.test_nrmse = summarize(nrmses);
  report.capacity = summarize(capacities);
  return report;
}

MonteCarloReport mismatch_mc(const ExperimentConfig& cfg, int n_chips, bool include_timing) {
  const auto start = Clock::now();
  MonteCarloReport report = evaluate_mismatch_mc(cfg, n_chips);

  CsvTable table({"seed", "train_nrmse", "test_nrmse", "capacity", "rank", "condition_number"});
  for (const auto& c : report.chips) {
    table.add({std::to_string(c.seed), fmt(c.train_nrmse), fmt(c.test_nrmse),
               std::to_string(c.capacity), std::to_string(c.rank), fmt(c.condition_number)});
  }
  const std::string stem = "mc_" + to_string(cfg.task.name);
  report.files.push_back({stem + ".csv", table.rows()});
  report.wall_clock_seconds = seconds_since(start);
  write_all(cfg.output_dir, {{stem + ".csv", table.text()},
                             {stem + ".json", dump(to_json(report, include_timing))}});
  return report;
}

}  // namespace tab
