// tab_sim: command-line harness for the TAB simulator.
//
//   tab_sim regress --task sin --neurons 34 --out results/
//   tab_sim hetero  --task sin
//   tab_sim bits    --task sin --bits 4,6,8,11,13,24
//   tab_sim mc      --task sin --sigma-vos 0.005 --chips 50
//
// Flags override values from --config. Exit status is 0 on success and 1 with
// a one-line diagnostic on stderr otherwise.

#include <iostream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"

#include "tab/config.hpp"
#include "tab/error.hpp"
#include "tab/experiments.hpp"

namespace {

struct CliOptions {
  std::optional<std::string> config;
  std::optional<std::string> task;
  std::optional<int> neurons;
  std::optional<std::string> bits;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> sigma_vos;
  std::optional<std::string> offset_span;
  int chips = 20;
  bool timing = false;
};

std::vector<double> parse_doubles(std::string_view text, const char* flag) {
  std::vector<double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string token(text.substr(0, comma));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != token.size()) {
      throw tab::InvalidParameter(std::string("cannot parse '") + token + "' in " + flag);
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<int> parse_ints(std::string_view text, const char* flag) {
  std::vector<int> out;
  for (double v : parse_doubles(text, flag)) {
    if (v != static_cast<int>(v)) throw tab::InvalidParameter(std::string(flag) + " expects integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

void add_common(CLI::App& cmd, CliOptions& o) {
  cmd.add_option("--config", o.config, "JSON config file");
  cmd.add_option("--task", o.task, "sin | cube | sinc");
  cmd.add_option("--neurons", o.neurons, "hidden neuron count L");
  cmd.add_option("--bits", o.bits, "splitter bits (a list for 'bits')");
  cmd.add_option("--seed", o.seed, "population seed");
  cmd.add_option("--out", o.out, "output directory");
  cmd.add_option("--sigma-vos", o.sigma_vos, "offset-voltage mismatch sigma, volts");
  cmd.add_option("--offset-span", o.offset_span, "uniform V_ref span 'lo,hi' in volts");
  cmd.add_flag("--timing", o.timing, "include wall-clock seconds in the JSON report");
}

tab::ExperimentConfig resolve(const CliOptions& o, bool bits_is_list) {
  tab::ExperimentConfig cfg;
  if (o.config) cfg = tab::load_config(*o.config);
  if (o.task) cfg.task.name = tab::parse_task(*o.task);
  if (o.neurons) cfg.L = *o.neurons;
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.output_dir = *o.out;
  if (o.sigma_vos) cfg.mismatch.sigma_vos = *o.sigma_vos;
  if (o.offset_span) {
    const auto span = parse_doubles(*o.offset_span, "--offset-span");
    if (span.size() != 2) throw tab::InvalidParameter("--offset-span expects lo,hi");
    cfg.offsets = tab::UniformSpan{span[0], span[1]};
  }
  if (o.bits && !bits_is_list) {
    const auto b = parse_ints(*o.bits, "--bits");
    if (b.size() != 1) throw tab::InvalidParameter("--bits expects a single width here");
    cfg.quant_bits = b[0];
  }
  cfg.validate();
  return cfg;
}

void print_files(const tab::ExperimentConfig& cfg, const std::vector<tab::ReportFile>& files) {
  for (const auto& f : files) {
    std::cout << "  wrote " << (cfg.output_dir / f.path).string() << " (" << f.rows << " rows)\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trainable Analogue Block simulator"};
  app.require_subcommand(1);

  CliOptions regress_opts, hetero_opts, bits_opts, mc_opts;
  auto* regress = app.add_subcommand("regress", "train and evaluate one regression task");
  auto* hetero = app.add_subcommand("hetero", "compare homogeneous, mismatch-only and offset populations");
  auto* bits = app.add_subcommand("bits", "sweep output-weight bit depth");
  auto* mc = app.add_subcommand("mc", "mismatch Monte Carlo across simulated chips");
  add_common(*regress, regress_opts);
  add_common(*hetero, hetero_opts);
  add_common(*bits, bits_opts);
  add_common(*mc, mc_opts);
  mc->add_option("--chips", mc_opts.chips, "number of simulated chips")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (regress->parsed()) {
      const auto cfg = resolve(regress_opts, false);
      const auto r = tab::run_regression(cfg, regress_opts.timing);
      std::cout << "regress " << tab::to_string(cfg.task.name) << ": L=" << cfg.L
                << " train_nrmse=" << r.train_nrmse << " test_nrmse=" << r.test_nrmse
                << " rank=" << r.rank << " (" << r.wall_clock_seconds << " s)\n";
      print_files(cfg, r.files);
    } else if (hetero->parsed()) {
      const auto cfg = resolve(hetero_opts, false);
      const auto r = tab::heterogeneity_study(cfg, hetero_opts.timing);
      for (const auto& a : r.arms) {
        std::cout << a.arm << ": rank=" << a.rank << " capacity=" << a.capacity
                  << " test_nrmse=" << a.test_nrmse << "\n";
      }
      std::cout << "baseline (constant + one sigmoid): " << r.baseline_nrmse << " ("
                << r.wall_clock_seconds << " s)\n";
      print_files(cfg, r.files);
    } else if (bits->parsed()) {
      const auto cfg = resolve(bits_opts, true);
      const std::vector<int> widths =
          bits_opts.bits ? parse_ints(*bits_opts.bits, "--bits")
                         : std::vector<int>{1, 2, 4, 6, 8, 10, 11, 12, 13, 16, 24};
      const auto r = tab::bitdepth_sweep(cfg, widths, bits_opts.timing);
      for (const auto& row : r.rows) {
        std::cout << (row.bits ? std::to_string(*row.bits) : std::string("real"))
                  << ": test_nrmse=" << row.test_nrmse << "\n";
      }
      print_files(cfg, r.files);
    } else if (mc->parsed()) {
      const auto cfg = resolve(mc_opts, false);
      const auto r = tab::mismatch_mc(cfg, mc_opts.chips, mc_opts.timing);
      std::cout << "mc " << tab::to_string(cfg.task.name) << ": chips=" << r.n_chips
                << " nrmse median=" << r.test_nrmse.median << " p95=" << r.test_nrmse.p95
                << " mean=" << r.test_nrmse.mean << " (" << r.wall_clock_seconds << " s)\n";
      print_files(cfg, r.files);
    }
  } catch (const std::exception& e) {
    std::cerr << "tab_sim: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
