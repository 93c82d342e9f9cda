// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Usage: acceptance [path/to/tab_sim]   (the CLI is used for the determinism run)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tab/device_model.hpp"
#include "tab/experiments.hpp"
#include "tab/learning.hpp"
#include "tab/weight_splitter.hpp"

namespace fs = std::filesystem;
using namespace tab;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d %-28s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds(const std::function<void()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  body();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

NeuronParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ib(0.1e-9, 10e-9), n(1.1, 1.5), vref(0.0, 1.2),
      vos(-0.02, 0.02), g(0.9, 1.1);
  return {ib(rng), n(rng), vref(rng), vos(rng), g(rng)};
}

Eigen::MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = z(rng);
  return m;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

ExperimentConfig ideal_config(TaskKind task, int neurons) {
  ExperimentConfig cfg;
  cfg.task.name = task;
  cfg.L = neurons;
  cfg.mismatch = MismatchSpec::ideal();
  cfg.offsets = UniformSpan{0.0, 1.2};
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 1. I_1 + I_2 = I_b
void current_conservation() {
  double worst = 0.0;
  const double t = seconds([&] {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> dv(-10.0, 10.0);
    for (int i = 0; i < 10000; ++i) {
      const NeuronParams p = random_params(rng);
      const auto c = diff_pair_currents(p.v_ref + dv(rng), p);
      worst = std::max(worst, std::abs(c.i1 + c.i2 - p.bias_current) / p.bias_current);
    }
  });
  report(1, "current conservation", worst <= 1e-12 && t < 1.0,
         fmt("max rel err %.3g (<= 1e-12), %.3f s (< 1 s)", worst, t));
}

// 2. dI_1/dV at V_ref = I_b / (4 n U_T)
void tanh_slope() {
  std::mt19937_64 rng(2);
  const PhysicalConstants c;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const NeuronParams p = random_params(rng);
    const double v0 = p.v_ref - p.offset_voltage, h = 1e-6;
    const double fd = (diff_pair_currents(v0 + h, p, c).i1 - diff_pair_currents(v0 - h, p, c).i1) / (2 * h);
    const double analytic = p.bias_current / (4 * p.slope_factor * c.thermal_voltage);
    worst = std::max(worst, std::abs(fd - analytic) / analytic);
  }
  report(2, "tanh slope", worst <= 1e-3, fmt("max rel dev %.3g over 100 sets (<= 1e-3)", worst));
}

// 3. Four Penrose conditions
void penrose_suite() {
  double worst = 0.0;
  int deficient = 0;
  const double t = seconds([&] {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> rows_d(2, 100), cols_d(2, 60);
    for (int k = 0; k < 200; ++k) {
      Eigen::Index rows = rows_d(rng), cols = cols_d(rng);
      if (k == 0) rows = cols = 2;
      if (k == 1) rows = 100, cols = 60;
      Eigen::MatrixXd h;
      if (k % 4 == 3) {
        const Eigen::Index r = std::max<Eigen::Index>(1, std::min(rows, cols) / 3);
        h = gaussian(rng, rows, r) * gaussian(rng, r, cols);
        ++deficient;
      } else {
        h = gaussian(rng, rows, cols);
      }
      const Eigen::MatrixXd p = pseudoinverse(h).pinv;
      const Eigen::MatrixXd hp = h * p, ph = p * h;
      worst = std::max({worst, max_abs(h * p * h - h), max_abs(p * h * p - p),
                        max_abs(hp - hp.transpose()), max_abs(ph - ph.transpose())});
    }
  });
  report(3, "Penrose conditions", worst <= 1e-8 && t < 30.0,
         fmt("200 matrices (%d rank-deficient), max residual %.3g (<= 1e-8), %.2f s (< 30 s)", deficient,
             worst, t));
}

// 4. SVD route vs (H^T H)^{-1} H^T Y
void oracle_equivalence() {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> cols_d(2, 40);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Eigen::Index cols = cols_d(rng), rows = cols + 10 + cols_d(rng);
    const Eigen::MatrixXd h = gaussian(rng, rows, cols);
    const Eigen::MatrixXd y = gaussian(rng, rows, 2);
    const Eigen::MatrixXd w_svd = train(h, y).weights;
    const Eigen::MatrixXd w_ne = (h.transpose() * h).ldlt().solve(h.transpose() * y);
    worst = std::max(worst, max_abs(w_svd - w_ne) / max_abs(w_ne));
  }
  report(4, "oracle equivalence", worst <= 1e-8, fmt("max rel diff %.3g over 50 systems (<= 1e-8)", worst));
}

// 5. sin / cube / sinc at desk scale
void regression_tasks() {
  double sin34 = 0, cube34 = 0, sinc34 = 0, sinc200 = 0;
  const double t = seconds([&] {
    sin34 = evaluate_regression(ideal_config(TaskKind::sin, 34)).test_nrmse;
    cube34 = evaluate_regression(ideal_config(TaskKind::cube, 34)).test_nrmse;
    sinc34 = evaluate_regression(ideal_config(TaskKind::sinc, 34)).test_nrmse;
    sinc200 = evaluate_regression(ideal_config(TaskKind::sinc, 200)).test_nrmse;
  });
  const bool pass = sin34 < 0.02 && cube34 < 0.02 && sinc34 >= 2 * sinc200 && t < 10.0;
  report(5, "regression tasks (L=34)", pass,
         fmt("sin %.3g, cube %.3g (< 0.02); sinc L34/L200 = %.3g/%.3g = %.1fx (>= 2x); %.2f s (< 10 s)", sin34,
             cube34, sinc34, sinc200, sinc34 / sinc200, t));
}

// 6. 11 bits per weight suffice
void eleven_bits() {
  const std::vector<int> bits{6, 11, 13};
  const auto r = evaluate_bitdepth(ideal_config(TaskKind::sin, 34), bits);
  const double real = r.real_test_nrmse(), b6 = r.test_nrmse(6), b11 = r.test_nrmse(11), b13 = r.test_nrmse(13);
  const bool pass = b11 <= 1.2 * b13 && b13 <= 1.2 * real && b6 >= 2 * b11;
  report(6, "11-bit weights", pass,
         fmt("real %.4g, 13b %.4g, 11b %.4g, 6b %.4g; 11/13 = %.3f (<= 1.2), 13/real = %.3f (<= 1.2), "
             "6/11 = %.1f (>= 2)",
             real, b13, b11, b6, b11 / b13, b13 / real, b6 / b11));
}

// 7. Heterogeneity
void heterogeneity() {
  auto cfg = ideal_config(TaskKind::sin, 34);
  cfg.mismatch = MismatchSpec{};  // drives the mismatch-only arm
  const auto r = evaluate_heterogeneity(cfg);
  const auto& homo = r.arm("homogeneous");
  const auto& uni = r.arm("uniform_span");
  const bool pass = homo.rank == 1 && homo.capacity <= 1 && uni.rank >= 30 && uni.test_nrmse * 10 <= homo.test_nrmse;
  report(7, "heterogeneity", pass,
         fmt("homogeneous rank %ld cap %ld nrmse %.3g; uniform rank %ld (>= 30) nrmse %.3g; ratio %.0fx (>= 10x)",
             static_cast<long>(homo.rank), static_cast<long>(homo.capacity), homo.test_nrmse,
             static_cast<long>(uni.rank), uni.test_nrmse, homo.test_nrmse / uni.test_nrmse));
}

// 8. H H^+ = I when the rows are independent
void capacity_law() {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> c_d(2, 60), extra_d(0, 40);
  int exact = 0;
  for (int k = 0; k < 50; ++k) {
    const Eigen::Index c = c_d(rng), l = c + (k % 5 == 0 ? 0 : extra_d(rng));
    const Eigen::MatrixXd h = gaussian(rng, c, l);
    if (encoding_capacity(h, 1e-6).capacity == c) ++exact;
  }
  report(8, "capacity law", exact == 50, fmt("%d/50 constructions returned capacity C", exact));
}

// 9. mc twice -> identical bytes
void determinism(const char* cli) {
  const fs::path base = fs::temp_directory_path() / "tab_acceptance_determinism";
  fs::remove_all(base);
  const fs::path a = base / "a", b = base / "b";
  bool ran = true;
  if (cli != nullptr) {
    for (const auto& dir : {a, b}) {
      const std::string cmd = std::string("\"") + cli + "\" mc --task sin --neurons 34 --seed 42 --chips 8 --out \"" +
                              dir.string() + "\" > /dev/null";
      ran = ran && std::system(cmd.c_str()) == 0;
    }
  } else {
    ExperimentConfig cfg;
    cfg.seed = 42;
    cfg.output_dir = a;
    mismatch_mc(cfg, 8);
    cfg.output_dir = b;
    mismatch_mc(cfg, 8);
  }
  const std::string csv_a = slurp(a / "mc_sin.csv"), csv_b = slurp(b / "mc_sin.csv");
  const std::string json_a = slurp(a / "mc_sin.json"), json_b = slurp(b / "mc_sin.json");
  const bool pass = ran && !csv_a.empty() && !json_a.empty() && csv_a == csv_b && json_a == json_b;
  report(9, "determinism", pass,
         fmt("%s: csv %zu bytes %s, json %zu bytes %s", cli ? "tab_sim mc x2" : "mismatch_mc x2", csv_a.size(),
             csv_a == csv_b ? "identical" : "DIFFER", json_a.size(), json_a == json_b ? "identical" : "DIFFER"));
  fs::remove_all(base);
}

// 10. dequantize(quantize(w)) at N = 8
void quantizer_round_trip() {
  const int n = 8;
  int dyadic_ok = 0;
  for (int m = 0; m < 256; ++m) {
    const double w = std::ldexp(static_cast<double>(m), -n);
    if (dequantize(quantize(w, n)) == w && dequantize(quantize(-w, n)) == -w) ++dyadic_ok;
  }
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double bound = std::ldexp(1.0, -9);
  int over = 0, over_outside_clamp = 0;
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double w = u(rng);
    const double err = std::abs(dequantize(quantize(w, n)) - w);
    worst = std::max(worst, err);
    if (err > bound) {
      ++over;
      if (std::abs(w) <= 1.0 - bound) ++over_outside_clamp;
    }
  }
  report(10, "quantizer round trip", dyadic_ok == 256 && over == 0,
         fmt("dyadics %d/256 exact; random reals in [-1,1]: %d/10000 exceed 2^-9 (max err %.3g), "
             "%d of them outside the clamp band |w| > 1 - 2^-9",
             dyadic_ok, over, worst, over_outside_clamp));
}

}  // namespace

int main(int argc, char** argv) {
  const char* cli = argc > 1 ? argv[1] : nullptr;
  current_conservation();
  tanh_slope();
  penrose_suite();
  oracle_equivalence();
  regression_tasks();
  eleven_bits();
  heterogeneity();
  capacity_law();
  determinism(cli);
  quantizer_round_trip();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
