#include "tab/device_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "tab/error.hpp"

namespace tab {

namespace {

bool finite(double v) { return std::isfinite(v); }

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidParameter(what);
}

// Relative draws are applied as nominal * (1 + sigma * z) and kept above 1% of
// nominal so a wide sigma can never flip a current's sign.
double relative_draw(double nominal, double sigma, double z) {
  return nominal * std::max(1.0 + sigma * z, 0.01);
}

}  // namespace

void PhysicalConstants::validate() const {
  require(finite(thermal_voltage) && thermal_voltage > 0.0,
          "thermal voltage must be positive");
}

void NeuronParams::validate() const {
  require(finite(bias_current) && bias_current > 0.0,
          "bias current must be positive");
  require(finite(slope_factor) && slope_factor >= 1.0 && slope_factor <= 2.0,
          "slope factor must lie in [1, 2]");
  require(finite(v_ref), "reference voltage must be finite");
  require(finite(offset_voltage), "offset voltage must be finite");
  require(finite(mirror_gain) && mirror_gain > 0.0,
          "mirror gain must be positive");
}

bool MismatchSpec::is_ideal() const {
  return sigma_vos == 0.0 && sigma_ib_rel == 0.0 && sigma_mirror_rel == 0.0 &&
         sigma_n == 0.0;
}

void MismatchSpec::validate() const {
  for (double s : {sigma_vos, sigma_ib_rel, sigma_mirror_rel, sigma_n}) {
    require(finite(s) && s >= 0.0, "mismatch sigmas must be non-negative");
  }
}

void validate(const OffsetScheme& scheme) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, UniformSpan>) {
          require(finite(s.v_min) && finite(s.v_max) && s.v_min < s.v_max,
                  "uniform offset span requires v_min < v_max");
        } else if constexpr (std::is_same_v<T, ExplicitList>) {
          require(!s.values.empty(), "explicit offset list is empty");
          require(std::all_of(s.values.begin(), s.values.end(), finite),
                  "explicit offsets must be finite");
        } else {
          require(finite(s.v), "constant offset must be finite");
        }
      },
      scheme);
}

std::vector<double> offsets_for(const OffsetScheme& scheme, std::size_t count) {
  require(count >= 1, "population size must be at least 1");
  validate(scheme);
  std::vector<double> out(count);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, UniformSpan>) {
          if (count == 1) {
            out[0] = 0.5 * (s.v_min + s.v_max);
            return;
          }
          const double step = (s.v_max - s.v_min) / static_cast<double>(count - 1);
          for (std::size_t i = 0; i < count; ++i) {
            out[i] = s.v_min + step * static_cast<double>(i);
          }
          out.back() = s.v_max;
        } else if constexpr (std::is_same_v<T, ExplicitList>) {
          require(s.values.size() == count,
                  "explicit offset list has " + std::to_string(s.values.size()) +
                      " values for " + std::to_string(count) + " neurons");
          out = s.values;
        } else {
          std::fill(out.begin(), out.end(), s.v);
        }
      },
      scheme);
  return out;
}

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

BranchCurrents diff_pair_currents(double v_in, const NeuronParams& p,
                                  const PhysicalConstants& c) {
  p.validate();
  c.validate();
  require(finite(v_in), "input voltage must be finite");
  const double z = (v_in + p.offset_voltage - p.v_ref) / (p.slope_factor * c.thermal_voltage);
  return {p.bias_current * logistic(z), p.bias_current * logistic(-z)};
}

double neuron_response_unchecked(double v_in, const NeuronParams& p,
                                 const PhysicalConstants& c) {
  const double z = (v_in + p.offset_voltage - p.v_ref) / (p.slope_factor * c.thermal_voltage);
  return p.mirror_gain * p.bias_current * logistic(z);
}

double neuron_response(double v_in, const NeuronParams& p, const PhysicalConstants& c) {
  return p.mirror_gain * diff_pair_currents(v_in, p, c).i1;
}

std::vector<NeuronParams> sample_population(std::size_t count,
                                            const MismatchSpec& mismatch,
                                            const OffsetScheme& offsets,
                                            const NeuronParams& nominal,
                                            std::uint64_t seed) {
  require(count >= 1, "population size must be at least 1");
  mismatch.validate();
  nominal.validate();
  const std::vector<double> refs = offsets_for(offsets, count);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  std::vector<NeuronParams> population;
  population.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    // Four draws per neuron regardless of the sigmas, so the stream layout
    // does not change when one source is switched off.
    const double z_vos = unit(rng);
    const double z_ib = unit(rng);
    const double z_mirror = unit(rng);
    const double z_n = unit(rng);

    NeuronParams p = nominal;
    p.v_ref = refs[i];
    p.offset_voltage = nominal.offset_voltage + mismatch.sigma_vos * z_vos;
    p.bias_current = relative_draw(nominal.bias_current, mismatch.sigma_ib_rel, z_ib);
    p.mirror_gain = relative_draw(nominal.mirror_gain, mismatch.sigma_mirror_rel, z_mirror);
    p.slope_factor = std::clamp(nominal.slope_factor + mismatch.sigma_n * z_n, 1.0, 2.0);
    population.push_back(p);
  }
  return population;
}

TuningCurve tuning_curve(const NeuronParams& p, std::span<const double> v_grid,
                         const PhysicalConstants& c) {
  require(!v_grid.empty(), "voltage grid is empty");
  for (std::size_t i = 1; i < v_grid.size(); ++i) {
    require(v_grid[i] > v_grid[i - 1], "voltage grid must be strictly increasing");
  }
  TuningCurve curve;
  curve.v_grid.assign(v_grid.begin(), v_grid.end());
  curve.i_out.reserve(v_grid.size());
  for (double v : v_grid) curve.i_out.push_back(neuron_response(v, p, c));
  return curve;
}

}  // namespace tab
