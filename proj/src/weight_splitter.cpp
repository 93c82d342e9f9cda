#include "tab/weight_splitter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tab/error.hpp"

namespace tab {

void SplitterCode::validate() const {
  if (width < 1 || width > kMaxSplitterBits) {
    throw InvalidParameter("splitter width must be in [1, 24], got " + std::to_string(width));
  }
  if (bits > max_code(width)) {
    throw InvalidParameter("splitter code " + std::to_string(bits) + " exceeds " +
                           std::to_string(width) + " bits");
  }
}

double splitter_fraction(const SplitterCode& code) {
  code.validate();
  // Sum of b_k 2^-k over the stages; for N <= 24 this is exact in double.
  double fraction = 0.0;
  for (int k = 1; k <= code.width; ++k) {
    if ((code.bits >> (code.width - k)) & 1U) fraction += std::ldexp(1.0, -k);
  }
  return fraction;
}

SplitCurrents route_current(double i_in, const SplitterCode& code) {
  if (!(i_in >= 0.0) || !std::isfinite(i_in)) {
    throw InvalidParameter("splitter input current must be finite and non-negative");
  }
  const double good_fraction = splitter_fraction(code);
  // Switched-off stages plus the terminating stage; 1 - fraction is exact.
  const double dump_fraction = 1.0 - good_fraction;
  return {i_in * good_fraction, i_in * dump_fraction};
}

QuantizedWeight quantize(double w, int width) {
  if (!std::isfinite(w) || std::abs(w) > 1.0) {
    throw InvalidParameter("weight must be in [-1, 1] before quantization");
  }
  QuantizedWeight q;
  q.sign = w < 0.0 ? -1 : 1;
  q.code.width = width;
  q.code.validate();
  const double scaled = std::round(std::ldexp(std::abs(w), width));
  q.code.bits = std::min(static_cast<std::uint32_t>(scaled), SplitterCode::max_code(width));
  return q;
}

double dequantize(const QuantizedWeight& q) {
  return q.sign * splitter_fraction(q.code);
}

double QuantizedWeightVector::value(std::size_t i) const {
  return scale * dequantize(weights.at(i));
}

std::vector<double> QuantizedWeightVector::values() const {
  std::vector<double> out(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) out[i] = value(i);
  return out;
}

QuantizedWeightVector quantize_vector(std::span<const double> w, int width) {
  double max_abs = 0.0;
  for (double v : w) {
    if (!std::isfinite(v)) throw InvalidParameter("cannot quantize non-finite weight");
    max_abs = std::max(max_abs, std::abs(v));
  }
  QuantizedWeightVector out;
  out.scale = max_abs > 0.0 ? max_abs : 1.0;
  out.weights.reserve(w.size());
  for (double v : w) {
    // v / max|w| can round a hair above 1 only when v == +-max|w|.
    out.weights.push_back(quantize(std::clamp(v / out.scale, -1.0, 1.0), width));
  }
  return out;
}

}  // namespace tab
