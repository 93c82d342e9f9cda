#pragma once

// N-bit binary current splitter (R2R ladder) driving one output weight.
// Stage k (k = 1 is the MSB) carries I_in / 2^k; its switch sends that current
// either to the summing node (I_good) or to ground (I_dump). The terminating
// stage carries the same current as stage N and is always dumped.
//
// Negative weights are modelled as a sign bit that steers I_good to an
// inhibitory (subtracting) summing node.

#include <cstdint>
#include <span>
#include <vector>

namespace tab {

inline constexpr int kDefaultSplitterBits = 13;
inline constexpr int kMaxSplitterBits = 24;

struct SplitterCode {
  std::uint32_t bits = 0;
  int width = kDefaultSplitterBits;

  void validate() const;
  static std::uint32_t max_code(int width) { return (std::uint32_t{1} << width) - 1; }
};

struct QuantizedWeight {
  int sign = 1;  // +1 or -1
  SplitterCode code;
};

/// Quantized weights sharing one analogue gain `scale`.
struct QuantizedWeightVector {
  std::vector<QuantizedWeight> weights;
  double scale = 1.0;

  std::size_t size() const { return weights.size(); }
  /// scale * sign * fraction for weight i.
  double value(std::size_t i) const;
  std::vector<double> values() const;
};

struct SplitCurrents {
  double good;
  double dump;
};

double splitter_fraction(const SplitterCode& code);

SplitCurrents route_current(double i_in, const SplitterCode& code);

/// Rounds |w| * 2^N half-away-from-zero, clamped to the largest code.
/// Requires |w| <= 1.
QuantizedWeight quantize(double w, int width = kDefaultSplitterBits);

double dequantize(const QuantizedWeight& q);

/// Normalizes by max|w| and quantizes each entry. An all-zero input gives
/// zero codes with scale 1.
QuantizedWeightVector quantize_vector(std::span<const double> w, int width);

}  // namespace tab
