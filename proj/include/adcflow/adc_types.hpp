#pragma once

#include <string>
#include <vector>

namespace adcflow {

inline constexpr double kBoltzmann = 1.380649e-23;  // J/K

// System-level ADC target.
struct AdcSpec {
  int resolution_bits = 13;    // K, total effective bits
  double sample_rate = 40e6;   // Hz
  double full_scale = 2.0;     // V, peak-to-peak differential
  double supply = 3.3;         // V
  double temperature = 300.0;  // K
  double gamma_n = 0.45;       // thermal noise budget as fraction of q^2/12
  int head_cut_bits = 7;       // head ends once cumulative bits exceed this

  void validate() const;  // throws Error(InvalidSpec)
};

// One stage-resolution configuration m_1-m_2-...-m_M. stages[i] includes
// the redundant bit, so stage i resolves stages[i]-1 effective bits.
struct Candidate {
  std::vector<int> stages;
  int head_len = 0;  // stages explicitly optimized (first index where the
                     // cumulative effective bits exceed head_cut, or M)

  int total_stages() const { return static_cast<int>(stages.size()); }
  int effective_bits(int i) const { return stages[i] - 1; }

  // Cumulative effective bits resolved by stages [0, i).
  int bits_before(int i) const {
    int sum = 0;
    for (int j = 0; j < i; ++j) sum += stages[j] - 1;
    return sum;
  }

  // Hyphen-joined head resolutions with a trailing ellipsis for the
  // all-2 tail, e.g. "4-3-2-2-2...".
  std::string display() const;

  bool operator==(const Candidate& o) const { return stages == o.stages; }
};

// Per-stage MDAC block requirements, translated from the system spec.
struct MdacSpec {
  int stage_resolution = 2;      // m
  double closed_loop_gain = 2;   // 2^(m-1)
  int accuracy_bits = 2;         // r, residual resolution to settle to
  double settle_time = 0;        // s, half the sample period
  double sampling_cap = 0;       // F, input branch capacitor C_s
  double load_cap = 0;           // F, next stage's sampling capacitor
  double full_scale = 2.0;       // V
  double supply = 3.3;           // V
  double temperature = 300.0;    // K

  // Feedback capacitor for the 1 + C_s/C_f amplify-phase configuration.
  double feedback_cap() const {
    return sampling_cap / (closed_loop_gain - 1.0);
  }
};

}  // namespace adcflow
