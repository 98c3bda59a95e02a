#pragma once

#include <cstdint>
#include <string>

#include "adcflow/adc_types.hpp"
#include "adcflow/device.hpp"
#include "adcflow/pipeline.hpp"
#include "adcflow/synth.hpp"

namespace adcflow {

// Whole-run configuration. The file form is a flat key=value text with
// [sections]; a provided file must carry every key (no partial merge) and
// unknown keys are rejected, so configs stay diffable and reviewable.
struct RunConfig {
  AdcSpec adc;
  DeviceModel device;
  SynthOptions synth;  // includes EvalOptions
  PowerModel power;
  int rank_bits_from = 10;
  int rank_bits_to = 13;
  std::string output_dir = "out";
  std::string cache_path = "adcflow_cache.txt";
  int jobs = 1;
  double tf_f_lo = 1.0;    // Hz, margins range for the tf subcommand
  double tf_f_hi = 1e12;   // Hz

  static RunConfig defaults();
  static RunConfig parse(const std::string& text);
  static RunConfig from_file(const std::string& path);

  std::string serialize() const;   // canonical form, round-trips via parse
  std::uint64_t hash() const;      // over the canonical form

  void validate() const;
};

}  // namespace adcflow
