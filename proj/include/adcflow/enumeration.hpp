#pragma once

#include <vector>

#include "adcflow/adc_types.hpp"

namespace adcflow {

// All legal stage-resolution configurations for spec.resolution_bits.
//
// A configuration is a non-increasing sequence over {2,3,4} whose
// effective bits sum to K. Stages may carry more than 2 bits only while
// the cumulative output resolution (including the stage itself) is still
// below head_cut_bits; past that point every stage is a 2-bit stage.
// Returned in lexicographically ascending stage order ("2-2-..." first,
// "4-4-..." last); each configuration appears exactly once.
std::vector<Candidate> enumerate_candidates(const AdcSpec& spec);

// Rebuilds a candidate from a head prefix such as "4-3-2": the prefix is
// extended with 2-bit stages until the effective bits reach K. Throws
// Error(InvalidSpec) when the prefix cannot start a legal candidate.
Candidate candidate_from_prefix(const std::vector<int>& prefix,
                                const AdcSpec& spec);

// Block specs for the synthesized (head) stages of a candidate, in stage
// order. The pipeline's final stage is a bare sub-ADC with no residue
// amplifier, so when the head covers the whole pipeline the last stage
// gets no MdacSpec; accuracy therefore always satisfies r >= 2.
// Sampling caps come from noise_and_caps, floored at cap_floor times the
// stage's unit-capacitor count 2^(m-1) (late stages under-demand noise
// caps; matching sets a physical minimum per array unit);
// stage i loads stage i+1's sampling cap and the last head stage loads
// the cfg-provided tail_load_cap.
std::vector<MdacSpec> derive_mdac_specs(const Candidate& candidate,
                                        const AdcSpec& spec,
                                        double tail_load_cap,
                                        double cap_floor);

// A deduplicated MDAC spec plus the (candidate index, stage index) sites
// that use it. Dedup key is (m, r); caps are taken from the first user in
// enumeration order and recomputed per use site by derive_mdac_specs.
struct UniqueMdac {
  MdacSpec spec;
  std::vector<std::pair<int, int>> users;  // (candidate idx, stage idx)
};

std::vector<UniqueMdac> collect_unique_mdacs(
    const std::vector<Candidate>& candidates, const AdcSpec& spec,
    double tail_load_cap, double cap_floor);

}  // namespace adcflow
