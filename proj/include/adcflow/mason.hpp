#pragma once

#include <cstdint>
#include <vector>

#include "adcflow/expr.hpp"
#include "adcflow/sfg.hpp"

namespace adcflow {

struct ForwardPath {
  std::vector<int> nodes;  // source ... sink
  ExprPtr gain;            // product of full branch gains
  ExprPtr num;             // product of branch numerators
  std::uint32_t mask = 0;  // visited-node bitmask
};

struct Loop {
  std::vector<int> nodes;  // cycle, first node repeated implicitly
  ExprPtr gain;
  ExprPtr num;
  std::uint32_t mask = 0;
};

// One product of pairwise non-touching loops; sign = (-1)^(#loops).
struct LoopCombo {
  std::vector<int> loops;
  int sign = 1;
  std::uint32_t mask = 0;
};

struct DerivationRecord {
  std::vector<ForwardPath> paths;
  std::vector<Loop> loops;
  std::vector<LoopCombo> delta_combos;  // includes the empty combo
  std::vector<std::vector<LoopCombo>> cofactor_combos;  // per path

  // Delta / cofactor as expression trees over the full branch gains
  // (1 - sum L_i + sum pairs - ...).
  ExprPtr delta() const;
  ExprPtr cofactor(std::size_t path_index) const;
};

// Mason's rule output. numerator/denominator are division-free trees
// scaled by the product of all node admittances (`scale`), so that
// numerator/denominator == (sum_k P_k Delta_k) / Delta exactly.
struct SymbolicTf {
  ExprPtr numerator;
  ExprPtr denominator;
  ExprPtr scale;
  DerivationRecord record;
  int source = -1;
  int sink = -1;
};

inline constexpr int kMasonNodeBudget = 12;

// Enumerates all simple forward paths and loops and assembles H via
// Mason's gain formula. Throws Error(CapacityExceeded) past the node
// budget; an unreachable sink yields a zero transfer function.
SymbolicTf mason_transfer(const Sfg& sfg, int source, int sink);

// Uses the netlist directives recorded in the Sfg.
SymbolicTf mason_transfer(const Sfg& sfg);

}  // namespace adcflow
