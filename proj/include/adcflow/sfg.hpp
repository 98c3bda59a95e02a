#pragma once

#include <string>
#include <vector>

#include "adcflow/expr.hpp"
#include "adcflow/netlist.hpp"

namespace adcflow {

// Directed branch j -> k. The full gain is num / D_k when node k carries a
// driving-point admittance D_k, else just num. `gain` stores the full
// expression for derivation records and direct evaluation.
struct SfgBranch {
  int from = -1;
  int to = -1;
  ExprPtr num;
  ExprPtr gain;
};

// Signal-flow graph: one voltage node per non-ground circuit node plus one
// source node per current input. Branch gain from V_j to V_k is
// Y_jk(s) * Z_k(s) with Z_k the node's driving-point impedance.
struct Sfg {
  std::vector<std::string> node_names;
  std::vector<ExprPtr> node_admittance;  // D_k; null for source nodes
  std::vector<SfgBranch> branches;       // one per (from, to) pair
  int input_source = -1;                 // source node for .in
  int output_node = -1;                  // .out signal node

  int node_count() const { return static_cast<int>(node_names.size()); }
  int find_node(const std::string& name) const;

  // Builders (used by build_sfg and by tests constructing graphs by hand).
  int add_node(std::string name, ExprPtr admittance = nullptr);
  // Adds num/D_to to the branch from->to (gains between the same node pair
  // accumulate).
  void add_branch(int from, int to, ExprPtr num);
};

// DPI/SFG construction from a parsed netlist. Throws
// Error(SingularNode) for nodes with no incident admittance or without a
// passive path to ground.
Sfg build_sfg(const Netlist& netlist);

}  // namespace adcflow
