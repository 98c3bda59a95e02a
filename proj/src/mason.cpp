#include "adcflow/mason.hpp"

#include <algorithm>

#include "adcflow/error.hpp"

namespace adcflow {

namespace {

constexpr std::size_t kComboBudget = 200000;
constexpr std::size_t kPathBudget = 100000;

struct Edge {
  int to;
  const SfgBranch* branch;
};

using Adjacency = std::vector<std::vector<Edge>>;

Adjacency adjacency(const Sfg& sfg) {
  Adjacency adj(sfg.node_count());
  for (const auto& b : sfg.branches) adj[b.from].push_back({b.to, &b});
  return adj;
}

void find_paths(const Adjacency& adj, int node, int sink, std::uint32_t mask,
                std::vector<const SfgBranch*>& stack,
                std::vector<std::vector<const SfgBranch*>>& out) {
  if (node == sink) {
    out.push_back(stack);
    if (out.size() > kPathBudget)
      throw Error(ErrorKind::CapacityExceeded, "forward path budget exceeded");
    return;
  }
  for (const auto& e : adj[node]) {
    if (mask & (1u << e.to)) continue;
    stack.push_back(e.branch);
    find_paths(adj, e.to, sink, mask | (1u << e.to), stack, out);
    stack.pop_back();
  }
}

// Simple cycles, each reported once with its smallest node first.
void find_loops(const Adjacency& adj, int start, int node, std::uint32_t mask,
                std::vector<const SfgBranch*>& stack,
                std::vector<std::vector<const SfgBranch*>>& out) {
  for (const auto& e : adj[node]) {
    if (e.to == start) {
      stack.push_back(e.branch);
      out.push_back(stack);
      stack.pop_back();
      if (out.size() > kPathBudget)
        throw Error(ErrorKind::CapacityExceeded, "loop budget exceeded");
      continue;
    }
    if (e.to < start || (mask & (1u << e.to))) continue;
    stack.push_back(e.branch);
    find_loops(adj, start, e.to, mask | (1u << e.to), stack, out);
    stack.pop_back();
  }
}

// All sets of pairwise non-touching loops drawn from `allowed`.
void find_combos(const std::vector<Loop>& loops,
                 const std::vector<int>& allowed, std::size_t from,
                 std::uint32_t used, std::vector<int>& picked,
                 std::vector<LoopCombo>& out) {
  LoopCombo combo;
  combo.loops = picked;
  combo.sign = (picked.size() % 2 == 0) ? 1 : -1;
  combo.mask = used;
  out.push_back(std::move(combo));
  if (out.size() > kComboBudget)
    throw Error(ErrorKind::CapacityExceeded,
                "non-touching loop combination budget exceeded");
  for (std::size_t i = from; i < allowed.size(); ++i) {
    int li = allowed[i];
    if (loops[li].mask & used) continue;
    picked.push_back(li);
    find_combos(loops, allowed, i + 1, used | loops[li].mask, picked, out);
    picked.pop_back();
  }
}

ExprPtr product_of_admittances(const Sfg& sfg, std::uint32_t exclude_mask) {
  ExprPtr prod = Expr::constant(1.0);
  for (int k = 0; k < sfg.node_count(); ++k) {
    if (!sfg.node_admittance[k]) continue;
    if (exclude_mask & (1u << k)) continue;
    prod = prod * sfg.node_admittance[k];
  }
  return prod;
}

ExprPtr combo_num(const std::vector<Loop>& loops, const LoopCombo& combo) {
  ExprPtr prod = Expr::constant(1.0);
  for (int li : combo.loops) prod = prod * loops[li].num;
  return prod;
}

ExprPtr combo_gain(const std::vector<Loop>& loops, const LoopCombo& combo) {
  ExprPtr prod = Expr::constant(1.0);
  for (int li : combo.loops) prod = prod * loops[li].gain;
  return prod;
}

}  // namespace

ExprPtr DerivationRecord::delta() const {
  ExprPtr sum = Expr::constant(0.0);
  for (const auto& combo : delta_combos) {
    ExprPtr term = combo_gain(loops, combo);
    sum = combo.sign > 0 ? sum + term : sum - term;
  }
  return sum;
}

ExprPtr DerivationRecord::cofactor(std::size_t path_index) const {
  ExprPtr sum = Expr::constant(0.0);
  for (const auto& combo : cofactor_combos.at(path_index)) {
    ExprPtr term = combo_gain(loops, combo);
    sum = combo.sign > 0 ? sum + term : sum - term;
  }
  return sum;
}

SymbolicTf mason_transfer(const Sfg& sfg, int source, int sink) {
  if (sfg.node_count() > kMasonNodeBudget)
    throw Error(ErrorKind::CapacityExceeded,
                "SFG has " + std::to_string(sfg.node_count()) +
                    " nodes, budget is " + std::to_string(kMasonNodeBudget));
  if (source < 0 || source >= sfg.node_count() || sink < 0 ||
      sink >= sfg.node_count())
    throw Error(ErrorKind::InvalidSpec, "mason source/sink out of range");

  const auto adj = adjacency(sfg);
  SymbolicTf tf;
  tf.source = source;
  tf.sink = sink;

  // Loops.
  {
    std::vector<std::vector<const SfgBranch*>> raw;
    std::vector<const SfgBranch*> stack;
    for (int v = 0; v < sfg.node_count(); ++v)
      find_loops(adj, v, v, 1u << v, stack, raw);
    for (const auto& branches : raw) {
      Loop loop;
      ExprPtr gain = Expr::constant(1.0);
      ExprPtr num = Expr::constant(1.0);
      for (const auto* b : branches) {
        loop.nodes.push_back(b->from);
        loop.mask |= 1u << b->from;
        gain = gain * b->gain;
        num = num * b->num;
      }
      loop.gain = gain;
      loop.num = num;
      tf.record.loops.push_back(std::move(loop));
    }
  }

  // Forward paths.
  {
    std::vector<std::vector<const SfgBranch*>> raw;
    std::vector<const SfgBranch*> stack;
    find_paths(adj, source, sink, 1u << source, stack, raw);
    for (const auto& branches : raw) {
      ForwardPath path;
      path.nodes.push_back(source);
      path.mask = 1u << source;
      ExprPtr gain = Expr::constant(1.0);
      ExprPtr num = Expr::constant(1.0);
      for (const auto* b : branches) {
        path.nodes.push_back(b->to);
        path.mask |= 1u << b->to;
        gain = gain * b->gain;
        num = num * b->num;
      }
      path.gain = gain;
      path.num = num;
      tf.record.paths.push_back(std::move(path));
    }
  }

  // Delta combinations, then per-path cofactor combinations.
  {
    std::vector<int> all(tf.record.loops.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    std::vector<int> picked;
    find_combos(tf.record.loops, all, 0, 0, picked, tf.record.delta_combos);
    for (const auto& path : tf.record.paths) {
      std::vector<int> allowed;
      for (std::size_t i = 0; i < tf.record.loops.size(); ++i)
        if (!(tf.record.loops[i].mask & path.mask))
          allowed.push_back(static_cast<int>(i));
      std::vector<LoopCombo> combos;
      picked.clear();
      find_combos(tf.record.loops, allowed, 0, 0, picked, combos);
      tf.record.cofactor_combos.push_back(std::move(combos));
    }
  }

  tf.scale = product_of_admittances(sfg, 0);

  // Scaled denominator: Delta * scale.
  {
    ExprPtr den = Expr::constant(0.0);
    for (const auto& combo : tf.record.delta_combos) {
      ExprPtr term = combo_num(tf.record.loops, combo) *
                     product_of_admittances(sfg, combo.mask);
      den = combo.sign > 0 ? den + term : den - term;
    }
    tf.denominator = den;
  }

  // Scaled numerator: sum_k P_k Delta_k * scale.
  {
    ExprPtr num = Expr::constant(0.0);
    for (std::size_t pi = 0; pi < tf.record.paths.size(); ++pi) {
      const auto& path = tf.record.paths[pi];
      // Branches consume the admittance of every node they enter; the
      // source node is never entered, so its D stays in the leftover.
      std::uint32_t entered = path.mask & ~(1u << source);
      for (const auto& combo : tf.record.cofactor_combos[pi]) {
        ExprPtr term = path.num * combo_num(tf.record.loops, combo) *
                       product_of_admittances(sfg, combo.mask | entered);
        num = combo.sign > 0 ? num + term : num - term;
      }
    }
    tf.numerator = num;
  }

  return tf;
}

SymbolicTf mason_transfer(const Sfg& sfg) {
  if (sfg.input_source < 0 || sfg.output_node < 0)
    throw Error(ErrorKind::InvalidSpec,
                "sfg carries no input/output directives");
  return mason_transfer(sfg, sfg.input_source, sfg.output_node);
}

}  // namespace adcflow
