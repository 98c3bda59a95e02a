#include "adcflow/sfg.hpp"

#include <algorithm>
#include <map>

#include "adcflow/error.hpp"

namespace adcflow {

int Sfg::find_node(const std::string& name) const {
  for (int i = 0; i < node_count(); ++i)
    if (node_names[i] == name) return i;
  return -1;
}

int Sfg::add_node(std::string name, ExprPtr admittance) {
  node_names.push_back(std::move(name));
  node_admittance.push_back(std::move(admittance));
  return node_count() - 1;
}

void Sfg::add_branch(int from, int to, ExprPtr num) {
  for (auto& b : branches) {
    if (b.from == from && b.to == to) {
      b.num = b.num + num;
      b.gain = node_admittance[to] ? b.num / node_admittance[to] : b.num;
      return;
    }
  }
  SfgBranch b;
  b.from = from;
  b.to = to;
  b.num = std::move(num);
  b.gain = node_admittance[to] ? b.num / node_admittance[to] : b.num;
  branches.push_back(std::move(b));
}

namespace {

// Admittance expression of a passive element.
ExprPtr resistor_admittance(const Resistor& r) {
  if (r.ohms.is_param()) return Expr::constant(1.0) / r.ohms.expr();
  return Expr::constant(1.0 / r.ohms.number);
}

ExprPtr capacitor_admittance(const Capacitor& c) {
  return Expr::freq() * c.farads.expr();
}

ExprPtr vccs_gm(const Vccs& g) { return g.siemens.expr(); }

}  // namespace

Sfg build_sfg(const Netlist& netlist) {
  Sfg sfg;
  const auto nodes = netlist.signal_nodes();
  std::map<std::string, int> index;
  for (const auto& n : nodes) index[n] = sfg.add_node(n);
  const int n_signal = sfg.node_count();

  auto idx = [&](const std::string& n) -> int {
    return n == "0" ? -1 : index.at(n);
  };

  // Driving-point admittances D_k (all other nodes grounded).
  std::vector<ExprPtr> D(n_signal, Expr::constant(0.0));
  std::vector<bool> touched(n_signal, false);
  auto stamp_passive_self = [&](int a, int b, const ExprPtr& y) {
    if (a == b) return;  // both ends on the same node: no current
    if (a >= 0) { D[a] = D[a] + y; touched[a] = true; }
    if (b >= 0) { D[b] = D[b] + y; touched[b] = true; }
  };
  for (const auto& r : netlist.resistors)
    stamp_passive_self(idx(r.n1), idx(r.n2), resistor_admittance(r));
  for (const auto& c : netlist.capacitors)
    stamp_passive_self(idx(c.n1), idx(c.n2), capacitor_admittance(c));
  for (const auto& g : netlist.vccs) {
    int op = idx(g.out_p), on = idx(g.out_n);
    int cp = idx(g.ctl_p), cn = idx(g.ctl_n);
    if (op == on) continue;  // degenerate output, no net current
    ExprPtr gm = vccs_gm(g);
    // Self terms: control and output sharing a node.
    auto self = [&](int out, double out_sign) {
      if (out < 0) return;
      double w = out_sign * ((out == cp ? 1.0 : 0.0) - (out == cn ? 1.0 : 0.0));
      if (w == 1.0) D[out] = D[out] + gm;
      else if (w == -1.0) D[out] = D[out] - gm;
      if (w != 0.0) touched[out] = true;
    };
    self(op, 1.0);
    self(on, -1.0);
  }
  for (int k = 0; k < n_signal; ++k) {
    if (!touched[k] || D[k]->is_zero())
      throw Error(ErrorKind::SingularNode,
                  "node '" + sfg.node_names[k] +
                      "' has no incident admittance (undefined DPI)");
    sfg.node_admittance[k] = D[k];
  }

  // Every node needs a passive path to ground or the nodal system is
  // singular even though each DPI exists.
  {
    std::vector<bool> reached(n_signal, false);
    std::vector<int> stack;
    auto reach = [&](int a) {
      if (a >= 0 && !reached[a]) { reached[a] = true; stack.push_back(a); }
    };
    auto touches_ground = [&](int a, int b) { return a < 0 || b < 0; };
    for (const auto& r : netlist.resistors)
      if (touches_ground(idx(r.n1), idx(r.n2)))
        reach(idx(r.n1)), reach(idx(r.n2));
    for (const auto& c : netlist.capacitors)
      if (touches_ground(idx(c.n1), idx(c.n2)))
        reach(idx(c.n1)), reach(idx(c.n2));
    while (!stack.empty()) {
      int k = stack.back();
      stack.pop_back();
      for (const auto& r : netlist.resistors) {
        int a = idx(r.n1), b = idx(r.n2);
        if (a == k) reach(b);
        if (b == k) reach(a);
      }
      for (const auto& c : netlist.capacitors) {
        int a = idx(c.n1), b = idx(c.n2);
        if (a == k) reach(b);
        if (b == k) reach(a);
      }
    }
    for (int k = 0; k < n_signal; ++k)
      if (!reached[k])
        throw Error(ErrorKind::SingularNode,
                    "node '" + sfg.node_names[k] +
                        "' has no passive path to ground");
  }

  // Coupling branches j -> k carry -Y_kj / D_k.
  auto couple_passive = [&](int a, int b, const ExprPtr& y) {
    if (a < 0 || b < 0 || a == b) return;
    sfg.add_branch(a, b, y);
    sfg.add_branch(b, a, y);
  };
  for (const auto& r : netlist.resistors)
    couple_passive(idx(r.n1), idx(r.n2), resistor_admittance(r));
  for (const auto& c : netlist.capacitors)
    couple_passive(idx(c.n1), idx(c.n2), capacitor_admittance(c));
  for (const auto& g : netlist.vccs) {
    int op = idx(g.out_p), on = idx(g.out_n);
    int cp = idx(g.ctl_p), cn = idx(g.ctl_n);
    if (op == on) continue;
    ExprPtr gm = vccs_gm(g);
    // Row out_p: Y[op][cp] += gm, Y[op][cn] -= gm; branch num = -Y.
    auto stamp = [&](int out, int ctl, double sign) {
      if (out < 0 || ctl < 0 || out == ctl) return;
      ExprPtr num = sign < 0 ? Expr::constant(0.0) - gm : gm;
      sfg.add_branch(ctl, out, std::move(num));
    };
    stamp(op, cp, -1.0);  // Y_op,cp = +gm -> num -gm
    stamp(op, cn, +1.0);
    stamp(on, cp, +1.0);
    stamp(on, cn, -1.0);
  }

  // Source nodes: current from n1 to n2 through the source injects +I
  // into n2 and -I into n1.
  std::map<std::string, int> source_index;
  for (const auto& in : netlist.inputs) {
    int src;
    auto it = source_index.find(in.signal);
    if (it == source_index.end()) {
      src = sfg.add_node(in.signal);
      source_index[in.signal] = src;
    } else {
      src = it->second;
    }
    int a = idx(in.n1), b = idx(in.n2);
    if (b >= 0) sfg.add_branch(src, b, Expr::constant(1.0));
    if (a >= 0) sfg.add_branch(src, a, Expr::constant(-1.0));
  }

  // Input source: the current input driving the .in node.
  for (const auto& in : netlist.inputs) {
    if (in.n2 == netlist.input_node) {
      sfg.input_source = source_index.at(in.signal);
      break;
    }
  }
  sfg.output_node = sfg.find_node(netlist.output_node);
  return sfg;
}

}  // namespace adcflow
