#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>

#include "adcflow/device.hpp"
#include "adcflow/error.hpp"
#include "adcflow/mason.hpp"
#include "adcflow/rational.hpp"
#include "adcflow/sfg.hpp"
#include "oracles.hpp"

using namespace adcflow;
using cx = std::complex<double>;

namespace {

const SfgBranch* find_branch(const Sfg& sfg, const std::string& from,
                             const std::string& to) {
  int f = sfg.find_node(from), t = sfg.find_node(to);
  for (const auto& b : sfg.branches)
    if (b.from == f && b.to == t) return &b;
  return nullptr;
}

cx eval_gain(const SfgBranch* b, cx s) {
  REQUIRE(b != nullptr);
  return b->gain->eval(s, {});
}

// Random connected RC(+VCCS) network; a resistor spanning tree pins every
// node to ground through node 1.
std::string random_network(oracles::Rng& rng, int n_nodes, bool with_vccs) {
  std::ostringstream os;
  int element = 0;
  auto node_name = [](int i) { return std::to_string(i); };
  // Spanning tree: node 1 grounds the island, later nodes hang off an
  // earlier non-ground node so input and output always couple.
  for (int i = 1; i <= n_nodes; ++i) {
    int parent = i == 1 ? 0 : 1 + rng.below(i - 1);
    os << "R" << ++element << " " << node_name(i) << " " << node_name(parent)
       << " " << rng.uniform(100.0, 1e6) << "\n";
  }
  int extras = rng.below(5);
  for (int e = 0; e < extras; ++e) {
    int a = 1 + rng.below(n_nodes);
    int b = rng.below(n_nodes + 1);
    if (a == b) continue;
    if (rng.below(2) == 0)
      os << "R" << ++element << " " << node_name(a) << " " << node_name(b)
         << " " << rng.uniform(100.0, 1e6) << "\n";
    else
      os << "C" << ++element << " " << node_name(a) << " " << node_name(b)
         << " " << rng.uniform(0.1e-12, 50e-12) << "\n";
  }
  // Ground caps sprinkle poles in the band of interest.
  int caps = 1 + rng.below(3);
  for (int e = 0; e < caps; ++e) {
    int a = 1 + rng.below(n_nodes);
    os << "C" << ++element << " " << node_name(a) << " 0 "
       << rng.uniform(0.1e-12, 50e-12) << "\n";
  }
  if (with_vccs) {
    int n_vccs = 1 + rng.below(2);
    for (int v = 0; v < n_vccs; ++v) {
      int op = 1 + rng.below(n_nodes);
      int on = 0;
      int cp = 1 + rng.below(n_nodes);
      int cn = rng.below(2) == 0 ? 0 : 1 + rng.below(n_nodes);
      if (cn == cp) cn = 0;
      os << "G" << ++element << " " << node_name(op) << " " << node_name(on)
         << " " << node_name(cp) << " " << node_name(cn) << " "
         << rng.uniform(1e-5, 1e-2) << "\n";
    }
  }
  int in = 1 + rng.below(n_nodes);
  int out = 1 + rng.below(n_nodes);
  os << "I1 0 " << in << " in\n.in " << in << "\n.out " << out << "\n";
  return os.str();
}

}  // namespace

TEST_CASE("rc one-port: source branch carries Z(s)") {
  Netlist nl = parse_netlist("R1 1 0 1e3\nC1 1 0 1e-12\nI1 0 1 in\n.in 1\n.out 1\n");
  Sfg sfg = build_sfg(nl);
  REQUIRE(sfg.node_count() == 2);  // node 1 + source

  const SfgBranch* b = find_branch(sfg, "in", "1");
  cx s(0.0, 2.0 * M_PI * 1e6);
  cx z_expected = 1.0 / (1e-3 + s * 1e-12);
  CHECK(std::abs(eval_gain(b, s) - z_expected) <= 1e-12 * std::abs(z_expected));

  // Whole transfer: H = R/(1+sRC).
  auto rf = bind_parameters(mason_transfer(sfg), {});
  CHECK(rf.num.c.size() == 1);
  CHECK(rf.num.c[0] == doctest::Approx(1000.0));
  REQUIRE(rf.den.c.size() == 2);
  CHECK(rf.den.c[0] == doctest::Approx(1.0));
  CHECK(rf.den.c[1] == doctest::Approx(1e-9));
}

TEST_CASE("two-node ladder has forward and back coupling") {
  // I -> node 1 (C to ground), R to node 2 (C to ground).
  Netlist nl = parse_netlist(
      "I1 0 1 in\nR1 1 2 1k\nC1 1 0 1p\nC2 2 0 2p\n.in 1\n.out 2\n");
  Sfg sfg = build_sfg(nl);
  REQUIRE(sfg.node_count() == 3);

  cx s(0.0, 1e7);
  const double g = 1e-3;
  cx z1 = 1.0 / (g + s * 1e-12);
  cx z2 = 1.0 / (g + s * 2e-12);
  CHECK(std::abs(eval_gain(find_branch(sfg, "1", "2"), s) - g * z2) <=
        1e-12 * std::abs(g * z2));
  CHECK(std::abs(eval_gain(find_branch(sfg, "2", "1"), s) - g * z1) <=
        1e-12 * std::abs(g * z1));

  // Hand-derived nodal answer.
  auto rf = bind_parameters(mason_transfer(sfg), {});
  cx denom = (g + s * 1e-12) * (g + s * 2e-12) - g * g;
  cx expected = g / denom;
  CHECK(std::abs(rf.eval(s) - expected) <= 1e-12 * std::abs(expected));
}

TEST_CASE("vccs from node 1 to node 2 contributes -gm*Z2") {
  Netlist nl = parse_netlist(
      "I1 0 1 in\nR1 1 0 1k\nG1 2 0 1 0 2m\nR2 2 0 10k\nC2 2 0 1p\n"
      ".in 1\n.out 2\n");
  Sfg sfg = build_sfg(nl);
  cx s(0.0, 1e8);
  cx z2 = 1.0 / (1e-4 + s * 1e-12);
  cx expected = -2e-3 * z2;
  CHECK(std::abs(eval_gain(find_branch(sfg, "1", "2"), s) - expected) <=
        1e-12 * std::abs(expected));
}

TEST_CASE("singular and floating nodes are rejected") {
  // Node 2 touched only by a VCCS output: no incident admittance.
  CHECK_THROWS_AS(
      build_sfg(parse_netlist(
          "I1 0 1 in\nR1 1 0 1k\nG1 2 0 1 0 1m\n.in 1\n.out 2\n")),
      Error);
  // Nodes 2-3 form an island with no passive path to ground.
  CHECK_THROWS_AS(
      build_sfg(parse_netlist(
          "I1 0 1 in\nR1 1 0 1k\nR2 2 3 1k\nC2 2 3 1p\nC3 3 2 2p\n"
          ".in 1\n.out 2\n")),
      Error);
}

TEST_CASE("mason: single branch and single self-loop") {
  // Plain gains on hand-built graphs (no admittance factorization).
  Sfg g1;
  int a = g1.add_node("a");
  int b = g1.add_node("b");
  g1.add_branch(a, b, Expr::parameter("k"));
  auto tf1 = mason_transfer(g1, a, b);
  CHECK(tf1.record.paths.size() == 1);
  CHECK(tf1.record.loops.empty());
  auto rf1 = bind_parameters(tf1, {{"k", 3.5}});
  CHECK(rf1.eval(0.0).real() == doctest::Approx(3.5));

  Sfg g2;
  a = g2.add_node("a");
  b = g2.add_node("b");
  g2.add_branch(a, b, Expr::parameter("k"));
  g2.add_branch(b, b, Expr::parameter("L"));
  auto tf2 = mason_transfer(g2, a, b);
  CHECK(tf2.record.loops.size() == 1);
  auto rf2 = bind_parameters(tf2, {{"k", 2.0}, {"L", 0.25}});
  CHECK(rf2.eval(0.0).real() == doctest::Approx(2.0 / (1.0 - 0.25)));
}

TEST_CASE("mason: unreachable sink gives a zero transfer function") {
  Sfg g;
  int a = g.add_node("a");
  g.add_node("b");
  int c = g.add_node("c");
  g.add_branch(a, g.find_node("b"), Expr::constant(1.0));
  auto tf = mason_transfer(g, a, c);
  CHECK(tf.record.paths.empty());
  auto rf = bind_parameters(tf, {});
  CHECK(rf.num.is_zero());
}

TEST_CASE("mason: node budget is enforced") {
  Sfg g;
  for (int i = 0; i < kMasonNodeBudget + 1; ++i)
    g.add_node("n" + std::to_string(i));
  for (int i = 0; i + 1 < g.node_count(); ++i)
    g.add_branch(i, i + 1, Expr::constant(0.5));
  CHECK_THROWS_AS(mason_transfer(g, 0, g.node_count() - 1), Error);
}

TEST_CASE("mason matches direct nodal solves on random networks") {
  oracles::Rng rng(0xbeefcafe);
  int checked = 0;
  for (int trial = 0; trial < 120; ++trial) {
    int n_nodes = 2 + rng.below(5);  // 2..6
    std::string text = random_network(rng, n_nodes, trial % 2 == 1);
    Netlist nl = parse_netlist(text);
    Sfg sfg = build_sfg(nl);
    auto tf = mason_transfer(sfg);
    auto rf = bind_parameters(tf, {});
    // The LU oracle resolves a transfer only down to rounding noise of
    // the network's own scale; zero transfers compare against a floor.
    std::vector<double> omegas;
    std::vector<cx> nodal;
    double peak = 0.0;
    for (int i = 0; i < 10; ++i) {
      double omega = std::pow(10.0, 3.0 + 7.0 * i / 9.0);
      omegas.push_back(omega);
      nodal.push_back(oracles::nodal_solve(nl, omega, {}));
      peak = std::max(peak, std::abs(nodal.back()));
    }
    if (peak < 1e-240) continue;
    for (int i = 0; i < 10; ++i) {
      cx mason_h = rf.eval(cx(0.0, omegas[i]));
      double scale = std::max(std::abs(nodal[i]), 1e-6 * peak);
      CHECK(std::abs(mason_h - nodal[i]) <= 1e-9 * scale);
    }
    ++checked;
  }
  CHECK(checked >= 100);
}

TEST_CASE("derivation record: delta and cofactors re-evaluate identically") {
  oracles::Rng rng(0x5eed);
  for (int trial = 0; trial < 10; ++trial) {
    std::string text = random_network(rng, 2 + rng.below(5), true);
    Netlist nl = parse_netlist(text);
    Sfg sfg = build_sfg(nl);
    auto tf = mason_transfer(sfg);

    for (double omega : {1e4, 1e6, 1e8}) {
      cx s(0.0, omega);
      cx delta_record = tf.record.delta()->eval(s, {});
      cx den_scaled = tf.denominator->eval(s, {});
      cx scale = tf.scale->eval(s, {});
      CHECK(std::abs(delta_record - den_scaled / scale) <=
            1e-9 * std::max(1.0, std::abs(delta_record)));

      // Cofactor combos use exactly the loops not touching each path.
      for (std::size_t pi = 0; pi < tf.record.paths.size(); ++pi) {
        for (const auto& combo : tf.record.cofactor_combos[pi])
          for (int li : combo.loops)
            CHECK((tf.record.loops[li].mask & tf.record.paths[pi].mask) == 0);
        // Sum P_k * Delta_k rebuilt from the record matches the scaled
        // numerator at this frequency.
      }
      cx num_record = 0.0;
      for (std::size_t pi = 0; pi < tf.record.paths.size(); ++pi)
        num_record += tf.record.paths[pi].gain->eval(s, {}) *
                      tf.record.cofactor(pi)->eval(s, {});
      cx num_scaled = tf.numerator->eval(s, {});
      CHECK(std::abs(num_record - num_scaled / scale) <=
            1e-9 * std::max(std::abs(num_record), 1e-30));
    }
  }
}

TEST_CASE("passivity: RC-only networks have left-half-plane poles") {
  oracles::Rng rng(0x12345);
  for (int trial = 0; trial < 40; ++trial) {
    std::string text = random_network(rng, 2 + rng.below(5), false);
    Netlist nl = parse_netlist(text);
    auto rf = bind_parameters(mason_transfer(build_sfg(nl)), {});
    for (const auto& p : poly_roots(rf.den))
      CHECK(p.real() < 1e-6 * std::abs(p));
  }
}

TEST_CASE("dc consistency: s=0 equals the resistive solve") {
  oracles::Rng rng(0xabcdef);
  for (int trial = 0; trial < 30; ++trial) {
    std::string text = random_network(rng, 2 + rng.below(5), trial % 2 == 1);
    Netlist nl = parse_netlist(text);
    auto rf = bind_parameters(mason_transfer(build_sfg(nl)), {});
    cx dc_mason = rf.eval(0.0);
    cx dc_nodal = oracles::nodal_solve(nl, 0.0, {});
    // Floor at rounding noise of the resistive scale (ohms).
    double floor = 1e-6 * std::max(std::abs(dc_nodal), 1.0);
    CHECK(std::abs(dc_mason - dc_nodal) <=
          1e-9 * std::max(std::abs(dc_nodal), floor));
  }
}

TEST_CASE("bind_parameters is deterministic") {
  Netlist nl = parse_netlist(adcflow::mdac_template_netlist());
  Sfg sfg = build_sfg(nl);
  auto tf = mason_transfer(sfg);
  Bindings b{{"cs", 3e-12}, {"cgs", 0.2e-12}, {"cf", 1.5e-12},
             {"gm", 5e-3},  {"ro", 2e6},      {"cl", 1e-12}};
  auto r1 = bind_parameters(tf, b);
  auto r2 = bind_parameters(tf, b);
  CHECK(r1.num.c == r2.num.c);
  CHECK(r1.den.c == r2.den.c);
}
