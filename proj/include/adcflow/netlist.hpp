#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adcflow/expr.hpp"

namespace adcflow {

// Element value: a number, or a named parameter to be bound later.
// G elements may carry both (the number then serves as a default).
struct ElementValue {
  double number = 0.0;
  std::optional<std::string> param;

  bool is_param() const { return param.has_value(); }
  ExprPtr expr() const {
    return is_param() ? Expr::parameter(*param) : Expr::constant(number);
  }
};

struct Resistor {
  std::string name;
  std::string n1, n2;
  ElementValue ohms;
};

struct Capacitor {
  std::string name;
  std::string n1, n2;
  ElementValue farads;
};

// Current g*(V(ctl_p) - V(ctl_n)) flows from out_p to out_n through the
// source (SPICE G-element convention).
struct Vccs {
  std::string name;
  std::string out_p, out_n, ctl_p, ctl_n;
  ElementValue siemens;
};

// Unit test current flowing from n1 to n2 through the source, i.e.
// injected into n2. `signal` names the input for transfer functions.
struct CurrentInput {
  std::string name;
  std::string n1, n2;
  std::string signal;
};

// Linear small-signal netlist. Node "0" is ground; all other nodes are
// implicitly declared by use.
struct Netlist {
  std::vector<Resistor> resistors;
  std::vector<Capacitor> capacitors;
  std::vector<Vccs> vccs;
  std::vector<CurrentInput> inputs;
  std::string input_node;   // .in directive
  std::string output_node;  // .out directive

  std::size_t element_count() const {
    return resistors.size() + capacitors.size() + vccs.size() + inputs.size();
  }
  // Distinct non-ground nodes, in first-appearance order.
  std::vector<std::string> signal_nodes() const;
};

// Line-based format: first character of the first token selects the
// element (R/C/G/I); values take engineering suffixes or a parameter
// name; "*" starts a comment; directives are ".in <node>" / ".out <node>".
// Throws Error(ParseError) naming the line and cause.
Netlist parse_netlist(const std::string& text);

}  // namespace adcflow
