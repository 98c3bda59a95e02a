#include "adcflow/netlist.hpp"

#include <algorithm>
#include <sstream>

#include "adcflow/error.hpp"
#include "adcflow/units.hpp"

namespace adcflow {

std::vector<std::string> Netlist::signal_nodes() const {
  std::vector<std::string> nodes;
  auto visit = [&](const std::string& n) {
    if (n == "0") return;
    if (std::find(nodes.begin(), nodes.end(), n) == nodes.end())
      nodes.push_back(n);
  };
  for (const auto& r : resistors) { visit(r.n1); visit(r.n2); }
  for (const auto& c : capacitors) { visit(c.n1); visit(c.n2); }
  for (const auto& g : vccs) {
    visit(g.out_p); visit(g.out_n); visit(g.ctl_p); visit(g.ctl_n);
  }
  for (const auto& i : inputs) { visit(i.n1); visit(i.n2); }
  return nodes;
}

namespace {

[[noreturn]] void fail(int line, const std::string& cause) {
  throw Error(ErrorKind::ParseError,
              "netlist line " + std::to_string(line) + ": " + cause);
}

ElementValue parse_value(const std::string& token, int line) {
  ElementValue v;
  if (auto num = parse_eng_value(token)) {
    v.number = *num;
    return v;
  }
  if (is_identifier(token)) {
    v.param = token;
    return v;
  }
  fail(line, "bad value '" + token + "'");
}

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> tokens;
  std::string t;
  while (is >> t) tokens.push_back(t);
  return tokens;
}

}  // namespace

Netlist parse_netlist(const std::string& text) {
  Netlist nl;
  bool saw_in = false, saw_out = false;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    const std::string& head = tokens[0];
    if (head[0] == '*') continue;  // comment
    if (head == ".in" || head == ".out") {
      if (tokens.size() != 2) fail(lineno, head + " needs one node argument");
      if (head == ".in") {
        if (saw_in) fail(lineno, "duplicate .in directive");
        nl.input_node = tokens[1];
        saw_in = true;
      } else {
        if (saw_out) fail(lineno, "duplicate .out directive");
        nl.output_node = tokens[1];
        saw_out = true;
      }
      continue;
    }
    switch (head[0]) {
      case 'R':
      case 'r': {
        if (tokens.size() != 4)
          fail(lineno, "resistor needs: name n1 n2 value");
        nl.resistors.push_back(
            {head, tokens[1], tokens[2], parse_value(tokens[3], lineno)});
        break;
      }
      case 'C':
      case 'c': {
        if (tokens.size() != 4)
          fail(lineno, "capacitor needs: name n1 n2 value");
        nl.capacitors.push_back(
            {head, tokens[1], tokens[2], parse_value(tokens[3], lineno)});
        break;
      }
      case 'G':
      case 'g': {
        if (tokens.size() != 6 && tokens.size() != 7)
          fail(lineno, "vccs needs: name out+ out- ctl+ ctl- value [param]");
        Vccs g{head, tokens[1], tokens[2], tokens[3], tokens[4],
               parse_value(tokens[5], lineno)};
        if (tokens.size() == 7) {
          if (!is_identifier(tokens[6]))
            fail(lineno, "bad parameter name '" + tokens[6] + "'");
          g.siemens.param = tokens[6];
        }
        nl.vccs.push_back(std::move(g));
        break;
      }
      case 'I':
      case 'i': {
        if (tokens.size() != 3 && tokens.size() != 4)
          fail(lineno, "current input needs: name n1 n2 [signal]");
        nl.inputs.push_back({head, tokens[1], tokens[2],
                             tokens.size() == 4 ? tokens[3] : head});
        break;
      }
      default:
        fail(lineno, "unknown element letter '" + std::string(1, head[0]) + "'");
    }
  }
  if (!saw_in) throw Error(ErrorKind::ParseError, "missing .in directive");
  if (!saw_out) throw Error(ErrorKind::ParseError, "missing .out directive");
  auto nodes = nl.signal_nodes();
  auto known = [&](const std::string& n) {
    return n == "0" ||
           std::find(nodes.begin(), nodes.end(), n) != nodes.end();
  };
  if (!known(nl.input_node) || nl.input_node == "0")
    throw Error(ErrorKind::ParseError,
                ".in names dangling node '" + nl.input_node + "'");
  if (!known(nl.output_node) || nl.output_node == "0")
    throw Error(ErrorKind::ParseError,
                ".out names dangling node '" + nl.output_node + "'");
  bool driven = false;
  for (const auto& in : nl.inputs)
    if (in.n2 == nl.input_node) driven = true;
  if (!driven)
    throw Error(ErrorKind::ParseError,
                "no current input drives .in node '" + nl.input_node + "'");
  return nl;
}

}  // namespace adcflow
