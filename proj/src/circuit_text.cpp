#include "qsopt/circuit_text.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "qsopt/error.hpp"

namespace qsopt {
namespace {

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<long> parse_int(std::string_view s) {
  long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

int parse_qubit(std::string_view tok, int line) {
  if (tok.size() < 2 || tok[0] != 'q') throw ParseError(line, "expected qubit operand 'q<i>', got '" + std::string(tok) + "'");
  auto v = parse_int(tok.substr(1));
  if (!v || *v < 0) throw ParseError(line, "bad qubit index '" + std::string(tok) + "'");
  return static_cast<int>(*v);
}

std::optional<GateKind> kind_from_name(std::string_view name) {
  for (GateKind k : kAllGateKinds) {
    if (gate_name(k) == name) return k;
  }
  return std::nullopt;
}

std::string format_angle(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, p);
}

}  // namespace

Circuit parse_circuit(std::string_view text) {
  std::optional<int> n_qubits;
  std::vector<Gate> gates;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto toks = split_ws(line);
    if (toks.empty()) continue;

    if (!n_qubits) {
      if (toks[0] != "qubits" || toks.size() != 2) throw ParseError(line_no, "expected header 'qubits <n>'");
      auto n = parse_int(toks[1]);
      if (!n || *n < 1) throw ParseError(line_no, "qubit count must be a positive integer");
      n_qubits = static_cast<int>(*n);
      continue;
    }

    std::string_view head = toks[0];
    double angle = 0.0;
    if (auto open = head.find('('); open != std::string_view::npos) {
      if (head.back() != ')') throw ParseError(line_no, "unterminated angle in '" + std::string(head) + "'");
      std::string_view num = head.substr(open + 1, head.size() - open - 2);
      auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), angle);
      if (ec != std::errc{} || p != num.data() + num.size()) {
        throw ParseError(line_no, "bad angle '" + std::string(num) + "'");
      }
      head = head.substr(0, open);
    }
    auto kind = kind_from_name(head);
    if (!kind) throw ParseError(line_no, "unknown gate '" + std::string(head) + "'");
    if (is_parameterized(*kind) != (toks[0].find('(') != std::string_view::npos)) {
      throw ParseError(line_no, is_parameterized(*kind) ? "rotation needs an angle" : "gate takes no angle");
    }
    const std::size_t want = is_two_qubit(*kind) ? 3 : 2;
    if (toks.size() != want) {
      throw ParseError(line_no, std::string(gate_name(*kind)) + " expects " + std::to_string(want - 1) + " qubit operand(s)");
    }
    Gate g{*kind, parse_qubit(toks[1], line_no), want == 3 ? parse_qubit(toks[2], line_no) : -1, angle};
    try {
      validate_gate(g, *n_qubits);
    } catch (const CircuitError& e) {
      throw ParseError(line_no, e.what());
    }
    gates.push_back(g);
  }
  if (!n_qubits) throw ParseError(line_no, "missing 'qubits <n>' header");
  return Circuit(*n_qubits, std::move(gates));
}

std::string emit_circuit(const Circuit& c) {
  std::ostringstream out;
  out << "qubits " << c.n_qubits() << '\n';
  for (const Gate& g : c.gates()) {
    out << gate_name(g.kind);
    if (is_parameterized(g.kind)) out << '(' << format_angle(g.angle) << ')';
    out << " q" << g.q0;
    if (g.q1 >= 0) out << " q" << g.q1;
    out << '\n';
  }
  return out.str();
}

Circuit load_circuit(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open circuit file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_circuit(ss.str());
}

void save_circuit(const Circuit& c, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write circuit file " + path.string());
  out << emit_circuit(c);
}

}  // namespace qsopt
