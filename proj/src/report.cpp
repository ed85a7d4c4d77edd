#include "qsopt/report.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "qsopt/circuit_text.hpp"
#include "qsopt/error.hpp"

namespace qsopt {

std::string format_number(double v) {
  if (v == 0.0) return "0";  // folds -0
  return fmt::format("{}", v);
}

namespace {

std::string join(const std::vector<std::string>& parts, char sep = ',') {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string b01(bool b) { return b ? "1" : "0"; }

// Labels contain commas (e.g. ADD_RX(q1,0.785398)), so they are quoted.
std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        in_quotes = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string metrics_csv_header(const std::string& p) {
  return join({p + "qfi", p + "entropy", p + "depth", p + "gates", p + "d_qfi", p + "d_depth", p + "d_entropy",
               p + "d_gates", p + "flags", p + "bond_entropies"});
}

std::string metrics_csv_row(const MetricsRecord& m) {
  std::vector<std::string> bonds;
  for (double b : m.bond_entropies_norm) bonds.push_back(format_number(b));
  return join({format_number(m.qfi_norm), format_number(m.entropy_norm), std::to_string(m.depth),
               std::to_string(m.gates), format_number(m.deltas.qfi), format_number(m.deltas.depth),
               format_number(m.deltas.entropy), format_number(m.deltas.gates), std::to_string(m.flags),
               join(bonds, ';')});
}

std::string episodes_csv_header() {
  return "episode,initial_index,steps,return,mean_loss,epsilon,learning_rate,threshold,invalid_actions,injections,"
         "train_steps,syncs," +
         metrics_csv_header("initial_") + "," + metrics_csv_header("final_");
}

std::string episode_csv_row(const EpisodeLog& e) {
  return join({std::to_string(e.episode), std::to_string(e.initial_index), std::to_string(e.steps),
               format_number(e.episode_return), format_number(e.mean_loss), format_number(e.epsilon),
               format_number(e.learning_rate), format_number(e.threshold), std::to_string(e.invalid_actions),
               std::to_string(e.injections), std::to_string(e.train_steps), std::to_string(e.syncs),
               metrics_csv_row(e.initial), metrics_csv_row(e.final)});
}

std::string steps_csv_header() {
  return "episode,step,action,label,valid,injected,reward,epsilon,trained,loss,threshold," + metrics_csv_header();
}

std::string step_csv_row(const StepLog& s) {
  return join({std::to_string(s.episode), std::to_string(s.step), std::to_string(s.action), quoted(s.label),
               b01(s.valid), b01(s.injected), format_number(s.reward), format_number(s.epsilon), b01(s.trained),
               format_number(s.trained ? s.loss : 0.0), format_number(s.threshold), metrics_csv_row(s.metrics)});
}

CsvFile::CsvFile(const std::filesystem::path& path, const std::string& header)
    : path_(path), os_(path, std::ios::trunc) {
  if (!os_) throw Error("cannot write " + path.string());
  row(header);
}

void CsvFile::row(const std::string& line) {
  os_ << line << '\n';
  os_.flush();
  if (!os_) throw Error("failed writing " + path_.string());
}

std::string summary_table(std::span<const SummaryRow> rows) {
  std::string out = fmt::format("{:<7} {:<12} {:>8} {:>8} {:>9} {:>9} {:>6} {:>6} {:>6} {:>6} {:>12} {:>12}\n",
                                "qubits", "circuit", "QFI_in", "QFI_out", "Ent_in", "Ent_out", "D_in", "D_out",
                                "G_in", "G_out", "DepthRed_%", "GatesRed_%");
  for (const SummaryRow& r : rows) {
    const auto pct = [](int in, double ratio) { return in == 0 ? std::string("NA") : fmt::format("{:.2f}", 100.0 * ratio); };
    out += fmt::format("{:<7} {:<12} {:>8.4f} {:>8.4f} {:>9.4f} {:>9.4f} {:>6} {:>6} {:>6} {:>6} {:>12} {:>12}\n",
                       r.qubits, r.label, r.initial.qfi_norm, r.final.qfi_norm, r.initial.entropy_norm,
                       r.final.entropy_norm, r.initial.depth, r.final.depth, r.initial.gates, r.final.gates,
                       pct(r.initial.depth, r.initial.depth ? depth_ratio(r.initial.depth, r.final.depth) : 0.0),
                       pct(r.initial.gates, r.initial.gates ? gate_ratio(r.initial.gates, r.final.gates) : 0.0));
  }
  return out;
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error("CSV column '" + name + "' not found");
  return static_cast<std::size_t>(it - header.begin());
}

std::vector<double> CsvTable::numbers(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    try {
      out.push_back(std::stod(r[c]));
    } catch (const std::exception&) {
      throw Error("CSV column '" + name + "' holds non-numeric value '" + r[c] + "'");
    }
  }
  return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw Error(path.string() + " is empty");
  t.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != t.header.size()) throw Error(path.string() + ": ragged row");
    t.rows.push_back(std::move(fields));
  }
  return t;
}

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                           std::span<const Series> series) {
  constexpr double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool first = true;
  for (const Series& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (first) {
        x0 = x1 = s.x[i];
        y0 = y1 = s.y[i];
        first = false;
      }
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  const auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::string o = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{}</text>\n",
      W, H, W, H, W / 2, xml_escape(title));
  o += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", L, H - B, W - R, H - B);
  o += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", L, T, L, H - B);
  for (int k = 0; k <= 4; ++k) {
    const double yv = y0 + (y1 - y0) * k / 4.0;
    const double xv = x0 + (x1 - x0) * k / 4.0;
    o += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{:.3g}</text>\n",
        L - 6, py(yv) + 4, yv);
    o += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{:.4g}</text>\n",
        px(xv), H - B + 16, xv);
  }
  o += fmt::format(
      "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
      (L + W - R) / 2, H - 12, xml_escape(x_label));
  o += fmt::format(
      "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
      "transform=\"rotate(-90 16 {})\">{}</text>\n",
      (T + H - B) / 2, (T + H - B) / 2, xml_escape(y_label));
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) pts += fmt::format("{:.2f},{:.2f} ", px(s.x[i]), py(s.y[i]));
    o += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color, pts);
    if (series.size() > 1) {
      o += fmt::format(
          "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{}\">{}</text>\n", W - R - 120,
          T + 14 * (k + 1), color, xml_escape(s.name));
    }
  }
  return o + "</svg>\n";
}

std::string svg_pie_chart(const std::string& title, const GateComposition& comp) {
  constexpr double W = 420, H = 320, cx = 150, cy = 170, r = 110;
  std::string o = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{}</text>\n",
      W, H, W, H, W / 2, xml_escape(title));
  double angle = -std::numbers::pi / 2;
  int legend = 0;
  for (std::size_t k = 0; k < kGateKindCount; ++k) {
    const double f = comp.fractions[k];
    if (f <= 0.0) continue;
    const char* color = kPalette[k % std::size(kPalette)];
    if (f >= 1.0 - 1e-12) {
      o += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>\n", cx, cy, r, color);
    } else {
      const double a1 = angle + 2 * std::numbers::pi * f;
      o += fmt::format(
          "<path d=\"M {} {} L {:.3f} {:.3f} A {} {} 0 {} 1 {:.3f} {:.3f} Z\" fill=\"{}\" stroke=\"white\"/>\n", cx,
          cy, cx + r * std::cos(angle), cy + r * std::sin(angle), r, r, f > 0.5 ? 1 : 0, cx + r * std::cos(a1),
          cy + r * std::sin(a1), color);
      angle = a1;
    }
    o += fmt::format("<rect x=\"290\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{}\"/>\n", 80 + 20 * legend, color);
    o += fmt::format(
        "<text x=\"308\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{} {:.1f}%</text>\n",
        91 + 20 * legend, gate_name(kAllGateKinds[k]), 100.0 * f);
    ++legend;
  }
  if (comp.total == 0) {
    o += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\">empty</text>\n", cx, cy);
  }
  return o + "</svg>\n";
}

std::string composition_csv(const GateComposition& comp) {
  std::string o = "gate,count,fraction\n";
  for (std::size_t k = 0; k < kGateKindCount; ++k) {
    o += fmt::format("{},{},{}\n", gate_name(kAllGateKinds[k]), comp.counts[k], format_number(comp.fractions[k]));
  }
  return o;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error("cannot write " + path.string());
  os << text;
  if (!os) throw Error("failed writing " + path.string());
}

}  // namespace

std::vector<std::string> write_report(const std::filesystem::path& dir) {
  for (const char* f : {"episodes.csv", "initial_circuit.qc", "final_circuit.qc"}) {
    if (!std::filesystem::exists(dir / f)) throw Error("missing run output " + (dir / f).string());
  }
  const CsvTable episodes = read_csv(dir / "episodes.csv");
  const std::vector<double> x = episodes.numbers("episode");
  std::vector<std::string> written;

  const Circuit before = load_circuit(dir / "initial_circuit.qc");
  const Circuit after = load_circuit(dir / "final_circuit.qc");
  for (const auto& [stem, c] : {std::pair<std::string, const Circuit*>{"composition_before", &before},
                                {"composition_after", &after}}) {
    const GateComposition comp = composition(*c);
    write_text(dir / (stem + ".csv"), composition_csv(comp));
    write_text(dir / (stem + ".svg"),
               svg_pie_chart(stem == "composition_before" ? "Gate composition (initial)" : "Gate composition (final)",
                             comp));
    written.push_back(stem + ".csv");
    written.push_back(stem + ".svg");
  }

  struct Curve {
    const char* stem;
    const char* column;
    const char* title;
  };
  for (const Curve& c : {Curve{"reward_curve", "return", "Episode return"},
                         Curve{"entropy_curve", "final_entropy", "Normalized entanglement entropy"},
                         Curve{"depth_curve", "final_depth", "Circuit depth"},
                         Curve{"gates_curve", "final_gates", "Gate count"}}) {
    const std::vector<double> y = episodes.numbers(c.column);
    std::string csv = std::string("episode,") + c.column + "\n";
    for (std::size_t i = 0; i < y.size(); ++i) csv += format_number(x[i]) + "," + format_number(y[i]) + "\n";
    write_text(dir / (std::string(c.stem) + ".csv"), csv);
    const Series s{c.column, x, y};
    write_text(dir / (std::string(c.stem) + ".svg"), svg_line_chart(c.title, "episode", c.column, {&s, 1}));
    written.push_back(std::string(c.stem) + ".csv");
    written.push_back(std::string(c.stem) + ".svg");
  }
  return written;
}

}  // namespace qsopt
