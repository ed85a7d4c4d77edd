#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "qsopt/agent.hpp"
#include "qsopt/circuit.hpp"
#include "qsopt/metrics.hpp"

namespace qsopt {

// CSV schemas. Numbers use the shortest round-trip decimal form, so a given
// value always prints the same bytes.
//
// metrics block (MetricsRecord, prefixed per use):
//   qfi,entropy,depth,gates,d_qfi,d_depth,d_entropy,d_gates,flags,bond_entropies
//   where bond_entropies is the normalized per-bond list joined with ';'.
// episodes.csv:
//   episode,initial_index,steps,return,mean_loss,epsilon,learning_rate,threshold,
//   invalid_actions,injections,train_steps,syncs,<initial_ metrics>,<final_ metrics>
// steps.csv:
//   episode,step,action,label,valid,injected,reward,epsilon,trained,loss,threshold,<metrics>
// timing.csv (the only file with wall-clock data):
//   episode,seconds,steps

std::string format_number(double v);

std::string metrics_csv_header(const std::string& prefix = "");
std::string metrics_csv_row(const MetricsRecord& m);

std::string episodes_csv_header();
std::string episode_csv_row(const EpisodeLog& e);
std::string steps_csv_header();
std::string step_csv_row(const StepLog& s);

/// Line-buffered CSV output file; each row is flushed so an interrupted run keeps what it wrote.
class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const std::string& header);
  void row(const std::string& line);

 private:
  std::filesystem::path path_;
  std::ofstream os_;
};

/// One line of the run summary.
struct SummaryRow {
  std::string label;
  int qubits = 0;
  MetricsRecord initial;
  MetricsRecord final;
};

/// Fixed-width table: qubits, circuit, QFI and entropy before and after,
/// depth and gates before and after, depth and gate reduction in percent.
std::string summary_table(std::span<const SummaryRow> rows);

/// Minimal table read back from one of our CSV files.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Throws Error if the column is absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> numbers(const std::string& name) const;
};

/// Throws Error if unreadable or ragged.
CsvTable read_csv(const std::filesystem::path& path);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Self-contained SVG line chart.
std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                           std::span<const Series> series);
/// Self-contained SVG pie chart of gate fractions; zero slices are omitted.
std::string svg_pie_chart(const std::string& title, const GateComposition& comp);

std::string composition_csv(const GateComposition& comp);

/// Writes the composition and curve CSVs plus their SVGs into `dir`, reading
/// episodes.csv, initial_circuit.qc and final_circuit.qc from it. Returns the
/// written file names. Throws Error if an input is missing.
std::vector<std::string> write_report(const std::filesystem::path& dir);

}  // namespace qsopt
