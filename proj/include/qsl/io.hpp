#pragma once

// Binary field checkpoints, diagnostic CSV emission, and plot-data export.
// Checkpoint layout: one text header line
//   qslab-ckpt 1 <N> <M> <half_width> <t>
// followed by 16 M^N bytes of little-endian IEEE-754 doubles (re, im pairs,
// row-major).  Round-trips are bit-exact.

#include <string>
#include <vector>

#include "qsl/diagnostics.hpp"
#include "qsl/grid.hpp"

namespace qsl {

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct Checkpoint {
    int version = 1;
    double t = 0.0;
    Field field;
};

void write_checkpoint(const std::string& path, const Field& u, double t);
Checkpoint read_checkpoint(const std::string& path);

// Diagnostic CSV: fixed column set and order, one row per sample.
extern const char* const kDiagnosticsCsvHeader;
std::string diagnostics_csv(const std::vector<DiagnosticRecord>& records);

// Generic labeled CSV (header row + columns).
std::string table_csv(const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& data);

// Minimal CSV reader for the tools (numeric columns, header row).
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;  // data[col][row]
    const std::vector<double>& column(const std::string& name) const;
};
CsvTable read_csv(const std::string& path);

enum class PlotMode { Linear, LogLog, SlopeFit };

// Two-column plot-ready text; SlopeFit appends the fitted slope annotation
// over [t_lo, t_hi].
std::string export_plotdata(const std::vector<double>& x, const std::vector<double>& y,
                            PlotMode mode, double t_lo = 0.0, double t_hi = 0.0);

void write_text(const std::string& path, const std::string& content);

}  // namespace qsl
