#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace polqmem {

// One cell of a report table: text, integer-like flag, or a number
// formatted with full working precision.
using Cell = std::variant<std::string, double, long long, bool>;

struct ReportTable {
    std::string name;                         // becomes <name>.csv
    std::vector<std::string> columns;         // header row, hash column excluded
    std::vector<std::vector<Cell>> rows;
};

// Result of one CLI run: tables plus the identifiers that make every
// number in them reproducible.
struct RunReport {
    std::string subcommand;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::vector<ReportTable> tables;
};

// "%.15g" rendering used for every floating-point cell.
std::string format_double(double v);

std::string render_cell(const Cell& c);

// CSV text of a table: one comment line with provenance, a header row
// (columns + "config_hash"), then the rows, each ending in the config
// hash. Deterministic byte-for-byte for equal inputs.
std::string render_csv(const ReportTable& table, const RunReport& report);

// Writes every table of the report to <out_dir>/<table>.csv and returns
// the paths written. With plot=true an SVG chart is written next to
// each CSV.
std::vector<std::string> write_report(const RunReport& report,
                                      const std::string& out_dir, bool plot);

// Reads the config_hash column of a CSV written by write_report.
// Throws InvalidInput if rows disagree or the file has none.
std::string read_csv_hash(const std::string& path);

// Verifies that several CSV files were produced by the same config.
// Throws InvalidInput naming the offending file otherwise.
void ensure_uniform_hash(const std::vector<std::string>& paths);

// Minimal line chart of the numeric columns of a table against its
// first column. Self-contained SVG text.
std::string render_svg(const ReportTable& table);

}  // namespace polqmem
