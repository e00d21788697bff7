#include "polqmem/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "polqmem/config.hpp"
#include "polqmem/errors.hpp"
#include "polqmem/version.hpp"

namespace polqmem {

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

std::string render_cell(const Cell& c) {
    if (std::holds_alternative<std::string>(c)) {
        return csv_escape(std::get<std::string>(c));
    }
    if (std::holds_alternative<double>(c)) {
        return format_double(std::get<double>(c));
    }
    if (std::holds_alternative<long long>(c)) {
        return std::to_string(std::get<long long>(c));
    }
    return std::get<bool>(c) ? "true" : "false";
}

std::string render_csv(const ReportTable& table, const RunReport& report) {
    std::ostringstream out;
    const std::string hash = hash_hex(report.config_hash);
    out << "# polqmem " << kVersion << " subcommand=" << report.subcommand
        << " seed=" << report.seed << " config_hash=" << hash << "\n";
    for (size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? "," : "") << csv_escape(table.columns[i]);
    }
    out << (table.columns.empty() ? "" : ",") << "config_hash\n";
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << render_cell(row[i]);
        }
        out << (row.empty() ? "" : ",") << hash << "\n";
    }
    return out.str();
}

std::vector<std::string> write_report(const RunReport& report,
                                      const std::string& out_dir, bool plot) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<std::string> written;
    for (const ReportTable& table : report.tables) {
        const fs::path csv_path = fs::path(out_dir) / (table.name + ".csv");
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv) {
            throw Error("cannot write " + csv_path.string());
        }
        csv << render_csv(table, report);
        written.push_back(csv_path.string());
        if (plot) {
            const fs::path svg_path = fs::path(out_dir) / (table.name + ".svg");
            std::ofstream svg(svg_path, std::ios::binary);
            if (!svg) {
                throw Error("cannot write " + svg_path.string());
            }
            svg << render_svg(table);
            written.push_back(svg_path.string());
        }
    }
    return written;
}

std::string read_csv_hash(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot open " + path);
    }
    std::string line;
    std::string hash;
    bool header_skipped = false;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (!header_skipped) {
            header_skipped = true;
            continue;
        }
        const auto last_comma = line.find_last_of(',');
        if (last_comma == std::string::npos) {
            throw InvalidInput(path + " has a row without a hash column");
        }
        std::string row_hash = line.substr(last_comma + 1);
        while (!row_hash.empty() && (row_hash.back() == '\r')) {
            row_hash.pop_back();
        }
        if (hash.empty()) {
            hash = row_hash;
        } else if (hash != row_hash) {
            throw InvalidInput(path + " mixes config hashes: " + hash + " vs " +
                               row_hash);
        }
    }
    if (hash.empty()) {
        throw InvalidInput(path + " carries no data rows");
    }
    return hash;
}

void ensure_uniform_hash(const std::vector<std::string>& paths) {
    std::string expected;
    for (const std::string& p : paths) {
        const std::string h = read_csv_hash(p);
        if (expected.empty()) {
            expected = h;
        } else if (h != expected) {
            throw InvalidInput("config hash of " + p +
                               " does not match the other outputs (" + h +
                               " vs " + expected + ")");
        }
    }
}

std::string render_svg(const ReportTable& table) {
    // Numeric columns only; the x axis is the first numeric column, or
    // the row index when the first column is text (tomography states).
    std::vector<size_t> numeric;
    for (size_t c = 0; c < table.columns.size(); ++c) {
        bool all_num = !table.rows.empty();
        for (const auto& row : table.rows) {
            if (!(std::holds_alternative<double>(row[c]) ||
                  std::holds_alternative<long long>(row[c]))) {
                all_num = false;
                break;
            }
        }
        if (all_num) {
            numeric.push_back(c);
        }
    }
    const double width = 720.0;
    const double height = 420.0;
    const double ml = 70.0, mr = 20.0, mt = 30.0, mb = 50.0;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
        << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (numeric.empty() || table.rows.empty()) {
        out << "<text x=\"20\" y=\"40\">no numeric data</text>\n</svg>\n";
        return out.str();
    }

    const bool first_is_x =
        !numeric.empty() && numeric.front() == 0 && table.columns.size() > 1;
    const size_t x_col = first_is_x ? 0 : size_t(-1);
    auto x_value = [&](size_t row) {
        if (x_col == size_t(-1)) {
            return double(row);
        }
        const Cell& c = table.rows[row][x_col];
        return std::holds_alternative<double>(c) ? std::get<double>(c)
                                                 : double(std::get<long long>(c));
    };
    auto cell_value = [&](size_t row, size_t col) {
        const Cell& c = table.rows[row][col];
        return std::holds_alternative<double>(c) ? std::get<double>(c)
                                                 : double(std::get<long long>(c));
    };

    std::vector<size_t> y_cols;
    for (size_t c : numeric) {
        if (c != x_col) {
            y_cols.push_back(c);
        }
    }
    if (y_cols.empty()) {
        out << "<text x=\"20\" y=\"40\">no numeric data</text>\n</svg>\n";
        return out.str();
    }

    double xmin = x_value(0), xmax = x_value(0);
    double ymin = cell_value(0, y_cols[0]), ymax = ymin;
    for (size_t r = 0; r < table.rows.size(); ++r) {
        xmin = std::min(xmin, x_value(r));
        xmax = std::max(xmax, x_value(r));
        for (size_t c : y_cols) {
            ymin = std::min(ymin, cell_value(r, c));
            ymax = std::max(ymax, cell_value(r, c));
        }
    }
    if (xmax == xmin) {
        xmax = xmin + 1.0;
    }
    if (ymax == ymin) {
        ymax = ymin + 1.0;
    }
    const auto sx = [&](double x) {
        return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr);
    };
    const auto sy = [&](double y) {
        return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
    };

    out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\""
        << width - mr << "\" y2=\"" << height - mb
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
        << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double fy = ymin + (ymax - ymin) * t / 4.0;
        const double fx = xmin + (xmax - xmin) * t / 4.0;
        out << "<text x=\"" << ml - 8 << "\" y=\"" << sy(fy) + 4
            << "\" font-size=\"11\" text-anchor=\"end\">" << format_double(fy)
            << "</text>\n";
        out << "<text x=\"" << sx(fx) << "\" y=\"" << height - mb + 18
            << "\" font-size=\"11\" text-anchor=\"middle\">" << format_double(fx)
            << "</text>\n";
    }
    const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                             "#ff7f0e", "#8c564b"};
    for (size_t k = 0; k < y_cols.size(); ++k) {
        const char* color = palette[k % 6];
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        for (size_t r = 0; r < table.rows.size(); ++r) {
            out << sx(x_value(r)) << "," << sy(cell_value(r, y_cols[k])) << " ";
        }
        out << "\"/>\n";
        out << "<text x=\"" << width - mr - 10 << "\" y=\"" << mt + 16.0 * double(k)
            << "\" font-size=\"12\" text-anchor=\"end\" fill=\"" << color << "\">"
            << table.columns[y_cols[k]] << "</text>\n";
    }
    out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
        << "\" font-size=\"12\" text-anchor=\"middle\">"
        << (x_col == size_t(-1) ? std::string("row") : table.columns[0])
        << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

}  // namespace polqmem
