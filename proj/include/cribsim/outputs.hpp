#ifndef CRIBSIM_OUTPUTS_HPP
#define CRIBSIM_OUTPUTS_HPP

#include <string>
#include <vector>

#include <json.hpp>

namespace cribsim {

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(const std::vector<double>& values);
    void add_row(const std::vector<std::string>& values) { rows.push_back(values); }
};

/// Which table columns to draw when SVG output is requested.
struct PlotSpec {
    std::string table;
    std::string x_column;
    std::string y_column;
    std::string title;
};

struct ResultBundle {
    std::string scenario;
    std::vector<Table> tables;
    nlohmann::ordered_json metadata;
    std::vector<PlotSpec> plots;
};

enum class OutputFormat { csv, json, svg };

OutputFormat parse_format(const std::string& name);

/// Write the bundle under out_dir; returns the list of files written.
/// CSV and JSON bytes are deterministic for identical inputs; SVG is a
/// best-effort visual aid.
std::vector<std::string> emit_outputs(const ResultBundle& bundle, OutputFormat format,
                                      const std::string& out_dir);

/// Canonical number formatting used in all emitted tables ("%.12g").
std::string format_value(double v);

} // namespace cribsim

#endif
