#include "cribsim/outputs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace cribsim {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void Table::add_row(const std::vector<double>& values) {
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values)
        row.push_back(format_value(v));
    rows.push_back(std::move(row));
}

OutputFormat parse_format(const std::string& name) {
    if (name == "csv")
        return OutputFormat::csv;
    if (name == "json")
        return OutputFormat::json;
    if (name == "svg")
        return OutputFormat::svg;
    throw std::invalid_argument("unknown output format '" + name + "' (csv|json|svg)");
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    return out;
}

void write_csv(const Table& t, const std::string& path) {
    auto out = open_out(path);
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        out << (c ? "," : "") << t.columns[c];
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? "," : "") << row[c];
        out << "\n";
    }
}

nlohmann::ordered_json table_json(const Table& t) {
    nlohmann::ordered_json j;
    j["columns"] = t.columns;
    j["rows"] = t.rows;
    return j;
}

struct Axis {
    double lo = 0.0, hi = 1.0;
    void fit(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
};

void write_svg(const Table& t, const PlotSpec& plot, const std::string& path) {
    const auto xit = std::find(t.columns.begin(), t.columns.end(), plot.x_column);
    const auto yit = std::find(t.columns.begin(), t.columns.end(), plot.y_column);
    if (xit == t.columns.end() || yit == t.columns.end())
        throw std::runtime_error("svg: plot columns not found in table '" + t.name + "'");
    const std::size_t xi = xit - t.columns.begin();
    const std::size_t yi = yit - t.columns.begin();

    std::vector<std::pair<double, double>> pts;
    for (const auto& row : t.rows) {
        try {
            pts.emplace_back(std::stod(row[xi]), std::stod(row[yi]));
        } catch (const std::exception&) {
            // non-numeric row: skip
        }
    }
    if (pts.empty())
        throw std::runtime_error("svg: no numeric points in table '" + t.name + "'");

    Axis ax{pts[0].first, pts[0].first}, ay{pts[0].second, pts[0].second};
    for (const auto& [x, y] : pts) {
        ax.fit(x);
        ay.fit(y);
    }
    if (ax.hi == ax.lo)
        ax.hi = ax.lo + 1.0;
    if (ay.hi == ay.lo)
        ay.hi = ay.lo + 1.0;

    const double W = 640, H = 420, ml = 80, mr = 20, mt = 40, mb = 50;
    auto px = [&](double x) { return ml + (x - ax.lo) / (ax.hi - ax.lo) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - ay.lo) / (ay.hi - ay.lo) * (H - mt - mb); };

    auto out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << plot.title << "</text>\n";
    // axes
    out << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
        << H - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double fx = ax.lo + (ax.hi - ax.lo) * i / 5.0;
        const double fy = ay.lo + (ay.hi - ay.lo) * i / 5.0;
        out << "<line x1=\"" << px(fx) << "\" y1=\"" << H - mb << "\" x2=\"" << px(fx) << "\" y2=\""
            << H - mb + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px(fx) << "\" y=\"" << H - mb + 18
            << "\" text-anchor=\"middle\" font-size=\"10\">" << format_value(fx) << "</text>\n";
        out << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(fy) << "\" x2=\"" << ml << "\" y2=\""
            << py(fy) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << py(fy) + 3
            << "\" text-anchor=\"end\" font-size=\"10\">" << format_value(fy) << "</text>\n";
    }
    out << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"12\">" << plot.x_column << "</text>\n";
    out << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
        << (mt + H - mb) / 2 << ")\">" << plot.y_column << "</text>\n";
    // polyline
    out << "<polyline fill=\"none\" stroke=\"#c22\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts)
        out << px(x) << "," << py(y) << " ";
    out << "\"/>\n";
    for (const auto& [x, y] : pts)
        out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"2.5\" fill=\"#c22\"/>\n";
    out << "</svg>\n";
}

} // namespace

std::vector<std::string> emit_outputs(const ResultBundle& bundle, OutputFormat format,
                                      const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory '" + out_dir + "'");

    std::vector<std::string> written;
    const std::string base = out_dir + "/" + bundle.scenario;

    if (format == OutputFormat::csv) {
        for (const auto& t : bundle.tables) {
            const std::string path = base + "_" + t.name + ".csv";
            write_csv(t, path);
            written.push_back(path);
        }
        // metadata always lands next to the tables
        const std::string meta = base + "_meta.json";
        open_out(meta) << bundle.metadata.dump(2) << "\n";
        written.push_back(meta);
    } else if (format == OutputFormat::json) {
        nlohmann::ordered_json j;
        j["scenario"] = bundle.scenario;
        j["metadata"] = bundle.metadata;
        for (const auto& t : bundle.tables)
            j["tables"][t.name] = table_json(t);
        const std::string path = base + ".json";
        open_out(path) << j.dump(2) << "\n";
        written.push_back(path);
    } else {
        for (const auto& p : bundle.plots) {
            const auto it = std::find_if(bundle.tables.begin(), bundle.tables.end(),
                                         [&](const Table& t) { return t.name == p.table; });
            if (it == bundle.tables.end())
                continue;
            const std::string path = base + "_" + p.table + ".svg";
            write_svg(*it, p, path);
            written.push_back(path);
        }
        const std::string meta = base + "_meta.json";
        open_out(meta) << bundle.metadata.dump(2) << "\n";
        written.push_back(meta);
    }
    return written;
}

} // namespace cribsim
