#include "exodet/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "exodet/errors.hpp"

namespace exodet {

namespace {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<std::string>& metadata,
               const std::vector<CsvColumn>& columns) {
    if (columns.empty()) throw ContractViolation("csv needs at least one column");
    const std::size_t rows = columns.front().values.size();
    for (const auto& c : columns) {
        if (c.values.size() != rows) {
            throw ContractViolation("csv columns must have equal length");
        }
    }
    for (const auto& line : metadata) os << "# " << line << "\n";
    for (std::size_t c = 0; c < columns.size(); ++c) {
        os << (c ? "," : "") << columns[c].name;
    }
    os << "\n";
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            os << (c ? "," : "") << format_number(columns[c].values[r]);
        }
        os << "\n";
    }
}

void write_csv_file(const std::string& path,
                    const std::vector<std::string>& metadata,
                    const std::vector<CsvColumn>& columns) {
    std::ofstream out(path);
    if (!out) throw ContractViolation("cannot open '" + path + "' for writing");
    write_csv(out, metadata, columns);
    out.flush();
    if (!out) throw ContractViolation("write to '" + path + "' failed");
}

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

double transform(double v, bool log_scale) {
    return log_scale ? std::log10(v) : v;
}

}  // namespace

void write_svg_file(const std::string& path, const std::vector<SvgSeries>& series,
                    const SvgOptions& options) {
    if (series.empty()) throw ContractViolation("svg needs at least one series");

    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size() || s.x.empty()) {
            throw ContractViolation("svg series needs matching non-empty x/y");
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if ((options.log_x && !(s.x[i] > 0.0)) ||
                (options.log_y && !(s.y[i] > 0.0))) {
                continue;  // non-positive points are skipped on log axes
            }
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x_min = std::min(x_min, transform(s.x[i], options.log_x));
            x_max = std::max(x_max, transform(s.x[i], options.log_x));
            y_min = std::min(y_min, transform(s.y[i], options.log_y));
            y_max = std::max(y_max, transform(s.y[i], options.log_y));
        }
    }
    if (!(x_min <= x_max) || !(y_min <= y_max)) {
        throw ContractViolation("svg series contain no drawable points");
    }
    if (x_max == x_min) x_max = x_min + 1.0;
    if (y_max == y_min) y_max = y_min + 1.0;

    const double ml = 70, mr = 20, mt = 40, mb = 50;
    const double pw = options.width - ml - mr;
    const double ph = options.height - mt - mb;
    auto px = [&](double x) {
        return ml + pw * (transform(x, options.log_x) - x_min) / (x_max - x_min);
    };
    auto py = [&](double y) {
        return mt + ph * (1.0 - (transform(y, options.log_y) - y_min) / (y_max - y_min));
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width
        << "\" height=\"" << options.height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
        << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
    if (!options.title.empty()) {
        svg << "<text x=\"" << options.width / 2.0
            << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
            << options.title << "</text>\n";
    }
    if (!options.x_label.empty()) {
        svg << "<text x=\"" << ml + pw / 2.0 << "\" y=\"" << options.height - 12
            << "\" text-anchor=\"middle\" font-size=\"13\">" << options.x_label
            << "</text>\n";
    }
    if (!options.y_label.empty()) {
        svg << "<text x=\"18\" y=\"" << mt + ph / 2.0
            << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
            << mt + ph / 2.0 << ")\">" << options.y_label << "</text>\n";
    }
    // axis extreme labels
    svg << "<text x=\"" << ml << "\" y=\"" << options.height - 30
        << "\" font-size=\"11\">" << format_number(options.log_x ? std::pow(10, x_min) : x_min)
        << "</text>\n"
        << "<text x=\"" << ml + pw << "\" y=\"" << options.height - 30
        << "\" text-anchor=\"end\" font-size=\"11\">"
        << format_number(options.log_x ? std::pow(10, x_max) : x_max) << "</text>\n"
        << "<text x=\"" << ml - 6 << "\" y=\"" << mt + ph
        << "\" text-anchor=\"end\" font-size=\"11\">"
        << format_number(options.log_y ? std::pow(10, y_min) : y_min) << "</text>\n"
        << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 10
        << "\" text-anchor=\"end\" font-size=\"11\">"
        << format_number(options.log_y ? std::pow(10, y_max) : y_max) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = kPalette[k % (sizeof kPalette / sizeof *kPalette)];
        svg << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[k].x.size(); ++i) {
            const double x = series[k].x[i];
            const double y = series[k].y[i];
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if ((options.log_x && !(x > 0.0)) || (options.log_y && !(y > 0.0))) {
                continue;
            }
            svg << format_number(px(x)) << "," << format_number(py(y)) << " ";
        }
        svg << "\"/>\n";
        svg << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 18 + 16.0 * k
            << "\" font-size=\"12\" fill=\"" << color << "\">" << series[k].label
            << "</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream out(path);
    if (!out) throw ContractViolation("cannot open '" + path + "' for writing");
    out << svg.str();
    out.flush();
    if (!out) throw ContractViolation("write to '" + path + "' failed");
}

}  // namespace exodet
