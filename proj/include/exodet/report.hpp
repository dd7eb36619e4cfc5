#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace exodet {

// One named column of a numeric table.
struct CsvColumn {
    std::string name;
    std::vector<double> values;
};

// UTF-8 CSV: '#'-prefixed metadata lines, then a header row, then data rows.
// All columns must have equal length; numbers print with 12 significant
// digits in a locale-independent format, so repeated runs are byte-identical.
void write_csv(std::ostream& os, const std::vector<std::string>& metadata,
               const std::vector<CsvColumn>& columns);

// Same, to a file; I/O failures carry the path in the message.
void write_csv_file(const std::string& path,
                    const std::vector<std::string>& metadata,
                    const std::vector<CsvColumn>& columns);

// Minimal line-plot SVG (axes, polylines, legend), no external renderer.
struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct SvgOptions {
    int width = 720;
    int height = 480;
    bool log_x = false;
    bool log_y = false;
    std::string title;
    std::string x_label;
    std::string y_label;
};

void write_svg_file(const std::string& path, const std::vector<SvgSeries>& series,
                    const SvgOptions& options);

}  // namespace exodet
