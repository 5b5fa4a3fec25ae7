// SPDX-License-Identifier: Apache-2.0
#include "csta/svg.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "csta/errors.hpp"

namespace csta {

void write_heatmap_svg(std::ostream& out, const Tensor& map) {
    if (map.rank() != 2) {
        throw DimensionError("heatmap expects a rank-2 map, got " +
                             shape_to_string(map.shape()));
    }
    const std::size_t rows = map.dim(0), cols = map.dim(1);
    double lo = map[0], hi = map[0];
    for (std::size_t i = 0; i < map.size(); ++i) {
        lo = std::min(lo, map[i]);
        hi = std::max(hi, map[i]);
    }
    const double range = hi - lo;

    constexpr int cell = 14;
    constexpr int margin = 48;
    constexpr int legend = 56;
    const int width = margin + static_cast<int>(cols) * cell + 16;
    const int height = margin + static_cast<int>(rows) * cell + legend;

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "  <text x=\"" << margin << "\" y=\"18\" font-size=\"12\">joint &#8594;</text>\n";
    out << "  <text x=\"10\" y=\"" << margin - 6 << "\" font-size=\"12\">frame &#8595;</text>\n";
    out.precision(12);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double v = map[r * cols + c];
            const double unit = range > 0.0 ? (v - lo) / range : 0.0;
            const int gray = 255 - static_cast<int>(std::lround(255.0 * unit));
            out << "  <rect x=\"" << margin + static_cast<int>(c) * cell << "\" y=\""
                << margin + static_cast<int>(r) * cell << "\" width=\"" << cell
                << "\" height=\"" << cell << "\" fill=\"rgb(" << gray << ',' << gray << ','
                << gray << ")\"/>\n";
        }
    }
    const int legend_y = margin + static_cast<int>(rows) * cell + 24;
    out << "  <rect x=\"" << margin << "\" y=\"" << legend_y
        << "\" width=\"14\" height=\"14\" fill=\"rgb(255,255,255)\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << margin + 20 << "\" y=\"" << legend_y + 12
        << "\" font-size=\"12\">min = " << lo << "</text>\n";
    out << "  <rect x=\"" << margin + 170 << "\" y=\"" << legend_y
        << "\" width=\"14\" height=\"14\" fill=\"rgb(0,0,0)\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << margin + 190 << "\" y=\"" << legend_y + 12
        << "\" font-size=\"12\">max = " << hi << "</text>\n";
    out << "</svg>\n";
}

} // namespace csta
