#pragma once

#include <string>
#include <vector>

namespace coolcn {

// One polyline with optional symmetric error whiskers (se may be empty).
struct SvgSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> se;
};

// Minimal static line chart: one polyline per series, SE whiskers, axis
// frame with range labels, legend. Well-formed standalone XML.
std::string render_chart(const std::vector<SvgSeries>& series,
                         const std::string& x_label,
                         const std::string& y_label, int width = 640,
                         int height = 440);

}  // namespace coolcn
