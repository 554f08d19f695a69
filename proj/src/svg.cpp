#include "coolcn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace coolcn {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

}  // namespace

std::string render_chart(const std::vector<SvgSeries>& series,
                         const std::string& x_label,
                         const std::string& y_label, int width, int height) {
    if (series.empty()) throw std::invalid_argument("chart needs data");
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size() || (!s.se.empty() && s.se.size() != s.y.size()))
            throw std::invalid_argument("series arrays must align");
        for (size_t i = 0; i < s.x.size(); ++i) {
            double w = s.se.empty() ? 0.0 : s.se[i];
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i] - w);
            ymax = std::max(ymax, s.y[i] + w);
        }
    }
    if (!(xmin <= xmax) || !(ymin <= ymax))
        throw std::invalid_argument("chart needs at least one point");
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;

    const double ml = 70, mr = 20, mt = 20, mb = 50;
    const double pw = width - ml - mr, ph = height - mt - mb;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\">\n"
        << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
        << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(x_label)
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << mt + ph / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << mt + ph / 2 << ")\">" << escape(y_label) << "</text>\n";
    out << "<text x=\"" << ml << "\" y=\"" << height - 32
        << "\" font-size=\"11\">" << num(xmin) << "</text>\n"
        << "<text x=\"" << ml + pw << "\" y=\"" << height - 32
        << "\" text-anchor=\"end\" font-size=\"11\">" << num(xmax) << "</text>\n"
        << "<text x=\"" << ml - 6 << "\" y=\"" << mt + ph
        << "\" text-anchor=\"end\" font-size=\"11\">" << num(ymin) << "</text>\n"
        << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 10
        << "\" text-anchor=\"end\" font-size=\"11\">" << num(ymax) << "</text>\n";

    for (size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % (sizeof(kPalette) / sizeof(*kPalette))];
        if (!s.se.empty()) {
            for (size_t i = 0; i < s.x.size(); ++i) {
                if (s.se[i] <= 0.0) continue;
                out << "<line x1=\"" << num(px(s.x[i])) << "\" y1=\""
                    << num(py(s.y[i] - s.se[i])) << "\" x2=\"" << num(px(s.x[i]))
                    << "\" y2=\"" << num(py(s.y[i] + s.se[i])) << "\" stroke=\""
                    << color << "\" stroke-width=\"1\"/>\n";
            }
        }
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (i) out << " ";
            out << num(px(s.x[i])) << "," << num(py(s.y[i]));
        }
        out << "\"/>\n";
        double ly = mt + 16 + 16 * static_cast<double>(si);
        out << "<line x1=\"" << ml + 10 << "\" y1=\"" << ly - 4 << "\" x2=\""
            << ml + 34 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << ml + 40 << "\" y=\"" << ly
            << "\" font-size=\"12\">" << escape(s.name) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace coolcn
