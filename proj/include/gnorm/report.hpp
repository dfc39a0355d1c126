#pragma once

// Deterministic CSV and hand-emitted SVG output. Numbers are printed with
// %.12g so identical runs produce byte-identical files.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gnorm {

inline std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) { row(header); }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ += ',';
            out_ += quote(cells[i]);
        }
        out_ += "\r\n";
    }

    const std::string& str() const { return out_; }

    void save(const std::filesystem::path& p) const {
        std::ofstream f(p, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + p.string());
        f << out_;
    }

private:
    static std::string quote(const std::string& s) {
        if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        q += '"';
        return q;
    }
    std::string out_;
};

struct SvgSeries {
    std::string label;
    std::string color = "#1f77b4";
    std::vector<double> x, y;
    bool points_only = false;
};

/// Minimal line/scatter plot; log-scale y supported by passing log10 values.
inline void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                           const std::vector<SvgSeries>& series,
                           const std::string& x_label = "",
                           const std::string& y_label = "") {
    const double w = 720, h = 480, ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmin > xmax) { xmin = 0; xmax = 1; }
    if (ymin > ymax) { ymin = 0; ymax = 1; }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
    auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_num(w) +
           "\" height=\"" + fmt_num(h) + "\" viewBox=\"0 0 " + fmt_num(w) + " " +
           fmt_num(h) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fmt_num(w / 2) + "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">" + title + "</text>\n";
    // Axes.
    svg += "<line x1=\"" + fmt_num(ml) + "\" y1=\"" + fmt_num(h - mb) + "\" x2=\"" +
           fmt_num(w - mr) + "\" y2=\"" + fmt_num(h - mb) +
           "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fmt_num(ml) + "\" y1=\"" + fmt_num(mt) + "\" x2=\"" +
           fmt_num(ml) + "\" y2=\"" + fmt_num(h - mb) + "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        double xv = xmin + (xmax - xmin) * t / 4.0;
        double yv = ymin + (ymax - ymin) * t / 4.0;
        svg += "<text x=\"" + fmt_num(px(xv)) + "\" y=\"" + fmt_num(h - mb + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt_num(xv) + "</text>\n";
        svg += "<text x=\"" + fmt_num(ml - 8) + "\" y=\"" + fmt_num(py(yv) + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt_num(yv) + "</text>\n";
    }
    if (!x_label.empty())
        svg += "<text x=\"" + fmt_num((ml + w - mr) / 2) + "\" y=\"" + fmt_num(h - 10) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
               x_label + "</text>\n";
    if (!y_label.empty())
        svg += "<text x=\"16\" y=\"" + fmt_num((mt + h - mb) / 2) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
               "transform=\"rotate(-90 16 " + fmt_num((mt + h - mb) / 2) + ")\">" +
               y_label + "</text>\n";

    double legend_y = mt + 4;
    for (const auto& s : series) {
        if (s.points_only) {
            for (std::size_t i = 0; i < s.x.size(); ++i)
                if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
                    svg += "<circle cx=\"" + fmt_num(px(s.x[i])) + "\" cy=\"" +
                           fmt_num(py(s.y[i])) + "\" r=\"2.5\" fill=\"" + s.color +
                           "\"/>\n";
        } else {
            std::string pts;
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                pts += fmt_num(px(s.x[i])) + "," + fmt_num(py(s.y[i])) + " ";
            }
            svg += "<polyline fill=\"none\" stroke=\"" + s.color +
                   "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        }
        if (!s.label.empty()) {
            svg += "<rect x=\"" + fmt_num(w - mr - 150) + "\" y=\"" + fmt_num(legend_y) +
                   "\" width=\"14\" height=\"4\" fill=\"" + s.color + "\"/>\n";
            svg += "<text x=\"" + fmt_num(w - mr - 130) + "\" y=\"" +
                   fmt_num(legend_y + 6) +
                   "\" font-family=\"sans-serif\" font-size=\"12\">" + s.label +
                   "</text>\n";
            legend_y += 18;
        }
    }
    svg += "</svg>\n";

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << svg;
}

}  // namespace gnorm
