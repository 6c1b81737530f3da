#include "infoextract/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "infoextract/errors.hpp"

namespace infoextract::svg {

namespace {

constexpr int kWidth = 800;
constexpr int kHeight = 500;
constexpr double kMarginLeft = 62.0;
constexpr double kMarginRight = 18.0;
constexpr double kMarginTop = 34.0;
constexpr double kMarginBottom = 44.0;
constexpr int kTicks = 5;

const char* const kPalette[] = {"#1f6fb2", "#d55e00", "#2a9262", "#8c4fb0",
                                "#b2a11f", "#c23b56", "#3bb2c2", "#7f7f7f"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

struct Bounds {
    double lo = 0.0;
    double hi = 1.0;
};

Bounds padded(double lo, double hi) {
    if (!(lo <= hi)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    return Bounds{lo - pad, hi + pad};
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&':
                out += "&amp;";
                break;
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            default:
                out += c;
        }
    }
    return out;
}

/// Maps data coordinates into one plot rectangle.
struct Frame {
    double x0, y0, x1, y1;  ///< pixel corners (y grows downward)
    Bounds bx, by;

    double px(double x) const { return x0 + (x - bx.lo) / (bx.hi - bx.lo) * (x1 - x0); }
    double py(double y) const { return y1 - (y - by.lo) / (by.hi - by.lo) * (y1 - y0); }
};

void draw_axes(std::string& out, const Frame& frame, const std::string& title) {
    out += "<rect x=\"" + fmt(frame.x0) + "\" y=\"" + fmt(frame.y0) + "\" width=\"" +
           fmt(frame.x1 - frame.x0) + "\" height=\"" + fmt(frame.y1 - frame.y0) +
           "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    for (int t = 0; t < kTicks; ++t) {
        const double f = static_cast<double>(t) / (kTicks - 1);
        const double xv = frame.bx.lo + f * (frame.bx.hi - frame.bx.lo);
        const double yv = frame.by.lo + f * (frame.by.hi - frame.by.lo);
        const double xp = frame.px(xv);
        const double yp = frame.py(yv);
        out += "<line x1=\"" + fmt(xp) + "\" y1=\"" + fmt(frame.y1) + "\" x2=\"" + fmt(xp) +
               "\" y2=\"" + fmt(frame.y1 + 5.0) + "\" stroke=\"#333333\"/>\n";
        out += "<text x=\"" + fmt(xp) + "\" y=\"" + fmt(frame.y1 + 18.0) +
               "\" text-anchor=\"middle\" font-size=\"11\">" + escape(fmt_tick(xv)) + "</text>\n";
        out += "<line x1=\"" + fmt(frame.x0 - 5.0) + "\" y1=\"" + fmt(yp) + "\" x2=\"" +
               fmt(frame.x0) + "\" y2=\"" + fmt(yp) + "\" stroke=\"#333333\"/>\n";
        out += "<text x=\"" + fmt(frame.x0 - 8.0) + "\" y=\"" + fmt(yp + 4.0) +
               "\" text-anchor=\"end\" font-size=\"11\">" + escape(fmt_tick(yv)) + "</text>\n";
    }
    if (!title.empty()) {
        out += "<text x=\"" + fmt((frame.x0 + frame.x1) / 2.0) + "\" y=\"" +
               fmt(frame.y0 - 10.0) + "\" text-anchor=\"middle\" font-size=\"14\">" +
               escape(title) + "</text>\n";
    }
}

void write_svg(const std::string& body, const std::string& path, bool allow_overwrite) {
    if (!allow_overwrite && std::filesystem::exists(path)) {
        throw RefusedOverwrite("'" + path + "' already exists; pass --force to overwrite");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InvalidInput("cannot open '" + path + "' for writing");
    }
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
        << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"#ffffff\"/>\n"
        << body << "</svg>\n";
    out.flush();
    if (!out) {
        throw InvalidInput("failed while writing '" + path + "'");
    }
}

}  // namespace

void emit_svg_lineplot(const std::vector<SvgSeries>& series, const std::string& path,
                       const std::string& title, bool allow_overwrite) {
    if (series.empty()) {
        throw InvalidInput("line plot needs at least one series");
    }
    double xlo = std::numeric_limits<double>::infinity();
    double xhi = -xlo;
    double ylo = xlo;
    double yhi = -xlo;
    for (const auto& s : series) {
        if (s.xs.empty() || s.xs.size() != s.ys.size()) {
            throw InvalidInput("series '" + s.name + "' is empty or has mismatched lengths");
        }
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) {
                throw InvalidInput("series '" + s.name + "' has non-finite points");
            }
            xlo = std::min(xlo, s.xs[i]);
            xhi = std::max(xhi, s.xs[i]);
            ylo = std::min(ylo, s.ys[i]);
            yhi = std::max(yhi, s.ys[i]);
        }
    }
    Frame frame{kMarginLeft, kMarginTop, kWidth - kMarginRight, kHeight - kMarginBottom,
                padded(xlo, xhi), padded(ylo, yhi)};

    std::string body;
    draw_axes(body, frame, title);
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % kPaletteSize];
        body += "<polyline fill=\"none\" stroke=\"";
        body += color;
        body += "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[s].xs.size(); ++i) {
            if (i) {
                body += ' ';
            }
            body += fmt(frame.px(series[s].xs[i])) + "," + fmt(frame.py(series[s].ys[i]));
        }
        body += "\"/>\n";
        const double ly = frame.y0 + 16.0 + 16.0 * static_cast<double>(s);
        body += "<line x1=\"" + fmt(frame.x1 - 150.0) + "\" y1=\"" + fmt(ly - 4.0) + "\" x2=\"" +
                fmt(frame.x1 - 130.0) + "\" y2=\"" + fmt(ly - 4.0) + "\" stroke=\"";
        body += color;
        body += "\" stroke-width=\"2\"/>\n";
        body += "<text x=\"" + fmt(frame.x1 - 124.0) + "\" y=\"" + fmt(ly) +
                "\" font-size=\"12\">" + escape(series[s].name) + "</text>\n";
    }
    write_svg(body, path, allow_overwrite);
}

void emit_svg_scatter(const std::vector<ScatterPanel>& panels, const std::string& path,
                      bool allow_overwrite) {
    if (panels.empty() || panels.size() > 2) {
        throw InvalidInput("scatter figure supports 1 or 2 panels, got " +
                           std::to_string(panels.size()));
    }
    std::string body;
    const double panel_width =
        (kWidth - kMarginLeft - kMarginRight - (panels.size() > 1 ? 40.0 : 0.0)) /
        static_cast<double>(panels.size());
    for (std::size_t p = 0; p < panels.size(); ++p) {
        const auto& panel = panels[p];
        if (panel.xs.empty() || panel.xs.size() != panel.ys.size()) {
            throw InvalidInput("panel '" + panel.title + "' is empty or has mismatched lengths");
        }
        double xlo = std::numeric_limits<double>::infinity();
        double xhi = -xlo;
        double ylo = xlo;
        double yhi = -xlo;
        for (std::size_t i = 0; i < panel.xs.size(); ++i) {
            if (!std::isfinite(panel.xs[i]) || !std::isfinite(panel.ys[i])) {
                throw InvalidInput("panel '" + panel.title + "' has non-finite points");
            }
            xlo = std::min(xlo, panel.xs[i]);
            xhi = std::max(xhi, panel.xs[i]);
            ylo = std::min(ylo, panel.ys[i]);
            yhi = std::max(yhi, panel.ys[i]);
        }
        const double x0 = kMarginLeft + static_cast<double>(p) * (panel_width + 40.0);
        Frame frame{x0, kMarginTop, x0 + panel_width, kHeight - kMarginBottom, padded(xlo, xhi),
                    padded(ylo, yhi)};
        draw_axes(body, frame, panel.title);
        const char* color = kPalette[p % kPaletteSize];
        for (std::size_t i = 0; i < panel.xs.size(); ++i) {
            body += "<circle cx=\"" + fmt(frame.px(panel.xs[i])) + "\" cy=\"" +
                    fmt(frame.py(panel.ys[i])) + "\" r=\"1.2\" fill=\"";
            body += color;
            body += "\" fill-opacity=\"0.5\"/>\n";
        }
    }
    write_svg(body, path, allow_overwrite);
}

}  // namespace infoextract::svg
