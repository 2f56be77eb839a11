#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace mbcli {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) : columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) text_ += ',';
        text_ += header[i];
    }
    text_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_) throw std::logic_error("csv row width does not match the header");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) text_ += ',';
        text_ += format_double(values[i]);
    }
    text_ += '\n';
}

namespace {

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string svg_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series) {
    constexpr double width = 640, height = 480, left = 60, right = 150, top = 40, bottom = 50;
    constexpr const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
    for (const auto& s : series) {
        for (double v : s.x) x_lo = std::min(x_lo, v), x_hi = std::max(x_hi, v);
        for (double v : s.y) y_lo = std::min(y_lo, v), y_hi = std::max(y_hi, v);
    }
    const double px = 0.05 * (x_hi - x_lo), py = 0.05 * (y_hi - y_lo);
    x_lo -= px, x_hi += px, y_lo -= py, y_hi += py;
    const double plot_w = width - left - right, plot_h = height - top - bottom;
    auto sx = [&](double v) { return left + (v - x_lo) / (x_hi - x_lo) * plot_w; };
    auto sy = [&](double v) { return top + (y_hi - v) / (y_hi - y_lo) * plot_h; };

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
    out += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    out += "<text x=\"" + fixed(left + plot_w / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
           escape(title) + "</text>\n";
    out += "<rect x=\"" + fixed(left) + "\" y=\"" + fixed(top) + "\" width=\"" + fixed(plot_w) + "\" height=\"" +
           fixed(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x_lo + (x_hi - x_lo) * k / 4.0;
        const double yv = y_lo + (y_hi - y_lo) * k / 4.0;
        out += "<text x=\"" + fixed(sx(xv)) + "\" y=\"" + fixed(top + plot_h + 16) +
               "\" text-anchor=\"middle\" font-size=\"11\">" + fixed(xv) + "</text>\n";
        out += "<text x=\"" + fixed(left - 6) + "\" y=\"" + fixed(sy(yv) + 4) +
               "\" text-anchor=\"end\" font-size=\"11\">" + fixed(yv) + "</text>\n";
    }
    out += "<text x=\"" + fixed(left + plot_w / 2) + "\" y=\"" + fixed(height - 12) +
           "\" text-anchor=\"middle\" font-size=\"13\">" + escape(x_label) + "</text>\n";
    out += "<text x=\"16\" y=\"" + fixed(top + plot_h / 2) + "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 " +
           fixed(top + plot_h / 2) + ")\">" + escape(y_label) + "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* colour = colours[k % std::size(colours)];
        // at most about 800 vertices per curve, always keeping the last node
        const std::size_t step = std::max<std::size_t>(1, s.x.size() / 800);
        out += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); i += step) out += fixed(sx(s.x[i])) + "," + fixed(sy(s.y[i])) + " ";
        if (!s.x.empty() && (s.x.size() - 1) % step != 0) out += fixed(sx(s.x.back())) + "," + fixed(sy(s.y.back()));
        out += "\"/>\n";
        const double ly = top + 16 + 20.0 * static_cast<double>(k);
        out += "<line x1=\"" + fixed(width - right + 12) + "\" y1=\"" + fixed(ly) + "\" x2=\"" + fixed(width - right + 36) +
               "\" y2=\"" + fixed(ly) + "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + fixed(width - right + 42) + "\" y=\"" + fixed(ly + 4) + "\" font-size=\"12\">" + escape(s.label) +
               "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace mbcli
