#pragma once

#include <string>
#include <vector>

namespace mbcli {

/// 17 significant digits, so values round-trip exactly.
std::string format_double(double v);

class CsvWriter {
public:
    explicit CsvWriter(const std::vector<std::string>& header);
    void row(const std::vector<double>& values);
    const std::string& str() const { return text_; }

private:
    std::size_t columns_;
    std::string text_;
};

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Line chart on a fixed 640x480 viewport; axes span the data plus a small margin.
std::string svg_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series);

/// Writes to path, or to stdout when path is empty.
void emit(const std::string& path, const std::string& content);

}  // namespace mbcli
