#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "modalbridge/bridge.hpp"

namespace modalbridge::validate {

struct Options {
    bool quick = false;            // reduced sample sizes; criterion 9 runs at 10^5 paths
    std::uint64_t seed = 20240611;
    std::vector<int> only;         // empty runs every criterion
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double budget_seconds = 0.0;
};

struct Report {
    bool quick = false;
    std::vector<CriterionResult> results;
    bool all_passed() const;
};

constexpr int kCriterionCount = 11;

CriterionResult run_criterion(int id, const Options& options);
Report run(const Options& options);

/// The figure preset: (x0, y0) = (0, 0), endpoint (1, 1), T = 1, zero drifts.
inline constexpr double kFigureRhos[] = {0.0, 0.7, -0.7, -0.9};
inline constexpr double kFigureHursts[] = {0.01, 0.25, 0.49, 0.75};
inline constexpr int kFigureSteps = 8000;

struct FigureCurve {
    double hurst = 0.0;
    double rho = 0.0;
    bridge::ModalPath path;
};

std::vector<FigureCurve> figure_grid(int n = kFigureSteps);

struct CurveChecks {
    double max_jump = 0.0;
    double jump_limit = 0.0;
    double endpoint_error = 0.0;
    double line_deviation = 0.0;  // sup |path - straight line|, both coordinates
};

CurveChecks check_curve(const FigureCurve& curve);

}  // namespace modalbridge::validate
