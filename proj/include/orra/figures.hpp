#pragma once

#include "orra/trace.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace orra::harness {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

/// Every `stride`-th point of each series, last point kept.
std::vector<Series> downsample(const std::vector<Series>& series, std::size_t max_points);

/// Standalone SVG with one polyline per series, axis box, min/max ticks and a legend.
std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series);

/// Long-format CSV: x_name,series,value_name.
void write_tidy_csv(const std::filesystem::path& path, const std::string& figure,
                    const std::string& x_name, const std::string& value_name,
                    const std::vector<Series>& series);

/// fig5a (net BESS powers), fig5b (marginal costs), fig5c (distributed vs
/// centralized cost) from a step-load trace.
std::vector<std::filesystem::path> write_fig5(const Trace& trace, const std::filesystem::path& out_dir);

/// fig6: area-1 frequency of each ablation arm.
std::vector<std::filesystem::path> write_fig6(const std::vector<Trace>& arms,
                                              const std::vector<std::string>& labels,
                                              const std::filesystem::path& out_dir);

/// fig7: disturbance, BESS and AGC power, and per-battery SoC of a fluctuation run.
std::vector<std::filesystem::path> write_fig7(const Trace& trace, const std::filesystem::path& out_dir);

}  // namespace orra::harness
