#pragma once

#include <string>

#include "kams/sweep.hpp"

namespace kams {

// Plain CSV emission. Every file starts with a '# config: ...' comment line
// carrying the fully resolved configuration that produced it.

void write_trace_csv(const std::string& path, const QueueTrace& trace,
                     const nlohmann::json& config);
void write_overflow_csv(const std::string& path, const QueueTrace& trace,
                        const nlohmann::json& config);
void write_loss_bins_csv(const std::string& path, const LossSeries& series,
                         const nlohmann::json& config);
void write_ams_curve_csv(const std::string& path, const std::vector<double>& xs,
                         const std::vector<double>& probs, const nlohmann::json& config);

void write_reports_csv(const std::string& path, const SweepResult& result);
void write_contour_long_csv(const std::string& path, const SweepResult& result);
void write_fits_csv(const std::string& path, const SweepResult& result);
void write_point_status_csv(const std::string& path, const SweepResult& result);
void write_exp_sensitivity_csv(const std::string& path, const SweepResult& result);

}  // namespace kams
