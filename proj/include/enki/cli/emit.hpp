#pragma once

#include <string>

#include "enki/cli/config.hpp"
#include "enki/solver.hpp"

namespace enki::cli {

/// Shortest round-trip decimal representation, '.' separator, no locale.
std::string format_double(double v);

/// trace.csv with the frozen header
/// t,norm_C_theta_theta,norm_C_theta_Hx,norm_C_Hx_Hx,norm_K,innovation,
/// gain_delta_after_resample,sigma_sq,theta_mean_0..,x_prior_mean_0..,
/// x_post_mean_0..
/// Throws if any emitted value is non-finite (names the iteration).
std::string trace_csv(const SolverResult& result);

std::string summary_json(const SolverResult& result);

std::string manifest_json(const RunConfig& cfg, const std::string& config_path,
                          const std::vector<std::string>& artifacts,
                          double wall_seconds);

void write_file(const std::string& path, const std::string& content);

}  // namespace enki::cli
