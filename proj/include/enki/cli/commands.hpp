#pragma once

#include <string>
#include <vector>

namespace enki::cli {

/// Exit codes: 0 converged, 2 early stopped, 3 max iterations, 1 error.
int cmd_run(const std::string& config_path, const std::string& out_dir);

int cmd_compare_distributions(const std::string& config_path, int seeds,
                              const std::string& out_dir, int jobs);

int cmd_sweep_gamma(const std::string& config_path,
                    const std::vector<double>& gammas,
                    const std::string& out_dir, int jobs);

int main_entry(int argc, char** argv);

}  // namespace enki::cli
