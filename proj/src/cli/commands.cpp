#include "enki/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "enki/cli/config.hpp"
#include "enki/cli/emit.hpp"

namespace enki::cli {

namespace fs = std::filesystem;

namespace {

int status_exit_code(SolverStatus s) {
  switch (s) {
    case SolverStatus::ConvergedInnovation:
      return 0;
    case SolverStatus::EarlyStopped:
      return 2;
    case SolverStatus::MaxIterations:
      return 3;
  }
  return 1;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

/// Run `count` jobs on up to `jobs` worker threads; exceptions rethrown.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr err;
  std::vector<std::thread> workers;
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!err) err = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (err) std::rethrow_exception(err);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

int cmd_run(const std::string& config_path, const std::string& out_dir) {
  try {
    const auto start = std::chrono::steady_clock::now();
    RunConfig cfg = load_config(config_path);
    const ProblemInstance problem = cfg.build_problem();
    const SolverResult result = run(problem, cfg.solver);

    fs::create_directories(out_dir);
    const std::string trace_path = join_path(out_dir, "trace.csv");
    const std::string summary_path = join_path(out_dir, "summary.json");
    const std::string manifest_path = join_path(out_dir, "manifest.json");
    write_file(trace_path, trace_csv(result));
    write_file(summary_path, summary_json(result));
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    write_file(manifest_path,
               manifest_json(cfg, config_path,
                             {trace_path, summary_path, manifest_path}, secs));
    std::cout << "status=" << to_string(result.status)
              << " iterations=" << result.iterations << "\n";
    return status_exit_code(result.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_compare_distributions(const std::string& config_path, int seeds,
                              const std::string& out_dir, int jobs) {
  try {
    if (seeds < 1) throw std::runtime_error("seeds must be >= 1");
    RunConfig cfg = load_config(config_path);
    const ProblemInstance problem = cfg.build_problem();

    const std::vector<std::string> dists = {"off", "uniform", "gaussian",
                                            "laplace"};
    struct Row {
      std::string dist;
      std::uint64_t seed;
      SolverStatus status;
      int iterations;
      double final_innovation;
    };
    std::vector<Row> rows(dists.size() * static_cast<std::size_t>(seeds));

    parallel_for(static_cast<int>(rows.size()), jobs, [&](int i) {
      const std::size_t di = static_cast<std::size_t>(i) /
                             static_cast<std::size_t>(seeds);
      const int si = i % seeds;
      SolverConfig sc = cfg.solver;
      sc.seed = cfg.solver.seed + static_cast<std::uint64_t>(si);
      if (dists[di] == "off") {
        sc.resampling.mode = ResampleMode::Off;
      } else {
        sc.resampling.mode = ResampleMode::EveryIteration;
        sc.resampling.base = dists[di] == "uniform"
                                 ? BaseDistribution::Uniform
                                 : dists[di] == "gaussian"
                                       ? BaseDistribution::Gaussian
                                       : BaseDistribution::Laplace;
      }
      const SolverResult r = run(problem, sc);
      rows[static_cast<std::size_t>(i)] =
          Row{dists[di], sc.seed, r.status, r.iterations,
              r.trace.empty() ? 0.0 : r.trace.back().innovation};
    });

    fs::create_directories(out_dir);
    std::ostringstream csv;
    csv << "distribution,seed,status,iterations,final_innovation\n";
    for (const auto& r : rows)
      csv << r.dist << ',' << r.seed << ',' << to_string(r.status) << ','
          << r.iterations << ',' << format_double(r.final_innovation) << "\n";
    write_file(join_path(out_dir, "compare.csv"), csv.str());

    nlohmann::json summary;
    for (const auto& d : dists) {
      std::vector<double> iters;
      for (const auto& r : rows)
        if (r.dist == d) iters.push_back(static_cast<double>(r.iterations));
      summary[d] = {{"median_iterations", median(iters)}};
    }
    write_file(join_path(out_dir, "compare_summary.json"),
               summary.dump(2) + "\n");
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_sweep_gamma(const std::string& config_path,
                    const std::vector<double>& gammas,
                    const std::string& out_dir, int jobs) {
  try {
    if (gammas.empty()) throw std::runtime_error("at least one gamma required");
    for (double g : gammas)
      if (!(g > 0.0)) throw std::runtime_error("gamma values must be positive");
    RunConfig cfg = load_config(config_path);

    struct Row {
      double gamma;
      SolverStatus status;
      int iterations;
      bool have_ss;
      double oscillation_norm;
      double post_error_norm;
    };
    std::vector<Row> rows(gammas.size());

    parallel_for(static_cast<int>(gammas.size()), jobs, [&](int i) {
      RunConfig local = cfg;
      local.gamma = gammas[static_cast<std::size_t>(i)];
      local.solver.resampling.mode = ResampleMode::Off;
      const ProblemInstance problem = local.build_problem();
      const SolverResult r = run(problem, local.solver);
      Row row{local.gamma, r.status, r.iterations, false, 0.0, 0.0};
      if (r.steady_state) {
        row.have_ss = true;
        row.oscillation_norm = r.steady_state->oscillation.norm();
        row.post_error_norm = r.steady_state->post_error.norm();
      }
      rows[static_cast<std::size_t>(i)] = row;
    });

    fs::create_directories(out_dir);
    std::ostringstream csv;
    csv << "gamma,status,iterations,oscillation_norm,post_error_norm\n";
    for (const auto& r : rows) {
      csv << format_double(r.gamma) << ',' << to_string(r.status) << ','
          << r.iterations << ',';
      if (r.have_ss)
        csv << format_double(r.oscillation_norm) << ','
            << format_double(r.post_error_norm);
      else
        csv << ',';
      csv << "\n";
    }
    write_file(join_path(out_dir, "gamma_sweep.csv"), csv.str());
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Iterative ensemble Kalman inversion with moment-matched "
               "resampling"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  int seeds = 20;
  int jobs = 1;
  std::vector<double> gammas;

  auto* run_cmd = app.add_subcommand("run", "run one configured experiment");
  run_cmd->add_option("config", config_path, "JSON config file")->required();
  run_cmd->add_option("-o,--out", out_dir, "output directory");

  auto* cmp_cmd = app.add_subcommand(
      "compare-distributions",
      "run off/uniform/gaussian/laplace resampling across seeds");
  cmp_cmd->add_option("config", config_path, "JSON config file")->required();
  cmp_cmd->add_option("-o,--out", out_dir, "output directory");
  cmp_cmd->add_option("--seeds", seeds, "number of seeds per distribution");
  cmp_cmd->add_option("--jobs", jobs, "parallel runs");

  auto* sweep_cmd = app.add_subcommand(
      "sweep-gamma", "steady-state diagnostics across observation noise");
  sweep_cmd->add_option("config", config_path, "JSON config file")->required();
  sweep_cmd->add_option("-o,--out", out_dir, "output directory");
  sweep_cmd->add_option("--gamma", gammas, "gamma values")->required();
  sweep_cmd->add_option("--jobs", jobs, "parallel runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (run_cmd->parsed()) return cmd_run(config_path, out_dir);
  if (cmp_cmd->parsed())
    return cmd_compare_distributions(config_path, seeds, out_dir, jobs);
  if (sweep_cmd->parsed())
    return cmd_sweep_gamma(config_path, gammas, out_dir, jobs);
  return 1;
}

}  // namespace enki::cli
