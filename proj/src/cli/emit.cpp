#include "enki/cli/emit.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace enki::cli {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

namespace {

void require_finite(double v, int t) {
  if (!std::isfinite(v))
    throw std::runtime_error("non-finite value in trace at iteration " +
                             std::to_string(t));
}

json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

}  // namespace

std::string trace_csv(const SolverResult& result) {
  std::ostringstream out;
  const auto& trace = result.trace;
  const Eigen::Index d_theta = trace.empty() ? 0 : trace[0].theta_mean.size();
  const Eigen::Index d_x = trace.empty() ? 0 : trace[0].x_prior_mean.size();

  out << "t,norm_C_theta_theta,norm_C_theta_Hx,norm_C_Hx_Hx,norm_K,"
         "innovation,gain_delta_after_resample,sigma_sq";
  for (Eigen::Index i = 0; i < d_theta; ++i) out << ",theta_mean_" << i;
  for (Eigen::Index i = 0; i < d_x; ++i) out << ",x_prior_mean_" << i;
  for (Eigen::Index i = 0; i < d_x; ++i) out << ",x_post_mean_" << i;
  out << "\n";

  for (const auto& r : trace) {
    const double scalars[] = {r.norm_C_theta_theta,
                              r.norm_C_theta_Hx,
                              r.norm_C_Hx_Hx,
                              r.norm_K,
                              r.innovation,
                              r.gain_delta_after_resample,
                              r.sigma_sq};
    out << r.t;
    for (double v : scalars) {
      require_finite(v, r.t);
      out << ',' << format_double(v);
    }
    auto emit_vec = [&](const Eigen::VectorXd& v) {
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        require_finite(v(i), r.t);
        out << ',' << format_double(v(i));
      }
    };
    emit_vec(r.theta_mean);
    emit_vec(r.x_prior_mean);
    emit_vec(r.x_post_mean);
    out << "\n";
  }
  return out.str();
}

std::string summary_json(const SolverResult& result) {
  json j;
  j["status"] = to_string(result.status);
  j["iterations"] = result.iterations;
  j["theta_hat"] = vec_to_json(result.theta_hat);
  j["final_innovation"] =
      result.trace.empty() ? 0.0 : result.trace.back().innovation;
  if (result.steady_state) {
    const auto& s = *result.steady_state;
    j["steady_state"] = {{"oscillation_norm", s.oscillation.norm()},
                         {"prior_error_norm", s.prior_error.norm()},
                         {"post_error_norm", s.post_error.norm()},
                         {"identity_residual", s.identity_residual}};
  } else {
    j["steady_state"] = nullptr;
  }
  return j.dump(2) + "\n";
}

std::string manifest_json(const RunConfig& cfg, const std::string& config_path,
                          const std::vector<std::string>& artifacts,
                          double wall_seconds) {
  json j;
  j["library_version"] = "0.1.0";
  j["config_path"] = config_path;
  j["master_seed"] = cfg.solver.seed;
  j["wall_seconds"] = wall_seconds;
  j["artifacts"] = artifacts;
  j["config"] = {
      {"problem", cfg.problem_id},
      {"J", cfg.solver.J},
      {"tol", cfg.solver.tol},
      {"max_iter", cfg.solver.max_iter},
      {"seed", cfg.solver.seed},
      {"resampling", resampling_name(cfg.solver.resampling)},
      {"fixed_perturbations", cfg.solver.fixed_perturbations},
      {"mean_observations", cfg.solver.mean_observations},
      {"update_only", cfg.solver.update_only},
      {"covariance_divisor",
       cfg.solver.covariance_divisor == DivisorConvention::PopulationJ
           ? "population"
           : "sample"},
      {"stagnation_window", cfg.solver.stagnation_window},
      {"stagnation_gain_eps", cfg.solver.stagnation_gain_eps},
      {"gamma", cfg.gamma},
  };
  return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

}  // namespace enki::cli
