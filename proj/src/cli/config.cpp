#include "enki/cli/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace enki::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw std::runtime_error("config error at '" + path + "': " + msg);
}

Eigen::VectorXd to_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected non-empty array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(path, "expected numeric entries");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd to_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    fail(path, "expected array of arrays");
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      fail(path, "ragged rows");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          j[r][c].get<double>();
  }
  return m;
}

}  // namespace

ProblemInstance RunConfig::build_problem() const {
  if (problem_id == "gaussian_bumps") {
    GaussianBumpsOptions opt;
    if (init_mean.size() > 0) {
      if (init_mean.size() != 2)
        throw std::runtime_error("config error at 'init_mean': gaussian_bumps needs 2 entries");
      opt.init_mean = init_mean;
    }
    opt.gamma = gamma;
    if (y_bar.size() > 0) opt.y_bar = y_bar(0);
    if (init_cov_scale >= 0.0) opt.init_cov_scale = init_cov_scale;
    ProblemInstance p = gaussian_bumps_problem(opt);
    if (init_cov.size() > 0) p.init_cov = init_cov;
    return p;
  }
  if (problem_id == "linear") {
    if (F.size() == 0) throw std::runtime_error("config error at 'F': required for linear problem");
    if (H.size() == 0) throw std::runtime_error("config error at 'H': required for linear problem");
    ProblemInstance p;
    p.id = "linear";
    p.model = linear_model(F);
    if (H.cols() != p.model.d_x)
      throw std::runtime_error("config error at 'H': column count must equal state dimension");
    Eigen::VectorXd yb = y_bar;
    if (yb.size() == 0) yb = Eigen::VectorXd::Zero(H.rows());
    p.obs = ObservationSpec::scalar_noise(H, yb, gamma);
    p.init_mean = init_mean.size() > 0 ? init_mean
                                       : Eigen::VectorXd::Zero(p.model.d_theta);
    if (init_cov.size() > 0) {
      p.init_cov = init_cov;
    } else {
      const double scale = init_cov_scale >= 0.0 ? init_cov_scale : 1.0;
      p.init_cov = scale * Eigen::MatrixXd::Identity(p.model.d_theta,
                                                     p.model.d_theta);
    }
    return p;
  }
  throw std::runtime_error("config error at 'problem': unknown problem id '" +
                           problem_id + "'");
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config error at '': expected a JSON object");

  static const std::set<std::string> known = {
      "problem",   "J",           "tol",
      "max_iter",  "seed",        "resampling",
      "rank_tol",  "fixed_perturbations", "mean_observations",
      "update_only", "covariance_divisor", "stagnation_window",
      "stagnation_gain_eps", "init_mean", "init_cov",
      "gamma",     "y_bar",       "F",
      "H"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) fail(it.key(), "unknown key");

  RunConfig cfg;
  if (!j.contains("problem") || !j["problem"].is_string())
    fail("problem", "required string");
  cfg.problem_id = j["problem"].get<std::string>();

  auto num = [&](const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number()) fail(key, "expected number");
    return j[key].get<double>();
  };
  auto boolean = [&](const char* key, bool dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_boolean()) fail(key, "expected boolean");
    return j[key].get<bool>();
  };

  cfg.solver.J = static_cast<Eigen::Index>(num("J", 100));
  cfg.solver.tol = num("tol", SolverConfig{}.tol);
  cfg.solver.max_iter = static_cast<int>(num("max_iter", 5000));
  cfg.solver.seed = static_cast<std::uint64_t>(num("seed", 1));
  cfg.solver.fixed_perturbations = boolean("fixed_perturbations", false);
  cfg.solver.mean_observations = boolean("mean_observations", false);
  cfg.solver.update_only = boolean("update_only", false);
  cfg.solver.stagnation_window = static_cast<int>(num("stagnation_window", 50));
  cfg.solver.stagnation_gain_eps = num("stagnation_gain_eps", 1e-6);
  cfg.solver.resampling.rank_tol = num("rank_tol", 1e-12);

  if (j.contains("resampling")) {
    if (!j["resampling"].is_string()) fail("resampling", "expected string");
    const std::string r = j["resampling"].get<std::string>();
    if (r == "off") {
      cfg.solver.resampling.mode = ResampleMode::Off;
    } else {
      cfg.solver.resampling.mode = ResampleMode::EveryIteration;
      if (r == "uniform")
        cfg.solver.resampling.base = BaseDistribution::Uniform;
      else if (r == "gaussian")
        cfg.solver.resampling.base = BaseDistribution::Gaussian;
      else if (r == "laplace")
        cfg.solver.resampling.base = BaseDistribution::Laplace;
      else
        fail("resampling", "expected off|uniform|gaussian|laplace");
    }
  }

  if (j.contains("covariance_divisor")) {
    if (!j["covariance_divisor"].is_string())
      fail("covariance_divisor", "expected string");
    const std::string c = j["covariance_divisor"].get<std::string>();
    if (c == "population")
      cfg.solver.covariance_divisor = DivisorConvention::PopulationJ;
    else if (c == "sample")
      cfg.solver.covariance_divisor = DivisorConvention::SampleJminus1;
    else
      fail("covariance_divisor", "expected population|sample");
  }

  cfg.gamma = num("gamma", 0.01);
  if (cfg.gamma <= 0.0) fail("gamma", "must be positive");
  if (j.contains("init_mean")) cfg.init_mean = to_vector(j["init_mean"], "init_mean");
  if (j.contains("init_cov")) {
    if (j["init_cov"].is_number()) {
      cfg.init_cov_scale = j["init_cov"].get<double>();
      if (cfg.init_cov_scale < 0.0) fail("init_cov", "must be >= 0");
    } else {
      cfg.init_cov = to_matrix(j["init_cov"], "init_cov");
    }
  }
  if (j.contains("y_bar")) cfg.y_bar = to_vector(j["y_bar"], "y_bar");
  if (j.contains("F")) cfg.F = to_matrix(j["F"], "F");
  if (j.contains("H")) cfg.H = to_matrix(j["H"], "H");

  if (const char* env = std::getenv("ENKI_SEED")) {
    cfg.solver.seed = static_cast<std::uint64_t>(std::strtoull(env, nullptr, 10));
  }

  cfg.solver.validate();
  cfg.build_problem();  // validates problem-side fields early
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string resampling_name(const ResamplingPolicy& p) {
  if (p.mode == ResampleMode::Off) return "off";
  switch (p.base) {
    case BaseDistribution::Uniform:
      return "uniform";
    case BaseDistribution::Gaussian:
      return "gaussian";
    case BaseDistribution::Laplace:
      return "laplace";
  }
  return "off";
}

}  // namespace enki::cli
