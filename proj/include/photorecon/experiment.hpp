#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "photorecon/detector_model.hpp"
#include "photorecon/direct_inversion.hpp"
#include "photorecon/error.hpp"
#include "photorecon/io.hpp"
#include "photorecon/landweber.hpp"
#include "photorecon/metrics.hpp"
#include "photorecon/sampling.hpp"
#include "photorecon/states.hpp"

namespace photorecon {

struct StateSpec {
  std::string kind;      // thermal | spats | even_cat | fock | file
  double parameter = 0;  // mean_n (thermal, spats) or alpha_sq (even_cat)
  int fock_n = 0;
  std::string path;      // kind == file
  double tail = 1e-10;
};

inline PhotonDistribution make_state(const StateSpec& spec) {
  if (spec.kind == "thermal") return thermal(spec.parameter, spec.tail);
  if (spec.kind == "spats") return spats(spec.parameter, spec.tail);
  if (spec.kind == "even_cat") return even_cat(spec.parameter, spec.tail);
  if (spec.kind == "fock") return fock(spec.fock_n);
  if (spec.kind == "file") return from_file(spec.path);
  fail(ErrorKind::config_invalid, "unknown state kind '" + spec.kind + "'");
}

/// One reconstruction experiment: true state -> forward model with the true
/// detector -> sampling -> reconstruction with the assumed detector.
struct ExperimentConfig {
  std::string name;
  StateSpec state;
  DetectorParams detector_true;
  DetectorParams detector_assumed;
  double count_tail = 1e-10;              // truncation of the photocount window
  std::optional<SamplingConfig> sampling;  // empty: use the exact forward image
  LandweberConfig solver;
  bool auto_noise_level = true;
  bool even_support = false;
  bool direct_inversion = false;
  std::string output_dir;

  void validate() const {
    detector_true.validate();
    detector_assumed.validate();
    require(count_tail > 0.0 && count_tail < 1.0, ErrorKind::config_invalid,
            "count_tail must lie in (0, 1)");
    if (sampling) sampling->validate();
    solver.validate();
  }
};

namespace detail {

inline void reject_unknown_keys(const Json& j, const std::set<std::string>& allowed,
                                const std::string& where) {
  require(j.is_object(), ErrorKind::config_invalid, where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    require(allowed.count(it.key()) > 0, ErrorKind::config_invalid,
            "unknown key '" + it.key() + "' in " + where);
  }
}

template <typename T>
T get_field(const Json& j, const char* key, const std::string& where) {
  require(j.contains(key), ErrorKind::config_invalid,
          "missing key '" + std::string(key) + "' in " + where);
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::config_invalid, "key '" + std::string(key) + "' in " + where +
                                        " has the wrong type");
  }
}

template <typename T>
T get_field_or(const Json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  return get_field<T>(j, key, where);
}

inline DetectorParams parse_detector(const Json& j, const std::string& where) {
  reject_unknown_keys(j, {"eta", "n_noise"}, where);
  return {get_field<double>(j, "eta", where), get_field<double>(j, "n_noise", where)};
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(const Json& j) {
  using detail::get_field;
  using detail::get_field_or;
  detail::reject_unknown_keys(j,
                              {"name", "state", "detector_true", "detector_assumed", "count_tail",
                               "sampling", "solver", "constraints", "direct_inversion",
                               "output_dir"},
                              "experiment config");
  ExperimentConfig cfg;
  cfg.name = get_field_or<std::string>(j, "name", "experiment", "experiment config");

  const Json& st = j.contains("state") ? j.at("state") : Json();
  detail::reject_unknown_keys(st, {"kind", "mean_n", "alpha_sq", "n", "path", "tail"}, "state");
  cfg.state.kind = get_field<std::string>(st, "kind", "state");
  cfg.state.tail = get_field_or<double>(st, "tail", 1e-10, "state");
  if (cfg.state.kind == "thermal" || cfg.state.kind == "spats") {
    cfg.state.parameter = get_field<double>(st, "mean_n", "state");
  } else if (cfg.state.kind == "even_cat") {
    cfg.state.parameter = get_field<double>(st, "alpha_sq", "state");
  } else if (cfg.state.kind == "fock") {
    cfg.state.fock_n = get_field<int>(st, "n", "state");
  } else if (cfg.state.kind == "file") {
    cfg.state.path = get_field<std::string>(st, "path", "state");
  } else {
    fail(ErrorKind::config_invalid, "unknown state kind '" + cfg.state.kind + "'");
  }

  require(j.contains("detector_true"), ErrorKind::config_invalid, "missing detector_true");
  cfg.detector_true = detail::parse_detector(j.at("detector_true"), "detector_true");
  cfg.detector_assumed = j.contains("detector_assumed")
                             ? detail::parse_detector(j.at("detector_assumed"), "detector_assumed")
                             : cfg.detector_true;
  cfg.count_tail = get_field_or<double>(j, "count_tail", 1e-10, "experiment config");

  if (j.contains("sampling") && !j.at("sampling").is_null()) {
    const Json& s = j.at("sampling");
    detail::reject_unknown_keys(s, {"events", "seed"}, "sampling");
    cfg.sampling = SamplingConfig{get_field<long long>(s, "events", "sampling"),
                                  get_field_or<std::uint64_t>(s, "seed", 0, "sampling")};
  }

  if (j.contains("solver")) {
    const Json& s = j.at("solver");
    detail::reject_unknown_keys(
        s, {"chi", "max_iterations", "discrepancy_tau", "noise_level", "stagnation_tol"}, "solver");
    if (s.contains("chi") && !(s.at("chi").is_string() && s.at("chi") == "auto")) {
      cfg.solver.chi = get_field<double>(s, "chi", "solver");
    }
    cfg.solver.max_iterations = get_field_or<int>(s, "max_iterations", 100000, "solver");
    cfg.solver.discrepancy_tau = get_field_or<double>(s, "discrepancy_tau", 1.1, "solver");
    cfg.solver.stagnation_tol = get_field_or<double>(s, "stagnation_tol", 1e-9, "solver");
    if (s.contains("noise_level") && !(s.at("noise_level").is_string() &&
                                       s.at("noise_level") == "auto")) {
      cfg.solver.noise_level = get_field<double>(s, "noise_level", "solver");
      cfg.auto_noise_level = false;
    }
  }

  if (j.contains("constraints")) {
    const Json& c = j.at("constraints");
    detail::reject_unknown_keys(c, {"support"}, "constraints");
    const auto support = get_field_or<std::string>(c, "support", "all", "constraints");
    require(support == "all" || support == "even", ErrorKind::config_invalid,
            "constraints.support must be \"all\" or \"even\"");
    cfg.even_support = support == "even";
  }
  cfg.direct_inversion = get_field_or<bool>(j, "direct_inversion", false, "experiment config");
  cfg.output_dir = get_field_or<std::string>(j, "output_dir", "", "experiment config");
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(parse_json(read_text_file(path), path.string()));
}

/// Canonical JSON form; its hash identifies the run in every output file.
inline Json to_json(const ExperimentConfig& cfg) {
  Json j;
  j["name"] = cfg.name;
  Json st;
  st["kind"] = cfg.state.kind;
  if (cfg.state.kind == "thermal" || cfg.state.kind == "spats") st["mean_n"] = cfg.state.parameter;
  if (cfg.state.kind == "even_cat") st["alpha_sq"] = cfg.state.parameter;
  if (cfg.state.kind == "fock") st["n"] = cfg.state.fock_n;
  if (cfg.state.kind == "file") st["path"] = cfg.state.path;
  st["tail"] = cfg.state.tail;
  j["state"] = st;
  j["detector_true"] = {{"eta", cfg.detector_true.eta}, {"n_noise", cfg.detector_true.n_noise}};
  j["detector_assumed"] = {{"eta", cfg.detector_assumed.eta},
                           {"n_noise", cfg.detector_assumed.n_noise}};
  j["count_tail"] = cfg.count_tail;
  j["sampling"] = cfg.sampling ? Json{{"events", cfg.sampling->events},
                                      {"seed", cfg.sampling->seed}}
                               : Json(nullptr);
  Json solver;
  solver["chi"] = cfg.solver.chi ? Json(*cfg.solver.chi) : Json("auto");
  solver["max_iterations"] = cfg.solver.max_iterations;
  solver["discrepancy_tau"] = cfg.solver.discrepancy_tau;
  solver["noise_level"] = cfg.auto_noise_level ? Json("auto") : Json(cfg.solver.noise_level);
  solver["stagnation_tol"] = cfg.solver.stagnation_tol;
  j["solver"] = solver;
  j["constraints"] = {{"support", cfg.even_support ? "even" : "all"}};
  j["direct_inversion"] = cfg.direct_inversion;
  j["output_dir"] = cfg.output_dir;
  return j;
}

/// Where results go does not change them, so output_dir is left out.
inline std::string config_hash(const ExperimentConfig& cfg) {
  Json j = to_json(cfg);
  j.erase("output_dir");
  return hex64(fnv1a64(dump_json(j)));
}

struct ExperimentResult {
  PhotonDistribution truth;
  CountDistribution true_counts;
  CountDistribution measured;            // sampled frequencies or the exact image
  double data_relative_error = 0.0;      // delta_P
  double noise_level = 0.0;              // used by the discrepancy stop
  SolveReport report;
  ErrorReport errors;                    // delta_p, residual, normalization
  std::optional<std::vector<double>> direct_estimate;
  std::optional<double> direct_relative_error;
  std::optional<std::string> direct_failure;
  std::vector<std::string> files_written;
};

namespace detail {

template <typename F>
auto run_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("stage '") + stage + "': " + e.what());
  }
}

}  // namespace detail

/// Plot-ready table: n, p_true, p_reconstructed, P_simulated.
inline std::string plot_data_csv(const std::vector<double>& p_true,
                                 const std::vector<double>& p_rec,
                                 const std::vector<double>& counts) {
  const std::size_t len = std::max({p_true.size(), p_rec.size(), counts.size()});
  auto at = [](const std::vector<double>& v, std::size_t i) {
    return i < v.size() ? format_real(v[i]) : std::string();
  };
  std::string out = "n,p_true,p_reconstructed,P_simulated\n";
  for (std::size_t n = 0; n < len; ++n) {
    out += std::to_string(n) + "," + at(p_true, n) + "," + at(p_rec, n) + "," + at(counts, n) +
           "\n";
  }
  return out;
}

/// Reconstruction matrix for the assumed detector, shaped to the data.
inline ResponseMatrix reconstruction_matrix(const DetectorParams& assumed, int n_max,
                                            std::size_t count_size) {
  return build_response(assumed, n_max, static_cast<int>(count_size) - 1);
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res;

  res.truth = detail::run_stage("state", [&] { return make_state(cfg.state); });
  const int n_max = res.truth.n_max();

  res.true_counts = detail::run_stage("forward", [&] {
    const int m_max = suggest_m_max(cfg.detector_true, n_max, cfg.count_tail);
    return forward(build_response(cfg.detector_true, n_max, m_max), res.truth);
  });

  res.measured = detail::run_stage("sample", [&] {
    return cfg.sampling ? sample_counts(res.true_counts, *cfg.sampling) : res.true_counts;
  });
  res.data_relative_error = relative_error(res.measured.probs, res.true_counts.probs);

  const auto mat = detail::run_stage("solve", [&] {
    return reconstruction_matrix(cfg.detector_assumed, n_max, res.measured.size());
  });
  LandweberConfig solver = cfg.solver;
  if (cfg.auto_noise_level) {
    solver.noise_level =
        cfg.sampling ? sampling_noise_level(res.measured, cfg.sampling->events) : 0.0;
  }
  res.noise_level = solver.noise_level;
  const ConstraintSet constraints = cfg.even_support ? ConstraintSet::even_support(mat.n_max() + 1)
                                                     : ConstraintSet::nonnegative();
  res.report = detail::run_stage("solve", [&] { return solve(mat, res.measured, constraints, solver); });
  res.errors = detail::run_stage(
      "metrics", [&] { return evaluate(mat, res.report.estimate, res.truth.probs, res.measured); });

  if (cfg.direct_inversion) {
    try {
      res.direct_estimate = direct_reconstruct(cfg.detector_assumed, res.measured, n_max);
      res.direct_relative_error = relative_error(*res.direct_estimate, res.truth.probs);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::overflow) throw;
      res.direct_failure = e.what();
    }
  }

  if (cfg.output_dir.empty()) return res;
  detail::run_stage("output", [&] {
    const std::filesystem::path dir(cfg.output_dir);
    Provenance prov{config_hash(cfg), std::nullopt, ""};
    if (cfg.sampling) {
      prov.seed = cfg.sampling->seed;
      prov.generator = std::string(kGeneratorName);
    }
    auto write = [&](const std::string& file, const std::string& text) {
      write_text_file(dir / file, text);
      res.files_written.push_back((dir / file).string());
    };
    write("p_true.json",
          dump_json(distribution_json(res.truth.probs, prov,
                                      {{"truncation_tail", res.truth.truncation_tail}})));
    write("P_true.json", dump_json(distribution_json(res.true_counts.probs, prov)));
    Json measured_meta = Json::object();
    if (cfg.sampling) {
      measured_meta = {{"nu", cfg.sampling->events},
                       {"seed", cfg.sampling->seed},
                       {"generator", std::string(kGeneratorName)}};
    }
    write("P_measured.json", dump_json(distribution_json(res.measured.probs, prov, measured_meta)));
    write("p_reconstructed.json", dump_json(distribution_json(res.report.estimate, prov)));
    write("solve_report.json", dump_json(solve_report_json(res.report, prov)));

    Json errors;
    errors["data_relative_error"] = res.data_relative_error;
    errors["noise_level"] = res.noise_level;
    errors["landweber"] = error_report_json(res.errors);
    if (cfg.direct_inversion) {
      Json direct;
      if (res.direct_estimate) {
        direct["relative_error"] = *res.direct_relative_error;
      } else {
        direct["failure"] = *res.direct_failure;
      }
      errors["direct"] = direct;
    }
    errors["provenance"] = prov.to_json();
    write("error_report.json", dump_json(errors));
    if (res.direct_estimate) {
      write("p_direct.json", dump_json(distribution_json(*res.direct_estimate, prov)));
    }
    write("plot_data.csv", plot_data_csv(res.truth.probs, res.report.estimate, res.measured.probs));
    write("config.json", dump_json(to_json(cfg)));
    return 0;
  });
  return res;
}

}  // namespace photorecon
