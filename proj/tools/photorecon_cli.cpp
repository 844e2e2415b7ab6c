// photorecon: command-line front end for photon-number reconstruction.
//
// Every subcommand reads and writes the distribution JSON format so steps can
// be chained through files; `run` executes a whole experiment from a config.

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "photorecon/photorecon.hpp"

namespace {

using namespace photorecon;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string output;
  std::string format = "json";
};

void emit(const GlobalOptions& g, const std::string& text) {
  if (g.output.empty()) {
    std::cout << text;
  } else {
    write_text_file(g.output, text);
  }
}

// Provenance for a subcommand: the hash covers the subcommand name and the
// parameters it actually used.
Provenance provenance_for(const std::string& command, Json params,
                          std::optional<std::uint64_t> seed = std::nullopt) {
  params["command"] = command;
  Provenance prov{hex64(fnv1a64(dump_json(params))), seed, ""};
  if (seed) prov.generator = std::string(kGeneratorName);
  return prov;
}

void emit_distribution(const GlobalOptions& g, const std::vector<double>& probs,
                       const Provenance& prov, Json meta = Json::object()) {
  emit(g, g.format == "csv" ? distribution_csv(probs)
                            : dump_json(distribution_json(probs, prov, std::move(meta))));
}

int report_error(const std::string& kind, const std::string& message, int code) {
  Json err;
  err["error"] = {{"kind", kind}, {"message", message}, {"exit_code", code}};
  std::cerr << dump_json(err);
  return code;
}

struct DetectorArgs {
  double eta = 1.0;
  double noise = 0.0;
  void add(CLI::App* cmd) {
    cmd->add_option("--eta", eta, "Detection efficiency in (0, 1]")->required();
    cmd->add_option("--noise", noise, "Mean number of noise counts")->required();
  }
  DetectorParams params() const {
    DetectorParams p{eta, noise};
    p.validate();
    return p;
  }
  Json json() const { return {{"eta", eta}, {"n_noise", noise}}; }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photon-number distribution reconstruction from photocounting statistics"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(0, 1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed_value = 0;
  app.add_option("--config", g.config, "Experiment config (JSON)");
  auto* seed_opt = app.add_option("--seed", seed_value, "Random seed (u64)");
  app.add_option("--output", g.output, "Output file (subcommands) or directory (run)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  // gen-state
  auto* gen = app.add_subcommand("gen-state", "Generate a photon-number distribution");
  std::string gen_kind;
  double gen_mean = 0.0, gen_alpha_sq = 0.0, gen_tail = 1e-10;
  int gen_n = 0;
  std::string gen_path;
  gen->add_option("kind", gen_kind, "thermal | spats | even_cat | fock | file")
      ->required()
      ->check(CLI::IsMember({"thermal", "spats", "even_cat", "fock", "file"}));
  gen->add_option("--mean", gen_mean, "Mean thermal photon number (thermal, spats)");
  gen->add_option("--alpha-sq", gen_alpha_sq, "|alpha|^2 (even_cat)");
  gen->add_option("--n", gen_n, "Photon number (fock)");
  gen->add_option("--path", gen_path, "Distribution file (file)");
  gen->add_option("--tail", gen_tail, "Maximum discarded probability mass");

  // build-detector
  auto* bd = app.add_subcommand("build-detector", "Export the truncated response matrix");
  DetectorArgs bd_det;
  bd_det.add(bd);
  int bd_n_max = 0;
  std::optional<int> bd_m_max;
  double bd_tail = 1e-10;
  bd->add_option("--n-max", bd_n_max, "Largest photon number")->required();
  bd->add_option("--m-max", bd_m_max, "Largest photocount (default from --tail)");
  bd->add_option("--tail", bd_tail, "Column truncation mass for the default m-max");

  // forward
  auto* fw = app.add_subcommand("forward", "Photocount distribution of a photon distribution");
  DetectorArgs fw_det;
  fw_det.add(fw);
  std::string fw_input;
  std::optional<int> fw_m_max;
  double fw_tail = 1e-10;
  fw->add_option("--input", fw_input, "Photon-number distribution file")->required();
  fw->add_option("--m-max", fw_m_max, "Largest photocount (default from --tail)");
  fw->add_option("--tail", fw_tail, "Column truncation mass for the default m-max");

  // sample
  auto* sm = app.add_subcommand("sample", "Simulate measured frequencies");
  std::string sm_input;
  long long sm_nu = 0;
  sm->add_option("--input", sm_input, "Photocount distribution file")->required();
  sm->add_option("--nu", sm_nu, "Number of measurement events")->required();

  // reconstruct
  auto* rc = app.add_subcommand("reconstruct", "Projected Landweber reconstruction");
  DetectorArgs rc_det;
  rc_det.add(rc);
  std::string rc_input, rc_support = "all";
  int rc_n_max = 0;
  std::optional<long long> rc_nu;
  std::optional<double> rc_noise_level, rc_chi;
  LandweberConfig rc_cfg;
  rc->add_option("--input", rc_input, "Measured photocount distribution file")->required();
  rc->add_option("--n-max", rc_n_max, "Largest reconstructed photon number")->required();
  rc->add_option("--nu", rc_nu, "Events behind the data (sets the noise level)");
  rc->add_option("--noise-level", rc_noise_level, "Explicit Euclidean data-error estimate");
  rc->add_option("--chi", rc_chi, "Relaxation parameter (default 1/sigma_max^2)");
  rc->add_option("--max-iterations", rc_cfg.max_iterations, "Iteration cap");
  rc->add_option("--tau", rc_cfg.discrepancy_tau, "Discrepancy-principle factor");
  rc->add_option("--stagnation-tol", rc_cfg.stagnation_tol, "Relative iterate-change stop");
  rc->add_option("--support", rc_support, "Allowed photon numbers")
      ->check(CLI::IsMember({"all", "even"}));

  // invert-direct
  auto* id = app.add_subcommand("invert-direct", "Analytic (unregularized) inverse");
  DetectorArgs id_det;
  id_det.add(id);
  std::string id_input;
  int id_n_max = 0;
  id->add_option("--input", id_input, "Measured photocount distribution file")->required();
  id->add_option("--n-max", id_n_max, "Largest reconstructed photon number")->required();

  // metrics
  auto* mt = app.add_subcommand("metrics", "Relative error and residual of an estimate");
  std::string mt_estimate, mt_truth, mt_measured;
  std::optional<double> mt_eta, mt_noise;
  mt->add_option("--estimate", mt_estimate, "Estimated distribution file")->required();
  mt->add_option("--truth", mt_truth, "Reference distribution file")->required();
  mt->add_option("--measured", mt_measured, "Measured photocounts (enables the residual)");
  mt->add_option("--eta", mt_eta, "Assumed efficiency for the residual");
  mt->add_option("--noise", mt_noise, "Assumed noise counts for the residual");

  auto* run = app.add_subcommand("run", "Run a full experiment from --config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), kExitConfig);
  }
  if (seed_opt->count() > 0) g.seed = seed_value;

  try {
    if (*gen) {
      StateSpec spec{gen_kind, gen_kind == "even_cat" ? gen_alpha_sq : gen_mean, gen_n, gen_path,
                     gen_tail};
      const auto p = make_state(spec);
      Json params = {{"kind", gen_kind}, {"tail", gen_tail}};
      if (gen_kind == "thermal" || gen_kind == "spats") params["mean_n"] = gen_mean;
      if (gen_kind == "even_cat") params["alpha_sq"] = gen_alpha_sq;
      if (gen_kind == "fock") params["n"] = gen_n;
      if (gen_kind == "file") params["path"] = gen_path;
      emit_distribution(g, p.probs, provenance_for("gen-state", params),
                        {{"truncation_tail", p.truncation_tail}});
    } else if (*bd) {
      const auto params = bd_det.params();
      const int m_max = bd_m_max ? *bd_m_max : suggest_m_max(params, bd_n_max, bd_tail);
      const auto mat = build_response(params, bd_n_max, m_max);
      Json used = bd_det.json();
      used["n_max"] = bd_n_max;
      used["m_max"] = m_max;
      if (g.format == "csv") {
        std::string out;
        for (Eigen::Index m = 0; m < mat.entries.rows(); ++m) {
          for (Eigen::Index n = 0; n < mat.entries.cols(); ++n) {
            out += (n ? "," : "") + format_real(mat.entries(m, n));
          }
          out += "\n";
        }
        emit(g, out);
      } else {
        emit(g, dump_json(response_matrix_json(mat, provenance_for("build-detector", used))));
      }
    } else if (*fw) {
      const auto params = fw_det.params();
      const auto p = from_file(fw_input);
      const int m_max = fw_m_max ? *fw_m_max : suggest_m_max(params, p.n_max(), fw_tail);
      const auto counts = forward(build_response(params, p.n_max(), m_max), p);
      Json used = fw_det.json();
      used["input_hash"] = hex64(fnv1a64(read_text_file(fw_input)));
      used["m_max"] = m_max;
      emit_distribution(g, counts.probs, provenance_for("forward", used));
    } else if (*sm) {
      const auto counts = counts_from_file(sm_input);
      const std::uint64_t seed = g.seed.value_or(0);
      const auto sampled = sample_counts(counts, SamplingConfig{sm_nu, seed});
      Json used = {{"nu", sm_nu}, {"input_hash", hex64(fnv1a64(read_text_file(sm_input)))}};
      emit_distribution(g, sampled.probs, provenance_for("sample", used, seed),
                        {{"nu", sm_nu}, {"seed", seed}, {"generator", std::string(kGeneratorName)}});
    } else if (*rc) {
      const auto params = rc_det.params();
      const auto measured = counts_from_file(rc_input);
      const auto mat = reconstruction_matrix(params, rc_n_max, measured.size());
      LandweberConfig cfg = rc_cfg;
      cfg.chi = rc_chi;
      if (rc_noise_level) {
        cfg.noise_level = *rc_noise_level;
      } else if (rc_nu) {
        cfg.noise_level = sampling_noise_level(measured, *rc_nu);
      }
      const auto constraints = rc_support == "even" ? ConstraintSet::even_support(rc_n_max + 1)
                                                    : ConstraintSet::nonnegative();
      const auto report = solve(mat, measured, constraints, cfg);
      Json used = rc_det.json();
      used["n_max"] = rc_n_max;
      used["noise_level"] = cfg.noise_level;
      used["support"] = rc_support;
      used["input_hash"] = hex64(fnv1a64(read_text_file(rc_input)));
      const auto prov = provenance_for("reconstruct", used);
      if (g.format == "csv") {
        emit(g, distribution_csv(report.estimate));
      } else {
        emit(g, dump_json(solve_report_json(report, prov)));
      }
    } else if (*id) {
      const auto params = id_det.params();
      const auto measured = counts_from_file(id_input);
      const auto estimate = direct_reconstruct(params, measured, id_n_max);
      Json used = id_det.json();
      used["n_max"] = id_n_max;
      used["input_hash"] = hex64(fnv1a64(read_text_file(id_input)));
      emit_distribution(g, estimate, provenance_for("invert-direct", used));
    } else if (*mt) {
      const auto estimate = parse_real_vector(read_text_file(mt_estimate));
      const auto truth = parse_real_vector(read_text_file(mt_truth));
      Json out;
      out["relative_error"] = relative_error(estimate, truth);
      out["normalization_defect"] = normalization_defect(estimate);
      if (!mt_measured.empty()) {
        require(mt_eta && mt_noise, ErrorKind::config_invalid,
                "--measured requires --eta and --noise");
        const DetectorParams params{*mt_eta, *mt_noise};
        params.validate();
        const auto measured = counts_from_file(mt_measured);
        const auto mat = reconstruction_matrix(params, static_cast<int>(estimate.size()) - 1,
                                               measured.size());
        out["relative_residual"] = relative_residual(mat, estimate, measured);
      }
      if (g.format == "csv") {
        std::string text = "metric,value\n";
        for (auto it = out.begin(); it != out.end(); ++it) {
          text += it.key() + "," + format_real(it.value().get<double>()) + "\n";
        }
        emit(g, text);
      } else {
        out["provenance"] = provenance_for("metrics", {{"estimate", mt_estimate},
                                                       {"truth", mt_truth},
                                                       {"measured", mt_measured}})
                                .to_json();
        emit(g, dump_json(out));
      }
    } else if (*run || !g.config.empty()) {
      require(!g.config.empty(), ErrorKind::config_invalid, "run requires --config <path>");
      auto cfg = load_experiment_config(g.config);
      if (g.seed) {
        require(cfg.sampling.has_value(), ErrorKind::config_invalid,
                "--seed given but the config has no sampling block");
        cfg.sampling->seed = *g.seed;
      }
      if (!g.output.empty()) cfg.output_dir = g.output;
      if (cfg.output_dir.empty()) cfg.output_dir = "results/" + cfg.name;
      const auto res = run_experiment(cfg);
      Json summary;
      summary["name"] = cfg.name;
      summary["output_dir"] = cfg.output_dir;
      summary["data_relative_error"] = res.data_relative_error;
      summary["relative_error"] = res.errors.relative_error;
      summary["relative_residual"] = res.errors.relative_residual;
      summary["normalization_defect"] = res.errors.normalization_defect;
      summary["iterations_run"] = res.report.iterations_run;
      summary["stop_reason"] = std::string(to_string(res.report.stop_reason));
      if (res.direct_relative_error) summary["direct_relative_error"] = *res.direct_relative_error;
      if (res.direct_failure) summary["direct_failure"] = *res.direct_failure;
      std::cout << dump_json(summary);
    } else {
      std::cout << app.help();
      return kExitConfig;
    }
  } catch (const Error& e) {
    return report_error(std::string(to_string(e.kind())), e.what(),
                        e.is_numerical() ? kExitNumerical : kExitConfig);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), kExitConfig);
  }
  return kExitOk;
}
