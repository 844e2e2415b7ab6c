// Drives the photorecon executable end to end.

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "gtest/gtest.h"
#include "photorecon/io.hpp"

using namespace photorecon;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(PHOTORECON_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string config(const std::string& name) {
  return std::string(PHOTORECON_CONFIG_DIR) + "/" + name + ".json";
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "photorecon_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<double> probs_of(const fs::path& file) {
  return parse_real_vector(read_text_file(file));
}

}  // namespace

TEST(cli, gen_state_thermal) {
  const auto r = cli("gen-state thermal --mean 30");
  ASSERT_EQ(r.status, 0);
  const auto j = Json::parse(r.out);
  EXPECT_NEAR(j["probs"][0].get<double>(), 1.0 / 31.0, 1e-15);
  EXPECT_TRUE(j["provenance"].contains("config_hash"));
  EXPECT_EQ(j["provenance"]["library_version"], kVersion);
}

TEST(cli, gen_state_csv) {
  const auto r = cli("gen-state fock --n 2 --format csv");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "n,probability\n0,0\n1,0\n2,1\n");
}

TEST(cli, forward_vacuum_gives_poisson) {
  const auto dir = scratch("forward");
  ASSERT_EQ(cli("gen-state fock --n 0 --output " + (dir / "vac.json").string()).status, 0);
  const auto r = cli("forward --input " + (dir / "vac.json").string() + " --eta 0.5 --noise 1");
  ASSERT_EQ(r.status, 0);
  const auto p = parse_real_vector(r.out);
  double fact = 1.0;
  for (std::size_t m = 0; m < p.size(); ++m) {
    if (m > 0) fact *= static_cast<double>(m);
    EXPECT_NEAR(p[m], std::exp(-1.0) / fact, 1e-15) << m;
  }
}

TEST(cli, exit_codes) {
  const auto dir = scratch("exit");
  EXPECT_EQ(cli("gen-state thermal --mean -1").status, 2);
  EXPECT_EQ(cli("no-such-command").status, 2);
  EXPECT_EQ(cli("run --config /nonexistent.json").status, 2);
  write_text_file(dir / "bad.json", R"({"name": "x", "bogus": 1})");
  EXPECT_EQ(cli("run --config " + (dir / "bad.json").string()).status, 2);
  write_text_file(dir / "neg.txt", "0.5, -0.1, 0.6");
  EXPECT_EQ(cli("forward --input " + (dir / "neg.txt").string() + " --eta 0.5 --noise 1").status, 2);
  // Small efficiency and a wide window push S^-1 beyond double range.
  std::string flat = "[";
  for (int m = 0; m < 400; ++m) flat += (m ? "," : "") + format_real(1.0 / 400);
  write_text_file(dir / "flat.json", flat + "]");
  EXPECT_EQ(cli("invert-direct --input " + (dir / "flat.json").string() +
                " --eta 0.05 --noise 3 --n-max 300")
                .status,
            3);
}

TEST(cli, pipeline_matches_run) {
  const auto dir = scratch("compose");
  const auto run_dir = dir / "run";
  ASSERT_EQ(cli("run --config " + config("thermal_fig1") + " --output " + run_dir.string()).status, 0);

  const auto p = (dir / "p.json").string();
  const auto P = (dir / "P.json").string();
  const auto Pm = (dir / "Pm.json").string();
  const auto rec = (dir / "rec.json").string();
  ASSERT_EQ(cli("gen-state thermal --mean 30 --tail 1e-10 --output " + p).status, 0);
  ASSERT_EQ(cli("forward --input " + p + " --eta 0.34 --noise 0.30 --tail 1e-10 --output " + P).status, 0);
  ASSERT_EQ(cli("--seed 1 sample --input " + P + " --nu 50000 --output " + Pm).status, 0);
  const int n_max = static_cast<int>(probs_of(p).size()) - 1;
  ASSERT_EQ(cli("reconstruct --input " + Pm + " --eta 0.35 --noise 0.29 --n-max " +
                std::to_string(n_max) + " --nu 50000 --output " + rec)
                .status,
            0);

  EXPECT_EQ(probs_of(p), probs_of(run_dir / "p_true.json"));
  EXPECT_EQ(probs_of(P), probs_of(run_dir / "P_true.json"));
  EXPECT_EQ(probs_of(Pm), probs_of(run_dir / "P_measured.json"));
  const auto report = Json::parse(read_text_file(rec));
  const auto run_report = Json::parse(read_text_file(run_dir / "solve_report.json"));
  EXPECT_EQ(report["estimate"].get<std::vector<double>>(), probs_of(run_dir / "p_reconstructed.json"));
  EXPECT_EQ(report["iterations_run"], run_report["iterations_run"]);
  EXPECT_EQ(report["residual_history"], run_report["residual_history"]);
}

TEST(cli, run_is_deterministic) {
  const auto dir = scratch("determinism");
  const std::string args = "--config " + config("spats_fig2") + " --output " + dir.string();
  ASSERT_EQ(cli(args).status, 0);
  std::map<std::string, std::string> first;
  for (const auto& e : fs::directory_iterator(dir)) first[e.path().filename()] = read_text_file(e.path());
  ASSERT_GE(first.size(), 8u);
  ASSERT_EQ(cli(args).status, 0);
  for (const auto& [name, text] : first) EXPECT_EQ(read_text_file(dir / name), text) << name;
}

TEST(cli, run_outputs_carry_provenance) {
  const auto dir = scratch("provenance");
  ASSERT_EQ(cli("--config " + config("cat_fig4") + " --seed 9 --output " + dir.string()).status, 0);
  for (const char* f : {"p_true.json", "P_true.json", "P_measured.json", "p_reconstructed.json",
                        "solve_report.json", "error_report.json"}) {
    const auto j = Json::parse(read_text_file(dir / f));
    EXPECT_EQ(j["provenance"]["seed"], 9) << f;
    EXPECT_EQ(j["provenance"]["generator"], "mt19937_64") << f;
    EXPECT_EQ(j["provenance"]["config_hash"].get<std::string>().size(), 16u) << f;
  }
  const auto rec = probs_of(dir / "p_reconstructed.json");
  for (std::size_t n = 1; n < rec.size(); n += 2) EXPECT_EQ(rec[n], 0.0) << n;
  const auto csv = read_text_file(dir / "plot_data.csv");
  EXPECT_EQ(csv.rfind("n,p_true,p_reconstructed,P_simulated\n", 0), 0u);
}

TEST(cli, noiseless_self_consistency) {
  const auto dir = scratch("noiseless");
  write_text_file(dir / "cfg.json", R"({
  "name": "noiseless_spats",
  "state": {"kind": "spats", "mean_n": 10, "tail": 1e-10},
  "detector_true": {"eta": 0.7764, "n_noise": 0.748},
  "detector_assumed": {"eta": 0.7764, "n_noise": 0.748},
  "solver": {"max_iterations": 200000}
})");
  ASSERT_EQ(cli("--config " + (dir / "cfg.json").string() + " --output " + (dir / "out").string())
                .status,
            0);
  const auto report = Json::parse(read_text_file(dir / "out" / "error_report.json"));
  EXPECT_LE(report["landweber"]["relative_error"].get<double>(), 1e-3);
}

TEST(cli, invert_direct_shows_amplification) {
  const auto dir = scratch("direct");
  ASSERT_EQ(cli("--config " + config("spats_fig3_direct") + " --output " + dir.string()).status, 0);
  const auto r = cli("invert-direct --input " + (dir / "P_measured.json").string() +
                     " --eta 0.7764 --noise 0.748 --n-max " +
                     std::to_string(probs_of(dir / "p_true.json").size() - 1));
  ASSERT_EQ(r.status, 0);
  const auto direct = parse_real_vector(r.out);
  EXPECT_EQ(direct, probs_of(dir / "p_direct.json"));
  bool negative = false;
  for (double v : direct) negative = negative || v < 0.0;
  EXPECT_TRUE(negative);
}
