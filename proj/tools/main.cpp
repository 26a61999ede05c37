// sbmlab command-line driver.
//
// Subcommands: single, sweep, spectra, moments, regimes, isolated.
// Configuration comes from a flat JSON file (--config) overridden by
// CLI flags; SBMLAB_OUT_DIR overrides the configured output directory
// unless --out is passed explicitly (precedence: flag > env > file).
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sbmlab/experiment.hpp"
#include "sbmlab/io.hpp"
#include "sbmlab/theory.hpp"

namespace {

struct Options {
  int n = 2000;
  double p1 = 0.025;
  double p2 = 0.01;
  double kappa = 0.97;
  double gamma = 50.0;
  std::vector<double> gamma_grid;
  std::uint64_t base_seed = 1;
  int trials = 5;
  std::string estimator = "naive";
  std::optional<double> known_mean;
  double epsilon = 0.5;
  bool with_resolvent = true;
  double certificate_epsilon = 0.05;
  int bins = 100;
  int threads = 1;
  int l_max = 4;
  std::string out_dir;
};

void apply_config_file(const std::string& path, Options& opt) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config parse error: ") +
                                e.what());
  }
  if (!j.is_object()) {
    throw std::invalid_argument("config file must hold a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "n") opt.n = value.get<int>();
      else if (key == "p1") opt.p1 = value.get<double>();
      else if (key == "p2") opt.p2 = value.get<double>();
      else if (key == "kappa") opt.kappa = value.get<double>();
      else if (key == "gamma") opt.gamma = value.get<double>();
      else if (key == "gamma_grid")
        opt.gamma_grid = value.get<std::vector<double>>();
      else if (key == "base_seed") opt.base_seed = value.get<std::uint64_t>();
      else if (key == "trials") opt.trials = value.get<int>();
      else if (key == "estimator") opt.estimator = value.get<std::string>();
      else if (key == "known_mean") {
        if (!value.is_null()) opt.known_mean = value.get<double>();
      } else if (key == "epsilon") opt.epsilon = value.get<double>();
      else if (key == "with_resolvent")
        opt.with_resolvent = value.get<bool>();
      else if (key == "certificate_epsilon")
        opt.certificate_epsilon = value.get<double>();
      else if (key == "bins") opt.bins = value.get<int>();
      else if (key == "threads") opt.threads = value.get<int>();
      else if (key == "l_max") opt.l_max = value.get<int>();
      else if (key == "out_dir") opt.out_dir = value.get<std::string>();
      else if (key == "version") { /* echo field, ignore on input */ }
      else
        throw std::invalid_argument("unknown config key: " + key);
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("config key '" + key +
                                  "' has the wrong type: " + e.what());
    }
  }
}

sbmlab::ExperimentConfig to_experiment_config(const Options& opt) {
  if (opt.estimator != "naive" && opt.estimator != "davis_kahan") {
    throw std::invalid_argument("estimator must be naive or davis_kahan, got " +
                                opt.estimator);
  }
  sbmlab::ExperimentConfig config;
  config.params = sbmlab::make_params(opt.n, opt.p1, opt.p2, opt.kappa,
                                      opt.gamma);
  config.gamma_grid = opt.gamma_grid;
  config.base_seed = opt.base_seed;
  config.trials = opt.trials;
  config.estimator = opt.estimator;
  config.known_mean = opt.known_mean;
  config.epsilon = opt.epsilon;
  config.with_resolvent = opt.with_resolvent;
  config.certificate_epsilon = opt.certificate_epsilon;
  config.bins = opt.bins;
  config.threads = opt.threads;
  config.out_dir = opt.out_dir;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  // One BLAS thread per cell: results must not depend on runtime
  // parallelism, and sweep-level threading already uses the cores.
  setenv("OPENBLAS_NUM_THREADS", "1", 1);

  CLI::App app{"Spectral experiments on geometrically perturbed block models"};
  app.require_subcommand(1);

  Options opt;
  std::string config_path;
  bool no_resolvent = false;
  double known_mean_flag = 0.0;

  app.add_option("--config", config_path,
                 "Flat JSON config file; flags override its values");

  const auto add_common = [&](CLI::App* sub) {
    sub->fallthrough();  // lets --config appear after the subcommand
    sub->add_option("--n", opt.n, "Number of vertices (even)");
    sub->add_option("--p1", opt.p1, "Intra-community edge probability");
    sub->add_option("--p2", opt.p2, "Inter-community edge probability");
    sub->add_option("--kappa", opt.kappa, "Kernel perturbation weight");
    sub->add_option("--gamma", opt.gamma, "Kernel concentration parameter");
    sub->add_option("--seed", opt.base_seed, "Base RNG seed");
    sub->add_option("--trials", opt.trials, "Trials per grid point");
    sub->add_option("--out", opt.out_dir, "Output directory");
    return sub;
  };

  CLI::App* single = add_common(app.add_subcommand(
      "single", "One full pipeline run; prints the trial record"));
  single->add_option("--estimator", opt.estimator, "naive or davis_kahan");
  single->add_option("--known-mean", known_mean_flag,
                     "Known mean edge probability for davis_kahan");
  single->add_option("--epsilon", opt.epsilon,
                     "Recovery classification threshold in (0,1)");
  single->add_flag("--no-resolvent", no_resolvent,
                   "Skip the detached-root predictions");
  single->add_option("--certificate-epsilon", opt.certificate_epsilon,
                     "Margin for the separation certificate");

  CLI::App* sweep = add_common(app.add_subcommand(
      "sweep", "Run a gamma grid with several trials per point"));
  sweep->add_option("--gamma-grid", opt.gamma_grid,
                    "Grid of gamma values (comma separated)")
      ->delimiter(',');
  sweep->add_option("--estimator", opt.estimator, "naive or davis_kahan");
  sweep->add_option("--known-mean", known_mean_flag,
                    "Known mean edge probability for davis_kahan");
  sweep->add_option("--epsilon", opt.epsilon,
                    "Recovery classification threshold in (0,1)");
  sweep->add_flag("--no-resolvent", no_resolvent,
                  "Skip the detached-root predictions");
  sweep->add_option("--certificate-epsilon", opt.certificate_epsilon,
                    "Margin for the separation certificate");
  sweep->add_option("--threads", opt.threads, "Worker threads for the sweep");

  CLI::App* spectra = add_common(app.add_subcommand(
      "spectra", "Dump aligned spectrum histograms and eigenvalue lists"));
  spectra->add_option("--bins", opt.bins, "Histogram bin count");

  CLI::App* moments = app.add_subcommand(
      "moments", "Exact and Monte Carlo kernel trace moments");
  moments->fallthrough();
  moments->add_option("--n", opt.n, "Number of vertices");
  moments->add_option("--gamma", opt.gamma, "Kernel concentration parameter");
  moments->add_option("--l-max", opt.l_max, "Largest moment order (2..8)");
  moments->add_option("--trials", opt.trials,
                      "Monte Carlo samples; 0 = exact only");
  moments->add_option("--seed", opt.base_seed, "Base RNG seed");
  moments->add_option("--out", opt.out_dir, "Output directory");

  CLI::App* regimes = app.add_subcommand(
      "regimes", "Report which operating-regime margins the parameters meet");
  regimes->fallthrough();
  regimes->add_option("--n", opt.n, "Number of vertices (even)");
  regimes->add_option("--p1", opt.p1, "Intra-community edge probability");
  regimes->add_option("--p2", opt.p2, "Inter-community edge probability");
  regimes->add_option("--kappa", opt.kappa, "Kernel perturbation weight");
  regimes->add_option("--gamma", opt.gamma, "Kernel concentration parameter");
  regimes->add_option("--out", opt.out_dir, "Output directory");

  CLI::App* isolated = app.add_subcommand(
      "isolated", "Expected isolated vertices: quadrature vs Monte Carlo");
  isolated->fallthrough();
  isolated->add_option("--n", opt.n, "Number of vertices");
  isolated->add_option("--gamma", opt.gamma, "Kernel concentration parameter");
  isolated->add_option("--trials", opt.trials,
                       "Monte Carlo samples; 0 = quadrature only");
  isolated->add_option("--seed", opt.base_seed, "Base RNG seed");
  isolated->add_option("--out", opt.out_dir, "Output directory");

  // Parse once to learn which flags were given, then rebuild the options
  // in precedence order: defaults < config file < environment < flags.
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    Options parsed = opt;  // flag values as parsed
    opt = Options{};       // reset to defaults
    if (!config_path.empty()) apply_config_file(config_path, opt);
    if (const char* env = std::getenv("SBMLAB_OUT_DIR")) opt.out_dir = env;

    const auto given = [&](const std::string& flag) {
      const CLI::Option* o = sub->get_option_no_throw(flag);
      return o != nullptr && o->count() > 0;
    };
    const auto pick_int = [&](const std::string& flag, int& dst, int src) {
      if (given(flag)) dst = src;
    };
    const auto pick_double = [&](const std::string& flag, double& dst,
                                 double src) {
      if (given(flag)) dst = src;
    };
    pick_int("--n", opt.n, parsed.n);
    pick_double("--p1", opt.p1, parsed.p1);
    pick_double("--p2", opt.p2, parsed.p2);
    pick_double("--kappa", opt.kappa, parsed.kappa);
    pick_double("--gamma", opt.gamma, parsed.gamma);
    if (given("--gamma-grid")) opt.gamma_grid = parsed.gamma_grid;
    if (given("--seed")) opt.base_seed = parsed.base_seed;
    pick_int("--trials", opt.trials, parsed.trials);
    if (given("--estimator")) opt.estimator = parsed.estimator;
    if (given("--known-mean")) opt.known_mean = known_mean_flag;
    pick_double("--epsilon", opt.epsilon, parsed.epsilon);
    if (given("--no-resolvent")) opt.with_resolvent = !no_resolvent;
    pick_double("--certificate-epsilon", opt.certificate_epsilon,
                parsed.certificate_epsilon);
    pick_int("--bins", opt.bins, parsed.bins);
    pick_int("--threads", opt.threads, parsed.threads);
    pick_int("--l-max", opt.l_max, parsed.l_max);
    if (given("--out")) opt.out_dir = parsed.out_dir;

    if (sub == single) {
      const sbmlab::ExperimentConfig config = to_experiment_config(opt);
      const sbmlab::TrialRecord rec = sbmlab::run_single(config);
      std::cout << sbmlab::trial_record_json(rec, sbmlab::config_hash(config))
                << "\n";
    } else if (sub == sweep) {
      const sbmlab::ExperimentConfig config = to_experiment_config(opt);
      const sbmlab::SweepResult result = sbmlab::run_sweep(config);
      std::cout << "gamma,trials_ok,median_overlap,q1_overlap,q3_overlap,"
                   "median_rounded_overlap,median_hamming\n";
      for (const sbmlab::SweepSummaryRow& row : result.summary) {
        std::cout << sbmlab::format_double(row.gamma) << ','
                  << row.trials_ok << ','
                  << sbmlab::format_double(row.median_overlap) << ','
                  << sbmlab::format_double(row.q1_overlap) << ','
                  << sbmlab::format_double(row.q3_overlap) << ','
                  << sbmlab::format_double(row.median_rounded_overlap) << ','
                  << sbmlab::format_double(row.median_hamming) << "\n";
      }
      for (const sbmlab::TrialRecord& r : result.records) {
        if (r.failed) {
          std::cerr << "cell gamma=" << r.gamma << " stream=" << r.stream
                    << " failed at " << r.fail_stage << ": " << r.fail_reason
                    << "\n";
        }
      }
    } else if (sub == spectra) {
      if (opt.out_dir.empty()) {
        throw std::invalid_argument("spectra needs --out or SBMLAB_OUT_DIR");
      }
      sbmlab::dump_spectra(to_experiment_config(opt));
      std::cout << "wrote histograms and eigenvalue lists to " << opt.out_dir
                << "\n";
    } else if (sub == moments) {
      const sbmlab::MomentReport rep = sbmlab::run_moments(
          opt.n, opt.gamma, opt.l_max, opt.trials,
          sbmlab::Seed{opt.base_seed, 0}, opt.out_dir);
      std::cout << "l,exact_value,mc_mean,mc_se,z,normalized_value,"
                   "normalized_limit\n";
      for (const sbmlab::MomentRow& row : rep.rows) {
        std::cout << row.l << ','
                  << sbmlab::format_double(row.exact_value) << ','
                  << sbmlab::format_double(row.mc_mean) << ','
                  << sbmlab::format_double(row.mc_se) << ','
                  << sbmlab::format_double(row.z) << ','
                  << sbmlab::format_double(row.normalized_value) << ','
                  << sbmlab::format_double(row.normalized_limit) << "\n";
      }
    } else if (sub == regimes) {
      const sbmlab::ModelParams params = sbmlab::make_params(
          opt.n, opt.p1, opt.p2, opt.kappa, opt.gamma);
      const std::string report =
          sbmlab::regime_report_json(sbmlab::check_regimes(params));
      std::cout << report << "\n";
      if (!opt.out_dir.empty()) {
        std::filesystem::create_directories(opt.out_dir);
        std::ofstream out(opt.out_dir + "/regime_report.json");
        out << report << "\n";
      }
    } else if (sub == isolated) {
      const sbmlab::IsolatedReport rep = sbmlab::run_isolated(
          opt.n, opt.gamma, opt.trials, sbmlab::Seed{opt.base_seed, 0},
          opt.out_dir);
      std::cout << "quadrature=" << sbmlab::format_double(rep.quadrature);
      if (opt.trials > 0) {
        std::cout << " mc_mean=" << sbmlab::format_double(rep.mc_mean)
                  << " mc_se=" << sbmlab::format_double(rep.mc_se)
                  << " z=" << sbmlab::format_double(rep.z);
      }
      std::cout << "\n";
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
