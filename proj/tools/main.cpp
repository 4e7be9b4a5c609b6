#include <fstream>
#include <iostream>
#include <new>
#include <sstream>

#include "CLI11.hpp"
#include "gl3lab/coeffs.hpp"
#include "gl3lab/error.hpp"
#include "gl3lab/pipeline.hpp"

namespace {

using gl3lab::ExitCode;
using gl3lab::ExperimentConfig;

struct Options {
  std::string config;
  std::string out;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed_override;
  bool allow_seed_override = false;
};

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--config", opt.config, "experiment config file")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", opt.out, "output directory (overrides [outputs] dir)");
  sub->add_option("--threads", opt.threads, "worker threads (overrides [run] threads)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--seed-override", opt.seed_override, "replace both seeds");
  sub->add_flag("--allow-seed-override", opt.allow_seed_override,
                "required for --seed-override to take effect");
}

ExperimentConfig prepare(const Options& opt) {
  auto cfg = gl3lab::load_config(opt.config);
  if (!opt.out.empty()) cfg.output_dir = opt.out;
  if (opt.threads) cfg.threads = opt.threads;
  if (opt.seed_override) {
    if (!opt.allow_seed_override) {
      throw gl3lab::ValidationError(
          "--seed-override refused: seeds come from the config; pass --allow-seed-override to "
          "replace them");
    }
    cfg.window_seed = *opt.seed_override;
    cfg.model_seed = *opt.seed_override;
  }
  return cfg;
}

int report(const gl3lab::RunResult& result, const ExperimentConfig& cfg) {
  for (const auto& d : result.diagnostics) std::cerr << cfg.source.string() << ": " << d << '\n';
  if (result.status != 0) {
    std::cerr << "gl3lab: " << result.error << '\n';
  }
  for (const auto& s : result.stages) {
    std::cerr << "  " << s.name << (s.completed ? " done " : " aborted ") << s.wall_seconds << " s\n";
  }
  std::cerr << "manifest: " << (cfg.output_dir / "manifest.json").string() << '\n';
  return result.status;
}

// Runs exactly one pipeline from the config, whatever its toggles say.
int run_only(const Options& opt, bool ExperimentConfig::*toggle) {
  auto cfg = prepare(opt);
  cfg.meansquare = cfg.discrepancy = cfg.moments = cfg.tails = cfg.laplace = cfg.model = false;
  cfg.*toggle = true;
  return report(gl3lab::run(cfg), cfg);
}

int cmd_validate(const Options& opt) {
  const auto cfg = prepare(opt);
  const auto diags = gl3lab::validate(cfg);
  for (const auto& d : diags) std::cout << opt.config << ": " << d << '\n';
  if (diags.empty()) std::cout << opt.config << ": ok (hash " << cfg.hash << ")\n";
  return diags.empty() ? 0 : static_cast<int>(ExitCode::kValidation);
}

int cmd_sieve(const Options& opt, const std::string& file) {
  const auto cfg = prepare(opt);
  const auto table = gl3lab::build_table(cfg);
  std::filesystem::path path = file;
  if (path.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
    path = cfg.output_dir / "table.txt";
  }
  gl3lab::save_coefficients(table, path);
  std::cerr << "wrote " << table.size() << " coefficients to " << path.string() << '\n';
  return 0;
}

int cmd_model_sample(const Options& opt) {
  auto cfg = prepare(opt);
  cfg.meansquare = cfg.discrepancy = cfg.moments = cfg.tails = cfg.laplace = false;
  cfg.model = true;
  const auto result = gl3lab::run(cfg);
  const int status = report(result, cfg);
  if (status == 0) {
    std::ifstream in(cfg.output_dir / "model.json");
    std::cout << in.rdbuf();
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gl3lab: error terms of GL(3) coefficient sums and their random models"};
  app.require_subcommand(1);
  Options opt;
  std::string sieve_file;

  auto* run = app.add_subcommand("run", "run every enabled pipeline");
  auto* validate = app.add_subcommand("validate", "check a config without computing");
  auto* sieve = app.add_subcommand("sieve", "build the coefficient table and write it to a file");
  auto* model = app.add_subcommand("model-sample", "sample the random model and print its stats");
  auto* disc = app.add_subcommand("discrepancy", "window vs model KS distance");
  auto* moments = app.add_subcommand("moments", "diagonal moment matching");
  auto* meansquare = app.add_subcommand("meansquare", "mean square of the error term");
  auto* tails = app.add_subcommand("tails", "tail probabilities and Laplace transform");
  for (auto* sub : {run, validate, sieve, model, disc, moments, meansquare, tails}) add_common(sub, opt);
  sieve->add_option("--file", sieve_file, "table path (default OUT/table.txt)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kValidation);
  }

  try {
    if (*run) {
      const auto cfg = prepare(opt);
      return report(gl3lab::run(cfg), cfg);
    }
    if (*validate) return cmd_validate(opt);
    if (*sieve) return cmd_sieve(opt, sieve_file);
    if (*model) return cmd_model_sample(opt);
    if (*disc) return run_only(opt, &ExperimentConfig::discrepancy);
    if (*moments) return run_only(opt, &ExperimentConfig::moments);
    if (*meansquare) return run_only(opt, &ExperimentConfig::meansquare);
    if (*tails) {
      auto cfg = prepare(opt);
      cfg.meansquare = cfg.discrepancy = cfg.moments = cfg.model = false;
      cfg.tails = cfg.laplace = true;
      return report(gl3lab::run(cfg), cfg);
    }
  } catch (const gl3lab::Error& e) {
    std::cerr << "gl3lab: " << e.what() << '\n';
    return static_cast<int>(e.exit_code());
  } catch (const std::bad_alloc&) {
    std::cerr << "gl3lab: out of memory\n";
    return static_cast<int>(ExitCode::kResource);
  } catch (const std::exception& e) {
    std::cerr << "gl3lab: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kNumeric);
  }
  return 0;
}
