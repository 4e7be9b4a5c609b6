#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gl3lab/coeffs.hpp"
#include "gl3lab/empirics.hpp"
#include "gl3lab/voronoi.hpp"

namespace gl3lab {

// One experiment, read from an INI-style file: "[section]" headers,
// "key = value" lines, comments on their own line starting with ';' or '#'.
// Lists are comma separated.
struct ExperimentConfig {
  std::filesystem::path source;
  std::string hash;  // FNV-1a 64 of the file bytes, hex

  // [provider]
  std::string provider = "divisor3";  // divisor3 | sym_square | external
  std::uint64_t N = 0;
  std::filesystem::path file;  // external only
  std::size_t memory_budget = kDefaultMemoryBudget;

  // [window]
  double window_T = 0.0;
  std::size_t window_count = 10000;
  std::string window_strategy = "grid";  // grid | uniform
  std::string window_mode = "auto";      // auto | exact
  std::optional<std::uint64_t> window_seed;

  // [model]
  std::uint64_t n_model = 0;
  std::uint64_t r_model = 0;  // 0: floor((N / N_model)^{1/3})
  std::uint64_t draws = 100000;
  std::optional<std::uint64_t> model_seed;

  // [voronoi]
  VoronoiConfig voronoi;

  // [meansquare]
  std::size_t meansquare_points = 9;  // geometric grid from N/100 to N

  // [discrepancy]
  double berry_esseen_R = 5.0;
  std::size_t berry_esseen_points = 1000;
  std::size_t cdf_points = 201;

  // [moments]
  unsigned h_max = 4;
  std::uint64_t moments_M = 10;
  double alpha0 = 1.0;
  std::vector<double> moments_T = {1e4, 1e6, 1e8};

  // [tails]
  std::vector<double> tail_multiples = {1.0, 2.0, 3.0};
  std::vector<double> lambdas = {2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  EnvelopeConstants envelope;
  double eps1 = 0.0;
  double eps2 = 0.0;

  // [pipelines]
  bool meansquare = false;
  bool discrepancy = false;
  bool moments = false;
  bool tails = false;
  bool laplace = false;
  bool model = false;  // model.json on its own

  // [run]
  unsigned threads = 1;

  // [outputs]
  std::filesystem::path output_dir = "out";

  // Diagnostics collected while parsing (unknown keys, malformed values).
  std::vector<std::string> parse_diagnostics;
};

// Throws ValidationError with "path:line" when the file does not parse.
ExperimentConfig load_config(const std::filesystem::path& path);

// Every violation, one line each; empty when the config can run.
std::vector<std::string> validate(const ExperimentConfig& config);

struct StageRecord {
  std::string name;
  double wall_seconds = 0.0;
  bool completed = false;
};

struct RunResult {
  int status = 0;
  std::vector<StageRecord> stages;
  std::vector<std::string> diagnostics;
  std::string error;
  std::vector<std::filesystem::path> reports;
};

// Runs the enabled pipelines in dependency order
// (sieve -> series -> model -> meansquare / discrepancy / moments / tails /
// laplace), writing CSV and JSON reports and manifest.json into
// config.output_dir. The manifest is written on every path, including
// validation failures and aborted stages.
RunResult run(const ExperimentConfig& config);

CoefficientTable build_table(const ExperimentConfig& config);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace gl3lab
