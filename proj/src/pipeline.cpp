#include "gl3lab/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <boost/version.hpp>

#include "gl3lab/error.hpp"
#include "gl3lab/error_term.hpp"
#include "gl3lab/moments.hpp"
#include "gl3lab/random_model.hpp"
#include "json.hpp"

namespace gl3lab {

namespace {

using json = nlohmann::ordered_json;
namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"provider", {"name", "N", "file", "memory_budget"}},
      {"window", {"T", "count", "strategy", "mode", "seed"}},
      {"model", {"N_model", "R_model", "draws", "seed"}},
      {"voronoi", {"alpha", "sample_count", "precision"}},
      {"meansquare", {"points"}},
      {"discrepancy", {"R", "quad_points", "cdf_points"}},
      {"moments", {"h_max", "M", "alpha0", "T"}},
      {"tails", {"multiples", "lambdas", "b1", "b2", "b3", "b4", "eps1", "eps2"}},
      {"pipelines", {"meansquare", "discrepancy", "moments", "tails", "laplace", "model"}},
      {"run", {"threads"}},
      {"outputs", {"dir"}},
  };
  return keys;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, std::vector<std::string>& diags) : tree_(tree), diags_(diags) {}

  template <typename T>
  void get(const std::string& key, T& out) {
    const auto node = tree_.get_optional<std::string>(key);
    if (!node) return;
    if (!parse(*node, out)) diags_.push_back(key + ": cannot parse '" + *node + "'");
  }

  void get_list(const std::string& key, std::vector<double>& out) {
    const auto node = tree_.get_optional<std::string>(key);
    if (!node) return;
    std::vector<double> values;
    std::stringstream in(*node);
    std::string item;
    while (std::getline(in, item, ',')) {
      double v = 0.0;
      if (!parse(item, v)) {
        diags_.push_back(key + ": cannot parse list item '" + item + "'");
        return;
      }
      values.push_back(v);
    }
    out = std::move(values);
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
  }
  static bool parse(const std::string& raw, std::string& out) {
    out = trim(raw);
    return true;
  }
  static bool parse(const std::string& raw, double& out) {
    const auto s = trim(raw);
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size() && !s.empty();
  }
  template <typename U>
    requires std::is_unsigned_v<U>
  static bool parse(const std::string& raw, U& out) {
    // Accept 1e6-style integers; they are common for table sizes.
    double v = 0.0;
    if (!parse(raw, v) || v < 0.0 || v != std::floor(v) || v > 1.8e19) return false;
    out = static_cast<U>(v);
    return true;
  }
  static bool parse(const std::string& raw, std::optional<std::uint64_t>& out) {
    std::uint64_t v = 0;
    const auto s = trim(raw);
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return false;
    out = v;
    return true;
  }
  static bool parse(const std::string& raw, bool& out) {
    const auto s = trim(raw);
    if (s == "true" || s == "on" || s == "yes" || s == "1") {
      out = true;
      return true;
    }
    if (s == "false" || s == "off" || s == "no" || s == "0") {
      out = false;
      return true;
    }
    return false;
  }
  static bool parse(const std::string& raw, std::filesystem::path& out) {
    out = trim(raw);
    return true;
  }

  const pt::ptree& tree_;
  std::vector<std::string>& diags_;
};

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, p) : std::string("nan");
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
      : out_(path, std::ios::binary) {
    if (!out_) throw ResourceError("cannot write " + path.string());
    row_strings(header);
  }
  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) out_ << ',';
      out_ << format_double(v);
      first = false;
    }
    out_ << '\n';
  }
  void row_strings(const std::vector<std::string>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

void write_json(const std::filesystem::path& path, const json& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot write " + path.string());
  out << body.dump(2) << '\n';
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double inv_pi_sqrt3() { return 1.0 / (std::numbers::pi * std::numbers::sqrt3); }

// F-scale coefficients a_m / (pi sqrt 3 m^{2/3}) for m <= M.
std::vector<double> scaled_coefficients(const CoefficientTable& table, std::uint64_t M) {
  std::vector<double> a(M);
  for (std::uint64_t m = 1; m <= M; ++m) {
    a[m - 1] = table[m] * inv_pi_sqrt3() / std::cbrt(static_cast<double>(m) * static_cast<double>(m));
  }
  return a;
}

struct Context {
  const ExperimentConfig& cfg;
  RunResult& result;
  std::vector<std::string> log;
  std::optional<CoefficientTable> table;
  std::optional<ErrorTermSeries> series;
  std::optional<TruncatedModel> model;
  std::optional<SampleBatch> batch;

  std::filesystem::path report(const std::string& name) {
    auto path = cfg.output_dir / name;
    result.reports.push_back(path);
    return path;
  }
};

void stage_meansquare(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& series = *ctx.series;
  const double N = static_cast<double>(series.size());
  CsvWriter csv(ctx.report("meansquare.csv"), {"x", "integral", "predicted", "ratio"});
  json rows = json::array();
  const std::size_t P = std::max<std::size_t>(cfg.meansquare_points, 1);
  for (std::size_t i = 0; i < P; ++i) {
    const double frac = P == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(P - 1);
    const double x = std::floor(N * std::pow(100.0, frac - 1.0));
    const auto ms = mean_square_integral(series, x, cfg.threads);
    csv.row({ms.x, ms.integral, ms.predicted, ms.ratio});
    rows.push_back({{"x", ms.x}, {"ratio", ms.ratio}});
  }
  const auto& c = series.constant();
  json body = {
      {"provider", std::string(to_string(series.provider()))},
      {"source", series.source()},
      {"label", series.provider() == Provider::kDivisor3 ? "analogue" : "cusp form"},
      {"asserted", {{"mean_square", "int_0^x Delta^2 ~ (1/(10 pi^2)) C_f x^{5/3}"},
                    {"constant_factor", 1.0 / (10.0 * std::numbers::pi * std::numbers::pi)}}},
      {"recorded", {{"C_f", c.value}, {"cutoff", c.cutoff}, {"tail_bound", c.tail_bound},
                    {"rankin_selberg_K", ctx.table->rankin_selberg_constant()},
                    {"ratios", rows}}},
  };
  if (const auto& m = series.main_term()) {
    body["recorded"]["main_term"] = {{"c2", m->c2}, {"c1", m->c1}, {"c0", m->c0}};
  }
  write_json(ctx.report("meansquare.json"), body);
}

void stage_model(Context& ctx) {
  const auto& cfg = ctx.cfg;
  ctx.model = build_model(*ctx.table, cfg.n_model, cfg.r_model);
  ctx.batch = sample_batch(*ctx.model, *cfg.model_seed, cfg.draws, cfg.threads);
}

void stage_model_report(Context& ctx) {
  const auto& model = *ctx.model;
  const auto& batch = *ctx.batch;
  const EmpiricalDistribution dist(batch.values);
  json moments = json::array();
  for (unsigned k = 1; k <= 6; ++k) {
    const auto e = monte_carlo_moment(batch, k);
    moments.push_back({{"k", k}, {"estimate", e.estimate}, {"stderr", e.stderr_}});
  }
  json laplace = json::array();
  for (double lambda : {-1.0, -0.5, 0.5, 1.0}) {
    const double exact = log_laplace_exact(model, lambda);
    json row = {{"lambda", lambda}, {"log_exact", exact}};
    try {
      const auto e = laplace_transform(batch, lambda);
      row["estimate"] = e.estimate;
      row["stderr"] = e.stderr_;
    } catch (const NumericError& err) {
      row["estimate"] = nullptr;
      row["error"] = err.what();
    }
    laplace.push_back(row);
  }
  json charfn = json::array();
  for (double alpha : {0.1, 0.25, 0.5, 1.0, 2.0}) {
    const auto c = characteristic_function(batch, alpha);
    charfn.push_back({{"alpha", alpha}, {"re", c.re}, {"im", c.im}, {"stderr", c.stderr_}});
  }
  json body = {
      {"model", {{"N", model.n_model()}, {"R", model.r_model()},
                 {"provider", std::string(to_string(model.provider()))},
                 {"source", model.source()}, {"kernels", model.kernels().size()}}},
      {"stats", {{"draws", batch.count}, {"mean", dist.mean()}, {"variance", dist.variance()},
                 {"exact_second_moment", exact_second_moment(model)}, {"moments", moments},
                 {"laplace", laplace}, {"charfn", charfn}}},
      {"seed", batch.seed},
  };
  write_json(ctx.report("model.json"), body);
}

EmpiricalDistribution window_distribution(Context& ctx, bool& exact) {
  const auto& cfg = ctx.cfg;
  const WindowEvaluator evaluator(*ctx.table, *ctx.series, cfg.voronoi);
  exact = evaluator.exact_on(cfg.window_T);
  if (!exact) {
    ctx.log.push_back("window [" + format_double(cfg.window_T) + ", " +
                      format_double(2.0 * cfg.window_T) +
                      "] exceeds the table; F above N evaluated by truncated Voronoi sums");
  }
  const auto strategy = cfg.window_strategy == "uniform"
                            ? SamplingStrategy::uniform(*cfg.window_seed)
                            : SamplingStrategy::grid();
  return empirical_distribution(evaluator, cfg.window_T, cfg.window_count, strategy, cfg.threads);
}

void stage_discrepancy(Context& ctx) {
  const auto& cfg = ctx.cfg;
  bool exact = true;
  const auto window = window_distribution(ctx, exact);
  const EmpiricalDistribution model(ctx.batch->values);
  const double D = ks_distance(window, model);

  const CharacteristicFn phi_F = [&](double a) { return empirical_characteristic(window, a); };
  const CharacteristicFn phi_X = [&](double a) { return empirical_characteristic(model, a); };
  const double be = berry_esseen_bound(phi_F, phi_X, cfg.berry_esseen_R, cfg.berry_esseen_points);

  CsvWriter csv(ctx.report("discrepancy.csv"), {"u", "cdf_empirical", "cdf_model"});
  const double lo = std::min(window.samples().front(), model.samples().front());
  const double hi = std::max(window.samples().back(), model.samples().back());
  const std::size_t P = std::max<std::size_t>(cfg.cdf_points, 2);
  for (std::size_t i = 0; i < P; ++i) {
    const double u = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(P - 1);
    csv.row({u, window.cdf(u), model.cdf(u)});
  }

  json body = {
      {"T", cfg.window_T},
      {"window_count", cfg.window_count},
      {"model_draws", ctx.batch->count},
      {"strategy", cfg.window_strategy},
      {"evaluation", exact ? "exact prefix sums" : "truncated Voronoi above table range"},
      {"config_hash", cfg.hash},
      {"asserted", {{"rate", "(log log log T)^{5/3} / (log log T)^{1/3}"},
                    {"berry_esseen", "1/R + int_{-R}^{R} |phi_F - phi_X| / |a| da"}}},
      {"recorded", {{"D", D}, {"berry_esseen_bound", be}, {"R", cfg.berry_esseen_R},
                    {"window_mean", window.mean()}, {"window_variance", window.variance()},
                    {"model_variance", model.variance()},
                    {"model", {{"N", ctx.model->n_model()}, {"R", ctx.model->r_model()}}}}},
  };
  if (cfg.window_T >= 16.0) {
    const std::vector<double> none;
    body["recorded"]["rate_at_T"] = bound_curves(cfg.window_T, none, cfg.eps1, cfg.eps2).rate;
  }
  write_json(ctx.report("discrepancy.json"), body);
}

void stage_moments(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto a = scaled_coefficients(*ctx.table, cfg.moments_M);
  CsvWriter csv(ctx.report("moments.csv"),
                {"h", "M", "T", "time_average", "model_moment", "gap", "bound_T_minus_2_9"});
  json rows = json::array();
  for (unsigned h = 1; h <= cfg.h_max; ++h) {
    const double model = model_moment_exact(a, h);
    for (double T : cfg.moments_T) {
      const double avg = time_average_power(a, cfg.alpha0, h, T);
      const double gap = std::fabs(avg - model);
      const double bound = std::pow(T, -2.0 / 9.0);
      csv.row({static_cast<double>(h), static_cast<double>(cfg.moments_M), T, avg, model, gap, bound});
      rows.push_back({{"h", h}, {"M", cfg.moments_M}, {"T", T}, {"time_average", avg},
                      {"model_moment", model}, {"gap", gap}, {"bound_T_minus_2_9", bound}});
    }
  }
  json body = {
      {"alpha0", cfg.alpha0},
      {"coefficients", "a_m / (pi sqrt 3 m^{2/3}), index m = n r^3"},
      {"asserted", {{"gap", "O(T^{-2/9})"}}},
      {"recorded", {{"rows", rows}, {"allowance_constant", 5.0}}},
  };
  write_json(ctx.report("moments.json"), body);
}

void stage_tails(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const EmpiricalDistribution model(ctx.batch->values);
  bool exact = true;
  const auto window = window_distribution(ctx, exact);
  const double sd = std::sqrt(model.variance());
  std::vector<double> vs;
  for (double k : cfg.tail_multiples) vs.push_back(k * sd);
  const double T = std::max(cfg.window_T, 16.0);
  const auto curves = bound_curves(T, vs, cfg.eps1, cfg.eps2, cfg.envelope);

  CsvWriter csv(ctx.report("tails.csv"), {"source", "multiple", "V", "P_above", "P_below",
                                          "envelope_lower", "envelope_upper"});
  for (const auto* which : {"model", "window"}) {
    const auto& dist = std::string(which) == "model" ? model : window;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      std::ostringstream line;
      line << which << ',' << format_double(cfg.tail_multiples[i]) << ',' << format_double(vs[i])
           << ',' << format_double(tail_probability(dist, vs[i], TailSide::kAbove)) << ','
           << format_double(tail_probability(dist, vs[i], TailSide::kBelow)) << ','
           << format_double(curves.envelope[i].lower) << ','
           << format_double(curves.envelope[i].upper);
      csv.row_strings({line.str()});
    }
  }
  json body = {
      {"left_tail_convention", "P(F < -V)"},
      {"right_tail_convention", "P(F > V)"},
      {"model_stddev", sd},
      {"asserted", {{"lower_envelope", "exp(-b3 V^{35/2 + eps1})"},
                    {"upper_envelope", "exp(-b4 V^{5/3 - eps2})"},
                    {"range", "b1 <= V <= b2 (log log T)^{1/21} (log log log T)^{-5/21}"}}},
      {"recorded", {{"b", {cfg.envelope.b1, cfg.envelope.b2, cfg.envelope.b3, cfg.envelope.b4}},
                    {"eps1", cfg.eps1}, {"eps2", cfg.eps2}, {"T", T},
                    {"v_min", curves.v_min}, {"v_max", curves.v_max}}},
      {"flags", json::array({"upper Laplace exponent taken as 5/2 as displayed; the tail "
                             "argument uses V = 2c lambda^{3/2}, which is inconsistent with it"})},
  };
  write_json(ctx.report("tails.json"), body);
}

void stage_laplace(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& model = *ctx.model;
  double max_abs = 0.0;
  for (double v : ctx.batch->values) max_abs = std::max(max_abs, std::fabs(v));
  CsvWriter csv(ctx.report("laplace.csv"),
                {"lambda", "log_E_exact", "loglog", "mc_estimate", "mc_stderr"});
  std::vector<double> lx, ly;
  for (double lambda : cfg.lambdas) {
    const double logE = log_laplace_exact(model, lambda);
    const double loglog = logE > 0.0 ? std::log(logE) : std::nan("");
    double est = std::nan(""), se = std::nan("");
    if (std::fabs(lambda) * max_abs < 700.0) {
      const auto e = laplace_transform(*ctx.batch, lambda);
      est = e.estimate;
      se = e.stderr_;
    }
    csv.row({lambda, logE, loglog, est, se});
    if (lambda > 0.0 && logE > 0.0) {
      lx.push_back(std::log(lambda));
      ly.push_back(loglog);
    }
  }
  double theta = std::nan("");
  if (lx.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      mx += lx[i];
      my += ly[i];
    }
    mx /= static_cast<double>(lx.size());
    my /= static_cast<double>(ly.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    theta = sxy / sxx;
  }
  json body = {
      {"asserted", {{"lower", "exp(c lambda^{8/7})"}, {"upper", "exp(c lambda^{5/2 + eps})"}}},
      {"recorded", {{"theta", theta}, {"max_abs_sample", max_abs}}},
      {"flags", json::array({"upper exponent 5/2 as displayed; 3/2 appears in the tail argument"})},
  };
  write_json(ctx.report("laplace.json"), body);
}

json manifest_body(const ExperimentConfig& cfg, const RunResult& result,
                   const std::vector<std::string>& log, const std::string& started) {
  json stages = json::array();
  for (const auto& s : result.stages) {
    stages.push_back({{"name", s.name}, {"wall_seconds", s.wall_seconds}, {"completed", s.completed}});
  }
  json reports = json::array();
  for (const auto& r : result.reports) reports.push_back(r.filename().string());
  json seeds = {{"window", cfg.window_seed ? json(*cfg.window_seed) : json(nullptr)},
                {"model", cfg.model_seed ? json(*cfg.model_seed) : json(nullptr)}};
  return {
      {"tool", "gl3lab"},
      {"config", {{"path", cfg.source.string()}, {"hash", cfg.hash}}},
      {"seeds", seeds},
      {"versions", {{"gl3lab", "0.1.0"}, {"compiler", __VERSION__}, {"cxx", __cplusplus},
                    {"boost", BOOST_LIB_VERSION}, {"json", "nlohmann " + std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}},
      {"threads", cfg.threads},
      {"started_utc", started},
      {"finished_utc", utc_now()},
      {"status", result.status},
      {"error", result.error},
      {"diagnostics", result.diagnostics},
      {"log", log},
      {"stages", stages},
      {"reports", reports},
  };
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::ostringstream raw;
  raw << in.rdbuf();
  const std::string text = raw.str();

  pt::ptree tree;
  try {
    std::istringstream stream(text);
    pt::ini_parser::read_ini(stream, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(path.string() + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  ExperimentConfig cfg;
  cfg.source = path;
  cfg.hash = fnv1a_hex(text);
  auto& diags = cfg.parse_diagnostics;

  for (const auto& [section, body] : tree) {
    const auto known = known_keys().find(section);
    if (known == known_keys().end()) {
      if (body.empty()) {
        diags.push_back("top-level key '" + section + "' outside any section");
      } else {
        diags.push_back("unknown section [" + section + "]");
      }
      continue;
    }
    for (const auto& [key, value] : body) {
      if (!known->second.count(key)) diags.push_back(section + "." + key + ": unknown key");
    }
  }

  Reader r(tree, diags);
  r.get("provider.name", cfg.provider);
  r.get("provider.N", cfg.N);
  r.get("provider.file", cfg.file);
  r.get("provider.memory_budget", cfg.memory_budget);
  if (!cfg.file.empty() && cfg.file.is_relative()) cfg.file = path.parent_path() / cfg.file;

  r.get("window.T", cfg.window_T);
  r.get("window.count", cfg.window_count);
  r.get("window.strategy", cfg.window_strategy);
  r.get("window.mode", cfg.window_mode);
  r.get("window.seed", cfg.window_seed);

  r.get("model.N_model", cfg.n_model);
  r.get("model.R_model", cfg.r_model);
  r.get("model.draws", cfg.draws);
  r.get("model.seed", cfg.model_seed);

  r.get("voronoi.alpha", cfg.voronoi.alpha);
  r.get("voronoi.sample_count", cfg.voronoi.sample_count);
  std::string precision = "extended";
  r.get("voronoi.precision", precision);
  if (precision == "double") {
    cfg.voronoi.precision = ArgumentPrecision::kDouble;
  } else if (precision != "extended") {
    diags.push_back("voronoi.precision: '" + precision + "' is not one of double, extended");
  }

  r.get("meansquare.points", cfg.meansquare_points);
  r.get("discrepancy.R", cfg.berry_esseen_R);
  r.get("discrepancy.quad_points", cfg.berry_esseen_points);
  r.get("discrepancy.cdf_points", cfg.cdf_points);

  r.get("moments.h_max", cfg.h_max);
  r.get("moments.M", cfg.moments_M);
  r.get("moments.alpha0", cfg.alpha0);
  r.get_list("moments.T", cfg.moments_T);

  r.get_list("tails.multiples", cfg.tail_multiples);
  r.get_list("tails.lambdas", cfg.lambdas);
  r.get("tails.b1", cfg.envelope.b1);
  r.get("tails.b2", cfg.envelope.b2);
  r.get("tails.b3", cfg.envelope.b3);
  r.get("tails.b4", cfg.envelope.b4);
  r.get("tails.eps1", cfg.eps1);
  r.get("tails.eps2", cfg.eps2);

  r.get("pipelines.meansquare", cfg.meansquare);
  r.get("pipelines.discrepancy", cfg.discrepancy);
  r.get("pipelines.moments", cfg.moments);
  r.get("pipelines.tails", cfg.tails);
  r.get("pipelines.laplace", cfg.laplace);
  r.get("pipelines.model", cfg.model);

  r.get("run.threads", cfg.threads);
  r.get("outputs.dir", cfg.output_dir);
  return cfg;
}

std::vector<std::string> validate(const ExperimentConfig& cfg) {
  std::vector<std::string> d = cfg.parse_diagnostics;

  bool provider_ok = true;
  try {
    provider_from_string(cfg.provider);
  } catch (const ValidationError& e) {
    d.push_back(std::string("provider.name: ") + e.what());
    provider_ok = false;
  }
  if (cfg.N == 0) d.push_back("provider.N: must be a positive integer");
  if (provider_ok && cfg.provider == "sym_square" && cfg.N > kTauLimit) {
    d.push_back("provider.N = " + std::to_string(cfg.N) + " exceeds the sym_square limit " +
                std::to_string(kTauLimit));
  }
  if (provider_ok && cfg.provider == "external" && cfg.file.empty()) {
    d.push_back("provider.file: required for the external provider");
  }
  if (provider_ok && cfg.provider == "divisor3" &&
      static_cast<long double>(cfg.N + 1) * 16.0L > static_cast<long double>(cfg.memory_budget)) {
    d.push_back("provider.N = " + std::to_string(cfg.N) + " needs " +
                std::to_string((cfg.N + 1) * 16) + " bytes, above provider.memory_budget = " +
                std::to_string(cfg.memory_budget));
  }

  if (!cfg.model_seed) d.push_back("model.seed: missing (seeds are mandatory)");
  if (!cfg.window_seed) d.push_back("window.seed: missing (seeds are mandatory)");

  const bool needs_model = cfg.discrepancy || cfg.tails || cfg.laplace || cfg.model;
  if (needs_model) {
    if (cfg.n_model == 0) d.push_back("model.N_model: must be positive");
    if (cfg.draws == 0) d.push_back("model.draws: must be positive");
    if (cfg.n_model > 0 && cfg.r_model > 0 && cfg.N > 0) {
      const long double need = static_cast<long double>(cfg.n_model) * cfg.r_model * cfg.r_model *
                               static_cast<long double>(cfg.r_model);
      if (need > static_cast<long double>(cfg.N)) {
        d.push_back("model.N_model * model.R_model^3 = " +
                    std::to_string(static_cast<unsigned long long>(need)) +
                    " exceeds provider.N = " + std::to_string(cfg.N));
      }
    } else if (cfg.n_model > cfg.N && cfg.N > 0) {
      d.push_back("model.N_model = " + std::to_string(cfg.n_model) + " exceeds provider.N = " +
                  std::to_string(cfg.N));
    }
  }

  if (cfg.discrepancy || cfg.tails) {
    if (!(cfg.window_T >= 1.0)) d.push_back("window.T: must be >= 1");
    if (cfg.window_count == 0) d.push_back("window.count: must be positive");
    if (cfg.window_strategy != "grid" && cfg.window_strategy != "uniform") {
      d.push_back("window.strategy: '" + cfg.window_strategy + "' is not one of grid, uniform");
    }
    if (cfg.window_mode != "auto" && cfg.window_mode != "exact") {
      d.push_back("window.mode: '" + cfg.window_mode + "' is not one of auto, exact");
    }
    if (cfg.window_mode == "exact" && 2.0 * cfg.window_T > static_cast<double>(cfg.N)) {
      d.push_back("window.T = " + format_double(cfg.window_T) +
                  " with window.mode = exact needs 2T <= provider.N = " + std::to_string(cfg.N));
    }
  }
  if (cfg.discrepancy && !(cfg.berry_esseen_R > 0.0)) d.push_back("discrepancy.R: must be positive");

  if (!(cfg.voronoi.alpha > 0.5 && cfg.voronoi.alpha < 2.0 / 3.0)) {
    d.push_back("voronoi.alpha = " + format_double(cfg.voronoi.alpha) +
                " must lie strictly between 1/2 and 2/3");
  }

  if (cfg.moments) {
    if (cfg.h_max == 0) d.push_back("moments.h_max: must be positive");
    if (cfg.moments_M == 0) d.push_back("moments.M: must be positive");
    if (cfg.moments_M > cfg.N) {
      d.push_back("moments.M = " + std::to_string(cfg.moments_M) + " exceeds provider.N = " +
                  std::to_string(cfg.N));
    }
    if (cfg.alpha0 == 0.0) d.push_back("moments.alpha0: must be nonzero");
    const double terms = std::pow(2.0 * static_cast<double>(cfg.moments_M), cfg.h_max);
    if (terms > TimeAverageOptions{}.term_limit) {
      d.push_back("moments: (2 M)^h_max = " + format_double(terms) + " exceeds the exact-path limit " +
                  format_double(TimeAverageOptions{}.term_limit));
    }
    for (double T : cfg.moments_T) {
      if (!(T > 0.0)) d.push_back("moments.T: entries must be positive");
    }
  }
  if (cfg.laplace) {
    for (double l : cfg.lambdas) {
      if (!(std::fabs(l) <= 50.0)) d.push_back("tails.lambdas: |lambda| <= 50 required, got " + format_double(l));
    }
  }
  if (cfg.tails && !(cfg.envelope.b1 > 0 && cfg.envelope.b2 > 0 && cfg.envelope.b3 > 0 &&
                     cfg.envelope.b4 > 0)) {
    d.push_back("tails.b1..b4: must be positive");
  }
  if (cfg.threads == 0) d.push_back("run.threads: must be positive");
  return d;
}

CoefficientTable build_table(const ExperimentConfig& cfg) {
  switch (provider_from_string(cfg.provider)) {
    case Provider::kDivisor3:
      return sieve_divisor3(cfg.N, cfg.memory_budget);
    case Provider::kSymSquare:
      return sym_square_tau_table(cfg.N);
    case Provider::kExternal: {
      auto table = load_coefficients(cfg.file);
      if (table.size() < cfg.N) {
        throw DimensionError("external table " + cfg.file.string() + " has length " +
                             std::to_string(table.size()) + " < provider.N = " +
                             std::to_string(cfg.N));
      }
      return table;
    }
  }
  throw ValidationError("unknown provider");
}

RunResult run(const ExperimentConfig& cfg) {
  RunResult result;
  const std::string started = utc_now();
  Context ctx{cfg, result, {}, {}, {}, {}, {}};

  auto write_manifest = [&] {
    try {
      std::filesystem::create_directories(cfg.output_dir);
      write_json(cfg.output_dir / "manifest.json", manifest_body(cfg, result, ctx.log, started));
    } catch (const std::exception& e) {
      if (result.status == 0) {
        result.status = static_cast<int>(ExitCode::kResource);
        result.error = std::string("manifest: ") + e.what();
      }
    }
  };

  result.diagnostics = validate(cfg);
  if (!result.diagnostics.empty()) {
    result.status = static_cast<int>(ExitCode::kValidation);
    result.error = "configuration invalid";
    write_manifest();
    return result;
  }

  auto stage = [&](const std::string& name, const std::function<void()>& body) {
    StageRecord record{name, 0.0, false};
    const auto start = std::chrono::steady_clock::now();
    result.stages.push_back(record);
    body();
    result.stages.back().wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.stages.back().completed = true;
  };

  try {
    std::filesystem::create_directories(cfg.output_dir);
    const bool needs_model = cfg.discrepancy || cfg.tails || cfg.laplace || cfg.model;
    const bool any = cfg.meansquare || cfg.moments || needs_model;
    if (any) {
      stage("sieve", [&] {
        ctx.table = build_table(cfg);
        for (const auto& w : ctx.table->warnings()) ctx.log.push_back("table: " + w);
      });
      stage("series", [&] { ctx.series = build_series(*ctx.table); });
    }
    if (needs_model) {
      stage("model", [&] {
        stage_model(ctx);
        stage_model_report(ctx);
      });
    }
    if (cfg.meansquare) stage("meansquare", [&] { stage_meansquare(ctx); });
    if (cfg.discrepancy) stage("discrepancy", [&] { stage_discrepancy(ctx); });
    if (cfg.moments) stage("moments", [&] { stage_moments(ctx); });
    if (cfg.tails) stage("tails", [&] { stage_tails(ctx); });
    if (cfg.laplace) stage("laplace", [&] { stage_laplace(ctx); });
  } catch (const Error& e) {
    result.status = static_cast<int>(e.exit_code());
    result.error = e.what();
  } catch (const std::bad_alloc&) {
    result.status = static_cast<int>(ExitCode::kResource);
    result.error = "allocation failed";
  } catch (const std::exception& e) {
    result.status = static_cast<int>(ExitCode::kNumeric);
    result.error = e.what();
  }
  write_manifest();
  return result;
}

}  // namespace gl3lab
