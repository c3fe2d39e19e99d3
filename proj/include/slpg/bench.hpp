#pragma once

#include "slpg/driver.hpp"
#include "slpg/errors.hpp"
#include "slpg/problems.hpp"

#include "json.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace slpg::bench {

using json = nlohmann::json;

/// Environment variable that redirects every output file into a directory
/// (the configured file names are kept, their directories dropped).
inline constexpr const char *kOutputDirEnv = "SLPG_OUTPUT_DIR";

/// CSV header of a solve trace.
inline constexpr const char *kTraceHeader =
    "k,eta,fval,rval,merit,substationarity,feasibility,ts_feasibility,inner_iters,elapsed_s";

/// Stopping tolerance used by the multistart protocol.
inline constexpr double kMultistartTol = 1e-10;
/// Final values closer than this are counted as the same value.
inline constexpr double kBinGap = 1e-7;

class ConfigError : public Error {
public:
  using Error::Error;
};

struct OutputPaths {
  std::optional<std::string> trace_path;
  std::optional<std::string> summary_path;
};

struct RunConfig {
  InstanceSpec instance;
  SolveOptions options;
  OutputPaths outputs;
};

json to_json(const RunConfig &cfg);
/// Strict: unknown keys, wrong types and invalid values raise ConfigError.
RunConfig config_from_json(const json &j);
RunConfig parse_config(const std::string &text);
RunConfig load_config(const std::string &path);

struct PostProcessReport {
  bool applied = false;
  double fval_before = 0.0;
  double rval_before = 0.0;
  double fval_after = 0.0;
  double rval_after = 0.0;
  double feasibility_before = 0.0;
  double feasibility_after = 0.0;
};

struct RunSummary {
  double fval_final = 0.0;
  double rval_final = 0.0;
  double substationarity_final = 0.0;
  double feasibility_final = 0.0;
  int iterations = 0;
  double wall_time_s = 0.0;
  std::string terminated;
  PostProcessReport post;
  RunConfig config_echo;
};

/// Trace-tail values plus the post-process report of a finished solve.
RunSummary summarize(const SolveResult &res, const RunConfig &cfg, double wall_time_s);
json to_json(const RunSummary &s);

/// %.17g with '.' as decimal point, independent of the C locale.
std::string format_real(double v);
std::string trace_csv(const std::vector<IterRecord> &trace);

/// Resolves a configured output path against SLPG_OUTPUT_DIR.
std::string resolve_output_path(const std::string &path);

/// Runs a single configured solve on the generated instance.
SolveResult run_solve(const RunConfig &cfg, const GeneratedInstance &inst,
                      const Matrix &x0);

struct Variant {
  std::string name;
  InnerSolver inner;
  NormalKind normal;
};

/// FixedPoint+FirstOrder, Explicit+FirstOrder, FixedPoint+ExactPolar.
std::vector<Variant> compare_variants();

struct CompareRow {
  Variant variant;
  bool skipped = false;
  std::string skip_reason;
  RunSummary summary;
  double objective_final = 0.0;             ///< f + r at the returned point
  double max_feasibility = 0.0;             ///< max over all trace rows
  std::optional<double> stationarity_residual; ///< closed-form-multiplier residual
  std::vector<IterRecord> trace;
};

std::vector<CompareRow> run_compare(const RunConfig &cfg);

struct Bin {
  double value = 0.0; ///< smallest value in the bin
  int count = 0;
};

/// Sorts values and groups them: a bin spans less than `gap` from its
/// smallest member.
std::vector<Bin> bin_values(std::vector<double> values, double gap = kBinGap);

struct MultistartRun {
  int index = 0;
  std::uint64_t seed = 0;
  double objective_final = 0.0;
  RunSummary summary;
};

struct MultistartReport {
  std::vector<MultistartRun> runs;
  std::vector<Bin> bins;
};

/// Solves from `runs` random orthonormal starts (seeds derived from
/// options.seed) with tolerance kMultistartTol. Runs may execute on up to
/// `threads` threads; results are ordered by run index.
MultistartReport run_multistart(const RunConfig &cfg, int runs, int threads = 1);
std::string bins_csv(const std::vector<Bin> &bins);

/// Exit codes: 0 converged, 2 max iterations, 1 error.
int cmd_solve(const std::string &config_path, std::ostream &out, std::ostream &err);
int cmd_compare(const std::string &config_path, std::ostream &out, std::ostream &err);
int cmd_multistart(const std::string &config_path, int runs, std::ostream &out,
                   std::ostream &err, int threads = 1);

} // namespace slpg::bench
