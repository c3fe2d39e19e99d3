#include "slpg/bench.hpp"

#include "slpg/geometry.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace slpg::bench {

namespace {

// --- strict JSON readers ----------------------------------------------------

void check_keys(const json &obj, std::initializer_list<const char *> allowed,
                const std::string &where) {
  if (!obj.is_object())
    throw ConfigError(where + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char *k) { return it.key() == k; });
    if (!known)
      throw ConfigError(where + ": unknown field '" + it.key() + "'");
  }
}

double get_real(const json &obj, const char *key, double def, const std::string &where) {
  if (!obj.contains(key))
    return def;
  const json &v = obj.at(key);
  if (!v.is_number())
    throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

std::optional<double> get_opt_real(const json &obj, const char *key,
                                   std::optional<double> def, const std::string &where) {
  if (!obj.contains(key))
    return def;
  const json &v = obj.at(key);
  if (v.is_null())
    return std::nullopt;
  if (!v.is_number())
    throw ConfigError(where + "." + key + ": expected a number or null");
  return v.get<double>();
}

std::int64_t get_int(const json &obj, const char *key, std::int64_t def,
                     const std::string &where) {
  if (!obj.contains(key))
    return def;
  const json &v = obj.at(key);
  if (!v.is_number_integer())
    throw ConfigError(where + "." + key + ": expected an integer");
  return v.get<std::int64_t>();
}

std::uint64_t get_seed(const json &obj, const char *key, std::uint64_t def,
                       const std::string &where) {
  if (!obj.contains(key))
    return def;
  const json &v = obj.at(key);
  if (v.is_number_unsigned())
    return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError(where + "." + key + ": expected a nonnegative integer");
}

bool get_bool(const json &obj, const char *key, bool def, const std::string &where) {
  if (!obj.contains(key))
    return def;
  const json &v = obj.at(key);
  if (!v.is_boolean())
    throw ConfigError(where + "." + key + ": expected true or false");
  return v.get<bool>();
}

std::string get_string(const json &obj, const char *key, const std::string &def,
                       const std::string &where) {
  if (!obj.contains(key))
    return def;
  const json &v = obj.at(key);
  if (!v.is_string())
    throw ConfigError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::optional<std::string> get_opt_string(const json &obj, const char *key,
                                          const std::string &where) {
  if (!obj.contains(key) || obj.at(key).is_null())
    return std::nullopt;
  if (!obj.at(key).is_string())
    throw ConfigError(where + "." + key + ": expected a string or null");
  return obj.at(key).get<std::string>();
}

template <class Enum>
Enum parse_enum(const std::string &s, std::initializer_list<std::pair<const char *, Enum>> table,
                const std::string &where) {
  for (const auto &[name, value] : table)
    if (s == name)
      return value;
  throw ConfigError(where + ": unknown value '" + s + "'");
}

json opt_real_json(const std::optional<double> &v) { return v ? json(*v) : json(nullptr); }
json opt_string_json(const std::optional<std::string> &v) {
  return v ? json(*v) : json(nullptr);
}

InstanceSpec instance_from_json(const json &j) {
  const std::string w = "instance";
  check_keys(j, {"kind", "n", "p", "num_samples", "gamma_rule", "seed", "init"}, w);
  InstanceSpec s;
  s.kind = parse_enum<ProblemKind>(get_string(j, "kind", "SparsePCA", w),
                                   {{"PCA", ProblemKind::PCA},
                                    {"SparsePCA", ProblemKind::SparsePCA},
                                    {"L21PCA", ProblemKind::L21PCA}},
                                   w + ".kind");
  s.n = get_int(j, "n", s.n, w);
  s.p = get_int(j, "p", s.p, w);
  s.num_samples = get_int(j, "num_samples", s.num_samples, w);
  s.seed = get_seed(j, "seed", s.seed, w);
  s.init = parse_enum<InitKind>(get_string(j, "init", "LeadingEigenvectors", w),
                                {{"LeadingEigenvectors", InitKind::LeadingEigenvectors},
                                 {"RandomOrthonormal", InitKind::RandomOrthonormal}},
                                w + ".init");
  if (j.contains("gamma_rule")) {
    const json &g = j.at("gamma_rule");
    const std::string wg = w + ".gamma_rule";
    check_keys(g, {"kind", "value"}, wg);
    s.gamma_rule.kind = parse_enum<GammaRule::Kind>(
        get_string(g, "kind", "Direct", wg),
        {{"Direct", GammaRule::Kind::Direct}, {"BSqrt", GammaRule::Kind::BSqrt}}, wg + ".kind");
    s.gamma_rule.value = get_real(g, "value", s.gamma_rule.value, wg);
  }
  try {
    s.validate();
  } catch (const ParameterError &e) {
    throw ConfigError(e.what());
  }
  return s;
}

SolveOptions options_from_json(const json &j) {
  const std::string w = "options";
  check_keys(j,
             {"tol", "max_iter", "inner_cap", "c", "inner_solver", "normal_kind", "eta0",
              "eta_min", "eta_max", "post_process", "fixed_eta", "merit_constants", "seed"},
             w);
  SolveOptions o;
  o.tol = get_real(j, "tol", o.tol, w);
  o.max_iter = static_cast<int>(get_int(j, "max_iter", o.max_iter, w));
  o.inner_cap = static_cast<int>(get_int(j, "inner_cap", o.inner_cap, w));
  o.c = get_real(j, "c", o.c, w);
  o.inner_solver = parse_enum<InnerSolver>(
      get_string(j, "inner_solver", "FixedPoint", w),
      {{"FixedPoint", InnerSolver::FixedPoint}, {"Explicit", InnerSolver::Explicit}},
      w + ".inner_solver");
  o.normal_kind = parse_enum<NormalKind>(
      get_string(j, "normal_kind", "FirstOrder", w),
      {{"FirstOrder", NormalKind::FirstOrder}, {"ExactPolar", NormalKind::ExactPolar}},
      w + ".normal_kind");
  if (j.contains("eta0")) {
    const json &e = j.at("eta0");
    if (e.is_string()) {
      if (e.get<std::string>() != "Auto")
        throw ConfigError(w + ".eta0: expected \"Auto\" or a number");
      o.eta0.reset();
    } else if (e.is_number()) {
      o.eta0 = e.get<double>();
    } else {
      throw ConfigError(w + ".eta0: expected \"Auto\" or a number");
    }
  }
  o.eta_min = get_real(j, "eta_min", o.eta_min, w);
  o.eta_max = get_real(j, "eta_max", o.eta_max, w);
  o.post_process = get_bool(j, "post_process", o.post_process, w);
  o.fixed_eta = get_opt_real(j, "fixed_eta", o.fixed_eta, w);
  if (j.contains("merit_constants") && !j.at("merit_constants").is_null()) {
    const json &m = j.at("merit_constants");
    const std::string wm = w + ".merit_constants";
    check_keys(m, {"lf", "lfp", "lr"}, wm);
    MeritConstants k;
    k.lf = get_real(m, "lf", 0.0, wm);
    k.lfp = get_real(m, "lfp", 0.0, wm);
    k.lr = get_real(m, "lr", 0.0, wm);
    if (k.lf < 0.0 || k.lfp < 0.0 || k.lr < 0.0)
      throw ConfigError(wm + ": constants must be nonnegative");
    o.merit_constants = k;
  }
  o.seed = get_seed(j, "seed", o.seed, w);
  try {
    o.validate();
  } catch (const ParameterError &e) {
    throw ConfigError(e.what());
  }
  return o;
}

void write_file(const std::string &path, const std::string &content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path())
    std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f)
    throw Error("cannot open output file '" + path + "'");
  f << content;
  if (!f)
    throw Error("failed writing output file '" + path + "'");
}

std::string with_suffix(const std::string &path, const std::string &suffix) {
  std::filesystem::path p(path);
  const std::string ext = p.extension().string();
  p.replace_extension();
  return p.string() + "." + suffix + ext;
}

double wall_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

// --- config -------------------------------------------------------------------

json to_json(const RunConfig &cfg) {
  const InstanceSpec &s = cfg.instance;
  const SolveOptions &o = cfg.options;
  json inst = {
      {"kind", to_string(s.kind)},
      {"n", s.n},
      {"p", s.p},
      {"num_samples", s.num_samples},
      {"gamma_rule",
       {{"kind", s.gamma_rule.kind == GammaRule::Kind::Direct ? "Direct" : "BSqrt"},
        {"value", s.gamma_rule.value}}},
      {"seed", s.seed},
      {"init", to_string(s.init)},
  };
  json merit = nullptr;
  if (o.merit_constants)
    merit = {{"lf", o.merit_constants->lf},
             {"lfp", o.merit_constants->lfp},
             {"lr", o.merit_constants->lr}};
  json opts = {
      {"tol", o.tol},
      {"max_iter", o.max_iter},
      {"inner_cap", o.inner_cap},
      {"c", o.c},
      {"inner_solver", to_string(o.inner_solver)},
      {"normal_kind", to_string(o.normal_kind)},
      {"eta0", o.eta0 ? json(*o.eta0) : json("Auto")},
      {"eta_min", o.eta_min},
      {"eta_max", o.eta_max},
      {"post_process", o.post_process},
      {"fixed_eta", opt_real_json(o.fixed_eta)},
      {"merit_constants", merit},
      {"seed", o.seed},
  };
  json outs = {{"trace_path", opt_string_json(cfg.outputs.trace_path)},
               {"summary_path", opt_string_json(cfg.outputs.summary_path)}};
  return {{"instance", inst}, {"options", opts}, {"outputs", outs}};
}

RunConfig config_from_json(const json &j) {
  check_keys(j, {"instance", "options", "outputs"}, "config");
  RunConfig cfg;
  cfg.instance = instance_from_json(j.contains("instance") ? j.at("instance") : json::object());
  cfg.options = options_from_json(j.contains("options") ? j.at("options") : json::object());
  if (j.contains("outputs")) {
    const json &o = j.at("outputs");
    check_keys(o, {"trace_path", "summary_path"}, "outputs");
    cfg.outputs.trace_path = get_opt_string(o, "trace_path", "outputs");
    cfg.outputs.summary_path = get_opt_string(o, "summary_path", "outputs");
  }
  return cfg;
}

RunConfig parse_config(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

RunConfig load_config(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

// --- summaries and CSV ----------------------------------------------------------

RunSummary summarize(const SolveResult &res, const RunConfig &cfg, double wall_time_s) {
  RunSummary s;
  if (!res.trace.empty()) {
    const IterRecord &tail = res.trace.back();
    s.fval_final = tail.fval;
    s.rval_final = tail.rval;
    s.substationarity_final = tail.substationarity;
    s.feasibility_final = tail.feasibility;
    s.iterations = tail.k;
  }
  s.wall_time_s = wall_time_s;
  s.terminated = to_string(res.terminated);
  s.post.applied = res.post_processed;
  s.post.fval_before = res.fval_before_post;
  s.post.rval_before = res.rval_before_post;
  s.post.fval_after = res.fval_after_post;
  s.post.rval_after = res.rval_after_post;
  s.post.feasibility_before = res.feasibility_before_post;
  s.post.feasibility_after = res.feasibility_after_post;
  s.config_echo = cfg;
  return s;
}

json to_json(const RunSummary &s) {
  return {
      {"fval_final", s.fval_final},
      {"rval_final", s.rval_final},
      {"substationarity_final", s.substationarity_final},
      {"feasibility_final", s.feasibility_final},
      {"iterations", s.iterations},
      {"wall_time_s", s.wall_time_s},
      {"terminated", s.terminated},
      {"post_process",
       {{"applied", s.post.applied},
        {"fval_before", s.post.fval_before},
        {"rval_before", s.post.rval_before},
        {"fval_after", s.post.fval_after},
        {"rval_after", s.post.rval_after},
        {"feasibility_before", s.post.feasibility_before},
        {"feasibility_after", s.post.feasibility_after}}},
      {"config_echo", to_json(s.config_echo)},
  };
}

std::string format_real(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

std::string trace_csv(const std::vector<IterRecord> &trace) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const IterRecord &r : trace) {
    out += std::to_string(r.k);
    for (double v : {r.eta, r.fval, r.rval, r.merit, r.substationarity, r.feasibility,
                     r.ts_feasibility}) {
      out += ',';
      out += format_real(v);
    }
    out += ',';
    out += std::to_string(r.inner_iters);
    out += ',';
    out += format_real(r.elapsed_s);
    out += '\n';
  }
  return out;
}

std::string resolve_output_path(const std::string &path) {
  const char *dir = std::getenv(kOutputDirEnv);
  if (dir == nullptr || *dir == '\0')
    return path;
  return (std::filesystem::path(dir) / std::filesystem::path(path).filename()).string();
}

SolveResult run_solve(const RunConfig &cfg, const GeneratedInstance &inst, const Matrix &x0) {
  return slpg_solve(*inst.objective, *inst.regularizer, x0, cfg.options);
}

// --- compare --------------------------------------------------------------------

std::vector<Variant> compare_variants() {
  return {{"FixedPoint+FirstOrder", InnerSolver::FixedPoint, NormalKind::FirstOrder},
          {"Explicit+FirstOrder", InnerSolver::Explicit, NormalKind::FirstOrder},
          {"FixedPoint+ExactPolar", InnerSolver::FixedPoint, NormalKind::ExactPolar}};
}

std::vector<CompareRow> run_compare(const RunConfig &cfg) {
  const GeneratedInstance inst = make_instance(cfg.instance);
  const bool has_closed_form = inst.regularizer->multiplier_correction(inst.x0).has_value();
  std::vector<CompareRow> rows;
  for (const Variant &v : compare_variants()) {
    CompareRow row;
    row.variant = v;
    RunConfig vc = cfg;
    vc.options.inner_solver = v.inner;
    vc.options.normal_kind = v.normal;
    if (v.inner == InnerSolver::Explicit && !has_closed_form) {
      row.skipped = true;
      row.skip_reason = "explicit multiplier unavailable for " + to_string(inst.regularizer->kind());
      row.summary.config_echo = vc;
      row.summary.terminated = "Skipped";
      rows.push_back(std::move(row));
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult res = run_solve(vc, inst, inst.x0);
    row.summary = summarize(res, vc, wall_seconds(t0));
    row.objective_final =
        inst.objective->value(res.x_final) + inst.regularizer->value(res.x_final);
    for (const IterRecord &r : res.trace)
      row.max_feasibility = std::max(row.max_feasibility, r.feasibility);
    if (has_closed_form)
      row.stationarity_residual =
          smooth_stationarity_residual(*inst.objective, *inst.regularizer, res.x_final);
    row.trace = std::move(res.trace);
    rows.push_back(std::move(row));
  }
  return rows;
}

// --- multistart -----------------------------------------------------------------

std::vector<Bin> bin_values(std::vector<double> values, double gap) {
  std::sort(values.begin(), values.end());
  std::vector<Bin> bins;
  for (double v : values) {
    if (bins.empty() || v - bins.back().value >= gap)
      bins.push_back({v, 1});
    else
      ++bins.back().count;
  }
  return bins;
}

MultistartReport run_multistart(const RunConfig &cfg, int runs, int threads) {
  if (runs < 1)
    throw ParameterError("run_multistart: runs must be at least 1");
  const GeneratedInstance inst = make_instance(cfg.instance);
  RunConfig rc = cfg;
  rc.options.tol = kMultistartTol;

  MultistartReport rep;
  rep.runs.resize(static_cast<std::size_t>(runs));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(runs));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next++; i < runs; i = next++) {
      try {
        MultistartRun &run = rep.runs[static_cast<std::size_t>(i)];
        run.index = i;
        run.seed = derive_seed(cfg.options.seed, static_cast<std::uint64_t>(i));
        const Matrix x0 = random_orthonormal(cfg.instance.n, cfg.instance.p, run.seed);
        const auto t0 = std::chrono::steady_clock::now();
        SolveResult res = run_solve(rc, inst, x0);
        run.summary = summarize(res, rc, wall_seconds(t0));
        run.objective_final =
            inst.objective->value(res.x_final) + inst.regularizer->value(res.x_final);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const int nthreads = std::clamp(threads, 1, runs);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back(worker);
    for (std::thread &t : pool)
      t.join();
  }
  for (const std::exception_ptr &e : errors)
    if (e)
      std::rethrow_exception(e);

  std::vector<double> values;
  values.reserve(rep.runs.size());
  for (const MultistartRun &r : rep.runs)
    values.push_back(r.objective_final);
  rep.bins = bin_values(std::move(values));
  return rep;
}

std::string bins_csv(const std::vector<Bin> &bins) {
  std::string out = "bin_value,count\n";
  for (const Bin &b : bins)
    out += format_real(b.value) + "," + std::to_string(b.count) + "\n";
  return out;
}

// --- commands -------------------------------------------------------------------

int cmd_solve(const std::string &config_path, std::ostream &out, std::ostream &err) {
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  try {
    const GeneratedInstance inst = make_instance(cfg.instance);
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult res;
    try {
      res = run_solve(cfg, inst, inst.x0);
    } catch (const NumericalFailure &e) {
      if (cfg.outputs.trace_path)
        write_file(resolve_output_path(*cfg.outputs.trace_path), trace_csv(e.trace()));
      throw;
    }
    const RunSummary summary = summarize(res, cfg, wall_seconds(t0));
    const std::string summary_text = to_json(summary).dump(2) + "\n";
    if (cfg.outputs.trace_path)
      write_file(resolve_output_path(*cfg.outputs.trace_path), trace_csv(res.trace));
    if (cfg.outputs.summary_path)
      write_file(resolve_output_path(*cfg.outputs.summary_path), summary_text);
    else
      out << summary_text;
    return res.terminated == Termination::Converged ? 0 : 2;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_compare(const std::string &config_path, std::ostream &out, std::ostream &err) {
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  try {
    const std::vector<CompareRow> rows = run_compare(cfg);
    json table = json::array();
    bool all_converged = true;
    out << "variant,terminated,iterations,fval,rval,objective,substationarity,"
           "max_feasibility,stationarity_residual\n";
    for (const CompareRow &r : rows) {
      json jr = {{"variant", r.variant.name}, {"skipped", r.skipped}};
      if (r.skipped) {
        jr["skip_reason"] = r.skip_reason;
        out << r.variant.name << ",Skipped,,,,,,,\n";
      } else {
        all_converged = all_converged && r.summary.terminated == "Converged";
        jr["summary"] = to_json(r.summary);
        jr["objective_final"] = r.objective_final;
        jr["max_feasibility"] = r.max_feasibility;
        jr["stationarity_residual"] =
            r.stationarity_residual ? json(*r.stationarity_residual) : json(nullptr);
        out << r.variant.name << ',' << r.summary.terminated << ',' << r.summary.iterations
            << ',' << format_real(r.summary.fval_final) << ','
            << format_real(r.summary.rval_final) << ',' << format_real(r.objective_final) << ','
            << format_real(r.summary.substationarity_final) << ','
            << format_real(r.max_feasibility) << ','
            << (r.stationarity_residual ? format_real(*r.stationarity_residual) : "") << '\n';
        if (cfg.outputs.trace_path)
          write_file(resolve_output_path(with_suffix(*cfg.outputs.trace_path, r.variant.name)),
                     trace_csv(r.trace));
      }
      table.push_back(std::move(jr));
    }
    if (cfg.outputs.summary_path)
      write_file(resolve_output_path(*cfg.outputs.summary_path), table.dump(2) + "\n");
    return all_converged ? 0 : 2;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_multistart(const std::string &config_path, int runs, std::ostream &out,
                   std::ostream &err, int threads) {
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
    if (runs < 1)
      throw ConfigError("--runs must be at least 1");
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  try {
    const MultistartReport rep = run_multistart(cfg, runs, threads);
    const std::string csv = bins_csv(rep.bins);
    out << csv;
    bool all_converged = true;
    json per_run = json::array();
    for (const MultistartRun &r : rep.runs) {
      all_converged = all_converged && r.summary.terminated == "Converged";
      json s = to_json(r.summary);
      s.erase("config_echo");
      per_run.push_back(
          {{"run", r.index}, {"seed", r.seed}, {"objective_final", r.objective_final}, {"summary", s}});
    }
    if (cfg.outputs.trace_path)
      write_file(resolve_output_path(*cfg.outputs.trace_path), csv);
    if (cfg.outputs.summary_path) {
      json bins = json::array();
      for (const Bin &b : rep.bins)
        bins.push_back({{"bin_value", b.value}, {"count", b.count}});
      RunConfig echo = cfg;
      echo.options.tol = kMultistartTol;
      const json doc = {{"runs", per_run}, {"bins", bins}, {"config_echo", to_json(echo)}};
      write_file(resolve_output_path(*cfg.outputs.summary_path), doc.dump(2) + "\n");
    }
    return all_converged ? 0 : 2;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

} // namespace slpg::bench
