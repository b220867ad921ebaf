#include "cli/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "cli/params.hpp"
#include "json.hpp"
#include "qhp/errors.hpp"
#include "qhp/experiments.hpp"
#include "qhp/steady_state.hpp"

namespace qhp::cli {

namespace {

using nlohmann::ordered_json;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

// One table with a commented metadata header (CSV) or an object with
// "meta" and "rows" (JSON).
class Table {
 public:
  Table(std::string schema, const RunConfig& rc) : schema_(std::move(schema)) {
    meta("schema", schema_ + "/" + std::to_string(kSchemaVersion));
    meta("seed", std::to_string(rc.seed));
  }

  void meta(const std::string& key, const std::string& value) { meta_.emplace_back(key, value); }
  void meta(const std::string& key, double value) { meta(key, num(value)); }

  void echo(const ParamSet& params) {
    for (const auto& [k, v] : params.values()) meta("param." + k, v);
  }

  void columns(std::vector<std::string> names) { columns_ = std::move(names); }

  // Cells are preformatted text.
  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

  void write(std::ostream& os, Format format) const {
    if (format == Format::csv) {
      for (const auto& [k, v] : meta_) os << "# " << k << "=" << v << "\n";
      join(os, columns_);
      for (const auto& r : rows_) join(os, r);
      return;
    }
    ordered_json doc;
    ordered_json m = ordered_json::object();
    for (const auto& [k, v] : meta_) m[k] = v;
    doc["meta"] = m;
    ordered_json rows = ordered_json::array();
    for (const auto& r : rows_) {
      ordered_json o = ordered_json::object();
      for (std::size_t i = 0; i < columns_.size(); ++i) o[columns_[i]] = as_json(r[i]);
      rows.push_back(o);
    }
    doc["rows"] = rows;
    os << doc.dump(2) << "\n";
  }

 private:
  static void join(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << "\n";
  }

  // Numeric cells become JSON numbers; the rest stay strings.
  static ordered_json as_json(const std::string& cell) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (!cell.empty() && end == cell.c_str() + cell.size() && std::isfinite(v)) return v;
    return cell;
  }

  std::string schema_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

ParamSet load(const RunConfig& rc) {
  ParamSet p = rc.params_path.empty() ? ParamSet{} : load_params(rc.params_path);
  for (const auto& o : rc.overrides) apply_override(p, o);
  return p;
}

void warn(std::ostream& err, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) err << "warning: " << w << "\n";
}

Table currents(const RunConfig& rc, std::ostream& err) {
  const ParamSet p = load(rc);
  std::vector<std::string> warnings;
  const PumpConfig cfg = pump_config(p, true, &warnings);
  warn(err, warnings);
  const SteadySolution s = solve(cfg);
  Table t("currents", rc);
  t.echo(p);
  t.columns({"n_levels", "omega_h", "omega_c", "q_w", "q_h", "q_c", "cop", "entropy_rate", "mode", "first_law",
             "kernel_residual", "ideality_cold_work"});
  t.row({std::to_string(cfg.n_levels), num(cfg.omega_h), num(cfg.omega_c), num(s.q.work), num(s.q.hot),
         num(s.q.cold), num(s.cop), num(s.entropy_rate), std::string(to_string(s.mode)),
         num(s.residuals.at("first_law")), num(s.residuals.at("kernel_residual")),
         num(s.residuals.at("ideality_cold_work"))});
  return t;
}

Table optimize(const RunConfig& rc, std::ostream& err) {
  const ParamSet p = load(rc);
  std::vector<std::string> warnings;
  const PumpConfig cfg = pump_config(p, false, &warnings);
  warn(err, warnings);
  const Optimum o = maximize_cooling_power(cfg);
  Table t("optimize", rc);
  t.echo(p);
  t.columns({"n_levels", "omega_h", "omega_c_star", "q_c_max", "eps_star", "eps_ratio", "window_max", "carnot",
             "evaluations"});
  t.row({std::to_string(cfg.n_levels), num(cfg.omega_h), num(o.omega_c_star), num(o.q_c_max), num(o.eps_star),
         num(o.eps_ratio), num(o.window_max), num(o.carnot), std::to_string(o.evaluations)});
  return t;
}

Table sweep(const RunConfig& rc, std::ostream& err, int n_min, int n_max, double squeeze_db) {
  ParamSet p = load(rc);
  if (!p.has("n_levels")) p.set("n_levels", n_min);
  std::vector<std::string> warnings;
  const PumpConfig cfg = pump_config(p, false, &warnings);
  warn(err, warnings);
  const double db = squeeze_db >= 0.0 ? squeeze_db : p.get_or("squeeze_db", 7.0);
  const std::vector<VariantSpec> variants{{StageVariant::plain, 0.0},
                                          {StageVariant::squeezed, squeeze_db_to_r(db)},
                                          {StageVariant::saturated, 0.0}};
  const auto rows = sweep_stages(cfg, n_min, n_max, variants, rc.threads);
  Table t("sweep-n", rc);
  t.echo(p);
  t.meta("n_min", std::to_string(n_min));
  t.meta("n_max", std::to_string(n_max));
  t.meta("squeeze_db", db);
  t.meta("squeeze_r", squeeze_db_to_r(db));
  t.columns({"N", "variant", "omega_c_star", "q_c_max", "eps_star", "eps_ratio"});
  for (const auto& r : rows) {
    t.row({std::to_string(r.n_levels), std::string(to_string(r.variant.kind)), num(r.optimum.omega_c_star),
           num(r.optimum.q_c_max), num(r.optimum.eps_star), num(r.optimum.eps_ratio)});
  }
  return t;
}

std::string range_text(const LogRange& r) { return "log-uniform[" + num(r.lo) + "," + num(r.hi) + "]"; }

Table histogram(const RunConfig& rc, std::uint64_t samples) {
  SampleRanges ranges;
  ranges.seed = rc.seed;
  const Histogram h = cop_histogram(ranges, samples, rc.threads);
  Table t("histogram", rc);
  t.meta("samples", std::to_string(samples));
  t.meta("range.T_c", range_text(ranges.t_cold));
  t.meta("range.T_h_over_T_c", range_text(ranges.hot_over_cold));
  t.meta("range.T_w_over_T_h", range_text(ranges.work_over_hot));
  t.meta("range.omega_h_over_T_c", range_text(ranges.omega_h_over_cold));
  t.meta("range.gamma_over_min_omega_c_max_T_c", range_text(ranges.gamma_factor));
  t.meta("range.N", "uniform{" + std::to_string(ranges.n_min) + ".." + std::to_string(ranges.n_max) + "}");
  t.meta("rejected", std::to_string(h.rejected));
  t.meta("failed", std::to_string(h.failed));
  t.meta("accepted", std::to_string(h.samples.size()));
  t.meta("max_ratio", h.max_ratio);
  t.meta("mean_ratio", h.mean_ratio);
  t.meta("bin_width", h.bin_width);
  std::string bins;
  for (std::size_t k = 0; k < h.bins.size(); ++k) bins += (k ? ";" : "") + std::to_string(h.bins[k]);
  t.meta("bins", bins);
  t.columns({"sample", "eps_ratio", "N"});
  for (const auto& s : h.samples) {
    t.row({std::to_string(s.index), num(s.optimum.eps_ratio), std::to_string(s.config.n_levels)});
  }
  return t;
}

DissipatorBasis parse_basis(const std::string& s) {
  if (s == "local") return DissipatorBasis::local;
  if (s == "dressed") return DissipatorBasis::dressed;
  throw ConfigError("basis must be local or dressed");
}

void echo_comparison(Table& t, const ComparisonParams& c) {
  t.meta("omega_w", c.omega_w);
  t.meta("T_w", c.work.temperature);
  t.meta("T_h", c.hot.temperature);
  t.meta("T_c", c.cold.temperature);
  t.meta("gamma_w", c.work.gamma);
  t.meta("gamma_h", c.hot.gamma);
  t.meta("gamma_c", c.cold.gamma);
  t.meta("g", c.g);
  t.meta("ideal_levels", std::to_string(c.ideal_levels));
  t.meta("basis", std::string(to_string(c.basis)));
  t.meta("omega_c_max", c.window_max());
  t.meta("carnot", carnot_cop(c.temperatures()));
}

Table curve(const RunConfig& rc, int points, const std::string& system, const std::string& basis) {
  ComparisonParams c = comparison_params(load(rc));
  c.basis = parse_basis(basis);
  std::vector<CurveSystem> systems;
  if (system == "both" || system == "ideal") systems.push_back(CurveSystem::ideal);
  if (system == "both" || system == "three_qubit") systems.push_back(CurveSystem::three_qubit);
  if (systems.empty()) throw ConfigError("system must be ideal, three_qubit or both");
  Table t("curve", rc);
  echo_comparison(t, c);
  t.meta("points", std::to_string(points));
  t.columns({"omega_c", "q_c", "eps", "eps_over_carnot", "system"});
  for (CurveSystem s : systems) {
    for (const auto& pt : characteristic_curve(s, c, points, rc.threads)) {
      t.row({num(pt.omega_c), num(pt.q_c), num(pt.eps), num(pt.eps_over_carnot), std::string(to_string(s))});
    }
  }
  return t;
}

Table compare(const RunConfig& rc, int points, const std::string& basis) {
  ComparisonParams c = comparison_params(load(rc));
  c.basis = parse_basis(basis);
  const Comparison cmp = compare_ideal_three_qubit(c, points, rc.threads);
  Table t("compare", rc);
  echo_comparison(t, c);
  t.meta("points", std::to_string(points));
  t.meta("power_ratio", cmp.power_ratio);
  t.columns({"system", "omega_c_star", "q_c_max", "eps_star", "eps_ratio", "max_eps_over_carnot", "closed",
             "power_ratio"});
  double ideal_top = 0.0;
  for (const auto& pt : cmp.ideal_curve) ideal_top = std::max(ideal_top, pt.eps_over_carnot);
  const auto add = [&](const char* name, const Optimum& o, double top, bool closed) {
    t.row({name, num(o.omega_c_star), num(o.q_c_max), num(o.eps_star), num(o.eps_ratio), num(top),
           closed ? "true" : "false", num(cmp.power_ratio)});
  };
  add("ideal", cmp.ideal, ideal_top, curve_is_closed(cmp.ideal_curve));
  add("three_qubit", cmp.three_qubit, cmp.three_qubit_max_eps_ratio, cmp.three_qubit_closed);
  return t;
}

int parse_threads(const std::string& text) {
  if (text == "auto") return 0;
  try {
    std::size_t used = 0;
    const int n = std::stoi(text, &used);
    if (used == text.size() && n >= 1) return n;
  } catch (const std::exception&) {
  }
  throw ConfigError("--threads must be a positive integer or 'auto'");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"qhp: multi-level quantum absorption heat pumps"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig rc;
  std::string threads = "auto";
  std::string format = "csv";
  app.add_option("-p,--params", rc.params_path, "Parameter file (key = value lines)");
  app.add_option("--set", rc.overrides, "Override a parameter, key=value (repeatable)");
  app.add_option("--seed", rc.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads or 'auto'")->capture_default_str();
  app.add_option("-o,--output", rc.output, "Output file, '-' for standard output")->capture_default_str();
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  app.add_subcommand("currents", "Steady-state heat currents of one pump");
  app.add_subcommand("optimize", "Maximize cooling power over omega_c at fixed omega_h");

  int n_min = 3;
  int n_max = 10;
  double squeeze_db = -1.0;
  auto* sweep_cmd = app.add_subcommand("sweep-n", "Maximum cooling power versus N for three work-bath variants");
  sweep_cmd->add_option("--n-min", n_min)->capture_default_str();
  sweep_cmd->add_option("--n-max", n_max)->capture_default_str();
  sweep_cmd->add_option("--squeeze-db", squeeze_db, "Squeezing of the squeezed variant (default: file or 7)");

  std::uint64_t samples = 10000;
  bool full_scale = false;
  auto* hist_cmd = app.add_subcommand("histogram", "COP at maximum power over random fridges");
  hist_cmd->add_option("--samples", samples)->capture_default_str();
  hist_cmd->add_flag("--full-scale", full_scale, "Use 100000 samples");

  int points = 50;
  std::string system = "both";
  std::string basis = "local";
  auto* curve_cmd = app.add_subcommand("curve", "Cooling power versus efficiency, ideal and three-qubit");
  curve_cmd->add_option("--points", points)->capture_default_str();
  curve_cmd->add_option("--system", system, "ideal, three_qubit or both")->capture_default_str();
  curve_cmd->add_option("--basis", basis, "three-qubit dissipators: local or dressed")->capture_default_str();
  auto* compare_cmd = app.add_subcommand("compare", "Ideal eight-level pump against the three-qubit fridge");
  compare_cmd->add_option("--points", points)->capture_default_str();
  compare_cmd->add_option("--basis", basis)->capture_default_str();

  app.add_subcommand("selftest", "Run the invariant suite");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      for (auto* sub : app.get_subcommands()) out << sub->help();
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    rc.subcommand = app.get_subcommands().front()->get_name();
    rc.threads = parse_threads(threads);
    rc.format = format == "json" ? Format::json : Format::csv;
    if (full_scale) samples = 100000;

    std::ofstream file;
    if (rc.output != "-") {
      file.open(rc.output, std::ios::binary);
      if (!file) throw ConfigError("cannot open output file '" + rc.output + "'");
    }
    std::ostream& sink = rc.output == "-" ? out : file;

    if (rc.subcommand == "selftest") {
      const bool ok = run_selftest(sink, rc.seed, rc.threads);
      if (!ok) err << "selftest failed\n";
      return ok ? kOk : kSelftestFailure;
    }

    std::optional<Table> table;
    if (rc.subcommand == "currents") table = currents(rc, err);
    if (rc.subcommand == "optimize") table = optimize(rc, err);
    if (rc.subcommand == "sweep-n") table = sweep(rc, err, n_min, n_max, squeeze_db);
    if (rc.subcommand == "histogram") table = histogram(rc, samples);
    if (rc.subcommand == "curve") table = curve(rc, points, system, basis);
    if (rc.subcommand == "compare") table = compare(rc, points, basis);
    table->write(sink, rc.format);
    sink.flush();
    if (!sink) throw std::runtime_error("writing output failed");
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::domain_error& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kSolverFailure;
  }
}

}  // namespace qhp::cli
