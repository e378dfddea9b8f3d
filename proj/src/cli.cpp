#include "sqent/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sqent/energy_bounds.hpp"
#include "sqent/entropic.hpp"
#include "sqent/formation.hpp"
#include "sqent/squashed.hpp"
#include "sqent/state_io.hpp"
#include "sqent/truncation_lab.hpp"

namespace sqent::cli {
namespace {

using nlohmann::json;

struct OptimizerFlags {
  int restarts = 8;
  int max_iterations = 1000;
  double step_tolerance = 1e-7;
  double value_tolerance = 1e-12;
  std::uint64_t seed = 1;
  std::string gradient = "analytic";
  double fd_step = 1e-5;
};

void add_optimizer_flags(CLI::App* app, OptimizerFlags& f) {
  app->add_option("--restarts", f.restarts, "Optimizer restarts")->capture_default_str();
  app->add_option("--max-iter", f.max_iterations, "Iterations per restart")->capture_default_str();
  app->add_option("--step-tol", f.step_tolerance, "Riemannian gradient norm tolerance")->capture_default_str();
  app->add_option("--value-tol", f.value_tolerance, "Objective decrease tolerance")->capture_default_str();
  app->add_option("--seed", f.seed, "Random seed")->capture_default_str();
  app->add_option("--gradient", f.gradient, "analytic or fd")
      ->check(CLI::IsMember({"analytic", "fd"}))
      ->capture_default_str();
  app->add_option("--fd-step", f.fd_step, "Finite-difference step")->capture_default_str();
}

OptimizerConfig make_config(const OptimizerFlags& f, int threads) {
  OptimizerConfig cfg;
  cfg.restarts = f.restarts;
  cfg.max_iterations = f.max_iterations;
  cfg.step_tolerance = f.step_tolerance;
  cfg.value_tolerance = f.value_tolerance;
  cfg.seed = f.seed;
  cfg.gradient = f.gradient == "fd" ? GradientMode::finite_difference : GradientMode::analytic;
  cfg.fd_step = f.fd_step;
  cfg.threads = threads;
  cfg.validate();
  return cfg;
}

json to_json(const OptimizerConfig& cfg) {
  return {{"restarts", cfg.restarts},
          {"max_iterations", cfg.max_iterations},
          {"step_tolerance", cfg.step_tolerance},
          {"value_tolerance", cfg.value_tolerance},
          {"seed", cfg.seed},
          {"gradient", cfg.gradient == GradientMode::analytic ? "analytic" : "fd"},
          {"fd_step", cfg.fd_step}};
}

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (flag < 0) throw InvalidArgument("--threads must be >= 1");
  if (const char* env = std::getenv("SQENT_THREADS")) {
    try {
      std::size_t used = 0;
      const int n = std::stoi(env, &used);
      if (used == std::string(env).size() && n >= 1) return n;
    } catch (const std::exception&) {
    }
    throw InvalidArgument("SQENT_THREADS must be a positive integer");
  }
  return 1;
}

struct Units {
  bool bits = false;
  double operator()(double nats) const { return bits ? nats / std::log(2.0) : nats; }
  const char* name() const { return bits ? "bits" : "nats"; }
};

json num(double v) { return json_number(v); }

std::filesystem::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
  return dir;
}

// ---- measure ----

struct MeasureArgs {
  std::string state;
  std::string measure;
  Index n = 2;
  Index ensemble = 0;
  std::vector<std::string> a, b, e;
  std::string trace_out;
  OptimizerFlags opt;
};

std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::string csv = "restart,iteration,value\n";
  for (const auto& r : rows)
    csv += std::to_string(r.restart) + "," + std::to_string(r.iteration) + "," + csv_number(r.value) + "\n";
  return csv;
}

json certificate_summary(const ExtensionCertificate& cert, const Units& u) {
  json c{{"source", to_string(cert.source)},
         {"cmi", num(u(cert.cmi_value))},
         {"dim_e", cert.extension.layout().dim_of(cert.label_e)}};
  return c;
}

bool run_measure(const MeasureArgs& args, const OptimizerConfig& cfg, const Units& u, json& doc) {
  const DensityOperator omega = load_state(args.state);
  doc["measure"] = args.measure;
  doc["state"] = args.state;
  doc["unit"] = u.name();
  const auto labels = omega.layout().labels();
  auto default_parts = [&](LabelSet& a, LabelSet& b) {
    if (a.empty()) a = {labels.front()};
    if (b.empty())
      for (const auto& l : labels)
        if (std::find(a.begin(), a.end(), l) == a.end()) b.push_back(l);
  };

  bool converged = true;
  if (args.measure == "entropy") {
    doc["value"] = num(u(entropy(omega)));
  } else if (args.measure == "mi") {
    LabelSet a = args.a, b = args.b;
    default_parts(a, b);
    doc["parts"] = {{"a", a}, {"b", b}};
    doc["value"] = num(u(mutual_information(omega, a, b)));
  } else if (args.measure == "cmi") {
    if (args.a.empty() || args.b.empty()) throw InvalidArgument("cmi requires --a and --b (and --e)");
    const CmiForms forms = cmi_forms(omega, args.a, args.b, args.e);
    doc["parts"] = {{"a", args.a}, {"b", args.b}, {"e", args.e}};
    doc["value"] = num(u(cmi(omega, args.a, args.b, args.e)));
    doc["forms"] = {{"entropic", num(u(forms.entropic))}, {"chain", num(u(forms.chain))}, {"mutual", num(u(forms.mutual))}};
  } else if (args.measure == "esq") {
    const SquashResult r = esq_upper(omega, args.n, cfg);
    verify_certificate(r.certificate, omega);
    converged = r.converged;
    doc["n"] = args.n;
    doc["value"] = num(u(r.value));
    doc["lower"] = num(u(esq_lower(omega)));
    doc["certificate"] = certificate_summary(r.certificate, u);
    doc["best_restart"] = r.best_restart;
    json rv = json::array();
    for (double v : r.restart_values) rv.push_back(num(u(v)));
    doc["restart_values"] = rv;
    doc["converged"] = r.converged;
    doc["seed"] = cfg.seed;
    doc["optimizer"] = to_json(cfg);
    if (!args.trace_out.empty()) {
      write_text_file(args.trace_out, trace_csv(r.trace));
      doc["trace_file"] = args.trace_out;
    }
  } else if (args.measure == "eof") {
    const FormationResult r = eof_upper(omega, args.ensemble, cfg);
    converged = r.converged;
    doc["value"] = num(u(r.value));
    doc["ensemble_size"] = r.decomposition.weights.size();
    doc["best_restart"] = r.best_restart;
    doc["converged"] = r.converged;
    if (omega.layout().dims() == std::vector<Index>{2, 2}) doc["wootters"] = num(u(wootters_eof(omega)));
    doc["seed"] = cfg.seed;
    doc["optimizer"] = to_json(cfg);
    if (!args.trace_out.empty()) {
      write_text_file(args.trace_out, trace_csv(r.trace));
      doc["trace_file"] = args.trace_out;
    }
  } else {
    const SandwichReport r = bounds_sandwich(omega, args.n, cfg);
    converged = r.converged;
    doc["n"] = args.n;
    doc["lower"] = num(u(r.lower));
    doc["upper_trivial"] = num(u(r.upper_trivial));
    doc["upper_optimized"] = num(u(r.upper_optimized));
    doc["upper_formation"] = num(u(r.upper_formation));
    doc["value"] = num(u(std::min({r.upper_trivial, r.upper_optimized, r.upper_formation})));
    doc["converged"] = r.converged;
    doc["seed"] = cfg.seed;
    doc["optimizer"] = to_json(cfg);
  }
  return converged;
}

// ---- bound ----

struct BoundArgs {
  std::string bound;
  std::string spectrum = "oscillator";
  Index spectrum_dim = 0;
  std::vector<double> levels;
  double energy = 1.0;
  std::vector<double> half_trace_eps;
  std::vector<double> trace_eps;
  std::optional<double> eps_prime;
  Index dim_a = 2;
  Index d = 1;
  std::string out;
};

HamiltonianSpectrum make_spectrum(const BoundArgs& args) {
  if (args.spectrum == "levels") {
    if (args.levels.empty()) throw InvalidArgument("--spectrum levels requires --levels");
    return HamiltonianSpectrum::from_levels(args.levels);
  }
  if (args.spectrum_dim > 0) return HamiltonianSpectrum::oscillator(args.spectrum_dim);
  return HamiltonianSpectrum::oscillator_ladder();
}

json scaled(const BoundReport& report, const Units& u) {
  json j = to_json(report);
  for (auto& t : j["terms"]) t["value"] = num(u(t["value"].get<double>()));
  j["total"] = num(u(report.total));
  return j;
}

void run_bound(const BoundArgs& args, const Units& u, json& doc) {
  doc["bound"] = args.bound;
  doc["unit"] = u.name();
  if (args.bound == "fannes") {
    if (!args.eps_prime) throw InvalidArgument("fannes bound requires --eps-prime");
    doc["inputs"] = {{"d", args.d}, {"eps_prime", num(*args.eps_prime)}};
    doc["value"] = num(u(fannes_cmi_bound(args.d, *args.eps_prime)));
    return;
  }
  if (args.half_trace_eps.empty() == args.trace_eps.empty())
    throw InvalidArgument("exactly one of --half-trace-eps or --trace-eps is required");
  // native conventions: cmi uses ½‖·‖₁, em and finite-dim use ‖·‖₁
  const bool native_half = args.bound == "cmi";
  std::vector<double> eps;
  for (double x : args.half_trace_eps) eps.push_back(native_half ? x : 2.0 * x);
  for (double x : args.trace_eps) eps.push_back(native_half ? 0.5 * x : x);

  if (args.bound == "finite-dim") {
    json rows = json::array();
    std::string csv = "eps,total\n";
    for (double x : eps) {
      const double v = finite_dim_esq_bound(args.dim_a, x);
      rows.push_back({{"eps", num(x)}, {"total", num(u(v))}});
      csv += csv_number(x) + "," + csv_number(u(v)) + "\n";
    }
    doc["convention"] = "trace";
    doc["inputs"] = {{"dA", args.dim_a}};
    if (rows.size() == 1)
      doc["value"] = rows[0]["total"];
    else
      doc["sweep"] = rows;
    if (!args.out.empty()) {
      const auto dir = prepare_dir(args.out);
      write_text_file(dir / "bound_finite-dim.csv", csv);
      doc["files"] = {"bound_finite-dim.csv"};
    }
    return;
  }

  const HamiltonianSpectrum spec = make_spectrum(args);
  std::vector<BoundReport> reports;
  for (double x : eps) {
    const double ep = args.eps_prime.value_or(args.bound == "cmi" ? std::min(1.0, 2.0 * x)
                                                                  : std::min(1.0, 2.0 * std::sqrt(x)));
    reports.push_back(args.bound == "cmi" ? cmi_continuity_bound(spec, args.energy, x, ep)
                                          : em_continuity_bound(spec, args.energy, x, ep));
  }
  doc["spectrum"] = spec.infinite() ? json("oscillator-ladder") : json(spec.levels());
  if (reports.size() == 1) {
    doc["report"] = scaled(reports.front(), u);
  } else {
    json rows = json::array();
    for (const auto& r : reports) rows.push_back(scaled(r, u));
    doc["sweep"] = rows;
  }
  if (!args.out.empty()) {
    std::string csv = "eps,eps_prime,delta,E,term1,term2,term3,total\n";
    for (const auto& r : reports) {
      csv += csv_number(r.eps) + "," + csv_number(r.eps_prime) + "," + csv_number(r.delta) + "," +
             csv_number(r.energy);
      for (const auto& t : r.terms) csv += "," + csv_number(u(t.value));
      csv += "," + csv_number(u(r.total)) + "\n";
    }
    const auto dir = prepare_dir(args.out);
    const std::string name = "bound_" + args.bound + ".csv";
    write_text_file(dir / name, csv);
    doc["files"] = {name};
  }
}

// ---- experiment ----

struct ExperimentArgs {
  std::string run;
  std::string family = "bell";
  double lambda = 0.5;
  double p = 0.8;
  double tail_exponent = 2.0;
  Index d = 0;
  std::vector<Index> ranks;
  Index n = 2;
  std::vector<Index> ns;
  double energy = 1.0;
  std::vector<double> eps{0.1};
  Index dim_b = 2;
  double tail_mass = 1e-8;
  std::string out;
  OptimizerFlags opt;
};

ModelStateSpec make_model(const ExperimentArgs& args) {
  const Family f = parse_family(args.family);
  switch (f) {
    case Family::tmsv: return ModelStateSpec::tmsv(args.lambda, args.d > 0 ? args.d : 8);
    case Family::classical_correlated:
      return ModelStateSpec::classical_correlated(args.d > 0 ? args.d : 16, args.tail_exponent);
    case Family::werner: return ModelStateSpec::werner(args.p);
    case Family::isotropic: return ModelStateSpec::isotropic(args.p);
    case Family::bell: return ModelStateSpec::bell();
  }
  throw InvalidArgument("unknown family");
}

bool run_experiment(const ExperimentArgs& args, const OptimizerConfig& cfg, const Units& u, json& doc) {
  doc["run"] = args.run;
  doc["unit"] = u.name();
  json manifest{{"command", "experiment"}, {"run", args.run}, {"unit", u.name()}};
  std::vector<std::pair<std::string, std::string>> files;
  bool converged = true;

  if (args.run == "convergence") {
    ModelStateSpec spec = make_model(args);
    spec.validate();
    const std::vector<Index> ranks = args.ranks.empty() ? std::vector<Index>{spec.dim} : args.ranks;
    auto rows = convergence_run(spec, ranks, args.n, cfg);
    json jrows = json::array();
    for (auto& r : rows) {
      converged = converged && r.converged;
      r.esq_upper = u(r.esq_upper);
      r.eof_upper = u(r.eof_upper);
      r.esq_lower = u(r.esq_lower);
      r.mutual_information = u(r.mutual_information);
      jrows.push_back({{"rank", r.rank},
                       {"trace", num(r.trace)},
                       {"esq_upper", num(r.esq_upper)},
                       {"eof_upper", num(r.eof_upper)},
                       {"esq_lower", num(r.esq_lower)},
                       {"mutual_information", num(r.mutual_information)},
                       {"certificate", r.certificate},
                       {"converged", r.converged}});
    }
    doc["spec"] = to_json(spec);
    doc["n"] = args.n;
    doc["rows"] = jrows;
    doc["seed"] = cfg.seed;
    manifest["spec"] = to_json(spec);
    manifest["n"] = args.n;
    manifest["ranks"] = ranks;
    manifest["optimizer"] = to_json(cfg);
    manifest["seed"] = cfg.seed;
    files.emplace_back("convergence.csv", to_csv(rows));
  } else if (args.run == "dichotomy") {
    const ModelStateSpec spec = ModelStateSpec::classical_correlated(args.d > 0 ? args.d : 16, args.tail_exponent);
    std::vector<Index> ns = args.ns;
    if (ns.empty())
      for (Index n = 1; n <= spec.dim; n *= 2) ns.push_back(n);
    auto rows = dichotomy_probe(spec, ns);
    json jrows = json::array();
    for (auto& r : rows) {
      r.mutual_information = u(r.mutual_information);
      r.lower = u(r.lower);
      r.certified_upper = u(r.certified_upper);
      jrows.push_back({{"n", r.n},
                       {"mutual_information", num(r.mutual_information)},
                       {"lower", num(r.lower)},
                       {"certified_upper", num(r.certified_upper)},
                       {"certificate", r.certificate}});
    }
    json by_dim = json::array();
    for (Index dd = std::max<Index>(2, spec.dim / 4); dd <= spec.dim; dd *= 2) {
      const DensityOperator w = build_state(ModelStateSpec::classical_correlated(dd, args.tail_exponent));
      by_dim.push_back({{"d", dd}, {"mutual_information", num(u(mutual_information(w, {"A"}, {"B"})))}});
    }
    doc["spec"] = to_json(spec);
    doc["rows"] = jrows;
    doc["mutual_information_by_d"] = by_dim;
    manifest["spec"] = to_json(spec);
    manifest["ns"] = ns;
    files.emplace_back("dichotomy.csv", to_csv(rows));
  } else {
    const HamiltonianSpectrum spec = HamiltonianSpectrum::oscillator_for_energy(args.energy, args.tail_mass);
    json jrows = json::array();
    std::string csv = "eps,eps_prime,gap,expected_gap,bound_total,within_bound\n";
    for (double eps : args.eps) {
      const TightnessWitness w = tightness_witness(spec, args.energy, eps, args.dim_b, spec.dim());
      json bounds = json::array();
      bool within = true;
      if (eps > 0.0) {
        for (int k = 1; k <= 10; ++k) {
          const double ep = eps + (1.0 - eps) * k / 10.0;
          const BoundReport r = cmi_continuity_bound(spec.untruncated(), args.energy, eps, ep);
          const bool ok = w.gap <= r.total + 1e-8;
          within = within && ok;
          bounds.push_back({{"eps_prime", num(ep)}, {"total", num(u(r.total))}});
          csv += csv_number(eps) + "," + csv_number(ep) + "," + csv_number(u(w.gap)) + "," +
                 csv_number(u(2.0 * eps * w.gibbs_entropy)) + "," + csv_number(u(r.total)) + "," +
                 (ok ? "true" : "false") + "\n";
        }
      }
      jrows.push_back({{"eps", num(eps)},
                       {"gap", num(u(w.gap))},
                       {"expected_gap", num(u(2.0 * eps * w.gibbs_entropy))},
                       {"gibbs_entropy", num(u(w.gibbs_entropy))},
                       {"half_trace_distance", num(w.half_trace_distance)},
                       {"bounds", bounds},
                       {"within_bound", within}});
    }
    doc["energy"] = num(args.energy);
    doc["truncation_dim"] = spec.dim();
    doc["rows"] = jrows;
    manifest["energy"] = num(args.energy);
    manifest["eps"] = args.eps;
    manifest["dim_b"] = args.dim_b;
    manifest["truncation_dim"] = spec.dim();
    files.emplace_back("tightness.csv", csv);
  }

  const auto dir = prepare_dir(args.out);
  json names = json::array();
  for (const auto& [name, content] : files) {
    write_text_file(dir / name, content);
    names.push_back(name);
  }
  manifest["files"] = names;
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
  names.push_back("manifest.json");
  doc["files"] = names;
  return converged;
}

// ---- state ----

struct StateArgs {
  std::string family = "bell";
  double lambda = 0.5;
  double p = 0.8;
  double tail_exponent = 2.0;
  Index d = 0;
  std::string out;
};

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Squashed entanglement and energy-constrained continuity bounds"};
  app.name("sqent");
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");
  int threads_flag = 0;
  bool bits = false;
  bool timing = false;
  app.add_option("--threads", threads_flag, "Worker threads (fallback: SQENT_THREADS, default 1)");
  app.add_flag("--bits", bits, "Report entropic quantities in bits");
  app.add_flag("--timing", timing, "Include wall time in the JSON output");

  MeasureArgs margs;
  auto* measure = app.add_subcommand("measure", "Evaluate a measure on a state file");
  measure->add_option("state", margs.state, "State file (JSON)")->required();
  measure->add_option("--measure", margs.measure, "entropy|mi|cmi|esq|eof|sandwich")
      ->required()
      ->check(CLI::IsMember({"entropy", "mi", "cmi", "esq", "eof", "sandwich"}));
  measure->add_option("--n", margs.n, "Squashing dimension")->capture_default_str();
  measure->add_option("--ensemble", margs.ensemble, "Decomposition size for eof (0 = default)");
  measure->add_option("--a", margs.a, "Labels of part A")->delimiter(',');
  measure->add_option("--b", margs.b, "Labels of part B")->delimiter(',');
  measure->add_option("--e", margs.e, "Labels of the conditioning part")->delimiter(',');
  measure->add_option("--trace-out", margs.trace_out, "CSV of objective values per iteration (esq, eof)");
  add_optimizer_flags(measure, margs.opt);

  BoundArgs bargs;
  double eps_prime = std::numeric_limits<double>::quiet_NaN();
  auto* bound = app.add_subcommand("bound", "Evaluate a continuity bound");
  bound->add_option("--bound", bargs.bound, "cmi|em|finite-dim|fannes")
      ->required()
      ->check(CLI::IsMember({"cmi", "em", "finite-dim", "fannes"}));
  bound->add_option("--spectrum", bargs.spectrum, "oscillator or levels")
      ->check(CLI::IsMember({"oscillator", "levels"}))
      ->capture_default_str();
  bound->add_option("--spectrum-dim", bargs.spectrum_dim, "Truncate the oscillator to this many levels");
  bound->add_option("--levels", bargs.levels, "Explicit levels, starting at 0")->delimiter(',');
  bound->add_option("--E", bargs.energy, "Energy constraint")->capture_default_str();
  auto* half = bound->add_option("--half-trace-eps", bargs.half_trace_eps, "eps as ½‖ρ-σ‖₁ (list = sweep)")
                   ->delimiter(',');
  auto* full = bound->add_option("--trace-eps", bargs.trace_eps, "eps as ‖ρ-σ‖₁ (list = sweep)")->delimiter(',');
  half->excludes(full);
  auto* ep_opt = bound->add_option("--eps-prime", eps_prime, "eps' (default from eps)");
  bound->add_option("--dA", bargs.dim_a, "Dimension of A for finite-dim")->capture_default_str();
  bound->add_option("--d", bargs.d, "Rank for fannes")->capture_default_str();
  bound->add_option("--out", bargs.out, "Directory for the CSV sweep");

  ExperimentArgs eargs;
  auto* experiment = app.add_subcommand("experiment", "Run a truncation or tightness experiment");
  experiment->add_option("--run", eargs.run, "convergence|dichotomy|tightness")
      ->required()
      ->check(CLI::IsMember({"convergence", "dichotomy", "tightness"}));
  experiment->add_option("--family", eargs.family, "tmsv|classical-correlated|werner|isotropic|bell")
      ->capture_default_str();
  experiment->add_option("--lambda", eargs.lambda, "tmsv squeezing parameter")->capture_default_str();
  experiment->add_option("--p", eargs.p, "werner/isotropic mixing")->capture_default_str();
  experiment->add_option("--tail", eargs.tail_exponent, "classical-correlated tail exponent")->capture_default_str();
  experiment->add_option("--d", eargs.d, "Truncation dimension");
  experiment->add_option("--ranks", eargs.ranks, "Ladder ranks")->delimiter(',');
  experiment->add_option("--n", eargs.n, "Squashing dimension")->capture_default_str();
  experiment->add_option("--ns", eargs.ns, "Extension dimensions for dichotomy")->delimiter(',');
  experiment->add_option("--E", eargs.energy, "Energy for tightness")->capture_default_str();
  experiment->add_option("--eps", eargs.eps, "eps values (½‖ρ-σ‖₁) for tightness")->delimiter(',');
  experiment->add_option("--dim-b", eargs.dim_b, "Flag dimension for tightness")->capture_default_str();
  experiment->add_option("--tail-mass", eargs.tail_mass, "Gibbs tail left out by the truncation")
      ->capture_default_str();
  experiment->add_option("--out", eargs.out, "Output directory")->required();
  add_optimizer_flags(experiment, eargs.opt);

  StateArgs sargs;
  auto* state = app.add_subcommand("state", "Write a model state file");
  state->add_option("--family", sargs.family, "tmsv|classical-correlated|werner|isotropic|bell")
      ->capture_default_str();
  state->add_option("--lambda", sargs.lambda, "tmsv squeezing parameter")->capture_default_str();
  state->add_option("--p", sargs.p, "werner/isotropic mixing")->capture_default_str();
  state->add_option("--tail", sargs.tail_exponent, "classical-correlated tail exponent")->capture_default_str();
  state->add_option("--d", sargs.d, "Truncation dimension");
  state->add_option("--out", sargs.out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  const auto start = std::chrono::steady_clock::now();
  json doc;
  bool converged = true;
  try {
    const Units units{bits};
    const int threads = resolve_threads(threads_flag);
    if (*measure) {
      OptimizerConfig cfg = make_config(margs.opt, threads);
      cfg.record_trace = !margs.trace_out.empty();
      doc["command"] = "measure";
      converged = run_measure(margs, cfg, units, doc);
    } else if (*bound) {
      if (ep_opt->count() > 0) bargs.eps_prime = eps_prime;
      doc["command"] = "bound";
      run_bound(bargs, units, doc);
    } else if (*experiment) {
      const OptimizerConfig cfg = make_config(eargs.opt, threads);
      doc["command"] = "experiment";
      converged = run_experiment(eargs, cfg, units, doc);
    } else {
      ExperimentArgs as_model;
      as_model.family = sargs.family;
      as_model.lambda = sargs.lambda;
      as_model.p = sargs.p;
      as_model.tail_exponent = sargs.tail_exponent;
      as_model.d = sargs.d;
      const ModelStateSpec spec = make_model(as_model);
      save_state(sargs.out, build_state(spec));
      doc["command"] = "state";
      doc["spec"] = to_json(spec);
      doc["file"] = sargs.out;
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const InvariantViolation& e) {
    err << "invariant violation: " << e.what() << '\n';
    return kInvariantError;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvariantError;
  }

  if (timing)
    doc["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!converged) doc["warning"] = "optimizer did not converge";
  out << doc.dump(2) << '\n';
  return converged ? kOk : kNotConverged;
}

}  // namespace sqent::cli
