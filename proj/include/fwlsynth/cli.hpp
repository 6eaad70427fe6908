#pragma once

// Command-line front end: `synth <file>` and `verify <file>`.
//
// Reports are built as ordered JSON; the text report is the same document
// flattened to `key = value` lines, so both carry identical fields.

#include "fwlsynth/benchmark.hpp"
#include "fwlsynth/cegis.hpp"
#include "fwlsynth/roots.hpp"
#include "fwlsynth/simulate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace fwlsynth {

inline constexpr int kReportFormatVersion = 1;

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

using Report = nlohmann::ordered_json;

struct CliOptions {
  std::string command;
  std::string file;
  Engine engine = Engine::TwoStage;
  std::uint64_t seed = 1;
  int max_iterations = 100;
  FixedPointFormat max_precision{32, 32};
  double timeout_seconds = 600;
  std::size_t search_budget = Limits{}.search_budget;
  std::string trace_out;
  std::string margins_out;
  std::size_t trace_steps = 500;
  NoiseMode noise = NoiseMode::WorstCase;
  Rounding rounding = Rounding::Nearest;
  bool json = false;
  bool omit_timing = false;
  std::string controller_file;
  std::size_t spot_samples = 1000;
};

namespace report {

inline std::string number(double v, int digits = 10) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

inline Report decimals(const std::vector<FixedPointValue>& values) {
  Report out = Report::array();
  for (const auto& v : values) out.push_back(v.to_decimal());
  return out;
}

inline Report raws(const std::vector<FixedPointValue>& values) {
  Report out = Report::array();
  for (const auto& v : values) out.push_back(v.raw());
  return out;
}

inline Report rationals(const std::vector<Rational>& values) {
  Report out = Report::array();
  for (const auto& v : values) out.push_back(to_exact_string(v));
  return out;
}

inline Report controller(const Controller& c) {
  Report out;
  out["format"] = to_string(c.format);
  out["num"] = decimals(c.num);
  out["den"] = decimals(c.den);
  out["num_raw"] = raws(c.num);
  out["den_raw"] = raws(c.den);
  return out;
}

inline Report verdict(const JuryVerdict& v) {
  Report out;
  out["status"] = to_string(v.status);
  out["violated"] = v.violated ? to_string(*v.violated) : "none";
  out["margin"] = number(to_double(v.margin));
  return out;
}

inline Report margins(const Margins& m) {
  Report out;
  out["gain_margin_db"] = format_margin(m.gain_margin_db);
  out["phase_margin_deg"] = format_margin(m.phase_margin_deg);
  out["phase_crossover_rad_s"] = m.phase_crossover ? format_margin(*m.phase_crossover) : "none";
  out["gain_crossover_rad_s"] = m.gain_crossover ? format_margin(*m.gain_crossover) : "none";
  return out;
}

inline Report spot(const SpotCheck& s) {
  Report out;
  out["sampled"] = s.sampled;
  out["oracle_stable"] = s.oracle_stable;
  out["cancellations"] = s.cancellations;
  out["max_root_modulus"] = number(s.max_root_modulus);
  out["passed"] = s.passed();
  return out;
}

inline Report plant(const BenchmarkSpec& spec) {
  Report out;
  out["domain"] = spec.domain == PlantDomain::S ? "s" : "z";
  out["num"] = rationals(spec.plant.num().coeffs());
  out["den"] = rationals(spec.plant.den().coeffs());
  out["delta"] = rationals(spec.delta);
  out["sample_time"] = spec.sample_time ? to_exact_string(*spec.sample_time) : "none";
  out["plant_format"] = to_string(spec.plant_format);
  return out;
}

inline Report transcript(const std::vector<TranscriptRecord>& records) {
  Report out = Report::array();
  for (const auto& t : records) {
    Report r;
    r["iteration"] = t.iteration;
    r["phase"] = to_string(t.phase);
    r["outcome"] = t.outcome;
    r["precision"] = to_string(t.precision);
    if (t.candidate) r["candidate"] = to_string(*t.candidate);
    if (t.counterexample) r["counterexample"] = to_string(t.counterexample->transfer_function());
    out.push_back(std::move(r));
  }
  return out;
}

inline void flatten(const Report& node, const std::string& prefix, std::ostream& os) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) flatten(value, prefix.empty() ? key : prefix + "." + key, os);
  } else if (node.is_array()) {
    const bool scalars = std::all_of(node.begin(), node.end(), [](const Report& v) { return v.is_primitive(); });
    if (scalars) {
      os << prefix << " =";
      for (const auto& v : node) os << ' ' << (v.is_string() ? v.get<std::string>() : v.dump());
      os << '\n';
    } else {
      for (std::size_t i = 0; i < node.size(); ++i) flatten(node[i], prefix + "[" + std::to_string(i) + "]", os);
    }
  } else {
    os << prefix << " = " << (node.is_string() ? node.get<std::string>() : node.dump()) << '\n';
  }
}

inline std::string render(const Report& r, bool json) {
  if (json) return r.dump(2) + "\n";
  std::ostringstream os;
  flatten(r, "", os);
  return os.str();
}

}  // namespace report

namespace detail {

inline Rational margin_sample_time(const BenchmarkSpec& spec) { return spec.sample_time.value_or(Rational{1}); }

/// Writes the step-response trace and margins files requested on the command
/// line; returns a report fragment describing the trace.
inline Report emit_artifacts(const CliOptions& opt, const Controller& c, const BenchmarkSpec& spec,
                             const Margins& m) {
  Report out;
  if (!opt.margins_out.empty()) {
    std::ofstream f(opt.margins_out);
    if (!f) throw std::runtime_error("cannot write '" + opt.margins_out + "'");
    write_margins(f, m);
  }
  if (opt.trace_out.empty()) return out;
  const SimulationTrace trace = step_response(c, spec.plant, margin_sample_time(spec), opt.trace_steps,
                                              NoiseModel::for_format(c.format, opt.noise), {Rational{1}, opt.seed});
  std::ofstream f(opt.trace_out);
  if (!f) throw std::runtime_error("cannot write '" + opt.trace_out + "'");
  write_trace_csv(f, trace);
  out["path"] = opt.trace_out;
  out["steps"] = trace.samples.size();
  out["noise"] = to_string(opt.noise);
  out["diverged"] = trace.diverged();
  out["max_abs_output"] = report::number(trace.max_abs_output().convert_to<double>());
  return out;
}

inline Report header(const CliOptions& opt, const BenchmarkSpec& spec) {
  Report r;
  r["format_version"] = kReportFormatVersion;
  r["command"] = opt.command;
  r["benchmark"] = spec.name;
  r["plant"] = report::plant(spec);
  if (!spec.warnings.empty()) r["warnings"] = spec.warnings;
  return r;
}

}  // namespace detail

inline int run_synth(const CliOptions& opt, const BenchmarkSpec& spec, std::ostream& out) {
  SynthesisConfig cfg;
  cfg.controller_format = spec.controller_format;
  cfg.orders = spec.orders;
  cfg.seed = opt.seed;
  cfg.limits.max_iterations = opt.max_iterations;
  cfg.limits.max_precision = opt.max_precision;
  cfg.limits.timeout_seconds = opt.timeout_seconds;
  cfg.limits.search_budget = opt.search_budget;
  const PlantFamily family = spec.family();
  const SynthesisResult res = synthesize(opt.engine, family, cfg);

  Report r = detail::header(opt, spec);
  r["engine"] = to_string(res.engine);
  r["seed"] = opt.seed;
  r["controller_orders"] = std::to_string(cfg.orders.numerator) + "," + std::to_string(cfg.orders.denominator);
  r["outcome"] = res.success ? "success" : "failure";
  r["failure_reason"] = res.failure ? to_string(*res.failure) : "none";
  if (res.controller) r[res.success ? "controller" : "last_candidate"] = report::controller(*res.controller);
  r["precision"] = to_string(res.precision);
  std::vector<Rational> quantized;
  for (const auto& c : pack_coefficients(spec.plant)) quantized.push_back(quantize(c, res.precision, opt.rounding).to_rational());
  r["plant_quantized"] = report::rationals(quantized);
  r["iterations"] = res.iterations;
  r["evaluations"] = res.evaluations;
  r["certificate"] = report::verdict(res.certificate);
  if (res.success) {
    r["spot_check"] = report::spot(spot_check(*res.controller, family, res.precision, opt.spot_samples, opt.seed));
    try {
      const Margins m = frequency_margins(*res.controller, spec.plant, to_double(detail::margin_sample_time(spec)));
      r["margins"] = report::margins(m);
      const Report trace = detail::emit_artifacts(opt, *res.controller, spec, m);
      if (!trace.empty()) r["trace"] = trace;
    } catch (const std::exception& e) {
      r["margins_error"] = e.what();
    }
  }
  r["transcript"] = report::transcript(res.transcript);
  if (!opt.omit_timing) r["wall_seconds"] = report::number(res.wall_seconds, 6);
  out << report::render(r, opt.json);
  return res.success ? kExitOk : kExitFailure;
}

inline int run_verify(const CliOptions& opt, const BenchmarkSpec& spec, std::ostream& out) {
  BenchmarkSpec source = spec;
  if (!opt.controller_file.empty()) {
    const BenchmarkSpec cf = parse_benchmark(opt.controller_file);
    if (!cf.has_controller()) throw ValidationError("controller file has no controller_num/controller_den");
    source.controller_num = cf.controller_num;
    source.controller_den = cf.controller_den;
    source.controller_format = cf.controller_format;
  }
  if (!source.has_controller()) throw ValidationError("verify needs controller_num and controller_den");
  Controller c;
  try {
    c = source.controller(opt.rounding);
  } catch (const FixedPointOverflow& e) {
    throw ValidationError(std::string("controller not representable: ") + e.what());
  }
  const PlantFamily family = spec.family();
  bool point_family = true;
  for (const auto& d : spec.delta) point_family = point_family && d == 0;

  Report r = detail::header(opt, spec);
  r["rounding"] = opt.rounding == Rounding::Truncate ? "truncate" : "nearest";
  r["controller"] = report::controller(c);

  bool nominal_stable = false;
  Report nominal;
  try {
    const Poly<Rational> s = char_poly(c, spec.plant);
    const JuryVerdict v = jury_stable(s);
    nominal = report::verdict(v);
    nominal["max_root_modulus"] = report::number(root_oracle(s));
    nominal_stable = v.status == Stability::Stable;
  } catch (const DegenerateCharPoly& e) {
    nominal["status"] = to_string(Stability::Unstable);
    nominal["violated"] = "degenerate";
    nominal["detail"] = e.what();
  }
  r["jury"] = nominal;

  const JuryVerdict family_verdict = precision_certificate(c, family, spec.plant_format);
  r["interval"] = report::verdict(family_verdict);
  const bool cancel = cancellation_on_or_outside_unit_circle(c, spec.plant);
  r["cancellation"] = cancel;
  r["spot_check"] = report::spot(spot_check(c, family, spec.plant_format, opt.spot_samples, opt.seed));

  const double t = to_double(detail::margin_sample_time(spec));
  try {
    const Margins m = frequency_margins(c, spec.plant, t);
    r["margins"] = report::margins(m);
    r["loop_margins"] = report::margins(loop_margins(c, spec.plant, t));
    const Report trace = detail::emit_artifacts(opt, c, spec, m);
    if (!trace.empty()) r["trace"] = trace;
  } catch (const std::exception& e) {
    r["margins_error"] = e.what();
  }

  const bool stable = nominal_stable && !cancel && (point_family || family_verdict.status == Stability::Stable);
  r["outcome"] = stable ? "stable" : "unstable";
  out << report::render(r, opt.json);
  return stable ? kExitOk : kExitFailure;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fixed-point controller synthesis and verification for uncertain plants"};
  app.name("fwlsynth");
  app.require_subcommand(1);
  CliOptions opt;
  std::string engine = "two", rounding = "nearest", report_kind = "text", noise = "worst", precision;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("file", opt.file, "Benchmark file")->required();
    sub->add_option("--seed", opt.seed, "Random seed");
    sub->add_option("--trace-out", opt.trace_out, "Write the step-response trace as CSV");
    sub->add_option("--margins-out", opt.margins_out, "Write gain and phase margins as key=value lines");
    sub->add_option("--steps", opt.trace_steps, "Trace length in samples")->check(CLI::PositiveNumber);
    sub->add_option("--noise", noise, "Trace noise model")->check(CLI::IsMember({"zero", "worst", "uniform"}));
    sub->add_option("--rounding", rounding, "Rounding of coefficients onto the grid")
        ->check(CLI::IsMember({"truncate", "nearest"}));
    sub->add_option("--report", report_kind, "Report format")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--spot-samples", opt.spot_samples, "Family members in the oracle spot check");
  };
  CLI::App* synth = app.add_subcommand("synth", "Synthesize a controller for a benchmark");
  add_common(synth);
  synth->add_option("--engine", engine, "CEGIS engine")->check(CLI::IsMember({"two", "one"}));
  synth->add_option("--max-iters", opt.max_iterations, "Iteration limit")->check(CLI::NonNegativeNumber);
  synth->add_option("--max-precision", precision, "Plant precision cap I,F");
  synth->add_option("--timeout", opt.timeout_seconds, "Wall-clock limit in seconds")->check(CLI::NonNegativeNumber);
  synth->add_option("--search-budget", opt.search_budget, "Candidate evaluations per synthesize phase");
  synth->add_flag("--omit-timing", opt.omit_timing, "Leave wall time out of the report");
  CLI::App* verify = app.add_subcommand("verify", "Verify a controller against a benchmark");
  add_common(verify);
  verify->add_option("--controller", opt.controller_file, "File with controller_num/controller_den");

  std::vector<std::string> argv_store{"fwlsynth"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (!precision.empty()) {
      const auto comma = precision.find(',');
      if (comma == std::string::npos) throw CLI::ValidationError("--max-precision", "expected I,F");
      try {
        opt.max_precision = FixedPointFormat{std::stoi(precision.substr(0, comma)), std::stoi(precision.substr(comma + 1))};
      } catch (const std::exception& e) {
        throw CLI::ValidationError("--max-precision", e.what());
      }
    }
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  opt.command = synth->parsed() ? "synth" : "verify";
  opt.engine = engine == "one" ? Engine::OneStage : Engine::TwoStage;
  opt.rounding = rounding == "truncate" ? Rounding::Truncate : Rounding::Nearest;
  opt.json = report_kind == "json";
  opt.noise = noise == "zero" ? NoiseMode::Zero : noise == "uniform" ? NoiseMode::SeededUniform : NoiseMode::WorstCase;

  try {
    const BenchmarkSpec spec = parse_benchmark(opt.file);
    for (const auto& w : spec.warnings) err << "warning: " << w << '\n';
    return opt.command == "synth" ? run_synth(opt, spec, out) : run_verify(opt, spec, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace fwlsynth
