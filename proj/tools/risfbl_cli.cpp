// risfbl: curve pipelines and validation suite for the RIS-aided
// finite-blocklength rate model.
//
//   risfbl snr-cdf   [--config f] [--out f] [--seed s] [--samples n]
//   risfbl rate-vs-n ...
//   risfbl rate-vs-d ...
//   risfbl validate  ... [--tamper-alpha x]
//
// Exit status: 0 success, 1 validation failure, 2 configuration error.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "risfbl/curve.hpp"
#include "risfbl/error.hpp"
#include "risfbl/pipelines.hpp"
#include "risfbl/scenario.hpp"
#include "risfbl/validation.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_config = 2;

struct CommonArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> samples;
  unsigned workers = 1;
};

void add_common(CLI::App *sub, CommonArgs &a) {
  sub->add_option("--config", a.config, "scenario file (key = value sections)");
  sub->add_option("--out", a.out, "output path; stdout when omitted");
  sub->add_option("--seed", a.seed, "overrides the config seed");
  sub->add_option("--samples", a.samples, "overrides the config sample count");
  sub->add_option("--workers", a.workers, "simulation threads; output does not depend on it")
      ->check(CLI::Range(1u, 256u));
}

risfbl::ScenarioConfig load(const CommonArgs &a) {
  risfbl::ScenarioConfig cfg = a.config.empty() ? risfbl::ScenarioConfig{}
                                                : risfbl::load_scenario(a.config);
  if (a.seed)
    cfg.seed = *a.seed;
  if (a.samples)
    cfg.samples = *a.samples;
  cfg.validate();
  return cfg;
}

void emit_text(const std::string &path, const std::string &text) {
  if (path.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f)
    throw risfbl::ConfigError("cannot open output file '" + path + "'", 0, "--out");
  f << text;
  if (!f.flush())
    throw risfbl::ConfigError("failed writing '" + path + "'", 0, "--out");
}

void report_config_error(const risfbl::ConfigError &e) {
  std::cerr << "risfbl: configuration error";
  if (e.line() > 0)
    std::cerr << " (line " << e.line() << ")";
  if (!e.field().empty())
    std::cerr << " [" << e.field() << "]";
  std::cerr << ": " << e.what() << "\n";
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"RIS-aided finite-blocklength average rate: curves and validation", "risfbl"};
  app.require_subcommand(1);
  app.set_version_flag("--version", risfbl::tool_version);

  CommonArgs args;
  double tamper_alpha = 1.0;

  auto *snr = app.add_subcommand("snr-cdf", "empirical SNR CDF per phase mode vs the Gamma law");
  auto *vs_n = app.add_subcommand("rate-vs-n", "average rate against the number of elements");
  auto *vs_d = app.add_subcommand("rate-vs-d", "average rate against the RIS position");
  auto *val = app.add_subcommand("validate", "run the validation suite; JSON report");
  for (auto *s : {snr, vs_n, vs_d, val})
    add_common(s, args);
  val->add_option("--tamper-alpha", tamper_alpha,
                  "negative control: scales the reference Gamma shape in the KS checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_config;
  }

  try {
    if (val->parsed()) {
      // The suite's sample count is its own; the config's belongs to the curves.
      const bool samples_given = args.samples.has_value();
      risfbl::ScenarioConfig cfg = load(args);
      risfbl::ValidationOptions opt;
      opt.seed = cfg.seed;
      if (samples_given)
        opt.samples = static_cast<std::size_t>(cfg.samples);
      opt.workers = args.workers;
      opt.tamper_alpha = tamper_alpha;
      const auto report = risfbl::run_validation(cfg, opt);
      for (const auto &c : report.criteria)
        std::cerr << "criterion " << c.id << " " << (c.pass ? "PASS" : "FAIL") << "  " << c.name
                  << ": " << c.summary << "\n";
      emit_text(args.out, report.dump());
      return report.all_pass() ? exit_ok : exit_failed;
    }

    const risfbl::ScenarioConfig cfg = load(args);
    risfbl::CurveOutput curve;
    if (snr->parsed())
      curve = risfbl::snr_cdf_curve(cfg, args.workers);
    else if (vs_n->parsed())
      curve = risfbl::rate_vs_n_curve(cfg, args.workers);
    else
      curve = risfbl::rate_vs_d_curve(cfg, args.workers);
    emit_text(args.out, risfbl::to_csv(curve));
    return exit_ok;
  } catch (const risfbl::ConfigError &e) {
    report_config_error(e);
    return exit_config;
  } catch (const risfbl::DomainError &e) {
    std::cerr << "risfbl: invalid scenario: " << e.what() << "\n";
    return exit_config;
  } catch (const std::exception &e) {
    std::cerr << "risfbl: " << e.what() << "\n";
    return exit_failed;
  }
}
