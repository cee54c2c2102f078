// sbnrg: ground-state spin expectation values and qubit-bath entanglement
// of the ohmic spin-boson model, computed by NRG on the anisotropic Kondo
// model.
//
// Exit codes: 0 success, 1 domain/config error, 2 verification failure,
// 3 I/O error.

#include "sbnrg/errors.hpp"
#include "sbnrg/sweep.hpp"
#include "sbnrg/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitVerify = 2;
constexpr int kExitIo = 3;

struct Flags {
  std::string alpha;
  std::string eps = "0";
  std::string delta_ratio = "0.04";
  std::optional<double> lambda;
  std::optional<std::size_t> n_keep;
  std::optional<int> n_max;
  std::optional<double> eta;
  bool paper_fidelity = false;
  std::string format = "csv";
  std::string output = "-";
  unsigned jobs = 0;
  std::string config_path;
  bool verbose = false;
  std::string preset_name;
  bool sabotage = false;
};

sbnrg::NRGConfig effective_config(const Flags &f) {
  sbnrg::NRGConfig cfg;
  if (!f.config_path.empty()) sbnrg::apply_config(sbnrg::read_config_file(f.config_path), cfg);
  if (f.paper_fidelity) {
    const auto pf = sbnrg::NRGConfig::paper_fidelity();
    cfg.lambda = pf.lambda;
    cfg.n_keep = pf.n_keep;
  }
  if (f.lambda) cfg.lambda = *f.lambda;
  if (f.n_keep) cfg.n_keep = *f.n_keep;
  if (f.n_max) cfg.n_max = *f.n_max;
  if (f.eta) cfg.eta = *f.eta;
  cfg.validate();
  return cfg;
}

unsigned job_count(const Flags &f) {
  if (f.jobs > 0) return f.jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

void log_config(const Flags &f, const sbnrg::NRGConfig &cfg) {
  if (!f.verbose) return;
  std::cerr << "config: " << sbnrg::config_to_json(cfg).dump() << '\n';
}

int run_rows(const Flags &f, const sbnrg::SweepSpec &spec) {
  const auto cfg = effective_config(f);
  log_config(f, cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = sbnrg::run_sweep(spec, cfg, job_count(f));
  if (f.verbose) {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::size_t failed = 0, unconverged = 0;
    for (const auto &r : rows) {
      if (!r.record) ++failed;
      else if (!r.record->converged) ++unconverged;
    }
    std::fprintf(stderr, "%zu points in %.1f s (%zu failed, %zu unconverged)\n", rows.size(),
                 secs, failed, unconverged);
  }
  sbnrg::write_output(rows, cfg, sbnrg::parse_format(f.format), f.output);
  for (const auto &r : rows)
    if (!r.record) std::cerr << "warning: point failed: " << r.error << '\n';
  return kExitOk;
}

int cmd_point(const Flags &f) {
  sbnrg::SweepSpec spec;
  spec.alphas = {std::stod(f.alpha)};
  spec.epsilons = {std::stod(f.eps)};
  spec.delta_ratios = {std::stod(f.delta_ratio)};
  return run_rows(f, spec);
}

int cmd_sweep(const Flags &f) {
  sbnrg::SweepSpec spec;
  spec.alphas = sbnrg::parse_axis(f.alpha);
  spec.epsilons = sbnrg::parse_axis(f.eps);
  spec.delta_ratios = sbnrg::parse_axis(f.delta_ratio);
  return run_rows(f, spec);
}

int cmd_preset(const Flags &f) { return run_rows(f, sbnrg::preset(f.preset_name)); }

int cmd_alpha_max(const Flags &f) {
  const auto cfg = effective_config(f);
  log_config(f, cfg);
  const double eps = std::stod(f.eps);
  const double ratio = std::stod(f.delta_ratio);
  const auto am = sbnrg::find_alpha_max(eps, ratio, cfg, job_count(f));
  nlohmann::json out{{"eps_over_delta", eps},
                     {"delta_ratio", ratio},
                     {"alpha_max", am.alpha},
                     {"entropy_max", am.entropy},
                     {"evaluations", am.evaluations},
                     {"config", sbnrg::config_to_json(cfg)}};
  if (sbnrg::parse_format(f.format) == sbnrg::Format::Json) {
    std::cout << out.dump(2) << '\n';
  } else {
    std::cout << "eps_over_delta,delta_ratio,alpha_max,entropy_max\n"
              << sbnrg::format_number(eps) << ',' << sbnrg::format_number(ratio) << ','
              << sbnrg::format_number(am.alpha) << ',' << sbnrg::format_number(am.entropy)
              << '\n';
  }
  return kExitOk;
}

int cmd_verify(const Flags &f) {
  const auto cfg = effective_config(f);
  log_config(f, cfg);
  sbnrg::VerifyOptions opts;
  opts.sabotage_sign_rule = f.sabotage;
  const auto report = sbnrg::verify(cfg, opts);
  for (const auto &c : report.checks)
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  std::cout << (report.all_passed() ? "verify: all suites passed" : "verify: FAILED") << '\n';
  return report.all_passed() ? kExitOk : kExitVerify;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Spin-boson entanglement via NRG on the anisotropic Kondo model"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  app.add_option("--lambda", f.lambda, "Logarithmic discretization parameter (> 1)");
  app.add_option("--n-keep", f.n_keep, "States kept per iteration");
  app.add_option("--n-max", f.n_max, "Maximum iteration");
  app.add_option("--eta", f.eta, "Stop once w_N < eta * Delta_r");
  app.add_flag("--paper-fidelity", f.paper_fidelity, "Lambda = 1.5, n_keep = 1200");
  app.add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--output", f.output, "Output path, '-' for stdout");
  app.add_option("--jobs", f.jobs, "Worker threads (0 = hardware concurrency)");
  app.add_option("--config", f.config_path, "key = value config file; flags win");
  app.add_flag("--verbose", f.verbose, "Progress and config on stderr");

  auto *point = app.add_subcommand("point", "Evaluate a single parameter point");
  point->add_option("--alpha", f.alpha, "Dissipation strength")->required();
  point->add_option("--eps-over-delta", f.eps, "Level asymmetry eps/Delta");
  point->add_option("--delta-ratio", f.delta_ratio, "Delta/wc");

  auto *sweep = app.add_subcommand("sweep", "Evaluate a parameter grid");
  sweep->add_option("--alpha", f.alpha, "List a,b,c or range start:stop:step")->required();
  sweep->add_option("--eps-over-delta", f.eps, "List or range");
  sweep->add_option("--delta-ratio", f.delta_ratio, "List or range");

  auto *preset = app.add_subcommand("preset", "Regenerate figure data");
  preset->add_option("name", f.preset_name, "fig1, fig2 or fig3")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2", "fig3"}));

  auto *amax = app.add_subcommand("alpha-max", "Locate the entanglement maximum in alpha");
  amax->add_option("--eps-over-delta", f.eps, "Level asymmetry eps/Delta (> 0)")->required();
  amax->add_option("--delta-ratio", f.delta_ratio, "Delta/wc");

  auto *verify = app.add_subcommand("verify", "Run the oracle and invariant suites");
  verify->add_flag("--sabotage-sign-rule", f.sabotage)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitDomain;
  }

  try {
    if (*point) return cmd_point(f);
    if (*sweep) return cmd_sweep(f);
    if (*preset) return cmd_preset(f);
    if (*amax) return cmd_alpha_max(f);
    if (*verify) return cmd_verify(f);
  } catch (const sbnrg::IoError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: invalid number: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitOk;
}
