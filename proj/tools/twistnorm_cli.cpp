// Command-line front end; talks to the library only through its C interface.

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "twistnorm/twistnorm.h"

namespace {

constexpr int kExitFailedChecks = 1;
constexpr int kExitError = 2;

int report_error(int status) {
  std::fprintf(stderr, "twistnorm: error [%s]: %s\n", tn_status_name(status), tn_last_error());
  return kExitError;
}

struct Output {
  std::string json_path;
  bool canonical = false;
  bool quiet = false;
};

int finish(tn_report* rep, const Output& out, bool informational) {
  if (!out.quiet) std::fputs(tn_report_summary(rep), stdout);
  if (!out.json_path.empty()) {
    const int st = tn_report_write(rep, out.json_path.c_str(), out.canonical ? 1 : 0);
    if (st != TN_OK) {
      tn_report_free(rep);
      return report_error(st);
    }
  }
  const bool ok = informational || tn_report_all_pass(rep);
  tn_report_free(rep);
  return ok ? 0 : kExitFailedChecks;
}

void add_output_flags(CLI::App* cmd, Output& out) {
  cmd->add_option("--json", out.json_path, "Write the JSONL report to this path");
  cmd->add_flag("--canonical", out.canonical, "Omit timings from the JSONL report");
  cmd->add_flag("--quiet", out.quiet, "Suppress the human summary");
}

using Pipeline = int (*)(const tn_config*, tn_report**);

int run_config_command(const std::string& path, bool stability, Pipeline pipeline, const Output& out, bool informational) {
  tn_config* cfg = nullptr;
  int st = tn_config_load(path.c_str(), &cfg);
  if (st != TN_OK) return report_error(st);
  if (stability) tn_config_set_stability(cfg, 1);
  tn_report* rep = nullptr;
  st = pipeline(cfg, &rep);
  tn_config_free(cfg);
  if (st != TN_OK) return report_error(st);
  return finish(rep, out, informational);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Twisted norm quotients of principal units: verification harness"};
  app.set_version_flag("--version", std::string(tn_version()));
  app.require_subcommand(1);

  struct ConfigCommand {
    std::string path;
    bool stability = false;
    Output out;
  } t1, t0, probe;

  auto* c1 = app.add_subcommand("t1", "Check the norm-quotient identity on a twist family");
  c1->add_option("--config", t1.path, "Config file")->required()->check(CLI::ExistingFile);
  c1->add_flag("--stability", t1.stability, "Rerun with precision + 2, depth x 2 and level + 1");
  add_output_flags(c1, t1.out);

  auto* c0 = app.add_subcommand("t0", "Bookkeeping for the exact sequence attached to an ordinary curve");
  c0->add_option("--config", t0.path, "Config file")->required()->check(CLI::ExistingFile);
  c0->add_flag("--stability", t0.stability, "Rerun with precision + 2, depth x 2 and level + 1");
  add_output_flags(c0, t0.out);

  auto* cp = app.add_subcommand("probe-norm", "Record whether non-norm classes become norms one level up");
  cp->add_option("--config", probe.path, "Config file")->required()->check(CLI::ExistingFile);
  add_output_flags(cp, probe.out);

  unsigned sweep_p = 3, sweep_n = 2, sweep_precision = 20;
  bool sweep_stability = false;
  Output sweep_out;
  auto* cs = app.add_subcommand("sweep", "Norm-quotient identity over n <= max-n and u in {2, 1+p, 1+p^2, 1+p^3}");
  cs->add_option("--p", sweep_p, "Prime")->check(CLI::IsMember({3u, 5u}));
  cs->add_option("--max-n", sweep_n, "Largest n")->check(CLI::Range(1u, 2u));
  cs->add_option("--precision", sweep_precision, "p-adic precision N")->check(CLI::Range(8u, 30u));
  cs->add_flag("--stability", sweep_stability, "Rerun with precision + 2, depth x 2 and level + 1");
  add_output_flags(cs, sweep_out);

  CLI11_PARSE(app, argc, argv);

  if (c1->parsed()) return run_config_command(t1.path, t1.stability, tn_theorem1, t1.out, false);
  if (c0->parsed()) return run_config_command(t0.path, t0.stability, tn_theorem0, t0.out, false);
  if (cp->parsed()) return run_config_command(probe.path, false, tn_probe_norm, probe.out, true);
  tn_report* rep = nullptr;
  const int st = tn_sweep(sweep_p, sweep_n, sweep_stability ? 1 : 0, sweep_precision, &rep);
  if (st != TN_OK) return report_error(st);
  return finish(rep, sweep_out, false);
}
