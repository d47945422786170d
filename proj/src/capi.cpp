#include "twistnorm/twistnorm.h"

#include <fstream>
#include <string>
#include <vector>

#include "twistnorm/curves.hpp"
#include "twistnorm/harness.hpp"

using namespace twistnorm;

struct tn_config {
  RunConfig cfg;
  std::string json;
};

struct tn_report {
  Report report;
  std::string jsonl[2];
  std::string summary;
  std::vector<std::string> records[2];
};

namespace {

thread_local std::string g_last_error;

template <class F>
int guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return TN_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return TN_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TN_INTERNAL;
  }
}

int null_arg(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return TN_INVALID_ARGUMENT;
}

tn_report* wrap(Report r) {
  auto* out = new tn_report{std::move(r), {}, {}, {}};
  for (int c = 0; c < 2; ++c) {
    out->jsonl[c] = out->report.jsonl(c != 0);
    std::size_t pos = 0;
    const std::string& all = out->jsonl[c];
    while (pos < all.size()) {
      const auto nl = all.find('\n', pos);
      out->records[c].push_back(all.substr(pos, nl - pos));
      pos = nl + 1;
    }
  }
  out->summary = out->report.summary();
  return out;
}

template <class F>
int run_pipeline(const tn_config* cfg, tn_report** out, F&& f) {
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = wrap(f(cfg->cfg)); });
}

}  // namespace

extern "C" {

const char* tn_version(void) { return "0.1.0"; }

const char* tn_status_name(int status) { return error_code_name(static_cast<ErrorCode>(status)); }

const char* tn_last_error(void) { return g_last_error.c_str(); }

int tn_config_parse(const char* text, tn_config** out) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    RunConfig c = parse_config(text);
    *out = new tn_config{c, config_json(c).dump()};
  });
}

int tn_config_load(const char* path, tn_config** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    RunConfig c = load_config(path);
    *out = new tn_config{c, config_json(c).dump()};
  });
}

int tn_config_set_stability(tn_config* cfg, int on) {
  if (!cfg) return null_arg("cfg");
  cfg->cfg.stability = on != 0;
  cfg->json = config_json(cfg->cfg).dump();
  return TN_OK;
}

const char* tn_config_json(const tn_config* cfg) { return cfg ? cfg->json.c_str() : ""; }

void tn_config_free(tn_config* cfg) { delete cfg; }

int tn_theorem1(const tn_config* cfg, tn_report** out) {
  return run_pipeline(cfg, out, [](const RunConfig& c) { return verify_theorem1(c); });
}

int tn_theorem0(const tn_config* cfg, tn_report** out) {
  return run_pipeline(cfg, out, [](const RunConfig& c) { return verify_theorem0(c); });
}

int tn_probe_norm(const tn_config* cfg, tn_report** out) {
  return run_pipeline(cfg, out, [](const RunConfig& c) { return probe_norm_surjectivity(c); });
}

int tn_sweep(unsigned p, unsigned max_n, int stability, unsigned precision, tn_report** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = wrap(sweep(p, max_n, stability != 0, precision)); });
}

size_t tn_report_size(const tn_report* r) { return r ? r->report.records().size() : 0; }

const char* tn_report_record(const tn_report* r, size_t i, int canonical) {
  if (!r || i >= r->records[0].size()) return nullptr;
  return r->records[canonical ? 1 : 0][i].c_str();
}

const char* tn_report_jsonl(const tn_report* r, int canonical) { return r ? r->jsonl[canonical ? 1 : 0].c_str() : ""; }

const char* tn_report_summary(const tn_report* r) { return r ? r->summary.c_str() : ""; }

int tn_report_all_pass(const tn_report* r) { return r && r->report.all_pass() ? 1 : 0; }

int tn_report_write(const tn_report* r, const char* path, int canonical) {
  if (!r) return null_arg("r");
  if (!path) return null_arg("path");
  return guarded([&] {
    std::ofstream f(path, std::ios::binary);
    require(f.good(), ErrorCode::io_error, std::string("cannot write ") + path);
    f << r->jsonl[canonical ? 1 : 0];
    require(f.good(), ErrorCode::io_error, std::string("write failed for ") + path);
  });
}

void tn_report_free(tn_report* r) { delete r; }

int tn_unit_root(long long a_q, unsigned long long q, unsigned p, unsigned precision, long long* out_centered) {
  if (!out_centered) return null_arg("out_centered");
  return guarded([&] { *out_centered = unit_root(a_q, q, p, precision).centered(); });
}

int tn_coker_mod_scalar(unsigned p, unsigned precision, long long u, unsigned n, unsigned long long* out_order) {
  if (!out_order) return null_arg("out_order");
  return guarded([&] {
    *out_order = coker_mod(TwistFamily::scalars(p, precision, {"u"}, {u}), n).order();
  });
}

int tn_curve_count(unsigned p, const long coeffs[5], unsigned long long* order, long long* a_q, int* ordinary) {
  if (!coeffs) return null_arg("coeffs");
  return guarded([&] {
    const Curve c = Curve::from_ints(tower_field(p, 0), {coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4]});
    const CurveGroup g = count_and_structure(c);
    const FrobeniusTrace t = trace_and_ordinary(c, g);
    if (order) *order = g.order;
    if (a_q) *a_q = t.a;
    if (ordinary) *ordinary = t.ordinary ? 1 : 0;
  });
}

}  // extern "C"
