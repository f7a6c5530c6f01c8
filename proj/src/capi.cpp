#include "skewspec/skewspec.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "skewspec/error.hpp"
#include "skewspec/experiment.hpp"
#include "skewspec/group_rep.hpp"
#include "skewspec/linalg.hpp"

struct ss_experiment {
  skewspec::ExperimentConfig cfg;
};

namespace {

thread_local std::string g_last_error;

ss_status status_of(skewspec::ErrorCode c) {
  using skewspec::ErrorCode;
  switch (c) {
    case ErrorCode::DimensionMismatch: return SS_ERR_DIMENSION;
    case ErrorCode::TagMismatch: return SS_ERR_TAG;
    case ErrorCode::InvalidElement: return SS_ERR_INVALID_ELEMENT;
    case ErrorCode::InvalidArgument: return SS_ERR_INVALID_ARGUMENT;
    case ErrorCode::CommutationViolation: return SS_ERR_COMMUTATION;
    case ErrorCode::DegenerateWeights: return SS_ERR_DEGENERATE_WEIGHTS;
    case ErrorCode::ConfigError: return SS_ERR_CONFIG;
    case ErrorCode::NotFound: return SS_ERR_NOT_FOUND;
    case ErrorCode::Io: return SS_ERR_IO;
  }
  return SS_ERR_INTERNAL;
}

template <class F>
ss_status guard(F&& f) {
  try {
    g_last_error.clear();
    f();
    return SS_OK;
  } catch (const skewspec::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SS_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SS_ERR_INTERNAL;
  }
}

ss_status null_arg(const char* what) {
  g_last_error = std::string(what) + " must not be NULL";
  return SS_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

skewspec::CMatrix read_2x2(const double* g) {
  skewspec::CMatrix m(2);
  for (std::size_t i = 0; i < 4; ++i) m(i / 2, i % 2) = {g[2 * i], g[2 * i + 1]};
  return m;
}

void write_matrix(const skewspec::CMatrix& m, double* out, std::size_t out_len) {
  const std::size_t need = 2 * m.size() * m.size();
  if (out_len < need)
    throw skewspec::Error(skewspec::ErrorCode::InvalidArgument,
                          "output buffer holds " + std::to_string(out_len) + " doubles, need " + std::to_string(need));
  for (std::size_t i = 0; i < m.size() * m.size(); ++i) {
    out[2 * i] = m.data()[i].real();
    out[2 * i + 1] = m.data()[i].imag();
  }
}

}  // namespace

extern "C" {

const char* ss_version(void) { return skewspec::kToolVersion; }

const char* ss_last_error(void) { return g_last_error.c_str(); }

const char* ss_status_name(ss_status status) {
  switch (status) {
    case SS_OK: return "ok";
    case SS_ERR_DIMENSION: return "dimension mismatch";
    case SS_ERR_TAG: return "tag mismatch";
    case SS_ERR_INVALID_ELEMENT: return "invalid element";
    case SS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SS_ERR_COMMUTATION: return "commutation violation";
    case SS_ERR_DEGENERATE_WEIGHTS: return "degenerate weights";
    case SS_ERR_CONFIG: return "config error";
    case SS_ERR_NOT_FOUND: return "not found";
    case SS_ERR_IO: return "i/o error";
    case SS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void ss_string_free(char* s) { std::free(s); }

ss_status ss_experiment_load(const char* path, ss_experiment** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guard([&] { *out = new ss_experiment{skewspec::ExperimentConfig::load(path)}; });
}

ss_status ss_experiment_parse(const char* json_text, ss_experiment** out) {
  if (!json_text) return null_arg("json_text");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guard([&] { *out = new ss_experiment{skewspec::ExperimentConfig::parse(json_text)}; });
}

void ss_experiment_free(ss_experiment* exp) { delete exp; }

ss_status ss_experiment_serialize(const ss_experiment* exp, char** out) {
  if (!exp) return null_arg("exp");
  if (!out) return null_arg("out");
  return guard([&] { *out = dup_string(exp->cfg.serialize()); });
}

ss_status ss_experiment_hash(const ss_experiment* exp, char** out) {
  if (!exp) return null_arg("exp");
  if (!out) return null_arg("out");
  return guard([&] { *out = dup_string(exp->cfg.hash()); });
}

ss_status ss_experiment_set_grid(ss_experiment* exp, size_t per_dim) {
  if (!exp) return null_arg("exp");
  if (per_dim == 0) {
    g_last_error = "grid size must be >= 1";
    return SS_ERR_INVALID_ARGUMENT;
  }
  exp->cfg.analysis().grid.assign(exp->cfg.flow().dim(), per_dim);
  return SS_OK;
}

ss_status ss_experiment_set_seed(ss_experiment* exp, uint64_t seed) {
  if (!exp) return null_arg("exp");
  exp->cfg.analysis().seed = seed;
  return SS_OK;
}

ss_status ss_experiment_set_nmax(ss_experiment* exp, size_t n_max) {
  if (!exp) return null_arg("exp");
  exp->cfg.analysis().n_max = n_max;
  return SS_OK;
}

ss_status ss_experiment_set_quadrature(ss_experiment* exp, size_t per_dim) {
  if (!exp) return null_arg("exp");
  if (per_dim == 0) {
    g_last_error = "quadrature size must be >= 1";
    return SS_ERR_INVALID_ARGUMENT;
  }
  exp->cfg.analysis().quadrature = per_dim;
  return SS_OK;
}

size_t ss_experiment_block_count(const ss_experiment* exp) { return exp ? exp->cfg.blocks().size() : 0; }

ss_status ss_experiment_block_label(const ss_experiment* exp, size_t index, char** out) {
  if (!exp) return null_arg("exp");
  if (!out) return null_arg("out");
  if (index >= exp->cfg.blocks().size()) {
    g_last_error = "block index " + std::to_string(index) + " out of range";
    return SS_ERR_NOT_FOUND;
  }
  return guard([&] { *out = dup_string(exp->cfg.blocks()[index].label()); });
}

ss_status ss_analyze(const ss_experiment* exp, const char* out_dir, char** summary_json, char** report_json) {
  if (!exp) return null_arg("exp");
  if (!summary_json) return null_arg("summary_json");
  return guard([&] {
    std::optional<std::filesystem::path> dir;
    if (out_dir) dir = out_dir;
    const auto outcome = skewspec::run_analyze(exp->cfg, dir);
    *summary_json = dup_string(outcome.summary.dump(2));
    if (report_json) *report_json = dup_string(outcome.report.dump(2) + "\n");
  });
}

ss_status ss_correlations(const ss_experiment* exp, const char* selector, const char* out_dir, char** summary_json) {
  if (!exp) return null_arg("exp");
  if (!out_dir) return null_arg("out_dir");
  if (!summary_json) return null_arg("summary_json");
  return guard([&] {
    *summary_json = dup_string(skewspec::run_correlations(exp->cfg, selector ? selector : "all", out_dir).dump(2));
  });
}

ss_status ss_degree_table(const ss_experiment* exp, const char* selector, const size_t* Ns, size_t count,
                          char** table_json) {
  if (!exp) return null_arg("exp");
  if (!Ns && count > 0) return null_arg("Ns");
  if (!table_json) return null_arg("table_json");
  return guard([&] {
    std::vector<std::size_t> list(Ns, Ns + count);
    *table_json = dup_string(skewspec::degree_table(exp->cfg, selector ? selector : "all", list).dump(2));
  });
}

ss_status ss_repcheck(ss_group group, int max_index, size_t samples, uint64_t seed, int m_bound, int* all_pass,
                      char** table_json) {
  if (!table_json) return null_arg("table_json");
  return guard([&] {
    skewspec::RepcheckOptions opts;
    switch (group) {
      case SS_GROUP_TORUS: opts.tag = skewspec::GroupTag::Torus; break;
      case SS_GROUP_SU2: opts.tag = skewspec::GroupTag::Su2; break;
      case SS_GROUP_U2: opts.tag = skewspec::GroupTag::U2; break;
      default: throw skewspec::Error(skewspec::ErrorCode::InvalidArgument, "unknown group");
    }
    opts.max_index = max_index;
    opts.samples = samples;
    opts.seed = seed;
    if (m_bound >= 0) opts.m_bound = m_bound;
    const auto res = skewspec::run_repcheck(opts);
    if (all_pass) *all_pass = res.all_pass ? 1 : 0;
    *table_json = dup_string(skewspec::to_json(res).dump(2));
  });
}

ss_status ss_su2_irrep(int n, const double* g, double* out, size_t out_len) {
  if (!g) return null_arg("g");
  if (!out) return null_arg("out");
  return guard([&] {
    const auto el = skewspec::GroupElement::su2(read_2x2(g));
    write_matrix(skewspec::su2_irrep(n, el), out, out_len);
  });
}

ss_status ss_u2_irrep(int m, int n, const double* g, double* out, size_t out_len) {
  if (!g) return null_arg("g");
  if (!out) return null_arg("out");
  return guard([&] {
    const auto el = skewspec::GroupElement::u2(read_2x2(g));
    write_matrix(skewspec::u2_irrep(m, n, el), out, out_len);
  });
}

ss_status ss_hermitian_eigenvalues(size_t n, const double* a, double* out) {
  if (!a) return null_arg("a");
  if (!out) return null_arg("out");
  return guard([&] {
    skewspec::CMatrix m(n);
    for (std::size_t i = 0; i < n * n; ++i) m(i / n, i % n) = {a[2 * i], a[2 * i + 1]};
    const auto ev = skewspec::hermitian_eigenvalues(m);
    std::copy(ev.begin(), ev.end(), out);
  });
}

}  // extern "C"
