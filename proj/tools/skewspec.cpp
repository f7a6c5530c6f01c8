// Command-line front end; talks to the library only through skewspec.h.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "skewspec/skewspec.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitBreach = 2;

struct ExperimentDeleter {
  void operator()(ss_experiment* e) const { ss_experiment_free(e); }
};
using ExperimentPtr = std::unique_ptr<ss_experiment, ExperimentDeleter>;

// Owns a string returned by the library.
std::string take(char* s) {
  std::string out = s ? s : "";
  ss_string_free(s);
  return out;
}

int fail(const char* what, ss_status st) {
  std::fprintf(stderr, "skewspec %s: %s: %s\n", what, ss_status_name(st), ss_last_error());
  return kExitError;
}

struct Common {
  std::string config;
  std::string out = "skewspec_out";
  std::string block = "all";
  std::optional<std::size_t> nmax;
  std::optional<std::size_t> grid;
  std::optional<std::uint64_t> seed;
  bool json = false;
};

ExperimentPtr open_config(const Common& c, ss_status& st) {
  ss_experiment* raw = nullptr;
  st = ss_experiment_load(c.config.c_str(), &raw);
  ExperimentPtr exp(raw);
  if (st != SS_OK) return exp;
  if (c.seed && (st = ss_experiment_set_seed(exp.get(), *c.seed)) != SS_OK) return exp;
  if (c.nmax && (st = ss_experiment_set_nmax(exp.get(), *c.nmax)) != SS_OK) return exp;
  return exp;
}

std::string fmt(double v, const char* spec = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string fmt_complex(const json& c) {
  const double re = c[0].get<double>(), im = c[1].get<double>();
  if (std::abs(im) < 1e-12) return fmt(re, "%.6g");
  return fmt(re, "%.6g") + (im < 0 ? "-" : "+") + fmt(std::abs(im), "%.3g") + "i";
}

int cmd_analyze(const Common& c) {
  ss_status st;
  ExperimentPtr exp = open_config(c, st);
  if (st != SS_OK) return fail("analyze", st);
  if (c.grid && (st = ss_experiment_set_grid(exp.get(), *c.grid)) != SS_OK) return fail("analyze", st);
  char* summary = nullptr;
  st = ss_analyze(exp.get(), c.out.c_str(), &summary, nullptr);
  if (st != SS_OK) return fail("analyze", st);
  const std::string text = take(summary);
  if (c.json) {
    std::cout << text << "\n";
    return kExitOk;
  }
  const json s = json::parse(text);
  std::printf("%-22s %-13s %-6s %-10s %s\n", "block", "verdict", "N", "lambda_*", "lebesgue");
  for (const auto& b : s["blocks"]) {
    const std::string N = b["verdict_N"].is_null() ? "-" : std::to_string(b["verdict_N"].get<std::size_t>());
    const std::string lam = b["lambda_star"].is_null() ? "-" : fmt(b["lambda_star"].get<double>(), "%.6g");
    std::printf("%-22s %-13s %-6s %-10s %s\n", b["block"].get<std::string>().c_str(),
                b["verdict"].get<std::string>().c_str(), N.c_str(), lam.c_str(),
                b["lebesgue"].get<bool>() ? "yes" : "no");
  }
  std::printf("report: %s\n", s["report_path"].get<std::string>().c_str());
  return kExitOk;
}

int cmd_correlations(const Common& c) {
  ss_status st;
  ExperimentPtr exp = open_config(c, st);
  if (st != SS_OK) return fail("correlations", st);
  if (c.grid && (st = ss_experiment_set_quadrature(exp.get(), *c.grid)) != SS_OK) return fail("correlations", st);
  char* summary = nullptr;
  st = ss_correlations(exp.get(), c.block.c_str(), c.out.c_str(), &summary);
  if (st != SS_OK) return fail("correlations", st);
  const std::string text = take(summary);
  if (c.json) {
    std::cout << text << "\n";
    return kExitOk;
  }
  const json summary_doc = json::parse(text);
  for (const auto& e : summary_doc["correlation_csv"]) {
    std::printf("%-22s c_0=%s wiener=%s %s\n", e["block"].get<std::string>().c_str(), fmt_complex(e["c0"]).c_str(),
                fmt(e["wiener_average"].get<double>(), "%.3g").c_str(), e["csv"].get<std::string>().c_str());
    for (const auto& w : e["warnings"]) std::fprintf(stderr, "warning: %s\n", w.get<std::string>().c_str());
  }
  return kExitOk;
}

int cmd_degree(const Common& c, const std::vector<std::size_t>& Ns) {
  ss_status st;
  ExperimentPtr exp = open_config(c, st);
  if (st != SS_OK) return fail("degree", st);
  if (c.grid && (st = ss_experiment_set_grid(exp.get(), *c.grid)) != SS_OK) return fail("degree", st);
  char* table = nullptr;
  st = ss_degree_table(exp.get(), c.block.c_str(), Ns.data(), Ns.size(), &table);
  if (st != SS_OK) return fail("degree", st);
  const std::string text = take(table);
  if (c.json) {
    std::cout << text << "\n";
    return kExitOk;
  }
  const json t = json::parse(text);
  std::printf("reference point:");
  for (const auto& v : t["reference_point"]) std::printf(" %s", fmt(v.get<double>(), "%.6f").c_str());
  std::printf("\n");
  for (const auto& b : t["blocks"]) {
    std::printf("\n%s\n", b["block"].get<std::string>().c_str());
    std::printf("  %-6s %-12s %-12s %s\n", "N", "residual", "lambda_*", "M_N (average)");
    for (const auto& r : b["rows"]) {
      std::printf("  %-6zu %-12s %-12s", r["N"].get<std::size_t>(), fmt(r["residual"].get<double>(), "%.3g").c_str(),
                  fmt(r["lambda_star"].get<double>(), "%.6g").c_str());
      bool first = true;
      for (const auto& row : r["M_N_average"]) {
        std::printf("%s[", first ? " " : "\n  " "                                ");
        for (std::size_t k = 0; k < row.size(); ++k) std::printf("%s%s", k ? " " : "", fmt_complex(row[k]).c_str());
        std::printf("]");
        first = false;
      }
      std::printf("\n");
    }
  }
  return kExitOk;
}

int cmd_repcheck(const std::string& group, int max_index, std::size_t samples, std::uint64_t seed, bool as_json) {
  ss_group g;
  if (group == "torus") g = SS_GROUP_TORUS;
  else if (group == "su2") g = SS_GROUP_SU2;
  else if (group == "u2") g = SS_GROUP_U2;
  else {
    std::fprintf(stderr, "skewspec repcheck: unknown group \"%s\" (torus, su2, u2)\n", group.c_str());
    return kExitError;
  }
  int all_pass = 0;
  char* table = nullptr;
  const ss_status st = ss_repcheck(g, max_index, samples, seed, -1, &all_pass, &table);
  if (st != SS_OK) return fail("repcheck", st);
  const std::string text = take(table);
  const json t = json::parse(text);
  if (as_json) {
    std::cout << text << "\n";
  } else {
    std::printf("%-14s %-12s %-12s %-12s %s\n", "check", "irrep", "value", "tolerance", "result");
    for (const auto& r : t["rows"]) {
      const char* result = r["skipped"].get<bool>() ? "skipped" : r["pass"].get<bool>() ? "pass" : "FAIL";
      std::printf("%-14s %-12s %-12s %-12s %s\n", r["check"].get<std::string>().c_str(),
                  r["irrep"].get<std::string>().c_str(), fmt(r["value"].get<double>(), "%.3e").c_str(),
                  fmt(r["tolerance"].get<double>(), "%.3e").c_str(), result);
    }
  }
  if (!all_pass) {
    for (const auto& r : t["rows"])
      if (!r["pass"].get<bool>())
        std::fprintf(stderr, "repcheck failure: %s %s value %.3e > tolerance %.3e\n",
                     r["check"].get<std::string>().c_str(), r["irrep"].get<std::string>().c_str(),
                     r["value"].get<double>(), r["tolerance"].get<double>());
    return kExitBreach;
  }
  return kExitOk;
}

void add_common(CLI::App* sub, Common& c, bool with_block) {
  sub->add_option("--config", c.config, "Experiment config (JSON)")->required();
  sub->add_option("--out", c.out, "Output directory");
  if (with_block) sub->add_option("--block", c.block, "Block selector: all, an index, or a label such as n=3 or n=3/j=0");
  sub->add_option("--nmax", c.nmax, "Correlation range |n| <= nmax");
  sub->add_option("--grid", c.grid, "Grid points per dimension");
  sub->add_option("--seed", c.seed, "Seed");
  sub->add_flag("--json", c.json, "Machine-readable output on stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral criterion for skew products on tori and compact Lie groups"};
  app.set_version_flag("--version", std::string(ss_version()));
  app.require_subcommand(1);

  Common analyze, corr, degree;
  auto* a = app.add_subcommand("analyze", "Run the Mourre criterion for every block and write report.json");
  add_common(a, analyze, false);

  auto* c = app.add_subcommand("correlations", "Write correlation sequences of the default observable");
  add_common(c, corr, true);

  std::vector<std::size_t> Ns{1, 4, 16};
  auto* d = app.add_subcommand("degree", "Compare M_N from the average and the degree formula");
  add_common(d, degree, true);
  d->add_option("--N", Ns, "List of N")->delimiter(',');

  std::string group = "su2";
  int max_index = 4;
  std::size_t samples = 10000;
  std::uint64_t rseed = 0;
  bool rjson = false;
  auto* r = app.add_subcommand("repcheck", "Unitarity, homomorphism and Peter-Weyl checks");
  r->add_option("--group", group, "torus, su2 or u2");
  r->add_option("--max-index", max_index, "Largest index n (|q| for the torus)");
  r->add_option("--samples", samples, "Monte Carlo samples (0 skips orthogonality)");
  r->add_option("--seed", rseed, "Seed");
  r->add_flag("--json", rjson, "Machine-readable output on stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  if (*a) return cmd_analyze(analyze);
  if (*c) return cmd_correlations(corr);
  if (*d) return cmd_degree(degree, Ns);
  return cmd_repcheck(group, max_index, samples, rseed, rjson);
}
