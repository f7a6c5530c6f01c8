#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "skewspec/cocycle.hpp"
#include "skewspec/group_rep.hpp"
#include "skewspec/koopman.hpp"
#include "skewspec/mourre.hpp"
#include "skewspec/torus_flow.hpp"

namespace skewspec {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolName = "skewspec";
inline constexpr const char* kToolVersion = "0.1.0";

/// Double-precision value of a named irrational surrogate ("sqrt2m1",
/// "sqrt3m1"); nullopt for unknown names.
std::optional<double> surrogate_value(std::string_view name);

struct BlockConfig {
  Irrep pi;
  std::size_t j = 0;

  /// "<irrep label>/j=<row>".
  std::string label() const;
};

/// Expands to every (m, n) block of a U(2) experiment and feeds the
/// admissible-set section of the report.
struct U2Ranges {
  int m_lo = 0, m_hi = 0;
  int n_lo = 0, n_hi = 0;
  std::size_t j = 0;
};

struct AnalysisConfig {
  std::vector<std::size_t> grid;  // per dimension; empty selects the default
  std::size_t N_max = 256;
  double pos_tol = kDefaultPositivityTolerance;
  std::size_t n_max = 64;
  std::uint64_t seed = 0;
  Frame frame = Frame::Diagonal;
  std::optional<std::size_t> quadrature;  // per-dimension correlation grid
  std::optional<std::vector<double>> reference_point;
  std::size_t dini_samples = 7;
};

/// Declarative experiment description, read from a single JSON document.
class ExperimentConfig {
 public:
  /// Parses and validates; errors are ConfigError with "line L: /json/pointer: ..." messages.
  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::filesystem::path& path);

  nlohmann::json to_json() const;
  /// Canonical serialisation (sorted keys, two-space indent).
  std::string serialize() const;
  /// FNV-1a 64 of serialize(), as 16 hex digits.
  std::string hash() const;

  const std::string& name() const noexcept { return name_; }
  const TranslationFlow& flow() const noexcept { return flow_; }
  const Cocycle& cocycle() const noexcept { return cocycle_; }
  GroupTag group() const noexcept { return cocycle_.tag(); }
  const std::vector<BlockConfig>& blocks() const noexcept { return blocks_; }
  const std::optional<U2Ranges>& u2_ranges() const noexcept { return u2_ranges_; }
  const AnalysisConfig& analysis() const noexcept { return analysis_; }
  AnalysisConfig& analysis() noexcept { return analysis_; }
  /// Raw y entries as written (numbers or surrogate names).
  const nlohmann::json& y_sources() const noexcept { return y_sources_; }

  TorusGrid analysis_grid() const;
  TorusPoint reference_point() const;

 private:
  ExperimentConfig(TranslationFlow flow, Cocycle cocycle) : flow_(std::move(flow)), cocycle_(std::move(cocycle)) {}

  std::string name_;
  TranslationFlow flow_;
  Cocycle cocycle_;
  nlohmann::json y_sources_;
  nlohmann::json cocycle_json_;
  std::size_t group_dim_ = 1;
  std::vector<BlockConfig> explicit_blocks_;
  std::optional<U2Ranges> u2_ranges_;
  std::vector<BlockConfig> blocks_;
  AnalysisConfig analysis_;
};

/// Indices of blocks matched by `selector`: "all", a list index, an irrep
/// label ("n=3") or a full block label ("n=3/j=0"). Throws NotFound.
std::vector<std::size_t> select_blocks(const ExperimentConfig& cfg, std::string_view selector);

nlohmann::json to_json(const MourreReport& r);

/// Deterministic report document (no timings).
nlohmann::json analyze_report(const ExperimentConfig& cfg);

struct AnalyzeOutcome {
  nlohmann::json report;
  nlohmann::json summary;  // digests, paths, timings
};

/// Runs analyze_report and, when `out_dir` is set, writes report.json atomically.
AnalyzeOutcome run_analyze(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& out_dir);

/// Correlation series of the default observable of each selected block.
/// Writes corr_<label>.csv and corr_<label>.json sidecars to `out_dir`.
nlohmann::json run_correlations(const ExperimentConfig& cfg, std::string_view selector,
                                const std::filesystem::path& out_dir);

/// M_N at the reference point by the averaging and the degree formula, their
/// residual, and lambda_{*,N} over the analysis grid, for each N.
nlohmann::json degree_table(const ExperimentConfig& cfg, std::string_view selector,
                            const std::vector<std::size_t>& Ns);

struct RepcheckRow {
  std::string check;
  std::string irrep;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool skipped = false;
};

struct RepcheckResult {
  std::vector<RepcheckRow> rows;
  bool all_pass = true;
};

struct RepcheckOptions {
  GroupTag tag = GroupTag::Su2;
  int max_index = 4;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  /// U(2) only: m ranges over [-m_bound, m_bound]; defaults to max(1, max_index / 2).
  std::optional<int> m_bound;
  std::size_t pairs = 50;
};

/// Unitarity and homomorphism residuals (<= 1e-10) over random elements and
/// Peter-Weyl Monte Carlo Gram entries (within 3 / sqrt(samples) of
/// delta_{mk} / d_pi). samples == 0 skips the orthogonality rows.
RepcheckResult run_repcheck(const RepcheckOptions& opts);

nlohmann::json to_json(const RepcheckResult& r);

/// Writes via a temporary file in the same directory followed by rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace skewspec
