#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lrr/lrr.hpp"
#include "lrr/simulate.hpp"

namespace lrr {

inline constexpr int kFormatVersion = 1;

// One row of the wage sample: positive hourly wage and a 0/1 gender flag.
struct WageRecord {
  double wage = 0.0;
  int gender = 0;
};

// Strict reader for `wage,gender` CSV files (UTF-8, decimal points, no
// thousands separators). Malformed rows raise errors naming the line.
std::vector<WageRecord> ingest_csv(const std::string& path);

// Artificial top-coding: wages are moved to the log scale, the threshold is
// the ceil((1-fraction)*n)-th order statistic of the log wages, and rows
// above it become [threshold, log(z2_raw)] brackets. Rows at or below the
// threshold stay degenerate. Returns an interval-model dataset.
Dataset apply_topcoding(const std::vector<WageRecord>& records, double fraction, double z2_raw);

// Everything needed to reproduce a run; echoed into each JSON summary.
struct RunConfig {
  std::string command = "mc";  // mc | infer | lrr-check

  // shared
  BootstrapPlan plan;
  std::string method = "both";  // conservative | bonferroni | both
  GridAxis beta_axis{1.6, 2.7, 23};
  GridAxis gamma_axis{-0.6, 2.2, 29};
  bool grid_overridden = false;
  std::string out_dir = "out";

  // mc
  int spec_id = 1;
  std::size_t n = 200;
  std::size_t replications = 200;

  // infer
  std::string input_path;
  double topcode_fraction = 0.10;
  double z2_raw = 1e8;

  // lrr-check
  std::string model = "interval";
  std::vector<double> theta;
  std::size_t eta_bins = kDefaultEtaBins;
  std::size_t perturbations = 200;
  double scale_k = 0.5;

  // optional counterfactual atoms override (model-specific layout)
  std::vector<std::vector<double>> atoms;

  ParameterGrid make_grid() const { return ParameterGrid({beta_axis, gamma_axis}, 1); }

  std::string to_json_string() const;
  static RunConfig from_json_string(const std::string& text);
  static RunConfig load(const std::string& path);

  void validate() const;
};

// 17-significant-digit decimal rendering; round-trips any double exactly.
std::string format_double(double v);

// Report emission. Each call writes the CSV/JSON payload files plus a
// summary.json carrying the format version, the config echo, seeds and
// timing. Returns the payload file names. Result files are byte-identical
// across identical runs; only the timing field of the summary varies.
std::vector<std::string> emit_report(const ConfidenceReport& report, const RunConfig& config,
                                     const std::string& outdir, double seconds);
std::vector<std::string> emit_report(const CoverageGrid& coverage, const RunConfig& config,
                                     const std::string& outdir, double seconds);
std::vector<std::string> emit_report(const SensitivityReport& report, const RunConfig& config,
                                     const std::string& outdir, double seconds);

// Reads back a CSV written by emit_report: skips `#` comment lines, returns
// the header names and numeric rows. Used for round-trip checks.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_numeric_csv(const std::string& path);

}  // namespace lrr
