#include "lrr/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace lrr {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(const std::string& field, const std::string& path, std::size_t line_no) {
  const std::string text = trim(field);
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw std::runtime_error(path + ": parse error at line " + std::to_string(line_no) +
                             ": not a number: '" + field + "'");
  }
  return value;
}

json plan_to_json(const BootstrapPlan& plan) {
  return json{{"replications", plan.replications}, {"alpha", plan.alpha},
              {"alpha1", plan.alpha1},             {"kappa", plan.kappa},
              {"seed", plan.seed},                 {"quantile_rule", plan.quantile_rule}};
}

BootstrapPlan plan_from_json(const json& j) {
  BootstrapPlan plan;
  plan.replications = j.at("replications").get<std::size_t>();
  plan.alpha = j.at("alpha").get<double>();
  plan.alpha1 = j.at("alpha1").get<double>();
  plan.kappa = j.at("kappa").get<double>();
  plan.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("quantile_rule")) plan.quantile_rule = j.at("quantile_rule").get<std::string>();
  return plan;
}

json axis_to_json(const GridAxis& axis) {
  return json{{"lo", axis.lo}, {"hi", axis.hi}, {"steps", axis.steps}};
}

GridAxis axis_from_json(const json& j) {
  return GridAxis{j.at("lo").get<double>(), j.at("hi").get<double>(),
                  j.at("steps").get<std::size_t>()};
}

json config_to_json(const RunConfig& c) {
  json j{{"format_version", kFormatVersion},
         {"command", c.command},
         {"plan", plan_to_json(c.plan)},
         {"method", c.method},
         {"grid", {{"beta", axis_to_json(c.beta_axis)}, {"gamma", axis_to_json(c.gamma_axis)}}},
         {"out", c.out_dir},
         {"spec", c.spec_id},
         {"n", c.n},
         {"replications", c.replications},
         {"input", c.input_path},
         {"topcode_fraction", c.topcode_fraction},
         {"z2", c.z2_raw},
         {"model", c.model},
         {"theta", c.theta},
         {"eta_bins", c.eta_bins},
         {"perturbations", c.perturbations},
         {"scale_k", c.scale_k}};
  if (!c.atoms.empty()) j["counterfactual_atoms"] = c.atoms;
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  if (j.contains("format_version") && j.at("format_version").get<int>() != kFormatVersion) {
    throw std::runtime_error("unsupported config format_version");
  }
  c.command = j.at("command").get<std::string>();
  c.plan = plan_from_json(j.at("plan"));
  c.method = j.value("method", c.method);
  if (j.contains("grid")) {
    c.beta_axis = axis_from_json(j.at("grid").at("beta"));
    c.gamma_axis = axis_from_json(j.at("grid").at("gamma"));
    c.grid_overridden = true;
  }
  c.out_dir = j.value("out", c.out_dir);
  c.spec_id = j.value("spec", c.spec_id);
  c.n = j.value("n", c.n);
  c.replications = j.value("replications", c.replications);
  c.input_path = j.value("input", c.input_path);
  c.topcode_fraction = j.value("topcode_fraction", c.topcode_fraction);
  c.z2_raw = j.value("z2", c.z2_raw);
  c.model = j.value("model", c.model);
  c.theta = j.value("theta", c.theta);
  c.eta_bins = j.value("eta_bins", c.eta_bins);
  c.perturbations = j.value("perturbations", c.perturbations);
  c.scale_k = j.value("scale_k", c.scale_k);
  if (j.contains("counterfactual_atoms")) {
    c.atoms = j.at("counterfactual_atoms").get<std::vector<std::vector<double>>>();
  }
  return c;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
}

// Grid coordinate column names: beta/gamma for the scalar-axis case,
// beta0.., gamma0.. otherwise.
std::vector<std::string> grid_column_names(const ParameterGrid& grid) {
  std::vector<std::string> names;
  const std::size_t nb = grid.beta_axis_count();
  const std::size_t ng = grid.axis_count() - nb;
  for (std::size_t k = 0; k < nb; ++k) {
    names.push_back(nb == 1 ? "beta" : "beta" + std::to_string(k));
  }
  for (std::size_t k = 0; k < ng; ++k) {
    names.push_back(ng == 1 ? "gamma" : "gamma" + std::to_string(k));
  }
  return names;
}

void append_point_coords(std::string& line, const ParameterGrid& grid, std::size_t flat) {
  const ParameterPoint theta = grid.point(flat);
  for (double b : theta.beta) {
    line += format_double(b);
    line += ',';
  }
  for (double g : theta.gamma) {
    line += format_double(g);
    line += ',';
  }
}

void write_summary(const std::string& outdir, const RunConfig& config,
                   const std::vector<std::string>& files, const json& results, double seconds) {
  json summary{{"format_version", kFormatVersion},
               {"command", config.command},
               {"config", config_to_json(config)},
               {"results", results},
               {"files", files},
               {"timing_seconds", seconds}};
  write_file(outdir + "/summary.json", summary.dump(2) + "\n");
}

}  // namespace

std::vector<WageRecord> ingest_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open data file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  {
    const std::vector<std::string> header = split(trim(line), ',');
    if (header.size() != 2 || trim(header[0]) != "wage" || trim(header[1]) != "gender") {
      throw std::runtime_error(path + ": expected header 'wage,gender'");
    }
  }
  std::vector<WageRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split(line, ',');
    if (fields.size() != 2) {
      throw std::runtime_error(path + ": parse error at line " + std::to_string(line_no) +
                               ": expected 2 fields");
    }
    WageRecord rec;
    rec.wage = parse_double(fields[0], path, line_no);
    const double gender = parse_double(fields[1], path, line_no);
    if (gender != 0.0 && gender != 1.0) {
      throw std::runtime_error(path + ": parse error at line " + std::to_string(line_no) +
                               ": gender must be 0 or 1");
    }
    rec.gender = gender == 1.0 ? 1 : 0;
    if (!(rec.wage > 0.0)) {
      throw std::runtime_error(path + ": parse error at line " + std::to_string(line_no) +
                               ": wage must be positive");
    }
    records.push_back(rec);
  }
  if (records.empty()) throw std::runtime_error(path + ": no data rows");
  return records;
}

Dataset apply_topcoding(const std::vector<WageRecord>& records, double fraction, double z2_raw) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("top-coding fraction must lie in (0,1)");
  }
  if (records.empty()) throw std::invalid_argument("no records to top-code");
  const std::size_t n = records.size();

  std::vector<double> logs(n);
  for (std::size_t i = 0; i < n; ++i) logs[i] = std::log(records[i].wage);

  std::vector<double> sorted_logs = logs;
  std::sort(sorted_logs.begin(), sorted_logs.end());
  const std::size_t k = static_cast<std::size_t>(
      std::ceil((1.0 - fraction) * static_cast<double>(n)));
  const double threshold = sorted_logs[std::min(std::max<std::size_t>(k, 1), n) - 1];

  const double z2_log = std::log(z2_raw);
  if (!(z2_log > threshold)) {
    throw std::invalid_argument("z2 must exceed the top-coding threshold");
  }

  Dataset data = make_interval_dataset();
  for (std::size_t i = 0; i < n; ++i) {
    IntervalObservation obs;
    obs.x_binary = records[i].gender;
    obs.y_star = logs[i];
    obs.censored = logs[i] > threshold;
    if (obs.censored) {
      obs.z1_tilde = threshold;
      obs.z2_tilde = z2_log;
    } else {
      obs.z1_tilde = logs[i];
      obs.z2_tilde = logs[i];
    }
    append_observation(data, obs);
  }
  return data;
}

void RunConfig::validate() const {
  plan.validate();
  if (command != "mc" && command != "infer" && command != "lrr-check") {
    throw std::invalid_argument("unknown command: " + command);
  }
  if (method != "conservative" && method != "bonferroni" && method != "both") {
    throw std::invalid_argument("method must be conservative, bonferroni or both");
  }
  if (command == "mc") {
    if (spec_id != 1 && spec_id != 2) throw std::invalid_argument("spec must be 1 or 2");
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    if (replications < 1) throw std::invalid_argument("need at least one replicate");
  }
  if (command == "infer") {
    if (input_path.empty()) throw std::invalid_argument("infer needs --data");
    if (!std::filesystem::exists(input_path)) {
      throw std::invalid_argument("input path does not exist: " + input_path);
    }
    if (!(topcode_fraction > 0.0 && topcode_fraction < 1.0)) {
      throw std::invalid_argument("topcode fraction must lie in (0,1)");
    }
    if (!(z2_raw > 0.0)) throw std::invalid_argument("z2 must be positive");
  }
  if (command == "lrr-check") {
    if (model != "interval" && model != "entry") {
      throw std::invalid_argument("model must be interval or entry");
    }
    if (eta_bins < 2) throw std::invalid_argument("eta bins must be at least 2");
    if (perturbations < 1) throw std::invalid_argument("need at least one perturbation");
    if (!(scale_k > 0.0)) throw std::invalid_argument("scale K must be positive");
  }
}

std::string RunConfig::to_json_string() const { return config_to_json(*this).dump(2); }

RunConfig RunConfig::from_json_string(const std::string& text) {
  return config_from_json(json::parse(text));
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_string(buffer.str());
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> emit_report(const ConfidenceReport& report, const RunConfig& config,
                                     const std::string& outdir, double seconds) {
  ensure_dir(outdir);
  std::string text = "# format_version " + std::to_string(kFormatVersion) + "\n";
  for (const std::string& name : grid_column_names(report.grid)) text += name + ",";
  text +=
      "t,c_conservative,c_bonferroni,q_lrr,"
      "in_id_conservative,in_id_bonferroni,in_lrr_conservative,in_lrr_bonferroni\n";
  for (std::size_t flat = 0; flat < report.grid.size(); ++flat) {
    std::string line;
    append_point_coords(line, report.grid, flat);
    line += format_double(report.t_stat[flat]);
    line += ',';
    line += format_double(report.c_conservative[flat]);
    line += ',';
    line += format_double(report.c_bonferroni[flat]);
    line += ',';
    line += format_double(report.q_lrr[flat]);
    line += ',';
    line += report.cs_conservative.test(flat) ? '1' : '0';
    line += ',';
    line += report.cs_bonferroni.test(flat) ? '1' : '0';
    line += ',';
    line += report.lrr_cs_conservative.test(flat) ? '1' : '0';
    line += ',';
    line += report.lrr_cs_bonferroni.test(flat) ? '1' : '0';
    line += '\n';
    text += line;
  }
  write_file(outdir + "/points.csv", text);

  const bool empty_selected = report.cs_selected().count() == 0;
  const json results{{"grid_points", report.grid.size()},
                     {"method", method_name(report.method)},
                     {"empty_confidence_set", empty_selected},
                     {"card_id_conservative", report.cs_conservative.count()},
                     {"card_id_bonferroni", report.cs_bonferroni.count()},
                     {"card_lrr_conservative", report.lrr_cs_conservative.count()},
                     {"card_lrr_bonferroni", report.lrr_cs_bonferroni.count()}};
  const std::vector<std::string> files{"points.csv"};
  write_summary(outdir, config, files, results, seconds);
  return files;
}

std::vector<std::string> emit_report(const CoverageGrid& coverage, const RunConfig& config,
                                     const std::string& outdir, double seconds) {
  ensure_dir(outdir);
  std::string text = "# format_version " + std::to_string(kFormatVersion) + "\n";
  for (const std::string& name : grid_column_names(coverage.grid)) text += name + ",";
  text += "cover_id_conservative,cover_id_bonferroni,cover_lrr_conservative,cover_lrr_bonferroni\n";
  for (std::size_t flat = 0; flat < coverage.grid.size(); ++flat) {
    std::string line;
    append_point_coords(line, coverage.grid, flat);
    line += format_double(coverage.frequency(coverage.cover_id_conservative, flat));
    line += ',';
    line += format_double(coverage.frequency(coverage.cover_id_bonferroni, flat));
    line += ',';
    line += format_double(coverage.frequency(coverage.cover_lrr_conservative, flat));
    line += ',';
    line += format_double(coverage.frequency(coverage.cover_lrr_bonferroni, flat));
    line += '\n';
    text += line;
  }
  write_file(outdir + "/coverage.csv", text);

  const double reps = static_cast<double>(coverage.replications);
  const json results{
      {"replications", coverage.replications},
      {"grid_points", coverage.grid.size()},
      {"lrr_subset_violations", coverage.lrr_subset_violations},
      {"strict_containment_fraction_conservative",
       static_cast<double>(coverage.strict_containment_conservative) / reps},
      {"strict_containment_fraction_bonferroni",
       static_cast<double>(coverage.strict_containment_bonferroni) / reps},
      {"mean_card_id_conservative", static_cast<double>(coverage.card_id_conservative) / reps},
      {"mean_card_id_bonferroni", static_cast<double>(coverage.card_id_bonferroni) / reps},
      {"cv_comparison_pairs", coverage.cv_pairs},
      {"cv_comparison_fraction",
       coverage.cv_pairs == 0
           ? 1.0
           : static_cast<double>(coverage.cv_holds) / static_cast<double>(coverage.cv_pairs)}};
  const std::vector<std::string> files{"coverage.csv"};
  write_summary(outdir, config, files, results, seconds);
  return files;
}

std::vector<std::string> emit_report(const SensitivityReport& report, const RunConfig& config,
                                     const std::string& outdir, double seconds) {
  ensure_dir(outdir);
  const json payload{{"format_version", kFormatVersion},
                     {"model", config.model},
                     {"theta", config.theta},
                     {"eta_bins", config.eta_bins},
                     {"scale_k", config.scale_k},
                     {"seed", config.plan.seed},
                     {"q_lrr", report.q_lrr},
                     {"bound", report.bound},
                     {"max_observed_ratio", report.max_observed_ratio},
                     {"extremal_ratio", report.extremal_ratio},
                     {"extremal_feasible", report.extremal_feasible},
                     {"feasible_perturbations", report.perturbations}};
  write_file(outdir + "/sensitivity.json", payload.dump(2) + "\n");

  const json results{{"q_lrr", report.q_lrr},
                     {"bound", report.bound},
                     {"max_observed_ratio", report.max_observed_ratio},
                     {"extremal_ratio", report.extremal_ratio}};
  const std::vector<std::string> files{"sensitivity.json"};
  write_summary(outdir, config, files, results, seconds);
  return files;
}

CsvTable read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv: " + path);
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!header_seen) {
      for (const std::string& name : split(t, ',')) {
        if (!trim(name).empty()) table.header.push_back(trim(name));
      }
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    for (const std::string& field : split(t, ',')) {
      row.push_back(parse_double(field, path, line_no));
    }
    if (row.size() != table.header.size()) {
      throw std::runtime_error(path + ": column count mismatch at line " +
                               std::to_string(line_no));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace lrr
