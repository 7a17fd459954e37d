#include "phaseret/serial.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

namespace phaseret {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open for reading: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad()) fail(ErrorCode::io, "read failed: " + path);
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot open for writing: " + path);
  out << content;
  out.flush();
  if (!out) fail(ErrorCode::io, "write failed: " + path);
}

namespace {

ordered_json parse_json(const std::string& text, const char* what) {
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::validation, std::string(what) + ": malformed JSON");
  return j;
}

void check_keys(const ordered_json& j, std::initializer_list<const char*> allowed,
                const char* scope) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    require(known, std::string(scope) + ": unknown key '" + item.key() + "'");
  }
}

double require_number(const ordered_json& j, const char* what) {
  require(j.is_number(), std::string(what) + " must be a number");
  return j.get<double>();
}

Index require_index(const ordered_json& j, const char* what) {
  require(j.is_number_integer(), std::string(what) + " must be an integer");
  return j.get<Index>();
}

}  // namespace

std::string matrix_to_json(const MeasurementMatrix& matrix) {
  ordered_json j;
  j["m"] = matrix.entries.rows();
  j["n"] = matrix.entries.cols();
  j["budget"] = matrix.budget;
  j["label"] = matrix.label;
  ordered_json entries = ordered_json::array();
  for (Index r = 0; r < matrix.entries.rows(); ++r)
    for (Index c = 0; c < matrix.entries.cols(); ++c) {
      const cxd v = matrix.entries(r, c);
      entries.push_back(ordered_json::array({v.real(), v.imag()}));
    }
  j["entries"] = std::move(entries);
  return j.dump(2) + "\n";
}

MeasurementMatrix matrix_from_json(const std::string& text) {
  const ordered_json j = parse_json(text, "matrix");
  check_keys(j, {"m", "n", "budget", "label", "entries"}, "matrix");
  require(j.contains("m") && j.contains("n") && j.contains("entries"),
          "matrix: m, n and entries are required");
  const Index m = require_index(j.at("m"), "matrix m");
  const Index n = require_index(j.at("n"), "matrix n");
  require(m > 0 && n > 0, "matrix: dimensions must be positive");

  MeasurementMatrix out;
  out.budget = j.contains("budget") ? require_number(j.at("budget"), "matrix budget") : double(m);
  out.label = j.contains("label") ? j.at("label").get<std::string>() : "";
  const auto& entries = j.at("entries");
  require(entries.is_array() && entries.size() == static_cast<size_t>(m * n),
          "matrix: entries must hold m*n [re, im] pairs");
  out.entries.resize(m, n);
  size_t pos = 0;
  for (Index r = 0; r < m; ++r)
    for (Index c = 0; c < n; ++c, ++pos) {
      const auto& pair = entries.at(pos);
      require(pair.is_array() && pair.size() == 2, "matrix: entry must be [re, im]");
      out.entries(r, c) = cxd(require_number(pair.at(0), "matrix entry"),
                              require_number(pair.at(1), "matrix entry"));
    }
  ensure_finite(out.entries, "matrix entries");
  return out;
}

void save_matrix(const MeasurementMatrix& matrix, const std::string& path) {
  write_text_file(path, matrix_to_json(matrix));
}

MeasurementMatrix load_matrix(const std::string& path) {
  return matrix_from_json(read_text_file(path));
}

ExperimentConfig config_from_json(const std::string& text) {
  const ordered_json j = parse_json(text, "config");
  check_keys(j,
             {"soi", "m", "budget_p", "snr_db", "fixed_snr_db", "complexity_ratios", "matrices",
              "trials", "master_seed", "recovery", "covariance_samples", "design", "taf",
              "altmin"},
             "config");

  ExperimentConfig config;
  if (j.contains("soi")) {
    const auto& soi = j.at("soi");
    check_keys(soi, {"model", "n"}, "config.soi");
    if (soi.contains("model")) {
      const std::string model = soi.at("model").get<std::string>();
      if (model == "sum_exponentials")
        config.soi = SoiKind::sum_exponentials;
      else if (model == "gaussian_expdecay")
        config.soi = SoiKind::proper_gaussian;
      else
        fail(ErrorCode::validation, "config.soi.model must be sum_exponentials or gaussian_expdecay");
    }
    if (soi.contains("n")) config.n = require_index(soi.at("n"), "config.soi.n");
  }
  config.m = j.contains("m") ? require_index(j.at("m"), "config.m") : 6 * config.n;
  if (j.contains("budget_p")) config.budget_p = require_number(j.at("budget_p"), "config.budget_p");
  if (j.contains("snr_db")) {
    require(j.at("snr_db").is_array(), "config.snr_db must be an array");
    config.snr_db.clear();
    for (const auto& v : j.at("snr_db")) config.snr_db.push_back(require_number(v, "config.snr_db"));
  }
  if (j.contains("fixed_snr_db"))
    config.fixed_snr_db = require_number(j.at("fixed_snr_db"), "config.fixed_snr_db");
  if (j.contains("complexity_ratios")) {
    require(j.at("complexity_ratios").is_array(), "config.complexity_ratios must be an array");
    config.complexity_ratios.clear();
    for (const auto& v : j.at("complexity_ratios"))
      config.complexity_ratios.push_back(require_index(v, "config.complexity_ratios"));
  }
  if (j.contains("matrices")) {
    require(j.at("matrices").is_array(), "config.matrices must be an array");
    config.matrices.clear();
    for (const auto& v : j.at("matrices")) config.matrices.push_back(v.get<std::string>());
  }
  if (j.contains("trials")) config.trials = static_cast<int>(require_index(j.at("trials"), "config.trials"));
  if (j.contains("master_seed")) {
    require(j.at("master_seed").is_number_integer(), "config.master_seed must be an integer");
    config.master_seed = j.at("master_seed").get<std::uint64_t>();
  }
  if (j.contains("recovery")) {
    const std::string recovery = j.at("recovery").get<std::string>();
    if (recovery == "taf")
      config.recovery = RecoveryKind::taf;
    else if (recovery == "altmin")
      config.recovery = RecoveryKind::altmin;
    else
      fail(ErrorCode::validation, "config.recovery must be taf or altmin");
  }
  if (j.contains("covariance_samples"))
    config.covariance_samples = require_index(j.at("covariance_samples"), "config.covariance_samples");
  if (j.contains("design")) {
    const auto& design = j.at("design");
    check_keys(design, {"max_iters", "tol", "multi_start"}, "config.design");
    if (design.contains("max_iters"))
      config.design.max_iters = static_cast<int>(require_index(design.at("max_iters"), "design.max_iters"));
    if (design.contains("tol")) config.design.tol = require_number(design.at("tol"), "design.tol");
    if (design.contains("multi_start"))
      config.multi_start = static_cast<int>(require_index(design.at("multi_start"), "design.multi_start"));
  }
  if (j.contains("taf")) {
    const auto& taf = j.at("taf");
    check_keys(taf, {"max_iters", "step", "gamma"}, "config.taf");
    if (taf.contains("max_iters"))
      config.taf.max_iters = static_cast<int>(require_index(taf.at("max_iters"), "taf.max_iters"));
    if (taf.contains("step")) config.taf.step = require_number(taf.at("step"), "taf.step");
    if (taf.contains("gamma")) config.taf.gamma = require_number(taf.at("gamma"), "taf.gamma");
  }
  if (j.contains("altmin")) {
    const auto& altmin = j.at("altmin");
    check_keys(altmin, {"max_iters", "tol"}, "config.altmin");
    if (altmin.contains("max_iters"))
      config.altmin.max_iters = static_cast<int>(require_index(altmin.at("max_iters"), "altmin.max_iters"));
    if (altmin.contains("tol")) config.altmin.tol = require_number(altmin.at("tol"), "altmin.tol");
  }
  validate(config);
  return config;
}

ExperimentConfig config_from_file(const std::string& path) {
  return config_from_json(read_text_file(path));
}

std::string render_results(const ResultTable& table, EmitFormat format) {
  if (format == EmitFormat::csv) {
    std::string out;
    if (table.kind == SweepKind::frobenius) {
      out = "label,snr_db,m,n,objective\n";
      for (const auto& cell : table.cells) {
        out += cell.label + ',' + format_double(cell.snr_db) + ',' + std::to_string(cell.m) +
               ',' + std::to_string(cell.n) + ',' + format_double(cell.objective) + '\n';
      }
      return out;
    }
    out = "label,snr_db,m,n,trials,mean_eps,median_eps,stderr\n";
    for (const auto& cell : table.cells) {
      out += cell.label + ',' + format_double(cell.snr_db) + ',' + std::to_string(cell.m) + ',' +
             std::to_string(cell.n) + ',' + std::to_string(cell.trials) + ',' +
             format_double(cell.mean_eps) + ',' + format_double(cell.median_eps) + ',' +
             format_double(cell.stderr_eps) + '\n';
    }
    return out;
  }

  ordered_json j;
  switch (table.kind) {
    case SweepKind::snr: j["kind"] = "snr_sweep"; break;
    case SweepKind::complexity: j["kind"] = "complexity_sweep"; break;
    case SweepKind::frobenius: j["kind"] = "frobenius_table"; break;
  }
  ordered_json cells = ordered_json::array();
  for (const auto& cell : table.cells) {
    ordered_json c;
    c["label"] = cell.label;
    c["snr_db"] = cell.snr_db;
    c["m"] = cell.m;
    c["n"] = cell.n;
    if (table.kind == SweepKind::frobenius) {
      c["objective"] = cell.objective;
    } else {
      c["trials"] = cell.trials;
      c["mean_eps"] = cell.mean_eps;
      c["median_eps"] = cell.median_eps;
      c["stderr"] = cell.stderr_eps;
    }
    c["status"] = cell.status;
    cells.push_back(std::move(c));
  }
  j["cells"] = std::move(cells);
  ordered_json records = ordered_json::array();
  for (const auto& record : table.records) {
    ordered_json r;
    r["label"] = record.label;
    r["snr_db"] = record.snr_db;
    r["m"] = record.m;
    r["n"] = record.n;
    r["trial"] = record.trial;
    r["eps"] = record.eps;
    r["iterations"] = record.iterations;
    records.push_back(std::move(r));
  }
  j["records"] = std::move(records);
  return j.dump(2) + "\n";
}

void emit_results(const ResultTable& table, const std::string& path, EmitFormat format) {
  write_text_file(path, render_results(table, format));
}

}  // namespace phaseret
