#include "mfl/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "mfl/errors.hpp"

namespace mfl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

bool parse_int(const std::string& s, long& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtol(s.c_str(), &end, 10);
  return end == s.c_str() + s.size();
}

// lower-of-two-middles; values need not be sorted on entry
double lower_median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

int find_level(const RawColumn& col, const std::string& value) {
  for (size_t l = 0; l < col.levels.size(); ++l) {
    if (col.levels[l] == value) return int(l);
  }
  return -1;
}

}  // namespace

Schema Schema::from_json(const std::string& text) {
  Schema schema;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(std::string("schema: ") + e.what());
  }
  if (!doc.is_object()) throw IngestError("schema: expected a JSON object");
  const nlohmann::json& preds =
      doc.contains("predictors") ? doc.at("predictors") : doc;
  for (auto it = preds.begin(); it != preds.end(); ++it) {
    ColumnSchema cs;
    const auto& spec = it.value();
    if (!spec.is_object()) throw IngestError("schema: predictor entries must be objects");
    if (spec.contains("kind")) {
      const std::string kind = spec.at("kind").get<std::string>();
      if (kind == "categorical") {
        cs.kind = ColumnKind::categorical;
      } else if (kind == "numeric") {
        cs.kind = ColumnKind::numeric;
      } else {
        throw IngestError("schema: unknown kind '" + kind + "'");
      }
    }
    if (spec.contains("levels")) {
      cs.levels = spec.at("levels").get<std::vector<std::string>>();
      if (!spec.contains("kind")) cs.kind = ColumnKind::categorical;
    }
    if (spec.contains("time_invariant")) {
      cs.time_invariant = spec.at("time_invariant").get<bool>();
    }
    if (cs.kind == ColumnKind::categorical && cs.levels.size() < 2) {
      throw IngestError("schema: categorical '" + it.key() +
                        "' needs at least 2 levels");
    }
    schema.columns[it.key()] = std::move(cs);
  }
  return schema;
}

Schema Schema::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("schema: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

RawPanel ingest_csv(std::istream& in, const Schema& schema,
                    const IngestOptions& options) {
  std::string line;
  if (!std::getline(in, line)) throw IngestError("ingest: empty input");
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "id" || header[1] != "time" ||
      header[2] != "y") {
    throw IngestError("ingest: header must start with id,time,y");
  }
  const size_t width = header.size();
  std::vector<std::string> predictor_names(header.begin() + 3, header.end());

  struct Row {
    std::string id;
    long time;
    long line_no;
    std::vector<std::string> fields;
  };
  std::vector<Row> rows;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    if (fields.size() != width) {
      throw IngestError("ingest: line " + std::to_string(line_no) +
                        ": expected " + std::to_string(width) +
                        " fields, got " + std::to_string(fields.size()));
    }
    long time;
    if (!parse_int(fields[1], time)) {
      throw IngestError("ingest: line " + std::to_string(line_no) +
                        ": bad time value '" + fields[1] + "'");
    }
    rows.push_back({fields[0], time, line_no, std::move(fields)});
  }
  if (rows.empty()) throw IngestError("ingest: no data rows");

  RawPanel raw;
  std::map<std::string, int> id_index;
  long tmin = rows.front().time, tmax = rows.front().time;
  for (const auto& r : rows) {
    if (id_index.emplace(r.id, int(id_index.size())).second) {
      raw.ids.push_back(r.id);
    }
    tmin = std::min(tmin, r.time);
    tmax = std::max(tmax, r.time);
  }
  raw.n = int(raw.ids.size());
  raw.T = int(tmax - tmin + 1);
  raw.time_min = int(tmin);

  std::map<std::string, int> label_index;
  if (!options.classes.empty()) {
    for (const auto& label : options.classes) {
      if (!label_index.emplace(label, int(label_index.size()) + 1).second) {
        throw IngestError("ingest: duplicate class label '" + label + "'");
      }
    }
    raw.class_labels = options.classes;
  }

  raw.y.assign(size_t(raw.n) * size_t(raw.T), 0);
  raw.row_present.assign(size_t(raw.n) * size_t(raw.T), 0);
  raw.columns.resize(predictor_names.size());
  for (size_t c = 0; c < predictor_names.size(); ++c) {
    auto& col = raw.columns[c];
    col.name = predictor_names[c];
    col.source = col.name;
    auto it = schema.columns.find(col.name);
    if (it != schema.columns.end()) {
      col.kind = it->second.kind;
      col.levels = it->second.levels;
      col.time_invariant = it->second.time_invariant;
    }
    if (col.kind == ColumnKind::numeric) {
      col.num.assign(size_t(raw.n) * size_t(raw.T), kNaN);
    } else {
      col.sval.assign(size_t(raw.n) * size_t(raw.T), "");
    }
  }

  for (const auto& r : rows) {
    const int i = id_index.at(r.id);
    const int t = int(r.time - tmin);
    const size_t cell = raw.cell(i, t);
    if (raw.row_present[cell]) {
      throw IngestError("ingest: duplicate (id,time): (\"" + r.id + "\", " +
                        std::to_string(r.time) + ")");
    }
    raw.row_present[cell] = 1;

    const std::string& ytok = r.fields[2];
    if (ytok != options.missing_token) {
      auto it = label_index.find(ytok);
      if (it == label_index.end()) {
        if (!options.classes.empty()) {
          throw IngestError("ingest: unknown outcome label '" + ytok + "'");
        }
        it = label_index.emplace(ytok, int(label_index.size()) + 1).first;
        raw.class_labels.push_back(ytok);
      }
      raw.y[cell] = it->second;
    }

    for (size_t c = 0; c < raw.columns.size(); ++c) {
      auto& col = raw.columns[c];
      const std::string& tok = r.fields[c + 3];
      if (tok == options.missing_token) continue;
      if (col.kind == ColumnKind::numeric) {
        double v;
        if (!parse_double(tok, v)) {
          throw IngestError("ingest: line " + std::to_string(r.line_no) +
                            ": bad numeric value '" + tok + "' in column '" +
                            col.name + "'");
        }
        col.num[cell] = v;
      } else {
        if (find_level(col, tok) < 0) {
          throw IngestError("ingest: value '" + tok +
                            "' outside declared levels for column '" +
                            col.name + "'");
        }
        col.sval[cell] = tok;
      }
    }
  }
  raw.K = int(raw.class_labels.size());
  return raw;
}

RawPanel ingest_csv_file(const std::string& path, const Schema& schema,
                         const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) throw IngestError("ingest: cannot open '" + path + "'");
  return ingest_csv(in, schema, options);
}

RawPanel encode_categorical(const RawPanel& raw) {
  RawPanel out = raw;
  out.columns.clear();
  const size_t cells = size_t(raw.n) * size_t(raw.T);
  for (const auto& col : raw.columns) {
    if (col.kind == ColumnKind::numeric) {
      out.columns.push_back(col);
      continue;
    }
    if (col.levels.size() < 2) {
      throw std::invalid_argument("encode: categorical '" + col.name +
                                  "' needs at least 2 declared levels");
    }
    const int m = int(col.levels.size());
    std::vector<RawColumn> indicators(size_t(m - 1));
    for (int l = 1; l < m; ++l) {
      auto& ind = indicators[size_t(l - 1)];
      ind.name = col.name + "." + std::to_string(l + 1);
      ind.kind = ColumnKind::numeric;
      ind.time_invariant = col.time_invariant;
      ind.source = col.name;
      ind.source_level = l + 1;
      ind.num.assign(cells, kNaN);
    }
    for (size_t cell = 0; cell < cells; ++cell) {
      const std::string& v = col.sval[cell];
      if (v.empty()) continue;  // missing propagates to every indicator
      const int li = find_level(col, v);
      if (li < 0) {
        throw IngestError("encode: value '" + v +
                          "' outside declared levels for column '" + col.name +
                          "'");
      }
      for (int l = 1; l < m; ++l) {
        indicators[size_t(l - 1)].num[cell] = (li == l) ? 1.0 : 0.0;
      }
    }
    for (auto& ind : indicators) out.columns.push_back(std::move(ind));
  }
  return out;
}

namespace {

// Shared by the fitting and replay paths; medians come either from the data
// itself or from a stored report.
void impute_column(RawColumn& col, int n, int T,
                   const std::vector<double>& cohort_median,
                   double global_median, bool global_defined,
                   ImputationCounts& counts, bool& used_global) {
  auto fill_fallback = [&](size_t cell, int t) {
    if (std::isfinite(cohort_median[size_t(t)])) {
      col.num[cell] = cohort_median[size_t(t)];
      ++counts.cohort_median;
    } else if (global_defined) {
      col.num[cell] = global_median;
      ++counts.global_median;
      used_global = true;
    } else {
      throw ImputationError("impute: predictor '" + col.name +
                            "' has no observed values");
    }
  };

  if (col.time_invariant) {
    for (int i = 0; i < n; ++i) {
      for (int t = 0; t < T; ++t) {
        const size_t cell = size_t(i) * size_t(T) + size_t(t);
        if (std::isfinite(col.num[cell])) continue;
        // own value from the nearest past, else nearest future timepoint
        double own = kNaN;
        for (int s = t - 1; s >= 0; --s) {
          const size_t c2 = size_t(i) * size_t(T) + size_t(s);
          if (std::isfinite(col.num[c2])) {
            own = col.num[c2];
            break;
          }
        }
        if (!std::isfinite(own)) {
          for (int s = t + 1; s < T; ++s) {
            const size_t c2 = size_t(i) * size_t(T) + size_t(s);
            if (std::isfinite(col.num[c2])) {
              own = col.num[c2];
              break;
            }
          }
        }
        if (std::isfinite(own)) {
          col.num[cell] = own;
          ++counts.time_invariant_fill;
        } else {
          fill_fallback(cell, t);
        }
      }
    }
    return;
  }

  for (int i = 0; i < n; ++i) {
    double last_seen = kNaN;  // most recent originally-observed value
    for (int t = 0; t < T; ++t) {
      const size_t cell = size_t(i) * size_t(T) + size_t(t);
      if (std::isfinite(col.num[cell])) {
        last_seen = col.num[cell];
        continue;
      }
      if (std::isfinite(last_seen)) {
        col.num[cell] = last_seen;
        ++counts.carry_forward;
      } else {
        fill_fallback(cell, t);
      }
    }
  }
}

ImputeResult impute_with(const RawPanel& raw,
                         const ImputationLog* stored) {
  ImputeResult result;
  result.panel = raw;
  auto& log = result.log;
  const size_t ncols = raw.columns.size();
  log.counts.assign(ncols, {});
  log.cohort_medians.assign(ncols, {});
  log.global_median.assign(ncols, kNaN);

  for (size_t c = 0; c < ncols; ++c) {
    auto& col = result.panel.columns[c];
    if (col.kind != ColumnKind::numeric) {
      throw std::invalid_argument("impute: encode categorical columns first");
    }
    std::vector<double> cohort(size_t(raw.T), kNaN);
    double global = kNaN;
    if (stored) {
      cohort = stored->cohort_medians[c];
      global = stored->global_median[c];
    } else {
      std::vector<double> all;
      for (int t = 0; t < raw.T; ++t) {
        std::vector<double> at_t;
        for (int i = 0; i < raw.n; ++i) {
          const double v = col.num[raw.cell(i, t)];
          if (std::isfinite(v)) {
            at_t.push_back(v);
            all.push_back(v);
          }
        }
        if (!at_t.empty()) cohort[size_t(t)] = lower_median(std::move(at_t));
      }
      if (!all.empty()) global = lower_median(std::move(all));
    }
    log.cohort_medians[c] = cohort;
    log.global_median[c] = global;

    bool used_global = false;
    impute_column(col, raw.n, raw.T, cohort, global, std::isfinite(global),
                  log.counts[c], used_global);
    if (used_global) log.global_fallback_used.push_back(col.name);
  }
  return result;
}

}  // namespace

ImputeResult impute(const RawPanel& raw) { return impute_with(raw, nullptr); }

namespace {

struct ColumnStats {
  double mean = 0.0;
  double sd = 0.0;
  bool constant = false;
};

// Pooled over cells with an observed outcome; population sd.
ColumnStats observed_cell_stats(const RawPanel& raw, const RawColumn& col) {
  double sum = 0.0;
  double lo = 0.0, hi = 0.0;
  size_t count = 0;
  for (int i = 0; i < raw.n; ++i) {
    for (int t = 0; t < raw.T; ++t) {
      const size_t cell = raw.cell(i, t);
      if (raw.y[cell] == 0) continue;
      const double v = col.num[cell];
      if (count == 0) {
        lo = hi = v;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      sum += v;
      ++count;
    }
  }
  if (count == 0) {
    throw IngestError("standardize: no observed outcome cells");
  }
  ColumnStats st;
  st.mean = sum / double(count);
  if (lo == hi) {
    st.constant = true;
    return st;
  }
  double ss = 0.0;
  for (int i = 0; i < raw.n; ++i) {
    for (int t = 0; t < raw.T; ++t) {
      const size_t cell = raw.cell(i, t);
      if (raw.y[cell] == 0) continue;
      const double d = col.num[cell] - st.mean;
      ss += d * d;
    }
  }
  st.sd = std::sqrt(ss / double(count));
  return st;
}

PanelData assemble_panel(const RawPanel& raw,
                         const std::vector<double>& mean,
                         const std::vector<double>& sd,
                         const std::vector<std::string>& class_labels) {
  PanelData d;
  d.n = raw.n;
  d.p = int(raw.columns.size());
  d.T = raw.T;
  d.K = int(class_labels.size());
  d.y = raw.y;
  d.ids = raw.ids;
  d.class_labels = class_labels;
  d.predictor_names.reserve(raw.columns.size());
  for (const auto& col : raw.columns) d.predictor_names.push_back(col.name);
  d.x.assign(size_t(d.n) * size_t(d.T) * size_t(d.p), 0.0);
  for (int i = 0; i < d.n; ++i) {
    for (int t = 0; t < d.T; ++t) {
      auto row = d.x_at(i, t);
      const size_t cell = raw.cell(i, t);
      for (int j = 0; j < d.p; ++j) {
        const double v = raw.columns[size_t(j)].num[cell];
        row[size_t(j)] = sd[size_t(j)] == 0.0 ? 0.0 : (v - mean[size_t(j)]) / sd[size_t(j)];
      }
    }
  }
  d.finalize();
  return d;
}

void check_numeric_complete(const RawPanel& raw) {
  for (const auto& col : raw.columns) {
    if (col.kind != ColumnKind::numeric) {
      throw std::invalid_argument(
          "standardize: categorical columns must be encoded first");
    }
    for (double v : col.num) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument(
            "standardize: missing values remain in column '" + col.name + "'");
      }
    }
  }
}

std::vector<PreprocessReport::CategoryMap> category_maps(const RawPanel& raw) {
  std::vector<PreprocessReport::CategoryMap> maps;
  for (const auto& col : raw.columns) {
    if (col.source == col.name) continue;  // not an indicator
    auto it = std::find_if(maps.begin(), maps.end(), [&](const auto& m) {
      return m.source == col.source;
    });
    if (it == maps.end()) {
      maps.push_back({col.source, {}, {}});
      it = maps.end() - 1;
    }
    it->emitted.push_back(col.name);
  }
  return maps;
}

}  // namespace

std::pair<PanelData, PreprocessReport> standardize(const RawPanel& raw) {
  check_numeric_complete(raw);
  if (raw.K < 2) throw IngestError("standardize: need at least 2 classes");

  PreprocessReport report;
  report.T = raw.T;
  report.time_min = raw.time_min;
  report.class_labels = raw.class_labels;
  const size_t p = raw.columns.size();
  report.mean.resize(p);
  report.sd.resize(p);
  report.constant_flag.assign(p, 0);
  report.time_invariant.assign(p, 0);
  for (size_t j = 0; j < p; ++j) {
    const auto& col = raw.columns[j];
    report.predictor_names.push_back(col.name);
    report.time_invariant[j] = col.time_invariant ? 1 : 0;
    const auto st = observed_cell_stats(raw, col);
    report.mean[j] = st.mean;
    report.sd[j] = st.constant ? 0.0 : st.sd;
    if (st.constant) {
      report.constant_flag[j] = 1;
      report.dropped_constant.push_back(col.name);
    }
  }
  report.categories = category_maps(raw);
  PanelData panel = assemble_panel(raw, report.mean, report.sd,
                                   report.class_labels);
  return {std::move(panel), std::move(report)};
}

std::pair<PanelData, PreprocessReport> preprocess(const RawPanel& raw) {
  const RawPanel encoded = encode_categorical(raw);
  ImputeResult imputed = impute(encoded);
  auto [panel, report] = standardize(imputed.panel);
  report.imputation = std::move(imputed.log);
  // record level lists for replay
  for (auto& cm : report.categories) {
    for (const auto& col : raw.columns) {
      if (col.name == cm.source) cm.levels = col.levels;
    }
  }
  return {std::move(panel), std::move(report)};
}

PanelData apply_report(const PreprocessReport& report, const RawPanel& raw) {
  if (raw.T != report.T || raw.time_min != report.time_min) {
    throw IngestError("apply: time range differs from the fitted transform");
  }
  RawPanel encoded = encode_categorical(raw);
  if (encoded.columns.size() != report.predictor_names.size()) {
    throw IngestError("apply: predictor set differs from the fitted transform");
  }
  for (size_t j = 0; j < encoded.columns.size(); ++j) {
    if (encoded.columns[j].name != report.predictor_names[j]) {
      throw IngestError("apply: predictor '" + encoded.columns[j].name +
                        "' does not match the fitted transform");
    }
  }

  // remap outcome labels onto the fitted ordering
  std::vector<int> label_map(size_t(raw.K) + 1, 0);
  for (int k = 1; k <= raw.K; ++k) {
    const std::string& label = raw.class_labels[size_t(k - 1)];
    auto it = std::find(report.class_labels.begin(),
                        report.class_labels.end(), label);
    if (it == report.class_labels.end()) {
      throw IngestError("apply: outcome label '" + label +
                        "' unseen by the fitted transform");
    }
    label_map[size_t(k)] = int(it - report.class_labels.begin()) + 1;
  }
  for (auto& v : encoded.y) v = label_map[size_t(v)];
  encoded.class_labels = report.class_labels;
  encoded.K = int(report.class_labels.size());

  ImputeResult imputed = impute_with(encoded, &report.imputation);
  check_numeric_complete(imputed.panel);
  return assemble_panel(imputed.panel, report.mean, report.sd,
                        report.class_labels);
}

namespace {

nlohmann::json double_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double from_double_or_null(const nlohmann::json& j) {
  if (j.is_null()) return kNaN;
  return j.get<double>();
}

}  // namespace

std::string PreprocessReport::to_json() const {
  nlohmann::json j;
  j["version"] = version;
  j["T"] = T;
  j["time_min"] = time_min;
  j["class_labels"] = class_labels;
  j["predictor_names"] = predictor_names;
  j["mean"] = mean;
  j["sd"] = sd;
  j["constant_flag"] = constant_flag;
  j["dropped_constant"] = dropped_constant;
  j["time_invariant"] = time_invariant;
  j["sd_convention"] = sd_convention;
  j["pooling"] = pooling;

  nlohmann::json imp;
  nlohmann::json counts = nlohmann::json::array();
  for (const auto& c : imputation.counts) {
    counts.push_back({{"carry_forward", c.carry_forward},
                      {"cohort_median", c.cohort_median},
                      {"global_median", c.global_median},
                      {"time_invariant_fill", c.time_invariant_fill}});
  }
  imp["counts"] = std::move(counts);
  nlohmann::json cms = nlohmann::json::array();
  for (const auto& med : imputation.cohort_medians) {
    nlohmann::json row = nlohmann::json::array();
    for (double v : med) row.push_back(double_or_null(v));
    cms.push_back(std::move(row));
  }
  imp["cohort_medians"] = std::move(cms);
  nlohmann::json gm = nlohmann::json::array();
  for (double v : imputation.global_median) gm.push_back(double_or_null(v));
  imp["global_median"] = std::move(gm);
  imp["global_fallback_used"] = imputation.global_fallback_used;
  j["imputation"] = std::move(imp);

  nlohmann::json cats = nlohmann::json::array();
  for (const auto& cm : categories) {
    cats.push_back({{"source", cm.source},
                    {"levels", cm.levels},
                    {"emitted", cm.emitted}});
  }
  j["categories"] = std::move(cats);
  return j.dump(2);
}

PreprocessReport PreprocessReport::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(std::string("report: ") + e.what());
  }
  PreprocessReport r;
  try {
    r.version = j.at("version").get<int>();
    r.T = j.at("T").get<int>();
    r.time_min = j.at("time_min").get<int>();
    r.class_labels = j.at("class_labels").get<std::vector<std::string>>();
    r.predictor_names = j.at("predictor_names").get<std::vector<std::string>>();
    r.mean = j.at("mean").get<std::vector<double>>();
    r.sd = j.at("sd").get<std::vector<double>>();
    r.constant_flag = j.at("constant_flag").get<std::vector<std::uint8_t>>();
    r.dropped_constant = j.at("dropped_constant").get<std::vector<std::string>>();
    r.time_invariant = j.at("time_invariant").get<std::vector<std::uint8_t>>();
    r.sd_convention = j.at("sd_convention").get<std::string>();
    r.pooling = j.at("pooling").get<std::string>();
    const auto& imp = j.at("imputation");
    for (const auto& c : imp.at("counts")) {
      ImputationCounts ic;
      ic.carry_forward = c.at("carry_forward").get<long>();
      ic.cohort_median = c.at("cohort_median").get<long>();
      ic.global_median = c.at("global_median").get<long>();
      ic.time_invariant_fill = c.at("time_invariant_fill").get<long>();
      r.imputation.counts.push_back(ic);
    }
    for (const auto& row : imp.at("cohort_medians")) {
      std::vector<double> med;
      for (const auto& v : row) med.push_back(from_double_or_null(v));
      r.imputation.cohort_medians.push_back(std::move(med));
    }
    for (const auto& v : imp.at("global_median")) {
      r.imputation.global_median.push_back(from_double_or_null(v));
    }
    r.imputation.global_fallback_used =
        imp.at("global_fallback_used").get<std::vector<std::string>>();
    for (const auto& cm : j.at("categories")) {
      CategoryMap out;
      out.source = cm.at("source").get<std::string>();
      out.levels = cm.at("levels").get<std::vector<std::string>>();
      out.emitted = cm.at("emitted").get<std::vector<std::string>>();
      r.categories.push_back(std::move(out));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(std::string("report: ") + e.what());
  }
  return r;
}

PreprocessReport PreprocessReport::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("report: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace mfl
