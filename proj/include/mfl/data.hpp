#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mfl/model.hpp"

namespace mfl {

enum class ColumnKind { numeric, categorical };

struct ColumnSchema {
  ColumnKind kind = ColumnKind::numeric;
  std::vector<std::string> levels;  // categorical only; first is the reference
  bool time_invariant = false;
};

// Sidecar schema: per-predictor kind, category levels, time-invariant flag.
// Predictors not listed default to numeric and time-varying.
struct Schema {
  std::map<std::string, ColumnSchema> columns;

  static Schema from_json(const std::string& text);
  static Schema from_file(const std::string& path);
};

struct RawColumn {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  std::vector<std::string> levels;
  bool time_invariant = false;
  // provenance of encoded indicator columns
  std::string source;
  int source_level = 0;  // 1-based level index the indicator represents

  std::vector<double> num;        // numeric cells, NaN = missing
  std::vector<std::string> sval;  // categorical cells, "" = missing
};

// Long-format panel before preprocessing. Cells are dense over individuals x
// timepoints; rows absent from the source file are all-missing cells.
struct RawPanel {
  int n = 0;
  int T = 0;
  int K = 0;
  int time_min = 0;  // original time value of timepoint 0
  std::vector<std::string> ids;
  std::vector<std::string> class_labels;
  std::vector<int> y;  // n*T, 0 = missing
  std::vector<std::uint8_t> row_present;  // n*T
  std::vector<RawColumn> columns;

  std::size_t cell(int i, int t) const {
    return std::size_t(i) * std::size_t(T) + std::size_t(t);
  }
};

struct IngestOptions {
  // outcome label ordering; the label listed last becomes the reference
  // class K. Empty = first-appearance order.
  std::vector<std::string> classes;
  std::string missing_token = "NA";
};

// Header must read id,time,y,<predictors...>. Times may start anywhere but
// are offset to a contiguous 1..T range.
RawPanel ingest_csv(std::istream& in, const Schema& schema = {},
                    const IngestOptions& options = {});
RawPanel ingest_csv_file(const std::string& path, const Schema& schema = {},
                         const IngestOptions& options = {});

// Expands every m-level categorical column into m-1 indicators against the
// first declared level, named <name>.2 ... <name>.m. Missing values expand
// to missing indicators.
RawPanel encode_categorical(const RawPanel& raw);

struct ImputationCounts {
  long carry_forward = 0;
  long cohort_median = 0;
  long global_median = 0;
  long time_invariant_fill = 0;
};

struct ImputationLog {
  std::vector<ImputationCounts> counts;              // per column
  std::vector<std::vector<double>> cohort_medians;   // [column][t], NaN = none
  std::vector<double> global_median;                 // per column
  std::vector<std::string> global_fallback_used;     // columns that needed it
};

struct ImputeResult {
  RawPanel panel;
  ImputationLog log;
};

// Fills missing time-varying values from the most recent prior observation
// of the same individual, else the cross-sectional median at that timepoint,
// else the predictor's global median. Time-invariant columns fill from the
// individual's own past-or-future values first. Medians use the
// lower-of-two-middles convention.
ImputeResult impute(const RawPanel& raw);

// Everything needed to replay the exact transform on new data.
struct PreprocessReport {
  int version = 1;
  int T = 0;
  int time_min = 0;
  std::vector<std::string> class_labels;
  std::vector<std::string> predictor_names;  // post-encode order
  std::vector<double> mean;
  std::vector<double> sd;  // population convention; 0 marks a constant column
  std::vector<std::uint8_t> constant_flag;
  std::vector<std::string> dropped_constant;  // kept as all-zero columns
  std::vector<std::uint8_t> time_invariant;
  ImputationLog imputation;
  struct CategoryMap {
    std::string source;
    std::vector<std::string> levels;
    std::vector<std::string> emitted;
  };
  std::vector<CategoryMap> categories;
  std::string sd_convention = "population";
  std::string pooling = "observed-cells";

  std::string to_json() const;
  static PreprocessReport from_json(const std::string& text);
  static PreprocessReport from_file(const std::string& path);
};

// Centers and scales each (numeric, imputed) column by its pooled mean and
// population sd over observed cells; constant columns map to all zeros and
// are flagged rather than dropped so indexing stays stable.
std::pair<PanelData, PreprocessReport> standardize(const RawPanel& raw);

// encode -> impute -> standardize, with the full replayable report.
std::pair<PanelData, PreprocessReport> preprocess(const RawPanel& raw);

// Replays a fitted transform on (new) raw data: encoding via the recorded
// category maps, imputation backed by the recorded medians (the new
// individuals' own past values still take precedence), standardization by
// the recorded constants, outcome labels by the recorded ordering.
PanelData apply_report(const PreprocessReport& report, const RawPanel& raw);

}  // namespace mfl
