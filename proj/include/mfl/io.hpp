#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mfl/model.hpp"

namespace mfl {

// Shortest decimal representation that round-trips the exact double.
std::string format_double(double v);

// Long-format rows (predictor, class, time, value): intercepts first under
// the name "(Intercept)", then every slope entry, unrounded.
void write_coefficients_csv(std::ostream& out, const Coefficients& coeffs,
                            const std::vector<std::string>& predictor_names,
                            const std::vector<std::string>& class_labels,
                            int time_min = 1);

struct CoeffCsv {
  Coefficients coeffs;  // K = non-reference labels + 1
  std::vector<std::string> predictor_names;
  std::vector<std::string> class_labels;  // K-1 non-reference labels
  int time_min = 1;
};

CoeffCsv read_coefficients_csv(std::istream& in);
CoeffCsv read_coefficients_csv_file(const std::string& path);

// Full grid in the ingestion format id,time,y,<predictors...>; missing
// outcomes print as NA.
void write_panel_csv(std::ostream& out, const PanelData& data,
                     int time_min = 1);

std::uint64_t fnv1a_hash(const std::string& bytes);
std::string file_digest(const std::string& path);  // hex fnv1a of the bytes

}  // namespace mfl
