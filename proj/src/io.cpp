#include "mfl/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mfl/errors.hpp"

namespace mfl {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_coefficients_csv(std::ostream& out, const Coefficients& coeffs,
                            const std::vector<std::string>& predictor_names,
                            const std::vector<std::string>& class_labels,
                            int time_min) {
  out << "predictor,class,time,value\n";
  for (int k = 0; k < coeffs.K - 1; ++k) {
    const std::string& label = class_labels[size_t(k)];
    for (int t = 0; t < coeffs.T; ++t) {
      out << "(Intercept)," << label << ',' << time_min + t << ','
          << format_double(coeffs.b0(t, k)) << '\n';
    }
  }
  for (int k = 0; k < coeffs.K - 1; ++k) {
    const std::string& label = class_labels[size_t(k)];
    for (int j = 0; j < coeffs.p; ++j) {
      for (int t = 0; t < coeffs.T; ++t) {
        out << predictor_names[size_t(j)] << ',' << label << ',' << time_min + t
            << ',' << format_double(coeffs.b(j, t, k)) << '\n';
      }
    }
  }
}

namespace {

std::vector<std::string> split_line(std::string line) {
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

}  // namespace

CoeffCsv read_coefficients_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      split_line(line) != std::vector<std::string>{"predictor", "class", "time",
                                                   "value"}) {
    throw IngestError("coefficients: expected header predictor,class,time,value");
  }
  struct Row {
    std::string predictor, label;
    long time;
    double value;
  };
  std::vector<Row> rows;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_line(line);
    if (f.size() != 4) {
      throw IngestError("coefficients: line " + std::to_string(line_no) +
                        ": expected 4 fields");
    }
    Row r;
    r.predictor = f[0];
    r.label = f[1];
    try {
      size_t used = 0;
      r.time = std::stol(f[2], &used);
      if (used != f[2].size()) throw std::invalid_argument(f[2]);
      r.value = std::stod(f[3], &used);
      if (used != f[3].size()) throw std::invalid_argument(f[3]);
    } catch (...) {
      throw IngestError("coefficients: line " + std::to_string(line_no) +
                        ": bad number");
    }
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw IngestError("coefficients: no rows");

  CoeffCsv out;
  long tmin = rows.front().time, tmax = rows.front().time;
  for (const auto& r : rows) {
    tmin = std::min(tmin, r.time);
    tmax = std::max(tmax, r.time);
    if (r.predictor != "(Intercept)" &&
        std::find(out.predictor_names.begin(), out.predictor_names.end(),
                  r.predictor) == out.predictor_names.end()) {
      out.predictor_names.push_back(r.predictor);
    }
    if (std::find(out.class_labels.begin(), out.class_labels.end(), r.label) ==
        out.class_labels.end()) {
      out.class_labels.push_back(r.label);
    }
  }
  out.time_min = int(tmin);
  const int T = int(tmax - tmin + 1);
  const int p = int(out.predictor_names.size());
  const int K = int(out.class_labels.size()) + 1;
  out.coeffs = Coefficients::zeros(p, T, K);

  std::vector<std::uint8_t> seen(size_t(p + 1) * size_t(T) * size_t(K - 1), 0);
  for (const auto& r : rows) {
    const int t = int(r.time - tmin);
    const int k = int(std::find(out.class_labels.begin(), out.class_labels.end(),
                                r.label) -
                      out.class_labels.begin());
    int j = 0;  // 0 = intercept slot
    if (r.predictor != "(Intercept)") {
      j = 1 + int(std::find(out.predictor_names.begin(),
                            out.predictor_names.end(), r.predictor) -
                  out.predictor_names.begin());
    }
    auto& flag =
        seen[(size_t(k) * size_t(T) + size_t(t)) * size_t(p + 1) + size_t(j)];
    if (flag) {
      throw IngestError("coefficients: duplicate entry for (" + r.predictor +
                        ", " + r.label + ", " + std::to_string(r.time) + ")");
    }
    flag = 1;
    if (j == 0) {
      out.coeffs.b0(t, k) = r.value;
    } else {
      out.coeffs.b(j - 1, t, k) = r.value;
    }
  }
  for (const auto f : seen) {
    if (!f) throw IngestError("coefficients: incomplete grid of entries");
  }
  return out;
}

CoeffCsv read_coefficients_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("coefficients: cannot open '" + path + "'");
  return read_coefficients_csv(in);
}

void write_panel_csv(std::ostream& out, const PanelData& data, int time_min) {
  out << "id,time,y";
  for (const auto& name : data.predictor_names) out << ',' << name;
  out << '\n';
  for (int i = 0; i < data.n; ++i) {
    for (int t = 0; t < data.T; ++t) {
      out << data.ids[size_t(i)] << ',' << time_min + t << ',';
      const int label = data.y_at(i, t);
      out << (label == 0 ? "NA" : data.class_labels[size_t(label - 1)]);
      for (double v : data.x_at(i, t)) out << ',' << format_double(v);
      out << '\n';
    }
  }
}

std::uint64_t fnv1a_hash(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("digest: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a_hash(ss.str())));
  return buf;
}

}  // namespace mfl
