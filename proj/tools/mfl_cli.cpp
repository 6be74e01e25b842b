// mfl: lasso + fused-lasso regularized multinomial logistic regression for
// longitudinal panels. Subcommands cover the full pipeline: simulate, fit,
// predict, cv, importance, plus a standalone flsa tool and manifest replay.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfl/data.hpp"
#include "mfl/errors.hpp"
#include "mfl/flsa.hpp"
#include "mfl/io.hpp"
#include "mfl/model.hpp"
#include "mfl/parallel.hpp"
#include "mfl/selection.hpp"
#include "mfl/simulate.hpp"
#include "mfl/solver.hpp"
#include "mfl/stability.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

int run_args(const std::vector<std::string>& args, int depth);

// ---------------------------------------------------------------------------
// run manifests

class Manifest {
 public:
  Manifest(std::string command, std::vector<std::string> argv)
      : start_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["version"] = kVersion;
    doc_["argv"] = std::move(argv);
    doc_["inputs"] = nlohmann::json::object();
    doc_["outputs"] = nlohmann::json::array();
  }

  void input(const std::string& path) {
    doc_["inputs"][path] = mfl::file_digest(path);
  }
  void output(const std::string& path) { doc_["outputs"].push_back(path); }
  template <typename T>
  void set(const std::string& key, const T& value) {
    doc_[key] = value;
  }

  void write(const std::string& path) {
    const auto elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start_)
                             .count();
    doc_["wall_time_s"] = elapsed;
    std::ofstream out(path);
    if (!out) throw mfl::IngestError("manifest: cannot write '" + path + "'");
    out << doc_.dump(2) << '\n';
  }

 private:
  nlohmann::json doc_;
  std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------------------
// shared option bundles

struct DataOptions {
  std::string data_path;
  std::string schema_path;
  std::vector<std::string> classes;
  std::string missing_token = "NA";

  void attach(CLI::App* cmd, bool required = true) {
    auto* opt = cmd->add_option("--data", data_path, "long-format CSV (id,time,y,...)");
    if (required) opt->required();
    cmd->add_option("--schema", schema_path,
                    "JSON sidecar declaring categorical levels and "
                    "time-invariant predictors");
    cmd->add_option("--classes", classes,
                    "outcome labels in order; the last is the reference class")
        ->delimiter(',');
    cmd->add_option("--missing", missing_token, "missing-value token");
  }

  mfl::RawPanel ingest(Manifest& manifest) const {
    manifest.input(data_path);
    mfl::Schema schema;
    if (!schema_path.empty()) {
      manifest.input(schema_path);
      schema = mfl::Schema::from_file(schema_path);
    }
    mfl::IngestOptions opt;
    opt.classes = classes;
    opt.missing_token = missing_token;
    return mfl::ingest_csv_file(data_path, schema, opt);
  }
};

struct SolverOptions {
  mfl::SolverConfig config;
  std::string stop = "obj";

  void attach(CLI::App* cmd) {
    cmd->add_option("--max-iters", config.max_iters, "iteration cap");
    cmd->add_option("--tau0", config.tau0, "initial step size");
    cmd->add_option("--gamma", config.gamma, "backtracking shrink factor");
    cmd->add_option("--eps", config.epsilon, "stopping tolerance");
    cmd->add_option("--stop", stop, "stopping criterion: obj or iter")
        ->check(CLI::IsMember({"obj", "iter"}));
    cmd->add_option("--max-backtracks", config.max_backtracks,
                    "shrink budget per iteration");
  }

  mfl::SolverConfig resolve() const {
    mfl::SolverConfig out = config;
    out.stop_rule = stop == "iter" ? mfl::StopRule::iterate_relative
                                   : mfl::StopRule::objective_relative;
    return out;
  }
};

int threads_flag = 0;

void attach_threads(CLI::App* cmd) {
  cmd->add_option("--threads", threads_flag,
                  "worker threads (default: MFL_THREADS or 1)");
}

void apply_threads() {
  int threads = threads_flag;
  if (threads <= 0) {
    if (const char* env = std::getenv("MFL_THREADS")) {
      threads = std::atoi(env);
    }
  }
  mfl::set_max_threads(threads > 0 ? threads : 1);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mfl::IngestError("cannot write '" + path + "'");
  out << content;
}

std::string read_vector_file(const std::string& path, std::vector<double>& out) {
  std::istream* in = &std::cin;
  std::ifstream file;
  if (path != "-") {
    file.open(path);
    if (!file) throw mfl::IngestError("cannot open '" + path + "'");
    in = &file;
  }
  std::string line;
  long line_no = 0;
  while (std::getline(*in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      size_t used = 0;
      const double v = std::stod(line, &used);
      if (used != line.size()) throw std::invalid_argument(line);
      out.push_back(v);
    } catch (...) {
      throw mfl::IngestError("flsa: line " + std::to_string(line_no) +
                             ": bad number '" + line + "'");
    }
  }
  return path;
}

std::string trace_csv(const mfl::FitResult& res) {
  std::ostringstream out;
  out << "iteration,objective,step_size\n";
  out << "0," << mfl::format_double(res.objective_trace[0]) << ",\n";
  for (size_t s = 1; s < res.objective_trace.size(); ++s) {
    out << s << ',' << mfl::format_double(res.objective_trace[s]) << ','
        << mfl::format_double(res.step_sizes[s - 1]) << '\n';
  }
  return out.str();
}

std::string coefficients_csv(const mfl::Coefficients& coeffs,
                             const std::vector<std::string>& predictors,
                             const std::vector<std::string>& labels,
                             int time_min) {
  std::ostringstream out;
  mfl::write_coefficients_csv(out, coeffs, predictors, labels, time_min);
  return out.str();
}

mfl::SelectRule parse_rule(const std::string& rule) {
  if (rule == "cv_min") return mfl::SelectRule::cv_min;
  if (rule == "cv_one_se") return mfl::SelectRule::cv_one_se;
  if (rule == "aic") return mfl::SelectRule::aic_nll;
  if (rule == "bic") return mfl::SelectRule::bic_nll;
  if (rule == "aic_mc") return mfl::SelectRule::aic_misclass;
  if (rule == "bic_mc") return mfl::SelectRule::bic_misclass;
  throw std::invalid_argument("unknown rule '" + rule + "'");
}

// ---------------------------------------------------------------------------
// subcommand bodies

struct FitArgs {
  DataOptions data;
  SolverOptions solver;
  double lam1 = 0.0, lam2 = 0.0;
  std::string out_coeffs = "coefficients.csv";
  std::string out_trace = "trace.csv";
  std::string out_report;
  std::string manifest_path = "fit_manifest.json";
};

int cmd_fit(const FitArgs& a, const std::vector<std::string>& argv) {
  Manifest manifest("fit", argv);
  apply_threads();
  const mfl::RawPanel raw = a.data.ingest(manifest);
  auto [panel, report] = mfl::preprocess(raw);

  const auto config = a.solver.resolve();
  const mfl::FitResult res = mfl::fit(panel, {a.lam1, a.lam2}, config);

  write_file(a.out_coeffs,
             coefficients_csv(res.coefficients, panel.predictor_names,
                              panel.class_labels, raw.time_min));
  manifest.output(a.out_coeffs);
  write_file(a.out_trace, trace_csv(res));
  manifest.output(a.out_trace);
  if (!a.out_report.empty()) {
    write_file(a.out_report, report.to_json() + "\n");
    manifest.output(a.out_report);
  }
  manifest.set("lam1", a.lam1);
  manifest.set("lam2", a.lam2);
  manifest.set("converged", res.converged);
  manifest.set("iterations", res.iterations_run);
  manifest.set("threads", mfl::max_threads());
  manifest.write(a.manifest_path);

  std::cout << "fit: " << res.iterations_run << " iterations, "
            << (res.converged ? "converged" : "iteration cap reached")
            << ", objective " << mfl::format_double(res.objective_trace.back())
            << "\n";
  return res.converged ? 0 : 3;
}

struct PredictArgs {
  DataOptions data;
  std::string coeffs_path;
  std::string report_path;
  std::string out = "predictions.csv";
  std::string manifest_path = "predict_manifest.json";
};

int cmd_predict(const PredictArgs& a, const std::vector<std::string>& argv) {
  Manifest manifest("predict", argv);
  apply_threads();
  const mfl::RawPanel raw = a.data.ingest(manifest);
  manifest.input(a.coeffs_path);
  const mfl::CoeffCsv cc = mfl::read_coefficients_csv_file(a.coeffs_path);

  mfl::PanelData panel;
  if (!a.report_path.empty()) {
    manifest.input(a.report_path);
    const auto report = mfl::PreprocessReport::from_file(a.report_path);
    panel = mfl::apply_report(report, raw);
  } else {
    panel = mfl::preprocess(raw).first;
  }
  if (panel.T != cc.coeffs.T) {
    throw mfl::EvaluationError("predict: timepoint count differs from the fit");
  }

  // columns of the panel feeding each coefficient row
  std::vector<int> source(cc.predictor_names.size(), -1);
  for (size_t j = 0; j < cc.predictor_names.size(); ++j) {
    for (int c = 0; c < panel.p; ++c) {
      if (panel.predictor_names[size_t(c)] == cc.predictor_names[j]) {
        source[j] = c;
        break;
      }
    }
    if (source[j] < 0) {
      throw mfl::EvaluationError("predict: predictor '" +
                                 cc.predictor_names[j] +
                                 "' missing from the data");
    }
  }

  // the reference class is the one panel label the fit left implicit
  if (int(panel.class_labels.size()) != cc.coeffs.K) {
    throw mfl::EvaluationError(
        "predict: class count mismatch; pass --classes with the full label "
        "list used in the fit");
  }
  std::string reference;
  for (const auto& label : panel.class_labels) {
    if (std::find(cc.class_labels.begin(), cc.class_labels.end(), label) ==
        cc.class_labels.end()) {
      if (!reference.empty()) {
        throw mfl::EvaluationError("predict: labels do not match the fit");
      }
      reference = label;
    }
  }
  if (reference.empty()) {
    throw mfl::EvaluationError("predict: labels do not match the fit");
  }

  std::ostringstream out;
  out << "id,time,predicted";
  for (const auto& label : cc.class_labels) out << ",prob_" << label;
  out << ",prob_" << reference << '\n';
  std::vector<double> x(cc.predictor_names.size(), 0.0);
  for (int i = 0; i < panel.n; ++i) {
    for (int t = 0; t < panel.T; ++t) {
      if (!raw.row_present[raw.cell(i, t)]) continue;
      const auto row = panel.x_at(i, t);
      for (size_t j = 0; j < source.size(); ++j) {
        x[j] = row[size_t(source[j])];
      }
      const auto probs = mfl::class_probabilities(cc.coeffs, x, t);
      const int pred = mfl::predict(cc.coeffs, x, t);
      out << panel.ids[size_t(i)] << ',' << raw.time_min + t << ','
          << (pred < cc.coeffs.K ? cc.class_labels[size_t(pred - 1)]
                                 : reference);
      for (double v : probs) out << ',' << mfl::format_double(v);
      out << '\n';
    }
  }
  write_file(a.out, out.str());
  manifest.output(a.out);
  manifest.set("threads", mfl::max_threads());
  manifest.write(a.manifest_path);
  std::cout << "predict: wrote " << a.out << "\n";
  return 0;
}

struct CvArgs {
  DataOptions data;
  SolverOptions solver;
  int folds = 4;
  int grid_n1 = 6;
  int grid_n2 = 4;
  std::string rule = "cv_min";
  std::uint64_t seed = 1;
  std::string out_table = "selection.csv";
  std::string out_chosen = "chosen.json";
  std::string out_coeffs = "cv_coefficients.csv";
  std::string manifest_path = "cv_manifest.json";
};

int cmd_cv(const CvArgs& a, const std::vector<std::string>& argv) {
  Manifest manifest("cv", argv);
  apply_threads();
  const mfl::RawPanel raw = a.data.ingest(manifest);
  auto [full_panel, full_report] = mfl::preprocess(raw);
  const auto config = a.solver.resolve();
  const mfl::Grid grid = mfl::make_grid(full_panel, a.grid_n1, a.grid_n2);

  // fold-aware preprocessing: refit the whole transform on each training
  // part and replay it on the held-out individuals
  const auto assignment = mfl::fold_assignment(raw.n, a.folds, a.seed);
  auto make_fold = [&](int f) {
    mfl::RawPanel train_raw = raw;
    mfl::RawPanel held_raw = raw;
    auto filter = [&](mfl::RawPanel& dst, bool keep_fold) {
      std::vector<int> keep;
      for (int i = 0; i < raw.n; ++i) {
        if ((assignment[size_t(i)] == f) == keep_fold) keep.push_back(i);
      }
      mfl::RawPanel out;
      out.n = int(keep.size());
      out.T = raw.T;
      out.K = raw.K;
      out.time_min = raw.time_min;
      out.class_labels = raw.class_labels;
      out.y.assign(size_t(out.n) * size_t(out.T), 0);
      out.row_present.assign(size_t(out.n) * size_t(out.T), 0);
      out.columns = raw.columns;
      for (auto& col : out.columns) {
        if (col.kind == mfl::ColumnKind::numeric) {
          col.num.assign(size_t(out.n) * size_t(out.T), 0.0);
        } else {
          col.sval.assign(size_t(out.n) * size_t(out.T), "");
        }
      }
      for (int dst_i = 0; dst_i < out.n; ++dst_i) {
        const int src = keep[size_t(dst_i)];
        out.ids.push_back(raw.ids[size_t(src)]);
        for (int t = 0; t < raw.T; ++t) {
          const size_t from = raw.cell(src, t);
          const size_t to = out.cell(dst_i, t);
          out.y[to] = raw.y[from];
          out.row_present[to] = raw.row_present[from];
          for (size_t c = 0; c < raw.columns.size(); ++c) {
            if (raw.columns[c].kind == mfl::ColumnKind::numeric) {
              out.columns[c].num[to] = raw.columns[c].num[from];
            } else {
              out.columns[c].sval[to] = raw.columns[c].sval[from];
            }
          }
        }
      }
      dst = std::move(out);
    };
    filter(train_raw, false);
    filter(held_raw, true);

    auto [train_panel, train_report] = mfl::preprocess(train_raw);
    std::vector<long> class_counts(size_t(train_panel.K), 0);
    for (int t = 0; t < train_panel.T; ++t) {
      for (int i : train_panel.observed[size_t(t)]) {
        ++class_counts[size_t(train_panel.y_at(i, t) - 1)];
      }
    }
    for (int k = 0; k < train_panel.K; ++k) {
      if (class_counts[size_t(k)] == 0) {
        throw mfl::SelectionError(
            "cv: fold " + std::to_string(f) + " training part lost class '" +
            train_panel.class_labels[size_t(k)] + "'");
      }
    }
    mfl::PanelData held_panel = mfl::apply_report(train_report, held_raw);
    return mfl::FoldData{std::move(train_panel), std::move(held_panel)};
  };

  mfl::SelectionTable table =
      mfl::cross_validate_with(grid, a.folds, make_fold, config);
  table.seed = a.seed;
  mfl::fill_criteria_columns(table, full_panel, grid, config);

  const auto chosen = mfl::select(table, parse_rule(a.rule));
  const mfl::FitResult refit =
      mfl::fit(full_panel, {chosen.first, chosen.second}, config);

  std::ostringstream table_out;
  table.write_csv(table_out);
  write_file(a.out_table, table_out.str());
  manifest.output(a.out_table);

  nlohmann::json chosen_doc;
  chosen_doc["rule"] = a.rule;
  chosen_doc["lam1"] = chosen.first;
  chosen_doc["lam2"] = chosen.second;
  for (const auto& e : table.entries) {
    if (e.lam1 == chosen.first && e.lam2 == chosen.second) {
      chosen_doc["cv_mean"] = e.cv_mean;
      chosen_doc["cv_se"] = e.cv_se;
      chosen_doc["df"] = e.df;
    }
  }
  chosen_doc["converged"] = refit.converged;
  write_file(a.out_chosen, chosen_doc.dump(2) + "\n");
  manifest.output(a.out_chosen);

  write_file(a.out_coeffs,
             coefficients_csv(refit.coefficients, full_panel.predictor_names,
                              full_panel.class_labels, raw.time_min));
  manifest.output(a.out_coeffs);

  manifest.set("seed", a.seed);
  manifest.set("folds", a.folds);
  manifest.set("grid_n1", a.grid_n1);
  manifest.set("grid_n2", a.grid_n2);
  manifest.set("rule", a.rule);
  manifest.set("lam1_max", grid.lam1_max);
  manifest.set("threads", mfl::max_threads());
  manifest.write(a.manifest_path);

  std::cout << "cv: " << grid.pairs.size() << " grid pairs, chosen lam1="
            << mfl::format_double(chosen.first)
            << " lam2=" << mfl::format_double(chosen.second) << "\n";
  return 0;
}

struct ImportanceArgs {
  DataOptions data;
  SolverOptions solver;
  mfl::ImportanceConfig config;
  bool no_inner_selection = false;
  double lam1 = 0.0, lam2 = 0.0;
  std::string out = "importance.csv";
  std::string manifest_path = "importance_manifest.json";
};

int cmd_importance(const ImportanceArgs& a,
                   const std::vector<std::string>& argv) {
  Manifest manifest("importance", argv);
  apply_threads();
  const mfl::RawPanel raw = a.data.ingest(manifest);
  auto [panel, report] = mfl::preprocess(raw);

  mfl::ImportanceConfig config = a.config;
  config.solver = a.solver.resolve();
  config.inner_selection = !a.no_inner_selection;
  config.fixed = {a.lam1, a.lam2};
  const auto result = mfl::importance(panel, config);

  std::ostringstream out;
  result.write_csv(out, panel.predictor_names, panel.class_labels);
  write_file(a.out, out.str());
  manifest.output(a.out);

  nlohmann::json reps = nlohmann::json::array();
  for (const auto& r : result.replicates) {
    reps.push_back({{"lam1", r.chosen.first},
                    {"lam2", r.chosen.second},
                    {"nonzero_slopes", r.nonzero_slopes},
                    {"max_abs_slope", r.max_abs_slope}});
  }
  manifest.set("replicate_fits", reps);
  manifest.set("seed", config.seed);
  manifest.set("threads", mfl::max_threads());
  manifest.write(a.manifest_path);
  std::cout << "importance: " << config.replicates << " replicates, wrote "
            << a.out << "\n";
  return 0;
}

struct SimulateArgs {
  mfl::SimConfig config;
  std::string out_data = "sim_data.csv";
  std::string out_truth = "sim_truth.csv";
  std::string manifest_path = "simulate_manifest.json";
};

int cmd_simulate(const SimulateArgs& a, const std::vector<std::string>& argv) {
  Manifest manifest("simulate", argv);
  apply_threads();
  const auto sim = mfl::generate(a.config);

  std::ostringstream data_out;
  mfl::write_panel_csv(data_out, sim.data);
  write_file(a.out_data, data_out.str());
  manifest.output(a.out_data);

  write_file(a.out_truth,
             coefficients_csv(sim.truth, sim.data.predictor_names,
                              sim.data.class_labels, 1));
  manifest.output(a.out_truth);

  manifest.set("seed", a.config.seed);
  manifest.set("n", a.config.n);
  manifest.set("T", a.config.T);
  manifest.set("K", a.config.K);
  manifest.set("p", a.config.p);
  manifest.write(a.manifest_path);
  std::cout << "simulate: wrote " << a.out_data << " and " << a.out_truth
            << "\n";
  return 0;
}

struct FlsaArgs {
  std::string in_path;
  double lam1 = 0.0, lam2 = 0.0;
  std::string out = "-";
  std::string manifest_path = "flsa_manifest.json";
};

int cmd_flsa(const FlsaArgs& a, const std::vector<std::string>& argv) {
  Manifest manifest("flsa", argv);
  std::vector<double> x;
  read_vector_file(a.in_path, x);
  if (a.in_path != "-") manifest.input(a.in_path);
  const auto solution = mfl::flsa_solve(x, a.lam1, a.lam2);
  std::ostringstream out;
  for (double v : solution) out << mfl::format_double(v) << '\n';
  if (a.out == "-") {
    std::cout << out.str();
  } else {
    write_file(a.out, out.str());
    manifest.output(a.out);
  }
  manifest.set("lam1", a.lam1);
  manifest.set("lam2", a.lam2);
  manifest.set("length", solution.size());
  manifest.write(a.manifest_path);
  return 0;
}

int cmd_replay(const std::string& manifest_path, int depth) {
  std::ifstream in(manifest_path);
  if (!in) throw mfl::IngestError("replay: cannot open '" + manifest_path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw mfl::IngestError(std::string("replay: ") + e.what());
  }
  if (!doc.contains("argv")) throw mfl::IngestError("replay: manifest has no argv");
  const auto args = doc.at("argv").get<std::vector<std::string>>();
  std::cout << "replay: " << doc.at("command").get<std::string>() << "\n";
  return run_args(args, depth + 1);
}

// ---------------------------------------------------------------------------

int run_args(const std::vector<std::string>& args, int depth) {
  if (depth > 1) throw mfl::IngestError("replay: manifests cannot nest");

  CLI::App app{"multinomial fused lasso for longitudinal classification"};
  app.set_version_flag("--version", std::string("mfl ") + kVersion);
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "fit at a fixed tuning pair");
  fit_args.data.attach(fit_cmd);
  fit_args.solver.attach(fit_cmd);
  attach_threads(fit_cmd);
  fit_cmd->add_option("--lam1", fit_args.lam1, "lasso weight")->required();
  fit_cmd->add_option("--lam2", fit_args.lam2, "fusion weight")->required();
  fit_cmd->add_option("--out-coeffs", fit_args.out_coeffs, "coefficient CSV");
  fit_cmd->add_option("--out-trace", fit_args.out_trace, "objective trace CSV");
  fit_cmd->add_option("--out-report", fit_args.out_report,
                      "preprocessing report JSON (for later predict)");
  fit_cmd->add_option("--manifest", fit_args.manifest_path, "run manifest");

  PredictArgs predict_args;
  auto* predict_cmd =
      app.add_subcommand("predict", "class predictions from a coefficient CSV");
  predict_args.data.attach(predict_cmd);
  attach_threads(predict_cmd);
  predict_cmd->add_option("--coeffs", predict_args.coeffs_path, "coefficient CSV")
      ->required();
  predict_cmd->add_option("--report", predict_args.report_path,
                          "preprocessing report from the fit");
  predict_cmd->add_option("--out", predict_args.out, "predictions CSV");
  predict_cmd->add_option("--manifest", predict_args.manifest_path, "run manifest");

  CvArgs cv_args;
  auto* cv_cmd = app.add_subcommand(
      "cv", "tuning-parameter search by cross-validation and criteria");
  cv_args.data.attach(cv_cmd);
  cv_args.solver.attach(cv_cmd);
  attach_threads(cv_cmd);
  cv_cmd->add_option("--folds", cv_args.folds, "fold count");
  cv_cmd->add_option("--grid-n1", cv_args.grid_n1, "lam1 grid size");
  cv_cmd->add_option("--grid-n2", cv_args.grid_n2, "lam2 grid size");
  cv_cmd->add_option("--rule", cv_args.rule, "selection rule")
      ->check(CLI::IsMember(
          {"cv_min", "cv_one_se", "aic", "bic", "aic_mc", "bic_mc"}));
  cv_cmd->add_option("--seed", cv_args.seed, "fold-partition seed");
  cv_cmd->add_option("--out-table", cv_args.out_table, "selection table CSV");
  cv_cmd->add_option("--out-chosen", cv_args.out_chosen, "chosen pair JSON");
  cv_cmd->add_option("--out-coeffs", cv_args.out_coeffs,
                     "full-data refit coefficient CSV");
  cv_cmd->add_option("--manifest", cv_args.manifest_path, "run manifest");

  ImportanceArgs imp_args;
  auto* imp_cmd = app.add_subcommand(
      "importance", "subsampling-based variable importance");
  imp_args.data.attach(imp_cmd);
  imp_args.solver.attach(imp_cmd);
  attach_threads(imp_cmd);
  imp_cmd->add_option("--replicates", imp_args.config.replicates, "subsample count");
  imp_cmd->add_option("--fraction", imp_args.config.fraction,
                      "individuals per subsample");
  imp_cmd->add_option("--seed", imp_args.config.seed, "subsampling seed");
  imp_cmd->add_flag("--no-inner-selection", imp_args.no_inner_selection,
                    "fit at a fixed pair instead of per-replicate CV");
  imp_cmd->add_option("--lam1", imp_args.lam1, "fixed lasso weight");
  imp_cmd->add_option("--lam2", imp_args.lam2, "fixed fusion weight");
  imp_cmd->add_option("--grid-n1", imp_args.config.grid_n1, "inner lam1 grid size");
  imp_cmd->add_option("--grid-n2", imp_args.config.grid_n2, "inner lam2 grid size");
  imp_cmd->add_option("--folds", imp_args.config.inner_folds, "inner CV folds");
  imp_cmd->add_flag("--reuse-cv-folds", imp_args.config.reuse_cv_folds,
                    "subsample the CV training sets instead of fresh draws");
  imp_cmd->add_option("--out", imp_args.out, "importance CSV");
  imp_cmd->add_option("--manifest", imp_args.manifest_path, "run manifest");

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "synthetic benchmark panel");
  attach_threads(sim_cmd);
  sim_cmd->add_option("--n", sim_args.config.n, "individuals");
  sim_cmd->add_option("--t", sim_args.config.T, "timepoints");
  sim_cmd->add_option("--k", sim_args.config.K, "classes");
  sim_cmd->add_option("--p", sim_args.config.p, "predictors");
  sim_cmd->add_option("--seed", sim_args.config.seed, "generator seed");
  sim_cmd->add_option("--out-data", sim_args.out_data, "panel CSV");
  sim_cmd->add_option("--out-truth", sim_args.out_truth, "true coefficient CSV");
  sim_cmd->add_option("--manifest", sim_args.manifest_path, "run manifest");

  FlsaArgs flsa_args;
  auto* flsa_cmd = app.add_subcommand(
      "flsa", "standalone fused lasso signal approximator");
  flsa_cmd->add_option("--in", flsa_args.in_path,
                       "newline-separated vector, - for stdin")
      ->required();
  flsa_cmd->add_option("--lam1", flsa_args.lam1, "sparsity weight")->required();
  flsa_cmd->add_option("--lam2", flsa_args.lam2, "fusion weight")->required();
  flsa_cmd->add_option("--out", flsa_args.out, "solution file, - for stdout");
  flsa_cmd->add_option("--manifest", flsa_args.manifest_path, "run manifest");

  std::string replay_path;
  auto* replay_cmd =
      app.add_subcommand("replay", "re-run a command from its manifest");
  replay_cmd->add_option("manifest", replay_path, "manifest JSON")->required();

  std::vector<const char*> argv;
  argv.push_back("mfl");
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help / --version
    }
    std::cerr << "error: flags: " << e.what() << "\n";
    return 2;
  }

  if (fit_cmd->parsed()) return cmd_fit(fit_args, args);
  if (predict_cmd->parsed()) return cmd_predict(predict_args, args);
  if (cv_cmd->parsed()) return cmd_cv(cv_args, args);
  if (imp_cmd->parsed()) return cmd_importance(imp_args, args);
  if (sim_cmd->parsed()) return cmd_simulate(sim_args, args);
  if (flsa_cmd->parsed()) return cmd_flsa(flsa_args, args);
  if (replay_cmd->parsed()) return cmd_replay(replay_path, depth);
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run_args(args, 0);
  } catch (const mfl::StepSizeError& e) {
    std::cerr << "error: solver: " << e.what() << "\n";
    return 4;
  } catch (const mfl::DivergedError& e) {
    std::cerr << "error: solver: " << e.what() << "\n";
    return 4;
  } catch (const mfl::SelectionError& e) {
    std::cerr << "error: selection: " << e.what() << "\n";
    return 5;
  } catch (const mfl::ImportanceError& e) {
    std::cerr << "error: importance: " << e.what() << "\n";
    return 5;
  } catch (const mfl::IngestError& e) {
    std::cerr << "error: ingest: " << e.what() << "\n";
    return 1;
  } catch (const mfl::ImputationError& e) {
    std::cerr << "error: impute: " << e.what() << "\n";
    return 1;
  } catch (const mfl::EvaluationError& e) {
    std::cerr << "error: evaluate: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: flags: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
