#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mfl/io.hpp"

namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("mfl_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = "cd " + work_dir().string() + " && " + MFL_CLI_BIN +
                          " " + args + " >cli_stdout.txt 2>cli_stderr.txt";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string read_file(const std::string& name) {
  std::ifstream in(work_dir() / name, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& name, const std::string& content) {
  std::ofstream out(work_dir() / name, std::ios::binary);
  out << content;
}

std::string digest(const std::string& name) {
  return mfl::file_digest((work_dir() / name).string());
}

long count_lines(const std::string& text) {
  long n = 0;
  for (char c : text) {
    if (c == '\n') ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("flsa subcommand solves the two-point fixture") {
  write_file("vec.txt", "1\n3\n");
  REQUIRE(run("flsa --in vec.txt --lam1 0 --lam2 1 --out flsa_out.txt "
              "--manifest flsa_manifest.json") == 0);
  CHECK(read_file("flsa_out.txt") == "2\n2\n");
}

TEST_CASE("simulate produces the expected shape and is reproducible") {
  REQUIRE(run("simulate --seed 4 --out-data s1.csv --out-truth t1.csv "
              "--manifest m1.json") == 0);
  REQUIRE(run("simulate --seed 4 --out-data s2.csv --out-truth t2.csv "
              "--manifest m2.json") == 0);
  CHECK(digest("s1.csv") == digest("s2.csv"));
  CHECK(digest("t1.csv") == digest("t2.csv"));
  CHECK(count_lines(read_file("s1.csv")) == 1 + 50 * 15);
  // (Intercept) block + 30 predictors, 15 timepoints, one non-reference class
  CHECK(count_lines(read_file("t1.csv")) == 1 + 15 + 30 * 15);
}

TEST_CASE("fit emits the full coefficient grid and a trace") {
  REQUIRE(run("simulate --seed 9 --out-data bench.csv --out-truth btruth.csv "
              "--manifest bsim.json") == 0);
  REQUIRE(run("fit --data bench.csv --lam1 0.05 --lam2 0.25 "
              "--out-coeffs bench_coeffs.csv --out-trace bench_trace.csv "
              "--out-report bench_report.json --manifest bench_fit.json") == 0);
  CHECK(count_lines(read_file("bench_coeffs.csv")) == 1 + 15 + 30 * 15);
  const auto trace = read_file("bench_trace.csv");
  CHECK(trace.rfind("iteration,objective,step_size\n", 0) == 0);
  CHECK(count_lines(trace) >= 3);

  // byte-identical rerun through the manifest
  const auto before = digest("bench_coeffs.csv");
  REQUIRE(run("replay bench_fit.json") == 0);
  CHECK(digest("bench_coeffs.csv") == before);
}

TEST_CASE("a capped fit exits 3 but still writes outputs") {
  REQUIRE(run("fit --data bench.csv --lam1 0 --lam2 0 --max-iters 3 "
              "--eps 1e-12 --out-coeffs capped.csv --out-trace capped_trace.csv "
              "--manifest capped.json") == 3);
  CHECK(count_lines(read_file("capped_trace.csv")) == 1 + 1 + 3);
  CHECK(count_lines(read_file("capped.csv")) == 1 + 15 + 30 * 15);
}

TEST_CASE("predict with zero coefficients gives uniform class-1 calls") {
  std::ostringstream coeffs;
  coeffs << "predictor,class,time,value\n";
  for (int t = 1; t <= 2; ++t) coeffs << "(Intercept),u," << t << ",0\n";
  for (const char* pred : {"a", "b"}) {
    for (int t = 1; t <= 2; ++t) {
      coeffs << pred << ",u," << t << ",0\n";
    }
  }
  write_file("zero_coeffs.csv", coeffs.str());
  write_file("pred_data.csv",
             "id,time,y,a,b\n"
             "p,1,u,0.5,1\n"
             "p,2,v,0.25,-1\n"
             "q,1,v,-2,0\n"
             "q,2,u,3,2\n");
  REQUIRE(run("predict --data pred_data.csv --coeffs zero_coeffs.csv "
              "--classes u,v --out zero_pred.csv --manifest zp.json") == 0);
  const auto pred = read_file("zero_pred.csv");
  std::istringstream lines(pred);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "id,time,predicted,prob_u,prob_v");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    CHECK(line.find(",u,0.5,0.5") != std::string::npos);
  }
  CHECK(rows == 4);
}

TEST_CASE("cv is reproducible across reruns and thread counts") {
  REQUIRE(run("simulate --n 24 --t 4 --p 5 --seed 31 --out-data cvdata.csv "
              "--out-truth cvtruth.csv --manifest cvsim.json") == 0);
  REQUIRE(run("cv --data cvdata.csv --folds 3 --grid-n1 3 --grid-n2 2 "
              "--seed 11 --threads 1 --out-table tab1.csv --out-chosen ch1.json "
              "--out-coeffs cf1.csv --manifest cv1.json") == 0);
  REQUIRE(run("cv --data cvdata.csv --folds 3 --grid-n1 3 --grid-n2 2 "
              "--seed 11 --threads 2 --out-table tab2.csv --out-chosen ch2.json "
              "--out-coeffs cf2.csv --manifest cv2.json") == 0);
  CHECK(digest("tab1.csv") == digest("tab2.csv"));
  CHECK(digest("ch1.json") == digest("ch2.json"));
  CHECK(digest("cf1.csv") == digest("cf2.csv"));

  // thread count via the environment variable behaves the same way
  const std::string env_cmd =
      "cd " + work_dir().string() + " && MFL_THREADS=2 " + MFL_CLI_BIN +
      " cv --data cvdata.csv --folds 3 --grid-n1 3 --grid-n2 2 --seed 11"
      " --out-table tab_env.csv --out-chosen ch_env.json --out-coeffs"
      " cf_env.csv --manifest cv_env.json >/dev/null 2>&1";
  REQUIRE(std::system(env_cmd.c_str()) == 0);
  CHECK(digest("tab_env.csv") == digest("tab1.csv"));

  // inputs are never mutated
  const auto before = digest("cvdata.csv");
  REQUIRE(run("cv --data cvdata.csv --folds 3 --grid-n1 2 --grid-n2 2 "
              "--seed 12 --out-table tab3.csv --out-chosen ch3.json "
              "--out-coeffs cf3.csv --manifest cv3.json") == 0);
  CHECK(digest("cvdata.csv") == before);
}

TEST_CASE("one-standard-error rule never chooses more blocks than cv-min") {
  REQUIRE(run("cv --data cvdata.csv --folds 3 --grid-n1 3 --grid-n2 2 "
              "--seed 11 --rule cv_min --out-table t_min.csv "
              "--out-chosen c_min.json --out-coeffs f_min.csv "
              "--manifest m_min.json") == 0);
  REQUIRE(run("cv --data cvdata.csv --folds 3 --grid-n1 3 --grid-n2 2 "
              "--seed 11 --rule cv_one_se --out-table t_1se.csv "
              "--out-chosen c_1se.json --out-coeffs f_1se.csv "
              "--manifest m_1se.json") == 0);
  auto df_of = [&](const std::string& name) {
    const auto text = read_file(name);
    const auto pos = text.find("\"df\": ");
    REQUIRE(pos != std::string::npos);
    return std::stol(text.substr(pos + 6));
  };
  CHECK(df_of("c_1se.json") <= df_of("c_min.json"));
}

TEST_CASE("importance runs from the command line") {
  REQUIRE(run("importance --data cvdata.csv --replicates 2 --fraction 0.8 "
              "--seed 2 --grid-n1 2 --grid-n2 2 --folds 2 "
              "--out imp.csv --manifest imp.json") == 0);
  const auto csv = read_file("imp.csv");
  CHECK(csv.rfind("predictor,class,importance,relative_importance\n", 0) == 0);
  CHECK(count_lines(csv) == 1 + 5);
}

TEST_CASE("error paths map to the documented exit codes") {
  CHECK(run("fit --data does_not_exist.csv --lam1 1 --lam2 1 "
            "--manifest e1.json") == 1);
  CHECK(run("fit --data cvdata.csv --lam1 1") == 2);  // missing --lam2
  CHECK(run("nonsense") == 2);

  // a fold that loses a class entirely
  write_file("onesided.csv",
             "id,time,y,v\n"
             "a,1,x,0.5\n"
             "b,1,x,0.25\n"
             "c,1,x,-1\n"
             "d,1,x,2\n"
             "e,1,x,0.125\n"
             "f,1,y,-0.5\n");
  CHECK(run("cv --data onesided.csv --folds 3 --grid-n1 2 --grid-n2 2 --seed 1 "
            "--manifest e2.json") == 5);

  // backtracking budget exhausted
  CHECK(run("fit --data cvdata.csv --lam1 0.01 --lam2 0.01 --tau0 1e9 "
            "--gamma 0.999 --max-backtracks 2 --manifest e3.json") == 4);
}

TEST_CASE("manifests record inputs, outputs, and the exact argv") {
  const auto manifest = read_file("bench_fit.json");
  CHECK(manifest.find("\"command\": \"fit\"") != std::string::npos);
  CHECK(manifest.find("bench.csv") != std::string::npos);
  CHECK(manifest.find("bench_coeffs.csv") != std::string::npos);
  CHECK(manifest.find("\"argv\"") != std::string::npos);
  CHECK(manifest.find("\"wall_time_s\"") != std::string::npos);
}
