// End-to-end tests driving the usmopt binary (path injected by the build).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "usm/cmx_io.hpp"

namespace {

int run_cmd(const std::string& args) {
  std::string cmd = std::string(USMOPT_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Row {
  int trial, iteration;
  double cost, grad_norm, elapsed_s;
};

std::vector<Row> read_convergence(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    Row r;
    std::istringstream ss(line);
    char c;
    ss >> r.trial >> c >> r.iteration >> c >> r.cost >> c >> r.grad_norm >> c >>
        r.elapsed_s;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TEST_CASE("gen writes channels with the right shapes, deterministically") {
  REQUIRE(run_cmd("gen --seed 1 --out /tmp/usmcli_gen_a") == 0);
  usm::CMatrix h_d = usm::read_cmatrix("/tmp/usmcli_gen_a/h_d.cmx");
  usm::CMatrix f = usm::read_cmatrix("/tmp/usmcli_gen_a/f.cmx");
  usm::CMatrix g = usm::read_cmatrix("/tmp/usmcli_gen_a/g.cmx");
  CHECK(h_d.rows() == 2);
  CHECK(h_d.cols() == 2);
  CHECK(f.rows() == 2);
  CHECK(f.cols() == 16);
  CHECK(g.rows() == 2);
  CHECK(g.cols() == 16);

  REQUIRE(run_cmd("gen --seed 1 --out /tmp/usmcli_gen_b") == 0);
  for (const char* name : {"h_d.cmx", "f.cmx", "g.cmx", "meta.txt"})
    CHECK(slurp(std::string("/tmp/usmcli_gen_a/") + name) ==
          slurp(std::string("/tmp/usmcli_gen_b/") + name));
}

TEST_CASE("gen --blocked records the steep direct-link exponent") {
  REQUIRE(run_cmd("gen --blocked --out /tmp/usmcli_gen_blk") == 0);
  std::string meta = slurp("/tmp/usmcli_gen_blk/meta.txt");
  CHECK(meta.find("alpha_direct=8") != std::string::npos);
}

TEST_CASE("run produces monotone PO traces and a summary") {
  REQUIRE(run_cmd("run --cost sumgain --method po --rank low --m 16 "
                  "--trials 3 --eps 1e-9 --eps-relative "
                  "--out /tmp/usmcli_run_po") == 0);
  auto rows = read_convergence("/tmp/usmcli_run_po/convergence.csv");
  REQUIRE(!rows.empty());
  std::map<int, double> last;
  std::map<int, int> last_iter;
  for (const auto& r : rows) {
    if (last.count(r.trial)) {
      CHECK(r.cost - last[r.trial] >= -1e-12);
      CHECK(r.iteration == last_iter[r.trial] + 1);
    } else {
      CHECK(r.iteration == 1);
    }
    last[r.trial] = r.cost;
    last_iter[r.trial] = r.iteration;
  }
  CHECK(last.size() == 3);
  CHECK(slurp("/tmp/usmcli_run_po/summary.csv").find("po-low") !=
        std::string::npos);
}

TEST_CASE("run with --max-iters 1 emits one iteration per trial") {
  REQUIRE(run_cmd("run --cost rate --method ls --rank full --m 8 --trials 2 "
                  "--max-iters 1 --out /tmp/usmcli_run_one") == 0);
  auto rows = read_convergence("/tmp/usmcli_run_one/convergence.csv");
  CHECK(rows.size() == 2);
  for (const auto& r : rows) CHECK(r.iteration == 1);
}

TEST_CASE("mse run minimizes along every trace") {
  REQUIRE(run_cmd("run --cost mse --method po --rank low --m 16 --trials 2 "
                  "--eps 1e-9 --out /tmp/usmcli_run_mse") == 0);
  auto rows = read_convergence("/tmp/usmcli_run_mse/convergence.csv");
  REQUIRE(!rows.empty());
  std::map<int, double> first, last;
  for (const auto& r : rows) {
    if (!first.count(r.trial)) first[r.trial] = r.cost;
    last[r.trial] = r.cost;
  }
  for (const auto& [t, f0] : first) CHECK(last[t] <= f0 + 1e-12);
}

TEST_CASE("audit mode cross-checks the summary against the trace") {
  CHECK(run_cmd("run --cost sumgain --method po --rank low --m 16 --trials 2 "
                "--eps 1e-9 --eps-relative --audit "
                "--out /tmp/usmcli_run_audit") == 0);
}

// Wall-clock columns vary run to run; every other column must match exactly.
std::string drop_last_columns(const std::string& csv, int n_drop) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    for (int k = 0; k < n_drop; ++k) {
      auto pos = line.rfind(',');
      if (pos != std::string::npos) line.erase(pos);
    }
    out << line << '\n';
  }
  return out.str();
}

TEST_CASE("identical run invocations reproduce all non-timing columns") {
  REQUIRE(run_cmd("run --cost rate --method po --rank low --m 16 --trials 2 "
                  "--eps 1e-6 --out /tmp/usmcli_rep_a") == 0);
  REQUIRE(run_cmd("run --cost rate --method po --rank low --m 16 --trials 2 "
                  "--eps 1e-6 --out /tmp/usmcli_rep_b") == 0);
  CHECK(drop_last_columns(slurp("/tmp/usmcli_rep_a/convergence.csv"), 1) ==
        drop_last_columns(slurp("/tmp/usmcli_rep_b/convergence.csv"), 1));
  CHECK(drop_last_columns(slurp("/tmp/usmcli_rep_a/summary.csv"), 2) ==
        drop_last_columns(slurp("/tmp/usmcli_rep_b/summary.csv"), 2));
}

TEST_CASE("usage errors exit with code 1") {
  CHECK(run_cmd("run --cost nonsense") == 1);
  CHECK(run_cmd("frobnicate") == 1);
}

TEST_CASE("runtime failures exit with code 2") {
  CHECK(run_cmd("gen --out /dev/null/impossible") == 2);
}

TEST_CASE("verify suite passes") {
  CHECK(run_cmd("verify") == 0);
}
