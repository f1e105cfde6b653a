#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bslab/config.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace bslab;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(BSLAB_CLI_PATH) + " " + args + " > cli_stdout.txt 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

const char* kWellCfg = R"(
[potential]
profile = square_well
g_re = -5.0
shape = 1.0

[numerics]
quad_n = 80

[spectra]
estimate_r0 = false

[eigs]
rect_re_lo = -0.2
rect_re_hi = 0.2
rect_im_lo = 0.4
rect_im_hi = 2.0

[scan]
re_min = 0.5
re_max = 5
re_n = 10
im_min = 0.3
im_max = 0.3
im_n = 1
)";

}  // namespace

TEST_CASE("config round trip is the identity on canonical text") {
  RunConfig cfg = RunConfig::parse(kWellCfg);
  std::string canon = cfg.serialize();
  RunConfig cfg2 = RunConfig::parse(canon);
  CHECK(cfg2.serialize() == canon);
  CHECK(cfg2.params_hash() == cfg.params_hash());
  CHECK(cfg.get_num("potential", "g_re", 0.0) == -5.0);
  CHECK(cfg.get_int("scan", "re_n", 0) == 10);
}

TEST_CASE("config errors are reported") {
  CHECK_THROWS_AS(RunConfig::parse("key = 1\n"), ConfigError);          // no section
  CHECK_THROWS_AS(RunConfig::parse("[a\nk = 1\n"), ConfigError);        // malformed
  RunConfig c = RunConfig::parse("[a]\nk = x\n");
  CHECK_THROWS_AS(c.get_num("a", "k", 0.0), ConfigError);
}

TEST_CASE("scan emits the pinned column schema and is byte-identical on rerun") {
  spit("cli_case.cfg", kWellCfg);
  REQUIRE(run_cli("-c cli_case.cfg -o scan1.csv --set potential.g_re=0 scan") == 0);
  REQUIRE(run_cli("-c cli_case.cfg -o scan2.csv --set potential.g_re=0 scan") == 0);
  std::string s1 = slurp("scan1.csv"), s2 = slurp("scan2.csv");
  CHECK(s1 == s2);
  std::istringstream is(s1);
  std::string line;
  std::getline(is, line);
  CHECK(line.rfind("# params_hash=", 0) == 0);
  std::getline(is, line);
  CHECK(line ==
        "k_re,k_im,psi_re,psi_im,logabs_psi,logabs_D4,psi2_re,psi2_im,psi3_re,psi3_im,L,n,"
        "tail_bound,error");
  int rows = 0;
  bool psi_one = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    ++rows;
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');  // k_re
    std::getline(ls, cell, ',');  // k_im
    std::getline(ls, cell, ',');  // psi_re
    psi_one = psi_one && std::stod(cell) == 1.0;
    std::getline(ls, cell, ',');  // psi_im
    psi_one = psi_one && std::stod(cell) == 0.0;
  }
  CHECK(rows == 10);
  CHECK(psi_one);
}

TEST_CASE("eigs finds the well state and writes the zero report schema") {
  spit("cli_case.cfg", kWellCfg);
  REQUIRE(run_cli("-c cli_case.cfg -o eigs1.json eigs") == 0);
  nlohmann::json j = nlohmann::json::parse(slurp("eigs1.json"));
  REQUIRE(j["zeros"].size() == 1);
  auto z = j["zeros"][0];
  for (const char* key : {"k_re", "k_im", "mult", "lambda_re", "lambda_im", "residual"})
    CHECK(z.contains(key));
  CHECK(std::abs(z["k_im"].get<double>() - 0.9651) < 2e-3);
  CHECK(j["B"].size() >= 1);
  CHECK(j.contains("r0"));
  CHECK(j["unresolved"].empty());
  CHECK(j.contains("params_hash"));
}

TEST_CASE("eigs on the zero potential reports an empty array") {
  spit("cli_case.cfg", kWellCfg);
  REQUIRE(run_cli("-c cli_case.cfg -o eigs0.json --set potential.g_re=0 eigs") == 0);
  nlohmann::json j = nlohmann::json::parse(slurp("eigs0.json"));
  CHECK(j["zeros"].empty());
}

TEST_CASE("exit codes: config errors give 2") {
  CHECK(run_cli("-c does_not_exist.cfg info") == 2);
  spit("bad.cfg", "[potential]\nprofile = nosuch\n");
  CHECK(run_cli("-c bad.cfg info") == 2);
  spit("bad2.cfg", "[scan]\nre_n = 0\n");
  CHECK(run_cli("-c bad2.cfg scan") == 2);
}

TEST_CASE("verify exit code tracks the verdicts") {
  std::string cfg = std::string(kWellCfg) + R"(
[boundary]
T_max = 20
points = 256

[verify]
identities = tr12
tol_tr12 = 0.5
)";
  spit("verify_ok.cfg", cfg);
  REQUIRE(run_cli("-c verify_ok.cfg -o verify1.json verify") == 0);
  nlohmann::json j = nlohmann::json::parse(slurp("verify1.json"));
  REQUIRE(j.size() == 1);
  CHECK(j[0]["identity"] == "tr12");
  CHECK(j[0]["verdict"] == "pass");
  CHECK(j[0]["lhs"].size() == 2);
  CHECK(j[0]["rhs"].size() == 2);
  CHECK(j[0].contains("residual"));
  CHECK(j[0].contains("params"));
  // an absurd tolerance flips the verdict and the exit code
  CHECK(run_cli("-c verify_ok.cfg -o verify2.json --set verify.tol_tr12=1e-15 verify") == 1);
  nlohmann::json j2 = nlohmann::json::parse(slurp("verify2.json"));
  CHECK(j2[0]["verdict"] == "fail");
}

TEST_CASE("factorize rejects probes hugging the real axis") {
  std::string cfg = std::string(kWellCfg) + R"(
[boundary]
T_max = 20
points = 256

[factorize]
probe_re = 1.0
probe_im = 0.001
)";
  spit("fact_bad.cfg", cfg);
  CHECK(run_cli("-c fact_bad.cfg -o fact_bad.json factorize") == 2);
}

TEST_CASE("factorize emits the factorization schema") {
  std::string cfg = std::string(kWellCfg) + R"(
[boundary]
T_max = 20
points = 256

[factorize]
probe_count = 4
probe_radius = 2.5
)";
  spit("fact_ok.cfg", cfg);
  REQUIRE(run_cli("-c fact_ok.cfg -o fact_ok.json factorize") == 0);
  nlohmann::json j = nlohmann::json::parse(slurp("fact_ok.json"));
  CHECK(j.contains("K"));
  CHECK(j.contains("J"));
  CHECK(j["nu_total"] == 0.0);
  CHECK(j["residual_probes"].size() == 4);
  for (double K : j["K"].get<std::vector<double>>()) CHECK(K == 0.0);
}
