#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include "skewspec/skewspec.h"

namespace {

const std::string kConfigs = SKEWSPEC_CONFIG_DIR;

std::string take(char* s) {
  std::string out = s ? s : "";
  ss_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(ss_version()) == "0.1.0");
  CHECK(std::string(ss_status_name(SS_ERR_CONFIG)) == "config error");
}

TEST_CASE("experiment handles") {
  ss_experiment* exp = nullptr;
  REQUIRE(ss_experiment_load((kConfigs + "/su2.cfg").c_str(), &exp) == SS_OK);
  CHECK(ss_experiment_block_count(exp) == 3);
  char* label = nullptr;
  REQUIRE(ss_experiment_block_label(exp, 2, &label) == SS_OK);
  CHECK(take(label) == "n=3/j=0");
  CHECK(ss_experiment_block_label(exp, 3, &label) == SS_ERR_NOT_FOUND);
  CHECK(std::string(ss_last_error()).find("out of range") != std::string::npos);

  char* text = nullptr;
  REQUIRE(ss_experiment_serialize(exp, &text) == SS_OK);
  ss_experiment* copy = nullptr;
  const std::string serialized = take(text);
  REQUIRE(ss_experiment_parse(serialized.c_str(), &copy) == SS_OK);
  char* h1 = nullptr;
  char* h2 = nullptr;
  ss_experiment_hash(exp, &h1);
  ss_experiment_hash(copy, &h2);
  CHECK(take(h1) == take(h2));
  ss_experiment_free(copy);

  CHECK(ss_experiment_set_grid(exp, 0) == SS_ERR_INVALID_ARGUMENT);
  REQUIRE(ss_experiment_set_grid(exp, 64) == SS_OK);
  char* summary = nullptr;
  char* report = nullptr;
  REQUIRE(ss_analyze(exp, nullptr, &summary, &report) == SS_OK);
  const std::string s = take(summary);
  const std::string r = take(report);
  CHECK(s.find("\"config_hash\"") != std::string::npos);
  CHECK(r.find("\"schema_version\": 1") != std::string::npos);

  const size_t Ns[] = {1, 16};
  char* table = nullptr;
  REQUIRE(ss_degree_table(exp, "n=3", Ns, 2, &table) == SS_OK);
  CHECK(take(table).find("M_N_degree") != std::string::npos);
  CHECK(ss_degree_table(exp, "n=7", Ns, 2, &table) == SS_ERR_NOT_FOUND);
  ss_experiment_free(exp);
}

TEST_CASE("errors surface as status codes") {
  ss_experiment* exp = nullptr;
  CHECK(ss_experiment_parse("{\"base\": 3}", &exp) == SS_ERR_CONFIG);
  CHECK(exp == nullptr);
  CHECK(std::strlen(ss_last_error()) > 0);
  CHECK(ss_experiment_load("/nonexistent/x.cfg", &exp) == SS_ERR_IO);
  CHECK(ss_experiment_parse(nullptr, &exp) == SS_ERR_INVALID_ARGUMENT);
  CHECK(ss_analyze(nullptr, nullptr, nullptr, nullptr) == SS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("primitive operations") {
  const double a = 0.8;
  const double g[8] = {std::cos(a), std::sin(a), 0, 0, 0, 0, std::cos(a), -std::sin(a)};
  double out[2 * 16];
  REQUIRE(ss_su2_irrep(3, g, out, 32) == SS_OK);
  // Diagonal entry j is exp(i a (2j - 3)).
  for (int j = 0; j <= 3; ++j) {
    CHECK(out[2 * (5 * j)] == doctest::Approx(std::cos(a * (2 * j - 3))));
    CHECK(out[2 * (5 * j) + 1] == doctest::Approx(std::sin(a * (2 * j - 3))));
  }
  CHECK(ss_su2_irrep(3, g, out, 8) == SS_ERR_INVALID_ARGUMENT);
  const double bad[8] = {2, 0, 0, 0, 0, 0, 1, 0};
  CHECK(ss_su2_irrep(1, bad, out, 32) == SS_ERR_INVALID_ELEMENT);
  REQUIRE(ss_u2_irrep(1, 1, g, out, 32) == SS_OK);

  const double h[8] = {2, 0, 0, 1, 0, -1, 2, 0};
  double ev[2];
  REQUIRE(ss_hermitian_eigenvalues(2, h, ev) == SS_OK);
  CHECK(ev[0] == doctest::Approx(1.0));
  CHECK(ev[1] == doctest::Approx(3.0));
}

TEST_CASE("repcheck through the C interface") {
  int pass = 0;
  char* table = nullptr;
  REQUIRE(ss_repcheck(SS_GROUP_SU2, 3, 1000, 1, -1, &pass, &table) == SS_OK);
  CHECK(pass == 1);
  CHECK(take(table).find("peter_weyl") != std::string::npos);
}
