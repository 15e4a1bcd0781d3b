#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include <json.hpp>

#include "fredsve.h"

using nlohmann::json;

namespace {

// Takes ownership of the C string and frees it after conversion.
std::string take(char* s) {
  REQUIRE(s != nullptr);
  std::string out(s);
  fredsve_string_free(s);
  return out;
}

struct SessionGuard {
  fredsve_session* s = nullptr;
  ~SessionGuard() { fredsve_session_close(s); }
};

}  // namespace

TEST_CASE("version, problem list, and error reporting") {
  CHECK(std::strlen(fredsve_version()) >= 5);

  char* names_json = nullptr;
  REQUIRE(fredsve_problem_list(&names_json) == FREDSVE_OK);
  json names = json::parse(take(names_json));
  REQUIRE(names.is_array());
  CHECK(names.size() == 6);
  CHECK(std::find(names.begin(), names.end(), "baart") != names.end());
  CHECK(std::find(names.begin(), names.end(), "blur2d") != names.end());

  CHECK(fredsve_problem_list(nullptr) == FREDSVE_ERR_INVALID_ARGUMENT);

  fredsve_session* s = nullptr;
  CHECK(fredsve_session_open("nosuch", 0, 0, &s) == FREDSVE_ERR_UNKNOWN_PROBLEM);
  CHECK(s == nullptr);
  CHECK(std::string(fredsve_last_error()).find("nosuch") != std::string::npos);

  CHECK(fredsve_session_open(nullptr, 0, 0, &s) == FREDSVE_ERR_INVALID_ARGUMENT);
  CHECK(fredsve_session_open("baart", -1.0, 0, &s) == FREDSVE_ERR_INVALID_ARGUMENT);

  fredsve_string_free(nullptr);
  fredsve_session_close(nullptr);
}

TEST_CASE("session lifecycle: info, solve, oracle comparison") {
  SessionGuard g;
  REQUIRE(fredsve_session_open("baart", 0, 0, &g.s) == FREDSVE_OK);
  REQUIRE(g.s != nullptr);

  char* info_json = nullptr;
  REQUIRE(fredsve_session_info(g.s, &info_json) == FREDSVE_OK);
  json info = json::parse(take(info_json));
  CHECK(info["problem"] == "baart");
  CHECK(info["is_2d"] == false);
  int rank = info["rank"].get<int>();
  CHECK(rank >= 5);
  auto sigmas = info["sigmas"].get<std::vector<double>>();
  REQUIRE(int(sigmas.size()) == rank);
  for (size_t i = 1; i < sigmas.size(); ++i) CHECK(sigmas[i] <= sigmas[i - 1]);
  CHECK(info.count("rank2") == 0);

  char* out = nullptr;
  REQUIRE(fredsve_solve(g.s, R"({"method":"tsve","alpha":1e-2,"seed":3})", &out) ==
          FREDSVE_OK);
  json ts = json::parse(take(out));
  CHECK(ts["problem"] == "baart");
  double re = ts["re"].get<double>();
  CHECK(re > 0.0);
  CHECK(re < 1.0);
  double param = ts["param"].get<double>();
  CHECK(param == std::floor(param));
  CHECK(ts["bound_lhs"].get<double>() <= ts["bound_rhs"].get<double>());
  CHECK(ts["delta"].get<double>() > 0.0);
  CHECK(ts.count("error") == 0);

  REQUIRE(fredsve_solve(g.s, R"({"method":"tikhonov","alpha":1e-2,"seed":3})",
                        &out) == FREDSVE_OK);
  json tk = json::parse(take(out));
  CHECK(tk["param"].get<double>() > 0.0);
  CHECK(tk["bound_lhs"].is_null());
  CHECK(tk["bound_rhs"].is_null());
  CHECK(tk["residual"].get<double>() <= tk["delta"].get<double>() * (1 + 1e-9));

  CHECK(fredsve_solve(g.s, R"({"alpha":1e-2})", &out) == FREDSVE_ERR_CONFIG);
  CHECK(fredsve_solve(g.s, R"({"method":"tsve","alpha":0})", &out) ==
        FREDSVE_ERR_CONFIG);
  CHECK(fredsve_solve(g.s, R"({"method":"tsve","alpha":1e-2,"bogus":1})", &out) ==
        FREDSVE_ERR_CONFIG);
  CHECK(fredsve_solve(g.s, "{not json", &out) == FREDSVE_ERR_INVALID_ARGUMENT);
  CHECK(fredsve_solve(nullptr, "{}", &out) == FREDSVE_ERR_INVALID_ARGUMENT);

  char* csv = nullptr;
  REQUIRE(fredsve_oracle_csv(g.s, 300, &csv) == FREDSVE_OK);
  std::string table = take(csv);
  CHECK(table.rfind("index,sigma,sigma_discrete,rel_gap", 0) == 0);
  std::istringstream lines(table);
  std::string line;
  std::getline(lines, line);
  int checked = 0;
  while (std::getline(lines, line) && checked < 5) {
    double idx, sig, sigd, gap;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &idx, &sig, &sigd, &gap) == 4);
    CHECK(gap <= 1e-6);
    ++checked;
  }
  CHECK(checked == 5);
}

TEST_CASE("two-axis session exposes both expansions") {
  SessionGuard g;
  REQUIRE(fredsve_session_open("blur2d", 0, 0, &g.s) == FREDSVE_OK);
  char* info_json = nullptr;
  REQUIRE(fredsve_session_info(g.s, &info_json) == FREDSVE_OK);
  json info = json::parse(take(info_json));
  CHECK(info["is_2d"] == true);
  CHECK(info["rank"].get<int>() >= 3);
  CHECK(info["rank2"].get<int>() >= 3);

  char* out = nullptr;
  REQUIRE(fredsve_solve(g.s, R"({"method":"tsve","alpha":1e-2,"eta":10})", &out) ==
          FREDSVE_OK);
  json r = json::parse(take(out));
  CHECK(r["re"].get<double>() < 1.0);
  CHECK(r["bound_lhs"].is_null());

  char* csv = nullptr;
  CHECK(fredsve_oracle_csv(g.s, 100, &csv) == FREDSVE_ERR_CONFIG);
}

TEST_CASE("bench, bound, and blur runners speak JSON and CSV") {
  const char* cfg =
      R"({"problems":["baart"],"alphas":[1e-2],"methods":["tsve"],"seeds":[1,2,3]})";
  char* csv = nullptr;
  char* summary = nullptr;
  REQUIRE(fredsve_bench_run(cfg, &csv, &summary) == FREDSVE_OK);
  std::string table = take(csv);
  CHECK(std::count(table.begin(), table.end(), '\n') == 4);
  json sum = json::parse(take(summary));
  REQUIRE(sum["cells"].size() == 1);
  CHECK(sum["cells"][0]["runs"] == 3);
  CHECK(sum["cells"][0]["errors"] == 0);
  CHECK(sum["cells"][0]["median_re"].get<double>() < 1.0);

  CHECK(fredsve_bench_run(R"({"seeds":[]})", &csv, nullptr) == FREDSVE_ERR_CONFIG);
  CHECK(std::string(fredsve_last_error()).find("seeds") != std::string::npos);
  CHECK(fredsve_bench_run(R"({"surprise":1})", &csv, nullptr) == FREDSVE_ERR_CONFIG);
  CHECK(fredsve_bench_run("[1,2]", &csv, nullptr) == FREDSVE_ERR_CONFIG);

  REQUIRE(fredsve_bound_run(R"({"problems":["wing"],"seeds":[1,2,3]})", &csv) ==
          FREDSVE_OK);
  std::string bound = take(csv);
  CHECK(bound.rfind("problem,lhs,rhs\n", 0) == 0);
  double lhs = 0, rhs = 0;
  REQUIRE(std::sscanf(bound.c_str() + bound.find('\n') + 1, "wing,%lf,%lf", &lhs,
                      &rhs) == 2);
  CHECK(lhs <= rhs);

  char* blur = nullptr;
  REQUIRE(fredsve_blur2d_run(R"({"problems":["blur2d"],"alphas":[1e-2],"eta":10})", 9,
                             &blur) == FREDSVE_OK);
  json b = json::parse(take(blur));
  CHECK(b["tsve"]["re"].get<double>() < 1.0);
  CHECK(b["tikhonov"]["re"].get<double>() < 1.0);
}
