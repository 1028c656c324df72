#include <string>

#include "doctest.h"
#include "json.hpp"
#include "smalldig/smalldig.h"

extern "C" int c_render_756_base3(void);

TEST_CASE("header compiles as C")
{
  CHECK(c_render_756_base3() == 1);
}

TEST_CASE("version and names")
{
  CHECK(std::string(sd_version()).size() > 0);
  CHECK(std::string(sd_status_name(SD_ERR_BUDGET)) == "budget exceeded");
  CHECK(std::string(sd_commands()).find("census") != std::string::npos);
}

TEST_CASE("run and read a result")
{
  sd_result* r = nullptr;
  REQUIRE(sd_run("digits", R"({"n": "756", "bases": "3,5,7"})", &r) == SD_OK);
  REQUIRE(r != nullptr);
  CHECK(sd_result_status(r) == SD_OK);
  CHECK(std::string(sd_result_summary(r)) == "(1001000)_3 (11011)_5 (2130)_7\n");
  const auto j = nlohmann::json::parse(sd_result_json(r));
  CHECK(j.at("n") == "756");
  CHECK(std::string(sd_result_csv(r)).find("(2130)_7") != std::string::npos);
  sd_result_free(r);
}

TEST_CASE("errors set the status and message")
{
  sd_result* r = nullptr;
  CHECK(sd_run("digits", R"({"n": "abc"})", &r) == SD_ERR_INVALID);
  CHECK(r == nullptr);
  CHECK(std::string(sd_last_error()).find("not an integer") != std::string::npos);
  CHECK(sd_run("digits", "{not json", &r) == SD_ERR_INVALID);
  CHECK(sd_run("nope", "{}", &r) == SD_ERR_INVALID);
  CHECK(sd_run(nullptr, "{}", &r) == SD_ERR_INVALID);
  CHECK(sd_run("digits", "{}", nullptr) == SD_ERR_INVALID);
  CHECK(sd_run("search", R"({"specs": "10", "limit": "10^9", "budget": 100})", &r) == SD_ERR_BUDGET);
  CHECK(r == nullptr);
  sd_result_free(nullptr);
}

TEST_CASE("validation returns normalized parameters")
{
  char* out = nullptr;
  REQUIRE(sd_validate("egrs", "{}", &out) == SD_OK);
  const auto j = nlohmann::json::parse(out);
  CHECK(j.at("spec2") == "5:1/2");
  sd_string_free(out);
  CHECK(sd_validate("egrs", R"({"spec1": "3:0.5"})", &out) == SD_ERR_INVALID);
  CHECK(out == nullptr);
}

TEST_CASE("valuation entry point")
{
  std::uint64_t v = 99;
  CHECK(sd_central_binom_valuation("4", 5, &v) == SD_OK);
  CHECK(v == 1);
  CHECK(sd_central_binom_valuation("4", 4, &v) == SD_ERR_INVALID);
}
