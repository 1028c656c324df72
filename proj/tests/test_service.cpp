#include "doctest.h"
#include "service.hpp"
#include "smalldig/error.hpp"

using namespace smalldig;
using nlohmann::json;
namespace svc = smalldig::service;

TEST_CASE("command list")
{
  const auto& c = svc::commands();
  for (const char* name :
       {"digits", "kummer", "egrs", "blocks", "spectrum", "bump", "equidist", "lattice", "conditions", "search", "census"})
    CHECK(std::find(c.begin(), c.end(), name) != c.end());
  CHECK_THROWS_AS(svc::normalize("nope", json::object()), InvalidArgument);
}

TEST_CASE("normalization fills defaults and is idempotent")
{
  for (const auto& c : svc::commands()) {
    json p = json::object();
    if (c == "digits" || c == "kummer")
      p["n"] = "756";
    const json n = svc::normalize(c, p);
    CHECK(svc::normalize(c, n) == n);
  }
  const json e = svc::normalize("egrs", json::object());
  CHECK(e.at("spec1") == "3:1/2");
  CHECK(e.at("N") == 12);
  CHECK(e.at("policy") == "smallest-first");
  CHECK(svc::normalize("bump", {{"delta", "0.1"}}).at("delta") == "1/10");
  CHECK(svc::normalize("conditions", json::object()).at("precision_bits") == 256);
}

TEST_CASE("parameter errors")
{
  CHECK_THROWS_AS(svc::normalize("digits", json::object()), InvalidArgument);
  CHECK_THROWS_AS(svc::normalize("digits", {{"n", "756"}, {"typo", 1}}), InvalidArgument);
  CHECK_THROWS_AS(svc::normalize("digits", {{"n", "756"}, {"bases", "3:0.5"}}), InvalidArgument);
  CHECK_THROWS_AS(svc::normalize("kummer", {{"n", "7"}, {"primes", "3,9"}}), InvalidArgument);
  CHECK_THROWS_AS(svc::normalize("blocks", {{"ell", 3}}), InvalidArgument);
  CHECK_THROWS_AS(svc::normalize("search", {{"limit", "10^9"}, {"specs", "10"}, {"budget", 1000}}), BudgetExceeded);
  CHECK_THROWS_AS(svc::normalize("equidist", {{"task", "census"}, {"epsilon", "0"}}), InvalidArgument);
}

TEST_CASE("digits result")
{
  const auto r = svc::run("digits", {{"n", 756}, {"bases", "3,5,7"}});
  CHECK(r.status == svc::kOk);
  CHECK(r.summary == "(1001000)_3 (11011)_5 (2130)_7\n");
  CHECK(r.result.at("bases").size() == 3);
  CHECK(r.csv.rfind("base,kappa,rendered,total_digits,large_digits\n", 0) == 0);
}

TEST_CASE("runs are deterministic")
{
  const json p{{"specs", "3,5"}, {"limit", 300000}, {"threads", 3}};
  const auto a = svc::run("search", p), b = svc::run("search", p);
  CHECK(a.result == b.result);
  CHECK(a.csv == b.csv);
}

TEST_CASE("budget status on a failed repair")
{
  const auto r = svc::run("egrs", {{"spec1", "3:2/3"}, {"spec2", "5:2/5"}, {"N", 40}, {"budget", 3}});
  const bool exhausted = r.result.at("nodes_expanded").get<std::uint64_t>() >= 3;
  if (!r.result.at("success").get<bool>())
    CHECK((r.status == svc::kBudget) == exhausted);
}

TEST_CASE("threshold mode")
{
  const auto r = svc::run("conditions", {{"condition", "theorem"}, {"threshold", true}, {"r", 3}});
  CHECK(r.result.at("min_power_of_ten") == 94);
}
