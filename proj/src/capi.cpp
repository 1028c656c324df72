#include "smalldig/smalldig.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "service.hpp"
#include "smalldig/digits.hpp"
#include "smalldig/error.hpp"
#include "smalldig/kummer.hpp"

struct sd_result {
  std::string json;
  std::string csv;
  std::string summary;
  sd_status status = SD_OK;
};

namespace {

thread_local std::string g_last_error;

char* dup(const std::string& s)
{
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p)
    std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <class F>
sd_status guarded(F&& f)
{
  g_last_error.clear();
  try {
    return f();
  } catch (const smalldig::InvalidArgument& e) {
    g_last_error = e.what();
    return SD_ERR_INVALID;
  } catch (const nlohmann::json::exception& e) {
    g_last_error = std::string("bad JSON: ") + e.what();
    return SD_ERR_INVALID;
  } catch (const smalldig::BudgetExceeded& e) {
    g_last_error = e.what();
    return SD_ERR_BUDGET;
  } catch (const smalldig::Indeterminate& e) {
    g_last_error = e.what();
    return SD_ERR_INDETERMINATE;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SD_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SD_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SD_ERR_INTERNAL;
  }
}

nlohmann::json parse_params(const char* text)
{
  if (!text || !*text)
    return nlohmann::json::object();
  return nlohmann::json::parse(text);
}

} // namespace

extern "C" {

const char* sd_version(void) { return SMALLDIG_VERSION; }

const char* sd_status_name(sd_status s)
{
  switch (s) {
  case SD_OK: return "ok";
  case SD_ERR_INTERNAL: return "internal error";
  case SD_ERR_INVALID: return "invalid argument";
  case SD_ERR_BUDGET: return "budget exceeded";
  case SD_ERR_INDETERMINATE: return "indeterminate";
  }
  return "unknown status";
}

const char* sd_last_error(void) { return g_last_error.c_str(); }

const char* sd_commands(void)
{
  static const std::string names = [] {
    std::string s;
    for (const auto& c : smalldig::service::commands())
      s += (s.empty() ? "" : ",") + c;
    return s;
  }();
  return names.c_str();
}

sd_status sd_validate(const char* command, const char* params_json, char** normalized_json)
{
  if (normalized_json)
    *normalized_json = nullptr;
  return guarded([&] {
    if (!command)
      smalldig::fail_invalid("command is NULL");
    const auto n = smalldig::service::normalize(command, parse_params(params_json));
    if (normalized_json)
      *normalized_json = dup(n.dump());
    return SD_OK;
  });
}

sd_status sd_run(const char* command, const char* params_json, sd_result** out)
{
  if (!out) {
    g_last_error = "result pointer is NULL";
    return SD_ERR_INVALID;
  }
  *out = nullptr;
  return guarded([&] {
    if (!command)
      smalldig::fail_invalid("command is NULL");
    auto res = smalldig::service::run(command, parse_params(params_json));
    auto* r = new sd_result;
    r->json = res.result.dump(2);
    r->csv = std::move(res.csv);
    r->summary = std::move(res.summary);
    r->status = static_cast<sd_status>(res.status);
    *out = r;
    if (r->status != SD_OK)
      g_last_error = std::string("result is ") + sd_status_name(r->status);
    return r->status;
  });
}

const char* sd_result_json(const sd_result* r) { return r ? r->json.c_str() : ""; }
const char* sd_result_csv(const sd_result* r) { return r ? r->csv.c_str() : ""; }
const char* sd_result_summary(const sd_result* r) { return r ? r->summary.c_str() : ""; }
sd_status sd_result_status(const sd_result* r) { return r ? r->status : SD_ERR_INVALID; }
void sd_result_free(sd_result* r) { delete r; }

void sd_string_free(char* s) { std::free(s); }

sd_status sd_render_digits(const char* n, uint64_t base, char** rendered)
{
  if (rendered)
    *rendered = nullptr;
  return guarded([&] {
    if (!n || !rendered)
      smalldig::fail_invalid("NULL argument");
    if (base < 2)
      smalldig::fail_invalid("base must be >= 2");
    const auto v = smalldig::parse_bigint(n);
    if (v < 0)
      smalldig::fail_invalid("n must be non-negative");
    *rendered = dup(smalldig::to_digits(v, base).render());
    return SD_OK;
  });
}

sd_status sd_central_binom_valuation(const char* n, uint64_t p, uint64_t* valuation)
{
  return guarded([&] {
    if (!n || !valuation)
      smalldig::fail_invalid("NULL argument");
    *valuation = smalldig::central_binom_valuation(smalldig::parse_bigint(n), p);
    return SD_OK;
  });
}

} // extern "C"
