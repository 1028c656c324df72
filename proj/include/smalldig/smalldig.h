#ifndef SMALLDIG_H
#define SMALLDIG_H

/* C interface to the smalldig library. Every command takes a JSON object of
   parameters and yields a result handle holding a JSON document, a CSV table
   and a plain-text summary. Strings returned through char** are owned by the
   caller and released with sd_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(SD_BUILDING_LIBRARY)
#define SD_API __attribute__((visibility("default")))
#else
#define SD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sd_status {
  SD_OK = 0,
  SD_ERR_INTERNAL = 1,
  SD_ERR_INVALID = 2,
  SD_ERR_BUDGET = 3,
  SD_ERR_INDETERMINATE = 4
} sd_status;

typedef struct sd_result sd_result;

SD_API const char* sd_version(void);
SD_API const char* sd_status_name(sd_status s);

/* Message for the last failing call on this thread ("" if none). */
SD_API const char* sd_last_error(void);

/* Comma-separated command names. */
SD_API const char* sd_commands(void);

/* Validates parameters and fills in defaults without computing anything. */
SD_API sd_status sd_validate(const char* command, const char* params_json, char** normalized_json);

/* Runs a command. On SD_OK, SD_ERR_BUDGET (partial result) and
   SD_ERR_INDETERMINATE the handle is set; on other errors *out is NULL. */
SD_API sd_status sd_run(const char* command, const char* params_json, sd_result** out);

SD_API const char* sd_result_json(const sd_result* r);
SD_API const char* sd_result_csv(const sd_result* r);
SD_API const char* sd_result_summary(const sd_result* r);
SD_API sd_status sd_result_status(const sd_result* r);
SD_API void sd_result_free(sd_result* r);

SD_API void sd_string_free(char* s);

/* Convenience entry points. n is a decimal string. */
SD_API sd_status sd_render_digits(const char* n, uint64_t base, char** rendered);
SD_API sd_status sd_central_binom_valuation(const char* n, uint64_t p, uint64_t* valuation);

#ifdef __cplusplus
}
#endif

#endif
