/* Compiled as C: the public header must be valid C. */
#include <string.h>

#include "smalldig/smalldig.h"

int c_render_756_base3(void)
{
  char* s = NULL;
  int ok = 0;
  if (sd_render_digits("756", 3, &s) == SD_OK)
    ok = strcmp(s, "(1001000)_3") == 0;
  sd_string_free(s);
  return ok;
}
