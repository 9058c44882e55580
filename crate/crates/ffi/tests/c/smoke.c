#include <math.h>
#include <stdio.h>
#include <string.h>

#include "ginoe.h"

#define CHECK(cond)                                              \
  do {                                                           \
    if (!(cond)) {                                               \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      return 1;                                                  \
    }                                                            \
  } while (0)

int main(void) {
  GinoeContext *ctx = NULL;
  GinoeValue *v = NULL;
  char buf[128];

  CHECK(ginoe_context_new(128, &ctx) == GINOE_STATUS_OK);

  CHECK(ginoe_m0(ctx, 4, &v) == GINOE_STATUS_OK);
  CHECK(fabs(ginoe_value_mid(v, GINOE_PART_REAL) - 1.375 * sqrt(2.0)) < 1e-15);
  CHECK(ginoe_value_err(v) < 1e-35);
  ginoe_value_exact(v, buf, sizeof buf);
  CHECK(strcmp(buf, "0 + 11/8*sqrt(2)") == 0);
  ginoe_value_decimal(v, GINOE_PART_REAL, buf, sizeof buf);
  CHECK(strncmp(buf, "1.94454364826300", 16) == 0);
  ginoe_value_free(v);

  CHECK(ginoe_stieltjes(ctx, 2, 1.0, 0.0, &v) == GINOE_STATUS_DOMAIN);
  CHECK(strlen(ginoe_last_error()) > 0);
  CHECK(ginoe_m0(NULL, 4, &v) == GINOE_STATUS_INVALID_ARGUMENT);

  ginoe_context_free(ctx);
  printf("ok %s\n", ginoe_version());
  return 0;
}
