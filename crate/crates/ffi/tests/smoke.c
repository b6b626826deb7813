#include <stdio.h>
#include <string.h>

#include "teamlogic.h"

#define CHECK(cond)                                          \
  do {                                                       \
    if (!(cond)) {                                           \
      fprintf(stderr, "line %d: %s\n", __LINE__, #cond);     \
      return 1;                                              \
    }                                                        \
  } while (0)

int main(void) {
  TlRegistry *reg = tl_registry_new();
  TlStructure *m = NULL;
  TlTeam *x = NULL;
  TlFormula *phi = NULL;
  bool out = false;

  CHECK(tl_structure_parse("universe 2\nrel P/1 = {1}\n", &m) == TL_STATUS_OK);
  CHECK(tl_team_parse("vars x y\n0 0\n1 0\n", &x) == TL_STATUS_OK);
  CHECK(tl_formula_parse("dep(y)", TL_DIALECT_DQ, m, reg, &phi) == TL_STATUS_OK);
  CHECK(tl_eval_team(m, x, phi, reg, &out) == TL_STATUS_OK);
  CHECK(out);
  tl_formula_free(phi);

  CHECK(tl_formula_parse("P(x", TL_DIALECT_FO, m, reg, &phi) == TL_STATUS_SYNTAX);
  CHECK(strstr(tl_last_error(), "syntax error") != NULL);

  CHECK(tl_formula_parse("Ef f/1. A x. P(f(x))", TL_DIALECT_ESO, NULL, reg, &phi) == TL_STATUS_OK);
  char *dq = NULL;
  CHECK(tl_translate(phi, TL_TARGET_DQ, &dq) == TL_STATUS_OK);
  CHECK(strstr(dq, "dep(") != NULL);
  printf("%s\n", dq);
  tl_string_free(dq);
  tl_formula_free(phi);

  tl_team_free(x);
  tl_structure_free(m);
  tl_registry_free(reg);
  return 0;
}
