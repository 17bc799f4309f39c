#include <math.h>
#include <stdio.h>
#include "lane_emden.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    LeRegime regime;
    CHECK(le_classify(-1.0, &regime) == LE_STATUS_OK);
    CHECK(regime == LE_REGIME_DC_FAMILY);

    LeRoots roots;
    CHECK(le_cardano_roots(-1.0, &roots) == LE_STATUS_OK);
    CHECK(fabs(roots.a + roots.b - roots.c) < 1e-14);

    LeSolution *sol = NULL;
    CHECK(le_solution_new(0.0, 1.0, LE_BRANCH_PLUS, &sol) == LE_STATUS_OK);
    LeSample s;
    CHECK(le_solution_eval(sol, 3.0, &s) == LE_STATUS_OK);
    CHECK(fabs(s.theta - 0.5) < 1e-15);
    le_solution_free(sol);

    sol = NULL;
    CHECK(le_solution_new(-3.0, 1.0, LE_BRANCH_PLUS, &sol) == LE_STATUS_NO_REAL_SOLUTION);
    CHECK(sol == NULL);
    CHECK(le_last_error() != NULL);

    double lambda, parity;
    CHECK(le_scaling_lambda(1.0, 1, &lambda, &parity) == LE_STATUS_OK);
    CHECK(lambda > 1.0 && parity == -1.0);

    printf("ok %s\n", le_version());
    return 0;
}
