#include <math.h>
#include <stdio.h>
#include "bivar.h"

int main(void) {
    BivarPairing *p = NULL;
    BivarFunction *f = NULL;
    BivarEstimate *e = NULL;
    double k[2] = {sqrt(2.0), 0.0};

    if (bivar_pairing_new("euclidean-modulus", &p) != BIVAR_ERROR_OK) return 1;
    if (bivar_function_parse("linear_ii", 0.0, 1.0, &f) != BIVAR_ERROR_OK) return 2;
    if (bivar_estimate(f, p, k, 1, NULL, &e) != BIVAR_ERROR_OK) return 3;

    BivarVariationStatus status;
    bivar_estimate_status(e, &status);
    double v = bivar_estimate_value(e);
    printf("%.12f %d\n", v, (int)status);

    BivarFunction *bad = NULL;
    BivarError err = bivar_function_parse("(", 0.0, 1.0, &bad);
    printf("%d %s\n", (int)err, bivar_last_error_message());

    bivar_estimate_free(e);
    bivar_function_free(f);
    bivar_pairing_free(p);
    return (fabs(v - 2.0) < 1e-9 && status == BIVAR_VARIATION_STATUS_CONVERGED && err == BIVAR_ERROR_SYNTAX) ? 0 : 4;
}
