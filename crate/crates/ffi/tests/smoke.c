#include <stdio.h>
#include "casimir.h"

int main(void) {
    CasimirConfig *cfg = NULL;
    CasimirResult *res = NULL;
    CasimirClosedForm cf;
    if (casimir_config_preset("hydrogen", &cfg) != CASIMIR_STATUS_OK) {
        fprintf(stderr, "%s\n", casimir_last_error());
        return 1;
    }
    if (casimir_evaluate(cfg, &res) != CASIMIR_STATUS_OK ||
        casimir_result_closed_form(res, &cf) != CASIMIR_STATUS_OK) {
        fprintf(stderr, "%s\n", casimir_last_error());
        return 1;
    }
    printf("k1_over_classical %.6f\n", cf.k1_over_classical);
    if (casimir_config_preset("helium", &cfg) != CASIMIR_STATUS_UNKNOWN_PRESET) {
        return 1;
    }
    casimir_result_free(res);
    casimir_config_free(cfg);
    return 0;
}
