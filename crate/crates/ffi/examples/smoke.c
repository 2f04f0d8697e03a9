#include <stdio.h>
#include "degenfrac.h"

int main(void) {
    double re, im;
    if (dfrc_ml_eval(1.0, 1.0, 1.0, 0.0, &re, &im) != DFRC_OK) return 1;
    printf("E_1(1) = %.15f\n", re);

    DfrcModel *model = NULL;
    if (dfrc_model_new("rosby", &model) != DFRC_ERR_UNKNOWN_MODEL) return 2;
    char msg[256];
    dfrc_last_error_message(msg, sizeof msg);
    printf("error: %s\n", msg);

    if (dfrc_model_new("rossby", &model) != DFRC_OK) return 3;
    size_t m, n, points;
    dfrc_model_dims(model, &m, &n, &points);
    printf("m=%zu n=%zu points=%zu\n", m, n, points);
    dfrc_model_free(model);
    return 0;
}
