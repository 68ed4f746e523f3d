/* Compiled as plain C99: the public header must work without a C++ compiler. */
#include <markcorr/markcorr.h>

#include <math.h>
#include <stdio.h>

int main(void) {
    const double window[4] = {0.0, 1.0, 0.0, 1.0};
    const double x[] = {0.2, 0.8, 0.5, 0.3, 0.6};
    const double y[] = {0.3, 0.6, 0.9, 0.4, 0.2};
    const double m[] = {1.0, 2.0, 3.0, 4.0, 5.0};

    mcf_pattern* pattern = NULL;
    if (mcf_pattern_create(window, x, y, m, 5, &pattern) != MCF_OK) {
        fprintf(stderr, "create: %s\n", mcf_last_error());
        return 1;
    }
    if (mcf_pattern_size(pattern) != 5) return 1;

    double mean = 0.0, variance = 0.0;
    if (mcf_pattern_mark_summary(pattern, &mean, &variance) != MCF_OK) return 1;
    if (fabs(mean - 3.0) > 1e-12 || fabs(variance - 2.5) > 1e-12) return 1;

    mcf_rgrid_spec rgrid = {0.5, 5, 0.12};
    mcf_curve* curve = NULL;
    if (mcf_curve_kappa(pattern, NULL, MCF_TF_MM, MCF_FORM_DENSITY, MCF_EDGE_TRANSLATION, &rgrid,
                        &curve) != MCF_OK) {
        fprintf(stderr, "kappa: %s\n", mcf_last_error());
        return 1;
    }
    if (mcf_curve_size(curve) != 6) return 1;

    /* errors carry a message and a matching status */
    mcf_simulator* simulator = NULL;
    if (mcf_simulator_create("no-such-preset", &simulator) != MCF_ERR_INVALID) return 1;
    if (mcf_last_error()[0] == '\0') return 1;

    mcf_curve_free(curve);
    mcf_pattern_free(pattern);
    printf("c interface ok\n");
    return 0;
}
