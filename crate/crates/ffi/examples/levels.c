/* First plus and minus levels of a 2x2 operator. */
#include <math.h>
#include <stdio.h>

#include "gapspec.h"

int main(void) {
    double a[4] = {2.0, 1.0, 1.0, -2.0};
    struct GapOperator *op = NULL;
    struct GapProfile profile;
    struct GapLevel level;

    if (gap_operator_from_full(a, 2, 1, &op) != GAP_STATUS_OK ||
        gap_profile_compute(op, INFINITY, -INFINITY, &profile) != GAP_STATUS_OK) {
        fprintf(stderr, "%s\n", gap_last_error_message());
        return 1;
    }
    for (int side = 0; side < 2; side++) {
        if (gap_solve_level(op, &profile, 1, side, 1e-12, &level) != GAP_STATUS_OK) {
            fprintf(stderr, "%s\n", gap_last_error_message());
            gap_operator_free(op);
            return 1;
        }
        printf("%s %.15f\n", side == 0 ? "plus" : "minus", level.value);
    }
    gap_operator_free(op);
    return 0;
}
