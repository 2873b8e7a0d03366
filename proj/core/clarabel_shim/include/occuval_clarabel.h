#pragma once

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* minimize q'x s.t. Ax + s = b, s in zero^nzero x PSD(psd_sides...).
   A is m x n in compressed-column form. PSD slacks use the scaled upper
   triangle, column by column. info_out has 7 slots. Returns 0 on success. */
int occuval_clarabel_solve(size_t n, size_t m, const size_t* colptr,
                           const size_t* rowval, const double* nzval,
                           const double* b, const double* q, size_t nzero,
                           size_t npsd, const size_t* psd_sides, double tol_gap,
                           double tol_feas, uint32_t max_iter, int32_t verbose,
                           double* x_out, double* info_out);

#ifdef __cplusplus
}
#endif
