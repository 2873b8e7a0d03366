//! C ABI over Clarabel for conic problems of the form
//!   minimize q'x  s.t.  A x + s = b,  s in (zero cone) x (PSD triangle cones).

extern crate openblas_src;

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};
use std::slice;

/// info layout: status, primal objective, dual objective, iterations,
/// solve seconds, primal residual, dual residual.
pub const INFO_LEN: usize = 7;

fn status_code(s: SolverStatus) -> f64 {
    match s {
        SolverStatus::Solved => 0.0,
        SolverStatus::AlmostSolved => 1.0,
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => 2.0,
        SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => 3.0,
        SolverStatus::MaxIterations | SolverStatus::MaxTime => 4.0,
        _ => 5.0,
    }
}

/// # Safety
/// All pointers must reference arrays of the documented lengths.
#[no_mangle]
pub unsafe extern "C" fn occuval_clarabel_solve(
    n: usize,
    m: usize,
    colptr: *const usize,
    rowval: *const usize,
    nzval: *const f64,
    b: *const f64,
    q: *const f64,
    nzero: usize,
    npsd: usize,
    psd_sides: *const usize,
    tol_gap: f64,
    tol_feas: f64,
    max_iter: u32,
    verbose: i32,
    x_out: *mut f64,
    info_out: *mut f64,
) -> i32 {
    let nnz = *colptr.add(n);
    let a = CscMatrix::new(
        m,
        n,
        slice::from_raw_parts(colptr, n + 1).to_vec(),
        slice::from_raw_parts(rowval, nnz).to_vec(),
        slice::from_raw_parts(nzval, nnz).to_vec(),
    );
    let p = CscMatrix::<f64>::zeros((n, n));
    let qv = slice::from_raw_parts(q, n).to_vec();
    let bv = slice::from_raw_parts(b, m).to_vec();
    let mut cones: Vec<SupportedConeT<f64>> = Vec::new();
    if nzero > 0 {
        cones.push(SupportedConeT::ZeroConeT(nzero));
    }
    for k in 0..npsd {
        cones.push(SupportedConeT::PSDTriangleConeT(*psd_sides.add(k)));
    }
    let settings = match DefaultSettingsBuilder::default()
        .verbose(verbose != 0)
        .tol_gap_abs(tol_gap)
        .tol_gap_rel(tol_gap)
        .tol_feas(tol_feas)
        .max_iter(max_iter)
        .build()
    {
        Ok(s) => s,
        Err(_) => return -1,
    };
    let mut solver = match DefaultSolver::new(&p, &qv, &a, &bv, &cones, settings) {
        Ok(s) => s,
        Err(_) => return -2,
    };
    solver.solve();
    let sol = &solver.solution;
    let x = slice::from_raw_parts_mut(x_out, n);
    x.copy_from_slice(&sol.x);
    let info = slice::from_raw_parts_mut(info_out, INFO_LEN);
    info[0] = status_code(sol.status);
    info[1] = sol.obj_val;
    info[2] = sol.obj_val_dual;
    info[3] = sol.iterations as f64;
    info[4] = sol.solve_time;
    info[5] = sol.r_prim;
    info[6] = sol.r_dual;
    0
}
