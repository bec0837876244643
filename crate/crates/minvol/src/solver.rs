//! Primal barrier interior-point method for determinant-maximization SDPs.
//!
//! Solves `min <C,X> - logdet(X_des)` over block-diagonal PSD variables with
//! affine equality rows. Each barrier subproblem
//! `min t*(<C,X> - logdet X_des) - sum_b logdet X_b  s.t. A(X) = b`
//! is solved by infeasible-start Newton; the Newton system is reduced to an
//! m x m Schur complement using the closed-form block inverse
//! `H_b^{-1}[M] = (1/w_b) X_b M X_b` of the log-det Hessian. The barrier
//! parameter grows geometrically until `nu/t` falls below tolerance.
//!
//! Infeasibility is decided by a phase-I problem: every row gets a split
//! slack pair `u_i - v_i` and `sum(u+v)` is minimized from an exactly
//! feasible interior start; an optimum bounded away from zero certifies
//! that no PSD point satisfies the rows.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::sdp::{BlockKind, Entry, SdpProblem};

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Outer stopping rule: finish when `nu/t <= tol` (nu = sum of block dims).
    pub tol: f64,
    /// Initial barrier parameter.
    pub t_init: f64,
    /// Geometric growth factor for the barrier parameter.
    pub t_growth: f64,
    pub max_outer: usize,
    /// Newton iterations per barrier subproblem.
    pub max_newton: usize,
    /// Absolute primal feasibility target for the Newton phase.
    pub feas_tol: f64,
    /// Newton decrement target per subproblem.
    pub newton_decrement_tol: f64,
    /// Phase-I optimum above this value means primal infeasible.
    pub infeas_threshold: f64,
    /// Diagonal regularization added to the reduced Newton system.
    pub reg: f64,
    /// Backtracking factor and sufficient-decrease constant.
    pub ls_beta: f64,
    pub ls_sigma: f64,
}

impl SolverOptions {
    /// Looser duality-gap target for the fitting workflows: their
    /// certificate gates depend on primal feasibility and block positivity,
    /// not on polishing the volume objective past 1e-6.
    pub fn fitting() -> Self {
        SolverOptions { tol: 1e-6, ..Default::default() }
    }
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-8,
            t_init: 1.0,
            t_growth: 10.0,
            max_outer: 40,
            max_newton: 300,
            feas_tol: 1e-10,
            newton_decrement_tol: 1e-5,
            infeas_threshold: 1e-7,
            reg: 1e-10,
            ls_beta: 0.5,
            ls_sigma: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    NumericalFailure,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct KktReport {
    /// `max_i |A_i(X) - b_i|`.
    pub primal_infeasibility: f64,
    /// Smallest eigenvalue across all blocks.
    pub min_eigenvalue: f64,
    /// `||C_des + sum lambda_i A_i^des - X_des^{-1}||_max` for the designated
    /// block (0 when the objective is purely linear).
    pub stationarity: f64,
    /// Smallest eigenvalue of the dual matrices `C_b + sum lambda_i A_i^b`
    /// over non-designated blocks (negative means dual infeasible).
    pub dual_feasibility: f64,
    /// `sum_{b != des} <Z_b, X_b>`.
    pub gap_surrogate: f64,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SolveStatus,
    pub blocks: Vec<DMatrix<f64>>,
    /// Dual multipliers per equality row, on the true-objective scale.
    pub duals: Vec<f64>,
    /// `<C,X> - logdet(X_des)` at the returned point.
    pub objective: f64,
    pub kkt: KktReport,
    /// True objective after each barrier subproblem (non-increasing).
    pub objective_path: Vec<f64>,
    /// Phase-I optimum lower bound when infeasibility was established.
    pub infeasibility: Option<f64>,
    /// Set when the determinant objective appears unbounded above.
    pub unbounded_hint: bool,
    pub newton_iterations: usize,
}

/// Entries of one row restricted to one block.
type BlockEntries = Vec<(usize, usize, f64)>;

struct Workspace<'a> {
    prob: &'a SdpProblem,
    dims: Vec<usize>,
    /// For each block: (global row index, entries in this block).
    block_rows: Vec<Vec<(usize, BlockEntries)>>,
    /// Dense linear-objective matrix per block.
    c_lin: Vec<DMatrix<f64>>,
    designated: Option<usize>,
    nu: f64,
}

impl<'a> Workspace<'a> {
    fn new(prob: &'a SdpProblem) -> Self {
        let nblocks = prob.blocks.len();
        let dims: Vec<usize> = prob.blocks.iter().map(|b| b.dim).collect();
        let mut block_rows: Vec<Vec<(usize, BlockEntries)>> = vec![Vec::new(); nblocks];
        for (i, row) in prob.rows.iter().enumerate() {
            let mut per_block: Vec<(usize, BlockEntries)> = Vec::new();
            for e in &row.entries {
                match per_block.iter_mut().find(|(b, _)| *b == e.block) {
                    Some((_, list)) => list.push((e.row, e.col, e.value)),
                    None => per_block.push((e.block, vec![(e.row, e.col, e.value)])),
                }
            }
            for (b, list) in per_block {
                block_rows[b].push((i, list));
            }
        }
        let mut c_lin: Vec<DMatrix<f64>> = dims.iter().map(|&d| DMatrix::zeros(d, d)).collect();
        for e in &prob.objective.linear {
            c_lin[e.block][(e.row, e.col)] += e.value;
            if e.row != e.col {
                c_lin[e.block][(e.col, e.row)] += e.value;
            }
        }
        Workspace {
            prob,
            dims,
            block_rows,
            c_lin,
            designated: prob.objective.logdet_block,
            nu: prob.barrier_nu(),
        }
    }

    fn weight(&self, block: usize, t: f64) -> f64 {
        if Some(block) == self.designated {
            t + 1.0
        } else {
            1.0
        }
    }

    fn true_objective(&self, x: &[DMatrix<f64>]) -> f64 {
        let lin = self.prob.linear_objective(x);
        match self.designated {
            Some(d) => lin - logdet(&x[d]).unwrap_or(f64::NEG_INFINITY),
            None => lin,
        }
    }

    fn primal_residual(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(
            self.prob.rows.len(),
            self.prob
                .rows
                .iter()
                .zip(&self.prob.rhs)
                .map(|(row, b)| row.value(x) - b),
        )
    }
}

fn logdet(x: &DMatrix<f64>) -> Option<f64> {
    let chol = Cholesky::new(x.clone())?;
    Some(2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>())
}

/// `X * A * X` for the sparse symmetric `A` given by upper-triangle entries,
/// accumulated via rank-one outer products of columns of the symmetric `X`.
fn x_a_x(x: &DMatrix<f64>, entries: &BlockEntries) -> DMatrix<f64> {
    let n = x.nrows();
    let mut m = DMatrix::zeros(n, n);
    for &(r, c, v) in entries {
        if r == c {
            m.ger(v, &x.column(r), &x.column(r), 1.0);
        } else {
            m.ger(v, &x.column(r), &x.column(c), 1.0);
            m.ger(v, &x.column(c), &x.column(r), 1.0);
        }
    }
    m
}

/// `<A, M>` with the symmetric doubling convention; `M` must be symmetric.
fn sparse_dot(entries: &BlockEntries, m: &DMatrix<f64>) -> f64 {
    entries
        .iter()
        .map(|&(r, c, v)| if r == c { v * m[(r, r)] } else { 2.0 * v * m[(r, c)] })
        .sum()
}

/// Add `w * A` (sparse symmetric) into the dense symmetric accumulator.
fn add_sparse(acc: &mut DMatrix<f64>, entries: &BlockEntries, w: f64) {
    for &(r, c, v) in entries {
        acc[(r, c)] += w * v;
        if r != c {
            acc[(c, r)] += w * v;
        }
    }
}

struct NewtonOutcome {
    converged: bool,
    /// Designated block grew past the divergence guard.
    diverged: bool,
}

enum StepError {
    Factorization,
}

#[allow(clippy::too_many_arguments)]
fn newton_solve(
    ws: &Workspace,
    x: &mut Vec<DMatrix<f64>>,
    nu_dual: &mut DVector<f64>,
    t: f64,
    opts: &SolverOptions,
    total_newton: &mut usize,
) -> std::result::Result<NewtonOutcome, StepError> {
    let m = ws.prob.rows.len();
    let nblocks = ws.dims.len();
    let b_scale = 1.0 + ws.prob.rhs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut prev_decrement = f64::INFINITY;
    let mut stall_count = 0usize;
    let mut best_pri = f64::INFINITY;
    let mut pri_stall = 0usize;

    for iter in 0..opts.max_newton {
        *total_newton += 1;

        // Factorize all blocks; X is maintained strictly PD by the line search.
        let mut chols: Vec<Cholesky<f64, nalgebra::Dyn>> = Vec::with_capacity(nblocks);
        for xb in x.iter() {
            match Cholesky::new(xb.clone()) {
                Some(ch) => chols.push(ch),
                None => return Err(StepError::Factorization),
            }
        }

        let r_pri = ws.primal_residual(x);

        // H^{-1} applied to the gradient, in the cancellation-free form
        // (1/w) X g X = (t/w) X C X - X.
        let hinv_g: Vec<DMatrix<f64>> = (0..nblocks)
            .map(|b| {
                let w = ws.weight(b, t);
                if ws.c_lin[b].amax() != 0.0 {
                    (&x[b] * &ws.c_lin[b] * &x[b]).scale(t / w) - &x[b]
                } else {
                    -&x[b]
                }
            })
            .collect();

        // Reduced system: S nu_plus = r_pri - A H^{-1} g.
        let mut s: DMatrix<f64> = DMatrix::zeros(m, m);
        let mut rhs = r_pri.clone();
        for b in 0..nblocks {
            let w = ws.weight(b, t);
            for (i, entries) in &ws.block_rows[b] {
                rhs[*i] -= sparse_dot(entries, &hinv_g[b]);
            }
            let rows = &ws.block_rows[b];
            for (jj, (j, entries_j)) in rows.iter().enumerate() {
                let mj = x_a_x(&x[b], entries_j).scale(1.0 / w);
                for (i, entries_i) in rows.iter().take(jj + 1) {
                    let v = sparse_dot(entries_i, &mj);
                    s[(*i, *j)] += v;
                    if i != j {
                        s[(*j, *i)] += v;
                    }
                }
            }
        }

        // Jacobi-equilibrate the reduced system (rows mix slack scales with
        // block scales), factor with escalating relative regularization when
        // needed, then refine against the unregularized system so neither
        // the scaling nor the shift biases the step.
        let scale_d: DVector<f64> = DVector::from_iterator(
            m,
            (0..m).map(|i| 1.0 / s[(i, i)].max(1e-300).sqrt()),
        );
        let mut s_eq = s.clone();
        for i in 0..m {
            for j in 0..m {
                s_eq[(i, j)] *= scale_d[i] * scale_d[j];
            }
        }
        let mut reg = 0.0;
        let chol_s = loop {
            let mut s_try = s_eq.clone();
            if reg > 0.0 {
                for i in 0..m {
                    s_try[(i, i)] += reg;
                }
            }
            match Cholesky::new(s_try) {
                Some(c) => break c,
                None => {
                    reg = if reg == 0.0 { opts.reg } else { reg * 100.0 };
                    if reg > 1e-2 {
                        return Err(StepError::Factorization);
                    }
                }
            }
        };
        let solve_s = |r: &DVector<f64>| -> DVector<f64> {
            let scaled = r.component_mul(&scale_d);
            chol_s.solve(&scaled).component_mul(&scale_d)
        };
        let mut nu_plus = solve_s(&rhs);
        let rhs_scale = 1.0 + rhs.amax();
        let mut best_resid = f64::INFINITY;
        for _ in 0..20 {
            let resid = &rhs - &s * &nu_plus;
            let rn = resid.amax();
            if rn <= 1e-15 * rhs_scale || rn >= 0.9 * best_resid {
                break;
            }
            best_resid = rn;
            nu_plus += solve_s(&resid);
        }
        if std::env::var_os("MINVOL_SOLVER_TRACE").is_some() {
            let final_resid = (&rhs - &s * &nu_plus).amax();
            eprintln!("  s-solve: resid={final_resid:e} rhs_scale={rhs_scale:e} reg={reg:e}");
        }

        // Newton direction per block, again without forming t*C - w*X^{-1}:
        // dX = X - (t/w) X C X - (1/w) X (sum nu_i A_i) X.
        let mut dx: Vec<DMatrix<f64>> = Vec::with_capacity(nblocks);
        for b in 0..nblocks {
            let w = ws.weight(b, t);
            let dim = ws.dims[b];
            let mut r_nu: DMatrix<f64> = DMatrix::zeros(dim, dim);
            for (i, entries) in &ws.block_rows[b] {
                let lam = nu_plus[*i];
                if lam != 0.0 {
                    add_sparse(&mut r_nu, entries, lam);
                }
            }
            let mut step = &x[b] - (&x[b] * &r_nu * &x[b]).scale(1.0 / w);
            if ws.c_lin[b].amax() != 0.0 {
                step -= (&x[b] * &ws.c_lin[b] * &x[b]).scale(t / w);
            }
            dx.push(step);
        }

        // Refine the step against the raw saddle system: the primal damage
        // of a step equals its row violation e = A(dX) + r_pri, which feeds
        // back into block growth if left uncorrected.
        let mut step_violation = 0.0;
        for pass in 0..7 {
            let mut e = r_pri.clone();
            for b in 0..nblocks {
                for (i, entries) in &ws.block_rows[b] {
                    e[*i] += sparse_dot(entries, &dx[b]);
                }
            }
            step_violation = e.amax();
            if step_violation <= 1e-13 * rhs_scale || pass == 6 {
                break;
            }
            let delta = solve_s(&e);
            for b in 0..nblocks {
                let w = ws.weight(b, t);
                let dim = ws.dims[b];
                let mut corr: DMatrix<f64> = DMatrix::zeros(dim, dim);
                for (i, entries) in &ws.block_rows[b] {
                    let lam = delta[*i];
                    if lam != 0.0 {
                        add_sparse(&mut corr, entries, lam);
                    }
                }
                if corr.amax() != 0.0 {
                    dx[b] -= (&x[b] * &corr * &x[b]).scale(1.0 / w);
                }
            }
        }

        // The scaled step W = L^{-1} dX L^{-T} gives both the Newton
        // decrement (sum_b w_b |W_b|_F^2) and the exact step-to-boundary
        // bound (X + a dX > 0 iff 1 + a lambda_min(W) > 0).
        let mut decrement_sq = 0.0;
        let mut alpha_bound = f64::INFINITY;
        for b in 0..nblocks {
            let w = ws.weight(b, t);
            let l = chols[b].l();
            let y = l
                .solve_lower_triangular(&dx[b])
                .ok_or(StepError::Factorization)?;
            let z = l
                .solve_lower_triangular(&y.transpose())
                .ok_or(StepError::Factorization)?;
            let wmat = (&z + z.transpose()).scale(0.5);
            decrement_sq += w * wmat.iter().map(|v| v * v).sum::<f64>();
            let lam_min = wmat.symmetric_eigen().eigenvalues.min();
            if lam_min < 0.0 {
                alpha_bound = alpha_bound.min(-1.0 / lam_min);
            }
        }
        let decrement = decrement_sq.max(0.0).sqrt();

        let pri_norm = r_pri.amax();
        // The achievable primal accuracy degrades with the barrier weight
        // (floating-point noise in the reduced solve scales with t); on top
        // of that, each problem has its own floating-point floor, detected
        // when a small residual stops improving.
        if pri_norm < best_pri * 0.5 {
            best_pri = pri_norm;
            pri_stall = 0;
        } else {
            pri_stall += 1;
        }
        let pri_gate = b_scale * opts.feas_tol.max(1e-15 * t);
        let floor_cap = (1e-9 * rhs_scale).clamp(1e-6 * b_scale, 1e-4 * b_scale);
        let at_floor = pri_norm <= floor_cap && pri_stall >= 2;
        // A looser bound decides which line search runs: Newton steps keep
        // attacking the residual either way, so centering may proceed once
        // the residual is small and stagnant even if not yet at the claimable
        // floor.
        let mode_floor = pri_norm <= 1e-4 * b_scale && pri_stall >= 2;
        let feasible_mode = pri_norm <= pri_gate || at_floor || mode_floor;
        if std::env::var_os("MINVOL_SOLVER_TRACE").is_some() {
            eprintln!("newton: t={t:e} iter={iter} pri={pri_norm:e} decrement={decrement:e}");
        }
        // Converged when the decrement is below tolerance, or when it has
        // hit its floating-point floor while the iterate is well centered
        // (decrement far inside the quadratic-convergence region).
        if decrement >= prev_decrement * 0.999 {
            stall_count += 1;
        } else {
            stall_count = 0;
        }
        prev_decrement = decrement;
        let centered_at_floor = decrement <= 0.1 && stall_count >= 3;
        let claimable = pri_norm <= pri_gate || at_floor;
        if claimable && (decrement <= opts.newton_decrement_tol || centered_at_floor) {
            return Ok(NewtonOutcome { converged: true, diverged: false });
        }

        let mut accepted = false;
        let mut accepted_alpha: Option<f64> = None;
        // Pace the step so its measured row violation cannot push the primal
        // residual past the claimable floor: contraction is required above
        // the floor, drift below it is free.
        let drift = 0.125 * floor_cap + 1e-12 * rhs_scale;
        let mut alpha_start = (0.995 * alpha_bound).min(1.0);
        if step_violation > 0.0 {
            let budget = 0.25 * pri_norm + drift;
            alpha_start = alpha_start.min(budget / step_violation).max(1e-13);
        }
        // Backstop: a correct Newton step shrinks the row residual.
        let pri_ok = |trial: &[DMatrix<f64>], alpha: f64| -> bool {
            let trial_pri = ws.primal_residual(trial).amax();
            trial_pri <= (1.0 - 0.25 * alpha) * pri_norm + alpha * drift + 1e-12 * rhs_scale
        };
        if feasible_mode {
            // Feasible phase: damped Newton on the barrier objective. The
            // step 1/(1+lambda) keeps the iterate strictly inside the cone
            // and guarantees fixed decrease for self-concordant barriers.
            let phi0 = barrier_value(ws, x, t);
            let damped = if decrement <= 0.25 { 1.0 } else { 1.0 / (1.0 + decrement) };
            let mut alpha = damped.min(alpha_start);
            while alpha > 1e-8 {
                let trial: Vec<DMatrix<f64>> = x
                    .iter()
                    .zip(&dx)
                    .map(|(xb, d)| xb + d.scale(alpha))
                    .collect();
                let phi_trial = barrier_value(ws, &trial, t);
                if phi_trial.is_finite()
                    && phi_trial <= phi0 - 0.1 * alpha * decrement * decrement
                    && pri_ok(&trial, alpha)
                {
                    *x = trial;
                    *nu_dual = nu_plus.clone();
                    accepted = true;
                    accepted_alpha = Some(alpha);
                    break;
                }
                alpha *= opts.ls_beta;
            }
        }
        if !accepted {
            // Residual reduction fallback (and the infeasible-phase search):
            // backtrack on the KKT residual norm.
            let d_nu = &nu_plus - &*nu_dual;
            let merit0 = merit(ws, x, nu_dual, t);
            let mut alpha = alpha_start;
            while alpha > 1e-13 {
                let trial: Vec<DMatrix<f64>> = x
                    .iter()
                    .zip(&dx)
                    .map(|(xb, d)| xb + d.scale(alpha))
                    .collect();
                if trial.iter().any(|xb| Cholesky::new(xb.clone()).is_none()) {
                    alpha *= opts.ls_beta;
                    continue;
                }
                let trial_nu = &*nu_dual + d_nu.scale(alpha);
                let merit_trial = merit(ws, &trial, &trial_nu, t);
                if (merit_trial <= (1.0 - opts.ls_sigma * alpha) * merit0
                    || merit_trial < 1e-14)
                    && pri_ok(&trial, alpha)
                {
                    *x = trial;
                    *nu_dual = trial_nu;
                    accepted = true;
                    accepted_alpha = Some(alpha);
                    break;
                }
                alpha *= opts.ls_beta;
            }
        }
        if std::env::var_os("MINVOL_SOLVER_TRACE").is_some() && accepted_alpha.is_some() {
            eprintln!(
                "  step: alpha={:.2e} start={alpha_start:.2e} bound={alpha_bound:.2e} viol={step_violation:.2e} mode={}",
                accepted_alpha.unwrap(),
                if feasible_mode { "phi" } else { "merit" }
            );
        }
        if !accepted {
            if std::env::var_os("MINVOL_SOLVER_TRACE").is_some() {
                eprintln!("stall: t={t:e} iter={iter} pri={pri_norm:e} decrement={decrement:e}");
            }
            let feasible_enough = pri_norm <= (pri_gate * 10.0).max(floor_cap);
            return Ok(NewtonOutcome {
                converged: feasible_enough && decrement <= 0.1,
                diverged: false,
            });
        }
        if let Some(d) = ws.designated {
            if x[d].amax() > 1e8 {
                return Ok(NewtonOutcome { converged: false, diverged: true });
            }
        }
    }
    Ok(NewtonOutcome { converged: false, diverged: false })
}

/// Norm of the KKT residual of the barrier subproblem at (x, nu), with the
/// dual part of each block scaled by 1/w_b so magnitudes stay O(|X^{-1}|).
fn merit(ws: &Workspace, x: &[DMatrix<f64>], nu_dual: &DVector<f64>, t: f64) -> f64 {
    let mut acc = 0.0;
    for b in 0..ws.dims.len() {
        let w = ws.weight(b, t);
        let inv = match Cholesky::new(x[b].clone()) {
            Some(c) => c.inverse(),
            None => return f64::INFINITY,
        };
        let mut r = &ws.c_lin[b] * (t / w) - inv;
        for (i, entries) in &ws.block_rows[b] {
            let lam = nu_dual[*i] / w;
            if lam != 0.0 {
                add_sparse(&mut r, entries, lam);
            }
        }
        acc += r.iter().map(|v| v * v).sum::<f64>();
    }
    let r_pri = ws.primal_residual(x);
    acc += r_pri.iter().map(|v| v * v).sum::<f64>();
    acc.sqrt()
}

/// Barrier subproblem objective `t<C,X> - sum_b w_b logdet X_b`;
/// +inf outside the cone.
fn barrier_value(ws: &Workspace, x: &[DMatrix<f64>], t: f64) -> f64 {
    let mut acc = t * ws.prob.linear_objective(x);
    for b in 0..ws.dims.len() {
        match logdet(&x[b]) {
            Some(ld) => acc -= ws.weight(b, t) * ld,
            None => return f64::INFINITY,
        }
    }
    acc
}

fn initial_point(prob: &SdpProblem) -> Vec<DMatrix<f64>> {
    let mut x: Vec<DMatrix<f64>> = prob
        .blocks
        .iter()
        .map(|b| DMatrix::identity(b.dim, b.dim))
        .collect();
    // Give each single-use slack an exactly feasible positive value when possible.
    for (bi, block) in prob.blocks.iter().enumerate() {
        if block.kind != BlockKind::Slack || block.dim != 1 {
            continue;
        }
        let touching: Vec<usize> = prob
            .rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.entries.iter().any(|e| e.block == bi))
            .map(|(i, _)| i)
            .collect();
        if touching.len() != 1 {
            continue;
        }
        let i = touching[0];
        let row = &prob.rows[i];
        let coeff = row
            .entries
            .iter()
            .find(|e| e.block == bi)
            .map(|e| e.value)
            .unwrap_or(0.0);
        if coeff == 0.0 {
            continue;
        }
        let rest: f64 = row
            .entries
            .iter()
            .filter(|e| e.block != bi)
            .map(|e| {
                let v = x[e.block][(e.row, e.col)];
                if e.row == e.col {
                    e.value * v
                } else {
                    2.0 * e.value * v
                }
            })
            .sum();
        let needed = (prob.rhs[i] - rest) / coeff;
        x[bi][(0, 0)] = if needed >= 0.1 { needed } else { 0.5 };
    }
    x
}

struct BarrierRun {
    x: Vec<DMatrix<f64>>,
    nu_dual: DVector<f64>,
    t_final: f64,
    objective_path: Vec<f64>,
    converged: bool,
    stalled_infeasible: bool,
    factorization_failed: bool,
    unbounded_hint: bool,
    newton_iterations: usize,
}

fn barrier_loop(
    ws: &Workspace,
    start: Vec<DMatrix<f64>>,
    opts: &SolverOptions,
    early_exit: Option<&dyn Fn(f64, f64) -> bool>,
) -> BarrierRun {
    let m = ws.prob.rows.len();
    let mut x = start;
    let mut nu_dual = DVector::zeros(m);
    let mut t = opts.t_init;
    let mut path = Vec::new();
    let mut total_newton = 0usize;

    let mut converged = false;
    let mut stalled_infeasible = false;
    let mut factorization_failed = false;
    let mut unbounded_hint = false;

    for _ in 0..opts.max_outer {
        match newton_solve(ws, &mut x, &mut nu_dual, t, opts, &mut total_newton) {
            Err(StepError::Factorization) => {
                factorization_failed = true;
                break;
            }
            Ok(out) => {
                if out.diverged {
                    unbounded_hint = true;
                    break;
                }
                if !out.converged {
                    let pri = ws.primal_residual(&x).amax();
                    let b_scale = 1.0 + ws.prob.rhs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                    stalled_infeasible = pri > opts.feas_tol * b_scale * 100.0;
                    break;
                }
                let obj = ws.true_objective(&x);
                if std::env::var_os("MINVOL_SOLVER_TRACE").is_some() {
                    let norms: Vec<String> = x
                        .iter()
                        .zip(&ws.prob.blocks)
                        .map(|(xb, b)| format!("{}={:.1e}", b.label, xb.amax()))
                        .collect();
                    eprintln!("  subproblem done t={t:e} obj={obj:e} norms: {}", norms.join(" "));
                }
                path.push(obj);
                if let Some(exit) = early_exit {
                    if exit(obj, ws.nu / t) {
                        converged = true;
                        break;
                    }
                }
                if let Some(d) = ws.designated {
                    if x[d].amax() > 1e8 {
                        unbounded_hint = true;
                        break;
                    }
                }
                if ws.nu / t <= opts.tol {
                    converged = true;
                    break;
                }
            }
        }
        t *= opts.t_growth;
    }

    BarrierRun {
        x,
        nu_dual,
        t_final: t,
        objective_path: path,
        converged,
        stalled_infeasible,
        factorization_failed,
        unbounded_hint,
        newton_iterations: total_newton,
    }
}

/// Build the phase-I feasibility problem: a single nonnegative scalar
/// `tau` scales the residual direction of the identity start,
/// `A(X) + tau (b - A(I)) = b`, and `min tau` is driven toward zero.
/// `(X, tau) = (I, 1)` is exactly feasible and strictly interior.
fn build_phase1(prob: &SdpProblem) -> (SdpProblem, f64) {
    let mut ph = SdpProblem::new();
    for b in &prob.blocks {
        ph.add_block(b.label.clone(), b.dim, b.kind);
    }
    let tau = ph.add_block("ph1_tau", 1, BlockKind::Slack);
    let ident: Vec<DMatrix<f64>> = prob
        .blocks
        .iter()
        .map(|b| DMatrix::identity(b.dim, b.dim))
        .collect();
    let mut r0_norm = 0.0f64;
    for (i, row) in prob.rows.iter().enumerate() {
        let r = prob.rhs[i] - row.value(&ident);
        r0_norm = r0_norm.max(r.abs());
        let mut entries = row.entries.clone();
        if r != 0.0 {
            entries.push(Entry::new(tau, 0, 0, r));
        }
        ph.add_row(entries, prob.rhs[i]);
    }
    ph.objective.linear.push(Entry::new(tau, 0, 0, 1.0));
    (ph, r0_norm)
}

enum Phase1Verdict {
    /// Interior point of the original problem's feasible region.
    Feasible(Vec<DMatrix<f64>>),
    Infeasible(f64),
    Undecided,
}

fn phase1(prob: &SdpProblem, opts: &SolverOptions) -> Phase1Verdict {
    let (ph, r0_norm) = build_phase1(prob);
    let ws = Workspace::new(&ph);
    let norig = prob.blocks.len();
    if r0_norm == 0.0 {
        let ident: Vec<DMatrix<f64>> = prob
            .blocks
            .iter()
            .map(|b| DMatrix::identity(b.dim, b.dim))
            .collect();
        return Phase1Verdict::Feasible(ident);
    }

    let start: Vec<DMatrix<f64>> = ph
        .blocks
        .iter()
        .map(|b| DMatrix::identity(b.dim, b.dim))
        .collect();

    let threshold = opts.infeas_threshold;
    let b_scale = 1.0 + prob.rhs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    // A loose feasibility target is enough: the subsequent main solve is
    // what certifies feasibility, while the infeasible verdict rests on the
    // certified lower bound below.
    let feas_level = (0.5 * threshold).max(1e-5 * b_scale);
    let mut ph_opts = opts.clone();
    ph_opts.tol = (threshold * 0.05 / r0_norm.max(1.0)).min(1e-8);
    // Starting the barrier near nu keeps tau from being pushed up toward
    // its analytic center (which would inflate every block by that factor).
    ph_opts.t_init = opts.t_init.max(ws.nu);
    // The worst-case equality violation at slack level tau is tau * |r0|.
    let exit = move |obj: f64, gap: f64| {
        (obj - gap) * r0_norm > threshold || obj * r0_norm <= feas_level
    };
    let run = barrier_loop(&ws, start, &ph_opts, Some(&exit));

    let obj = ws.true_objective(&run.x);
    let gap = ws.nu / run.t_final;
    if run.converged && (obj - gap) * r0_norm > threshold {
        Phase1Verdict::Infeasible((obj - gap) * r0_norm)
    } else if obj * r0_norm <= feas_level {
        Phase1Verdict::Feasible(run.x[..norig].to_vec())
    } else {
        Phase1Verdict::Undecided
    }
}

/// Solve a maxdet SDP. Returns a solution with one of the four statuses;
/// `Err` is reserved for malformed problems.
pub fn solve(prob: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    prob.validate()?;
    if opts.t_growth <= 1.0 || opts.tol <= 0.0 {
        return Err(Error::InvalidParameter(
            "solver needs growth factor > 1 and positive tolerance".into(),
        ));
    }
    let ws = Workspace::new(prob);

    // Cold attempt from the identity-based start, on a reduced Newton
    // budget; well-started problems converge here directly.
    let mut cold_opts = opts.clone();
    cold_opts.max_newton = opts.max_newton.min(60);
    let run = barrier_loop(&ws, initial_point(prob), &cold_opts, None);
    if run.converged {
        return Ok(finish(prob, &ws, run, SolveStatus::Optimal, None));
    }
    if run.unbounded_hint {
        return Ok(finish(prob, &ws, run, SolveStatus::IterationLimit, None));
    }

    // Establish feasibility, then re-solve from the interior point phase-I
    // hands back.
    match phase1(prob, opts) {
        Phase1Verdict::Infeasible(margin) => {
            Ok(finish(prob, &ws, run, SolveStatus::Infeasible, Some(margin)))
        }
        Phase1Verdict::Feasible(warm) => {
            let rerun = barrier_loop(&ws, warm, opts, None);
            if rerun.converged {
                Ok(finish(prob, &ws, rerun, SolveStatus::Optimal, None))
            } else if rerun.unbounded_hint {
                Ok(finish(prob, &ws, rerun, SolveStatus::IterationLimit, None))
            } else if rerun.factorization_failed {
                Ok(finish(prob, &ws, rerun, SolveStatus::NumericalFailure, None))
            } else {
                Ok(finish(prob, &ws, rerun, SolveStatus::IterationLimit, None))
            }
        }
        Phase1Verdict::Undecided => {
            let status = if run.factorization_failed {
                SolveStatus::NumericalFailure
            } else if run.newton_iterations >= cold_opts.max_newton {
                SolveStatus::IterationLimit
            } else {
                SolveStatus::NumericalFailure
            };
            Ok(finish(prob, &ws, run, status, None))
        }
    }
}

fn finish(
    prob: &SdpProblem,
    ws: &Workspace,
    run: BarrierRun,
    status: SolveStatus,
    infeasibility: Option<f64>,
) -> SdpSolution {
    let duals: Vec<f64> = run.nu_dual.iter().map(|v| v / run.t_final).collect();
    let objective = ws.true_objective(&run.x);
    let mut sol = SdpSolution {
        status,
        blocks: run.x,
        duals,
        objective,
        kkt: KktReport {
            primal_infeasibility: f64::NAN,
            min_eigenvalue: f64::NAN,
            stationarity: f64::NAN,
            dual_feasibility: f64::NAN,
            gap_surrogate: f64::NAN,
        },
        objective_path: run.objective_path,
        infeasibility,
        unbounded_hint: run.unbounded_hint,
        newton_iterations: run.newton_iterations,
    };
    if let Ok(report) = check_kkt(prob, &sol) {
        sol.kkt = report;
    }
    sol
}

/// Recompute KKT residuals for a candidate solution.
pub fn check_kkt(prob: &SdpProblem, sol: &SdpSolution) -> Result<KktReport> {
    if sol.blocks.len() != prob.blocks.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} solution blocks for {} problem blocks",
            sol.blocks.len(),
            prob.blocks.len()
        )));
    }
    for (xb, b) in sol.blocks.iter().zip(&prob.blocks) {
        if xb.nrows() != b.dim || xb.ncols() != b.dim {
            return Err(Error::ShapeMismatch(format!(
                "block `{}` is {}x{}, expected {}x{}",
                b.label,
                xb.nrows(),
                xb.ncols(),
                b.dim,
                b.dim
            )));
        }
    }
    let primal_infeasibility = prob
        .rows
        .iter()
        .zip(&prob.rhs)
        .map(|(row, b)| (row.value(&sol.blocks) - b).abs())
        .fold(0.0f64, f64::max);

    let mut min_eigenvalue = f64::INFINITY;
    for xb in &sol.blocks {
        if xb.nrows() == 0 {
            continue;
        }
        let eig = xb.clone().symmetric_eigen();
        min_eigenvalue = min_eigenvalue.min(eig.eigenvalues.min());
    }

    // Dual matrices Z_b = C_b + sum_i lambda_i A_i^b.
    let ws = Workspace::new(prob);
    let mut stationarity = 0.0;
    let mut dual_feasibility = f64::INFINITY;
    let mut gap_surrogate = 0.0;
    for b in 0..prob.blocks.len() {
        let mut z = ws.c_lin[b].clone();
        for (i, entries) in &ws.block_rows[b] {
            let lam = sol.duals[*i];
            if lam != 0.0 {
                add_sparse(&mut z, entries, lam);
            }
        }
        if Some(b) == prob.objective.logdet_block {
            match Cholesky::new(sol.blocks[b].clone()) {
                Some(ch) => {
                    let resid = &z - ch.inverse();
                    stationarity = resid.amax();
                }
                None => stationarity = f64::INFINITY,
            }
        } else {
            if z.nrows() > 0 {
                let eig = z.clone().symmetric_eigen();
                dual_feasibility = dual_feasibility.min(eig.eigenvalues.min());
            }
            gap_surrogate += (&z * &sol.blocks[b]).trace();
        }
    }
    if dual_feasibility == f64::INFINITY {
        dual_feasibility = 0.0;
    }
    Ok(KktReport {
        primal_infeasibility,
        min_eigenvalue,
        stationarity,
        dual_feasibility,
        gap_surrogate,
    })
}

/// Volume of the unit n-ball, by the even/odd recurrence.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * std::f64::consts::PI / n as f64,
    }
}

/// Volume of the ellipsoid `{x : x^T A x <= 1}` for A > 0:
/// `vol(B_n) * sqrt(det A^{-1})`.
pub fn ellipsoid_volume(a: &DMatrix<f64>) -> Result<f64> {
    if a.nrows() != a.ncols() {
        return Err(Error::ShapeMismatch("ellipsoid matrix must be square".into()));
    }
    let ld = logdet(a)
        .ok_or_else(|| Error::InvalidParameter("ellipsoid matrix must be positive definite".into()))?;
    Ok(unit_ball_volume(a.nrows()) * (-0.5 * ld).exp())
}
