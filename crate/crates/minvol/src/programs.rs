//! The fitting workflows: minimum-volume sublevel sets containing point
//! clouds, unions of semialgebraic sets, and attractors of polynomial ODEs,
//! plus feasibility bisection over ball-shaped seed regions.
//!
//! Every workflow assembles an [`SosProgram`], compiles it to an SDP,
//! solves it with the barrier method and packages the Gram matrices into a
//! [`Certificate`]. The same program builders are reused by the
//! verification module to reconstruct identity residuals.

use nalgebra::DMatrix;

use crate::basis::{GramForm, MonomialBasis};
use crate::error::{Error, Result};
use crate::ode::OdeSystem;
use crate::poly::Polynomial;
use crate::sets::{SemialgebraicSet, SetUnion};
use crate::solver::{solve, KktReport, SdpSolution, SolveStatus, SolverOptions};
use crate::sos::{multiplier_halfdeg, AffineExpr, BlockId, SosProgram};

/// Which workflow produced a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProgramKind {
    FitPoints,
    FitUnion,
    FitAttractor,
}

impl ProgramKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProgramKind::FitPoints => "fit-points",
            ProgramKind::FitUnion => "fit-union",
            ProgramKind::FitAttractor => "fit-attractor",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fit-points" => Ok(ProgramKind::FitPoints),
            "fit-union" => Ok(ProgramKind::FitUnion),
            "fit-attractor" => Ok(ProgramKind::FitAttractor),
            other => Err(Error::Parse(format!("unknown program kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CertificateMeta {
    pub program: ProgramKind,
    pub degree: u32,
    pub nvars: usize,
    pub convex: bool,
    /// Normalized seed inequality for attractor programs (the bounded
    /// orientation actually used in the identities).
    pub seed: Option<Polynomial>,
    pub description: String,
}

/// A solved fitting program: the sublevel polynomial `V` in Gram form, all
/// multiplier and witness Gram matrices (by label), and the solver report.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub v: GramForm,
    pub multipliers: Vec<(String, GramForm)>,
    pub objective: f64,
    pub status: SolveStatus,
    pub kkt: KktReport,
    pub unbounded: bool,
    pub meta: CertificateMeta,
}

impl Certificate {
    /// Evaluate the fitted polynomial.
    pub fn eval_v(&self, x: &[f64]) -> Result<f64> {
        self.v.eval(x)
    }

    /// Smallest eigenvalue over V and every stored multiplier/witness Gram.
    pub fn min_gram_eigenvalue(&self) -> f64 {
        let mut m = self.v.min_eigenvalue();
        for (_, g) in &self.multipliers {
            m = m.min(g.min_eigenvalue());
        }
        m
    }

    pub fn gram(&self, label: &str) -> Option<&GramForm> {
        self.multipliers
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, g)| g)
    }
}

fn v_label() -> String {
    "V".to_string()
}

/// Substitute `x -> rho * x` into a polynomial (domain normalization).
fn scale_domain(p: &Polynomial, rho: f64) -> Polynomial {
    let n = p.nvars();
    let subs: Vec<Polynomial> = (0..n).map(|i| Polynomial::variable(n, i).scale(rho)).collect();
    p.substitute(&subs).expect("same arity")
}

/// Map a Gram form solved in `x-bar = x / rho` coordinates back to the
/// original coordinates: `A -> D A D` with `D = diag(rho^-deg(m_i))`.
fn descale_gram(g: &GramForm, rho: f64) -> GramForm {
    let basis = g.basis().clone();
    let n = basis.len();
    let mut out = g.matrix().clone();
    let d: Vec<f64> = basis
        .elements()
        .iter()
        .map(|m| rho.powi(-(m.degree() as i32)))
        .collect();
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] *= d[i] * d[j];
        }
    }
    GramForm::new(basis, out).expect("shape preserved")
}

/// Geometry scale used to normalize a program's domain toward the unit box;
/// block norms and row coefficients stay O(1) there.
fn union_scale(target: &SetUnion) -> f64 {
    let mut rho = 1.0f64;
    for part in target.parts() {
        for g in part.inequalities() {
            if let Some(r) = crate::sets::quadratic_bound_radius(g) {
                rho = rho.max(r);
            }
        }
    }
    rho
}

/// Fit a minimum-volume sublevel set containing a finite point cloud
/// (the point-containment program). `V` is parameterized over monomials of
/// degree 1..d; the returned Gram form is embedded into the full
/// constant-inclusive basis with a zero constant row/column.
pub fn fit_points(points: &[Vec<f64>], d: u32, opts: &SolverOptions) -> Result<Certificate> {
    let first = points
        .first()
        .ok_or_else(|| Error::InvalidParameter("need at least one point".into()))?;
    let n = first.len();
    if n == 0 || d < 1 {
        return Err(Error::InvalidParameter("need dimension >= 1 and degree >= 1".into()));
    }
    if points.iter().any(|p| p.len() != n) {
        return Err(Error::DimensionMismatch("points disagree on dimension".into()));
    }
    let full = MonomialBasis::new(n, d);
    let reduced = MonomialBasis::from_monomials(
        n,
        full.elements().iter().filter(|m| m.degree() >= 1).cloned().collect(),
    );
    let mut prog = SosProgram::new(n);
    let v = prog.declare_gram(reduced.clone(), v_label())?;
    prog.set_logdet_objective(v)?;
    let v_expr = prog.gram_expr(v);
    for p in points {
        prog.add_point_upper_bound(&v_expr, p, 1.0)?;
    }
    let sdp = prog.compile()?;
    let sol = solve(&sdp, opts)?;
    match sol.status {
        SolveStatus::Optimal => {}
        SolveStatus::IterationLimit if sol.unbounded_hint => {}
        SolveStatus::Infeasible => {
            return Err(Error::Solver(
                "point containment reported infeasible; treating as numerical failure".into(),
            ))
        }
        other => return Err(Error::Solver(format!("point fit failed: {other:?}"))),
    }
    // Embed the reduced Gram into the constant-inclusive basis.
    let reduced_mat = &sol.blocks[v.0];
    let big = embed_gram(&reduced, reduced_mat, &full)?;
    let meta = CertificateMeta {
        program: ProgramKind::FitPoints,
        degree: d,
        nvars: n,
        convex: false,
        seed: None,
        description: format!("{} points, degree {d}", points.len()),
    };
    Ok(Certificate {
        v: GramForm::new(full, big)?,
        multipliers: Vec::new(),
        objective: sol.objective,
        status: sol.status,
        kkt: sol.kkt.clone(),
        unbounded: sol.unbounded_hint,
        meta,
    })
}

fn embed_gram(
    small: &MonomialBasis,
    mat: &DMatrix<f64>,
    big: &MonomialBasis,
) -> Result<DMatrix<f64>> {
    let mut out = DMatrix::zeros(big.len(), big.len());
    let pos: Vec<usize> = small
        .elements()
        .iter()
        .map(|m| {
            big.elements()
                .binary_search(m)
                .map_err(|_| Error::ShapeMismatch("basis embedding failed".into()))
        })
        .collect::<Result<_>>()?;
    for (i, &pi) in pos.iter().enumerate() {
        for (j, &pj) in pos.iter().enumerate() {
            out[(pi, pj)] = mat[(i, j)];
        }
    }
    Ok(out)
}

/// Assemble the union-containment program: one Putinar identity per union
/// part, with per-inequality multipliers, and optionally the Hessian-SOS
/// convexity tightening. Returns the program and the `V` block handle.
pub fn build_union_program(target: &SetUnion, d: u32, convex: bool) -> Result<(SosProgram, BlockId)> {
    let n = target.nvars();
    let mut prog = SosProgram::new(n);
    let v = prog.declare_gram(MonomialBasis::new(n, d), v_label())?;
    prog.set_logdet_objective(v)?;
    let one = AffineExpr::constant(n, Polynomial::constant(n, 1.0));
    for (i, part) in target.parts().iter().enumerate() {
        let mut expr = one.sub(&prog.gram_expr(v))?;
        for (j, g) in part.inequalities().iter().enumerate() {
            let h = multiplier_halfdeg(2 * d, g.degree());
            let s = prog.declare_multiplier(n, h, format!("s{}_{}", i + 1, j + 1))?;
            expr = expr.sub(&prog.gram_expr_times(s, Some(g)))?;
        }
        let wit_deg = part
            .inequalities()
            .iter()
            .map(|g| (multiplier_halfdeg(2 * d, g.degree()) * 2 + g.degree()).div_ceil(2))
            .chain([d])
            .max()
            .unwrap();
        prog.add_sos_identity(expr, MonomialBasis::new(n, wit_deg), format!("w{}", i + 1))?;
    }
    if convex {
        prog.add_hessian_sos(v, d.saturating_sub(1), "hess")?;
    }
    Ok((prog, v))
}

/// Fit a sublevel set containing a union of semialgebraic sets.
pub fn fit_union(target: &SetUnion, d: u32, convex: bool, opts: &SolverOptions) -> Result<Certificate> {
    if d < 1 {
        return Err(Error::InvalidParameter("degree must be at least 1".into()));
    }
    // Solve in domain-normalized coordinates x-bar = x / rho.
    let rho = union_scale(target);
    let scaled_parts: Vec<SemialgebraicSet> = target
        .parts()
        .iter()
        .map(|p| {
            SemialgebraicSet::new(
                p.nvars(),
                p.inequalities().iter().map(|g| scale_domain(g, rho)).collect(),
            )
        })
        .collect::<Result<_>>()?;
    let scaled_target = SetUnion::new(scaled_parts)?;
    let (prog, v) = build_union_program(&scaled_target, d, convex)?;
    let sdp = prog.compile()?;
    let sol = solve(&sdp, opts)?;
    let description = format!("union of {} parts, degree {d}, convex={convex}", target.parts().len());
    match sol.status {
        SolveStatus::Optimal => {}
        SolveStatus::Infeasible => {
            return Err(Error::Infeasible(format!(
                "union containment infeasible at degree {d} ({description})"
            )))
        }
        other => return Err(Error::Solver(format!("union fit failed: {other:?}"))),
    }
    let meta = CertificateMeta {
        program: ProgramKind::FitUnion,
        degree: d,
        nvars: target.nvars(),
        convex,
        seed: None,
        description,
    };
    Ok(package_scaled(&prog, v, sol, meta, rho))
}

/// Orient a single-inequality seed so `{g >= 0}` is the bounded side when
/// the leading quadratic form is definite. Returns the used polynomial and
/// whether it was flipped.
pub fn normalize_seed(set: &SemialgebraicSet) -> Result<(Polynomial, bool)> {
    let g = match set.inequalities() {
        [g] => g.clone(),
        other => {
            return Err(Error::InvalidParameter(format!(
                "attractor seed must have exactly one inequality, got {}",
                other.len()
            )))
        }
    };
    if g.degree() != 2 {
        return Ok((g, false));
    }
    let n = g.nvars();
    let mut q: DMatrix<f64> = DMatrix::zeros(n, n);
    for (m, &c) in g.terms() {
        if m.degree() != 2 {
            continue;
        }
        let idx: Vec<usize> = m
            .exponents()
            .iter()
            .enumerate()
            .flat_map(|(i, &e)| std::iter::repeat(i).take(e as usize))
            .collect();
        let (i, j) = (idx[0], idx[1]);
        if i == j {
            q[(i, i)] += c;
        } else {
            q[(i, j)] += c / 2.0;
            q[(j, i)] += c / 2.0;
        }
    }
    let eig = q.symmetric_eigen();
    let min = eig.eigenvalues.min();
    if min > 0.0 {
        // positive definite leading form: {g >= 0} is the exterior side
        Ok((g.neg(), true))
    } else {
        Ok((g, false))
    }
}

/// Assemble the attractor program for a normalized seed inequality `g`:
/// `(1 - V) - s1 g` and `-grad(V).f + s2 g` both SOS.
pub fn build_attractor_program(sys: &OdeSystem, g: &Polynomial, d: u32) -> Result<(SosProgram, BlockId)> {
    let n = sys.nvars();
    if g.nvars() != n {
        return Err(Error::DimensionMismatch(format!(
            "seed over {} variables for a {}-state system",
            g.nvars(),
            n
        )));
    }
    let mut prog = SosProgram::new(n);
    let v = prog.declare_gram(MonomialBasis::new(n, d), v_label())?;
    prog.set_logdet_objective(v)?;

    // Containment: (1 - V) - s1 g in SOS.
    let h1 = multiplier_halfdeg(2 * d, g.degree());
    let s1 = prog.declare_multiplier(n, h1, "s1")?;
    let expr1 = AffineExpr::constant(n, Polynomial::constant(n, 1.0))
        .sub(&prog.gram_expr(v))?
        .sub(&prog.gram_expr_times(s1, Some(g)))?;
    let w1_deg = (2 * d).max(2 * h1 + g.degree()).div_ceil(2);
    prog.add_sos_identity(expr1, MonomialBasis::new(n, w1_deg), "w1")?;

    // Decrease: -grad(V).f + s2 g in SOS.
    let target2 = 2 * d - 1 + sys.degree();
    let h2 = multiplier_halfdeg(target2, g.degree());
    let s2 = prog.declare_multiplier(n, h2, "s2")?;
    let expr2 = prog
        .lie_derivative_expr(v, sys.components())?
        .scale(-1.0)
        .add(&prog.gram_expr_times(s2, Some(g)))?;
    let w2_deg = target2.max(2 * h2 + g.degree()).div_ceil(2);
    prog.add_sos_identity(expr2, MonomialBasis::new(n, w2_deg), "w2")?;
    Ok((prog, v))
}

/// Fit a sublevel set certified (by the Lyapunov-type identities) to contain
/// the system's attractor. `seed` must be a single-inequality set; it is
/// normalized to its bounded orientation before entering the identities.
pub fn fit_attractor(
    sys: &OdeSystem,
    seed: &SemialgebraicSet,
    d: u32,
    opts: &SolverOptions,
) -> Result<Certificate> {
    if d < 1 {
        return Err(Error::InvalidParameter("degree must be at least 1".into()));
    }
    if seed.nvars() != sys.nvars() {
        return Err(Error::DimensionMismatch(format!(
            "seed over {} variables for a {}-state system",
            seed.nvars(),
            sys.nvars()
        )));
    }
    let (g, flipped) = normalize_seed(seed)?;
    // Solve in domain-normalized coordinates x-bar = x / rho.
    let rho = crate::sets::quadratic_bound_radius(&g).unwrap_or(1.0).max(1.0);
    let g_scaled = scale_domain(&g, rho);
    let sys_scaled = sys.affine_change(rho, &vec![0.0; sys.nvars()])?;
    let (prog, v) = build_attractor_program(&sys_scaled, &g_scaled, d)?;
    let sdp = prog.compile()?;
    let sol = solve(&sdp, opts)?;
    let description = format!(
        "attractor fit, degree {d}, seed deg {}{}",
        g.degree(),
        if flipped { " (seed flipped to bounded orientation)" } else { "" }
    );
    match sol.status {
        SolveStatus::Optimal => {}
        SolveStatus::Infeasible => {
            return Err(Error::Infeasible(format!(
                "attractor program infeasible at degree {d} for seed `{g}`"
            )))
        }
        other => return Err(Error::Solver(format!("attractor fit failed: {other:?}"))),
    }
    let meta = CertificateMeta {
        program: ProgramKind::FitAttractor,
        degree: d,
        nvars: sys.nvars(),
        convex: false,
        seed: Some(g),
        description,
    };
    Ok(package_scaled(&prog, v, sol, meta, rho))
}

/// Package a solution solved in scaled coordinates, mapping every Gram back
/// to the original domain.
fn package_scaled(
    prog: &SosProgram,
    v: BlockId,
    sol: SdpSolution,
    meta: CertificateMeta,
    rho: f64,
) -> Certificate {
    let mut cert = package(prog, v, sol, meta);
    if rho != 1.0 {
        cert.v = descale_gram(&cert.v, rho);
        for (_, g) in &mut cert.multipliers {
            *g = descale_gram(g, rho);
        }
    }
    cert
}

fn package(prog: &SosProgram, v: BlockId, sol: SdpSolution, meta: CertificateMeta) -> Certificate {
    let v_basis = prog.block_basis(v).clone();
    let mut multipliers = Vec::new();
    for b in 0..prog.num_blocks() {
        if b == v.0 {
            continue;
        }
        let id = BlockId(b);
        let basis = prog.block_basis(id).clone();
        let gram = GramForm::new(basis, sol.blocks[b].clone()).expect("block shape");
        multipliers.push((prog.block_label(id).to_string(), gram));
    }
    Certificate {
        v: GramForm::new(v_basis, sol.blocks[v.0].clone()).expect("block shape"),
        multipliers,
        objective: sol.objective,
        status: sol.status,
        kkt: sol.kkt,
        unbounded: sol.unbounded_hint,
        meta,
    }
}

/// Bisection over ball radii: find the smallest radius in `[r_lo, r_hi]`
/// (to within `rtol`) whose ball seed keeps the attractor program feasible.
/// Requires infeasibility at `r_lo` and feasibility at `r_hi`.
pub fn bisect_radius(
    sys: &OdeSystem,
    d: u32,
    r_lo: f64,
    r_hi: f64,
    rtol: f64,
    opts: &SolverOptions,
) -> Result<(f64, Certificate)> {
    if !(r_lo > 0.0 && r_lo < r_hi && rtol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < r_lo < r_hi and rtol > 0 (got {r_lo}, {r_hi}, {rtol})"
        )));
    }
    let center = vec![0.0; sys.nvars()];
    let attempt = |r: f64| -> Result<Certificate> {
        let seed = crate::sets::make_ball(&center, r)?;
        fit_attractor(sys, &seed, d, opts)
    };
    let hi_cert = attempt(r_hi)?;
    if r_hi - r_lo <= rtol {
        return Ok((r_hi, hi_cert));
    }
    match attempt(r_lo) {
        Err(Error::Infeasible(_)) => {}
        Ok(_) => {
            return Err(Error::InvalidParameter(format!(
                "bisection precondition violated: feasible at both endpoints ({r_lo}, {r_hi})"
            )))
        }
        Err(e) => return Err(e),
    }
    let mut lo = r_lo;
    let mut hi = r_hi;
    let mut best = hi_cert;
    while hi - lo > rtol {
        let mid = 0.5 * (lo + hi);
        match attempt(mid) {
            Ok(cert) => {
                hi = mid;
                best = cert;
            }
            Err(Error::Infeasible(_)) => lo = mid,
            Err(e) => return Err(e),
        }
    }
    Ok((hi, best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::OdeSystem;
    use crate::sets::{make_ball, make_ring_exterior, sample_set, Box as SampleBox};

    fn opts() -> SolverOptions {
        SolverOptions::fitting()
    }

    #[test]
    fn fit_points_four_points_recovers_unit_circle() {
        let pts = vec![
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ];
        let cert = fit_points(&pts, 1, &SolverOptions { tol: 1e-9, ..opts() }).unwrap();
        assert_eq!(cert.status, SolveStatus::Optimal);
        let a = cert.v.matrix();
        // constant row/column zero, quadratic part the identity
        assert_eq!(a[(0, 0)], 0.0);
        assert_eq!(a[(0, 1)], 0.0);
        assert!((a[(1, 1)] - 1.0).abs() <= 1e-4, "a_x2 = {}", a[(1, 1)]);
        assert!((a[(2, 2)] - 1.0).abs() <= 1e-4);
        assert!(a[(1, 2)].abs() <= 1e-4);
        assert!((cert.eval_v(&[1.0, 0.0]).unwrap() - 1.0).abs() <= 1e-4);
        assert!(cert.objective.abs() <= 1e-4);
    }

    #[test]
    fn fit_points_scale_covariance_on_circles() {
        let circle = |r: f64| -> Vec<Vec<f64>> {
            (0..8)
                .map(|k| {
                    let th = k as f64 * std::f64::consts::FRAC_PI_4;
                    vec![r * th.cos(), r * th.sin()]
                })
                .collect()
        };
        let tight = SolverOptions { tol: 1e-9, ..opts() };
        let c1 = fit_points(&circle(1.0), 1, &tight).unwrap();
        let c2 = fit_points(&circle(2.0), 1, &tight).unwrap();
        for i in 1..3 {
            for j in 1..3 {
                let want = c1.v.matrix()[(i, j)] / 4.0;
                let got = c2.v.matrix()[(i, j)];
                assert!((want - got).abs() <= 1e-5, "({i},{j}): {got} vs {want}");
            }
        }
        // octagon symmetry pins the quadratic part to I/4
        assert!((c2.v.matrix()[(1, 1)] - 0.25).abs() <= 1e-5);
    }

    #[test]
    fn fit_points_single_origin_is_unbounded() {
        let cert = fit_points(&[vec![0.0, 0.0]], 1, &opts()).unwrap();
        assert!(cert.unbounded);
        assert_eq!(cert.status, SolveStatus::IterationLimit);
    }

    #[test]
    fn fit_union_single_disk_contains_it() {
        let disk: SetUnion = make_ball(&[0.0, 0.0], 1.0).unwrap().into();
        let cert = fit_union(&disk, 1, false, &opts()).unwrap();
        assert_eq!(cert.status, SolveStatus::Optimal);
        assert!(cert.eval_v(&[0.0, 0.0]).unwrap() <= 1.0 + 1e-6);
        let samples = sample_set(&disk, &SampleBox::symmetric(2, 1.0), 200, 7).unwrap();
        for p in &samples {
            let v = cert.eval_v(p).unwrap();
            assert!(v <= 1.0 + 1e-6, "V({p:?}) = {v}");
        }
        assert!(cert.min_gram_eigenvalue() >= -1e-8);
    }

    #[test]
    fn fit_attractor_linear_decay_with_flipped_seed() {
        // x' = -x with the ring-exterior seed: normalization flips it to the
        // unit ball and the program certifies decrease outside the ball.
        let sys = OdeSystem::new(vec![
            Polynomial::parse("-1*x1", 2).unwrap(),
            Polynomial::parse("-1*x2", 2).unwrap(),
        ])
        .unwrap();
        let seed = make_ring_exterior(1.0).unwrap();
        let cert = fit_attractor(&sys, &seed, 1, &opts()).unwrap();
        assert_eq!(cert.status, SolveStatus::Optimal);
        let g = cert.meta.seed.clone().unwrap();
        // flipped to the bounded orientation: g(0) > 0, g(2,0) < 0
        assert!(g.eval(&[0.0, 0.0]).unwrap() > 0.0);
        assert!(g.eval(&[2.0, 0.0]).unwrap() < 0.0);
        // V stays within level 1 on the seed ball and decreases outside it
        assert!(cert.eval_v(&[0.0, 0.0]).unwrap() <= 1.0 + 1e-7);
        let vpoly = cert.v.expand();
        let grad = vpoly.gradient();
        for p in [[1.5, 0.3], [-2.0, 1.0], [0.0, 3.0], [2.5, -2.5]] {
            let mut vdot = 0.0;
            for (k, gk) in grad.iter().enumerate() {
                vdot += gk.eval(&p).unwrap() * sys.components()[k].eval(&p).unwrap();
            }
            assert!(vdot <= 1e-9, "V increases along the flow at {p:?}: {vdot}");
        }
    }

    #[test]
    fn bisect_short_interval_returns_hi() {
        let sys = OdeSystem::new(vec![
            Polynomial::parse("-1*x1", 2).unwrap(),
            Polynomial::parse("-1*x2", 2).unwrap(),
        ])
        .unwrap();
        let (r, cert) = bisect_radius(&sys, 1, 0.9, 1.0, 0.2, &opts()).unwrap();
        assert_eq!(r, 1.0);
        assert_eq!(cert.status, SolveStatus::Optimal);
    }

    #[test]
    fn bisect_rejects_feasible_lower_endpoint() {
        // For x' = -x every ball seed is feasible, so bisection must refuse.
        let sys = OdeSystem::new(vec![
            Polynomial::parse("-1*x1", 2).unwrap(),
            Polynomial::parse("-1*x2", 2).unwrap(),
        ])
        .unwrap();
        let err = bisect_radius(&sys, 1, 0.5, 1.5, 0.05, &opts());
        assert!(matches!(err, Err(Error::InvalidParameter(_))), "{err:?}");
    }

    #[test]
    fn bisect_rejects_bad_interval() {
        let sys = OdeSystem::new(vec![Polynomial::parse("-1*x1", 1).unwrap()]).unwrap();
        assert!(bisect_radius(&sys, 1, 1.0, 0.5, 0.1, &opts()).is_err());
    }
}
