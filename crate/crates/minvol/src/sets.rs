//! Basic semialgebraic sets `{x : g_j(x) >= 0}`, finite unions, constructors
//! for the example geometries, point membership and seeded rejection sampling.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Conjunction of polynomial inequalities, all with the `g(x) >= 0` convention.
/// An empty inequality list is all of R^n.
#[derive(Debug, Clone, PartialEq)]
pub struct SemialgebraicSet {
    nvars: usize,
    ineqs: Vec<Polynomial>,
}

impl SemialgebraicSet {
    pub fn new(nvars: usize, ineqs: Vec<Polynomial>) -> Result<Self> {
        for g in &ineqs {
            if g.nvars() != nvars {
                return Err(Error::DimensionMismatch(format!(
                    "inequality over {} variables in a {}-variable set",
                    g.nvars(),
                    nvars
                )));
            }
        }
        Ok(SemialgebraicSet { nvars, ineqs })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn inequalities(&self) -> &[Polynomial] {
        &self.ineqs
    }

    /// Membership with a non-negative slack: all g_j(x) >= -slack.
    pub fn contains_with_slack(&self, x: &[f64], slack: f64) -> Result<bool> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch(format!(
                "point of length {} against {}-variable set",
                x.len(),
                self.nvars
            )));
        }
        for g in &self.ineqs {
            if g.eval(x)? < -slack {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        self.contains_with_slack(x, 0.0)
    }
}

/// Finite union of semialgebraic sets over a common variable count.
#[derive(Debug, Clone, PartialEq)]
pub struct SetUnion {
    parts: Vec<SemialgebraicSet>,
}

impl SetUnion {
    pub fn new(parts: Vec<SemialgebraicSet>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("union needs at least one part".into()))?;
        let nvars = first.nvars();
        if parts.iter().any(|p| p.nvars() != nvars) {
            return Err(Error::DimensionMismatch(
                "union parts disagree on variable count".into(),
            ));
        }
        Ok(SetUnion { parts })
    }

    pub fn nvars(&self) -> usize {
        self.parts[0].nvars()
    }

    pub fn parts(&self) -> &[SemialgebraicSet] {
        &self.parts
    }

    pub fn contains_with_slack(&self, x: &[f64], slack: f64) -> Result<bool> {
        for p in &self.parts {
            if p.contains_with_slack(x, slack)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        self.contains_with_slack(x, 0.0)
    }
}

impl From<SemialgebraicSet> for SetUnion {
    fn from(s: SemialgebraicSet) -> Self {
        SetUnion { parts: vec![s] }
    }
}

/// Closed ball: `{x : r^2 - sum (x_i - c_i)^2 >= 0}`.
pub fn make_ball(center: &[f64], r: f64) -> Result<SemialgebraicSet> {
    if r <= 0.0 {
        return Err(Error::InvalidParameter(format!("ball radius {r} must be positive")));
    }
    let n = center.len();
    let mut g = Polynomial::constant(n, r * r);
    for (i, &c) in center.iter().enumerate() {
        let xi = Polynomial::variable(n, i);
        let shifted = xi.sub(&Polynomial::constant(n, c))?;
        g = g.sub(&shifted.mul(&shifted)?)?;
    }
    SemialgebraicSet::new(n, vec![g])
}

/// Complement of the open ball of radius `r` about the origin (n = 2):
/// `{x : x1^2 + x2^2 - r^2 >= 0}`.
pub fn make_ring_exterior(r: f64) -> Result<SemialgebraicSet> {
    if r <= 0.0 {
        return Err(Error::InvalidParameter(format!("radius {r} must be positive")));
    }
    let n = 2;
    let mut g = Polynomial::constant(n, -r * r);
    for i in 0..n {
        let xi = Polynomial::variable(n, i);
        g = g.add(&xi.mul(&xi)?)?;
    }
    SemialgebraicSet::new(n, vec![g])
}

/// Ellipsoid in R^3 rotated about the x3 axis by `theta` radians:
/// `{x : 1 - (cos t x1 - sin t x2 - c1)^2/r1^2
///         - (sin t x1 + cos t x2 - c2)^2/r2^2
///         - (x3 - c3)^2/r3^2 >= 0}`, expanded to a polynomial.
pub fn make_rotated_ellipsoid(center: &[f64; 3], radii: &[f64; 3], theta: f64) -> Result<SemialgebraicSet> {
    if radii.iter().any(|&r| r <= 0.0) {
        return Err(Error::InvalidParameter("ellipsoid radii must be positive".into()));
    }
    let n = 3;
    let (s, c) = theta.sin_cos();
    let x1 = Polynomial::variable(n, 0);
    let x2 = Polynomial::variable(n, 1);
    let x3 = Polynomial::variable(n, 2);

    let u = x1
        .scale(c)
        .sub(&x2.scale(s))?
        .sub(&Polynomial::constant(n, center[0]))?;
    let v = x1
        .scale(s)
        .add(&x2.scale(c))?
        .sub(&Polynomial::constant(n, center[1]))?;
    let w = x3.sub(&Polynomial::constant(n, center[2]))?;

    let mut g = Polynomial::constant(n, 1.0);
    g = g.sub(&u.mul(&u)?.scale(1.0 / (radii[0] * radii[0])))?;
    g = g.sub(&v.mul(&v)?.scale(1.0 / (radii[1] * radii[1])))?;
    g = g.sub(&w.mul(&w)?.scale(1.0 / (radii[2] * radii[2])))?;
    SemialgebraicSet::new(n, vec![g])
}

/// Outer radius bound for a single-inequality quadratic set `{g >= 0}`
/// whose quadratic part is negative definite: completing the square gives
/// `|x| <= |x*| + sqrt(g(x*) / lambda_min(-Q))`. Returns `None` for other
/// shapes (unbounded or not quadratic).
pub fn quadratic_bound_radius(g: &Polynomial) -> Option<f64> {
    use nalgebra::{DMatrix, DVector};
    if g.degree() != 2 {
        return None;
    }
    let n = g.nvars();
    let mut q: DMatrix<f64> = DMatrix::zeros(n, n);
    let mut lin: DVector<f64> = DVector::zeros(n);
    for (m, &c) in g.terms() {
        match m.degree() {
            2 => {
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
            1 => {
                let i = m.exponents().iter().position(|&e| e == 1).unwrap();
                lin[i] += c;
            }
            _ => {}
        }
    }
    let eig = q.clone().symmetric_eigen();
    let max_eig = eig.eigenvalues.max();
    if max_eig >= 0.0 {
        return None; // not negative definite: unbounded or degenerate
    }
    let center = q.clone().lu().solve(&lin.scale(-0.5))?;
    let g_center = g.eval(center.as_slice()).ok()?;
    if g_center < 0.0 {
        return Some(center.norm()); // empty interior; still a bound
    }
    let lam = -max_eig; // smallest eigenvalue of -Q
    Some(center.norm() + (g_center / lam).sqrt())
}

/// Axis-aligned sampling box.
#[derive(Debug, Clone, PartialEq)]
pub struct Box {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Box {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::InvalidParameter("box bounds must have equal nonzero length".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return Err(Error::InvalidParameter("box must have positive extent on every axis".into()));
        }
        Ok(Box { lo, hi })
    }

    /// Cube `[-h, h]^n`.
    pub fn symmetric(n: usize, h: f64) -> Self {
        Box { lo: vec![-h; n], hi: vec![h; n] }
    }

    pub fn nvars(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&a, &b)| rng.gen_range(a..b))
            .collect()
    }
}

/// Deterministic RNG used by every seeded sampler in the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draw exactly `count` members of `set` by rejection sampling uniform over
/// `bounds`. Fails after `10^6 * count` rejected draws.
pub fn sample_set(set: &SetUnion, bounds: &Box, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if count == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    if bounds.nvars() != set.nvars() {
        return Err(Error::DimensionMismatch(format!(
            "box of dimension {} against {}-variable set",
            bounds.nvars(),
            set.nvars()
        )));
    }
    let mut rng = seeded_rng(seed);
    let mut out = Vec::with_capacity(count);
    let budget = 1_000_000usize.saturating_mul(count);
    let mut draws = 0usize;
    while out.len() < count {
        if draws >= budget {
            return Err(Error::Sampling(format!(
                "rejection sampling exhausted {budget} draws with {} of {count} accepted",
                out.len()
            )));
        }
        draws += 1;
        let x = bounds.sample(&mut rng);
        if set.contains(&x)? {
            out.push(x);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_membership() {
        let b = make_ball(&[0.0, 0.0], 1.0).unwrap();
        assert!(b.contains(&[0.0, 0.0]).unwrap());
        assert!(!b.contains(&[2.0, 0.0]).unwrap());

        let fig1 = make_ball(&[1.5, 0.0], 1.0).unwrap();
        assert!(fig1.contains(&[1.5, 0.0]).unwrap());

        let fig2 = make_ball(&[0.0, 2.0], 1.0).unwrap();
        assert!(!fig2.contains(&[0.0, 0.0]).unwrap());
    }

    #[test]
    fn ball_matches_euclidean_distance() {
        let c = [0.4, -0.2, 1.0];
        let r = 1.3;
        let b = make_ball(&c, r).unwrap();
        let mut rng = seeded_rng(7);
        for _ in 0..500 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let dist: f64 = x
                .iter()
                .zip(&c)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert_eq!(b.contains_with_slack(&x, 1e-9).unwrap(), dist <= r + 1e-9);
        }
    }

    #[test]
    fn ring_exterior_membership() {
        let d = make_ring_exterior(1.75).unwrap();
        assert!(d.contains(&[2.0, 0.0]).unwrap());
        assert!(!d.contains(&[0.0, 0.0]).unwrap());
        let unit = make_ring_exterior(1.0).unwrap();
        assert!(unit.contains(&[1.0, 0.0]).unwrap()); // boundary, g = 0
    }

    #[test]
    fn invalid_radii_rejected() {
        assert!(make_ball(&[0.0], 0.0).is_err());
        assert!(make_ring_exterior(-2.0).is_err());
        assert!(make_rotated_ellipsoid(&[0.0; 3], &[1.0, 0.0, 1.0], 0.0).is_err());
    }

    #[test]
    fn rotated_ellipsoid_center_and_unit_cases() {
        let theta = 60f64.to_radians();
        let e = make_rotated_ellipsoid(&[0.0, 0.0, -0.3], &[0.6, 0.01, 0.05], theta).unwrap();
        assert!(e.contains(&[0.0, 0.0, -0.3]).unwrap());

        let ball = make_rotated_ellipsoid(&[0.0; 3], &[1.0, 1.0, 1.0], 0.0).unwrap();
        let mut rng = seeded_rng(11);
        for _ in 0..200 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let inside = x.iter().map(|v| v * v).sum::<f64>() <= 1.0;
            assert_eq!(ball.contains_with_slack(&x, 1e-12).unwrap(), inside);
        }
    }

    #[test]
    fn rotated_ellipsoid_matches_direct_formula() {
        // oracle: evaluate the quadratic-over-radii formula without expansion
        let c = [0.0, 0.0, -0.3];
        let r = [0.6, 0.01, 0.05];
        let theta = 60f64.to_radians();
        let e = make_rotated_ellipsoid(&c, &r, theta).unwrap();
        let (s, co) = theta.sin_cos();
        let mut rng = seeded_rng(99);
        for _ in 0..1000 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let u = co * x[0] - s * x[1] - c[0];
            let v = s * x[0] + co * x[1] - c[1];
            let w = x[2] - c[2];
            let q = u * u / (r[0] * r[0]) + v * v / (r[1] * r[1]) + w * w / (r[2] * r[2]);
            let direct_inside = q <= 1.0 + 1e-9;
            assert_eq!(e.contains_with_slack(&x, 1e-9).unwrap(), direct_inside, "x = {x:?}");
        }
    }

    #[test]
    fn rotated_ellipsoid_periodic_in_theta() {
        let c = [0.1, -0.2, 0.3];
        let r = [0.5, 0.25, 1.0];
        let theta = 1.1;
        let a = make_rotated_ellipsoid(&c, &r, theta).unwrap();
        let b = make_rotated_ellipsoid(&c, &r, theta + 2.0 * std::f64::consts::PI).unwrap();
        let diff = a.inequalities()[0].sub(&b.inequalities()[0]).unwrap();
        assert!(diff.max_abs_coeff() <= 1e-12, "coefficient drift {}", diff.max_abs_coeff());
    }

    #[test]
    fn union_membership() {
        let fig1 = SetUnion::new(vec![
            make_ball(&[0.0, 0.0], 1.0).unwrap(),
            make_ball(&[1.5, 0.0], 1.0).unwrap(),
            make_ball(&[0.0, 1.5], 1.0).unwrap(),
        ])
        .unwrap();
        // (0.75, 0) lies in the S1/S2 overlap
        assert!(fig1.contains(&[0.75, 0.0]).unwrap());
        // (0.75, 0.75) is in the central pocket: distance ~1.06 to every center
        assert!(!fig1.contains(&[0.75, 0.75]).unwrap());

        let fig2 = SetUnion::new(vec![
            make_ball(&[0.0, 0.0], 1.0).unwrap(),
            make_ball(&[2.0, 0.0], 1.0).unwrap(),
            make_ball(&[0.0, 2.0], 1.0).unwrap(),
        ])
        .unwrap();
        assert!(!fig2.contains(&[3.0, 3.0]).unwrap());
    }

    #[test]
    fn sampling_is_deterministic_and_members_only() {
        let union: SetUnion = make_ball(&[0.0, 0.0], 1.0).unwrap().into();
        let bounds = Box::symmetric(2, 1.0);
        let a = sample_set(&union, &bounds, 100, 42).unwrap();
        let b = sample_set(&union, &bounds, 100, 42).unwrap();
        assert_eq!(a.len(), 100);
        assert_eq!(a, b);
        for x in &a {
            assert!(union.contains(x).unwrap());
        }
    }

    #[test]
    fn quadratic_radius_bounds() {
        let ball = make_ball(&[1.0, 0.0], 2.0).unwrap();
        let r = quadratic_bound_radius(&ball.inequalities()[0]).unwrap();
        assert!((r - 3.0).abs() < 1e-9, "r = {r}");
        let ext = make_ring_exterior(1.0).unwrap();
        assert!(quadratic_bound_radius(&ext.inequalities()[0]).is_none());
    }

    #[test]
    fn sampling_empty_set_fails() {
        let g = Polynomial::parse("-1 - x1^2", 1).unwrap();
        let empty: SetUnion = SemialgebraicSet::new(1, vec![g]).unwrap().into();
        let bounds = Box::symmetric(1, 1.0);
        let err = sample_set(&empty, &bounds, 1, 0);
        assert!(matches!(err, Err(Error::Sampling(_))));
    }
}
