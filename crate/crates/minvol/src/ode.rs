//! Polynomial ODE systems, affine coordinate changes and fixed-step RK4.

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Autonomous polynomial vector field `x' = f(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSystem {
    nvars: usize,
    f: Vec<Polynomial>,
}

impl OdeSystem {
    pub fn new(f: Vec<Polynomial>) -> Result<Self> {
        let nvars = f.len();
        if nvars == 0 {
            return Err(Error::InvalidParameter("vector field must have at least one component".into()));
        }
        for c in &f {
            if c.nvars() != nvars {
                return Err(Error::DimensionMismatch(format!(
                    "field component over {} variables in a {}-state system",
                    c.nvars(),
                    nvars
                )));
            }
        }
        Ok(OdeSystem { nvars, f })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.f
    }

    pub fn degree(&self) -> u32 {
        self.f.iter().map(Polynomial::degree).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        for (i, c) in self.f.iter().enumerate() {
            out[i] = c.eval(x)?;
        }
        Ok(())
    }

    /// Rewrite the field in the coordinates `y = (x - offset) / scale`,
    /// i.e. return `y' = f(scale*y + offset) / scale`.
    pub fn affine_change(&self, scale: f64, offset: &[f64]) -> Result<OdeSystem> {
        if scale == 0.0 {
            return Err(Error::InvalidParameter("coordinate scale must be nonzero".into()));
        }
        if offset.len() != self.nvars {
            return Err(Error::DimensionMismatch(format!(
                "offset of length {} for a {}-state system",
                offset.len(),
                self.nvars
            )));
        }
        let subs: Vec<Polynomial> = (0..self.nvars)
            .map(|i| {
                Polynomial::variable(self.nvars, i)
                    .scale(scale)
                    .add(&Polynomial::constant(self.nvars, offset[i]))
            })
            .collect::<Result<_>>()?;
        let f = self
            .f
            .iter()
            .map(|c| Ok(c.substitute(&subs)?.scale(1.0 / scale)))
            .collect::<Result<Vec<_>>>()?;
        OdeSystem::new(f)
    }
}

/// Van der Pol oscillator: `x1' = x2`, `x2' = -x1 + x2 (1 - x1^2)`.
pub fn van_der_pol() -> OdeSystem {
    let f1 = Polynomial::parse("x2", 2).unwrap();
    let f2 = Polynomial::parse("-x1 + x2 - x1^2*x2", 2).unwrap();
    OdeSystem::new(vec![f1, f2]).unwrap()
}

/// Lorenz system with parameters (sigma, rho, beta).
pub fn lorenz(sigma: f64, rho: f64, beta: f64) -> OdeSystem {
    let n = 3;
    let x1 = Polynomial::variable(n, 0);
    let x2 = Polynomial::variable(n, 1);
    let x3 = Polynomial::variable(n, 2);
    let f1 = x2.sub(&x1).unwrap().scale(sigma);
    let f2 = x1
        .scale(rho)
        .sub(&x2)
        .unwrap()
        .sub(&x1.mul(&x3).unwrap())
        .unwrap();
    let f3 = x1.mul(&x2).unwrap().sub(&x3.scale(beta)).unwrap();
    OdeSystem::new(vec![f1, f2, f3]).unwrap()
}

/// Classic Lorenz parameters sigma = 10, rho = 28, beta = 8/3.
pub fn lorenz_classic() -> OdeSystem {
    lorenz(10.0, 28.0, 8.0 / 3.0)
}

/// Sampled solution of an ODE.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub step: f64,
    pub method: &'static str,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory has at least the initial state")
    }

    /// States sampled at t >= t_min.
    pub fn states_after(&self, t_min: f64) -> impl Iterator<Item = (f64, &[f64])> {
        self.times
            .iter()
            .zip(&self.states)
            .filter(move |(t, _)| **t >= t_min)
            .map(|(t, s)| (*t, s.as_slice()))
    }
}

const DIVERGENCE_GUARD: f64 = 1e12;

/// Classical fixed-step fourth-order Runge-Kutta from `x0` over `[0, T]`.
/// Produces `ceil(T/h) + 1` samples. Errors out if the state norm passes
/// the overflow guard (1e12).
pub fn integrate_rk4(sys: &OdeSystem, x0: &[f64], h: f64, t_final: f64) -> Result<Trajectory> {
    if h <= 0.0 || t_final < h {
        return Err(Error::InvalidParameter(format!(
            "need h > 0 and T >= h (got h = {h}, T = {t_final})"
        )));
    }
    if x0.len() != sys.nvars() {
        return Err(Error::DimensionMismatch(format!(
            "initial state of length {} for a {}-state system",
            x0.len(),
            sys.nvars()
        )));
    }
    let steps = (t_final / h).ceil() as usize;
    let n = sys.nvars();
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut x = x0.to_vec();
    times.push(0.0);
    states.push(x.clone());

    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];

    for step in 1..=steps {
        sys.eval(&x, &mut k1)?;
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        sys.eval(&tmp, &mut k2)?;
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        sys.eval(&tmp, &mut k3)?;
        for i in 0..n {
            tmp[i] = x[i] + h * k3[i];
        }
        sys.eval(&tmp, &mut k4)?;
        for i in 0..n {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() || norm > DIVERGENCE_GUARD {
            return Err(Error::Solver(format!(
                "trajectory diverged at t = {} (|x| = {norm:e})",
                step as f64 * h
            )));
        }
        times.push(step as f64 * h);
        states.push(x.clone());
    }
    Ok(Trajectory { times, states, step: h, method: "rk4" })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decay_matches_exponential() {
        let sys = OdeSystem::new(vec![Polynomial::parse("-1*x1", 1).unwrap()]).unwrap();
        let traj = integrate_rk4(&sys, &[1.0], 0.01, 1.0).unwrap();
        let end = traj.final_state()[0];
        assert!((end - (-1.0f64).exp()).abs() <= 1e-8, "got {end}");
        assert_eq!(traj.len(), 101);
    }

    #[test]
    fn zero_field_is_constant() {
        let sys = OdeSystem::new(vec![Polynomial::zero(2), Polynomial::zero(2)]).unwrap();
        let traj = integrate_rk4(&sys, &[0.3, -0.4], 0.1, 2.0).unwrap();
        for (_, s) in traj.states_after(0.0) {
            assert_eq!(s, &[0.3, -0.4]);
        }
    }

    #[test]
    fn rk4_is_fourth_order() {
        // halving h should reduce terminal error by about 16x on x' = -x
        let sys = OdeSystem::new(vec![Polynomial::parse("-1*x1", 1).unwrap()]).unwrap();
        let exact = (-1.0f64).exp();
        let err = |h: f64| {
            let traj = integrate_rk4(&sys, &[1.0], h, 1.0).unwrap();
            (traj.final_state()[0] - exact).abs()
        };
        let ratio = err(0.02) / err(0.01);
        assert!((12.0..=20.0).contains(&ratio), "order ratio {ratio}");
    }

    #[test]
    fn divergence_guard_trips() {
        // x' = x^2 from x=1 blows up at t=1
        let sys = OdeSystem::new(vec![Polynomial::parse("x1^2", 1).unwrap()]).unwrap();
        assert!(integrate_rk4(&sys, &[1.0], 1e-3, 2.0).is_err());
    }

    #[test]
    fn affine_change_fixes_linear_systems() {
        let sys = OdeSystem::new(vec![
            Polynomial::parse("-1*x1", 2).unwrap(),
            Polynomial::parse("-1*x2", 2).unwrap(),
        ])
        .unwrap();
        let changed = sys.affine_change(2.0, &[0.0, 0.0]).unwrap();
        assert_eq!(changed, sys);
    }

    #[test]
    fn lorenz_scaled_equilibria() {
        // equilibria (0,0,0) and (±sqrt(72), ±sqrt(72), 27) under y = (x - (0,0,25))/50
        let sys = lorenz_classic();
        let scaled = sys.affine_change(50.0, &[0.0, 0.0, 25.0]).unwrap();
        let mut out = vec![0.0; 3];

        scaled.eval(&[0.0, 0.0, -0.5], &mut out).unwrap();
        assert!(out.iter().all(|v| v.abs() < 1e-12), "origin image not an equilibrium: {out:?}");

        let s = 72f64.sqrt() / 50.0;
        for sign in [1.0, -1.0] {
            scaled.eval(&[sign * s, sign * s, 1.0 / 25.0], &mut out).unwrap();
            assert!(
                out.iter().all(|v| v.abs() < 1e-10),
                "mapped equilibrium drifts: {out:?}"
            );
        }
    }

    #[test]
    fn affine_round_trip_restores_field() {
        let sys = lorenz_classic();
        let offset = [0.0, 0.0, 25.0];
        let fwd = sys.affine_change(50.0, &offset).unwrap();
        // inverse change: x = 50*y + offset, i.e. scale 1/50, offset -offset/50
        let back_offset: Vec<f64> = offset.iter().map(|o| -o / 50.0).collect();
        let back = fwd.affine_change(1.0 / 50.0, &back_offset).unwrap();
        for (orig, rt) in sys.components().iter().zip(back.components()) {
            let diff = orig.sub(rt).unwrap();
            assert!(diff.max_abs_coeff() <= 1e-12, "coefficient drift {}", diff.max_abs_coeff());
        }
    }
}
