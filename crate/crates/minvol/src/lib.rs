//! Minimum-volume sublevel-set outer approximations.
//!
//! The crate fits polynomial sublevel sets `L(V,1) = {x : V(x) <= 1}` around
//! explicitly given unions of semialgebraic sets and around attractors of
//! polynomial ODEs. Containment is enforced through sum-of-squares
//! certificates (Putinar multipliers for set unions, Lyapunov-type conditions
//! for attractors), the volume of `L(V,1)` is shrunk through a log-det
//! objective on the Gram matrix of `V`, and the resulting
//! determinant-maximization SDPs are solved by a built-in primal barrier
//! interior-point method.
//!
//! Modules, bottom to top:
//! - [`poly`], [`basis`]: sparse polynomial arithmetic, monomial bases,
//!   Gram forms.
//! - [`sets`]: semialgebraic sets, unions, constructors, sampling.
//! - [`sos`]: the SOS-to-SDP compiler (coefficient matching).
//! - [`sdp`], [`solver`], [`sdpa`]: SDP standard form, maxdet barrier
//!   solver, interchange export.
//! - [`ode`]: polynomial vector fields and RK4 integration.
//! - [`programs`]: the fitting workflows (points, unions, attractors,
//!   radius bisection).
//! - [`verify`]: independent numerical verification of certificates.

pub mod basis;
pub mod error;
pub mod ode;
pub mod poly;
pub mod programs;
pub mod sdp;
pub mod sdpa;
pub mod sets;
pub mod solver;
pub mod sos;
pub mod verify;

pub use basis::{GramForm, MonomialBasis};
pub use error::{Error, Result};
pub use ode::{integrate_rk4, OdeSystem, Trajectory};
pub use poly::{Monomial, Polynomial};
pub use sets::{SemialgebraicSet, SetUnion};
pub use solver::{solve, SdpSolution, SolveStatus, SolverOptions};
