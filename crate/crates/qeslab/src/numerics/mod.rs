//! Self-contained numerical kernels: adaptive quadrature (proper and
//! improper), bracketed root-finding, a small dense eigensolver and an
//! adaptive Runge-Kutta integrator over complex-valued states.
//!
//! Every kernel is a pure function of its inputs and is safe to call
//! concurrently.

mod eigen;
mod ode;
mod quad;
mod roots;

pub use eigen::{
    eigensystem_small, real_hessenberg_eigenvalues, real_inverse_iteration, EigenError,
    EigenSystem, REALITY_SNAP_TOL,
};
pub use ode::{integrate_ode, integrate_ode_path, OdeError, OdeOptions, OdeSolution};
pub use quad::{
    quad_adaptive, quad_adaptive_complex, quad_improper, quad_improper_complex, CompactifyMap,
    DecayHint, Endpoints, Envelope, IntegrandValue, QuadError, QuadratureResult,
};
pub use roots::{find_root, RootError};
