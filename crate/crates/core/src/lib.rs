//! Modulating traveling fronts for a dispersive Swift–Hohenberg equation
//! coupled to a conservation law.
//!
//! The model is
//!
//! ```text
//! ∂t u = −(1+∂x²)² u + ε² α0 u + c_u ∂x³ u + u v + u ∂x u − u³
//! ∂t v = ∂x² v + c_v ∂x v + γ1 ∂x²(u²) + γ2 ∂x(u²)
//! ```
//!
//! The crate provides the linear spatial spectrum of the invading pattern,
//! the bifurcating periodic traveling waves, the reduced (center-manifold)
//! ODEs for the front speed scenarios I–V, heteroclinic shooting, Hopf and
//! torus bifurcation detection, reconstruction of physical front profiles, and
//! a pseudo-spectral PDE solver for direct validation.

pub mod acceptance;
pub mod bifurcation;
pub mod dynamics;
pub mod error;
pub mod front;
pub mod linalg;
pub mod model;
pub mod ode;
pub mod pdesim;
pub mod reduced;
pub mod spectrum;
pub mod wave;

pub use error::{Error, Result};
pub use model::{ModelParams, Scenario, ScenarioTag};
pub use num_complex::Complex64;
