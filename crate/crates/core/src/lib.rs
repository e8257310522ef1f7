//! Spectral laboratory for normal parabolic equations (NPE) on the torus
//! 𝕋³ = (ℝ/2πℤ)³.
//!
//! The crate is organised bottom-up:
//!
//! * [`quad`] – adaptive Simpson and Gauss–Kronrod quadrature.
//! * [`heat1d`] – windowed trig polynomials, their exact Fourier
//!   coefficients and 1D periodic heat solutions.
//! * [`spectral`] – truncated divergence-free Fourier fields, curl,
//!   curl⁻¹, heat propagator, the trilinear form Ψ and the functional Φ.
//! * [`control`] – the compactly supported starting control built from
//!   tensor products of 1D coefficients.
//! * [`feedback`] – the low-mode feedback operator (Poisson solves on a
//!   ball, Gram matrix, Cholesky).
//! * [`npe`] – trajectories via the explicit solution formula, blow-up
//!   detection, classification and the stabilization loop.
//! * [`series`] – coefficient tables, sign maps, ratio lemmas, ODE
//!   identities, lower-bound certificates and the 3D→1D reduction.

pub mod control;
pub mod error;
pub mod feedback;
pub mod heat1d;
pub mod npe;
pub mod quad;
pub mod series;
pub mod spectral;

pub use error::{Error, Result};
