//! Detector-to-detector communication through a massless scalar field in
//! Minkowski spacetime, and the thermodynamic price of reading the signal.
//!
//! The pipeline, end to end:
//!
//! 1. Two localized detectors (Alice and Bob) couple to the field through
//!    smooth spacetime smearing functions f_X = lambda_X chi(t) F(x)
//!    ([`profiles`]).
//! 2. The smeared commutator pairing Delta(f_A, f_B) and Bob's vacuum
//!    Wightman norm W(f_B, f_B) are computed by quadrature, either in
//!    momentum space or through the advanced/retarded kernels in position
//!    space ([`field`], [`quadrature`]).
//! 3. The classical capacity of the induced channel,
//!    C = S(1/2 + nu_B/2 |cos 2*Delta|) - S(1/2 + nu_B/2) with
//!    nu_B = exp(-2 W), follows in closed form ([`channel`]).
//! 4. Bob erases the received bits into a finite reservoir (Landauer heat
//!    Q = T_c C ln 2), runs a Carnot engine across the induced gradient,
//!    and the second law pins a lower bound on his coupling:
//!    lambda_B^2 >= tau * eta * Q ([`thermo`]).
//!
//! Causal structure is checked independently ([`geometry`]): strictly
//! spacelike detector supports must give a vanishing pairing and zero
//! capacity.
//!
//! [`scenario`] ties the stages together behind a strict TOML scenario
//! schema with deterministic, machine-readable reports and parameter
//! sweeps; the `lightcone` binary in the companion CLI crate is a thin
//! wrapper around it.

pub mod channel;
pub mod field;
pub mod geometry;
pub mod profiles;
pub mod quadrature;
pub mod scenario;
pub mod selftest;
pub mod thermo;

pub use scenario::{load_scenario, run_scenario, sweep, RunReport, Scenario, ScenarioError};
