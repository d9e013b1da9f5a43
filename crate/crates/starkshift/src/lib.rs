//! Phase shifts imparted on a two-level quantum system by an off-resonant
//! pulsed field.
//!
//! The crate computes the accumulated phase of the initial state three ways:
//!
//! * **exactly**, by adaptive numerical propagation of the Schrödinger
//!   equation ([`dynamics`]), which also serves as the accuracy oracle for
//!   everything else;
//! * **approximately**, through the adiabatic-elimination / adiabatic /
//!   superadiabatic hierarchy ([`approx`]), including loss corrections and
//!   three-state (ladder and V) generalizations;
//! * **analytically**, for hyperbolic-secant pulses, via the Rosen-Zener
//!   solution and its three-state extensions ([`exact`]), which can also be
//!   inverted to design a pulse producing a prescribed gate phase.
//!
//! Batch parameter sweeps, figure-style data sets, and the CSV/JSON output
//! layer live in [`sweep`]; the `starkshift` binary exposes them on the
//! command line.
//!
//! Time is measured in units of the pulse width `T` throughout the public
//! interfaces, so all inputs are the dimensionless products Ω₀T, ΔT, ΓT.

pub mod approx;
pub mod dynamics;
pub mod exact;
pub mod ode;
pub mod pulse;
pub mod quad;
pub mod specfn;
pub mod sweep;

pub use approx::{AdiabaticDiagnostics, ApproxError, Method, PhaseEstimate};
pub use dynamics::{DynamicsError, PropagationResult, SystemSpec};
pub use exact::{ExactError, RzParameters};
pub use pulse::{PulseError, PulseShape};
pub use specfn::SpecFnError;
pub use sweep::{SweepError, SweepResult, SweepSpec};
