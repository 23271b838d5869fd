//! Phase-field brittle fracture with tension-compression energy splits.
//!
//! - [`tensor`]: symmetric tensors, Voigt views, eigen and invariants.
//! - [`constitutive`]: the eight split models, degradation functions, lookup tables.
//! - [`fem`]: plane-strain P1 solver with staggered alternate minimization.
//! - [`scenarios`]: built-in benchmark setups, scenario files, constitutive sweeps.
//! - [`io`]: VTK, CSV and mesh text formats.

pub mod constitutive;
pub mod fem;
pub mod io;
pub mod scenarios;
pub mod tensor;
