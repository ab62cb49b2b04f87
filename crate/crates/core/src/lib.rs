//! Entanglement generation between a small system `A` and a large
//! ergodic system `B` through a non-demolition coupling `N_A ⊗ H_B`.
//!
//! After one step of duration `t0` the reduced purity of `A` is fixed by the
//! Krylov set `{U^n |phi>}`, `U = exp(-i H_B t0)`: its Gram matrix `G`
//! determines the purity, the higher purities and how well the state
//! transfers operators between the two sides.
//!
//! ```
//! use ergodic_core::{dynamics::krylov_gram, entanglement::purity_from_gram};
//! use ergodic_core::{spectra::picket_fence_spectrum, states::flat_state};
//!
//! let s = picket_fence_spectrum(64, 1.0).unwrap();
//! let phi = flat_state(64).unwrap();
//! let g = krylov_gram(&s, &phi, 2.0 * std::f64::consts::PI / 64.0, 4).unwrap();
//! assert!((purity_from_gram(&g) - 0.25).abs() < 1e-12);
//! ```

pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod io;
pub mod linalg;
pub mod multicharge;
pub mod seed;
pub mod spectra;
pub mod states;
pub mod stats;
pub mod transfer;

pub use error::{Error, Result};
pub use exec::ExecPolicy;
