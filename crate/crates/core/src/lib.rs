// Copyright 2026 The phasecov Developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! Optimal phase-covariant devices for d-dimensional equatorial states.
//!
//! The crate builds the optimal `N → M` phase-covariant cloning channels
//! (`M = kd + N`) and phase-conjugation channels (`M = kd - N`, `k ≥ N`) for
//! equatorial qudit states, applies them, and verifies their claimed
//! fidelities and ancilla-free (economical) realizability against brute-force
//! oracles:
//!
//! * [`symbasis`] - exact combinatorics of the symmetric occupation basis;
//! * [`states`] - equatorial states, phase unitaries, density matrices;
//! * [`channels`] - isometries, Choi operators, covariance checks, unitary
//!   completion, single-site reduction, shrinking factors;
//! * [`fidelity`] - closed-form single-site/global fidelities and the
//!   estimation limit;
//! * [`estimation`] - the optimal multi-phase estimation channel
//!   (measure-and-prepare), quadrature and Monte Carlo;
//! * [`certify`] - block decomposition of the covariant set, random feasible
//!   channels, and fidelity ascent certifying optimality numerically;
//! * [`suite`] - the invariant suites run by the CLI `verify` command.
//!
//! Cloning a qubit equatorial state into three copies and reading off the
//! per-copy fidelity:
//!
//! ```
//! use phasecov::channels::{cloning_isometry, reduced_single_site};
//! use phasecov::states::{n_fold_equatorial, PhaseVector};
//!
//! let input = n_fold_equatorial(&PhaseVector::zero(2)?, 1)?;
//! let cloner = cloning_isometry(1, 3, 2)?;
//! let copy = reduced_single_site(&cloner.apply(&input)?)?;
//! assert!((copy.fidelity_with_pure(&input)? - 5.0 / 6.0).abs() < 1e-12);
//! # Ok::<(), phasecov::Error>(())
//! ```

pub mod channels;
pub mod certify;
pub mod error;
pub mod estimation;
pub mod fidelity;
pub mod linalg;
pub mod states;
pub mod suite;
pub mod symbasis;

pub use channels::{ChannelParams, ChoiOperator, Direction, Isometry, UnitaryCompletion};
pub use error::{Error, Result};
pub use states::{DensityMatrix, PhaseVector, SymState};
pub use symbasis::MultiIndex;

#[cfg(test)]
mod concurrency {
    // every value is immutable after construction; concurrent use is part of
    // the API contract
    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn core_types_are_send_and_sync() {
        assert_send_sync::<crate::MultiIndex>();
        assert_send_sync::<crate::PhaseVector>();
        assert_send_sync::<crate::SymState>();
        assert_send_sync::<crate::DensityMatrix>();
        assert_send_sync::<crate::Isometry>();
        assert_send_sync::<crate::ChoiOperator>();
        assert_send_sync::<crate::UnitaryCompletion>();
        assert_send_sync::<crate::certify::BlockStructure>();
        assert_send_sync::<crate::certify::CovariantChannel>();
        assert_send_sync::<crate::estimation::PovmVector>();
    }
}
