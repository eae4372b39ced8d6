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

//! Closed-form fidelities and shrinking factors of the optimal channels.
//!
//! The single-site fidelities of cloning and conjugation share the shape
//! `F = 1/d + S / (M d^{N+1})` where `S` runs over occupation vectors `n̄` of
//! `N-1` systems and ordered pairs `i ≠ j` of levels:
//!
//! * cloning (`M = kd + N`):
//!   `S = Σ_{n̄} Σ_{i≠j} (N!/Π n̄_l!) sqrt((n̄_i+k+1)(n̄_j+k+1) / ((n̄_i+1)(n̄_j+1)))`
//! * conjugation (`M = kd - N`, `k ≥ N`): the numerator becomes
//!   `(k - n̄_i)(k - n̄_j)`.
//!
//! Both tend, as `k → ∞`, to the phase-estimation value
//! `F = 1/d + (1/d^{N+2}) Σ_{n̄} Σ_{i≠j} (N!/Π n̄_l!) / sqrt((n̄_i+1)(n̄_j+1))`.
//! The sums are tiny (`C(N+d-2, d-1)` terms) and evaluated exactly; no Monte
//! Carlo is involved.

use crate::channels::{ChannelParams, Direction};
use crate::error::Result;
use crate::symbasis::{enumerate_multi_indices, multinomial, sym_dim};
use serde::{Deserialize, Serialize};

/// Which quantity a table row reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FidelityKind {
    Clone,
    Conjugate,
    Estimation,
    UniversalClone,
    StateEstimationShrink,
}

impl FidelityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FidelityKind::Clone => "clone",
            FidelityKind::Conjugate => "conjugate",
            FidelityKind::Estimation => "estimation",
            FidelityKind::UniversalClone => "universal_clone",
            FidelityKind::StateEstimationShrink => "state_estimation_shrink",
        }
    }
}

/// One evaluated fidelity point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FidelityRecord {
    pub n: u32,
    pub m: Option<u32>,
    pub d: u32,
    pub k: Option<u32>,
    pub kind: FidelityKind,
    pub value: f64,
}

/// Σ over n̄ (occupations of N-1 systems) and ordered pairs i≠j of
/// `(N!/Π n̄_l!) * weight(n̄_i, n̄_j)`.
fn pair_sum<W: Fn(u32, u32) -> f64>(n: u32, d: u32, weight: W) -> Result<f64> {
    debug_assert!(n >= 1);
    let mut total = 0.0f64;
    for bar in enumerate_multi_indices(n - 1, d)? {
        // Σ n̄ = N-1, so N!/Π n̄_l! = N * multinomial(n̄)
        let coeff = n as f64 * multinomial(&bar)? as f64;
        let occ = bar.occupations();
        for i in 0..d as usize {
            for j in 0..d as usize {
                if i != j {
                    total += coeff * weight(occ[i], occ[j]);
                }
            }
        }
    }
    Ok(total)
}

/// Optimal single-site cloning fidelity, exact summation (requires `M = kd + N`).
pub fn f_clone_single(n: u32, m: u32, d: u32) -> Result<f64> {
    let params = ChannelParams::new(Direction::Clone, n, m, d)?;
    let k = params.shift() as f64;
    let s = pair_sum(n, d, |ni, nj| {
        let num = (ni as f64 + k + 1.0) * (nj as f64 + k + 1.0);
        let den = (ni as f64 + 1.0) * (nj as f64 + 1.0);
        (num / den).sqrt()
    })?;
    Ok(1.0 / d as f64 + s / (m as f64 * (d as f64).powi(n as i32 + 1)))
}

/// Closed form for a single input copy: `F = 1/d + (d-1)(M+d-1)/(M d²)`,
/// `M = kd + 1`.
pub fn f_clone_single_n1(m: u32, d: u32) -> Result<f64> {
    ChannelParams::new(Direction::Clone, 1, m, d)?;
    let (m, d) = (m as f64, d as f64);
    Ok(1.0 / d + (d - 1.0) * (m + d - 1.0) / (m * d * d))
}

/// Optimal single-site conjugation fidelity, exact summation
/// (requires `M = kd - N`, `k ≥ N`).
pub fn f_conj_single(n: u32, m: u32, d: u32) -> Result<f64> {
    let params = ChannelParams::new(Direction::Conjugate, n, m, d)?;
    let k = params.shift() as f64;
    let s = pair_sum(n, d, |ni, nj| {
        let num = (k - ni as f64) * (k - nj as f64);
        let den = (ni as f64 + 1.0) * (nj as f64 + 1.0);
        (num / den).sqrt()
    })?;
    Ok(1.0 / d as f64 + s / (m as f64 * (d as f64).powi(n as i32 + 1)))
}

/// Closed form for a single input copy: `F = 1/d + (d-1)(M+1)/(M d²)`,
/// `M = kd - 1`.
pub fn f_conj_single_n1(m: u32, d: u32) -> Result<f64> {
    ChannelParams::new(Direction::Conjugate, 1, m, d)?;
    let (m, d) = (m as f64, d as f64);
    Ok(1.0 / d + (d - 1.0) * (m + 1.0) / (m * d * d))
}

/// Single-site fidelity of optimal multi-phase estimation on N copies; the
/// common `M → ∞` limit of cloning and conjugation.
pub fn f_estimation(n: u32, d: u32) -> Result<f64> {
    let s = pair_sum(n, d, |ni, nj| {
        1.0 / (((ni as f64 + 1.0) * (nj as f64 + 1.0)).sqrt())
    })?;
    Ok(1.0 / d as f64 + s / (d as f64).powi(n as i32 + 2))
}

/// Optimal universal (SU(d)-covariant) 1 → M cloning fidelity
/// `(2M + d - 1) / (M (d + 1))`; the phase-covariant cloner strictly beats it.
pub fn f_universal_clone(m: u32, d: u32) -> f64 {
    (2.0 * m as f64 + d as f64 - 1.0) / (m as f64 * (d as f64 + 1.0))
}

/// Global (all-M-copies) cloning fidelity of the optimal channel, evaluated
/// numerically as the squared overlap of `|r⟩` with the seed product states.
pub fn f_clone_global(n: u32, m: u32, d: u32) -> Result<f64> {
    let params = ChannelParams::new(Direction::Clone, n, m, d)?;
    let scale = ((d as f64).powi(m as i32) * (d as f64).powi(n as i32)).sqrt();
    let mut acc = 0.0f64;
    for mi in enumerate_multi_indices(n, d)? {
        let out = params.output_occupation(&mi);
        acc += ((multinomial(&out)? as f64) * (multinomial(&mi)? as f64)).sqrt();
    }
    let amp = acc / scale;
    Ok(amp * amp)
}

/// Shrinking factor from a single-site fidelity: `η = (dF - 1)/(d - 1)`.
pub fn eta_from_fidelity(f: f64, d: u32) -> f64 {
    (d as f64 * f - 1.0) / (d as f64 - 1.0)
}

/// Fidelity of a state shrunk toward the maximally mixed state:
/// `F = 1/d + η (d-1)/d`, the inverse of [`eta_from_fidelity`].
pub fn fidelity_from_eta(eta: f64, d: u32) -> f64 {
    (1.0 + eta * (d as f64 - 1.0)) / d as f64
}

/// Shrinking factor of optimal state estimation on M copies: `M/(M + d)`.
pub fn eta_state_estimation(m: u32, d: u32) -> f64 {
    m as f64 / (m as f64 + d as f64)
}

/// Fidelity of the concatenation "optimal N → M cloner, then optimal state
/// estimation of the M clones, read as a phase estimate": shrink factors
/// multiply, so `F = fidelity_from_eta(η_S(M) · η_C(N,M))`. This is a
/// sub-optimal phase estimation, hence never exceeds [`f_estimation`], and
/// approaches it as `M → ∞`.
pub fn f_clone_then_state_estimation(n: u32, m: u32, d: u32) -> Result<f64> {
    let eta_c = eta_from_fidelity(f_clone_single(n, m, d)?, d);
    Ok(fidelity_from_eta(eta_state_estimation(m, d) * eta_c, d))
}

/// Convenience: the single-site fidelity of the optimal channel for the given
/// parameters.
pub fn f_single(params: &ChannelParams) -> Result<f64> {
    match params.direction() {
        Direction::Clone => {
            f_clone_single(params.input_copies(), params.output_copies(), params.levels())
        }
        Direction::Conjugate => {
            f_conj_single(params.input_copies(), params.output_copies(), params.levels())
        }
    }
}

/// Number of terms in the exact sums, exposed for sizing checks.
pub fn pair_sum_terms(n: u32, d: u32) -> Result<usize> {
    sym_dim(n.saturating_sub(1), d)
}
