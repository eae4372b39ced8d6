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

//! The optimal multi-phase estimation channel.
//!
//! The POVM density is `|e({φ̄})⟩⟨e({φ̄})|` with the generalized
//! Susskind-Glogower vector `|e({φ̄})⟩ = Σ_n e^{i Σ_j n_j φ̄_j} |{n_i}⟩`
//! (unnormalized, unit-modulus amplitudes). Measuring N copies of an
//! equatorial state and repreparing `|ψ({φ̄})⟩` yields the single-site output
//! `∫ dφ̄/(2π)^{d-1} p(φ̄) |ψ(φ̄)⟩⟨ψ(φ̄)|` with `p(φ̄) = |⟨ψ^{⊗N}|e(φ̄)⟩|²`.
//!
//! Every integrand here is a trigonometric polynomial of per-axis degree at
//! most N+1, so a uniform product grid with more than 2N+1 points per axis
//! integrates it exactly up to rounding; quadrature mode exploits this and is
//! deterministic. Monte Carlo mode draws phases by rejection sampling from a
//! seeded generator.

use crate::error::{Error, Result};
use crate::linalg::{fro_norm, CMatrix, CVector};
use crate::states::{equatorial_state, n_fold_equatorial, DensityMatrix, PhaseVector, SymState};
use crate::symbasis::{enumerate_multi_indices, multinomial, sym_dim};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

/// Guard against accidentally enormous product grids ((points)^{d-1} cells).
const MAX_QUADRATURE_CELLS: u128 = 1 << 22;

/// How to evaluate the phase-space integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrationMode {
    /// Uniform product grid; exact for the integrands in this module once
    /// `points_per_axis >= 2N + 2`.
    Quadrature { points_per_axis: usize },
    /// Seeded rejection sampling; statistical error ~ samples^{-1/2}.
    MonteCarlo { samples: usize, seed: u64 },
}

/// Unnormalized POVM vector on the symmetric basis; amplitude at `{n_i}` is
/// `exp(i Σ_{j≥1} n_j φ̄_j)`, squared norm `sym_dim(N, d)`.
#[derive(Debug, Clone)]
pub struct PovmVector {
    copies: u32,
    levels: u32,
    amplitudes: CVector,
}

impl PovmVector {
    pub fn copies(&self) -> u32 {
        self.copies
    }
    pub fn levels(&self) -> u32 {
        self.levels
    }
    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }
}

/// The Susskind-Glogower vector for estimated phases `pv` on N copies.
pub fn povm_vector(pv: &PhaseVector, copies: u32) -> Result<PovmVector> {
    let d = pv.levels();
    let basis = enumerate_multi_indices(copies, d)?;
    let amplitudes = CVector::from_iterator(basis.len(), basis.iter().map(|mi| pv.phase_factor(mi)));
    Ok(PovmVector { copies, levels: d, amplitudes })
}

/// Probability density of estimating phases `pv` on the given input state:
/// `p = |⟨input|e(pv)⟩|²` (normalized against `dφ̄/(2π)^{d-1}`).
pub fn estimation_density(input: &SymState, pv: &PhaseVector) -> Result<f64> {
    let e = povm_vector(pv, input.copies())?;
    if e.amplitudes.len() != input.amplitudes().len() {
        return Err(Error::DimensionMismatch {
            context: "estimation density",
            expected: e.amplitudes.len(),
            actual: input.amplitudes().len(),
        });
    }
    Ok(input.amplitudes().dotc(&e.amplitudes).norm_sqr())
}

/// Iterate a uniform product grid over `[0, 2π)^{axes}` with `points` cells
/// per axis, yielding each grid phase vector in a fixed order.
fn for_each_grid_point<F: FnMut(&PhaseVector) -> Result<()>>(
    d: u32,
    points: usize,
    mut f: F,
) -> Result<()> {
    let axes = (d - 1) as usize;
    let cells = (points as u128).pow(axes as u32);
    if cells > MAX_QUADRATURE_CELLS {
        return Err(Error::InvalidParameter(format!(
            "quadrature grid of {cells} cells exceeds the cap {MAX_QUADRATURE_CELLS}; \
             reduce the resolution or the dimension"
        )));
    }
    let step = TAU / points as f64;
    let mut phases = vec![0.0f64; axes];
    for idx in 0..cells as usize {
        let mut rem = idx;
        for p in phases.iter_mut() {
            *p = (rem % points) as f64 * step;
            rem /= points;
        }
        f(&PhaseVector::new(phases.clone())?)?;
    }
    Ok(())
}

fn min_quadrature_points(copies: u32) -> usize {
    2 * copies as usize + 2
}

fn validate_mode(mode: IntegrationMode, copies: u32) -> Result<()> {
    match mode {
        IntegrationMode::Quadrature { points_per_axis } => {
            let min = min_quadrature_points(copies);
            if points_per_axis < min {
                return Err(Error::ResolutionTooLow {
                    got: points_per_axis,
                    min,
                    context: "phase quadrature",
                });
            }
        }
        IntegrationMode::MonteCarlo { samples, .. } => {
            if samples == 0 {
                return Err(Error::ResolutionTooLow {
                    got: 0,
                    min: 1,
                    context: "Monte Carlo sampling",
                });
            }
        }
    }
    Ok(())
}

/// Draw one phase vector from the estimation density of `input` by rejection
/// sampling (the density is bounded by `(Σ_n |c_n|)²`).
fn sample_estimated_phases<R: Rng + ?Sized>(
    input: &SymState,
    bound: f64,
    rng: &mut R,
) -> Result<PhaseVector> {
    let d = input.levels();
    loop {
        let candidate = PhaseVector::random(d, rng)?;
        let p = estimation_density(input, &candidate)?;
        if rng.gen_range(0.0..bound) < p {
            return Ok(candidate);
        }
    }
}

fn density_bound(input: &SymState) -> f64 {
    let s: f64 = input.amplitudes().iter().map(|z| z.norm()).sum();
    s * s
}

/// Single-site output of the measure-and-prepare channel, with the prepared
/// phases transformed by `prepare`.
fn measure_prepare_output<F: Fn(&PhaseVector) -> PhaseVector>(
    pv: &PhaseVector,
    copies: u32,
    mode: IntegrationMode,
    prepare: F,
) -> Result<DensityMatrix> {
    validate_mode(mode, copies)?;
    let d = pv.levels();
    let input = n_fold_equatorial(pv, copies)?;
    let mut acc = CMatrix::zeros(d as usize, d as usize);
    match mode {
        IntegrationMode::Quadrature { points_per_axis } => {
            let mut weight_total = 0.0f64;
            for_each_grid_point(d, points_per_axis, |est| {
                let p = estimation_density(&input, est)?;
                let prep = equatorial_state(&prepare(est));
                acc += prep.amplitudes() * prep.amplitudes().adjoint() * Complex64::from(p);
                weight_total += 1.0;
                Ok(())
            })?;
            acc /= Complex64::from(weight_total);
        }
        IntegrationMode::MonteCarlo { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let bound = density_bound(&input);
            for _ in 0..samples {
                let est = sample_estimated_phases(&input, bound, &mut rng)?;
                let prep = equatorial_state(&prepare(&est));
                acc += prep.amplitudes() * prep.amplitudes().adjoint();
            }
            acc /= Complex64::from(samples as f64);
        }
    }
    DensityMatrix::new(acc)
}

/// Single-site output of the optimal estimate-and-reprepare channel on N
/// copies of `|ψ(pv)⟩`.
pub fn estimation_channel_output(
    pv: &PhaseVector,
    copies: u32,
    mode: IntegrationMode,
) -> Result<DensityMatrix> {
    measure_prepare_output(pv, copies, mode, |est| est.clone())
}

/// Measure-and-prepare phase conjugation: estimate the phases, prepare M
/// copies of the conjugated state. The per-site output is independent of M;
/// the parameter is accepted for interface symmetry with the coherent channel.
pub fn measure_prepare_conjugate(
    pv: &PhaseVector,
    copies: u32,
    _output_copies: u32,
    mode: IntegrationMode,
) -> Result<DensityMatrix> {
    measure_prepare_output(pv, copies, mode, |est| est.conjugate())
}

/// Closed-form single-site output for the seed input:
/// `I/d + (1/d^{N+1}) Σ_{n̄} Σ_{i≠j} (N!/Π n̄_l!) / sqrt((n̄_i+1)(n̄_j+1)) |i⟩⟨j|`.
pub fn estimation_output_analytic(copies: u32, d: u32) -> Result<DensityMatrix> {
    if copies == 0 {
        return Err(Error::InvalidParameter("need at least one copy".into()));
    }
    let dd = d as usize;
    let mut mat = CMatrix::identity(dd, dd) * Complex64::from(1.0 / d as f64);
    let scale = (d as f64).powi(copies as i32 + 1).recip();
    for bar in enumerate_multi_indices(copies - 1, d)? {
        let coeff = copies as f64 * multinomial(&bar)? as f64;
        let occ = bar.occupations();
        for i in 0..dd {
            for j in 0..dd {
                if i != j {
                    let w = coeff / (((occ[i] + 1) as f64 * (occ[j] + 1) as f64).sqrt());
                    mat[(i, j)] += Complex64::from(scale * w);
                }
            }
        }
    }
    DensityMatrix::new(mat)
}

/// Deviation of the POVM quadrature `Σ w |e⟩⟨e|` from the identity on the
/// symmetric subspace.
pub fn povm_completeness_residual(copies: u32, d: u32, points_per_axis: usize) -> Result<f64> {
    let dim = sym_dim(copies, d)?;
    let mut acc = CMatrix::zeros(dim, dim);
    let mut total = 0.0f64;
    for_each_grid_point(d, points_per_axis, |pv| {
        let e = povm_vector(pv, copies)?;
        acc += e.amplitudes() * e.amplitudes().adjoint();
        total += 1.0;
        Ok(())
    })?;
    acc /= Complex64::from(total);
    Ok(fro_norm(&(acc - CMatrix::identity(dim, dim))))
}

/// Monte-Carlo estimate of the estimation fidelity with its standard error:
/// per sample, the overlap of the reprepared state with the true one.
pub fn estimation_fidelity_montecarlo(
    pv: &PhaseVector,
    copies: u32,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if samples < 2 {
        return Err(Error::ResolutionTooLow { got: samples, min: 2, context: "Monte Carlo fidelity" });
    }
    let input = n_fold_equatorial(pv, copies)?;
    let target = equatorial_state(pv);
    let bound = density_bound(&input);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    for _ in 0..samples {
        let est = sample_estimated_phases(&input, bound, &mut rng)?;
        let f = equatorial_state(&est).overlap_squared(&target);
        sum += f;
        sum_sq += f * f;
    }
    let mean = sum / samples as f64;
    let var = (sum_sq / samples as f64 - mean * mean).max(0.0);
    let std_err = (var / samples as f64).sqrt();
    Ok((mean, std_err))
}
