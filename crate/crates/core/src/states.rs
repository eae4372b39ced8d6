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

//! Equatorial states, phase unitaries and their symmetric-subspace forms.
//!
//! An equatorial state of a d-level system is
//! `|ψ({φ_j})⟩ = d^{-1/2} (|0⟩ + e^{iφ_1}|1⟩ + … + e^{iφ_{d-1}}|d-1⟩)`,
//! parameterized by d-1 relative phases (a global phase is irrelevant, so
//! `φ_0 = 0` is implicit). N copies expand on the symmetric occupation basis
//! with amplitude `sqrt(multinomial(n)) / d^{N/2} · exp(i Σ_{j≥1} n_j φ_j)`.

use crate::error::{Error, Result};
use crate::linalg::{fro_norm, hermitian_eigenvalues, hermiticity_residual, CMatrix, CVector};
use crate::symbasis::{enumerate_multi_indices, multinomial, sym_dim, MultiIndex};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

const NORM_TOL: f64 = 1e-10;
const DENSITY_TOL: f64 = 1e-10;

fn mod_tau(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can return TAU itself after rounding
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// The d-1 relative phases of an equatorial state, each reduced into [0, 2π).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector {
    phases: Vec<f64>,
}

impl PhaseVector {
    /// Phases `φ_1 … φ_{d-1}`; the implicit `φ_0 = 0` is not stored.
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::InvalidParameter(
                "a phase vector needs at least one phase (d >= 2)".into(),
            ));
        }
        Ok(Self { phases: phases.into_iter().map(mod_tau).collect() })
    }

    /// The zero-phase vector selecting the seed state.
    pub fn zero(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("d must be >= 2, got {d}")));
        }
        Ok(Self { phases: vec![0.0; d as usize - 1] })
    }

    /// Uniformly random phases for a d-level system.
    pub fn random<R: Rng + ?Sized>(d: u32, rng: &mut R) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("d must be >= 2, got {d}")));
        }
        Ok(Self { phases: (1..d).map(|_| rng.gen_range(0.0..TAU)).collect() })
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Dimension d of the underlying system.
    pub fn levels(&self) -> u32 {
        self.phases.len() as u32 + 1
    }

    /// Negate every phase mod 2π: the parameter map of phase conjugation.
    pub fn conjugate(&self) -> Self {
        Self { phases: self.phases.iter().map(|&p| mod_tau(-p)).collect() }
    }

    /// Componentwise sum mod 2π.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.phases.len() != other.phases.len() {
            return Err(Error::DimensionMismatch {
                context: "phase vector composition",
                expected: self.phases.len(),
                actual: other.phases.len(),
            });
        }
        Ok(Self {
            phases: self
                .phases
                .iter()
                .zip(&other.phases)
                .map(|(&a, &b)| mod_tau(a + b))
                .collect(),
        })
    }

    /// `exp(i Σ_{j≥1} n_j φ_j)` for an occupation vector.
    pub(crate) fn phase_factor(&self, mi: &MultiIndex) -> Complex64 {
        let theta: f64 = mi
            .occupations()
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, &nj)| nj as f64 * self.phases[j - 1])
            .sum();
        Complex64::from_polar(1.0, theta)
    }
}

/// A pure state of N qudits supported on the symmetric subspace, expanded on
/// the canonical occupation basis. Unit norm is enforced at construction.
#[derive(Debug, Clone)]
pub struct SymState {
    copies: u32,
    levels: u32,
    amplitudes: CVector,
}

impl SymState {
    pub fn new(copies: u32, levels: u32, amplitudes: CVector) -> Result<Self> {
        let dim = sym_dim(copies, levels)?;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                context: "symmetric state amplitudes",
                expected: dim,
                actual: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm, tol: NORM_TOL });
        }
        Ok(Self { copies, levels, amplitudes })
    }

    pub fn copies(&self) -> u32 {
        self.copies
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// |⟨self|other⟩|².
    pub fn overlap_squared(&self, other: &SymState) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm_sqr()
    }

    /// Density matrix |ψ⟩⟨ψ| on the symmetric space.
    pub fn projector(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix { mat: m }
    }
}

/// A density operator: Hermitian, unit trace (both enforced at construction);
/// positivity is checked where the physics requires it via [`DensityMatrix::min_eigenvalue`].
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::InvalidDensity {
                reason: format!("not square: {}x{}", mat.nrows(), mat.ncols()),
            });
        }
        let herm = hermiticity_residual(&mat);
        if herm > DENSITY_TOL {
            return Err(Error::InvalidDensity {
                reason: format!("hermiticity residual {herm:.3e}"),
            });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidDensity { reason: format!("trace {tr}") });
        }
        Ok(Self { mat })
    }

    /// The maximally mixed state I/dim.
    pub fn maximally_mixed(dim: usize) -> Self {
        let mat = CMatrix::identity(dim, dim) * Complex64::from(1.0 / dim as f64);
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// Smallest eigenvalue; a valid state has it >= -1e-10.
    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.mat)[0]
    }

    /// ⟨ψ|ρ|ψ⟩ against a pure state on the same space.
    pub fn fidelity_with_pure(&self, psi: &SymState) -> Result<f64> {
        if psi.amplitudes.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "fidelity",
                expected: self.dim(),
                actual: psi.amplitudes.len(),
            });
        }
        Ok(psi.amplitudes.dotc(&(&self.mat * &psi.amplitudes)).re)
    }
}

/// One equatorial state (N = 1) on the canonical basis:
/// amplitudes `d^{-1/2} (1, e^{iφ_1}, …, e^{iφ_{d-1}})`.
pub fn equatorial_state(pv: &PhaseVector) -> SymState {
    let d = pv.levels();
    let scale = 1.0 / (d as f64).sqrt();
    let mut amp = CVector::zeros(d as usize);
    amp[0] = Complex64::new(scale, 0.0);
    for j in 1..d as usize {
        amp[j] = Complex64::from_polar(scale, pv.phases[j - 1]);
    }
    SymState { copies: 1, levels: d, amplitudes: amp }
}

/// N copies of an equatorial state expanded on the symmetric basis.
pub fn n_fold_equatorial(pv: &PhaseVector, copies: u32) -> Result<SymState> {
    if copies == 0 {
        return Err(Error::InvalidParameter("need at least one copy".into()));
    }
    let d = pv.levels();
    let scale = (d as f64).powi(copies as i32).sqrt().recip();
    let basis = enumerate_multi_indices(copies, d)?;
    let mut amp = CVector::zeros(basis.len());
    for (r, mi) in basis.iter().enumerate() {
        let w = (multinomial(mi)? as f64).sqrt() * scale;
        amp[r] = pv.phase_factor(mi) * w;
    }
    Ok(SymState { copies, levels: d, amplitudes: amp })
}

/// Diagonal unitary: the restriction of the N-fold phase rotation to the
/// symmetric subspace. Entry at occupation `{n_i}` is `exp(i Σ_{j≥1} n_j φ_j)`.
#[derive(Debug, Clone)]
pub struct DiagonalUnitary {
    diag: CVector,
}

impl DiagonalUnitary {
    pub fn diagonal(&self) -> &CVector {
        &self.diag
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Entrywise complex conjugate (the inverse, since entries are phases).
    pub fn conjugate(&self) -> Self {
        Self { diag: self.diag.map(|z| z.conj()) }
    }

    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_diagonal(&self.diag)
    }

    pub fn apply(&self, state: &SymState) -> Result<SymState> {
        if state.amplitudes.len() != self.diag.len() {
            return Err(Error::DimensionMismatch {
                context: "diagonal unitary application",
                expected: self.diag.len(),
                actual: state.amplitudes.len(),
            });
        }
        let amp = CVector::from_iterator(
            self.diag.len(),
            self.diag.iter().zip(state.amplitudes.iter()).map(|(u, a)| u * a),
        );
        Ok(SymState { copies: state.copies, levels: state.levels, amplitudes: amp })
    }
}

/// The N-fold phase unitary on the symmetric subspace.
pub fn phase_unitary_sym(pv: &PhaseVector, copies: u32) -> Result<DiagonalUnitary> {
    let basis = enumerate_multi_indices(copies, pv.levels())?;
    let diag = CVector::from_iterator(basis.len(), basis.iter().map(|mi| pv.phase_factor(mi)));
    Ok(DiagonalUnitary { diag })
}

/// ⟨b|a|b⟩ for a mixed state `a` against a pure target `b`.
pub fn state_fidelity(a: &DensityMatrix, b: &SymState) -> Result<f64> {
    a.fidelity_with_pure(b)
}

/// |⟨a|b⟩|² for two pure states.
pub fn pure_state_fidelity(a: &SymState, b: &SymState) -> f64 {
    a.overlap_squared(b)
}

// --- JSON schemas -----------------------------------------------------------
//
// Complex numbers serialize as [re, im]; matrices row-major.

#[derive(Debug, Serialize, Deserialize)]
pub struct SymStateJson {
    pub n: u32,
    pub d: u32,
    pub amplitudes: Vec<[f64; 2]>,
}

impl From<&SymState> for SymStateJson {
    fn from(s: &SymState) -> Self {
        Self {
            n: s.copies,
            d: s.levels,
            amplitudes: s.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<SymStateJson> for SymState {
    type Error = Error;
    fn try_from(j: SymStateJson) -> Result<Self> {
        let amp = CVector::from_iterator(
            j.amplitudes.len(),
            j.amplitudes.iter().map(|&[re, im]| Complex64::new(re, im)),
        );
        SymState::new(j.n, j.d, amp)
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DensityMatrixJson {
    pub dim: usize,
    /// row-major [re, im] pairs
    pub entries: Vec<[f64; 2]>,
}

impl From<&DensityMatrix> for DensityMatrixJson {
    fn from(m: &DensityMatrix) -> Self {
        let dim = m.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                let z = m.mat[(r, c)];
                entries.push([z.re, z.im]);
            }
        }
        Self { dim, entries }
    }
}

impl TryFrom<DensityMatrixJson> for DensityMatrix {
    type Error = Error;
    fn try_from(j: DensityMatrixJson) -> Result<Self> {
        if j.entries.len() != j.dim * j.dim {
            return Err(Error::Serialization(format!(
                "density matrix payload has {} entries for dim {}",
                j.entries.len(),
                j.dim
            )));
        }
        let mat = CMatrix::from_fn(j.dim, j.dim, |r, c| {
            let [re, im] = j.entries[r * j.dim + c];
            Complex64::new(re, im)
        });
        DensityMatrix::new(mat)
    }
}

/// Frobenius distance of the two states' projectors: a global-phase-free
/// equality measure.
pub fn projector_distance(a: &SymState, b: &SymState) -> f64 {
    let pa = &a.amplitudes * a.amplitudes.adjoint();
    let pb = &b.amplitudes * b.amplitudes.adjoint();
    fro_norm(&(pa - pb))
}
