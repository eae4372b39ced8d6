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

//! Optimal phase-covariant cloning and conjugation channels.
//!
//! Both optimal families act as shift isometries on the occupation basis:
//! cloning (`M = kd + N`) maps `|{n_i}⟩ ↦ |{n_i + k}⟩`, conjugation
//! (`M = kd - N`, `k ≥ N`) maps `|{n_i}⟩ ↦ |{k - n_i}⟩`. A channel is carried
//! in two redundant representations: the exact sparse [`Isometry`] and the
//! dense [`ChoiOperator`] on `H_out ⊗ H_in` (composite index
//! `out_rank * in_dim + in_rank`); every check runs against both.

use crate::error::{Error, Result};
use crate::linalg::{fro_norm, gram_schmidt_complete, CMatrix, CVector};
use crate::states::{
    phase_unitary_sym, DensityMatrix, PhaseVector, SymState,
};
use crate::symbasis::{
    embed_symmetric_vector_with_budget, enumerate_multi_indices, rank, sym_dim, MultiIndex,
    DEFAULT_TENSOR_BUDGET,
};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Tolerance for constructive identities (exact arithmetic up to rounding).
pub const TOL_CONSTRUCTIVE: f64 = 1e-12;
/// Tolerance for derived spectral / trace-preservation properties.
pub const TOL_DERIVED: f64 = 1e-10;

/// Which ideal map the channel approximates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Clone,
    Conjugate,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Clone => "clone",
            Direction::Conjugate => "conjugate",
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "clone" | "cloning" => Ok(Direction::Clone),
            "conjugate" | "conjugation" => Ok(Direction::Conjugate),
            other => Err(Error::InvalidParameter(format!("unknown direction '{other}'"))),
        }
    }
}

/// Validated channel parameters. Cloning admits `M = kd + N` with `k ≥ 0`;
/// conjugation admits `M = kd - N` with `k ≥ N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelParams {
    direction: Direction,
    n: u32,
    m: u32,
    d: u32,
    k: u32,
}

impl ChannelParams {
    pub fn new(direction: Direction, n: u32, m: u32, d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("d must be >= 2, got {d}")));
        }
        if n < 1 || m < 1 {
            return Err(Error::InvalidParameter(format!(
                "copy counts must be >= 1, got N={n}, M={m}"
            )));
        }
        let k = match direction {
            Direction::Clone => {
                if m >= n && (m - n).is_multiple_of(d) {
                    (m - n) / d
                } else {
                    return Err(Self::inadmissible(direction, n, m, d));
                }
            }
            Direction::Conjugate => {
                if (m + n).is_multiple_of(d) && (m + n) / d >= n {
                    (m + n) / d
                } else {
                    return Err(Self::inadmissible(direction, n, m, d));
                }
            }
        };
        Ok(Self { direction, n, m, d, k })
    }

    /// Parameters from the family index k instead of M.
    pub fn from_k(direction: Direction, n: u32, k: u32, d: u32) -> Result<Self> {
        let m = match direction {
            Direction::Clone => k
                .checked_mul(d)
                .and_then(|v| v.checked_add(n))
                .ok_or(Error::Overflow { context: "output copies" })?,
            Direction::Conjugate => {
                if k < n {
                    return Err(Error::InvalidParameter(format!(
                        "conjugation requires k >= N, got k={k}, N={n}"
                    )));
                }
                k * d - n
            }
        };
        Self::new(direction, n, m, d)
    }

    fn inadmissible(direction: Direction, n: u32, m: u32, d: u32) -> Error {
        let admissible = match direction {
            Direction::Clone => {
                format!("{{{}, {}, {}, …}} (M = kd + N, k ≥ 0)", n, n + d, n + 2 * d)
            }
            Direction::Conjugate => format!(
                "{{{}, {}, {}, …}} (M = kd - N, k ≥ N)",
                n * d - n,
                (n + 1) * d - n,
                (n + 2) * d - n
            ),
        };
        Error::InadmissibleCopies { direction: direction.as_str(), n, m, d, admissible }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }
    pub fn input_copies(&self) -> u32 {
        self.n
    }
    pub fn output_copies(&self) -> u32 {
        self.m
    }
    pub fn levels(&self) -> u32 {
        self.d
    }
    pub fn shift(&self) -> u32 {
        self.k
    }

    pub fn input_dim(&self) -> Result<usize> {
        sym_dim(self.n, self.d)
    }
    pub fn output_dim(&self) -> Result<usize> {
        sym_dim(self.m, self.d)
    }

    /// Occupation vector of the output basis state paired with input `mi`.
    pub fn output_occupation(&self, mi: &MultiIndex) -> MultiIndex {
        let occ = mi
            .occupations()
            .iter()
            .map(|&v| match self.direction {
                Direction::Clone => v + self.k,
                Direction::Conjugate => self.k - v,
            })
            .collect();
        MultiIndex::new(occ).expect("shifted occupation is valid")
    }
}

/// Exact sparse representation of the optimal isometry: one unit entry per
/// column, column `rank(n)` mapping to row `col_to_row[rank(n)]`.
#[derive(Debug, Clone)]
pub struct Isometry {
    params: ChannelParams,
    col_to_row: Vec<usize>,
    out_dim: usize,
}

impl Isometry {
    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    pub fn input_dim(&self) -> usize {
        self.col_to_row.len()
    }

    pub fn output_dim(&self) -> usize {
        self.out_dim
    }

    pub fn column_rows(&self) -> &[usize] {
        &self.col_to_row
    }

    pub fn matrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.out_dim, self.col_to_row.len());
        for (c, &r) in self.col_to_row.iter().enumerate() {
            m[(r, c)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// V|ψ⟩ on the symmetric output space.
    pub fn apply(&self, state: &SymState) -> Result<SymState> {
        if state.amplitudes().len() != self.col_to_row.len() {
            return Err(Error::DimensionMismatch {
                context: "isometry application",
                expected: self.col_to_row.len(),
                actual: state.amplitudes().len(),
            });
        }
        let mut amp = CVector::zeros(self.out_dim);
        for (c, &r) in self.col_to_row.iter().enumerate() {
            amp[r] = state.amplitudes()[c];
        }
        SymState::new(self.params.output_copies(), self.params.levels(), amp)
    }

    /// VρV† on the symmetric output space.
    pub fn apply_density(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.col_to_row.len() {
            return Err(Error::DimensionMismatch {
                context: "isometry density application",
                expected: self.col_to_row.len(),
                actual: rho.dim(),
            });
        }
        let mut out = CMatrix::zeros(self.out_dim, self.out_dim);
        for (a, &ra) in self.col_to_row.iter().enumerate() {
            for (b, &rb) in self.col_to_row.iter().enumerate() {
                out[(ra, rb)] = rho.matrix()[(a, b)];
            }
        }
        DensityMatrix::new(out)
    }
}

fn shift_isometry(params: ChannelParams) -> Result<Isometry> {
    let basis = enumerate_multi_indices(params.input_copies(), params.levels())?;
    let out_dim = params.output_dim()?;
    let mut col_to_row = Vec::with_capacity(basis.len());
    for mi in &basis {
        col_to_row.push(rank(&params.output_occupation(mi))?);
    }
    // the occupation shift is injective, so V†V = I exactly
    debug_assert_eq!(
        {
            let mut sorted = col_to_row.clone();
            sorted.sort_unstable();
            sorted.dedup();
            sorted.len()
        },
        col_to_row.len()
    );
    Ok(Isometry { params, col_to_row, out_dim })
}

/// Optimal `N → M` phase-covariant cloning isometry, `M = kd + N`.
pub fn cloning_isometry(n: u32, m: u32, d: u32) -> Result<Isometry> {
    shift_isometry(ChannelParams::new(Direction::Clone, n, m, d)?)
}

/// Optimal `N → M` phase-conjugation isometry, `M = kd - N` with `k ≥ N`.
pub fn conjugation_isometry(n: u32, m: u32, d: u32) -> Result<Isometry> {
    shift_isometry(ChannelParams::new(Direction::Conjugate, n, m, d)?)
}

/// Dense Choi operator on `H_out ⊗ H_in` with composite index
/// `out_rank * in_dim + in_rank`.
#[derive(Debug, Clone)]
pub struct ChoiOperator {
    params: ChannelParams,
    in_dim: usize,
    out_dim: usize,
    mat: CMatrix,
}

impl ChoiOperator {
    pub fn new(params: ChannelParams, mat: CMatrix) -> Result<Self> {
        let in_dim = params.input_dim()?;
        let out_dim = params.output_dim()?;
        if mat.nrows() != in_dim * out_dim || mat.ncols() != in_dim * out_dim {
            return Err(Error::DimensionMismatch {
                context: "Choi operator",
                expected: in_dim * out_dim,
                actual: mat.nrows(),
            });
        }
        Ok(Self { params, in_dim, out_dim, mat })
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }
    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }
    pub fn matrix_mut(&mut self) -> &mut CMatrix {
        &mut self.mat
    }
    pub fn input_dim(&self) -> usize {
        self.in_dim
    }
    pub fn output_dim(&self) -> usize {
        self.out_dim
    }

    #[inline]
    pub fn index(&self, out_rank: usize, in_rank: usize) -> usize {
        out_rank * self.in_dim + in_rank
    }

    /// Partial trace over the output space; trace preservation means this is
    /// the identity on the input space.
    pub fn trace_out(&self) -> CMatrix {
        let mut t = CMatrix::zeros(self.in_dim, self.in_dim);
        for a in 0..self.out_dim {
            for x in 0..self.in_dim {
                for y in 0..self.in_dim {
                    t[(x, y)] += self.mat[(self.index(a, x), self.index(a, y))];
                }
            }
        }
        t
    }

    /// Deviation of `Tr_out[R]` from the identity.
    pub fn trace_preservation_residual(&self) -> f64 {
        let id = CMatrix::identity(self.in_dim, self.in_dim);
        fro_norm(&(self.trace_out() - id))
    }
}

/// Choi operator `|r⟩⟨r|` of an isometric channel, with
/// `|r⟩ = Σ_n (V|n⟩) ⊗ |n⟩`.
pub fn choi_from_isometry(v: &Isometry) -> ChoiOperator {
    let in_dim = v.input_dim();
    let out_dim = v.output_dim();
    let side = in_dim * out_dim;
    let mut r = CVector::zeros(side);
    for (c, &row) in v.column_rows().iter().enumerate() {
        r[row * in_dim + c] = Complex64::new(1.0, 0.0);
    }
    let mat = &r * r.adjoint();
    ChoiOperator { params: *v.params(), in_dim, out_dim, mat }
}

/// Apply a channel through its Choi operator: `M(ρ) = Tr_in[(I ⊗ ρ*) R]`.
pub fn apply_channel(choi: &ChoiOperator, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != choi.in_dim {
        return Err(Error::DimensionMismatch {
            context: "channel application",
            expected: choi.in_dim,
            actual: rho.dim(),
        });
    }
    let mut out = CMatrix::zeros(choi.out_dim, choi.out_dim);
    for a in 0..choi.out_dim {
        for b in 0..choi.out_dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for x in 0..choi.in_dim {
                for y in 0..choi.in_dim {
                    acc += rho.matrix()[(y, x)].conj() * choi.mat[(choi.index(a, x), choi.index(b, y))];
                }
            }
            out[(a, b)] = acc;
        }
    }
    DensityMatrix::new(out)
}

/// Covariance self-test result: max commutator norm over sampled phases.
#[derive(Debug, Clone, Serialize)]
pub struct CovarianceReport {
    pub samples: usize,
    pub max_commutator_norm: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Commutator of the Choi operator with the sampled group representation
/// `W_g ⊗ V_g*` (cloning: `W = U^{⊗M}`; conjugation: `W = (U*)^{⊗M}`).
pub fn check_covariance(
    choi: &ChoiOperator,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<CovarianceReport> {
    let params = choi.params;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_norm = 0.0f64;
    for _ in 0..samples {
        let pv = PhaseVector::random(params.levels(), &mut rng)?;
        let diag_out = phase_unitary_sym(&pv, params.output_copies())?;
        let diag_in = phase_unitary_sym(&pv, params.input_copies())?;
        let w: Vec<Complex64> = match params.direction {
            Direction::Clone => diag_out.diagonal().iter().copied().collect(),
            Direction::Conjugate => diag_out.diagonal().iter().map(|z| z.conj()).collect(),
        };
        let v_conj: Vec<Complex64> = diag_in.diagonal().iter().map(|z| z.conj()).collect();
        let g: Vec<Complex64> = w
            .iter()
            .flat_map(|wa| v_conj.iter().map(move |vx| wa * vx))
            .collect();
        // G is diagonal, so ||[R, G]||_F² = Σ |R_pq|² |g_q - g_p|²
        let mut norm2 = 0.0;
        for (p, gp) in g.iter().enumerate() {
            for (q, gq) in g.iter().enumerate() {
                norm2 += choi.mat[(p, q)].norm_sqr() * (gq - gp).norm_sqr();
            }
        }
        max_norm = max_norm.max(norm2.sqrt());
    }
    Ok(CovarianceReport { samples, max_commutator_norm: max_norm, tol, pass: max_norm < tol })
}

/// Unitary extension of an isometry: the first `input_cols` columns of
/// `matrix` are exactly the isometry's columns, the rest a deterministic
/// Gram-Schmidt completion over canonical basis vectors. An input vector
/// embedded at coordinates `0..input_cols` (the fixed ancilla configuration)
/// is mapped exactly as by the isometry.
#[derive(Debug, Clone)]
pub struct UnitaryCompletion {
    matrix: CMatrix,
    input_cols: usize,
}

impl UnitaryCompletion {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn input_cols(&self) -> usize {
        self.input_cols
    }

    /// The columns acting on the embedded input space; equals the isometry.
    pub fn input_block(&self) -> CMatrix {
        self.matrix.columns(0, self.input_cols).into_owned()
    }

    /// Apply to an input vector embedded at the designated coordinates.
    pub fn apply_embedded(&self, input: &CVector) -> Result<CVector> {
        if input.len() != self.input_cols {
            return Err(Error::DimensionMismatch {
                context: "embedded unitary application",
                expected: self.input_cols,
                actual: input.len(),
            });
        }
        let mut padded = CVector::zeros(self.matrix.ncols());
        for (i, z) in input.iter().enumerate() {
            padded[i] = *z;
        }
        Ok(&self.matrix * padded)
    }
}

/// Near-dependence threshold for completion candidates.
const GRAM_SCHMIDT_THRESHOLD: f64 = 1e-8;

/// Extend the isometry to a unitary on the output space (Gram-Schmidt over
/// the canonical basis, deterministic).
pub fn economical_completion(v: &Isometry) -> UnitaryCompletion {
    let matrix = gram_schmidt_complete(&v.matrix(), GRAM_SCHMIDT_THRESHOLD);
    UnitaryCompletion { matrix, input_cols: v.input_dim() }
}

/// Single-site reduced density matrix of a pure symmetric state:
/// `ρ₁[i,j] = (1/M) Σ_p sqrt((p_i+1)(p_j+1)) a_{p+e_i} a*_{p+e_j}`,
/// the sum running over occupations p of M-1 systems.
pub fn reduced_single_site(state: &SymState) -> Result<DensityMatrix> {
    let m = state.copies();
    let d = state.levels() as usize;
    if m == 0 {
        return Err(Error::InvalidParameter("cannot reduce a zero-copy state".into()));
    }
    let mut out = CMatrix::zeros(d, d);
    let scale = 1.0 / m as f64;
    for p in enumerate_multi_indices(m - 1, d as u32)? {
        let mut shifted_rank = vec![0usize; d];
        let mut occ = p.occupations().to_vec();
        for i in 0..d {
            occ[i] += 1;
            shifted_rank[i] = rank(&MultiIndex::new(occ.clone())?)?;
            occ[i] -= 1;
        }
        for i in 0..d {
            let ai = state.amplitudes()[shifted_rank[i]];
            if ai.norm_sqr() == 0.0 {
                continue;
            }
            let pi = (p.occupations()[i] + 1) as f64;
            for j in 0..d {
                let aj = state.amplitudes()[shifted_rank[j]];
                let pj = (p.occupations()[j] + 1) as f64;
                out[(i, j)] += ai * aj.conj() * Complex64::from(scale * (pi * pj).sqrt());
            }
        }
    }
    DensityMatrix::new(out)
}

/// Single-site reduction of a density operator on the symmetric space of
/// `m` copies. Linear in the input; agrees with [`reduced_single_site`] on
/// pure projectors.
pub fn reduced_single_site_density(rho: &DensityMatrix, m: u32, d: u32) -> Result<DensityMatrix> {
    let dim = sym_dim(m, d)?;
    if rho.dim() != dim {
        return Err(Error::DimensionMismatch {
            context: "single-site reduction",
            expected: dim,
            actual: rho.dim(),
        });
    }
    let d = d as usize;
    let mut out = CMatrix::zeros(d, d);
    let scale = 1.0 / m as f64;
    for p in enumerate_multi_indices(m - 1, d as u32)? {
        let mut shifted_rank = vec![0usize; d];
        let mut occ = p.occupations().to_vec();
        for i in 0..d {
            occ[i] += 1;
            shifted_rank[i] = rank(&MultiIndex::new(occ.clone())?)?;
            occ[i] -= 1;
        }
        for i in 0..d {
            let pi = (p.occupations()[i] + 1) as f64;
            for j in 0..d {
                let pj = (p.occupations()[j] + 1) as f64;
                out[(i, j)] += rho.matrix()[(shifted_rank[i], shifted_rank[j])]
                    * Complex64::from(scale * (pi * pj).sqrt());
            }
        }
    }
    DensityMatrix::new(out)
}

/// Brute-force oracle for [`reduced_single_site`]: embed the state in the
/// full `d^M` tensor space and trace out all sites but the first. Gated by
/// the tensor memory budget.
pub fn reduced_single_site_full_tensor(
    state: &SymState,
    budget: u64,
) -> Result<DensityMatrix> {
    let m = state.copies();
    let d = state.levels();
    let full_dim = (d as u128)
        .checked_pow(m)
        .ok_or(Error::Overflow { context: "full tensor dimension" })?;
    if full_dim > budget as u128 {
        return Err(Error::BudgetExceeded { required: full_dim, budget });
    }
    let full_dim = full_dim as usize;
    let mut full = CVector::zeros(full_dim);
    for (r, mi) in enumerate_multi_indices(m, d)?.iter().enumerate() {
        let e = embed_symmetric_vector_with_budget(mi, budget)?;
        let a = state.amplitudes()[r];
        full += e * a;
    }
    // site 0 is the most significant digit
    let rest = full_dim / d as usize;
    let mut out = CMatrix::zeros(d as usize, d as usize);
    for i in 0..d as usize {
        for j in 0..d as usize {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..rest {
                acc += full[i * rest + t] * full[j * rest + t].conj();
            }
            out[(i, j)] = acc;
        }
    }
    DensityMatrix::new(out)
}

/// [`reduced_single_site_full_tensor`] with the default budget.
pub fn reduced_single_site_oracle(state: &SymState) -> Result<DensityMatrix> {
    reduced_single_site_full_tensor(state, DEFAULT_TENSOR_BUDGET)
}

/// Decompose a single-site state against a pure target as
/// `ρ₁ = η |ψ⟩⟨ψ| + (1-η) I/d` with `η = (dF - 1)/(d - 1)`; returns `η` and
/// the Frobenius residual of the decomposition.
pub fn shrink_factor(rho1: &DensityMatrix, target: &SymState) -> Result<(f64, f64)> {
    let d = rho1.dim();
    if target.amplitudes().len() != d {
        return Err(Error::DimensionMismatch {
            context: "shrink factor target",
            expected: d,
            actual: target.amplitudes().len(),
        });
    }
    let fidelity = rho1.fidelity_with_pure(target)?;
    let eta = (d as f64 * fidelity - 1.0) / (d as f64 - 1.0);
    let proj = target.amplitudes() * target.amplitudes().adjoint();
    let iso = CMatrix::identity(d, d) * Complex64::from((1.0 - eta) / d as f64);
    let model = proj * Complex64::from(eta) + iso;
    let residual = fro_norm(&(rho1.matrix() - model));
    Ok((eta, residual))
}

// --- JSON schemas -----------------------------------------------------------

/// On-disk form of a channel matrix. `data` is row-major `[re, im]` pairs;
/// Choi indices are `out_rank * in_dim + in_rank` in the colex basis order.
#[derive(Debug, Serialize, Deserialize)]
pub struct ChannelMatrixJson {
    pub kind: String,
    pub n: u32,
    pub m: u32,
    pub d: u32,
    pub k: u32,
    pub direction: Direction,
    pub basis_order: String,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

fn matrix_to_data(mat: &CMatrix) -> Vec<[f64; 2]> {
    let mut data = Vec::with_capacity(mat.nrows() * mat.ncols());
    for r in 0..mat.nrows() {
        for c in 0..mat.ncols() {
            let z = mat[(r, c)];
            data.push([z.re, z.im]);
        }
    }
    data
}

fn data_to_matrix(rows: usize, cols: usize, data: &[[f64; 2]]) -> Result<CMatrix> {
    if data.len() != rows * cols {
        return Err(Error::Serialization(format!(
            "matrix payload has {} entries for shape {rows}x{cols}",
            data.len()
        )));
    }
    Ok(CMatrix::from_fn(rows, cols, |r, c| {
        let [re, im] = data[r * cols + c];
        Complex64::new(re, im)
    }))
}

fn json_header(kind: &str, params: &ChannelParams, mat: &CMatrix) -> ChannelMatrixJson {
    ChannelMatrixJson {
        kind: kind.to_string(),
        n: params.input_copies(),
        m: params.output_copies(),
        d: params.levels(),
        k: params.shift(),
        direction: params.direction(),
        basis_order: "colex".to_string(),
        rows: mat.nrows(),
        cols: mat.ncols(),
        data: matrix_to_data(mat),
    }
}

pub fn isometry_to_json(v: &Isometry) -> ChannelMatrixJson {
    json_header("isometry", v.params(), &v.matrix())
}

pub fn choi_to_json(r: &ChoiOperator) -> ChannelMatrixJson {
    json_header("choi", &r.params, &r.mat)
}

pub fn unitary_to_json(u: &UnitaryCompletion, params: &ChannelParams) -> ChannelMatrixJson {
    json_header("unitary", params, u.matrix())
}

/// Re-import a dumped matrix; the payload round-trips bit-exactly.
pub fn matrix_from_json(j: &ChannelMatrixJson) -> Result<(ChannelParams, CMatrix)> {
    if j.basis_order != "colex" {
        return Err(Error::Serialization(format!("unknown basis order '{}'", j.basis_order)));
    }
    let params = ChannelParams::new(j.direction, j.n, j.m, j.d)?;
    Ok((params, data_to_matrix(j.rows, j.cols, &j.data)?))
}

pub fn choi_from_json(j: &ChannelMatrixJson) -> Result<ChoiOperator> {
    let (params, mat) = matrix_from_json(j)?;
    ChoiOperator::new(params, mat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigenvalues, numerical_rank};
    use crate::states::n_fold_equatorial;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_density(dim: usize, seed: u64) -> DensityMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = CMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let h = &g * g.adjoint();
        let tr = h.trace().re;
        DensityMatrix::new(h / Complex64::from(tr)).unwrap()
    }

    #[test]
    fn admissibility() {
        assert!(ChannelParams::new(Direction::Clone, 1, 3, 2).is_ok());
        let err = ChannelParams::new(Direction::Clone, 1, 2, 2).unwrap_err();
        assert!(err.to_string().contains("1, 3, 5"));

        assert!(ChannelParams::new(Direction::Conjugate, 1, 4, 5).is_ok());
        // k = (m+n)/d must be >= n
        assert!(ChannelParams::new(Direction::Conjugate, 2, 1, 3).is_err());
        let err = ChannelParams::new(Direction::Conjugate, 1, 2, 2).unwrap_err();
        assert!(err.to_string().contains("admissible"));
    }

    #[test]
    fn cloning_identity_at_k0() {
        let v = cloning_isometry(1, 1, 3).unwrap();
        assert_eq!(v.params().shift(), 0);
        assert!(fro_norm(&(v.matrix() - CMatrix::identity(3, 3))) < 1e-15);
    }

    #[test]
    fn cloning_shift_mapping() {
        // columns (1,0) -> (2,1), (0,1) -> (1,2) at N=1, M=3, d=2
        let v = cloning_isometry(1, 3, 2).unwrap();
        let r21 = rank(&MultiIndex::new(vec![2, 1]).unwrap()).unwrap();
        let r12 = rank(&MultiIndex::new(vec![1, 2]).unwrap()).unwrap();
        assert_eq!(v.column_rows(), &[r21, r12]);
        let m = v.matrix();
        assert!(fro_norm(&(m.adjoint() * &m - CMatrix::identity(2, 2))) < 1e-15);
    }

    #[test]
    fn conjugation_is_perfect_not_for_one_qubit() {
        let v = conjugation_isometry(1, 1, 2).unwrap();
        assert_eq!(v.params().shift(), 1);
        assert_eq!(v.column_rows(), &[1, 0]);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pv = PhaseVector::random(2, &mut rng).unwrap();
        let out = v.apply(&n_fold_equatorial(&pv, 1).unwrap()).unwrap();
        let target = n_fold_equatorial(&pv.conjugate(), 1).unwrap();
        assert!((out.overlap_squared(&target) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn isometries_are_isometric() {
        for (n, m, d) in [(2u32, 4u32, 3u32), (1, 6, 5), (2, 6, 2)] {
            let v = if m >= n && (m - n) % d == 0 {
                cloning_isometry(n, m, d).unwrap()
            } else {
                conjugation_isometry(n, m, d).unwrap()
            };
            let mat = v.matrix();
            let gram = mat.adjoint() * &mat;
            assert!(fro_norm(&(gram - CMatrix::identity(v.input_dim(), v.input_dim()))) < 1e-12);
        }
        let v = conjugation_isometry(2, 4, 3).unwrap();
        let mat = v.matrix();
        assert!(fro_norm(&(mat.adjoint() * &mat - CMatrix::identity(6, 6))) < 1e-15);
    }

    #[test]
    fn choi_of_identity_channel() {
        let v = cloning_isometry(1, 1, 2).unwrap();
        let r = choi_from_isometry(&v);
        // |Ω⟩⟨Ω| with Ω = Σ_n |n⟩|n⟩: unit entries exactly at pair positions
        for a in 0..2 {
            for x in 0..2 {
                for b in 0..2 {
                    for y in 0..2 {
                        let val = r.matrix()[(r.index(a, x), r.index(b, y))];
                        let expect = if a == x && b == y { 1.0 } else { 0.0 };
                        assert!((val.re - expect).abs() < 1e-15 && val.im.abs() < 1e-15);
                    }
                }
            }
        }
        assert_eq!(numerical_rank(r.matrix(), 1e-9), 1);
        assert!(r.trace_preservation_residual() < 1e-12);
    }

    #[test]
    fn choi_is_rank_one_and_trace_preserving() {
        let r = choi_from_isometry(&cloning_isometry(1, 3, 2).unwrap());
        assert_eq!(numerical_rank(r.matrix(), 1e-9), 1);
        assert!(r.trace_preservation_residual() < 1e-12);
        let ev = hermitian_eigenvalues(r.matrix());
        assert!(ev[0] > -1e-12);
    }

    #[test]
    fn apply_channel_identity_returns_input() {
        let r = choi_from_isometry(&cloning_isometry(1, 1, 3).unwrap());
        let rho = random_density(3, 21);
        let out = apply_channel(&r, &rho).unwrap();
        assert!(fro_norm(&(out.matrix() - rho.matrix())) < 1e-12);
    }

    #[test]
    fn apply_channel_matches_isometry_conjugation() {
        let v = cloning_isometry(1, 3, 2).unwrap();
        let r = choi_from_isometry(&v);
        for seed in 0..5u64 {
            let rho = random_density(2, 100 + seed);
            let via_choi = apply_channel(&r, &rho).unwrap();
            let via_iso = v.apply_density(&rho).unwrap();
            assert!(fro_norm(&(via_choi.matrix() - via_iso.matrix())) < 1e-12);
            assert!((via_choi.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn covariance_of_optimal_channels() {
        let r = choi_from_isometry(&cloning_isometry(1, 3, 2).unwrap());
        let report = check_covariance(&r, 50, 7, 1e-10).unwrap();
        assert!(report.pass, "max norm {}", report.max_commutator_norm);

        let r = choi_from_isometry(&conjugation_isometry(1, 4, 5).unwrap());
        let report = check_covariance(&r, 25, 8, 1e-10).unwrap();
        assert!(report.pass, "max norm {}", report.max_commutator_norm);

        // identity channel is clone-covariant
        let r = choi_from_isometry(&cloning_isometry(2, 2, 2).unwrap());
        assert!(check_covariance(&r, 25, 9, 1e-10).unwrap().pass);

        // the k=N conjugator (M=N) is conjugate-covariant: the qubit NOT
        let r = choi_from_isometry(&conjugation_isometry(1, 1, 2).unwrap());
        assert!(check_covariance(&r, 25, 10, 1e-10).unwrap().pass);
    }

    #[test]
    fn covariance_distinguishes_the_directions() {
        // at d=2 every odd M admits both channel families, so the Choi
        // operators can be relabeled; each then fails the other commutator
        let cloner = choi_from_isometry(&cloning_isometry(1, 3, 2).unwrap());
        let cloner_as_conjugator = ChoiOperator::new(
            ChannelParams::new(Direction::Conjugate, 1, 3, 2).unwrap(),
            cloner.matrix().clone(),
        )
        .unwrap();
        assert!(check_covariance(&cloner, 10, 51, 1e-10).unwrap().pass);
        assert!(!check_covariance(&cloner_as_conjugator, 10, 52, 1e-10).unwrap().pass);

        let conjugator = choi_from_isometry(&conjugation_isometry(1, 1, 2).unwrap());
        let conjugator_as_cloner = ChoiOperator::new(
            ChannelParams::new(Direction::Clone, 1, 1, 2).unwrap(),
            conjugator.matrix().clone(),
        )
        .unwrap();
        assert!(check_covariance(&conjugator, 10, 53, 1e-10).unwrap().pass);
        assert!(!check_covariance(&conjugator_as_cloner, 10, 54, 1e-10).unwrap().pass);
    }

    #[test]
    fn identity_is_not_conjugate_covariant() {
        // |Ω⟩⟨Ω| has coherences across distinct U*⊗U* phase sectors, so the
        // identity channel fails conjugation covariance even for qubits.
        let id = choi_from_isometry(&cloning_isometry(1, 1, 2).unwrap());
        let params = ChannelParams::new(Direction::Conjugate, 1, 1, 2).unwrap();
        let as_conj = ChoiOperator::new(params, id.matrix().clone()).unwrap();
        let report = check_covariance(&as_conj, 25, 11, 1e-10).unwrap();
        assert!(!report.pass);
    }

    #[test]
    fn perturbed_choi_fails_covariance() {
        let mut r = choi_from_isometry(&cloning_isometry(1, 3, 2).unwrap());
        // (q=(3,0), n=(1,0)) and (q=(2,1), n=(1,0)) live in different classes
        let p = r.index(0, 0);
        let q = r.index(1, 0);
        let eps = Complex64::new(1e-3, 0.0);
        r.matrix_mut()[(p, q)] += eps;
        r.matrix_mut()[(q, p)] += eps;
        let report = check_covariance(&r, 25, 12, 1e-10).unwrap();
        assert!(!report.pass);
    }

    #[test]
    fn completion_of_identity_is_identity() {
        let v = cloning_isometry(1, 1, 4).unwrap();
        let u = economical_completion(&v);
        assert!(fro_norm(&(u.matrix() - CMatrix::identity(4, 4))) < 1e-15);
    }

    #[test]
    fn completion_is_unitary_and_extends_isometry() {
        let v = cloning_isometry(1, 3, 2).unwrap();
        let u = economical_completion(&v);
        let um = u.matrix();
        assert!(fro_norm(&(um.adjoint() * um - CMatrix::identity(4, 4))) < 1e-12);
        assert!(fro_norm(&(u.input_block() - v.matrix())) < 1e-15);

        // the canonical-basis completion is deterministic
        let again = economical_completion(&v);
        assert_eq!(again.matrix().as_slice(), um.as_slice());

        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..5 {
            let raw = CVector::from_fn(2, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let x = &raw / Complex64::from(raw.norm());
            let through_unitary = u.apply_embedded(&x).unwrap();
            let through_isometry = v.matrix() * &x;
            assert!((through_unitary - through_isometry).norm() < 1e-12);
        }
    }

    #[test]
    fn product_state_reduces_to_single_copy() {
        let pv = PhaseVector::zero(2).unwrap();
        let s = n_fold_equatorial(&pv, 3).unwrap();
        let rho1 = reduced_single_site(&s).unwrap();
        let single = n_fold_equatorial(&pv, 1).unwrap();
        let expect = single.amplitudes() * single.amplitudes().adjoint();
        assert!(fro_norm(&(rho1.matrix() - expect)) < 1e-12);
    }

    #[test]
    fn optimal_clone_single_site_fidelity() {
        let v = cloning_isometry(1, 3, 2).unwrap();
        let pv = PhaseVector::zero(2).unwrap();
        let out = v.apply(&n_fold_equatorial(&pv, 1).unwrap()).unwrap();
        let rho1 = reduced_single_site(&out).unwrap();
        let f = rho1.fidelity_with_pure(&n_fold_equatorial(&pv, 1).unwrap()).unwrap();
        assert!((f - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn conjugation_single_site_fidelity() {
        let v = conjugation_isometry(1, 4, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let pv = PhaseVector::random(5, &mut rng).unwrap();
        let out = v.apply(&n_fold_equatorial(&pv, 1).unwrap()).unwrap();
        let rho1 = reduced_single_site(&out).unwrap();
        let target = n_fold_equatorial(&pv.conjugate(), 1).unwrap();
        assert!((rho1.fidelity_with_pure(&target).unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn reduction_matches_full_tensor_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for (n, m, d) in [(1u32, 3u32, 2u32), (1, 5, 2), (2, 4, 2), (1, 4, 3), (2, 5, 3)] {
            let pv = PhaseVector::random(d, &mut rng).unwrap();
            let input = n_fold_equatorial(&pv, n).unwrap();
            let v = if (m >= n) && (m - n) % d == 0 {
                cloning_isometry(n, m, d).unwrap()
            } else {
                conjugation_isometry(n, m, d).unwrap()
            };
            let out = v.apply(&input).unwrap();
            let direct = reduced_single_site(&out).unwrap();
            let oracle = reduced_single_site_oracle(&out).unwrap();
            assert!(
                fro_norm(&(direct.matrix() - oracle.matrix())) < 1e-12,
                "mismatch at N={n} M={m} d={d}"
            );
        }
    }

    #[test]
    fn density_reduction_agrees_with_pure_reduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let pv = PhaseVector::random(3, &mut rng).unwrap();
        let s = n_fold_equatorial(&pv, 3).unwrap();
        let via_state = reduced_single_site(&s).unwrap();
        let via_density = reduced_single_site_density(&s.projector(), 3, 3).unwrap();
        assert!(fro_norm(&(via_state.matrix() - via_density.matrix())) < 1e-12);
    }

    #[test]
    fn shrink_factor_examples() {
        let pv = PhaseVector::zero(3).unwrap();
        let psi = n_fold_equatorial(&pv, 1).unwrap();

        let (eta, res) = shrink_factor(&psi.projector(), &psi).unwrap();
        assert!((eta - 1.0).abs() < 1e-12 && res < 1e-12);

        let mixed = DensityMatrix::maximally_mixed(3);
        let (eta, res) = shrink_factor(&mixed, &psi).unwrap();
        assert!(eta.abs() < 1e-12 && res < 1e-12);

        let v = cloning_isometry(1, 3, 2).unwrap();
        let pv2 = PhaseVector::zero(2).unwrap();
        let out = v.apply(&n_fold_equatorial(&pv2, 1).unwrap()).unwrap();
        let rho1 = reduced_single_site(&out).unwrap();
        let (eta, res) = shrink_factor(&rho1, &n_fold_equatorial(&pv2, 1).unwrap()).unwrap();
        assert!((eta - 2.0 / 3.0).abs() < 1e-12);
        assert!(res < 1e-10);
    }

    #[test]
    fn shrink_decomposition_holds_for_random_equatorial_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..5 {
            let pv = PhaseVector::random(3, &mut rng).unwrap();
            let v = conjugation_isometry(1, 5, 3).unwrap();
            let out = v.apply(&n_fold_equatorial(&pv, 1).unwrap()).unwrap();
            let rho1 = reduced_single_site(&out).unwrap();
            let target = n_fold_equatorial(&pv.conjugate(), 1).unwrap();
            let (_, res) = shrink_factor(&rho1, &target).unwrap();
            assert!(res < 1e-10);
        }
    }

    #[test]
    fn json_roundtrip_bit_identical() {
        let v = cloning_isometry(1, 3, 2).unwrap();
        let json = serde_json::to_string(&isometry_to_json(&v)).unwrap();
        let parsed: ChannelMatrixJson = serde_json::from_str(&json).unwrap();
        let (params, mat) = matrix_from_json(&parsed).unwrap();
        assert_eq!(params, *v.params());
        assert_eq!(mat.as_slice(), v.matrix().as_slice());

        let r = choi_from_isometry(&v);
        let json = serde_json::to_string(&choi_to_json(&r)).unwrap();
        let back = choi_from_json(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.matrix().as_slice(), r.matrix().as_slice());
    }
}
