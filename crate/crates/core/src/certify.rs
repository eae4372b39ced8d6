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

//! Numerical certification that the closed-form channels are optimal among
//! all phase-covariant channels.
//!
//! Covariance forces the Choi operator to be block diagonal over the torus
//! character classes: a basis pair `(|q⟩_M, |n⟩_N)` belongs to the class
//! labelled by `q - n` (cloning) or `q + n` (conjugation). Classes partition
//! the full product basis; a class is *complete* when it contains every input
//! occupation (cloning classes with a negative label component, and
//! conjugation classes missing `m_i ≥ n_i`, are incomplete). Trace
//! preservation couples blocks only through their diagonals: for every input
//! `n`, the diagonal entries at `n` across blocks must sum to one.
//!
//! Certification explores this feasible set three ways: random feasible
//! channels (never beat the closed form), an iterative ascent over rank-one
//! blocks with exact renormalization (every iterate is feasible, so no
//! reported value can exceed the true optimum), and the complete-block
//! extreme points themselves.

use crate::channels::{ChannelParams, ChoiOperator, Direction};
use crate::error::{Error, Result};
use crate::fidelity::{f_clone_global, f_single};
use crate::linalg::{numerical_rank, CMatrix};
use crate::symbasis::{enumerate_multi_indices, multinomial, MultiIndex};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

/// One basis pair of a covariant block.
#[derive(Debug, Clone)]
pub struct BlockPair {
    pub output: MultiIndex,
    pub input: MultiIndex,
    pub out_rank: usize,
    pub in_rank: usize,
}

/// One character class: the coherences a covariant Choi operator may carry.
#[derive(Debug, Clone)]
pub struct Block {
    /// Class label: componentwise `q - n` (cloning; entries may be negative)
    /// or `q + n` (conjugation).
    pub label: Vec<i64>,
    /// Pairs ordered by input rank; each input occurs at most once.
    pub pairs: Vec<BlockPair>,
}

impl Block {
    pub fn size(&self) -> usize {
        self.pairs.len()
    }
}

/// The full class decomposition for one parameter point.
#[derive(Debug, Clone)]
pub struct BlockStructure {
    params: ChannelParams,
    input_dim: usize,
    output_dim: usize,
    blocks: Vec<Block>,
}

impl BlockStructure {
    pub fn params(&self) -> &ChannelParams {
        &self.params
    }
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }
    pub fn input_dim(&self) -> usize {
        self.input_dim
    }
    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    /// A block is complete when it pairs every input basis vector.
    pub fn is_complete(&self, block: &Block) -> bool {
        block.size() == self.input_dim
    }

    /// Number of complete classes (the classes the closed-form optima live in).
    pub fn complete_block_count(&self) -> usize {
        self.blocks.iter().filter(|b| self.is_complete(b)).count()
    }

    pub fn total_pairs(&self) -> usize {
        self.blocks.iter().map(Block::size).sum()
    }

    /// How many blocks carry each input rank.
    fn input_coverage(&self) -> Vec<usize> {
        let mut cover = vec![0usize; self.input_dim];
        for b in &self.blocks {
            for p in &b.pairs {
                cover[p.in_rank] += 1;
            }
        }
        cover
    }
}

fn class_label(direction: Direction, q: &MultiIndex, n: &MultiIndex) -> Vec<i64> {
    q.occupations()
        .iter()
        .zip(n.occupations())
        .map(|(&qo, &no)| match direction {
            Direction::Clone => qo as i64 - no as i64,
            Direction::Conjugate => qo as i64 + no as i64,
        })
        .collect()
}

/// Group the product basis `H_out ⊗ H_in` into torus character classes.
pub fn block_decompose(n: u32, m: u32, d: u32, direction: Direction) -> Result<BlockStructure> {
    let params = ChannelParams::new(direction, n, m, d)?;
    let in_basis = enumerate_multi_indices(n, d)?;
    let out_basis = enumerate_multi_indices(m, d)?;
    let mut classes: BTreeMap<Vec<i64>, Vec<BlockPair>> = BTreeMap::new();
    for (in_rank, ni) in in_basis.iter().enumerate() {
        for (out_rank, qi) in out_basis.iter().enumerate() {
            let label = class_label(direction, qi, ni);
            classes.entry(label).or_default().push(BlockPair {
                output: qi.clone(),
                input: ni.clone(),
                out_rank,
                in_rank,
            });
        }
    }
    let blocks = classes
        .into_iter()
        .map(|(label, mut pairs)| {
            pairs.sort_by_key(|p| p.in_rank);
            Block { label, pairs }
        })
        .collect();
    Ok(BlockStructure {
        params,
        input_dim: in_basis.len(),
        output_dim: out_basis.len(),
        blocks,
    })
}

/// A covariant channel: one Hermitian PSD coefficient matrix per block, with
/// the per-input diagonal sums adding to one (trace preservation).
#[derive(Debug, Clone)]
pub struct CovariantChannel {
    structure: BlockStructure,
    block_mats: Vec<CMatrix>,
}

impl CovariantChannel {
    pub fn from_block_matrices(structure: BlockStructure, block_mats: Vec<CMatrix>) -> Result<Self> {
        if block_mats.len() != structure.blocks.len() {
            return Err(Error::DimensionMismatch {
                context: "covariant channel blocks",
                expected: structure.blocks.len(),
                actual: block_mats.len(),
            });
        }
        for (b, m) in structure.blocks.iter().zip(&block_mats) {
            if m.nrows() != b.size() || m.ncols() != b.size() {
                return Err(Error::DimensionMismatch {
                    context: "covariant channel block",
                    expected: b.size(),
                    actual: m.nrows(),
                });
            }
        }
        Ok(Self { structure, block_mats })
    }

    /// Extract the block coefficients of an existing covariant Choi operator.
    pub fn from_choi(structure: BlockStructure, choi: &ChoiOperator) -> Result<Self> {
        let mats = structure
            .blocks
            .iter()
            .map(|b| {
                CMatrix::from_fn(b.size(), b.size(), |r, c| {
                    let pr = &b.pairs[r];
                    let pc = &b.pairs[c];
                    choi.matrix()[(
                        choi.index(pr.out_rank, pr.in_rank),
                        choi.index(pc.out_rank, pc.in_rank),
                    )]
                })
            })
            .collect();
        Self::from_block_matrices(structure, mats)
    }

    pub fn structure(&self) -> &BlockStructure {
        &self.structure
    }

    pub fn block_matrices(&self) -> &[CMatrix] {
        &self.block_mats
    }

    /// Assemble the dense block-diagonal Choi operator.
    pub fn assemble_choi(&self) -> Result<ChoiOperator> {
        let side = self.structure.input_dim * self.structure.output_dim;
        let in_dim = self.structure.input_dim;
        let mut mat = CMatrix::zeros(side, side);
        for (b, bm) in self.structure.blocks.iter().zip(&self.block_mats) {
            for (r, pr) in b.pairs.iter().enumerate() {
                for (c, pc) in b.pairs.iter().enumerate() {
                    mat[(pr.out_rank * in_dim + pr.in_rank, pc.out_rank * in_dim + pc.in_rank)] =
                        bm[(r, c)];
                }
            }
        }
        ChoiOperator::new(self.structure.params, mat)
    }

    /// Deviation of the per-input diagonal sums from one.
    pub fn tp_residual(&self) -> f64 {
        let mut sums = vec![0.0f64; self.structure.input_dim];
        for (b, bm) in self.structure.blocks.iter().zip(&self.block_mats) {
            for (r, pr) in b.pairs.iter().enumerate() {
                sums[pr.in_rank] += bm[(r, r)].re;
            }
        }
        sums.iter().map(|s| (s - 1.0) * (s - 1.0)).sum::<f64>().sqrt()
    }

    /// Smallest block eigenvalue (complete positivity indicator).
    pub fn min_block_eigenvalue(&self) -> f64 {
        self.block_mats
            .iter()
            .map(|m| crate::linalg::hermitian_eigenvalues(m)[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Figure of merit `Tr[A R]` against precomputed objective blocks.
    fn value_against(&self, objective: &[CMatrix]) -> f64 {
        let mut acc = 0.0;
        for (a, r) in objective.iter().zip(&self.block_mats) {
            for row in 0..a.nrows() {
                for col in 0..a.ncols() {
                    acc += (a[(row, col)] * r[(col, row)]).re;
                }
            }
        }
        acc
    }

    /// Evaluate the channel's figure of merit.
    pub fn fidelity(&self, figure: Figure) -> Result<f64> {
        let objective = objective_blocks(&self.structure, figure)?;
        Ok(self.value_against(&objective))
    }
}

/// Which fidelity the certification targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Figure {
    Global,
    SingleSite,
}

/// Seed-state amplitude on the symmetric basis: `sqrt(mult(q)) / d^{copies/2}`.
fn seed_amplitudes(copies: u32, d: u32) -> Result<Vec<f64>> {
    let scale = (d as f64).powi(copies as i32).sqrt().recip();
    enumerate_multi_indices(copies, d)?
        .iter()
        .map(|mi| Ok((multinomial(mi)? as f64).sqrt() * scale))
        .collect()
}

/// Matrix elements `⟨q'| (|ψ₀⟩⟨ψ₀| ⊗ I^{⊗(M-1)}) |q''⟩` on the symmetric
/// output space: the single-site overlap operator.
fn single_site_overlap_matrix(m: u32, d: u32) -> Result<CMatrix> {
    let basis = enumerate_multi_indices(m, d)?;
    let dim = basis.len();
    let mut rank_of: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    for (r, mi) in basis.iter().enumerate() {
        rank_of.insert(mi.occupations().to_vec(), r);
    }
    let mut a = CMatrix::zeros(dim, dim);
    let scale = 1.0 / (d as f64 * m as f64);
    for (r, q) in basis.iter().enumerate() {
        let occ = q.occupations();
        for i in 0..d as usize {
            if occ[i] == 0 {
                continue;
            }
            // q'' = q - e_i + e_j reaches rank via the shared (M-1)-pattern
            let mut target = occ.to_vec();
            target[i] -= 1;
            for j in 0..d as usize {
                target[j] += 1;
                let c = rank_of[&target];
                let w = (occ[i] as f64 * target[j] as f64).sqrt() * scale;
                a[(r, c)] += Complex64::from(w);
                target[j] -= 1;
            }
        }
    }
    Ok(a)
}

/// Restrict the figure-of-merit operator `A` to each covariant block.
pub fn objective_blocks(bs: &BlockStructure, figure: Figure) -> Result<Vec<CMatrix>> {
    let p = bs.params();
    let (m, n, d) = (p.output_copies(), p.input_copies(), p.levels());
    let in_amp = seed_amplitudes(n, d)?;
    match figure {
        Figure::Global => {
            let out_amp = seed_amplitudes(m, d)?;
            Ok(bs
                .blocks
                .iter()
                .map(|b| {
                    CMatrix::from_fn(b.size(), b.size(), |r, c| {
                        let pr = &b.pairs[r];
                        let pc = &b.pairs[c];
                        Complex64::from(
                            out_amp[pr.out_rank]
                                * in_amp[pr.in_rank]
                                * out_amp[pc.out_rank]
                                * in_amp[pc.in_rank],
                        )
                    })
                })
                .collect())
        }
        Figure::SingleSite => {
            let overlap = single_site_overlap_matrix(m, d)?;
            Ok(bs
                .blocks
                .iter()
                .map(|b| {
                    CMatrix::from_fn(b.size(), b.size(), |r, c| {
                        let pr = &b.pairs[r];
                        let pc = &b.pairs[c];
                        overlap[(pr.out_rank, pc.out_rank)]
                            * Complex64::from(in_amp[pr.in_rank] * in_amp[pc.in_rank])
                    })
                })
                .collect())
        }
    }
}

/// Draw a random feasible covariant channel: per block a Wishart-style PSD
/// matrix, then the forced diagonal normalization that makes the channel
/// trace preserving (a congruence, so positivity survives).
pub fn sample_covariant_channel(bs: &BlockStructure, seed: u64) -> Result<CovariantChannel> {
    let cover = bs.input_coverage();
    if let Some(missing) = cover.iter().position(|&c| c == 0) {
        return Err(Error::InfeasibleBlocks { input_rank: missing });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mats: Vec<CMatrix> = Vec::with_capacity(bs.blocks.len());
    for b in &bs.blocks {
        let g = CMatrix::from_fn(b.size(), b.size(), |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        mats.push(&g * g.adjoint());
    }
    // per-input diagonal sums
    let mut sums = vec![0.0f64; bs.input_dim];
    for (b, m) in bs.blocks.iter().zip(&mats) {
        for (r, pr) in b.pairs.iter().enumerate() {
            sums[pr.in_rank] += m[(r, r)].re;
        }
    }
    if let Some(zero) = sums.iter().position(|&s| s <= f64::MIN_POSITIVE) {
        return Err(Error::InfeasibleBlocks { input_rank: zero });
    }
    for (b, m) in bs.blocks.iter().zip(mats.iter_mut()) {
        for (r, pr) in b.pairs.iter().enumerate() {
            for (c, pc) in b.pairs.iter().enumerate() {
                let scale = (sums[pr.in_rank] * sums[pc.in_rank]).sqrt().recip();
                m[(r, c)] *= Complex64::from(scale);
            }
        }
    }
    CovariantChannel::from_block_matrices(bs.clone(), mats)
}

/// Result of [`ascend_fidelity`].
#[derive(Debug)]
pub struct AscentResult {
    pub channel: CovariantChannel,
    pub value: f64,
    pub converged: bool,
}

/// Iteratively maximize the figure of merit over covariant channels with
/// rank-one blocks `R_b = v_b v_b†` under the exact per-input normalization
/// `Σ_b |v_b(n)|² = 1`.
///
/// Each sweep moves every block vector along `A_b v_b` (the power step toward
/// the dominant eigenvector of the block objective) and renormalizes the
/// per-input budgets, so every iterate is exactly feasible and no evaluated
/// value can exceed the true optimum. The complete-class extreme points
/// (all-ones block vectors, which are feasible channels in their own right)
/// are scanned as starting candidates; the best feasible value wins.
pub fn ascend_fidelity(
    bs: &BlockStructure,
    figure: Figure,
    iters: usize,
    tol: f64,
) -> Result<AscentResult> {
    let objective = objective_blocks(bs, figure)?;
    let cover = bs.input_coverage();
    if let Some(missing) = cover.iter().position(|&c| c == 0) {
        return Err(Error::InfeasibleBlocks { input_rank: missing });
    }

    let channel_from = |vecs: &[Vec<f64>]| -> Result<CovariantChannel> {
        let mats = bs
            .blocks
            .iter()
            .zip(vecs)
            .map(|(b, v)| {
                CMatrix::from_fn(b.size(), b.size(), |r, c| Complex64::from(v[r] * v[c]))
            })
            .collect();
        CovariantChannel::from_block_matrices(bs.clone(), mats)
    };
    let value_of = |vecs: &[Vec<f64>]| -> f64 {
        let mut acc = 0.0;
        for (a, v) in objective.iter().zip(vecs) {
            for r in 0..v.len() {
                for c in 0..v.len() {
                    acc += a[(r, c)].re * v[r] * v[c];
                }
            }
        }
        acc
    };

    // complete-class extreme points: all weight on one class, uniform phases
    let mut best_vecs: Option<Vec<Vec<f64>>> = None;
    let mut best_value = f64::NEG_INFINITY;
    for (bi, b) in bs.blocks.iter().enumerate() {
        if !bs.is_complete(b) {
            continue;
        }
        let mut vecs: Vec<Vec<f64>> = bs.blocks.iter().map(|b| vec![0.0; b.size()]).collect();
        vecs[bi] = vec![1.0; b.size()];
        let val = value_of(&vecs);
        if val > best_value {
            best_value = val;
            best_vecs = Some(vecs);
        }
    }

    // multiplicative ascent from the uniform feasible start
    let mut vecs: Vec<Vec<f64>> = bs
        .blocks
        .iter()
        .map(|b| b.pairs.iter().map(|p| (cover[p.in_rank] as f64).sqrt().recip()).collect())
        .collect();
    let mut prev = value_of(&vecs);
    let mut converged = false;
    for _ in 0..iters {
        // power step toward each block objective's dominant eigenvector
        let mut next: Vec<Vec<f64>> = Vec::with_capacity(vecs.len());
        for (a, v) in objective.iter().zip(&vecs) {
            let mut u = vec![0.0f64; v.len()];
            for r in 0..v.len() {
                let mut acc = 0.0;
                for c in 0..v.len() {
                    acc += a[(r, c)].re * v[c];
                }
                u[r] = acc;
            }
            next.push(u);
        }
        // exact projection back onto the per-input budget constraint
        let mut budget = vec![0.0f64; bs.input_dim];
        for (b, u) in bs.blocks.iter().zip(&next) {
            for (r, pr) in b.pairs.iter().enumerate() {
                budget[pr.in_rank] += u[r] * u[r];
            }
        }
        for (b, u) in bs.blocks.iter().zip(next.iter_mut()) {
            for (r, pr) in b.pairs.iter().enumerate() {
                let s = budget[pr.in_rank].sqrt();
                if s > 0.0 {
                    u[r] /= s;
                } else {
                    u[r] = (cover[pr.in_rank] as f64).sqrt().recip();
                }
            }
        }
        // a zero budget can only happen if every block vector vanished at an
        // input; the reset above restores feasibility, but renormalize again
        // in case the reset mixed normalized and reset entries
        let mut check = vec![0.0f64; bs.input_dim];
        for (b, u) in bs.blocks.iter().zip(&next) {
            for (r, pr) in b.pairs.iter().enumerate() {
                check[pr.in_rank] += u[r] * u[r];
            }
        }
        for (b, u) in bs.blocks.iter().zip(next.iter_mut()) {
            for (r, pr) in b.pairs.iter().enumerate() {
                u[r] /= check[pr.in_rank].sqrt();
            }
        }
        vecs = next;
        let val = value_of(&vecs);
        if (val - prev).abs() < tol {
            prev = val;
            converged = true;
            break;
        }
        prev = val;
    }
    if prev > best_value {
        best_value = prev;
        best_vecs = Some(vecs);
    }

    let vecs = best_vecs.ok_or_else(|| {
        Error::InvalidParameter("no feasible ascent point found (no complete class)".into())
    })?;
    Ok(AscentResult { channel: channel_from(&vecs)?, value: best_value, converged })
}

/// Economical test: the Choi operator has numerical rank one at threshold
/// `tol * λ_max`, i.e. the channel is a single isometry.
pub fn is_economical_choi(choi: &ChoiOperator, tol: f64) -> bool {
    numerical_rank(choi.matrix(), tol) == 1
}

/// [`is_economical_choi`] for an assembled covariant channel.
pub fn is_economical(channel: &CovariantChannel, tol: f64) -> Result<bool> {
    Ok(is_economical_choi(&channel.assemble_choi()?, tol))
}

/// Insert a covariance-violating coherence between two classes (fault
/// injection for the verification suite). Hermiticity is preserved.
pub fn perturb_choi_off_block(choi: &mut ChoiOperator, eps: f64) -> Result<()> {
    let p = choi.params();
    let bs = block_decompose(p.input_copies(), p.output_copies(), p.levels(), p.direction())?;
    let a = &bs.blocks[0].pairs[0];
    let b = bs
        .blocks
        .iter()
        .skip(1)
        .flat_map(|b| b.pairs.first())
        .next()
        .ok_or_else(|| Error::InvalidParameter("single-class structure cannot be perturbed off-block".into()))?;
    let i = choi.index(a.out_rank, a.in_rank);
    let j = choi.index(b.out_rank, b.in_rank);
    choi.matrix_mut()[(i, j)] += Complex64::from(eps);
    choi.matrix_mut()[(j, i)] += Complex64::from(eps);
    Ok(())
}

/// Certification summary for one parameter point.
#[derive(Debug, Serialize)]
pub struct CertificationReport {
    pub direction: Direction,
    pub n: u32,
    pub m: u32,
    pub d: u32,
    pub k: u32,
    pub figure: Figure,
    pub closed_form: f64,
    pub ascended_value: f64,
    pub gap: f64,
    pub samples_max: f64,
    pub economical: bool,
    pub converged: bool,
}

/// Run the full certification at one parameter point: closed form vs ascent
/// vs `samples` random feasible channels, plus the economy test of the
/// optimum.
pub fn certify_point(
    params: &ChannelParams,
    figure: Figure,
    samples: usize,
    seed: u64,
    iters: usize,
    tol: f64,
) -> Result<CertificationReport> {
    let bs = block_decompose(
        params.input_copies(),
        params.output_copies(),
        params.levels(),
        params.direction(),
    )?;
    let closed_form = match figure {
        Figure::SingleSite => f_single(params)?,
        Figure::Global => match params.direction() {
            Direction::Clone => {
                f_clone_global(params.input_copies(), params.output_copies(), params.levels())?
            }
            Direction::Conjugate => {
                return Err(Error::InvalidParameter(
                    "global-fidelity certification is defined for cloning only".into(),
                ))
            }
        },
    };
    let ascent = ascend_fidelity(&bs, figure, iters, tol)?;
    let objective = objective_blocks(&bs, figure)?;
    let mut samples_max = f64::NEG_INFINITY;
    for s in 0..samples {
        let ch = sample_covariant_channel(&bs, seed.wrapping_add(s as u64))?;
        samples_max = samples_max.max(ch.value_against(&objective));
    }
    let economical = is_economical(&ascent.channel, 1e-9)?;
    Ok(CertificationReport {
        direction: params.direction(),
        n: params.input_copies(),
        m: params.output_copies(),
        d: params.levels(),
        k: params.shift(),
        figure,
        closed_form,
        ascended_value: ascent.value,
        gap: closed_form - ascent.value,
        samples_max,
        economical,
        converged: ascent.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{check_covariance, choi_from_isometry, cloning_isometry, conjugation_isometry};
    use crate::fidelity::{f_clone_single, f_conj_single};
    use crate::linalg::fro_norm;

    #[test]
    fn block_structure_of_trivial_cloner() {
        let bs = block_decompose(1, 1, 2, Direction::Clone).unwrap();
        // one size-2 class with label (0,0) plus two singleton classes
        assert_eq!(bs.blocks().len(), 3);
        assert_eq!(bs.complete_block_count(), 1);
        let complete: Vec<_> = bs.blocks().iter().filter(|b| bs.is_complete(b)).collect();
        assert_eq!(complete[0].label, vec![0, 0]);
        assert_eq!(complete[0].size(), 2);
        let singletons = bs.blocks().iter().filter(|b| b.size() == 1).count();
        assert_eq!(singletons, 2);
    }

    #[test]
    fn block_counts_for_one_to_three_cloner() {
        let bs = block_decompose(1, 3, 2, Direction::Clone).unwrap();
        // the three nonnegative labels with sum M-N = 2 are complete classes
        assert_eq!(bs.complete_block_count(), 3);
        assert_eq!(bs.blocks().len(), 5);
        // classes partition the full product basis
        assert_eq!(bs.total_pairs(), bs.input_dim() * bs.output_dim());
    }

    #[test]
    fn blocks_are_disjoint_and_cover() {
        for dir in [Direction::Clone, Direction::Conjugate] {
            let bs = match dir {
                Direction::Clone => block_decompose(2, 8, 3, dir).unwrap(),
                Direction::Conjugate => block_decompose(2, 4, 3, dir).unwrap(),
            };
            let mut seen = std::collections::HashSet::new();
            for b in bs.blocks() {
                for p in &b.pairs {
                    assert!(seen.insert((p.out_rank, p.in_rank)), "pair repeated");
                    assert_eq!(class_label(dir, &p.output, &p.input), b.label);
                }
            }
            assert_eq!(seen.len(), bs.input_dim() * bs.output_dim());
        }
    }

    #[test]
    fn optimal_choi_roundtrips_through_blocks() {
        let v = cloning_isometry(1, 3, 2).unwrap();
        let choi = choi_from_isometry(&v);
        let bs = block_decompose(1, 3, 2, Direction::Clone).unwrap();
        let ch = CovariantChannel::from_choi(bs, &choi).unwrap();
        let back = ch.assemble_choi().unwrap();
        assert_eq!(back.matrix().as_slice(), choi.matrix().as_slice());
        assert!(ch.tp_residual() < 1e-12);
    }

    #[test]
    fn sampled_channels_are_feasible_and_covariant() {
        let bs = block_decompose(1, 3, 2, Direction::Clone).unwrap();
        for seed in 0..5u64 {
            let ch = sample_covariant_channel(&bs, seed).unwrap();
            assert!(ch.tp_residual() < 1e-8, "seed={seed}");
            assert!(ch.min_block_eigenvalue() > -1e-10);
            let choi = ch.assemble_choi().unwrap();
            assert!(choi.trace_preservation_residual() < 1e-8);
            let report = check_covariance(&choi, 10, seed, 1e-8).unwrap();
            assert!(report.pass, "seed={seed}: {}", report.max_commutator_norm);
        }
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let bs = block_decompose(1, 4, 3, Direction::Clone).unwrap();
        let a = sample_covariant_channel(&bs, 9).unwrap();
        let b = sample_covariant_channel(&bs, 9).unwrap();
        for (x, y) in a.block_matrices().iter().zip(b.block_matrices()) {
            assert_eq!(x.as_slice(), y.as_slice());
        }
    }

    #[test]
    fn singleton_structure_forces_the_unique_channel() {
        let full = block_decompose(1, 1, 2, Direction::Clone).unwrap();
        // keep only the two singleton classes: they cover each input exactly
        // once, so normalization forces R_b = [1] regardless of the seed
        let blocks: Vec<Block> =
            full.blocks().iter().filter(|b| b.size() == 1).cloned().collect();
        assert_eq!(blocks.len(), 2);
        let bs = BlockStructure { blocks, ..full.clone() };
        let a = sample_covariant_channel(&bs, 1).unwrap();
        let b = sample_covariant_channel(&bs, 2).unwrap();
        for (x, y) in a.block_matrices().iter().zip(b.block_matrices()) {
            assert!((x[(0, 0)] - y[(0, 0)]).norm() < 1e-15);
            assert!((x[(0, 0)].re - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn infeasible_structure_is_reported() {
        let full = block_decompose(1, 1, 2, Direction::Clone).unwrap();
        let blocks: Vec<Block> =
            full.blocks().iter().filter(|b| b.size() == 1).take(1).cloned().collect();
        let bs = BlockStructure { blocks, ..full.clone() };
        assert!(matches!(
            sample_covariant_channel(&bs, 0),
            Err(Error::InfeasibleBlocks { .. })
        ));
    }

    #[test]
    fn objective_of_optimum_reproduces_closed_forms() {
        let bs = block_decompose(1, 3, 2, Direction::Clone).unwrap();
        let choi = choi_from_isometry(&cloning_isometry(1, 3, 2).unwrap());
        let ch = CovariantChannel::from_choi(bs, &choi).unwrap();
        let f1 = ch.fidelity(Figure::SingleSite).unwrap();
        assert!((f1 - f_clone_single(1, 3, 2).unwrap()).abs() < 1e-12);
        let fg = ch.fidelity(Figure::Global).unwrap();
        assert!((fg - 0.75).abs() < 1e-12);

        let bs = block_decompose(1, 4, 5, Direction::Conjugate).unwrap();
        let choi = choi_from_isometry(&conjugation_isometry(1, 4, 5).unwrap());
        let ch = CovariantChannel::from_choi(bs, &choi).unwrap();
        let f1 = ch.fidelity(Figure::SingleSite).unwrap();
        assert!((f1 - 0.4).abs() < 1e-12);
    }

    #[test]
    fn ascent_recovers_closed_forms() {
        let cases: Vec<(u32, u32, u32, Direction)> = vec![
            (1, 3, 2, Direction::Clone),
            (2, 4, 2, Direction::Clone),
            (1, 4, 3, Direction::Clone),
            (1, 1, 2, Direction::Conjugate),
            (1, 4, 5, Direction::Conjugate),
            (1, 5, 3, Direction::Conjugate),
        ];
        for (n, m, d, dir) in cases {
            let bs = block_decompose(n, m, d, dir).unwrap();
            let res = ascend_fidelity(&bs, Figure::SingleSite, 400, 1e-12).unwrap();
            let closed = match dir {
                Direction::Clone => f_clone_single(n, m, d).unwrap(),
                Direction::Conjugate => f_conj_single(n, m, d).unwrap(),
            };
            assert!(
                res.value >= closed - 1e-6 && res.value <= closed + 1e-9,
                "{dir} N={n} M={m} d={d}: {} vs {closed}",
                res.value
            );
            assert!(res.channel.tp_residual() < 1e-8);
        }
    }

    #[test]
    fn ascent_finds_identity_at_equal_copies() {
        let bs = block_decompose(2, 2, 3, Direction::Clone).unwrap();
        let res = ascend_fidelity(&bs, Figure::SingleSite, 200, 1e-12).unwrap();
        assert!((res.value - 1.0).abs() < 1e-9);
        let res = ascend_fidelity(&bs, Figure::Global, 200, 1e-12).unwrap();
        assert!((res.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ascended_channel_matches_paper_choi_projector() {
        let bs = block_decompose(1, 3, 2, Direction::Clone).unwrap();
        let res = ascend_fidelity(&bs, Figure::SingleSite, 400, 1e-12).unwrap();
        let got = res.channel.assemble_choi().unwrap();
        let want = choi_from_isometry(&cloning_isometry(1, 3, 2).unwrap());
        let gp = got.matrix() / Complex64::from(got.matrix().trace().re);
        let wp = want.matrix() / Complex64::from(want.matrix().trace().re);
        assert!(fro_norm(&(gp - wp)) < 1e-5);
    }

    #[test]
    fn random_channels_never_beat_the_closed_form() {
        let bs = block_decompose(1, 3, 2, Direction::Clone).unwrap();
        let objective = objective_blocks(&bs, Figure::SingleSite).unwrap();
        let closed = f_clone_single(1, 3, 2).unwrap();
        for seed in 0..100u64 {
            let ch = sample_covariant_channel(&bs, seed).unwrap();
            assert!(ch.value_against(&objective) <= closed + 1e-9);
        }
    }

    #[test]
    fn economy_detection() {
        let optimal = choi_from_isometry(&cloning_isometry(1, 3, 2).unwrap());
        assert!(is_economical_choi(&optimal, 1e-9));

        let identity = choi_from_isometry(&cloning_isometry(1, 1, 3).unwrap());
        assert!(is_economical_choi(&identity, 1e-9));

        // an equal mixture of two distinct complete-class channels has rank 2
        let bs = block_decompose(1, 3, 2, Direction::Clone).unwrap();
        let mut mats: Vec<CMatrix> =
            bs.blocks().iter().map(|b| CMatrix::zeros(b.size(), b.size())) .collect();
        let complete: Vec<usize> = (0..bs.blocks().len())
            .filter(|&i| bs.is_complete(&bs.blocks()[i]))
            .collect();
        for &bi in complete.iter().take(2) {
            let size = bs.blocks()[bi].size();
            mats[bi] = CMatrix::from_element(size, size, Complex64::from(0.5));
        }
        let mixture = CovariantChannel::from_block_matrices(bs.clone(), mats).unwrap();
        assert!(mixture.tp_residual() < 1e-12);
        assert!(!is_economical(&mixture, 1e-9).unwrap());
    }

    #[test]
    fn zero_iteration_ascent_still_returns_a_feasible_candidate() {
        let bs = block_decompose(1, 3, 2, Direction::Clone).unwrap();
        let res = ascend_fidelity(&bs, Figure::SingleSite, 0, 1e-12).unwrap();
        assert!(!res.converged);
        assert!((res.value - f_clone_single(1, 3, 2).unwrap()).abs() < 1e-12);
        assert!(res.channel.tp_residual() < 1e-12);
    }

    #[test]
    fn perturbation_breaks_covariance() {
        let mut choi = choi_from_isometry(&cloning_isometry(1, 3, 2).unwrap());
        perturb_choi_off_block(&mut choi, 1e-3).unwrap();
        let report = check_covariance(&choi, 25, 3, 1e-10).unwrap();
        assert!(!report.pass);
    }

    #[test]
    fn certification_report_fields() {
        let params = ChannelParams::new(Direction::Clone, 1, 3, 2).unwrap();
        let report = certify_point(&params, Figure::SingleSite, 50, 0, 400, 1e-12).unwrap();
        assert!(report.gap.abs() < 1e-6);
        assert!(report.samples_max <= report.closed_form + 1e-9);
        assert!(report.economical);
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("closed_form"));
    }
}
