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

//! Exact combinatorics of the symmetric subspace of N qudits.
//!
//! The symmetric subspace of `(C^d)^{⊗N}` has an orthonormal basis labelled by
//! occupation vectors `(n_0, …, n_{d-1})` with `Σ n_i = N`. Everything in this
//! crate indexes that basis in one fixed total order, *colexicographic* on the
//! occupation vector (the last slot is the most significant digit). All
//! integer combinatorics are exact and overflow-checked; floating point enters
//! only at the linear-algebra boundary.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Default cap on the full-tensor dimension `d^N` used by the brute-force
/// embedding; oracles only ever need small instances.
pub const DEFAULT_TENSOR_BUDGET: u64 = 1 << 20;

/// Occupation vector labelling a symmetric-basis state: `occ[i]` systems sit
/// in the computational level `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    occ: Vec<u32>,
}

impl MultiIndex {
    /// Build from an occupation vector. `d = occ.len()` must be at least 2.
    pub fn new(occ: Vec<u32>) -> Result<Self> {
        if occ.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "occupation vector needs d >= 2 slots, got {}",
                occ.len()
            )));
        }
        occ.iter()
            .try_fold(0u32, |acc, &v| acc.checked_add(v))
            .ok_or(Error::Overflow { context: "occupation total" })?;
        Ok(Self { occ })
    }

    pub fn occupations(&self) -> &[u32] {
        &self.occ
    }

    /// Number of levels d.
    pub fn levels(&self) -> u32 {
        self.occ.len() as u32
    }

    /// Total number of systems N = Σ n_i.
    pub fn total(&self) -> u32 {
        self.occ.iter().sum()
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.occ.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

fn checked_binomial(n: u64, k: u64) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 1..=k {
        // acc * (n-k+i) / i is exact at every step; widen to u128 to detect
        // overflow of the final value rather than of the intermediate product.
        let wide = (acc as u128) * ((n - k + i) as u128) / (i as u128);
        acc = u64::try_from(wide).map_err(|_| Error::Overflow { context: "binomial coefficient" })?;
    }
    Ok(acc)
}

/// Dimension of the symmetric subspace: `C(N+d-1, d-1)`.
pub fn sym_dim(n: u32, d: u32) -> Result<usize> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("d must be >= 2, got {d}")));
    }
    let v = checked_binomial(n as u64 + d as u64 - 1, d as u64 - 1)?;
    usize::try_from(v).map_err(|_| Error::Overflow { context: "symmetric dimension" })
}

/// All occupation vectors with total `n` over `d` levels, in colexicographic
/// order. This is the canonical basis order for every matrix in the crate.
pub fn enumerate_multi_indices(n: u32, d: u32) -> Result<Vec<MultiIndex>> {
    let dim = sym_dim(n, d)?;
    let mut out = Vec::with_capacity(dim);
    let mut occ = vec![0u32; d as usize];
    // Recurse from the most significant slot (the last) downwards, ascending.
    fn fill(occ: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
        if pos == 0 {
            occ[0] = remaining;
            out.push(MultiIndex { occ: occ.clone() });
            return;
        }
        for v in 0..=remaining {
            occ[pos] = v;
            fill(occ, pos - 1, remaining - v, out);
        }
    }
    fill(&mut occ, d as usize - 1, n, &mut out);
    debug_assert_eq!(out.len(), dim);
    Ok(out)
}

/// Position of `mi` in the canonical (colexicographic) order.
pub fn rank(mi: &MultiIndex) -> Result<usize> {
    let mut r: u64 = 0;
    let mut remaining = mi.total() as u64;
    for pos in (1..mi.occ.len()).rev() {
        // Everything with a smaller digit at the most significant remaining
        // slot comes first; `pos` slots remain below.
        for v in 0..mi.occ[pos] as u64 {
            let count = checked_binomial(remaining - v + pos as u64 - 1, pos as u64 - 1)?;
            r = r
                .checked_add(count)
                .ok_or(Error::Overflow { context: "colex rank" })?;
        }
        remaining -= mi.occ[pos] as u64;
    }
    usize::try_from(r).map_err(|_| Error::Overflow { context: "colex rank" })
}

/// Inverse of [`rank`]: the occupation vector at position `r`.
pub fn unrank(r: usize, n: u32, d: u32) -> Result<MultiIndex> {
    let dim = sym_dim(n, d)?;
    if r >= dim {
        return Err(Error::RankOutOfRange { rank: r, n, d, dim });
    }
    let mut rem_rank = r as u64;
    let mut remaining = n as u64;
    let mut occ = vec![0u32; d as usize];
    for pos in (1..d as usize).rev() {
        let mut v = 0u64;
        loop {
            let count = checked_binomial(remaining - v + pos as u64 - 1, pos as u64 - 1)?;
            if rem_rank < count {
                break;
            }
            rem_rank -= count;
            v += 1;
        }
        occ[pos] = v as u32;
        remaining -= v;
    }
    occ[0] = remaining as u32;
    Ok(MultiIndex { occ })
}

/// Multinomial coefficient `N! / (n_0! … n_{d-1}!)`: the number of
/// computational strings with occupation `mi`.
pub fn multinomial(mi: &MultiIndex) -> Result<u64> {
    let mut acc: u64 = 1;
    let mut prefix: u64 = 0;
    for &v in &mi.occ {
        prefix += v as u64;
        let b = checked_binomial(prefix, v as u64)?;
        acc = acc
            .checked_mul(b)
            .ok_or(Error::Overflow { context: "multinomial coefficient" })?;
    }
    Ok(acc)
}

/// Occupation vector of a base-d string, site 0 being the most significant
/// digit of the index.
fn occupation_of_string(mut idx: u64, n: u32, d: u32) -> Vec<u32> {
    let mut occ = vec![0u32; d as usize];
    for _ in 0..n {
        occ[(idx % d as u64) as usize] += 1;
        idx /= d as u64;
    }
    occ
}

/// The normalized symmetrized vector for `mi` in the full tensor space
/// `(C^d)^{⊗N}`: amplitude `1/sqrt(multinomial(mi))` on each of the
/// `multinomial(mi)` strings with occupation `mi`, zero elsewhere.
///
/// This is brute-force oracle machinery; it refuses instances with
/// `d^N > budget`.
pub fn embed_symmetric_vector_with_budget(
    mi: &MultiIndex,
    budget: u64,
) -> Result<nalgebra::DVector<Complex64>> {
    let d = mi.levels();
    let n = mi.total();
    let full: u128 = (d as u128)
        .checked_pow(n)
        .ok_or(Error::Overflow { context: "full tensor dimension" })?;
    if full > budget as u128 {
        return Err(Error::BudgetExceeded { required: full, budget });
    }
    let full = full as usize;
    let amp = 1.0 / (multinomial(mi)? as f64).sqrt();
    let mut v = nalgebra::DVector::zeros(full);
    for idx in 0..full as u64 {
        if occupation_of_string(idx, n, d) == mi.occ {
            v[idx as usize] = Complex64::new(amp, 0.0);
        }
    }
    Ok(v)
}

/// [`embed_symmetric_vector_with_budget`] with the default budget.
pub fn embed_symmetric_vector(mi: &MultiIndex) -> Result<nalgebra::DVector<Complex64>> {
    embed_symmetric_vector_with_budget(mi, DEFAULT_TENSOR_BUDGET)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(occ: &[u32]) -> MultiIndex {
        MultiIndex::new(occ.to_vec()).unwrap()
    }

    /// Independent brute-force enumeration used as the oracle for dimensions.
    fn brute_force_count(n: u32, d: u32) -> usize {
        fn rec(slots: u32, total: u32) -> usize {
            if slots == 1 {
                return 1;
            }
            (0..=total).map(|v| rec(slots - 1, total - v)).sum()
        }
        rec(d, n)
    }

    #[test]
    fn sym_dim_examples() {
        assert_eq!(sym_dim(0, 3).unwrap(), 1);
        assert_eq!(sym_dim(1, 5).unwrap(), 5);
        // derived by brute-force enumeration of all {n_i} with sum 2
        assert_eq!(sym_dim(2, 3).unwrap(), brute_force_count(2, 3));
        assert_eq!(sym_dim(2, 3).unwrap(), 6);
        for n in 0..=6 {
            for d in 2..=5 {
                assert_eq!(sym_dim(n, d).unwrap(), brute_force_count(n, d));
            }
        }
    }

    #[test]
    fn sym_dim_rejects_d_below_two() {
        assert!(sym_dim(3, 1).is_err());
    }

    #[test]
    fn enumeration_order_is_colex() {
        let e = enumerate_multi_indices(1, 2).unwrap();
        assert_eq!(e, vec![mi(&[1, 0]), mi(&[0, 1])]);
        let e = enumerate_multi_indices(2, 2).unwrap();
        assert_eq!(e, vec![mi(&[2, 0]), mi(&[1, 1]), mi(&[0, 2])]);
        let e = enumerate_multi_indices(0, 4).unwrap();
        assert_eq!(e, vec![mi(&[0, 0, 0, 0])]);
        // colex: the last differing slot decides
        let e = enumerate_multi_indices(2, 3).unwrap();
        for w in e.windows(2) {
            let (a, b) = (w[0].occupations(), w[1].occupations());
            let last_diff = (0..a.len()).rev().find(|&i| a[i] != b[i]).unwrap();
            assert!(a[last_diff] < b[last_diff]);
        }
    }

    #[test]
    fn enumeration_lengths_match_sym_dim() {
        for n in 0..=5 {
            for d in 2..=5 {
                assert_eq!(enumerate_multi_indices(n, d).unwrap().len(), sym_dim(n, d).unwrap());
            }
        }
    }

    #[test]
    fn rank_unrank_roundtrip_exhaustive() {
        // first enumerated index has rank 0
        let e = enumerate_multi_indices(3, 3).unwrap();
        assert_eq!(rank(&e[0]).unwrap(), 0);
        for (r, m) in e.iter().enumerate() {
            assert_eq!(rank(m).unwrap(), r);
            assert_eq!(&unrank(r, 3, 3).unwrap(), m);
        }
        for r in 0..sym_dim(2, 4).unwrap() {
            assert_eq!(rank(&unrank(r, 2, 4).unwrap()).unwrap(), r);
        }
    }

    #[test]
    fn unrank_out_of_range_errors() {
        let dim = sym_dim(2, 3).unwrap();
        assert!(matches!(unrank(dim, 2, 3), Err(Error::RankOutOfRange { .. })));
    }

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial(&mi(&[2, 0, 0])).unwrap(), 1);
        assert_eq!(multinomial(&mi(&[1, 1, 0])).unwrap(), 2);
        let total: u64 = enumerate_multi_indices(3, 3)
            .unwrap()
            .iter()
            .map(|m| multinomial(m).unwrap())
            .sum();
        assert_eq!(total, 27);
    }

    #[test]
    fn multinomial_sum_is_d_to_n() {
        for n in 0..=6u32 {
            for d in 2..=5u32 {
                let total: u64 = enumerate_multi_indices(n, d)
                    .unwrap()
                    .iter()
                    .map(|m| multinomial(m).unwrap())
                    .sum();
                assert_eq!(total, (d as u64).pow(n));
            }
        }
    }

    #[test]
    fn overflow_is_an_error_not_a_wraparound() {
        assert!(matches!(sym_dim(80, 40), Err(Error::Overflow { .. })));
        assert!(matches!(
            multinomial(&mi(&[30, 30, 30])),
            Err(Error::Overflow { .. })
        ));
    }

    #[test]
    fn embedding_examples() {
        let v = embed_symmetric_vector(&mi(&[1, 0])).unwrap();
        assert_eq!(v.len(), 2);
        assert!((v[0].re - 1.0).abs() < 1e-15 && v[1].norm() < 1e-15);

        // Bell-like symmetrization of (1,1)
        let v = embed_symmetric_vector(&mi(&[1, 1])).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(v[0].norm() < 1e-15 && v[3].norm() < 1e-15);
        assert!((v[1].re - s).abs() < 1e-15 && (v[2].re - s).abs() < 1e-15);
    }

    #[test]
    fn embeddings_are_unit_norm_and_orthogonal() {
        let basis = enumerate_multi_indices(3, 2).unwrap();
        let vecs: Vec<_> = basis.iter().map(|m| embed_symmetric_vector(m).unwrap()).collect();
        for (i, a) in vecs.iter().enumerate() {
            assert!((a.norm() - 1.0).abs() < 1e-12);
            for b in vecs.iter().skip(i + 1) {
                assert!(a.dotc(b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn embedding_respects_budget() {
        let m = mi(&[15, 15]);
        assert!(matches!(
            embed_symmetric_vector_with_budget(&m, 1 << 10),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn rank_unrank_inverse(n in 0u32..5, d in 2u32..5, seed in 0usize..1000) {
                let dim = sym_dim(n, d).unwrap();
                let r = seed % dim;
                let m = unrank(r, n, d).unwrap();
                prop_assert_eq!(rank(&m).unwrap(), r);
                prop_assert_eq!(m.total(), n);
            }

            #[test]
            fn multinomial_total(n in 0u32..6, d in 2u32..5) {
                let total: u64 = enumerate_multi_indices(n, d).unwrap()
                    .iter()
                    .map(|m| multinomial(m).unwrap())
                    .sum();
                prop_assert_eq!(total, (d as u64).pow(n));
            }
        }
    }
}
