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

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Exact integer combinatorics exceeded the integer width. Wraparound is
    /// never silently accepted.
    #[error("integer overflow while computing {context}")]
    Overflow { context: &'static str },

    /// The requested output copy number is not reachable by the covariant
    /// family. The message names the admissible set.
    #[error(
        "M={m} is inadmissible for {direction} with N={n}, d={d}; admissible M are {admissible}"
    )]
    InadmissibleCopies {
        direction: &'static str,
        n: u32,
        m: u32,
        d: u32,
        admissible: String,
    },

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// Full-tensor embeddings are oracle-only; refuse to allocate beyond the
    /// configured budget and point the caller at the symmetric-basis path.
    #[error(
        "full tensor dimension {required} exceeds the memory budget {budget}; \
         use the symmetric-basis (oracle-free) path for instances this large"
    )]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("rank {rank} out of range: sym_dim(N={n}, d={d}) = {dim}")]
    RankOutOfRange { rank: usize, n: u32, d: u32, dim: usize },

    #[error("state vector has norm {norm}, expected 1 within {tol}")]
    NotNormalized { norm: f64, tol: f64 },

    #[error("not a valid density matrix: {reason}")]
    InvalidDensity { reason: String },

    #[error("resolution {got} below the minimum {min} required for {context}")]
    ResolutionTooLow { got: usize, min: usize, context: &'static str },

    #[error("block structure admits no trace-preserving channel: input rank {input_rank} is not covered by any block")]
    InfeasibleBlocks { input_rank: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
