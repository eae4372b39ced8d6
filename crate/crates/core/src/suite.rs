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

//! The invariant suites behind the `verify` command: structural checks of
//! every channel on a parameter grid, estimation-channel consistency, and
//! optional fault injection.

use crate::channels::{
    apply_channel, check_covariance, choi_from_isometry, cloning_isometry, conjugation_isometry,
    economical_completion, reduced_single_site, shrink_factor, ChannelParams, Direction,
};
use crate::certify::perturb_choi_off_block;
use crate::error::Result;
use crate::estimation::{estimation_output_analytic, povm_completeness_residual, IntegrationMode};
use crate::fidelity::{f_estimation, f_single};
use crate::linalg::{fro_norm, hermitian_eigenvalues, numerical_rank, CMatrix};
use crate::states::{n_fold_equatorial, PhaseVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// One executed check: the observed value must stay below the tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub tolerance: f64,
    pub observed: f64,
    pub pass: bool,
}

impl CheckResult {
    fn bounded(name: String, observed: f64, tolerance: f64) -> Self {
        Self { name, tolerance, observed, pass: observed < tolerance }
    }
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Knobs of the verification run.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    pub covariance_samples: usize,
    /// Inject a covariance-violating Choi perturbation of this size.
    pub perturb_choi: Option<f64>,
    /// Dense-Choi checks only run when `in_dim * out_dim` stays below this.
    pub max_choi_product: usize,
    /// Unitary completion only runs when the output dimension stays below this.
    pub max_completion_dim: usize,
    /// Override for the covariance tolerance.
    pub covariance_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 0x70_61_73_65,
            covariance_samples: 50,
            perturb_choi: None,
            max_choi_product: 600,
            max_completion_dim: 400,
            covariance_tol: 1e-10,
        }
    }
}

/// The canonical verification grid: both directions, d in 2..=5, N in 1..=2,
/// k in 0..=2 where admissible.
pub fn default_grid() -> Vec<ChannelParams> {
    let mut grid = Vec::new();
    for direction in [Direction::Clone, Direction::Conjugate] {
        for d in 2..=5u32 {
            for n in 1..=2u32 {
                for k in 0..=2u32 {
                    if let Ok(params) = ChannelParams::from_k(direction, n, k, d) {
                        grid.push(params);
                    }
                }
            }
        }
    }
    grid
}

fn point_label(params: &ChannelParams) -> String {
    format!(
        "{}[d={},N={},M={},k={}]",
        params.direction(),
        params.levels(),
        params.input_copies(),
        params.output_copies(),
        params.shift()
    )
}

/// Structural and closed-form checks for one channel.
pub fn channel_checks(params: &ChannelParams, opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let label = point_label(params);
    let mut out = Vec::new();
    let v = match params.direction() {
        Direction::Clone => {
            cloning_isometry(params.input_copies(), params.output_copies(), params.levels())?
        }
        Direction::Conjugate => {
            conjugation_isometry(params.input_copies(), params.output_copies(), params.levels())?
        }
    };

    // isometry gram identity
    let mat = v.matrix();
    let gram_dev = fro_norm(&(mat.adjoint() * &mat - CMatrix::identity(v.input_dim(), v.input_dim())));
    out.push(CheckResult::bounded(format!("{label} isometry V†V=I"), gram_dev, 1e-12));

    // closed-form vs brute-force pipeline on a random equatorial input
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    let pv = PhaseVector::random(params.levels(), &mut rng)?;
    let input = n_fold_equatorial(&pv, params.input_copies())?;
    let output = v.apply(&input)?;
    let rho1 = reduced_single_site(&output)?;
    let target_pv = match params.direction() {
        Direction::Clone => pv.clone(),
        Direction::Conjugate => pv.conjugate(),
    };
    let target = n_fold_equatorial(&target_pv, 1)?;
    let f_pipeline = rho1.fidelity_with_pure(&target)?;
    let f_closed = f_single(params)?;
    out.push(CheckResult::bounded(
        format!("{label} pipeline fidelity = closed form"),
        (f_pipeline - f_closed).abs(),
        1e-10,
    ));

    // isotropic shrink decomposition at the closed-form eta
    let (_, residual) = shrink_factor(&rho1, &target)?;
    out.push(CheckResult::bounded(format!("{label} shrink residual"), residual, 1e-10));

    // dense Choi checks
    if v.input_dim() * v.output_dim() <= opts.max_choi_product {
        let mut choi = choi_from_isometry(&v);
        if let Some(eps) = opts.perturb_choi {
            perturb_choi_off_block(&mut choi, eps)?;
        }
        let min_eig = hermitian_eigenvalues(choi.matrix())[0];
        out.push(CheckResult::bounded(format!("{label} choi PSD"), -min_eig, 1e-10));
        out.push(CheckResult::bounded(
            format!("{label} choi TP"),
            choi.trace_preservation_residual(),
            1e-10,
        ));
        let rank = numerical_rank(choi.matrix(), 1e-9);
        out.push(CheckResult::bounded(
            format!("{label} choi rank one (economical)"),
            (rank as f64 - 1.0).abs(),
            0.5,
        ));
        let cov = check_covariance(&choi, opts.covariance_samples, opts.seed, opts.covariance_tol)?;
        out.push(CheckResult::bounded(
            format!("{label} covariance commutator"),
            cov.max_commutator_norm,
            cov.tol,
        ));

        // the two channel representations agree on a random density operator
        let g = CMatrix::from_fn(v.input_dim(), v.input_dim(), |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let h = &g * g.adjoint();
        let rho = crate::states::DensityMatrix::new(&h / Complex64::from(h.trace().re))?;
        let via_choi = apply_channel(&choi, &rho)?;
        let via_iso = v.apply_density(&rho)?;
        let dev = fro_norm(&(via_choi.matrix() - via_iso.matrix()));
        // only meaningful without fault injection
        if opts.perturb_choi.is_none() {
            out.push(CheckResult::bounded(format!("{label} choi/isometry agree"), dev, 1e-12));
        }
    }

    // economical unitary completion
    if v.output_dim() <= opts.max_completion_dim {
        let u = economical_completion(&v);
        let um = u.matrix();
        let unitary_dev =
            fro_norm(&(um.adjoint() * um - CMatrix::identity(um.nrows(), um.ncols())));
        out.push(CheckResult::bounded(format!("{label} completion U†U=I"), unitary_dev, 1e-12));
        let restrict_dev = fro_norm(&(u.input_block() - v.matrix()));
        out.push(CheckResult::bounded(
            format!("{label} completion restricts to V"),
            restrict_dev,
            1e-12,
        ));
    }

    Ok(out)
}

/// Estimation-channel consistency checks (POVM completeness, analytic vs
/// quadrature output).
pub fn estimation_checks() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for (n, d) in [(1u32, 2u32), (2, 2), (1, 3), (2, 3)] {
        let points = 2 * n as usize + 2;
        let res = povm_completeness_residual(n, d, points)?;
        out.push(CheckResult::bounded(
            format!("estimation[N={n},d={d}] POVM completeness"),
            res,
            1e-8,
        ));
        let analytic = estimation_output_analytic(n, d)?;
        let quad = crate::estimation::estimation_channel_output(
            &PhaseVector::zero(d)?,
            n,
            IntegrationMode::Quadrature { points_per_axis: points },
        )?;
        let dev = fro_norm(&(analytic.matrix() - quad.matrix()));
        out.push(CheckResult::bounded(
            format!("estimation[N={n},d={d}] analytic = quadrature"),
            dev,
            1e-8,
        ));
        let seed = crate::states::equatorial_state(&PhaseVector::zero(d)?);
        let f_dev = (analytic.fidelity_with_pure(&seed)? - f_estimation(n, d)?).abs();
        out.push(CheckResult::bounded(
            format!("estimation[N={n},d={d}] fidelity matches closed sum"),
            f_dev,
            1e-14,
        ));
    }
    Ok(out)
}

/// Run the full suite over a grid.
pub fn run_suite(grid: &[ChannelParams], opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    for params in grid {
        checks.extend(channel_checks(params, opts)?);
    }
    if opts.perturb_choi.is_none() {
        checks.extend(estimation_checks()?);
    }
    Ok(SuiteReport { checks })
}
