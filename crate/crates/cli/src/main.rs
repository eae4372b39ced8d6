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

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use phasecov::channels::{ChannelParams, Direction};
use phasecov::suite::VerifyOptions;
use phasecov_cli::commands::{
    cmd_dump, cmd_estimate, cmd_figure1, cmd_table, cmd_verify, DirectionChoice, DumpWhat, Format,
    GridFilter,
};
use phasecov_cli::config::{FileConfig, KRange};
use std::path::PathBuf;

/// Optimal phase-covariant cloning, conjugation and phase estimation for
/// equatorial qudit states: fidelity tables, curve data, verification
/// suites, matrix dumps and estimation demos.
#[derive(Parser)]
#[command(name = "phasecov", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the closed-form fidelity table over a range of family indices k.
    Table(TableArgs),
    /// Emit the 1→M single-site fidelity curves against the estimation limit.
    Figure1(Figure1Args),
    /// Run the invariant suites over the verification grid.
    Verify(VerifyArgs),
    /// Export isometry, Choi operator, unitary completion and block structure.
    Dump(DumpArgs),
    /// Measure-and-prepare estimation demo with suboptimality gaps.
    Estimate(EstimateArgs),
}

#[derive(Args)]
struct TableArgs {
    #[arg(long = "d")]
    d: Option<u32>,
    #[arg(long = "N")]
    n: Option<u32>,
    /// Inclusive family index range, e.g. 0..3
    #[arg(long = "k-range")]
    k_range: Option<String>,
    /// clone | conjugate | both | estimation | all
    #[arg(long)]
    direction: Option<String>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Figure1Args {
    #[arg(long = "d")]
    d: Option<u32>,
    #[arg(long = "k-range")]
    k_range: Option<String>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Restrict the grid, e.g. "d=2,N=1,k=1" or "direction=conjugate"
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Covariance tolerance override
    #[arg(long)]
    tol: Option<f64>,
    /// Random phase vectors per covariance check
    #[arg(long)]
    samples: Option<usize>,
    /// Inject a covariance-violating Choi perturbation of this magnitude
    #[arg(long = "perturb-choi")]
    perturb_choi: Option<f64>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DumpArgs {
    #[arg(long = "d")]
    d: Option<u32>,
    #[arg(long = "N")]
    n: Option<u32>,
    /// Family index k (alternative to --M)
    #[arg(long = "k")]
    k: Option<u32>,
    /// Output copies M (alternative to --k)
    #[arg(long = "M")]
    m: Option<u32>,
    /// clone | conjugate
    #[arg(long)]
    direction: Option<String>,
    /// isometry | choi | unitary | blocks | all
    #[arg(long, value_enum)]
    what: Option<DumpWhat>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long = "d")]
    d: Option<u32>,
    #[arg(long = "N")]
    n: Option<u32>,
    /// Quadrature points per phase axis
    #[arg(long)]
    resolution: Option<usize>,
    /// Monte Carlo sample count
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

const DEFAULT_SEED: u64 = 0x70_68_63_76;

fn main() -> Result<()> {
    let cli = Cli::parse();
    let cfg = FileConfig::from_env()?;
    match cli.command {
        Command::Table(a) => {
            let d = cfg.resolve(a.d, "d", 2)?;
            let n = cfg.resolve(a.n, "n", 1)?;
            let k_range: KRange = cfg.resolve(
                a.k_range.map(|s| s.parse()).transpose().map_err(anyhow::Error::msg)?,
                "k_range",
                KRange { min: 0, max: 5 },
            )?;
            let direction: DirectionChoice = cfg.resolve(
                a.direction.map(|s| s.parse()).transpose().map_err(anyhow::Error::msg)?,
                "direction",
                DirectionChoice::Both,
            )?;
            let format: Format = cfg.resolve(
                a.format.map(|s| s.parse()).transpose().map_err(anyhow::Error::msg)?,
                "format",
                Format::Csv,
            )?;
            let out = cfg.resolve_opt(a.out, "out")?;
            cmd_table(d, n, k_range, direction, format, out.as_deref())
        }
        Command::Figure1(a) => {
            let d = cfg.resolve(a.d, "d", 5)?;
            let k_range: KRange = cfg.resolve(
                a.k_range.map(|s| s.parse()).transpose().map_err(anyhow::Error::msg)?,
                "k_range",
                KRange { min: 1, max: 20 },
            )?;
            let format: Format = cfg.resolve(
                a.format.map(|s| s.parse()).transpose().map_err(anyhow::Error::msg)?,
                "format",
                Format::Csv,
            )?;
            let out = cfg.resolve_opt(a.out, "out")?;
            cmd_figure1(d, k_range, format, out.as_deref())
        }
        Command::Verify(a) => {
            let filter: GridFilter = cfg
                .resolve_opt(
                    a.grid.map(|s| s.parse()).transpose().map_err(anyhow::Error::msg)?,
                    "grid",
                )?
                .unwrap_or_default();
            let mut opts = VerifyOptions {
                seed: cfg.resolve(a.seed, "seed", DEFAULT_SEED)?,
                covariance_samples: cfg.resolve(a.samples, "samples", 50)?,
                perturb_choi: cfg.resolve_opt(a.perturb_choi, "perturb_choi")?,
                ..VerifyOptions::default()
            };
            if let Some(tol) = cfg.resolve_opt(a.tol, "tol")? {
                opts.covariance_tol = tol;
            }
            let format: Format = cfg.resolve(
                a.format.map(|s| s.parse()).transpose().map_err(anyhow::Error::msg)?,
                "format",
                Format::Csv,
            )?;
            let out = cfg.resolve_opt(a.out, "out")?;
            let ok = cmd_verify(&filter, &opts, format, out.as_deref())?;
            if !ok {
                std::process::exit(1);
            }
            Ok(())
        }
        Command::Dump(a) => {
            let d = cfg.resolve(a.d, "d", 2)?;
            let n = cfg.resolve(a.n, "n", 1)?;
            let direction: Direction = cfg.resolve(
                a.direction.map(|s| s.parse()).transpose()?,
                "direction",
                Direction::Clone,
            )?;
            let k = cfg.resolve_opt(a.k, "k")?;
            let m = cfg.resolve_opt(a.m, "m")?;
            let params = match (k, m) {
                (Some(_), Some(_)) => bail!("pass exactly one of --k or --M"),
                (Some(k), None) => ChannelParams::from_k(direction, n, k, d)?,
                (None, Some(m)) => ChannelParams::new(direction, n, m, d)?,
                (None, None) => bail!("pass one of --k or --M"),
            };
            let what = a.what.unwrap_or(DumpWhat::All);
            let out = cfg
                .resolve_opt(a.out, "out")?
                .unwrap_or_else(|| PathBuf::from("phasecov-dump"));
            let written = cmd_dump(&params, what, &out)?;
            for path in written {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Estimate(a) => {
            let d = cfg.resolve(a.d, "d", 5)?;
            let n = cfg.resolve(a.n, "n", 1)?;
            let resolution = cfg.resolve(a.resolution, "resolution", 2 * n as usize + 2)?;
            let samples = cfg.resolve(a.samples, "samples", 20_000)?;
            let seed = cfg.resolve(a.seed, "seed", DEFAULT_SEED)?;
            let format: Format = cfg.resolve(
                a.format.map(|s| s.parse()).transpose().map_err(anyhow::Error::msg)?,
                "format",
                Format::Csv,
            )?;
            let out = cfg.resolve_opt(a.out, "out")?;
            cmd_estimate(d, n, resolution, samples, seed, format, out.as_deref())
        }
    }
}
