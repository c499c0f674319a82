//! Command-line front end.
//!
//! Subcommands: `state`, `wigner`, `quadrature`, `moments`, `entangle`,
//! `sweep`, `search`.  Exit codes: 0 on success, 2 on configuration errors
//! (bad flags, bad config file), 3 on numerical-domain errors (truncation,
//! conditioning, degenerate normalization, out-of-range outcome).

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use cathybrid::entangler::{evolve_and_condition, BeamSplitterParams, DelocalizedPhoton};
use cathybrid::error::{Error, Result};
use cathybrid::fock::{Parity, DEFAULT_CUTOFF, DEFAULT_TAIL_TOL};
use cathybrid::io::{
    quadrature_to_csv, search_to_csv, sweep_to_csv, wigner_to_csv, ConditionalResultDto,
    StateDumpDto,
};
use cathybrid::nonclassicality::{
    fano, linspace, quadrature_distribution, quadrature_sigma, wigner, AxisSpec, GridSpec,
    QuadratureAxis,
};
use cathybrid::states::{build, ComplexDto, StateSpec, StateSpecDto};
use cathybrid::sweep::{search_max, sweep, RangeSpec, RunConfig, RunConfigDto};

/// Environment variable holding the default photon-number cutoff.
const CUTOFF_ENV: &str = "CATHYBRID_CUTOFF";

#[derive(Parser)]
#[command(name = "cathybrid", version, about = "Displaced-parity cat states and heralded hybrid entanglement on a truncated Fock space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Fock amplitudes of an input state as JSON.
    State(StateCmd),
    /// Emit the Wigner function of an input state as CSV (x1,x2,W).
    Wigner(WignerCmd),
    /// Emit a quadrature distribution of an input state as CSV (x,P).
    Quadrature(QuadratureCmd),
    /// Emit quadrature deviations and the Fano factor over a beta range.
    Moments(MomentsCmd),
    /// Herald one beam-splitter outcome and print the result as JSON.
    Entangle(EntangleCmd),
    /// Evaluate a (beta, t) grid of heralded outcomes as CSV.
    Sweep(SweepCmd),
    /// Locate maximal-negativity operating points on a (beta, t) grid.
    Search(SearchCmd),
}

#[derive(Args, Clone)]
struct StateArgs {
    /// State kind: sdlps, superposition or truncated.
    #[arg(long)]
    kind: String,
    /// Parity sign: "+" (even) or "-" (odd).
    #[arg(long, allow_hyphen_values = true)]
    sign: String,
    /// Member index for kind sdlps.
    #[arg(long)]
    l: Option<usize>,
    /// Displacement amplitude.
    #[arg(long)]
    beta: Option<f64>,
    /// Superposition coefficients, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    b: Option<Vec<f64>>,
    /// Truncated-state coefficients, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    d: Option<Vec<f64>>,
    /// For kind truncated: derive the coefficients from family member
    /// `from-l` at `beta`, keeping `terms` coefficients.
    #[arg(long)]
    from_l: Option<usize>,
    #[arg(long)]
    terms: Option<usize>,
}

impl StateArgs {
    fn to_spec(&self) -> Result<StateSpec> {
        if self.kind == "truncated" {
            if let (Some(l), Some(terms)) = (self.from_l, self.terms) {
                let beta = self.beta.ok_or_else(|| {
                    Error::InvalidSpec("--from-l needs --beta to derive coefficients".into())
                })?;
                let sign = parse_sign(&self.sign)?;
                return StateSpec::truncated_from_sdlps(l, sign, beta, terms);
            }
        }
        let dto = StateSpecDto {
            kind: self.kind.clone(),
            sign: self.sign.clone(),
            beta: self.beta,
            l: self.l,
            b: self
                .b
                .as_ref()
                .map(|v| v.iter().map(|x| ComplexDto::Real(*x)).collect()),
            d: self
                .d
                .as_ref()
                .map(|v| v.iter().map(|x| ComplexDto::Real(*x)).collect()),
        };
        StateSpec::try_from(&dto)
    }
}

fn parse_sign(s: &str) -> Result<Parity> {
    match s {
        "+" => Ok(Parity::Even),
        "-" => Ok(Parity::Odd),
        other => Err(Error::InvalidSpec(format!(
            "sign must be \"+\" or \"-\", got {other:?}"
        ))),
    }
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Photon-number cutoff (default from CATHYBRID_CUTOFF or 64).
    #[arg(long)]
    cutoff: Option<usize>,
    /// Truncation tail tolerance.
    #[arg(long, default_value_t = DEFAULT_TAIL_TOL)]
    tail_tol: f64,
    /// Write output to this file instead of stdout.
    #[arg(long)]
    output: Option<std::path::PathBuf>,
}

impl CommonOpts {
    fn cutoff(&self) -> Result<usize> {
        if let Some(c) = self.cutoff {
            return Ok(c);
        }
        match std::env::var(CUTOFF_ENV) {
            Ok(text) => text.parse().map_err(|_| {
                Error::InvalidSpec(format!("bad {CUTOFF_ENV} value {text:?}"))
            }),
            Err(_) => Ok(DEFAULT_CUTOFF),
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.output {
            Some(path) => std::fs::write(path, text)?,
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
            }
        }
        Ok(())
    }
}

#[derive(Args)]
struct StateCmd {
    #[command(flatten)]
    state: StateArgs,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct WignerCmd {
    #[command(flatten)]
    state: StateArgs,
    #[command(flatten)]
    common: CommonOpts,
    /// Half range of both axes (default 2 beta + 6).
    #[arg(long)]
    range: Option<f64>,
    /// Samples per axis.
    #[arg(long, default_value_t = 301)]
    points: usize,
}

#[derive(Args)]
struct QuadratureCmd {
    #[command(flatten)]
    state: StateArgs,
    #[command(flatten)]
    common: CommonOpts,
    /// Axis: x1 or x2.
    #[arg(long)]
    axis: String,
    #[arg(long)]
    range: Option<f64>,
    #[arg(long, default_value_t = 301)]
    points: usize,
}

#[derive(Args)]
struct MomentsCmd {
    #[command(flatten)]
    state: StateArgs,
    #[command(flatten)]
    common: CommonOpts,
    #[arg(long)]
    beta_min: f64,
    #[arg(long)]
    beta_max: f64,
    #[arg(long, default_value_t = 50)]
    beta_steps: usize,
}

#[derive(Args)]
struct EntangleCmd {
    #[command(flatten)]
    state: StateArgs,
    #[command(flatten)]
    common: CommonOpts,
    /// Beam-splitter transmittance.
    #[arg(long)]
    t: f64,
    /// Heralded photon count in the auxiliary mode.
    #[arg(long)]
    n: usize,
    /// Photon amplitudes (normalized on use).
    #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
    a0: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
    a1: f64,
}

#[derive(Args)]
struct GridOpts {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<std::path::PathBuf>,
    #[arg(long)]
    beta_min: Option<f64>,
    #[arg(long)]
    beta_max: Option<f64>,
    #[arg(long)]
    beta_steps: Option<usize>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    t_steps: Option<usize>,
    #[arg(long)]
    a0: Option<f64>,
    #[arg(long)]
    a1: Option<f64>,
}

#[derive(Args)]
struct SweepCmd {
    /// Input state flags; may be omitted when --config provides the state.
    #[command(flatten)]
    state: OptionalStateArgs,
    #[command(flatten)]
    common: CommonOpts,
    #[command(flatten)]
    grid: GridOpts,
    /// Heralding outcomes, comma separated.
    #[arg(long, value_delimiter = ',')]
    outcomes: Option<Vec<usize>>,
}

#[derive(Args)]
struct SearchCmd {
    #[command(flatten)]
    state: OptionalStateArgs,
    #[command(flatten)]
    common: CommonOpts,
    #[command(flatten)]
    grid: GridOpts,
    /// Heralding outcome to search.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args, Clone)]
struct OptionalStateArgs {
    #[arg(long)]
    kind: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    sign: Option<String>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    b: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    d: Option<Vec<f64>>,
}

fn merge_run_config(
    state: &OptionalStateArgs,
    common: &CommonOpts,
    grid: &GridOpts,
    outcomes: Option<Vec<usize>>,
) -> Result<RunConfig> {
    let mut dto: RunConfigDto = match &grid.config {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        None => RunConfigDto::default(),
    };
    // flags override file values; a kind flag replaces the whole input spec
    if let Some(kind) = &state.kind {
        let args = StateArgs {
            kind: kind.clone(),
            sign: state
                .sign
                .clone()
                .ok_or_else(|| Error::InvalidSpec("state flags need --sign".into()))?,
            l: state.l,
            beta: state.beta.or(grid.beta_min),
            b: state.b.clone(),
            d: state.d.clone(),
            from_l: None,
            terms: None,
        };
        dto.input = Some(StateSpecDto::from(&args.to_spec()?));
    }
    if let Some(a0) = grid.a0 {
        dto.a0 = Some(a0);
    }
    if let Some(a1) = grid.a1 {
        dto.a1 = Some(a1);
    }
    if let Some(out) = outcomes {
        dto.outcomes = Some(out);
    }
    let file_beta = dto.beta;
    dto.beta = match (grid.beta_min, grid.beta_max, grid.beta_steps) {
        (None, None, None) => file_beta,
        (min, max, steps) => {
            let base = file_beta.unwrap_or(RangeSpec {
                min: min.ok_or_else(|| Error::InvalidSpec("missing --beta-min".into()))?,
                max: max.ok_or_else(|| Error::InvalidSpec("missing --beta-max".into()))?,
                steps: steps.unwrap_or(1),
            });
            Some(RangeSpec {
                min: min.unwrap_or(base.min),
                max: max.unwrap_or(base.max),
                steps: steps.unwrap_or(base.steps),
            })
        }
    };
    let file_t = dto.t;
    dto.t = match (grid.t_min, grid.t_max, grid.t_steps) {
        (None, None, None) => file_t,
        (min, max, steps) => {
            let base = file_t.unwrap_or(RangeSpec {
                min: min.ok_or_else(|| Error::InvalidSpec("missing --t-min".into()))?,
                max: max.ok_or_else(|| Error::InvalidSpec("missing --t-max".into()))?,
                steps: steps.unwrap_or(1),
            });
            Some(RangeSpec {
                min: min.unwrap_or(base.min),
                max: max.unwrap_or(base.max),
                steps: steps.unwrap_or(base.steps),
            })
        }
    };
    if common.cutoff.is_some() || std::env::var(CUTOFF_ENV).is_ok() {
        dto.cutoff = Some(common.cutoff()?);
    }
    dto.tail_tolerance = Some(common.tail_tol);
    dto.into_config()
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::State(cmd) => {
            let spec = cmd.state.to_spec()?;
            let state = build(&spec, cmd.common.cutoff()?, cmd.common.tail_tol)?;
            let spec_dto = StateSpecDto::from(&spec);
            let dump = StateDumpDto {
                kind: spec_dto.kind,
                sign: spec_dto.sign,
                cutoff: state.cutoff(),
                norm_factor: state.norm_factor,
                amplitudes: state
                    .vector
                    .amplitudes()
                    .iter()
                    .map(|a| ComplexDto::from(*a))
                    .collect(),
            };
            cmd.common
                .emit(&format!("{}\n", serde_json::to_string(&dump)?))
        }
        Command::Wigner(cmd) => {
            let spec = cmd.state.to_spec()?;
            let state = build(&spec, cmd.common.cutoff()?, cmd.common.tail_tol)?;
            let half = cmd
                .range
                .unwrap_or_else(|| 2.0 * cmd.state.beta.unwrap_or(0.0) + 6.0);
            let grid = GridSpec::symmetric(half, cmd.points);
            let map = wigner(&state.vector, &grid)?;
            cmd.common.emit(&wigner_to_csv(&map))
        }
        Command::Quadrature(cmd) => {
            let spec = cmd.state.to_spec()?;
            let state = build(&spec, cmd.common.cutoff()?, cmd.common.tail_tol)?;
            let axis = match cmd.axis.to_lowercase().as_str() {
                "x1" => QuadratureAxis::X1,
                "x2" => QuadratureAxis::X2,
                other => {
                    return Err(Error::InvalidSpec(format!(
                        "axis must be x1 or x2, got {other:?}"
                    )))
                }
            };
            let half = cmd
                .range
                .unwrap_or_else(|| 2.0 * cmd.state.beta.unwrap_or(0.0) + 6.0);
            let dist =
                quadrature_distribution(&state.vector, axis, &AxisSpec::symmetric(half, cmd.points))?;
            cmd.common.emit(&quadrature_to_csv(&dist))
        }
        Command::Moments(cmd) => {
            let cutoff = cmd.common.cutoff()?;
            let mut out = String::from("beta,sigma_x1,sigma_x2,fano\n");
            for beta in linspace(cmd.beta_min, cmd.beta_max, cmd.beta_steps) {
                let spec = StateArgs {
                    beta: Some(beta),
                    ..cmd.state.clone()
                }
                .to_spec()?;
                let state = build(&spec, cutoff, cmd.common.tail_tol)?;
                let s1 = quadrature_sigma(&state.vector, QuadratureAxis::X1);
                let s2 = quadrature_sigma(&state.vector, QuadratureAxis::X2);
                let fano_field = fano(&state.vector)
                    .map(cathybrid::io::format_float)
                    .unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    cathybrid::io::format_float(beta),
                    cathybrid::io::format_float(s1),
                    cathybrid::io::format_float(s2),
                    fano_field,
                ));
            }
            cmd.common.emit(&out)
        }
        Command::Entangle(cmd) => {
            let spec = cmd.state.to_spec()?;
            let state = build(&spec, cmd.common.cutoff()?, cmd.common.tail_tol)?;
            let photon = DelocalizedPhoton::normalized(
                Complex64::new(cmd.a0, 0.0),
                Complex64::new(cmd.a1, 0.0),
            )?;
            let params = BeamSplitterParams::new(cmd.t)?;
            let result = evolve_and_condition(&state, &photon, params, cmd.n)?;
            let dto = ConditionalResultDto::from(&result);
            cmd.common
                .emit(&format!("{}\n", serde_json::to_string(&dto)?))
        }
        Command::Sweep(cmd) => {
            let config = merge_run_config(&cmd.state, &cmd.common, &cmd.grid, cmd.outcomes)?;
            let grid = sweep(&config)?;
            cmd.common.emit(&sweep_to_csv(&grid))
        }
        Command::Search(cmd) => {
            let outcomes = cmd.n.map(|n| vec![n]);
            let config = merge_run_config(&cmd.state, &cmd.common, &cmd.grid, outcomes)?;
            let hits = search_max(&config)?;
            cmd.common.emit(&search_to_csv(&hits))
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
