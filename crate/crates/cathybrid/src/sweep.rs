//! Parameter sweeps over the (beta, t) plane and the search for
//! maximal-negativity operating points.
//!
//! A sweep evaluates one heralding experiment per grid cell.  Cells are
//! independent, so they map over a worker pool when the `parallel` feature
//! is enabled; results are assembled in row-major (beta, t, outcome) order
//! either way, so the emitted rows are byte-identical across runs.

use serde::{Deserialize, Serialize};

use crate::entangler::{BeamSplitter, BeamSplitterParams, DelocalizedPhoton, EvolvedBranches};
use crate::error::{Error, Result};
use crate::fock::{DEFAULT_CUTOFF, DEFAULT_TAIL_TOL};
use crate::nonclassicality::linspace;
use crate::par::{map_indexed, map_indexed_serial};
use crate::states::{build, NormalizedState, StateSpec, StateSpecDto};

/// Inclusive uniform range with a fixed number of samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeSpec {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl RangeSpec {
    pub fn single(value: f64) -> Self {
        Self {
            min: value,
            max: value,
            steps: 1,
        }
    }

    pub fn samples(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.steps)
    }

    fn validate(&self, name: &str) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidSpec(format!("{name} range has zero samples")));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.min > self.max {
            return Err(Error::InvalidSpec(format!(
                "{name} range [{}, {}] is not ordered",
                self.min, self.max
            )));
        }
        Ok(())
    }
}

/// Full description of a sweep or search run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: StateSpec,
    /// (a0, a1), normalized on use.
    pub photon: (f64, f64),
    pub outcomes: Vec<usize>,
    pub beta: RangeSpec,
    pub t: RangeSpec,
    pub cutoff: usize,
    pub tail_tolerance: f64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.input.validate()?;
        self.beta.validate("beta")?;
        self.t.validate("t")?;
        if !(self.t.min > 0.0 && self.t.max < 1.0) {
            return Err(Error::InvalidSpec(format!(
                "t range [{}, {}] must lie strictly inside (0, 1)",
                self.t.min, self.t.max
            )));
        }
        if matches!(self.input, StateSpec::Sdlps { .. } | StateSpec::Superposition { .. })
            && self.beta.min <= 0.0
        {
            return Err(Error::InvalidSpec(format!(
                "beta range [{}, {}] must be positive",
                self.beta.min, self.beta.max
            )));
        }
        if self.outcomes.is_empty() {
            return Err(Error::InvalidSpec("no heralding outcomes requested".into()));
        }
        for &n in &self.outcomes {
            if n > self.cutoff + 1 {
                return Err(Error::OutcomeOutOfRange {
                    outcome: n,
                    cutoff: self.cutoff + 1,
                });
            }
        }
        Ok(())
    }

    pub fn photon(&self) -> Result<DelocalizedPhoton> {
        DelocalizedPhoton::normalized(self.photon.0.into(), self.photon.1.into())
    }
}

/// One evaluated grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub beta: f64,
    pub t: f64,
    pub outcome: usize,
    pub probability: f64,
    pub negativity: f64,
    pub b_abs: Option<f64>,
    pub separable: bool,
}

/// Rectangular sweep result, rows in row-major (beta, t, outcome) order.
#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub betas: Vec<f64>,
    pub ts: Vec<f64>,
    pub outcomes: Vec<usize>,
    pub cells: Vec<SweepCell>,
}

fn evaluate_cell(
    input: &NormalizedState,
    photon: &DelocalizedPhoton,
    splitter: &BeamSplitter,
    outcomes: &[usize],
    beta: f64,
    t: f64,
) -> Result<Vec<SweepCell>> {
    let evolved = EvolvedBranches::new(input, photon, splitter)?;
    outcomes
        .iter()
        .map(|&n| {
            let r = evolved.condition(n)?;
            Ok(SweepCell {
                beta,
                t,
                outcome: n,
                probability: r.probability,
                negativity: r.negativity,
                b_abs: r.b_abs(),
                separable: r.separable,
            })
        })
        .collect()
}

fn sweep_impl(config: &RunConfig, serial: bool) -> Result<SweepGrid> {
    config.validate()?;
    let photon = config.photon()?;
    let betas = config.beta.samples();
    let ts = config.t.samples();

    // shared immutable inputs per axis value
    let inputs: Vec<NormalizedState> = betas
        .iter()
        .map(|&beta| build(&config.input.with_beta(beta), config.cutoff, config.tail_tolerance))
        .collect::<Result<_>>()?;
    let splitters: Vec<BeamSplitter> = ts
        .iter()
        .map(|&t| BeamSplitter::new(BeamSplitterParams::new(t)?, config.cutoff + 1))
        .collect::<Result<_>>()?;

    let cell_count = betas.len() * ts.len();
    let job = |idx: usize| -> Result<Vec<SweepCell>> {
        let (ib, it) = (idx / ts.len(), idx % ts.len());
        evaluate_cell(
            &inputs[ib],
            &photon,
            &splitters[it],
            &config.outcomes,
            betas[ib],
            ts[it],
        )
    };
    let results = if serial {
        map_indexed_serial(cell_count, job)
    } else {
        map_indexed(cell_count, job)
    };
    let mut cells = Vec::with_capacity(cell_count * config.outcomes.len());
    for group in results {
        cells.extend(group?);
    }
    Ok(SweepGrid {
        betas,
        ts,
        outcomes: config.outcomes.clone(),
        cells,
    })
}

/// Evaluate the grid, in parallel when the `parallel` feature is enabled.
pub fn sweep(config: &RunConfig) -> Result<SweepGrid> {
    sweep_impl(config, false)
}

/// Always-sequential sweep; produces identical output to [`sweep`].
pub fn sweep_serial(config: &RunConfig) -> Result<SweepGrid> {
    sweep_impl(config, true)
}

/// A near-maximal operating point found by [`search_max`].
#[derive(Debug, Clone, PartialEq)]
pub struct SearchHit {
    pub beta: f64,
    pub t: f64,
    pub probability: f64,
    pub negativity: f64,
}

/// Negativity threshold for a point to count as near-maximal.
pub const SEARCH_NEGATIVITY_FLOOR: f64 = 0.999;
/// Coordinate resolution of the bisection refinement.
pub const SEARCH_COORDINATE_TOL: f64 = 1e-6;

struct SearchCell {
    probability: f64,
    negativity: f64,
    /// |a0| - |a1| |B|; zero exactly at the maximal-negativity points.
    /// A vanished photon branch pins it at |a0|, a vanished vacuum branch
    /// sends it to -infinity; neither can produce a spurious crossing.
    residual: f64,
}

struct SearchContext<'a> {
    config: &'a RunConfig,
    photon: DelocalizedPhoton,
    outcome: usize,
}

impl SearchContext<'_> {
    fn evaluate(&self, beta: f64, t: f64) -> Result<SearchCell> {
        let input = build(
            &self.config.input.with_beta(beta),
            self.config.cutoff,
            self.config.tail_tolerance,
        )?;
        let splitter = BeamSplitter::new(BeamSplitterParams::new(t)?, self.config.cutoff + 1)?;
        let result = EvolvedBranches::new(&input, &self.photon, &splitter)?
            .condition(self.outcome)?;
        let a0 = self.photon.a0().norm();
        let a1 = self.photon.a1().norm();
        let residual = match result.b_abs() {
            Some(b) => a0 - a1 * b,
            None if result.phi.is_none() => a0,
            None => f64::NEG_INFINITY,
        };
        Ok(SearchCell {
            probability: result.probability,
            negativity: result.negativity,
            residual,
        })
    }

    fn residual_at(&self, beta: f64, t: f64) -> Result<f64> {
        Ok(self.evaluate(beta, t)?.residual)
    }
}

/// Scan the configured grid for maximal-negativity points, refine each sign
/// change of the balance residual by coordinate bisection, and return every
/// point with negativity >= 0.999, sorted by descending success
/// probability.
pub fn search_max(config: &RunConfig) -> Result<Vec<SearchHit>> {
    config.validate()?;
    let photon = config.photon()?;
    let ctx = SearchContext {
        config,
        photon,
        outcome: config.outcomes[0],
    };

    let betas = config.beta.samples();
    let ts = config.t.samples();
    let grid: Vec<Vec<SearchCell>> = betas
        .iter()
        .map(|&beta| {
            ts.iter()
                .map(|&t| ctx.evaluate(beta, t))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut candidates: Vec<(f64, f64)> = Vec::new();
    for (ib, row) in grid.iter().enumerate() {
        for (it, cell) in row.iter().enumerate() {
            if cell.negativity >= SEARCH_NEGATIVITY_FLOOR {
                candidates.push((betas[ib], ts[it]));
            }
            // sign change along t
            if it + 1 < row.len() && cell.residual.signum() != row[it + 1].residual.signum() {
                let t_star = bisect(|t| ctx.residual_at(betas[ib], t), ts[it], ts[it + 1])?;
                candidates.push((betas[ib], t_star));
            }
            // sign change along beta
            if ib + 1 < grid.len()
                && cell.residual.signum() != grid[ib + 1][it].residual.signum()
            {
                let beta_star =
                    bisect(|beta| ctx.residual_at(beta, ts[it]), betas[ib], betas[ib + 1])?;
                candidates.push((beta_star, ts[it]));
            }
        }
    }

    // deduplicate nearby candidates deterministically
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    candidates.dedup_by(|a, b| (a.0 - b.0).abs() < 5e-4 && (a.1 - b.1).abs() < 5e-4);

    let mut hits = Vec::new();
    for (beta, t) in candidates {
        let cell = ctx.evaluate(beta, t)?;
        if cell.negativity >= SEARCH_NEGATIVITY_FLOOR {
            hits.push(SearchHit {
                beta,
                t,
                probability: cell.probability,
                negativity: cell.negativity,
            });
        }
    }
    hits.sort_by(|a, b| {
        b.probability
            .partial_cmp(&a.probability)
            .unwrap()
            .then(a.beta.partial_cmp(&b.beta).unwrap())
            .then(a.t.partial_cmp(&b.t).unwrap())
    });
    Ok(hits)
}

fn bisect(mut f: impl FnMut(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut f_lo = f(lo)?;
    while hi - lo > SEARCH_COORDINATE_TOL {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

// ---------------------------------------------------------------------------
// JSON configuration file
// ---------------------------------------------------------------------------

/// File form of [`RunConfig`]; every field can be overridden by a CLI flag.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunConfigDto {
    pub input: Option<StateSpecDto>,
    pub a0: Option<f64>,
    pub a1: Option<f64>,
    pub outcomes: Option<Vec<usize>>,
    pub beta: Option<RangeSpec>,
    pub t: Option<RangeSpec>,
    pub cutoff: Option<usize>,
    pub tail_tolerance: Option<f64>,
}

impl RunConfigDto {
    pub fn into_config(self) -> Result<RunConfig> {
        let input_dto = self
            .input
            .ok_or_else(|| Error::InvalidSpec("missing input state".into()))?;
        let config = RunConfig {
            input: StateSpec::try_from(&input_dto)?,
            photon: (
                self.a0.unwrap_or(std::f64::consts::FRAC_1_SQRT_2),
                self.a1.unwrap_or(std::f64::consts::FRAC_1_SQRT_2),
            ),
            outcomes: self.outcomes.unwrap_or_else(|| vec![0]),
            beta: self
                .beta
                .ok_or_else(|| Error::InvalidSpec("missing beta range".into()))?,
            t: self
                .t
                .ok_or_else(|| Error::InvalidSpec("missing t range".into()))?,
            cutoff: self.cutoff.unwrap_or(DEFAULT_CUTOFF),
            tail_tolerance: self.tail_tolerance.unwrap_or(DEFAULT_TAIL_TOL),
        };
        config.validate()?;
        Ok(config)
    }
}
