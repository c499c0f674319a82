//! Phase-space and photon-statistics diagnostics for a single mode.
//!
//! Quadratures are X1 = a + adag and X2 = i(a - adag), so [X1, X2] = -2i and
//! the vacuum has unit standard deviation on both axes.  The Wigner function
//! is scaled so the vacuum reads W(x1, x2) = exp(-(x1^2 + x2^2)/2) / (2 pi),
//! which makes W(0, 0) = <parity> / (2 pi) and the grid integral 1.
//!
//! W is evaluated through the Fock-basis kernel: with g = x1 - i x2,
//!
//!   W(x1, x2) = (1/2 pi) sum_{m,n} conj(c_m) c_n (-1)^n <m|D(g)|n>,
//!
//! whose matrix elements are Laguerre-Gaussian kernels evaluated by the same
//! stable recurrences as the displacement module.  Grid rows are computed
//! independently (in parallel when the `parallel` feature is on).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::par::map_indexed;

const TWO_PI: f64 = std::f64::consts::TAU;

/// Uniformly spaced sample axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl AxisSpec {
    pub fn symmetric(half_range: f64, points: usize) -> Self {
        Self {
            min: -half_range,
            max: half_range,
            points,
        }
    }

    pub fn samples(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.points)
    }

    pub fn spacing(&self) -> f64 {
        if self.points < 2 {
            0.0
        } else {
            (self.max - self.min) / (self.points - 1) as f64
        }
    }
}

pub fn linspace(min: f64, max: f64, points: usize) -> Vec<f64> {
    assert!(points >= 1);
    if points == 1 {
        return vec![min];
    }
    let step = (max - min) / (points - 1) as f64;
    (0..points).map(|i| min + step * i as f64).collect()
}

/// Two-axis grid specification for phase-space maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x1: AxisSpec,
    pub x2: AxisSpec,
}

impl GridSpec {
    pub fn symmetric(half_range: f64, points: usize) -> Self {
        Self {
            x1: AxisSpec::symmetric(half_range, points),
            x2: AxisSpec::symmetric(half_range, points),
        }
    }

    /// Default coverage for a state of displacement size `beta`:
    /// +-(2 beta + 6) at 301 points per axis.
    pub fn for_amplitude(beta: f64) -> Self {
        Self::symmetric(2.0 * beta + 6.0, 301)
    }
}

/// Sampled Wigner function, `values` stored row-major over (x1, x2).
#[derive(Debug, Clone)]
pub struct WignerGrid {
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub values: Vec<f64>,
}

impl WignerGrid {
    pub fn value(&self, i1: usize, i2: usize) -> f64 {
        self.values[i1 * self.x2.len() + i2]
    }

    pub fn spacing(&self) -> (f64, f64) {
        let d1 = if self.x1.len() > 1 {
            self.x1[1] - self.x1[0]
        } else {
            0.0
        };
        let d2 = if self.x2.len() > 1 {
            self.x2[1] - self.x2[0]
        } else {
            0.0
        };
        (d1, d2)
    }

    /// Grid-summed integral of W over the plane.
    pub fn total(&self) -> f64 {
        let (d1, d2) = self.spacing();
        self.values.iter().sum::<f64>() * d1 * d2
    }

    /// Marginal over x2: the x1 quadrature density on this grid.
    pub fn marginal_x1(&self) -> Vec<f64> {
        let (_, d2) = self.spacing();
        (0..self.x1.len())
            .map(|i1| (0..self.x2.len()).map(|i2| self.value(i1, i2)).sum::<f64>() * d2)
            .collect()
    }

    /// Marginal over x1: the x2 quadrature density on this grid.
    pub fn marginal_x2(&self) -> Vec<f64> {
        let (d1, _) = self.spacing();
        (0..self.x2.len())
            .map(|i2| (0..self.x1.len()).map(|i1| self.value(i1, i2)).sum::<f64>() * d1)
            .collect()
    }
}

/// Quadrature axis selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureAxis {
    X1,
    X2,
}

impl QuadratureAxis {
    pub fn label(self) -> &'static str {
        match self {
            QuadratureAxis::X1 => "X1",
            QuadratureAxis::X2 => "X2",
        }
    }
}

/// Sampled quadrature probability density.
#[derive(Debug, Clone)]
pub struct QuadratureDistribution {
    pub axis: QuadratureAxis,
    pub xs: Vec<f64>,
    pub densities: Vec<f64>,
}

impl QuadratureDistribution {
    pub fn spacing(&self) -> f64 {
        if self.xs.len() > 1 {
            self.xs[1] - self.xs[0]
        } else {
            0.0
        }
    }

    pub fn total(&self) -> f64 {
        self.densities.iter().sum::<f64>() * self.spacing()
    }

    pub fn mean(&self) -> f64 {
        self.xs
            .iter()
            .zip(&self.densities)
            .map(|(x, p)| x * p)
            .sum::<f64>()
            * self.spacing()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.xs
            .iter()
            .zip(&self.densities)
            .map(|(x, p)| (x - mean) * (x - mean) * p)
            .sum::<f64>()
            * self.spacing()
    }

    /// Indices of strict local maxima above a small floor.
    pub fn local_maxima(&self, floor: f64) -> Vec<usize> {
        let mut peaks = Vec::new();
        for i in 1..self.densities.len().saturating_sub(1) {
            let p = self.densities[i];
            if p > floor && p > self.densities[i - 1] && p > self.densities[i + 1] {
                peaks.push(i);
            }
        }
        peaks
    }
}

fn check_state(state: &FockVector) -> Result<()> {
    let tail = state.tail_mass(state.cutoff().saturating_sub(8));
    if tail > 1e-9 {
        return Err(Error::Truncation {
            tail_mass: tail,
            tolerance: 1e-9,
        });
    }
    Ok(())
}

/// Drop trailing amplitudes that carry no mass; the kernel sums then run
/// over the occupied levels only.
fn occupied_amplitudes(state: &FockVector) -> &[Complex64] {
    let amps = state.amplitudes();
    let mut top = amps.len();
    while top > 1 && amps[top - 1].norm_sqr() < 1e-30 {
        top -= 1;
    }
    &amps[..top]
}

/// Sampled Wigner function of a normalized pure state.
pub fn wigner(state: &FockVector, grid: &GridSpec) -> Result<WignerGrid> {
    check_state(state)?;
    let amps = occupied_amplitudes(state).to_vec();
    let dim = amps.len();
    // ratio[d][n] = sqrt(n! / (n+d)!)
    let mut ratio = vec![vec![0.0f64; 0]; dim];
    for (d, row) in ratio.iter_mut().enumerate() {
        *row = (0..dim - d)
            .map(|n| {
                let mut r = 1.0;
                for k in (n + 1)..=(n + d) {
                    r /= (k as f64).sqrt();
                }
                r
            })
            .collect();
    }

    let x1 = grid.x1.samples();
    let x2 = grid.x2.samples();
    let cols = x2.len();
    let rows = map_indexed(x1.len(), |i1| {
        let mut row = vec![0.0f64; cols];
        for (i2, &b) in x2.iter().enumerate() {
            row[i2] = wigner_point(&amps, &ratio, x1[i1], b);
        }
        row
    });
    Ok(WignerGrid {
        x1,
        x2,
        values: rows.into_iter().flatten().collect(),
    })
}

fn wigner_point(amps: &[Complex64], ratio: &[Vec<f64>], x1: f64, x2: f64) -> f64 {
    let dim = amps.len();
    let gamma = Complex64::new(x1, -x2);
    let rho = x1 * x1 + x2 * x2;
    let mut acc = 0.0f64;
    let mut gamma_pow = Complex64::ONE;
    for d in 0..dim {
        if d > 0 {
            gamma_pow *= gamma;
        }
        // Laguerre recurrence in the lower index at fixed parameter d
        let a = d as f64;
        let mut l_prev = 1.0;
        let mut l_cur = 1.0 + a - rho;
        for n in 0..dim - d {
            let l_n = if n == 0 { l_prev } else { l_cur };
            if n >= 1 && n < dim - d - 1 {
                let i = n as f64;
                let l_next = ((2.0 * i + 1.0 + a - rho) * l_cur - (i + a) * l_prev) / (i + 1.0);
                l_prev = l_cur;
                l_cur = l_next;
            }
            let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
            let base = parity * ratio[d][n] * l_n;
            if d == 0 {
                acc += base * amps[n].norm_sqr();
            } else {
                let cross = (amps[n + d].conj() * amps[n] * gamma_pow).re;
                acc += 2.0 * base * cross;
            }
        }
    }
    acc * (-0.5 * rho).exp() / TWO_PI
}

/// Harmonic-oscillator eigenfunctions scaled so the vacuum density has unit
/// variance, evaluated at one point for levels 0..dim.
fn oscillator_values(x: f64, dim: usize) -> Vec<f64> {
    let mut u = Vec::with_capacity(dim);
    let u0 = (TWO_PI).powf(-0.25) * (-x * x / 4.0).exp();
    u.push(u0);
    if dim > 1 {
        u.push(x * u0);
    }
    for n in 1..dim.saturating_sub(1) {
        let nf = n as f64;
        let next = (x * u[n] - nf.sqrt() * u[n - 1]) / (nf + 1.0).sqrt();
        u.push(next);
    }
    u
}

/// Probability density of the chosen quadrature on a sample axis.
pub fn quadrature_distribution(
    state: &FockVector,
    axis: QuadratureAxis,
    axis_spec: &AxisSpec,
) -> Result<QuadratureDistribution> {
    check_state(state)?;
    let amps = occupied_amplitudes(state);
    // the X2 statistics are those of X1 after the Fock-phase rotation i^n
    let rotated: Vec<Complex64> = match axis {
        QuadratureAxis::X1 => amps.to_vec(),
        QuadratureAxis::X2 => amps
            .iter()
            .enumerate()
            .map(|(n, a)| a * Complex64::i().powu(n as u32))
            .collect(),
    };
    let xs = axis_spec.samples();
    let densities = xs
        .iter()
        .map(|&x| {
            let u = oscillator_values(x, rotated.len());
            let psi: Complex64 = rotated
                .iter()
                .zip(&u)
                .map(|(a, un)| a * Complex64::new(*un, 0.0))
                .sum();
            psi.norm_sqr()
        })
        .collect();
    Ok(QuadratureDistribution {
        axis,
        xs,
        densities,
    })
}

/// First and second moments of the mode operators, from amplitude sums.
#[derive(Debug, Clone, Copy)]
pub struct ModeMoments {
    pub mean_a: Complex64,
    pub mean_a_sqr: Complex64,
    pub mean_n: f64,
    pub mean_n_sqr: f64,
}

pub fn mode_moments(state: &FockVector) -> ModeMoments {
    let amps = state.amplitudes();
    let dim = amps.len();
    let mut mean_a = Complex64::ZERO;
    let mut mean_a_sqr = Complex64::ZERO;
    let mut mean_n = 0.0;
    let mut mean_n_sqr = 0.0;
    for (n, a) in amps.iter().enumerate() {
        let p = a.norm_sqr();
        mean_n += n as f64 * p;
        mean_n_sqr += (n * n) as f64 * p;
        if n + 1 < dim {
            mean_a += a.conj() * amps[n + 1] * ((n + 1) as f64).sqrt();
        }
        if n + 2 < dim {
            mean_a_sqr += a.conj() * amps[n + 2] * (((n + 1) * (n + 2)) as f64).sqrt();
        }
    }
    ModeMoments {
        mean_a,
        mean_a_sqr,
        mean_n,
        mean_n_sqr,
    }
}

/// Standard deviation of the chosen quadrature, from Fock-basis moments.
pub fn quadrature_sigma(state: &FockVector, axis: QuadratureAxis) -> f64 {
    let m = mode_moments(state);
    let (mean, mean_sqr) = match axis {
        QuadratureAxis::X1 => (
            2.0 * m.mean_a.re,
            2.0 * m.mean_a_sqr.re + 2.0 * m.mean_n + 1.0,
        ),
        QuadratureAxis::X2 => (
            -2.0 * m.mean_a.im,
            -2.0 * m.mean_a_sqr.re + 2.0 * m.mean_n + 1.0,
        ),
    };
    (mean_sqr - mean * mean).max(0.0).sqrt()
}

/// Photon-number Fano factor <dn^2> / <n>.
pub fn fano(state: &FockVector) -> Result<f64> {
    let m = mode_moments(state);
    if m.mean_n <= 1e-14 {
        return Err(Error::UndefinedMoment(
            "Fano factor undefined for zero mean photon number".into(),
        ));
    }
    Ok((m.mean_n_sqr - m.mean_n * m.mean_n) / m.mean_n)
}
