//! Truncated Fock-space linear algebra for one and two optical modes.
//!
//! A mode truncated at photon number `cutoff` is represented by the
//! `cutoff + 1` complex amplitudes of |0>, ..., |cutoff>.  All values are
//! immutable after construction and all operations are pure, so they can be
//! shared freely across parallel workers.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default photon-number cutoff per mode.
pub const DEFAULT_CUTOFF: usize = 64;
/// Default bound on the squared amplitude mass allowed in the top eight
/// levels of a constructed state.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Even/odd photon-number parity.  Also used as the sign label of the
/// displaced-state superpositions: `Even` is the `+` family, `Odd` the `-`
/// family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: usize) -> Self {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    /// Parity addition: even acts as identity.
    pub fn xor(self, other: Parity) -> Self {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// +1 for the even family, -1 for the odd family.
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// Amplitudes of a single optical mode over |0>..|cutoff>.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<Complex64>,
}

impl FockVector {
    /// Wrap a raw amplitude list; the cutoff is `amps.len() - 1`.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Self {
        assert!(!amps.is_empty(), "a Fock vector needs at least |0>");
        Self { amps }
    }

    pub fn zeros(cutoff: usize) -> Self {
        Self {
            amps: vec![Complex64::ZERO; cutoff + 1],
        }
    }

    /// The number state |n>.
    pub fn basis(n: usize, cutoff: usize) -> Self {
        assert!(n <= cutoff, "basis index {n} above cutoff {cutoff}");
        let mut v = Self::zeros(cutoff);
        v.amps[n] = Complex64::ONE;
        v
    }

    pub fn vacuum(cutoff: usize) -> Self {
        Self::basis(0, cutoff)
    }

    pub fn cutoff(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, n: usize) -> Complex64 {
        self.amps[n]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    /// Rescaled copy with unit norm.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        self.scaled(Complex64::new(1.0 / n, 0.0))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// `self + factor * other`; cutoffs must agree.
    pub fn add_scaled(&self, factor: Complex64, other: &Self) -> Result<Self> {
        check_cutoffs(self, other)?;
        Ok(Self {
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a + factor * b)
                .collect(),
        })
    }

    /// Squared amplitude mass strictly above level `level`.
    pub fn tail_mass(&self, level: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(n, _)| *n > level)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Copy truncated or zero-padded to the given cutoff.
    pub fn resized(&self, cutoff: usize) -> Self {
        let mut amps = self.amps.clone();
        amps.resize(cutoff + 1, Complex64::ZERO);
        Self { amps }
    }
}

fn check_cutoffs(u: &FockVector, v: &FockVector) -> Result<()> {
    if u.cutoff() != v.cutoff() {
        return Err(Error::DimensionMismatch {
            left: u.cutoff(),
            right: v.cutoff(),
        });
    }
    Ok(())
}

/// <u|v>, conjugate-linear in `u`, linear in `v`.
pub fn inner_product(u: &FockVector, v: &FockVector) -> Result<Complex64> {
    check_cutoffs(u, v)?;
    Ok(u.amps
        .iter()
        .zip(&v.amps)
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Squared overlap |<u|v>|^2 of two unit vectors.
pub fn fidelity(u: &FockVector, v: &FockVector) -> Result<f64> {
    Ok(inner_product(u, v)?.norm_sqr())
}

/// Squared amplitude mass on even and odd photon numbers; sums to the
/// squared norm.
pub fn parity_masses(v: &FockVector) -> (f64, f64) {
    let mut even = 0.0;
    let mut odd = 0.0;
    for (n, a) in v.amps.iter().enumerate() {
        if n % 2 == 0 {
            even += a.norm_sqr();
        } else {
            odd += a.norm_sqr();
        }
    }
    (even, odd)
}

/// Joint amplitudes of two modes, indexed `(n1, n2)`.
#[derive(Debug, Clone)]
pub struct TwoModeState {
    amps: DMatrix<Complex64>,
}

impl TwoModeState {
    pub fn zeros(cutoff1: usize, cutoff2: usize) -> Self {
        Self {
            amps: DMatrix::zeros(cutoff1 + 1, cutoff2 + 1),
        }
    }

    /// Product state `mode1 (x) |n2>` embedded in the given mode-2 cutoff.
    pub fn product_with_basis(mode1: &FockVector, n2: usize, cutoff2: usize) -> Self {
        assert!(n2 <= cutoff2);
        let mut s = Self::zeros(mode1.cutoff(), cutoff2);
        for (n1, a) in mode1.amplitudes().iter().enumerate() {
            s.amps[(n1, n2)] = *a;
        }
        s
    }

    pub fn cutoff1(&self) -> usize {
        self.amps.nrows() - 1
    }

    pub fn cutoff2(&self) -> usize {
        self.amps.ncols() - 1
    }

    pub fn amplitude(&self, n1: usize, n2: usize) -> Complex64 {
        self.amps[(n1, n2)]
    }

    pub fn set_amplitude(&mut self, n1: usize, n2: usize, value: Complex64) {
        self.amps[(n1, n2)] = value;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Squared mass of the total-photon-number block `n1 + n2 = total`.
    pub fn block_mass(&self, total: usize) -> f64 {
        let mut mass = 0.0;
        for n2 in 0..=total.min(self.cutoff2()) {
            let n1 = total - n2;
            if n1 <= self.cutoff1() {
                mass += self.amps[(n1, n2)].norm_sqr();
            }
        }
        mass
    }
}

/// Project mode 2 of `s` onto |n>: returns the unnormalized mode-1 vector
/// `<n|_2 s` together with its squared norm (the outcome weight).
pub fn project_mode2(s: &TwoModeState, n: usize) -> Result<(FockVector, f64)> {
    if n > s.cutoff2() {
        return Err(Error::OutcomeOutOfRange {
            outcome: n,
            cutoff: s.cutoff2(),
        });
    }
    let amps: Vec<Complex64> = (0..=s.cutoff1()).map(|n1| s.amps[(n1, n)]).collect();
    let branch = FockVector::from_amplitudes(amps);
    let weight = branch.norm_sqr();
    Ok((branch, weight))
}
