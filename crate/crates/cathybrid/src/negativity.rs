//! Entanglement negativity of the heralded mode-qubit states.
//!
//! Two routes: the closed form 2 |a0||a1| b / (|a0|^2 + |a1|^2 b^2), valid
//! for states of the heralded two-branch structure, and a full
//! partial-transpose computation on the mode (x) qubit density operator.
//! Both are normalized to [0, 1]: 0 for product states, 1 for maximally
//! entangled ones.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::FockVector;

use crate::entangler::DelocalizedPhoton;

/// Pure bipartite amplitudes, rows indexed by the mode Fock level and
/// columns by the qubit basis {0, 1}.
#[derive(Debug, Clone)]
pub struct BipartiteState {
    amps: DMatrix<Complex64>,
}

impl BipartiteState {
    pub fn new(amps: DMatrix<Complex64>) -> Result<Self> {
        if amps.ncols() != 2 || amps.nrows() == 0 {
            return Err(Error::InvalidSpec(
                "bipartite amplitudes must have two qubit columns".into(),
            ));
        }
        Ok(Self { amps })
    }

    /// The heralded structure: normalize(a0 |psi>|1> + a1 b |phi>|0>).
    pub fn hybrid(
        photon: &DelocalizedPhoton,
        psi: &FockVector,
        phi: &FockVector,
        b_abs: f64,
    ) -> Result<Self> {
        if psi.cutoff() != phi.cutoff() {
            return Err(Error::DimensionMismatch {
                left: psi.cutoff(),
                right: phi.cutoff(),
            });
        }
        let dim = psi.cutoff() + 1;
        let scale = 1.0
            / (photon.a0().norm_sqr() + photon.a1().norm_sqr() * b_abs * b_abs).sqrt();
        let w1 = photon.a0() * scale;
        let w0 = photon.a1() * b_abs * scale;
        let mut amps = DMatrix::zeros(dim, 2);
        for n in 0..dim {
            amps[(n, 1)] = w1 * psi.amplitude(n);
            amps[(n, 0)] = w0 * phi.amplitude(n);
        }
        Ok(Self { amps })
    }

    /// Product state `mode (x) qubit basis state`.
    pub fn product(mode: &FockVector, qubit: usize) -> Self {
        assert!(qubit < 2);
        let dim = mode.cutoff() + 1;
        let mut amps = DMatrix::zeros(dim, 2);
        for n in 0..dim {
            amps[(n, qubit)] = mode.amplitude(n);
        }
        Self { amps }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Apply a unitary to the qubit factor.
    pub fn qubit_rotated(&self, u: [[Complex64; 2]; 2]) -> Self {
        let dim = self.amps.nrows();
        let mut amps = DMatrix::zeros(dim, 2);
        for n in 0..dim {
            for q in 0..2 {
                amps[(n, q)] = u[q][0] * self.amps[(n, 0)] + u[q][1] * self.amps[(n, 1)];
            }
        }
        Self { amps }
    }

    /// Drop trailing mode levels with no amplitude in either column, so the
    /// density operator stays small.
    fn trimmed(&self) -> DMatrix<Complex64> {
        let mut top = self.amps.nrows();
        while top > 1
            && self.amps[(top - 1, 0)].norm_sqr() + self.amps[(top - 1, 1)].norm_sqr() < 1e-30
        {
            top -= 1;
        }
        self.amps.rows(0, top).into_owned()
    }
}

/// Closed-form negativity 2 |a0||a1| b / (|a0|^2 + |a1|^2 b^2).
pub fn negativity_closed(a0: Complex64, a1: Complex64, b_abs: f64) -> f64 {
    let a0n = a0.norm();
    let a1n = a1.norm();
    let denom = a0n * a0n + a1n * a1n * b_abs * b_abs;
    if denom == 0.0 {
        return 0.0;
    }
    2.0 * a0n * a1n * b_abs / denom
}

/// True when the branch weights balance, |a0| = |a1| b, which is exactly the
/// maximal-negativity condition.
pub fn max_negativity_condition(a0: Complex64, a1: Complex64, b_abs: f64) -> bool {
    (a0.norm() - a1.norm() * b_abs).abs() <= 1e-9
}

/// Negativity from the partial-transpose spectrum: build the pure-state
/// density operator, transpose the qubit factor, and return twice the sum of
/// the magnitudes of the negative eigenvalues (the trace norm minus one).
pub fn negativity_ppt(state: &BipartiteState) -> Result<f64> {
    let norm_sqr = state.norm_sqr();
    if (norm_sqr - 1.0).abs() > 1e-10 {
        return Err(Error::Normalization { norm_sqr });
    }
    let amps = state.trimmed();
    let dim = amps.nrows();
    let total = dim * 2;
    // rho^(T_qubit)[(n,q),(m,q')] = psi_(n,q') conj(psi_(m,q))
    let mut pt = DMatrix::<Complex64>::zeros(total, total);
    for n in 0..dim {
        for q in 0..2 {
            for m in 0..dim {
                for qp in 0..2 {
                    pt[(n * 2 + q, m * 2 + qp)] = amps[(n, qp)] * amps[(m, q)].conj();
                }
            }
        }
    }
    let eigen = pt.symmetric_eigen();
    let negative_sum: f64 = eigen
        .eigenvalues
        .iter()
        .filter(|lambda| **lambda < 0.0)
        .map(|lambda| -lambda)
        .sum();
    Ok(2.0 * negative_sum)
}
