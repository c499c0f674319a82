//! Heralded hybrid entanglement between a parity-definite mode state and a
//! single-photon qubit.
//!
//! The scheme: mode 1 carries the input state, a delocalized photon
//! a0 |0>_2 |1>_3 + a1 |1>_2 |0>_3 spans modes 2 and 3.  Modes 1 and 2 mix
//! on a beam splitter with real transmittance t and reflectance
//! r = sqrt(1 - t^2), acting on creation operators as
//!
//!   adag_1 -> t adag_1 - r adag_2,     adag_2 -> r adag_1 + t adag_2.
//!
//! Counting n photons in mode 2 leaves modes 1 and 3 in
//!
//!   a0 |psi>|1>_3 + a1 B |phi>|0>_3   (up to normalization),
//!
//! where |psi> and |phi> are parity-pure mode-1 states of opposite parity
//! and B is the branch-weight ratio that, together with (a0, a1), fixes the
//! entanglement negativity.
//!
//! This module is the direct evolution path: it applies the exact
//! photon-number-conserving block unitary and projects the counted mode.
//! The matching closed-form coefficient layer lives in [`closed_form`].

pub mod closed_form;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{project_mode2, FockVector, Parity, TwoModeState};
use crate::negativity;
use crate::states::NormalizedState;

/// Largest total photon number per beam-splitter block.
pub const MAX_BLOCK_TOTAL: usize = 130;

/// Mass below which a conditional branch is treated as absent.
const BRANCH_ZERO_TOL: f64 = 1e-28;

/// Normalized single-photon amplitudes over the two delocalized modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelocalizedPhoton {
    a0: Complex64,
    a1: Complex64,
}

impl DelocalizedPhoton {
    /// Both amplitudes must be nonzero and |a0|^2 + |a1|^2 = 1 within 1e-12.
    pub fn new(a0: Complex64, a1: Complex64) -> Result<Self> {
        if a0.norm_sqr() == 0.0 || a1.norm_sqr() == 0.0 {
            return Err(Error::InvalidSpec(
                "delocalized photon requires nonzero amplitude in both modes".into(),
            ));
        }
        let total = a0.norm_sqr() + a1.norm_sqr();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSpec(format!(
                "photon amplitudes not normalized: |a0|^2 + |a1|^2 = {total}"
            )));
        }
        Ok(Self { a0, a1 })
    }

    /// Rescale arbitrary nonzero amplitudes to a unit pair.
    pub fn normalized(a0: Complex64, a1: Complex64) -> Result<Self> {
        let total = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if total == 0.0 || a0.norm_sqr() == 0.0 || a1.norm_sqr() == 0.0 {
            return Err(Error::InvalidSpec(
                "delocalized photon requires nonzero amplitude in both modes".into(),
            ));
        }
        let inv = Complex64::new(1.0 / total, 0.0);
        Ok(Self {
            a0: a0 * inv,
            a1: a1 * inv,
        })
    }

    /// Equal-weight photon, a0 = a1 = 1/sqrt(2).
    pub fn balanced() -> Self {
        let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { a0: amp, a1: amp }
    }

    pub fn a0(&self) -> Complex64 {
        self.a0
    }

    pub fn a1(&self) -> Complex64 {
        self.a1
    }
}

/// Real beam-splitter parameters with t in (0, 1) and r = +sqrt(1 - t^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterParams {
    t: f64,
    r: f64,
}

impl BeamSplitterParams {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::InvalidSpec(format!(
                "transmittance must lie strictly inside (0, 1), got {t}"
            )));
        }
        Ok(Self {
            t,
            r: (1.0 - t * t).sqrt(),
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

/// Photon-number-conserving two-mode unitary, stored as one orthogonal
/// matrix per total-photon block.
///
/// Block N maps the basis |N-k, k> (k = photons in mode 2).  It is the
/// exponential of the mixing generator, evaluated spectrally: with
/// S = diag(i^k) and the real symmetric tridiagonal coupling matrix T whose
/// off-diagonal is sqrt((k+1)(N-k)),
///
///   B_N = S^dag V exp(-i theta Lambda) V^T S,    theta = atan2(r, t),
///
/// where T = V Lambda V^T and the eigenvalues are exactly N - 2m.  Knowing
/// the spectrum in closed form makes every eigenvector one cheap inverse
/// iteration, and the phase pattern of S keeps all arithmetic real.  A
/// creation-operator column recurrence would lose roughly sqrt(binomial)
/// digits per block and is useless beyond N of a few dozen.
#[derive(Debug, Clone)]
pub struct BeamSplitter {
    params: BeamSplitterParams,
    /// blocks[n] is (n+1) x (n+1), stored column-major as nested Vecs:
    /// blocks[n][k][m] = <N-m, m| BS |N-k, k>.
    blocks: Vec<Vec<Vec<f64>>>,
}

/// Solve (T - lambda I) x = rhs in place for the zero-diagonal tridiagonal
/// T with off-diagonals `coupling`, by banded elimination with partial
/// pivoting.  Near-singular systems are the intended use: the solution then
/// aligns with the eigenvector of lambda.
fn solve_shifted_tridiagonal(coupling: &[f64], lambda: f64, rhs: &mut [f64]) {
    let n = rhs.len();
    if n == 1 {
        let pivot = if lambda.abs() < 1e-300 { 1e-300 } else { -lambda };
        rhs[0] /= pivot;
        return;
    }
    let floor = f64::EPSILON * (n as f64) * (n as f64).sqrt().max(1.0);
    // current pivot row (p, q, r) at columns (i, i+1, i+2)
    let mut rows: Vec<(f64, f64, f64)> = Vec::with_capacity(n);
    let (mut p, mut q, mut r) = (-lambda, coupling[0], 0.0);
    for i in 0..n - 1 {
        let mut a = coupling[i];
        let mut b = -lambda;
        let mut s = if i + 1 < n - 1 { coupling[i + 1] } else { 0.0 };
        if a.abs() > p.abs() {
            std::mem::swap(&mut p, &mut a);
            std::mem::swap(&mut q, &mut b);
            std::mem::swap(&mut r, &mut s);
            rhs.swap(i, i + 1);
        }
        if p.abs() < floor {
            p = floor.copysign(if p == 0.0 { 1.0 } else { p });
        }
        let m = a / p;
        rhs[i + 1] -= m * rhs[i];
        rows.push((p, q, r));
        p = b - m * q;
        q = s - m * r;
        r = 0.0;
    }
    if p.abs() < floor {
        p = floor.copysign(if p == 0.0 { 1.0 } else { p });
    }
    rows.push((p, 0.0, 0.0));
    // back substitution over the two stored superdiagonals
    rhs[n - 1] /= rows[n - 1].0;
    for i in (0..n - 1).rev() {
        let (pi, qi, ri) = rows[i];
        let mut value = rhs[i] - qi * rhs[i + 1];
        if i + 2 < n {
            value -= ri * rhs[i + 2];
        }
        rhs[i] = value / pi;
    }
}

/// Eigenvector of the coupling matrix at the (exactly known) eigenvalue,
/// by inverse iteration from a deterministic pseudo-random seed.
fn coupling_eigenvector(coupling: &[f64], lambda: f64) -> Vec<f64> {
    let n = coupling.len() + 1;
    let mut state = 0x9e37_79b9_7f4a_7c15u64 ^ (lambda.to_bits().rotate_left(17));
    let mut vec: Vec<f64> = (0..n)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / (1u64 << 53) as f64 - 0.5
        })
        .collect();
    for _ in 0..2 {
        solve_shifted_tridiagonal(coupling, lambda, &mut vec);
        let norm = vec.iter().map(|x| x * x).sum::<f64>().sqrt();
        vec.iter_mut().for_each(|x| *x /= norm);
    }
    vec
}

/// One total-photon block of the unitary; see [`BeamSplitter`].
fn block_unitary(theta: f64, total: usize) -> Vec<Vec<f64>> {
    let dim = total + 1;
    if total == 0 {
        return vec![vec![1.0]];
    }
    let coupling: Vec<f64> = (0..total)
        .map(|k| (((k + 1) * (total - k)) as f64).sqrt())
        .collect();
    let mut basis = DMatrix::<f64>::zeros(dim, dim);
    let mut cos_scaled = DMatrix::<f64>::zeros(dim, dim);
    let mut sin_scaled = DMatrix::<f64>::zeros(dim, dim);
    for m in 0..dim {
        let lambda = total as f64 - 2.0 * m as f64;
        let vector = coupling_eigenvector(&coupling, lambda);
        let (sin_phase, cos_phase) = (theta * lambda).sin_cos();
        for row in 0..dim {
            basis[(row, m)] = vector[row];
            cos_scaled[(row, m)] = vector[row] * cos_phase;
            sin_scaled[(row, m)] = vector[row] * sin_phase;
        }
    }
    let cos_part = &cos_scaled * basis.transpose();
    let sin_part = &sin_scaled * basis.transpose();
    // B[m, k] = Re(i^(k-m) (C - i S))[m, k]
    (0..dim)
        .map(|k| {
            (0..dim)
                .map(|m| match (k + 4 * dim - m) % 4 {
                    0 => cos_part[(m, k)],
                    1 => sin_part[(m, k)],
                    2 => -cos_part[(m, k)],
                    _ => -sin_part[(m, k)],
                })
                .collect()
        })
        .collect()
}

impl BeamSplitter {
    pub fn new(params: BeamSplitterParams, max_total: usize) -> Result<Self> {
        if max_total > MAX_BLOCK_TOTAL {
            return Err(Error::Range(format!(
                "beam-splitter block total {max_total} above supported {MAX_BLOCK_TOTAL}"
            )));
        }
        let theta = params.r.atan2(params.t);
        let blocks = (0..=max_total)
            .map(|total| block_unitary(theta, total))
            .collect();
        Ok(Self { params, blocks })
    }

    pub fn params(&self) -> BeamSplitterParams {
        self.params
    }

    pub fn max_total(&self) -> usize {
        self.blocks.len() - 1
    }

    /// Matrix element <total-m, m| BS |total-k, k>.
    pub fn block_element(&self, total: usize, m: usize, k: usize) -> f64 {
        self.blocks[total][k][m]
    }

    /// Max-norm orthogonality defect of one block.
    pub fn unitarity_defect(&self, total: usize) -> f64 {
        let block = &self.blocks[total];
        let dim = total + 1;
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let dot: f64 = (0..dim).map(|m| block[i][m] * block[j][m]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - expect).abs());
            }
        }
        worst
    }

    /// Apply the unitary to a joint state.  Every populated total-photon
    /// block must fit inside the stored grid, otherwise the result would
    /// silently leak norm.
    pub fn apply(&self, state: &TwoModeState) -> Result<TwoModeState> {
        let c1 = state.cutoff1();
        let c2 = state.cutoff2();
        let full = c1.min(c2);
        for total in (full + 1)..=(c1 + c2) {
            let mass = state.block_mass(total);
            if mass > BRANCH_ZERO_TOL {
                return Err(Error::Truncation {
                    tail_mass: mass,
                    tolerance: BRANCH_ZERO_TOL,
                });
            }
        }
        if full > self.max_total() {
            return Err(Error::Range(format!(
                "state needs blocks up to {full}, beam splitter built to {}",
                self.max_total()
            )));
        }
        let mut out = TwoModeState::zeros(c1, c2);
        for total in 0..=full {
            let block = &self.blocks[total];
            // gather the in-block vector, skip empty blocks cheaply
            let mut input = vec![Complex64::ZERO; total + 1];
            let mut occupied = false;
            for (k, slot) in input.iter_mut().enumerate() {
                let a = state.amplitude(total - k, k);
                occupied |= a.norm_sqr() > 0.0;
                *slot = a;
            }
            if !occupied {
                continue;
            }
            for m in 0..=total {
                let mut acc = Complex64::ZERO;
                for (k, amp) in input.iter().enumerate() {
                    if amp.norm_sqr() > 0.0 {
                        acc += amp * block[k][m];
                    }
                }
                out.set_amplitude(total - m, m, acc);
            }
        }
        Ok(out)
    }
}

/// One heralded outcome: the two conditional branches, the branch-weight
/// ratio, the outcome probability and the resulting negativity.
///
/// `psi` pairs with |1>_3 and is fed by the a0 branch; `phi` pairs with
/// |0>_3.  A branch with no amplitude is `None`; if either branch is absent
/// the heralded state is a product state and `separable` is set.
#[derive(Debug, Clone)]
pub struct ConditionalResult {
    pub outcome: usize,
    pub psi: Option<FockVector>,
    pub phi: Option<FockVector>,
    pub b_param: Option<Complex64>,
    pub probability: f64,
    pub negativity: f64,
    pub psi_parity: Parity,
    pub phi_parity: Parity,
    pub separable: bool,
}

impl ConditionalResult {
    pub fn b_abs(&self) -> Option<f64> {
        self.b_param.map(|b| b.norm())
    }
}

/// Parity of the psi branch implied by the input parity and the outcome:
/// the count removes its own parity from the mode-1 state.
pub fn psi_parity_for(input: Parity, outcome: usize) -> Parity {
    input.xor(Parity::of(outcome))
}

/// Evolution of both photon branches through the beam splitter, ready to be
/// conditioned on any outcome.
pub struct EvolvedBranches {
    photon: DelocalizedPhoton,
    input_parity: Parity,
    /// mode-1 (x) mode-2 joint fed by a0 (mode 2 starts in vacuum)
    joint_vac: TwoModeState,
    /// joint fed by a1 (mode 2 starts with the photon)
    joint_one: TwoModeState,
}

impl EvolvedBranches {
    pub fn new(
        input: &NormalizedState,
        photon: &DelocalizedPhoton,
        splitter: &BeamSplitter,
    ) -> Result<Self> {
        let cutoff = input.cutoff();
        let joint_dim = cutoff + 1;
        if splitter.max_total() < joint_dim {
            return Err(Error::Range(format!(
                "beam splitter built to total {}, need {joint_dim}",
                splitter.max_total()
            )));
        }
        let embedded = input.vector.resized(joint_dim);
        let joint_vac = splitter.apply(&TwoModeState::product_with_basis(
            &embedded, 0, joint_dim,
        ))?;
        let joint_one = splitter.apply(&TwoModeState::product_with_basis(
            &embedded, 1, joint_dim,
        ))?;
        Ok(Self {
            photon: *photon,
            input_parity: input.parity(),
            joint_vac,
            joint_one,
        })
    }

    pub fn max_outcome(&self) -> usize {
        self.joint_vac.cutoff2()
    }

    /// Condition on `outcome` photons in mode 2.
    pub fn condition(&self, outcome: usize) -> Result<ConditionalResult> {
        let (branch_vac, w0) = project_mode2(&self.joint_vac, outcome)?;
        let (branch_one, w1) = project_mode2(&self.joint_one, outcome)?;
        let a0_sqr = self.photon.a0.norm_sqr();
        let a1_sqr = self.photon.a1.norm_sqr();
        let probability = a0_sqr * w0 + a1_sqr * w1;

        let psi_parity = psi_parity_for(self.input_parity, outcome);
        let phi_parity = psi_parity.flipped();

        let have_psi = w0 > BRANCH_ZERO_TOL;
        let have_phi = w1 > BRANCH_ZERO_TOL;
        let psi = have_psi.then(|| branch_vac.normalized());
        let phi = have_phi.then(|| branch_one.normalized());
        let b_param = (have_psi && have_phi)
            .then(|| Complex64::new((w1 / w0).sqrt(), 0.0));
        let separable = !(have_psi && have_phi);
        let negativity = if separable || probability == 0.0 {
            0.0
        } else {
            2.0 * self.photon.a0.norm() * self.photon.a1.norm() * (w0 * w1).sqrt() / probability
        };
        Ok(ConditionalResult {
            outcome,
            psi,
            phi,
            b_param,
            probability,
            negativity,
            psi_parity,
            phi_parity,
            separable,
        })
    }

    /// All outcomes 0..=max, sharing the single evolution.
    pub fn condition_all(&self) -> Result<Vec<ConditionalResult>> {
        (0..=self.max_outcome()).map(|n| self.condition(n)).collect()
    }
}

/// Mix `input` with the delocalized photon and herald on `outcome` photons
/// in the auxiliary mode.
pub fn evolve_and_condition(
    input: &NormalizedState,
    photon: &DelocalizedPhoton,
    params: BeamSplitterParams,
    outcome: usize,
) -> Result<ConditionalResult> {
    let splitter = BeamSplitter::new(params, input.cutoff() + 1)?;
    EvolvedBranches::new(input, photon, &splitter)?.condition(outcome)
}

/// Sanity-check helper: PPT negativity of the full heralded state, for
/// cross-validation against the branch-ratio formula.
pub fn heralded_bipartite_state(
    result: &ConditionalResult,
    photon: &DelocalizedPhoton,
) -> Option<negativity::BipartiteState> {
    let psi = result.psi.as_ref()?;
    let phi = result.phi.as_ref()?;
    let b = result.b_param?;
    negativity::BipartiteState::hybrid(photon, psi, phi, b.norm()).ok()
}
