//! Closed-form coefficient layer for the heralded states.
//!
//! For a single family member input with index `l`, parity sign `s_in` and
//! amplitude `beta`, heralding `n` photons leaves the conditional branches
//! expanded over the family at the reduced amplitude `beta t`:
//!
//!   |psi> = L sum_{p=0..l}   x_p |Omega_s^(p)(beta t)>
//!   |phi> = K sum_{p=0..l+1} y_p |Omega_s'^(p)(beta t)>
//!
//! with the psi family sign s = s_in flipped by the outcome parity and
//! s' = -s.  The coefficient ratios, the branch-weight parameter B and the
//! heralding probability all reduce to products of displacement amplitudes
//! c(., n, beta r) and family normalization factors; their denominators
//! contain c(l, n, beta r) and c(l+1, n, beta r), which vanish on Laguerre
//! zeros, so every entry point enforces a conditioning guard and refers the
//! caller to the direct evolution path when it trips.
//!
//! The superposition input (coefficients b over members 0..=k of one
//! family) follows the same structure with the per-member contributions
//! collected into the sums `f_p` (vacuum branch) and `g_p`, `g_top_j`
//! (photon branch).

use num_complex::Complex64;

use crate::displacement::{coeff, gaussian_prefactor};
use crate::error::{Error, Result};
use crate::fock::{FockVector, Parity};
use crate::states::{self, gram_norm, overlap_gram, sdlps_norm_factor, StateSpec};

use super::{psi_parity_for, BeamSplitterParams, DelocalizedPhoton};

/// Denominator magnitude below which the closed forms are refused.
pub const CONDITIONING_TOL: f64 = 1e-8;

fn guard(value: f64, what: &str) -> Result<f64> {
    if value.abs() < CONDITIONING_TOL {
        return Err(Error::Conditioning(format!(
            "{what} = {value:.3e} is below {CONDITIONING_TOL:.0e}; use the evolution path"
        )));
    }
    Ok(value)
}

/// sqrt(hi! / lo!)
fn fact_ratio_sqrt(hi: usize, lo: usize) -> f64 {
    let mut acc = 1.0;
    for i in (lo + 1)..=hi {
        acc *= (i as f64).sqrt();
    }
    acc
}

/// sqrt(p!)
fn fact_sqrt(p: usize) -> f64 {
    fact_ratio_sqrt(p, 0)
}

fn sign_pow(p: usize) -> f64 {
    if p % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Families of the two branches for a given input sign and outcome.
pub fn branch_families(input_sign: Parity, outcome: usize) -> (Parity, Parity) {
    let psi = psi_parity_for(input_sign, outcome);
    (psi, psi.flipped())
}

/// Coefficient lists (x over 0..=l, y over 0..=l+1) of the conditional
/// branches, normalized so the leading entry of each list is 1.
#[derive(Debug, Clone)]
pub struct ClosedFormAmplitudes {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

pub fn closed_form_amplitudes(
    l: usize,
    sign: Parity,
    n: usize,
    beta: f64,
    params: BeamSplitterParams,
) -> Result<ClosedFormAmplitudes> {
    let (t, r) = (params.t(), params.r());
    let beta_r = beta * r;
    let beta_t = beta * t;
    let (s_psi, s_phi) = branch_families(sign, n);

    let c_l = guard(coeff(l, n, beta_r)?, "c(l, n) at beta r")?;
    let c_l1 = guard(coeff(l + 1, n, beta_r)?, "c(l+1, n) at beta r")?;
    let n_psi0 = sdlps_norm_factor(0, s_psi, beta_t)?;
    let n_phi0 = sdlps_norm_factor(0, s_phi, beta_t)?;

    let mut x = Vec::with_capacity(l + 1);
    for p in 0..=l {
        let binom_sqrt = fact_ratio_sqrt(l, p) / fact_sqrt(l - p);
        let value = sign_pow(p)
            * (t / r).powi(p as i32)
            * binom_sqrt
            * coeff(l - p, n, beta_r)?
            * n_psi0
            / (c_l * sdlps_norm_factor(p, s_psi, beta_t)?);
        x.push(value);
    }

    let mut y = Vec::with_capacity(l + 2);
    for p in 0..=l {
        let lp1 = (l - p + 1) as f64;
        let combinatorial =
            fact_ratio_sqrt(l, l - p) * lp1.sqrt() / (fact_sqrt(p) * ((l + 1) as f64).sqrt());
        let value = sign_pow(p)
            * t.powi(p as i32 - 2)
            * r.powi(-(p as i32))
            * combinatorial
            * (t * t - p as f64 * r * r / lp1)
            * coeff(l - p + 1, n, beta_r)?
            * n_phi0
            / (c_l1 * sdlps_norm_factor(p, s_phi, beta_t)?);
        y.push(value);
    }
    let top = sign_pow(l) * t.powi(l as i32 - 1) * r.powi(1 - l as i32) * coeff(0, n, beta_r)?
        * n_phi0
        / (c_l1 * sdlps_norm_factor(l + 1, s_phi, beta_t)?);
    y.push(top);

    Ok(ClosedFormAmplitudes { x, y })
}

fn complex_list(values: &[f64]) -> Vec<Complex64> {
    values.iter().map(|v| Complex64::new(*v, 0.0)).collect()
}

/// Normalization factors (L, K) of the two branch expansions, through the
/// Gram matrices of the non-orthogonal family bases at `beta t`.
fn branch_norm_factors(
    amplitudes: &ClosedFormAmplitudes,
    sign: Parity,
    n: usize,
    beta_t: f64,
) -> Result<(f64, f64)> {
    let (s_psi, s_phi) = branch_families(sign, n);
    let gram_psi = overlap_gram(amplitudes.x.len() - 1, s_psi, beta_t)?;
    let gram_phi = overlap_gram(amplitudes.y.len() - 1, s_phi, beta_t)?;
    let l_norm = gram_norm(&complex_list(&amplitudes.x), &gram_psi);
    let k_norm = gram_norm(&complex_list(&amplitudes.y), &gram_phi);
    if l_norm <= 0.0 || k_norm <= 0.0 {
        return Err(Error::DegenerateState(
            "branch expansion collapsed to the zero vector".into(),
        ));
    }
    Ok((1.0 / l_norm, 1.0 / k_norm))
}

/// Branch-weight parameter B of the heralded state.
pub fn closed_form_b(
    l: usize,
    sign: Parity,
    n: usize,
    beta: f64,
    params: BeamSplitterParams,
) -> Result<Complex64> {
    let (t, r) = (params.t(), params.r());
    let beta_r = beta * r;
    let beta_t = beta * t;
    let (s_psi, s_phi) = branch_families(sign, n);
    let amplitudes = closed_form_amplitudes(l, sign, n, beta, params)?;
    let (l_factor, k_factor) = branch_norm_factors(&amplitudes, sign, n, beta_t)?;
    let c_l = guard(coeff(l, n, beta_r)?, "c(l, n) at beta r")?;
    let c_l1 = coeff(l + 1, n, beta_r)?;
    let value = t * ((l + 1) as f64).sqrt() * c_l1 * sdlps_norm_factor(0, s_psi, beta_t)?
        * l_factor
        / (c_l * sdlps_norm_factor(0, s_phi, beta_t)? * k_factor);
    Ok(Complex64::new(value, 0.0))
}

/// Probability of heralding `n` photons.
pub fn closed_form_probability(
    l: usize,
    sign: Parity,
    n: usize,
    beta: f64,
    params: BeamSplitterParams,
    photon: &DelocalizedPhoton,
) -> Result<f64> {
    let (t, r) = (params.t(), params.r());
    let beta_r = beta * r;
    let beta_t = beta * t;
    let (s_psi, _) = branch_families(sign, n);
    let amplitudes = closed_form_amplitudes(l, sign, n, beta, params)?;
    let (l_factor, _) = branch_norm_factors(&amplitudes, sign, n, beta_t)?;
    let b = closed_form_b(l, sign, n, beta, params)?.norm();
    let c_l = coeff(l, n, beta_r)?;
    let pref = gaussian_prefactor(beta_r);
    let n_in = sdlps_norm_factor(l, sign, beta)?;
    let n_psi0 = sdlps_norm_factor(0, s_psi, beta_t)?;
    let weight_scale = photon.a0().norm_sqr() + photon.a1().norm_sqr() * b * b;
    Ok(pref * pref * r.powi(2 * l as i32) * c_l * c_l * n_in * n_in * weight_scale
        / (n_psi0 * n_psi0 * l_factor * l_factor))
}

/// Reconstructed normalized branch vectors from the coefficient lists.
pub fn branch_states(
    l: usize,
    sign: Parity,
    n: usize,
    beta: f64,
    params: BeamSplitterParams,
    cutoff: usize,
    tail_tol: f64,
) -> Result<(FockVector, FockVector)> {
    let amplitudes = closed_form_amplitudes(l, sign, n, beta, params)?;
    let beta_t = beta * params.t();
    let (s_psi, s_phi) = branch_families(sign, n);
    let psi = combine_family(&complex_list(&amplitudes.x), s_psi, beta_t, cutoff, tail_tol)?;
    let phi = combine_family(&complex_list(&amplitudes.y), s_phi, beta_t, cutoff, tail_tol)?;
    Ok((psi, phi))
}

fn combine_family(
    coeffs: &[Complex64],
    sign: Parity,
    beta: f64,
    cutoff: usize,
    tail_tol: f64,
) -> Result<FockVector> {
    let mut sum = FockVector::zeros(cutoff);
    for (l, c) in coeffs.iter().enumerate() {
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let member = states::build(&StateSpec::Sdlps { l, sign, beta }, cutoff, tail_tol)?;
        sum = sum.add_scaled(*c, &member.vector)?;
    }
    Ok(sum.normalized())
}

// ---------------------------------------------------------------------------
// Superposition input
// ---------------------------------------------------------------------------

/// Closed-form data for a superposition input: the branch sums `f`/`g`, the
/// combined coefficient lists, the branch-weight parameter and the
/// heralding probability.
#[derive(Debug, Clone)]
pub struct SuperpositionClosedForm {
    /// Vacuum-branch sums f_p, p = 0..=k.
    pub f: Vec<Complex64>,
    /// Photon-branch regular sums g_p, p = 0..=k.
    pub g: Vec<Complex64>,
    /// Photon-branch top contributions g_top_j, j = 0..=k.
    pub g_top: Vec<Complex64>,
    /// psi coefficients over the family, leading entry 1.
    pub x: Vec<Complex64>,
    /// phi coefficients over the family (length k + 2), leading entry 1.
    pub y: Vec<Complex64>,
    pub b_param: Complex64,
    pub probability: f64,
    pub psi_family: Parity,
    pub phi_family: Parity,
    pub beta_t: f64,
}

pub fn superposition_closed_form(
    b: &[Complex64],
    sign: Parity,
    n: usize,
    beta: f64,
    params: BeamSplitterParams,
    photon: &DelocalizedPhoton,
) -> Result<SuperpositionClosedForm> {
    if b.is_empty() || b.iter().all(|c| c.norm_sqr() == 0.0) {
        return Err(Error::InvalidSpec(
            "superposition coefficients must not be empty or all zero".into(),
        ));
    }
    let k = b.len() - 1;
    let (t, r) = (params.t(), params.r());
    let beta_r = beta * r;
    let beta_t = beta * t;
    let (s_psi, s_phi) = branch_families(sign, n);

    let member_norms: Vec<f64> = (0..=k)
        .map(|j| sdlps_norm_factor(j, sign, beta))
        .collect::<Result<_>>()?;

    let mut f = Vec::with_capacity(k + 1);
    let mut g = Vec::with_capacity(k + 1);
    for p in 0..=k {
        let mut f_p = Complex64::ZERO;
        let mut g_p = Complex64::ZERO;
        for j in p..=k {
            let shared = sign_pow(j) * member_norms[j] * r.powi((j - p) as i32)
                * fact_ratio_sqrt(j, j - p);
            let jp1 = (j - p + 1) as f64;
            f_p += b[j] * shared * coeff(j - p, n, beta_r)?;
            g_p += b[j]
                * shared
                * jp1.sqrt()
                * (t * t - p as f64 * r * r / jp1)
                * coeff(j - p + 1, n, beta_r)?;
        }
        f.push(f_p);
        g.push(g_p);
    }
    let g_top: Vec<Complex64> = (0..=k)
        .map(|j| {
            Ok(b[j] * member_norms[j] * t.powi(j as i32) * ((j + 1) as f64).sqrt()
                / sdlps_norm_factor(j + 1, s_phi, beta_t)?)
        })
        .collect::<Result<_>>()?;

    let f0 = f[0];
    let g0 = g[0];
    if f0.norm() < CONDITIONING_TOL {
        return Err(Error::Conditioning(format!(
            "vacuum-branch sum f_0 = {:.3e} is below {CONDITIONING_TOL:.0e}; use the evolution path",
            f0.norm()
        )));
    }
    if g0.norm() < CONDITIONING_TOL {
        return Err(Error::Conditioning(format!(
            "photon-branch sum g_0 = {:.3e} is below {CONDITIONING_TOL:.0e}; use the evolution path",
            g0.norm()
        )));
    }

    let n_psi0 = sdlps_norm_factor(0, s_psi, beta_t)?;
    let n_phi0 = sdlps_norm_factor(0, s_phi, beta_t)?;

    let x: Vec<Complex64> = (0..=k)
        .map(|p| {
            Ok(f[p] / f0 * sign_pow(p) * t.powi(p as i32) * n_psi0
                / (fact_sqrt(p) * sdlps_norm_factor(p, s_psi, beta_t)?))
        })
        .collect::<Result<_>>()?;

    let mut y = vec![Complex64::ZERO; k + 2];
    for p in 0..=k {
        y[p] = g[p] / g0 * sign_pow(p) * t.powi(p as i32) * n_phi0
            / (fact_sqrt(p) * sdlps_norm_factor(p, s_phi, beta_t)?);
    }
    let top_scale = Complex64::new(r * t * coeff(0, n, beta_r)? * n_phi0, 0.0) / g0;
    for j in 0..=k {
        y[j + 1] += top_scale * g_top[j];
    }

    let gram_psi = overlap_gram(k, s_psi, beta_t)?;
    let gram_phi = overlap_gram(k + 1, s_phi, beta_t)?;
    let l_norm = gram_norm(&x, &gram_psi);
    let k_norm = gram_norm(&y, &gram_phi);
    if l_norm <= 0.0 || k_norm <= 0.0 {
        return Err(Error::DegenerateState(
            "branch expansion collapsed to the zero vector".into(),
        ));
    }
    let l_factor = 1.0 / l_norm;
    let k_factor = 1.0 / k_norm;

    let b_param = g0 * n_psi0 * l_factor / (t * f0 * n_phi0 * k_factor);

    let gram_in = overlap_gram(k, sign, beta)?;
    let input_norm = gram_norm(b, &gram_in);
    if input_norm <= 1e-150 {
        return Err(Error::DegenerateState(
            "superposition coefficients cancel to the zero vector".into(),
        ));
    }
    let n_sup = 1.0 / input_norm;
    let pref = gaussian_prefactor(beta_r);
    let weight_scale = photon.a0().norm_sqr() + photon.a1().norm_sqr() * b_param.norm_sqr();
    let probability = pref * pref * f0.norm_sqr() * n_sup * n_sup * weight_scale
        / (n_psi0 * n_psi0 * l_factor * l_factor);

    Ok(SuperpositionClosedForm {
        f,
        g,
        g_top,
        x,
        y,
        b_param,
        probability,
        psi_family: s_psi,
        phi_family: s_phi,
        beta_t,
    })
}

/// Reconstructed normalized branches of a superposition heralding.
pub fn superposition_branch_states(
    cf: &SuperpositionClosedForm,
    cutoff: usize,
    tail_tol: f64,
) -> Result<(FockVector, FockVector)> {
    let psi = combine_family(&cf.x, cf.psi_family, cf.beta_t, cutoff, tail_tol)?;
    let phi = combine_family(&cf.y, cf.phi_family, cf.beta_t, cutoff, tail_tol)?;
    Ok((psi, phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entangler::{evolve_and_condition, DelocalizedPhoton, EvolvedBranches};
    use crate::entangler::BeamSplitter;
    use crate::fock::{fidelity, inner_product, DEFAULT_TAIL_TOL};
    use crate::states::build;
    use approx::assert_abs_diff_eq;

    const CUTOFF: usize = 64;

    fn bs(t: f64) -> BeamSplitterParams {
        BeamSplitterParams::new(t).unwrap()
    }

    fn input(l: usize, sign: Parity, beta: f64) -> crate::states::NormalizedState {
        build(&StateSpec::Sdlps { l, sign, beta }, CUTOFF, DEFAULT_TAIL_TOL).unwrap()
    }

    /// Project a branch onto the family members via a Gram solve, returning
    /// the expansion coefficients scaled so the leading one is 1.
    fn gram_solve_coefficients(
        branch: &FockVector,
        family: Parity,
        beta_t: f64,
        count: usize,
    ) -> Vec<f64> {
        let members: Vec<FockVector> = (0..count)
            .map(|l| {
                build(
                    &StateSpec::Sdlps {
                        l,
                        sign: family,
                        beta: beta_t,
                    },
                    branch.cutoff(),
                    DEFAULT_TAIL_TOL,
                )
                .unwrap()
                .vector
            })
            .collect();
        let gram = nalgebra::DMatrix::from_fn(count, count, |i, j| {
            inner_product(&members[i], &members[j]).unwrap().re
        });
        let rhs = nalgebra::DVector::from_fn(count, |i, _| {
            inner_product(&members[i], branch).unwrap().re
        });
        let solution = gram.lu().solve(&rhs).expect("gram solve");
        let lead = solution[0];
        (0..count).map(|i| solution[i] / lead).collect()
    }

    #[test]
    fn leading_coefficients_are_unity() {
        let cf = closed_form_amplitudes(2, Parity::Even, 0, 1.5, bs(0.6)).unwrap();
        assert_abs_diff_eq!(cf.x[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(cf.y[0], 1.0, epsilon = 1e-14);
        assert_eq!(cf.x.len(), 3);
        assert_eq!(cf.y.len(), 4);
    }

    #[test]
    fn cat_input_photon_branch_ratio_matches_gram_solve() {
        // l = 0, even input, even outcome: the phi expansion over the odd
        // family has y_1 = r c(0,n) N(0) / (t c(1,n) N(1)) at beta t
        let (beta, t, n) = (1.0, 0.7, 0);
        let oracle = evolve_and_condition(
            &input(0, Parity::Even, beta),
            &DelocalizedPhoton::balanced(),
            bs(t),
            n,
        )
        .unwrap();
        let phi = oracle.phi.unwrap();
        let coeffs = gram_solve_coefficients(&phi, Parity::Odd, beta * t, 2);
        let cf = closed_form_amplitudes(0, Parity::Even, n, beta, bs(t)).unwrap();
        assert_abs_diff_eq!(cf.y[1], coeffs[1], epsilon = 1e-9);
        // and against the literal expression
        let beta_r = beta * (1.0f64 - t * t).sqrt();
        let r = (1.0f64 - t * t).sqrt();
        let literal = r * coeff(0, n, beta_r).unwrap()
            * sdlps_norm_factor(0, Parity::Odd, beta * t).unwrap()
            / (t * coeff(1, n, beta_r).unwrap()
                * sdlps_norm_factor(1, Parity::Odd, beta * t).unwrap());
        assert_abs_diff_eq!(cf.y[1], literal, epsilon = 1e-12);
    }

    #[test]
    fn general_input_coefficients_match_gram_solve() {
        let (l, beta, t, n) = (2usize, 1.5, 0.6, 0usize);
        let oracle = evolve_and_condition(
            &input(l, Parity::Even, beta),
            &DelocalizedPhoton::balanced(),
            bs(t),
            n,
        )
        .unwrap();
        let cf = closed_form_amplitudes(l, Parity::Even, n, beta, bs(t)).unwrap();
        let psi_coeffs =
            gram_solve_coefficients(&oracle.psi.unwrap(), Parity::Even, beta * t, l + 1);
        let phi_coeffs =
            gram_solve_coefficients(&oracle.phi.unwrap(), Parity::Odd, beta * t, l + 2);
        for p in 0..=l {
            assert_abs_diff_eq!(cf.x[p], psi_coeffs[p], epsilon = 1e-9);
        }
        for p in 0..=l + 1 {
            assert_abs_diff_eq!(cf.y[p], phi_coeffs[p], epsilon = 1e-9);
        }
    }

    #[test]
    fn branch_states_match_the_evolution_path() {
        for sign in [Parity::Even, Parity::Odd] {
            for n in 0..=2usize {
                let (l, beta, t) = (1usize, 1.0, 0.5);
                let oracle = evolve_and_condition(
                    &input(l, sign, beta),
                    &DelocalizedPhoton::balanced(),
                    bs(t),
                    n,
                )
                .unwrap();
                let (psi, phi) =
                    branch_states(l, sign, n, beta, bs(t), CUTOFF + 1, DEFAULT_TAIL_TOL).unwrap();
                assert!(fidelity(&psi, &oracle.psi.unwrap()).unwrap() >= 1.0 - 1e-9);
                assert!(fidelity(&phi, &oracle.phi.unwrap()).unwrap() >= 1.0 - 1e-9);
            }
        }
    }

    #[test]
    fn b_parameter_and_probability_match_the_evolution_path() {
        let photon = DelocalizedPhoton::balanced();
        for (l, sign, beta, t, n) in [
            (0usize, Parity::Even, 1.0, 0.7, 0usize),
            (0, Parity::Even, 0.5, 0.25, 0),
            (1, Parity::Odd, 2.0, 0.5, 1),
            (3, Parity::Even, 0.5, 0.3, 4),
        ] {
            let oracle =
                evolve_and_condition(&input(l, sign, beta), &photon, bs(t), n).unwrap();
            let b = closed_form_b(l, sign, n, beta, bs(t)).unwrap();
            let p = closed_form_probability(l, sign, n, beta, bs(t), &photon).unwrap();
            assert_abs_diff_eq!(b.norm(), oracle.b_abs().unwrap(), epsilon = 1e-9);
            assert_abs_diff_eq!(p, oracle.probability, epsilon = 1e-9);
        }
    }

    #[test]
    fn closed_form_probabilities_sum_to_one() {
        let photon = DelocalizedPhoton::balanced();
        let (l, sign, beta, t) = (0usize, Parity::Even, 1.0, 0.7);
        let mut total = 0.0;
        let splitter = BeamSplitter::new(bs(t), CUTOFF + 1).unwrap();
        let evolved = EvolvedBranches::new(&input(l, sign, beta), &photon, &splitter).unwrap();
        for n in 0..=CUTOFF + 1 {
            total += match closed_form_probability(l, sign, n, beta, bs(t), &photon) {
                Ok(p) => p,
                // Laguerre zero in a denominator: take the evolution value
                Err(Error::Conditioning(_)) => evolved.condition(n).unwrap().probability,
                Err(e) => panic!("{e}"),
            };
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn vanishing_amplitude_limit_is_a_photon_counting_identity() {
        // as beta -> 0 the even l = 0 input becomes vacuum, and heralding
        // zero photons succeeds with |a0|^2 + |a1|^2 r^2: the photon either
        // sat in mode 3, or entered mode 2 and had to leave through the
        // reflected port (the t component keeps it in the counted mode)
        let (a0, a1) = (0.8, 0.6);
        let photon =
            DelocalizedPhoton::new(Complex64::new(a0, 0.0), Complex64::new(a1, 0.0)).unwrap();
        for t in [0.3, 0.7] {
            let r_sqr = 1.0 - t * t;
            let p =
                closed_form_probability(0, Parity::Even, 0, 1e-4, bs(t), &photon).unwrap();
            assert_abs_diff_eq!(p, a0 * a0 + a1 * a1 * r_sqr, epsilon = 1e-4);
        }
    }

    #[test]
    fn b_never_vanishes_on_the_sampled_grid() {
        for &beta in &[0.3, 0.8, 1.5, 2.2, 3.0] {
            for &t in &[0.1, 0.3, 0.5, 0.7, 0.9] {
                for n in 0..=2usize {
                    match closed_form_b(0, Parity::Even, n, beta, bs(t)) {
                        Ok(b) => assert!(b.norm() > 0.0, "B = 0 at ({beta}, {t}, {n})"),
                        Err(Error::Conditioning(_)) => {}
                        Err(e) => panic!("{e}"),
                    }
                }
            }
        }
    }

    #[test]
    fn conditioning_guard_trips_on_laguerre_zero() {
        // c(1, 2, a) vanishes at a = sqrt(2): pick beta r = sqrt(2)
        let beta = 2.0;
        let t = (1.0f64 - 2.0 / (beta * beta)).sqrt();
        let result = closed_form_amplitudes(1, Parity::Even, 2, beta, bs(t));
        assert!(matches!(result, Err(Error::Conditioning(_))));
    }

    #[test]
    fn superposition_reduces_to_single_member() {
        let photon = DelocalizedPhoton::balanced();
        for (l, n) in [(0usize, 0usize), (1, 0), (1, 1), (2, 3)] {
            let mut b = vec![Complex64::ZERO; l + 1];
            b[l] = Complex64::ONE;
            let (beta, t) = (1.0, 0.5);
            let sup =
                superposition_closed_form(&b, Parity::Even, n, beta, bs(t), &photon).unwrap();
            let single_b = closed_form_b(l, Parity::Even, n, beta, bs(t)).unwrap();
            let single_p =
                closed_form_probability(l, Parity::Even, n, beta, bs(t), &photon).unwrap();
            assert_abs_diff_eq!(sup.b_param.norm(), single_b.norm(), epsilon = 1e-10);
            assert_abs_diff_eq!(sup.probability, single_p, epsilon = 1e-10);
            let single = closed_form_amplitudes(l, Parity::Even, n, beta, bs(t)).unwrap();
            for p in 0..=l {
                assert_abs_diff_eq!(sup.x[p].re, single.x[p], epsilon = 1e-10);
            }
            for p in 0..=l + 1 {
                assert_abs_diff_eq!(sup.y[p].re, single.y[p], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn superposition_matches_evolution_for_two_members() {
        let photon = DelocalizedPhoton::balanced();
        let b = vec![Complex64::ONE, Complex64::ONE];
        for sign in [Parity::Even, Parity::Odd] {
            for n in 0..=2usize {
                let (beta, t) = (1.0, 0.6);
                let spec = StateSpec::Superposition {
                    sign,
                    beta,
                    b: b.clone(),
                };
                let state = build(&spec, CUTOFF, DEFAULT_TAIL_TOL).unwrap();
                let oracle = evolve_and_condition(&state, &photon, bs(t), n).unwrap();
                let cf = superposition_closed_form(&b, sign, n, beta, bs(t), &photon).unwrap();
                assert_abs_diff_eq!(
                    cf.b_param.norm(),
                    oracle.b_abs().unwrap(),
                    epsilon = 1e-9
                );
                assert_abs_diff_eq!(cf.probability, oracle.probability, epsilon = 1e-9);
                let (psi, phi) =
                    superposition_branch_states(&cf, CUTOFF + 1, DEFAULT_TAIL_TOL).unwrap();
                assert!(fidelity(&psi, &oracle.psi.unwrap()).unwrap() >= 1.0 - 1e-9);
                assert!(fidelity(&phi, &oracle.phi.unwrap()).unwrap() >= 1.0 - 1e-9);
            }
        }
    }

    #[test]
    fn tabulated_superposition_operating_point() {
        let photon = DelocalizedPhoton::balanced();
        let b = vec![Complex64::ONE, Complex64::ONE];
        let cf =
            superposition_closed_form(&b, Parity::Even, 0, 0.92, bs(0.25), &photon).unwrap();
        assert!((cf.probability - 0.938).abs() <= 0.02);
        let neg = crate::negativity::negativity_closed(
            photon.a0(),
            photon.a1(),
            cf.b_param.norm(),
        );
        assert!(neg >= 0.98);
    }
}
