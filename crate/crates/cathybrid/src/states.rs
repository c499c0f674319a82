//! The even/odd families of displaced-number-state superpositions, their
//! finite superpositions, and truncated variants.
//!
//! The basic family member with index `l`, parity sign `s` and amplitude
//! `beta > 0` is
//!
//!   N_s^(l)(beta) ( |l, -beta> + s (-1)^l |l, beta> ),
//!
//! which expands over Fock states of a single parity: the `+` family is
//! purely even, the `-` family purely odd, for every `l`.  Members of equal
//! parity are not orthogonal; their overlap has a closed form used to
//! normalize superpositions through the Gram matrix.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::displacement::{coeff, displaced_overlap, gaussian_prefactor};
use crate::error::{Error, Result};
use crate::fock::{parity_masses, FockVector, Parity};

/// Declarative description of an input state.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    /// Single superposition of |l, -beta> and |l, +beta>.
    Sdlps { l: usize, sign: Parity, beta: f64 },
    /// Coefficient-weighted sum of family members l = 0..b.len()-1 of one
    /// parity.
    Superposition {
        sign: Parity,
        beta: f64,
        b: Vec<Complex64>,
    },
    /// Raw Fock coefficients placed on even (sign `+`) or odd (sign `-`)
    /// levels: d[m] multiplies |2m> or |2m+1>.
    Truncated { sign: Parity, d: Vec<Complex64> },
}

impl StateSpec {
    pub fn sign(&self) -> Parity {
        match self {
            StateSpec::Sdlps { sign, .. } => *sign,
            StateSpec::Superposition { sign, .. } => *sign,
            StateSpec::Truncated { sign, .. } => *sign,
        }
    }

    /// Copy with the displacement amplitude replaced; identity for
    /// truncated states, whose coefficients carry no amplitude parameter.
    pub fn with_beta(&self, beta: f64) -> StateSpec {
        match self {
            StateSpec::Sdlps { l, sign, .. } => StateSpec::Sdlps {
                l: *l,
                sign: *sign,
                beta,
            },
            StateSpec::Superposition { sign, b, .. } => StateSpec::Superposition {
                sign: *sign,
                beta,
                b: b.clone(),
            },
            StateSpec::Truncated { .. } => self.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            StateSpec::Sdlps { beta, .. } | StateSpec::Superposition { beta, .. } => {
                if !beta.is_finite() || *beta <= 0.0 {
                    return Err(Error::InvalidSpec(format!(
                        "displacement amplitude must be positive, got {beta}"
                    )));
                }
            }
            StateSpec::Truncated { .. } => {}
        }
        match self {
            StateSpec::Superposition { b, .. } => {
                if b.is_empty() || b.iter().all(|c| c.norm_sqr() == 0.0) {
                    return Err(Error::InvalidSpec(
                        "superposition coefficients must not be empty or all zero".into(),
                    ));
                }
            }
            StateSpec::Truncated { d, .. } => {
                if d.is_empty() || d.iter().all(|c| c.norm_sqr() == 0.0) {
                    return Err(Error::InvalidSpec(
                        "truncated-state coefficients must not be empty or all zero".into(),
                    ));
                }
            }
            StateSpec::Sdlps { .. } => {}
        }
        Ok(())
    }

    /// Truncated spec whose coefficients reproduce the leading Fock
    /// amplitudes of the family member (l, sign, beta), keeping `terms`
    /// coefficients.
    pub fn truncated_from_sdlps(
        l: usize,
        sign: Parity,
        beta: f64,
        terms: usize,
    ) -> Result<StateSpec> {
        if terms == 0 {
            return Err(Error::InvalidSpec("need at least one coefficient".into()));
        }
        let offset = match sign {
            Parity::Even => 0,
            Parity::Odd => 1,
        };
        let d = (0..terms)
            .map(|m| coeff(l, 2 * m + offset, beta).map(|c| Complex64::new(c, 0.0)))
            .collect::<Result<Vec<_>>>()?;
        let spec = StateSpec::Truncated { sign, d };
        spec.validate()?;
        Ok(spec)
    }
}

/// A built state: the spec it came from, the normalized Fock vector, and the
/// closed-form normalization factor that was applied.
#[derive(Debug, Clone)]
pub struct NormalizedState {
    pub spec: StateSpec,
    pub vector: FockVector,
    pub norm_factor: f64,
}

impl NormalizedState {
    pub fn parity(&self) -> Parity {
        self.spec.sign()
    }

    pub fn cutoff(&self) -> usize {
        self.vector.cutoff()
    }
}

/// Closed-form normalization factor
/// (2 (1 + s (-1)^l F(2 beta) c_ll(2 beta)))^(-1/2).
pub fn sdlps_norm_factor(l: usize, sign: Parity, beta: f64) -> Result<f64> {
    let two_beta = 2.0 * beta;
    let parity_factor = if l % 2 == 0 { 1.0 } else { -1.0 };
    let overlap = displaced_overlap(l, l, two_beta)?;
    let radicand = 2.0 * (1.0 + sign.sign() * parity_factor * overlap);
    if radicand <= 1e-300 {
        return Err(Error::DegenerateState(format!(
            "normalization diverges for (l={l}, sign={}, beta={beta})",
            sign.label()
        )));
    }
    Ok(radicand.powf(-0.5))
}

/// Closed-form overlap of two same-sign family members at equal beta:
/// 2 N^(k) N^(m) (delta_km + s (-1)^m F(2 beta) c_mk(2 beta)).
pub fn overlap_closed_form(k: usize, m: usize, sign: Parity, beta: f64) -> Result<f64> {
    let nk = sdlps_norm_factor(k, sign, beta)?;
    let nm = sdlps_norm_factor(m, sign, beta)?;
    let delta = if k == m { 1.0 } else { 0.0 };
    let parity_m = if m % 2 == 0 { 1.0 } else { -1.0 };
    let cross = displaced_overlap(m, k, 2.0 * beta)?;
    Ok(2.0 * nk * nm * (delta + sign.sign() * parity_m * cross))
}

/// Gram matrix of the family members 0..=max_l of one parity, from the
/// closed-form overlaps.
pub fn overlap_gram(max_l: usize, sign: Parity, beta: f64) -> Result<Vec<Vec<f64>>> {
    let mut gram = vec![vec![0.0; max_l + 1]; max_l + 1];
    for k in 0..=max_l {
        for m in 0..=max_l {
            gram[k][m] = overlap_closed_form(k, m, sign, beta)?;
        }
    }
    Ok(gram)
}

/// Norm of `sum_k coeffs[k] member_k` computed through the Gram matrix.
pub fn gram_norm(coeffs: &[Complex64], gram: &[Vec<f64>]) -> f64 {
    let mut total = Complex64::ZERO;
    for (j, bj) in coeffs.iter().enumerate() {
        for (k, bk) in coeffs.iter().enumerate() {
            total += bj.conj() * bk * gram[j][k];
        }
    }
    total.re.max(0.0).sqrt()
}

/// Parity-pure Fock expansion of a single family member, normalized in
/// closed form: only the matching-parity levels carry amplitude, the rest
/// are exact zeros.
fn sdlps_vector(l: usize, sign: Parity, beta: f64, cutoff: usize) -> Result<FockVector> {
    let norm = sdlps_norm_factor(l, sign, beta)?;
    // overall sign (-1)^l for the even family, (-1)^(l+1) for the odd one
    let global = match sign {
        Parity::Even => {
            if l % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        }
        Parity::Odd => {
            if l % 2 == 0 {
                -1.0
            } else {
                1.0
            }
        }
    };
    let scale = global * 2.0 * norm * gaussian_prefactor(beta);
    let offset = match sign {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    let mut amps = vec![Complex64::ZERO; cutoff + 1];
    let mut m = offset;
    while m <= cutoff {
        amps[m] = Complex64::new(scale * coeff(l, m, beta)?, 0.0);
        m += 2;
    }
    Ok(FockVector::from_amplitudes(amps))
}

fn check_tail(v: &FockVector, cutoff: usize, tail_tol: f64) -> Result<()> {
    let tail = v.tail_mass(cutoff.saturating_sub(8));
    if tail > tail_tol {
        return Err(Error::Truncation {
            tail_mass: tail,
            tolerance: tail_tol,
        });
    }
    Ok(())
}

/// Build the normalized state described by `spec` on the truncated space.
pub fn build(spec: &StateSpec, cutoff: usize, tail_tol: f64) -> Result<NormalizedState> {
    spec.validate()?;
    let (vector, norm_factor) = match spec {
        StateSpec::Sdlps { l, sign, beta } => {
            let v = sdlps_vector(*l, *sign, *beta, cutoff)?;
            check_tail(&v, cutoff, tail_tol)?;
            (v.normalized(), sdlps_norm_factor(*l, *sign, *beta)?)
        }
        StateSpec::Superposition { sign, beta, b } => {
            let max_l = b.len() - 1;
            let mut sum = FockVector::zeros(cutoff);
            for (l, bl) in b.iter().enumerate() {
                if bl.norm_sqr() == 0.0 {
                    continue;
                }
                let member = sdlps_vector(l, *sign, *beta, cutoff)?;
                sum = sum.add_scaled(*bl, &member)?;
            }
            check_tail(&sum, cutoff, tail_tol)?;
            let gram = overlap_gram(max_l, *sign, *beta)?;
            let norm = gram_norm(b, &gram);
            if norm <= 1e-150 {
                return Err(Error::DegenerateState(
                    "superposition coefficients cancel to the zero vector".into(),
                ));
            }
            (sum.normalized(), 1.0 / norm)
        }
        StateSpec::Truncated { sign, d } => {
            let offset = match sign {
                Parity::Even => 0,
                Parity::Odd => 1,
            };
            let top = 2 * (d.len() - 1) + offset;
            if top > cutoff {
                return Err(Error::InvalidSpec(format!(
                    "truncated state reaches level {top} above cutoff {cutoff}"
                )));
            }
            let mut amps = vec![Complex64::ZERO; cutoff + 1];
            for (m, dm) in d.iter().enumerate() {
                amps[2 * m + offset] = *dm;
            }
            let v = FockVector::from_amplitudes(amps);
            let norm = v.norm();
            (v.normalized(), 1.0 / norm)
        }
    };
    debug_assert!(vector.is_normalized(1e-12));
    debug_assert!({
        let (even, odd) = parity_masses(&vector);
        match spec.sign() {
            Parity::Even => odd == 0.0,
            Parity::Odd => even == 0.0,
        }
    });
    Ok(NormalizedState {
        spec: spec.clone(),
        vector,
        norm_factor,
    })
}

// ---------------------------------------------------------------------------
// JSON wire format
// ---------------------------------------------------------------------------

/// Coefficient entry accepted either as a bare real number or as a
/// two-element [re, im] array.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexDto {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexDto> for Complex64 {
    fn from(dto: ComplexDto) -> Self {
        match dto {
            ComplexDto::Real(re) => Complex64::new(re, 0.0),
            ComplexDto::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for ComplexDto {
    fn from(z: Complex64) -> Self {
        if z.im == 0.0 {
            ComplexDto::Real(z.re)
        } else {
            ComplexDto::Pair([z.re, z.im])
        }
    }
}

/// Flat JSON form of a state spec:
/// `{"kind": "sdlps|superposition|truncated", "sign": "+|-", "beta": 2.0,
///   "l": 1, "b": [...], "d": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateSpecDto {
    pub kind: String,
    pub sign: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<ComplexDto>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<ComplexDto>>,
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

fn sign_string(p: Parity) -> String {
    match p {
        Parity::Even => "+".into(),
        Parity::Odd => "-".into(),
    }
}

impl TryFrom<&StateSpecDto> for StateSpec {
    type Error = Error;

    fn try_from(dto: &StateSpecDto) -> Result<StateSpec> {
        let sign = parse_sign(&dto.sign)?;
        let spec = match dto.kind.as_str() {
            "sdlps" => StateSpec::Sdlps {
                l: dto.l.unwrap_or(0),
                sign,
                beta: dto
                    .beta
                    .ok_or_else(|| Error::InvalidSpec("sdlps requires beta".into()))?,
            },
            "superposition" => StateSpec::Superposition {
                sign,
                beta: dto
                    .beta
                    .ok_or_else(|| Error::InvalidSpec("superposition requires beta".into()))?,
                b: dto
                    .b
                    .as_ref()
                    .ok_or_else(|| {
                        Error::InvalidSpec("superposition requires coefficients b".into())
                    })?
                    .iter()
                    .map(|c| Complex64::from(*c))
                    .collect(),
            },
            "truncated" => StateSpec::Truncated {
                sign,
                d: dto
                    .d
                    .as_ref()
                    .ok_or_else(|| {
                        Error::InvalidSpec("truncated requires coefficients d".into())
                    })?
                    .iter()
                    .map(|c| Complex64::from(*c))
                    .collect(),
            },
            other => {
                return Err(Error::InvalidSpec(format!(
                    "unknown state kind {other:?} (expected sdlps, superposition or truncated)"
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<&StateSpec> for StateSpecDto {
    fn from(spec: &StateSpec) -> StateSpecDto {
        match spec {
            StateSpec::Sdlps { l, sign, beta } => StateSpecDto {
                kind: "sdlps".into(),
                sign: sign_string(*sign),
                beta: Some(*beta),
                l: Some(*l),
                b: None,
                d: None,
            },
            StateSpec::Superposition { sign, beta, b } => StateSpecDto {
                kind: "superposition".into(),
                sign: sign_string(*sign),
                beta: Some(*beta),
                l: None,
                b: Some(b.iter().map(|c| ComplexDto::from(*c)).collect()),
                d: None,
            },
            StateSpec::Truncated { sign, d } => StateSpecDto {
                kind: "truncated".into(),
                sign: sign_string(*sign),
                beta: None,
                l: None,
                b: None,
                d: Some(d.iter().map(|c| ComplexDto::from(*c)).collect()),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::displacement::displaced_number_state;
    use crate::fock::{fidelity, inner_product, DEFAULT_TAIL_TOL};
    use approx::assert_abs_diff_eq;

    const CUTOFF: usize = 64;

    fn built(spec: StateSpec) -> NormalizedState {
        build(&spec, CUTOFF, DEFAULT_TAIL_TOL).unwrap()
    }

    #[test]
    fn norm_factor_limits() {
        assert_abs_diff_eq!(
            sdlps_norm_factor(0, Parity::Even, 0.0).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            sdlps_norm_factor(0, Parity::Even, 6.0).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn norm_factor_matches_raw_superposition_norm() {
        // normalize |1,-beta> - (-1)^1 |1,beta> numerically and compare
        let beta = 2.0;
        let plus = displaced_number_state(1, beta, CUTOFF, DEFAULT_TAIL_TOL).unwrap();
        let minus = displaced_number_state(1, -beta, CUTOFF, DEFAULT_TAIL_TOL).unwrap();
        let raw = minus.add_scaled(Complex64::new(1.0, 0.0), &plus).unwrap();
        let numeric = 1.0 / raw.norm();
        let closed = sdlps_norm_factor(1, Parity::Odd, beta).unwrap();
        assert_abs_diff_eq!(closed, numeric, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_normalizations_are_rejected() {
        assert!(matches!(
            sdlps_norm_factor(0, Parity::Odd, 0.0),
            Err(Error::DegenerateState(_))
        ));
        assert!(matches!(
            sdlps_norm_factor(1, Parity::Even, 0.0),
            Err(Error::DegenerateState(_))
        ));
    }

    #[test]
    fn built_states_are_parity_pure() {
        for (l, sign) in [
            (0, Parity::Even),
            (0, Parity::Odd),
            (1, Parity::Even),
            (3, Parity::Odd),
        ] {
            let state = built(StateSpec::Sdlps { l, sign, beta: 2.0 });
            let (even, odd) = parity_masses(&state.vector);
            match sign {
                Parity::Even => {
                    assert!(odd <= 1e-24);
                    assert_abs_diff_eq!(even, 1.0, epsilon = 1e-12);
                }
                Parity::Odd => {
                    assert!(even <= 1e-24);
                    assert_abs_diff_eq!(odd, 1.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn even_cat_amplitude_matches_closed_expression() {
        // amplitude on |2> of the l = 0 even state at beta = 2:
        // 2 N F(2) c_02(2) with c_02(2) = 2^2 / sqrt(2!)
        let state = built(StateSpec::Sdlps {
            l: 0,
            sign: Parity::Even,
            beta: 2.0,
        });
        let n_plus = (2.0 * (1.0 + (-8.0f64).exp())).powf(-0.5);
        let expect = 2.0 * n_plus * (-2.0f64).exp() * (4.0 / 2.0f64.sqrt());
        assert_abs_diff_eq!(state.vector.amplitude(2).re, expect, epsilon = 1e-10);
        assert_eq!(state.vector.amplitude(1), Complex64::ZERO);
    }

    #[test]
    fn opposite_parity_members_are_orthogonal() {
        let even = built(StateSpec::Sdlps {
            l: 0,
            sign: Parity::Even,
            beta: 2.0,
        });
        let odd = built(StateSpec::Sdlps {
            l: 1,
            sign: Parity::Odd,
            beta: 2.0,
        });
        let ip = inner_product(&even.vector, &odd.vector).unwrap();
        assert!(ip.norm() <= 1e-10);
    }

    #[test]
    fn overlap_closed_form_matches_numeric_inner_products() {
        for sign in [Parity::Even, Parity::Odd] {
            for &beta in &[0.5, 1.0, 2.0, 3.0] {
                let members: Vec<_> = (0..=4)
                    .map(|l| built(StateSpec::Sdlps { l, sign, beta }).vector)
                    .collect();
                for k in 0..=4 {
                    for m in 0..=4 {
                        let closed = overlap_closed_form(k, m, sign, beta).unwrap();
                        let numeric = inner_product(&members[k], &members[m]).unwrap().re;
                        assert_abs_diff_eq!(closed, numeric, epsilon = 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn self_overlap_is_unity() {
        assert_abs_diff_eq!(
            overlap_closed_form(2, 2, Parity::Even, 1.3).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn truncated_single_odd_term_is_one_photon() {
        let state = built(StateSpec::Truncated {
            sign: Parity::Odd,
            d: vec![Complex64::ONE],
        });
        assert_eq!(state.vector.amplitude(1), Complex64::ONE);
        assert_eq!(state.norm_factor, 1.0);
    }

    #[test]
    fn superposition_is_normalized_and_parity_pure() {
        let state = built(StateSpec::Superposition {
            sign: Parity::Even,
            beta: 2.0,
            b: vec![Complex64::ONE, Complex64::ONE],
        });
        let (_, odd) = parity_masses(&state.vector);
        assert!(odd <= 1e-24);
        assert_abs_diff_eq!(state.vector.norm_sqr(), 1.0, epsilon = 1e-12);
        // Gram-based normalization agrees with the numeric norm of the sum
        let members: Vec<_> = (0..=1)
            .map(|l| {
                sdlps_vector(l, Parity::Even, 2.0, CUTOFF)
                    .unwrap()
            })
            .collect();
        let raw = members[0]
            .add_scaled(Complex64::ONE, &members[1])
            .unwrap();
        assert_abs_diff_eq!(state.norm_factor, 1.0 / raw.norm(), epsilon = 1e-10);
    }

    #[test]
    fn odd_family_limit_approaches_single_photon() {
        let state = build(
            &StateSpec::Sdlps {
                l: 0,
                sign: Parity::Odd,
                beta: 1e-3,
            },
            16,
            DEFAULT_TAIL_TOL,
        )
        .unwrap();
        let one = FockVector::basis(1, 16);
        assert!(fidelity(&state.vector, &one).unwrap() >= 1.0 - 1e-6);
    }

    #[test]
    fn truncated_from_sdlps_tracks_family_amplitudes() {
        let spec = StateSpec::truncated_from_sdlps(0, Parity::Even, 1.0, 12).unwrap();
        let truncated = built(spec);
        let full = built(StateSpec::Sdlps {
            l: 0,
            sign: Parity::Even,
            beta: 1.0,
        });
        assert!(fidelity(&truncated.vector, &full.vector).unwrap() >= 1.0 - 1e-9);
    }

    #[test]
    fn spec_validation_rejects_bad_inputs() {
        assert!(StateSpec::Sdlps {
            l: 0,
            sign: Parity::Odd,
            beta: 0.0
        }
        .validate()
        .is_err());
        assert!(StateSpec::Superposition {
            sign: Parity::Even,
            beta: 1.0,
            b: vec![]
        }
        .validate()
        .is_err());
        assert!(StateSpec::Truncated {
            sign: Parity::Even,
            d: vec![Complex64::ZERO]
        }
        .validate()
        .is_err());
    }

    #[test]
    fn dto_round_trip() {
        let spec = StateSpec::Superposition {
            sign: Parity::Even,
            beta: 2.0,
            b: vec![Complex64::ONE, Complex64::new(0.0, 1.0)],
        };
        let dto = StateSpecDto::from(&spec);
        let json = serde_json::to_string(&dto).unwrap();
        let parsed: StateSpecDto = serde_json::from_str(&json).unwrap();
        let back = StateSpec::try_from(&parsed).unwrap();
        assert_eq!(spec, back);
    }
}
