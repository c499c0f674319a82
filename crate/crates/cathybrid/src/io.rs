//! CSV and JSON emission for sweep grids, search hits, phase-space maps and
//! heralded results.
//!
//! Floating-point fields are printed with 12 significant digits, which is a
//! fixed point of print-then-parse: re-serializing a parsed file reproduces
//! it byte for byte.

use serde::{Deserialize, Serialize};

use crate::entangler::ConditionalResult;
use crate::error::{Error, Result};
use crate::nonclassicality::{QuadratureDistribution, WignerGrid};
use crate::states::ComplexDto;
use crate::sweep::{SearchHit, SweepCell, SweepGrid};

/// 12 significant digits in scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.11e}")
}

fn parse_float(field: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|_| Error::InvalidSpec(format!("bad float field {field:?}")))
}

pub const SWEEP_CSV_HEADER: &str = "beta,t,n,probability,negativity,B_abs,separable";

pub fn sweep_to_csv(grid: &SweepGrid) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for cell in &grid.cells {
        out.push_str(&sweep_row(cell));
        out.push('\n');
    }
    out
}

fn sweep_row(cell: &SweepCell) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        format_float(cell.beta),
        format_float(cell.t),
        cell.outcome,
        format_float(cell.probability),
        format_float(cell.negativity),
        cell.b_abs.map(format_float).unwrap_or_default(),
        cell.separable,
    )
}

pub fn sweep_cells_from_csv(text: &str) -> Result<Vec<SweepCell>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == SWEEP_CSV_HEADER => {}
        other => {
            return Err(Error::InvalidSpec(format!(
                "unexpected sweep CSV header {other:?}"
            )))
        }
    }
    lines
        .filter(|line| !line.is_empty())
        .map(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 7 {
                return Err(Error::InvalidSpec(format!("bad sweep CSV row {line:?}")));
            }
            Ok(SweepCell {
                beta: parse_float(fields[0])?,
                t: parse_float(fields[1])?,
                outcome: fields[2]
                    .parse()
                    .map_err(|_| Error::InvalidSpec(format!("bad outcome {:?}", fields[2])))?,
                probability: parse_float(fields[3])?,
                negativity: parse_float(fields[4])?,
                b_abs: if fields[5].is_empty() {
                    None
                } else {
                    Some(parse_float(fields[5])?)
                },
                separable: match fields[6] {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(Error::InvalidSpec(format!("bad separable flag {other:?}")))
                    }
                },
            })
        })
        .collect()
}

pub const SEARCH_CSV_HEADER: &str = "beta,t,probability,negativity";

pub fn search_to_csv(hits: &[SearchHit]) -> String {
    let mut out = String::from(SEARCH_CSV_HEADER);
    out.push('\n');
    for hit in hits {
        out.push_str(&format!(
            "{},{},{},{}\n",
            format_float(hit.beta),
            format_float(hit.t),
            format_float(hit.probability),
            format_float(hit.negativity),
        ));
    }
    out
}

pub fn wigner_to_csv(grid: &WignerGrid) -> String {
    let mut out = String::from("x1,x2,W\n");
    for (i1, &a) in grid.x1.iter().enumerate() {
        for (i2, &b) in grid.x2.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{}\n",
                format_float(a),
                format_float(b),
                format_float(grid.value(i1, i2)),
            ));
        }
    }
    out
}

pub fn quadrature_to_csv(dist: &QuadratureDistribution) -> String {
    let mut out = String::from("x,P\n");
    for (x, p) in dist.xs.iter().zip(&dist.densities) {
        out.push_str(&format!("{},{}\n", format_float(*x), format_float(*p)));
    }
    out
}

/// JSON form of a heralded outcome:
/// `{"n": 0, "probability": ..., "negativity": ..., "B_abs": ...,
///   "psi_parity": "even|odd", "phi_parity": "even|odd", "separable": false}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalResultDto {
    pub n: usize,
    pub probability: f64,
    pub negativity: f64,
    #[serde(rename = "B_abs")]
    pub b_abs: Option<f64>,
    pub psi_parity: String,
    pub phi_parity: String,
    pub separable: bool,
}

impl From<&ConditionalResult> for ConditionalResultDto {
    fn from(result: &ConditionalResult) -> Self {
        Self {
            n: result.outcome,
            probability: result.probability,
            negativity: result.negativity,
            b_abs: result.b_abs(),
            psi_parity: result.psi_parity.label().to_string(),
            phi_parity: result.phi_parity.label().to_string(),
            separable: result.separable,
        }
    }
}

/// JSON dump of a built state's amplitudes, each entry as [re, im].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateDumpDto {
    pub kind: String,
    pub sign: String,
    pub cutoff: usize,
    pub norm_factor: f64,
    pub amplitudes: Vec<ComplexDto>,
}
