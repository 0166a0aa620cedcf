use serde::{Deserialize, Serialize};

use super::window::{block_symbol, low_pass_symbol, DyadicWindow};
use crate::error::{CsnsError, Result};
use crate::spectral::rescale::{contract, lattice_exponent};
use crate::spectral::{PeriodicGrid, SpectralField};

/// `s_p = -1 + 3/p`, the critical regularity for integrability `p`.
pub fn critical_regularity(p: f64) -> f64 {
    -1.0 + 3.0 / p
}

/// Homogeneous Besov exponents `(s, p, q)` over a finite dyadic window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovSpec {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub window: DyadicWindow,
}

impl BesovSpec {
    pub fn new(s: f64, p: f64, q: f64, window: DyadicWindow) -> Result<Self> {
        if !s.is_finite() {
            return Err(CsnsError::Precondition(format!(
                "regularity must be finite, got {s}"
            )));
        }
        if !(p >= 1.0) || !(q >= 1.0) {
            return Err(CsnsError::Precondition(format!(
                "need p, q >= 1, got p={p}, q={q}"
            )));
        }
        Ok(Self { s, p, q, window })
    }

    /// `B^{s_p + shift}_{p,p}`.
    pub fn critical(p: f64, shift: f64, window: DyadicWindow) -> Result<Self> {
        Self::new(critical_regularity(p) + shift, p, p, window)
    }

    pub fn s_p(&self) -> f64 {
        critical_regularity(self.p)
    }

    pub fn weight(&self, j: i32) -> f64 {
        2f64.powf(j as f64 * self.s)
    }
}

/// `l^q` norm of a finite sequence; `q = inf` is the max.
pub fn sequence_norm(values: impl IntoIterator<Item = f64>, q: f64) -> f64 {
    if q.is_infinite() {
        return values.into_iter().fold(0.0, f64::max);
    }
    values
        .into_iter()
        .map(|v| v.powf(q))
        .sum::<f64>()
        .powf(1.0 / q)
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) {
        return Err(CsnsError::Precondition(format!(
            "integrability must be >= 1, got {p}"
        )));
    }
    Ok(())
}

/// Restrict a field supported on `2^a Z^3` to one of its periods.
fn reduce_to_period(u: &SpectralField) -> (SpectralField, i32) {
    match lattice_exponent(u) {
        Some(a) if a > 0 => (
            contract(u, a, [0.0; 3], true).expect("lattice support"),
            a as i32,
        ),
        _ => (u.clone(), 0),
    }
}

/// Rectangle-rule `L^p` norm of the pointwise vector magnitude.
///
/// A field whose spectrum sits on `2^a Z^3` is periodic with period `L / 2^a`
/// and is evaluated over one period at full resolution.
pub fn lp_norm(u: &SpectralField, p: f64) -> Result<f64> {
    check_p(p)?;
    if u.is_zero() {
        return Ok(0.0);
    }
    let (reduced, _) = reduce_to_period(u);
    Ok(reduced.to_physical().lp_quadrature(p))
}

/// Outcome of extracting one dyadic block.
#[derive(Clone, Debug)]
pub struct Block {
    pub field: SpectralField,
    /// Set when the requested index lies outside the window; the field is then zero.
    pub outside_window: bool,
}

/// `Delta_j u`.
pub fn dyadic_block(u: &SpectralField, j: i32, window: &DyadicWindow) -> Block {
    if !window.contains(j) {
        return Block {
            field: SpectralField::zeros(u.grid(), u.ncomp()),
            outside_window: true,
        };
    }
    let grid = u.grid();
    let mut field = u.apply_symbol(|lin| block_symbol(j, grid.xi_abs(lin)));
    field.set_divergence_free(u.is_divergence_free());
    Block {
        field,
        outside_window: false,
    }
}

/// `S_j u`.
pub fn low_pass(u: &SpectralField, j: i32) -> SpectralField {
    let grid = u.grid();
    let mut out = u.apply_symbol(|lin| low_pass_symbol(j, grid.xi_abs(lin)));
    out.set_divergence_free(u.is_divergence_free());
    out
}

/// Per-mode multiplier tables for every block in `window`.
pub(crate) fn block_tables(grid: &PeriodicGrid, window: &DyadicWindow) -> Vec<Vec<f64>> {
    let radii: Vec<f64> = (0..grid.len()).map(|lin| grid.xi_abs(lin)).collect();
    window
        .indices()
        .map(|j| radii.iter().map(|&r| block_symbol(j, r)).collect())
        .collect()
}

/// Excited modes outside the window's coverage.
pub fn uncovered_modes(u: &SpectralField, window: &DyadicWindow) -> Vec<[i64; 3]> {
    let grid = u.grid();
    u.support()
        .into_iter()
        .filter(|&lin| !window.covers(grid.xi_abs(lin)))
        .map(|lin| grid.mode(lin))
        .collect()
}

pub(crate) fn check_coverage(u: &SpectralField, window: &DyadicWindow) -> Result<()> {
    let bad = uncovered_modes(u, window);
    if bad.is_empty() {
        return Ok(());
    }
    let examples = bad
        .iter()
        .take(4)
        .map(|k| format!("{k:?}"))
        .collect::<Vec<_>>()
        .join(", ");
    Err(CsnsError::WindowCoverage {
        count: bad.len(),
        examples,
    })
}

/// `||Delta_j u||_{L^p}` for every `j` in the window.
pub fn block_lp_norms(u: &SpectralField, window: &DyadicWindow, p: f64) -> Result<Vec<f64>> {
    check_p(p)?;
    let mut out = vec![0.0; window.len()];
    if u.is_zero() {
        return Ok(out);
    }
    let (reduced, a) = reduce_to_period(u);
    let shifted = window.shifted(-a);
    let tables = block_tables(reduced.grid(), &shifted);
    let support = reduced.support();
    for (slot, table) in out.iter_mut().zip(&tables) {
        if support.iter().all(|&lin| table[lin] == 0.0) {
            continue;
        }
        *slot = reduced
            .apply_symbol_table(table)
            .to_physical()
            .lp_quadrature(p);
    }
    Ok(out)
}

/// `l^q_j (2^{js} ||Delta_j u||_{L^p})`.
pub fn besov_norm(u: &SpectralField, spec: &BesovSpec) -> Result<f64> {
    check_coverage(u, &spec.window)?;
    let blocks = block_lp_norms(u, &spec.window, spec.p)?;
    Ok(weighted_sequence_norm(&blocks, spec))
}

pub(crate) fn weighted_sequence_norm(blocks: &[f64], spec: &BesovSpec) -> f64 {
    sequence_norm(
        spec.window
            .indices()
            .zip(blocks)
            .map(|(j, b)| spec.weight(j) * b),
        spec.q,
    )
}

/// One row of a norm report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockRow {
    pub j: i32,
    pub weight: f64,
    pub block_lp: f64,
    pub contribution: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormReport {
    pub norm: f64,
    pub spec: BesovSpec,
    pub rows: Vec<BlockRow>,
}

impl NormReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("j,weight,block_lp,contribution\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{:?},{:?},{:?}\n",
                r.j, r.weight, r.block_lp, r.contribution
            ));
        }
        s
    }

    /// `{norm, spec, window}` summary.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "norm": self.norm,
            "spec": {"s": self.spec.s, "p": self.spec.p, "q": self.spec.q},
            "window": {"j_min": self.spec.window.j_min, "j_max": self.spec.window.j_max},
        })
    }
}

pub fn besov_report(u: &SpectralField, spec: &BesovSpec) -> Result<NormReport> {
    check_coverage(u, &spec.window)?;
    let blocks = block_lp_norms(u, &spec.window, spec.p)?;
    let rows: Vec<BlockRow> = spec
        .window
        .indices()
        .zip(&blocks)
        .map(|(j, &b)| {
            let weight = spec.weight(j);
            BlockRow {
                j,
                weight,
                block_lp: b,
                contribution: weight * b,
            }
        })
        .collect();
    Ok(NormReport {
        norm: weighted_sequence_norm(&blocks, spec),
        spec: *spec,
        rows,
    })
}
