//! Serialized views of results: exact fractions as strings with floats
//! alongside for plotting.

use serde::Serialize;

use crate::counterexample::{CheckMode, DivergenceRecord, GridCheck, VerificationReport};
use crate::dirichlet::{certify_log_bound, KernelNormRecord, LogBoundWitness};
use crate::rational::Rational;

/// An exact value and its nearest float.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Exact {
    pub exact: Rational,
    pub approx: f64,
}

impl From<&Rational> for Exact {
    fn from(r: &Rational) -> Self {
        Exact {
            exact: r.clone(),
            approx: r.to_f64(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RecordView<'a> {
    pub nu: u64,
    pub k_nu: u32,
    pub m_nu: u64,
    pub m_prev: u64,
    pub lebesgue: &'a Rational,
    pub lebesgue_f64: f64,
    pub log_bound: &'a Option<LogBoundWitness>,
    pub j2_bound: &'a Rational,
    pub j2_bound_f64: f64,
    pub j2_tail_bound: &'a Rational,
    pub gap_lower: &'a Rational,
    pub gap_lower_f64: f64,
    pub c1: &'a Rational,
    pub c1_f64: f64,
    pub growth_ok: bool,
    pub passed: bool,
    pub mode: CheckMode,
    pub grid: Option<GridView<'a>>,
}

#[derive(Debug, Serialize)]
pub struct GridView<'a> {
    pub level: u32,
    pub gap_norm: &'a Rational,
    pub gap_norm_f64: f64,
    pub remainder: &'a Rational,
    pub sound: bool,
    pub consistent: bool,
}

impl<'a> From<&'a GridCheck> for GridView<'a> {
    fn from(g: &'a GridCheck) -> Self {
        GridView {
            level: g.level,
            gap_norm: &g.gap_norm,
            gap_norm_f64: g.gap_norm.to_f64(),
            remainder: &g.remainder,
            sound: g.sound,
            consistent: g.consistent,
        }
    }
}

impl<'a> From<&'a DivergenceRecord> for RecordView<'a> {
    fn from(r: &'a DivergenceRecord) -> Self {
        RecordView {
            nu: r.nu,
            k_nu: r.k_nu,
            m_nu: r.m_nu,
            m_prev: r.m_prev,
            lebesgue: &r.lebesgue,
            lebesgue_f64: r.lebesgue.to_f64(),
            log_bound: &r.log_bound,
            j2_bound: &r.j2_bound,
            j2_bound_f64: r.j2_bound.to_f64(),
            j2_tail_bound: &r.j2_tail_bound,
            gap_lower: &r.gap_lower,
            gap_lower_f64: r.gap_lower.to_f64(),
            c1: &r.c1,
            c1_f64: r.c1.to_f64(),
            growth_ok: r.growth_ok,
            passed: r.passed,
            mode: r.mode,
            grid: r.grid.as_ref().map(GridView::from),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ReportView<'a> {
    pub blocks: usize,
    pub k: &'a [u32],
    pub records: Vec<RecordView<'a>>,
    #[serde(rename = "l1_upper_bound_G")]
    pub l1_upper_bound_g: Exact,
    #[serde(rename = "G_reference_bound")]
    pub g_reference_bound: Exact,
    #[serde(rename = "l1_upper_bound_H")]
    pub l1_upper_bound_h: Exact,
    #[serde(rename = "C1")]
    pub c1: Exact,
    pub l1_bounds_hold: bool,
    pub all_passed: bool,
}

impl<'a> From<&'a VerificationReport> for ReportView<'a> {
    fn from(r: &'a VerificationReport) -> Self {
        ReportView {
            blocks: r.blocks,
            k: &r.k,
            records: r.records.iter().map(RecordView::from).collect(),
            l1_upper_bound_g: (&r.l1_upper_bound_g).into(),
            g_reference_bound: (&r.g_reference_bound).into(),
            l1_upper_bound_h: (&r.l1_upper_bound_h).into(),
            c1: (&r.c1).into(),
            l1_bounds_hold: r.l1_bounds_hold,
            all_passed: r.all_passed,
        }
    }
}

pub fn report_json(report: &VerificationReport) -> String {
    let mut s = serde_json::to_string_pretty(&ReportView::from(report)).expect("serializable");
    s.push('\n');
    s
}

#[derive(Debug, Serialize)]
struct RecordRow<'a> {
    nu: u64,
    k_nu: u32,
    m_nu: u64,
    lebesgue: &'a Rational,
    lebesgue_f64: f64,
    j2_bound: &'a Rational,
    j2_bound_f64: f64,
    gap_lower: &'a Rational,
    gap_lower_f64: f64,
    c1: &'a Rational,
    passed: bool,
    mode: CheckMode,
    grid_gap_norm: Option<&'a Rational>,
}

pub fn report_csv(report: &VerificationReport) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &report.records {
        w.serialize(RecordRow {
            nu: r.nu,
            k_nu: r.k_nu,
            m_nu: r.m_nu,
            lebesgue: &r.lebesgue,
            lebesgue_f64: r.lebesgue.to_f64(),
            j2_bound: &r.j2_bound,
            j2_bound_f64: r.j2_bound.to_f64(),
            gap_lower: &r.gap_lower,
            gap_lower_f64: r.gap_lower.to_f64(),
            c1: &r.c1,
            passed: r.passed,
            mode: r.mode,
            grid_gap_norm: r.grid.as_ref().map(|g| &g.gap_norm),
        })?;
    }
    finish(w)
}

/// One row of the Lebesgue-constant table.
#[derive(Debug, Serialize)]
pub struct LebesgueRow {
    pub k: u32,
    pub m: u64,
    pub lebesgue: Rational,
    pub lebesgue_f64: f64,
    /// `||D_m||_1 >= (1/4) log2 m` certified.
    pub log_bound_holds: bool,
    pub witness: String,
}

impl From<&KernelNormRecord> for LebesgueRow {
    fn from(r: &KernelNormRecord) -> Self {
        let witness = certify_log_bound(r.m, &r.lebesgue);
        LebesgueRow {
            k: r.block,
            m: r.m,
            lebesgue: r.lebesgue.clone(),
            lebesgue_f64: r.lebesgue.to_f64(),
            log_bound_holds: witness.is_some(),
            witness: match witness {
                Some(LogBoundWitness::BlockIndex { block }) => format!("4L >= {block}"),
                Some(LogBoundWitness::Bracket { numer, denom }) => format!("4L >= {numer}/{denom}"),
                None => "fails".into(),
            },
        }
    }
}

/// Serializes rows as CSV with a header row.
pub fn rows_csv<T: Serialize>(rows: &[T]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, csv::Error> {
    let bytes = w
        .into_inner()
        .map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn rows_json<T: Serialize>(rows: &[T]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("serializable");
    s.push('\n');
    s
}
