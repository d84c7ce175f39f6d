//! The block construction of an `L¹` function whose greedy approximants along
//! a Walsh subsystem do not converge, and the exact certificates for it.
//!
//! Block `nu` occupies the Walsh indices `[2^{k_nu}, 2^{k_nu + 1})` with
//! coefficients `1/nu^2 + 2^-n`. Its first `m_nu` terms, taken together,
//! factor as `W_{2^{k_nu}} * (1/nu^2) D_{m_nu}` plus an exponentially small
//! tail, so every block contributes a greedy gap of size about
//! `||D_{m_nu}||_1 / nu^2 >= 1/8`.

use serde::Serialize;

use crate::dirichlet::{
    block_max_search, certify_log_bound, dirichlet_pow2, lebesgue_constant, LogBoundWitness,
};
use crate::dyadic::{level_cap, DyadicStep};
use crate::error::{Error, Result};
use crate::greedy::{coeff_compare, greedy_gap_norm, Coefficient, Expansion, Term};
use crate::rational::Rational;
use crate::walsh::walsh_step;

/// Grids above this level are skipped by the per-block cross-check by default.
pub const DEFAULT_GRID_CHECK_LEVEL: u32 = 16;

/// Largest `k_nu` for which block indices still fit in `u64`.
const MAX_K: u32 = 62;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockSpec {
    pub nu: u64,
    pub k_nu: u32,
    /// First index of the block, `2^{k_nu}`.
    pub start: u64,
    pub block_len: u64,
    /// Subsystem window `[lo, hi)` holding the block.
    pub window: (u64, u64),
    pub m_nu: Option<u64>,
}

impl BlockSpec {
    fn new(nu: u64, k_nu: u32) -> Self {
        let start = 1u64 << k_nu;
        BlockSpec {
            nu,
            k_nu,
            start,
            block_len: start,
            window: (start, 2 * start),
            m_nu: None,
        }
    }

    /// Grid level on which every function of this block is constant.
    pub fn level(&self) -> u32 {
        self.k_nu + 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KPolicy {
    /// `k_nu = (nu-1)^2 + 2`.
    Minimal,
    Explicit(Vec<u32>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionConfig {
    pub blocks: usize,
    /// The whole construction must fit strictly below this grid level.
    pub level_cap: u32,
    pub k_policy: KPolicy,
    /// Blocks whose grid level exceeds this get certificate-only records.
    pub grid_check_level: u32,
}

impl ConstructionConfig {
    pub fn minimal(blocks: usize) -> Self {
        ConstructionConfig {
            blocks,
            level_cap: level_cap(),
            k_policy: KPolicy::Minimal,
            grid_check_level: DEFAULT_GRID_CHECK_LEVEL,
        }
    }
}

pub fn minimal_k(nu: u64) -> u64 {
    (nu - 1) * (nu - 1) + 2
}

pub fn choose_sequences(cfg: &ConstructionConfig) -> Result<Vec<BlockSpec>> {
    if cfg.blocks == 0 {
        return Err(Error::InvalidArgument("need at least one block".into()));
    }
    let ks: Vec<u64> = match &cfg.k_policy {
        KPolicy::Minimal => (1..=cfg.blocks as u64).map(minimal_k).collect(),
        KPolicy::Explicit(ks) => {
            if ks.len() != cfg.blocks {
                return Err(Error::InvalidBlocks(format!(
                    "{} k values given for {} blocks",
                    ks.len(),
                    cfg.blocks
                )));
            }
            ks.iter().map(|&k| k as u64).collect()
        }
    };
    for (i, &k) in ks.iter().enumerate() {
        let nu = i as u64 + 1;
        if k < minimal_k(nu) {
            return Err(Error::InvalidBlocks(format!(
                "k_{nu} = {k} must exceed (nu-1)^2 + 1 = {}",
                minimal_k(nu) - 1
            )));
        }
        if i > 0 && k <= ks[i - 1] {
            return Err(Error::InvalidBlocks(format!(
                "blocks {} and {nu} overlap: k must strictly increase ({} then {k})",
                nu - 1,
                ks[i - 1]
            )));
        }
    }
    // The construction lives on level k_V + 1; it must stay strictly below the cap.
    let fits = |k: u64| k + 1 < cfg.level_cap as u64 && k <= MAX_K as u64;
    if let Some(first_bad) = ks.iter().position(|&k| !fits(k)) {
        return Err(Error::TooManyBlocks {
            blocks: first_bad + 1,
            level: (ks[first_bad] + 1).min(u32::MAX as u64) as u32,
            cap: cfg.level_cap,
            max_blocks: first_bad,
        });
    }
    Ok(ks
        .iter()
        .enumerate()
        .map(|(i, &k)| BlockSpec::new(i as u64 + 1, k as u32))
        .collect())
}

pub fn block_terms(spec: &BlockSpec) -> Vec<Term> {
    (spec.start..spec.start + spec.block_len)
        .map(|n| Term::new(n, Coefficient::Symbolic { nu: spec.nu, n }))
        .collect()
}

/// Concatenates the blocks and certifies that coefficients strictly decrease.
pub fn assemble_expansion(specs: &[BlockSpec]) -> Result<Expansion> {
    for pair in specs.windows(2) {
        if 2 * pair[0].start > pair[1].start {
            return Err(Error::InvalidBlocks(format!(
                "block {} overlaps block {}",
                pair[0].nu, pair[1].nu
            )));
        }
    }
    let terms: Vec<Term> = specs.iter().flat_map(block_terms).collect();
    for pair in terms.windows(2) {
        let ord = coeff_compare(&pair[0].coeff, &pair[1].coeff)?;
        if ord != std::cmp::Ordering::Greater {
            return Err(Error::InvalidBlocks(format!(
                "coefficient at index {} does not strictly exceed the one at {}",
                pair[0].index.0, pair[1].index.0
            )));
        }
    }
    Expansion::new(terms)
}

/// The Dirichlet part `G` of the truncated function and a bound on the tail part `H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhSplit {
    pub g: DyadicStep,
    /// `sum_nu sum_i 2^{-(2^{k_nu} + i)}`, the exact coefficient mass of `H`.
    pub h_mass: Rational,
    /// `sum_nu 2^{-2^{k_nu} + 1}`, which strictly exceeds `h_mass`.
    pub h_bound: Rational,
}

/// `G = sum_nu (1/nu^2) W_{2^{k_nu}} D_{2^{k_nu}}` on a level-`level` grid.
pub fn split_g_h(specs: &[BlockSpec], level: u32) -> Result<GhSplit> {
    let need = specs.iter().map(BlockSpec::level).max().unwrap_or(0);
    if level < need {
        return Err(Error::InvalidArgument(format!(
            "G needs level >= {need}, got {level}"
        )));
    }
    let mut parts = Vec::with_capacity(specs.len());
    for s in specs {
        // W_{2^k} D_{2^k} is constant on level k+1; linear_combine lifts it.
        let l = s.level();
        parts.push(walsh_step(s.start, l)?.pointwise_product(&dirichlet_pow2(s.k_nu, l)?)?);
    }
    let g = if parts.is_empty() {
        DyadicStep::zero(level)?
    } else {
        let terms: Vec<(Rational, &DyadicStep)> = specs
            .iter()
            .zip(&parts)
            .map(|(s, p)| (Rational::inverse_square(s.nu), p))
            .collect();
        DyadicStep::linear_combine(&terms)?.refine(level)?
    };
    let h_mass = specs
        .iter()
        .map(|s| Rational::pow2_tail_sum(s.start, s.block_len))
        .sum();
    let h_bound = specs
        .iter()
        .map(|s| Rational::pow2(1 - s.start as i64))
        .sum();
    Ok(GhSplit { g, h_mass, h_bound })
}

/// Sets `m_nu` to the maximizer of `||D_m||_1` over `2^{k_nu - 1} <= m < 2^{k_nu}`.
///
/// The range keeps the first `m_nu` terms inside block `nu`, where
/// `W_{2^k + i} = W_{2^k} W_i` turns their sum into `W_{2^k} D_{m_nu}`.
pub fn choose_m_nu(spec: &BlockSpec) -> Result<BlockSpec> {
    let record = block_max_search(spec.k_nu)?;
    Ok(BlockSpec {
        m_nu: Some(record.m),
        ..spec.clone()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckMode {
    Grid,
    CertificateOnly,
}

/// Exact grid evaluation of the block gap, for comparison with the certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridCheck {
    pub level: u32,
    /// `||G_{m_prev + m_nu} - G_{m_prev}||_1` with dropped tails.
    pub gap_norm: Rational,
    /// Mass of the dropped tails.
    pub remainder: Rational,
    /// `gap_norm - remainder >= gap_lower`.
    pub sound: bool,
    /// `| gap_norm - ||D_{m_nu}||_1 / nu^2 | <= j2_bound`.
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivergenceRecord {
    pub nu: u64,
    pub k_nu: u32,
    pub m_nu: u64,
    /// Greedy terms preceding block `nu`.
    pub m_prev: u64,
    /// `||D_{m_nu}||_1`.
    pub lebesgue: Rational,
    /// Witness for `||D_{m_nu}||_1 >= (1/4) log2 m_nu`, if it holds.
    pub log_bound: Option<LogBoundWitness>,
    /// `sum_{i < m_nu} 2^{-(2^{k_nu} + i)}`.
    pub j2_bound: Rational,
    /// `2^{-2^{k_nu} + 1}`, the geometric bound on `j2_bound`.
    pub j2_tail_bound: Rational,
    /// `lebesgue / nu^2 - j2_bound`.
    pub gap_lower: Rational,
    /// `1/8 - j2_bound`.
    pub c1: Rational,
    /// `(k_nu - 1) / (4 nu^2) >= 1/8`: with `m_nu >= 2^{k_nu - 1}` this closes
    /// the chain `lebesgue / nu^2 >= log2(m_nu) / (4 nu^2) >= 1/8`.
    pub growth_ok: bool,
    pub passed: bool,
    pub mode: CheckMode,
    pub grid: Option<GridCheck>,
}

impl DivergenceRecord {
    /// Every check recorded here holds.
    pub fn all_ok(&self) -> bool {
        self.passed
            && self.growth_ok
            && self.log_bound.is_some()
            && self.gap_lower >= &Rational::pow2(-3) - &self.j2_tail_bound
            && self.grid.as_ref().is_none_or(|g| g.sound && g.consistent)
    }
}

/// Certificate for the greedy gap over the first `m_nu` terms of block `nu`.
///
/// With `level = None` only the algebraic certificate is produced; otherwise
/// the gap is also evaluated exactly on the grid.
pub fn divergence_bound(
    e: &Expansion,
    specs: &[BlockSpec],
    nu: u64,
    level: Option<u32>,
) -> Result<DivergenceRecord> {
    if nu < 2 || nu as usize > specs.len() {
        return Err(Error::InvalidArgument(format!(
            "nu must lie in 2..={}, got {nu}",
            specs.len()
        )));
    }
    let spec = &specs[nu as usize - 1];
    let m_nu = spec
        .m_nu
        .ok_or_else(|| Error::InvalidArgument(format!("m_{nu} has not been chosen")))?;
    let m_prev: u64 = specs[..nu as usize - 1].iter().map(|s| s.block_len).sum();

    let lebesgue = lebesgue_constant(m_nu);
    let inv_sq = Rational::inverse_square(nu);
    let j1_norm = &lebesgue * &inv_sq;
    let j2_bound = Rational::pow2_tail_sum(spec.start, m_nu);
    let j2_tail_bound = Rational::pow2(1 - spec.start as i64);
    let gap_lower = &j1_norm - &j2_bound;
    let c1 = Rational::pow2(-3) - &j2_bound;
    let growth_ok =
        Rational::from(spec.k_nu as u64 - 1) * &inv_sq * Rational::pow2(-2) >= Rational::pow2(-3);

    let grid = match level {
        None => None,
        Some(level) => {
            if level < spec.level() {
                return Err(Error::InvalidArgument(format!(
                    "block {nu} needs grid level >= {}, got {level}",
                    spec.level()
                )));
            }
            let gap = greedy_gap_norm(e, m_prev as usize, (m_prev + m_nu) as usize, level)?;
            let sound = gap.lower() >= gap_lower;
            let consistent = (&gap.value - &j1_norm).abs() <= j2_bound;
            Some(GridCheck {
                level,
                gap_norm: gap.value,
                remainder: gap.remainder,
                sound,
                consistent,
            })
        }
    };
    Ok(DivergenceRecord {
        nu,
        k_nu: spec.k_nu,
        m_nu,
        m_prev,
        log_bound: certify_log_bound(m_nu, &lebesgue),
        lebesgue,
        j2_bound,
        j2_tail_bound,
        passed: gap_lower >= c1,
        gap_lower,
        c1,
        growth_ok,
        mode: if grid.is_some() {
            CheckMode::Grid
        } else {
            CheckMode::CertificateOnly
        },
        grid,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub blocks: usize,
    pub k: Vec<u32>,
    pub records: Vec<DivergenceRecord>,
    /// `||G||_1` of the truncation, computed exactly.
    pub l1_upper_bound_g: Rational,
    /// `sum_nu 1/nu^2`.
    pub g_reference_bound: Rational,
    /// `sum_nu 2^{-2^{k_nu} + 1} >= ||H||_1`.
    pub l1_upper_bound_h: Rational,
    /// `min_nu (1/8 - j2_bound(nu))`.
    pub c1: Rational,
    pub l1_bounds_hold: bool,
    pub all_passed: bool,
}

/// Runs the whole pipeline for blocks `1..=V` and certifies every `nu >= 2`.
pub fn verify_theorem(cfg: &ConstructionConfig) -> Result<VerificationReport> {
    if cfg.blocks < 2 {
        return Err(Error::InvalidArgument(format!(
            "need V >= 2, got V = {}",
            cfg.blocks
        )));
    }
    let specs = choose_sequences(cfg).map_err(|e| e.at("choose_sequences"))?;
    let specs = specs
        .iter()
        .map(choose_m_nu)
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.at("choose_m_nu"))?;
    let expansion = assemble_expansion(&specs).map_err(|e| e.at("assemble_expansion"))?;
    let top = specs.last().map(BlockSpec::level).unwrap_or(0);
    let split = split_g_h(&specs, top).map_err(|e| e.at("split_g_h"))?;

    let records = (2..=cfg.blocks as u64)
        .map(|nu| {
            let lvl = specs[nu as usize - 1].level();
            let grid = (lvl <= cfg.grid_check_level).then_some(lvl);
            divergence_bound(&expansion, &specs, nu, grid)
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.at("divergence_bound"))?;

    let g_norm = split.g.l1_norm();
    let g_reference_bound: Rational = specs.iter().map(|s| Rational::inverse_square(s.nu)).sum();
    let h_coarse: Rational = specs.iter().map(|s| Rational::pow2(-(s.nu as i64))).sum();
    let l1_bounds_hold =
        g_norm <= g_reference_bound && split.h_mass < split.h_bound && split.h_bound <= h_coarse;
    let c1 = records
        .iter()
        .map(|r| r.c1.clone())
        .min()
        .expect("at least one record");
    let all_passed = l1_bounds_hold && records.iter().all(DivergenceRecord::all_ok);
    Ok(VerificationReport {
        blocks: cfg.blocks,
        k: specs.iter().map(|s| s.k_nu).collect(),
        records,
        l1_upper_bound_g: g_norm,
        g_reference_bound,
        l1_upper_bound_h: split.h_bound,
        c1,
        l1_bounds_hold,
        all_passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(blocks: usize) -> ConstructionConfig {
        ConstructionConfig {
            level_cap: 28,
            ..ConstructionConfig::minimal(blocks)
        }
    }

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn minimal_sequences() {
        let ks: Vec<u32> = choose_sequences(&cfg(4))
            .unwrap()
            .iter()
            .map(|s| s.k_nu)
            .collect();
        assert_eq!(ks, vec![2, 3, 6, 11]);
        let one = choose_sequences(&cfg(1)).unwrap();
        assert_eq!((one[0].start, one[0].window), (4, (4, 8)));
    }

    #[test]
    fn rejects_bad_sequences() {
        let bad = ConstructionConfig {
            k_policy: KPolicy::Explicit(vec![2, 2]),
            ..cfg(2)
        };
        assert!(matches!(
            choose_sequences(&bad),
            Err(Error::InvalidBlocks(_))
        ));
        let small = ConstructionConfig {
            k_policy: KPolicy::Explicit(vec![2, 1]),
            ..cfg(2)
        };
        assert!(choose_sequences(&small).is_err());
        let too_few = ConstructionConfig {
            k_policy: KPolicy::Explicit(vec![2]),
            ..cfg(2)
        };
        assert!(choose_sequences(&too_few).is_err());
    }

    #[test]
    fn level_cap_names_feasible_prefix() {
        let c = ConstructionConfig {
            level_cap: 20,
            ..ConstructionConfig::minimal(6)
        };
        match choose_sequences(&c).unwrap_err() {
            Error::TooManyBlocks {
                max_blocks, level, ..
            } => assert_eq!((max_blocks, level), (5, 28)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(choose_sequences(&ConstructionConfig {
            level_cap: 20,
            ..cfg(5)
        })
        .is_ok());
    }

    #[test]
    fn terms_of_blocks() {
        let specs = choose_sequences(&cfg(2)).unwrap();
        let t = block_terms(&specs[0]);
        assert_eq!(t.len(), 4);
        assert_eq!(t[0], Term::new(4, Coefficient::Symbolic { nu: 1, n: 4 }));
        let t = block_terms(&specs[1]);
        assert_eq!(t.len(), 8);
        assert_eq!(t[7], Term::new(15, Coefficient::Symbolic { nu: 2, n: 15 }));
        assert_eq!(assemble_expansion(&specs).unwrap().len(), 12);
        assert_eq!(assemble_expansion(&specs[..1]).unwrap().len(), 4);
    }

    #[test]
    fn g_for_one_block() {
        let specs = choose_sequences(&cfg(1)).unwrap();
        let split = split_g_h(&specs, 3).unwrap();
        assert_eq!(
            split.g.to_float_samples(),
            vec![4.0, -4.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        );
        assert_eq!(split.g.l1_norm(), Rational::one());
        assert!(split_g_h(&specs, 2).is_err());
    }

    #[test]
    fn h_bound_two_blocks() {
        let specs = choose_sequences(&cfg(2)).unwrap();
        let split = split_g_h(&specs, 4).unwrap();
        assert_eq!(split.h_bound, Rational::pow2(-3) + Rational::pow2(-7));
        assert!(split.h_mass < split.h_bound);
    }

    #[test]
    fn m_nu_choice() {
        let specs = choose_sequences(&cfg(2)).unwrap();
        let s1 = choose_m_nu(&specs[0]).unwrap();
        assert_eq!(s1.m_nu, Some(3));
        assert_eq!(lebesgue_constant(3), q("3/2"));
        let s2 = choose_m_nu(&specs[1]).unwrap();
        assert_eq!(s2.m_nu, Some(5));
        assert_eq!(lebesgue_constant(5), q("7/4"));
    }

    #[test]
    fn second_block_certificate() {
        let specs: Vec<_> = choose_sequences(&cfg(2))
            .unwrap()
            .iter()
            .map(|s| choose_m_nu(s).unwrap())
            .collect();
        let e = assemble_expansion(&specs).unwrap();
        let r = divergence_bound(&e, &specs, 2, Some(4)).unwrap();
        let expected = q("7/16") - (Rational::pow2(-7) - Rational::pow2(-12));
        assert_eq!(r.gap_lower, expected);
        assert!(r.gap_lower >= q("1/8"));
        assert_eq!(r.m_prev, 4);
        assert!(r.passed && r.all_ok());
        let grid = r.grid.unwrap();
        assert!(grid.sound && grid.consistent);
        assert_eq!(grid.remainder, Rational::zero());

        assert!(divergence_bound(&e, &specs, 1, None).is_err());
        assert!(divergence_bound(&e, &specs, 2, Some(3)).is_err());
    }

    #[test]
    fn verify_needs_two_blocks() {
        let err = verify_theorem(&cfg(1)).unwrap_err();
        assert!(err.to_string().contains("need V >= 2"));
    }

    #[test]
    fn verify_three_blocks() {
        let report = verify_theorem(&cfg(3)).unwrap();
        assert!(report.all_passed);
        assert_eq!(report.records.len(), 2);
        assert!(report.records.iter().all(|r| r.mode == CheckMode::Grid));
        assert_eq!(report.records[1].m_nu, 43);
        assert_eq!(report.records[1].lebesgue, q("89/32"));
    }
}
