//! Finite Walsh expansions and their greedy (thresholding) approximants.
//!
//! The `m`-th greedy approximant keeps the `m` terms of largest coefficient
//! magnitude. Coefficients of the form `1/nu^2 + 2^-n` are kept symbolic so
//! that comparisons stay exact even when `2^-n` is far too small to
//! materialize; grid synthesis drops such tails and reports the dropped mass
//! as a certified remainder.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::dyadic::{check_level, DyadicStep};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::walsh::{bit_reverse, synthesize, WalshIndex, MAX_SIGN_LEVEL};

/// Tails `2^-n` with `n` above this many bits are dropped from grid synthesis.
pub const DEFAULT_PRECISION_BITS: u64 = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Coefficient {
    /// `1/nu^2 + 2^-n`
    Symbolic {
        nu: u64,
        n: u64,
    },
    Explicit(Rational),
}

/// A coefficient evaluated to a rational, plus an upper bound on what was dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffValue {
    pub value: Rational,
    pub remainder: Rational,
}

impl Coefficient {
    pub fn symbolic(nu: u64, n: u64) -> Result<Self> {
        if nu == 0 {
            return Err(Error::InvalidArgument(
                "symbolic coefficient needs nu >= 1".into(),
            ));
        }
        Ok(Coefficient::Symbolic { nu, n })
    }

    fn magnitude(&self) -> Coefficient {
        match self {
            Coefficient::Explicit(v) if v.is_negative() => Coefficient::Explicit(v.abs()),
            other => other.clone(),
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Symbolic { nu, n } => write!(f, "sym:{nu},{n}"),
            Coefficient::Explicit(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for Coefficient {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("sym:") {
            let (nu, n) = rest
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("expected sym:nu,n, got {s:?}")))?;
            let nu = nu
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad nu in {s:?}")))?;
            let n = n
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad n in {s:?}")))?;
            Coefficient::symbolic(nu, n).map_err(|e| Error::Parse(e.to_string()))
        } else {
            Ok(Coefficient::Explicit(s.parse()?))
        }
    }
}

pub fn coeff_value(c: &Coefficient, precision_bits: u64) -> CoeffValue {
    match c {
        Coefficient::Explicit(v) => CoeffValue {
            value: v.clone(),
            remainder: Rational::zero(),
        },
        Coefficient::Symbolic { nu, n } => {
            let base = Rational::inverse_square(*nu);
            let tail = Rational::pow2(-(*n as i64));
            if *n > precision_bits {
                CoeffValue {
                    value: base,
                    remainder: tail,
                }
            } else {
                CoeffValue {
                    value: base + tail,
                    remainder: Rational::zero(),
                }
            }
        }
    }
}

/// `1/a^2 - 1/b^2 > 2^-n` for `a < b`, decided exactly.
fn margin_exceeds(a: u64, b: u64, n: u64) -> bool {
    let gap = Rational::inverse_square(a) - Rational::inverse_square(b);
    gap.cmp_pow2_neg(n) == Ordering::Greater
}

fn cmp_symbolic_explicit(nu: u64, n: u64, e: &Rational) -> Ordering {
    let d = e - &Rational::inverse_square(nu);
    if !d.is_positive() {
        return Ordering::Greater;
    }
    d.cmp_pow2_neg(n).reverse()
}

/// Exact order of coefficient values.
pub fn coeff_compare(a: &Coefficient, b: &Coefficient) -> Result<Ordering> {
    use Coefficient::*;
    match (a, b) {
        (Explicit(x), Explicit(y)) => Ok(x.cmp(y)),
        (Symbolic { nu, n }, Explicit(e)) => Ok(cmp_symbolic_explicit(*nu, *n, e)),
        (Explicit(e), Symbolic { nu, n }) => Ok(cmp_symbolic_explicit(*nu, *n, e).reverse()),
        (Symbolic { nu: nu1, n: n1 }, Symbolic { nu: nu2, n: n2 }) => {
            match nu1.cmp(nu2) {
                Ordering::Equal => Ok(n2.cmp(n1)),
                // The smaller nu wins whenever 1/nu1^2 - 1/nu2^2 beats the other tail.
                Ordering::Less if margin_exceeds(*nu1, *nu2, *n2) => Ok(Ordering::Greater),
                Ordering::Greater if margin_exceeds(*nu2, *nu1, *n1) => Ok(Ordering::Less),
                _ => Err(Error::NeedsExactEvaluation(format!("{a} vs {b}"))),
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub index: WalshIndex,
    pub coeff: Coefficient,
}

impl Term {
    pub fn new(index: u64, coeff: Coefficient) -> Self {
        Term {
            index: WalshIndex(index),
            coeff,
        }
    }
}

/// Finite Walsh expansion with strictly ascending indices.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Expansion {
    terms: Vec<Term>,
}

impl Expansion {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        for pair in terms.windows(2) {
            if pair[1].index <= pair[0].index {
                return Err(Error::UnorderedExpansion(pair[1].index.0));
            }
        }
        Ok(Expansion { terms })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest grid level on which every term is constant.
    pub fn min_level(&self) -> u32 {
        self.terms.last().map_or(0, |t| t.index.min_level())
    }

    /// Parses the `index<TAB>coeff` text format; `#` starts a comment line.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let at = |e: Error| Error::Parse(format!("line {}: {e}", lineno + 1));
            let (index, coeff) = line
                .split_once('\t')
                .ok_or_else(|| at(Error::Parse("expected index<TAB>coeff".into())))?;
            let index: u64 = index
                .trim()
                .parse()
                .map_err(|_| at(Error::Parse(format!("bad index {index:?}"))))?;
            terms.push(Term::new(index, coeff.parse().map_err(at)?));
        }
        Expansion::new(terms)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# index\tcoeff\n");
        for t in &self.terms {
            out.push_str(&format!("{}\t{}\n", t.index.0, t.coeff));
        }
        out
    }
}

/// Term positions by decreasing `|coefficient|`; equal magnitudes keep ascending index.
pub fn greedy_order(e: &Expansion) -> Result<Vec<usize>> {
    let mags: Vec<Coefficient> = e.terms.iter().map(|t| t.coeff.magnitude()).collect();
    let mut order: Vec<usize> = (0..e.len()).collect();
    let mut failure = None;
    // Stable sort over ascending positions, hence ascending index on ties.
    order.sort_by(|&i, &j| match coeff_compare(&mags[j], &mags[i]) {
        Ok(o) => o,
        Err(err) => {
            failure.get_or_insert(err);
            Ordering::Equal
        }
    });
    match failure {
        Some(err) => Err(err),
        None => Ok(order),
    }
}

/// A grid function together with the L¹ mass dropped while building it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Approximant {
    pub step: DyadicStep,
    pub remainder: Rational,
}

/// Exact value within `value ± remainder`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormBound {
    pub value: Rational,
    pub remainder: Rational,
}

impl NormBound {
    pub fn lower(&self) -> Rational {
        &self.value - &self.remainder
    }

    pub fn upper(&self) -> Rational {
        &self.value + &self.remainder
    }
}

fn check_indices(e: &Expansion, level: u32) -> Result<()> {
    if let Some(t) = e.terms.iter().find(|t| t.index.min_level() > level) {
        return Err(Error::IndexTooLarge {
            index: t.index.0,
            level,
        });
    }
    Ok(())
}

fn synthesize_positions(
    e: &Expansion,
    positions: &[usize],
    level: u32,
    precision_bits: u64,
) -> Result<Approximant> {
    let mut remainder = Rational::zero();
    let mut terms = Vec::with_capacity(positions.len());
    for &p in positions {
        let t = &e.terms[p];
        let v = coeff_value(&t.coeff, precision_bits);
        remainder += v.remainder;
        terms.push((t.index.0, v.value));
    }
    Ok(Approximant {
        step: synthesize(terms, level)?,
        remainder,
    })
}

fn check_count(e: &Expansion, m: usize) -> Result<()> {
    if m > e.len() {
        return Err(Error::InvalidArgument(format!(
            "m = {m} exceeds the {} available terms",
            e.len()
        )));
    }
    Ok(())
}

pub fn greedy_approximant(e: &Expansion, m: usize, level: u32) -> Result<Approximant> {
    greedy_approximant_with(e, m, level, DEFAULT_PRECISION_BITS)
}

pub fn greedy_approximant_with(
    e: &Expansion,
    m: usize,
    level: u32,
    precision_bits: u64,
) -> Result<Approximant> {
    check_count(e, m)?;
    check_indices(e, level)?;
    let order = greedy_order(e)?;
    synthesize_positions(e, &order[..m], level, precision_bits)
}

/// `||G_{m2} - G_{m1}||_1`, built from the terms at greedy positions `m1..m2`.
pub fn greedy_gap_norm(e: &Expansion, m1: usize, m2: usize, level: u32) -> Result<NormBound> {
    greedy_gap_norm_with(e, m1, m2, level, DEFAULT_PRECISION_BITS)
}

pub fn greedy_gap_norm_with(
    e: &Expansion,
    m1: usize,
    m2: usize,
    level: u32,
    precision_bits: u64,
) -> Result<NormBound> {
    if m1 > m2 {
        return Err(Error::InvalidArgument(format!("m1 = {m1} > m2 = {m2}")));
    }
    check_count(e, m2)?;
    let order = greedy_order(e)?;
    let gap = synthesize_positions(e, &order[m1..m2], level, precision_bits)?;
    Ok(NormBound {
        value: gap.step.l1_norm(),
        remainder: gap.remainder,
    })
}

/// Largest `||G_m||_1 / ||f||_1` over all greedy prefixes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuasiGreedyScan {
    pub ratio: Rational,
    /// Prefix length attaining `ratio` (smallest such).
    pub argmax: usize,
    pub f_norm: Rational,
    /// Dropped symbolic tail mass; every norm above is exact up to this.
    pub remainder: Rational,
}

/// Scans every greedy prefix. Works on an integer grid scaled by the common
/// denominator of all coefficients, so the ratios need no per-cell division.
pub fn quasi_greedy_scan(e: &Expansion, level: u32) -> Result<QuasiGreedyScan> {
    check_indices(e, level)?;
    if level > MAX_SIGN_LEVEL {
        return Err(Error::InvalidArgument(format!("level {level} too large")));
    }
    check_level(level)?;
    let order = greedy_order(e)?;
    let mut remainder = Rational::zero();
    let values: Vec<Rational> = e
        .terms
        .iter()
        .map(|t| {
            let v = coeff_value(&t.coeff, DEFAULT_PRECISION_BITS);
            remainder += v.remainder;
            v.value
        })
        .collect();
    let common = values
        .iter()
        .fold(BigInt::from(1), |acc, v| acc.lcm(v.denom()));
    let scaled: Vec<BigInt> = values
        .iter()
        .map(|v| v.numer() * (&common / v.denom()))
        .collect();

    let cells = 1usize << level;
    let mut grid = vec![BigInt::zero(); cells];
    let mut mass = Vec::with_capacity(order.len() + 1);
    mass.push(BigInt::zero());
    for &p in &order {
        let n = e.terms[p].index.0;
        let c = &scaled[p];
        for (t, cell) in grid.iter_mut().enumerate() {
            if (n & bit_reverse(t as u64, level)).count_ones() & 1 == 1 {
                *cell -= c;
            } else {
                *cell += c;
            }
        }
        mass.push(grid.iter().map(|v| v.abs()).sum::<BigInt>());
    }
    let total = mass.last().cloned().unwrap_or_default();
    if total.is_zero() {
        return Err(Error::InvalidArgument("||f||_1 = 0".into()));
    }
    let (argmax, best) =
        mass.iter().enumerate().fold(
            (0, &mass[0]),
            |acc, cur| if cur.1 > acc.1 { cur } else { acc },
        );
    let scale = Rational::from_integer(common) * Rational::pow2(level as i64);
    Ok(QuasiGreedyScan {
        ratio: Rational::new(best.clone(), total.clone())?,
        argmax,
        f_norm: Rational::from_integer(total) / &scale,
        remainder,
    })
}
