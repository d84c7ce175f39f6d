//! Step functions on the dyadic cells of `[0, 1)`.
//!
//! A [`DyadicStep`] of level `L` stores one exact value per half-open cell
//! `[t 2^-L, (t+1) 2^-L)`. Binary operations work at the finer of the two
//! levels by index shifting; the coarser operand is never materialized at the
//! finer level.

use std::sync::atomic::{AtomicU32, Ordering};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Default memory guard: grids above this level are refused.
pub const DEFAULT_LEVEL_CAP: u32 = 28;

static LEVEL_CAP: AtomicU32 = AtomicU32::new(DEFAULT_LEVEL_CAP);

/// Current process-wide memory guard.
pub fn level_cap() -> u32 {
    LEVEL_CAP.load(Ordering::Relaxed)
}

/// Replaces the process-wide memory guard and returns the previous value.
pub fn set_level_cap(cap: u32) -> u32 {
    LEVEL_CAP.swap(cap.min(63), Ordering::Relaxed)
}

pub(crate) fn check_level(level: u32) -> Result<()> {
    let cap = level_cap();
    if level > cap {
        Err(Error::LevelCap { level, cap })
    } else {
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DyadicStep {
    level: u32,
    values: Vec<Rational>,
}

impl DyadicStep {
    pub fn new(level: u32, values: Vec<Rational>) -> Result<Self> {
        check_level(level)?;
        if values.len() as u64 != 1u64 << level {
            return Err(Error::CellCount {
                level,
                got: values.len(),
            });
        }
        Ok(DyadicStep { level, values })
    }

    pub fn from_fn(level: u32, mut f: impl FnMut(u64) -> Rational) -> Result<Self> {
        check_level(level)?;
        let values = (0..1u64 << level).map(&mut f).collect();
        Ok(DyadicStep { level, values })
    }

    pub fn constant(value: Rational) -> Self {
        DyadicStep {
            level: 0,
            values: vec![value],
        }
    }

    pub fn zero(level: u32) -> Result<Self> {
        Self::from_fn(level, |_| Rational::zero())
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }

    /// Value on cell `cell` of an arbitrary level `at_level >= self.level`.
    pub fn value_at(&self, at_level: u32, cell: u64) -> &Rational {
        debug_assert!(at_level >= self.level);
        &self.values[(cell >> (at_level - self.level)) as usize]
    }

    pub fn refine(&self, target_level: u32) -> Result<Self> {
        if target_level < self.level {
            return Err(Error::CannotCoarsen {
                from: self.level,
                to: target_level,
            });
        }
        Self::from_fn(target_level, |t| self.value_at(target_level, t).clone())
    }

    /// `sum_i c_i * f_i` at the finest input level.
    pub fn linear_combine(terms: &[(Rational, &DyadicStep)]) -> Result<Self> {
        let level = terms
            .iter()
            .map(|(_, f)| f.level)
            .max()
            .ok_or(Error::EmptyCombination)?;
        Self::from_fn(level, |t| {
            let mut acc = Rational::zero();
            for (c, f) in terms {
                let v = f.value_at(level, t);
                if !v.is_zero() && !c.is_zero() {
                    acc += c * v;
                }
            }
            acc
        })
    }

    pub fn pointwise_product(&self, other: &DyadicStep) -> Result<Self> {
        let level = self.level.max(other.level);
        Self::from_fn(level, |t| {
            self.value_at(level, t) * other.value_at(level, t)
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        DyadicStep {
            level: self.level,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// `int_0^1 |f|`.
    pub fn l1_norm(&self) -> Rational {
        let total: Rational = self.values.iter().map(Rational::abs).sum();
        total * Rational::pow2(-(self.level as i64))
    }

    /// `int_0^1 f`.
    pub fn integral(&self) -> Rational {
        let total: Rational = self.values.iter().sum();
        total * Rational::pow2(-(self.level as i64))
    }

    pub fn to_float_samples(&self) -> Vec<f64> {
        self.values.iter().map(Rational::to_f64).collect()
    }
}

impl DyadicStep {
    fn zip_cells(
        &self,
        rhs: &DyadicStep,
        f: impl Fn(&Rational, &Rational) -> Rational,
    ) -> DyadicStep {
        let level = self.level.max(rhs.level);
        let values = (0..1u64 << level)
            .map(|t| f(self.value_at(level, t), rhs.value_at(level, t)))
            .collect();
        DyadicStep { level, values }
    }
}

impl std::ops::Add for &DyadicStep {
    type Output = DyadicStep;

    fn add(self, rhs: &DyadicStep) -> DyadicStep {
        self.zip_cells(rhs, |a, b| a + b)
    }
}

impl std::ops::Sub for &DyadicStep {
    type Output = DyadicStep;

    fn sub(self, rhs: &DyadicStep) -> DyadicStep {
        self.zip_cells(rhs, |a, b| a - b)
    }
}
