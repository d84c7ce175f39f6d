//! Rademacher and Walsh–Paley functions.
//!
//! Cells are numbered left to right, so bit `level-1-k` of a cell index is the
//! `k`-th binary digit of `x` after the point. `r_k(x) = r_0(2^k x)` reads that
//! digit, and `W_n` multiplies the `r_k` selected by the set bits of `n`.

use std::ops::Mul;

use crate::dyadic::{check_level, DyadicStep};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest level at which cell indices fit the bit tricks below.
pub const MAX_SIGN_LEVEL: u32 = 63;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(odd: bool) -> Sign {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn to_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn to_rational(self) -> Rational {
        Rational::from(self.to_i8() as i64)
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_parity(self != rhs)
    }
}

/// Paley index of a Walsh function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WalshIndex(pub u64);

impl WalshIndex {
    /// Exponents `m_s` of the binary expansion `n = sum 2^{m_s}`, largest first.
    pub fn rademacher_factors(self) -> impl Iterator<Item = u32> {
        let n = self.0;
        (0..64u32).rev().filter(move |&m| n >> m & 1 == 1)
    }

    /// Smallest level at which `W_n` is constant on every cell.
    pub fn min_level(self) -> u32 {
        64 - self.0.leading_zeros()
    }
}

impl From<u64> for WalshIndex {
    fn from(n: u64) -> Self {
        WalshIndex(n)
    }
}

/// Reverses the low `level` bits of `cell`.
#[inline]
pub fn bit_reverse(cell: u64, level: u32) -> u64 {
    if level == 0 {
        0
    } else {
        cell.reverse_bits() >> (64 - level)
    }
}

fn check_cell(level: u32, cell: u64) -> Result<()> {
    if level > MAX_SIGN_LEVEL {
        return Err(Error::InvalidArgument(format!(
            "level {level} exceeds {MAX_SIGN_LEVEL}"
        )));
    }
    if cell >> level != 0 {
        return Err(Error::CellOutOfRange { cell, level });
    }
    Ok(())
}

pub fn rademacher_sign(k: u32, level: u32, cell: u64) -> Result<Sign> {
    if k >= level {
        return Err(Error::RademacherTooCoarse { k, level });
    }
    check_cell(level, cell)?;
    Ok(Sign::from_parity(cell >> (level - 1 - k) & 1 == 1))
}

pub fn walsh_sign(n: u64, level: u32, cell: u64) -> Result<Sign> {
    check_cell(level, cell)?;
    if WalshIndex(n).min_level() > level {
        return Err(Error::IndexTooLarge { index: n, level });
    }
    Ok(Sign::from_parity(
        (n & bit_reverse(cell, level)).count_ones() & 1 == 1,
    ))
}

pub fn walsh_step(n: u64, level: u32) -> Result<DyadicStep> {
    if WalshIndex(n).min_level() > level {
        return Err(Error::IndexTooLarge { index: n, level });
    }
    check_cell(level, 0)?;
    check_level(level)?;
    DyadicStep::from_fn(level, |t| {
        let odd = (n & bit_reverse(t, level)).count_ones() & 1 == 1;
        Rational::from(if odd { -1i64 } else { 1 })
    })
}

/// `sum c_n W_n` on a level-`level` grid via an in-place Walsh–Hadamard butterfly.
///
/// Repeated indices accumulate. Costs `level * 2^level` exact additions.
pub fn synthesize<I>(terms: I, level: u32) -> Result<DyadicStep>
where
    I: IntoIterator<Item = (u64, Rational)>,
{
    check_cell(level, 0)?;
    check_level(level)?;
    let size = 1usize << level;
    let mut coeffs = vec![Rational::zero(); size];
    for (n, c) in terms {
        if WalshIndex(n).min_level() > level {
            return Err(Error::IndexTooLarge { index: n, level });
        }
        coeffs[n as usize] += c;
    }
    let mut half = 1;
    while half < size {
        for block in coeffs.chunks_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                if b.is_zero() {
                    *b = a.clone();
                } else {
                    let sum = &*a + &*b;
                    let diff = &*a - &*b;
                    *a = sum;
                    *b = diff;
                }
            }
        }
        half *= 2;
    }
    // The butterfly output is indexed by the bit-reversed cell.
    let values = (0..size as u64)
        .map(|t| std::mem::take(&mut coeffs[bit_reverse(t, level) as usize]))
        .collect();
    DyadicStep::new(level, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signs(n: u64, level: u32) -> Vec<i8> {
        (0..1u64 << level)
            .map(|t| walsh_sign(n, level, t).unwrap().to_i8())
            .collect()
    }

    #[test]
    fn rademacher_values() {
        assert_eq!(rademacher_sign(0, 1, 0).unwrap(), Sign::Plus);
        assert_eq!(rademacher_sign(0, 1, 1).unwrap(), Sign::Minus);
        let r1: Vec<i8> = (0..4)
            .map(|t| rademacher_sign(1, 2, t).unwrap().to_i8())
            .collect();
        assert_eq!(r1, vec![1, -1, 1, -1]);
        assert_eq!(
            rademacher_sign(2, 2, 0).unwrap_err(),
            Error::RademacherTooCoarse { k: 2, level: 2 }
        );
    }

    #[test]
    fn walsh_values() {
        assert_eq!(signs(0, 3), vec![1; 8]);
        assert_eq!(signs(3, 2), vec![1, -1, -1, 1]);
        let lhs = walsh_sign(5, 3, 7).unwrap();
        let rhs = rademacher_sign(2, 3, 7).unwrap() * rademacher_sign(0, 3, 7).unwrap();
        assert_eq!(lhs, rhs);
        assert!(matches!(
            walsh_sign(4, 2, 0),
            Err(Error::IndexTooLarge { index: 4, level: 2 })
        ));
        assert!(matches!(
            walsh_sign(1, 2, 4),
            Err(Error::CellOutOfRange { .. })
        ));
    }

    #[test]
    fn walsh_steps() {
        assert_eq!(
            walsh_step(0, 0).unwrap(),
            DyadicStep::constant(Rational::one())
        );
        assert_eq!(
            walsh_step(1, 1).unwrap().to_float_samples(),
            vec![1.0, -1.0]
        );
        let w7 = walsh_step(7, 3).unwrap();
        let prod = walsh_step(4, 3)
            .unwrap()
            .pointwise_product(&walsh_step(3, 3).unwrap())
            .unwrap();
        assert_eq!(w7, prod);
    }

    #[test]
    fn factors_follow_binary_digits() {
        let f: Vec<u32> = WalshIndex(13).rademacher_factors().collect();
        assert_eq!(f, vec![3, 2, 0]);
        assert_eq!(WalshIndex(0).min_level(), 0);
        assert_eq!(WalshIndex(4).min_level(), 3);
    }

    #[test]
    fn synthesis_matches_direct_sum() {
        let terms = vec![
            (0u64, Rational::from(2i64)),
            (5, "1/3".parse().unwrap()),
            (6, Rational::from(-1i64)),
        ];
        let fast = synthesize(terms.clone(), 3).unwrap();
        let steps: Vec<_> = terms
            .iter()
            .map(|(n, _)| walsh_step(*n, 3).unwrap())
            .collect();
        let direct = DyadicStep::linear_combine(
            &terms
                .iter()
                .zip(&steps)
                .map(|((_, c), s)| (c.clone(), s))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert_eq!(fast, direct);
        assert!(synthesize(vec![(8, Rational::one())], 3).is_err());
    }
}
