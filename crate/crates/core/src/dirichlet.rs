//! Dirichlet–Walsh kernels `D_m = W_0 + ... + W_{m-1}` and their L¹ norms.

use serde::Serialize;

use crate::dyadic::{check_level, DyadicStep};
use crate::error::{Error, Result};
use crate::rational::{log2_ceil_scaled, Rational};
use crate::walsh::MAX_SIGN_LEVEL;

/// Block maximizer of the Lebesgue constant, `2^{block-1} <= m < 2^block`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelNormRecord {
    pub m: u64,
    pub lebesgue: Rational,
    pub block: u32,
}

/// Value of `D_m` on cell `cell` of a level-`level` grid.
///
/// Peels the binary digits of `m` from the top using
/// `D_{2^k + j} = D_{2^k} + W_{2^k} D_j` and `W_{2^k} = r_k`.
fn dirichlet_cell(m: u64, level: u32, cell: u64) -> i128 {
    let mut total: i128 = 0;
    let mut sign: i128 = 1;
    let mut rest = m;
    while rest != 0 {
        let k = 63 - rest.leading_zeros();
        rest -= 1 << k;
        // D_{2^k} = 2^k on [0, 2^-k), else 0
        if cell >> (level - k) == 0 {
            total += sign << k;
        }
        if rest != 0 && cell >> (level - 1 - k) & 1 == 1 {
            sign = -sign;
        }
    }
    total
}

pub fn dirichlet_step(m: u64, level: u32) -> Result<DyadicStep> {
    if level > MAX_SIGN_LEVEL || m > 1u64 << level {
        return Err(Error::InvalidArgument(format!(
            "D_{m} is not constant on level-{level} cells"
        )));
    }
    check_level(level)?;
    DyadicStep::from_fn(level, |t| {
        Rational::from_integer(dirichlet_cell(m, level, t))
    })
}

/// Closed form of `D_{2^j}`: `2^j` on `[0, 2^-j)`, zero elsewhere.
pub fn dirichlet_pow2(j: u32, level: u32) -> Result<DyadicStep> {
    if j > level || level > MAX_SIGN_LEVEL {
        return Err(Error::InvalidArgument(format!(
            "D_2^{j} needs level >= {j}, got {level}"
        )));
    }
    check_level(level)?;
    let height = Rational::pow2(j as i64);
    DyadicStep::from_fn(level, |t| {
        if t >> (level - j) == 0 {
            height.clone()
        } else {
            Rational::zero()
        }
    })
}

/// `2^K * ||D_m||_1` where `K` is the index of the top bit of `m`.
///
/// `L(2^k + j) = 1 - j 2^-k + L(j)`; every term is a multiple of `2^-K`.
fn lebesgue_scaled(m: u64, top: u32) -> u128 {
    let mut acc: u128 = 0;
    let mut rest = m;
    while rest != 0 {
        let k = 63 - rest.leading_zeros();
        rest -= 1 << k;
        acc += ((1u128 << k) - rest as u128) << (top - k);
    }
    acc
}

/// `||D_m||_1`, exactly, in `O(popcount m)` steps.
pub fn lebesgue_constant(m: u64) -> Rational {
    if m == 0 {
        return Rational::zero();
    }
    let top = 63 - m.leading_zeros();
    Rational::from_integer(lebesgue_scaled(m, top)) * Rational::pow2(-(top as i64))
}

/// Exhaustive scan of `2^{k-1} <= m < 2^k` for the largest `||D_m||_1`;
/// ties go to the smallest `m`.
pub fn block_max_search(k: u32) -> Result<KernelNormRecord> {
    if k == 0 || k > 40 {
        return Err(Error::InvalidArgument(format!(
            "block index must lie in 1..=40, got {k}"
        )));
    }
    let top = k - 1;
    let (m, scaled) = (1u64 << top..1u64 << k)
        .map(|m| (m, lebesgue_scaled(m, top)))
        .fold((0, 0), |best, cur| if cur.1 > best.1 { cur } else { best });
    Ok(KernelNormRecord {
        m,
        lebesgue: Rational::from_integer(scaled) * Rational::pow2(-(top as i64)),
        block: k,
    })
}

/// How `||D_m||_1 >= (1/4) log2 m` was established.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum LogBoundWitness {
    /// `4L >= block >= log2 m` because `m < 2^block`.
    BlockIndex { block: u32 },
    /// `m^denom <= 2^numer`, so `log2 m <= numer/denom <= 4L`.
    Bracket { numer: u64, denom: u32 },
}

/// Certifies `lebesgue >= (1/4) log2 m` with integer arithmetic only.
/// `None` means the inequality is false.
pub fn certify_log_bound(m: u64, lebesgue: &Rational) -> Option<LogBoundWitness> {
    assert!(m >= 1);
    let four_l = lebesgue * &Rational::from(4i64);
    let block = 64 - m.leading_zeros();
    if four_l >= Rational::from(block as u64) {
        return Some(LogBoundWitness::BlockIndex { block });
    }
    let mut denom = 1u32;
    while denom <= 1 << 12 {
        let numer = log2_ceil_scaled(m, denom);
        let upper = Rational::new(numer, denom).expect("nonzero");
        if four_l >= upper {
            return Some(LogBoundWitness::Bracket { numer, denom });
        }
        // (numer - 1)/denom < log2 m: past this point no bracket can help.
        if numer > 0 && four_l < Rational::new(numer - 1, denom).expect("nonzero") {
            return None;
        }
        denom *= 2;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn kernels() {
        assert_eq!(
            dirichlet_step(1, 3).unwrap().to_float_samples(),
            vec![1.0; 8]
        );
        assert_eq!(
            dirichlet_step(4, 2).unwrap().to_float_samples(),
            vec![4.0, 0.0, 0.0, 0.0]
        );
        assert_eq!(
            dirichlet_step(3, 2).unwrap().to_float_samples(),
            vec![3.0, 1.0, 1.0, -1.0]
        );
        assert!(dirichlet_step(5, 2).is_err());
        assert_eq!(dirichlet_step(0, 2).unwrap(), DyadicStep::zero(2).unwrap());
    }

    #[test]
    fn closed_form() {
        assert_eq!(dirichlet_pow2(0, 0).unwrap().to_float_samples(), vec![1.0]);
        assert_eq!(
            dirichlet_pow2(2, 2).unwrap().to_float_samples(),
            vec![4.0, 0.0, 0.0, 0.0]
        );
        let mut d8 = vec![0.0; 8];
        d8[0] = 8.0;
        assert_eq!(dirichlet_pow2(3, 3).unwrap().to_float_samples(), d8);
        assert!(dirichlet_pow2(3, 2).is_err());
    }

    #[test]
    fn lebesgue_values() {
        assert_eq!(lebesgue_constant(0), Rational::zero());
        assert_eq!(lebesgue_constant(1), Rational::one());
        assert_eq!(lebesgue_constant(3), q("3/2"));
        assert_eq!(lebesgue_constant(13), q("17/8"));
        assert_eq!(lebesgue_constant(11), q("17/8"));
        assert_eq!(lebesgue_constant(1 << 40), Rational::one());
    }

    #[test]
    fn block_maximizers() {
        let r = block_max_search(1).unwrap();
        assert_eq!((r.m, r.lebesgue), (1, Rational::one()));
        let r = block_max_search(2).unwrap();
        assert_eq!((r.m, r.lebesgue), (3, q("3/2")));
        let r = block_max_search(3).unwrap();
        assert_eq!((r.m, r.lebesgue), (5, q("7/4")));
        let r = block_max_search(4).unwrap();
        assert_eq!((r.m, r.lebesgue, r.block), (11, q("17/8"), 4));
        assert!(block_max_search(0).is_err());
    }

    #[test]
    fn log_bound_certificates() {
        // 4 * 17/8 = 8.5 >= 4
        assert_eq!(
            certify_log_bound(11, &q("17/8")),
            Some(LogBoundWitness::BlockIndex { block: 4 })
        );
        // log2 3 ~ 1.585 <= 4 * (2/5) = 1.6 but 1.6 < 2
        assert!(matches!(
            certify_log_bound(3, &q("2/5")),
            Some(LogBoundWitness::Bracket { .. })
        ));
        assert_eq!(certify_log_bound(3, &q("1/4")), None);
    }
}
