//! Closed-form spanning-tree counts and the structure predictor for the
//! sandpile groups of coned family trees.
//!
//! Everything here is pure integer arithmetic: Fibonacci numbers (extended to
//! negative index), the auxiliary `b` sequence parameterized by the left leaf
//! count, the closed form `t_closed` for cones over bi-coconut trees, its
//! generating-function expansions, the coconut specializations, and
//! `predict_group`, which names the invariant factors without ever touching a
//! matrix.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::graph::FamilyParams;
use crate::sandpile::AbelianGroup;
use crate::{Error, Result};

/// Fibonacci number with F_1 = F_2 = 1, extended to negative index by
/// F_(−m) = (−1)^(m+1) F_m.
pub fn fib(n: i64) -> BigInt {
    if n < 0 {
        let m = n.unsigned_abs();
        let f = fib_nonneg(m);
        if m % 2 == 0 {
            -f
        } else {
            f
        }
    } else {
        fib_nonneg(n as u64)
    }
}

fn fib_nonneg(n: u64) -> BigInt {
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    for _ in 0..n {
        let next = &a + &b;
        a = b;
        b = next;
    }
    a
}

/// Auxiliary sequence b_n(s1), defined for n ≥ −2 by the seeds
/// b_(−2) = 2^s1 and b_(−1) = 2^(s1−1)(s1+2) (which is 1 when s1 = 0) and the
/// Fibonacci-style recurrence b_n = b_(n−1) + b_(n−2).
pub fn b(s1: u32, n: i64) -> Result<BigInt> {
    if n < -2 {
        return Err(Error::InvalidParameter(format!(
            "b-sequence index {n} is below -2"
        )));
    }
    let mut prev = BigInt::from(2).pow(s1);
    let mut cur = if s1 == 0 {
        BigInt::one()
    } else {
        BigInt::from(2).pow(s1 - 1) * BigInt::from(s1 + 2)
    };
    if n == -2 {
        return Ok(prev);
    }
    for _ in -1..n {
        let next = &prev + &cur;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Spanning-tree count of the cone over the bi-coconut tree with the given
/// parameters: 2^(s2−1) (2 b_(2p−3) + s2 b_(2p−4)). Requires p, s1, s2 ≥ 1.
pub fn t_closed(params: FamilyParams) -> Result<BigInt> {
    let FamilyParams { p, s1, s2 } = params;
    if p < 1 || s1 < 1 || s2 < 1 {
        return Err(Error::InvalidParameter(
            "closed form requires p >= 1, s1 >= 1, s2 >= 1".into(),
        ));
    }
    let p = p as i64;
    let sum = BigInt::from(2) * b(s1, 2 * p - 3)? + BigInt::from(s2) * b(s1, 2 * p - 4)?;
    Ok(BigInt::from(2).pow(s2 - 1) * sum)
}

/// The odd-carrying quotient a = t / 2^(s1+s2−2); the division is always
/// exact for valid parameters, and a failure is reported loudly rather than
/// rounded.
pub fn a_value(params: FamilyParams) -> Result<BigInt> {
    let t = t_closed(params)?;
    let pow2 = BigInt::from(2).pow(params.s1 + params.s2 - 2);
    let (q, r) = t.div_rem(&pow2);
    if !r.is_zero() {
        return Err(Error::InexactDivision(format!(
            "{t} is not divisible by {pow2}"
        )));
    }
    Ok(q)
}

/// Power-series coefficients of the rational generating function whose k-th
/// coefficient equals t_closed at p = k+1: numerator prefactor 2^(s1+s2−2),
/// denominator 1 − 3x + x².
pub fn gf_coefficients(s1: u32, s2: u32, terms: usize) -> Result<Vec<BigInt>> {
    if s1 < 1 || s2 < 1 {
        return Err(Error::InvalidParameter(
            "generating function requires s1 >= 1 and s2 >= 1".into(),
        ));
    }
    let pre = BigInt::from(2).pow(s1 + s2 - 2);
    let s_sum = BigInt::from(s1) + BigInt::from(s2);
    let n0 = &pre * (BigInt::from(4) + BigInt::from(2) * &s_sum);
    let n1 = &pre * (BigInt::from(s1) * BigInt::from(s2) - BigInt::from(2) * &s_sum);
    let mut out = Vec::with_capacity(terms);
    if terms == 0 {
        return Ok(out);
    }
    out.push(n0.clone());
    if terms == 1 {
        return Ok(out);
    }
    out.push(BigInt::from(3) * &n0 + n1);
    for k in 2..terms {
        let next = BigInt::from(3) * &out[k - 1] - &out[k - 2];
        out.push(next);
    }
    Ok(out)
}

/// Power-series coefficients of the rational generating function of the
/// b-sequence: the k-th coefficient equals b_(k−2)(s1), with denominator
/// 1 − x − x².
pub fn b_gf_coefficients(s1: u32, terms: usize) -> Vec<BigInt> {
    let m0 = BigInt::from(2).pow(s1);
    let m1 = if s1 == 0 {
        BigInt::zero()
    } else {
        BigInt::from(s1) * BigInt::from(2).pow(s1 - 1)
    };
    let mut out = Vec::with_capacity(terms);
    if terms == 0 {
        return out;
    }
    out.push(m0.clone());
    if terms == 1 {
        return out;
    }
    out.push(&m0 + m1);
    for k in 2..terms {
        let next = &out[k - 1] + &out[k - 2];
        out.push(next);
    }
    out
}

/// Spanning-tree count of the cone over the coconut tree CT(p, s):
/// 2^(s−1) (2 F_(2p+1) + (s−2) F_(2p−1)).
pub fn coconut_tau(p: u32, s: u32) -> Result<BigInt> {
    if p < 1 || s < 1 {
        return Err(Error::InvalidParameter(
            "coconut closed form requires p >= 1 and s >= 1".into(),
        ));
    }
    let p = p as i64;
    let sum = BigInt::from(2) * fib(2 * p + 1) + BigInt::from(s as i64 - 2) * fib(2 * p - 1);
    Ok(BigInt::from(2).pow(s - 1) * sum)
}

/// Spanning-tree count of the cone over CT(p, s) with the apex edge doubled
/// at the far path endpoint π_1: 2^(s−1) (2 F_(2p+2) + (s−2) F_(2p)).
pub fn coconut_plus_tau(p: u32, s: u32) -> Result<BigInt> {
    if p < 1 || s < 1 {
        return Err(Error::InvalidParameter(
            "coconut closed form requires p >= 1 and s >= 1".into(),
        ));
    }
    let p = p as i64;
    let sum = BigInt::from(2) * fib(2 * p + 2) + BigInt::from(s as i64 - 2) * fib(2 * p);
    Ok(BigInt::from(2).pow(s - 1) * sum)
}

/// Which structural case of the group predictor applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseTag {
    /// p ≡ 1 (mod 3): two-rank s1+s2−2 with cyclic part a.
    PMod3Is1,
    /// p ≢ 1 (mod 3) and at least one leaf count odd: two-rank s1+s2−3 with
    /// cyclic part 2a.
    OddS,
    /// p ≢ 1 (mod 3) and both leaf counts even: two-rank s1+s2−4, an extra
    /// Z_4 factor, cyclic part a.
    EvenSEvenS,
    /// p ≢ 1 (mod 3) and s1 = s2 = 1: the group is cyclic of order a.
    MergedBoundary,
}

impl CaseTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseTag::PMod3Is1 => "PMod3Is1",
            CaseTag::OddS => "OddS",
            CaseTag::EvenSEvenS => "EvenSEvenS",
            CaseTag::MergedBoundary => "MergedBoundary",
        }
    }
}

/// Predicted decomposition (Z_2)^two_rank × (Z_4 if four_factor) × Z_cyclic
/// of the sandpile group of a coned bi-coconut tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPrediction {
    pub case_tag: CaseTag,
    pub two_rank: u32,
    pub four_factor: bool,
    pub cyclic_part: BigInt,
}

impl GroupPrediction {
    pub fn order(&self) -> BigInt {
        let mut order = BigInt::from(2).pow(self.two_rank) * &self.cyclic_part;
        if self.four_factor {
            order *= BigInt::from(4);
        }
        order
    }

    /// Regroups the predicted factors into invariant-factor form: the two-power
    /// factors sort ascending and the odd part of the cyclic component joins
    /// the largest of them.
    pub fn to_group(&self) -> Result<AbelianGroup> {
        let mut exponents: Vec<u32> = vec![1; self.two_rank as usize];
        if self.four_factor {
            exponents.push(2);
        }
        let (v2, odd) = two_adic_split(&self.cyclic_part);
        exponents.push(v2);
        exponents.sort_unstable();
        let mut factors: Vec<BigInt> =
            exponents.iter().map(|&e| BigInt::from(2).pow(e)).collect();
        if let Some(last) = factors.last_mut() {
            *last *= &odd;
        }
        AbelianGroup::from_factors(factors)
    }
}

fn two_adic_split(value: &BigInt) -> (u32, BigInt) {
    let mut odd = value.abs();
    let mut v2 = 0u32;
    if odd.is_zero() {
        return (0, odd);
    }
    while odd.is_even() {
        odd /= BigInt::from(2);
        v2 += 1;
    }
    (v2, odd)
}

/// Predicts the sandpile group of the cone over the bi-coconut tree with the
/// given parameters, selecting among the four structural cases.
pub fn predict_group(params: FamilyParams) -> Result<GroupPrediction> {
    let FamilyParams { p, s1, s2 } = params;
    if p < 1 || s1 < 1 || s2 < 1 {
        return Err(Error::InvalidParameter(
            "group prediction requires p >= 1, s1 >= 1, s2 >= 1".into(),
        ));
    }
    let a = a_value(params)?;
    let prediction = if p % 3 == 1 {
        GroupPrediction {
            case_tag: CaseTag::PMod3Is1,
            two_rank: s1 + s2 - 2,
            four_factor: false,
            cyclic_part: a,
        }
    } else if s1 == 1 && s2 == 1 {
        GroupPrediction {
            case_tag: CaseTag::MergedBoundary,
            two_rank: 0,
            four_factor: false,
            cyclic_part: a,
        }
    } else if s1 % 2 == 1 || s2 % 2 == 1 {
        GroupPrediction {
            case_tag: CaseTag::OddS,
            two_rank: s1 + s2 - 3,
            four_factor: false,
            cyclic_part: BigInt::from(2) * a,
        }
    } else {
        GroupPrediction {
            case_tag: CaseTag::EvenSEvenS,
            two_rank: s1 + s2 - 4,
            four_factor: true,
            cyclic_part: a,
        }
    };
    Ok(prediction)
}
