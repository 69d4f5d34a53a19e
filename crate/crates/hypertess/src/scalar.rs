//! Dual-mode arithmetic kernel.
//!
//! Every geometric predicate in this crate reduces to sign determinations.
//! In exact mode those run over `num::BigRational` with no rounding; in
//! float mode they run over `f64` under an explicit epsilon policy chosen
//! at each call site. A computation is tagged with its mode through the
//! scalar type parameter.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar used throughout the exact kernel.
pub type Rat = BigRational;

/// Outcome of a sign determination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Neg => Sign::Pos,
            Sign::Zero => Sign::Zero,
            Sign::Pos => Sign::Neg,
        }
    }
}

/// Scalar abstraction shared by the exact and floating kernels.
///
/// `sign_within` is the only place the two modes differ semantically: the
/// exact kernel ignores the epsilon and reports the true sign, while the
/// float kernel snaps `|v| <= eps * max(1, |scale|)` to zero.
pub trait GeomScalar:
    Sized
    + Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + Zero
    + One
    + Send
    + Sync
    + 'static
{
    const EXACT: bool;

    fn from_int(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// Round a float to a scalar; exact mode produces a nearby rational.
    fn from_f64_approx(x: f64) -> Self;
    /// Raw sign, no tolerance.
    fn sign(&self) -> Sign;
    /// Sign with the mode's comparison policy relative to `scale`.
    fn sign_within(&self, eps: f64, scale: &Self) -> Sign;
    /// Exact square root if one exists in the scalar's field.
    fn exact_sqrt(&self) -> Option<Self>;

    fn is_positive(&self) -> bool {
        self.sign() == Sign::Pos
    }
    fn is_negative(&self) -> bool {
        self.sign() == Sign::Neg
    }
    fn abs_val(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl GeomScalar for f64 {
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64_approx(x: f64) -> Self {
        x
    }

    fn sign(&self) -> Sign {
        if *self > 0.0 {
            Sign::Pos
        } else if *self < 0.0 {
            Sign::Neg
        } else {
            Sign::Zero
        }
    }

    fn sign_within(&self, eps: f64, scale: &Self) -> Sign {
        let bound = eps * scale.abs().max(1.0);
        if *self > bound {
            Sign::Pos
        } else if *self < -bound {
            Sign::Neg
        } else {
            Sign::Zero
        }
    }

    fn exact_sqrt(&self) -> Option<Self> {
        if *self < 0.0 {
            None
        } else {
            Some(self.sqrt())
        }
    }
}

impl GeomScalar for Rat {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        Rat::from_integer(BigInt::from(n))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rat::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64_approx(x: f64) -> Self {
        rat_from_f64(x, 1u64 << 32)
    }

    fn sign(&self) -> Sign {
        if Signed::is_positive(self) {
            Sign::Pos
        } else if Signed::is_negative(self) {
            Sign::Neg
        } else {
            Sign::Zero
        }
    }

    fn sign_within(&self, _eps: f64, _scale: &Self) -> Sign {
        self.sign()
    }

    fn exact_sqrt(&self) -> Option<Self> {
        if Signed::is_negative(self) {
            return None;
        }
        let ns = self.numer().sqrt();
        let ds = self.denom().sqrt();
        if &ns * &ns == *self.numer() && &ds * &ds == *self.denom() {
            Some(Rat::new(ns, ds))
        } else {
            None
        }
    }
}

/// Shorthand rational constructor.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Best rational approximation to `x` with denominator at most `max_den`,
/// by continued fractions.
pub fn rat_from_f64(x: f64, max_den: u64) -> Rat {
    assert!(x.is_finite(), "cannot rationalize a non-finite float");
    let neg = x < 0.0;
    let mut x = x.abs();
    // convergents p/q of the continued fraction expansion
    let (mut p0, mut q0) = (BigInt::from(0), BigInt::from(1));
    let (mut p1, mut q1) = (BigInt::from(1), BigInt::from(0));
    let max_den = BigInt::from(max_den);
    for _ in 0..64 {
        let a = x.floor();
        let ab = BigInt::from(a as i128);
        let p2 = &ab * &p1 + &p0;
        let q2 = &ab * &q1 + &q0;
        if q2 > max_den {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = x - a;
        if frac < 1e-15 {
            break;
        }
        x = 1.0 / frac;
    }
    let mut r = Rat::new(p1, q1);
    if neg {
        r = -r;
    }
    r
}

/// Parse a scalar from a decimal or `p/q` string.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let num: BigInt = n.trim().parse().map_err(|e| format!("bad numerator {n:?}: {e}"))?;
        let den: BigInt = d.trim().parse().map_err(|e| format!("bad denominator {d:?}: {e}"))?;
        if den.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(Rat::new(num, den))
    } else if let Ok(num) = s.parse::<BigInt>() {
        Ok(Rat::from_integer(num))
    } else {
        // decimal literal
        let f: f64 = s.parse().map_err(|e| format!("bad number {s:?}: {e}"))?;
        if !f.is_finite() {
            return Err(format!("non-finite number {s:?}"));
        }
        Ok(decimal_to_rat(s).unwrap_or_else(|| rat_from_f64(f, 1_000_000_000)))
    }
}

fn decimal_to_rat(s: &str) -> Option<Rat> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = digits.parse().ok()?;
    let shift = frac_part.len() as i32 - exp;
    let base = BigInt::from(10);
    Some(if shift >= 0 {
        Rat::new(num, num::pow::pow(base, shift as usize))
    } else {
        Rat::from_integer(num * num::pow::pow(base, (-shift) as usize))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rat("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rat("-5").unwrap(), rat(-5, 1));
        assert_eq!(parse_rat("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rat("2.5e-1").unwrap(), rat(1, 4));
        assert!(parse_rat("1/0").is_err());
    }

    #[test]
    fn exact_sqrt_detection() {
        assert_eq!(rat(9, 16).exact_sqrt(), Some(rat(3, 4)));
        assert_eq!(rat(2, 1).exact_sqrt(), None);
        assert_eq!(rat(-1, 1).exact_sqrt(), None);
    }

    #[test]
    fn float_sign_policy() {
        let v: f64 = 1e-12;
        assert_eq!(v.sign(), Sign::Pos);
        assert_eq!(v.sign_within(1e-10, &1.0), Sign::Zero);
        assert_eq!(1e-8f64.sign_within(1e-10, &1.0), Sign::Pos);
    }

    #[test]
    fn continued_fraction_rounding() {
        assert_eq!(rat_from_f64(0.5, 1 << 16), rat(1, 2));
        assert_eq!(rat_from_f64(-1.25, 1 << 16), rat(-5, 4));
        let pi = rat_from_f64(std::f64::consts::PI, 1 << 26);
        assert!((GeomScalar::to_f64(&pi) - std::f64::consts::PI).abs() < 1e-9);
    }
}
