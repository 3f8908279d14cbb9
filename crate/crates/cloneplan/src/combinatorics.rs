//! Exact big-integer/rational arithmetic and the binomial closed forms the
//! moment formulas are built from.
//!
//! Everything here is exact: no floats, no modular shortcuts. Decimal output
//! is a rendering concern handled by [`decimal_string`].

use num::bigint::Sign;
use num::{BigInt, BigRational, BigUint, One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Arbitrary-precision signed integer used for all counts.
pub type ExactInteger = BigInt;
/// Arbitrary-precision rational; always in lowest terms with positive denominator.
pub type ExactRational = BigRational;

/// Binomial coefficient under the zero-extension convention:
/// `C(a, b)` for `0 <= b <= a`, and `0` whenever `b < 0`, `b > a`, or `a < 0`.
///
/// The vanishing cases make every closed form total; e.g. `C(c-r, x)` silently
/// drops out of the mean once `x > c-r`.
pub fn binom(a: i64, b: i64) -> BigInt {
    if b < 0 || a < 0 || b > a {
        return BigInt::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigInt::one();
    for i in 0..b {
        // exact at every step: the running product of j consecutive integers
        // is divisible by j!
        acc = acc * BigInt::from(a - i) / BigInt::from(i + 1);
    }
    acc
}

fn check_sum_domain(r: usize, c: usize, x: usize) -> Result<()> {
    if r < 1 || r > c {
        return Err(Error::ParameterDomain(format!(
            "need 1 <= r <= c, got r={r}, c={c}"
        )));
    }
    if x > c {
        return Err(Error::ParameterDomain(format!("need x <= c, got x={x}, c={c}")));
    }
    Ok(())
}

/// `sum_{t=1}^{r-1} t * C(r, t+1) * C(c-r, x-t-1)`, by its closed form
/// `r*C(c-1, x-1) + C(c-r, x) - C(c, x)`.
///
/// This is the per-job expected duplicate mass over all `x`-subsets of servers.
pub fn sum_linear(r: usize, c: usize, x: usize) -> Result<BigInt> {
    check_sum_domain(r, c, x)?;
    let (r, c, x) = (r as i64, c as i64, x as i64);
    Ok(BigInt::from(r) * binom(c - 1, x - 1) + binom(c - r, x) - binom(c, x))
}

/// `sum_{t=1}^{r-1} t^2 * C(r, t+1) * C(c-r, x-t-1)`, by its closed form
/// `r(r-1)*C(c-2, x-2) - r*C(c-1, x-1) - C(c-r, x) + C(c, x)`.
pub fn sum_quadratic(r: usize, c: usize, x: usize) -> Result<BigInt> {
    check_sum_domain(r, c, x)?;
    let (r, c, x) = (r as i64, c as i64, x as i64);
    Ok(BigInt::from(r) * BigInt::from(r - 1) * binom(c - 2, x - 2)
        - BigInt::from(r) * binom(c - 1, x - 1)
        - binom(c - r, x)
        + binom(c, x))
}

/// Rational `a/b` from machine integers. Panics if `b == 0`.
pub fn ratio(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// Rational from a big integer.
pub fn int_ratio(a: BigInt) -> BigRational {
    BigRational::from_integer(a)
}

/// Renders a rational as `"p/q"` in lowest terms, or just `"p"` when integral.
pub fn rational_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `"p/q"`, plain integers, and decimal literals (`"0.25"`) into an
/// exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("cannot parse `{s}` as a rational"));
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let neg = int_part.trim_start().starts_with('-');
        let int_digits = if int_part.is_empty() || int_part == "-" {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|_| bad())?
        };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let frac: BigInt = frac_part.parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let mag = int_digits.abs() * &scale + frac;
        let signed = if neg { -mag } else { mag };
        return Ok(BigRational::new(signed, scale));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Exact decimal rendering of a rational with `sig` significant digits
/// (round half up). Trailing fractional zeros are trimmed.
pub fn decimal_string(q: &BigRational, sig: usize) -> String {
    assert!(sig > 0);
    if q.is_zero() {
        return "0".to_string();
    }
    let neg = q.numer().sign() == Sign::Minus;
    let num = q.numer().magnitude().clone();
    let den = q.denom().magnitude().clone();

    // exponent e: |q| = 0.d1 d2 ... x 10^e with d1 != 0
    let int_part = &num / &den;
    let mut e: i64;
    if int_part.is_zero() {
        let ten = BigUint::from(10u32);
        let mut shifted = &num * &ten;
        e = 0;
        while shifted < den {
            shifted *= &ten;
            e -= 1;
        }
    } else {
        e = int_part.to_string().len() as i64;
    }

    // digits = round(|q| * 10^(sig - e)) has exactly `sig` digits, except when
    // rounding carries over (all nines), which bumps the exponent.
    let shift = sig as i64 - e;
    let (scaled_num, scaled_den) = if shift >= 0 {
        (&num * BigUint::from(10u32).pow(shift as u32), den.clone())
    } else {
        (num.clone(), &den * BigUint::from(10u32).pow((-shift) as u32))
    };
    let mut digits = (&scaled_num * 2u32 + &scaled_den) / (&scaled_den * 2u32);
    let mut digit_str = digits.to_string();
    if digit_str.len() > sig {
        e += 1;
        digits /= 10u32;
        digit_str = digits.to_string();
    }
    debug_assert_eq!(digit_str.len(), sig);

    let body = if e <= 0 {
        let mut s = String::from("0.");
        for _ in 0..(-e) {
            s.push('0');
        }
        s.push_str(&digit_str);
        trim_fraction(s)
    } else if (e as usize) >= sig {
        let mut s = digit_str;
        for _ in 0..(e as usize - sig) {
            s.push('0');
        }
        s
    } else {
        let (int_digits, frac_digits) = digit_str.split_at(e as usize);
        trim_fraction(format!("{int_digits}.{frac_digits}"))
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

fn trim_fraction(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// Lossy conversion for statistics output. Exact values stay rational.
pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
