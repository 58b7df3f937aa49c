//! Exact rational numbers and their text representations.
//!
//! Every probability, belief and utility in this crate is a [`Rat`]
//! (an arbitrary-precision fraction in lowest terms with a positive
//! denominator). Input files accept either `a/b` fractions or short
//! decimal literals; decimals with at most [`MAX_DECIMAL_DIGITS`]
//! fractional digits parse exactly as `n/10^k`, longer ones are
//! rejected rather than rounded.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar used throughout the solver.
pub type Rat = BigRational;

/// Longest decimal fraction accepted by [`parse_rational`].
pub const MAX_DECIMAL_DIGITS: usize = 12;

/// Shorthand for small constant fractions.
pub fn rat(num: i64, den: i64) -> Rat {
    assert!(den != 0, "zero denominator");
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Whole-number rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn half() -> Rat {
    rat(1, 2)
}

/// True when `r` lies in the closed unit interval.
pub fn in_unit_interval(r: &Rat) -> bool {
    !r.is_negative() && *r <= Rat::one()
}

/// Parse `a/b`, an integer, or a decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty rational literal".to_string());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in `{s}`"))?;
        let den: BigInt = den
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in `{s}`"))?;
        if den.is_zero() {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(Rat::new(num, den));
    }
    let (sign, digits) = match s.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, s),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("bad rational literal `{s}`"));
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(format!("bad rational literal `{s}`"));
    }
    if frac_part.len() > MAX_DECIMAL_DIGITS {
        return Err(format!(
            "decimal literal `{s}` has more than {MAX_DECIMAL_DIGITS} fractional digits"
        ));
    }
    let int_val: BigInt = if int_part.is_empty() {
        BigInt::zero()
    } else {
        int_part.parse().map_err(|_| format!("bad literal `{s}`"))?
    };
    let frac_val: BigInt = if frac_part.is_empty() {
        BigInt::zero()
    } else {
        frac_part.parse().map_err(|_| format!("bad literal `{s}`"))?
    };
    let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
    let num = (int_val * &scale + frac_val) * BigInt::from(sign);
    Ok(Rat::new(num, scale))
}

/// Render in lowest terms as `a/b`, or just `a` for integers.
pub fn format_rational(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Render `r` as a decimal with `sig` significant digits (round half up).
///
/// Display-only: results feed the `*_dec` CSV columns, never arithmetic.
pub fn to_decimal(r: &Rat, sig: usize) -> String {
    assert!(sig > 0);
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let abs = r.abs();
    // Decimal exponent e with abs in [10^e, 10^(e+1)).
    let mut e: i64 = abs.numer().to_string().len() as i64 - abs.denom().to_string().len() as i64;
    let ten = Rat::from_integer(BigInt::from(10));
    while abs >= pow10(e + 1) {
        e += 1;
    }
    while abs < pow10(e) {
        e -= 1;
    }
    // First `sig` digits, rounded half up.
    let shift = sig as i64 - 1 - e;
    let scaled = &abs * pow10(shift) + half();
    let mut q = scaled.floor().to_integer();
    if q >= BigInt::from(10u32).pow(sig as u32) {
        q /= 10;
        e += 1;
    }
    let digits = q.to_string();
    debug_assert_eq!(digits.len(), sig);
    let _ = ten;
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if e >= 0 {
        let int_len = (e + 1) as usize;
        if int_len >= sig {
            out.push_str(&digits);
            out.push_str(&"0".repeat(int_len - sig));
        } else {
            out.push_str(&digits[..int_len]);
            out.push('.');
            out.push_str(&digits[int_len..]);
        }
    } else {
        out.push_str("0.");
        out.push_str(&"0".repeat((-e - 1) as usize));
        out.push_str(&digits);
    }
    out
}

fn pow10(e: i64) -> Rat {
    let base = BigInt::from(10u32);
    if e >= 0 {
        Rat::from_integer(base.pow(e as u32))
    } else {
        Rat::new(BigInt::one(), base.pow((-e) as u32))
    }
}

/// Lossy conversion for log output; the solver never computes with floats.
pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
