//! Floating-point helpers for big-integer quantities and locale-free
//! decimal formatting.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::ToPrimitive;

/// Bits kept when reducing a big integer to a mantissa/exponent pair.
const MANTISSA_BITS: u64 = 96;

/// `x ≈ m · 2^e` with `m` finite; exact for `x < 2^96`.
fn split(x: &BigUint) -> (f64, i64) {
    let bits = x.bits();
    if bits <= MANTISSA_BITS {
        return (x.to_f64().unwrap_or(f64::INFINITY), 0);
    }
    let shift = bits - MANTISSA_BITS;
    let top = x >> shift;
    (top.to_f64().unwrap_or(f64::INFINITY), shift as i64)
}

/// `m · 2^e` without intermediate overflow in the power.
pub fn ldexp(m: f64, e: i64) -> f64 {
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    let mut m = m;
    let mut e = e;
    while e > 1000 {
        m *= 2f64.powi(1000);
        e -= 1000;
        if m.is_infinite() {
            return m;
        }
    }
    while e < -1000 {
        m *= 2f64.powi(-1000);
        e += 1000;
        if m == 0.0 {
            return m;
        }
    }
    m * 2f64.powi(e as i32)
}

/// Nearest `f64` to a big unsigned integer (infinite beyond `f64::MAX`).
pub fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// Floating square root of a big integer.
///
/// Integers below 2^1000 are first rounded to the nearest `f64`; larger ones
/// are reduced to a 96-bit mantissa with an even binary exponent.
pub fn big_sqrt(x: &BigUint) -> f64 {
    if x.bits() <= 1000 {
        return big_to_f64(x).sqrt();
    }
    let (m, e) = split(x);
    let (m, e) = if e % 2 == 0 { (m, e) } else { (m * 2.0, e - 1) };
    ldexp(m.sqrt(), e / 2)
}

/// `num / sqrt(den)` for a signed big numerator and a positive big
/// denominator, evaluated without overflowing intermediate quantities.
pub fn ratio_over_sqrt(num: &BigInt, den: &BigUint) -> f64 {
    if num.sign() == Sign::NoSign {
        return 0.0;
    }
    let sign = if num.sign() == Sign::Minus { -1.0 } else { 1.0 };
    let mag = num.magnitude();
    if mag.bits() <= 1000 && den.bits() <= 1000 {
        return sign * big_to_f64(mag) / big_to_f64(den).sqrt();
    }
    let (nm, ne) = split(mag);
    let (dm, de) = split(den);
    let (dm, de) = if de % 2 == 0 { (dm, de) } else { (dm * 2.0, de - 1) };
    sign * ldexp(nm / dm.sqrt(), ne - de / 2)
}

/// Decimal rendering with 17 significant digits, `%.17g` style: fixed
/// notation for decimal exponents in [-5, 17), scientific otherwise, trailing
/// zeros removed. Independent of locale.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x))
    } else {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_formatting() {
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(0.5), "0.5");
        assert_eq!(fmt_g17(-2.0), "-2");
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(1e-7), "9.9999999999999995e-08");
        assert_eq!(fmt_g17(1e20), "1e+20");
        assert_eq!(fmt_g17(123456.0), "123456");
        assert_eq!(fmt_g17(0.0), "0");
    }

    #[test]
    fn g17_round_trips() {
        for x in [std::f64::consts::PI, 2f64.powf(1.75), 1.0 / 3.0, 6.02e23, 2.5e-300] {
            assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn sqrt_of_huge_integers() {
        let x = BigUint::from(1u8) << 3001usize;
        let s = big_sqrt(&x);
        // sqrt(2^3001) = 2^1500.5 overflows f64
        assert!(s.is_infinite());
        let y = BigUint::from(9u8) << 1600usize;
        let t = big_sqrt(&y);
        assert!((t / ldexp(3.0, 800) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ratio_small_and_large_agree() {
        let num = BigInt::from(12345);
        let den = BigUint::from(1u8) << 40usize;
        let direct = 12345.0 / 2f64.powi(20);
        assert!((ratio_over_sqrt(&num, &den) / direct - 1.0).abs() < 1e-15);
        let big_num = BigInt::from(3) << 1200usize;
        let big_den = BigUint::from(1u8) << 2400usize;
        assert!((ratio_over_sqrt(&big_num, &big_den) - 3.0).abs() < 1e-14);
        assert!((ratio_over_sqrt(&-big_num, &big_den) + 3.0).abs() < 1e-14);
    }
}
