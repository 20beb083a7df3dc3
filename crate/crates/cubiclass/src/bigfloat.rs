//! Minimal arbitrary-precision binary floating point on top of `BigInt`.
//!
//! Only what the field computations need: ±, ×, ÷, sqrt and cbrt by Newton
//! iteration, comparisons, and exact rounding back to integers or to
//! rationals with a prescribed denominator. Every accepting decision in the
//! crate is re-verified in exact integer arithmetic, so this type only has to
//! be accurate enough to propose candidates; precision is a parameter and the
//! callers escalate it when rounding is ambiguous.

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, Zero};

/// A binary float `mant · 2^exp` with mantissa kept to a working precision.
#[derive(Debug, Clone)]
pub struct Mpf {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

impl Mpf {
    pub fn zero(prec: u32) -> Self {
        Mpf { mant: BigInt::zero(), exp: 0, prec }
    }

    pub fn from_bigint(n: &BigInt, prec: u32) -> Self {
        let mut x = Mpf { mant: n.clone(), exp: 0, prec };
        x.normalize();
        x
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Self::from_bigint(&BigInt::from(n), prec)
    }

    /// num / den to the working precision.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        assert!(!den.is_zero());
        let a = Self::from_bigint(num, prec);
        let b = Self::from_bigint(den, prec);
        a.div(&b)
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let bits = self.mant.bits();
        if bits > self.prec as u64 {
            let shift = bits - self.prec as u64;
            self.mant = &self.mant >> shift;
            self.exp += shift as i64;
        }
    }

    pub fn neg(&self) -> Self {
        Mpf { mant: -&self.mant, exp: self.exp, prec: self.prec }
    }

    pub fn abs(&self) -> Self {
        Mpf { mant: self.mant.abs(), exp: self.exp, prec: self.prec }
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        if self.is_zero() {
            let mut r = other.clone();
            r.prec = prec;
            return r;
        }
        if other.is_zero() {
            let mut r = self.clone();
            r.prec = prec;
            return r;
        }
        // Align exponents; drop addend bits far below the other's precision.
        let (lo, hi) = if self.exp <= other.exp { (self, other) } else { (other, self) };
        let shift = hi.exp - lo.exp;
        let guard = prec as i64 + 8;
        let mut r = if shift > lo.mant.bits() as i64 + guard {
            hi.clone()
        } else {
            Mpf { mant: (&hi.mant << shift as u64) + &lo.mant, exp: lo.exp, prec }
        };
        r.prec = prec;
        r.normalize();
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        let mut r = Mpf {
            mant: &self.mant * &other.mant,
            exp: self.exp + other.exp,
            prec,
        };
        r.normalize();
        r
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        let mut r = Mpf { mant: &self.mant * k, exp: self.exp, prec: self.prec };
        r.normalize();
        r
    }

    pub fn div(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "division by zero Mpf");
        let prec = self.prec.max(other.prec);
        if self.is_zero() {
            return Mpf::zero(prec);
        }
        // Scale numerator so the quotient carries `prec` significant bits.
        let scale = prec as i64 + 8 + other.mant.bits() as i64 - self.mant.bits() as i64;
        let scale = scale.max(0) as u64;
        let num = &self.mant << scale;
        let q = num / &other.mant;
        let mut r = Mpf {
            mant: q,
            exp: self.exp - other.exp - scale as i64,
            prec,
        };
        r.normalize();
        r
    }

    /// Compare as real numbers.
    pub fn cmp_val(&self, other: &Self) -> std::cmp::Ordering {
        self.sub(other).sign_ord()
    }

    fn sign_ord(&self) -> std::cmp::Ordering {
        match self.mant.sign() {
            Sign::Minus => std::cmp::Ordering::Less,
            Sign::NoSign => std::cmp::Ordering::Equal,
            Sign::Plus => std::cmp::Ordering::Greater,
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let (top, shift) = if bits > 62 {
            let shift = bits - 62;
            ((&self.mant >> shift).to_string().parse::<i64>().unwrap(), shift as i64)
        } else {
            (self.mant.to_string().parse::<i64>().unwrap(), 0)
        };
        top as f64 * 2f64.powi((self.exp + shift) as i32)
    }

    /// Nearest integer (ties toward even are irrelevant here; callers verify).
    pub fn round_to_bigint(&self) -> BigInt {
        if self.mant.is_zero() {
            return BigInt::zero();
        }
        if self.exp >= 0 {
            return &self.mant << self.exp as u64;
        }
        let shift = (-self.exp) as u64;
        let half = BigInt::from(1) << (shift - 1);
        let adjusted = if self.mant.is_negative() { &self.mant - half } else { &self.mant + half };
        adjusted >> shift
    }

    /// Nearest rational with the given denominator: returns the numerator of
    /// round(self · den) so that the candidate is `num / den`.
    pub fn round_with_denominator(&self, den: &BigInt) -> BigInt {
        let scaled = self.mul(&Mpf::from_bigint(den, self.prec));
        scaled.round_to_bigint()
    }

    /// Distance from the nearest integer, as an f64 in [0, 0.5]. Used to
    /// detect ambiguous roundings that require precision escalation.
    pub fn round_residual(&self) -> f64 {
        let r = self.round_to_bigint();
        let diff = self.sub(&Mpf::from_bigint(&r, self.prec));
        diff.to_f64().abs()
    }

    /// Square root by Newton iteration; panics on negative input.
    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "sqrt of negative Mpf");
        if self.is_zero() {
            return self.clone();
        }
        let prec = self.prec;
        let mut x = {
            let guess = self.to_f64().sqrt();
            from_f64(guess, prec)
        };
        // Newton: x ← (x + a/x)/2, quadratic convergence from the f64 seed.
        let iters = 2 + (prec as f64 / 40.0).ceil() as u32;
        for _ in 0..iters {
            let q = self.div(&x);
            x = x.add(&q).mul(&from_f64(0.5, prec));
        }
        x
    }

    /// Real cube root (sign-preserving) by Newton iteration.
    pub fn cbrt(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let prec = self.prec;
        let neg = self.is_negative();
        let a = self.abs();
        let mut x = from_f64(a.to_f64().cbrt(), prec);
        if x.is_zero() {
            // Out of f64 range; seed from the exponent instead.
            x = Mpf { mant: BigInt::from(1), exp: (a.exp + a.mant.bits() as i64) / 3, prec };
        }
        let third = Mpf::from_ratio(&BigInt::from(1), &BigInt::from(3), prec);
        let iters = 3 + (prec as f64 / 30.0).ceil() as u32;
        for _ in 0..iters {
            // x ← (2x + a/x²)/3
            let x2 = x.mul(&x);
            let q = a.div(&x2);
            x = x.mul_i64(2).add(&q).mul(&third);
        }
        if neg { x.neg() } else { x }
    }

    /// Natural logarithm via atanh series with argument reduction; accurate to
    /// roughly the working precision. Inputs must be positive.
    pub fn ln(&self) -> Self {
        assert!(!self.is_negative() && !self.is_zero(), "ln of nonpositive Mpf");
        let prec = self.prec;
        // Write self = m · 2^k with m ∈ [1, 2).
        let bits = self.mant.bits() as i64;
        let k = self.exp + bits - 1;
        let m = Mpf { mant: self.mant.clone(), exp: -(bits - 1), prec };
        // ln m = 2·atanh((m−1)/(m+1)); |arg| ≤ 1/3 so the series converges
        // one bit per term at worst ~ log2(3) per term.
        let one = Mpf::from_i64(1, prec);
        let z = m.sub(&one).div(&m.add(&one));
        let z2 = z.mul(&z);
        let mut term = z.clone();
        let mut sum = Mpf::zero(prec);
        let mut n = 1i64;
        loop {
            let contrib = term.div(&Mpf::from_i64(n, prec));
            sum = sum.add(&contrib);
            if contrib.is_zero()
                || contrib.abs().to_f64() < sum.abs().to_f64() * 2f64.powi(-(prec as i32))
                || n > 4 * prec as i64
            {
                break;
            }
            term = term.mul(&z2);
            n += 2;
        }
        let ln_m = sum.mul_i64(2);
        let ln2 = ln2(prec);
        ln_m.add(&ln2.mul_i64(k))
    }
}

/// ln 2 to the given precision, via atanh(1/3): ln 2 = 2·atanh(1/3).
fn ln2(prec: u32) -> Mpf {
    let third = Mpf::from_ratio(&BigInt::from(1), &BigInt::from(3), prec);
    let z2 = third.mul(&third);
    let mut term = third.clone();
    let mut sum = Mpf::zero(prec);
    let mut n = 1i64;
    while n <= 4 * prec as i64 {
        let contrib = term.div(&Mpf::from_i64(n, prec));
        if contrib.is_zero() {
            break;
        }
        sum = sum.add(&contrib);
        term = term.mul(&z2);
        n += 2;
    }
    sum.mul_i64(2)
}

/// Build an Mpf from an f64 (exact: f64 is dyadic).
pub fn from_f64(x: f64, prec: u32) -> Mpf {
    if x == 0.0 || !x.is_finite() {
        return Mpf::zero(prec);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
    let exp_raw = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, exp) = if exp_raw == 0 {
        (frac, -1074i64)
    } else {
        (frac | (1 << 52), exp_raw - 1075)
    };
    let mut r = Mpf { mant: BigInt::from(sign) * BigInt::from(mant), exp, prec };
    r.normalize();
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_and_cbrt_roundtrip() {
        let prec = 256;
        let x = Mpf::from_i64(229, prec);
        let s = x.sqrt();
        let back = s.mul(&s);
        assert!((back.to_f64() - 229.0).abs() < 1e-40 * 229.0 + 1e-60);
        let c = Mpf::from_i64(1_000_003, prec).cbrt();
        let back = c.mul(&c).mul(&c);
        assert!((back.to_f64() - 1_000_003.0).abs() < 1e-30);
    }

    #[test]
    fn rounding_with_denominator() {
        let prec = 128;
        // 22/7 rounded with denominator 7 recovers 22.
        let x = Mpf::from_ratio(&BigInt::from(22), &BigInt::from(7), prec);
        assert_eq!(x.round_with_denominator(&BigInt::from(7)), BigInt::from(22));
    }

    #[test]
    fn ln_matches_f64() {
        let prec = 192;
        for v in [2i64, 3, 10, 229, 1_000_000] {
            let l = Mpf::from_i64(v, prec).ln();
            assert!((l.to_f64() - (v as f64).ln()).abs() < 1e-12, "v={v}");
        }
        // Large argument outside casual f64 ranges.
        let big = BigInt::from(10).pow(60);
        let l = Mpf::from_bigint(&big, prec).ln();
        assert!((l.to_f64() - 60.0 * 10f64.ln()).abs() < 1e-9);
    }
}
