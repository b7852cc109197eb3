//! Rigorous interval arithmetic over exact rational endpoints.
//!
//! All numerical statements in this crate that involve real embeddings
//! (Gram matrices of the trace form, regulator reports, unit enumeration
//! bounds) are proved through enclosures: every operation returns an
//! interval guaranteed to contain the exact real value. Endpoints are
//! `BigRational`; the only operations that round are `sqrt` and `ln`,
//! which round *outward* to a caller-chosen number of dyadic bits, so
//! enclosures never silently lose validity. Arithmetic (+, -, *, /) is
//! exact. When a computation needs more precision the caller re-runs it
//! with a larger `prec`; nothing here ever guesses.
//!
//! `CInterval` is a rectangle in the complex plane (independent real and
//! imaginary enclosures), sufficient for enclosing the complex embeddings
//! of a cubic field and the absolute values that enter regulators.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

/// Decimal rendering of a rational, truncated toward zero after `digits`
/// fractional digits. For reports and diagnostics only, never part of a
/// proof path.
pub fn to_decimal(x: &BigRational, digits: u32) -> String {
    let neg = x.is_negative();
    let a = x.abs();
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (a.numer() * &scale).div_floor(a.denom());
    let (int_part, frac_part) = scaled.div_rem(&scale);
    let frac = format!("{:0>width$}", frac_part.to_string(), width = digits as usize);
    format!("{}{}.{}", if neg { "-" } else { "" }, int_part, frac)
}

/// Closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

fn rat_int(v: i64) -> BigRational {
    BigRational::from(BigInt::from(v))
}

/// Floor of a rational scaled by 2^bits (i.e. floor(x * 2^bits)).
fn scaled_floor(x: &BigRational, bits: u32) -> BigInt {
    let num = x.numer() << bits;
    num.div_floor(x.denom())
}

/// Ceiling of a rational scaled by 2^bits.
fn scaled_ceil(x: &BigRational, bits: u32) -> BigInt {
    let num = x.numer() << bits;
    num.div_ceil(x.denom())
}

fn from_scaled(m: BigInt, bits: u32) -> BigRational {
    BigRational::new(m, BigInt::one() << bits)
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "inverted interval");
        Interval { lo, hi }
    }

    pub fn point(v: BigRational) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    pub fn from_int(v: i64) -> Self {
        Self::point(rat_int(v))
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        Self::point(BigRational::from(v.clone()))
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        self.lo <= *v && *v <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// `Some(sign)` if the sign of every point in the interval is determined.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / rat_int(2)
    }

    pub fn add(&self, o: &Self) -> Self {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn neg(&self) -> Self {
        Interval { lo: -self.hi.clone(), hi: -self.lo.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let cands = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        Interval { lo, hi }
    }

    pub fn square(&self) -> Self {
        let s = self.mul(self);
        if self.contains_zero() {
            Interval { lo: BigRational::zero(), hi: s.hi }
        } else {
            s
        }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        if s.is_negative() {
            Interval { lo: &self.hi * s, hi: &self.lo * s }
        } else {
            Interval { lo: &self.lo * s, hi: &self.hi * s }
        }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.contains_zero() {
            return Err(Error::Inconclusive(
                "interval reciprocal: enclosure contains zero".into(),
            ));
        }
        Ok(Interval { lo: self.hi.recip(), hi: self.lo.recip() })
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.recip()?))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Interval::from_int(1);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Outward rounding to the dyadic grid with `bits` fractional bits.
    /// Keeps denominators bounded across long computations.
    pub fn round_out(&self, bits: u32) -> Self {
        Interval {
            lo: from_scaled(scaled_floor(&self.lo, bits), bits),
            hi: from_scaled(scaled_ceil(&self.hi, bits), bits),
        }
    }

    /// Enclosure of the square root; requires a nonnegative interval.
    pub fn sqrt(&self, bits: u32) -> Result<Self> {
        if self.lo.is_negative() {
            return Err(Error::Inconclusive(
                "interval sqrt of possibly negative value".into(),
            ));
        }
        // lower: floor(sqrt(floor(lo * 4^bits))) / 2^bits
        let lo_scaled = scaled_floor(&self.lo, 2 * bits);
        let lo_root = lo_scaled.sqrt();
        // upper: smallest s with s^2 >= ceil(hi * 4^bits)
        let hi_scaled = scaled_ceil(&self.hi, 2 * bits);
        let mut hi_root = hi_scaled.sqrt();
        if &hi_root * &hi_root < hi_scaled {
            hi_root += 1;
        }
        Ok(Interval {
            lo: from_scaled(lo_root, bits),
            hi: from_scaled(hi_root, bits),
        })
    }

    /// Enclosure of the natural logarithm; requires a strictly positive
    /// interval. Uses `ln x = 2 atanh((x-1)/(x+1))` after range reduction
    /// by powers of two, with an explicit geometric tail bound, so the
    /// result is a proved enclosure.
    pub fn ln(&self, bits: u32) -> Result<Self> {
        if !self.lo.is_positive() {
            return Err(Error::Inconclusive(
                "interval ln of non-positive value".into(),
            ));
        }
        let lo = ln_point_enclosure(&self.lo, bits);
        let hi = ln_point_enclosure(&self.hi, bits);
        Ok(Interval { lo: lo.lo, hi: hi.hi }.round_out(bits))
    }

    /// Hull of two intervals.
    pub fn hull(&self, o: &Self) -> Self {
        Interval {
            lo: if self.lo < o.lo { self.lo.clone() } else { o.lo.clone() },
            hi: if self.hi > o.hi { self.hi.clone() } else { o.hi.clone() },
        }
    }

    /// Enclosure of |x|.
    pub fn abs(&self) -> Self {
        if !self.lo.is_negative() {
            return self.clone();
        }
        if !self.hi.is_positive() {
            return self.neg();
        }
        let m = self.abs_bound();
        Interval { lo: BigRational::zero(), hi: m }
    }

    /// Max |endpoint| as a rational.
    pub fn abs_bound(&self) -> BigRational {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }
}

/// Enclosure of ln(x) for a single positive rational x.
fn ln_point_enclosure(x: &BigRational, bits: u32) -> Interval {
    // Range-reduce: x = m * 2^k with m in [3/4, 3/2).
    let mut m = x.clone();
    let mut k: i64 = 0;
    let three_half = BigRational::new(BigInt::from(3), BigInt::from(2));
    let three_quarter = BigRational::new(BigInt::from(3), BigInt::from(4));
    while m >= three_half {
        m /= rat_int(2);
        k += 1;
    }
    while m < three_quarter {
        m *= rat_int(2);
        k -= 1;
    }
    // ln m via atanh series: t = (m-1)/(m+1), |t| <= 1/5.
    let t = (&m - BigRational::one()) / (&m + BigRational::one());
    let ln_m = atanh_enclosure(&t, bits).scale(&rat_int(2));
    if k == 0 {
        return ln_m;
    }
    // ln 2 = 2 atanh(1/3).
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    let ln2 = atanh_enclosure(&third, bits).scale(&rat_int(2));
    ln_m.add(&ln2.scale(&rat_int(k)))
}

/// Proved enclosure of atanh(t) for |t| < 1/2: partial sum plus a
/// geometric bound on the dropped tail.
fn atanh_enclosure(t: &BigRational, bits: u32) -> Interval {
    assert!(t.abs() < BigRational::new(BigInt::one(), BigInt::from(2)));
    let t2 = t * t;
    let mut term = t.clone(); // t^(2i+1)
    let mut sum = BigRational::zero();
    let mut i: u32 = 0;
    // |t| <= 1/2 means each term shrinks by at least 4x; run until the
    // term magnitude is below 2^-(bits+4).
    let eps = BigRational::new(BigInt::one(), BigInt::one() << (bits + 4));
    loop {
        sum += &term / rat_int((2 * i + 1) as i64);
        term *= &t2;
        i += 1;
        if term.abs() < eps {
            break;
        }
        // Truncate intermediate size to keep denominators in check.
        if i % 8 == 0 {
            // (sum is exact; only the *next* terms matter for the tail)
        }
        assert!(i < 10_000, "atanh series failed to converge");
    }
    // Tail: sum_{j>=i} |t|^(2j+1)/(2j+1) <= |t|^(2i+1) / (1 - t^2).
    let tail = term.abs() / (BigRational::one() - &t2);
    Interval { lo: &sum - &tail, hi: &sum + &tail }
}

/// Axis-aligned rectangle enclosing a complex number.
#[derive(Debug, Clone, PartialEq)]
pub struct CInterval {
    pub re: Interval,
    pub im: Interval,
}

impl CInterval {
    pub fn new(re: Interval, im: Interval) -> Self {
        CInterval { re, im }
    }

    pub fn real(re: Interval) -> Self {
        CInterval { re, im: Interval::from_int(0) }
    }

    pub fn add(&self, o: &Self) -> Self {
        CInterval { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        CInterval { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn neg(&self) -> Self {
        CInterval { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn conj(&self) -> Self {
        CInterval { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        CInterval {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    /// |z|^2 enclosure (always nonnegative).
    pub fn abs_sq(&self) -> Interval {
        self.re.square().add(&self.im.square())
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        CInterval { re: self.re.scale(s), im: self.im.scale(s) }
    }

    pub fn round_out(&self, bits: u32) -> Self {
        CInterval { re: self.re.round_out(bits), im: self.im.round_out(bits) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn arithmetic_encloses_points() {
        // Deterministic sampling: for rational points x in X, y in Y the
        // exact results must lie inside the interval results.
        let xs = [rat(-7, 3), rat(1, 2), rat(0, 1), rat(9, 4)];
        let ys = [rat(-1, 5), rat(3, 1), rat(13, 7)];
        for x in &xs {
            for y in &ys {
                let ix = Interval::new(x - rat(1, 11), x + rat(1, 13));
                let iy = Interval::new(y - rat(1, 17), y + rat(1, 19));
                assert!(ix.add(&iy).contains(&(x + y)));
                assert!(ix.sub(&iy).contains(&(x - y)));
                assert!(ix.mul(&iy).contains(&(x * y)));
                assert!(ix.square().contains(&(x * x)));
                assert!(!ix.square().lo.is_negative());
                if !iy.contains_zero() {
                    assert!(ix.div(&iy).unwrap().contains(&(x / y)));
                }
            }
        }
        let z = Interval::new(rat(-1, 2), rat(1, 3));
        assert!(z.recip().is_err());
    }

    #[test]
    fn sqrt_encloses_and_is_tight() {
        let two = Interval::from_int(2);
        let s = two.sqrt(64).unwrap();
        // 1.41421356237309504880...
        let lo = rat(141421356237309504, 100000000000000000);
        let hi = rat(141421356237309505, 100000000000000000);
        assert!(s.lo <= hi && s.hi >= lo);
        assert!(s.contains(&rat(0, 1)) == false);
        assert!(s.width() < rat(1, 1 << 60));
        // Perfect squares round-trip.
        for v in [1i64, 4, 9, 49, 10000] {
            let r = Interval::from_int(v).sqrt(32).unwrap();
            let exact = Interval::from_int(v).sqrt(32).unwrap();
            let root = rat((v as f64).sqrt() as i64, 1);
            assert!(r.contains(&root));
            assert!(exact.width() <= rat(1, 1 << 30));
        }
        // Containment: sqrt(r^2) contains r for assorted rationals.
        for r in [rat(3, 7), rat(22, 9), rat(1, 1000), rat(997, 3)] {
            let sq = Interval::point(&r * &r);
            assert!(sq.sqrt(48).unwrap().contains(&r));
        }
        assert!(Interval::from_int(-1).sqrt(16).is_err());
    }

    #[test]
    fn ln_reference_values() {
        // ln 2 = 0.69314718055994530941...
        let l2 = Interval::from_int(2).ln(64).unwrap();
        let lo = rat(693147180559945309, 1_000_000_000_000_000_000);
        let hi = rat(693147180559945310, 1_000_000_000_000_000_000);
        assert!(l2.lo <= hi && l2.hi >= lo, "{l2:?}");
        assert!(l2.width() < rat(1, 1 << 58));
        // ln 1 = 0.
        let l1 = Interval::from_int(1).ln(64).unwrap();
        assert!(l1.contains(&rat(0, 1)));
        assert!(l1.width() < rat(1, 1 << 58));
        // ln 10 = 2.30258509299404568401...
        let l10 = Interval::from_int(10).ln(64).unwrap();
        let lo = rat(2302585092994045684, 1_000_000_000_000_000_000);
        let hi = rat(2302585092994045685, 1_000_000_000_000_000_000);
        assert!(l10.lo <= hi && l10.hi >= lo, "{l10:?}");
        // ln(1/2) = -ln 2.
        let lhalf = Interval::point(rat(1, 2)).ln(64).unwrap();
        assert!(lhalf.add(&l2).contains(&rat(0, 1)));
        // Additivity: ln(6) in ln(2) + ln(3).
        let l3 = Interval::from_int(3).ln(64).unwrap();
        let l6 = Interval::from_int(6).ln(64).unwrap();
        let sum = l2.add(&l3);
        assert!(sum.lo <= l6.hi && l6.lo <= sum.hi);
        assert!(Interval::from_int(0).ln(16).is_err());
    }

    #[test]
    fn complex_rectangles() {
        // (1+2i)(3-i) = 5 + 5i
        let a = CInterval::new(Interval::from_int(1), Interval::from_int(2));
        let b = CInterval::new(Interval::from_int(3), Interval::from_int(-1));
        let p = a.mul(&b);
        assert!(p.re.contains(&rat(5, 1)));
        assert!(p.im.contains(&rat(5, 1)));
        // |1+2i|^2 = 5
        assert!(a.abs_sq().contains(&rat(5, 1)));
        // Sample containment with fattened rectangles.
        let za = CInterval::new(
            Interval::new(rat(2, 3) - rat(1, 64), rat(2, 3) + rat(1, 64)),
            Interval::new(rat(-5, 7) - rat(1, 64), rat(-5, 7) + rat(1, 64)),
        );
        let zb = CInterval::new(
            Interval::new(rat(-1, 2) - rat(1, 64), rat(-1, 2) + rat(1, 64)),
            Interval::new(rat(4, 9) - rat(1, 64), rat(4, 9) + rat(1, 64)),
        );
        // exact product of midpoints: (2/3 - 5i/7)(-1/2 + 4i/9)
        let re = rat(2, 3) * rat(-1, 2) - rat(-5, 7) * rat(4, 9);
        let im = rat(2, 3) * rat(4, 9) + rat(-5, 7) * rat(-1, 2);
        let prod = za.mul(&zb);
        assert!(prod.re.contains(&re));
        assert!(prod.im.contains(&im));
        let sq = za.abs_sq();
        assert!(sq.contains(&(rat(2, 3) * rat(2, 3) + rat(5, 7) * rat(5, 7))));
    }

    #[test]
    fn rounding_is_outward() {
        let x = Interval::new(rat(10, 3), rat(11, 3));
        let r = x.round_out(8);
        assert!(r.lo <= x.lo && x.hi <= r.hi);
        assert!(r.width() - x.width() <= rat(2, 256));
        // Denominators after rounding divide 2^8.
        assert!((BigInt::from(256) % r.lo.denom()).is_zero());
    }
}
