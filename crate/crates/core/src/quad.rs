//! The imaginary quadratic field F = Q(sqrt(d)) and its ring of integers.
//!
//! For squarefree d = 1 (mod 4) the ring of integers is Z[w] with
//! w = (1 + sqrt(d))/2, and the field discriminant equals d itself.
//! Elements are stored as exact pairs x + y*sqrt(d) with rational x, y.
//! The integrality test, the conjugation x + y*sqrt(d) -> x - y*sqrt(d)
//! (the nontrivial automorphism of F, and the restriction to F of complex
//! conjugation on the sextic compositum), norms, traces, and rigorous
//! complex embeddings all live here.

use crate::error::{Error, Result};
use crate::interval::{CInterval, Interval};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// x + y*sqrt(d) with exact rational coordinates. The containing field is
/// passed to each operation rather than stored per element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QElt {
    pub x: BigRational,
    pub y: BigRational,
}

impl QElt {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        QElt { x, y }
    }

    pub fn from_int(v: i64) -> Self {
        QElt { x: BigRational::from(BigInt::from(v)), y: BigRational::zero() }
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        QElt { x: BigRational::from(v.clone()), y: BigRational::zero() }
    }

    pub fn from_rational(x: BigRational) -> Self {
        QElt { x, y: BigRational::zero() }
    }

    /// sqrt(d) itself.
    pub fn sqrt_d() -> Self {
        QElt { x: BigRational::zero(), y: BigRational::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    /// Galois conjugate x - y*sqrt(d).
    pub fn conj(&self) -> Self {
        QElt { x: self.x.clone(), y: -self.y.clone() }
    }

    pub fn neg(&self) -> Self {
        QElt { x: -self.x.clone(), y: -self.y.clone() }
    }

    pub fn add(&self, o: &Self) -> Self {
        QElt { x: &self.x + &o.x, y: &self.y + &o.y }
    }

    pub fn sub(&self, o: &Self) -> Self {
        QElt { x: &self.x - &o.x, y: &self.y - &o.y }
    }

    /// Membership in Z[w], w = (1+sqrt(d))/2: requires 2y and x - y to be
    /// rational integers (equivalently x = (a + b/2), y = b/2 with a, b in Z).
    pub fn is_integral(&self) -> bool {
        let two_y = &self.y * BigRational::from(BigInt::from(2));
        let x_minus_y = &self.x - &self.y;
        two_y.is_integer() && x_minus_y.is_integer()
    }

    /// Coordinates (a, b) with self = a + b*w, if integral.
    pub fn omega_coords(&self) -> Option<(BigInt, BigInt)> {
        if !self.is_integral() {
            return None;
        }
        let b = (&self.y * BigRational::from(BigInt::from(2))).to_integer();
        let a = (&self.x - &self.y).to_integer();
        Some((a, b))
    }

    pub fn from_omega_coords(a: &BigInt, b: &BigInt) -> Self {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        QElt {
            x: BigRational::from(a.clone()) + &half * BigRational::from(b.clone()),
            y: &half * BigRational::from(b.clone()),
        }
    }
}

/// F = Q(sqrt(d)) for squarefree negative d = 1 (mod 4).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadField {
    pub d: BigInt,
}

impl QuadField {
    /// Validates the congruence and sign conditions. Squarefreeness is the
    /// caller's obligation (checked where d is produced, since it requires
    /// a factorisation).
    pub fn new(d: &BigInt) -> Result<Self> {
        if !d.is_negative() {
            return Err(Error::Parameter(format!("d = {d} must be negative")));
        }
        if d.mod_floor(&BigInt::from(4)) != BigInt::one() {
            return Err(Error::Parameter(format!("d = {d} must be 1 mod 4")));
        }
        Ok(QuadField { d: d.clone() })
    }

    /// Field discriminant (= d for d = 1 mod 4).
    pub fn discriminant(&self) -> BigInt {
        self.d.clone()
    }

    pub fn mul(&self, a: &QElt, b: &QElt) -> QElt {
        let d = BigRational::from(self.d.clone());
        QElt {
            x: &a.x * &b.x + &d * &a.y * &b.y,
            y: &a.x * &b.y + &a.y * &b.x,
        }
    }

    /// Norm to Q: x^2 - d y^2 (positive definite for d < 0).
    pub fn norm(&self, a: &QElt) -> BigRational {
        let d = BigRational::from(self.d.clone());
        &a.x * &a.x - &d * &a.y * &a.y
    }

    /// Trace to Q: 2x.
    pub fn trace(&self, a: &QElt) -> BigRational {
        &a.x * BigRational::from(BigInt::from(2))
    }

    pub fn inv(&self, a: &QElt) -> Result<QElt> {
        let n = self.norm(a);
        if n.is_zero() {
            return Err(Error::Parameter("division by zero in F".into()));
        }
        let c = a.conj();
        Ok(QElt { x: &c.x / &n, y: &c.y / &n })
    }

    pub fn div(&self, a: &QElt, b: &QElt) -> Result<QElt> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &QElt, mut e: u64) -> QElt {
        let mut acc = QElt::from_int(1);
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Rigorous complex embedding sending sqrt(d) to i*sqrt(|d|) (upper
    /// half-plane choice).
    pub fn embed(&self, a: &QElt, prec: u32) -> CInterval {
        let abs_d = Interval::from_bigint(&(-&self.d));
        let root = abs_d.sqrt(prec).expect("|d| >= 0");
        CInterval {
            re: Interval::point(a.x.clone()),
            im: root.scale(&a.y),
        }
    }

    /// Divisibility by a rational integer inside Z[w].
    pub fn divides_int(&self, m: &BigInt, a: &QElt) -> bool {
        match a.omega_coords() {
            None => false,
            Some((p, q)) => (p.mod_floor(m)).is_zero() && (q.mod_floor(m)).is_zero(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn omega() -> QElt {
        QElt::new(rat(1, 2), rat(1, 2))
    }

    #[test]
    fn field_validation() {
        assert!(QuadField::new(&BigInt::from(-7)).is_ok());
        assert!(QuadField::new(&BigInt::from(-3)).is_ok());
        assert!(QuadField::new(&BigInt::from(-6095)).is_ok()); // -6095 = 1 mod 4
        assert!(QuadField::new(&BigInt::from(-5)).is_err()); // 3 mod 4
        assert!(QuadField::new(&BigInt::from(7)).is_err()); // positive
    }

    #[test]
    fn omega_satisfies_its_minimal_polynomial() {
        // w^2 - w - (d-1)/4 = 0
        for d in [-7i64, -3, -6095, -4914 / 2 - 1] {
            let d = BigInt::from(d);
            if d.mod_floor(&BigInt::from(4)) != BigInt::one() {
                continue;
            }
            let f = QuadField::new(&d).unwrap();
            let w = omega();
            let w2 = f.mul(&w, &w);
            let rhs = w.add(&QElt::from_rational(BigRational::from((&d - 1) / 4)));
            assert_eq!(w2, rhs);
        }
    }

    #[test]
    fn norm_trace_and_integrality() {
        let f = QuadField::new(&BigInt::from(-7)).unwrap();
        let w = omega();
        // N(w) = (1 + 7)/4 = 2, Tr(w) = 1.
        assert_eq!(f.norm(&w), rat(2, 1));
        assert_eq!(f.trace(&w), rat(1, 1));
        assert!(w.is_integral());
        assert!(QElt::sqrt_d().is_integral());
        assert!(QElt::from_int(5).is_integral());
        assert!(!QElt::new(rat(1, 2), rat(0, 1)).is_integral());
        assert!(!QElt::new(rat(1, 3), rat(1, 3)).is_integral());
        // (1 + 3 sqrt(d))/2 integral (1 = 3 mod 2).
        assert!(QElt::new(rat(1, 2), rat(3, 2)).is_integral());
        // omega coordinate round trip.
        let z = QElt::from_omega_coords(&BigInt::from(-4), &BigInt::from(9));
        let (a, b) = z.omega_coords().unwrap();
        assert_eq!((a, b), (BigInt::from(-4), BigInt::from(9)));
        assert!(f.divides_int(&BigInt::from(3), &QElt::from_omega_coords(&BigInt::from(-6), &BigInt::from(9))));
        assert!(!f.divides_int(&BigInt::from(3), &z));
    }

    #[test]
    fn inverse_and_conjugation() {
        let f = QuadField::new(&BigInt::from(-7)).unwrap();
        let samples = [
            QElt::new(rat(3, 2), rat(5, 2)),
            QElt::new(rat(-1, 1), rat(2, 3)),
            omega(),
            QElt::sqrt_d(),
        ];
        for a in &samples {
            let inv = f.inv(a).unwrap();
            assert_eq!(f.mul(a, &inv), QElt::from_int(1));
            for b in &samples {
                // conj is multiplicative.
                assert_eq!(f.mul(a, b).conj(), f.mul(&a.conj(), &b.conj()));
                // norm = a * conj(a) is rational and multiplicative.
                let n = f.mul(a, &a.conj());
                assert!(n.is_rational());
                assert_eq!(n.x, f.norm(a));
                assert_eq!(f.norm(&f.mul(a, b)), f.norm(a) * f.norm(b));
            }
        }
    }

    #[test]
    fn embedding_is_consistent_with_norm() {
        let f = QuadField::new(&BigInt::from(-7)).unwrap();
        for a in [
            QElt::new(rat(3, 2), rat(5, 2)),
            QElt::new(rat(-11, 7), rat(1, 9)),
            omega(),
        ] {
            let z = f.embed(&a, 64);
            // |embed(a)|^2 = x^2 + |d| y^2 = N(a) for imaginary quadratic.
            assert!(z.abs_sq().contains(&f.norm(&a)));
            // conj embeds to complex conjugate rectangle.
            let zc = f.embed(&a.conj(), 64);
            assert_eq!(zc.re, z.re);
            assert_eq!(zc.im, z.im.neg());
        }
    }
}
