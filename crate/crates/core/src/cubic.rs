//! The cubic field K = Q(pi) for a monic irreducible integer cubic.
//!
//! Elements are exact rational coordinate vectors in the power basis
//! (1, pi, pi^2). Multiplication reduces by the defining polynomial;
//! norms and traces come from the regular representation (3x3 rational
//! multiplication matrices), so every invariant is computed exactly.
//!
//! The module also provides certified real/complex root enclosures of the
//! defining polynomial by exact-sign bisection: an enclosure `[lo, hi]`
//! always satisfies f(lo) f(hi) < 0 with dyadic endpoints, which is a
//! proof that a root lies inside. For negative discriminant (our main
//! case: one real embedding, one conjugate complex pair) the complex root
//! rectangle is derived from the real enclosure through the exact
//! quadratic cofactor, keeping every embedding rigorous.

use crate::arith::Poly;
use crate::error::{Error, Result};
use crate::interval::{CInterval, Interval};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Element of K in the power basis: c[0] + c[1] pi + c[2] pi^2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KElt {
    pub c: [BigRational; 3],
}

impl KElt {
    pub fn new(c0: BigRational, c1: BigRational, c2: BigRational) -> Self {
        KElt { c: [c0, c1, c2] }
    }

    pub fn from_int(v: i64) -> Self {
        KElt::new(BigRational::from(BigInt::from(v)), BigRational::zero(), BigRational::zero())
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        KElt::new(BigRational::from(v.clone()), BigRational::zero(), BigRational::zero())
    }

    pub fn from_rational(x: BigRational) -> Self {
        KElt::new(x, BigRational::zero(), BigRational::zero())
    }

    pub fn pi() -> Self {
        KElt::new(BigRational::zero(), BigRational::one(), BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.c[1].is_zero() && self.c[2].is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        KElt::new(&self.c[0] + &o.c[0], &self.c[1] + &o.c[1], &self.c[2] + &o.c[2])
    }

    pub fn sub(&self, o: &Self) -> Self {
        KElt::new(&self.c[0] - &o.c[0], &self.c[1] - &o.c[1], &self.c[2] - &o.c[2])
    }

    pub fn neg(&self) -> Self {
        KElt::new(-self.c[0].clone(), -self.c[1].clone(), -self.c[2].clone())
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        KElt::new(&self.c[0] * s, &self.c[1] * s, &self.c[2] * s)
    }

    /// LCM of coordinate denominators.
    pub fn denominator(&self) -> BigInt {
        use num_integer::Integer;
        self.c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }
}

/// K = Q(pi), pi a root of the given monic irreducible cubic.
#[derive(Debug, Clone)]
pub struct CubicField {
    /// Monic integer cubic x^3 + a2 x^2 + a1 x + a0 (ascending storage).
    pub f: Poly<BigInt>,
    disc: BigInt,
}

impl CubicField {
    /// Accepts a monic squarefree irreducible integer cubic.
    /// Irreducibility over Q is decided exactly: a monic integer cubic is
    /// reducible iff it has an integer root, and all integer roots are
    /// found from certified real-root enclosures of width < 1.
    pub fn new(f: Poly<BigInt>) -> Result<Self> {
        if f.degree() != Some(3) {
            return Err(Error::Parameter("defining polynomial must be cubic".into()));
        }
        if !f.is_monic() {
            return Err(Error::Parameter("defining polynomial must be monic".into()));
        }
        let disc = f.discriminant();
        if disc.is_zero() {
            return Err(Error::Parameter("defining polynomial must be squarefree".into()));
        }
        let field = CubicField { f, disc };
        if !field.integer_roots().is_empty() {
            return Err(Error::Parameter(
                "defining polynomial is reducible over Q".into(),
            ));
        }
        Ok(field)
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.disc
    }

    pub fn poly_disc_sign_negative(&self) -> bool {
        self.disc.is_negative()
    }

    fn coeff_rat(&self, i: usize) -> BigRational {
        BigRational::from(self.f.coeff(i))
    }

    /// Multiply two elements in the power basis, reducing by f.
    pub fn mul(&self, a: &KElt, b: &KElt) -> KElt {
        // Raw product has degree <= 4.
        let mut raw = [
            BigRational::zero(),
            BigRational::zero(),
            BigRational::zero(),
            BigRational::zero(),
            BigRational::zero(),
        ];
        for i in 0..3 {
            if a.c[i].is_zero() {
                continue;
            }
            for j in 0..3 {
                if b.c[j].is_zero() {
                    continue;
                }
                raw[i + j] += &a.c[i] * &b.c[j];
            }
        }
        // Reduce x^4 then x^3 using x^3 = -(a2 x^2 + a1 x + a0).
        let a0 = self.coeff_rat(0);
        let a1 = self.coeff_rat(1);
        let a2 = self.coeff_rat(2);
        for k in (3..=4).rev() {
            if raw[k].is_zero() {
                continue;
            }
            let t = raw[k].clone();
            raw[k] = BigRational::zero();
            raw[k - 1] -= &t * &a2;
            raw[k - 2] -= &t * &a1;
            raw[k - 3] -= &t * &a0;
        }
        KElt::new(raw[0].clone(), raw[1].clone(), raw[2].clone())
    }

    pub fn pow(&self, a: &KElt, mut e: u64) -> KElt {
        let mut acc = KElt::from_int(1);
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

    /// 3x3 rational matrix of multiplication by `a` in the power basis
    /// (columns are a * pi^j expressed in the basis).
    pub fn mult_matrix(&self, a: &KElt) -> [[BigRational; 3]; 3] {
        let pi = KElt::pi();
        let cols = [a.clone(), self.mul(a, &pi), self.mul(&self.mul(a, &pi), &pi)];
        let mut m = std::array::from_fn(|_| std::array::from_fn(|_| BigRational::zero()));
        let m_ref: &mut [[BigRational; 3]; 3] = &mut m;
        for (j, col) in cols.iter().enumerate() {
            for i in 0..3 {
                m_ref[i][j] = col.c[i].clone();
            }
        }
        m
    }

    /// Field norm N(a) = det of the multiplication matrix.
    pub fn norm(&self, a: &KElt) -> BigRational {
        let m = self.mult_matrix(a);
        det3(&m)
    }

    /// Field trace Tr(a) = trace of the multiplication matrix.
    pub fn trace(&self, a: &KElt) -> BigRational {
        let m = self.mult_matrix(a);
        &m[0][0] + &m[1][1] + &m[2][2]
    }

    /// Characteristic polynomial of `a` (monic cubic over Q); equals the
    /// minimal polynomial when `a` is not rational.
    pub fn char_poly(&self, a: &KElt) -> Poly<BigRational> {
        let m = self.mult_matrix(a);
        let tr = &m[0][0] + &m[1][1] + &m[2][2];
        // Sum of principal 2x2 minors.
        let m2 = (&m[0][0] * &m[1][1] - &m[0][1] * &m[1][0])
            + (&m[0][0] * &m[2][2] - &m[0][2] * &m[2][0])
            + (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]);
        let d = det3(&m);
        Poly::new(vec![-d, m2, -tr, BigRational::one()])
    }

    pub fn inv(&self, a: &KElt) -> Result<KElt> {
        if a.is_zero() {
            return Err(Error::Parameter("division by zero in K".into()));
        }
        // a * (a^2 + c2' a + c1') = -c0' from the characteristic polynomial
        // x^3 + c2' x^2 + c1' x + c0': gives the inverse without linear algebra.
        let cp = self.char_poly(a);
        let c0 = cp.coeff(0);
        let c1 = cp.coeff(1);
        let c2 = cp.coeff(2);
        debug_assert!(!c0.is_zero(), "irreducible cubic: nonzero elements have nonzero norm");
        let a2 = self.mul(a, a);
        let num = a2.add(&a.scale(&c2)).add(&KElt::from_rational(c1));
        Ok(num.scale(&(-c0.recip())))
    }

    pub fn div(&self, a: &KElt, b: &KElt) -> Result<KElt> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Evaluate f at an exact rational point.
    pub fn eval_f(&self, x: &BigRational) -> BigRational {
        self.f.to_rational().eval(x)
    }

    /// Certified enclosures of all real roots of f, ascending, each of
    /// width <= 2^-prec, with f(lo) f(hi) < 0.
    pub fn real_roots(&self, prec: u32) -> Vec<Interval> {
        real_roots_of(&self.f, prec)
    }

    /// For negative discriminant: (real root enclosure, upper-half-plane
    /// complex root rectangle). The complex pair comes from the exact
    /// quadratic cofactor x^2 + p x + q with p = a2 + r, q = -a0/r
    /// evaluated over the real-root enclosure.
    pub fn embeddings(&self, prec: u32) -> Result<(Interval, CInterval)> {
        if !self.disc.is_negative() {
            return Err(Error::Parameter(
                "complex embedding pair requires negative discriminant".into(),
            ));
        }
        let roots = self.real_roots(prec);
        debug_assert_eq!(roots.len(), 1);
        let r = roots[0].clone();
        let a2 = Interval::from_bigint(&self.f.coeff(2));
        let a1 = Interval::from_bigint(&self.f.coeff(1));
        // p = a2 + r, q = a1 + r(a2 + r)  (cofactor coefficients).
        let p = a2.add(&r);
        let q = a1.add(&r.mul(&p));
        // Roots of x^2 + px + q: (-p ± i sqrt(4q - p^2))/2.
        let four_q = q.scale(&BigRational::from(BigInt::from(4)));
        let disc_neg = four_q.sub(&p.square());
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let im = disc_neg
            .sqrt(prec)
            .map_err(|_| Error::PrecisionExhausted {
                bits: prec,
                context: "complex cofactor discriminant enclosure touched zero".into(),
            })?
            .scale(&half);
        let re = p.neg().scale(&half);
        Ok((r, CInterval::new(re, im)))
    }

    /// Enclosure of the real embedding of an element.
    pub fn embed_real(&self, a: &KElt, root: &Interval) -> Interval {
        let r2 = root.square();
        Interval::point(a.c[0].clone())
            .add(&root.scale(&a.c[1]))
            .add(&r2.scale(&a.c[2]))
    }

    /// Enclosure of the complex embedding of an element.
    pub fn embed_complex(&self, a: &KElt, z: &CInterval) -> CInterval {
        let z2 = z.mul(z);
        CInterval::real(Interval::point(a.c[0].clone()))
            .add(&z.scale(&a.c[1]))
            .add(&z2.scale(&a.c[2]))
    }

    /// All integer roots of f (empty iff f is irreducible, since f is a
    /// monic cubic).
    pub fn integer_roots(&self) -> Vec<BigInt> {
        integer_roots_of(&self.f)
    }
}

fn det3(m: &[[BigRational; 3]; 3]) -> BigRational {
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
        - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

/// Cauchy bound: all real roots lie in (-B, B), B = 1 + max |a_i| (monic).
fn cauchy_bound(f: &Poly<BigInt>) -> BigInt {
    let mut m = BigInt::zero();
    let deg = f.degree().unwrap();
    for i in 0..deg {
        let a = f.coeff(i).abs();
        if a > m {
            m = a;
        }
    }
    m + BigInt::one()
}

/// Bisect [lo, hi] (with f(lo) f(hi) < 0) down to width <= 2^-prec.
/// Endpoints stay dyadic. If a midpoint is an exact root, returns the
/// point interval.
fn bisect(f: &Poly<BigRational>, mut lo: BigRational, mut hi: BigRational, prec: u32) -> Interval {
    let target = BigRational::new(BigInt::one(), BigInt::one() << prec);
    let two = BigRational::from(BigInt::from(2));
    let neg_at_lo = f.eval(&lo).is_negative();
    while &hi - &lo > target {
        let mid = (&lo + &hi) / &two;
        let v = f.eval(&mid);
        if v.is_zero() {
            return Interval::point(mid);
        }
        if v.is_negative() == neg_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Interval::new(lo, hi)
}

/// Certified real-root enclosures of a squarefree cubic (1 or 3 roots by
/// discriminant sign), ascending.
pub fn real_roots_of(f: &Poly<BigInt>, prec: u32) -> Vec<Interval> {
    assert_eq!(f.degree(), Some(3));
    assert!(f.is_monic());
    let disc = f.discriminant();
    assert!(!disc.is_zero(), "squarefree required");
    let fr = f.to_rational();
    let b = BigRational::from(cauchy_bound(f));
    let lo = -b.clone();
    let hi = b;
    if disc.is_negative() {
        // Exactly one real root.
        return vec![bisect(&fr, lo, hi, prec)];
    }
    // Three real roots, separated by the critical points of f.
    // f' = 3x^2 + 2 a2 x + a1 has two real roots t1 < t2; find rational
    // separators s1 in (root1, root2), s2 in (root2, root3) by refining
    // enclosures of t1, t2 until f has constant nonzero sign on them
    // (possible since f(t_i) != 0 for squarefree f).
    let a2 = BigRational::from(f.coeff(2));
    let a1 = BigRational::from(f.coeff(1));
    let three = BigRational::from(BigInt::from(3));
    let dprime = &a2 * &a2 - &three * &a1; // (2a2)^2 - 4*3*a1 over 4
    assert!(dprime.is_positive(), "three real roots force two critical points");
    let mut bits = prec.max(8);
    loop {
        let sq = Interval::point(dprime.clone()).sqrt(bits).unwrap();
        // t = (-a2 ± sqrt(a2^2 - 3 a1)) / 3
        let t1 = Interval::point(-&a2).sub(&sq).scale(&three.recip());
        let t2 = Interval::point(-&a2).add(&sq).scale(&three.recip());
        let s1 = constant_sign_point(&fr, &t1);
        let s2 = constant_sign_point(&fr, &t2);
        if let (Some(s1), Some(s2)) = (s1, s2) {
            return vec![
                bisect(&fr, lo.clone(), s1.clone(), prec),
                bisect(&fr, s1, s2.clone(), prec),
                bisect(&fr, s2, hi, prec),
            ];
        }
        bits *= 2;
        assert!(bits < 1 << 20, "separator refinement failed to converge");
    }
}

/// If f has constant nonzero sign on the interval (checked at both
/// endpoints and via no sign change — valid because the interval is meant
/// to be a tight enclosure of a critical point with f != 0 there), return
/// its midpoint as a separator. Conservative: requires equal nonzero signs
/// at both endpoints and at the midpoint.
fn constant_sign_point(f: &Poly<BigRational>, t: &Interval) -> Option<BigRational> {
    let vl = f.eval(&t.lo);
    let vh = f.eval(&t.hi);
    if vl.is_zero() || vh.is_zero() {
        return None;
    }
    if vl.is_negative() != vh.is_negative() {
        return None;
    }
    let mid = t.mid();
    let vm = f.eval(&mid);
    if vm.is_zero() || vm.is_negative() != vl.is_negative() {
        return None;
    }
    Some(mid)
}

/// Integer roots of a monic squarefree cubic: isolate real roots to width
/// < 1/2 and test the at most one integer in each enclosure.
pub fn integer_roots_of(f: &Poly<BigInt>) -> Vec<BigInt> {
    use num_integer::Integer;
    let mut out = Vec::new();
    for enc in real_roots_of(f, 2) {
        // Candidates: integers within [lo, hi].
        let lo_int = enc.lo.numer().div_floor(enc.lo.denom());
        let hi_ceil = enc.hi.numer().div_ceil(enc.hi.denom());
        let mut k = lo_int;
        while k <= hi_ceil {
            if f.eval(&k).is_zero() && !out.contains(&k) {
                out.push(k.clone());
            }
            k += 1;
        }
    }
    out.sort();
    out
}
