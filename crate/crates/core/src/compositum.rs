//! The sextic compositum KF of the cubic K and the quadratic F, with its
//! full S3 Galois action.
//!
//! Elements are written as a + b*sqrt(d) with a, b in K (six rational
//! coordinates over the basis 1, pi, pi^2, sqrt(d), pi sqrt(d),
//! pi^2 sqrt(d)). KF carries two commuting pieces of structure:
//!
//! * tau: the lift of the nontrivial automorphism of F (and the
//!   restriction of complex conjugation): a + b sqrt(d) -> a - b sqrt(d).
//! * sigma: a generator of Gal(KF/F), determined by one datum, the image
//!   pi^sigma of pi, which must be another root of the defining cubic
//!   expressible over KF. The constructor checks this exactly, along with
//!   the dihedral relation sigma(pi^sigma) = tau(pi^sigma) (equivalently
//!   sigma^2 = tau sigma tau), so an accepted `Compositum` is a proved S3
//!   extension with the intended action.
//!
//! Relative norms/traces to K and to F fall out of the action and are
//! verified to land in the right subfield on every call. The module also
//! exposes KF as a 6-dimensional [`Algebra`] plus the product order
//! O_K * O_F, the starting point for support-prime maximalization, and
//! rigorous embeddings at the three complex places of the (totally
//! imaginary) sextic.

use crate::cubic::{CubicField, KElt};
use crate::error::{Error, Result};
use crate::interval::{CInterval, Interval};
use crate::linalg::Mat;
use crate::orders::{Algebra, Order};
use crate::quad::{QElt, QuadField};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// a + b * sqrt(d) with a, b in K.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KFElt {
    pub a: KElt,
    pub b: KElt,
}

impl KFElt {
    pub fn new(a: KElt, b: KElt) -> Self {
        KFElt { a, b }
    }

    pub fn zero() -> Self {
        KFElt { a: KElt::from_int(0), b: KElt::from_int(0) }
    }

    pub fn one() -> Self {
        KFElt { a: KElt::from_int(1), b: KElt::from_int(0) }
    }

    pub fn from_k(a: KElt) -> Self {
        KFElt { a, b: KElt::from_int(0) }
    }

    pub fn from_f(q: &QElt) -> Self {
        KFElt {
            a: KElt::from_rational(q.x.clone()),
            b: KElt::from_rational(q.y.clone()),
        }
    }

    pub fn sqrt_d() -> Self {
        KFElt { a: KElt::from_int(0), b: KElt::from_int(1) }
    }

    pub fn pi() -> Self {
        KFElt::from_k(KElt::pi())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Is the element in K (no sqrt(d) part)?
    pub fn in_k(&self) -> bool {
        self.b.is_zero()
    }

    /// Is the element in F (both parts rational)?
    pub fn in_f(&self) -> bool {
        self.a.is_rational() && self.b.is_rational()
    }

    pub fn as_k(&self) -> Option<KElt> {
        if self.in_k() {
            Some(self.a.clone())
        } else {
            None
        }
    }

    pub fn as_f(&self) -> Option<QElt> {
        if self.in_f() {
            Some(QElt::new(self.a.c[0].clone(), self.b.c[0].clone()))
        } else {
            None
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        KFElt { a: self.a.add(&o.a), b: self.b.add(&o.b) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        KFElt { a: self.a.sub(&o.a), b: self.b.sub(&o.b) }
    }

    pub fn neg(&self) -> Self {
        KFElt { a: self.a.neg(), b: self.b.neg() }
    }

    /// tau: a + b sqrt(d) -> a - b sqrt(d).
    pub fn tau(&self) -> Self {
        KFElt { a: self.a.clone(), b: self.b.neg() }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        KFElt { a: self.a.scale(s), b: self.b.scale(s) }
    }

    /// Six rational coordinates (1, pi, pi^2, sqrt d, pi sqrt d, pi^2 sqrt d).
    pub fn coords(&self) -> Vec<BigRational> {
        let mut v = self.a.c.to_vec();
        v.extend(self.b.c.iter().cloned());
        v
    }

    pub fn from_coords(c: &[BigRational]) -> Self {
        assert_eq!(c.len(), 6);
        KFElt {
            a: KElt::new(c[0].clone(), c[1].clone(), c[2].clone()),
            b: KElt::new(c[3].clone(), c[4].clone(), c[5].clone()),
        }
    }

    /// LCM of all coordinate denominators.
    pub fn denominator(&self) -> BigInt {
        use num_integer::Integer;
        self.a.denominator().lcm(&self.b.denominator())
    }
}

/// KF with its S3 action.
#[derive(Debug, Clone)]
pub struct Compositum {
    pub k: CubicField,
    pub f: QuadField,
    pub pi_sigma: KFElt,
}

impl Compositum {
    /// Validates that `pi_sigma` is a root of the defining cubic, does not
    /// lie in K, and satisfies the dihedral compatibility
    /// sigma(pi^sigma) = tau(pi^sigma); together these make sigma a
    /// well-defined order-3 automorphism of KF fixing F.
    pub fn new(k: CubicField, f: QuadField, pi_sigma: KFElt) -> Result<Self> {
        let kf = Compositum { k, f, pi_sigma };
        // u(pi^sigma) = 0.
        let mut acc = KFElt::zero();
        let mut pw = KFElt::one();
        for c in kf.k.f.coeffs() {
            acc = acc.add(&pw.scale(&BigRational::from(c.clone())));
            pw = kf.mul(&pw, &kf.pi_sigma);
        }
        if !acc.is_zero() {
            return Err(Error::Parameter(
                "pi_sigma is not a root of the defining cubic".into(),
            ));
        }
        if kf.pi_sigma.in_k() {
            return Err(Error::Parameter(
                "pi_sigma coincides with a root in K; sigma would be trivial or invalid"
                    .into(),
            ));
        }
        // sigma(pi^sigma) must equal tau(pi^sigma) (which is pi^(sigma^2)).
        let s2 = kf.sigma(&kf.pi_sigma);
        if s2 != kf.pi_sigma.tau() {
            return Err(Error::Parameter(
                "sigma(pi^sigma) != tau(pi^sigma): not a valid Galois action".into(),
            ));
        }
        // Full cycle: sigma^3(pi) = pi.
        let s3 = kf.sigma(&s2);
        if s3 != KFElt::pi() {
            return Err(Error::Parameter("sigma does not have order 3".into()));
        }
        Ok(kf)
    }

    pub fn mul(&self, x: &KFElt, y: &KFElt) -> KFElt {
        let d = BigRational::from(self.f.d.clone());
        // (a1 + b1 s)(a2 + b2 s) = (a1 a2 + d b1 b2) + (a1 b2 + b1 a2) s.
        let a = self
            .k
            .mul(&x.a, &y.a)
            .add(&self.k.mul(&x.b, &y.b).scale(&d));
        let b = self.k.mul(&x.a, &y.b).add(&self.k.mul(&x.b, &y.a));
        KFElt { a, b }
    }

    pub fn pow(&self, x: &KFElt, mut e: u64) -> KFElt {
        let mut acc = KFElt::one();
        let mut base = x.clone();
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

    /// sigma: fixes F, sends pi to pi_sigma. Evaluates both K-components
    /// at pi_sigma and recombines.
    pub fn sigma(&self, x: &KFElt) -> KFElt {
        let sa = self.eval_k_poly_at_pi_sigma(&x.a);
        let sb = self.eval_k_poly_at_pi_sigma(&x.b);
        // sa + sb * sqrt(d)
        sa.add(&self.mul(&sb, &KFElt::sqrt_d()))
    }

    /// sigma^2 = tau sigma tau (dihedral relation), cheaper than two
    /// sigma evaluations.
    pub fn sigma2(&self, x: &KFElt) -> KFElt {
        self.sigma(&x.tau()).tau()
    }

    fn eval_k_poly_at_pi_sigma(&self, a: &KElt) -> KFElt {
        // a = a0 + a1 pi + a2 pi^2 -> a0 + a1 P + a2 P^2, P = pi_sigma.
        let p = &self.pi_sigma;
        let p2 = self.mul(p, p);
        KFElt::one()
            .scale(&a.c[0])
            .add(&p.scale(&a.c[1]))
            .add(&p2.scale(&a.c[2]))
    }

    /// N_{KF/K}(x) = x * tau(x), checked to land in K.
    pub fn norm_to_k(&self, x: &KFElt) -> KElt {
        let p = self.mul(x, &x.tau());
        p.as_k().expect("x * tau(x) is tau-fixed, hence in K")
    }

    /// Tr_{KF/K}(x) = x + tau(x).
    pub fn trace_to_k(&self, x: &KFElt) -> KElt {
        x.add(&x.tau()).as_k().expect("x + tau(x) is in K")
    }

    /// N_{KF/F}(x) = x * sigma(x) * sigma^2(x), checked to land in F.
    pub fn norm_to_f(&self, x: &KFElt) -> Result<QElt> {
        let p = self.mul(&self.mul(x, &self.sigma(x)), &self.sigma2(x));
        p.as_f()
            .ok_or_else(|| Error::internal("norm to F did not land in F"))
    }

    /// Tr_{KF/F}(x) = x + sigma(x) + sigma^2(x).
    pub fn trace_to_f(&self, x: &KFElt) -> Result<QElt> {
        let t = x.add(&self.sigma(x)).add(&self.sigma2(x));
        t.as_f()
            .ok_or_else(|| Error::internal("trace to F did not land in F"))
    }

    /// Absolute norm N_{KF/Q}(x).
    pub fn norm_to_q(&self, x: &KFElt) -> BigRational {
        self.k.norm(&self.norm_to_k(x))
    }

    pub fn inv(&self, x: &KFElt) -> Result<KFElt> {
        if x.is_zero() {
            return Err(Error::Parameter("division by zero in KF".into()));
        }
        // 1/x = tau(x) / N_{KF/K}(x), with the K-norm inverted in K.
        let nk = self.norm_to_k(x);
        let nk_inv = self.k.inv(&nk)?;
        let t = x.tau();
        Ok(KFElt {
            a: self.k.mul(&t.a, &nk_inv),
            b: self.k.mul(&t.b, &nk_inv),
        })
    }

    pub fn div(&self, x: &KFElt, y: &KFElt) -> Result<KFElt> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    /// Evaluate a polynomial with coefficients in F (ascending) at x.
    pub fn eval_poly_f(&self, coeffs: &[QElt], x: &KFElt) -> KFElt {
        let mut acc = KFElt::zero();
        for c in coeffs.iter().rev() {
            acc = self.mul(&acc, x).add(&KFElt::from_f(c));
        }
        acc
    }

    /// Rigorous images of x at the three complex places of KF. Place 0
    /// pairs the real embedding of K with sqrt(d) -> i sqrt|d|; places 1
    /// and 2 pair the complex embedding z of K with the two signs.
    pub fn embed_places(&self, x: &KFElt, prec: u32) -> Result<[CInterval; 3]> {
        let (r, z) = self.k.embeddings(prec)?;
        let sd = Interval::from_bigint(&(-&self.f.d))
            .sqrt(prec)
            .expect("|d| nonnegative");
        // Place 0: a(r) + b(r) i sqrt|d|.
        let ar = self.k.embed_real(&x.a, &r);
        let br = self.k.embed_real(&x.b, &r);
        let p0 = CInterval::new(ar, br.mul(&sd));
        // S = i sqrt|d| as a rectangle.
        let s = CInterval::new(Interval::from_int(0), sd);
        let az = self.k.embed_complex(&x.a, &z);
        let bz = self.k.embed_complex(&x.b, &z);
        let p1 = az.add(&bz.mul(&s));
        let p2 = az.sub(&bz.mul(&s));
        Ok([p0, p1, p2])
    }
}

/// KF as a 6-dimensional Q-algebra over the basis
/// (1, pi, pi^2, sqrt d, pi sqrt d, pi^2 sqrt d).
#[derive(Debug, Clone)]
pub struct KFAlgebra {
    pub kf: Compositum,
}

impl Algebra for KFAlgebra {
    fn dim(&self) -> usize {
        6
    }
    fn one_coords(&self) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); 6];
        v[0] = BigRational::one();
        v
    }
    fn mul_coords(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let x = KFElt::from_coords(a);
        let y = KFElt::from_coords(b);
        self.kf.mul(&x, &y).coords()
    }
    fn trace_coords(&self, x: &[BigRational]) -> BigRational {
        // Tr_{KF/Q} = Tr_{K/Q} of Tr_{KF/K}.
        let e = KFElt::from_coords(x);
        let t = self.kf.trace_to_k(&e);
        self.kf.k.trace(&t)
    }
}

/// The product order O_K * O_F inside KF: spanned by w_i and w_i * omega
/// for w_i the given basis of O_K and omega = (1 + sqrt d)/2.
pub fn product_order(ok: &Order) -> Order {
    assert_eq!(ok.dim(), 3);
    let mut rows: Mat = Vec::with_capacity(6);
    let two = BigInt::from(2);
    for w in &ok.basis {
        // w * 1: numerators 2*w over denominator 2*den.
        let mut r = vec![BigInt::zero(); 6];
        for j in 0..3 {
            r[j] = &w[j] * &two;
        }
        rows.push(r);
    }
    for w in &ok.basis {
        // w * omega = w/2 + (w/2) sqrt d: numerators (w | w) over 2*den.
        let mut r = vec![BigInt::zero(); 6];
        for j in 0..3 {
            r[j] = w[j].clone();
            r[3 + j] = w[j].clone();
        }
        rows.push(r);
    }
    Order::from_rows(rows, &ok.den * &two)
}
