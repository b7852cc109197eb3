use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Minimal commutative-ring interface for dense polynomial coefficients.
/// Implemented for `BigInt`, `BigRational` and the quadratic integers of `F`.
pub trait Ring: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }
}

impl Ring for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Ring for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
}

/// Dense polynomial with ascending coefficients, always trimmed.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T: Ring> {
    c: Vec<T>,
}

impl<T: Ring> Poly<T> {
    pub fn new(mut c: Vec<T>) -> Self {
        while c.last().map(|v| v.is_zero()).unwrap_or(false) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Self {
        Poly { c: vec![] }
    }

    pub fn constant(v: T) -> Self {
        Poly::new(vec![v])
    }

    pub fn x() -> Self {
        Poly::new(vec![T::zero(), T::one()])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.c
    }

    /// Coefficient of x^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> T {
        self.c.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn leading(&self) -> Option<&T> {
        self.c.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().map(|l| *l == T::one()).unwrap_or(false)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).add(&o.coeff(i)));
        }
        Poly::new(out)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).sub(&o.coeff(i)));
        }
        Poly::new(out)
    }

    pub fn neg(&self) -> Self {
        Poly::new(self.c.iter().map(|v| v.neg()).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, s: &T) -> Self {
        Poly::new(self.c.iter().map(|v| v.mul(s)).collect())
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.c.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Evaluate with coefficients mapped into another ring via `embed`.
    pub fn eval_in<U: Ring>(&self, x: &U, embed: impl Fn(&T) -> U) -> U {
        let mut acc = U::zero();
        for c in self.c.iter().rev() {
            acc = acc.mul(x).add(&embed(c));
        }
        acc
    }

    /// Substitute `g` for the variable.
    pub fn compose(&self, g: &Self) -> Self {
        let mut acc = Poly::zero();
        for c in self.c.iter().rev() {
            acc = acc.mul(g).add(&Poly::constant(c.clone()));
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.c.len() <= 1 {
            return Poly::zero();
        }
        let mut out = Vec::with_capacity(self.c.len() - 1);
        for (i, c) in self.c.iter().enumerate().skip(1) {
            // multiply by the integer i within the ring
            let mut m = T::zero();
            for _ in 0..i {
                m = m.add(&T::one());
            }
            out.push(m.mul(c));
        }
        Poly::new(out)
    }

    /// Resultant via the Sylvester determinant (exact in any commutative ring;
    /// intended for the small degrees used here).
    pub fn resultant(&self, o: &Self) -> T {
        let n = match self.degree() {
            Some(n) => n,
            None => return T::zero(),
        };
        let m = match o.degree() {
            Some(m) => m,
            None => return T::zero(),
        };
        if n == 0 {
            // constant^deg(o)=m? Res(c, g) = c^m
            let mut acc = T::one();
            for _ in 0..m {
                acc = acc.mul(&self.c[0]);
            }
            return acc;
        }
        if m == 0 {
            let mut acc = T::one();
            for _ in 0..n {
                acc = acc.mul(&o.c[0]);
            }
            return acc;
        }
        let size = n + m;
        let mut mat = vec![vec![T::zero(); size]; size];
        for row in 0..m {
            for (k, c) in self.c.iter().rev().enumerate() {
                mat[row][row + k] = c.clone();
            }
        }
        for row in 0..n {
            for (k, c) in o.c.iter().rev().enumerate() {
                mat[m + row][row + k] = c.clone();
            }
        }
        det_generic(&mat)
    }

    /// Discriminant of a monic polynomial: (-1)^(n(n-1)/2) * Res(f, f').
    pub fn discriminant(&self) -> T {
        assert!(self.is_monic(), "discriminant implemented for monic polynomials");
        let n = self.degree().unwrap();
        let res = self.resultant(&self.derivative());
        if (n * (n - 1) / 2) % 2 == 1 {
            res.neg()
        } else {
            res
        }
    }
}

impl Poly<BigInt> {
    pub fn from_int_vec(v: Vec<i64>) -> Self {
        Poly::new(v.into_iter().map(BigInt::from).collect())
    }

    pub fn to_rational(&self) -> Poly<BigRational> {
        Poly::new(self.c.iter().map(|c| BigRational::from(c.clone())).collect())
    }
}

/// Determinant by Laplace expansion along the first column; fine for the
/// (n+m) <= 8 matrices produced by cubic resultants.
fn det_generic<T: Ring>(mat: &[Vec<T>]) -> T {
    let n = mat.len();
    assert!(n <= 8, "generic determinant reserved for small matrices");
    if n == 0 {
        return T::one();
    }
    if n == 1 {
        return mat[0][0].clone();
    }
    let mut acc = T::zero();
    for i in 0..n {
        if mat[i][0].is_zero() {
            continue;
        }
        let minor: Vec<Vec<T>> = mat
            .iter()
            .enumerate()
            .filter(|(r, _)| *r != i)
            .map(|(_, row)| row[1..].to_vec())
            .collect();
        let term = mat[i][0].mul(&det_generic(&minor));
        acc = if i % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_compose_derivative() {
        // f = x^3 - x - 1
        let f = Poly::from_int_vec(vec![-1, -1, 0, 1]);
        assert_eq!(f.eval(&BigInt::from(2)), BigInt::from(5));
        let fp = f.derivative();
        assert_eq!(fp, Poly::from_int_vec(vec![-1, 0, 3]));
        // compose with x-1: (x-1)^3 - (x-1) - 1 = x^3 - 3x^2 + 2x - 1
        let shifted = f.compose(&Poly::from_int_vec(vec![-1, 1]));
        assert_eq!(shifted, Poly::from_int_vec(vec![-1, 2, -3, 1]));
    }

    #[test]
    fn discriminants() {
        // disc(x^3 - x - 1) = -23
        let f = Poly::from_int_vec(vec![-1, -1, 0, 1]);
        assert_eq!(f.discriminant(), BigInt::from(-23));
        // disc(x^2 + bx + c) = b^2 - 4c
        let g = Poly::from_int_vec(vec![7, 5, 1]);
        assert_eq!(g.discriminant(), BigInt::from(25 - 28));
        // disc(x^3 + m(x+1)^2) = m^2(4m - 27) for a few m, against the closed form.
        for m in [-4914i64, -62505, -540, 3, 100] {
            let u = Poly::from_int_vec(vec![m, 2 * m, m, 1]);
            let expect = BigInt::from(m) * BigInt::from(m) * BigInt::from(4 * m - 27);
            assert_eq!(u.discriminant(), expect, "m = {m}");
        }
    }

    #[test]
    fn resultant_multiplicativity() {
        // Res(f, g*h) = Res(f, g) * Res(f, h) on integer samples.
        let f = Poly::from_int_vec(vec![2, 0, 1]);
        let g = Poly::from_int_vec(vec![-1, 1]);
        let h = Poly::from_int_vec(vec![3, 2, 1]);
        let lhs = f.resultant(&g.mul(&h));
        let rhs = f.resultant(&g) * f.resultant(&h);
        assert_eq!(lhs, rhs);
    }
}
