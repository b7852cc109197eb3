//! Orders, ideals, and prime decomposition in a commutative Q-algebra.
//!
//! Everything is dimension-generic so the same verified machinery serves
//! both the cubic field K (dimension 3) and the sextic compositum KF
//! (dimension 6):
//!
//! * [`Order`]: a full-rank Z-lattice with multiplication table, stored as
//!   an integer row basis over a common denominator in the coordinates of
//!   the ambient algebra.
//! * `p_maximalize`: one prime at a time, by the radical / ring-of-
//!   multipliers iteration. The p-radical of O/pO is the kernel of the
//!   iterated Frobenius (an F_p-linear map), and the enlarged order is
//!   (1/p){ y in O : y I_p <= p I_p }. The loop provably terminates at a
//!   p-maximal order, with the index gaining a factor of p each round.
//! * `factor_prime`: splits pO in a p-maximal order by computing the
//!   radical R of A = O/pO, splitting the semisimple quotient A/R into
//!   field factors along eigenspaces of Frobenius-fixed elements, and
//!   reading each maximal ideal off as an annihilator. Ramification
//!   indices come from exact ideal valuations, and the sum rule
//!   `sum e_i f_i = dim` is asserted on every call.
//! * Ideal arithmetic (products, powers, norms, membership, valuations)
//!   in Hermite normal form, fully exact.
//!
//! No factorization of the full discriminant is ever required: callers
//! choose which primes to maximalize at, which keeps the sextic usable
//! even when its discriminant is far too large to factor.

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A commutative Q-algebra of finite dimension with a distinguished basis.
pub trait Algebra {
    fn dim(&self) -> usize;
    fn one_coords(&self) -> Vec<BigRational>;
    fn mul_coords(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational>;

    /// Trace of the multiplication-by-x operator.
    fn trace_coords(&self, x: &[BigRational]) -> BigRational {
        let n = self.dim();
        let mut t = BigRational::zero();
        for i in 0..n {
            let mut e = vec![BigRational::zero(); n];
            e[i] = BigRational::one();
            let col = self.mul_coords(x, &e);
            t += &col[i];
        }
        t
    }
}

/// Full-rank order (or fractional O-lattice) given by `basis / den`:
/// rows of `basis` are integer coordinate vectors in the algebra basis.
/// Kept in canonical HNF with the content of (basis, den) divided out, so
/// equal lattices have identical representations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Order {
    pub basis: Mat,
    pub den: BigInt,
}

impl Order {
    /// The lattice spanned by the algebra basis itself (e.g. Z[pi] in the
    /// power basis; the product order O_K * O_F in the compositum basis).
    pub fn equation_order(n: usize) -> Order {
        Order { basis: linalg::identity(n), den: BigInt::one() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn normalize(mut self) -> Order {
        let mut g = self.den.clone();
        for row in &self.basis {
            for v in row {
                g = g.gcd(v);
                if g.is_one() {
                    break;
                }
            }
        }
        if !g.is_one() {
            for row in &mut self.basis {
                for v in row.iter_mut() {
                    *v /= &g;
                }
            }
            self.den /= &g;
        }
        self.basis = linalg::hnf(&self.basis);
        self
    }

    pub fn from_rows(rows: Mat, den: BigInt) -> Order {
        let h = linalg::hnf(&rows);
        Order { basis: h, den }.normalize()
    }

    /// Algebra coordinates of the order element with integer coordinates
    /// `c` in the order basis.
    pub fn to_alg(&self, c: &[BigInt]) -> Vec<BigRational> {
        let n = self.dim();
        let mut out = vec![BigRational::zero(); n];
        for (ci, row) in c.iter().zip(&self.basis) {
            if ci.is_zero() {
                continue;
            }
            for j in 0..n {
                out[j] += BigRational::new(ci * &row[j], self.den.clone());
            }
        }
        out
    }

    /// Exact order-basis coordinates (rational) of an algebra element.
    pub fn coords_rational(&self, x: &[BigRational]) -> Vec<BigRational> {
        // Solve c * basis = x * den.
        let n = self.dim();
        let bt = linalg::transpose(&self.basis);
        // Clear denominators of x * den:
        let mut lcm = BigInt::one();
        for v in x {
            lcm = lcm.lcm(v.denom());
        }
        let target: Vec<BigInt> = x
            .iter()
            .map(|v| v.numer() * (&lcm / v.denom()) * &self.den)
            .collect();
        let sol = linalg::solve_rational(&bt, &target)
            .expect("order basis is full rank");
        sol.into_iter()
            .map(|s| s / BigRational::from(lcm.clone()))
            .take(n)
            .collect()
    }

    /// Integer coordinates if the element is in the lattice, else None.
    pub fn coords(&self, x: &[BigRational]) -> Option<Vec<BigInt>> {
        let r = self.coords_rational(x);
        if r.iter().all(|v| v.is_integer()) {
            Some(r.into_iter().map(|v| v.to_integer()).collect())
        } else {
            None
        }
    }

    pub fn contains(&self, x: &[BigRational]) -> bool {
        self.coords(x).is_some()
    }

    /// Multiplication table in order coordinates: `T[i][j]` = coordinates
    /// of b_i * b_j. Errors if the lattice is not closed under the product
    /// (i.e. not an order).
    pub fn mult_table(&self, alg: &impl Algebra) -> Result<Vec<Vec<Vec<BigInt>>>> {
        let n = self.dim();
        let rows_alg: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                self.basis[i]
                    .iter()
                    .map(|v| BigRational::new(v.clone(), self.den.clone()))
                    .collect()
            })
            .collect();
        let mut table = vec![vec![Vec::new(); n]; n];
        for i in 0..n {
            for j in i..n {
                let prod = alg.mul_coords(&rows_alg[i], &rows_alg[j]);
                let c = self.coords(&prod).ok_or_else(|| {
                    Error::internal("lattice is not multiplicatively closed")
                })?;
                table[i][j] = c.clone();
                table[j][i] = c;
            }
        }
        Ok(table)
    }

    /// Discriminant: determinant of the trace form Gram matrix on the
    /// order basis (an integer for any order).
    pub fn disc(&self, alg: &impl Algebra) -> BigInt {
        let n = self.dim();
        let rows_alg: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                self.basis[i]
                    .iter()
                    .map(|v| BigRational::new(v.clone(), self.den.clone()))
                    .collect()
            })
            .collect();
        let mut gram = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let prod = alg.mul_coords(&rows_alg[i], &rows_alg[j]);
                let t = alg.trace_coords(&prod);
                gram[i][j] = t.clone();
                gram[j][i] = t;
            }
        }
        let d = linalg::det_rational(&gram);
        assert!(d.is_integer(), "trace form of an order has integer determinant");
        d.to_integer()
    }

    /// Index [self : sub] when `sub` is a sublattice of `self`.
    pub fn index_of_sublattice(&self, sub: &Order) -> BigInt {
        let n = self.dim();
        // index = |det(sub)| / |det(self)| in algebra coordinates.
        let num = linalg::det(&sub.basis).abs() * self.den.pow(n as u32);
        let den = linalg::det(&self.basis).abs() * sub.den.pow(n as u32);
        let (q, r) = num.div_rem(&den);
        assert!(r.is_zero(), "not a sublattice");
        q
    }
}

/// Element power with coordinates reduced mod p at every step.
fn pow_mod_p(
    table: &[Vec<Vec<BigInt>>],
    one: &[BigInt],
    x: &[BigInt],
    e: &BigInt,
    p: &BigInt,
) -> Vec<BigInt> {
    let mul = |a: &[BigInt], b: &[BigInt]| -> Vec<BigInt> {
        let n = a.len();
        let mut out = vec![BigInt::zero(); n];
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[j].is_zero() {
                    continue;
                }
                let t = (&a[i] * &b[j]).mod_floor(p);
                for (k, c) in table[i][j].iter().enumerate() {
                    out[k] = (&out[k] + &t * c).mod_floor(p);
                }
            }
        }
        out
    };
    let mut acc: Vec<BigInt> = one.iter().map(|v| v.mod_floor(p)).collect();
    let mut base: Vec<BigInt> = x.iter().map(|v| v.mod_floor(p)).collect();
    let mut e = e.clone();
    while e.is_positive() {
        if e.is_odd() {
            acc = mul(&acc, &base);
        }
        e >>= 1;
        if e.is_positive() {
            base = mul(&base, &base);
        }
    }
    acc
}

/// Coordinates of 1 in the order basis.
fn one_coords_in(order: &Order, alg: &impl Algebra) -> Result<Vec<BigInt>> {
    order
        .coords(&alg.one_coords())
        .ok_or_else(|| Error::internal("order does not contain 1"))
}

/// HNF lattice (in order coordinates) of the p-radical of `order`:
/// { x in O : x^(p^j) in pO } for the least j with p^j >= dim. Contains pO.
pub fn p_radical(alg: &impl Algebra, order: &Order, p: &BigInt) -> Result<Mat> {
    let n = order.dim();
    let table = order.mult_table(alg)?;
    let one = one_coords_in(order, alg)?;
    // Frobenius matrix: column i = coords of b_i^p mod p.
    let mut frob = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[i] = BigInt::one();
        let fp = pow_mod_p(&table, &one, &e, p, p);
        for k in 0..n {
            frob[k][i] = fp[k].clone();
        }
    }
    // Iterate: M = frob^j with p^j >= n.
    let mut m = frob.clone();
    let mut pj = p.clone();
    let nn = BigInt::from(n as u64);
    while pj < nn {
        m = mat_mul_mod_p(&m, &frob, p);
        pj *= p;
    }
    let kernel = linalg::kernel_mod_p(&m, p);
    let mut rows = kernel;
    for i in 0..n {
        let mut r = vec![BigInt::zero(); n];
        r[i] = p.clone();
        rows.push(r);
    }
    Ok(linalg::hnf(&rows))
}

fn mat_mul_mod_p(a: &[Vec<BigInt>], b: &[Vec<BigInt>], p: &BigInt) -> Mat {
    let n = a.len();
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                out[i][j] = (&out[i][j] + &a[i][k] * &b[k][j]).mod_floor(p);
            }
        }
    }
    out
}

/// { y in O : y * L <= p * L } / p as a new lattice, where L is an ideal
/// of O given in order coordinates; this is the ring of multipliers of L
/// when L is the radical. Returns an Order in algebra coordinates.
fn multiplier_ring(
    alg: &impl Algebra,
    order: &Order,
    lattice: &Mat,
    p: &BigInt,
) -> Result<Order> {
    let n = order.dim();
    let table = order.mult_table(alg)?;
    // Rows of the constraint matrix: for each lattice generator g and each
    // coordinate slot t (in the *lattice* basis), the map
    // y_j -> coord_t( b_j * g  in lattice basis ) mod p.
    let mut constraint: Mat = Vec::with_capacity(n * lattice.len());
    for g in lattice {
        // b_j * g in order coords: sum_k g_k * T[j][k].
        let mut per_j: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for j in 0..n {
            let mut prod = vec![BigInt::zero(); n];
            for k in 0..n {
                if g[k].is_zero() {
                    continue;
                }
                for (t, c) in table[j][k].iter().enumerate() {
                    prod[t] += &g[k] * c;
                }
            }
            // Express in the lattice basis (exact; products land in the
            // ideal because the lattice is an ideal of O).
            let coords = linalg::coords_in_hnf(lattice, &prod).ok_or_else(|| {
                Error::internal("radical lattice is not an ideal of the order")
            })?;
            per_j.push(coords);
        }
        for t in 0..n {
            let row: Vec<BigInt> = (0..n).map(|j| per_j[j][t].mod_floor(p)).collect();
            constraint.push(row);
        }
    }
    let kernel = linalg::kernel_mod_p(&constraint, p);
    // U = kernel lifts + pO, in order coordinates.
    let mut urows = kernel;
    for i in 0..n {
        let mut r = vec![BigInt::zero(); n];
        r[i] = p.clone();
        urows.push(r);
    }
    // Convert to algebra coordinates and divide by p:
    // rows (in algebra numerators) = u * basis; denominator = den * p.
    let rows_alg: Mat = urows
        .iter()
        .map(|u| {
            let mut r = vec![BigInt::zero(); n];
            for (ui, brow) in u.iter().zip(&order.basis) {
                if ui.is_zero() {
                    continue;
                }
                for j in 0..n {
                    r[j] += ui * &brow[j];
                }
            }
            r
        })
        .collect();
    Ok(Order::from_rows(rows_alg, &order.den * p))
}

/// Enlarge `order` until it is p-maximal. Each round strictly increases
/// the order (index gains at least one factor of p), so this terminates.
pub fn p_maximalize(alg: &impl Algebra, order: &Order, p: &BigInt) -> Result<Order> {
    let mut cur = order.clone().normalize();
    loop {
        let rad = p_radical(alg, &cur, p)?;
        let next = multiplier_ring(alg, &cur, &rad, p)?;
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
}

/// Is the order already p-maximal?
pub fn is_p_maximal(alg: &impl Algebra, order: &Order, p: &BigInt) -> Result<bool> {
    let rad = p_radical(alg, order, p)?;
    let next = multiplier_ring(alg, order, &rad, p)?;
    Ok(&next == order)
}

/// Integral ideal of an order: full-rank HNF lattice in order coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ideal {
    pub basis: Mat,
}

/// Prime ideal above p, with residue degree, ramification index, and the
/// numerator lattice U of its inverse (P^-1 = U / p as an O-lattice).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeIdeal {
    pub p: BigInt,
    pub ideal: Ideal,
    pub e: u32,
    pub f: u32,
    inv_num: Mat,
}

impl PrimeIdeal {
    pub fn norm(&self) -> BigInt {
        self.p.pow(self.f)
    }
}

impl Ideal {
    pub fn whole_ring(n: usize) -> Ideal {
        Ideal { basis: linalg::identity(n) }
    }

    pub fn from_int(n: usize, k: &BigInt) -> Ideal {
        let mut b = linalg::identity(n);
        for (i, row) in b.iter_mut().enumerate() {
            row[i] = k.abs();
        }
        Ideal { basis: b }
    }

    /// Absolute norm = index [O : I].
    pub fn norm(&self) -> BigInt {
        let mut n = BigInt::one();
        for (i, row) in self.basis.iter().enumerate() {
            n *= &row[i];
        }
        n
    }

    pub fn contains(&self, coords: &[BigInt]) -> bool {
        linalg::coords_in_hnf(&self.basis, coords).is_some()
    }

    pub fn is_whole_ring(&self) -> bool {
        self.norm().is_one()
    }
}

/// Principal ideal generated by an order element (order coordinates).
pub fn ideal_from_element(
    alg: &impl Algebra,
    order: &Order,
    x: &[BigInt],
) -> Result<Ideal> {
    let table = order.mult_table(alg)?;
    let n = order.dim();
    let rows: Mat = (0..n)
        .map(|i| {
            let mut r = vec![BigInt::zero(); n];
            for (k, xk) in x.iter().enumerate() {
                if xk.is_zero() {
                    continue;
                }
                for (t, c) in table[i][k].iter().enumerate() {
                    r[t] += xk * c;
                }
            }
            r
        })
        .collect();
    let h = linalg::hnf(&rows);
    if h.len() != n {
        return Err(Error::Parameter("principal ideal of a zero divisor or zero".into()));
    }
    Ok(Ideal { basis: h })
}

/// Ideal generated by a set of order elements together with an optional
/// rational integer.
pub fn ideal_from_gens(
    alg: &impl Algebra,
    order: &Order,
    gens: &[Vec<BigInt>],
    with_int: Option<&BigInt>,
) -> Result<Ideal> {
    let table = order.mult_table(alg)?;
    let n = order.dim();
    let mut rows: Mat = Vec::new();
    for x in gens {
        for i in 0..n {
            let mut r = vec![BigInt::zero(); n];
            for (k, xk) in x.iter().enumerate() {
                if xk.is_zero() {
                    continue;
                }
                for (t, c) in table[i][k].iter().enumerate() {
                    r[t] += xk * c;
                }
            }
            rows.push(r);
        }
    }
    if let Some(k) = with_int {
        for i in 0..n {
            let mut r = vec![BigInt::zero(); n];
            r[i] = k.abs();
            rows.push(r);
        }
    }
    let h = linalg::hnf(&rows);
    if h.len() != n {
        return Err(Error::Parameter("ideal generators do not span full rank".into()));
    }
    Ok(Ideal { basis: h })
}

pub fn ideal_product(
    alg: &impl Algebra,
    order: &Order,
    a: &Ideal,
    b: &Ideal,
) -> Result<Ideal> {
    let table = order.mult_table(alg)?;
    let n = order.dim();
    let mut rows: Mat = Vec::with_capacity(n * n);
    for x in &a.basis {
        for y in &b.basis {
            let mut r = vec![BigInt::zero(); n];
            for i in 0..n {
                if x[i].is_zero() {
                    continue;
                }
                for j in 0..n {
                    if y[j].is_zero() {
                        continue;
                    }
                    let s = &x[i] * &y[j];
                    for (t, c) in table[i][j].iter().enumerate() {
                        r[t] += &s * c;
                    }
                }
            }
            rows.push(r);
        }
    }
    Ok(Ideal { basis: linalg::hnf(&rows) })
}

pub fn ideal_pow(
    alg: &impl Algebra,
    order: &Order,
    a: &Ideal,
    e: u64,
) -> Result<Ideal> {
    let mut acc = Ideal::whole_ring(order.dim());
    let mut base = a.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = ideal_product(alg, order, &acc, &base)?;
        }
        e >>= 1;
        if e > 0 {
            base = ideal_product(alg, order, &base, &base)?;
        }
    }
    Ok(acc)
}

pub fn ideal_sum(a: &Ideal, b: &Ideal) -> Ideal {
    let mut rows = a.basis.clone();
    rows.extend(b.basis.iter().cloned());
    Ideal { basis: linalg::hnf(&rows) }
}

/// Reduced-row-echelon reducer mod p for a fixed subspace: reduces vectors
/// modulo the subspace, exposing canonical coordinates on the quotient.
struct QuotientReducer {
    rref: Mat,
    pivots: Vec<usize>,
    free: Vec<usize>,
    p: BigInt,
}

impl QuotientReducer {
    fn new(subspace_rows: &[Vec<BigInt>], ncols: usize, p: &BigInt) -> Self {
        let mut m: Mat = subspace_rows
            .iter()
            .map(|r| r.iter().map(|v| v.mod_floor(p)).collect())
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..ncols {
            let piv = (r..m.len()).find(|&i| !m[i][c].is_zero());
            let Some(piv) = piv else { continue };
            m.swap(r, piv);
            let inv = crate::arith::inv_mod(&m[r][c], p).unwrap();
            for j in 0..ncols {
                m[r][j] = (&m[r][j] * &inv).mod_floor(p);
            }
            for i in 0..m.len() {
                if i != r && !m[i][c].is_zero() {
                    let f = m[i][c].clone();
                    for j in 0..ncols {
                        m[i][j] = (&m[i][j] - &f * &m[r][j]).mod_floor(p);
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == m.len() {
                break;
            }
        }
        m.truncate(r);
        let free = (0..ncols).filter(|c| !pivots.contains(c)).collect();
        QuotientReducer { rref: m, pivots, free, p: p.clone() }
    }

    /// Quotient coordinates (at the free columns) of `v` mod the subspace.
    fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut w: Vec<BigInt> = v.iter().map(|x| x.mod_floor(&self.p)).collect();
        for (row, &pc) in self.rref.iter().zip(&self.pivots) {
            if !w[pc].is_zero() {
                let f = w[pc].clone();
                for j in 0..w.len() {
                    w[j] = (&w[j] - &f * &row[j]).mod_floor(&self.p);
                }
            }
        }
        self.free.iter().map(|&c| w[c].clone()).collect()
    }

    /// A lift of quotient coordinates back to the full space (free columns
    /// get the coordinates, pivot columns zero).
    fn lift(&self, q: &[BigInt], ncols: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); ncols];
        for (&c, val) in self.free.iter().zip(q) {
            v[c] = val.clone();
        }
        v
    }

    fn quotient_dim(&self) -> usize {
        self.free.len()
    }
}

/// Decompose pO into primes in a p-maximal order. Returns the primes with
/// their residue degrees f and ramification indices e; `sum e f = dim` is
/// checked internally.
pub fn factor_prime(
    alg: &impl Algebra,
    order: &Order,
    p: &BigInt,
) -> Result<Vec<PrimeIdeal>> {
    if !is_p_maximal(alg, order, p)? {
        return Err(Error::internal(
            "factor_prime called on an order that is not p-maximal",
        ));
    }
    let n = order.dim();
    let table = order.mult_table(alg)?;
    let one = one_coords_in(order, alg)?;

    // Frobenius matrix on A = O/pO.
    let mut frob = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[i] = BigInt::one();
        let fp = pow_mod_p(&table, &one, &e, p, p);
        for k in 0..n {
            frob[k][i] = fp[k].clone();
        }
    }
    // Radical of A: kernel of frob^j, p^j >= n.
    let mut m = frob.clone();
    let mut pj = p.clone();
    let nn = BigInt::from(n as u64);
    while pj < nn {
        m = mat_mul_mod_p(&m, &frob, p);
        pj *= p;
    }
    let radical = linalg::kernel_mod_p(&m, p);
    let qr = QuotientReducer::new(&radical, n, p);
    let q = qr.quotient_dim(); // dim of the semisimple quotient A/R

    // Multiplication in A/R coordinates.
    let mul_mod_p = |a: &[BigInt], b: &[BigInt]| -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); n];
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[j].is_zero() {
                    continue;
                }
                let t = (&a[i] * &b[j]).mod_floor(p);
                for (k, c) in table[i][j].iter().enumerate() {
                    out[k] = (&out[k] + &t * c).mod_floor(p);
                }
            }
        }
        out
    };
    let mul_quot = |a: &[BigInt], b: &[BigInt]| -> Vec<BigInt> {
        let la = qr.lift(a, n);
        let lb = qr.lift(b, n);
        qr.reduce(&mul_mod_p(&la, &lb))
    };
    // Frobenius on A/R (well defined: radical is Frobenius stable).
    let frob_quot = |a: &[BigInt]| -> Vec<BigInt> {
        let la = qr.lift(a, n);
        let mut img = vec![BigInt::zero(); n];
        for (j, c) in la.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for k in 0..n {
                img[k] = (&img[k] + c * &frob[k][j]).mod_floor(p);
            }
        }
        qr.reduce(&img)
    };

    // Split the semisimple algebra A/R into field factors. Subspaces are
    // given by row bases in the q-dimensional quotient coordinates.
    let full: Mat = (0..q)
        .map(|i| {
            let mut r = vec![BigInt::zero(); q];
            r[i] = BigInt::one();
            r
        })
        .collect();
    let mut stack: Vec<Mat> = vec![full];
    let mut factors: Vec<Mat> = Vec::new();
    while let Some(s) = stack.pop() {
        let s_dim = s.len();
        if s_dim == 0 {
            continue;
        }
        if s_dim == 1 {
            factors.push(s);
            continue;
        }
        // V_S = Frobenius-fixed vectors inside S: x = c * S with
        // (frob - id)(x) = 0. Build the q x s_dim matrix N with columns
        // (frob - id)(S_k).
        let mut ncols: Vec<Vec<BigInt>> = Vec::with_capacity(s_dim);
        for row in &s {
            let fx = frob_quot(row);
            let col: Vec<BigInt> = (0..q)
                .map(|t| (&fx[t] - &row[t]).mod_floor(p))
                .collect();
            ncols.push(col);
        }
        let nmat: Mat = (0..q)
            .map(|t| (0..s_dim).map(|k| ncols[k][t].clone()).collect())
            .collect();
        let fixed_coords = linalg::kernel_mod_p(&nmat, p);
        let v_basis: Mat = fixed_coords
            .iter()
            .map(|c| combine_rows(&s, c, p))
            .collect();
        if v_basis.len() <= 1 {
            // Single field factor.
            factors.push(s);
            continue;
        }
        // Find a fixed vector acting with at least two eigenvalues on S.
        let mut split_done = false;
        for alpha in &v_basis {
            // Multiplication-by-alpha operator on S, in S-coordinates.
            let reducer_s = RowSolver::new(&s, p);
            let mut op: Mat = Vec::with_capacity(s_dim); // rows: images
            let mut ok = true;
            for row in &s {
                let img = mul_quot(alpha, row);
                match reducer_s.solve(&img) {
                    Some(c) => op.push(c),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                return Err(Error::internal("subspace not closed under multiplication"));
            }
            // op as matrix acting on row-coordinate vectors: image of basis
            // row k has S-coordinates op[k]. As a linear operator M with
            // column k = op[k] (acting on column vectors).
            let mmat: Mat = (0..s_dim)
                .map(|t| (0..s_dim).map(|k| op[k][t].clone()).collect())
                .collect();
            let minpoly = min_poly_mod_p(&mmat, p);
            let roots = crate::arith::roots_mod_p(&minpoly, p)?;
            if roots.len() < 2 {
                continue;
            }
            // Eigen-decompose S along alpha.
            for (lam, _) in &roots {
                let mut shifted = mmat.clone();
                for i in 0..s_dim {
                    shifted[i][i] = (&shifted[i][i] - lam).mod_floor(p);
                }
                let eig = linalg::kernel_mod_p(&shifted, p);
                if eig.is_empty() {
                    continue;
                }
                let sub: Mat = eig.iter().map(|c| combine_rows(&s, c, p)).collect();
                stack.push(sub);
            }
            split_done = true;
            break;
        }
        if !split_done {
            return Err(Error::internal(
                "semisimple splitting failed to find a separating element",
            ));
        }
    }

    // Each factor S_i gives the maximal ideal m_i = { a in A : a*S_i <= R },
    // pulled back to the prime ideal P_i = lift(m_i) + pO of O.
    let mut primes = Vec::new();
    for s in &factors {
        let f_i = s.len() as u32;
        // Constraint on a in A (n coords): for each basis vector v of S_i,
        // reduce(a * lift(v)) = 0 in quotient coords.
        let mut rows: Mat = Vec::new();
        for v in s {
            let lv = qr.lift(v, n);
            // map a (basis e_j) -> quotient coords of e_j * lv.
            let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(n);
            for j in 0..n {
                let mut e = vec![BigInt::zero(); n];
                e[j] = BigInt::one();
                let prod = mul_mod_p(&e, &lv);
                cols.push(qr.reduce(&prod));
            }
            for t in 0..q {
                rows.push((0..n).map(|j| cols[j][t].clone()).collect());
            }
        }
        let mcoords = linalg::kernel_mod_p(&rows, p);
        let mut prows: Mat = mcoords;
        for i in 0..n {
            let mut r = vec![BigInt::zero(); n];
            r[i] = p.clone();
            prows.push(r);
        }
        let basis = linalg::hnf(&prows);
        let ideal = Ideal { basis };
        // Sanity: N(P) = p^f.
        if ideal.norm() != p.pow(f_i) {
            return Err(Error::internal("prime ideal norm mismatch"));
        }
        let inv_num = prime_inverse_numerator(&table, &ideal, p, n)?;
        primes.push(PrimeIdeal { p: p.clone(), ideal, e: 0, f: f_i, inv_num });
    }

    // Ramification indices from exact valuations of pO.
    let p_ideal = Ideal::from_int(n, p);
    let mut sum_ef = 0u32;
    for pr in &mut primes {
        let e = valuation_with_inverse(&table, &p_ideal, &pr.inv_num, p)?;
        pr.e = e;
        sum_ef += pr.e * pr.f;
    }
    if sum_ef as usize != n {
        return Err(Error::internal(&format!(
            "sum of e*f = {sum_ef} does not match dimension {n}"
        )));
    }
    primes.sort_by(|a, b| a.ideal.basis.cmp(&b.ideal.basis));
    Ok(primes)
}

/// Linear combination of rows mod p.
fn combine_rows(rows: &[Vec<BigInt>], coeffs: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    let width = rows[0].len();
    let mut out = vec![BigInt::zero(); width];
    for (c, row) in coeffs.iter().zip(rows) {
        if c.is_zero() {
            continue;
        }
        for j in 0..width {
            out[j] = (&out[j] + c * &row[j]).mod_floor(p);
        }
    }
    out
}

/// Solve x * rows = target (mod p) for row-coordinate vectors; used to
/// express vectors of a subspace in its own basis.
struct RowSolver {
    rref: Mat,
    pivots: Vec<usize>,
    transform: Mat, // transform[i] = coords of rref row i in original rows
    p: BigInt,
}

impl RowSolver {
    fn new(rows: &[Vec<BigInt>], p: &BigInt) -> Self {
        let k = rows.len();
        let width = rows[0].len();
        let mut m: Mat = rows
            .iter()
            .map(|r| r.iter().map(|v| v.mod_floor(p)).collect())
            .collect();
        let mut t = linalg::identity(k);
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..width {
            let piv = (r..k).find(|&i| !m[i][c].is_zero());
            let Some(piv) = piv else { continue };
            m.swap(r, piv);
            t.swap(r, piv);
            let inv = crate::arith::inv_mod(&m[r][c], p).unwrap();
            for j in 0..width {
                m[r][j] = (&m[r][j] * &inv).mod_floor(p);
            }
            for j in 0..k {
                t[r][j] = (&t[r][j] * &inv).mod_floor(p);
            }
            for i in 0..k {
                if i != r && !m[i][c].is_zero() {
                    let f = m[i][c].clone();
                    for j in 0..width {
                        m[i][j] = (&m[i][j] - &f * &m[r][j]).mod_floor(p);
                    }
                    for j in 0..k {
                        t[i][j] = (&t[i][j] - &f * &t[r][j]).mod_floor(p);
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == k {
                break;
            }
        }
        m.truncate(r);
        t.truncate(r);
        RowSolver { rref: m, pivots, transform: t, p: p.clone() }
    }

    fn solve(&self, target: &[BigInt]) -> Option<Vec<BigInt>> {
        let k = self.transform.first().map(|r| r.len()).unwrap_or(0);
        let mut w: Vec<BigInt> = target.iter().map(|x| x.mod_floor(&self.p)).collect();
        let mut coeffs = vec![BigInt::zero(); k];
        for (row_i, &pc) in self.pivots.iter().enumerate() {
            if w[pc].is_zero() {
                continue;
            }
            let f = w[pc].clone();
            for j in 0..w.len() {
                w[j] = (&w[j] - &f * &self.rref[row_i][j]).mod_floor(&self.p);
            }
            for j in 0..k {
                coeffs[j] =
                    (&coeffs[j] + &f * &self.transform[row_i][j]).mod_floor(&self.p);
            }
        }
        if w.iter().all(|x| x.is_zero()) {
            Some(coeffs)
        } else {
            None
        }
    }
}

/// Minimal polynomial of a square matrix over F_p (matrix dimensions are
/// tiny here). Finds the least-degree monic dependency among I, M, M^2...
fn min_poly_mod_p(m: &[Vec<BigInt>], p: &BigInt) -> crate::arith::Poly<BigInt> {
    let s = m.len();
    let mut powers: Vec<Vec<BigInt>> = Vec::new(); // flattened s*s vectors
    let mut cur = linalg::identity(s);
    for _ in 0..=s {
        powers.push(cur.iter().flatten().cloned().collect());
        cur = mat_mul_mod_p(&cur, m, p);
    }
    for deg in 1..=s {
        // Look for monic dependency: M^deg = sum_{i<deg} c_i M^i.
        // Solve the linear system over F_p.
        let cols = deg;
        let rows_n = s * s;
        let a: Mat = (0..rows_n)
            .map(|r| (0..cols).map(|c| powers[c][r].clone()).collect())
            .collect();
        // Solve a * x = powers[deg] via RowSolver on transpose trick:
        let solver = RowSolver::new(
            &(0..cols).map(|c| (0..rows_n).map(|r| a[r][c].clone()).collect()).collect::<Vec<_>>(),
            p,
        );
        if let Some(coeffs) = solver.solve(&powers[deg]) {
            // x^deg - sum c_i x^i
            let mut poly = vec![BigInt::zero(); deg + 1];
            for (i, c) in coeffs.iter().enumerate() {
                poly[i] = (-c).mod_floor(p);
            }
            poly[deg] = BigInt::one();
            return crate::arith::Poly::new(poly);
        }
    }
    unreachable!("matrix satisfies its characteristic polynomial");
}

/// Numerator lattice U of P^-1 = U/p: U = { y in O : y P <= pO }.
fn prime_inverse_numerator(
    table: &[Vec<Vec<BigInt>>],
    prime: &Ideal,
    p: &BigInt,
    n: usize,
) -> Result<Mat> {
    // Constraint: for each generator g of P and coordinate t:
    // sum_j y_j (b_j g)_t = 0 mod p.
    let mut rows: Mat = Vec::with_capacity(n * n);
    for g in &prime.basis {
        let mut per_j: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for j in 0..n {
            let mut prod = vec![BigInt::zero(); n];
            for k in 0..n {
                if g[k].is_zero() {
                    continue;
                }
                for (t, c) in table[j][k].iter().enumerate() {
                    prod[t] += &g[k] * c;
                }
            }
            per_j.push(prod);
        }
        for t in 0..n {
            rows.push((0..n).map(|j| per_j[j][t].mod_floor(p)).collect());
        }
    }
    let kernel = linalg::kernel_mod_p(&rows, p);
    let mut urows = kernel;
    for i in 0..n {
        let mut r = vec![BigInt::zero(); n];
        r[i] = p.clone();
        urows.push(r);
    }
    Ok(linalg::hnf(&urows))
}

/// v_P(I) by repeated exact division: multiply by U and test whether every
/// HNF entry is divisible by p (i.e. I * P^-1 still integral).
fn valuation_with_inverse(
    table: &[Vec<Vec<BigInt>>],
    ideal: &Ideal,
    inv_num: &Mat,
    p: &BigInt,
) -> Result<u32> {
    let n = ideal.basis.len();
    let mut cur = ideal.basis.clone();
    let mut v = 0u32;
    loop {
        // Product lattice cur * U.
        let mut rows: Mat = Vec::with_capacity(n * n);
        for x in &cur {
            for y in inv_num {
                let mut r = vec![BigInt::zero(); n];
                for i in 0..n {
                    if x[i].is_zero() {
                        continue;
                    }
                    for j in 0..n {
                        if y[j].is_zero() {
                            continue;
                        }
                        let s = &x[i] * &y[j];
                        for (t, c) in table[i][j].iter().enumerate() {
                            r[t] += &s * c;
                        }
                    }
                }
                rows.push(r);
            }
        }
        let h = linalg::hnf(&rows);
        if h.len() != n {
            return Err(Error::internal("ideal product lost rank"));
        }
        let divisible = h
            .iter()
            .all(|row| row.iter().all(|x| (x % p).is_zero()));
        if !divisible {
            return Ok(v);
        }
        cur = h
            .into_iter()
            .map(|row| row.into_iter().map(|x| x / p).collect())
            .collect();
        v += 1;
        if v > 64 * n as u32 {
            return Err(Error::internal("valuation failed to terminate"));
        }
    }
}

/// v_P(I) for a prime produced by [`factor_prime`].
pub fn ideal_valuation(
    alg: &impl Algebra,
    order: &Order,
    ideal: &Ideal,
    prime: &PrimeIdeal,
) -> Result<u32> {
    let table = order.mult_table(alg)?;
    valuation_with_inverse(&table, ideal, &prime.inv_num, &prime.p)
}

/// Exact valuation of a principal ideal (x) at a prime.
pub fn element_valuation(
    alg: &impl Algebra,
    order: &Order,
    x: &[BigInt],
    prime: &PrimeIdeal,
) -> Result<u32> {
    let ideal = ideal_from_element(alg, order, x)?;
    ideal_valuation(alg, order, &ideal, prime)
}

/// Valuation at a prime of an element given by algebra coordinates that
/// need not lie in the order: clear denominators with t and use
/// v(x) = v(t·x) − e·v_p(t). Valid whenever t·x lies in the order and the
/// order is p-maximal at `prime.p` (so that valuations are well defined).
pub fn element_valuation_rational(
    alg: &impl Algebra,
    order: &Order,
    x: &[BigRational],
    prime: &PrimeIdeal,
) -> Result<i64> {
    let oc = order.coords_rational(x);
    let mut t = BigInt::one();
    for c in &oc {
        t = t.lcm(c.denom());
    }
    let tx: Vec<BigRational> = x.iter().map(|c| c * BigRational::from_integer(t.clone())).collect();
    let y = order
        .coords(&tx)
        .ok_or_else(|| Error::internal("denominator clearing failed"))?;
    let v_num = element_valuation(alg, order, &y, prime)? as i64;
    let v_t = crate::arith::valuation(&t, &prime.p) as i64;
    Ok(v_num - i64::from(prime.e) * v_t)
}

/// Enlarge `order` to one that is p-maximal at every prime whose square
/// divides the given discriminant, factoring within `budget`. This yields
/// the full maximal order when the factorization completes; otherwise an
/// honest budget error (never a silently wrong order).
pub fn maximal_order(
    alg: &impl Algebra,
    order: &Order,
    budget: &crate::arith::Budget,
) -> Result<Order> {
    let disc = order.disc(alg);
    let fac = crate::arith::factorize(&disc.abs(), budget);
    if !fac.is_complete() || !fac.certified {
        return Err(Error::FactorBudget(disc));
    }
    let mut o = order.clone();
    for (p, e) in &fac.factors {
        if *e >= 2 {
            o = p_maximalize(alg, &o, p)?;
        }
    }
    Ok(o)
}

/// Power-basis algebra structure of a cubic field.
impl Algebra for crate::cubic::CubicField {
    fn dim(&self) -> usize {
        3
    }
    fn one_coords(&self) -> Vec<BigRational> {
        vec![BigRational::one(), BigRational::zero(), BigRational::zero()]
    }
    fn mul_coords(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        use crate::cubic::KElt;
        let x = KElt::new(a[0].clone(), a[1].clone(), a[2].clone());
        let y = KElt::new(b[0].clone(), b[1].clone(), b[2].clone());
        let z = self.mul(&x, &y);
        z.c.to_vec()
    }
    fn trace_coords(&self, x: &[BigRational]) -> BigRational {
        use crate::cubic::KElt;
        self.trace(&KElt::new(x[0].clone(), x[1].clone(), x[2].clone()))
    }
}
