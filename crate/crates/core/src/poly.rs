//! Sparse multivariate polynomials with exact rational coefficients,
//! polynomial vector fields and matrix-valued polynomials.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};

use crate::linalg::Mat;
use crate::scalar::{factorial, powi, Scalar, Q};

/// Exponent vector of a monomial.
///
/// Ordered by total degree first, then reverse-lexicographically on the
/// entries so that `(1,0)` precedes `(0,1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// Unit vector `e_i`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Total degree `|α|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` when every entry stays non-negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Self)
    }

    /// `α! = Π α_i!`.
    pub fn factorial(&self) -> Q {
        self.0.iter().fold(Q::one(), |acc, &a| acc * factorial(a))
    }

    /// Comma-separated key used in JSON, e.g. `"1,0"`.
    pub fn key(&self) -> String {
        self.0
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_key(s: &str) -> Option<Self> {
        if s.trim().is_empty() {
            return Some(Self(Vec::new()));
        }
        s.split(',')
            .map(|p| p.trim().parse::<u32>().ok())
            .collect::<Option<Vec<_>>>()
            .map(Self)
    }

    /// All multi-indices of dimension `n` with order at most `k`, in
    /// graded order.
    pub fn all_up_to(n: usize, k: u32) -> Vec<Self> {
        let mut out = Vec::new();
        for d in 0..=k {
            let mut cur = vec![0u32; n];
            push_degree(&mut out, &mut cur, 0, d);
        }
        out
    }
}

// Emits every vector of the given degree, first entry descending.
fn push_degree(out: &mut Vec<MultiIndex>, cur: &mut Vec<u32>, pos: usize, left: u32) {
    let n = cur.len();
    if n == 0 {
        if left == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    if pos == n - 1 {
        cur[pos] = left;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for a in (0..=left).rev() {
        cur[pos] = a;
        push_degree(out, cur, pos + 1, left - a);
    }
    cur[pos] = 0;
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in `nvars` variables over `Q`. Zero coefficients are never
/// stored, so structural equality is polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<MultiIndex, Q>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        Self::monomial(nvars, MultiIndex::zero(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(nvars, MultiIndex::unit(nvars, i), Q::one())
    }

    pub fn monomial(nvars: usize, alpha: MultiIndex, c: Q) -> Self {
        assert_eq!(alpha.dim(), nvars, "monomial dimension");
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(alpha, c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (MultiIndex, Q)>) -> Self {
        let mut p = Self::zero(nvars);
        for (a, c) in terms {
            p.add_term(a, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::order).max()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Q {
        self.terms.get(alpha).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: Q) {
        assert_eq!(alpha.dim(), self.nvars, "monomial dimension");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(alpha) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "polynomial arity");
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(a, v)| (a.clone(), v * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "polynomial arity");
        let mut out = Self::zero(self.nvars);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(a.add(b), x * y);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `∂/∂x_i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (a, c) in &self.terms {
            let e = a.0[i];
            if e == 0 {
                continue;
            }
            let mut b = a.clone();
            b.0[i] -= 1;
            out.add_term(b, c * Q::from_integer(e.into()));
        }
        out
    }

    /// `∂^α`.
    pub fn derivative_multi(&self, alpha: &MultiIndex) -> Self {
        let mut p = self.clone();
        for (i, &e) in alpha.0.iter().enumerate() {
            for _ in 0..e {
                p = p.derivative(i);
            }
        }
        p
    }

    /// Evaluates at a point of any scalar field.
    pub fn eval<T: Scalar>(&self, x: &[T]) -> T {
        assert_eq!(x.len(), self.nvars, "evaluation point dimension");
        let mut acc = T::zero();
        for (a, c) in &self.terms {
            let mut m = T::from_rational(c);
            for (xi, &e) in x.iter().zip(&a.0) {
                if e > 0 {
                    m = m * powi(xi, e);
                }
            }
            acc = acc + m;
        }
        acc
    }

    /// Substitutes polynomials `args[i]` for the variables.
    pub fn compose(&self, args: &[Poly]) -> Poly {
        assert_eq!(args.len(), self.nvars, "composition arity");
        let target = args.first().map_or(0, Poly::nvars);
        let mut out = Poly::zero(target);
        for (a, c) in &self.terms {
            let mut m = Poly::constant(target, c.clone());
            for (p, &e) in args.iter().zip(&a.0) {
                if e > 0 {
                    m = m.mul(&p.pow(e));
                }
            }
            out = out.add(&m);
        }
        out
    }

    /// Drops every term of degree above `k`.
    pub fn truncate(&self, k: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| a.order() <= k)
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect(),
        }
    }

    /// The polynomial `x ↦ p(base + x)`, exact.
    pub fn shift(&self, base: &[Q]) -> Poly {
        let args: Vec<Poly> = base
            .iter()
            .enumerate()
            .map(|(i, b)| Poly::var(self.nvars, i).add(&Poly::constant(self.nvars, b.clone())))
            .collect();
        self.compose(&args)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (a, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, &e) in a.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{i}")?,
                    _ => write!(f, "*x{i}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

/// Vector field `Σ θ^i ∂/∂x_i` with polynomial components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyVectorField {
    components: Vec<Poly>,
}

impl PolyVectorField {
    pub fn new(components: Vec<Poly>) -> Self {
        let n = components.len();
        assert!(
            components.iter().all(|p| p.nvars() == n),
            "vector field components must live in the ambient dimension"
        );
        Self { components }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(vec![Poly::zero(n); n])
    }

    /// Coordinate field `∂/∂x_i`.
    pub fn coordinate(n: usize, i: usize) -> Self {
        let mut c = vec![Poly::zero(n); n];
        c[i] = Poly::one(n);
        Self::new(c)
    }

    /// Euler-type field `x_i ∂/∂x_i`.
    pub fn scaling(n: usize, i: usize) -> Self {
        let mut c = vec![Poly::zero(n); n];
        c[i] = Poly::var(n, i);
        Self::new(c)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    /// Lie derivative of a function, `ϑ(θ)f = Σ θ^i ∂_i f`.
    pub fn apply(&self, f: &Poly) -> Poly {
        let n = self.dim();
        let mut out = Poly::zero(n);
        for (i, c) in self.components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            out = out.add(&c.mul(&f.derivative(i)));
        }
        out
    }

    /// `[θ, θ′]^i = θ(θ′^i) − θ′(θ^i)`.
    pub fn bracket(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "vector field dimension");
        let comps = (0..self.dim())
            .map(|i| {
                self.apply(&other.components[i])
                    .sub(&other.apply(&self.components[i]))
            })
            .collect();
        Self::new(comps)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(b))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::new(self.components.iter().map(|p| p.scale(c)).collect())
    }

    /// Multiplication by a function.
    pub fn mul_fn(&self, f: &Poly) -> Self {
        Self::new(self.components.iter().map(|p| p.mul(f)).collect())
    }

    pub fn eval<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        self.components.iter().map(|p| p.eval(x)).collect()
    }
}

/// Matrix-valued polynomial `M → gl(m)`, entries row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixPoly {
    nvars: usize,
    size: usize,
    entries: Vec<Poly>,
}

impl MatrixPoly {
    pub fn new(nvars: usize, size: usize, entries: Vec<Poly>) -> Self {
        assert_eq!(entries.len(), size * size, "matrix polynomial entry count");
        assert!(entries.iter().all(|p| p.nvars() == nvars), "entry arity");
        Self {
            nvars,
            size,
            entries,
        }
    }

    pub fn zero(nvars: usize, size: usize) -> Self {
        Self::new(nvars, size, vec![Poly::zero(nvars); size * size])
    }

    pub fn identity(nvars: usize, size: usize) -> Self {
        Self::constant(&Mat::identity(size), nvars)
    }

    pub fn constant(m: &Mat<Q>, nvars: usize) -> Self {
        assert!(m.is_square());
        let entries = m
            .as_slice()
            .iter()
            .map(|c| Poly::constant(nvars, c.clone()))
            .collect();
        Self::new(nvars, m.rows(), entries)
    }

    /// `f · M` for a scalar polynomial `f` and constant matrix `M`.
    pub fn from_scalar(f: &Poly, m: &Mat<Q>) -> Self {
        let entries = m.as_slice().iter().map(|c| f.scale(c)).collect();
        Self::new(f.nvars(), m.rows(), entries)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entries(&self) -> &[Poly] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.size + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        Self::new(self.nvars, self.size, self.entries.iter().map(f).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, Poly::add)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, Poly::sub)
    }

    pub fn scale(&self, c: &Q) -> Self {
        self.map(|p| p.scale(c))
    }

    pub fn mul_fn(&self, f: &Poly) -> Self {
        self.map(|p| p.mul(f))
    }

    fn zip(&self, other: &Self, op: impl Fn(&Poly, &Poly) -> Poly) -> Self {
        assert_eq!((self.nvars, self.size), (other.nvars, other.size));
        Self::new(
            self.nvars,
            self.size,
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| op(a, b))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!((self.nvars, self.size), (other.nvars, other.size));
        let m = self.size;
        let mut entries = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let mut acc = Poly::zero(self.nvars);
                for l in 0..m {
                    let a = self.entry(i, l);
                    let b = other.entry(l, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                entries.push(acc);
            }
        }
        Self::new(self.nvars, m, entries)
    }

    /// Pointwise `AB − BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Entrywise Lie derivative along a vector field.
    pub fn derive_along(&self, theta: &PolyVectorField) -> Self {
        self.map(|p| theta.apply(p))
    }

    /// Pointwise product with a vector of polynomials.
    pub fn mul_vec(&self, v: &[Poly]) -> Vec<Poly> {
        assert_eq!(v.len(), self.size);
        (0..self.size)
            .map(|i| {
                (0..self.size).fold(Poly::zero(self.nvars), |acc, j| {
                    acc.add(&self.entry(i, j).mul(&v[j]))
                })
            })
            .collect()
    }

    pub fn eval<T: Scalar>(&self, x: &[T]) -> Mat<T> {
        Mat::from_vec(
            self.size,
            self.size,
            self.entries.iter().map(|p| p.eval(x)).collect(),
        )
    }

    pub fn derivative_multi(&self, alpha: &MultiIndex) -> Self {
        self.map(|p| p.derivative_multi(alpha))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    fn x() -> Poly {
        Poly::var(1, 0)
    }

    #[test]
    fn graded_order_enumeration() {
        let all = MultiIndex::all_up_to(2, 2);
        let keys: Vec<String> = all.iter().map(MultiIndex::key).collect();
        assert_eq!(keys, ["0,0", "1,0", "0,1", "2,0", "1,1", "0,2"]);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all);
        assert_eq!(MultiIndex::all_up_to(3, 4).len(), 35);
    }

    #[test]
    fn arithmetic_and_derivatives() {
        let p = x().mul(&x()).add(&x().scale(&qi(2))); // x² + 2x
        assert_eq!(p.derivative(0), x().scale(&qi(2)).add(&Poly::constant(1, qi(2))));
        assert_eq!(p.eval(&[qi(1)]), qi(3));
        assert_eq!(p.eval(&[0.5f64]), 1.25);
        assert!(p.sub(&p).is_zero());
        assert_eq!(p.shift(&[qi(1)]).coeff(&MultiIndex(vec![1])), qi(4));
    }

    #[test]
    fn vector_field_bracket_of_translation_and_scaling() {
        let dx = PolyVectorField::coordinate(1, 0);
        let xdx = PolyVectorField::scaling(1, 0);
        assert_eq!(dx.bracket(&xdx), dx);
        assert_eq!(xdx.bracket(&dx), dx.scale(&qi(-1)));
        let x2dx = PolyVectorField::new(vec![x().mul(&x())]);
        assert_eq!(xdx.bracket(&x2dx), x2dx);
    }

    #[test]
    fn matrix_commutator_pointwise() {
        let e12 = Mat::from_rows(vec![vec![qi(0), qi(1)], vec![qi(0), qi(0)]]);
        let e21 = e12.transpose();
        let a = MatrixPoly::from_scalar(&x(), &e12);
        let b = MatrixPoly::constant(&e21, 1);
        let c = a.commutator(&b);
        let h = &Mat::unit(2, 0, 0) - &Mat::unit(2, 1, 1);
        assert_eq!(c, MatrixPoly::from_scalar(&x(), &h));
        assert_eq!(c.eval(&[q(1, 2)]), h.scale(&q(1, 2)));
    }
}
