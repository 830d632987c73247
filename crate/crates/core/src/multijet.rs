//! Truncated multivariate Taylor polynomials (k-jets of maps `Q^n → Q^m`).
//!
//! A jet is stored densely over the graded monomial basis of the local
//! variable `u = x − base`; the constant coefficient is the target value.
//! All operations are exact when the scalar is [`Q`].

use std::collections::BTreeMap;
use std::sync::Arc;

use num::Zero;
use thiserror::Error;

use crate::basis::{basis, compose_dense, Basis};
use crate::linalg::Mat;
use crate::poly::{MultiIndex, Poly};
use crate::scalar::{Scalar, Q};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-composable: α(g) ≠ β(h) (outer base {outer_base}, inner value {inner_value})")]
    NonComposable {
        outer_base: String,
        inner_value: String,
    },
    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(u32, u32),
    #[error("base point mismatch: operands are jets at different points")]
    BaseMismatch,
    #[error("singular Jacobian: the jet is not an invertible element of the jet groupoid")]
    Singular,
    #[error("projection order {h} out of range 0..={k}")]
    OrderOutOfRange { h: u32, k: u32 },
    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),
}

pub type JetResult<T> = Result<T, JetError>;

/// The k-jet at `base` of a map `Q^n → Q^m`.
#[derive(Clone, Debug)]
pub struct TruncatedJet<T = Q> {
    basis: Arc<Basis>,
    m: usize,
    base: Vec<T>,
    comps: Vec<Vec<T>>,
}

impl<T: Scalar> PartialEq for TruncatedJet<T> {
    fn eq(&self, other: &Self) -> bool {
        self.n() == other.n()
            && self.k() == other.k()
            && self.m == other.m
            && self.base == other.base
            && self.comps == other.comps
    }
}

pub(crate) fn render_point<T: Scalar>(p: &[T]) -> String {
    let parts: Vec<String> = p.iter().map(Scalar::render).collect();
    format!("({})", parts.join(", "))
}

impl<T: Scalar> TruncatedJet<T> {
    /// Builds a jet from its value and the coefficients with `1 ≤ |α| ≤ k`.
    pub fn new(
        n: usize,
        m: usize,
        k: u32,
        base: Vec<T>,
        value: Vec<T>,
        coeffs: BTreeMap<MultiIndex, Vec<T>>,
    ) -> JetResult<Self> {
        if n == 0 || m == 0 {
            return Err(JetError::Dimension("dimensions must be positive".into()));
        }
        if base.len() != n {
            return Err(JetError::Dimension(format!(
                "base has length {}, expected {n}",
                base.len()
            )));
        }
        if value.len() != m {
            return Err(JetError::Dimension(format!(
                "value has length {}, expected {m}",
                value.len()
            )));
        }
        let b = basis(n, k);
        let mut comps: Vec<Vec<T>> = value.into_iter().map(|v| b.constant(v)).collect();
        for (alpha, c) in coeffs {
            if alpha.dim() != n {
                return Err(JetError::InvalidCoefficient(format!(
                    "multi-index {} has dimension {}, expected {n}",
                    alpha.key(),
                    alpha.dim()
                )));
            }
            let ord = alpha.order();
            if ord == 0 || ord > k {
                return Err(JetError::InvalidCoefficient(format!(
                    "multi-index {} has order {ord}, allowed 1..={k}",
                    alpha.key()
                )));
            }
            if c.len() != m {
                return Err(JetError::InvalidCoefficient(format!(
                    "coefficient {} has length {}, expected {m}",
                    alpha.key(),
                    c.len()
                )));
            }
            let idx = b.index_of(&alpha).expect("order checked");
            for (comp, v) in comps.iter_mut().zip(c) {
                comp[idx] = v;
            }
        }
        Ok(Self {
            basis: b,
            m,
            base,
            comps,
        })
    }

    pub(crate) fn from_dense(basis: Arc<Basis>, base: Vec<T>, comps: Vec<Vec<T>>) -> Self {
        debug_assert_eq!(base.len(), basis.n);
        debug_assert!(comps.iter().all(|c| c.len() == basis.len()));
        Self {
            m: comps.len(),
            basis,
            base,
            comps,
        }
    }

    /// The identity jet at `base`.
    pub fn identity(base: Vec<T>, k: u32) -> Self {
        let n = base.len();
        let b = basis(n, k);
        let comps = (0..n)
            .map(|i| {
                let mut c = b.constant(base[i].clone());
                if k >= 1 {
                    c[b.var(i)] = T::one();
                }
                c
            })
            .collect();
        Self::from_dense(b, base, comps)
    }

    /// The jet of the affine map `u ↦ value + J u` at `base`.
    pub fn affine(base: Vec<T>, value: Vec<T>, jacobian: &Mat<T>, k: u32) -> JetResult<Self> {
        let n = base.len();
        let m = value.len();
        if jacobian.rows() != m || jacobian.cols() != n {
            return Err(JetError::Dimension("Jacobian shape".into()));
        }
        let b = basis(n, k);
        let comps = (0..m)
            .map(|i| {
                let mut c = b.constant(value[i].clone());
                if k >= 1 {
                    for j in 0..n {
                        c[b.var(j)] = jacobian[(i, j)].clone();
                    }
                }
                c
            })
            .collect();
        Ok(Self::from_dense(b, base, comps))
    }

    pub fn n(&self) -> usize {
        self.basis.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> u32 {
        self.basis.k
    }

    pub fn base(&self) -> &[T] {
        &self.base
    }

    pub fn value(&self) -> Vec<T> {
        self.comps.iter().map(|c| c[0].clone()).collect()
    }

    /// Coefficient vector (length `m`) of the monomial `α`.
    pub fn coeff(&self, alpha: &MultiIndex) -> Vec<T> {
        match self.basis.index_of(alpha) {
            Some(i) => self.comps.iter().map(|c| c[i].clone()).collect(),
            None => vec![T::zero(); self.m],
        }
    }

    /// The non-zero coefficients with `1 ≤ |α| ≤ k`, in graded order.
    pub fn coeffs(&self) -> BTreeMap<MultiIndex, Vec<T>> {
        let mut out = BTreeMap::new();
        for (i, alpha) in self.basis.monos.iter().enumerate().skip(1) {
            let v: Vec<T> = self.comps.iter().map(|c| c[i].clone()).collect();
            if v.iter().any(|x| !x.is_zero()) {
                out.insert(alpha.clone(), v);
            }
        }
        out
    }

    /// The `m × n` matrix of first-order coefficients.
    pub fn jacobian(&self) -> Mat<T> {
        let n = self.n();
        let mut j = Mat::zeros(self.m, n);
        if self.k() >= 1 {
            for (r, c) in self.comps.iter().enumerate() {
                for v in 0..n {
                    j[(r, v)] = c[self.basis.var(v)].clone();
                }
            }
        }
        j
    }

    /// Square with a nonsingular Jacobian (order 0 jets are square only).
    pub fn is_invertible(&self) -> bool {
        self.n() == self.m && (self.k() == 0 || !self.jacobian().determinant().is_zero())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.base.clone(), self.k())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> TruncatedJet<U> {
        TruncatedJet {
            basis: self.basis.clone(),
            m: self.m,
            base: self.base.iter().map(&f).collect(),
            comps: self
                .comps
                .iter()
                .map(|c| c.iter().map(&f).collect())
                .collect(),
        }
    }

    /// Replaces the base point, keeping every coefficient.
    pub fn with_base(&self, base: Vec<T>) -> Self {
        assert_eq!(base.len(), self.n());
        Self {
            base,
            ..self.clone()
        }
    }

    /// Largest coefficient magnitude, value included.
    pub fn max_norm(&self) -> f64 {
        self.comps
            .iter()
            .flatten()
            .map(Scalar::magnitude)
            .fold(0.0, f64::max)
    }

    /// Coefficients as a flat vector: component-major over the basis.
    pub fn flat(&self) -> Vec<T> {
        self.comps.iter().flatten().cloned().collect()
    }

    pub(crate) fn from_flat(&self, flat: &[T]) -> Self {
        let len = self.basis.len();
        let comps = flat.chunks(len).map(<[T]>::to_vec).collect();
        Self::from_dense(self.basis.clone(), self.base.clone(), comps)
    }

    fn check_same_shape(&self, other: &Self) -> JetResult<()> {
        if self.n() != other.n() || self.m != other.m {
            return Err(JetError::Dimension(format!(
                "({}→{}) vs ({}→{})",
                self.n(),
                self.m,
                other.n(),
                other.m
            )));
        }
        if self.k() != other.k() {
            return Err(JetError::OrderMismatch(self.k(), other.k()));
        }
        if self.base != other.base {
            return Err(JetError::BaseMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> JetResult<Self> {
        self.check_same_shape(other)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect())
            .collect();
        Ok(Self::from_dense(self.basis.clone(), self.base.clone(), comps))
    }

    pub fn sub(&self, other: &Self) -> JetResult<Self> {
        self.add(&other.scale(&-T::one()))
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map_coeffs(|x| x.clone() * c.clone())
    }

    fn map_coeffs(&self, f: impl Fn(&T) -> T) -> Self {
        let comps = self
            .comps
            .iter()
            .map(|c| c.iter().map(&f).collect())
            .collect();
        Self::from_dense(self.basis.clone(), self.base.clone(), comps)
    }

    /// Truncated product of scalar-valued jets (`m = 1`).
    pub fn mul(&self, other: &Self) -> JetResult<Self> {
        self.check_same_shape(other)?;
        if self.m != 1 {
            return Err(JetError::Dimension(
                "pointwise product needs scalar-valued jets".into(),
            ));
        }
        let c = self.basis.mul(&self.comps[0], &other.comps[0]);
        Ok(Self::from_dense(self.basis.clone(), self.base.clone(), vec![c]))
    }

    /// Multiplies every component by the scalar jet `f` (`f.m = 1`).
    pub fn mul_scalar_jet(&self, f: &Self) -> JetResult<Self> {
        if f.m != 1 || f.n() != self.n() || f.k() != self.k() {
            return Err(JetError::Dimension("scalar jet shape".into()));
        }
        if f.base != self.base {
            return Err(JetError::BaseMismatch);
        }
        let comps = self
            .comps
            .iter()
            .map(|c| self.basis.mul(&f.comps[0], c))
            .collect();
        Ok(Self::from_dense(self.basis.clone(), self.base.clone(), comps))
    }

    /// Keeps orders `≤ h`.
    pub fn project(&self, h: u32) -> JetResult<Self> {
        if h > self.k() {
            return Err(JetError::OrderOutOfRange { h, k: self.k() });
        }
        let b = basis(self.n(), h);
        let len = b.len();
        let comps = self.comps.iter().map(|c| c[..len].to_vec()).collect();
        Ok(Self::from_dense(b, self.base.clone(), comps))
    }

    /// Displacement parts `c − c(0)` of every component.
    fn displacement(&self) -> Vec<Vec<T>> {
        self.comps
            .iter()
            .map(|c| {
                let mut d = c.clone();
                d[0] = T::zero();
                d
            })
            .collect()
    }
}

/// Taylor jet at `base` of the polynomial map with the given components.
pub fn jet_of_polynomial<T: Scalar>(p: &[Poly], base: &[T], k: u32) -> JetResult<TruncatedJet<T>> {
    let n = base.len();
    if n == 0 || p.is_empty() {
        return Err(JetError::Dimension("empty map or base point".into()));
    }
    if let Some(bad) = p.iter().find(|c| c.nvars() != n) {
        return Err(JetError::Dimension(format!(
            "polynomial in {} variables evaluated at a point of dimension {n}",
            bad.nvars()
        )));
    }
    let b = basis(n, k);
    let comps = p.iter().map(|c| b.taylor(c, base)).collect();
    Ok(TruncatedJet::from_dense(b, base.to_vec(), comps))
}

/// Truncated composition `outer ∘ inner`, a jet at `inner.base`.
pub fn jet_compose<T: Scalar>(
    outer: &TruncatedJet<T>,
    inner: &TruncatedJet<T>,
) -> JetResult<TruncatedJet<T>> {
    if outer.n() != inner.m {
        return Err(JetError::Dimension(format!(
            "outer source dimension {} vs inner target dimension {}",
            outer.n(),
            inner.m
        )));
    }
    if outer.k() != inner.k() {
        return Err(JetError::OrderMismatch(outer.k(), inner.k()));
    }
    let inner_value = inner.value();
    if outer.base != inner_value {
        return Err(JetError::NonComposable {
            outer_base: render_point(&outer.base),
            inner_value: render_point(&inner_value),
        });
    }
    let comps = compose_dense(
        &outer.basis,
        &outer.comps,
        &inner.basis,
        &inner.displacement(),
    );
    Ok(TruncatedJet::from_dense(
        inner.basis.clone(),
        inner.base.clone(),
        comps,
    ))
}

/// Compositional inverse, solved degree by degree from the exact
/// Jacobian inverse.
pub fn jet_invert<T: Scalar>(a: &TruncatedJet<T>) -> JetResult<TruncatedJet<T>> {
    let n = a.n();
    if n != a.m {
        return Err(JetError::Dimension("only square jets are invertible".into()));
    }
    let k = a.k();
    let b = a.basis.clone();
    let value = a.value();
    if k == 0 {
        let comps = a.base.iter().map(|x| b.constant(x.clone())).collect();
        return Ok(TruncatedJet::from_dense(b, value, comps));
    }
    let jinv = a.jacobian().inverse().ok_or(JetError::Singular)?;

    // Nonlinear part N (degrees ≥ 2) of the displacement.
    let nonlinear: Vec<Vec<T>> = a
        .comps
        .iter()
        .map(|c| {
            let mut d = c.clone();
            for (i, deg) in b.degree.iter().enumerate() {
                if *deg < 2 {
                    d[i] = T::zero();
                }
            }
            d
        })
        .collect();
    let apply_jinv = |v: &[Vec<T>]| -> Vec<Vec<T>> {
        (0..n)
            .map(|r| {
                let mut out = b.zeros::<T>();
                for (c, vc) in v.iter().enumerate() {
                    let coef = &jinv[(r, c)];
                    if coef.is_zero() {
                        continue;
                    }
                    for (o, x) in out.iter_mut().zip(vc) {
                        *o = o.clone() + coef.clone() * x.clone();
                    }
                }
                out
            })
            .collect()
    };
    let ident: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let mut c = b.zeros::<T>();
            c[b.var(i)] = T::one();
            c
        })
        .collect();
    // w ← J⁻¹(v − N(w)); iteration j fixes degree j + 1.
    let mut w = apply_jinv(&ident);
    for _ in 1..k {
        let nw = compose_dense(&b, &nonlinear, &b, &w);
        let rhs: Vec<Vec<T>> = ident
            .iter()
            .zip(&nw)
            .map(|(v, x)| v.iter().zip(x).map(|(a, c)| a.clone() - c.clone()).collect())
            .collect();
        w = apply_jinv(&rhs);
    }
    let comps = w
        .into_iter()
        .zip(&a.base)
        .map(|(mut c, x0)| {
            c[0] = x0.clone();
            c
        })
        .collect();
    Ok(TruncatedJet::from_dense(b, value, comps))
}

/// Jet of a matrix-valued map `Q^n → Q^{s×s}`, entries row-major.
#[derive(Clone, Debug)]
pub struct MatrixJet<T = Q> {
    size: usize,
    jet: TruncatedJet<T>,
}

impl<T: Scalar> PartialEq for MatrixJet<T> {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size && self.jet == other.jet
    }
}

impl<T: Scalar> MatrixJet<T> {
    pub fn from_jet(size: usize, jet: TruncatedJet<T>) -> JetResult<Self> {
        if jet.m() != size * size {
            return Err(JetError::Dimension(format!(
                "matrix jet of size {size} needs {} components, got {}",
                size * size,
                jet.m()
            )));
        }
        Ok(Self { size, jet })
    }

    pub fn identity(base: Vec<T>, size: usize, k: u32) -> Self {
        let b = basis(base.len(), k);
        let comps = (0..size * size)
            .map(|e| {
                let c = if e / size == e % size { T::one() } else { T::zero() };
                b.constant(c)
            })
            .collect();
        Self {
            size,
            jet: TruncatedJet::from_dense(b, base, comps),
        }
    }

    /// Jet of a matrix polynomial at `base`.
    pub fn of_matrix_poly(p: &crate::poly::MatrixPoly, base: &[T], k: u32) -> JetResult<Self> {
        let jet = jet_of_polynomial(p.entries(), base, k)?;
        Self::from_jet(p.size(), jet)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn jet(&self) -> &TruncatedJet<T> {
        &self.jet
    }

    pub fn into_jet(self) -> TruncatedJet<T> {
        self.jet
    }

    pub fn base(&self) -> &[T] {
        self.jet.base()
    }

    pub fn k(&self) -> u32 {
        self.jet.k()
    }

    pub fn value(&self) -> Mat<T> {
        Mat::from_vec(self.size, self.size, self.jet.value())
    }

    /// Coefficient matrix of the monomial `α`.
    pub fn coeff(&self, alpha: &MultiIndex) -> Mat<T> {
        Mat::from_vec(self.size, self.size, self.jet.coeff(alpha))
    }

    fn entry(&self, i: usize, j: usize) -> &[T] {
        &self.jet.comps[i * self.size + j]
    }

    fn with_comps(&self, comps: Vec<Vec<T>>) -> Self {
        Self {
            size: self.size,
            jet: TruncatedJet::from_dense(self.jet.basis.clone(), self.jet.base.clone(), comps),
        }
    }

    pub fn add(&self, other: &Self) -> JetResult<Self> {
        Ok(Self {
            size: self.size,
            jet: self.jet.add(&other.jet)?,
        })
    }

    pub fn sub(&self, other: &Self) -> JetResult<Self> {
        Ok(Self {
            size: self.size,
            jet: self.jet.sub(&other.jet)?,
        })
    }

    pub fn scale(&self, c: &T) -> Self {
        Self {
            size: self.size,
            jet: self.jet.scale(c),
        }
    }

    /// Pointwise matrix product, truncated.
    pub fn matmul(&self, other: &Self) -> JetResult<Self> {
        if self.size != other.size {
            return Err(JetError::Dimension("matrix sizes differ".into()));
        }
        self.jet.check_same_shape(&other.jet)?;
        let s = self.size;
        let b = &self.jet.basis;
        let mut comps = Vec::with_capacity(s * s);
        for i in 0..s {
            for j in 0..s {
                let mut acc = b.zeros::<T>();
                for l in 0..s {
                    let p = b.mul(self.entry(i, l), other.entry(l, j));
                    for (a, x) in acc.iter_mut().zip(p) {
                        *a = a.clone() + x;
                    }
                }
                comps.push(acc);
            }
        }
        Ok(self.with_comps(comps))
    }

    /// Pointwise `AB − BA`.
    pub fn commutator(&self, other: &Self) -> JetResult<Self> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    /// Pointwise matrix inverse, via a finite Neumann series around the
    /// value.
    pub fn inverse(&self) -> JetResult<Self> {
        let v0inv = self.value().inverse().ok_or(JetError::Singular)?;
        let c0 = Self::constant_like(self, &v0inv);
        let mut nil = self.clone();
        for c in nil.jet.comps.iter_mut() {
            c[0] = T::zero();
        }
        // (V0 + N)⁻¹ = Σ_j (−V0⁻¹N)^j V0⁻¹
        let step = c0.matmul(&nil)?.scale(&-T::one());
        let mut term = Self::identity(self.jet.base.clone(), self.size, self.k());
        let mut acc = term.clone();
        for _ in 0..self.k() {
            term = term.matmul(&step)?;
            acc = acc.add(&term)?;
        }
        acc.matmul(&c0)
    }

    fn constant_like(like: &Self, m: &Mat<T>) -> Self {
        let b = &like.jet.basis;
        let comps = m.as_slice().iter().map(|x| b.constant(x.clone())).collect();
        like.with_comps(comps)
    }

    /// Right action of a jet of a map: `γ · A`, a jet at `A.base`.
    pub fn compose_with(&self, a: &TruncatedJet<T>) -> JetResult<Self> {
        Ok(Self {
            size: self.size,
            jet: jet_compose(&self.jet, a)?,
        })
    }

    /// Pointwise matrix exponential by scaling and squaring with a
    /// truncated Taylor series of order 12.
    pub fn exp(&self) -> JetResult<Self> {
        const SERIES_ORDER: u32 = 12;
        let norm = self.jet.max_norm() * self.size as f64;
        let mut squarings = 0u32;
        let mut scale = 1.0f64;
        while norm / scale > 0.5 {
            scale *= 2.0;
            squarings += 1;
        }
        let two = T::one() + T::one();
        let mut inv_scale = T::one();
        for _ in 0..squarings {
            inv_scale = inv_scale / two.clone();
        }
        let a = self.scale(&inv_scale);
        let mut term = Self::identity(self.jet.base.clone(), self.size, self.k());
        let mut acc = term.clone();
        let mut j = T::zero();
        for _ in 1..=SERIES_ORDER {
            j = j + T::one();
            term = term.matmul(&a)?.scale(&(T::one() / j.clone()));
            if term.jet.comps.iter().flatten().all(Zero::is_zero) {
                break;
            }
            acc = acc.add(&term)?;
        }
        for _ in 0..squarings {
            acc = acc.matmul(&acc)?;
        }
        Ok(acc)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> MatrixJet<U> {
        MatrixJet {
            size: self.size,
            jet: self.jet.map(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    fn x() -> Poly {
        Poly::var(1, 0)
    }

    fn jet1(base: i64, value: i64, c: &[(u32, Q)], k: u32) -> TruncatedJet {
        let coeffs = c
            .iter()
            .map(|(e, v)| (MultiIndex(vec![*e]), vec![v.clone()]))
            .collect();
        TruncatedJet::new(1, 1, k, vec![qi(base)], vec![qi(value)], coeffs).unwrap()
    }

    #[test]
    fn taylor_of_square_at_zero() {
        let j = jet_of_polynomial(&[x().mul(&x())], &[qi(0)], 2).unwrap();
        assert_eq!(j.value(), vec![qi(0)]);
        assert_eq!(j.coeff(&MultiIndex(vec![1])), vec![qi(0)]);
        assert_eq!(j.coeff(&MultiIndex(vec![2])), vec![qi(1)]);
    }

    #[test]
    fn taylor_of_quadratic_at_one() {
        let p = x().scale(&qi(2)).add(&x().mul(&x()));
        let j = jet_of_polynomial(&[p], &[qi(1)], 2).unwrap();
        assert_eq!(j.value(), vec![qi(3)]);
        assert_eq!(j.coeff(&MultiIndex(vec![1])), vec![qi(4)]);
        assert_eq!(j.coeff(&MultiIndex(vec![2])), vec![qi(1)]);
    }

    #[test]
    fn identity_polynomial_gives_identity_jet() {
        let id: Vec<Poly> = (0..3).map(|i| Poly::var(3, i)).collect();
        let base = vec![q(1, 2), qi(-3), qi(7)];
        let j = jet_of_polynomial(&id, &base, 1).unwrap();
        assert_eq!(j.value(), base);
        assert_eq!(j.jacobian(), Mat::identity(3));
        assert!(j.is_identity());
    }

    #[test]
    fn compose_quadratics() {
        let outer = jet1(0, 0, &[(1, qi(1)), (2, qi(1))], 2);
        let inner = outer.clone();
        let c = jet_compose(&outer, &inner).unwrap();
        assert_eq!(c, jet1(0, 0, &[(1, qi(1)), (2, qi(2))], 2));
    }

    #[test]
    fn compose_with_identity_is_neutral() {
        let a = jet1(2, 5, &[(1, qi(3)), (2, q(1, 2)), (3, qi(-4))], 3);
        let left = TruncatedJet::identity(vec![qi(5)], 3);
        let right = TruncatedJet::identity(vec![qi(2)], 3);
        assert_eq!(jet_compose(&left, &a).unwrap(), a);
        assert_eq!(jet_compose(&a, &right).unwrap(), a);
    }

    #[test]
    fn compose_linear_is_matrix_product() {
        let a = Mat::from_rows(vec![vec![qi(1), qi(2)], vec![qi(0), qi(3)]]);
        let b = Mat::from_rows(vec![vec![qi(4), qi(0)], vec![q(1, 2), qi(-1)]]);
        let z = vec![qi(0), qi(0)];
        let ja = TruncatedJet::affine(z.clone(), z.clone(), &a, 1).unwrap();
        let jb = TruncatedJet::affine(z.clone(), z.clone(), &b, 1).unwrap();
        assert_eq!(jet_compose(&ja, &jb).unwrap().jacobian(), &a * &b);
    }

    #[test]
    fn compose_rejects_mismatched_points() {
        let a = jet1(0, 0, &[(1, qi(1))], 1);
        let b = jet1(0, 1, &[(1, qi(1))], 1);
        let err = jet_compose(&a, &b).unwrap_err();
        assert!(matches!(err, JetError::NonComposable { .. }));
        assert!(err.to_string().starts_with("non-composable: α(g) ≠ β(h)"));
    }

    #[test]
    fn invert_quadratic() {
        let f = jet1(0, 0, &[(1, qi(2)), (2, qi(1))], 2);
        let g = jet_invert(&f).unwrap();
        assert_eq!(g, jet1(0, 0, &[(1, q(1, 2)), (2, q(-1, 8))], 2));
        assert!(jet_compose(&f, &g).unwrap().is_identity());
        assert!(jet_compose(&g, &f).unwrap().is_identity());
    }

    #[test]
    fn invert_identity_and_linear() {
        let id = TruncatedJet::identity(vec![qi(1), qi(2)], 3);
        assert_eq!(jet_invert(&id).unwrap(), id);
        let a = Mat::from_rows(vec![vec![qi(2), qi(1)], vec![qi(7), qi(4)]]);
        let z = vec![qi(0), qi(0)];
        let ja = TruncatedJet::affine(z.clone(), z, &a, 1).unwrap();
        assert_eq!(jet_invert(&ja).unwrap().jacobian(), a.inverse().unwrap());
    }

    #[test]
    fn singular_jacobian_rejected() {
        let f = jet1(0, 0, &[(2, qi(1))], 2);
        assert_eq!(jet_invert(&f).unwrap_err(), JetError::Singular);
    }

    #[test]
    fn ring_operations() {
        let a = jet1(0, 0, &[(1, qi(1)), (2, qi(1))], 2);
        let b = jet1(0, 0, &[(1, qi(1)), (2, qi(-1))], 2);
        assert_eq!(a.add(&b).unwrap(), jet1(0, 0, &[(1, qi(2))], 2));
        let xj = jet1(0, 0, &[(1, qi(1))], 2);
        assert_eq!(xj.mul(&xj).unwrap(), jet1(0, 0, &[(2, qi(1))], 2));
        let sq = jet1(0, 0, &[(2, qi(1))], 2);
        assert_eq!(sq.scale(&qi(3)), jet1(0, 0, &[(2, qi(3))], 2));
        let other = jet1(1, 0, &[], 2);
        assert_eq!(a.add(&other).unwrap_err(), JetError::BaseMismatch);
    }

    #[test]
    fn coefficient_validation() {
        let bad = TruncatedJet::new(
            1,
            1,
            1,
            vec![qi(0)],
            vec![qi(0)],
            [(MultiIndex(vec![2]), vec![qi(1)])].into_iter().collect(),
        );
        assert!(matches!(bad, Err(JetError::InvalidCoefficient(_))));
    }

    #[test]
    fn nilpotent_matrix_exponential_is_exact() {
        let n = Mat::from_rows(vec![vec![qi(0), qi(1)], vec![qi(0), qi(0)]]);
        let zeta = crate::poly::MatrixPoly::from_scalar(&x(), &n);
        let j = MatrixJet::of_matrix_poly(&zeta, &[qi(3)], 1).unwrap();
        let e = j.exp().unwrap();
        assert_eq!(e.value(), &Mat::identity(2) + &n.scale(&qi(3)));
        assert_eq!(e.coeff(&MultiIndex(vec![1])), n);
    }

    #[test]
    fn matrix_jet_inverse() {
        let m = crate::poly::MatrixPoly::new(
            1,
            2,
            vec![
                Poly::one(1).add(&x()),
                x().mul(&x()),
                Poly::zero(1),
                Poly::constant(1, qi(2)),
            ],
        );
        let j = MatrixJet::of_matrix_poly(&m, &[q(1, 3)], 3).unwrap();
        let inv = j.inverse().unwrap();
        let id = MatrixJet::identity(vec![q(1, 3)], 2, 3);
        assert_eq!(j.matmul(&inv).unwrap(), id);
        assert_eq!(inv.matmul(&j).unwrap(), id);
    }
}
