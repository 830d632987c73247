//! Algebroid sections and their brackets: trivial-groupoid sections
//! `(θ, h)`, combinations of holonomic jets `Σ f·j_kμ` of vector fields,
//! jets `Σ f·j_kζ` of matrix-valued maps, and the semidirect product of
//! the last two.
//!
//! The fibrewise bracket of matrix directions is the negated commutator,
//! `[A, B] = −(AB − BA)`, matching right-invariant fields of a matrix
//! group acting by `dg/dt = h·g`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::jet_groupoid::JetField;
use crate::linalg::Mat;
use crate::multijet::{jet_of_polynomial, JetError, JetResult, TruncatedJet};
use crate::poly::{MatrixPoly, MultiIndex, Poly, PolyVectorField};
use crate::scalar::{qi, Scalar, Q};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebroidError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("order mismatch: k = {0} vs k = {1}")]
    OrderMismatch(u32, u32),
    #[error("matrix basis is not closed under the commutator")]
    NotClosed,
    #[error("value outside the matrix subalgebra")]
    NotInSubalgebra,
    #[error(transparent)]
    Jet(#[from] JetError),
}

pub type AlgebroidResult<T> = Result<T, AlgebroidError>;

/// Fibrewise bracket of matrix-valued maps, `−(AB − BA)`.
pub fn fibre_bracket(a: &MatrixPoly, b: &MatrixPoly) -> MatrixPoly {
    b.commutator(a)
}

/// A matrix Lie algebra `𝓗 ⊆ gl(m, Q)`, all of `gl(m)` when `basis` is
/// `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixAlgebraSpec {
    m: usize,
    basis: Option<Vec<Mat<Q>>>,
}

impl MatrixAlgebraSpec {
    pub fn full(m: usize) -> Self {
        Self { m, basis: None }
    }

    /// Validates closure of the span of `basis` under the commutator.
    pub fn with_basis(m: usize, basis: Vec<Mat<Q>>) -> AlgebroidResult<Self> {
        if basis.iter().any(|b| b.rows() != m || b.cols() != m) {
            return Err(AlgebroidError::Dimension("basis matrix size".into()));
        }
        let spec = Self {
            m,
            basis: Some(basis),
        };
        let b = spec.basis.as_ref().expect("set");
        for x in b {
            for y in b {
                if !spec.contains_matrix(&x.commutator(y)) {
                    return Err(AlgebroidError::NotClosed);
                }
            }
        }
        Ok(spec)
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn basis(&self) -> Option<&[Mat<Q>]> {
        self.basis.as_deref()
    }

    /// Exact span membership.
    pub fn contains_matrix(&self, a: &Mat<Q>) -> bool {
        let Some(basis) = &self.basis else {
            return a.rows() == self.m && a.cols() == self.m;
        };
        let rows: Vec<Vec<Q>> = basis.iter().map(|b| b.as_slice().to_vec()).collect();
        let r0 = if rows.is_empty() {
            0
        } else {
            Mat::from_rows(rows.clone()).rank()
        };
        let mut with = rows;
        with.push(a.as_slice().to_vec());
        Mat::from_rows(with).rank() == r0
    }

    /// Every coefficient matrix of `h` lies in the algebra, hence so does
    /// every value.
    pub fn contains(&self, h: &MatrixPoly) -> bool {
        if h.size() != self.m {
            return false;
        }
        let mut coeffs: BTreeMap<MultiIndex, Mat<Q>> = BTreeMap::new();
        for (idx, p) in h.entries().iter().enumerate() {
            for (alpha, c) in p.terms() {
                let e = coeffs
                    .entry(alpha.clone())
                    .or_insert_with(|| Mat::zeros(self.m, self.m));
                e[(idx / self.m, idx % self.m)] = c.clone();
            }
        }
        coeffs.values().all(|c| self.contains_matrix(c))
    }
}

/// Section `(θ, h)` of the algebroid of `M × H × M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrivialSection {
    pub theta: PolyVectorField,
    pub h: MatrixPoly,
}

impl TrivialSection {
    pub fn new(theta: PolyVectorField, h: MatrixPoly) -> AlgebroidResult<Self> {
        if h.nvars() != theta.dim() {
            return Err(AlgebroidError::Dimension(format!(
                "θ on R^{} but h on R^{}",
                theta.dim(),
                h.nvars()
            )));
        }
        Ok(Self { theta, h })
    }

    pub fn zero(n: usize, m: usize) -> Self {
        Self {
            theta: PolyVectorField::zero(n),
            h: MatrixPoly::zero(n, m),
        }
    }

    pub fn dim(&self) -> usize {
        self.theta.dim()
    }

    pub fn size(&self) -> usize {
        self.h.size()
    }

    pub fn is_zero(&self) -> bool {
        self.theta.is_zero() && self.h.is_zero()
    }

    pub fn anchor(&self) -> PolyVectorField {
        self.theta.clone()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            theta: self.theta.add(&other.theta),
            h: self.h.add(&other.h),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            theta: self.theta.sub(&other.theta),
            h: self.h.sub(&other.h),
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self {
            theta: self.theta.scale(c),
            h: self.h.scale(c),
        }
    }

    pub fn mul_fn(&self, f: &Poly) -> Self {
        Self {
            theta: self.theta.mul_fn(f),
            h: self.h.mul_fn(f),
        }
    }

    fn check(&self, other: &Self) -> AlgebroidResult<()> {
        if self.dim() != other.dim() || self.size() != other.size() {
            return Err(AlgebroidError::Dimension(format!(
                "sections over (R^{}, gl({})) and (R^{}, gl({}))",
                self.dim(),
                self.size(),
                other.dim(),
                other.size()
            )));
        }
        Ok(())
    }
}

/// `[(θ,h),(θ′,h′)] = ([θ,θ′], [h,h′] + ϑ(θ)h′ − ϑ(θ′)h)`.
pub fn bracket_trivial(a: &TrivialSection, b: &TrivialSection) -> AlgebroidResult<TrivialSection> {
    a.check(b)?;
    let h = fibre_bracket(&a.h, &b.h)
        .add(&b.h.derive_along(&a.theta))
        .sub(&a.h.derive_along(&b.theta));
    Ok(TrivialSection {
        theta: a.theta.bracket(&b.theta),
        h,
    })
}

/// `ad Ξ(Σ) = −[Ξ, Σ]`.
pub fn ad(xi: &TrivialSection, sigma: &TrivialSection) -> AlgebroidResult<TrivialSection> {
    Ok(bracket_trivial(xi, sigma)?.scale(&-qi(1)))
}

/// Canonical coefficient data: `(α, slot) ↦ Σ f·∂^αμ_slot / α!`, the
/// polynomial giving the `α` Taylor coefficient at every point. Zero
/// entries are omitted.
pub type Canonical = BTreeMap<(MultiIndex, usize), Poly>;

pub(crate) fn canonical_of<'a>(
    n: usize,
    k: u32,
    terms: impl Iterator<Item = (&'a Poly, Vec<&'a Poly>)> + Clone,
) -> Canonical {
    let mut out = Canonical::new();
    for alpha in MultiIndex::all_up_to(n, k) {
        let inv_fact = qi(1) / alpha.factorial();
        for (f, comps) in terms.clone() {
            for (slot, c) in comps.into_iter().enumerate() {
                let d = c.derivative_multi(&alpha);
                if d.is_zero() || f.is_zero() {
                    continue;
                }
                let term = f.mul(&d).scale(&inv_fact);
                let e = out
                    .entry((alpha.clone(), slot))
                    .or_insert_with(|| Poly::zero(n));
                *e = e.add(&term);
            }
        }
    }
    out.retain(|_, p| !p.is_zero());
    out
}

/// Section `Σ f_i·j_kμ_i` of the jet algebroid `J_kT`.
#[derive(Clone, Debug)]
pub struct JetSection {
    n: usize,
    k: u32,
    terms: Vec<(Poly, PolyVectorField)>,
}

impl PartialEq for JetSection {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.k == other.k && self.canonical() == other.canonical()
    }
}

impl JetSection {
    pub fn new(n: usize, k: u32, terms: Vec<(Poly, PolyVectorField)>) -> AlgebroidResult<Self> {
        for (f, mu) in &terms {
            if f.nvars() != n || mu.dim() != n {
                return Err(AlgebroidError::Dimension(format!(
                    "term not over R^{n}"
                )));
            }
        }
        Ok(Self { n, k, terms }.normalized())
    }

    pub fn zero(n: usize, k: u32) -> Self {
        Self {
            n,
            k,
            terms: Vec::new(),
        }
    }

    /// `j_kθ`.
    pub fn holonomic(theta: &PolyVectorField, k: u32) -> Self {
        let n = theta.dim();
        Self {
            n,
            k,
            terms: vec![(Poly::one(n), theta.clone())],
        }
        .normalized()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn terms(&self) -> &[(Poly, PolyVectorField)] {
        &self.terms
    }

    /// Merges terms with equal fields and drops vanishing ones.
    fn normalized(mut self) -> Self {
        let mut merged: Vec<(Poly, PolyVectorField)> = Vec::new();
        for (f, mu) in self.terms.drain(..) {
            match merged.iter_mut().find(|(_, m)| *m == mu) {
                Some(slot) => slot.0 = slot.0.add(&f),
                None => merged.push((f, mu)),
            }
        }
        merged.retain(|(f, mu)| !f.is_zero() && !mu.is_zero());
        self.terms = merged;
        self
    }

    pub fn canonical(&self) -> Canonical {
        canonical_of(
            self.n,
            self.k,
            self.terms
                .iter()
                .map(|(f, mu)| (f, mu.components().iter().collect())),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.canonical().is_empty()
    }

    pub fn add(&self, other: &Self) -> AlgebroidResult<Self> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self { terms, ..self.clone() }.normalized())
    }

    pub fn sub(&self, other: &Self) -> AlgebroidResult<Self> {
        self.add(&other.scale(&-qi(1)))
    }

    pub fn scale(&self, c: &Q) -> Self {
        self.mul_fn(&Poly::constant(self.n, c.clone()))
    }

    pub fn mul_fn(&self, g: &Poly) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(f, mu)| (f.mul(g), mu.clone()))
            .collect();
        Self { terms, ..self.clone() }.normalized()
    }

    /// Projection to order `h ≤ k`.
    pub fn project(&self, h: u32) -> AlgebroidResult<Self> {
        if h > self.k {
            return Err(AlgebroidError::OrderMismatch(h, self.k));
        }
        Ok(Self { k: h, ..self.clone() })
    }

    /// `β_*`: the order-zero part `Σ f·μ`.
    pub fn anchor(&self) -> PolyVectorField {
        self.terms
            .iter()
            .fold(PolyVectorField::zero(self.n), |acc, (f, mu)| {
                acc.add(&mu.mul_fn(f))
            })
    }

    fn check(&self, other: &Self) -> AlgebroidResult<()> {
        if self.n != other.n {
            return Err(AlgebroidError::Dimension(format!(
                "R^{} vs R^{}",
                self.n, other.n
            )));
        }
        if self.k != other.k {
            return Err(AlgebroidError::OrderMismatch(self.k, other.k));
        }
        Ok(())
    }
}

impl JetField for JetSection {
    fn dim(&self) -> usize {
        self.n
    }

    fn jet_at<T: Scalar>(&self, y: &[T], k: u32) -> JetResult<TruncatedJet<T>> {
        let mut acc: Option<TruncatedJet<T>> = None;
        for (f, mu) in &self.terms {
            let j = jet_of_polynomial(mu.components(), y, k)?.scale(&f.eval(y));
            acc = Some(match acc {
                Some(a) => a.add(&j)?,
                None => j,
            });
        }
        match acc {
            Some(a) => Ok(a),
            None => {
                let zero = PolyVectorField::zero(self.n);
                jet_of_polynomial(zero.components(), y, k)
            }
        }
    }
}

/// `[f j_kμ, g j_kη] = fg j_k[μ,η] + f(ϑ(μ)g) j_kη − g(ϑ(η)f) j_kμ`,
/// extended bilinearly.
pub fn bracket_jet(a: &JetSection, b: &JetSection) -> AlgebroidResult<JetSection> {
    a.check(b)?;
    let mut terms = Vec::new();
    for (f, mu) in &a.terms {
        for (g, eta) in &b.terms {
            terms.push((f.mul(g), mu.bracket(eta)));
            terms.push((f.mul(&mu.apply(g)), eta.clone()));
            terms.push((g.mul(&eta.apply(f)).neg(), mu.clone()));
        }
    }
    Ok(JetSection {
        n: a.n,
        k: a.k,
        terms,
    }
    .normalized())
}

/// Section `Σ f_i·j_kζ_i` of `J_k(M, gl(m))`.
#[derive(Clone, Debug)]
pub struct GroupJetSection {
    n: usize,
    m: usize,
    k: u32,
    terms: Vec<(Poly, MatrixPoly)>,
}

impl PartialEq for GroupJetSection {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.m == other.m
            && self.k == other.k
            && self.canonical() == other.canonical()
    }
}

impl GroupJetSection {
    pub fn new(n: usize, m: usize, k: u32, terms: Vec<(Poly, MatrixPoly)>) -> AlgebroidResult<Self> {
        for (f, z) in &terms {
            if f.nvars() != n || z.nvars() != n || z.size() != m {
                return Err(AlgebroidError::Dimension(format!(
                    "term not a map R^{n} → gl({m})"
                )));
            }
        }
        Ok(Self { n, m, k, terms }.normalized())
    }

    pub fn zero(n: usize, m: usize, k: u32) -> Self {
        Self {
            n,
            m,
            k,
            terms: Vec::new(),
        }
    }

    /// `j_kζ`.
    pub fn holonomic(zeta: &MatrixPoly, k: u32) -> Self {
        let n = zeta.nvars();
        Self {
            n,
            m: zeta.size(),
            k,
            terms: vec![(Poly::one(n), zeta.clone())],
        }
        .normalized()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn terms(&self) -> &[(Poly, MatrixPoly)] {
        &self.terms
    }

    fn normalized(mut self) -> Self {
        let mut merged: Vec<(Poly, MatrixPoly)> = Vec::new();
        for (f, z) in self.terms.drain(..) {
            match merged.iter_mut().find(|(_, w)| *w == z) {
                Some(slot) => slot.0 = slot.0.add(&f),
                None => merged.push((f, z)),
            }
        }
        merged.retain(|(f, z)| !f.is_zero() && !z.is_zero());
        self.terms = merged;
        self
    }

    pub fn canonical(&self) -> Canonical {
        canonical_of(
            self.n,
            self.k,
            self.terms
                .iter()
                .map(|(f, z)| (f, z.entries().iter().collect())),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.canonical().is_empty()
    }

    pub fn add(&self, other: &Self) -> AlgebroidResult<Self> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self { terms, ..self.clone() }.normalized())
    }

    pub fn sub(&self, other: &Self) -> AlgebroidResult<Self> {
        self.add(&other.scale(&-qi(1)))
    }

    pub fn scale(&self, c: &Q) -> Self {
        self.mul_fn(&Poly::constant(self.n, c.clone()))
    }

    pub fn mul_fn(&self, g: &Poly) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(f, z)| (f.mul(g), z.clone()))
            .collect();
        Self { terms, ..self.clone() }.normalized()
    }

    /// Module product by a jet of functions `Σ g_j·j_kψ_j` (a section with
    /// `m = 1`): `(g j_kψ)·(f j_kζ) = gf j_k(ψζ)`.
    pub fn module_mul(&self, functions: &GroupJetSection) -> AlgebroidResult<Self> {
        if functions.m != 1 {
            return Err(AlgebroidError::Dimension(
                "module product needs a jet of scalar functions".into(),
            ));
        }
        if functions.n != self.n {
            return Err(AlgebroidError::Dimension("base dimension".into()));
        }
        if functions.k != self.k {
            return Err(AlgebroidError::OrderMismatch(functions.k, self.k));
        }
        let mut terms = Vec::new();
        for (g, psi) in &functions.terms {
            let psi = psi.entry(0, 0);
            for (f, z) in &self.terms {
                terms.push((g.mul(f), z.mul_fn(psi)));
            }
        }
        Ok(Self { terms, ..self.clone() }.normalized())
    }

    /// Evaluates the jet at `y`, as the flattened `m×m` matrix jet.
    pub fn jet_at<T: Scalar>(&self, y: &[T]) -> JetResult<TruncatedJet<T>> {
        let mut acc: Option<TruncatedJet<T>> = None;
        for (f, z) in &self.terms {
            let j = jet_of_polynomial(z.entries(), y, self.k)?.scale(&f.eval(y));
            acc = Some(match acc {
                Some(a) => a.add(&j)?,
                None => j,
            });
        }
        match acc {
            Some(a) => Ok(a),
            None => {
                jet_of_polynomial(MatrixPoly::zero(self.n, self.m).entries(), y, self.k)
            }
        }
    }

    fn check(&self, other: &Self) -> AlgebroidResult<()> {
        if self.n != other.n || self.m != other.m {
            return Err(AlgebroidError::Dimension(format!(
                "(R^{}, gl({})) vs (R^{}, gl({}))",
                self.n, self.m, other.n, other.m
            )));
        }
        if self.k != other.k {
            return Err(AlgebroidError::OrderMismatch(self.k, other.k));
        }
        Ok(())
    }
}

/// `[f j_kζ, g j_kη] = fg j_k[ζ,η]`, with the fibrewise bracket.
pub fn bracket_group_jet(
    a: &GroupJetSection,
    b: &GroupJetSection,
) -> AlgebroidResult<GroupJetSection> {
    a.check(b)?;
    let mut terms = Vec::new();
    for (f, z) in &a.terms {
        for (g, w) in &b.terms {
            terms.push((f.mul(g), fibre_bracket(z, w)));
        }
    }
    Ok(GroupJetSection { terms, ..a.clone() }.normalized())
}

/// `ϑ(Ξ)Λ`, determined on holonomic terms by
/// `ϑ(j_kθ)(f j_kλ) = (ϑ(θ)f) j_kλ + f j_k(ϑ(θ)λ)` and function-linear
/// in `Ξ`.
pub fn lie_derivative(xi: &JetSection, lambda: &GroupJetSection) -> AlgebroidResult<GroupJetSection> {
    if xi.n != lambda.n {
        return Err(AlgebroidError::Dimension("base dimension".into()));
    }
    if xi.k != lambda.k {
        return Err(AlgebroidError::OrderMismatch(xi.k, lambda.k));
    }
    let mut terms = Vec::new();
    for (g, theta) in &xi.terms {
        for (f, l) in &lambda.terms {
            terms.push((g.mul(&theta.apply(f)), l.clone()));
            terms.push((g.mul(f), l.derive_along(theta)));
        }
    }
    Ok(GroupJetSection {
        terms,
        ..lambda.clone()
    }
    .normalized())
}

/// Section `(Ξ, Λ)` of the prolonged algebroid of `M × H × M`.
#[derive(Clone, Debug, PartialEq)]
pub struct SemidirectSection {
    pub xi: JetSection,
    pub lambda: GroupJetSection,
}

impl SemidirectSection {
    pub fn new(xi: JetSection, lambda: GroupJetSection) -> AlgebroidResult<Self> {
        if xi.n != lambda.n {
            return Err(AlgebroidError::Dimension("base dimension".into()));
        }
        if xi.k != lambda.k {
            return Err(AlgebroidError::OrderMismatch(xi.k, lambda.k));
        }
        Ok(Self { xi, lambda })
    }

    pub fn add(&self, other: &Self) -> AlgebroidResult<Self> {
        Ok(Self {
            xi: self.xi.add(&other.xi)?,
            lambda: self.lambda.add(&other.lambda)?,
        })
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self {
            xi: self.xi.scale(c),
            lambda: self.lambda.scale(c),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.xi.is_zero() && self.lambda.is_zero()
    }
}

/// `[(Ξ,Λ),(Ξ′,Λ′)] = ([Ξ,Ξ′], [Λ,Λ′] + ϑ(Ξ)Λ′ − ϑ(Ξ′)Λ)`.
pub fn bracket_semidirect(
    a: &SemidirectSection,
    b: &SemidirectSection,
) -> AlgebroidResult<SemidirectSection> {
    let xi = bracket_jet(&a.xi, &b.xi)?;
    let lambda = bracket_group_jet(&a.lambda, &b.lambda)?
        .add(&lie_derivative(&a.xi, &b.lambda)?)?
        .sub(&lie_derivative(&b.xi, &a.lambda)?)?;
    Ok(SemidirectSection { xi, lambda })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet_groupoid::{right_invariant_bracket, right_invariant_vector};
    use crate::scalar::q;

    fn x() -> Poly {
        Poly::var(1, 0)
    }

    fn dx() -> PolyVectorField {
        PolyVectorField::coordinate(1, 0)
    }

    fn xdx() -> PolyVectorField {
        PolyVectorField::scaling(1, 0)
    }

    fn e(m: usize, i: usize, j: usize) -> Mat<Q> {
        Mat::unit(m, i, j)
    }

    #[test]
    fn trivial_bracket_example() {
        let ee = e(2, 0, 1);
        let a = TrivialSection::new(dx(), MatrixPoly::from_scalar(&x(), &ee)).unwrap();
        let b = TrivialSection::new(xdx(), MatrixPoly::zero(1, 2)).unwrap();
        let c = bracket_trivial(&a, &b).unwrap();
        assert_eq!(c.theta, dx());
        assert_eq!(c.h, MatrixPoly::from_scalar(&x().neg(), &ee));
        let d = ad(&a, &b).unwrap();
        assert_eq!(d.theta, dx().scale(&qi(-1)));
        assert_eq!(d.h, MatrixPoly::from_scalar(&x(), &ee));
        assert!(bracket_trivial(&a, &a).unwrap().is_zero());
        assert!(ad(&a, &a).unwrap().is_zero());
    }

    #[test]
    fn trivial_bracket_with_zero_fields_is_fibrewise() {
        let h1 = MatrixPoly::from_scalar(&x(), &e(2, 0, 1));
        let h2 = MatrixPoly::constant(&e(2, 1, 0), 1);
        let a = TrivialSection::new(PolyVectorField::zero(1), h1.clone()).unwrap();
        let b = TrivialSection::new(PolyVectorField::zero(1), h2.clone()).unwrap();
        let c = bracket_trivial(&a, &b).unwrap();
        let g = bracket_group_jet(
            &GroupJetSection::holonomic(&h1, 2),
            &GroupJetSection::holonomic(&h2, 2),
        )
        .unwrap();
        assert_eq!(GroupJetSection::holonomic(&c.h, 2), g);
    }

    #[test]
    fn jet_bracket_examples() {
        let a = JetSection::holonomic(&dx(), 1);
        let b = JetSection::holonomic(&xdx(), 1);
        assert_eq!(
            bracket_jet(&a, &b).unwrap(),
            JetSection::holonomic(&dx(), 1)
        );
        let fa = JetSection::new(1, 1, vec![(x(), dx())]).unwrap();
        let c = bracket_jet(&fa, &a).unwrap();
        assert_eq!(c, JetSection::holonomic(&dx(), 1).scale(&qi(-1)));
        assert_eq!(c.anchor(), fa.anchor().bracket(&a.anchor()));
        assert!(bracket_jet(&fa, &fa).unwrap().is_zero());
    }

    #[test]
    fn canonical_equality_identifies_rewritten_sums() {
        // x·j₁∂x + j₁(x∂x) vs j₁(2x∂x) − j₁(x∂x) + x j₁∂x: same section.
        let a = JetSection::new(1, 1, vec![(x(), dx()), (Poly::one(1), xdx())]).unwrap();
        let b = JetSection::new(
            1,
            1,
            vec![
                (Poly::one(1), xdx().scale(&qi(2))),
                (Poly::constant(1, qi(-1)), xdx()),
                (x(), dx()),
            ],
        )
        .unwrap();
        assert_eq!(a, b);
        // x·j₁∂x differs from j₁(x∂x) at first order.
        let c = JetSection::new(1, 1, vec![(x(), dx())]).unwrap();
        let d = JetSection::holonomic(&xdx(), 1);
        assert_ne!(c, d);
        assert_eq!(c.project(0).unwrap(), d.project(0).unwrap());
    }

    #[test]
    fn group_jet_bracket_example() {
        let z = MatrixPoly::from_scalar(&x(), &e(2, 0, 1));
        let w = MatrixPoly::constant(&e(2, 1, 0), 1);
        let c = bracket_group_jet(
            &GroupJetSection::holonomic(&z, 1),
            &GroupJetSection::holonomic(&w, 1),
        )
        .unwrap();
        let comm = e(2, 0, 1).commutator(&e(2, 1, 0));
        let expected = MatrixPoly::from_scalar(&x(), &comm).scale(&qi(-1));
        assert_eq!(c, GroupJetSection::holonomic(&expected, 1));
        let same = GroupJetSection::holonomic(&z.scale(&q(3, 2)), 1);
        assert!(bracket_group_jet(&GroupJetSection::holonomic(&z, 1), &same)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn lie_derivative_examples() {
        let ee = e(2, 0, 1);
        let lam = GroupJetSection::holonomic(&MatrixPoly::from_scalar(&x(), &ee), 1);
        let xi = JetSection::holonomic(&dx(), 1);
        assert_eq!(
            lie_derivative(&xi, &lam).unwrap(),
            GroupJetSection::holonomic(&MatrixPoly::constant(&ee, 1), 1)
        );
        assert!(lie_derivative(&JetSection::zero(1, 1), &lam).unwrap().is_zero());
        let a = SemidirectSection::new(xi.clone(), GroupJetSection::zero(1, 2, 1)).unwrap();
        let b = SemidirectSection::new(JetSection::zero(1, 1), lam.clone()).unwrap();
        let c = bracket_semidirect(&a, &b).unwrap();
        assert!(c.xi.is_zero());
        assert_eq!(c.lambda, lie_derivative(&xi, &lam).unwrap());
    }

    #[test]
    fn subalgebra_spec() {
        let upper = MatrixAlgebraSpec::with_basis(2, vec![e(2, 0, 0), e(2, 0, 1), e(2, 1, 1)]);
        assert!(upper.is_ok());
        let upper = upper.unwrap();
        assert!(upper.contains(&MatrixPoly::from_scalar(&x(), &e(2, 0, 1))));
        assert!(!upper.contains(&MatrixPoly::from_scalar(&x(), &e(2, 1, 0))));
        assert_eq!(
            MatrixAlgebraSpec::with_basis(2, vec![e(2, 0, 1), e(2, 1, 0)]),
            Err(AlgebroidError::NotClosed)
        );
    }

    #[test]
    fn right_invariant_fields_bracket_like_jet_sections() {
        let a = JetSection::new(1, 2, vec![(x(), dx()), (Poly::one(1), xdx())]).unwrap();
        let b = JetSection::new(1, 2, vec![(x().mul(&x()), dx())]).unwrap();
        let c = bracket_jet(&a, &b).unwrap();
        let p = Poly::var(1, 0).mul(&Poly::var(1, 0)).add(&Poly::var(1, 0).scale(&q(1, 2)));
        let arrow = crate::jet_groupoid::JetArrow::of_polynomial(
            &[p.add(&Poly::constant(1, qi(1)))],
            &[q(1, 3)],
            2,
        )
        .unwrap();
        let lhs = right_invariant_bracket(&a, &b, arrow.jet()).unwrap();
        let rhs = right_invariant_vector(&c, arrow.jet()).unwrap();
        assert_eq!(lhs, rhs);
    }
}
