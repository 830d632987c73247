//! First-order operators on sections of a trivial bundle `M × Q^m`,
//! `δ(s) = −h·s + ϑ(θ)s`, with their commutators, flows and
//! prolongations to jet sections.

use crate::algebroid::{canonical_of, AlgebroidError, AlgebroidResult, Canonical, TrivialSection};
use crate::flows::{exp_trivial, FlowConfig, FlowError, FlowResult};
use crate::multijet::JetError;
use crate::poly::{MatrixPoly, Poly, PolyVectorField};
use crate::scalar::{distance, qi, Q};

/// Polynomial section `s: M → Q^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorSection {
    nvars: usize,
    components: Vec<Poly>,
}

impl VectorSection {
    pub fn new(nvars: usize, components: Vec<Poly>) -> AlgebroidResult<Self> {
        if components.iter().any(|p| p.nvars() != nvars) {
            return Err(AlgebroidError::Dimension(format!(
                "section components must be polynomials on R^{nvars}"
            )));
        }
        Ok(Self { nvars, components })
    }

    pub fn zero(nvars: usize, m: usize) -> Self {
        Self {
            nvars,
            components: vec![Poly::zero(nvars); m],
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rank(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, Poly::add)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, Poly::sub)
    }

    fn zip(&self, other: &Self, op: impl Fn(&Poly, &Poly) -> Poly) -> Self {
        assert_eq!((self.nvars, self.rank()), (other.nvars, other.rank()));
        Self {
            nvars: self.nvars,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| op(a, b))
                .collect(),
        }
    }

    pub fn mul_fn(&self, f: &Poly) -> Self {
        Self {
            nvars: self.nvars,
            components: self.components.iter().map(|p| p.mul(f)).collect(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|p| p.eval(x)).collect()
    }
}

/// Operator `δ = (θ, h)`, stored structurally.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearOperator {
    pub theta: PolyVectorField,
    pub h: MatrixPoly,
}

impl LinearOperator {
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

    pub fn rank(&self) -> usize {
        self.h.size()
    }

    pub fn is_zero(&self) -> bool {
        self.theta.is_zero() && self.h.is_zero()
    }

    /// `fδ = (fθ, fh)`.
    pub fn mul_fn(&self, f: &Poly) -> Self {
        Self {
            theta: self.theta.mul_fn(f),
            h: self.h.mul_fn(f),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            theta: self.theta.add(&other.theta),
            h: self.h.add(&other.h),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&qi(-1)))
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self {
            theta: self.theta.scale(c),
            h: self.h.scale(c),
        }
    }

    fn check_section(&self, s: &VectorSection) -> AlgebroidResult<()> {
        if s.nvars != self.dim() || s.rank() != self.rank() {
            return Err(AlgebroidError::Dimension(format!(
                "operator on (R^{}, Q^{}) applied to a section of (R^{}, Q^{})",
                self.dim(),
                self.rank(),
                s.nvars,
                s.rank()
            )));
        }
        Ok(())
    }

    fn check_operator(&self, other: &Self) -> AlgebroidResult<()> {
        if self.dim() != other.dim() || self.rank() != other.rank() {
            return Err(AlgebroidError::Dimension("operators on different bundles".into()));
        }
        Ok(())
    }
}

/// `δ(s) = −h·s + ϑ(θ)s`.
pub fn apply(op: &LinearOperator, s: &VectorSection) -> AlgebroidResult<VectorSection> {
    op.check_section(s)?;
    let hs = op.h.mul_vec(&s.components);
    let components = s
        .components
        .iter()
        .zip(hs)
        .map(|(c, hc)| op.theta.apply(c).sub(&hc))
        .collect();
    Ok(VectorSection {
        nvars: s.nvars,
        components,
    })
}

/// `δ(fs) − fδ(s) = ⟨θ, df⟩s`.
pub fn symbol_check(op: &LinearOperator, f: &Poly, s: &VectorSection) -> AlgebroidResult<bool> {
    let lhs = apply(op, &s.mul_fn(f))?.sub(&apply(op, s)?.mul_fn(f));
    Ok(lhs == s.mul_fn(&op.theta.apply(f)))
}

/// `δ(fs) = fδ(s)` for the given `f` and `s`.
pub fn is_function_linear_on(op: &LinearOperator, f: &Poly, s: &VectorSection) -> AlgebroidResult<bool> {
    Ok(apply(op, &s.mul_fn(f))? == apply(op, s)?.mul_fn(f))
}

/// `[δ, δ′] = ([θ,θ′], −(hh′ − h′h) + ϑ(θ)h′ − ϑ(θ′)h)`.
pub fn commutator(a: &LinearOperator, b: &LinearOperator) -> AlgebroidResult<LinearOperator> {
    a.check_operator(b)?;
    let h = a
        .h
        .commutator(&b.h)
        .scale(&qi(-1))
        .add(&b.h.derive_along(&a.theta))
        .sub(&a.h.derive_along(&b.theta));
    Ok(LinearOperator {
        theta: a.theta.bracket(&b.theta),
        h,
    })
}

/// `δ∘δ′(s) − δ′∘δ(s)`, computed by composition.
pub fn commutator_applied(
    a: &LinearOperator,
    b: &LinearOperator,
    s: &VectorSection,
) -> AlgebroidResult<VectorSection> {
    Ok(apply(a, &apply(b, s)?)?.sub(&apply(b, &apply(a, s)?)?))
}

pub fn operator_from_section(s: &TrivialSection) -> LinearOperator {
    LinearOperator {
        theta: s.theta.clone(),
        h: s.h.clone(),
    }
}

pub fn section_from_operator(op: &LinearOperator) -> TrivialSection {
    TrivialSection {
        theta: op.theta.clone(),
        h: op.h.clone(),
    }
}

/// `((Exp tΞ)*·s)(x) = g(t,x)⁻¹·s(exp tθ(x))`.
pub fn operator_flow(
    op: &LinearOperator,
    s: &VectorSection,
    x: &[f64],
    t: f64,
    cfg: &FlowConfig,
) -> FlowResult<Vec<f64>> {
    op.check_section(s)?;
    let e = exp_trivial(&section_from_operator(op), x, t, cfg)?;
    let det = e.g.determinant();
    if det.abs() < cfg.det_floor {
        return Err(FlowError::SingularJacobian { t, det });
    }
    let ginv = e.g.inverse().ok_or(JetError::Singular)?;
    Ok(ginv.mul_vec(&s.eval(&e.target)))
}

/// `|d/dt (Exp tΞ)*s − (Exp tΞ)*δ(s)|` at `(x, t)`, the derivative by a
/// five-point central difference of width `dt`.
pub fn operator_flow_residual(
    op: &LinearOperator,
    s: &VectorSection,
    x: &[f64],
    t: f64,
    dt: f64,
    cfg: &FlowConfig,
) -> FlowResult<f64> {
    let at = |c: f64| operator_flow(op, s, x, t + c * dt, cfg);
    let (p2, p1, m1, m2) = (at(2.0)?, at(1.0)?, at(-1.0)?, at(-2.0)?);
    let fd: Vec<f64> = (0..p1.len())
        .map(|i| (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * dt))
        .collect();
    let rhs = operator_flow(op, &apply(op, s)?, x, t, cfg)?;
    Ok(distance(&fd, &rhs))
}

/// Section `Σ f_i·j_k s_i` of `J_kE`.
#[derive(Clone, Debug)]
pub struct JetVectorSection {
    nvars: usize,
    rank: usize,
    k: u32,
    terms: Vec<(Poly, VectorSection)>,
}

impl PartialEq for JetVectorSection {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars
            && self.rank == other.rank
            && self.k == other.k
            && self.canonical() == other.canonical()
    }
}

impl JetVectorSection {
    pub fn new(nvars: usize, rank: usize, k: u32, terms: Vec<(Poly, VectorSection)>) -> AlgebroidResult<Self> {
        if terms
            .iter()
            .any(|(f, s)| f.nvars() != nvars || s.nvars != nvars || s.rank() != rank)
        {
            return Err(AlgebroidError::Dimension(format!(
                "terms must be sections of R^{nvars} × Q^{rank}"
            )));
        }
        Ok(Self {
            nvars,
            rank,
            k,
            terms,
        })
    }

    /// `j_k s`.
    pub fn holonomic(s: &VectorSection, k: u32) -> Self {
        Self {
            nvars: s.nvars,
            rank: s.rank(),
            k,
            terms: vec![(Poly::one(s.nvars), s.clone())],
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn terms(&self) -> &[(Poly, VectorSection)] {
        &self.terms
    }

    pub fn canonical(&self) -> Canonical {
        canonical_of(
            self.nvars,
            self.k,
            self.terms
                .iter()
                .map(|(f, s)| (f, s.components.iter().collect())),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.canonical().is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self { terms, ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.mul_fn(&Poly::constant(self.nvars, qi(-1))))
    }

    pub fn mul_fn(&self, g: &Poly) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(f, s)| (f.mul(g), s.clone()))
            .collect();
        Self { terms, ..self.clone() }
    }
}

/// The prolongation `j_kδ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProlongedOperator {
    pub op: LinearOperator,
    pub k: u32,
}

pub fn prolong_operator(op: &LinearOperator, k: u32) -> ProlongedOperator {
    ProlongedOperator { op: op.clone(), k }
}

impl ProlongedOperator {
    /// `j_kδ(Σ f_i j_k s_i) = Σ f_i j_k(δ s_i) + (ϑ(θ)f_i) j_k s_i`.
    pub fn apply(&self, s: &JetVectorSection) -> AlgebroidResult<JetVectorSection> {
        if s.k != self.k {
            return Err(AlgebroidError::OrderMismatch(self.k, s.k));
        }
        let mut terms = Vec::with_capacity(2 * s.terms.len());
        for (f, si) in &s.terms {
            terms.push((f.clone(), apply(&self.op, si)?));
            terms.push((self.op.theta.apply(f), si.clone()));
        }
        Ok(JetVectorSection { terms, ..s.clone() })
    }

    /// `j_kδ(fS) − f·j_kδ(S) = ⟨θ, df⟩S`.
    pub fn symbol_check(&self, f: &Poly, s: &JetVectorSection) -> AlgebroidResult<bool> {
        let lhs = self.apply(&s.mul_fn(f))?.sub(&self.apply(s)?.mul_fn(f));
        Ok(lhs == s.mul_fn(&self.op.theta.apply(f)))
    }
}

/// `j_kδ∘j_kδ′(S) − j_kδ′∘j_kδ(S)`.
pub fn prolonged_commutator_applied(
    a: &ProlongedOperator,
    b: &ProlongedOperator,
    s: &JetVectorSection,
) -> AlgebroidResult<JetVectorSection> {
    Ok(a.apply(&b.apply(s)?)?.sub(&b.apply(&a.apply(s)?)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::bracket_trivial;
    use crate::linalg::Mat;

    fn x() -> Poly {
        Poly::var(1, 0)
    }

    fn sec(p: Poly) -> VectorSection {
        VectorSection::new(1, vec![p]).unwrap()
    }

    fn op1(theta: PolyVectorField, h: Poly) -> LinearOperator {
        LinearOperator::new(theta, MatrixPoly::from_scalar(&h, &Mat::identity(1))).unwrap()
    }

    #[test]
    fn apply_examples() {
        let d = op1(PolyVectorField::coordinate(1, 0), x());
        let out = apply(&d, &sec(x().mul(&x()))).unwrap();
        assert_eq!(out, sec(x().pow(3).neg().add(&x().scale(&qi(2)))));
        let lhs = apply(&d, &sec(x())).unwrap();
        let rhs = apply(&d, &sec(Poly::one(1))).unwrap().mul_fn(&x()).add(&sec(Poly::one(1)));
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, sec(Poly::one(1).sub(&x().mul(&x()))));
        assert!(apply(&LinearOperator::zero(1, 1), &sec(x())).unwrap().is_zero());
    }

    #[test]
    fn symbols() {
        let d = op1(PolyVectorField::coordinate(1, 0), x());
        assert!(symbol_check(&d, &x().mul(&x()), &sec(Poly::one(1))).unwrap());
        assert!(symbol_check(&d, &Poly::constant(1, qi(3)), &sec(x())).unwrap());
        let e = op1(PolyVectorField::scaling(1, 0), Poly::zero(1));
        assert!(symbol_check(&e, &x(), &sec(x().add(&Poly::one(1)))).unwrap());
        let zero_order = op1(PolyVectorField::zero(1), x());
        assert!(is_function_linear_on(&zero_order, &x(), &sec(Poly::one(1))).unwrap());
        assert!(!is_function_linear_on(&d, &x(), &sec(Poly::one(1))).unwrap());
    }

    #[test]
    fn commutator_examples() {
        let a = op1(PolyVectorField::coordinate(1, 0), Poly::zero(1));
        let b = op1(PolyVectorField::zero(1), x());
        let c = commutator(&a, &b).unwrap();
        assert_eq!(c, op1(PolyVectorField::zero(1), Poly::one(1)));
        let s = sec(x().pow(2).add(&Poly::one(1)));
        assert_eq!(apply(&c, &s).unwrap(), commutator_applied(&a, &b, &s).unwrap());
        assert!(commutator(&a, &a).unwrap().is_zero());

        // [fδ, gδ′] = fg[δ,δ′] + f(ϑ(θ)g)δ′ − g(ϑ(θ′)f)δ with f = g = x.
        let (f, g) = (x(), x());
        let lhs = commutator(&a.mul_fn(&f), &b.mul_fn(&g)).unwrap();
        let rhs = commutator(&a, &b)
            .unwrap()
            .mul_fn(&f.mul(&g))
            .add(&b.mul_fn(&f.mul(&a.theta.apply(&g))))
            .sub(&a.mul_fn(&g.mul(&b.theta.apply(&f))));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn bijection_intertwines_brackets() {
        let ee = Mat::unit(2, 0, 1);
        let a = TrivialSection::new(
            PolyVectorField::coordinate(1, 0),
            MatrixPoly::from_scalar(&x(), &ee),
        )
        .unwrap();
        let b = TrivialSection::new(PolyVectorField::scaling(1, 0), MatrixPoly::zero(1, 2)).unwrap();
        assert_eq!(section_from_operator(&operator_from_section(&a)), a);
        let lhs = commutator(&operator_from_section(&a), &operator_from_section(&b)).unwrap();
        let rhs = operator_from_section(&bracket_trivial(&a, &b).unwrap());
        assert_eq!(lhs, rhs);
        assert!(operator_from_section(&TrivialSection::zero(1, 2)).is_zero());
    }

    #[test]
    fn flows() {
        let cfg = FlowConfig::default();
        let s = sec(x().mul(&x()));
        let zero = LinearOperator::zero(1, 1);
        assert!((operator_flow(&zero, &s, &[0.7], 0.9, &cfg).unwrap()[0] - 0.49).abs() < 1e-12);
        let lam = op1(PolyVectorField::zero(1), Poly::constant(1, qi(2)));
        let v = operator_flow(&lam, &s, &[0.7], 0.3, &cfg).unwrap()[0];
        assert!((v - (-0.6f64).exp() * 0.49).abs() < 1e-8);
        let tr = op1(PolyVectorField::coordinate(1, 0), Poly::zero(1));
        let v = operator_flow(&tr, &s, &[0.7], 0.3, &cfg).unwrap()[0];
        assert!((v - 1.0).abs() < 1e-10);
        let d = op1(PolyVectorField::scaling(1, 0), x().add(&Poly::one(1)));
        assert!(operator_flow_residual(&d, &s, &[0.7], 0.2, 1e-3, &cfg).unwrap() < 1e-4);
    }

    #[test]
    fn prolongations() {
        let a = op1(PolyVectorField::coordinate(1, 0), Poly::zero(1));
        let s = sec(x().pow(3));
        let j = prolong_operator(&a, 1)
            .apply(&JetVectorSection::holonomic(&s, 1))
            .unwrap();
        assert_eq!(j, JetVectorSection::holonomic(&sec(x().pow(2).scale(&qi(3))), 1));

        let b = op1(PolyVectorField::zero(1), x());
        let c = commutator(&a, &b).unwrap();
        let input = JetVectorSection::new(
            1,
            1,
            2,
            vec![(x(), s.clone()), (Poly::one(1), sec(x().add(&Poly::one(1))))],
        )
        .unwrap();
        let lhs = prolong_operator(&c, 2).apply(&input).unwrap();
        let rhs =
            prolonged_commutator_applied(&prolong_operator(&a, 2), &prolong_operator(&b, 2), &input)
                .unwrap();
        assert_eq!(lhs, rhs);
        assert!(prolong_operator(&b, 2).symbol_check(&x().pow(2), &input).unwrap());

        let k0 = prolong_operator(&b, 0)
            .apply(&JetVectorSection::holonomic(&s, 0))
            .unwrap();
        assert_eq!(k0, JetVectorSection::holonomic(&apply(&b, &s).unwrap(), 0));
    }
}
