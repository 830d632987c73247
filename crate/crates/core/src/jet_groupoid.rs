//! The groupoid of invertible k-jets over a coordinate patch: arrows,
//! composition, inversion, projections, prolongation of maps and vector
//! fields, and the semi-direct extension by jets of matrix-valued maps.

use crate::dual::Dual;
use crate::multijet::{
    jet_compose, jet_invert, jet_of_polynomial, JetError, JetResult, MatrixJet, TruncatedJet,
};
use crate::poly::{Poly, PolyVectorField};
use crate::scalar::{Scalar, Q};

/// An invertible k-jet `j_kφ(x)` with source `x` and target `φ(x)`.
#[derive(Clone, Debug)]
pub struct JetArrow<T = Q> {
    jet: TruncatedJet<T>,
}

impl<T: Scalar> PartialEq for JetArrow<T> {
    fn eq(&self, other: &Self) -> bool {
        self.jet == other.jet
    }
}

impl<T: Scalar> JetArrow<T> {
    pub fn new(jet: TruncatedJet<T>) -> JetResult<Self> {
        if jet.n() != jet.m() {
            return Err(JetError::Dimension(
                "a jet arrow maps the patch to itself (n = m)".into(),
            ));
        }
        if !jet.is_invertible() {
            return Err(JetError::Singular);
        }
        Ok(Self { jet })
    }

    /// The unit at `x`.
    pub fn identity(x: Vec<T>, k: u32) -> Self {
        Self {
            jet: TruncatedJet::identity(x, k),
        }
    }

    /// `j_kφ(x)` for a polynomial map `φ`.
    pub fn of_polynomial(phi: &[Poly], x: &[T], k: u32) -> JetResult<Self> {
        Self::new(jet_of_polynomial(phi, x, k)?)
    }

    pub fn jet(&self) -> &TruncatedJet<T> {
        &self.jet
    }

    pub fn into_jet(self) -> TruncatedJet<T> {
        self.jet
    }

    /// `α(A)`.
    pub fn source(&self) -> &[T] {
        self.jet.base()
    }

    /// `β(A)`.
    pub fn target(&self) -> Vec<T> {
        self.jet.value()
    }

    pub fn dim(&self) -> usize {
        self.jet.n()
    }

    pub fn k(&self) -> u32 {
        self.jet.k()
    }

    pub fn is_unit(&self) -> bool {
        self.jet.is_identity()
    }

    /// `A·B`, defined when `α(A) = β(B)`.
    pub fn compose(&self, other: &Self) -> JetResult<Self> {
        Ok(Self {
            jet: jet_compose(&self.jet, &other.jet)?,
        })
    }

    pub fn invert(&self) -> JetResult<Self> {
        Ok(Self {
            jet: jet_invert(&self.jet)?,
        })
    }

    /// `ρ_h(A)`.
    pub fn project(&self, h: u32) -> JetResult<Self> {
        Ok(Self {
            jet: self.jet.project(h)?,
        })
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> JetArrow<U> {
        JetArrow {
            jet: self.jet.map(f),
        }
    }
}

/// Left translation by the prolongation of `φ`: `[j_kφ(y)]·X`, `y = β(X)`.
pub fn prolong_diffeo_action<T: Scalar>(phi: &[Poly], x: &JetArrow<T>) -> JetResult<JetArrow<T>> {
    let lift = JetArrow::of_polynomial(phi, &x.target(), x.k())?;
    lift.compose(x)
}

/// Something that yields, at every point `y`, a k-jet at `y` of a vector
/// field: holonomic jets `j_kθ(y)` or combinations `Σ f_i(y) j_kμ_i(y)`.
pub trait JetField {
    fn dim(&self) -> usize;

    fn jet_at<T: Scalar>(&self, y: &[T], k: u32) -> JetResult<TruncatedJet<T>>;
}

impl JetField for PolyVectorField {
    fn dim(&self) -> usize {
        PolyVectorField::dim(self)
    }

    fn jet_at<T: Scalar>(&self, y: &[T], k: u32) -> JetResult<TruncatedJet<T>> {
        jet_of_polynomial(self.components(), y, k)
    }
}

/// The right-invariant field generated by `field`, evaluated at the jet
/// `x`: the tangent `Ξ(β X) ∘ X`, returned as a jet at `α(X)` whose value
/// is the velocity of the target and whose coefficients are the
/// velocities of the coefficients of `X`.
pub fn right_invariant_vector<F: JetField, T: Scalar>(
    field: &F,
    x: &TruncatedJet<T>,
) -> JetResult<TruncatedJet<T>> {
    let at_target = field.jet_at(&x.value(), x.k())?;
    jet_compose(&at_target, x)
}

/// Prolongation `θ_{k,X}` of a polynomial vector field at the arrow `X`:
/// the derivative at `t = 0` of `(id + tθ) ∘ X`.
pub fn prolong_vector_field<T: Scalar>(
    theta: &PolyVectorField,
    x: &JetArrow<T>,
) -> JetResult<TruncatedJet<T>> {
    right_invariant_vector(theta, &x.jet)
}

/// Pushforward of a tangent at `X` under the right translation by `Y`,
/// a tangent at `X·Y`.
pub fn push_right<T: Scalar>(v: &TruncatedJet<T>, y: &JetArrow<T>) -> JetResult<TruncatedJet<T>> {
    jet_compose(v, &y.jet)
}

fn lift_dual(x: &TruncatedJet<Q>, dir: &TruncatedJet<Q>) -> TruncatedJet<Dual<Q>> {
    let flat: Vec<Dual<Q>> = x
        .flat()
        .into_iter()
        .zip(dir.flat())
        .map(|(a, b)| Dual::new(a, b))
        .collect();
    let base = x.map(|c| Dual::constant(c.clone()));
    base.from_flat(&flat)
}

/// Directional derivative `D V_F(X)[dir]` of the right-invariant field of
/// `field`, exact via dual numbers.
fn directional<F: JetField>(
    field: &F,
    x: &TruncatedJet<Q>,
    dir: &TruncatedJet<Q>,
) -> JetResult<TruncatedJet<Q>> {
    let v = right_invariant_vector(field, &lift_dual(x, dir))?;
    Ok(v.map(|d| d.eps.clone()).with_base(x.base().to_vec()))
}

/// Lie bracket `[V_a, V_b](X) = D V_b·V_a − D V_a·V_b` of the
/// right-invariant fields of `a` and `b`, computed exactly.
pub fn right_invariant_bracket<A: JetField, B: JetField>(
    a: &A,
    b: &B,
    x: &TruncatedJet<Q>,
) -> JetResult<TruncatedJet<Q>> {
    let va = right_invariant_vector(a, x)?;
    let vb = right_invariant_vector(b, x)?;
    let db_va = directional(b, x, &va)?;
    let da_vb = directional(a, x, &vb)?;
    db_va.sub(&da_vb)
}

/// Element `(A, γ)` of the prolongation of a trivial groupoid `M × H × M`
/// with `H` a matrix group: an invertible jet `A` and a jet `γ` at `α(A)`
/// of a map into `H`.
#[derive(Clone, Debug)]
pub struct SemidirectArrow<T = Q> {
    pub arrow: JetArrow<T>,
    pub gamma: MatrixJet<T>,
}

impl<T: Scalar> PartialEq for SemidirectArrow<T> {
    fn eq(&self, other: &Self) -> bool {
        self.arrow == other.arrow && self.gamma == other.gamma
    }
}

impl<T: Scalar> SemidirectArrow<T> {
    pub fn new(arrow: JetArrow<T>, gamma: MatrixJet<T>) -> JetResult<Self> {
        if gamma.base() != arrow.source() {
            return Err(JetError::BaseMismatch);
        }
        if gamma.k() != arrow.k() {
            return Err(JetError::OrderMismatch(gamma.k(), arrow.k()));
        }
        if gamma.value().determinant().is_zero() {
            return Err(JetError::Singular);
        }
        Ok(Self { arrow, gamma })
    }

    pub fn identity(x: Vec<T>, size: usize, k: u32) -> Self {
        Self {
            gamma: MatrixJet::identity(x.clone(), size, k),
            arrow: JetArrow::identity(x, k),
        }
    }

    /// `(A′, γ′)·(A, γ) = (A′·A, (γ′·A)·γ)`.
    pub fn compose(&self, other: &Self) -> JetResult<Self> {
        let arrow = self.arrow.compose(&other.arrow)?;
        let moved = self.gamma.compose_with(other.arrow.jet())?;
        let gamma = moved.matmul(&other.gamma)?;
        Ok(Self { arrow, gamma })
    }

    /// `(A, γ)⁻¹ = (A⁻¹, γ⁻¹·A⁻¹)`.
    pub fn invert(&self) -> JetResult<Self> {
        let arrow = self.arrow.invert()?;
        let gamma = self.gamma.inverse()?.compose_with(arrow.jet())?;
        Ok(Self { arrow, gamma })
    }

    pub fn source(&self) -> &[T] {
        self.arrow.source()
    }

    pub fn target(&self) -> Vec<T> {
        self.arrow.target()
    }
}

/// `γ′·A⁻¹` for `γ′` a jet at `α(A)`: the conjugate `A·γ′·A⁻¹` of a
/// fibre element by a pure jet arrow.
pub fn conjugate_fibre<T: Scalar>(a: &JetArrow<T>, gamma: &MatrixJet<T>) -> JetResult<MatrixJet<T>> {
    gamma.compose_with(a.invert()?.jet())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Zero;
    use crate::linalg::Mat;
    use crate::poly::{MatrixPoly, MultiIndex};
    use crate::scalar::{q, qi};

    fn x() -> Poly {
        Poly::var(1, 0)
    }

    fn arrow1(p: Poly, at: Q, k: u32) -> JetArrow {
        JetArrow::of_polynomial(&[p], &[at], k).unwrap()
    }

    #[test]
    fn compose_quadratic_arrows() {
        let a = arrow1(x().add(&x().mul(&x())), qi(0), 2);
        let ab = a.compose(&a).unwrap();
        let expected = arrow1(x().add(&x().mul(&x()).scale(&qi(2))), qi(0), 2);
        assert_eq!(ab, expected);
        assert_eq!(ab.source(), a.source());
        let unit = JetArrow::identity(vec![qi(0)], 2);
        assert_eq!(unit.compose(&a).unwrap(), a);
    }

    #[test]
    fn linear_arrows_multiply_jacobians() {
        let p = Mat::from_rows(vec![vec![qi(1), qi(2)], vec![qi(3), qi(4)]]);
        let qm = Mat::from_rows(vec![vec![q(1, 2), qi(0)], vec![qi(1), qi(1)]]);
        let z = vec![qi(0), qi(0)];
        let a = JetArrow::new(TruncatedJet::affine(z.clone(), z.clone(), &p, 2).unwrap()).unwrap();
        let b = JetArrow::new(TruncatedJet::affine(z.clone(), z, &qm, 2).unwrap()).unwrap();
        assert_eq!(a.compose(&b).unwrap().jet().jacobian(), &p * &qm);
    }

    #[test]
    fn inverse_arrow() {
        let f = arrow1(x().scale(&qi(2)).add(&x().mul(&x())), qi(0), 2);
        let g = f.invert().unwrap();
        assert_eq!(g, arrow1(x().scale(&q(1, 2)).sub(&x().mul(&x()).scale(&q(1, 8))), qi(0), 2));
        assert!(f.compose(&g).unwrap().is_unit());
    }

    #[test]
    fn projection_is_a_morphism() {
        let a = arrow1(x().add(&x().mul(&x())), qi(0), 2);
        let ab = a.compose(&a).unwrap();
        assert_eq!(ab.project(2).unwrap(), ab);
        let p1 = ab.project(1).unwrap();
        assert_eq!(p1.jet().jacobian(), Mat::identity(1));
        assert_eq!(p1, a.project(1).unwrap().compose(&a.project(1).unwrap()).unwrap());
        assert!(ab.project(3).is_err());
    }

    #[test]
    fn prolonged_diffeo_acts_on_the_left() {
        let unit = JetArrow::identity(vec![qi(1)], 2);
        let twice = prolong_diffeo_action(&[x().scale(&qi(2))], &unit).unwrap();
        assert_eq!(twice.target(), vec![qi(2)]);
        assert_eq!(twice.jet().jacobian(), Mat::from_rows(vec![vec![qi(2)]]));
        let id = prolong_diffeo_action(&[x()], &unit).unwrap();
        assert_eq!(id, unit);
    }

    #[test]
    fn prolonged_euler_field() {
        // X = (y = 3, a = 5) at source 1; θ = x∂x gives (ẏ, ȧ) = (y, a).
        let xa = JetArrow::new(
            TruncatedJet::affine(vec![qi(1)], vec![qi(3)], &Mat::from_rows(vec![vec![qi(5)]]), 1)
                .unwrap(),
        )
        .unwrap();
        let v = prolong_vector_field(&PolyVectorField::scaling(1, 0), &xa).unwrap();
        assert_eq!(v.value(), vec![qi(3)]);
        assert_eq!(v.coeff(&MultiIndex(vec![1])), vec![qi(5)]);
        let zero = prolong_vector_field(&PolyVectorField::zero(1), &xa).unwrap();
        assert!(zero.flat().iter().all(Zero::is_zero));
    }

    #[test]
    fn prolongation_preserves_brackets() {
        let dx = PolyVectorField::coordinate(1, 0);
        let xdx = PolyVectorField::scaling(1, 0);
        let xa = arrow1(x().add(&x().mul(&x()).scale(&q(1, 3))), q(1, 2), 3);
        let lhs = right_invariant_bracket(&dx, &xdx, xa.jet()).unwrap();
        let rhs = prolong_vector_field(&dx.bracket(&xdx), &xa).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn semidirect_conjugation_by_pure_arrow() {
        let a = arrow1(x().scale(&qi(2)).add(&x().mul(&x())), qi(1), 2);
        let src = a.source().to_vec();
        let gp = MatrixPoly::new(
            1,
            2,
            vec![Poly::one(1), x(), Poly::zero(1), Poly::one(1).add(&x().mul(&x()))],
        );
        let gamma = MatrixJet::of_matrix_poly(&gp, &src, 2).unwrap();
        let big_a = SemidirectArrow::new(a.clone(), MatrixJet::identity(vec![qi(1)], 2, 2)).unwrap();
        let fibre = SemidirectArrow::new(JetArrow::identity(src.clone(), 2), gamma.clone()).unwrap();
        let conj = big_a
            .compose(&fibre)
            .unwrap()
            .compose(&big_a.invert().unwrap())
            .unwrap();
        assert!(conj.arrow.is_unit());
        assert_eq!(conj.gamma, conjugate_fibre(&a, &gamma).unwrap());
    }
}
