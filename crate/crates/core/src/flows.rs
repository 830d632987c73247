//! Exponential maps by fixed-step RK4: flows of polynomial vector fields,
//! `Exp tΞ` on trivial groupoids `M × GL(m) × M` and on jet groupoids,
//! plus the one-parameter-group, Campbell–Hausdorff, translation and
//! fibre-exponential harnesses.

use thiserror::Error;

use crate::algebroid::{bracket_jet, bracket_trivial, AlgebroidError, JetSection, TrivialSection};
use crate::jet_groupoid::{right_invariant_vector, JetArrow};
use crate::linalg::Mat;
use crate::multijet::{JetError, MatrixJet, TruncatedJet};
use crate::poly::{MatrixPoly, PolyVectorField};
use crate::scalar::{distance, norm, q, q_from_f64, Scalar, Q};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("flow blow-up at t = {t}: |state| = {norm:e}; the field is not complete on this horizon")]
    BlowUp { t: f64, norm: f64 },
    #[error("singular Jacobian drift at t = {t}: det = {det:e}; the arrow is no longer admissible")]
    SingularJacobian { t: f64, det: f64 },
    #[error("|t| = {t} exceeds t_max = {t_max}")]
    Horizon { t: f64, t_max: f64 },
    #[error("invalid flow configuration: {0}")]
    Config(String),
    #[error("time {0} is not a finite number")]
    NonFiniteTime(f64),
    #[error(transparent)]
    Algebroid(#[from] AlgebroidError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

pub type FlowResult<T> = Result<T, FlowError>;

/// Integrator settings.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowConfig {
    pub step: f64,
    pub t_max: f64,
    pub tol: f64,
    /// Also integrate at half step and report `|y_h − y_{h/2}| / 15`.
    pub richardson: bool,
    pub blowup_threshold: f64,
    pub det_floor: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            step: 1e-3,
            t_max: 10.0,
            tol: 1e-6,
            richardson: false,
            blowup_threshold: 1e12,
            det_floor: 1e-9,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> FlowResult<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(FlowError::Config(format!("step must be positive, got {}", self.step)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(FlowError::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.t_max.is_nan() || self.t_max < 0.0 {
            return Err(FlowError::Config(format!("t_max must be non-negative, got {}", self.t_max)));
        }
        Ok(())
    }
}

/// Integrates the autonomous system `y′ = f(y)` from `0` to `t`.
///
/// Blow-up is reported when the state norm exceeds the threshold, or when
/// the RK4 stages of one step disagree by more than the state size
/// (`h·|k4 − k1| > 1 + |y|`), which catches finite-time escape before the
/// fixed step can follow the solution out.
fn rk4(
    f: &dyn Fn(&[f64]) -> FlowResult<Vec<f64>>,
    y0: &[f64],
    t: f64,
    step: f64,
    cfg: &FlowConfig,
    guard: &dyn Fn(&[f64], f64) -> FlowResult<()>,
) -> FlowResult<Vec<f64>> {
    if !t.is_finite() {
        return Err(FlowError::NonFiniteTime(t));
    }
    if t.abs() > cfg.t_max {
        return Err(FlowError::Horizon { t, t_max: cfg.t_max });
    }
    let n = (t.abs() / step).ceil() as usize;
    let mut y = y0.to_vec();
    if n == 0 {
        return Ok(y);
    }
    let h = t / n as f64;
    let axpy = |y: &[f64], a: f64, k: &[f64]| -> Vec<f64> {
        y.iter().zip(k).map(|(y, k)| y + a * k).collect()
    };
    for i in 0..n {
        let k1 = f(&y)?;
        let k2 = f(&axpy(&y, h / 2.0, &k1))?;
        let k3 = f(&axpy(&y, h / 2.0, &k2))?;
        let k4 = f(&axpy(&y, h, &k3))?;
        let spread = h.abs() * distance(&k4, &k1);
        let size = norm(&y);
        let now = h * (i + 1) as f64;
        if !spread.is_finite() || spread > 1.0 + size {
            return Err(FlowError::BlowUp { t: now, norm: size });
        }
        for j in 0..y.len() {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        let size = norm(&y);
        if !size.is_finite() || size > cfg.blowup_threshold {
            return Err(FlowError::BlowUp { t: now, norm: size });
        }
        guard(&y, now)?;
    }
    Ok(y)
}

fn no_guard(_: &[f64], _: f64) -> FlowResult<()> {
    Ok(())
}

/// Integrates at `cfg.step` and, with Richardson on, at half the step.
fn integrate(
    f: &dyn Fn(&[f64]) -> FlowResult<Vec<f64>>,
    y0: &[f64],
    t: f64,
    cfg: &FlowConfig,
    guard: &dyn Fn(&[f64], f64) -> FlowResult<()>,
) -> FlowResult<(Vec<f64>, Option<f64>)> {
    cfg.validate()?;
    let y = rk4(f, y0, t, cfg.step, cfg, guard)?;
    if !cfg.richardson {
        return Ok((y, None));
    }
    let fine = rk4(f, y0, t, cfg.step / 2.0, cfg, guard)?;
    let est = distance(&y, &fine) / 15.0;
    Ok((fine, Some(est)))
}

/// `exp tθ(x)` with an optional Richardson error estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowPoint {
    pub point: Vec<f64>,
    pub error_estimate: Option<f64>,
}

pub fn flow_vector_field(
    theta: &PolyVectorField,
    x: &[f64],
    t: f64,
    cfg: &FlowConfig,
) -> FlowResult<FlowPoint> {
    check_point(theta.dim(), x)?;
    let f = |y: &[f64]| Ok(theta.eval(y));
    let (point, error_estimate) = integrate(&f, x, t, cfg, &no_guard)?;
    Ok(FlowPoint {
        point,
        error_estimate,
    })
}

fn check_point(n: usize, x: &[f64]) -> FlowResult<()> {
    if x.len() != n {
        return Err(AlgebroidError::Dimension(format!(
            "point has {} coordinates, field lives on R^{n}",
            x.len()
        ))
        .into());
    }
    Ok(())
}

/// Arrow `(y, g, x)` of `M × GL(m) × M`, from `x` to `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrivialElement {
    pub target: Vec<f64>,
    pub g: Mat<f64>,
    pub source: Vec<f64>,
}

impl TrivialElement {
    pub fn unit(x: &[f64], m: usize) -> Self {
        Self {
            target: x.to_vec(),
            g: Mat::identity(m),
            source: x.to_vec(),
        }
    }

    /// `(y, g, x)·(x′, g′, x″) = (y, gg′, x″)`; the middle points must
    /// agree to within `1e−9` relative.
    pub fn compose(&self, other: &Self) -> FlowResult<Self> {
        let gap = distance(&self.source, &other.target);
        if gap > 1e-9 * (1.0 + norm(&self.source)) {
            return Err(JetError::NonComposable {
                outer_base: format!("{:?}", self.source),
                inner_value: format!("{:?}", other.target),
            }
            .into());
        }
        Ok(Self {
            target: self.target.clone(),
            g: &self.g * &other.g,
            source: other.source.clone(),
        })
    }

    pub fn invert(&self) -> FlowResult<Self> {
        let g = self.g.inverse().ok_or(JetError::Singular)?;
        Ok(Self {
            target: self.source.clone(),
            g,
            source: self.target.clone(),
        })
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let dg = (&self.g - &other.g).into_vec();
        let parts = [
            distance(&self.target, &other.target),
            distance(&self.source, &other.source),
            norm(&dg),
        ];
        parts.iter().map(|p| p * p).sum::<f64>().sqrt()
    }
}

/// `Exp tΞ(x) = (exp tθ(x), g(t,x), x)` with `dg/dt = h(exp tθ(x))·g`,
/// `g(0) = I`.
pub fn exp_trivial(
    xi: &TrivialSection,
    x: &[f64],
    t: f64,
    cfg: &FlowConfig,
) -> FlowResult<TrivialElement> {
    exp_trivial_with_estimate(xi, x, t, cfg).map(|(e, _)| e)
}

pub fn exp_trivial_with_estimate(
    xi: &TrivialSection,
    x: &[f64],
    t: f64,
    cfg: &FlowConfig,
) -> FlowResult<(TrivialElement, Option<f64>)> {
    let n = xi.dim();
    let m = xi.size();
    check_point(n, x)?;
    let f = |s: &[f64]| {
        let (y, g) = s.split_at(n);
        let mut out = xi.theta.eval(y);
        let hy = xi.h.eval(y);
        let gm = Mat::from_vec(m, m, g.to_vec());
        out.extend((&hy * &gm).into_vec());
        Ok(out)
    };
    let mut s0 = x.to_vec();
    s0.extend(Mat::<f64>::identity(m).into_vec());
    let (s, est) = integrate(&f, &s0, t, cfg, &no_guard)?;
    let (y, g) = s.split_at(n);
    Ok((
        TrivialElement {
            target: y.to_vec(),
            g: Mat::from_vec(m, m, g.to_vec()),
            source: x.to_vec(),
        },
        est,
    ))
}

/// Samples of `t ↦ Exp tΞ(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupPath {
    pub samples: Vec<(f64, Vec<f64>, Mat<f64>)>,
}

impl GroupPath {
    pub fn sample(
        xi: &TrivialSection,
        x: &[f64],
        times: &[f64],
        cfg: &FlowConfig,
    ) -> FlowResult<Self> {
        let samples = times
            .iter()
            .map(|&t| {
                let e = exp_trivial(xi, x, t, cfg)?;
                Ok((t, e.target, e.g))
            })
            .collect::<FlowResult<_>>()?;
        Ok(Self { samples })
    }

    /// Rows `t, point…, g row-major`, with a header.
    pub fn to_csv(&self) -> String {
        let Some((_, p, g)) = self.samples.first() else {
            return "t\n".into();
        };
        let mut header = vec!["t".to_string()];
        header.extend((0..p.len()).map(|i| format!("x{i}")));
        for i in 0..g.rows() {
            for j in 0..g.cols() {
                header.push(format!("g{i}{j}"));
            }
        }
        let mut out = header.join(",");
        out.push('\n');
        for (t, p, g) in &self.samples {
            let row: Vec<String> = std::iter::once(*t)
                .chain(p.iter().copied())
                .chain(g.as_slice().iter().copied())
                .map(|v| v.to_string())
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// `Exp tΞ` on the jet groupoid: integrates the right-invariant field of
/// `Ξ` in jet-coefficient coordinates from the unit at `x`.
pub fn exp_jet(xi: &JetSection, x: &[f64], t: f64, cfg: &FlowConfig) -> FlowResult<JetArrow<f64>> {
    let n = xi.dim();
    check_point(n, x)?;
    let k = xi.k();
    let unit = TruncatedJet::<f64>::identity(x.to_vec(), k);
    let f = |s: &[f64]| -> FlowResult<Vec<f64>> {
        let jet = unit.from_flat(s);
        Ok(right_invariant_vector(xi, &jet)?.flat())
    };
    let guard = |s: &[f64], now: f64| -> FlowResult<()> {
        if k == 0 {
            return Ok(());
        }
        let det = unit.from_flat(s).jacobian().determinant();
        if det.abs() < cfg.det_floor {
            return Err(FlowError::SingularJacobian { t: now, det });
        }
        Ok(())
    };
    let (s, _) = integrate(&f, &unit.flat(), t, cfg, &guard)?;
    Ok(JetArrow::new(unit.from_flat(&s))?)
}

/// Euclidean distance between two float arrows' coefficients and sources.
pub fn jet_distance(a: &JetArrow<f64>, b: &JetArrow<f64>) -> f64 {
    let d1 = distance(&a.jet().flat(), &b.jet().flat());
    let d2 = distance(a.source(), b.source());
    (d1 * d1 + d2 * d2).sqrt()
}

/// Sections whose Exponential can be integrated and whose arrows
/// composed, so that the group-law and Campbell–Hausdorff harnesses can be
/// written once.
pub trait FlowSection: Clone {
    type Element: Clone;

    fn exp(&self, x: &[f64], t: f64, cfg: &FlowConfig) -> FlowResult<Self::Element>;
    fn target(e: &Self::Element) -> Vec<f64>;
    /// `a·b`, requiring `α(a) = β(b)`.
    fn compose(a: &Self::Element, b: &Self::Element) -> FlowResult<Self::Element>;
    fn distance(a: &Self::Element, b: &Self::Element) -> f64;
    fn add(&self, other: &Self) -> FlowResult<Self>;
    fn scale(&self, c: &Q) -> Self;
    fn bracket(&self, other: &Self) -> FlowResult<Self>;
}

impl FlowSection for TrivialSection {
    type Element = TrivialElement;

    fn exp(&self, x: &[f64], t: f64, cfg: &FlowConfig) -> FlowResult<TrivialElement> {
        exp_trivial(self, x, t, cfg)
    }

    fn target(e: &TrivialElement) -> Vec<f64> {
        e.target.clone()
    }

    fn compose(a: &TrivialElement, b: &TrivialElement) -> FlowResult<TrivialElement> {
        a.compose(b)
    }

    fn distance(a: &TrivialElement, b: &TrivialElement) -> f64 {
        a.distance(b)
    }

    fn add(&self, other: &Self) -> FlowResult<Self> {
        Ok(TrivialSection::add(self, other))
    }

    fn scale(&self, c: &Q) -> Self {
        TrivialSection::scale(self, c)
    }

    fn bracket(&self, other: &Self) -> FlowResult<Self> {
        Ok(bracket_trivial(self, other)?)
    }
}

impl FlowSection for JetSection {
    type Element = JetArrow<f64>;

    fn exp(&self, x: &[f64], t: f64, cfg: &FlowConfig) -> FlowResult<JetArrow<f64>> {
        exp_jet(self, x, t, cfg)
    }

    fn target(e: &JetArrow<f64>) -> Vec<f64> {
        e.target()
    }

    /// Float arrows are re-based onto the inner target before composing,
    /// absorbing integrator round-off in the junction point.
    fn compose(a: &JetArrow<f64>, b: &JetArrow<f64>) -> FlowResult<JetArrow<f64>> {
        let gap = distance(a.source(), &b.target());
        if gap > 1e-9 * (1.0 + norm(a.source())) {
            return Err(JetError::NonComposable {
                outer_base: format!("{:?}", a.source()),
                inner_value: format!("{:?}", b.target()),
            }
            .into());
        }
        let a = JetArrow::new(a.jet().with_base(b.target()))?;
        Ok(a.compose(b)?)
    }

    fn distance(a: &JetArrow<f64>, b: &JetArrow<f64>) -> f64 {
        jet_distance(a, b)
    }

    fn add(&self, other: &Self) -> FlowResult<Self> {
        Ok(JetSection::add(self, other)?)
    }

    fn scale(&self, c: &Q) -> Self {
        JetSection::scale(self, c)
    }

    fn bracket(&self, other: &Self) -> FlowResult<Self> {
        Ok(bracket_jet(self, other)?)
    }
}

/// `|Exp(t+u)Ξ(x) − Exp tΞ(e′)·Exp uΞ(x)|`, `e′ = β(Exp uΞ(x))`.
pub fn group_law_defect<S: FlowSection>(
    xi: &S,
    x: &[f64],
    t: f64,
    u: f64,
    cfg: &FlowConfig,
) -> FlowResult<f64> {
    let whole = xi.exp(x, t + u, cfg)?;
    let first = xi.exp(x, u, cfg)?;
    let second = xi.exp(&S::target(&first), t, cfg)?;
    Ok(S::distance(&whole, &S::compose(&second, &first)?))
}

/// Second-order term used in [`bch_defect`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BchCorrection {
    /// `−(t²/2)[Ξ₁, Ξ₂]`, the correct term for the bracket of this crate.
    Bracket,
    /// `+(t²/2)[Ξ₁, Ξ₂]`: the opposite sign convention.
    Flipped,
    /// No second-order term.
    Dropped,
}

/// `|Exp tΞ₁·Exp tΞ₂(x) − Exp(t(Ξ₁+Ξ₂) + c·(t²/2)[Ξ₁,Ξ₂])(x)|` where the
/// product is that of admissible sections and `c` is set by `correction`.
///
/// `t` must be exactly representable as a rational (every finite `f64`
/// is).
pub fn bch_defect<S: FlowSection>(
    a: &S,
    b: &S,
    x: &[f64],
    t: f64,
    correction: BchCorrection,
    cfg: &FlowConfig,
) -> FlowResult<f64> {
    let tq = q_from_f64(t).ok_or(FlowError::NonFiniteTime(t))?;
    let first = b.exp(x, t, cfg)?;
    let second = a.exp(&S::target(&first), t, cfg)?;
    let product = S::compose(&second, &first)?;
    let mut z = a.add(b)?.scale(&tq);
    let half_t2 = &tq * &tq * q(1, 2);
    match correction {
        BchCorrection::Bracket => z = z.add(&a.bracket(b)?.scale(&-half_t2))?,
        BchCorrection::Flipped => z = z.add(&a.bracket(b)?.scale(&half_t2))?,
        BchCorrection::Dropped => {}
    }
    let single = z.exp(x, 1.0, cfg)?;
    Ok(S::distance(&product, &single))
}

/// Least-squares slope of `log defect` against `log t`.
pub fn loglog_slope(ts: &[f64], defects: &[f64]) -> f64 {
    let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = defects.iter().map(|d| d.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Right translation `φ(g) = g·σ(α(g))⁻¹`.
pub fn right_translate(
    sigma: &dyn Fn(&[f64]) -> FlowResult<TrivialElement>,
    g: &TrivialElement,
) -> FlowResult<TrivialElement> {
    g.compose(&sigma(&g.source)?.invert()?)
}

/// Left translation `ψ(g) = σ(β(g))·g`.
pub fn left_translate(
    sigma: &dyn Fn(&[f64]) -> FlowResult<TrivialElement>,
    g: &TrivialElement,
) -> FlowResult<TrivialElement> {
    sigma(&g.target)?.compose(g)
}

/// Conjugation `ψ∘φ`, an automorphism fixing every unit.
pub fn conjugate(
    sigma: &dyn Fn(&[f64]) -> FlowResult<TrivialElement>,
    g: &TrivialElement,
) -> FlowResult<TrivialElement> {
    left_translate(sigma, &right_translate(sigma, g)?)
}

/// `d/dt Exp tΞ(x)` at `t = 0` by a central difference, as the pair
/// `(target velocity, g velocity)`.
pub fn exp_derivative_at_zero(
    xi: &TrivialSection,
    x: &[f64],
    dt: f64,
    cfg: &FlowConfig,
) -> FlowResult<(Vec<f64>, Mat<f64>)> {
    let p = exp_trivial(xi, x, dt, cfg)?;
    let m = exp_trivial(xi, x, -dt, cfg)?;
    let v = p
        .target
        .iter()
        .zip(&m.target)
        .map(|(a, b)| (a - b) / (2.0 * dt))
        .collect();
    Ok((v, (&p.g - &m.g).scale(&(1.0 / (2.0 * dt)))))
}

/// Value at `y` of `Ad(Exp tΞ)Σ`: the `s`-derivative at `0` of
/// `σ(ε_s)·Exp sΣ(e)·σ(e)⁻¹` with `σ = Exp tΞ`, `e = exp(−tθ)(y)`,
/// `ε_s = β(Exp sΣ(e))`, by a central difference in `s`.
pub fn adjoint_action(
    xi: &TrivialSection,
    sigma: &TrivialSection,
    y: &[f64],
    t: f64,
    ds: f64,
    cfg: &FlowConfig,
) -> FlowResult<(Vec<f64>, Mat<f64>)> {
    let section = |p: &[f64]| exp_trivial(xi, p, t, cfg);
    let e = flow_vector_field(&xi.theta, y, -t, cfg)?.point;
    let conj = |s: f64| -> FlowResult<TrivialElement> {
        let inner = exp_trivial(sigma, &e, s, cfg)?;
        let back = section(&e)?.invert()?;
        // Re-anchor the source at y exactly; the flows agree to round-off.
        let back = TrivialElement {
            source: y.to_vec(),
            ..back
        };
        section(&inner.target)?.compose(&inner)?.compose(&back)
    };
    let p = conj(ds)?;
    let m = conj(-ds)?;
    let v = p
        .target
        .iter()
        .zip(&m.target)
        .map(|(a, b)| (a - b) / (2.0 * ds))
        .collect();
    Ok((v, (&p.g - &m.g).scale(&(1.0 / (2.0 * ds)))))
}

/// `d/dt Ad(Exp tΞ)Σ(y)` at `t = 0` by nested central differences.
pub fn ad_finite_difference(
    xi: &TrivialSection,
    sigma: &TrivialSection,
    y: &[f64],
    delta: f64,
    cfg: &FlowConfig,
) -> FlowResult<(Vec<f64>, Mat<f64>)> {
    let (vp, gp) = adjoint_action(xi, sigma, y, delta, delta, cfg)?;
    let (vm, gm) = adjoint_action(xi, sigma, y, -delta, delta, cfg)?;
    let v = vp
        .iter()
        .zip(&vm)
        .map(|(a, b)| (a - b) / (2.0 * delta))
        .collect();
    Ok((v, (&gp - &gm).scale(&(1.0 / (2.0 * delta)))))
}

/// `Exp t j_kζ = j_k(exp tζ)` at `x`: the pointwise matrix exponential
/// taken on jet coefficients.
pub fn exp_group_jet<T: Scalar>(zeta: &MatrixPoly, x: &[T], t: &T, k: u32) -> FlowResult<MatrixJet<T>> {
    Ok(MatrixJet::of_matrix_poly(zeta, x, k)?.scale(t).exp()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::ad;
    use crate::poly::Poly;
    use crate::scalar::qi;

    fn x() -> Poly {
        Poly::var(1, 0)
    }

    fn cfg() -> FlowConfig {
        FlowConfig::default()
    }

    fn scalar_section(theta: PolyVectorField, h: MatrixPoly) -> TrivialSection {
        TrivialSection::new(theta, h).unwrap()
    }

    #[test]
    fn closed_form_flows() {
        let zero = PolyVectorField::zero(1);
        assert_eq!(flow_vector_field(&zero, &[0.3], 2.0, &cfg()).unwrap().point, vec![0.3]);
        let e = flow_vector_field(&PolyVectorField::scaling(1, 0), &[1.0], 1.0, &cfg()).unwrap();
        assert!((e.point[0] - std::f64::consts::E).abs() < 1e-8);
        let sq = PolyVectorField::new(vec![x().mul(&x())]);
        match flow_vector_field(&sq, &[1.0], 1.0, &cfg()) {
            Err(FlowError::BlowUp { t, .. }) => assert!(t < 1.0),
            other => panic!("expected blow-up, got {other:?}"),
        }
        let lin = PolyVectorField::scaling(1, 0).scale(&qi(-1));
        assert!(flow_vector_field(&lin, &[1.0], 10.0, &cfg()).is_ok());
        assert!(flow_vector_field(&PolyVectorField::scaling(1, 0), &[1.0], -10.0, &cfg()).is_ok());
    }

    #[test]
    fn richardson_estimate_is_small() {
        let c = FlowConfig {
            richardson: true,
            ..cfg()
        };
        let e = flow_vector_field(&PolyVectorField::scaling(1, 0), &[1.0], 1.0, &c).unwrap();
        let est = e.error_estimate.unwrap();
        assert!(est > 0.0 && est < 1e-10);
    }

    #[test]
    fn trivial_exponentials() {
        let m = Mat::from_rows(vec![vec![qi(0), qi(1)], vec![qi(0), qi(0)]]);
        let s = scalar_section(PolyVectorField::zero(1), MatrixPoly::constant(&m, 1));
        let e = exp_trivial(&s, &[0.0], 0.7, &cfg()).unwrap();
        assert!((e.g[(0, 1)] - 0.7).abs() < 1e-10);
        assert!((e.g[(0, 0)] - 1.0).abs() < 1e-12);

        let lam = x().add(&Poly::one(1));
        let s = scalar_section(
            PolyVectorField::zero(1),
            MatrixPoly::from_scalar(&lam, &Mat::identity(2)),
        );
        let e = exp_trivial(&s, &[0.5], 0.8, &cfg()).unwrap();
        assert!((e.g[(1, 1)] - (0.8f64 * 1.5).exp()).abs() < 1e-8);

        let s = scalar_section(PolyVectorField::coordinate(1, 0), MatrixPoly::zero(1, 2));
        let e = exp_trivial(&s, &[0.25], 1.5, &cfg()).unwrap();
        assert!((e.target[0] - 1.75).abs() < 1e-12);
        assert_eq!(exp_trivial(&s, &[0.25], 0.0, &cfg()).unwrap(), TrivialElement::unit(&[0.25], 2));
    }

    #[test]
    fn group_law() {
        let s = scalar_section(PolyVectorField::scaling(1, 0), MatrixPoly::zero(1, 1));
        assert!(group_law_defect(&s, &[1.0], 0.5, 0.5, &cfg()).unwrap() < 1e-7);
        let s = scalar_section(
            PolyVectorField::coordinate(1, 0),
            MatrixPoly::from_scalar(&x(), &Mat::unit(2, 0, 1)),
        );
        assert!(group_law_defect(&s, &[0.3], 0.4, -0.3, &cfg()).unwrap() < 1e-6);
        assert!(group_law_defect(&s, &[0.3], 0.4, 0.0, &cfg()).unwrap() < 1e-12);
    }

    #[test]
    fn bch_slopes() {
        let a = scalar_section(PolyVectorField::coordinate(1, 0), MatrixPoly::zero(1, 1));
        let b = scalar_section(PolyVectorField::scaling(1, 0), MatrixPoly::zero(1, 1));
        let ts = [0.2, 0.1, 0.05, 0.025];
        let slope = |c| {
            let d: Vec<f64> = ts
                .iter()
                .map(|&t| bch_defect(&a, &b, &[0.7], t, c, &cfg()).unwrap())
                .collect();
            loglog_slope(&ts, &d)
        };
        assert!((slope(BchCorrection::Bracket) - 3.0).abs() < 0.2);
        assert!((slope(BchCorrection::Dropped) - 2.0).abs() < 0.2);
        assert!((slope(BchCorrection::Flipped) - 2.0).abs() < 0.2);

        let n2 = |i| PolyVectorField::coordinate(2, i);
        let a = scalar_section(n2(0), MatrixPoly::zero(2, 1));
        let b = scalar_section(n2(1), MatrixPoly::zero(2, 1));
        let d = bch_defect(&a, &b, &[0.1, 0.2], 0.1, BchCorrection::Bracket, &cfg()).unwrap();
        assert!(d < 1e-8);
    }

    #[test]
    fn translations_and_adjoint() {
        let unit = |p: &[f64]| Ok(TrivialElement::unit(p, 1));
        let g = TrivialElement {
            target: vec![2.0],
            g: Mat::from_vec(1, 1, vec![3.0]),
            source: vec![1.0],
        };
        assert_eq!(right_translate(&unit, &g).unwrap(), g);
        assert_eq!(left_translate(&unit, &g).unwrap(), g);

        // Pair groupoid: σ(x) = (f(x), x) with f(x) = x + 1.
        let shift = |p: &[f64]| {
            Ok(TrivialElement {
                target: vec![p[0] + 1.0],
                g: Mat::identity(1),
                source: p.to_vec(),
            })
        };
        let pair = TrivialElement {
            target: vec![5.0],
            g: Mat::identity(1),
            source: vec![2.0],
        };
        let phi = right_translate(&shift, &pair).unwrap();
        assert_eq!((phi.target[0], phi.source[0]), (5.0, 3.0));
        let c = conjugate(&shift, &TrivialElement::unit(&[2.0], 1)).unwrap();
        assert_eq!(c.target, c.source);

        let xi = scalar_section(
            PolyVectorField::coordinate(1, 0),
            MatrixPoly::from_scalar(&x(), &Mat::unit(2, 0, 1)),
        );
        let sg = scalar_section(
            PolyVectorField::scaling(1, 0),
            MatrixPoly::constant(&Mat::unit(2, 1, 0), 1),
        );
        let (v, gdot) = ad_finite_difference(&xi, &sg, &[0.4], 1e-3, &cfg()).unwrap();
        let expect = ad(&xi, &sg).unwrap();
        let ev = expect.theta.eval(&[0.4]);
        let eh = expect.h.eval(&[0.4]);
        assert!((v[0] - ev[0]).abs() < 1e-4, "{v:?} vs {ev:?}");
        assert!((&gdot - &eh).max_norm() < 1e-4, "{gdot:?} vs {eh:?}");
    }

    #[test]
    fn jet_exponentials() {
        let dx = JetSection::holonomic(&PolyVectorField::coordinate(1, 0), 1);
        let a = exp_jet(&dx, &[0.0], 1.0, &cfg()).unwrap();
        assert!((a.target()[0] - 1.0).abs() < 1e-12);
        assert!((a.jet().jacobian()[(0, 0)] - 1.0).abs() < 1e-12);

        let xdx = JetSection::holonomic(&PolyVectorField::scaling(1, 0), 1);
        let a = exp_jet(&xdx, &[1.0], 1.0, &cfg()).unwrap();
        let e = std::f64::consts::E;
        assert!((a.target()[0] - e).abs() < 1e-6);
        assert!((a.jet().jacobian()[(0, 0)] - e).abs() < 1e-6);

        let sec = JetSection::new(
            1,
            2,
            vec![(x(), PolyVectorField::coordinate(1, 0)), (Poly::one(1), PolyVectorField::scaling(1, 0))],
        )
        .unwrap();
        let full = exp_jet(&sec, &[0.3], 0.4, &cfg()).unwrap().project(1).unwrap();
        let low = exp_jet(&sec.project(1).unwrap(), &[0.3], 0.4, &cfg()).unwrap();
        assert!(jet_distance(&full, &low) < 1e-6);
        assert!(group_law_defect(&sec, &[0.3], 0.2, 0.25, &cfg()).unwrap() < 1e-6);
    }

    #[test]
    fn holonomic_jet_flow_matches_flow_map() {
        // θ = x²∂x has flow x/(1 − tx); its 2-jet at x₀ is known in closed
        // form.
        let theta = PolyVectorField::new(vec![x().mul(&x())]);
        let sec = JetSection::holonomic(&theta, 2);
        let (x0, t) = (0.5, 0.4);
        let a = exp_jet(&sec, &[x0], t, &cfg()).unwrap();
        let d = 1.0 - t * x0;
        let value = x0 / d;
        let d1 = 1.0 / (d * d);
        let d2 = 2.0 * t / (d * d * d);
        let c = a.jet().coeffs();
        assert!((a.target()[0] - value).abs() < 1e-9);
        assert!((c[&crate::poly::MultiIndex(vec![1])][0] - d1).abs() < 1e-9);
        assert!((c[&crate::poly::MultiIndex(vec![2])][0] - d2 / 2.0).abs() < 1e-9);
    }

    #[test]
    fn group_jet_exponential() {
        let n = Mat::unit(2, 0, 1);
        let zeta = MatrixPoly::from_scalar(&x(), &n);
        let j = exp_group_jet(&zeta, &[q(1, 3)], &qi(1), 1).unwrap();
        let id_plus = MatrixPoly::identity(1, 2).add(&zeta);
        assert_eq!(j, MatrixJet::of_matrix_poly(&id_plus, &[q(1, 3)], 1).unwrap());
        let z0 = exp_group_jet(&MatrixPoly::zero(1, 2), &[qi(2)], &qi(5), 3).unwrap();
        assert_eq!(z0, MatrixJet::identity(vec![qi(2)], 2, 3));
        let s = MatrixPoly::from_scalar(&x(), &Mat::identity(1));
        let a = exp_group_jet(&s, &[0.3f64], &0.2, 2).unwrap();
        let b = exp_group_jet(&s, &[0.3f64], &0.5, 2).unwrap();
        let ab = exp_group_jet(&s, &[0.3f64], &0.7, 2).unwrap();
        let prod = a.matmul(&b).unwrap();
        assert!(prod.jet().sub(ab.jet()).unwrap().max_norm() < 1e-12);
    }
}
