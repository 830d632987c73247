//! Randomized property suites. Each suite returns one [`CheckRow`] per
//! invariant; exact checks report the number of failing cases as their
//! defect, numerical checks the largest observed defect.

use std::fmt::Write as _;

use rand::Rng;

use crate::algebroid::{
    bracket_group_jet, bracket_jet, bracket_semidirect, bracket_trivial, lie_derivative,
    GroupJetSection, JetSection, SemidirectSection, TrivialSection,
};
use crate::finite_groupoid::{GroupoidError, GroupoidTable};
use crate::flows::{
    bch_defect, exp_derivative_at_zero, exp_group_jet, exp_jet, exp_trivial, flow_vector_field,
    group_law_defect, jet_distance, loglog_slope, BchCorrection, FlowConfig, FlowError,
};
use crate::jet_groupoid::JetArrow;
use crate::linalg::Mat;
use crate::linear_groupoid::{
    apply, commutator, commutator_applied, is_function_linear_on, operator_flow_residual,
    operator_from_section, prolong_operator, prolonged_commutator_applied, section_from_operator,
    symbol_check, JetVectorSection, LinearOperator, VectorSection,
};
use crate::multijet::{JetError, MatrixJet};
use crate::poly::{MatrixPoly, Poly, PolyVectorField};
use crate::random::{self, TestRng};
use crate::scalar::{qi, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRow {
    pub suite: &'static str,
    pub name: String,
    pub pass: bool,
    pub defect: f64,
    pub cases: usize,
}

/// Counts failing cases of an exact property.
struct Exact {
    name: &'static str,
    cases: usize,
    fails: usize,
}

impl Exact {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            cases: 0,
            fails: 0,
        }
    }

    fn record(&mut self, ok: bool) {
        self.cases += 1;
        if !ok {
            self.fails += 1;
        }
    }

    fn row(&self, suite: &'static str) -> CheckRow {
        CheckRow {
            suite,
            name: self.name.into(),
            pass: self.fails == 0 && self.cases > 0,
            defect: self.fails as f64,
            cases: self.cases,
        }
    }
}

/// Tracks the largest defect of a numerical property; errors count as
/// infinite defect.
struct Numeric {
    name: &'static str,
    tol: f64,
    cases: usize,
    worst: f64,
}

impl Numeric {
    fn new(name: &'static str, tol: f64) -> Self {
        Self {
            name,
            tol,
            cases: 0,
            worst: 0.0,
        }
    }

    fn record<E>(&mut self, d: Result<f64, E>) {
        self.cases += 1;
        let d = d.unwrap_or(f64::INFINITY);
        if d.is_nan() || d > self.worst {
            self.worst = d;
        }
    }

    fn row(&self, suite: &'static str) -> CheckRow {
        CheckRow {
            suite,
            name: self.name.into(),
            pass: self.worst <= self.tol && self.cases > 0,
            defect: self.worst,
            cases: self.cases,
        }
    }
}

fn ok_eq<T: PartialEq, E>(a: Result<T, E>, b: Result<T, E>) -> bool {
    matches!((a, b), (Ok(x), Ok(y)) if x == y)
}

fn ok_true<E>(a: Result<bool, E>) -> bool {
    matches!(a, Ok(true))
}

/// Exact groupoid laws on random composable triples of invertible jets.
pub fn jet_axioms(seed: u64, cases: usize) -> Vec<CheckRow> {
    let mut rng = random::rng(seed);
    let mut assoc = Exact::new("associativity (gh)l = g(hl)");
    let mut unit = Exact::new("unit laws 1·g = g = g·1");
    let mut inverse = Exact::new("inverse laws g⁻¹g = 1, gg⁻¹ = 1");
    let mut guard = Exact::new("non-composable pairs rejected");
    for _ in 0..cases {
        let n = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=4);
        let (g, h, l) = random::composable_triple(&mut rng, n, k, 10);
        assoc.record(ok_eq(
            g.compose(&h).and_then(|gh| gh.compose(&l)),
            h.compose(&l).and_then(|hl| g.compose(&hl)),
        ));
        let left = JetArrow::identity(g.target(), k).compose(&g);
        let right = g.compose(&JetArrow::identity(g.source().to_vec(), k));
        unit.record(ok_eq(left, Ok(g.clone())) && ok_eq(right, Ok(g.clone())));
        let inv_ok = g.invert().is_ok_and(|gi| {
            ok_eq(gi.compose(&g), Ok(JetArrow::identity(g.source().to_vec(), k)))
                && ok_eq(g.compose(&gi), Ok(JetArrow::identity(g.target(), k)))
        });
        inverse.record(inv_ok);
        if g.source() != l.target().as_slice() {
            guard.record(matches!(g.compose(&l), Err(JetError::NonComposable { .. })));
        }
    }
    let s = "jet groupoid";
    vec![assoc.row(s), unit.row(s), inverse.row(s), guard.row(s)]
}

/// Quotients of random `M × H × M` by `M × N × M`, `N ⊴ H`.
pub fn quotients(seed: u64, cases: usize) -> Vec<CheckRow> {
    let mut rng = random::rng(seed);
    let mut axioms = Exact::new("input and quotient satisfy the groupoid axioms");
    let mut size = Exact::new("|Γ/Σ| = |M|²·|H|/|N|");
    let mut partition = Exact::new("coset blocks partition Γ (left = right)");
    let mut functor = Exact::new("projection is a morphism onto Γ/Σ");
    let mut isotropy = Exact::new("quotient is locally trivial with isotropy |H/N|");
    let mut rejected = Exact::new("non-normal Σ rejected with a valid witness");
    for _ in 0..cases {
        let r = random::trivial_groupoid(&mut rng);
        let t = &r.table;
        let sigma = t.subgroupoid(&r.subgroup_ids(&r.normal));
        let Ok(sigma) = sigma else {
            axioms.record(false);
            continue;
        };
        let quotient = t.quotient(&sigma);
        let Ok(q) = quotient else {
            axioms.record(false);
            continue;
        };
        axioms.record(t.check_axioms().is_ok() && q.check_axioms().is_ok());
        let expected = r.m * r.m * r.group.order() / r.normal.len();
        size.record(q.len() == expected);
        let cosets = t.cosets(&sigma);
        partition.record(
            cosets.partitions(t.ids())
                && cosets == t.left_cosets(&sigma)
                && cosets.blocks.iter().all(|b| b.len() == r.normal.len()),
        );
        let proj = t.projection(&sigma);
        let morphism = t.composition_entries().iter().all(|&(g, h, gh)| {
            q.compose(proj[&g], proj[&h]).ok().flatten() == Some(proj[&gh])
        });
        functor.record(morphism);
        let report = q.local_triviality_checks();
        let iso = r.group.order() / r.normal.len();
        isotropy.record(
            report.locally_trivial()
                && report.components.len() == 1
                && report.components[0].isotropy_orders.iter().all(|&o| o == iso),
        );
        if let Some(bad) = &r.non_normal {
            let Ok(s) = t.subgroupoid(&r.subgroup_ids(bad)) else {
                rejected.record(false);
                continue;
            };
            rejected.record(match t.quotient(&s) {
                Err(GroupoidError::NotNormal { gamma, x }) => witness_valid(t, &r.subgroup_ids(bad), gamma, x),
                _ => false,
            });
        }
    }
    let s = "finite groupoids";
    vec![
        axioms.row(s),
        size.row(s),
        partition.row(s),
        functor.row(s),
        isotropy.row(s),
        rejected.row(s),
    ]
}

fn witness_valid(t: &GroupoidTable, sigma: &[u64], gamma: u64, x: u64) -> bool {
    let check = || -> Option<bool> {
        let xs = t.src(x).ok()?;
        if xs != t.tgt(x).ok()? || t.src(gamma).ok()? != xs || !sigma.contains(&x) {
            return Some(false);
        }
        let gx = t.compose(gamma, x).ok()??;
        let c = t.compose(gx, t.inv(gamma).ok()?).ok()??;
        Some(!sigma.contains(&c))
    };
    check().unwrap_or(false)
}

/// Bracket laws on random polynomial sections.
pub fn brackets(seed: u64, cases: usize) -> Vec<CheckRow> {
    let mut rng = random::rng(seed);
    let mut t_anti = Exact::new("trivial: antisymmetry");
    let mut t_jac = Exact::new("trivial: Jacobi");
    let mut t_leib = Exact::new("trivial: Leibniz in functions");
    let mut t_anchor = Exact::new("trivial: anchor is a homomorphism");
    let mut j_anti = Exact::new("jet: antisymmetry");
    let mut j_jac = Exact::new("jet: Jacobi");
    let mut j_leib = Exact::new("jet: Leibniz scaling law");
    let mut j_anchor = Exact::new("jet: anchor is a homomorphism");
    let mut g_anti = Exact::new("group jet: antisymmetry");
    let mut g_jac = Exact::new("group jet: Jacobi");
    let mut g_bilin = Exact::new("group jet: function bilinearity");
    let mut s_anti = Exact::new("semidirect: antisymmetry");
    let mut s_jac = Exact::new("semidirect: Jacobi");
    let mut s_ideal = Exact::new("semidirect: mixed bracket is the Lie derivative");
    let mut l_der = Exact::new("Lie derivative: derivation of the bracket");
    let mut l_rep = Exact::new("Lie derivative: representation");
    let mut l_mod = Exact::new("Lie derivative: Leibniz over jets of functions");
    for i in 0..cases {
        let n = rng.gen_range(1..=2);
        let k = rng.gen_range(0..=3);
        let m = rng.gen_range(1..=3);
        let deg = rng.gen_range(1..=3);
        let b = 3;
        let f = random::poly(&mut rng, n, 2, 2, b);
        let g = random::poly(&mut rng, n, 2, 2, b);

        let ts: Vec<TrivialSection> = (0..3)
            .map(|_| random::trivial_section(&mut rng, n, m, deg.min(2), b))
            .collect();
        let br = |a: &TrivialSection, c: &TrivialSection| bracket_trivial(a, c).expect("same shape");
        t_anti.record(br(&ts[0], &ts[1]) == br(&ts[1], &ts[0]).scale(&qi(-1)));
        let jac = br(&ts[0], &br(&ts[1], &ts[2]))
            .add(&br(&ts[1], &br(&ts[2], &ts[0])))
            .add(&br(&ts[2], &br(&ts[0], &ts[1])));
        t_jac.record(jac.is_zero());
        let lhs = br(&ts[0].mul_fn(&f), &ts[1].mul_fn(&g));
        let rhs = br(&ts[0], &ts[1])
            .mul_fn(&f.mul(&g))
            .add(&ts[1].mul_fn(&f.mul(&ts[0].theta.apply(&g))))
            .sub(&ts[0].mul_fn(&g.mul(&ts[1].theta.apply(&f))));
        t_leib.record(lhs == rhs);
        t_anchor.record(br(&ts[0], &ts[1]).anchor() == ts[0].anchor().bracket(&ts[1].anchor()));

        let js: Vec<JetSection> = (0..3)
            .map(|_| random::jet_section(&mut rng, n, k, deg, b))
            .collect();
        let bj = |a: &JetSection, c: &JetSection| bracket_jet(a, c).expect("same shape");
        j_anti.record(bj(&js[0], &js[1]) == bj(&js[1], &js[0]).scale(&qi(-1)));
        let jac = bj(&js[0], &bj(&js[1], &js[2]))
            .add(&bj(&js[1], &bj(&js[2], &js[0])))
            .and_then(|s| s.add(&bj(&js[2], &bj(&js[0], &js[1]))));
        j_jac.record(jac.is_ok_and(|s| s.is_zero()));
        let lhs = bj(&js[0].mul_fn(&f), &js[1].mul_fn(&g));
        let rhs = bj(&js[0], &js[1])
            .mul_fn(&f.mul(&g))
            .add(&js[1].mul_fn(&f.mul(&js[0].anchor().apply(&g))))
            .and_then(|s| s.sub(&js[0].mul_fn(&g.mul(&js[1].anchor().apply(&f)))));
        j_leib.record(rhs.is_ok_and(|r| r == lhs));
        j_anchor.record(bj(&js[0], &js[1]).anchor() == js[0].anchor().bracket(&js[1].anchor()));

        let gs: Vec<GroupJetSection> = (0..3)
            .map(|_| random::group_jet_section(&mut rng, n, m, k, deg, b))
            .collect();
        let bg = |a: &GroupJetSection, c: &GroupJetSection| bracket_group_jet(a, c).expect("same shape");
        g_anti.record(bg(&gs[0], &gs[1]) == bg(&gs[1], &gs[0]).scale(&qi(-1)));
        let jac = bg(&gs[0], &bg(&gs[1], &gs[2]))
            .add(&bg(&gs[1], &bg(&gs[2], &gs[0])))
            .and_then(|s| s.add(&bg(&gs[2], &bg(&gs[0], &gs[1]))));
        g_jac.record(jac.is_ok_and(|s| s.is_zero()));
        g_bilin.record(bg(&gs[0].mul_fn(&f), &gs[1].mul_fn(&g)) == bg(&gs[0], &gs[1]).mul_fn(&f.mul(&g)));

        // Semidirect checks on a lighter subset to bound the cost.
        if i % 2 == 0 {
            let ss: Vec<SemidirectSection> = (0..3)
                .map(|j| SemidirectSection::new(js[j].clone(), gs[j].clone()).expect("same shape"))
                .collect();
            let bs = |a: &SemidirectSection, c: &SemidirectSection| bracket_semidirect(a, c).expect("same shape");
            s_anti.record(bs(&ss[0], &ss[1]) == bs(&ss[1], &ss[0]).scale(&qi(-1)));
            let jac = bs(&ss[0], &bs(&ss[1], &ss[2]))
                .add(&bs(&ss[1], &bs(&ss[2], &ss[0])))
                .and_then(|s| s.add(&bs(&ss[2], &bs(&ss[0], &ss[1]))));
            s_jac.record(jac.is_ok_and(|s| s.is_zero()));
        }
        let pure_xi = SemidirectSection::new(js[0].clone(), GroupJetSection::zero(n, m, k)).expect("shape");
        let pure_l = SemidirectSection::new(JetSection::zero(n, k), gs[0].clone()).expect("shape");
        let mixed = bracket_semidirect(&pure_xi, &pure_l).expect("shape");
        s_ideal.record(mixed.xi.is_zero() && ok_eq(Ok::<_, ()>(mixed.lambda), lie_derivative(&js[0], &gs[0]).map_err(|_| ())));

        let ld = |x: &JetSection, l: &GroupJetSection| lie_derivative(x, l).expect("shape");
        let lhs = ld(&js[0], &bg(&gs[0], &gs[1]));
        let rhs = bg(&ld(&js[0], &gs[0]), &gs[1]).add(&bg(&gs[0], &ld(&js[0], &gs[1])));
        l_der.record(rhs.is_ok_and(|r| r == lhs));
        let lhs = ld(&bj(&js[0], &js[1]), &gs[2]);
        let rhs = ld(&js[0], &ld(&js[1], &gs[2])).sub(&ld(&js[1], &ld(&js[0], &gs[2])));
        l_rep.record(rhs.is_ok_and(|r| r == lhs));
        let phi = random::poly(&mut rng, n, 2, 2, b);
        let fj = GroupJetSection::new(
            n,
            1,
            k,
            vec![(g.clone(), MatrixPoly::new(n, 1, vec![phi]))],
        )
        .expect("shape");
        let lhs = gs[0].module_mul(&fj).map(|p| ld(&js[0], &p));
        let rhs = gs[0]
            .module_mul(&ld(&js[0], &fj))
            .and_then(|a| a.add(&ld(&js[0], &gs[0]).module_mul(&fj)?));
        l_mod.record(matches!((lhs, rhs), (Ok(a), Ok(b)) if a == b));
    }
    let s = "brackets";
    [
        t_anti, t_jac, t_leib, t_anchor, j_anti, j_jac, j_leib, j_anchor, g_anti, g_jac, g_bilin,
        s_anti, s_jac, s_ideal, l_der, l_rep, l_mod,
    ]
    .iter()
    .map(|e| e.row(s))
    .collect()
}

/// One-parameter group law, `Exp 0 = ι` and the derivative at `0`.
pub fn group_law(seed: u64, cases: usize, cfg: &FlowConfig) -> Vec<CheckRow> {
    let mut rng = random::rng(seed);
    let mut law = Numeric::new("Exp(t+u)Ξ = Exp tΞ·Exp uΞ", cfg.tol);
    let mut zero = Exact::new("Exp 0 = ι exactly");
    let mut deriv = Numeric::new("d/dt Exp tΞ at 0 = Ξ", 1e-4);
    let mut anchor = Numeric::new("β∘Exp tΞ = exp tθ", cfg.tol);
    for _ in 0..cases {
        let n = rng.gen_range(1..=2);
        let m = rng.gen_range(1..=2);
        let xi = random::flow_section(&mut rng, n, m, 2);
        let x = random::float_point(&mut rng, n, 1.0);
        let t = rng.gen_range(-0.5..=0.5);
        let u = rng.gen_range(-0.5..=0.5);
        law.record(group_law_defect(&xi, &x, t, u, cfg));
        zero.record(
            exp_trivial(&xi, &x, 0.0, cfg).is_ok_and(|e| e == crate::flows::TrivialElement::unit(&x, m)),
        );
        deriv.record(exp_derivative_at_zero(&xi, &x, 1e-3, cfg).map(|(v, g)| {
            let dv = crate::scalar::distance(&v, &xi.theta.eval(&x));
            let dg = (&g - &xi.h.eval(&x)).max_norm();
            dv.max(dg)
        }));
        anchor.record(exp_trivial(&xi, &x, t, cfg).and_then(|e| {
            let p = flow_vector_field(&xi.theta, &x, t, cfg)?.point;
            Ok(crate::scalar::distance(&e.target, &p))
        }));
    }
    let s = "flows";
    vec![law.row(s), zero.row(s), deriv.row(s), anchor.row(s)]
}

pub const BCH_TIMES: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

/// Log-log slopes of the Campbell–Hausdorff defect for the given pair.
pub fn bch_slopes(
    a: &TrivialSection,
    b: &TrivialSection,
    x: &[f64],
    cfg: &FlowConfig,
) -> Result<(f64, f64), FlowError> {
    let slope = |c| -> Result<f64, FlowError> {
        let d = BCH_TIMES
            .iter()
            .map(|&t| bch_defect(a, b, x, t, c, cfg))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(loglog_slope(&BCH_TIMES, &d))
    };
    Ok((
        slope(BchCorrection::Bracket)?,
        slope(BchCorrection::Dropped)?,
    ))
}

/// The reference pair `(∂x, 0)`, `(x∂x, 0)` on `R` plus `random_pairs`
/// random pairs with non-vanishing bracket.
pub fn bch_cases(seed: u64, random_pairs: usize) -> Vec<(TrivialSection, TrivialSection, Vec<f64>)> {
    let mut rng = random::rng(seed);
    let mut out = vec![(
        TrivialSection::new(PolyVectorField::coordinate(1, 0), MatrixPoly::zero(1, 1)).expect("shape"),
        TrivialSection::new(PolyVectorField::scaling(1, 0), MatrixPoly::zero(1, 1)).expect("shape"),
        vec![0.5],
    )];
    while out.len() < random_pairs + 1 {
        let n = rng.gen_range(1..=2);
        let m = rng.gen_range(1..=2);
        let a = random::flow_section(&mut rng, n, m, 1);
        let b = random::flow_section(&mut rng, n, m, 1);
        let x = random::float_point(&mut rng, n, 1.0);
        let br = |p: &TrivialSection, q: &TrivialSection| bracket_trivial(p, q).expect("shape");
        let size = |s: &TrivialSection| crate::scalar::norm(&s.theta.eval(&x)) + s.h.eval(&x).max_norm();
        let ab = br(&a, &b);
        let cubic = br(&a, &ab).sub(&br(&b, &ab));
        if size(&ab) > 0.1 && size(&cubic) > 0.1 {
            out.push((a, b, x));
        }
    }
    out
}

pub fn bch(seed: u64, random_pairs: usize, cfg: &FlowConfig) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    for (i, (a, b, x)) in bch_cases(seed, random_pairs).iter().enumerate() {
        let label = if i == 0 {
            "(∂x,0),(x∂x,0)".to_string()
        } else {
            format!("random pair {i}")
        };
        let (with, dropped) = bch_slopes(a, b, x, cfg).unwrap_or((f64::NAN, f64::NAN));
        rows.push(CheckRow {
            suite: "campbell-hausdorff",
            name: format!("{label}: slope with bracket ≈ 3 (±0.2)"),
            pass: (with - 3.0).abs() <= 0.2,
            defect: (with - 3.0).abs(),
            cases: 4,
        });
        rows.push(CheckRow {
            suite: "campbell-hausdorff",
            name: format!("{label}: slope without bracket ≈ 2 (±0.2)"),
            pass: (dropped - 2.0).abs() <= 0.2,
            defect: (dropped - 2.0).abs(),
            cases: 4,
        });
    }
    rows
}

/// Random order-2 jet section with a field that stays tame on `|t| ≤ 1/2`.
pub fn tame_jet_section(rng: &mut TestRng, n: usize, k: u32) -> JetSection {
    let terms = (0..rng.gen_range(1..=2))
        .map(|_| {
            (
                random::poly(rng, n, 1, 2, 1),
                random::vector_field(rng, n, 2, 1),
            )
        })
        .collect();
    JetSection::new(n, k, terms).expect("shape")
}

/// Projection of the jet Exponential.
pub fn projection(seed: u64, cases: usize, cfg: &FlowConfig) -> Vec<CheckRow> {
    let mut rng = random::rng(seed);
    let mut proj = Numeric::new("ρ₁(Exp tΞ) = Exp t(ρ₁Ξ)", cfg.tol);
    for _ in 0..cases {
        let n = rng.gen_range(1..=2);
        let xi = tame_jet_section(&mut rng, n, 2);
        let x = random::float_point(&mut rng, n, 0.5);
        let t = rng.gen_range(-0.5..=0.5);
        proj.record((|| -> Result<f64, FlowError> {
            let full = exp_jet(&xi, &x, t, cfg)?.project(1)?;
            let low = exp_jet(&xi.project(1)?, &x, t, cfg)?;
            Ok(jet_distance(&full, &low))
        })());
    }
    vec![proj.row("jet flows")]
}

/// Linear-groupoid calculus on random operators.
pub fn linear(seed: u64, cases: usize, cfg: &FlowConfig) -> Vec<CheckRow> {
    let mut rng = random::rng(seed);
    let mut leibniz = Exact::new("δ(fs) = fδ(s) + (ϑ(θ)f)s");
    let mut comm = Exact::new("commutator = δ∘δ′ − δ′∘δ");
    let mut zero_order = Exact::new("θ = 0 iff δ is function-linear");
    let mut bij = Exact::new("section ↔ operator bijection intertwines brackets");
    let mut prolong = Exact::new("j_k[δ,δ′] = [j_kδ, j_kδ′], k ≤ 2");
    let mut jet_symbol = Exact::new("σ(j_kδ) = θ⊗Id on jet sections");
    let mut flow = Numeric::new("operator flow residual", 1e-4);
    for _ in 0..cases {
        let n = rng.gen_range(1..=2);
        let m = rng.gen_range(1..=3);
        let a = random::linear_operator(&mut rng, n, m, 2, 3);
        let b = random::linear_operator(&mut rng, n, m, 2, 3);
        let f = random::poly(&mut rng, n, 2, 3, 3);
        let s = random::vector_section(&mut rng, n, m, 2, 3);
        leibniz.record(ok_true(symbol_check(&a, &f, &s)));
        let c = commutator(&a, &b).expect("shape");
        let mut all = true;
        for _ in 0..3 {
            let s = random::vector_section(&mut rng, n, m, 3, 3);
            all &= ok_eq(apply(&c, &s), commutator_applied(&a, &b, &s));
        }
        comm.record(all);

        let linear_part = LinearOperator::new(PolyVectorField::zero(n), a.h.clone()).expect("shape");
        let e0 = constant_section(n, m);
        let zero_ok = ok_true(is_function_linear_on(&linear_part, &f, &s));
        let detects = a.theta.is_zero()
            || (0..n).any(|i| {
                matches!(is_function_linear_on(&a, &Poly::var(n, i), &e0), Ok(false))
            });
        let theta_zero_means_linear =
            !a.theta.is_zero() || ok_true(is_function_linear_on(&a, &f, &s));
        zero_order.record(zero_ok && detects && theta_zero_means_linear);

        let sa = section_from_operator(&a);
        let sb = section_from_operator(&b);
        bij.record(
            operator_from_section(&sa) == a
                && operator_from_section(&bracket_trivial(&sa, &sb).expect("shape")) == c,
        );

        let k = rng.gen_range(0..=2);
        let terms = (0..2)
            .map(|_| {
                (
                    random::poly(&mut rng, n, 1, 2, 3),
                    random::vector_section(&mut rng, n, m, 2, 3),
                )
            })
            .collect();
        let js = JetVectorSection::new(n, m, k, terms).expect("shape");
        let lhs = prolong_operator(&c, k).apply(&js);
        let rhs = prolonged_commutator_applied(&prolong_operator(&a, k), &prolong_operator(&b, k), &js);
        prolong.record(ok_eq(lhs, rhs));
        jet_symbol.record(ok_true(prolong_operator(&a, k).symbol_check(&f, &js)));

        let fop = operator_from_section(&random::flow_section(&mut rng, n, m, 2));
        let x = random::float_point(&mut rng, n, 1.0);
        let t = rng.gen_range(-0.5..=0.5);
        let s = random::vector_section(&mut rng, n, m, 2, 3);
        flow.record(operator_flow_residual(&fop, &s, &x, t, 1e-3, cfg));
    }
    let s = "linear groupoid";
    vec![
        leibniz.row(s),
        comm.row(s),
        zero_order.row(s),
        bij.row(s),
        prolong.row(s),
        jet_symbol.row(s),
        flow.row(s),
    ]
}

fn constant_section(n: usize, m: usize) -> VectorSection {
    let mut comps = vec![Poly::zero(n); m];
    comps[0] = Poly::one(n);
    VectorSection::new(n, comps).expect("arity")
}

/// Flows with closed forms, and the globality harness.
pub fn closed_form(cfg: &FlowConfig) -> Vec<CheckRow> {
    let s = "closed-form flows";
    let mut rows = Vec::new();
    let e = flow_vector_field(&PolyVectorField::scaling(1, 0), &[1.0], 1.0, cfg)
        .map(|p| (p.point[0] - std::f64::consts::E).abs())
        .unwrap_or(f64::INFINITY);
    rows.push(CheckRow {
        suite: s,
        name: "x∂x from 1 reaches e at t = 1 (1e-8)".into(),
        pass: e <= 1e-8,
        defect: e,
        cases: 1,
    });
    let nil = Mat::from_rows(vec![vec![qi(0), qi(1)], vec![qi(0), qi(0)]]);
    let xi = TrivialSection::new(PolyVectorField::zero(1), MatrixPoly::constant(&nil, 1)).expect("shape");
    let mut worst: f64 = 0.0;
    for &t in &[-0.5, 0.3, 1.0, 2.5] {
        let d = exp_trivial(&xi, &[0.0], t, cfg)
            .map(|e| {
                let exact = Mat::from_rows(vec![vec![1.0, t], vec![0.0, 1.0]]);
                (&e.g - &exact).max_norm()
            })
            .unwrap_or(f64::INFINITY);
        worst = worst.max(d);
    }
    rows.push(CheckRow {
        suite: s,
        name: "nilpotent h gives g(t) = I + th (1e-10)".into(),
        pass: worst <= 1e-10,
        defect: worst,
        cases: 4,
    });
    let sq = PolyVectorField::new(vec![Poly::var(1, 0).pow(2)]);
    let (pass, t) = match flow_vector_field(&sq, &[1.0], 1.0, cfg) {
        Err(FlowError::BlowUp { t, .. }) => (t < 1.0, t),
        _ => (false, f64::NAN),
    };
    rows.push(CheckRow {
        suite: s,
        name: "x²∂x from 1 reports blow-up before t = 1".into(),
        pass,
        defect: t,
        cases: 1,
    });
    let mut global = true;
    for field in [
        PolyVectorField::scaling(1, 0),
        PolyVectorField::scaling(1, 0).scale(&qi(-1)),
        PolyVectorField::new(vec![Poly::var(1, 0).add(&Poly::one(1))]),
    ] {
        for &t in &[-10.0, 10.0] {
            global &= flow_vector_field(&field, &[1.0], t, cfg).is_ok();
        }
    }
    let rot = PolyVectorField::new(vec![Poly::var(2, 1).neg(), Poly::var(2, 0)]);
    global &= flow_vector_field(&rot, &[1.0, 0.5], 10.0, cfg).is_ok();
    rows.push(CheckRow {
        suite: s,
        name: "linear fields: no blow-up on |t| ≤ 10".into(),
        pass: global,
        defect: if global { 0.0 } else { 1.0 },
        cases: 7,
    });
    rows
}

/// `Σ_{j ≤ m} (tζ)^j / j!` for nilpotent `ζ` (`ζ^size = 0`), symbolic.
pub fn nilpotent_exp_series(zeta: &MatrixPoly, t: &Q) -> MatrixPoly {
    let mut term = MatrixPoly::identity(zeta.nvars(), zeta.size());
    let mut sum = term.clone();
    for j in 1..=zeta.size() {
        term = term.mul(zeta).scale(&(t / Q::from_integer((j as i64).into())));
        sum = sum.add(&term);
    }
    sum
}

/// Random strictly upper-triangular polynomial matrix.
pub fn nilpotent_matrix_poly(rng: &mut TestRng, n: usize, m: usize) -> MatrixPoly {
    let mut entries = vec![Poly::zero(n); m * m];
    for i in 0..m {
        for j in i + 1..m {
            entries[i * m + j] = random::poly(rng, n, 2, 2, 5);
        }
    }
    MatrixPoly::new(n, m, entries)
}

/// Fibre exponential of group jets, and bilinearity of their bracket.
pub fn group_jet(seed: u64, cases: usize) -> Vec<CheckRow> {
    let mut rng = random::rng(seed);
    let mut nil = Exact::new("Exp t j_kζ = j_k(exp tζ), nilpotent ζ");
    let mut bilin = Exact::new("[f a, g b] = fg[a, b]");
    let mut law = Numeric::new("Exp t·Exp u = Exp(t+u), scalar ζ (relative)", 1e-12);
    for i in 0..cases {
        let n = rng.gen_range(1..=2);
        let m = rng.gen_range(2..=3);
        let k = if i % 2 == 0 { 1 } else { rng.gen_range(0..=3) };
        let zeta = nilpotent_matrix_poly(&mut rng, n, m);
        let x = random::point(&mut rng, n, 5);
        let t = random::rational(&mut rng, 5);
        let oracle = MatrixJet::of_matrix_poly(&nilpotent_exp_series(&zeta, &t), &x, k);
        nil.record(ok_eq(exp_group_jet(&zeta, &x, &t, k).map_err(|_| ()), oracle.map_err(|_| ())));

        let a = random::group_jet_section(&mut rng, n, m, k, 2, 5);
        let b = random::group_jet_section(&mut rng, n, m, k, 2, 5);
        let f = random::poly(&mut rng, n, 2, 2, 5);
        let g = random::poly(&mut rng, n, 2, 2, 5);
        let lhs = bracket_group_jet(&a.mul_fn(&f), &b.mul_fn(&g));
        let rhs = bracket_group_jet(&a, &b).map(|c| c.mul_fn(&f.mul(&g)));
        bilin.record(ok_eq(lhs, rhs));

        let lam = random::poly(&mut rng, n, 2, 2, 3);
        let s = MatrixPoly::from_scalar(&lam, &Mat::identity(1));
        let y = random::float_point(&mut rng, n, 1.0);
        let (t1, t2): (f64, f64) = (rng.gen_range(-0.5..=0.5), rng.gen_range(-0.5..=0.5));
        let e = |t: f64| exp_group_jet(&s, &y, &t, k);
        law.record((|| -> Result<f64, FlowError> {
            let (a, b, c) = (e(t1)?, e(t2)?, e(t1 + t2)?);
            let d = a.matmul(&b)?.jet().sub(c.jet())?.max_norm();
            Ok(d / c.jet().max_norm().max(1.0))
        })());
    }
    let s = "group jets";
    vec![nil.row(s), bilin.row(s), law.row(s)]
}

/// Every suite at its default size.
pub fn all(seed: u64, cfg: &FlowConfig) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    rows.extend(jet_axioms(seed, 1000));
    rows.extend(quotients(seed, 50));
    rows.extend(brackets(seed, 200));
    rows.extend(group_law(seed, 50, cfg));
    rows.extend(bch(seed, 3, cfg));
    rows.extend(projection(seed, 20, cfg));
    rows.extend(linear(seed, 100, cfg));
    rows.extend(closed_form(cfg));
    rows.extend(group_jet(seed, 100));
    rows
}

pub const SUITES: [&str; 9] = [
    "jets", "quotients", "brackets", "group-law", "bch", "projection", "linear", "closed-form",
    "group-jets",
];

/// Runs the named suite (one of [`SUITES`] or `all`).
pub fn run_suite(name: &str, seed: u64, cfg: &FlowConfig) -> Option<Vec<CheckRow>> {
    Some(match name {
        "jets" => jet_axioms(seed, 1000),
        "quotients" => quotients(seed, 50),
        "brackets" => brackets(seed, 200),
        "group-law" => group_law(seed, 50, cfg),
        "bch" => bch(seed, 3, cfg),
        "projection" => projection(seed, 20, cfg),
        "linear" => linear(seed, 100, cfg),
        "closed-form" => closed_form(cfg),
        "group-jets" => group_jet(seed, 100),
        "all" => all(seed, cfg),
        _ => return None,
    })
}

/// Fixed-width pass/fail table.
pub fn format_table(rows: &[CheckRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<6} {:<20} {:>6} {:>11}  invariant", "status", "suite", "cases", "defect");
    for r in rows {
        let _ = writeln!(
            out,
            "{:<6} {:<20} {:>6} {:>11.3e}  {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.suite,
            r.cases,
            r.defect,
            r.name
        );
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    let _ = writeln!(out, "{} checks, {} failed", rows.len(), failed);
    out
}
