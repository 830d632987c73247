//! Seeded generators of random test inputs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebroid::{GroupJetSection, JetSection, TrivialSection};
use crate::finite_groupoid::GroupoidTable;
use crate::groups::FiniteGroup;
use crate::jet_groupoid::JetArrow;
use crate::linalg::Mat;
use crate::linear_groupoid::{LinearOperator, VectorSection};
use crate::multijet::TruncatedJet;
use crate::poly::{MatrixPoly, MultiIndex, Poly, PolyVectorField};
use crate::scalar::{q, Q};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p/q` with `|p| ≤ bound`, `1 ≤ q ≤ bound`.
pub fn rational(rng: &mut TestRng, bound: i64) -> Q {
    q(rng.gen_range(-bound..=bound), rng.gen_range(1..=bound))
}

pub fn nonzero_rational(rng: &mut TestRng, bound: i64) -> Q {
    loop {
        let x = rational(rng, bound);
        if x != Q::from_integer(0.into()) {
            return x;
        }
    }
}

/// Sparse polynomial of degree `≤ deg` with about `terms` monomials.
pub fn poly(rng: &mut TestRng, n: usize, deg: u32, terms: usize, bound: i64) -> Poly {
    let monos = MultiIndex::all_up_to(n, deg);
    let picked: Vec<(MultiIndex, Q)> = (0..terms)
        .map(|_| {
            let a = monos.choose(rng).expect("non-empty").clone();
            (a, rational(rng, bound))
        })
        .collect();
    Poly::from_terms(n, picked)
}

pub fn vector_field(rng: &mut TestRng, n: usize, deg: u32, bound: i64) -> PolyVectorField {
    PolyVectorField::new((0..n).map(|_| poly(rng, n, deg, 2, bound)).collect())
}

/// Affine field, hence complete.
pub fn linear_growth_field(rng: &mut TestRng, n: usize, bound: i64) -> PolyVectorField {
    vector_field(rng, n, 1, bound)
}

pub fn matrix_poly(rng: &mut TestRng, n: usize, m: usize, deg: u32, bound: i64) -> MatrixPoly {
    let entries = (0..m * m)
        .map(|_| {
            if rng.gen_bool(0.5) {
                poly(rng, n, deg, 2, bound)
            } else {
                Poly::zero(n)
            }
        })
        .collect();
    MatrixPoly::new(n, m, entries)
}

pub fn point(rng: &mut TestRng, n: usize, bound: i64) -> Vec<Q> {
    (0..n).map(|_| rational(rng, bound)).collect()
}

pub fn float_point(rng: &mut TestRng, n: usize, radius: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-radius..=radius)).collect()
}

fn invertible_matrix(rng: &mut TestRng, n: usize, bound: i64) -> Mat<Q> {
    loop {
        let data = (0..n * n).map(|_| rational(rng, bound)).collect();
        let m = Mat::from_vec(n, n, data);
        if m.rank() == n {
            return m;
        }
    }
}

/// Invertible `k`-jet from `base` to a random target, with a random
/// Jacobian and sparse higher coefficients.
pub fn jet_arrow_at(rng: &mut TestRng, base: Vec<Q>, k: u32, bound: i64) -> JetArrow {
    let n = base.len();
    let value = point(rng, n, bound);
    let jac = invertible_matrix(rng, n, bound);
    let mut coeffs = std::collections::BTreeMap::new();
    for i in 0..n {
        let mut col = Vec::with_capacity(n);
        for r in 0..n {
            col.push(jac[(r, i)].clone());
        }
        coeffs.insert(MultiIndex::unit(n, i), col);
    }
    let higher: Vec<MultiIndex> = MultiIndex::all_up_to(n, k)
        .into_iter()
        .filter(|a| a.order() >= 2)
        .collect();
    for a in &higher {
        if rng.gen_bool(0.35) {
            coeffs.insert(a.clone(), (0..n).map(|_| rational(rng, bound)).collect());
        }
    }
    let jet = TruncatedJet::new(n, n, k, base, value, coeffs).expect("well-formed");
    JetArrow::new(jet).expect("invertible Jacobian")
}

/// `(g, h, l)` with `α(g) = β(h)` and `α(h) = β(l)`.
pub fn composable_triple(
    rng: &mut TestRng,
    n: usize,
    k: u32,
    bound: i64,
) -> (JetArrow, JetArrow, JetArrow) {
    let x = point(rng, n, bound);
    let l = jet_arrow_at(rng, x, k, bound);
    let h = jet_arrow_at(rng, l.target(), k, bound);
    let g = jet_arrow_at(rng, h.target(), k, bound);
    (g, h, l)
}

pub fn trivial_section(rng: &mut TestRng, n: usize, m: usize, deg: u32, bound: i64) -> TrivialSection {
    TrivialSection::new(vector_field(rng, n, deg, bound), matrix_poly(rng, n, m, deg, bound))
        .expect("same dimension")
}

/// Section with affine `θ` and affine `h`, so both grow linearly.
pub fn flow_section(rng: &mut TestRng, n: usize, m: usize, bound: i64) -> TrivialSection {
    TrivialSection::new(
        linear_growth_field(rng, n, bound),
        matrix_poly(rng, n, m, 1, bound),
    )
    .expect("same dimension")
}

pub fn jet_section(rng: &mut TestRng, n: usize, k: u32, deg: u32, bound: i64) -> JetSection {
    let terms = (0..rng.gen_range(1..=2))
        .map(|_| (poly(rng, n, deg.min(2), 2, bound), vector_field(rng, n, deg, bound)))
        .collect();
    JetSection::new(n, k, terms).expect("same dimension")
}

pub fn group_jet_section(
    rng: &mut TestRng,
    n: usize,
    m: usize,
    k: u32,
    deg: u32,
    bound: i64,
) -> GroupJetSection {
    let terms = (0..rng.gen_range(1..=2))
        .map(|_| (poly(rng, n, deg.min(2), 2, bound), matrix_poly(rng, n, m, deg, bound)))
        .collect();
    GroupJetSection::new(n, m, k, terms).expect("same dimension")
}

pub fn linear_operator(rng: &mut TestRng, n: usize, m: usize, deg: u32, bound: i64) -> LinearOperator {
    LinearOperator::new(vector_field(rng, n, deg, bound), matrix_poly(rng, n, m, deg, bound))
        .expect("same dimension")
}

pub fn vector_section(rng: &mut TestRng, n: usize, m: usize, deg: u32, bound: i64) -> VectorSection {
    VectorSection::new(n, (0..m).map(|_| poly(rng, n, deg, 3, bound)).collect()).expect("arity")
}

/// The isotropy groups used for random trivial groupoids.
pub fn test_groups() -> Vec<FiniteGroup> {
    vec![
        FiniteGroup::cyclic(4),
        FiniteGroup::klein(),
        FiniteGroup::symmetric3(),
        FiniteGroup::dihedral4(),
    ]
}

/// A random `M × H × M` with `|M| ≤ 4` and a random normal `N ⊴ H`.
pub struct RandomTrivialGroupoid {
    pub m: usize,
    pub group: FiniteGroup,
    pub table: GroupoidTable,
    pub normal: Vec<usize>,
    /// A non-normal subgroup of `H`, when one exists.
    pub non_normal: Option<Vec<usize>>,
}

pub fn trivial_groupoid(rng: &mut TestRng) -> RandomTrivialGroupoid {
    let groups = test_groups();
    let group = groups.choose(rng).expect("non-empty").clone();
    let m = rng.gen_range(1..=4);
    let normals = group.normal_subgroups();
    let normal: Vec<usize> = normals.choose(rng).expect("non-empty").iter().copied().collect();
    let non_normal: Vec<Vec<usize>> = group
        .subgroups()
        .into_iter()
        .filter(|s| !group.is_normal(s))
        .map(|s| s.into_iter().collect())
        .collect();
    let non_normal = non_normal.choose(rng).cloned();
    RandomTrivialGroupoid {
        m,
        table: GroupoidTable::trivial(m, &group),
        group,
        normal,
        non_normal,
    }
}

impl RandomTrivialGroupoid {
    /// Ids of `M × S × M` for a subgroup `S` of `H`.
    pub fn subgroup_ids(&self, s: &[usize]) -> Vec<u64> {
        let o = self.group.order();
        let mut ids = Vec::new();
        for y in 0..self.m {
            for &h in s {
                for x in 0..self.m {
                    ids.push(GroupoidTable::trivial_id(self.m, o, y, h, x));
                }
            }
        }
        ids
    }
}
