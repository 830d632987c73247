//! Finite groupoids as explicit tables: axiom checks, wide subgroupoids,
//! cosets, normality and quotients, and local-triviality diagnostics.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::groups::{groups_isomorphic, FiniteGroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupoidError {
    #[error("malformed groupoid table: {0}")]
    Malformed(String),
    #[error("unknown arrow {0}")]
    UnknownArrow(u64),
    #[error("invalid subgroupoid: {0}")]
    InvalidSubgroupoid(String),
    #[error("non-normal subgroupoid: γ·x·γ⁻¹ ∉ Σ for γ = {gamma}, x = {x}")]
    NotNormal { gamma: u64, x: u64 },
}

pub type GroupoidResult<T> = Result<T, GroupoidError>;

/// A finite groupoid. Arrows are identified externally by `u64` ids and
/// internally by their position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupoidTable {
    ids: Vec<u64>,
    index: HashMap<u64, usize>,
    is_unit: Vec<bool>,
    src: Vec<usize>,
    tgt: Vec<usize>,
    comp: Vec<Option<usize>>,
    inv: Vec<usize>,
}

/// One violated instance of a groupoid axiom (arrow ids).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UnitEndpoints { unit: u64 },
    MissingComposite { g: u64, h: u64 },
    SpuriousComposite { g: u64, h: u64 },
    CompositeEndpoints { g: u64, h: u64 },
    Associativity { g: u64, h: u64, k: u64 },
    UnitLaw { g: u64 },
    InverseLaw { g: u64 },
    InverseNotInvolutive { g: u64 },
    Composability { g: u64, h: u64, k: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnitEndpoints { unit } => write!(f, "unit {unit}: α(e) = β(e) = e fails"),
            Self::MissingComposite { g, h } => {
                write!(f, "composable pair ({g},{h}) has no composite")
            }
            Self::SpuriousComposite { g, h } => {
                write!(f, "pair ({g},{h}) with α(g) ≠ β(h) has a composite")
            }
            Self::CompositeEndpoints { g, h } => {
                write!(f, "composite of ({g},{h}) has wrong source or target")
            }
            Self::Associativity { g, h, k } => write!(f, "associativity fails at ({g},{h},{k})"),
            Self::UnitLaw { g } => write!(f, "units do not act as identities on {g}"),
            Self::InverseLaw { g } => write!(f, "inverse law fails for {g}"),
            Self::InverseNotInvolutive { g } => write!(f, "inverse is not an involution at {g}"),
            Self::Composability { g, h, k } => write!(
                f,
                "(gh,k) composable iff (h,k) composable fails at ({g},{h},{k})"
            ),
        }
    }
}

/// Result of [`GroupoidTable::check_axioms`]; empty iff the table is a
/// groupoid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A wide subgroupoid, as a membership mask over the parent's arrows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroupoid {
    member: Vec<bool>,
}

impl Subgroupoid {
    pub fn contains_index(&self, i: usize) -> bool {
        self.member[i]
    }

    pub fn len(&self) -> usize {
        self.member.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A partition of the arrows into blocks of ids; blocks are sorted and
/// listed by their least id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub blocks: Vec<Vec<u64>>,
}

impl Partition {
    pub fn block_of(&self, id: u64) -> Option<usize> {
        self.blocks.iter().position(|b| b.binary_search(&id).is_ok())
    }

    /// Blocks are pairwise disjoint and cover exactly `ids`.
    pub fn partitions(&self, ids: &[u64]) -> bool {
        let mut seen = BTreeSet::new();
        for b in &self.blocks {
            for &x in b {
                if !seen.insert(x) {
                    return false;
                }
            }
        }
        seen == ids.iter().copied().collect()
    }
}

/// Outcome of the normality test; `witness` is `(γ, x)` with
/// `γ·x·γ⁻¹ ∉ Σ` when not normal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normality {
    pub normal: bool,
    pub witness: Option<(u64, u64)>,
}

/// Per-component diagnostics of local triviality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentReport {
    pub units: Vec<u64>,
    /// Every ordered pair of units in the component is joined by an arrow.
    pub transitive: bool,
    pub isotropy_orders: Vec<usize>,
    /// `None` when some isotropy group is too large for the search.
    pub isotropy_isomorphic: Option<bool>,
    /// Each isotropy group acts simply transitively, by right
    /// multiplication, on every set of arrows with fixed endpoints.
    pub simply_transitive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrivialityReport {
    pub components: Vec<ComponentReport>,
}

impl TrivialityReport {
    pub fn locally_trivial(&self) -> bool {
        self.components.iter().all(|c| {
            c.transitive && c.isotropy_isomorphic != Some(false) && c.simply_transitive
        })
    }
}

/// Largest isotropy order for which isomorphism is decided.
pub const ISOMORPHISM_LIMIT: usize = 24;

impl GroupoidTable {
    /// Builds a table from raw parts. Only structural problems (unknown
    /// ids, conflicting entries, non-unit endpoints) are errors; axiom
    /// failures are reported by [`check_axioms`](Self::check_axioms).
    pub fn from_parts(
        arrows: &[u64],
        units: &[u64],
        src: &BTreeMap<u64, u64>,
        tgt: &BTreeMap<u64, u64>,
        comp: &[(u64, u64, u64)],
        inv: &BTreeMap<u64, u64>,
    ) -> GroupoidResult<Self> {
        if arrows.is_empty() {
            return Err(GroupoidError::Malformed("a groupoid is non-empty".into()));
        }
        let mut index = HashMap::new();
        for (i, &a) in arrows.iter().enumerate() {
            if index.insert(a, i).is_some() {
                return Err(GroupoidError::Malformed(format!("duplicate arrow {a}")));
            }
        }
        let n = arrows.len();
        let look = |a: u64| index.get(&a).copied().ok_or(GroupoidError::UnknownArrow(a));
        let mut is_unit = vec![false; n];
        for &u in units {
            is_unit[look(u)?] = true;
        }
        let total = |m: &BTreeMap<u64, u64>, what: &str| -> GroupoidResult<Vec<usize>> {
            arrows
                .iter()
                .map(|a| {
                    let v = m
                        .get(a)
                        .ok_or_else(|| GroupoidError::Malformed(format!("{what} of {a} missing")))?;
                    look(*v)
                })
                .collect()
        };
        let src_v = total(src, "source")?;
        let tgt_v = total(tgt, "target")?;
        let inv_v = total(inv, "inverse")?;
        for i in 0..n {
            if !is_unit[src_v[i]] || !is_unit[tgt_v[i]] {
                return Err(GroupoidError::Malformed(format!(
                    "endpoints of {} are not units",
                    arrows[i]
                )));
            }
        }
        let mut comp_v = vec![None; n * n];
        for &(g, h, gh) in comp {
            let (gi, hi, ghi) = (look(g)?, look(h)?, look(gh)?);
            match comp_v[gi * n + hi] {
                Some(prev) if prev != ghi => {
                    return Err(GroupoidError::Malformed(format!(
                        "conflicting composites for ({g},{h})"
                    )))
                }
                _ => comp_v[gi * n + hi] = Some(ghi),
            }
        }
        Ok(Self {
            ids: arrows.to_vec(),
            index,
            is_unit,
            src: src_v,
            tgt: tgt_v,
            comp: comp_v,
            inv: inv_v,
        })
    }

    /// Builds from dense closures over `0..n`; `comp(g, h)` is consulted
    /// only for `src(g) = tgt(h)`.
    pub fn from_fns(
        n: usize,
        is_unit: impl Fn(usize) -> bool,
        src: impl Fn(usize) -> usize,
        tgt: impl Fn(usize) -> usize,
        comp: impl Fn(usize, usize) -> usize,
        inv: impl Fn(usize) -> usize,
    ) -> Self {
        let src_v: Vec<usize> = (0..n).map(&src).collect();
        let tgt_v: Vec<usize> = (0..n).map(&tgt).collect();
        let mut comp_v = vec![None; n * n];
        for g in 0..n {
            for h in 0..n {
                if src_v[g] == tgt_v[h] {
                    comp_v[g * n + h] = Some(comp(g, h));
                }
            }
        }
        let ids: Vec<u64> = (0..n as u64).collect();
        Self {
            index: ids.iter().map(|&i| (i, i as usize)).collect(),
            ids,
            is_unit: (0..n).map(is_unit).collect(),
            src: src_v,
            tgt: tgt_v,
            comp: comp_v,
            inv: (0..n).map(inv).collect(),
        }
    }

    /// Id of `(y, h, x)` in [`trivial`](Self::trivial)`(m, H)`.
    pub fn trivial_id(m: usize, order: usize, y: usize, h: usize, x: usize) -> u64 {
        ((y * order + h) * m + x) as u64
    }

    /// `M × H × M` with `|M| = m`: `(y,h,x)·(x,h′,x′) = (y,hh′,x′)`.
    pub fn trivial(m: usize, group: &FiniteGroup) -> Self {
        let o = group.order();
        let n = m * o * m;
        let split = |a: usize| (a / (o * m), (a / m) % o, a % m);
        let id = |y: usize, h: usize, x: usize| (y * o + h) * m + x;
        Self::from_fns(
            n,
            |a| {
                let (y, h, x) = split(a);
                y == x && h == 0
            },
            |a| {
                let (_, _, x) = split(a);
                id(x, 0, x)
            },
            |a| {
                let (y, _, _) = split(a);
                id(y, 0, y)
            },
            |a, b| {
                let (y, h1, _) = split(a);
                let (_, h2, x) = split(b);
                id(y, group.mul(h1, h2), x)
            },
            |a| {
                let (y, h, x) = split(a);
                id(x, group.inv(h), y)
            },
        )
    }

    /// Pair groupoid on `n` points: arrows `(i, j)` from `j` to `i`.
    pub fn pair(n: usize) -> Self {
        Self::trivial(n, &FiniteGroup::trivial())
    }

    /// Disjoint union; ids of `other` are shifted past those of `self`.
    pub fn disjoint_union(&self, other: &Self) -> Self {
        let n1 = self.len();
        let n = n1 + other.len();
        let shift = self.ids.iter().max().map_or(0, |m| m + 1);
        let mut ids = self.ids.clone();
        ids.extend(other.ids.iter().map(|i| i + shift));
        let mut comp = vec![None; n * n];
        for g in 0..n1 {
            for h in 0..n1 {
                comp[g * n + h] = self.comp[g * n1 + h];
            }
        }
        let n2 = other.len();
        for g in 0..n2 {
            for h in 0..n2 {
                comp[(g + n1) * n + h + n1] = other.comp[g * n2 + h].map(|c| c + n1);
            }
        }
        let cat = |a: &[usize], b: &[usize]| -> Vec<usize> {
            a.iter().copied().chain(b.iter().map(|x| x + n1)).collect()
        };
        Self {
            index: ids.iter().enumerate().map(|(i, &a)| (a, i)).collect(),
            ids,
            is_unit: self.is_unit.iter().chain(&other.is_unit).copied().collect(),
            src: cat(&self.src, &other.src),
            tgt: cat(&self.tgt, &other.tgt),
            comp,
            inv: cat(&self.inv, &other.inv),
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn unit_ids(&self) -> Vec<u64> {
        (0..self.len())
            .filter(|&i| self.is_unit[i])
            .map(|i| self.ids[i])
            .collect()
    }

    pub fn index_of(&self, id: u64) -> GroupoidResult<usize> {
        self.index.get(&id).copied().ok_or(GroupoidError::UnknownArrow(id))
    }

    pub fn src(&self, id: u64) -> GroupoidResult<u64> {
        Ok(self.ids[self.src[self.index_of(id)?]])
    }

    pub fn tgt(&self, id: u64) -> GroupoidResult<u64> {
        Ok(self.ids[self.tgt[self.index_of(id)?]])
    }

    pub fn inv(&self, id: u64) -> GroupoidResult<u64> {
        Ok(self.ids[self.inv[self.index_of(id)?]])
    }

    /// `g·h`, when defined.
    pub fn compose(&self, g: u64, h: u64) -> GroupoidResult<Option<u64>> {
        let (gi, hi) = (self.index_of(g)?, self.index_of(h)?);
        Ok(self.c(gi, hi).map(|r| self.ids[r]))
    }

    /// Every defined composite as `(g, h, gh)`, in index order.
    pub fn composition_entries(&self) -> Vec<(u64, u64, u64)> {
        let n = self.len();
        let mut out = Vec::new();
        for g in 0..n {
            for h in 0..n {
                if let Some(r) = self.c(g, h) {
                    out.push((self.ids[g], self.ids[h], self.ids[r]));
                }
            }
        }
        out
    }

    fn c(&self, g: usize, h: usize) -> Option<usize> {
        self.comp[g * self.len() + h]
    }

    /// Replaces one composition entry; used to build corrupted tables.
    pub fn with_entry(&self, g: u64, h: u64, gh: u64) -> GroupoidResult<Self> {
        let (gi, hi, ri) = (self.index_of(g)?, self.index_of(h)?, self.index_of(gh)?);
        let mut t = self.clone();
        let n = t.len();
        t.comp[gi * n + hi] = Some(ri);
        Ok(t)
    }

    pub fn check_axioms(&self) -> AxiomReport {
        let n = self.len();
        let id = |i: usize| self.ids[i];
        let mut v = Vec::new();
        for e in (0..n).filter(|&e| self.is_unit[e]) {
            if self.src[e] != e || self.tgt[e] != e {
                v.push(Violation::UnitEndpoints { unit: id(e) });
            }
        }
        for g in 0..n {
            for h in 0..n {
                let composable = self.src[g] == self.tgt[h];
                match (composable, self.c(g, h)) {
                    (true, None) => v.push(Violation::MissingComposite { g: id(g), h: id(h) }),
                    (false, Some(_)) => {
                        v.push(Violation::SpuriousComposite { g: id(g), h: id(h) })
                    }
                    (true, Some(r)) => {
                        if self.src[r] != self.src[h] || self.tgt[r] != self.tgt[g] {
                            v.push(Violation::CompositeEndpoints { g: id(g), h: id(h) });
                        }
                    }
                    (false, None) => {}
                }
            }
        }
        for g in 0..n {
            for h in 0..n {
                let Some(gh) = self.c(g, h) else { continue };
                for k in 0..n {
                    if self.c(gh, k).is_some() != self.c(h, k).is_some() {
                        v.push(Violation::Composability {
                            g: id(g),
                            h: id(h),
                            k: id(k),
                        });
                        continue;
                    }
                    let Some(hk) = self.c(h, k) else { continue };
                    let left = self.c(gh, k);
                    let right = self.c(g, hk);
                    if left.is_none() || left != right {
                        v.push(Violation::Associativity {
                            g: id(g),
                            h: id(h),
                            k: id(k),
                        });
                    }
                }
            }
        }
        for g in 0..n {
            let left = self.c(self.tgt[g], g);
            let right = self.c(g, self.src[g]);
            if left != Some(g) || right != Some(g) {
                v.push(Violation::UnitLaw { g: id(g) });
            }
            let gi = self.inv[g];
            if self.c(g, gi) != Some(self.tgt[g]) || self.c(gi, g) != Some(self.src[g]) {
                v.push(Violation::InverseLaw { g: id(g) });
            }
            if self.inv[gi] != g {
                v.push(Violation::InverseNotInvolutive { g: id(g) });
            }
        }
        AxiomReport { violations: v }
    }

    /// Validates `members` as a wide subgroupoid: all units, closed under
    /// composition and inversion.
    pub fn subgroupoid(&self, members: &[u64]) -> GroupoidResult<Subgroupoid> {
        let mut member = vec![false; self.len()];
        for &m in members {
            member[self.index_of(m)?] = true;
        }
        self.validate_subgroupoid(Subgroupoid { member })
    }

    pub fn subgroupoid_where(&self, pred: impl Fn(u64) -> bool) -> GroupoidResult<Subgroupoid> {
        let member = self.ids.iter().map(|&i| pred(i)).collect();
        self.validate_subgroupoid(Subgroupoid { member })
    }

    /// The subgroupoid of units.
    pub fn unit_subgroupoid(&self) -> Subgroupoid {
        Subgroupoid {
            member: self.is_unit.clone(),
        }
    }

    fn validate_subgroupoid(&self, s: Subgroupoid) -> GroupoidResult<Subgroupoid> {
        if s.member.len() != self.len() {
            return Err(GroupoidError::InvalidSubgroupoid("wrong parent".into()));
        }
        let n = self.len();
        for e in (0..n).filter(|&e| self.is_unit[e]) {
            if !s.member[e] {
                return Err(GroupoidError::InvalidSubgroupoid(format!(
                    "unit {} missing: the unit spaces must coincide",
                    self.ids[e]
                )));
            }
        }
        for g in (0..n).filter(|&g| s.member[g]) {
            if !s.member[self.inv[g]] {
                return Err(GroupoidError::InvalidSubgroupoid(format!(
                    "not closed under inversion at {}",
                    self.ids[g]
                )));
            }
            for h in (0..n).filter(|&h| s.member[h]) {
                if let Some(r) = self.c(g, h) {
                    if !s.member[r] {
                        return Err(GroupoidError::InvalidSubgroupoid(format!(
                            "not closed under composition at ({},{})",
                            self.ids[g], self.ids[h]
                        )));
                    }
                }
            }
        }
        Ok(s)
    }

    fn isotropy_of(&self, s: &Subgroupoid, e: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| s.member[x] && self.src[x] == e && self.tgt[x] == e)
            .collect()
    }

    fn canonical_partition(&self, block_of: impl Fn(usize) -> Vec<usize>) -> Partition {
        let n = self.len();
        let mut assigned = vec![false; n];
        let mut blocks: Vec<Vec<u64>> = Vec::new();
        for g in 0..n {
            if assigned[g] {
                continue;
            }
            let members = block_of(g);
            let mut b: Vec<u64> = members.iter().map(|&i| self.ids[i]).collect();
            for i in members {
                assigned[i] = true;
            }
            b.sort_unstable();
            b.dedup();
            blocks.push(b);
        }
        blocks.sort_by_key(|b| b[0]);
        Partition { blocks }
    }

    /// Right cosets `Σ_e·γ`, `e = β(γ)`, with `Σ_e` the isotropy of `Σ`.
    pub fn cosets(&self, s: &Subgroupoid) -> Partition {
        self.canonical_partition(|g| {
            self.isotropy_of(s, self.tgt[g])
                .into_iter()
                .map(|x| self.c(x, g).expect("composable"))
                .collect()
        })
    }

    /// Left cosets `γ·Σ_ε`, `ε = α(γ)`.
    pub fn left_cosets(&self, s: &Subgroupoid) -> Partition {
        self.canonical_partition(|g| {
            self.isotropy_of(s, self.src[g])
                .into_iter()
                .map(|x| self.c(g, x).expect("composable"))
                .collect()
        })
    }

    /// Normal iff `γ·x·γ⁻¹ ∈ Σ` for every arrow `γ` and every isotropic
    /// `x ∈ Σ_{α(γ)}`.
    pub fn is_normal(&self, s: &Subgroupoid) -> Normality {
        let n = self.len();
        for g in 0..n {
            for x in self.isotropy_of(s, self.src[g]) {
                let gx = self.c(g, x).expect("composable");
                let conj = self.c(gx, self.inv[g]).expect("composable");
                if !s.member[conj] {
                    return Normality {
                        normal: false,
                        witness: Some((self.ids[g], self.ids[x])),
                    };
                }
            }
        }
        Normality {
            normal: true,
            witness: None,
        }
    }

    /// `Γ/Σ` with block ids equal to each block's least arrow id.
    pub fn quotient(&self, s: &Subgroupoid) -> GroupoidResult<GroupoidTable> {
        self.quotient_with(s, |block| block[0])
    }

    /// Quotient built with representatives chosen by `pick` (which receives
    /// each block's sorted ids and returns one of them).
    pub fn quotient_with(
        &self,
        s: &Subgroupoid,
        mut pick: impl FnMut(&[u64]) -> u64,
    ) -> GroupoidResult<GroupoidTable> {
        let normality = self.is_normal(s);
        if let Some((gamma, x)) = normality.witness {
            return Err(GroupoidError::NotNormal { gamma, x });
        }
        let part = self.cosets(s);
        let block_id = |id: u64| -> u64 {
            part.blocks[part.block_of(id).expect("partition covers")][0]
        };
        let arrows: Vec<u64> = part.blocks.iter().map(|b| b[0]).collect();
        let reps: Vec<u64> = part.blocks.iter().map(|b| pick(b)).collect();
        let mut units = Vec::new();
        let mut src = BTreeMap::new();
        let mut tgt = BTreeMap::new();
        let mut inv = BTreeMap::new();
        for (b, &r) in arrows.iter().zip(&reps) {
            let ri = self.index_of(r)?;
            if self.is_unit[ri] {
                units.push(*b);
            }
            src.insert(*b, block_id(self.ids[self.src[ri]]));
            tgt.insert(*b, block_id(self.ids[self.tgt[ri]]));
            inv.insert(*b, block_id(self.ids[self.inv[ri]]));
        }
        let mut comp = Vec::new();
        for (b1, &r1) in arrows.iter().zip(&reps) {
            for (b2, &r2) in arrows.iter().zip(&reps) {
                if let Some(r) = self.compose(r1, r2)? {
                    comp.push((*b1, *b2, block_id(r)));
                }
            }
        }
        GroupoidTable::from_parts(&arrows, &units, &src, &tgt, &comp, &inv)
    }

    /// Natural projection `γ ↦ [Σ_{β(γ)}·γ]`, as arrow id ↦ block id.
    pub fn projection(&self, s: &Subgroupoid) -> BTreeMap<u64, u64> {
        let part = self.cosets(s);
        part.blocks
            .iter()
            .flat_map(|b| b.iter().map(move |&x| (x, b[0])))
            .collect()
    }

    /// Arrows from unit `e` to unit `f` (indices).
    fn hom(&self, f: usize, e: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&g| self.src[g] == e && self.tgt[g] == f)
            .collect()
    }

    pub fn local_triviality_checks(&self) -> TrivialityReport {
        let n = self.len();
        let units: Vec<usize> = (0..n).filter(|&i| self.is_unit[i]).collect();
        // Union-find over units.
        let mut parent: HashMap<usize, usize> = units.iter().map(|&u| (u, u)).collect();
        fn find(p: &mut HashMap<usize, usize>, x: usize) -> usize {
            let mut r = x;
            while p[&r] != r {
                r = p[&r];
            }
            let mut c = x;
            while p[&c] != r {
                let next = p[&c];
                p.insert(c, r);
                c = next;
            }
            r
        }
        for g in 0..n {
            let (a, b) = (find(&mut parent, self.src[g]), find(&mut parent, self.tgt[g]));
            if a != b {
                parent.insert(a.max(b), a.min(b));
            }
        }
        let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &u in &units {
            let r = find(&mut parent, u);
            comps.entry(r).or_default().push(u);
        }
        let components = comps
            .into_values()
            .map(|us| self.component_report(&us))
            .collect();
        TrivialityReport { components }
    }

    fn component_report(&self, us: &[usize]) -> ComponentReport {
        let transitive = us
            .iter()
            .all(|&e| us.iter().all(|&f| !self.hom(f, e).is_empty()));
        let isotropies: Vec<Vec<usize>> = us.iter().map(|&e| self.hom(e, e)).collect();
        let orders: Vec<usize> = isotropies.iter().map(Vec::len).collect();
        let mut isomorphic = Some(true);
        if let Some(first) = isotropies.first() {
            for other in &isotropies[1..] {
                match self.isotropy_isomorphic(first, other) {
                    Some(true) => {}
                    Some(false) => {
                        isomorphic = Some(false);
                        break;
                    }
                    None => isomorphic = None,
                }
            }
        }
        let simply_transitive = us.iter().zip(&isotropies).all(|(&e, iso)| {
            us.iter().all(|&f| {
                let fibre = self.hom(f, e);
                fibre.iter().all(|&g| {
                    let mut images: Vec<usize> = iso
                        .iter()
                        .filter_map(|&h| self.c(g, h))
                        .collect();
                    images.sort_unstable();
                    images.dedup();
                    images.len() == iso.len() && {
                        let mut f2 = fibre.clone();
                        f2.sort_unstable();
                        images == f2
                    }
                })
            })
        });
        ComponentReport {
            units: us.iter().map(|&u| self.ids[u]).collect(),
            transitive,
            isotropy_orders: orders,
            isotropy_isomorphic: isomorphic,
            simply_transitive,
        }
    }

    fn isotropy_isomorphic(&self, a: &[usize], b: &[usize]) -> Option<bool> {
        let pos = |set: &[usize], x: usize| set.iter().position(|&y| y == x).expect("closed");
        let ida = a.iter().position(|&g| self.is_unit[g]).unwrap_or(0);
        let idb = b.iter().position(|&g| self.is_unit[g]).unwrap_or(0);
        let mul_a = |i: usize, j: usize| pos(a, self.c(a[i], a[j]).expect("isotropy closed"));
        let mul_b = |i: usize, j: usize| pos(b, self.c(b[i], b[j]).expect("isotropy closed"));
        groups_isomorphic(a.len(), &mul_a, ida, b.len(), &mul_b, idb, ISOMORPHISM_LIMIT)
    }
}
