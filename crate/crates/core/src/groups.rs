//! Small finite groups given by Cayley tables.

use std::collections::BTreeSet;

/// A finite group on `0..order` with identity `0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    table: Vec<Vec<usize>>,
}

impl FiniteGroup {
    /// Builds a group from a Cayley table; checks closure, identity `0`,
    /// inverses and associativity.
    pub fn from_table(name: &str, table: Vec<Vec<usize>>) -> Result<Self, String> {
        let n = table.len();
        if n == 0 {
            return Err("empty group".into());
        }
        if table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err("Cayley table is not square over 0..order".into());
        }
        for a in 0..n {
            if table[0][a] != a || table[a][0] != a {
                return Err(format!("0 is not an identity for {a}"));
            }
            if !(0..n).any(|b| table[a][b] == 0) {
                return Err(format!("{a} has no inverse"));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(format!("associativity fails at ({a},{b},{c})"));
                    }
                }
            }
        }
        Ok(Self {
            name: name.into(),
            table,
        })
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// `Z_n`.
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self {
            name: format!("Z{n}"),
            table,
        }
    }

    /// `Z_2 × Z_2`.
    pub fn klein() -> Self {
        let table = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
        Self {
            name: "Z2xZ2".into(),
            table,
        }
    }

    /// `S_3` as permutations of `{0,1,2}`; elements `0..3` form `A_3`.
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [1, 2, 0],
            [2, 0, 1],
            [1, 0, 2],
            [2, 1, 0],
            [0, 2, 1],
        ];
        Self::from_permutations("S3", &perms)
    }

    /// The dihedral group of order 8: `r^i s^j` at index `i + 4j`.
    pub fn dihedral4() -> Self {
        let idx = |i: usize, j: usize| (i % 4) + 4 * j;
        let mut table = vec![vec![0; 8]; 8];
        for a in 0..8 {
            for b in 0..8 {
                let (i1, j1) = (a % 4, a / 4);
                let (i2, j2) = (b % 4, b / 4);
                // r^i1 s^j1 r^i2 s^j2 = r^(i1 ± i2) s^(j1+j2)
                let i = if j1 == 0 { i1 + i2 } else { i1 + 4 - i2 };
                table[a][b] = idx(i, (j1 + j2) % 2);
            }
        }
        Self {
            name: "D4".into(),
            table,
        }
    }

    fn from_permutations(name: &str, perms: &[[usize; 3]]) -> Self {
        let find = |p: [usize; 3]| perms.iter().position(|q| *q == p).expect("closed");
        let table = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    // (a∘b)(i) = a(b(i))
                    .map(|b| find([a[b[0]], a[b[1]], a[b[2]]]))
                    .collect()
            })
            .collect();
        Self {
            name: name.into(),
            table,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        (0..self.order()).find(|&b| self.table[a][b] == 0).expect("group")
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// Subgroup generated by `gens`.
    pub fn generate(&self, gens: &[usize]) -> BTreeSet<usize> {
        let mut set: BTreeSet<usize> = [0].into_iter().collect();
        let mut frontier = vec![0usize];
        while let Some(a) = frontier.pop() {
            for &g in gens {
                let c = self.mul(a, g);
                if set.insert(c) {
                    frontier.push(c);
                }
            }
        }
        set
    }

    pub fn is_subgroup(&self, s: &BTreeSet<usize>) -> bool {
        s.contains(&0)
            && s.iter()
                .all(|&a| s.contains(&self.inv(a)) && s.iter().all(|&b| s.contains(&self.mul(a, b))))
    }

    pub fn is_normal(&self, s: &BTreeSet<usize>) -> bool {
        (0..self.order()).all(|g| {
            let gi = self.inv(g);
            s.iter().all(|&x| s.contains(&self.mul(self.mul(g, x), gi)))
        })
    }

    /// Every subgroup generated by at most two elements (all subgroups for
    /// the groups constructed here), sorted by size then elements.
    pub fn subgroups(&self) -> Vec<BTreeSet<usize>> {
        let n = self.order();
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        for a in 0..n {
            for b in a..n {
                found.insert(self.generate(&[a, b]).into_iter().collect());
            }
        }
        let mut out: Vec<BTreeSet<usize>> =
            found.into_iter().map(|v| v.into_iter().collect()).collect();
        out.sort_by_key(|s| (s.len(), s.iter().copied().collect::<Vec<_>>()));
        out
    }

    pub fn normal_subgroups(&self) -> Vec<BTreeSet<usize>> {
        self.subgroups()
            .into_iter()
            .filter(|s| self.is_normal(s))
            .collect()
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }
}

/// Brute-force isomorphism test between two groups given as multiplication
/// closures over `0..n` (identity `id1`, `id2`). Returns `None` when the
/// order exceeds `limit`.
pub fn groups_isomorphic(
    n1: usize,
    mul1: &dyn Fn(usize, usize) -> usize,
    id1: usize,
    n2: usize,
    mul2: &dyn Fn(usize, usize) -> usize,
    id2: usize,
    limit: usize,
) -> Option<bool> {
    if n1 != n2 {
        return Some(false);
    }
    if n1 > limit {
        return None;
    }
    let n = n1;
    let order = |mul: &dyn Fn(usize, usize) -> usize, id: usize, a: usize| {
        let mut x = a;
        let mut k = 1;
        while x != id {
            x = mul(x, a);
            k += 1;
        }
        k
    };
    let ord1: Vec<usize> = (0..n).map(|a| order(mul1, id1, a)).collect();
    let ord2: Vec<usize> = (0..n).map(|a| order(mul2, id2, a)).collect();
    let mut s1 = ord1.clone();
    let mut s2 = ord2.clone();
    s1.sort_unstable();
    s2.sort_unstable();
    if s1 != s2 {
        return Some(false);
    }
    // Greedy generating set of the first group.
    let mut gens = Vec::new();
    let mut span: BTreeSet<usize> = [id1].into_iter().collect();
    let close = |gens: &[usize]| {
        let mut set: BTreeSet<usize> = [id1].into_iter().collect();
        let mut frontier = vec![id1];
        while let Some(a) = frontier.pop() {
            for &g in gens {
                let c = mul1(a, g);
                if set.insert(c) {
                    frontier.push(c);
                }
            }
        }
        set
    };
    for a in 0..n {
        if !span.contains(&a) {
            gens.push(a);
            span = close(&gens);
        }
    }
    let mut images = vec![0usize; gens.len()];
    Some(search(
        0, &gens, &mut images, n, mul1, id1, mul2, id2, &ord1, &ord2,
    ))
}

#[allow(clippy::too_many_arguments)]
fn search(
    depth: usize,
    gens: &[usize],
    images: &mut Vec<usize>,
    n: usize,
    mul1: &dyn Fn(usize, usize) -> usize,
    id1: usize,
    mul2: &dyn Fn(usize, usize) -> usize,
    id2: usize,
    ord1: &[usize],
    ord2: &[usize],
) -> bool {
    if depth == gens.len() {
        return extends_to_isomorphism(gens, images, n, mul1, id1, mul2, id2);
    }
    for cand in 0..n {
        if ord2[cand] != ord1[gens[depth]] {
            continue;
        }
        images[depth] = cand;
        if search(depth + 1, gens, images, n, mul1, id1, mul2, id2, ord1, ord2) {
            return true;
        }
    }
    false
}

fn extends_to_isomorphism(
    gens: &[usize],
    images: &[usize],
    n: usize,
    mul1: &dyn Fn(usize, usize) -> usize,
    id1: usize,
    mul2: &dyn Fn(usize, usize) -> usize,
    id2: usize,
) -> bool {
    let mut phi: Vec<Option<usize>> = vec![None; n];
    phi[id1] = Some(id2);
    let mut frontier = vec![id1];
    while let Some(a) = frontier.pop() {
        let pa = phi[a].expect("visited");
        for (g, &img) in gens.iter().zip(images) {
            let c = mul1(a, *g);
            let pc = mul2(pa, img);
            match phi[c] {
                Some(existing) if existing != pc => return false,
                Some(_) => {}
                None => {
                    phi[c] = Some(pc);
                    frontier.push(c);
                }
            }
        }
    }
    let map: Vec<usize> = match phi.into_iter().collect::<Option<Vec<_>>>() {
        Some(m) => m,
        None => return false,
    };
    let distinct: BTreeSet<usize> = map.iter().copied().collect();
    if distinct.len() != n {
        return false;
    }
    (0..n).all(|a| (0..n).all(|b| map[mul1(a, b)] == mul2(map[a], map[b])))
}
