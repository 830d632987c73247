//! Dense monomial bases for truncated polynomials and the truncated
//! product tables over them. Bases are cached per `(n, k)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::poly::{MultiIndex, Poly};
use crate::scalar::{binomial, powi, Scalar};

#[derive(Debug)]
pub(crate) struct Basis {
    pub n: usize,
    pub k: u32,
    pub monos: Vec<MultiIndex>,
    pub degree: Vec<u32>,
    index: HashMap<MultiIndex, usize>,
    /// For monomial `i`: every `(j, r)` with `deg i + deg j ≤ k` and
    /// `mono[r] = mono[i] + mono[j]`.
    products: Vec<Vec<(usize, usize)>>,
    /// For monomial `r ≥ 1`: `(v, p)` with `mono[r] = mono[p] + e_v`, `v`
    /// the first non-zero entry.
    pub split: Vec<(usize, usize)>,
}

impl Basis {
    fn build(n: usize, k: u32) -> Self {
        let monos = MultiIndex::all_up_to(n, k);
        let degree: Vec<u32> = monos.iter().map(MultiIndex::order).collect();
        let index: HashMap<MultiIndex, usize> =
            monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let products = monos
            .iter()
            .enumerate()
            .map(|(i, a)| {
                monos
                    .iter()
                    .enumerate()
                    .take_while(|(j, _)| degree[i] + degree[*j] <= k)
                    .map(|(j, b)| (j, index[&a.add(b)]))
                    .collect()
            })
            .collect();
        let split = monos
            .iter()
            .map(|m| match m.0.iter().position(|&e| e > 0) {
                Some(v) => {
                    let mut p = m.clone();
                    p.0[v] -= 1;
                    (v, index[&p])
                }
                None => (0, 0),
            })
            .collect();
        Self {
            n,
            k,
            monos,
            degree,
            index,
            products,
            split,
        }
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn index_of(&self, m: &MultiIndex) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Index of the variable `x_i`.
    pub fn var(&self, i: usize) -> usize {
        debug_assert!(self.k >= 1);
        1 + i
    }

    pub fn zeros<T: Scalar>(&self) -> Vec<T> {
        vec![T::zero(); self.len()]
    }

    pub fn constant<T: Scalar>(&self, c: T) -> Vec<T> {
        let mut v = self.zeros();
        v[0] = c;
        v
    }

    /// Truncated Cauchy product.
    pub fn mul<T: Scalar>(&self, x: &[T], y: &[T]) -> Vec<T> {
        let mut out = self.zeros::<T>();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for &(j, r) in &self.products[i] {
                let yj = &y[j];
                if yj.is_zero() {
                    continue;
                }
                out[r] = out[r].clone() + xi.clone() * yj.clone();
            }
        }
        out
    }

    /// Taylor coefficients of `p` at `base`: entry `α` is `∂^α p(base)/α!`.
    pub fn taylor<T: Scalar>(&self, p: &Poly, base: &[T]) -> Vec<T> {
        let mut out = self.zeros::<T>();
        for (beta, c) in p.terms() {
            let c = T::from_rational(c);
            for (idx, alpha) in self.monos.iter().enumerate() {
                let Some(rest) = beta.checked_sub(alpha) else {
                    continue;
                };
                let mut term = c.clone();
                for (i, (&b, &a)) in beta.0.iter().zip(&alpha.0).enumerate() {
                    if a > 0 {
                        term = term * T::from_rational(&binomial(b, a));
                    }
                    if rest.0[i] > 0 {
                        term = term * powi(&base[i], rest.0[i]);
                    }
                }
                out[idx] = out[idx].clone() + term;
            }
        }
        out
    }
}

/// Evaluates the dense truncated polynomials `outer` (over `ob`) at the
/// inner truncated polynomials `args` (over `ib`), which must have zero
/// constant term. Every product is truncated at `ib.k`.
pub(crate) fn compose_dense<T: Scalar>(
    ob: &Basis,
    outer: &[Vec<T>],
    ib: &Basis,
    args: &[Vec<T>],
) -> Vec<Vec<T>> {
    debug_assert_eq!(args.len(), ob.n);
    let len = ob.len();
    let mut needed = vec![false; len];
    for idx in (0..len).rev() {
        if outer.iter().any(|c| !c[idx].is_zero()) {
            needed[idx] = true;
        }
        if needed[idx] && idx > 0 {
            needed[ob.split[idx].1] = true;
        }
    }
    let mut powers: Vec<Option<Vec<T>>> = vec![None; len];
    powers[0] = Some(ib.constant(T::one()));
    for idx in 1..len {
        if !needed[idx] {
            continue;
        }
        let (v, p) = ob.split[idx];
        let prev = powers[p].as_ref().expect("prefix power computed");
        powers[idx] = Some(ib.mul(prev, &args[v]));
    }
    outer
        .iter()
        .map(|c| {
            let mut acc = ib.zeros::<T>();
            for (idx, coef) in c.iter().enumerate() {
                if coef.is_zero() {
                    continue;
                }
                let pw = powers[idx].as_ref().expect("needed power");
                for (a, x) in acc.iter_mut().zip(pw) {
                    if !x.is_zero() {
                        *a = a.clone() + coef.clone() * x.clone();
                    }
                }
            }
            acc
        })
        .collect()
}

type BasisCache = Mutex<HashMap<(usize, u32), Arc<Basis>>>;

pub(crate) fn basis(n: usize, k: u32) -> Arc<Basis> {
    static CACHE: OnceLock<BasisCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry((n, k))
        .or_insert_with(|| Arc::new(Basis::build(n, k)))
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{qi, Q};

    #[test]
    fn truncated_product_drops_high_degree() {
        let b = basis(1, 2);
        let x: Vec<Q> = vec![qi(0), qi(1), qi(0)];
        assert_eq!(b.mul(&x, &x), vec![qi(0), qi(0), qi(1)]);
        let x2 = b.mul(&x, &x);
        assert_eq!(b.mul(&x2, &x), b.zeros::<Q>());
    }

    #[test]
    fn taylor_matches_shift() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = x.mul(&x).mul(&y).add(&y.pow(3));
        let base = [qi(2), qi(-1)];
        let b = basis(2, 3);
        let t = b.taylor(&p, &base);
        let shifted = p.shift(&base);
        for (i, m) in b.monos.iter().enumerate() {
            assert_eq!(t[i], shifted.coeff(m), "at {}", m.key());
        }
    }
}
