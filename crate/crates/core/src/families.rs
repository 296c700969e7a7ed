//! Closed-form avalanche polynomials for trees, cycles, complete graphs and
//! wheels, plus Fibonacci and Lucas numbers.
//!
//! Variable `k` (0-based) always stands for the `k`-th non-sink vertex in the
//! vertex order of the matching [`Graph`] constructor, so every closed form
//! here can be compared term by term with
//! [`avalanche_polynomial`](crate::avalanche::avalanche_polynomial).

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::poly::{cyclic_poly, elementary_symmetric, MultiPoly};

/// A labeled tree rooted at the sink, stored as a parent array.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RootedTree {
    parents: Vec<Option<usize>>,
    root: usize,
}

impl RootedTree {
    /// Validates that `parents` has exactly one root and no cycles.
    pub fn from_parents(parents: Vec<Option<usize>>) -> Result<Self> {
        let n = parents.len();
        let mut roots = (0..n).filter(|&v| parents[v].is_none());
        let root = roots
            .next()
            .ok_or_else(|| Error::InvalidTree("no root".into()))?;
        if roots.next().is_some() {
            return Err(Error::InvalidTree("more than one root".into()));
        }
        if let Some(v) = (0..n).find(|&v| parents[v].is_some_and(|p| p >= n || p == v)) {
            return Err(Error::InvalidTree(format!("bad parent for vertex {v}")));
        }
        // Every vertex must reach the root within n steps.
        for start in 0..n {
            let mut v = start;
            let mut steps = 0;
            while let Some(p) = parents[v] {
                v = p;
                steps += 1;
                if steps > n {
                    return Err(Error::InvalidTree(format!("cycle through vertex {start}")));
                }
            }
        }
        Ok(RootedTree { parents, root })
    }

    /// The single-vertex tree.
    pub fn trivial() -> Self {
        RootedTree {
            parents: vec![None],
            root: 0,
        }
    }

    /// Labeled tree with Prüfer sequence `seq` on `seq.len() + 2` vertices,
    /// rooted at vertex `0`.
    pub fn from_prufer(seq: &[usize]) -> Result<Self> {
        let n = seq.len() + 2;
        if seq.iter().any(|&x| x >= n) {
            return Err(Error::InvalidTree("Prüfer entry out of range".into()));
        }
        let mut degree = vec![1usize; n];
        for &x in seq {
            degree[x] += 1;
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &x in seq {
            let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf exists");
            adj[leaf].push(x);
            adj[x].push(leaf);
            degree[leaf] -= 1;
            degree[x] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        adj[rest[0]].push(rest[1]);
        adj[rest[1]].push(rest[0]);
        Ok(Self::orient(&adj, 0))
    }

    fn orient(adj: &[Vec<usize>], root: usize) -> Self {
        let mut parents = vec![None; adj.len()];
        let mut seen = vec![false; adj.len()];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    parents[w] = Some(u);
                    queue.push_back(w);
                }
            }
        }
        RootedTree { parents, root }
    }

    /// The same underlying tree rooted at `new_root`.
    pub fn rerooted(&self, new_root: usize) -> Result<Self> {
        if new_root >= self.len() {
            return Err(Error::InvalidTree(format!("no vertex {new_root}")));
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.len()];
        for (v, p) in self.parents.iter().enumerate() {
            if let Some(p) = *p {
                adj[v].push(p);
                adj[p].push(v);
            }
        }
        Ok(Self::orient(&adj, new_root))
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parents
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Number of vertices, root included.
    pub fn len(&self) -> usize {
        self.parents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parents.is_empty()
    }

    /// Children of every vertex, ascending.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.len()];
        for (v, p) in self.parents.iter().enumerate() {
            if let Some(p) = *p {
                ch[p].push(v);
            }
        }
        ch
    }

    /// Variable index of vertex `v`: non-root vertices in ascending order.
    pub fn variable_of(&self, v: usize) -> Option<usize> {
        match v.cmp(&self.root) {
            core::cmp::Ordering::Less => Some(v),
            core::cmp::Ordering::Equal => None,
            core::cmp::Ordering::Greater => (v < self.len()).then(|| v - 1),
        }
    }

    pub fn to_graph(&self) -> Result<Graph> {
        Graph::tree(&self.parents)
    }
}

/// Every labeled tree on `k >= 1` vertices rooted at vertex `0`, by Prüfer
/// sequence (`k^{k-2}` trees).
pub fn all_trees(k: usize) -> impl Iterator<Item = RootedTree> {
    let len = k.saturating_sub(2);
    let total = if k <= 2 { 1 } else { (k as u64).pow(len as u32) };
    (0..total).map(move |code| {
        if k == 1 {
            return RootedTree::trivial();
        }
        let mut x = code;
        let seq: Vec<usize> = (0..len)
            .map(|_| {
                let d = (x % k as u64) as usize;
                x /= k as u64;
                d
            })
            .collect();
        RootedTree::from_prufer(&seq).expect("valid Prüfer code")
    })
}

/// Avalanche polynomial of a tree from grafting and tree addition: each
/// child `c` of a vertex contributes `x^{sub(c)} (sum over children d of c
/// of the same + 1)`, where `sub(c)` is the vertex set below and including
/// `c`. The root's contributions are summed.
pub fn tree_poly(t: &RootedTree) -> MultiPoly {
    let n_vars = t.len() - 1;
    let children = t.children();
    // BFS order from the root; processed in reverse, children come first.
    let mut order = Vec::with_capacity(t.len());
    order.push(t.root);
    let mut i = 0;
    while i < order.len() {
        order.extend_from_slice(&children[order[i]]);
        i += 1;
    }
    let mut below: Vec<Option<MultiPoly>> = vec![None; t.len()];
    let mut support: Vec<Vec<u32>> = vec![vec![0; n_vars]; t.len()];
    for &v in order.iter().rev() {
        let mut inner = MultiPoly::zero(n_vars);
        let mut sup = vec![0u32; n_vars];
        for &c in &children[v] {
            let b = below[c].take().expect("child processed");
            inner = &inner + &b;
            for (s, x) in sup.iter_mut().zip(&support[c]) {
                *s += x;
            }
        }
        match t.variable_of(v) {
            Some(k) => {
                sup[k] = 1;
                inner = &inner + &MultiPoly::one(n_vars);
                below[v] = Some(inner.mul_monomial(&sup));
            }
            None => below[v] = Some(inner),
        }
        support[v] = sup;
    }
    below[t.root].take().expect("root processed")
}

/// Exponents of `prod_{j=1}^{m} x_j ... x_{q-j+1}`, `m = min(i, q-i+1)`,
/// over `q` variables.
fn cycle_max_exponents(q: usize, i: usize) -> Vec<u32> {
    let m = i.min(q + 1 - i);
    (1..=q)
        .map(|k| (1..=m).filter(|&j| j <= k && k + j <= q + 1).count() as u32)
        .collect()
}

/// `mu_{C_{n+1}}(1^n, v_i)`.
pub fn cycle_monomial_max(n: usize, i: usize) -> Result<MultiPoly> {
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, max: n });
    }
    Ok(MultiPoly::monomial(cycle_max_exponents(n, i), 1))
}

/// `q`-variable max monomial at local index `i`, shifted by `offset` into
/// an `n`-variable exponent vector.
fn embedded(n: usize, q: usize, i: usize, offset: usize) -> Vec<u32> {
    let mut e = vec![0; n];
    e[offset..offset + q].copy_from_slice(&cycle_max_exponents(q, i));
    e
}

/// A recurrent of `C_{n+1}`: `p = 0` is `max = 1^n`, `1 <= p <= n` is
/// `b_p = 1^{p-1} 0 1^{n-p}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleRecurrent {
    pub p: usize,
}

impl CycleRecurrent {
    pub fn grains(&self, n: usize) -> Vec<u64> {
        (1..=n).map(|k| u64::from(k != self.p)).collect()
    }

    /// `mu_{C_{n+1}}(c, v_i)` from the closed forms.
    pub fn monomial(&self, n: usize, i: usize) -> Result<MultiPoly> {
        if i == 0 || i > n || self.p > n {
            return Err(Error::IndexOutOfRange { index: i, max: n });
        }
        let p = self.p;
        let e = if p == 0 {
            cycle_max_exponents(n, i)
        } else if i < p {
            embedded(n, p - 1, i, 0)
        } else if i > p {
            embedded(n, n - p, i - p, p)
        } else {
            vec![0; n]
        };
        Ok(MultiPoly::monomial(e, 1))
    }
}

/// Avalanche polynomial of `C_{n+1}`: the max monomials, the two families
/// of sub-cycle monomials, and the constant `n`.
pub fn cycle_poly(n_plus_1: usize) -> Result<MultiPoly> {
    if n_plus_1 < 2 {
        return Err(Error::InvalidFamily(format!("cycle needs at least 2 vertices, got {n_plus_1}")));
    }
    let n = n_plus_1 - 1;
    let one = BigInt::one();
    let mut a = MultiPoly::zero(n);
    for i in 1..=n {
        a.add_term(embedded(n, n, i, 0), one.clone());
    }
    for p in 2..=n {
        for i in 1..p {
            a.add_term(embedded(n, p - 1, i, 0), one.clone());
        }
    }
    for p in 1..n {
        for i in p + 1..=n {
            a.add_term(embedded(n, n - p, i - p, p), one.clone());
        }
    }
    a.add_term(vec![0; n], BigInt::from(n));
    Ok(a)
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `base^exp`, where an exponent of `-1` only ever meets base `1`.
fn pow_signed(base: u64, exp: i64) -> Result<BigInt> {
    match exp {
        e if e >= 0 => Ok(num_traits::pow(BigInt::from(base), e as usize)),
        -1 if base == 1 => Ok(BigInt::one()),
        _ => Err(Error::Formula(format!("{base}^{exp} is not an integer"))),
    }
}

/// `lambda_m` on `K_{n+1}`: the number of principal avalanches of size `m`.
pub fn complete_lambda(n: usize, m: usize) -> Result<BigInt> {
    if n == 0 || m > n {
        return Err(Error::DegreeOutOfRange { vars: n, degree: m });
    }
    let (n, m) = (n as u64, m as u64);
    if m == 0 {
        if n == 1 {
            return Ok(BigInt::zero());
        }
        return Ok(BigInt::from(n * (n - 1)) * pow_signed(n + 1, n as i64 - 2)?);
    }
    Ok(binomial(n, m) * pow_signed(m, m as i64 - 1)? * pow_signed(n - m + 1, (n - m) as i64 - 1)?)
}

/// `sum_m lambda_m / C(n, m) * e_m` on `K_{n+1}`.
pub fn complete_poly(n_plus_1: usize) -> Result<MultiPoly> {
    if n_plus_1 < 2 {
        return Err(Error::InvalidFamily(format!("complete graph needs at least 2 vertices, got {n_plus_1}")));
    }
    let n = n_plus_1 - 1;
    let mut a = MultiPoly::zero(n);
    for m in 0..=n {
        let lambda = complete_lambda(n, m)?;
        let c = binomial(n as u64, m as u64);
        let (q, r) = lambda.div_rem(&c);
        if !r.is_zero() {
            return Err(Error::Formula(format!("lambda_{m} = {lambda} is not divisible by C({n},{m}) = {c}")));
        }
        a = &a + &elementary_symmetric(n, m)?.scale(&q);
    }
    Ok(a)
}

/// Fibonacci numbers with `f_1 = f_2 = 1`. Index `0` is rejected.
pub fn fib(k: usize) -> Result<BigInt> {
    if k == 0 {
        return Err(Error::IndexOutOfRange { index: 0, max: usize::MAX });
    }
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    for _ in 1..k {
        let next = &a + &b;
        a = core::mem::replace(&mut b, next);
    }
    Ok(b)
}

/// Lucas numbers, `l_0 = 2`, `l_1 = 1`.
pub fn lucas(k: usize) -> BigInt {
    let (mut a, mut b) = (BigInt::from(2), BigInt::one());
    for _ in 0..k {
        let next = &a + &b;
        a = core::mem::replace(&mut b, next);
    }
    a
}

/// Number of recurrents (spanning trees) of `W_n`: `l_{2n} - 2`.
pub fn wheel_recurrent_count(n: usize) -> BigInt {
    lucas(2 * n) - 2
}

/// Constant term of the wheel polynomial, `2n (f_{2n-1} - 1)`.
pub fn wheel_lambda0(n: usize) -> Result<BigInt> {
    if n < 3 {
        return Err(Error::InvalidFamily(format!("wheel needs a rim of at least 3, got {n}")));
    }
    Ok(BigInt::from(2 * n) * (fib(2 * n - 1)? - 1))
}

/// `lambda_0 / (n (l_{2n} - 2))` on `W_n` as an unreduced fraction
/// `(numerator, denominator)`.
pub fn wheel_zero_fraction(n: usize) -> Result<(BigInt, BigInt)> {
    Ok((wheel_lambda0(n)?, BigInt::from(n) * wheel_recurrent_count(n)))
}

/// `n^2 w_n + sum_{m=1}^{n-1} m f_{2(n-m)} w_m + 2n (f_{2n-1} - 1)` on
/// rim variables `x_0..x_{n-1}`.
pub fn wheel_poly(n: usize) -> Result<MultiPoly> {
    let constant = wheel_lambda0(n)?;
    let mut a = cyclic_poly(n, n)?.scale(&BigInt::from(n * n));
    for m in 1..n {
        let k = BigInt::from(m) * fib(2 * (n - m))?;
        a = &a + &cyclic_poly(n, m)?.scale(&k);
    }
    a.add_term(vec![0; n], constant);
    Ok(a)
}
