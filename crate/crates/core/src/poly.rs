//! Sparse multivariate polynomials with big-integer coefficients.
//!
//! Terms are stored as dense exponent vectors. Display and serialization use
//! graded lexicographic order, highest first: total degree descending, ties
//! broken by comparing exponent vectors lexicographically (descending), so
//! `x1` comes before `x2`.

use alloc::collections::btree_map::{self, BTreeMap};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub type Exponents = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiPoly {
    n_vars: usize,
    terms: BTreeMap<Exponents, BigInt>,
}

/// Graded lexicographic comparison, "greater" means printed first.
pub fn grlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| u64::from(e)).sum();
    let db: u64 = b.iter().map(|&e| u64::from(e)).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

impl MultiPoly {
    pub fn zero(n_vars: usize) -> Self {
        MultiPoly {
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n_vars: usize) -> Self {
        Self::constant(n_vars, BigInt::one())
    }

    pub fn constant(n_vars: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(vec![0; n_vars], c)
    }

    /// `x_i` (0-based variable index).
    pub fn var(n_vars: usize, i: usize) -> Self {
        let mut e = vec![0; n_vars];
        e[i] = 1;
        Self::monomial(e, 1)
    }

    pub fn monomial(exponents: Exponents, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(exponents.len());
        p.add_term(exponents, c.into());
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; repeated
    /// exponent vectors are summed.
    pub fn from_terms<I, C>(n_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponents, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero(n_vars);
        for (e, c) in terms {
            if e.len() != n_vars {
                return Err(Error::VarMismatch(n_vars, e.len()));
            }
            p.add_term(e, c.into());
        }
        Ok(p)
    }

    /// Adds `c * x^e` in place. Panics if `e` has the wrong length.
    pub fn add_term(&mut self, e: Exponents, c: BigInt) {
        assert_eq!(e.len(), self.n_vars, "exponent vector length mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            btree_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
            btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, e: &[u32]) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    /// Terms in storage order (plain lexicographic ascending).
    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigInt)> {
        self.terms.iter()
    }

    /// Terms in canonical (graded lexicographic, descending) order.
    pub fn canonical_terms(&self) -> Vec<(&Exponents, &BigInt)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| grlex(b.0, a.0));
        v
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| u64::from(x)).sum())
            .max()
    }

    /// Variables that occur in some term, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut used = vec![false; self.n_vars];
        for e in self.terms.keys() {
            for (i, &x) in e.iter().enumerate() {
                used[i] |= x > 0;
            }
        }
        (0..self.n_vars).filter(|&i| used[i]).collect()
    }

    fn check_vars(&self, other: &MultiPoly) -> Result<()> {
        if self.n_vars == other.n_vars {
            Ok(())
        } else {
            Err(Error::VarMismatch(self.n_vars, other.n_vars))
        }
    }

    pub fn checked_add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_vars(other)?;
        let mut out = MultiPoly::zero(self.n_vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, k: &BigInt) -> MultiPoly {
        if k.is_zero() {
            return MultiPoly::zero(self.n_vars);
        }
        MultiPoly {
            n_vars: self.n_vars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    /// Multiplies every term by the monomial `x^e`.
    pub fn mul_monomial(&self, e: &[u32]) -> MultiPoly {
        assert_eq!(e.len(), self.n_vars, "exponent vector length mismatch");
        MultiPoly {
            n_vars: self.n_vars,
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.iter().zip(e).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    /// Exact division by the monomial `x^e`; `None` if some term is not
    /// divisible.
    pub fn div_monomial(&self, e: &[u32]) -> Option<MultiPoly> {
        assert_eq!(e.len(), self.n_vars, "exponent vector length mismatch");
        let mut terms = BTreeMap::new();
        for (t, c) in &self.terms {
            let q: Option<Exponents> = t.iter().zip(e).map(|(a, b)| a.checked_sub(*b)).collect();
            terms.insert(q?, c.clone());
        }
        Some(MultiPoly {
            n_vars: self.n_vars,
            terms,
        })
    }

    /// Value at `x_1 = ... = x_n = 1`, the sum of coefficients.
    pub fn eval_ones(&self) -> BigInt {
        self.terms.values().sum()
    }

    pub fn eval(&self, point: &[BigInt]) -> Result<BigInt> {
        if point.len() != self.n_vars {
            return Err(Error::VarMismatch(self.n_vars, point.len()));
        }
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(point)
                    .fold(c.clone(), |acc, (&k, x)| acc * num_traits::pow(x.clone(), k as usize))
            })
            .sum())
    }

    /// Substitutes `x` for every variable.
    pub fn univariate(&self) -> UniPoly {
        let mut u = UniPoly::zero();
        for (e, c) in &self.terms {
            let d: u64 = e.iter().map(|&x| u64::from(x)).sum();
            u.add_term(d as usize, c.clone());
        }
        u
    }

    /// Burst-size specialization: `x_j -> x^{weight(v_j, sink)}` (and `1`
    /// where that weight is zero).
    pub fn burst_specialize(&self, g: &Graph) -> Result<UniPoly> {
        if self.n_vars != g.n_nonsink() {
            return Err(Error::VarMismatch(self.n_vars, g.n_nonsink()));
        }
        let mut u = UniPoly::zero();
        for (e, c) in &self.terms {
            let d: u64 = e
                .iter()
                .enumerate()
                .map(|(j, &x)| u64::from(x) * g.sink_weight(j))
                .sum();
            u.add_term(d as usize, c.clone());
        }
        Ok(u)
    }

    /// Splits the terms by connected components of the variable co-occurrence
    /// graph. Constant terms form their own component, listed last; the other
    /// components are ordered by their smallest variable.
    pub fn support_components(&self) -> Vec<MultiPoly> {
        let mut parent: Vec<usize> = (0..self.n_vars).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in self.terms.keys() {
            let mut vars = e.iter().enumerate().filter(|&(_, &x)| x > 0).map(|(i, _)| i);
            if let Some(first) = vars.next() {
                for v in vars {
                    let (a, b) = (find(&mut parent, first), find(&mut parent, v));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        // Union by minimum keeps each root at its smallest variable.
        let mut groups: BTreeMap<usize, MultiPoly> = BTreeMap::new();
        let mut constant = MultiPoly::zero(self.n_vars);
        for (e, c) in &self.terms {
            match e.iter().position(|&x| x > 0) {
                Some(v) => {
                    let root = find(&mut parent, v);
                    groups
                        .entry(root)
                        .or_insert_with(|| MultiPoly::zero(self.n_vars))
                        .add_term(e.clone(), c.clone());
                }
                None => constant.add_term(e.clone(), c.clone()),
            }
        }
        let mut out: Vec<MultiPoly> = groups.into_values().collect();
        if !constant.is_zero() {
            out.push(constant);
        }
        out
    }

    pub fn has_negative_coefficient(&self) -> bool {
        self.terms.values().any(Signed::is_negative)
    }

    /// Text form with custom variable names.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        DisplayWith { poly: self, names }
    }
}

struct DisplayWith<'a> {
    poly: &'a MultiPoly,
    names: &'a [String],
}

impl fmt::Display for DisplayWith<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, self.poly, &|f, i| f.write_str(&self.names[i]))
    }
}

fn write_poly(
    f: &mut fmt::Formatter<'_>,
    p: &MultiPoly,
    name: &dyn Fn(&mut fmt::Formatter<'_>, usize) -> fmt::Result,
) -> fmt::Result {
    let terms = p.canonical_terms();
    if terms.is_empty() {
        return f.write_str("0");
    }
    for (k, (e, c)) in terms.into_iter().enumerate() {
        let neg = c.is_negative();
        match (k, neg) {
            (0, true) => f.write_str("-")?,
            (0, false) => {}
            (_, true) => f.write_str(" - ")?,
            (_, false) => f.write_str(" + ")?,
        }
        let mag = c.abs();
        let is_const = e.iter().all(|&x| x == 0);
        let mut first = true;
        if is_const || !mag.is_one() {
            write!(f, "{mag}")?;
            first = false;
        }
        for (i, &x) in e.iter().enumerate() {
            if x == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            name(f, i)?;
            if x > 1 {
                write!(f, "^{x}")?;
            }
        }
    }
    Ok(())
}

/// `2*x1*x2 + x1 + x2 + 2`, variables named `x1..xn`.
impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, self, &|f, i| write!(f, "x{}", i + 1))
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;

    /// Panics on a variable-count mismatch; see [`MultiPoly::checked_add`].
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_add(rhs).expect("variable count mismatch")
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;

    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_sub(rhs).expect("variable count mismatch")
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;

    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_mul(rhs).expect("variable count mismatch")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        self.scale(&BigInt::from(-1))
    }
}

/// `e_m(x_1, ..., x_n)`: sum over all `m`-subsets of the product of their
/// variables.
pub fn elementary_symmetric(n: usize, m: usize) -> Result<MultiPoly> {
    if m > n {
        return Err(Error::DegreeOutOfRange { vars: n, degree: m });
    }
    let mut p = MultiPoly::zero(n);
    let mut subset: Vec<usize> = (0..m).collect();
    loop {
        let mut e = vec![0; n];
        for &i in &subset {
            e[i] = 1;
        }
        p.add_term(e, BigInt::one());
        // Next m-subset in lexicographic order.
        let Some(k) = (0..m).rev().find(|&k| subset[k] < n - m + k) else {
            break;
        };
        subset[k] += 1;
        for j in k + 1..m {
            subset[j] = subset[j - 1] + 1;
        }
    }
    Ok(p)
}

/// Cyclic polynomial `w_m` on `x_0..x_{n-1}`: the `n` windows
/// `x_i x_{i+1} ... x_{i+m-1}` (indices mod `n`) for `m < n`, and the single
/// monomial `x_0 ... x_{n-1}` with coefficient 1 for `m = n`.
pub fn cyclic_poly(n: usize, m: usize) -> Result<MultiPoly> {
    if m == 0 || m > n {
        return Err(Error::DegreeOutOfRange { vars: n, degree: m });
    }
    if m == n {
        return Ok(MultiPoly::monomial(vec![1; n], 1));
    }
    let mut p = MultiPoly::zero(n);
    for i in 0..n {
        let mut e = vec![0; n];
        for k in 0..m {
            e[(i + k) % n] = 1;
        }
        p.add_term(e, BigInt::one());
    }
    Ok(p)
}

/// Dense univariate polynomial, `coeffs[k]` multiplies `x^k`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UniPoly {
    coeffs: Vec<BigInt>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn from_coeffs<C: Into<BigInt>>(coeffs: impl IntoIterator<Item = C>) -> Self {
        let mut u = UniPoly {
            coeffs: coeffs.into_iter().map(Into::into).collect(),
        };
        u.trim();
        u
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn add_term(&mut self, degree: usize, c: BigInt) {
        if self.coeffs.len() <= degree {
            self.coeffs.resize(degree + 1, BigInt::zero());
        }
        self.coeffs[degree] += c;
        self.trim();
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coefficient(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Nonzero `(degree, coefficient)` pairs, ascending degree.
    pub fn nonzero_terms(&self) -> impl Iterator<Item = (usize, &BigInt)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;

    fn add(self, rhs: &UniPoly) -> UniPoly {
        let mut out = self.clone();
        for (k, c) in rhs.nonzero_terms() {
            out.add_term(k, c.clone());
        }
        out
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;

    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        UniPoly::from_coeffs(coeffs)
    }
}

/// `9*x^3 + 6*x^2 + 9*x + 24`.
impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.nonzero_terms().collect::<Vec<_>>().into_iter().rev() {
            match (first, c.is_negative()) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            let mag = c.abs();
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    f.write_str("x")?;
                    if k > 1 {
                        write!(f, "^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
