//! Recovering a labeled rooted tree from its avalanche polynomial.
//!
//! Variable `k` is read as vertex `k + 1`; the root is vertex `0`. The
//! polynomial splits into parts with disjoint supports, one per child of the
//! root. A part with support `S` hanging from child `c` has the form
//! `x^S (B + 1)`, where `B` is the polynomial of the subtree below `c` and
//! does not mention `x_c`. Peeling `x^S` and the `1` exposes `c` as the one
//! variable of `S` missing from `B`; then recurse on `B`.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::families::{tree_poly, RootedTree};
use crate::poly::MultiPoly;

/// One peeling step: a support component, its variables and the vertex it
/// was attached to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconstructionStep {
    pub component: MultiPoly,
    /// Variable indices of the component's support, ascending.
    pub peeled: Vec<usize>,
    /// Vertex the component hangs from (`0` is the root).
    pub parent: usize,
    /// Vertex identified as the child.
    pub child: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReconstructionTrace {
    pub steps: Vec<ReconstructionStep>,
}

fn reject(reason: &'static str, component: &MultiPoly) -> Error {
    Error::NotTreePolynomial {
        reason,
        component: component.to_string(),
    }
}

pub fn reconstruct_tree(p: &MultiPoly) -> Result<RootedTree> {
    reconstruct_tree_traced(p).map(|(t, _)| t)
}

pub fn reconstruct_tree_traced(p: &MultiPoly) -> Result<(RootedTree, ReconstructionTrace)> {
    let n = p.n_vars();
    let mut parents: Vec<Option<usize>> = vec![None; n + 1];
    let mut trace = ReconstructionTrace::default();
    let one = MultiPoly::one(n);
    let mut work = vec![(p.clone(), 0usize)];
    while let Some((q, parent)) = work.pop() {
        if !q.coefficient(&vec![0; n]).is_zero() {
            return Err(reject("constant term", &q));
        }
        for comp in q.support_components() {
            let support = comp.support();
            if comp.has_negative_coefficient() {
                return Err(reject("negative coefficient", &comp));
            }
            let mut mask = vec![0u32; n];
            for &k in &support {
                mask[k] = 1;
            }
            let inner = comp
                .div_monomial(&mask)
                .ok_or_else(|| reject("not divisible by its support product", &comp))?;
            let rest = &inner - &one;
            let inner_support = rest.support();
            let missing: Vec<usize> = support
                .iter()
                .copied()
                .filter(|k| inner_support.binary_search(k).is_err())
                .collect();
            if inner_support.iter().any(|k| support.binary_search(k).is_err()) || missing.len() != 1 {
                return Err(reject("no unique peeled vertex", &comp));
            }
            let child = missing[0] + 1;
            if parents[child].is_some() {
                return Err(reject("vertex reached twice", &comp));
            }
            parents[child] = Some(parent);
            trace.steps.push(ReconstructionStep {
                component: comp,
                peeled: support,
                parent,
                child,
            });
            if !rest.is_zero() {
                work.push((rest, child));
            }
        }
    }
    if let Some(v) = (1..=n).find(|&v| parents[v].is_none()) {
        return Err(Error::NotTreePolynomial {
            reason: "variable never occurs",
            component: alloc::format!("x{v}"),
        });
    }
    let tree = RootedTree::from_parents(parents)?;
    if tree_poly(&tree) != *p {
        return Err(reject("rebuilt tree has a different polynomial", p));
    }
    Ok((tree, trace))
}

/// True iff `p` is the avalanche polynomial of a labeled tree rooted at
/// vertex `0`.
pub fn validate_tree_poly(p: &MultiPoly) -> bool {
    reconstruct_tree(p).is_ok()
}
