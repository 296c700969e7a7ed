//! Parking functions and the avalanche decomposition on complete graphs.
//!
//! Sandpiles here live on `K_{n+1}` with sink `0` and non-sink vertices
//! `v_1..v_n` at compact indices `0..n`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sandpile::{Sandpile, Stabilizer};

/// An `n`-parking function `p(0..n)`: its sorted rearrangement satisfies
/// `a_i <= i`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParkingFunction {
    values: Vec<u64>,
}

impl ParkingFunction {
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if is_parking(&values) {
            Ok(ParkingFunction { values })
        } else {
            Err(Error::NotParking)
        }
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn is_parking(values: &[u64]) -> bool {
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    sorted.iter().enumerate().all(|(i, &a)| a <= i as u64)
}

/// `c` is recurrent on `K_{n+1}` iff `max - c` is an `n`-parking function.
pub fn recurrent_to_parking(c: &Sandpile) -> Result<ParkingFunction> {
    let n = c.len() as u64;
    let values = c
        .grains()
        .iter()
        .enumerate()
        .map(|(i, &x)| if x < n { Ok(n - 1 - x) } else { Err(Error::Unstable(i)) })
        .collect::<Result<Vec<_>>>()?;
    ParkingFunction::new(values).map_err(|_| Error::NotRecurrent)
}

pub fn parking_to_recurrent(p: &ParkingFunction) -> Sandpile {
    let n = p.len() as u64;
    Sandpile::new(p.values.iter().map(|&x| n - 1 - x).collect())
}

/// Recurrence on `K_{k+1}` for a grain vector of length `k`, through the
/// parking criterion. Also covers `k = 0`.
pub fn is_complete_recurrent(grains: &[u64]) -> bool {
    let n = grains.len() as u64;
    grains.iter().all(|&x| x < n) && is_parking(&grains.iter().map(|&x| n - 1 - x).collect::<Vec<_>>())
}

/// `(p_0, ..., p_{m-1}, q_0 + m, ..., q_{n-1} + m)`.
pub fn concat_parking(p: &ParkingFunction, q: &ParkingFunction) -> ParkingFunction {
    let m = p.len() as u64;
    let mut values = p.values.clone();
    values.extend(q.values.iter().map(|&x| x + m));
    debug_assert!(is_parking(&values));
    ParkingFunction { values }
}

/// Decomposition of a principal avalanche of size `m >= 1` on `K_{n+1}`.
///
/// `j` holds the toppled vertices other than `vertex`, ascending. `c1` is a
/// recurrent on `K_m` listing `c(w) - (n - m + 1)` for `w` in `j` (same
/// order); `c2` is a recurrent on `K_{n-m+1}` listing the grains on the
/// vertices that did not topple, ascending.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhiImage {
    pub n: usize,
    pub vertex: usize,
    pub j: Vec<usize>,
    pub c1: Sandpile,
    pub c2: Sandpile,
}

impl PhiImage {
    /// Avalanche size `m = |j| + 1`.
    pub fn size(&self) -> usize {
        self.j.len() + 1
    }
}

/// Toppling set of `c + 1_v` on `K_{n+1}`, as a membership mask.
fn toppled(c: &Sandpile, v: usize) -> Result<Vec<bool>> {
    let n = c.len();
    if v >= n {
        return Err(Error::InvalidVertex(v));
    }
    if !is_complete_recurrent(c.grains()) {
        return Err(match c.grains().iter().position(|&x| x >= n as u64) {
            Some(i) => Error::Unstable(i),
            None => Error::NotRecurrent,
        });
    }
    let g = Graph::complete(n + 1)?;
    let r = Stabilizer::new(&g).stabilize(&c.with_grain(v));
    Ok(r.topplings.counts().iter().map(|&t| t > 0).collect())
}

pub fn phi(c: &Sandpile, v: usize) -> Result<PhiImage> {
    let n = c.len();
    let hit = toppled(c, v)?;
    let m = hit.iter().filter(|&&t| t).count();
    if m == 0 {
        return Err(Error::EmptyAvalanche);
    }
    let shift = (n - m + 1) as u64;
    let j: Vec<usize> = (0..n).filter(|&w| hit[w] && w != v).collect();
    let c1 = j.iter().map(|&w| c[w] - shift).collect();
    let c2 = (0..n).filter(|&u| !hit[u]).map(|u| c[u]).collect();
    Ok(PhiImage {
        n,
        vertex: v,
        j,
        c1: Sandpile::new(c1),
        c2: Sandpile::new(c2),
    })
}

/// Rebuilds `(c, v)` from its image. Inputs that are not the image of any
/// avalanche are rejected.
pub fn phi_inverse(img: &PhiImage) -> Result<(Sandpile, usize)> {
    let n = img.n;
    let m = img.size();
    let bad = |msg: &str| Error::InvalidFamily(alloc::format!("not a phi image: {msg}"));
    if img.vertex >= n || img.j.iter().any(|&w| w >= n || w == img.vertex) {
        return Err(bad("vertex out of range or repeated"));
    }
    if img.j.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad("J must be strictly ascending"));
    }
    if img.c1.len() != m - 1 || img.c2.len() != n - m {
        return Err(bad("component sizes do not match J"));
    }
    if !is_complete_recurrent(img.c1.grains()) || !is_complete_recurrent(img.c2.grains()) {
        return Err(bad("components are not recurrent"));
    }
    let shift = (n - m + 1) as u64;
    let mut grains = alloc::vec![0u64; n];
    let mut in_avalanche = alloc::vec![false; n];
    grains[img.vertex] = n as u64 - 1;
    in_avalanche[img.vertex] = true;
    for (&w, &x) in img.j.iter().zip(img.c1.grains()) {
        grains[w] = x + shift;
        in_avalanche[w] = true;
    }
    let rest = (0..n).filter(|&u| !in_avalanche[u]);
    for (u, &x) in rest.zip(img.c2.grains()) {
        grains[u] = x;
    }
    let c = Sandpile::new(grains);
    if phi(&c, img.vertex)? != *img {
        return Err(bad("reconstruction does not reproduce the image"));
    }
    Ok((c, img.vertex))
}
