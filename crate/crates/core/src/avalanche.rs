//! Principal avalanches, avalanche polynomials and their distributions.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::poly::{MultiPoly, UniPoly};
use crate::sandpile::{self, Recurrents, Sandpile, Stabilizer, TopplingVector};

/// One principal avalanche: a grain dropped on `vertex` of a recurrent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AvalancheRecord {
    pub recurrent: Sandpile,
    /// Compact (non-sink) vertex index.
    pub vertex: usize,
    pub topplings: TopplingVector,
    pub size: u64,
    pub burst: u64,
}

fn check_vertex(g: &Graph, v: usize) -> Result<()> {
    if v < g.n_nonsink() {
        Ok(())
    } else {
        Err(Error::InvalidVertex(v))
    }
}

fn to_exponents(topples: &[u64]) -> Vec<u32> {
    topples
        .iter()
        .map(|&t| u32::try_from(t).expect("toppling count exceeds u32"))
        .collect()
}

/// `x^{nu(c, v)}` where `nu` is the toppling vector of `(c + 1_v)°`.
pub fn avalanche_monomial(g: &Graph, c: &Sandpile, v: usize) -> Result<MultiPoly> {
    check_vertex(g, v)?;
    if !sandpile::is_recurrent(g, c)? {
        return Err(Error::NotRecurrent);
    }
    let r = Stabilizer::new(g).stabilize(&c.with_grain(v));
    Ok(MultiPoly::monomial(to_exponents(r.topplings.counts()), 1))
}

/// Runs every principal avalanche of the recurrents yielded by `recurrents`,
/// handing the recurrent, vertex and toppling counts to `f`.
fn drive(g: &Graph, recurrents: Recurrents<'_>, mut f: impl FnMut(&Sandpile, usize, &[u64])) {
    let mut st = Stabilizer::new(g);
    let n = g.n_nonsink();
    let mut grains = vec![0; n];
    let mut topples = vec![0; n];
    for c in recurrents {
        for v in 0..n {
            grains.copy_from_slice(c.grains());
            grains[v] += 1;
            topples.fill(0);
            st.run(&mut grains, &mut topples);
            f(&c, v, &topples);
        }
    }
}

fn accumulate(g: &Graph, recurrents: Recurrents<'_>) -> MultiPoly {
    let mut counts: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
    drive(g, recurrents, |_, _, topples| {
        *counts.entry(to_exponents(topples)).or_insert(0) += 1;
    });
    let mut p = MultiPoly::zero(g.n_nonsink());
    for (e, k) in counts {
        p.add_term(e, BigInt::from(k));
    }
    p
}

/// Multivariate avalanche polynomial by exhaustive simulation: the sum of
/// the avalanche monomials over all recurrents and all non-sink vertices.
pub fn avalanche_polynomial(g: &Graph, limit: u64) -> Result<MultiPoly> {
    Ok(accumulate(g, sandpile::enumerate_recurrents(g, limit)?))
}

/// The part of [`avalanche_polynomial`] contributed by recurrents whose first
/// grain count is `first`. Summing over all shards gives the full polynomial.
pub fn avalanche_polynomial_shard(g: &Graph, first: u64, limit: u64) -> Result<MultiPoly> {
    Ok(accumulate(g, sandpile::enumerate_recurrents_shard(g, first, limit)?))
}

/// Calls `f` on every principal avalanche, recurrents in lexicographic order
/// and vertices ascending within each.
pub fn for_each_avalanche(g: &Graph, limit: u64, mut f: impl FnMut(&AvalancheRecord)) -> Result<()> {
    let recurrents = sandpile::enumerate_recurrents(g, limit)?;
    drive(g, recurrents, |c, v, topples| {
        let rec = AvalancheRecord {
            recurrent: c.clone(),
            vertex: v,
            topplings: TopplingVector::new(topples.to_vec()),
            size: topples.iter().sum(),
            burst: topples
                .iter()
                .enumerate()
                .map(|(i, &t)| t * g.sink_weight(i))
                .sum(),
        };
        f(&rec);
    });
    Ok(())
}

/// `lambda_m`: the number of principal avalanches of each size `m`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SizeDistribution {
    pub counts: BTreeMap<u64, BigInt>,
}

impl SizeDistribution {
    pub fn from_univariate(u: &UniPoly) -> Self {
        SizeDistribution {
            counts: u.nonzero_terms().map(|(k, c)| (k as u64, c.clone())).collect(),
        }
    }

    pub fn get(&self, m: u64) -> BigInt {
        self.counts.get(&m).cloned().unwrap_or_default()
    }

    pub fn total(&self) -> BigInt {
        self.counts.values().sum()
    }
}

pub fn size_distribution(g: &Graph, limit: u64) -> Result<SizeDistribution> {
    Ok(SizeDistribution::from_univariate(&avalanche_polynomial(g, limit)?.univariate()))
}

pub fn burst_distribution(g: &Graph, limit: u64) -> Result<UniPoly> {
    avalanche_polynomial(g, limit)?.burst_specialize(g)
}

/// Random-drop experiment on a `rows x cols` grid.
///
/// Starts from the maximal stable sandpile (3 grains per cell), then `drops`
/// times adds a grain to a uniformly random cell and stabilizes, recording
/// the avalanche size (number of topplings, 0 included). Cells are drawn
/// with ChaCha8 seeded by `seed`, so the histogram is reproducible exactly.
pub fn grid_experiment(rows: usize, cols: usize, drops: u64, seed: u64) -> Result<BTreeMap<u64, u64>> {
    let g = Graph::grid(rows, cols)?;
    let cells = u32::try_from(g.n_nonsink())
        .map_err(|_| Error::InvalidFamily("grid too large for the experiment".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut st = Stabilizer::new(&g);
    let mut grains = sandpile::max_sandpile(&g).into_grains();
    let mut topples = vec![0; grains.len()];
    let mut hist = BTreeMap::new();
    for _ in 0..drops {
        let v = rng.random_range(0..cells) as usize;
        grains[v] += 1;
        topples.fill(0);
        st.run(&mut grains, &mut topples);
        *hist.entry(topples.iter().sum()).or_insert(0) += 1;
    }
    Ok(hist)
}
