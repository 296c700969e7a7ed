//! Sandpiles, stabilization and recurrence.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Index;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Grain counts on the non-sink vertices of a graph, in compact order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Sandpile {
    grains: Vec<u64>,
}

impl Sandpile {
    pub fn new(grains: Vec<u64>) -> Self {
        Sandpile { grains }
    }

    pub fn zero(len: usize) -> Self {
        Sandpile { grains: vec![0; len] }
    }

    /// `1_v`: one grain on compact vertex `v`.
    pub fn unit(len: usize, v: usize) -> Self {
        let mut s = Self::zero(len);
        s.grains[v] = 1;
        s
    }

    pub fn grains(&self) -> &[u64] {
        &self.grains
    }

    pub fn into_grains(self) -> Vec<u64> {
        self.grains
    }

    pub fn len(&self) -> usize {
        self.grains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grains.is_empty()
    }

    /// Total number of grains.
    pub fn total(&self) -> u64 {
        self.grains.iter().sum()
    }

    /// Pointwise sum; panics on length mismatch.
    pub fn plus(&self, other: &Sandpile) -> Sandpile {
        assert_eq!(self.len(), other.len(), "sandpile length mismatch");
        Sandpile::new(self.grains.iter().zip(&other.grains).map(|(a, b)| a + b).collect())
    }

    /// `self + 1_v`.
    pub fn with_grain(&self, v: usize) -> Sandpile {
        let mut s = self.clone();
        s.grains[v] += 1;
        s
    }

    pub fn is_stable(&self, g: &Graph) -> bool {
        self.first_unstable(g).is_none()
    }

    fn first_unstable(&self, g: &Graph) -> Option<usize> {
        (0..self.len()).find(|&i| self.grains[i] >= g.nonsink_degree(i))
    }

    fn check_len(&self, g: &Graph) -> Result<()> {
        if self.len() == g.n_nonsink() {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: g.n_nonsink(),
                got: self.len(),
            })
        }
    }
}

impl Index<usize> for Sandpile {
    type Output = u64;

    fn index(&self, i: usize) -> &u64 {
        &self.grains[i]
    }
}

impl From<Vec<u64>> for Sandpile {
    fn from(grains: Vec<u64>) -> Self {
        Sandpile::new(grains)
    }
}

/// Comma separated grains, e.g. `1,0,1,1`.
impl fmt::Display for Sandpile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.grains.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// Number of times each non-sink vertex toppled during one stabilization.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TopplingVector {
    counts: Vec<u64>,
}

impl TopplingVector {
    pub fn new(counts: Vec<u64>) -> Self {
        TopplingVector { counts }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn into_counts(self) -> Vec<u64> {
        self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }
}

impl Index<usize> for TopplingVector {
    type Output = u64;

    fn index(&self, i: usize) -> &u64 {
        &self.counts[i]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizationResult {
    pub stable: Sandpile,
    pub topplings: TopplingVector,
    /// Total number of topplings.
    pub avalanche_size: u64,
    /// Grains delivered to the sink.
    pub burst: u64,
}

/// Reusable scratch space for repeated stabilizations on one graph.
///
/// Unstable vertices sit in a FIFO queue (each at most once); a popped vertex
/// topples `grains / degree` times in one step.
pub struct Stabilizer<'g> {
    graph: &'g Graph,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
}

impl<'g> Stabilizer<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        Stabilizer {
            graph,
            queue: VecDeque::new(),
            queued: vec![false; graph.n_nonsink()],
        }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    /// Stabilizes `grains` in place, adding topple counts into `topples`.
    pub fn run(&mut self, grains: &mut [u64], topples: &mut [u64]) {
        let g = self.graph;
        debug_assert_eq!(grains.len(), g.n_nonsink());
        debug_assert_eq!(topples.len(), g.n_nonsink());
        for (i, &x) in grains.iter().enumerate() {
            if x >= g.nonsink_degree(i) {
                self.queued[i] = true;
                self.queue.push_back(i);
            }
        }
        while let Some(i) = self.queue.pop_front() {
            self.queued[i] = false;
            let deg = g.nonsink_degree(i);
            let times = grains[i] / deg;
            if times == 0 {
                continue;
            }
            grains[i] -= times * deg;
            topples[i] += times;
            for &(j, w) in g.nonsink_neighbors(i) {
                grains[j] += times * w;
                if !self.queued[j] && grains[j] >= g.nonsink_degree(j) {
                    self.queued[j] = true;
                    self.queue.push_back(j);
                }
            }
        }
    }

    /// Stabilizes `grains` in place from scratch and returns the toppling
    /// counts.
    pub fn stabilize_in_place(&mut self, grains: &mut [u64]) -> Vec<u64> {
        let mut topples = vec![0; grains.len()];
        self.run(grains, &mut topples);
        topples
    }

    pub fn stabilize(&mut self, c: &Sandpile) -> StabilizationResult {
        let mut grains = c.grains.clone();
        let topples = self.stabilize_in_place(&mut grains);
        let g = self.graph;
        let burst = topples
            .iter()
            .enumerate()
            .map(|(i, &t)| t * g.sink_weight(i))
            .sum();
        StabilizationResult {
            stable: Sandpile::new(grains),
            avalanche_size: topples.iter().sum(),
            topplings: TopplingVector::new(topples),
            burst,
        }
    }

    /// Burning test on a stable grain vector: add the sink-firing sandpile,
    /// stabilize, and require the original state back with every vertex
    /// toppling exactly once. `scratch` and `topples` are overwritten.
    fn burns(&mut self, grains: &[u64], scratch: &mut Vec<u64>, topples: &mut Vec<u64>) -> bool {
        let g = self.graph;
        scratch.clear();
        scratch.extend(grains.iter().zip(g.sink_weights()).map(|(a, b)| a + b));
        topples.clear();
        topples.resize(grains.len(), 0);
        self.run(scratch, topples);
        if scratch.as_slice() != grains {
            return false;
        }
        let all_once = topples.iter().all(|&t| t == 1);
        debug_assert!(all_once, "burning returned the state with a non-unit firing vector");
        all_once
    }
}

/// Unique stabilization of `c` together with its toppling vector.
pub fn stabilize(g: &Graph, c: &Sandpile) -> Result<StabilizationResult> {
    c.check_len(g)?;
    Ok(Stabilizer::new(g).stabilize(c))
}

/// Stable addition `a ⊕ b = (a + b)°`.
pub fn stable_add(g: &Graph, a: &Sandpile, b: &Sandpile) -> Result<Sandpile> {
    a.check_len(g)?;
    b.check_len(g)?;
    Ok(Stabilizer::new(g).stabilize(&a.plus(b)).stable)
}

/// `max(v) = deg(v) - 1`.
pub fn max_sandpile(g: &Graph) -> Sandpile {
    Sandpile::new((0..g.n_nonsink()).map(|i| g.nonsink_degree(i) - 1).collect())
}

/// `u_j = weight(v_j, sink)`, the sandpile obtained by firing the sink.
pub fn sink_firing(g: &Graph) -> Sandpile {
    Sandpile::new(g.sink_weights().to_vec())
}

/// Burning criterion. Errors on unstable input rather than stabilizing it.
pub fn is_recurrent(g: &Graph, c: &Sandpile) -> Result<bool> {
    c.check_len(g)?;
    if let Some(v) = c.first_unstable(g) {
        return Err(Error::Unstable(v));
    }
    let mut st = Stabilizer::new(g);
    Ok(st.burns(&c.grains, &mut Vec::new(), &mut Vec::new()))
}

fn check_limit(states: u128, limit: u64) -> Result<()> {
    if states > u128::from(limit) {
        Err(Error::LimitExceeded { states, limit })
    } else {
        Ok(())
    }
}

/// All recurrent sandpiles of `g` in lexicographic order of grain vectors.
///
/// Scans every stable state (an odometer over `prod deg(v)` states) and keeps
/// those passing the burning test. Fails if the state count exceeds `limit`.
pub fn enumerate_recurrents(g: &Graph, limit: u64) -> Result<Recurrents<'_>> {
    check_limit(g.stable_state_count(), limit)?;
    Ok(Recurrents::new(g, None))
}

/// The recurrents whose first grain count is `first`, in lexicographic order.
///
/// Concatenating the shards for `first = 0, 1, ...` reproduces
/// [`enumerate_recurrents`]; shards can be processed independently.
pub fn enumerate_recurrents_shard(g: &Graph, first: u64, limit: u64) -> Result<Recurrents<'_>> {
    check_limit(g.stable_state_count(), limit)?;
    Ok(Recurrents::new(g, Some(first)))
}

/// Iterator over recurrent sandpiles; see [`enumerate_recurrents`].
pub struct Recurrents<'g> {
    stabilizer: Stabilizer<'g>,
    state: Vec<u64>,
    pinned_first: bool,
    done: bool,
    scratch: Vec<u64>,
    topples: Vec<u64>,
}

impl<'g> Recurrents<'g> {
    fn new(g: &'g Graph, first: Option<u64>) -> Self {
        let n = g.n_nonsink();
        let mut state = vec![0; n];
        let mut done = false;
        if let Some(first) = first {
            if n == 0 || first >= g.nonsink_degree(0) {
                done = true;
            } else {
                state[0] = first;
            }
        }
        Recurrents {
            stabilizer: Stabilizer::new(g),
            state,
            pinned_first: first.is_some(),
            done,
            scratch: Vec::new(),
            topples: Vec::new(),
        }
    }

    /// Advances the odometer; returns false once it wraps around.
    fn advance(&mut self) -> bool {
        let g = self.stabilizer.graph();
        let lowest = usize::from(self.pinned_first);
        for i in (lowest..self.state.len()).rev() {
            self.state[i] += 1;
            if self.state[i] < g.nonsink_degree(i) {
                return true;
            }
            self.state[i] = 0;
        }
        false
    }
}

impl Iterator for Recurrents<'_> {
    type Item = Sandpile;

    fn next(&mut self) -> Option<Sandpile> {
        while !self.done {
            let hit = self
                .stabilizer
                .burns(&self.state, &mut self.scratch, &mut self.topples);
            let current = hit.then(|| Sandpile::new(self.state.clone()));
            if !self.advance() {
                self.done = true;
            }
            if current.is_some() {
                return current;
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(xs: &[u64]) -> Sandpile {
        Sandpile::new(xs.to_vec())
    }

    #[test]
    fn cycle_six_example() {
        let g = Graph::cycle(6).unwrap();
        let c = sp(&[1, 1, 1, 1, 1]).with_grain(1);
        let r = stabilize(&g, &c).unwrap();
        assert_eq!(r.topplings.counts(), &[1, 2, 2, 2, 1]);
        assert_eq!(r.avalanche_size, 8);
        assert!(r.stable.is_stable(&g));
    }

    #[test]
    fn cycle_ten_example() {
        let g = Graph::cycle(10).unwrap();
        let c = sp(&[1, 1, 1, 0, 1, 1, 1, 1, 1]).with_grain(5);
        let r = stabilize(&g, &c).unwrap();
        assert_eq!(r.topplings.counts(), &[0, 0, 0, 0, 1, 2, 2, 2, 1]);
    }

    #[test]
    fn stable_input_is_fixed() {
        let g = Graph::complete(5).unwrap();
        let c = sp(&[3, 0, 2, 1]);
        let r = stabilize(&g, &c).unwrap();
        assert_eq!(r.stable, c);
        assert!(r.topplings.is_zero());
        assert_eq!(r.burst, 0);
    }

    #[test]
    fn stable_add_on_triangle() {
        // (2,1) on C_3: v1 topples -> (0,2); v2 topples -> (1,0).
        let g = Graph::cycle(3).unwrap();
        assert_eq!(stable_add(&g, &sp(&[1, 1]), &sp(&[1, 0])).unwrap(), sp(&[1, 0]));
        let max = max_sandpile(&g);
        assert_eq!(stable_add(&g, &max, &Sandpile::zero(2)).unwrap(), max);
    }

    #[test]
    fn recurrence_on_triangle() {
        let g = Graph::cycle(3).unwrap();
        for (c, expect) in [([1, 0], true), ([0, 1], true), ([1, 1], true), ([0, 0], false)] {
            assert_eq!(is_recurrent(&g, &sp(&c)).unwrap(), expect, "{c:?}");
        }
        assert_eq!(is_recurrent(&g, &sp(&[2, 0])), Err(Error::Unstable(0)));
        assert!(matches!(
            is_recurrent(&g, &sp(&[1])),
            Err(Error::LengthMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn max_sandpiles() {
        assert_eq!(max_sandpile(&Graph::cycle(6).unwrap()), sp(&[1; 5]));
        assert_eq!(max_sandpile(&Graph::complete(5).unwrap()), sp(&[3; 4]));
        assert_eq!(max_sandpile(&Graph::wheel(6).unwrap()), sp(&[2; 6]));
        let g = Graph::grid(3, 4).unwrap();
        assert!(is_recurrent(&g, &max_sandpile(&g)).unwrap());
    }

    #[test]
    fn enumeration_counts_and_order() {
        let c3: Vec<_> = enumerate_recurrents(&Graph::cycle(3).unwrap(), 100).unwrap().collect();
        assert_eq!(c3, vec![sp(&[0, 1]), sp(&[1, 0]), sp(&[1, 1])]);
        assert_eq!(enumerate_recurrents(&Graph::complete(4).unwrap(), 100).unwrap().count(), 16);
        assert_eq!(enumerate_recurrents(&Graph::wheel(4).unwrap(), 100).unwrap().count(), 45);
    }

    #[test]
    fn shards_concatenate_to_full_enumeration() {
        let g = Graph::wheel(5).unwrap();
        let full: Vec<_> = enumerate_recurrents(&g, 1000).unwrap().collect();
        let sharded: Vec<_> = (0..4)
            .flat_map(|f| enumerate_recurrents_shard(&g, f, 1000).unwrap())
            .collect();
        assert_eq!(full, sharded);
    }

    #[test]
    fn limit_guard() {
        let g = Graph::complete(6).unwrap();
        let err = enumerate_recurrents(&g, 100).err().unwrap();
        assert_eq!(err, Error::LimitExceeded { states: 3125, limit: 100 });
    }

    #[test]
    fn single_vertex_graph_has_one_empty_recurrent() {
        let g = Graph::from_edges(1, 0, &[]).unwrap();
        let all: Vec<_> = enumerate_recurrents(&g, 10).unwrap().collect();
        assert_eq!(all, vec![Sandpile::zero(0)]);
    }
}
