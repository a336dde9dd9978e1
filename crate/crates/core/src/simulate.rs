//! Synthetic descent of founder chromosome segments, producing collections of
//! graphs for deduplication experiments.
//!
//! A population of `pop` individuals each carries two chromosomes on the
//! marker axis `[0, chrom_len)`. Founders carry `2 * pop` distinct founder
//! segments, one per chromosome. Each generation, every child draws two
//! parents uniformly with replacement and receives one recombinant gamete
//! from each: a Poisson(`recomb_rate * chrom_len`) number of crossovers at
//! distinct uniform integer positions, alternating between the parent's two
//! chromosomes from a randomly chosen start. In the final generation,
//! individual `j` becomes edge `I<j>` and founder segment `f` becomes node
//! `F<f>`; the edge is attached to a node wherever either of its chromosomes
//! carries that segment.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use std::collections::BTreeSet;

use crate::ibdgraph::IbdGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    pub pop: usize,
    pub generations: usize,
    pub realizations: usize,
    /// Crossovers per base pair per meiosis.
    pub recomb_rate: f64,
    pub chrom_len: i64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("population size must be at least 1")]
    Population,
    #[error("need at least one realization")]
    Realizations,
    #[error("chromosome length must be at least 1")]
    Length,
    #[error("recombination rate must be finite and non-negative, got {0}")]
    Rate(f64),
}

/// Founder segments along one chromosome: `(start, founder)` with strictly
/// increasing starts, the first at 0, and no two neighbours sharing a
/// founder.
type Mosaic = Vec<(i64, u32)>;

struct Simulator {
    rng: ChaCha8Rng,
    crossovers: Option<Poisson<f64>>,
    len: i64,
}

impl Simulator {
    fn gamete(&mut self, pair: &[Mosaic; 2]) -> Mosaic {
        let count = match &self.crossovers {
            Some(p) => (p.sample(&mut self.rng) as u64).min((self.len - 1) as u64) as usize,
            None => 0,
        };
        let mut cuts = BTreeSet::new();
        while cuts.len() < count {
            cuts.insert(self.rng.random_range(1..self.len));
        }
        let mut side = self.rng.random_range(0..2usize);
        let mut out: Mosaic = Vec::new();
        let mut start = 0;
        for end in cuts.into_iter().chain([self.len]) {
            copy_range(&pair[side], start, end, &mut out);
            side ^= 1;
            start = end;
        }
        out
    }
}

/// Appends the part of `src` covering `[a, b)` to `out`, merging with the
/// last segment when the founder continues.
fn copy_range(src: &Mosaic, a: i64, b: i64, out: &mut Mosaic) {
    let first = src.partition_point(|&(s, _)| s <= a) - 1;
    for &(s, f) in src[first..].iter().take_while(|&&(s, _)| s < b) {
        if out.last().is_some_and(|&(_, lf)| lf == f) {
            continue;
        }
        out.push((s.max(a), f));
    }
}

fn founders(pop: usize) -> Vec<[Mosaic; 2]> {
    (0..pop)
        .map(|j| [vec![(0, 2 * j as u32)], vec![(0, 2 * j as u32 + 1)]])
        .collect()
}

fn to_graph(id: String, population: &[[Mosaic; 2]], len: i64, pop: usize) -> IbdGraph {
    let mut g = IbdGraph::new(id);
    let mut index: Vec<Option<usize>> = vec![None; 2 * pop];
    let mut attachments: Vec<(u32, String, i64, i64)> = Vec::new();
    for (j, pair) in population.iter().enumerate() {
        for chrom in pair {
            for (k, &(s, f)) in chrom.iter().enumerate() {
                let e = chrom.get(k + 1).map_or(len, |n| n.0);
                attachments.push((f, format!("I{j}"), s, e));
            }
        }
    }
    attachments.sort();
    for (f, edge, s, e) in attachments {
        let n = *index[f as usize].get_or_insert_with(|| g.add_node(format!("F{f}")));
        g.attach(n, &edge, s, e).expect("segments are non-empty");
    }
    g
}

/// Runs `realizations` independent descents and returns one graph per
/// realization, with ids `r0`, `r1`, ... Deterministic in `seed`.
pub fn simulate(params: &SimParams) -> Result<Vec<IbdGraph>, SimError> {
    if params.pop == 0 {
        return Err(SimError::Population);
    }
    if params.realizations == 0 {
        return Err(SimError::Realizations);
    }
    if params.chrom_len < 1 {
        return Err(SimError::Length);
    }
    if !params.recomb_rate.is_finite() || params.recomb_rate < 0.0 {
        return Err(SimError::Rate(params.recomb_rate));
    }
    let lambda = params.recomb_rate * params.chrom_len as f64;
    let mut sim = Simulator {
        rng: ChaCha8Rng::seed_from_u64(params.seed),
        crossovers: if lambda > 0.0 && params.chrom_len > 1 {
            Some(Poisson::new(lambda).map_err(|_| SimError::Rate(params.recomb_rate))?)
        } else {
            None
        },
        len: params.chrom_len,
    };
    let mut graphs = Vec::with_capacity(params.realizations);
    for r in 0..params.realizations {
        let mut population = founders(params.pop);
        for _ in 0..params.generations {
            population = (0..params.pop)
                .map(|_| {
                    let mother = sim.rng.random_range(0..params.pop);
                    let father = sim.rng.random_range(0..params.pop);
                    [
                        sim.gamete(&population[mother]),
                        sim.gamete(&population[father]),
                    ]
                })
                .collect();
        }
        graphs.push(to_graph(
            format!("r{r}"),
            &population,
            params.chrom_len,
            params.pop,
        ));
    }
    Ok(graphs)
}
