use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::strategy::StrategyCode;

/// Separate generators for the random choices of one evolution step, so the
/// draws of one operator never shift those of another.
#[derive(Debug, Clone)]
pub struct EvolutionRng {
    pub shuffle: ChaCha8Rng,
    pub crossover: ChaCha8Rng,
    pub mutation: ChaCha8Rng,
}

impl EvolutionRng {
    pub fn new(stream: &RngStream) -> Self {
        EvolutionRng {
            shuffle: stream.derive("shuffle").rng(),
            crossover: stream.derive("crossover").rng(),
            mutation: stream.derive("mutation").rng(),
        }
    }
}

/// Integer copy counts proportional to `(f_i + eps) / (sum f + P * eps)`,
/// scaled to `budget`. Floors first, then the leftover slots go to the
/// largest fractional remainders (lower index wins ties), so the counts
/// always sum to `budget`.
pub fn reproduction_counts(fitness: &[f64], epsilon: f64, budget: usize) -> Vec<usize> {
    let p = fitness.len();
    if p == 0 {
        return Vec::new();
    }
    let total: f64 = fitness.iter().sum::<f64>() + p as f64 * epsilon;
    let shares: Vec<f64> = fitness
        .iter()
        .map(|f| budget as f64 * (f + epsilon) / total)
        .collect();
    let mut counts: Vec<usize> = shares.iter().map(|s| s.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    if assigned > budget {
        // only reachable through rounding in degenerate inputs; trim from the tail
        let mut excess = assigned - budget;
        for c in counts.iter_mut().rev() {
            let cut = excess.min(*c);
            *c -= cut;
            excess -= cut;
        }
        return counts;
    }
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| {
        let fa = shares[a] - shares[a].floor();
        let fb = shares[b] - shares[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().cycle().take(budget - assigned) {
        counts[i] += 1;
    }
    counts
}

/// Fitness-proportional reproduction to a population of the same size.
pub fn reproduce(
    members: &[StrategyCode],
    fitness: &[f64],
    epsilon: f64,
) -> Result<Vec<StrategyCode>> {
    if members.len() != fitness.len() {
        return Err(Error::Dimension {
            what: "fitness vector vs. population",
            expected: members.len(),
            actual: fitness.len(),
        });
    }
    Ok(expand(
        members,
        &reproduction_counts(fitness, epsilon, members.len()),
    ))
}

pub(crate) fn expand(members: &[StrategyCode], counts: &[usize]) -> Vec<StrategyCode> {
    members
        .iter()
        .zip(counts)
        .flat_map(|(m, &c)| std::iter::repeat_n(m, c).cloned())
        .collect()
}

/// Swaps bits `[p, q)` between two codes.
pub fn swap_segment(a: &mut StrategyCode, b: &mut StrategyCode, p: usize, q: usize) {
    a.bits_mut()[p..q].swap_with_slice(&mut b.bits_mut()[p..q]);
}

/// With probability `rate`, swaps a uniformly chosen segment `[p, q)`,
/// `0 <= p < q <= len`, between the two codes.
pub fn crossover_pair<R: Rng + ?Sized>(
    a: &StrategyCode,
    b: &StrategyCode,
    rate: f64,
    rng: &mut R,
) -> Result<(StrategyCode, StrategyCode)> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            what: "crossover partner length",
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.fingerprint() != b.fingerprint() {
        return Err(Error::CodebookMismatch);
    }
    let (mut x, mut y) = (a.clone(), b.clone());
    if a.is_empty() || !rng.random_bool(rate) {
        return Ok((x, y));
    }
    let cut = index::sample(rng, a.len() + 1, 2);
    let (p, q) = (
        cut.index(0).min(cut.index(1)),
        cut.index(0).max(cut.index(1)),
    );
    swap_segment(&mut x, &mut y, p, q);
    Ok((x, y))
}

/// `rounds` independent chances of `rate` to flip one uniformly chosen bit.
pub fn mutate<R: Rng + ?Sized>(
    code: &StrategyCode,
    rounds: usize,
    rate: f64,
    rng: &mut R,
) -> StrategyCode {
    let mut out = code.clone();
    mutate_in_place(&mut out, rounds, rate, rng);
    out
}

pub(crate) fn mutate_in_place<R: Rng + ?Sized>(
    code: &mut StrategyCode,
    rounds: usize,
    rate: f64,
    rng: &mut R,
) {
    if code.is_empty() {
        return;
    }
    for _ in 0..rounds {
        if rng.random_bool(rate) {
            let k = rng.random_range(0..code.len());
            code.flip(k);
        }
    }
}
