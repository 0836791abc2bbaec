//! Enumeration of the feasibility space `S` and the free-decision space `D`.
//!
//! Both are ordered canonically: states lexicographically by their count
//! vectors, decision entries by `(state, slice type)`. The entry order fixes
//! the bit positions of every [`StrategyCode`](crate::StrategyCode).

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{ResourceModel, SliceSet};

/// Dense lookup tables are used while `prod(bound_n + 1) * N` stays below this.
const DENSE_LOOKUP_LIMIT: u64 = 1 << 24;

/// All slice sets with `C·s <= r`, lexicographically ordered.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilitySpace {
    types: usize,
    states: Vec<SliceSet>,
    index: HashMap<SliceSet, usize>,
}

impl FeasibilitySpace {
    pub fn enumerate(model: &ResourceModel) -> Self {
        let types = model.slice_types();
        let bounds: Vec<u32> = (0..types).map(|n| model.type_bound(n)).collect();
        let mut states = Vec::new();
        let mut current = vec![0u32; types];
        let usage = vec![0.0; model.resource_count()];
        enumerate_rec(model, &bounds, 0, &mut current, &usage, &mut states);
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        FeasibilitySpace {
            types,
            states,
            index,
        }
    }

    pub fn states(&self) -> &[SliceSet] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn slice_types(&self) -> usize {
        self.types
    }

    pub fn index_of(&self, s: &SliceSet) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn contains(&self, s: &SliceSet) -> bool {
        self.index.contains_key(s)
    }

    /// One `ordinal [s1,...,sN]` line per state.
    pub fn to_text(&self) -> String {
        let mut out = format!("# feasibility space: {} states\n", self.len());
        for (i, s) in self.states.iter().enumerate() {
            let _ = writeln!(out, "{i} {s}");
        }
        out
    }
}

// Depth-first over slice types; type 0 is the outermost loop so states come
// out in lexicographic order.
fn enumerate_rec(
    model: &ResourceModel,
    bounds: &[u32],
    ty: usize,
    current: &mut Vec<u32>,
    usage: &[f64],
    out: &mut Vec<SliceSet>,
) {
    if ty == bounds.len() {
        out.push(SliceSet::new(current.clone()));
        return;
    }
    for k in 0..=bounds[ty] {
        let next: Vec<f64> = model
            .costs()
            .iter()
            .zip(usage)
            .map(|(row, used)| used + row[ty] * f64::from(k))
            .collect();
        let fits = next
            .iter()
            .zip(model.resources())
            .all(|(a, r)| *a <= r + crate::FEASIBILITY_TOLERANCE);
        if !fits {
            break;
        }
        current[ty] = k;
        enumerate_rec(model, bounds, ty + 1, current, &next, out);
    }
    current[ty] = 0;
}

#[derive(Debug, Clone, PartialEq)]
enum Lookup {
    /// Mixed-radix key of the count vector times `N` plus the type.
    Dense {
        strides: Vec<u64>,
        bounds: Vec<u32>,
        table: Vec<u32>,
    },
    Sparse(HashMap<(SliceSet, usize), u32>),
}

const NO_ENTRY: u32 = u32::MAX;

/// The `(state, type)` pairs where accepting keeps the state feasible.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionSpace {
    types: usize,
    entries: Vec<(SliceSet, usize)>,
    lookup: Lookup,
    fingerprint: u64,
}

impl DecisionSpace {
    pub fn enumerate(space: &FeasibilitySpace) -> Self {
        let types = space.slice_types();
        let mut entries = Vec::new();
        for s in space.states() {
            for ty in 0..types {
                if space.contains(&s.incremented(ty)) {
                    entries.push((s.clone(), ty));
                }
            }
        }
        let lookup = build_lookup(space, &entries);
        let fingerprint = fingerprint(types, &entries);
        DecisionSpace {
            types,
            entries,
            lookup,
            fingerprint,
        }
    }

    /// Convenience: `S` and `D` straight from a model.
    pub fn from_model(model: &ResourceModel) -> (FeasibilitySpace, DecisionSpace) {
        let space = FeasibilitySpace::enumerate(model);
        let dspace = DecisionSpace::enumerate(&space);
        (space, dspace)
    }

    pub fn entries(&self) -> &[(SliceSet, usize)] {
        &self.entries
    }

    /// `|D|`, the codeword length.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn slice_types(&self) -> usize {
        self.types
    }

    /// Hash of the entry list; strategy codes carry it to detect stale codebooks.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Bit position of `(s, ty)`, or `None` when the pair is not a free decision.
    pub fn bit_index(&self, s: &SliceSet, ty: usize) -> Option<usize> {
        if ty >= self.types || s.len() != self.types {
            return None;
        }
        self.index_counts(s.counts(), ty)
    }

    #[inline]
    pub(crate) fn index_counts(&self, counts: &[u32], ty: usize) -> Option<usize> {
        match &self.lookup {
            Lookup::Dense {
                strides,
                bounds,
                table,
            } => {
                let mut key = 0u64;
                for ((&k, &b), &stride) in counts.iter().zip(bounds).zip(strides) {
                    if k > b {
                        return None;
                    }
                    key += u64::from(k) * stride;
                }
                let slot = table[(key as usize) * self.types + ty];
                (slot != NO_ENTRY).then_some(slot as usize)
            }
            Lookup::Sparse(map) => map
                .get(&(SliceSet::new(counts.to_vec()), ty))
                .map(|&i| i as usize),
        }
    }

    /// One `bit [s1,...,sN,n]` line per entry; `n` is printed one-based.
    pub fn to_text(&self) -> String {
        let mut out = format!("# free-decision space: {} entries\n", self.len());
        for (k, (s, ty)) in self.entries.iter().enumerate() {
            let mut cells: Vec<String> = s.counts().iter().map(u32::to_string).collect();
            cells.push((ty + 1).to_string());
            let _ = writeln!(out, "{k} [{}]", cells.join(","));
        }
        out
    }
}

fn build_lookup(space: &FeasibilitySpace, entries: &[(SliceSet, usize)]) -> Lookup {
    let types = space.slice_types();
    let mut bounds = vec![0u32; types];
    for s in space.states() {
        for (b, &k) in bounds.iter_mut().zip(s.counts()) {
            *b = (*b).max(k);
        }
    }
    let mut strides = vec![0u64; types];
    let mut size: Option<u64> = Some(1);
    for ty in (0..types).rev() {
        strides[ty] = size.unwrap_or(0);
        size = size.and_then(|s| s.checked_mul(u64::from(bounds[ty]) + 1));
    }
    let cells = size.and_then(|s| s.checked_mul(types as u64));
    match cells {
        Some(cells) if cells <= DENSE_LOOKUP_LIMIT => {
            let mut table = vec![NO_ENTRY; cells as usize];
            for (k, (s, ty)) in entries.iter().enumerate() {
                let key: u64 = s
                    .counts()
                    .iter()
                    .zip(&strides)
                    .map(|(&c, &st)| u64::from(c) * st)
                    .sum();
                table[key as usize * types + ty] = k as u32;
            }
            Lookup::Dense {
                strides,
                bounds,
                table,
            }
        }
        _ => Lookup::Sparse(
            entries
                .iter()
                .enumerate()
                .map(|(k, e)| (e.clone(), k as u32))
                .collect(),
        ),
    }
}

// FNV-1a; stable across platforms and toolchains.
fn fingerprint(types: usize, entries: &[(SliceSet, usize)]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    let mut eat = |v: u64| {
        for b in v.to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(PRIME);
        }
    };
    eat(types as u64);
    eat(entries.len() as u64);
    for (s, ty) in entries {
        for &k in s.counts() {
            eat(u64::from(k));
        }
        eat(*ty as u64);
    }
    h
}

/// Checks that a state is a member of `S` for the given model.
pub(crate) fn ensure_feasible(model: &ResourceModel, s: &SliceSet) -> Result<()> {
    if model.is_feasible(s)? {
        Ok(())
    } else {
        Err(Error::InfeasibleState(s.counts().to_vec()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(pool: f64, cost: f64) -> ResourceModel {
        ResourceModel::single_resource(pool, vec![cost, cost], vec![2.0, 1.0]).unwrap()
    }

    fn states(v: &[[u32; 2]]) -> Vec<SliceSet> {
        v.iter().map(|s| SliceSet::new(s.to_vec())).collect()
    }

    #[test]
    fn unit_pool_states_in_order() {
        let space = FeasibilitySpace::enumerate(&single(1.0, 0.3));
        assert_eq!(
            space.states(),
            states(&[
                [0, 0],
                [0, 1],
                [0, 2],
                [0, 3],
                [1, 0],
                [1, 1],
                [1, 2],
                [2, 0],
                [2, 1],
                [3, 0]
            ])
            .as_slice()
        );
        assert_eq!(space.index_of(&SliceSet::empty(2)), Some(0));
    }

    #[test]
    fn unit_pool_decision_entries() {
        let (_, d) = DecisionSpace::from_model(&single(1.0, 0.3));
        let expected: Vec<[u32; 3]> = vec![
            [0, 0, 1],
            [0, 0, 2],
            [0, 1, 1],
            [0, 1, 2],
            [0, 2, 1],
            [0, 2, 2],
            [1, 0, 1],
            [1, 0, 2],
            [1, 1, 1],
            [1, 1, 2],
            [2, 0, 1],
            [2, 0, 2],
        ];
        let got: Vec<[u32; 3]> = d
            .entries()
            .iter()
            .map(|(s, ty)| [s.counts()[0], s.counts()[1], *ty as u32 + 1])
            .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn empty_pool_has_only_origin() {
        let (space, d) = DecisionSpace::from_model(&single(0.0, 0.3));
        assert_eq!(space.states(), &[SliceSet::empty(2)]);
        assert!(d.is_empty());
    }

    #[test]
    fn half_cost_has_six_states() {
        // brute force: every (a, b) in a generous box with 0.5(a + b) <= 1
        let brute = (0..10u32)
            .flat_map(|a| (0..10u32).map(move |b| (a, b)))
            .filter(|(a, b)| 0.5 * f64::from(a + b) <= 1.0)
            .count();
        assert_eq!(brute, 6);
        assert_eq!(FeasibilitySpace::enumerate(&single(1.0, 0.5)).len(), brute);
    }

    #[test]
    fn fine_grained_sizes() {
        let (space, d) = DecisionSpace::from_model(&single(1.0, 0.03));
        assert_eq!(space.len(), 595);
        assert_eq!(d.len(), 1122);
    }

    #[test]
    fn lookup_matches_entry_positions() {
        let (_, d) = DecisionSpace::from_model(&single(1.0, 0.3));
        for (k, (s, ty)) in d.entries().iter().enumerate() {
            assert_eq!(d.bit_index(s, *ty), Some(k));
        }
        assert_eq!(d.bit_index(&SliceSet::new(vec![3, 0]), 0), None);
        assert_eq!(d.bit_index(&SliceSet::new(vec![9, 9]), 0), None);
        assert_eq!(d.bit_index(&SliceSet::new(vec![0, 0]), 2), None);
    }

    #[test]
    fn text_listing() {
        let (space, d) = DecisionSpace::from_model(&single(1.0, 0.3));
        let s = space.to_text();
        assert!(s.starts_with("# feasibility space: 10 states\n0 [0,0]\n"));
        assert!(d.to_text().ends_with("11 [2,0,2]\n"));
    }

    #[test]
    fn two_resource_model() {
        let m = ResourceModel::new(
            vec![1.0, 1.0],
            vec![vec![0.5, 0.0], vec![0.0, 0.5]],
            vec![1.0, 1.0],
        )
        .unwrap();
        let (space, d) = DecisionSpace::from_model(&m);
        assert_eq!(space.len(), 9);
        // each type can grow from counts 0 and 1 regardless of the other
        assert_eq!(d.len(), 12);
    }

    #[test]
    fn sparse_lookup_agrees_with_dense() {
        // 24 types with bound 1 each pushes the mixed radix table past the dense limit
        let types = 24;
        let m = ResourceModel::single_resource(1.0, vec![1.0; types], vec![1.0; types]).unwrap();
        let (space, d) = DecisionSpace::from_model(&m);
        assert_eq!(space.len(), types + 1);
        assert!(matches!(d.lookup, Lookup::Sparse(_)));
        assert_eq!(d.len(), types);
        for (k, (s, ty)) in d.entries().iter().enumerate() {
            assert_eq!(d.bit_index(s, *ty), Some(k));
        }
    }
}
