//! Resource pool, slice costs and the active slice set.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack added to every resource bound when testing `C·s <= r`, so that
/// exact-boundary states such as three slices of cost 0.3 in a pool of 0.9
/// survive binary rounding.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;

/// Resource pool `r` (M entries), per-slice cost matrix `C` (M rows by N
/// columns) and per-period utility `u` of each slice type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct ResourceModel {
    resources: Vec<f64>,
    costs: Vec<Vec<f64>>,
    utilities: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    resources: Vec<f64>,
    costs: Vec<Vec<f64>>,
    utilities: Vec<f64>,
}

impl TryFrom<RawModel> for ResourceModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        ResourceModel::new(raw.resources, raw.costs, raw.utilities)
    }
}

impl From<ResourceModel> for RawModel {
    fn from(m: ResourceModel) -> Self {
        RawModel {
            resources: m.resources,
            costs: m.costs,
            utilities: m.utilities,
        }
    }
}

impl ResourceModel {
    /// Builds a validated model. `costs[m][n]` is the amount of resource `m`
    /// consumed by one slice of type `n`.
    pub fn new(resources: Vec<f64>, costs: Vec<Vec<f64>>, utilities: Vec<f64>) -> Result<Self> {
        if resources.is_empty() {
            return Err(Error::InvalidModel(
                "at least one resource is required".into(),
            ));
        }
        if costs.len() != resources.len() {
            return Err(Error::Dimension {
                what: "cost matrix rows vs. resources",
                expected: resources.len(),
                actual: costs.len(),
            });
        }
        let types = utilities.len();
        if types == 0 {
            return Err(Error::InvalidModel(
                "at least one slice type is required".into(),
            ));
        }
        for (m, row) in costs.iter().enumerate() {
            if row.len() != types {
                return Err(Error::Dimension {
                    what: "cost matrix columns vs. slice types",
                    expected: types,
                    actual: row.len(),
                });
            }
            if let Some(c) = row.iter().find(|c| !c.is_finite() || **c < 0.0) {
                return Err(Error::InvalidModel(format!(
                    "cost of resource {m} must be finite and non-negative, got {c}"
                )));
            }
        }
        if let Some(r) = resources.iter().find(|r| !r.is_finite() || **r < 0.0) {
            return Err(Error::InvalidModel(format!(
                "resource amounts must be finite and non-negative, got {r}"
            )));
        }
        if let Some(u) = utilities.iter().find(|u| !u.is_finite() || **u < 0.0) {
            return Err(Error::InvalidModel(format!(
                "utilities must be finite and non-negative, got {u}"
            )));
        }
        for ty in 0..types {
            if costs.iter().all(|row| row[ty] <= 0.0) {
                return Err(Error::UnboundedSliceType { ty });
            }
        }
        Ok(ResourceModel {
            resources,
            costs,
            utilities,
        })
    }

    /// Single-resource model where every slice type costs `cost[n]` of a pool `pool`.
    pub fn single_resource(pool: f64, cost: Vec<f64>, utilities: Vec<f64>) -> Result<Self> {
        ResourceModel::new(vec![pool], vec![cost], utilities)
    }

    pub fn resources(&self) -> &[f64] {
        &self.resources
    }

    pub fn costs(&self) -> &[Vec<f64>] {
        &self.costs
    }

    pub fn utilities(&self) -> &[f64] {
        &self.utilities
    }

    pub fn resource_count(&self) -> usize {
        self.resources.len()
    }

    pub fn slice_types(&self) -> usize {
        self.utilities.len()
    }

    /// Resource vector `a = C·s` assigned to the slice set.
    pub fn resource_assignment(&self, s: &SliceSet) -> Result<Vec<f64>> {
        self.check_dims(s)?;
        Ok(self
            .costs
            .iter()
            .map(|row| {
                row.iter()
                    .zip(s.counts())
                    .map(|(c, &k)| c * f64::from(k))
                    .sum()
            })
            .collect())
    }

    /// Membership test for the feasibility space.
    pub fn is_feasible(&self, s: &SliceSet) -> Result<bool> {
        Ok(self
            .resource_assignment(s)?
            .iter()
            .zip(&self.resources)
            .all(|(a, r)| *a <= r + FEASIBILITY_TOLERANCE))
    }

    /// Overall per-period utility `sum_n s_n * u_n`.
    pub fn utility(&self, s: &SliceSet) -> Result<f64> {
        self.check_dims(s)?;
        Ok(self.utility_of_counts(s.counts()))
    }

    pub(crate) fn utility_of_counts(&self, counts: &[u32]) -> f64 {
        counts
            .iter()
            .zip(&self.utilities)
            .map(|(&k, u)| f64::from(k) * u)
            .sum()
    }

    /// Largest count of type `ty` that fits the pool on its own.
    pub(crate) fn type_bound(&self, ty: usize) -> u32 {
        self.costs
            .iter()
            .zip(&self.resources)
            .filter(|(row, _)| row[ty] > 0.0)
            .map(|(row, r)| ((r + FEASIBILITY_TOLERANCE) / row[ty]).floor())
            .fold(f64::INFINITY, f64::min)
            .min(f64::from(u32::MAX)) as u32
    }

    fn check_dims(&self, s: &SliceSet) -> Result<()> {
        if s.len() != self.slice_types() {
            return Err(Error::Dimension {
                what: "slice set vs. slice types",
                expected: self.slice_types(),
                actual: s.len(),
            });
        }
        Ok(())
    }

    /// Line-oriented text form:
    ///
    /// ```text
    /// resources 1
    /// cost 0.3 0.3
    /// utility 2 1
    /// ```
    ///
    /// with one `cost` line per resource.
    pub fn to_text(&self) -> String {
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(" ");
        let mut out = format!("resources {}\n", join(&self.resources));
        for row in &self.costs {
            out.push_str(&format!("cost {}\n", join(row)));
        }
        out.push_str(&format!("utility {}\n", join(&self.utilities)));
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut resources = None;
        let mut costs = Vec::new();
        let mut utilities = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut words = line.split_whitespace();
            let key = words.next().unwrap_or_default();
            let values = words
                .map(|w| {
                    w.parse::<f64>()
                        .map_err(|e| Error::Parse(format!("line {}: {w:?}: {e}", lineno + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            match key {
                "resources" => resources = Some(values),
                "cost" => costs.push(values),
                "utility" => utilities = Some(values),
                other => {
                    return Err(Error::Parse(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        let resources = resources.ok_or_else(|| Error::Parse("missing `resources` line".into()))?;
        let utilities = utilities.ok_or_else(|| Error::Parse("missing `utility` line".into()))?;
        ResourceModel::new(resources, costs, utilities)
    }
}

/// Number of active slices of each type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SliceSet(Vec<u32>);

impl SliceSet {
    pub fn new(counts: Vec<u32>) -> Self {
        SliceSet(counts)
    }

    pub fn empty(types: usize) -> Self {
        SliceSet(vec![0; types])
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&k| u64::from(k)).sum()
    }

    /// Copy of the set with one more slice of type `ty`.
    pub fn incremented(&self, ty: usize) -> SliceSet {
        let mut next = self.0.clone();
        next[ty] += 1;
        SliceSet(next)
    }
}

impl From<Vec<u32>> for SliceSet {
    fn from(v: Vec<u32>) -> Self {
        SliceSet(v)
    }
}

impl fmt::Display for SliceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, "]")
    }
}

/// State transition on a decision: identity on decline, one more slice of
/// type `ty` (zero-based) on accept. Feasibility is not checked here.
pub fn apply_decision(s: &SliceSet, ty: usize, accept: bool) -> Result<SliceSet> {
    if ty >= s.len() {
        return Err(Error::SliceTypeOutOfRange { ty, types: s.len() });
    }
    Ok(if accept { s.incremented(ty) } else { s.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_pool() -> ResourceModel {
        ResourceModel::single_resource(1.0, vec![0.3, 0.3], vec![2.0, 1.0]).unwrap()
    }

    #[test]
    fn assignment_of_equal_costs() {
        let a = ResourceModel::single_resource(1.0, vec![0.3, 0.3], vec![1.0, 1.0])
            .unwrap()
            .resource_assignment(&SliceSet::new(vec![2, 1]))
            .unwrap();
        assert_eq!(a.len(), 1);
        assert!((a[0] - 0.9).abs() < 1e-12);
    }

    #[test]
    fn assignment_zero_state() {
        let m = ResourceModel::new(
            vec![1.0, 1.0],
            vec![vec![0.2, 0.1], vec![0.1, 0.3]],
            vec![1.0, 1.0],
        )
        .unwrap();
        assert_eq!(
            m.resource_assignment(&SliceSet::empty(2)).unwrap(),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn assignment_two_resources() {
        let m = ResourceModel::new(
            vec![1.0, 1.0],
            vec![vec![0.2, 0.1], vec![0.1, 0.3]],
            vec![1.0, 1.0],
        )
        .unwrap();
        let a = m.resource_assignment(&SliceSet::new(vec![1, 2])).unwrap();
        assert!((a[0] - 0.4).abs() < 1e-12);
        assert!((a[1] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn assignment_dimension_mismatch() {
        let err = unit_pool().resource_assignment(&SliceSet::new(vec![1, 2, 3]));
        assert!(matches!(err, Err(Error::Dimension { .. })));
    }

    #[test]
    fn zero_cost_type_is_rejected() {
        let err = ResourceModel::single_resource(1.0, vec![0.3, 0.0], vec![1.0, 1.0]);
        assert_eq!(err, Err(Error::UnboundedSliceType { ty: 1 }));
    }

    #[test]
    fn negative_and_nan_entries_rejected() {
        assert!(ResourceModel::single_resource(-1.0, vec![0.3], vec![1.0]).is_err());
        assert!(ResourceModel::single_resource(1.0, vec![f64::NAN], vec![1.0]).is_err());
        assert!(ResourceModel::single_resource(1.0, vec![0.3], vec![-2.0]).is_err());
    }

    #[test]
    fn boundary_state_is_feasible() {
        let m = unit_pool();
        assert!(m.is_feasible(&SliceSet::new(vec![0, 3])).unwrap());
        assert!(!m.is_feasible(&SliceSet::new(vec![1, 3])).unwrap());
    }

    #[test]
    fn apply_decision_cases() {
        let s = SliceSet::new(vec![1, 0]);
        assert_eq!(apply_decision(&s, 1, true).unwrap().counts(), &[1, 1]);
        assert_eq!(apply_decision(&s, 1, false).unwrap().counts(), &[1, 0]);
        assert_eq!(
            apply_decision(&SliceSet::empty(2), 0, true)
                .unwrap()
                .counts(),
            &[1, 0]
        );
        assert!(apply_decision(&s, 2, true).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let m = ResourceModel::new(
            vec![1.0, 2.5],
            vec![vec![0.2, 0.1], vec![0.1, 0.3]],
            vec![2.0, 1.0],
        )
        .unwrap();
        assert_eq!(ResourceModel::from_text(&m.to_text()).unwrap(), m);
        assert_eq!(
            unit_pool().to_text(),
            "resources 1\ncost 0.3 0.3\nutility 2 1\n"
        );
    }
}
