//! Conditioning on photon-count outcomes.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::FockStateVector;
use crate::scalar::Real;

/// A set of modes whose photon counts must add up to `total`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupConstraint {
    pub modes: Vec<usize>,
    pub total: u32,
}

/// Post-selection rule: exact counts on single modes plus group totals.
/// Modes absent from both are unconstrained.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DetectionPattern {
    pub per_mode: BTreeMap<usize, u8>,
    pub groups: Vec<GroupConstraint>,
}

impl DetectionPattern {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn exact(mut self, mode: usize, count: u8) -> Self {
        self.per_mode.insert(mode, count);
        self
    }

    pub fn group(mut self, modes: impl Into<Vec<usize>>, total: u32) -> Self {
        self.groups.push(GroupConstraint { modes: modes.into(), total });
        self
    }

    pub fn is_empty(&self) -> bool {
        self.per_mode.is_empty() && self.groups.is_empty()
    }

    /// Every mode in range and constrained at most once.
    pub fn validate(&self, n_modes: usize) -> Result<()> {
        let mut seen = BTreeSet::new();
        let all = self.per_mode.keys().copied().chain(self.groups.iter().flat_map(|g| g.modes.iter().copied()));
        for m in all {
            if m >= n_modes {
                return Err(Error::ModeOutOfRange { mode: m, n_modes });
            }
            if !seen.insert(m) {
                return Err(Error::DuplicateMode(m));
            }
        }
        Ok(())
    }

    /// Union of two patterns on disjoint modes.
    pub fn merged(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.per_mode.extend(other.per_mode.iter().map(|(&k, &v)| (k, v)));
        out.groups.extend(other.groups.iter().cloned());
        out
    }

    fn accepts(&self, counts: &[u8]) -> bool {
        self.per_mode.iter().all(|(&m, &k)| counts[m] == k)
            && self
                .groups
                .iter()
                .all(|g| g.modes.iter().map(|&m| u32::from(counts[m])).sum::<u32>() == g.total)
    }
}

/// Result of conditioning: the surviving (unnormalized) branch and its weight.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalOutcome<T: Real> {
    pub success_probability: T,
    /// Modes of the original state that survive in `reduced_state`, in order.
    pub kept_modes: Vec<usize>,
    pub reduced_state: FockStateVector<T>,
    /// `None` when the outcome has probability zero.
    pub normalized_state: Option<FockStateVector<T>>,
}

/// Project onto the kets satisfying `pattern`. Exactly-constrained modes are
/// removed from the reduced state; group-constrained modes stay.
pub fn condition<T: Real>(state: &FockStateVector<T>, pattern: &DetectionPattern) -> Result<ConditionalOutcome<T>> {
    pattern.validate(state.n_modes())?;
    let kept_modes: Vec<usize> = (0..state.n_modes()).filter(|m| !pattern.per_mode.contains_key(m)).collect();
    let measured: u32 = pattern.per_mode.values().map(|&k| u32::from(k)).sum();
    let reduced_total = state.total_photons().checked_sub(measured);

    let mut reduced = FockStateVector::zero(kept_modes.len(), reduced_total.unwrap_or(0));
    if reduced_total.is_some() {
        for (occ, &amp) in state.iter() {
            if pattern.accepts(occ.counts()) {
                reduced.accumulate(occ.select(&kept_modes), amp);
            }
        }
    }
    let success_probability = reduced.norm_sqr();
    let normalized_state = reduced.normalized();
    Ok(ConditionalOutcome { success_probability, kept_modes, reduced_state: reduced, normalized_state })
}

/// Probability of exactly one photon in each of four distinct modes, all other
/// modes unconstrained.
pub fn coincidence_probability<T: Real>(state: &FockStateVector<T>, modes: [usize; 4]) -> Result<T> {
    for (i, &m) in modes.iter().enumerate() {
        if m >= state.n_modes() {
            return Err(Error::ModeOutOfRange { mode: m, n_modes: state.n_modes() });
        }
        if modes[..i].contains(&m) {
            return Err(Error::DuplicateMode(m));
        }
    }
    Ok(state
        .iter()
        .filter(|(occ, _)| modes.iter().all(|&m| occ.get(m) == 1))
        .fold(T::zero(), |acc, (_, a)| acc + a.norm_sqr()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{make_state, OccupationVector};
    use num_complex::Complex;

    #[test]
    fn vacuum_on_second_mode() {
        let h = 0.5f64.sqrt();
        let s = make_state(2, [
            (OccupationVector::from([1, 0]), Complex::new(h, 0.0)),
            (OccupationVector::from([0, 1]), Complex::new(h, 0.0)),
        ])
        .unwrap();
        let out = condition(&s, &DetectionPattern::new().exact(1, 0)).unwrap();
        assert!((out.success_probability - 0.5).abs() < 1e-15);
        assert_eq!(out.kept_modes, vec![0]);
        assert_eq!(out.reduced_state.n_modes(), 1);
        assert!((out.reduced_state.amplitude(&[1].into()).re - h).abs() < 1e-15);
        let n = out.normalized_state.unwrap();
        assert!((n.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_probability_is_a_value() {
        let s = FockStateVector::<f64>::basis([1, 0].into());
        let out = condition(&s, &DetectionPattern::new().exact(1, 1)).unwrap();
        assert_eq!(out.success_probability, 0.0);
        assert!(out.reduced_state.is_empty());
        assert!(out.normalized_state.is_none());

        // demanding more photons than exist
        let out = condition(&s, &DetectionPattern::new().exact(1, 3)).unwrap();
        assert_eq!(out.success_probability, 0.0);
    }

    #[test]
    fn group_constraints_keep_modes() {
        let s = make_state::<f64>(3, [
            (OccupationVector::from([1, 1, 0]), Complex::new(0.6, 0.0)),
            (OccupationVector::from([2, 0, 0]), Complex::new(0.8, 0.0)),
        ])
        .unwrap();
        let out = condition(&s, &DetectionPattern::new().group(vec![0, 1], 2).exact(2, 0)).unwrap();
        assert!((out.success_probability - 1.0).abs() < 1e-15);
        assert_eq!(out.kept_modes, vec![0, 1]);
        let out = condition(&s, &DetectionPattern::new().group(vec![1, 2], 1)).unwrap();
        assert!((out.success_probability - 0.36).abs() < 1e-15);
    }

    #[test]
    fn pattern_validation() {
        let s = FockStateVector::<f64>::basis([1, 0].into());
        assert!(matches!(condition(&s, &DetectionPattern::new().exact(2, 0)), Err(Error::ModeOutOfRange { .. })));
        let dup = DetectionPattern::new().exact(0, 0).group(vec![0, 1], 1);
        assert!(matches!(condition(&s, &dup), Err(Error::DuplicateMode(0))));
    }

    #[test]
    fn coincidence_rejects_duplicates() {
        let s = FockStateVector::<f64>::basis([1, 1, 1, 1, 0].into());
        assert_eq!(coincidence_probability(&s, [0, 1, 2, 3]).unwrap(), 1.0);
        assert_eq!(coincidence_probability(&s, [0, 1, 2, 4]).unwrap(), 0.0);
        assert!(matches!(coincidence_probability(&s, [0, 1, 1, 3]), Err(Error::DuplicateMode(1))));
    }
}
