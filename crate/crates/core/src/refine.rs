//! Sparse refinement of candidate points.
//!
//! The objective `beta * |x|_0 + |rho - rho (.) x|^2` over binary `x`
//! decouples per coordinate: keeping candidate `j` costs `beta`, dropping it
//! costs `rho_j^2`. The exact minimizer is therefore a hard threshold at
//! `sqrt(beta)`, with ties resolved toward fewer points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::response::{Candidate, CandidateSet};

/// Final interest points: the candidates kept by refinement, in candidate
/// order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct InterestPointSet {
    pub points: Vec<Candidate>,
}

impl InterestPointSet {
    pub fn vertices(&self) -> Vec<usize> {
        self.points.iter().map(|p| p.vertex).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "penalty must be nonnegative, got {beta}"
        )));
    }
    Ok(())
}

/// Objective value of selection `x` for responses `rho`.
pub fn objective(rho: &[f64], x: &[bool], beta: f64) -> f64 {
    rho.iter()
        .zip(x)
        .map(|(&r, &keep)| if keep { beta } else { r * r })
        .sum()
}

/// Exact minimizer: keeps the candidates with `rho^2 > beta`.
pub fn sparse_refine(candidates: &CandidateSet, beta: f64) -> Result<InterestPointSet> {
    check_beta(beta)?;
    Ok(InterestPointSet {
        points: candidates
            .candidates
            .iter()
            .filter(|c| c.rho * c.rho > beta)
            .copied()
            .collect(),
    })
}

/// Largest candidate count accepted by [`brute_force_refine`].
pub const BRUTE_FORCE_MAX: usize = 20;

/// Exhaustive minimizer over all `2^C` selections. Among equal objective
/// values the selection with fewer points wins. Intended as a test oracle.
pub fn brute_force_refine(candidates: &CandidateSet, beta: f64) -> Result<InterestPointSet> {
    check_beta(beta)?;
    let c = candidates.len();
    if c > BRUTE_FORCE_MAX {
        return Err(Error::TooManyCandidates {
            max: BRUTE_FORCE_MAX,
            got: c,
        });
    }
    let rho: Vec<f64> = candidates.candidates.iter().map(|c| c.rho).collect();
    let mut best_mask = 0u32;
    let mut best_value = f64::INFINITY;
    let mut x = vec![false; c];
    for mask in 0u32..(1u32 << c) {
        for (j, slot) in x.iter_mut().enumerate() {
            *slot = mask & (1 << j) != 0;
        }
        let value = objective(&rho, &x, beta);
        let better = value < best_value
            || (value == best_value && mask.count_ones() < best_mask.count_ones());
        if better {
            best_value = value;
            best_mask = mask;
        }
    }
    Ok(InterestPointSet {
        points: candidates
            .candidates
            .iter()
            .enumerate()
            .filter(|(j, _)| best_mask & (1 << j) != 0)
            .map(|(_, c)| *c)
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(rho: &[f64]) -> CandidateSet {
        CandidateSet {
            candidates: rho
                .iter()
                .enumerate()
                .map(|(vertex, &rho)| Candidate { vertex, rho })
                .collect(),
        }
    }

    #[test]
    fn threshold_example() {
        let c = set(&[0.5, 0.1, 0.2]);
        let kept = sparse_refine(&c, 0.03).unwrap().vertices();
        assert_eq!(kept, vec![0, 2]);
        assert_eq!(brute_force_refine(&c, 0.03).unwrap().vertices(), vec![0, 2]);
    }

    #[test]
    fn zero_penalty_keeps_positive_candidates() {
        let c = set(&[0.5, 0.1, 0.2]);
        assert_eq!(sparse_refine(&c, 0.0).unwrap().len(), 3);
    }

    #[test]
    fn dominant_penalty_empties() {
        let c = set(&[0.5, 0.1, 0.2]);
        assert!(sparse_refine(&c, 0.26).unwrap().is_empty());
    }

    #[test]
    fn tie_excludes() {
        let c = set(&[0.5]);
        assert!(sparse_refine(&c, 0.25).unwrap().is_empty());
        assert!(brute_force_refine(&c, 0.25).unwrap().is_empty());
    }

    #[test]
    fn empty_candidates() {
        let c = set(&[]);
        assert!(brute_force_refine(&c, 0.1).unwrap().is_empty());
        assert_eq!(objective(&[], &[], 0.1), 0.0);
    }

    #[test]
    fn oracle_size_limit() {
        let c = set(&[0.1; 21]);
        assert!(matches!(
            brute_force_refine(&c, 0.1),
            Err(Error::TooManyCandidates { got: 21, .. })
        ));
    }

    #[test]
    fn negative_beta_rejected() {
        assert!(sparse_refine(&set(&[1.0]), -0.1).is_err());
    }
}
