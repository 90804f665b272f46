//! End-to-end detection pipeline: scale space, measures, response,
//! non-maxima suppression and sparse refinement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{compute_measures, MeasureField};
use crate::mesh::{k_rings, Mesh};
use crate::refine::{sparse_refine, InterestPointSet};
use crate::response::{
    final_response, non_maxima_suppression, per_scale_response_with, CandidateSet, ResponseField,
    ResponseTerms,
};
use crate::scale_space::{build_scale_stack, validate_multipliers};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Rings per vertex entering the measures.
    pub rings: usize,
    /// Weight of the angle term.
    pub alpha: f64,
    /// Rings searched by non-maxima suppression.
    pub nms_rings: usize,
    /// Sparsity penalty of the refinement.
    pub beta: f64,
    /// Smoothing scales as multiples of the base scale.
    pub scales: Vec<u32>,
    #[serde(default)]
    pub terms: ResponseTerms,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            rings: 6,
            alpha: 2.5,
            nms_rings: 10,
            beta: 0.03,
            scales: vec![1, 3, 5],
            terms: ResponseTerms::Both,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.rings == 0 {
            return bad("rings must be at least 1".into());
        }
        if self.nms_rings == 0 {
            return bad("nms rings must be at least 1".into());
        }
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return bad(format!("alpha must be finite and nonnegative, got {}", self.alpha));
        }
        if !(self.beta >= 0.0) || !self.beta.is_finite() {
            return bad(format!("beta must be finite and nonnegative, got {}", self.beta));
        }
        validate_multipliers(&self.scales)
    }
}

/// Everything computed by one detection run.
#[derive(Debug, Clone)]
pub struct Detection {
    pub base_scale: f64,
    pub measures: Vec<MeasureField>,
    pub response: ResponseField,
    pub candidates: CandidateSet,
    pub points: InterestPointSet,
}

pub fn detect(mesh: &Mesh, config: &DetectorConfig) -> Result<Detection> {
    config.validate()?;
    let stack = build_scale_stack(mesh, &config.scales)?;
    let rings = k_rings(mesh, config.rings.max(config.nms_rings))?;
    let measures = stack
        .levels()
        .iter()
        .map(|level| compute_measures(&level.mesh, &level.normals, &rings, config.rings))
        .collect::<Result<Vec<_>>>()?;
    let per_scale: Vec<Vec<f64>> = measures
        .iter()
        .map(|m| per_scale_response_with(m, config.alpha, config.terms))
        .collect();
    let final_rho = final_response(&per_scale);
    let candidates = non_maxima_suppression(&rings, &final_rho, config.nms_rings);
    let points = sparse_refine(&candidates, config.beta)?;
    Ok(Detection {
        base_scale: stack.base_scale(),
        measures,
        response: ResponseField {
            alpha: config.alpha,
            multipliers: stack.multipliers(),
            per_scale,
            final_rho,
        },
        candidates,
        points,
    })
}
