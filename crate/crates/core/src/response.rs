//! Per-scale response, multi-scale product and ring-based non-maxima
//! suppression.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::measures::MeasureField;
use crate::mesh::RingNeighborhoods;

/// A measure whose spread over the level is below this fraction of its
/// magnitude is treated as constant. Symmetric meshes produce values equal
/// up to rounding, and stretching that rounding noise to `[0, 1]` would
/// invent structure.
pub const DEGENERATE_RANGE_RATIO: f64 = 1e-9;

/// Which measure terms enter the per-scale response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResponseTerms {
    #[default]
    Both,
    Distance,
    Angle,
}

impl std::str::FromStr for ResponseTerms {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "both" => Ok(Self::Both),
            "distance" => Ok(Self::Distance),
            "angle" => Ok(Self::Angle),
            other => Err(format!("unknown response terms '{other}' (both|distance|angle)")),
        }
    }
}

impl std::fmt::Display for ResponseTerms {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Both => "both",
            Self::Distance => "distance",
            Self::Angle => "angle",
        })
    }
}

/// Min-max normalization over the evaluable entries. Non-evaluable entries
/// map to 0, and so does everything when the range is degenerate.
pub fn min_max_normalize(values: &[Option<f64>]) -> Vec<f64> {
    let (lo, hi) = values
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    let range = hi - lo;
    if !(range > DEGENERATE_RANGE_RATIO * lo.abs().max(hi.abs())) {
        return vec![0.0; values.len()];
    }
    values
        .iter()
        .map(|x| x.map_or(0.0, |x| (x - lo) / range))
        .collect()
}

/// `norm(dbar) + alpha * norm(thetabar)` per vertex.
pub fn per_scale_response(
    dbar: &[Option<f64>],
    thetabar: &[Option<f64>],
    alpha: f64,
) -> Vec<f64> {
    assert_eq!(dbar.len(), thetabar.len(), "measure fields must align");
    let d = min_max_normalize(dbar);
    let t = min_max_normalize(thetabar);
    dbar.iter()
        .zip(thetabar)
        .zip(d.iter().zip(&t))
        .map(|((dv, tv), (dn, tn))| {
            if dv.is_some() && tv.is_some() {
                dn + alpha * tn
            } else {
                0.0
            }
        })
        .collect()
}

/// Per-scale response honoring a term selection: `Distance` drops the angle
/// term, `Angle` drops the distance term (weighted by `alpha`).
pub fn per_scale_response_with(field: &MeasureField, alpha: f64, terms: ResponseTerms) -> Vec<f64> {
    // a constant field keeps evaluability but normalizes to zero
    let silenced = || -> Vec<Option<f64>> {
        field
            .dbar
            .iter()
            .zip(&field.thetabar)
            .map(|(d, t)| d.and(*t).map(|_| 0.0))
            .collect()
    };
    match terms {
        ResponseTerms::Both => per_scale_response(&field.dbar, &field.thetabar, alpha),
        ResponseTerms::Distance => per_scale_response(&field.dbar, &silenced(), alpha),
        ResponseTerms::Angle => per_scale_response(&silenced(), &field.thetabar, alpha),
    }
}

/// Elementwise product over scales.
pub fn final_response(per_scale: &[Vec<f64>]) -> Vec<f64> {
    let (first, rest) = per_scale.split_first().expect("at least one scale");
    let mut out = first.clone();
    for level in rest {
        assert_eq!(level.len(), out.len(), "per-scale fields must align");
        for (o, x) in out.iter_mut().zip(level) {
            *o *= x;
        }
    }
    out
}

/// Candidate interest points, sorted by descending response (ties by
/// ascending vertex index).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CandidateSet {
    pub candidates: Vec<Candidate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub vertex: usize,
    pub rho: f64,
}

impl CandidateSet {
    pub fn from_unsorted(mut candidates: Vec<Candidate>) -> Self {
        candidates.sort_by(|a, b| b.rho.total_cmp(&a.rho).then(a.vertex.cmp(&b.vertex)));
        Self { candidates }
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn vertices(&self) -> Vec<usize> {
        self.candidates.iter().map(|c| c.vertex).collect()
    }
}

/// Keeps vertices whose response is positive and strictly greater than
/// every response within `nms_rings` graph steps.
pub fn non_maxima_suppression(
    rings: &RingNeighborhoods,
    rho: &[f64],
    nms_rings: usize,
) -> CandidateSet {
    assert!(nms_rings >= 1 && nms_rings <= rings.depth());
    assert_eq!(rho.len(), rings.vertex_count());
    let found = (0..rho.len())
        .into_par_iter()
        .filter(|&v| rho[v] > 0.0 && rings.within(v, nms_rings).all(|u| rho[v] > rho[u]))
        .map(|v| Candidate {
            vertex: v,
            rho: rho[v],
        })
        .collect();
    CandidateSet::from_unsorted(found)
}

/// Response fields of one detection run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseField {
    pub alpha: f64,
    pub multipliers: Vec<u32>,
    pub per_scale: Vec<Vec<f64>>,
    pub final_rho: Vec<f64>,
}
