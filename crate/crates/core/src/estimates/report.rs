use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Outcome of one inequality check over a corpus at several resolutions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub inequality_id: String,
    pub exponent_params: BTreeMap<String, f64>,
    /// Largest observed `LHS / RHS` over the corpus and all resolutions.
    pub measured_constant: f64,
    pub corpus_size: usize,
    pub resolutions: Vec<usize>,
    pub constants_by_resolution: Vec<f64>,
    /// `max / min` of the per-resolution constants.
    pub stability_ratio: f64,
    pub seeds: Vec<u64>,
}

impl EstimateReport {
    pub(crate) fn from_constants(
        id: &str,
        params: &[(&str, f64)],
        corpus_size: usize,
        resolutions: Vec<usize>,
        constants: Vec<f64>,
        seeds: Vec<u64>,
    ) -> Self {
        let max = constants.iter().copied().fold(0.0, f64::max);
        let min = constants.iter().copied().fold(f64::INFINITY, f64::min);
        let stability_ratio = if max == 0.0 { 1.0 } else { max / min };
        Self {
            inequality_id: id.to_string(),
            exponent_params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            measured_constant: max,
            corpus_size,
            resolutions,
            constants_by_resolution: constants,
            stability_ratio,
            seeds,
        }
    }

    /// Finite constant and resolution ratio below `limit`.
    pub fn is_stable(&self, limit: f64) -> bool {
        self.measured_constant.is_finite() && self.stability_ratio < limit
    }

    fn params_field(&self) -> String {
        self.exponent_params
            .iter()
            .map(|(k, v)| format!("{k}={v:?}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// CSV with header `inequality_id,params,constant,stability_ratio`.
pub fn aggregate_csv(reports: &[EstimateReport]) -> String {
    let mut s = String::from("inequality_id,params,constant,stability_ratio\n");
    for r in reports {
        s.push_str(&format!(
            "{},{},{:?},{:?}\n",
            r.inequality_id,
            r.params_field(),
            r.measured_constant,
            r.stability_ratio
        ));
    }
    s
}

/// `lhs / rhs` with `0 / 0 = 0`.
pub(crate) fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else if rhs == 0.0 {
        f64::INFINITY
    } else {
        lhs / rhs
    }
}
