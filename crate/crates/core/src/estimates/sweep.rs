use rayon::prelude::*;

use super::corpus::{CorpusPair, CorpusSpec};
use super::report::EstimateReport;
use crate::error::{CsnsError, Result};
use crate::spectral::PeriodicGrid;

/// Max of `item_ratio` over the corpus at each resolution.
pub(crate) fn sweep<F>(
    id: &str,
    params: &[(&str, f64)],
    corpus: &CorpusSpec,
    resolutions: &[usize],
    item_ratio: F,
) -> Result<EstimateReport>
where
    F: Fn(&CorpusPair) -> Result<f64> + Sync,
{
    if resolutions.is_empty() {
        return Err(CsnsError::Precondition("no resolutions requested".into()));
    }
    let mut constants = Vec::with_capacity(resolutions.len());
    for &n in resolutions {
        let grid = PeriodicGrid::new(n, corpus.period)?;
        let items = corpus.build(&grid)?;
        let ratios = items
            .par_iter()
            .map(&item_ratio)
            .collect::<Result<Vec<f64>>>()?;
        constants.push(ratios.into_iter().fold(0.0, f64::max));
    }
    Ok(EstimateReport::from_constants(
        id,
        params,
        corpus.len(),
        resolutions.to_vec(),
        constants,
        corpus.seeds.clone(),
    ))
}
