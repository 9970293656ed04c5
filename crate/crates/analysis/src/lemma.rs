//! Consistency of estimates with the composition rules for progress
//! statements: concatenation, union, and persistence.

use serde::Serialize;

use crate::{AnalysisError, EstimateReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase", tag = "rule")]
pub enum Composition {
    /// `reports = [S→S₁, S₁→S₂, …, S→Sₙ]`: the direct estimate must be at
    /// least the product of the chain.
    Concatenation,
    /// `reports = [S₁→S', …, Sₙ→S', (S₁∪…∪Sₙ)→S']`: the combined estimate
    /// must be at least the smallest component.
    Union,
    /// `reports = [short, long]` for the same statement at two horizons:
    /// if the short-horizon estimate is positive and `unless` held on every
    /// sampled trace, the long-horizon estimate must reach `target`.
    Persistence { target: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LemmaCheck {
    pub composition: Composition,
    pub holds: bool,
    /// The estimate being bounded.
    pub lhs: f64,
    /// The bound it is compared with (before slack).
    pub rhs: f64,
    /// Sum of the confidence half-widths involved.
    pub slack: f64,
    /// False when a persistence premise fails (the check is then vacuous).
    pub premise: bool,
}

pub fn lemma_consistency(reports: &[EstimateReport], composition: Composition) -> Result<LemmaCheck, AnalysisError> {
    let slack: f64 = reports.iter().map(EstimateReport::half_width).sum();
    let need = |n: usize, exact: bool| {
        let ok = if exact { reports.len() == n } else { reports.len() >= n };
        if ok {
            Ok(())
        } else {
            Err(AnalysisError::Domain(format!(
                "{composition:?} needs {}{n} reports, got {}",
                if exact { "" } else { "at least " },
                reports.len()
            )))
        }
    };
    let (lhs, rhs, premise) = match composition {
        Composition::Concatenation => {
            need(3, false)?;
            let (direct, chain) = reports.split_last().expect("non-empty");
            let product: f64 = chain.iter().map(|r| r.point_estimate).product();
            (direct.point_estimate, product, true)
        }
        Composition::Union => {
            need(3, false)?;
            let (combined, parts) = reports.split_last().expect("non-empty");
            let min = parts.iter().map(|r| r.point_estimate).fold(f64::INFINITY, f64::min);
            (combined.point_estimate, min, true)
        }
        Composition::Persistence { target } => {
            need(2, true)?;
            let (short, long) = (&reports[0], &reports[1]);
            let premise = short.point_estimate > 0.0 && reports.iter().all(|r| r.unless_violations == 0);
            (long.point_estimate, target, premise)
        }
    };
    Ok(LemmaCheck {
        composition,
        holds: !premise || lhs >= rhs - slack,
        lhs,
        rhs,
        slack,
        premise,
    })
}
