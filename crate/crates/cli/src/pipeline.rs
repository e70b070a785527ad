//! Orchestration: field → principal matrix → resonances → envelope.

use thiserror::Error;

use cubic_splitting::field::{CubicField, FieldError};
use cubic_splitting::koch::{principal_koch, KochData, KochError, SearchOptions};
use cubic_splitting::resonances::{
    classify, oscillation_constants, ClassifiedResonances, OscillationConstants, ResonanceError,
};
use cubic_splitting::splitting::{HarmonicParams, SplittingError};

use crate::config::{AnalysisConfig, ConfigError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Koch(#[from] KochError),
    #[error(transparent)]
    Resonance(#[from] ResonanceError),
    #[error(transparent)]
    Splitting(#[from] SplittingError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl PipelineError {
    /// 2 = input error, 3 = internal fault (criterion failures are 1).
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) | PipelineError::Field(_) => 2,
            PipelineError::Koch(KochError::SearchBudgetExceeded { .. }) => 2,
            PipelineError::Splitting(SplittingError::NonPositiveEps)
            | PipelineError::Splitting(SplittingError::NonPositiveInputs)
            | PipelineError::Splitting(SplittingError::InsufficientPrimitiveCut { .. }) => 2,
            _ => 3,
        }
    }
}

/// All computed stages for one configuration.
#[derive(Debug)]
pub struct Analysis {
    pub config: AnalysisConfig,
    pub field: CubicField,
    pub koch: KochData,
    pub osc: OscillationConstants,
    pub classified: ClassifiedResonances,
    pub params: HarmonicParams,
}

/// Runs the stages in order, failing fast with the first module's error.
pub fn run_stages(config: &AnalysisConfig) -> Result<Analysis, PipelineError> {
    let field = config.build_field()?;
    let koch = principal_koch(&field, &SearchOptions::default())?;
    let osc = oscillation_constants(&koch)?;
    let classified = classify(&koch, &osc, config.gamma_cut)?;
    let delta_override = config.delta_zero.then_some(0.0);
    let params = HarmonicParams::build(&koch, &osc, &classified, config.rho, delta_override)?;
    Ok(Analysis {
        config: config.clone(),
        field: koch.field.clone(),
        koch,
        osc,
        classified,
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_pipeline_runs() {
        let a = run_stages(&AnalysisConfig::default()).unwrap();
        assert!(a.params.strong_sep);
        assert_eq!(a.classified.constants.q_hat.len(), 2);
    }

    #[test]
    fn invalid_field_maps_to_input_error() {
        // totally real: x³ = −1 + 3x
        let cfg = AnalysisConfig {
            r: [
                cubic_splitting::rat::ratio_int(-1),
                cubic_splitting::rat::ratio_int(3),
                cubic_splitting::rat::ratio_int(0),
            ],
            ..AnalysisConfig::default()
        };
        let err = run_stages(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
