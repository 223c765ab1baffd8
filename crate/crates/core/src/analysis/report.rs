use serde::{Deserialize, Serialize};

/// One fitted asymptotic law with everything needed to re-derive the
/// verdict: the model name, the fitted parameters, and the per-snapshot
/// misfit history the verdict was computed from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub model: String,
    /// Named fitted values, in a fixed order chosen by the producing fit.
    pub parameters: Vec<(String, f64)>,
    /// (time, sup-norm misfit) per snapshot used, in time order.
    pub residual_history: Vec<(f64, f64)>,
    pub verdict: bool,
}

impl FitReport {
    pub fn parameter(&self, name: &str) -> Option<f64> {
        self.parameters
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, v)| v)
    }

    pub fn final_residual(&self) -> Option<f64> {
        self.residual_history.last().map(|&(_, r)| r)
    }
}
