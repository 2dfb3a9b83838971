use serde::{Deserialize, Serialize};

use super::{FallbackPolicy, TrustError, TrustInferenceSystem, TRUST};
use crate::fuzzy::{CrispMode, FuzzyError, FuzzyRule, LinguisticVariable};
use crate::scalar::Scalar;

/// JSON form of a [`TrustInferenceSystem`], used to override membership
/// breakpoints and rules without recompiling.
///
/// `variables` lists the inputs and the output together; `output` names the
/// output (default `"trust"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct SystemDocument<T = f64> {
    pub variables: Vec<LinguisticVariable<T>>,
    pub rules: Vec<FuzzyRule<T>>,
    #[serde(default = "default_output")]
    pub output: String,
    #[serde(default)]
    pub crisp_mode: CrispMode,
    #[serde(default)]
    pub fallback: FallbackPolicy,
}

fn default_output() -> String {
    TRUST.to_string()
}

impl<T: Scalar> SystemDocument<T> {
    pub fn from_system(sys: &TrustInferenceSystem<T>) -> Self {
        let mut variables = sys.inputs().to_vec();
        variables.push(sys.output().clone());
        Self {
            variables,
            rules: sys.rules().to_vec(),
            output: sys.output().name().to_string(),
            crisp_mode: sys.crisp_mode(),
            fallback: sys.fallback(),
        }
    }

    pub fn into_system(self) -> Result<TrustInferenceSystem<T>, TrustError> {
        let mut variables = self.variables;
        let i = variables
            .iter()
            .position(|v| v.name() == self.output)
            .ok_or_else(|| FuzzyError::Config(format!("output variable {} not listed", self.output)))?;
        let output = variables.remove(i);
        TrustInferenceSystem::from_parts(variables, output, self.rules, self.crisp_mode, self.fallback)
    }
}
