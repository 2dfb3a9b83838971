use super::{eval_rule, CrispMode, FuzzyError, FuzzyRule, LinguisticVariable, Result};
use crate::scalar::{clamp, Scalar};

/// Uniform sample count used for centroid integration.
pub const DEFAULT_GRID_SAMPLES: usize = 2001;

/// Per-term activation of the output variable after max aggregation.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedOutput<'a, T = f64> {
    variable: &'a LinguisticVariable<T>,
    activations: Vec<T>,
}

impl<'a, T: Scalar> AggregatedOutput<'a, T> {
    /// Activations given in the output variable's term order.
    pub fn from_values(variable: &'a LinguisticVariable<T>, activations: Vec<T>) -> Result<Self> {
        if activations.len() != variable.terms().len() {
            return Err(FuzzyError::Config(format!(
                "expected {} activations for {}, got {}",
                variable.terms().len(),
                variable.name(),
                activations.len()
            )));
        }
        check_unit(&activations)?;
        Ok(Self { variable, activations })
    }

    pub fn variable(&self) -> &'a LinguisticVariable<T> {
        self.variable
    }

    pub fn values(&self) -> &[T] {
        &self.activations
    }

    pub fn get(&self, term: &str) -> Option<T> {
        self.variable.term_index(term).map(|i| self.activations[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'a str, T)> + '_ {
        self.variable.terms().iter().map(|t| t.name.as_str()).zip(self.activations.iter().copied())
    }

    pub fn is_empty(&self) -> bool {
        self.activations.iter().all(|a| *a <= T::zero())
    }
}

fn check_unit<T: Scalar>(values: &[T]) -> Result<()> {
    match values.iter().find(|a| !(**a >= T::zero() && **a <= T::one())) {
        Some(a) => Err(FuzzyError::InvalidInput(format!("activation {a} outside [0, 1]"))),
        None => Ok(()),
    }
}

/// Max-aggregates `(consequent term, activation)` pairs. Terms with no firing
/// rule get 0.
pub fn aggregate<'a, 's, T: Scalar>(
    output: &'a LinguisticVariable<T>,
    activations: impl IntoIterator<Item = (&'s str, T)>,
) -> Result<AggregatedOutput<'a, T>> {
    let mut acc = vec![T::zero(); output.terms().len()];
    for (term, a) in activations {
        check_unit(&[a])?;
        let i = output
            .term_index(term)
            .ok_or_else(|| FuzzyError::Config(format!("{}: unknown output term {term}", output.name())))?;
        acc[i] = acc[i].max(a);
    }
    Ok(AggregatedOutput { variable: output, activations: acc })
}

/// Centroid of the union of min-clipped output sets on the default grid.
pub fn defuzzify_centroid<T: Scalar>(output: &LinguisticVariable<T>, agg: &AggregatedOutput<'_, T>) -> Result<T> {
    defuzzify_centroid_with(output, agg, DEFAULT_GRID_SAMPLES)
}

/// Trapezoidal centroid over `samples` uniform points of the output domain.
pub fn defuzzify_centroid_with<T: Scalar>(
    output: &LinguisticVariable<T>,
    agg: &AggregatedOutput<'_, T>,
    samples: usize,
) -> Result<T> {
    if samples < 2 {
        return Err(FuzzyError::Config("centroid grid needs at least 2 samples".into()));
    }
    if agg.activations.len() != output.terms().len() {
        return Err(FuzzyError::Config("aggregate does not match output variable".into()));
    }
    if agg.is_empty() {
        return Err(FuzzyError::NoRuleFired);
    }
    let half = T::from_f64(0.5).unwrap();
    let mut area = T::zero();
    let mut moment = T::zero();
    for (i, x) in output.grid(samples).enumerate() {
        let mu = output
            .terms()
            .iter()
            .zip(&agg.activations)
            .filter(|(_, a)| **a > T::zero())
            .map(|(t, a)| t.mf.degree_at(x).min(*a))
            .fold(T::zero(), T::max);
        let w = if i == 0 || i == samples - 1 { half } else { T::one() };
        area = area + w * mu;
        moment = moment + w * mu * x;
    }
    if area <= T::zero() {
        return Err(FuzzyError::NoRuleFired);
    }
    let (lo, hi) = output.domain();
    Ok(clamp(moment / area, lo, hi))
}

/// Term with the highest activation; ties go to the earliest term.
pub fn label_from_activations<'a, T: Scalar>(agg: &AggregatedOutput<'a, T>) -> &'a str {
    let mut best = 0;
    for (i, a) in agg.activations.iter().enumerate() {
        if *a > agg.activations[best] {
            best = i;
        }
    }
    &agg.variable.terms()[best].name
}

/// A complete Mamdani system: inputs, one output, rules.
#[derive(Debug, Clone, PartialEq)]
pub struct MamdaniSystem<T = f64> {
    inputs: Vec<LinguisticVariable<T>>,
    output: LinguisticVariable<T>,
    rules: Vec<FuzzyRule<T>>,
    crisp_mode: CrispMode,
    grid_samples: usize,
}

/// Everything computed by one pass of [`MamdaniSystem::infer`].
#[derive(Debug, Clone, PartialEq)]
pub struct MamdaniOutput<T = f64> {
    /// Firing strength per rule, in rule order.
    pub rule_activations: Vec<T>,
    /// Aggregated activation per output term, in term order.
    pub aggregated: Vec<T>,
    /// Centroid, or `None` when no rule fired.
    pub score: Option<T>,
    /// Index of the winning output term.
    pub label: usize,
}

impl<T: Scalar> MamdaniSystem<T> {
    pub fn new(
        inputs: Vec<LinguisticVariable<T>>,
        output: LinguisticVariable<T>,
        rules: Vec<FuzzyRule<T>>,
        crisp_mode: CrispMode,
    ) -> Result<Self> {
        for (i, v) in inputs.iter().enumerate() {
            if inputs[..i].iter().any(|o| o.name() == v.name()) || v.name() == output.name() {
                return Err(FuzzyError::Config(format!("duplicate variable {}", v.name())));
            }
        }
        if rules.is_empty() {
            return Err(FuzzyError::Config("rule base is empty".into()));
        }
        for rule in &rules {
            if rule.clauses.is_empty() {
                return Err(FuzzyError::Config(format!("rule {}: empty antecedent", rule.id)));
            }
            if output.term_index(&rule.consequent).is_none() {
                return Err(FuzzyError::Config(format!(
                    "rule {}: consequent {} is not a term of {}",
                    rule.id,
                    rule.consequent,
                    output.name()
                )));
            }
            for clause in &rule.clauses {
                let var = inputs.iter().find(|v| v.name() == clause.variable()).ok_or_else(|| {
                    FuzzyError::Config(format!("rule {}: unknown variable {}", rule.id, clause.variable()))
                })?;
                match clause {
                    super::Clause::Fuzzy { term, .. } if var.term_index(term).is_none() => {
                        return Err(FuzzyError::Config(format!("rule {}: {} has no term {term}", rule.id, var.name())));
                    }
                    super::Clause::CrispGt { threshold, .. } | super::Clause::CrispLt { threshold, .. }
                        if !threshold.is_finite() =>
                    {
                        return Err(FuzzyError::Config(format!("rule {}: non-finite threshold", rule.id)));
                    }
                    _ => {}
                }
            }
        }
        if rules.iter().enumerate().any(|(i, r)| rules[..i].iter().any(|o| o.id == r.id)) {
            return Err(FuzzyError::Config("duplicate rule id".into()));
        }
        Ok(Self { inputs, output, rules, crisp_mode, grid_samples: DEFAULT_GRID_SAMPLES })
    }

    pub fn with_grid_samples(mut self, samples: usize) -> Result<Self> {
        if samples < 2 {
            return Err(FuzzyError::Config("centroid grid needs at least 2 samples".into()));
        }
        self.grid_samples = samples;
        Ok(self)
    }

    pub fn inputs(&self) -> &[LinguisticVariable<T>] {
        &self.inputs
    }

    pub fn input(&self, name: &str) -> Option<&LinguisticVariable<T>> {
        self.inputs.iter().find(|v| v.name() == name)
    }

    pub fn output(&self) -> &LinguisticVariable<T> {
        &self.output
    }

    pub fn rules(&self) -> &[FuzzyRule<T>] {
        &self.rules
    }

    pub fn crisp_mode(&self) -> CrispMode {
        self.crisp_mode
    }

    pub fn set_crisp_mode(&mut self, mode: CrispMode) {
        self.crisp_mode = mode;
    }

    pub fn grid_samples(&self) -> usize {
        self.grid_samples
    }

    /// Runs fuzzify → rules → aggregate → centroid. `values` are aligned with
    /// [`inputs`](Self::inputs) and must lie in each variable's domain.
    pub fn infer(&self, values: &[T]) -> Result<MamdaniOutput<T>> {
        if values.len() != self.inputs.len() {
            return Err(FuzzyError::InvalidInput(format!(
                "expected {} input values, got {}",
                self.inputs.len(),
                values.len()
            )));
        }
        let fuzzified = self.inputs.iter().zip(values).map(|(v, x)| v.fuzzify(*x)).collect::<Result<Vec<_>>>()?;
        let rule_activations =
            self.rules.iter().map(|r| eval_rule(r, &fuzzified, self.crisp_mode)).collect::<Result<Vec<_>>>()?;
        let agg = aggregate(
            &self.output,
            self.rules.iter().zip(&rule_activations).map(|(r, a)| (r.consequent.as_str(), *a)),
        )?;
        let score = match defuzzify_centroid_with(&self.output, &agg, self.grid_samples) {
            Ok(s) => Some(s),
            Err(FuzzyError::NoRuleFired) => None,
            Err(e) => return Err(e),
        };
        let label = self.output.term_index(label_from_activations(&agg)).unwrap();
        Ok(MamdaniOutput { rule_activations, aggregated: agg.activations, score, label })
    }
}
