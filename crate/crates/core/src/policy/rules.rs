use serde::{Deserialize, Serialize};

use super::{
    AdaptationPolicy, Content, Context, DeliveryMode, DirectiveSettings, Duration, Granularity, PolicyError, Timing,
    Tone, Transparency,
};
use crate::fuzzy::LinguisticVariable;
use crate::trust::{self, TrustEstimate, UserState};

/// What a condition inspects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionField {
    TrustLabel,
    TrustScore,
    Workload,
    Stress,
    Valence,
    Performance,
    Urgency,
    TaskFamiliarity,
    Engagement,
    Predictability,
    AuditoryAvailable,
    VisualAvailable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Op {
    Ge,
    Le,
    Gt,
    Lt,
    Eq,
    /// Membership of `term` (in the field's linguistic variable) is at least `value`.
    TermGe,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConditionValue {
    Bool(bool),
    Number(f64),
    Text(String),
}

/// `{field, op, value}` predicate; `term` is required for `term_ge`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub field: ConditionField,
    pub op: Op,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub term: Option<String>,
    pub value: ConditionValue,
}

impl Condition {
    pub fn term_ge(field: ConditionField, term: &str, threshold: f64) -> Self {
        Self { field, op: Op::TermGe, term: Some(term.into()), value: ConditionValue::Number(threshold) }
    }

    pub fn num(field: ConditionField, op: Op, value: f64) -> Self {
        Self { field, op, term: None, value: ConditionValue::Number(value) }
    }

    pub fn is(field: ConditionField, value: &str) -> Self {
        Self { field, op: Op::Eq, term: None, value: ConditionValue::Text(value.into()) }
    }

    pub fn flag(field: ConditionField, value: bool) -> Self {
        Self { field, op: Op::Eq, term: None, value: ConditionValue::Bool(value) }
    }
}

enum Observed {
    Num(f64),
    Text(&'static str),
    Bool(bool),
}

enum Kind {
    Numeric(Option<&'static str>),
    Categorical(&'static [&'static str]),
    Flag,
}

impl ConditionField {
    fn kind(self) -> Kind {
        use ConditionField::*;
        match self {
            TrustScore => Kind::Numeric(None),
            Workload => Kind::Numeric(Some(trust::WORKLOAD)),
            Stress => Kind::Numeric(Some(trust::STRESS)),
            Valence => Kind::Numeric(Some(trust::VALENCE)),
            Performance => Kind::Numeric(Some(trust::PERFORMANCE)),
            TrustLabel => Kind::Categorical(&["Low", "Medium", "High"]),
            Urgency => Kind::Categorical(&["Low", "Medium", "High"]),
            TaskFamiliarity => Kind::Categorical(&["Familiar", "Unfamiliar"]),
            Engagement => Kind::Categorical(&["Engaged", "Disengaged"]),
            Predictability => Kind::Categorical(&["Predictable", "Unpredictable"]),
            AuditoryAvailable | VisualAvailable => Kind::Flag,
        }
    }

    fn observe(self, trust: &TrustEstimate, state: &UserState, ctx: &Context) -> Observed {
        use super::{Engagement as En, Familiarity as Fa, Predictability as Pr, Urgency as Ur};
        use ConditionField::*;
        match self {
            TrustLabel => Observed::Text(trust.label.as_str()),
            TrustScore => Observed::Num(trust.score),
            Workload => Observed::Num(state.workload),
            Stress => Observed::Num(state.stress),
            Valence => Observed::Num(state.valence),
            Performance => Observed::Num(state.performance),
            Urgency => Observed::Text(match ctx.urgency {
                Ur::Low => "Low",
                Ur::Medium => "Medium",
                Ur::High => "High",
            }),
            TaskFamiliarity => Observed::Text(match ctx.task_familiarity {
                Fa::Familiar => "Familiar",
                Fa::Unfamiliar => "Unfamiliar",
            }),
            Engagement => Observed::Text(match ctx.engagement {
                En::Engaged => "Engaged",
                En::Disengaged => "Disengaged",
            }),
            Predictability => Observed::Text(match ctx.predictability_flag {
                Pr::Predictable => "Predictable",
                Pr::Unpredictable => "Unpredictable",
            }),
            AuditoryAvailable => Observed::Bool(ctx.auditory_available),
            VisualAvailable => Observed::Bool(ctx.visual_available),
        }
    }
}

/// Conditional partial directive. All `when` conditions must hold; an empty
/// `when` always matches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptationRule {
    pub id: String,
    /// Lower is stronger.
    pub priority: i32,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    #[serde(default)]
    pub when: Vec<Condition>,
    pub set: DirectiveSettings,
}

impl AdaptationRule {
    pub(super) fn validate(&self, variables: &[LinguisticVariable<f64>]) -> Result<(), PolicyError> {
        let fail = |message: String| PolicyError::InvalidRule { rule: self.id.clone(), message };
        if self.set.is_empty() {
            return Err(fail("sets no directive field".into()));
        }
        for c in &self.when {
            match (c.field.kind(), c.op, &c.value) {
                (Kind::Numeric(var), Op::TermGe, ConditionValue::Number(v)) => {
                    let var = var.ok_or_else(|| fail(format!("{:?} has no linguistic terms", c.field)))?;
                    let term = c.term.as_deref().ok_or_else(|| fail("term_ge needs a term".into()))?;
                    let lv = variables
                        .iter()
                        .find(|v| v.name() == var)
                        .ok_or_else(|| fail(format!("no variable {var} available")))?;
                    if lv.term(term).is_none() {
                        return Err(fail(format!("{var} has no term {term}")));
                    }
                    if !v.is_finite() {
                        return Err(fail("non-finite threshold".into()));
                    }
                }
                (Kind::Numeric(_), Op::Ge | Op::Le | Op::Gt | Op::Lt | Op::Eq, ConditionValue::Number(v)) => {
                    if !v.is_finite() {
                        return Err(fail("non-finite threshold".into()));
                    }
                }
                (Kind::Categorical(allowed), Op::Eq, ConditionValue::Text(t)) => {
                    if !allowed.contains(&t.as_str()) {
                        return Err(fail(format!("{:?} cannot equal {t}", c.field)));
                    }
                }
                (Kind::Flag, Op::Eq, ConditionValue::Bool(_)) => {}
                _ => return Err(fail(format!("{:?} {:?} {:?} is not a valid condition", c.field, c.op, c.value))),
            }
        }
        Ok(())
    }

    pub(super) fn matches(
        &self,
        trust: &TrustEstimate,
        state: &UserState,
        ctx: &Context,
        variables: &[LinguisticVariable<f64>],
    ) -> bool {
        self.when.iter().all(|c| holds(c, trust, state, ctx, variables))
    }
}

fn holds(
    c: &Condition,
    trust: &TrustEstimate,
    state: &UserState,
    ctx: &Context,
    vars: &[LinguisticVariable<f64>],
) -> bool {
    match (c.field.observe(trust, state, ctx), c.op, &c.value) {
        (Observed::Num(x), Op::Ge, ConditionValue::Number(v)) => x >= *v,
        (Observed::Num(x), Op::Le, ConditionValue::Number(v)) => x <= *v,
        (Observed::Num(x), Op::Gt, ConditionValue::Number(v)) => x > *v,
        (Observed::Num(x), Op::Lt, ConditionValue::Number(v)) => x < *v,
        (Observed::Num(x), Op::Eq, ConditionValue::Number(v)) => x == *v,
        (Observed::Num(x), Op::TermGe, ConditionValue::Number(v)) => {
            let Kind::Numeric(Some(name)) = c.field.kind() else { return false };
            let Some(term) = c.term.as_deref().and_then(|t| vars.iter().find(|lv| lv.name() == name)?.term(t)) else {
                return false;
            };
            term.mf.eval(x).is_ok_and(|d| d >= *v)
        }
        (Observed::Text(s), Op::Eq, ConditionValue::Text(t)) => s == t,
        (Observed::Bool(b), Op::Eq, ConditionValue::Bool(v)) => b == *v,
        _ => false,
    }
}

fn rule(id: &str, priority: i32, description: &str, when: Vec<Condition>, set: DirectiveSettings) -> AdaptationRule {
    AdaptationRule { id: id.into(), priority, description: description.into(), when, set }
}

/// The stock rule set, strongest first:
///
/// | id | when | sets |
/// |----|------|------|
/// | A1 | μ_High(W) ≥ 0.5 | Short, HighLevel |
/// | A2 | μ_High(S) ≥ 0.5 | Proactive, Calming |
/// | A3 | μ_Negative(E) ≥ 0.5 | Reactive, Empathetic, Auditory |
/// | A4 | P < 0.4 | ConfidenceStatement, Local |
/// | A5 | unpredictable | Both |
/// | A6 | unfamiliar task | HighLevel, Proactive |
/// | A7 | disengaged | Visual |
/// | A8 | trust High and μ_Low(W) ≥ 0.5 | Layered, StepByStep, Hierarchical, Multimodal |
/// | A9 | always | baseline |
pub fn build_default_policy() -> AdaptationPolicy {
    default_policy_for(vec![
        trust::workload_variable(),
        trust::stress_variable(),
        trust::valence_variable(),
        trust::performance_variable(),
    ])
}

/// Stock rules with `term_ge` conditions evaluated against `variables`.
pub fn default_policy_for(variables: Vec<LinguisticVariable<f64>>) -> AdaptationPolicy {
    use ConditionField as F;
    let s = DirectiveSettings::default;
    let rules = vec![
        rule(
            "A1",
            1,
            "high cognitive load: short, high-level summaries",
            vec![Condition::term_ge(F::Workload, "High", 0.5)],
            DirectiveSettings { duration: Some(Duration::Short), granularity: Some(Granularity::HighLevel), ..s() },
        ),
        rule(
            "A2",
            2,
            "high stress: proactive, calming explanations delivered early",
            vec![Condition::term_ge(F::Stress, "High", 0.5)],
            DirectiveSettings { timing: Some(Timing::Proactive), tone: Some(Tone::Calming), ..s() },
        ),
        rule(
            "A3",
            3,
            "negative valence: reactive, empathetic, voice",
            vec![Condition::term_ge(F::Valence, "Negative", 0.5)],
            DirectiveSettings {
                timing: Some(Timing::Reactive),
                tone: Some(Tone::Empathetic),
                mode: Some(DeliveryMode::Auditory),
                ..s()
            },
        ),
        rule(
            "A4",
            4,
            "low AI performance: reinforce competence with confidence indicators",
            vec![Condition::num(F::Performance, Op::Lt, 0.4)],
            DirectiveSettings {
                transparency: Some(Transparency::ConfidenceStatement),
                content: Some(Content::Local),
                ..s()
            },
        ),
        rule(
            "A5",
            5,
            "low predictability: give the rationale behind actions",
            vec![Condition::is(F::Predictability, "Unpredictable")],
            DirectiveSettings { transparency: Some(Transparency::Both), ..s() },
        ),
        rule(
            "A6",
            6,
            "unfamiliar task: simplify, proactive guidance",
            vec![Condition::is(F::TaskFamiliarity, "Unfamiliar")],
            DirectiveSettings { granularity: Some(Granularity::HighLevel), timing: Some(Timing::Proactive), ..s() },
        ),
        rule(
            "A7",
            7,
            "disengagement: switch to visual formats",
            vec![Condition::is(F::Engagement, "Disengaged")],
            DirectiveSettings { mode: Some(DeliveryMode::Visual), ..s() },
        ),
        rule(
            "A8",
            8,
            "calm and trusting: detailed, interactive explanations",
            vec![Condition::is(F::TrustLabel, "High"), Condition::term_ge(F::Workload, "Low", 0.5)],
            DirectiveSettings {
                duration: Some(Duration::Layered),
                granularity: Some(Granularity::StepByStep),
                content: Some(Content::Hierarchical),
                mode: Some(DeliveryMode::Multimodal),
                ..s()
            },
        ),
        rule(
            "A9",
            9,
            "baseline",
            vec![],
            DirectiveSettings {
                timing: Some(Timing::Reactive),
                duration: Some(Duration::Extended),
                granularity: Some(Granularity::HighLevel),
                content: Some(Content::Local),
                transparency: Some(Transparency::How),
                mode: Some(DeliveryMode::Textual),
                tone: Some(Tone::Neutral),
            },
        ),
    ];
    AdaptationPolicy::new(rules, variables).expect("stock policy is valid")
}
