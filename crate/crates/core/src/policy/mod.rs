//! Explanation adaptation: trust, state and context in, [`ExplanationDirective`] out.
//!
//! Rules are matched against the current situation and applied in priority
//! order (1 = strongest); the first rule to set a field owns it. Unset fields
//! come from the baseline directive. Two guards run last: hierarchical content
//! is only kept when urgency is low, and the delivery mode is forced onto an
//! available channel.

mod render;
mod rules;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::LinguisticVariable;
use crate::trust::{TrustEstimate, UserState};

pub use render::{
    render_directive, render_directive_with, word_count, ActionDescription, Certainty, ExplanationMessage, RenderStyle,
    SHORT_WORD_LIMIT,
};
pub use rules::{
    build_default_policy, default_policy_for, AdaptationRule, Condition, ConditionField, ConditionValue, Op,
};

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("rule {rule}: {message}")]
    InvalidRule { rule: String, message: String },
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("malformed policy document: {0}")]
    Document(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Urgency {
    Low,
    #[default]
    Medium,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Familiarity {
    #[default]
    Familiar,
    Unfamiliar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Engagement {
    #[default]
    Engaged,
    Disengaged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Predictability {
    #[default]
    Predictable,
    Unpredictable,
}

/// Task and environment context for one decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct Context {
    pub urgency: Urgency,
    pub task_familiarity: Familiarity,
    pub engagement: Engagement,
    pub predictability_flag: Predictability,
    pub auditory_available: bool,
    /// Screen available; textual delivery needs it too.
    pub visual_available: bool,
}

impl Default for Context {
    fn default() -> Self {
        Self {
            urgency: Urgency::Medium,
            task_familiarity: Familiarity::Familiar,
            engagement: Engagement::Engaged,
            predictability_flag: Predictability::Predictable,
            auditory_available: true,
            visual_available: true,
        }
    }
}

impl Context {
    pub fn validate(&self) -> Result<(), PolicyError> {
        if !(self.auditory_available || self.visual_available) {
            return Err(PolicyError::InvalidContext("no delivery channel available".into()));
        }
        Ok(())
    }

    pub fn mode_available(&self, mode: DeliveryMode) -> bool {
        match mode {
            DeliveryMode::Visual | DeliveryMode::Textual => self.visual_available,
            DeliveryMode::Auditory => self.auditory_available,
            DeliveryMode::Multimodal => self.visual_available && self.auditory_available,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Timing {
    Proactive,
    Reactive,
}

/// `Short` is a 2–3 second utterance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Duration {
    Short,
    Extended,
    Layered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Granularity {
    HighLevel,
    StepByStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Content {
    Local,
    Hierarchical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Transparency {
    How,
    Why,
    Both,
    ConfidenceStatement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DeliveryMode {
    Visual,
    Textual,
    Auditory,
    Multimodal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tone {
    Neutral,
    Calming,
    Empathetic,
}

/// Selected explanation features for one step, plus the ids of the rules
/// (and guards) that shaped it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExplanationDirective {
    pub timing: Timing,
    pub duration: Duration,
    pub granularity: Granularity,
    pub content: Content,
    pub transparency: Transparency,
    pub mode: DeliveryMode,
    pub tone: Tone,
    #[serde(default)]
    pub rationale: Vec<String>,
}

impl ExplanationDirective {
    /// Reactive, extended, high-level, local, "how", textual, neutral.
    pub const BASELINE: Self = Self {
        timing: Timing::Reactive,
        duration: Duration::Extended,
        granularity: Granularity::HighLevel,
        content: Content::Local,
        transparency: Transparency::How,
        mode: DeliveryMode::Textual,
        tone: Tone::Neutral,
        rationale: Vec::new(),
    };

    pub fn fixed(
        timing: Timing,
        duration: Duration,
        granularity: Granularity,
        content: Content,
        transparency: Transparency,
        mode: DeliveryMode,
        tone: Tone,
    ) -> Self {
        Self { timing, duration, granularity, content, transparency, mode, tone, rationale: Vec::new() }
    }

    /// Whether `field` holds the same value in both directives.
    pub fn field_eq(&self, other: &Self, field: DirectiveField) -> bool {
        match field {
            DirectiveField::Timing => self.timing == other.timing,
            DirectiveField::Duration => self.duration == other.duration,
            DirectiveField::Granularity => self.granularity == other.granularity,
            DirectiveField::Content => self.content == other.content,
            DirectiveField::Transparency => self.transparency == other.transparency,
            DirectiveField::Mode => self.mode == other.mode,
            DirectiveField::Tone => self.tone == other.tone,
        }
    }

    /// Same seven features, ignoring rationale.
    pub fn same_features(&self, other: &Self) -> bool {
        DirectiveField::ALL.iter().all(|f| self.field_eq(other, *f))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectiveField {
    Timing,
    Duration,
    Granularity,
    Content,
    Transparency,
    Mode,
    Tone,
}

impl DirectiveField {
    pub const ALL: [DirectiveField; 7] = [
        DirectiveField::Timing,
        DirectiveField::Duration,
        DirectiveField::Granularity,
        DirectiveField::Content,
        DirectiveField::Transparency,
        DirectiveField::Mode,
        DirectiveField::Tone,
    ];

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

/// Partial directive carried by a rule.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DirectiveSettings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration: Option<Duration>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub granularity: Option<Granularity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub content: Option<Content>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transparency: Option<Transparency>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<DeliveryMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tone: Option<Tone>,
}

impl DirectiveSettings {
    pub fn touches(&self, field: DirectiveField) -> bool {
        match field {
            DirectiveField::Timing => self.timing.is_some(),
            DirectiveField::Duration => self.duration.is_some(),
            DirectiveField::Granularity => self.granularity.is_some(),
            DirectiveField::Content => self.content.is_some(),
            DirectiveField::Transparency => self.transparency.is_some(),
            DirectiveField::Mode => self.mode.is_some(),
            DirectiveField::Tone => self.tone.is_some(),
        }
    }

    pub fn is_empty(&self) -> bool {
        !DirectiveField::ALL.iter().any(|f| self.touches(*f))
    }

    /// Whether this rule would put `d`'s value into `field`.
    pub fn agrees(&self, d: &ExplanationDirective, field: DirectiveField) -> bool {
        match field {
            DirectiveField::Timing => self.timing == Some(d.timing),
            DirectiveField::Duration => self.duration == Some(d.duration),
            DirectiveField::Granularity => self.granularity == Some(d.granularity),
            DirectiveField::Content => self.content == Some(d.content),
            DirectiveField::Transparency => self.transparency == Some(d.transparency),
            DirectiveField::Mode => self.mode == Some(d.mode),
            DirectiveField::Tone => self.tone == Some(d.tone),
        }
    }

    /// Writes every field this rule sets that `owned` doesn't already hold.
    fn apply(&self, d: &mut ExplanationDirective, owned: &mut u8) {
        macro_rules! put {
            ($field:ident, $tag:expr) => {
                if let Some(v) = self.$field {
                    if *owned & $tag.bit() == 0 {
                        d.$field = v;
                        *owned |= $tag.bit();
                    }
                }
            };
        }
        put!(timing, DirectiveField::Timing);
        put!(duration, DirectiveField::Duration);
        put!(granularity, DirectiveField::Granularity);
        put!(content, DirectiveField::Content);
        put!(transparency, DirectiveField::Transparency);
        put!(mode, DirectiveField::Mode);
        put!(tone, DirectiveField::Tone);
    }
}

/// Rationale entry added when the content guard drops hierarchical content.
pub const CONTENT_GUARD: &str = "guard:content";
/// Rationale entry added when the delivery mode had to move to another channel.
pub const CHANNEL_GUARD: &str = "guard:channel";

/// Channel fallback order for an unavailable mode.
const MODE_FALLBACK: [DeliveryMode; 3] = [DeliveryMode::Visual, DeliveryMode::Textual, DeliveryMode::Auditory];

/// Ordered rule list plus the linguistic variables used by `term_ge` conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptationPolicy {
    rules: Vec<AdaptationRule>,
    variables: Vec<LinguisticVariable<f64>>,
}

/// A decided directive together with the fields that situation-specific
/// rules (anything but an unconditional default) committed to.
#[derive(Debug, Clone, PartialEq)]
pub struct Prescription {
    pub directive: ExplanationDirective,
    binding: u8,
}

impl Prescription {
    pub fn is_binding(&self, field: DirectiveField) -> bool {
        self.binding & field.bit() != 0
    }

    pub fn binding_fields(&self) -> impl Iterator<Item = DirectiveField> + '_ {
        DirectiveField::ALL.into_iter().filter(|f| self.is_binding(*f))
    }

    /// `other` delivers every binding feature of this prescription.
    pub fn matches(&self, other: &ExplanationDirective) -> bool {
        self.binding_fields().all(|f| self.directive.field_eq(other, f))
    }
}

impl AdaptationPolicy {
    /// Validates every rule against `variables` and sorts by priority (stable).
    pub fn new(mut rules: Vec<AdaptationRule>, variables: Vec<LinguisticVariable<f64>>) -> Result<Self, PolicyError> {
        for (i, r) in rules.iter().enumerate() {
            r.validate(&variables)?;
            if rules[..i].iter().any(|o| o.id == r.id) {
                return Err(PolicyError::InvalidRule { rule: r.id.clone(), message: "duplicate id".into() });
            }
        }
        rules.sort_by_key(|r| r.priority);
        Ok(Self { rules, variables })
    }

    /// Rules from a JSON array (the override file format).
    pub fn from_json(text: &str, variables: Vec<LinguisticVariable<f64>>) -> Result<Self, PolicyError> {
        let rules: Vec<AdaptationRule> = serde_json::from_str(text)?;
        Self::new(rules, variables)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.rules).expect("policy serializes")
    }

    pub fn rules(&self) -> &[AdaptationRule] {
        &self.rules
    }

    pub fn rule(&self, id: &str) -> Option<&AdaptationRule> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn variables(&self) -> &[LinguisticVariable<f64>] {
        &self.variables
    }

    pub fn matching_rules<'a>(
        &'a self,
        trust: &'a TrustEstimate,
        state: &'a UserState,
        ctx: &'a Context,
    ) -> impl Iterator<Item = &'a AdaptationRule> + 'a {
        self.rules.iter().filter(move |r| r.matches(trust, state, ctx, &self.variables))
    }

    pub fn prescribe(&self, trust: &TrustEstimate, state: &UserState, ctx: &Context) -> Prescription {
        let mut d = ExplanationDirective::BASELINE;
        let mut owned = 0u8;
        let mut binding = 0u8;
        for rule in self.matching_rules(trust, state, ctx) {
            let before = owned;
            rule.set.apply(&mut d, &mut owned);
            if !rule.when.is_empty() {
                binding |= owned & !before;
            }
            d.rationale.push(rule.id.clone());
        }
        if d.content == Content::Hierarchical && ctx.urgency != Urgency::Low {
            d.content = Content::Local;
            binding &= !DirectiveField::Content.bit();
            d.rationale.push(CONTENT_GUARD.into());
        }
        if !ctx.mode_available(d.mode) {
            if let Some(m) = MODE_FALLBACK.into_iter().find(|m| ctx.mode_available(*m)) {
                d.mode = m;
            }
            d.rationale.push(CHANNEL_GUARD.into());
        }
        Prescription { directive: d, binding }
    }
}

/// Directive for the current situation. Total and deterministic.
pub fn decide(
    trust: &TrustEstimate,
    state: &UserState,
    ctx: &Context,
    policy: &AdaptationPolicy,
) -> ExplanationDirective {
    policy.prescribe(trust, state, ctx).directive
}

/// One JSON line describing a directive, for trajectory and decision logs.
pub fn directive_log_line(step: u64, d: &ExplanationDirective) -> String {
    #[derive(Serialize)]
    struct Line<'a> {
        step: u64,
        #[serde(flatten)]
        directive: &'a ExplanationDirective,
    }
    serde_json::to_string(&Line { step, directive: d }).expect("directive serializes")
}
