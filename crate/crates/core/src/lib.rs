//! Trust-adaptive explanation engine.
//!
//! The pipeline runs in four stages, each in its own module:
//!
//! - [`estimation`] turns windowed physiological/behavioral feature records into a
//!   normalized [`UserState`] (workload, stress, valence, performance).
//! - [`trust`] runs a Mamdani fuzzy rule base over that state and yields a
//!   [`TrustEstimate`] with a per-rule trace.
//! - [`policy`] maps trust, state and task context to an [`ExplanationDirective`]
//!   (timing, duration, granularity, content, transparency, mode, tone).
//! - [`sim`] closes the loop with a synthetic operator and logs trajectories and metrics.
//!
//! [`fuzzy`] holds the generic membership/rule/defuzzification machinery. It and
//! [`trust`] are generic over the scalar type; the aliases below pin the common
//! instantiations.

pub mod cli;
pub mod estimation;
pub mod format;
pub mod fuzzy;
pub mod policy;
pub mod scalar;
pub mod sim;
pub mod trust;

pub use estimation::{NormalizationBounds, SignalWindow, TaskEventLog};
pub use policy::{AdaptationPolicy, Context, ExplanationDirective};
pub use scalar::Scalar;
pub use sim::{Metrics, PolicyMode, Scenario, SimLog};
pub use trust::{TrustEstimate, TrustInferenceSystem, TrustLevel, UserState};

/// Double-precision membership function.
pub type MembershipF64 = fuzzy::PiecewiseLinearMf<f64>;
/// Single-precision membership function.
pub type MembershipF32 = fuzzy::PiecewiseLinearMf<f32>;
/// Double-precision linguistic variable.
pub type VariableF64 = fuzzy::LinguisticVariable<f64>;
/// Single-precision linguistic variable.
pub type VariableF32 = fuzzy::LinguisticVariable<f32>;
/// Double-precision trust system, the one used by the policy and simulator.
pub type TrustSystem = TrustInferenceSystem<f64>;
/// Single-precision trust system, for memory-constrained streaming.
pub type TrustSystemF32 = TrustInferenceSystem<f32>;
pub type UserStateF32 = UserState<f32>;
pub type TrustEstimateF32 = TrustEstimate<f32>;
