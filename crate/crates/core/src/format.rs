//! Pinned numeric formatting for every file this crate writes: six-decimal
//! fixed point, so logs diff cleanly across platforms.

use serde::Serializer;
use serde_json::value::RawValue;

/// `{:.6}` for finite values, `null` otherwise.
pub fn fixed6(x: f64) -> String {
    if x.is_finite() {
        // avoid "-0.000000"
        let s = format!("{x:.6}");
        if s == "-0.000000" {
            "0.000000".into()
        } else {
            s
        }
    } else {
        "null".into()
    }
}

/// serde `serialize_with` hook writing an `f64` as a six-decimal JSON number.
/// Only meaningful with `serde_json`.
pub fn ser_fixed6<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    let raw = RawValue::from_string(fixed6(*x)).map_err(serde::ser::Error::custom)?;
    serde::Serialize::serialize(&*raw, s)
}
