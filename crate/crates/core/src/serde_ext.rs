//! Serialization of extended reals. JSON has no infinities, so `±∞` and NaN
//! are written as the strings `"inf"`, `"-inf"` and `"nan"`.

use serde::Serializer;

pub fn extended<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    if value.is_finite() {
        serializer.serialize_f64(*value)
    } else if value.is_nan() {
        serializer.serialize_str("nan")
    } else if *value > 0.0 {
        serializer.serialize_str("inf")
    } else {
        serializer.serialize_str("-inf")
    }
}

pub fn extended_opt<S: Serializer>(value: &Option<f64>, serializer: S) -> Result<S::Ok, S::Error> {
    match value {
        Some(v) => extended(v, serializer),
        None => serializer.serialize_none(),
    }
}
