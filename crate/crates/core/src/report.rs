//! Serialization helpers shared by every report type.

use serde::Serialize;

/// Extended reals: `+∞` is written as the string `"inf"`.
pub mod extended {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("expected number or \"inf\", got {s:?}"))),
        }
    }
}

/// Same as [`extended`] but `null` also reads as `+∞` (open-ended intervals).
pub mod optional_infinite {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        super::extended::serialize(v, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "super::extended")] f64);
        Ok(Option::<Wrap>::deserialize(d)?.map_or(f64::INFINITY, |w| w.0))
    }
}

/// Same as [`optional_infinite`] for lower endpoints: `null` reads as `-∞`.
pub mod optional_neg_infinite {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v < 0.0 {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Option::<Repr>::deserialize(d)? {
            None => Ok(f64::NEG_INFINITY),
            Some(Repr::Num(v)) => Ok(v),
            Some(Repr::Str(s)) if s == "-inf" => Ok(f64::NEG_INFINITY),
            Some(Repr::Str(s)) => Err(serde::de::Error::custom(format!("expected number or \"-inf\", got {s:?}"))),
        }
    }
}

/// How a reported norm value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    ClosedForm,
    Quadrature,
    GridSup,
}

/// A norm value with its provenance and an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct NormReport {
    #[serde(with = "extended")]
    pub value: f64,
    pub method: NormMethod,
    pub est_error: f64,
}

impl NormReport {
    pub fn new(value: f64, method: NormMethod, est_error: f64) -> Self {
        debug_assert!(value.is_infinite() || est_error.is_finite());
        Self { value, method, est_error }
    }
}

/// Writes rows of `(x, y)` as whitespace separated plot data.
pub fn two_column<I: IntoIterator<Item = (f64, f64)>>(rows: I) -> String {
    let mut out = String::new();
    for (x, y) in rows {
        out.push_str(&format!("{x:e} {y:e}\n"));
    }
    out
}
