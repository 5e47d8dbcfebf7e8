//! JSON interchange schema for instances.
//!
//! The wire format is
//! `{"mode": "rational"|"float", "weights": [...], "vars": [[{"value": v, "prob": p}, ...], ...]}`
//! with rationals serialized as `"p/q"` strings and floats as plain JSON
//! numbers. Parsing validates through [`Instance::from_raw`], so a
//! malformed file reports the violated invariants by name.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Instance, ModelError, RawInstance};
use crate::numeric::{BigRational, Mode, NumericParseError, Scalar};

#[derive(Error, Debug)]
pub enum SchemaError {
    #[error("expected {expected} mode, file is {found}")]
    ModeMismatch { expected: Mode, found: Mode },
    #[error(transparent)]
    Parse(#[from] NumericParseError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomJson<T> {
    pub value: T,
    pub prob: T,
}

/// Serialized instance, tagged by numeric mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode")]
pub enum InstanceJson {
    #[serde(rename = "rational")]
    Rational {
        weights: Vec<String>,
        vars: Vec<Vec<AtomJson<String>>>,
    },
    #[serde(rename = "float")]
    Float {
        weights: Vec<f64>,
        vars: Vec<Vec<AtomJson<f64>>>,
    },
}

impl InstanceJson {
    pub fn mode(&self) -> Mode {
        match self {
            InstanceJson::Rational { .. } => Mode::Rational,
            InstanceJson::Float { .. } => Mode::Float,
        }
    }
}

/// A parsed instance in whichever mode the file declared.
#[derive(Clone, Debug)]
pub enum AnyInstance {
    Rational(Instance<BigRational>),
    Float(Instance<f64>),
}

impl AnyInstance {
    pub fn mode(&self) -> Mode {
        match self {
            AnyInstance::Rational(_) => Mode::Rational,
            AnyInstance::Float(_) => Mode::Float,
        }
    }
}

/// Serializes an instance; the variant follows the scalar's mode.
pub fn instance_to_json<R: Scalar>(inst: &Instance<R>) -> InstanceJson {
    let raw = inst.to_raw();
    if R::EXACT {
        InstanceJson::Rational {
            weights: raw.weights.iter().map(Scalar::render_text).collect(),
            vars: raw
                .vars
                .iter()
                .map(|atoms| {
                    atoms
                        .iter()
                        .map(|(v, p)| AtomJson {
                            value: v.render_text(),
                            prob: p.render_text(),
                        })
                        .collect()
                })
                .collect(),
        }
    } else {
        InstanceJson::Float {
            weights: raw.weights.iter().map(Scalar::to_f64).collect(),
            vars: raw
                .vars
                .iter()
                .map(|atoms| {
                    atoms
                        .iter()
                        .map(|(v, p)| AtomJson {
                            value: v.to_f64(),
                            prob: p.to_f64(),
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

/// Parses and validates in the file's own mode.
pub fn instance_from_json(json: &InstanceJson) -> Result<AnyInstance, SchemaError> {
    match json {
        InstanceJson::Rational { weights, vars } => {
            let raw = RawInstance {
                weights: parse_all::<BigRational>(weights)?,
                vars: parse_atoms::<BigRational>(vars)?,
            };
            Ok(AnyInstance::Rational(Instance::from_raw(raw)?))
        }
        InstanceJson::Float { weights, vars } => {
            let raw = RawInstance {
                weights: weights.clone(),
                vars: vars
                    .iter()
                    .map(|atoms| atoms.iter().map(|a| (a.value, a.prob)).collect())
                    .collect(),
            };
            Ok(AnyInstance::Float(Instance::from_raw(raw)?))
        }
    }
}

/// Parses in a caller-required mode, rejecting files in the other one.
pub fn instance_from_json_as<R: Scalar>(json: &InstanceJson) -> Result<Instance<R>, SchemaError> {
    if json.mode() != R::MODE {
        return Err(SchemaError::ModeMismatch {
            expected: R::MODE,
            found: json.mode(),
        });
    }
    let raw = match json {
        InstanceJson::Rational { weights, vars } => RawInstance {
            weights: parse_all::<R>(weights)?,
            vars: vars
                .iter()
                .map(|atoms| {
                    atoms
                        .iter()
                        .map(|a| Ok((R::parse_text(&a.value)?, R::parse_text(&a.prob)?)))
                        .collect::<Result<Vec<_>, NumericParseError>>()
                })
                .collect::<Result<Vec<_>, _>>()?,
        },
        InstanceJson::Float { weights, vars } => RawInstance {
            weights: weights.iter().map(|w| R::from_f64_lossy(*w)).collect(),
            vars: vars
                .iter()
                .map(|atoms| {
                    atoms
                        .iter()
                        .map(|a| (R::from_f64_lossy(a.value), R::from_f64_lossy(a.prob)))
                        .collect()
                })
                .collect(),
        },
    };
    Ok(Instance::from_raw(raw)?)
}

fn parse_all<R: Scalar>(texts: &[String]) -> Result<Vec<R>, NumericParseError> {
    texts.iter().map(|t| R::parse_text(t)).collect()
}

fn parse_atoms<R: Scalar>(
    vars: &[Vec<AtomJson<String>>],
) -> Result<Vec<Vec<(R, R)>>, NumericParseError> {
    vars.iter()
        .map(|atoms| {
            atoms
                .iter()
                .map(|a| Ok((R::parse_text(&a.value)?, R::parse_text(&a.prob)?)))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DeltaThreshold, WeightVector};
    use crate::numeric::big_ratio;
    use proptest::prelude::*;

    fn rational_instance() -> Instance<BigRational> {
        let w = WeightVector::new(vec![big_ratio(1, 2), big_ratio(1, 2)]).unwrap();
        let d = DeltaThreshold::new(big_ratio(1, 10)).unwrap();
        crate::extremal::feige_extremal(&w, &d).unwrap()
    }

    #[test]
    fn rational_round_trip_is_exact() {
        let inst = rational_instance();
        let json = instance_to_json(&inst);
        let text = serde_json::to_string(&json).unwrap();
        assert!(text.contains("\"mode\":\"rational\""));
        assert!(text.contains("6/5")); // (δ+M)/M = 0.6/0.5
        let parsed: InstanceJson = serde_json::from_str(&text).unwrap();
        match instance_from_json(&parsed).unwrap() {
            AnyInstance::Rational(again) => assert_eq!(inst, again),
            AnyInstance::Float(_) => panic!("mode lost in round trip"),
        }
    }

    #[test]
    fn mode_mismatch_is_reported() {
        let inst = rational_instance();
        let json = instance_to_json(&inst);
        let err = instance_from_json_as::<f64>(&json).unwrap_err();
        assert!(matches!(err, SchemaError::ModeMismatch { .. }));
    }

    #[test]
    fn invalid_file_reports_diagnostics() {
        let json = InstanceJson::Float {
            weights: vec![1.0],
            vars: vec![vec![AtomJson {
                value: 0.9,
                prob: 1.0,
            }]],
        };
        let err = instance_from_json(&json).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("mean-violation"), "got: {text}");
    }

    proptest! {
        #[test]
        fn float_round_trip_is_exact_per_field(
            raw in proptest::collection::vec(1e-3..1e2f64, 1..6),
            scale in 0.25..4.0f64,
        ) {
            let w = WeightVector::normalized(raw).unwrap();
            let vars: Vec<_> = (0..w.n())
                .map(|k| {
                    if k % 2 == 0 {
                        crate::model::DiscreteVar::constant_one()
                    } else {
                        // two-point with mean 1: {0, scale+1} with prob 1/(scale+1) on top
                        let top = scale + 1.0;
                        crate::model::DiscreteVar::new(vec![
                            (0.0, 1.0 - 1.0 / top),
                            (top, 1.0 / top),
                        ])
                        .unwrap()
                    }
                })
                .collect();
            let inst = Instance::new(w, vars).unwrap();
            let text = serde_json::to_string(&instance_to_json(&inst)).unwrap();
            let parsed: InstanceJson = serde_json::from_str(&text).unwrap();
            match instance_from_json(&parsed).unwrap() {
                AnyInstance::Float(again) => prop_assert_eq!(inst, again),
                AnyInstance::Rational(_) => prop_assert!(false, "mode lost"),
            }
        }
    }
}
