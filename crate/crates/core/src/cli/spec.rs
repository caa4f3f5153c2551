//! JSON function specs shared by inline `--spec` and `--spec-file` input.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Deserialize;

use crate::circle::{BoundarySpec, SpectralFunction};
use crate::extend::{BidiskSpectrum, HoloSpec};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum FunctionSpec {
    Trig { coeffs: BTreeMap<String, [f64; 2]> },
    Taylor { coeffs: Vec<[f64; 2]> },
    Blaschke { zeros: Vec<[f64; 2]> },
    Step { breaks: Vec<f64>, values: Vec<[f64; 2]> },
    Scaled { factor: [f64; 2], inner: Box<FunctionSpec> },
    Product { factors: Vec<FunctionSpec> },
    Trig2d { coeffs: BTreeMap<String, [f64; 2]> },
}

fn complex(pair: &[f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

fn frequency(field: &str, key: &str) -> Result<i64, String> {
    key.trim()
        .parse()
        .map_err(|_| format!("{field}: key {key:?} is not an integer frequency"))
}

impl FunctionSpec {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("invalid spec: {e}"))
    }

    fn kind(&self) -> &'static str {
        match self {
            FunctionSpec::Trig { .. } => "trig",
            FunctionSpec::Taylor { .. } => "taylor",
            FunctionSpec::Blaschke { .. } => "blaschke",
            FunctionSpec::Step { .. } => "step",
            FunctionSpec::Scaled { .. } => "scaled",
            FunctionSpec::Product { .. } => "product",
            FunctionSpec::Trig2d { .. } => "trig2d",
        }
    }

    fn trig_pairs(coeffs: &BTreeMap<String, [f64; 2]>) -> Result<Vec<(i64, Complex64)>, String> {
        coeffs
            .iter()
            .map(|(k, v)| Ok((frequency("coeffs", k)?, complex(v))))
            .collect()
    }

    /// The holomorphic function this spec names. Trig specs qualify when every
    /// frequency is nonnegative.
    pub fn to_holo(&self) -> Result<HoloSpec, String> {
        match self {
            FunctionSpec::Taylor { coeffs } => Ok(HoloSpec::Taylor(coeffs.iter().map(complex).collect())),
            FunctionSpec::Blaschke { zeros } => Ok(HoloSpec::Blaschke(zeros.iter().map(complex).collect())),
            FunctionSpec::Scaled { factor, inner } => {
                Ok(HoloSpec::Scaled(complex(factor), Box::new(inner.to_holo()?)))
            }
            FunctionSpec::Product { factors } => Ok(HoloSpec::Product(
                factors.iter().map(FunctionSpec::to_holo).collect::<Result<_, _>>()?,
            )),
            FunctionSpec::Trig { coeffs } => {
                let pairs = Self::trig_pairs(coeffs)?;
                if let Some((n, _)) = pairs.iter().find(|(n, _)| *n < 0) {
                    return Err(format!("coeffs: frequency {n} is negative, not holomorphic"));
                }
                let degree = pairs.iter().map(|(n, _)| *n as usize).max().unwrap_or(0);
                let mut taylor = vec![Complex64::new(0.0, 0.0); degree + 1];
                for (n, c) in pairs {
                    taylor[n as usize] = c;
                }
                Ok(HoloSpec::Taylor(taylor))
            }
            other => Err(format!("type: {} does not describe a holomorphic function", other.kind())),
        }
    }

    pub fn to_boundary(&self) -> Result<BoundarySpec, String> {
        match self {
            FunctionSpec::Trig { coeffs } => Ok(BoundarySpec::Trig(Self::trig_pairs(coeffs)?.into_iter().collect())),
            FunctionSpec::Step { breaks, values } => Ok(BoundarySpec::Step {
                breaks: breaks.clone(),
                values: values.iter().map(complex).collect(),
            }),
            FunctionSpec::Trig2d { .. } => Err("type: trig2d is a bidisk spec, not boundary data on the circle".into()),
            _ => Ok(BoundarySpec::Restriction(self.to_holo()?)),
        }
    }

    /// Exact coefficients when the spec is band-limited.
    pub fn to_spectral(&self) -> Option<Result<SpectralFunction, String>> {
        match self {
            FunctionSpec::Trig { coeffs } => Some(
                Self::trig_pairs(coeffs)
                    .and_then(|p| SpectralFunction::from_pairs(p).map_err(|e| format!("coeffs: {e}"))),
            ),
            FunctionSpec::Taylor { coeffs } => {
                Some(HoloSpec::Taylor(coeffs.iter().map(complex).collect()).taylor_spectrum().ok_or_else(
                    || "coeffs: taylor spec has no spectrum".to_string(),
                ))
            }
            _ => None,
        }
    }

    pub fn to_bidisk(&self) -> Result<BidiskSpectrum, String> {
        let FunctionSpec::Trig2d { coeffs } = self else {
            return Err(format!("type: bidisk needs trig2d, got {}", self.kind()));
        };
        let pairs = coeffs
            .iter()
            .map(|(key, v)| {
                let (m, n) = key
                    .split_once(',')
                    .ok_or_else(|| format!("coeffs: key {key:?} is not of the form \"m,n\""))?;
                Ok(((frequency("coeffs", m)?, frequency("coeffs", n)?), complex(v)))
            })
            .collect::<Result<Vec<_>, String>>()?;
        BidiskSpectrum::from_pairs(pairs).map_err(|e| format!("coeffs: {e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_variant() {
        let texts = [
            r#"{"type":"trig","coeffs":{"0":[1,0],"-2":[0.5,0.5]}}"#,
            r#"{"type":"taylor","coeffs":[[1,0],[0,1]]}"#,
            r#"{"type":"blaschke","zeros":[[0.4,0]]}"#,
            r#"{"type":"step","breaks":[-1.5,1.5],"values":[[1,0],[-1,0]]}"#,
            r#"{"type":"scaled","factor":[2,0],"inner":{"type":"blaschke","zeros":[[0,0.3]]}}"#,
            r#"{"type":"product","factors":[{"type":"taylor","coeffs":[[0,0],[1,0]]},{"type":"blaschke","zeros":[[0.1,0]]}]}"#,
            r#"{"type":"trig2d","coeffs":{"2,3":[1,0]}}"#,
        ];
        for text in texts {
            FunctionSpec::parse(text).unwrap();
        }
    }

    #[test]
    fn trig_to_holo_and_spectrum() {
        let s = FunctionSpec::parse(r#"{"type":"trig","coeffs":{"2":[1,0]}}"#).unwrap();
        assert_eq!(s.to_holo().unwrap(), HoloSpec::monomial(2));
        assert_eq!(s.to_spectral().unwrap().unwrap().coeff(2), Complex64::new(1.0, 0.0));
        let neg = FunctionSpec::parse(r#"{"type":"trig","coeffs":{"-1":[1,0]}}"#).unwrap();
        assert!(neg.to_holo().unwrap_err().contains("coeffs"));
    }

    #[test]
    fn errors_name_the_field() {
        let missing = FunctionSpec::parse(r#"{"type":"taylor"}"#).unwrap_err();
        assert!(missing.contains("coeffs"), "{missing}");
        let unknown = FunctionSpec::parse(r#"{"type":"taylor","coeffs":[],"extra":1}"#).unwrap_err();
        assert!(unknown.contains("extra"), "{unknown}");
        let key = FunctionSpec::parse(r#"{"type":"trig","coeffs":{"x":[1,0]}}"#)
            .unwrap()
            .to_boundary()
            .unwrap_err();
        assert!(key.contains("coeffs"), "{key}");
        let bad = FunctionSpec::parse(r#"{"type":"trig2d","coeffs":{"2":[1,0]}}"#)
            .unwrap()
            .to_bidisk()
            .unwrap_err();
        assert!(bad.contains("m,n"), "{bad}");
    }
}
