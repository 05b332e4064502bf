//! JSON wire schemas.
//!
//! Polynomials serialize as `{"n": int, "terms": [{"z": [...], "zbar": [...],
//! "re": "p/q", "im": "p/q"}]}` with `zbar` omitted for holomorphic
//! polynomials and coefficients as exact decimal-free rational strings (a
//! float coefficient is a dyadic rational and converts losslessly). Forms
//! serialize as `{"n": int, "p": int, "components": {"1,2": <poly>, ...}}`
//! with 1-based comma-joined component indices. D-operators serialize as
//! `{"n": int, "p": ["d1^2", ...]}` in the operator grammar.

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::form::{Form, PForm, PForm64};
use crate::general_d::DOperator;
use crate::multi_index::MultiIndex;
use crate::poly::{HoloPoly, HoloPoly64, MixedPoly, MixedPolyExact};
use crate::scalar::{parse_rational, CRat};
use crate::weyl::parse_weyl;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub z: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zbar: Option<Vec<u32>>,
    pub re: String,
    pub im: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyJson {
    pub n: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FormJson {
    pub n: usize,
    pub p: usize,
    pub components: BTreeMap<String, PolyJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DOperatorJson {
    pub n: usize,
    pub p: Vec<String>,
}

fn rational_string(r: &BigRational) -> String {
    r.to_string()
}

/// Exact conversion of a float to a rational string (every finite binary64
/// value is a dyadic rational).
fn float_rational_string(x: f64) -> String {
    BigRational::from_float(x)
        .map(|r| r.to_string())
        .unwrap_or_else(|| "0".into())
}

impl From<&HoloPoly> for PolyJson {
    fn from(p: &HoloPoly) -> Self {
        PolyJson {
            n: p.dim(),
            terms: p
                .terms()
                .map(|(alpha, c)| TermJson {
                    z: alpha.exponents().to_vec(),
                    zbar: None,
                    re: rational_string(&c.re),
                    im: rational_string(&c.im),
                })
                .collect(),
        }
    }
}

impl From<&HoloPoly64> for PolyJson {
    fn from(p: &HoloPoly64) -> Self {
        PolyJson {
            n: p.dim(),
            terms: p
                .terms()
                .map(|(alpha, c)| TermJson {
                    z: alpha.exponents().to_vec(),
                    zbar: None,
                    re: float_rational_string(c.re),
                    im: float_rational_string(c.im),
                })
                .collect(),
        }
    }
}

impl From<&MixedPolyExact> for PolyJson {
    fn from(p: &MixedPolyExact) -> Self {
        PolyJson {
            n: p.dim(),
            terms: p
                .terms()
                .map(|((a, b), c)| TermJson {
                    z: a.exponents().to_vec(),
                    zbar: Some(b.exponents().to_vec()),
                    re: rational_string(&c.re),
                    im: rational_string(&c.im),
                })
                .collect(),
        }
    }
}

impl TryFrom<&PolyJson> for HoloPoly {
    type Error = Error;
    fn try_from(j: &PolyJson) -> Result<Self> {
        if j.n == 0 {
            return Err(Error::Parse {
                position: 0,
                message: "polynomial dimension must be at least 1".into(),
            });
        }
        let mut out = HoloPoly::zero(j.n);
        for t in &j.terms {
            if t.zbar.as_ref().is_some_and(|b| b.iter().any(|&e| e > 0)) {
                return Err(Error::Parse {
                    position: 0,
                    message: "holomorphic polynomial cannot carry zbar exponents".into(),
                });
            }
            if t.z.len() != j.n {
                return Err(Error::DimensionMismatch {
                    expected: j.n,
                    got: t.z.len(),
                });
            }
            let c = CRat::new(parse_rational(&t.re)?, parse_rational(&t.im)?);
            out.insert_add(MultiIndex::new(t.z.clone()), c);
        }
        Ok(out)
    }
}

impl TryFrom<&PolyJson> for MixedPolyExact {
    type Error = Error;
    fn try_from(j: &PolyJson) -> Result<Self> {
        if j.n == 0 {
            return Err(Error::Parse {
                position: 0,
                message: "polynomial dimension must be at least 1".into(),
            });
        }
        let mut out = MixedPolyExact::zero(j.n);
        for t in &j.terms {
            if t.z.len() != j.n {
                return Err(Error::DimensionMismatch {
                    expected: j.n,
                    got: t.z.len(),
                });
            }
            let zbar = t.zbar.clone().unwrap_or_else(|| vec![0; j.n]);
            if zbar.len() != j.n {
                return Err(Error::DimensionMismatch {
                    expected: j.n,
                    got: zbar.len(),
                });
            }
            let c = CRat::new(parse_rational(&t.re)?, parse_rational(&t.im)?);
            out.insert_add(MultiIndex::new(t.z.clone()), MultiIndex::new(zbar), c);
        }
        Ok(out)
    }
}

fn key_string(key: &[usize]) -> String {
    key.iter()
        .map(|j| (j + 1).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_key(s: &str, n: usize, p: usize) -> Result<Vec<usize>> {
    let parts: Vec<usize> = if s.is_empty() {
        Vec::new()
    } else {
        s.split(',')
            .map(|t| {
                t.trim().parse::<usize>().map_err(|e| Error::Parse {
                    position: 0,
                    message: format!("bad component index `{t}`: {e}"),
                })
            })
            .collect::<Result<_>>()?
    };
    let key: Vec<usize> = parts
        .iter()
        .map(|&j| {
            if j == 0 || j > n {
                Err(Error::Parse {
                    position: 0,
                    message: format!("component index {j} out of range 1..={n}"),
                })
            } else {
                Ok(j - 1)
            }
        })
        .collect::<Result<_>>()?;
    if key.len() != p || key.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parse {
            position: 0,
            message: format!("component `{s}` is not a strictly increasing {p}-tuple"),
        });
    }
    Ok(key)
}

impl From<&PForm> for FormJson {
    fn from(u: &PForm) -> Self {
        FormJson {
            n: u.dim(),
            p: u.degree(),
            components: u
                .components()
                .map(|(key, poly)| (key_string(key), PolyJson::from(poly)))
                .collect(),
        }
    }
}

impl From<&PForm64> for FormJson {
    fn from(u: &PForm64) -> Self {
        FormJson {
            n: u.dim(),
            p: u.degree(),
            components: u
                .components()
                .map(|(key, poly)| (key_string(key), PolyJson::from(poly)))
                .collect(),
        }
    }
}

impl TryFrom<&FormJson> for PForm {
    type Error = Error;
    fn try_from(j: &FormJson) -> Result<Self> {
        if j.n == 0 || j.p > j.n {
            return Err(Error::Parse {
                position: 0,
                message: format!("invalid form shape n={}, p={}", j.n, j.p),
            });
        }
        let mut out = PForm::zero(j.n, j.p);
        for (key, poly_json) in &j.components {
            let key = parse_key(key, j.n, j.p)?;
            if poly_json.n != j.n {
                return Err(Error::DimensionMismatch {
                    expected: j.n,
                    got: poly_json.n,
                });
            }
            let poly = HoloPoly::try_from(poly_json)?;
            out.add_component(&key, poly);
        }
        Ok(out)
    }
}

impl From<&DOperator> for DOperatorJson {
    fn from(d: &DOperator) -> Self {
        DOperatorJson {
            n: d.dim(),
            p: d.components().iter().map(|p| p.to_string()).collect(),
        }
    }
}

impl TryFrom<&DOperatorJson> for DOperator {
    type Error = Error;
    fn try_from(j: &DOperatorJson) -> Result<Self> {
        if j.p.len() != j.n {
            return Err(Error::Parse {
                position: 0,
                message: format!("expected {} component operators, got {}", j.n, j.p.len()),
            });
        }
        let ops =
            j.p.iter()
                .map(|s| parse_weyl(s, j.n))
                .collect::<Result<Vec<_>>>()?;
        DOperator::new(ops)
    }
}

// serde glue on the domain types themselves.

impl Serialize for HoloPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for HoloPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PolyJson::deserialize(d)?;
        HoloPoly::try_from(&j).map_err(serde::de::Error::custom)
    }
}

impl Serialize for HoloPoly64 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson::from(self).serialize(s)
    }
}

impl Serialize for MixedPoly<CRat> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MixedPoly<CRat> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PolyJson::deserialize(d)?;
        MixedPolyExact::try_from(&j).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Form<CRat> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FormJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Form<CRat> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = FormJson::deserialize(d)?;
        PForm::try_from(&j).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Form<Complex64> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FormJson::from(self).serialize(s)
    }
}

impl Serialize for DOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DOperatorJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = DOperatorJson::deserialize(d)?;
        DOperator::try_from(&j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holo_poly_round_trip() {
        let f = HoloPoly::monomial(MultiIndex::new(vec![2, 0]), CRat::from_ratio(3, 4))
            .add(&HoloPoly::monomial(MultiIndex::new(vec![0, 1]), CRat::i()));
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.contains("\"re\":\"3/4\""));
        assert!(!text.contains("zbar"));
        let back: HoloPoly = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn mixed_poly_round_trip() {
        let m = MixedPolyExact::term(
            MultiIndex::new(vec![2]),
            MultiIndex::new(vec![1]),
            CRat::from_ratio(-1, 6),
        );
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.contains("zbar"));
        let back: MixedPolyExact = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn form_round_trip_uses_one_based_keys() {
        let mut u = PForm::zero(2, 1);
        u.add_component(&[0], HoloPoly::one(2));
        u.add_component(&[1], HoloPoly::variable(2, 0));
        let text = serde_json::to_string(&u).unwrap();
        assert!(text.contains("\"1\""));
        assert!(text.contains("\"2\""));
        let back: PForm = serde_json::from_str(&text).unwrap();
        assert_eq!(back, u);
        // Two-forms join indices with a comma.
        let mut w = PForm::zero(2, 2);
        w.add_component(&[0, 1], HoloPoly::one(2));
        let text = serde_json::to_string(&w).unwrap();
        assert!(text.contains("\"1,2\""));
        let back: PForm = serde_json::from_str(&text).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn invalid_forms_are_rejected() {
        // Decreasing key
        let bad = r#"{"n":2,"p":2,"components":{"2,1":{"n":2,"terms":[]}}}"#;
        assert!(serde_json::from_str::<PForm>(bad).is_err());
        // Index out of range
        let bad = r#"{"n":2,"p":1,"components":{"3":{"n":2,"terms":[]}}}"#;
        assert!(serde_json::from_str::<PForm>(bad).is_err());
        // Decimal coefficients are rejected: the schema is decimal-free.
        let bad =
            r#"{"n":1,"p":0,"components":{"":{"n":1,"terms":[{"z":[0],"re":"0.5","im":"0"}]}}}"#;
        assert!(serde_json::from_str::<PForm>(bad).is_err());
    }

    #[test]
    fn d_operator_round_trip() {
        let d = DOperator::from_strings(&["d1*d2", "d1^2 + d2^2"]).unwrap();
        let text = serde_json::to_string(&d).unwrap();
        let back: DOperator = serde_json::from_str(&text).unwrap();
        assert_eq!(back.components(), d.components());
        // Wrong arity is rejected.
        let bad = r#"{"n":2,"p":["d1"]}"#;
        assert!(serde_json::from_str::<DOperator>(bad).is_err());
    }

    #[test]
    fn float_polys_serialize_exactly() {
        let mut f = HoloPoly64::zero(1);
        f.insert_add(MultiIndex::new(vec![1]), Complex64::new(0.5, -0.25));
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.contains("\"1/2\""));
        assert!(text.contains("\"-1/4\""));
    }
}
