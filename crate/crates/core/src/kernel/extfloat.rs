//! Serde helpers writing non-finite floats as the strings `"inf"`, `"-inf"`, `"nan"`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ext(pub f64);

impl Serialize for Ext {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_finite() {
            s.serialize_f64(v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Repr {
    Num(f64),
    Text(String),
}

impl<'de> Deserialize<'de> for Ext {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(Ext(v)),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(Ext(f64::INFINITY)),
                "-inf" => Ok(Ext(f64::NEG_INFINITY)),
                "nan" => Ok(Ext(f64::NAN)),
                other => Err(D::Error::custom(format!(
                    "expected a number, \"inf\", \"-inf\" or \"nan\", got {other:?}"
                ))),
            },
        }
    }
}

pub mod pairs {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[(f64, f64)], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|&(a, b)| (Ext(a), Ext(b))))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(f64, f64)>, D::Error> {
        Ok(Vec::<(Ext, Ext)>::deserialize(d)?
            .into_iter()
            .map(|(a, b)| (a.0, b.0))
            .collect())
    }
}

pub mod triples {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[(u32, u32, f64)], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|&(a, b, c)| (a, b, Ext(c))))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(u32, u32, f64)>, D::Error> {
        Ok(Vec::<(u32, u32, Ext)>::deserialize(d)?
            .into_iter()
            .map(|(a, b, c)| (a, b, c.0))
            .collect())
    }
}

pub mod single {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        Ext(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Ext::deserialize(d)?.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Doc {
        #[serde(with = "pairs")]
        trace: Vec<(f64, f64)>,
    }

    #[test]
    fn non_finite_values_round_trip() {
        let doc = Doc {
            trace: vec![(1.0, f64::INFINITY), (2.0, f64::NEG_INFINITY), (0.1, 0.3)],
        };
        let s = serde_json::to_string(&doc).unwrap();
        assert_eq!(s, r#"{"trace":[[1.0,"inf"],[2.0,"-inf"],[0.1,0.3]]}"#);
        assert_eq!(serde_json::from_str::<Doc>(&s).unwrap(), doc);
        assert!(serde_json::from_str::<Doc>(r#"{"trace":[[1.0,"big"]]}"#).is_err());
    }
}
