//! JSON documents for descriptors, endomorphisms and closed forms.
//!
//! Every integer and rational is a decimal string (`"12"`, `"-3/4"`), each
//! object carries a `"type"` discriminator, and unknown fields are
//! rejected.
//!
//! ```json
//! {"type": "seifert_fibered", "fiber_action": "reversing",
//!  "base": {"type": "periodic", "period": "2", "nielsen": {"1": "1", "2": "3"}}}
//! ```

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::descriptor::{FiberAction, MapDescriptor, MarkovTerm, Piece, Sign};
use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::radical::{Polynomial, RadicalExpr};
use crate::series::Rational;
use crate::twisted::{FreeEndomorphism, MappingTorus};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DescriptorDocument {
    Periodic {
        period: String,
        nielsen: BTreeMap<String, String>,
    },
    TorusLinear {
        matrix: Vec<Vec<String>>,
    },
    SubshiftMarkov {
        terms: Vec<TermDocument>,
    },
    SeifertFibered {
        fiber_action: FiberActionDocument,
        base: Box<DescriptorDocument>,
    },
    Decomposition {
        pieces: Vec<PieceDocument>,
    },
}

// Deserialized by hand: serde's internally tagged enums buffer their input,
// which loses both the line/column and the field path of any error. Field
// names are distinct across variants, so each one can be decoded in place
// and the variant checked once the object closes.
const VARIANTS: &[&str] = &["periodic", "torus_linear", "subshift_markov", "seifert_fibered", "decomposition"];
const FIELDS: &[&str] = &["type", "period", "nielsen", "matrix", "terms", "fiber_action", "base", "pieces"];

impl<'de> Deserialize<'de> for DescriptorDocument {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        deserializer.deserialize_map(DocumentVisitor)
    }
}

struct DocumentVisitor;

#[derive(Default)]
struct Slots {
    kind: Option<String>,
    period: Option<String>,
    nielsen: Option<BTreeMap<String, String>>,
    matrix: Option<Vec<Vec<String>>>,
    terms: Option<Vec<TermDocument>>,
    fiber_action: Option<FiberActionDocument>,
    base: Option<Box<DescriptorDocument>>,
    pieces: Option<Vec<PieceDocument>>,
}

impl<'de> serde::de::Visitor<'de> for DocumentVisitor {
    type Value = DescriptorDocument;

    fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        f.write_str("a descriptor object with a \"type\" field")
    }

    fn visit_map<A: serde::de::MapAccess<'de>>(self, mut map: A) -> std::result::Result<Self::Value, A::Error> {
        use serde::de::Error as _;
        let mut s = Slots::default();
        macro_rules! slot {
            ($field:ident, $name:literal) => {{
                if s.$field.is_some() {
                    return Err(A::Error::duplicate_field($name));
                }
                s.$field = Some(map.next_value()?);
            }};
        }
        while let Some(key) = map.next_key::<String>()? {
            match key.as_str() {
                "type" => slot!(kind, "type"),
                "period" => slot!(period, "period"),
                "nielsen" => slot!(nielsen, "nielsen"),
                "matrix" => slot!(matrix, "matrix"),
                "terms" => slot!(terms, "terms"),
                "fiber_action" => slot!(fiber_action, "fiber_action"),
                "base" => slot!(base, "base"),
                "pieces" => slot!(pieces, "pieces"),
                other => return Err(A::Error::unknown_field(other, FIELDS)),
            }
        }
        let kind = s.kind.take().ok_or_else(|| A::Error::missing_field("type"))?;
        let allowed: &[&str] = match kind.as_str() {
            "periodic" => &["period", "nielsen"],
            "torus_linear" => &["matrix"],
            "subshift_markov" => &["terms"],
            "seifert_fibered" => &["fiber_action", "base"],
            "decomposition" => &["pieces"],
            other => return Err(A::Error::unknown_variant(other, VARIANTS)),
        };
        let present = [
            ("period", s.period.is_some()),
            ("nielsen", s.nielsen.is_some()),
            ("matrix", s.matrix.is_some()),
            ("terms", s.terms.is_some()),
            ("fiber_action", s.fiber_action.is_some()),
            ("base", s.base.is_some()),
            ("pieces", s.pieces.is_some()),
        ];
        for (name, here) in present {
            if here && !allowed.contains(&name) {
                return Err(A::Error::custom(format!("field `{name}` does not belong to type `{kind}`")));
            }
        }
        macro_rules! need {
            ($field:ident, $name:literal) => {
                s.$field.take().ok_or_else(|| A::Error::missing_field($name))?
            };
        }
        Ok(match kind.as_str() {
            "periodic" => DescriptorDocument::Periodic {
                period: need!(period, "period"),
                nielsen: need!(nielsen, "nielsen"),
            },
            "torus_linear" => DescriptorDocument::TorusLinear { matrix: need!(matrix, "matrix") },
            "subshift_markov" => DescriptorDocument::SubshiftMarkov { terms: need!(terms, "terms") },
            "seifert_fibered" => DescriptorDocument::SeifertFibered {
                fiber_action: need!(fiber_action, "fiber_action"),
                base: need!(base, "base"),
            },
            _ => DescriptorDocument::Decomposition { pieces: need!(pieces, "pieces") },
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiberActionDocument {
    Preserving,
    Reversing,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDocument {
    pub matrix: Vec<Vec<String>>,
    pub sign: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDocument {
    pub return_time: String,
    pub map: DescriptorDocument,
}

fn parse_int<T: FromStr>(s: &str, field: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{field}: {s:?} is not a valid decimal integer")))
}

fn parse_matrix(rows: &[Vec<String>], field: &str) -> Result<IntMatrix> {
    let parsed = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .enumerate()
                .map(|(j, s)| parse_int::<BigInt>(s, &format!("{field}[{i}][{j}]")))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    IntMatrix::from_rows(&parsed).map_err(|e| Error::Parse(format!("{field}: {e}")))
}

fn matrix_doc(m: &IntMatrix) -> Vec<Vec<String>> {
    m.rows()
        .into_iter()
        .map(|r| r.into_iter().map(|x| x.to_string()).collect())
        .collect()
}

impl DescriptorDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc = serde_path_to_error::deserialize(&mut *de).map_err(|e| {
            let path = e.path().to_string();
            match path.as_str() {
                "." | "?" => Error::Parse(e.into_inner().to_string()),
                _ => Error::Parse(format!("at `{path}`: {}", e.into_inner())),
            }
        })?;
        de.end().map_err(|e| Error::Parse(format!("trailing input: {e}")))?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor documents always serialize")
    }

    pub fn to_descriptor(&self) -> Result<MapDescriptor> {
        self.convert("")
    }

    fn convert(&self, at: &str) -> Result<MapDescriptor> {
        Ok(match self {
            DescriptorDocument::Periodic { period, nielsen } => {
                let period = parse_int(period, &format!("{at}period"))?;
                let nielsen = nielsen
                    .iter()
                    .map(|(k, v)| {
                        Ok((
                            parse_int(k, &format!("{at}nielsen key"))?,
                            parse_int(v, &format!("{at}nielsen.{k}"))?,
                        ))
                    })
                    .collect::<Result<_>>()?;
                MapDescriptor::Periodic { period, nielsen }
            }
            DescriptorDocument::TorusLinear { matrix } => MapDescriptor::TorusLinear {
                matrix: parse_matrix(matrix, &format!("{at}matrix"))?,
            },
            DescriptorDocument::SubshiftMarkov { terms } => MapDescriptor::SubshiftMarkov {
                terms: terms
                    .iter()
                    .enumerate()
                    .map(|(i, t)| {
                        let sign = match t.sign.trim() {
                            "+1" | "1" | "+" => Sign::Plus,
                            "-1" | "-" => Sign::Minus,
                            s => return Err(Error::Parse(format!("{at}terms[{i}].sign: {s:?} must be +1 or -1"))),
                        };
                        Ok(MarkovTerm {
                            matrix: parse_matrix(&t.matrix, &format!("{at}terms[{i}].matrix"))?,
                            sign,
                        })
                    })
                    .collect::<Result<_>>()?,
            },
            DescriptorDocument::SeifertFibered { fiber_action, base } => MapDescriptor::SeifertFibered {
                fiber_action: match fiber_action {
                    FiberActionDocument::Preserving => FiberAction::Preserving,
                    FiberActionDocument::Reversing => FiberAction::Reversing,
                },
                base: Box::new(base.convert(&format!("{at}base."))?),
            },
            DescriptorDocument::Decomposition { pieces } => MapDescriptor::Decomposition {
                pieces: pieces
                    .iter()
                    .enumerate()
                    .map(|(i, p)| {
                        Ok(Piece {
                            return_time: parse_int(&p.return_time, &format!("{at}pieces[{i}].return_time"))?,
                            map: p.map.convert(&format!("{at}pieces[{i}].map."))?,
                        })
                    })
                    .collect::<Result<_>>()?,
            },
        })
    }

    pub fn from_descriptor(d: &MapDescriptor) -> Self {
        match d {
            MapDescriptor::Periodic { period, nielsen } => DescriptorDocument::Periodic {
                period: period.to_string(),
                nielsen: nielsen.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            },
            MapDescriptor::TorusLinear { matrix } => DescriptorDocument::TorusLinear {
                matrix: matrix_doc(matrix),
            },
            MapDescriptor::SubshiftMarkov { terms } => DescriptorDocument::SubshiftMarkov {
                terms: terms
                    .iter()
                    .map(|t| TermDocument {
                        matrix: matrix_doc(&t.matrix),
                        sign: match t.sign {
                            Sign::Plus => "+1".into(),
                            Sign::Minus => "-1".into(),
                        },
                    })
                    .collect(),
            },
            MapDescriptor::SeifertFibered { fiber_action, base } => DescriptorDocument::SeifertFibered {
                fiber_action: match fiber_action {
                    FiberAction::Preserving => FiberActionDocument::Preserving,
                    FiberAction::Reversing => FiberActionDocument::Reversing,
                },
                base: Box::new(Self::from_descriptor(base)),
            },
            MapDescriptor::Decomposition { pieces } => DescriptorDocument::Decomposition {
                pieces: pieces
                    .iter()
                    .map(|p| PieceDocument {
                        return_time: p.return_time.to_string(),
                        map: Self::from_descriptor(&p.map),
                    })
                    .collect(),
            },
        }
    }
}

/// Parses and converts a descriptor document in one step.
pub fn parse_descriptor(text: &str) -> Result<MapDescriptor> {
    DescriptorDocument::from_json(text)?.to_descriptor()
}

pub fn descriptor_to_json(d: &MapDescriptor) -> String {
    DescriptorDocument::from_descriptor(d).to_json()
}

/// `{"type": "endomorphism", "map": "a -> a b, b -> a", "inverse": "a -> b, b -> b^-1 a"}`
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndomorphismTag {
    #[serde(rename = "endomorphism")]
    Endomorphism,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadicalTag {
    #[serde(rename = "radical")]
    Radical,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndomorphismDocument {
    #[serde(rename = "type")]
    pub kind: EndomorphismTag,
    pub map: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse: Option<String>,
}

impl EndomorphismDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_torus(&self) -> Result<MappingTorus> {
        let phi: FreeEndomorphism = self.map.parse()?;
        match &self.inverse {
            Some(inv) => MappingTorus::with_inverse(phi, inv.parse()?),
            None => Ok(MappingTorus::new(phi)),
        }
    }
}

/// One factor `poly^exponent` of a machine-readable closed form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorDocument {
    /// Coefficients, constant term first.
    pub poly: Vec<String>,
    pub exponent: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadicalDocument {
    #[serde(rename = "type")]
    pub kind: RadicalTag,
    pub text: String,
    pub rational: bool,
    pub factors: Vec<FactorDocument>,
}

impl RadicalDocument {
    pub fn from_expr(e: &RadicalExpr) -> Self {
        RadicalDocument {
            kind: RadicalTag::Radical,
            text: e.to_string(),
            rational: e.is_rational(),
            factors: e
                .factors()
                .map(|(p, x)| FactorDocument {
                    poly: p.coeffs().iter().map(|c| c.to_string()).collect(),
                    exponent: x.to_string(),
                })
                .collect(),
        }
    }

    pub fn to_expr(&self) -> Result<RadicalExpr> {
        let mut e = RadicalExpr::one();
        for (i, f) in self.factors.iter().enumerate() {
            let coeffs = f
                .poly
                .iter()
                .map(|c| parse_int::<BigInt>(c, &format!("factors[{i}].poly")))
                .collect::<Result<Vec<_>>>()?;
            let exponent: Rational = f
                .exponent
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("factors[{i}].exponent: {:?} is not a rational", f.exponent)))?;
            e.insert(Polynomial::new(coeffs), exponent);
        }
        Ok(e)
    }
}
