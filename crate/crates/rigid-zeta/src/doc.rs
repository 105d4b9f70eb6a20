//! JSON curve-input documents (schema "rigid-zeta/1").  Big integers are
//! decimal strings; plain JSON numbers are also accepted on input.

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::curve::{BiPoly, REntry, RMat};
use crate::error::Error;
use crate::padic::{LaurentPoly, PadicContext, ZqPoly};

pub const SCHEMA: &str = "rigid-zeta/1";

/// Arbitrary-precision integer that serializes as a decimal string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonInt(pub BigInt);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => s
                .parse::<BigInt>()
                .map(JsonInt)
                .map_err(|e| D::Error::custom(format!("bad integer {s:?}: {e}"))),
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(JsonInt(BigInt::from(i)))
                } else {
                    Err(D::Error::custom(format!("non-integer number {n}")))
                }
            }
            other => Err(D::Error::custom(format!("expected integer, got {other}"))),
        }
    }
}

/// Z_q coefficient: coordinates with respect to 1, t, .., t^{n-1}.
pub type JsonZq = Vec<JsonInt>;

/// Laurent polynomial numerator: coeffs[k] is the coefficient of
/// x^{xshift + k}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonLaurent {
    #[serde(default)]
    pub xshift: i64,
    pub coeffs: Vec<JsonZq>,
}

/// Matrix entry num / r^rpow.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonEntry {
    pub num: JsonLaurent,
    #[serde(default)]
    pub rpow: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveDocument {
    pub schema: String,
    pub p: JsonInt,
    pub n: usize,
    /// Monic defining polynomial of Z_q, ascending, length n+1; omitted for
    /// the default choice.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_mod: Option<Vec<JsonInt>>,
    /// q[ydeg][xdeg] = Z_q coefficient of x^xdeg y^ydeg.
    pub q: Vec<Vec<JsonZq>>,
    pub w0: Vec<Vec<JsonEntry>>,
    pub winf: Vec<Vec<JsonEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e0: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub einf: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_margin: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_depth: Option<usize>,
}

impl CurveDocument {
    pub fn from_json(text: &str) -> Result<CurveDocument, Error> {
        let doc: CurveDocument =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.schema != SCHEMA {
            return Err(Error::Parse(format!(
                "unsupported schema {:?}, expected {SCHEMA:?}",
                doc.schema
            )));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn prime(&self) -> Result<BigUint, Error> {
        self.p
            .0
            .to_biguint()
            .ok_or_else(|| Error::Parse("p must be positive".into()))
    }

    /// Build the p-adic context at the given working precision.
    pub fn context(&self, precision: u32) -> Result<PadicContext, Error> {
        let p = self.prime()?;
        let f_mod = match &self.f_mod {
            None => None,
            Some(v) => {
                let m = BigInt::from(p.pow(precision.max(1)));
                Some(
                    v.iter()
                        .map(|c| (((&c.0 % &m) + &m) % &m).to_biguint().unwrap())
                        .collect(),
                )
            }
        };
        PadicContext::new(&p, self.n, precision, f_mod).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn bi_poly(&self, ctx: &PadicContext) -> Result<BiPoly, Error> {
        if self.q.is_empty() {
            return Err(Error::Parse("Q must be nonempty".into()));
        }
        let mut ycoeffs = vec![];
        for row in &self.q {
            let ints: Vec<Vec<BigInt>> = row.iter().map(|c| c.iter().map(|x| x.0.clone()).collect()).collect();
            let mut coeffs = vec![];
            for c in ints {
                coeffs.push(ctx.from_int_coeffs(&c));
            }
            let mut p = ZqPoly { coeffs };
            p.trim(ctx);
            ycoeffs.push(p);
        }
        Ok(BiPoly { ycoeffs })
    }

    pub fn matrix(&self, which: &[Vec<JsonEntry>], ctx: &PadicContext) -> Result<RMat, Error> {
        let mut out = vec![];
        for row in which {
            let mut orow = vec![];
            for e in row {
                let ints: Vec<Vec<BigInt>> = e
                    .num
                    .coeffs
                    .iter()
                    .map(|c| c.iter().map(|x| x.0.clone()).collect())
                    .collect();
                let mut coeffs = vec![];
                for c in ints {
                    coeffs.push(ctx.from_int_coeffs(&c));
                }
                let mut poly = ZqPoly { coeffs };
                poly.trim(ctx);
                let mut entry = REntry {
                    num: LaurentPoly {
                        poly,
                        shift: e.num.xshift,
                    },
                    rpow: e.rpow,
                };
                entry.num.normalize(ctx);
                orow.push(entry);
            }
            out.push(orow);
        }
        Ok(out)
    }

    /// Document for a builtin hyperelliptic model y^2 = f(x).
    pub fn hyperelliptic(p: &BigUint, n: usize, f_coeffs: &[BigInt]) -> CurveDocument {
        let d = f_coeffs.len() - 1;
        let half = (d as i64 + 1) / 2;
        let to_zq = |v: BigInt| -> JsonZq {
            let mut z = vec![JsonInt(v)];
            z.resize(n.max(1), JsonInt(BigInt::zero()));
            z
        };
        let q = vec![
            f_coeffs.iter().map(|c| to_zq(-c.clone())).collect(),
            vec![to_zq(BigInt::zero())],
            vec![to_zq(BigInt::from(1))],
        ];
        let one_entry = JsonEntry {
            num: JsonLaurent {
                xshift: 0,
                coeffs: vec![to_zq(BigInt::from(1))],
            },
            rpow: 0,
        };
        let zero_entry = JsonEntry {
            num: JsonLaurent {
                xshift: 0,
                coeffs: vec![],
            },
            rpow: 0,
        };
        let scaled = JsonEntry {
            num: JsonLaurent {
                xshift: -half,
                coeffs: vec![to_zq(BigInt::from(1))],
            },
            rpow: 0,
        };
        CurveDocument {
            schema: SCHEMA.to_string(),
            p: JsonInt(BigInt::from(p.clone())),
            n,
            f_mod: None,
            q,
            w0: vec![
                vec![one_entry.clone(), zero_entry.clone()],
                vec![zero_entry.clone(), one_entry.clone()],
            ],
            winf: vec![
                vec![one_entry, zero_entry.clone()],
                vec![zero_entry, scaled],
            ],
            e0: None,
            einf: None,
            precision_margin: None,
            oracle_depth: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_hyperelliptic_document() {
        let p = BigUint::from(5u8);
        let f: Vec<BigInt> = [1, 1, 0, 1].iter().map(|&c| BigInt::from(c)).collect();
        let doc = CurveDocument::hyperelliptic(&p, 1, &f);
        let text = doc.to_json();
        let doc2 = CurveDocument::from_json(&text).unwrap();
        assert_eq!(doc2.n, 1);
        assert_eq!(doc2.p.0, BigInt::from(5));
        assert_eq!(doc2.q.len(), 3);
        // numbers are also accepted
        let raw = text.replace("\"5\"", "5");
        let doc3 = CurveDocument::from_json(&raw).unwrap();
        assert_eq!(doc3.p.0, BigInt::from(5));
    }
}
