//! JSON instance files.
//!
//! ```json
//! { "m": 2, "n": 2,
//!   "entries": ["10", "01"],
//!   "b": ["1/2", "1/2"],
//!   "polytope": { "kind": "simplex", "dims": [2] },
//!   "meta": { "seed": 7, "p": "1/4", "rho_target": "4/1", "generator_version": "..." } }
//! ```
//!
//! `{0,1}` rows are written as strings of `0`/`1`. Rows with other entries are
//! written as arrays of `"num/den"` strings; readers accept either per row.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{InstanceMeta, PackingInstance, PolytopeDescriptor};
use crate::error::{Error, Result};
use crate::game_value::GameMatrix;
use crate::rational::{self, Rational};

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    m: usize,
    n: usize,
    entries: Vec<RowRepr>,
    b: Vec<String>,
    polytope: PolytopeRepr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<InstanceMeta>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RowRepr {
    Bits(String),
    Values(Vec<String>),
}

#[derive(Serialize, Deserialize)]
struct PolytopeRepr {
    kind: String,
    dims: Vec<usize>,
}

impl PackingInstance {
    pub fn to_json(&self) -> String {
        let binary = self.a.is_binary();
        let entries = (0..self.rows())
            .map(|i| {
                let row = self.a.row(i);
                if binary {
                    RowRepr::Bits(row.iter().map(|v| if v == &rational::one() { '1' } else { '0' }).collect())
                } else {
                    RowRepr::Values(row.iter().map(rational::format).collect())
                }
            })
            .collect();
        let polytope = match &self.polytope {
            PolytopeDescriptor::Simplex(n) => PolytopeRepr {
                kind: "simplex".into(),
                dims: vec![*n],
            },
            PolytopeDescriptor::Product(dims) => PolytopeRepr {
                kind: "product".into(),
                dims: dims.clone(),
            },
        };
        let file = InstanceFile {
            m: self.rows(),
            n: self.cols(),
            entries,
            b: self.b.iter().map(rational::format).collect(),
            polytope,
            meta: self.meta.clone(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("instance serialises");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<PackingInstance> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| {
            Error::parse(format!("instance (line {}, column {})", e.line(), e.column()), e)
        })?;
        if file.entries.len() != file.m {
            return Err(Error::parse(
                "instance field \"entries\"",
                format!("declared m = {} but found {} rows", file.m, file.entries.len()),
            ));
        }
        if file.b.len() != file.m {
            return Err(Error::parse(
                "instance field \"b\"",
                format!("declared m = {} but found {} entries", file.m, file.b.len()),
            ));
        }
        let mut values: Vec<Rational> = Vec::new();
        for (i, row) in file.entries.iter().enumerate() {
            let context = || format!("instance field \"entries\" row {i}");
            let parsed: Vec<Rational> = match row {
                RowRepr::Bits(bits) => bits
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(rational::zero()),
                        '1' => Ok(rational::one()),
                        other => Err(Error::parse(context(), format!("unexpected character {other:?}"))),
                    })
                    .collect::<Result<_>>()?,
                RowRepr::Values(vals) => vals
                    .iter()
                    .map(|t| rational::parse(t).ok_or_else(|| Error::parse(context(), format!("bad rational {t:?}"))))
                    .collect::<Result<_>>()?,
            };
            if parsed.len() != file.n {
                return Err(Error::parse(
                    context(),
                    format!("declared n = {} but row has {} entries", file.n, parsed.len()),
                ));
            }
            values.extend(parsed);
        }
        let b = file
            .b
            .iter()
            .enumerate()
            .map(|(i, t)| {
                rational::parse(t).ok_or_else(|| Error::parse(format!("instance field \"b\" entry {i}"), format!("bad rational {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let polytope = match (file.polytope.kind.as_str(), file.polytope.dims.as_slice()) {
            ("simplex", [n]) => PolytopeDescriptor::Simplex(*n),
            ("simplex", dims) => {
                return Err(Error::parse(
                    "instance field \"polytope\"",
                    format!("simplex needs exactly one dimension, got {}", dims.len()),
                ))
            }
            ("product", dims) => PolytopeDescriptor::Product(dims.to_vec()),
            (kind, _) => return Err(Error::parse("instance field \"polytope.kind\"", format!("unknown kind {kind:?}"))),
        };
        let a = GameMatrix::new(file.m, file.n, values)?;
        PackingInstance::new(a, b, polytope, file.meta)
    }
}

pub fn write_instance(path: &Path, inst: &PackingInstance) -> Result<()> {
    std::fs::write(path, inst.to_json())?;
    Ok(())
}

pub fn read_instance(path: &Path) -> Result<PackingInstance> {
    let text = std::fs::read_to_string(path)?;
    PackingInstance::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn general_entries_use_rational_rows() {
        let a = GameMatrix::from_rows(vec![vec![ratio(3, 2), ratio(0, 1)]]).unwrap();
        let inst = PackingInstance::simplex(a, vec![ratio(1, 1)]).unwrap();
        let text = inst.to_json();
        assert!(text.contains("\"3/2\""), "{text}");
        assert_eq!(PackingInstance::from_json(&text).unwrap(), inst);
    }

    #[test]
    fn rejects_dimension_mismatches() {
        let base = r#"{"m":2,"n":2,"entries":["10","01"],"b":["1/2","1/2"],"polytope":{"kind":"simplex","dims":[2]}}"#;
        assert!(PackingInstance::from_json(base).is_ok());
        for bad in [
            base.replace("\"m\":2", "\"m\":3"),
            base.replace("\"n\":2", "\"n\":3"),
            base.replace("\"01\"", "\"011\""),
            base.replace("\"01\"", "\"0x\""),
            base.replace("[\"1/2\",\"1/2\"]", "[\"1/2\"]"),
            base.replace("\"dims\":[2]", "\"dims\":[3]"),
            base.replace("\"dims\":[2]", "\"dims\":[1,1]"),
            base.replace("simplex", "cube"),
            base.replace("\"1/2\",\"1/2\"", "\"1/2\",\"0/1\""),
            base.replace("\"1/2\",\"1/2\"", "\"1/2\",\"1/0\""),
        ] {
            assert!(PackingInstance::from_json(&bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = PackingInstance::from_json("{\n \"m\": 2,\n \"n\": }").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
    }
}
