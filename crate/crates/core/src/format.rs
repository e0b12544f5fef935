//! JSON file format for algebras.
//!
//! ```json
//! {"name": "C3", "size": 3,
//!  "signature": [{"name": "mul", "arity": 2}],
//!  "tables": {"mul": [0,0,0, 0,1,1, 0,1,2]}}
//! ```
//!
//! Tables are flat and row-major with the first argument most significant:
//! the entry for `(a₁,…,a_k)` sits at index `Σ aⱼ·n^(k−j)`. Constants are
//! one-entry tables. An optional `provenance` object is carried through
//! unchanged.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{Algebra, ElemId, Signature, Symbol};
use crate::constructions::UltraproductAlgebra;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub name: String,
    pub size: usize,
    pub signature: Vec<Symbol>,
    pub tables: IndexMap<String, Vec<ElemId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Value>,
}

impl AlgebraFile {
    pub fn from_algebra(a: &Algebra) -> Self {
        let tables = a
            .signature()
            .symbols()
            .iter()
            .enumerate()
            .map(|(op, s)| (s.name.clone(), a.table(op).to_vec()))
            .collect();
        AlgebraFile {
            name: a.name().to_string(),
            size: a.size(),
            signature: a.signature().symbols().to_vec(),
            tables,
            provenance: None,
        }
    }

    pub fn with_provenance(mut self, provenance: Value) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn to_algebra(&self) -> Result<Algebra> {
        let signature = Signature::new(self.signature.clone())?;
        Algebra::from_named_tables(
            self.name.clone(),
            signature,
            self.size,
            self.tables.iter().map(|(k, v)| (k.clone(), v.clone())),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("algebra file serializes")
    }
}

pub fn parse_algebra_file(text: &str) -> Result<AlgebraFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn algebra_from_json(text: &str) -> Result<Algebra> {
    parse_algebra_file(text)?.to_algebra()
}

pub fn algebra_to_json(a: &Algebra) -> String {
    AlgebraFile::from_algebra(a).to_json()
}

/// Factors, ultrafilter and the coordinates of every class representative.
pub fn ultraproduct_provenance(up: &UltraproductAlgebra) -> Value {
    let representatives: Vec<Vec<ElemId>> = (0..up.size())
        .map(|c| up.product().decode(up.representative(c)))
        .collect();
    json!({
        "construction": "ultraproduct",
        "factors": up.factors().iter().map(AlgebraFile::from_algebra).collect::<Vec<_>>(),
        "ultrafilter": up.ultrafilter().label(),
        "ultrafilter_members": up
            .ultrafilter()
            .members()
            .iter()
            .map(|m| m.elements())
            .collect::<Vec<_>>(),
        "representatives": representatives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::ultraproduct;
    use crate::corpus;
    use crate::ultrafilter::Ultrafilter;

    #[test]
    fn roundtrip_corpus() {
        for a in corpus::all() {
            let text = algebra_to_json(&a);
            assert_eq!(algebra_from_json(&text).unwrap(), a, "{}", a.name());
        }
    }

    #[test]
    fn layout_is_first_argument_major() {
        let text = r#"{"name":"G","size":2,"signature":[{"name":"f","arity":2}],
                       "tables":{"f":[0,0,1,0]}}"#;
        let g = algebra_from_json(text).unwrap();
        assert_eq!(g.apply("f", &[1, 0]).unwrap(), 1);
        assert_eq!(g.apply("f", &[0, 1]).unwrap(), 0);
    }

    #[test]
    fn table_order_follows_signature() {
        let text = r#"{"name":"L","size":2,
            "signature":[{"name":"meet","arity":2},{"name":"join","arity":2}],
            "tables":{"join":[0,1,1,1],"meet":[0,0,0,1]}}"#;
        let l = algebra_from_json(text).unwrap();
        assert_eq!(l, corpus::l2().with_name("L"));
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(algebra_from_json("{"), Err(Error::Parse(_))));
        let missing = r#"{"name":"X","size":2,"signature":[{"name":"f","arity":1}],"tables":{}}"#;
        assert_eq!(
            algebra_from_json(missing).unwrap_err(),
            Error::MissingTable("f".into())
        );
        let range =
            r#"{"name":"X","size":2,"signature":[{"name":"f","arity":1}],"tables":{"f":[0,2]}}"#;
        assert!(matches!(
            algebra_from_json(range),
            Err(Error::EntryOutOfRange { .. })
        ));
        let short =
            r#"{"name":"X","size":2,"signature":[{"name":"f","arity":2}],"tables":{"f":[0,1]}}"#;
        assert!(matches!(
            algebra_from_json(short),
            Err(Error::TableLength { .. })
        ));
        let extra = r#"{"name":"X","size":1,"signature":[],"tables":{"g":[0]}}"#;
        assert_eq!(
            algebra_from_json(extra).unwrap_err(),
            Error::UnexpectedTable("g".into())
        );
    }

    #[test]
    fn provenance_survives_roundtrip() {
        let c3 = corpus::c3();
        let up = ultraproduct(
            &[c3.clone(), c3.clone()],
            &Ultrafilter::principal(2, 1).unwrap(),
        )
        .unwrap();
        let file =
            AlgebraFile::from_algebra(up.algebra()).with_provenance(ultraproduct_provenance(&up));
        let back = parse_algebra_file(&file.to_json()).unwrap();
        assert_eq!(back, file);
        let prov = back.provenance.clone().unwrap();
        assert_eq!(prov["ultrafilter"], "principal:1");
        assert_eq!(prov["representatives"], json!([[0, 0], [0, 1], [0, 2]]));
        assert_eq!(back.to_algebra().unwrap(), *up.algebra());
    }
}
