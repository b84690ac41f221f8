use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{KripkeModel, PointedModel, PropSet};

/// On-disk model format:
/// `{"worlds":[..],"relation":[[a,b],..],"valuation":{w:[p,..]},"point":w}`.
///
/// Serialization sorts worlds, edges and valuation entries lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub worlds: Vec<String>,
    pub relation: Vec<(String, String)>,
    pub valuation: BTreeMap<String, Vec<String>>,
    pub point: String,
}

impl From<&PointedModel> for ModelFile {
    fn from(pm: &PointedModel) -> Self {
        let m = pm.model();
        let mut worlds: Vec<String> = (0..m.len()).map(|w| m.name(w).to_string()).collect();
        worlds.sort();
        let mut relation: Vec<(String, String)> = (0..m.len())
            .flat_map(|w| {
                m.successors(w)
                    .iter()
                    .map(move |&u| (m.name(w).to_string(), m.name(u).to_string()))
            })
            .collect();
        relation.sort();
        let valuation = (0..m.len())
            .map(|w| (m.name(w).to_string(), m.valuation_names(w)))
            .collect();
        ModelFile {
            worlds,
            relation,
            valuation,
            point: m.name(pm.point()).to_string(),
        }
    }
}

impl ModelFile {
    /// Builds the model. The ambient props are `props` when given (must cover
    /// every valuation entry), otherwise the names used in the valuation.
    pub fn into_model(self, props: Option<&PropSet>) -> Result<PointedModel> {
        let props = match props {
            Some(p) => p.clone(),
            None => PropSet::new(self.valuation.values().flatten().cloned())?,
        };
        let mut m = KripkeModel::new(props);
        for w in &self.worlds {
            m.add_world(w.clone(), Vec::<&str>::new())?;
        }
        for (w, names) in &self.valuation {
            let i = m
                .world(w)
                .ok_or_else(|| Error::InvalidModel(format!("valuation for unknown world `{w}`")))?;
            m.val[i] = m.props.mask_of(names)?;
        }
        for (a, b) in &self.relation {
            let (i, j) = match (m.world(a), m.world(b)) {
                (Some(i), Some(j)) => (i, j),
                _ => {
                    return Err(Error::InvalidModel(format!(
                        "edge ({a}, {b}) mentions an unknown world"
                    )))
                }
            };
            m.add_edge(i, j);
        }
        let point = m
            .world(&self.point)
            .ok_or_else(|| Error::InvalidModel(format!("point `{}` is not a world", self.point)))?;
        Ok(PointedModel::new(m, point))
    }
}

/// On-disk example set: `{"props":[..],"positive":[model..],"negative":[model..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExampleSetFile {
    pub props: Vec<String>,
    pub positive: Vec<ModelFile>,
    pub negative: Vec<ModelFile>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::{chain, single_point};

    #[test]
    fn bit_exact_format() {
        let p = PropSet::new(["p"]).unwrap();
        let m = chain(&p, &[1, 0]);
        assert_eq!(
            m.to_json(),
            r#"{"worlds":["w0","w1"],"relation":[["w0","w1"]],"valuation":{"w0":["p"],"w1":[]},"point":"w0"}"#
        );
    }

    #[test]
    fn load_errors_and_widening() {
        let text = r#"{"worlds":["w0","w1"],"relation":[["w0","w1"]],"valuation":{"w0":["p"],"w1":[]},"point":"w0"}"#;
        let m = PointedModel::from_json(text).unwrap();
        assert_eq!(m.props().len(), 1);
        assert_eq!(m.to_json(), text);

        let pq = PropSet::new(["p", "q"]).unwrap();
        let file: ModelFile = serde_json::from_str(text).unwrap();
        let wide = file.into_model(Some(&pq)).unwrap();
        assert_eq!(wide.props(), &pq);

        let bad_point = r#"{"worlds":["a"],"relation":[],"valuation":{},"point":"b"}"#;
        assert!(PointedModel::from_json(bad_point).is_err());
        let bad_edge = r#"{"worlds":["a"],"relation":[["a","c"]],"valuation":{},"point":"a"}"#;
        assert!(PointedModel::from_json(bad_edge).is_err());
        let extra = r#"{"worlds":["a"],"relation":[],"valuation":{},"point":"a","x":1}"#;
        assert!(PointedModel::from_json(extra).is_err());
        let narrow = PropSet::new(["q"]).unwrap();
        let file: ModelFile = serde_json::from_str(text).unwrap();
        assert!(file.into_model(Some(&narrow)).is_err());
        let _ = single_point(&pq, ["q"]).unwrap().to_json();
    }
}
