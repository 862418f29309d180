//! Surface fixtures: bundled JSON descriptions plus an override directory.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::surface::{FatGraph, GraphSpec, SurfaceError, Walk};

/// Environment variable naming a directory searched before the bundled set.
pub const FIXTURE_DIR_ENV: &str = "MONODROMY_FIXTURE_DIR";

const BUNDLED: &[(&str, &str)] = &[
    ("fig1", include_str!("../fixtures/fig1.json")),
    ("fig2", include_str!("../fixtures/fig2.json")),
    ("tri", include_str!("../fixtures/tri.json")),
    ("s031", include_str!("../fixtures/s031.json")),
    ("s041", include_str!("../fixtures/s041.json")),
    ("s032", include_str!("../fixtures/s032.json")),
    ("ann0", include_str!("../fixtures/ann0.json")),
    ("ann1", include_str!("../fixtures/ann1.json")),
    ("eye", include_str!("../fixtures/eye.json")),
];

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("no fixture named `{0}`")]
    Missing(String),
    #[error("cannot read `{path}`: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("fixture `{id}`: {source}")]
    Invalid { id: String, source: SurfaceError },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixtureSpec {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub graph: GraphSpec,
    /// Token words in matrix-product order.
    #[serde(default)]
    pub words: BTreeMap<String, Vec<String>>,
    /// Edge walks starting at a cusp edge.
    #[serde(default)]
    pub arcs: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub id: String,
    pub description: String,
    pub graph: FatGraph,
    pub words: BTreeMap<String, Walk>,
    pub arcs: BTreeMap<String, Walk>,
    /// Hex SHA-256 of the source text.
    pub hash: String,
}

impl Fixture {
    pub fn parse(id: &str, text: &str) -> Result<Fixture, FixtureError> {
        let invalid = |source| FixtureError::Invalid { id: id.to_string(), source };
        let spec: FixtureSpec =
            serde_json::from_str(text).map_err(|e| invalid(SurfaceError::Json(e.to_string())))?;
        let graph = FatGraph::build(&spec.graph).map_err(invalid)?;
        let mut words = BTreeMap::new();
        for (name, toks) in &spec.words {
            let toks: Vec<&str> = toks.iter().map(String::as_str).collect();
            words.insert(name.clone(), graph.walk_tokens(&toks).map_err(invalid)?);
        }
        let mut arcs = BTreeMap::new();
        for (name, steps) in &spec.arcs {
            let steps: Vec<&str> = steps.iter().map(String::as_str).collect();
            let w = graph.walk_steps(&steps).map_err(invalid)?;
            if !w.is_complete() {
                return Err(invalid(SurfaceError::NotRealizable(format!("arc `{name}` does not end at a cusp"))));
            }
            arcs.insert(name.clone(), w);
        }
        let hash = hex(&Sha256::digest(text.as_bytes()));
        Ok(Fixture { id: id.to_string(), description: spec.description, graph, words, arcs, hash })
    }

    pub fn from_path(path: &Path) -> Result<Fixture, FixtureError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| FixtureError::Io { path: path.display().to_string(), source })?;
        let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Fixture::parse(&id, &text)
    }

    pub fn arc(&self, name: &str) -> &Walk {
        self.arcs.get(name).or_else(|| self.words.get(name)).unwrap_or_else(|| panic!("fixture {} has no arc {name}", self.id))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn bundled_ids() -> Vec<&'static str> {
    BUNDLED.iter().map(|(id, _)| *id).collect()
}

/// Loads `id`, preferring `$MONODROMY_FIXTURE_DIR/<id>.json` when present.
pub fn load(id: &str) -> Result<Fixture, FixtureError> {
    if let Ok(dir) = std::env::var(FIXTURE_DIR_ENV) {
        let path = Path::new(&dir).join(format!("{id}.json"));
        if path.exists() {
            return Fixture::from_path(&path);
        }
    }
    let text = BUNDLED.iter().find(|(k, _)| *k == id).map(|(_, t)| *t).ok_or_else(|| FixtureError::Missing(id.into()))?;
    Fixture::parse(id, text)
}

/// Bundled fixture that is known to parse.
pub fn bundled(id: &str) -> Fixture {
    let text = BUNDLED.iter().find(|(k, _)| *k == id).map(|(_, t)| *t).expect("bundled fixture id");
    Fixture::parse(id, text).expect("bundled fixture is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_bundled_parse() {
        for id in bundled_ids() {
            if let Err(e) = Fixture::parse(id, BUNDLED.iter().find(|(k, _)| *k == id).unwrap().1) {
                panic!("{e}");
            }
        }
    }

    #[test]
    fn missing_fixture() {
        assert!(matches!(load("nope"), Err(FixtureError::Missing(_))));
    }
}
