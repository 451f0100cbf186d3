//! Optional JSON config file. Keys mirror the command-line flags; a flag
//! given on the command line wins over the file.

use std::path::Path;

use anyhow::Context;
use serde::Deserialize;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub solver: Option<String>,
    pub drones: Option<usize>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub base_seed: Option<u64>,
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
    pub spacing: Option<f64>,
    pub clearance: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub rho: Option<f64>,
    pub ants: Option<usize>,
    pub iterations: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                serde_json::from_str(&text)
                    .map_err(|e| anyhow::Error::new(farmcover::Error::Schema {
                        path: p.display().to_string(),
                        message: e.to_string(),
                    }))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"alpha": 2, "bogus": 1}"#).unwrap();
        assert!(FileConfig::load(Some(&p)).is_err());
        std::fs::write(&p, r#"{"alpha": 2, "iterations": 10}"#).unwrap();
        let c = FileConfig::load(Some(&p)).unwrap();
        assert_eq!(c.alpha, Some(2.0));
        assert_eq!(c.iterations, Some(10));
        assert_eq!(FileConfig::load(None).unwrap(), FileConfig::default());
    }
}
