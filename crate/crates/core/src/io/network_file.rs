use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Network, VertexAttributes};

/// On-disk form of a [`Network`].
///
/// ```json
/// {"n": 2, "directed": true, "edges": [[0, 1, 1.0], [1, 0, 1.0]]}
/// ```
///
/// Undirected networks list each edge once with `u ≤ v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub n: usize,
    pub directed: bool,
    pub edges: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "VertexAttributes::is_empty")]
    pub attributes: VertexAttributes,
}

impl NetworkFile {
    pub fn from_network(net: &Network) -> Self {
        let edges = net
            .edges()
            .filter(|&(u, v, _)| net.is_directed() || u <= v)
            .collect();
        NetworkFile {
            n: net.n(),
            directed: net.is_directed(),
            edges,
            attributes: net.attributes().clone(),
        }
    }

    pub fn into_network(self) -> Result<Network> {
        Network::build(self.n, &self.edges, self.directed, self.attributes)
    }
}

/// Parses a JSON document. `path` is used only in error messages.
pub fn network_from_json(text: &str, path: &Path) -> Result<Network> {
    let file: NetworkFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: Some(e.line()),
        message: e.to_string(),
    })?;
    file.into_network().map_err(|e| Error::InvariantViolation {
        path: path.to_path_buf(),
        source: Box::new(e),
    })
}

pub fn parse_network_file(path: impl AsRef<Path>) -> Result<Network> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
        _ => Error::Io(e),
    })?;
    network_from_json(&text, path)
}

/// Pretty-printed JSON document.
pub fn network_to_json(net: &Network) -> String {
    serde_json::to_string_pretty(&NetworkFile::from_network(net)).expect("network documents always serialize")
}

pub fn write_network_file(net: &Network, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, network_to_json(net) + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycle() {
        let g = network_from_json(r#"{"n":2,"directed":true,"edges":[[0,1,1],[1,0,2.5]]}"#, Path::new("x")).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.weight(1, 0), 2.5);
    }

    #[test]
    fn negative_weight_names_edge() {
        let err = network_from_json(r#"{"n":2,"directed":false,"edges":[[0,1,-1]]}"#, Path::new("g.json")).unwrap_err();
        assert_eq!(err.kind(), "InvariantViolation");
        assert!(err.to_string().contains("(0, 1)"), "{err}");
    }

    #[test]
    fn syntax_error_has_line() {
        let err = network_from_json("{\n\"n\": 2,\n oops}", Path::new("g.json")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: Some(3), .. }), "{err:?}");
    }
}
