use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::network::{Label, Network, VertexAttributes};

/// A TU-format graph collection: undirected unit-weight graphs with class
/// labels and, when present, discrete node labels.
#[derive(Debug, Clone)]
pub struct TuDataset {
    pub name: String,
    pub graphs: Vec<Network>,
    pub labels: Vec<i64>,
}

fn read(dir: &Path, name: &str, suffix: &str) -> Result<Option<(PathBuf, String)>> {
    let path = dir.join(format!("{name}_{suffix}.txt"));
    match fs::read_to_string(&path) {
        Ok(text) => Ok(Some((path, text))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn require(dir: &Path, name: &str, suffix: &str) -> Result<(PathBuf, String)> {
    read(dir, name, suffix)?.ok_or_else(|| Error::MissingFile(dir.join(format!("{name}_{suffix}.txt"))))
}

/// Nonblank lines with their 1-based line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn integer(path: &Path, line: usize, field: &str) -> Result<i64> {
    field.trim().parse().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line: Some(line),
        message: format!("expected an integer, found `{}`", field.trim()),
    })
}

/// 1-based id in `1..=n` to a 0-based index.
fn index(path: &Path, line: usize, value: i64, n: usize) -> Result<usize> {
    if value >= 1 && (value as u64) <= n as u64 {
        Ok(value as usize - 1)
    } else {
        Err(Error::IndexError {
            path: path.to_path_buf(),
            line,
            index: value.max(0) as usize,
        })
    }
}

/// Reads `<name>_A.txt`, `<name>_graph_indicator.txt`,
/// `<name>_graph_labels.txt` and optionally `<name>_node_labels.txt` from
/// `dir`. Edges are made undirected; repeated edges collapse.
pub fn parse_tu_dataset(dir: impl AsRef<Path>, name: &str) -> Result<TuDataset> {
    let dir = dir.as_ref();
    let (ind_path, ind_text) = require(dir, name, "graph_indicator")?;
    let (lab_path, lab_text) = require(dir, name, "graph_labels")?;
    let (a_path, a_text) = require(dir, name, "A")?;
    let node_labels = read(dir, name, "node_labels")?;

    let labels = lines(&lab_text)
        .map(|(ln, l)| integer(&lab_path, ln, l))
        .collect::<Result<Vec<_>>>()?;
    let n_graphs = labels.len();

    let graph_of = lines(&ind_text)
        .map(|(ln, l)| index(&ind_path, ln, integer(&ind_path, ln, l)?, n_graphs))
        .collect::<Result<Vec<_>>>()?;
    let n_nodes = graph_of.len();

    // Local index of each node inside its graph.
    let mut sizes = vec![0usize; n_graphs];
    let local: Vec<usize> = graph_of
        .iter()
        .map(|&g| {
            sizes[g] += 1;
            sizes[g] - 1
        })
        .collect();

    let mut weights: Vec<DMatrix<f64>> = sizes.iter().map(|&s| DMatrix::zeros(s, s)).collect();
    for (ln, l) in lines(&a_text) {
        let mut parts = l.split(',');
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse {
                path: a_path.clone(),
                line: Some(ln),
                message: "expected `u, v`".into(),
            });
        };
        let u = index(&a_path, ln, integer(&a_path, ln, a)?, n_nodes)?;
        let v = index(&a_path, ln, integer(&a_path, ln, b)?, n_nodes)?;
        if graph_of[u] != graph_of[v] {
            return Err(Error::CrossGraphEdge {
                u: u + 1,
                v: v + 1,
                graph_u: graph_of[u] + 1,
                graph_v: graph_of[v] + 1,
            });
        }
        let w = &mut weights[graph_of[u]];
        w[(local[u], local[v])] = 1.0;
        w[(local[v], local[u])] = 1.0;
    }

    let mut node_attr: Vec<Vec<Label>> = sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
    if let Some((path, text)) = &node_labels {
        let values = lines(text)
            .map(|(ln, l)| integer(path, ln, l))
            .collect::<Result<Vec<_>>>()?;
        if values.len() != n_nodes {
            return Err(Error::Parse {
                path: path.clone(),
                line: None,
                message: format!("{} node labels for {n_nodes} nodes", values.len()),
            });
        }
        for (node, value) in values.into_iter().enumerate() {
            node_attr[graph_of[node]].push(Label::Int(value));
        }
    }

    let graphs = weights
        .into_iter()
        .zip(node_attr)
        .map(|(w, attrs)| {
            let g = Network::from_weight_matrix(w, false)?;
            if node_labels.is_some() {
                g.with_attributes(VertexAttributes {
                    labels: Some(attrs),
                    embedding: None,
                })
            } else {
                Ok(g)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TuDataset {
        name: name.to_owned(),
        graphs,
        labels,
    })
}
