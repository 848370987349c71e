use std::fmt::Write as _;

use serde::Serialize;

use crate::exact::{Inclusion, Rational, TraceForm};

/// Bipartite multiplicity graph of an inclusion. Even vertices are the
/// blocks of the smaller algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BratteliGraph {
    pub even_vertices: Vec<String>,
    pub odd_vertices: Vec<String>,
    /// `multiplicities[i][j]` edges from even vertex `i` to odd vertex `j`.
    pub multiplicities: Vec<Vec<u64>>,
    /// Trace of a minimal projection in each block.
    pub even_weights: Vec<Rational>,
    pub odd_weights: Vec<Rational>,
}

#[derive(Serialize)]
struct VertexJson<'a> {
    id: String,
    label: &'a str,
    weight: String,
}

fn vertices_json<'a>(prefix: &str, labels: &'a [String], weights: &[Rational]) -> Vec<VertexJson<'a>> {
    labels
        .iter()
        .zip(weights)
        .enumerate()
        .map(|(i, (label, w))| VertexJson { id: format!("{prefix}{i}"), label, weight: w.to_string() })
        .collect()
}

#[derive(Serialize)]
struct EdgeJson {
    from: String,
    to: String,
    multiplicity: u64,
}

#[derive(Serialize)]
struct GraphJson<'a> {
    even: Vec<VertexJson<'a>>,
    odd: Vec<VertexJson<'a>>,
    edges: Vec<EdgeJson>,
}

impl BratteliGraph {
    /// Graph of a computed inclusion; weights come from `trace`.
    pub fn from_inclusion(inc: &Inclusion, trace: &TraceForm) -> Self {
        let weight = |b: &crate::exact::Block| trace.eval(&b.projection) / Rational::from_integer(b.size.into());
        BratteliGraph {
            even_vertices: (0..inc.sub_blocks.len()).map(|i| format!("b{}", i + 1)).collect(),
            odd_vertices: (0..inc.amb_blocks.len()).map(|j| format!("b{}", j + 1)).collect(),
            multiplicities: inc.multiplicities.clone(),
            even_weights: inc.sub_blocks.iter().map(weight).collect(),
            odd_weights: inc.amb_blocks.iter().map(weight).collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.even_vertices.len() + self.odd_vertices.len()
    }

    pub fn edge_count(&self) -> u64 {
        self.multiplicities.iter().flatten().sum()
    }

    /// The reflected graph with the two vertex classes swapped.
    pub fn transpose(&self) -> Self {
        let rows = self.odd_vertices.len();
        let multiplicities = (0..rows)
            .map(|j| self.multiplicities.iter().map(|row| row[j]).collect())
            .collect();
        BratteliGraph {
            even_vertices: self.odd_vertices.clone(),
            odd_vertices: self.even_vertices.clone(),
            multiplicities,
            even_weights: self.odd_weights.clone(),
            odd_weights: self.even_weights.clone(),
        }
    }

    pub fn is_connected(&self) -> bool {
        let m = self.even_vertices.len();
        let mut uf = crate::exact::UnionFind::new(m + self.odd_vertices.len());
        for (i, row) in self.multiplicities.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if x > 0 {
                    uf.union(i, m + j);
                }
            }
        }
        uf.count() == 1
    }

    /// DOT digraph, one edge line per unit of multiplicity.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph bratteli {\n  rankdir=LR;\n");
        for (prefix, labels, weights) in [
            ("e", &self.even_vertices, &self.even_weights),
            ("o", &self.odd_vertices, &self.odd_weights),
        ] {
            for (i, (label, w)) in labels.iter().zip(weights).enumerate() {
                let _ = writeln!(s, "  {prefix}{i} [label=\"{label}\\n{w}\"];");
            }
        }
        for (i, row) in self.multiplicities.iter().enumerate() {
            for (j, &mult) in row.iter().enumerate() {
                for _ in 0..mult {
                    let _ = writeln!(s, "  e{i} -> o{j};");
                }
            }
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let edges = self
            .multiplicities
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter().enumerate().filter(|(_, m)| **m > 0).map(move |(j, &m)| EdgeJson {
                    from: format!("e{i}"),
                    to: format!("o{j}"),
                    multiplicity: m,
                })
            })
            .collect();
        let g = GraphJson {
            even: vertices_json("e", &self.even_vertices, &self.even_weights),
            odd: vertices_json("o", &self.odd_vertices, &self.odd_weights),
            edges,
        };
        serde_json::to_value(g).expect("plain data serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    fn path() -> BratteliGraph {
        BratteliGraph {
            even_vertices: vec!["x".into()],
            odd_vertices: vec!["y".into(), "z".into()],
            multiplicities: vec![vec![2, 1]],
            even_weights: vec![q(1, 3)],
            odd_weights: vec![q(1, 3), q(1, 3)],
        }
    }

    #[test]
    fn dot_repeats_parallel_edges() {
        let dot = path().to_dot();
        assert_eq!(dot.matches("e0 -> o0;").count(), 2);
        assert_eq!(dot.matches("->").count(), 3);
        assert!(dot.contains("e0 [label=\"x\\n1/3\"]"));
    }

    #[test]
    fn transpose_swaps_sides() {
        let t = path().transpose();
        assert_eq!(t.multiplicities, vec![vec![2], vec![1]]);
        assert_eq!(t.transpose(), path());
        assert!(path().is_connected());
        assert_eq!(path().edge_count(), 3);
    }

    #[test]
    fn json_lists_edges_with_multiplicity() {
        let j = path().to_json();
        assert_eq!(j["edges"][0]["multiplicity"], 2);
        assert_eq!(j["odd"][1]["id"], "o1");
    }
}
