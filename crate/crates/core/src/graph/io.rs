//! Plain-text edge lists.
//!
//! ```text
//! n 3 directed
//! pos 0 0.25 0.5
//! 0 1
//! 1 2
//! ```
//!
//! The header comes first. `pos` lines are optional but, when present, must
//! cover every node. Blank lines and `#` comments are ignored.

use std::fmt::Write;

use super::{Graph, GraphError};

pub fn write_edge_list(g: &Graph) -> String {
    let mut s = String::new();
    writeln!(s, "n {} directed", g.n()).unwrap();
    if let Some(pos) = g.positions() {
        for (i, [x, y]) in pos.iter().enumerate() {
            writeln!(s, "pos {i} {x} {y}").unwrap();
        }
    }
    for (i, j) in g.edges() {
        writeln!(s, "{i} {j}").unwrap();
    }
    s
}

pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let err = |line: usize, msg: &str| GraphError::Parse {
        line,
        msg: msg.to_string(),
    };
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    let mut positions: Vec<Option<[f64; 2]>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        match (n, fields.as_slice()) {
            (None, ["n", count, "directed"]) => {
                let count: usize = count.parse().map_err(|_| err(line, "bad node count"))?;
                n = Some(count);
                positions = vec![None; count];
            }
            (None, _) => return Err(err(line, "expected header `n <count> directed`")),
            (Some(_), ["n", ..]) => return Err(err(line, "duplicate header")),
            (Some(count), ["pos", i, x, y]) => {
                let i: usize = i.parse().map_err(|_| err(line, "bad node index"))?;
                let x: f64 = x.parse().map_err(|_| err(line, "bad coordinate"))?;
                let y: f64 = y.parse().map_err(|_| err(line, "bad coordinate"))?;
                if i >= count {
                    return Err(err(line, "position for unknown node"));
                }
                positions[i] = Some([x, y]);
            }
            (Some(_), [i, j]) => {
                let i: usize = i.parse().map_err(|_| err(line, "bad node index"))?;
                let j: usize = j.parse().map_err(|_| err(line, "bad node index"))?;
                edges.push((i, j));
            }
            (Some(_), _) => return Err(err(line, "unrecognized line")),
        }
    }
    let n = n.ok_or_else(|| err(0, "missing header"))?;
    let graph = Graph::from_edges(n, edges)?;
    if positions.iter().all(Option::is_none) {
        return Ok(graph);
    }
    let positions: Option<Vec<[f64; 2]>> = positions.into_iter().collect();
    match positions {
        Some(p) => graph.with_positions(p),
        None => Err(err(0, "positions given for only some nodes")),
    }
}
