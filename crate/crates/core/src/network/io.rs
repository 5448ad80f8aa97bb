//! Text dump/load for finite networks.
//!
//! ```text
//! # household-network v1
//! n 9
//! d_c 3
//! d_h 2
//! adjacency
//! 0: 1,2,4
//! ...
//! households
//! 0: 0,1,2
//! ...
//! ```
//!
//! The loader validates structure (dense ids, symmetry, household partition)
//! and reports malformed input as [`Error::Parse`] rather than panicking.

use super::{HouseholdNet, NetworkParams};
use crate::error::{Error, Result};
use crate::NodeId;
use std::io::{BufRead, Write};
use std::path::Path;

const HEADER: &str = "# household-network v1";

pub fn write_network(g: &HouseholdNet, w: &mut impl Write) -> Result<()> {
    let p = g.params();
    writeln!(w, "{HEADER}")?;
    writeln!(w, "n {}", p.n)?;
    writeln!(w, "d_c {}", p.d_c)?;
    writeln!(w, "d_h {}", p.d_h)?;
    writeln!(w, "adjacency")?;
    for (v, nb) in g.adjacency().iter().enumerate() {
        let list: Vec<String> = nb.iter().map(|u| u.to_string()).collect();
        writeln!(w, "{}: {}", v, list.join(","))?;
    }
    writeln!(w, "households")?;
    for (h, members) in g.households().iter().enumerate() {
        let list: Vec<String> = members.iter().map(|u| u.to_string()).collect();
        writeln!(w, "{}: {}", h, list.join(","))?;
    }
    Ok(())
}

pub fn save_network(g: &HouseholdNet, path: impl AsRef<Path>) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_network(g, &mut f)
}

fn parse_kv(line: &str, key: &str, lineno: usize) -> Result<usize> {
    let rest = line
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| Error::parse("network", lineno, format!("expected `{key} <value>`")))?;
    rest.trim()
        .parse()
        .map_err(|e| Error::parse("network", lineno, format!("bad {key}: {e}")))
}

fn parse_id_list(line: &str, lineno: usize) -> Result<(usize, Vec<NodeId>)> {
    let (id, rest) = line
        .split_once(':')
        .ok_or_else(|| Error::parse("network", lineno, "expected `id: list`"))?;
    let id: usize = id
        .trim()
        .parse()
        .map_err(|e| Error::parse("network", lineno, format!("bad id: {e}")))?;
    let rest = rest.trim();
    let list = if rest.is_empty() {
        Vec::new()
    } else {
        rest.split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<NodeId>()
                    .map_err(|e| Error::parse("network", lineno, format!("bad entry: {e}")))
            })
            .collect::<Result<Vec<_>>>()?
    };
    Ok((id, list))
}

pub fn read_network(r: impl BufRead) -> Result<HouseholdNet> {
    let mut lines = Vec::new();
    for (i, line) in r.lines().enumerate() {
        lines.push((i + 1, line?));
    }
    let mut it = lines.into_iter().filter(|(_, l)| !l.trim().is_empty());

    let (lineno, header) = it
        .next()
        .ok_or_else(|| Error::parse("network", 0, "empty file"))?;
    if header.trim() != HEADER {
        return Err(Error::parse(
            "network",
            lineno,
            format!("unrecognized header {header:?}"),
        ));
    }
    let (l, line) = it.next().ok_or_else(|| Error::parse("network", lineno, "missing n"))?;
    let n = parse_kv(&line, "n", l)?;
    let (l, line) = it.next().ok_or_else(|| Error::parse("network", l, "missing d_c"))?;
    let d_c = parse_kv(&line, "d_c", l)?;
    let (l, line) = it.next().ok_or_else(|| Error::parse("network", l, "missing d_h"))?;
    let d_h = parse_kv(&line, "d_h", l)?;
    let (l, line) = it
        .next()
        .ok_or_else(|| Error::parse("network", l, "missing adjacency section"))?;
    if line.trim() != "adjacency" {
        return Err(Error::parse("network", l, "expected `adjacency`"));
    }

    let mut adj = vec![None::<Vec<NodeId>>; n];
    let mut households = Vec::new();
    let mut in_households = false;
    let mut last = l;
    for (lineno, line) in it {
        last = lineno;
        let trimmed = line.trim();
        if trimmed == "households" {
            in_households = true;
            continue;
        }
        let (id, list) = parse_id_list(trimmed, lineno)?;
        if in_households {
            if id != households.len() {
                return Err(Error::parse(
                    "network",
                    lineno,
                    format!("household ids must be dense, got {id}"),
                ));
            }
            households.push(list);
        } else {
            if id >= n {
                return Err(Error::parse("network", lineno, format!("node id {id} out of range")));
            }
            if adj[id].is_some() {
                return Err(Error::parse("network", lineno, format!("duplicate row for node {id}")));
            }
            adj[id] = Some(list);
        }
    }
    if !in_households {
        return Err(Error::parse("network", last, "missing households section"));
    }
    let adj: Vec<Vec<NodeId>> = adj
        .into_iter()
        .enumerate()
        .map(|(v, row)| row.ok_or_else(|| Error::parse("network", last, format!("missing row for node {v}"))))
        .collect::<Result<_>>()?;

    HouseholdNet::from_parts(NetworkParams { n, d_c, d_h }, adj, households)
}

pub fn load_network(path: impl AsRef<Path>) -> Result<HouseholdNet> {
    let f = std::io::BufReader::new(std::fs::File::open(path)?);
    read_network(f)
}
