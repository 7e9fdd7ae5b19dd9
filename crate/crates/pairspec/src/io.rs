//! Plain-text debugging formats for meshes and matrices.

use std::io::{self, BufRead, Write};

use pairspec_core::{Mesh, SymCsr};

use crate::error::{PairspecError, Result};

/// Writes `N T B`, then `N` lines `x y`, `T` lines `i j k` and `B` lines
/// `i j TAG` with `TAG` one of `D`, `N`. Indices are 0-based.
pub fn write_mesh<W: Write>(mesh: &Mesh, mut out: W) -> io::Result<()> {
    writeln!(
        out,
        "{} {} {}",
        mesh.num_nodes(),
        mesh.triangles.len(),
        mesh.boundary_edges.len()
    )?;
    for [x, y] in &mesh.nodes {
        writeln!(out, "{x:?} {y:?}")?;
    }
    for [i, j, k] in &mesh.triangles {
        writeln!(out, "{i} {j} {k}")?;
    }
    for e in &mesh.boundary_edges {
        let tag = if e.tag.is_dirichlet() { 'D' } else { 'N' };
        writeln!(out, "{} {} {tag}", e.nodes[0], e.nodes[1])?;
    }
    out.flush()
}

/// Mesh contents read back from [`write_mesh`] output.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshDump {
    pub nodes: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    /// `(i, j, dirichlet)`.
    pub boundary: Vec<(usize, usize, bool)>,
}

pub fn read_mesh<R: BufRead>(input: R) -> Result<MeshDump> {
    let mut lines = input.lines();
    let mut next = || -> Result<Vec<String>> {
        let line = lines
            .next()
            .ok_or_else(|| PairspecError::Input("mesh dump ends early".into()))??;
        Ok(line.split_whitespace().map(str::to_owned).collect())
    };
    let bad = |what: &str| PairspecError::Input(format!("malformed mesh dump: {what}"));
    let counts: Vec<usize> = next()?
        .iter()
        .map(|s| s.parse().map_err(|_| bad("header")))
        .collect::<Result<_>>()?;
    let [n, t, b] = counts[..] else {
        return Err(bad("header"));
    };
    let mut dump = MeshDump {
        nodes: Vec::new(),
        triangles: Vec::new(),
        boundary: Vec::new(),
    };
    for _ in 0..n {
        let f = next()?;
        let p: Vec<f64> = f
            .iter()
            .map(|s| s.parse().map_err(|_| bad("node")))
            .collect::<Result<_>>()?;
        let [x, y] = p[..] else {
            return Err(bad("node"));
        };
        dump.nodes.push([x, y]);
    }
    for _ in 0..t {
        let f = next()?;
        let v: Vec<usize> = f
            .iter()
            .map(|s| s.parse().map_err(|_| bad("triangle")))
            .collect::<Result<_>>()?;
        let [i, j, k] = v[..] else {
            return Err(bad("triangle"));
        };
        dump.triangles.push([i, j, k]);
    }
    for _ in 0..b {
        let f = next()?;
        let [i, j, tag] = &f[..] else {
            return Err(bad("boundary edge"));
        };
        let dirichlet = match tag.as_str() {
            "D" => true,
            "N" => false,
            _ => return Err(bad("boundary tag")),
        };
        dump.boundary.push((
            i.parse().map_err(|_| bad("boundary edge"))?,
            j.parse().map_err(|_| bad("boundary edge"))?,
            dirichlet,
        ));
    }
    Ok(dump)
}

/// Upper-triangle coordinate triplets `row col value`, 0-based.
pub fn write_matrix<W: Write>(m: &SymCsr, mut out: W) -> io::Result<()> {
    for (i, j, v) in m.upper_triplets() {
        writeln!(out, "{i} {j} {v:?}")?;
    }
    out.flush()
}

/// Reads [`write_matrix`] output back into a full symmetric matrix of
/// dimension `n`.
pub fn read_matrix<R: BufRead>(n: usize, input: R) -> Result<SymCsr> {
    let mut triplets = Vec::new();
    for line in input.lines() {
        let line = line?;
        let f: Vec<&str> = line.split_whitespace().collect();
        let bad = || PairspecError::Input(format!("malformed matrix line '{line}'"));
        let [i, j, v] = f[..] else { return Err(bad()) };
        let (i, j): (usize, usize) = (i.parse().map_err(|_| bad())?, j.parse().map_err(|_| bad())?);
        if i > j || j >= n {
            return Err(bad());
        }
        triplets.push((i, j, v.parse().map_err(|_| bad())?));
    }
    Ok(SymCsr::from_triplets(n, &triplets))
}
