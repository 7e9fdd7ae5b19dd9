//! Comparison maps between the pair domain and the crosses, and the
//! Dirichlet-Neumann decomposition of the axis cross into its centre square
//! and four arms.
//!
//! Both constructions are exact at the discrete level: an embedding copies a
//! finite-element function onto congruent pieces of a cross mesh, so energy
//! and norm are multiplied by the same number of copies; the decomposition
//! splits the cross triangles between two meshes, so energy and norm add up.
//! Eigenvalue orderings and counting-function inequalities then follow from
//! the discrete min-max principle.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::eigensolve::rayleigh_quotient;
use crate::femassembly::{assemble, reduce_to_sector, AssembledSystem, SectorLabel};
use crate::geometry::{
    make_domain, triangulate, DomainKind, DomainSpec, Isometry, Mesh, PairParameters, ScaleVariant,
};
use crate::{Error, Result};

/// Linear map from a pair-domain sector space into a diagonal-cross space.
#[derive(Debug, Clone)]
pub struct EmbeddingMap {
    pub sector: SectorLabel,
    pub source: AssembledSystem,
    pub target: AssembledSystem,
    /// For every copy, the target mesh node of each source mesh node.
    pub node_maps: Vec<Vec<usize>>,
    /// Source row feeding each target row, `None` where the image is zero.
    target_source: Vec<Option<usize>>,
}

impl EmbeddingMap {
    /// Builds the map between already assembled systems: `source` is a
    /// pair-domain system of any sector, `target` the diagonal cross at `d`
    /// (full and symmetric sectors) or `d/2` (antisymmetric sector) on the
    /// same spacing.
    pub fn new(source: AssembledSystem, target: AssembledSystem) -> Result<Self> {
        let sector = source.sector;
        let sd = *source.domain();
        let td = *target.domain();
        if sd.kind() != DomainKind::PairDomain {
            return Err(Error::InvalidParameter(format!(
                "embedding source must be the pair domain, got {}",
                sd.kind()
            )));
        }
        let want_scale = match sector {
            SectorLabel::Antisymmetric => ScaleVariant::Half,
            _ => ScaleVariant::Unit,
        };
        if td.kind() != DomainKind::CrossDiagonal || td.scale() != want_scale {
            return Err(Error::InvalidParameter(format!(
                "the {sector} sector embeds into cross-diag at scale {}, got {} at scale {}",
                want_scale.factor(),
                td.kind(),
                td.scale().factor()
            )));
        }
        if sd.params().spacing() != td.params().spacing() || sd.params().d() != td.params().d() {
            return Err(Error::InvalidParameter(
                "source and target meshes use different parameters".into(),
            ));
        }

        let d = sd.params().d();
        let down = Isometry::Translate([0.0, -d / 2.0]);
        let copies: Vec<Vec<Isometry>> = match sector {
            SectorLabel::Full => vec![
                vec![],
                vec![Isometry::ReflectYAxis],
                vec![Isometry::ReflectXAxis],
                vec![Isometry::ReflectYAxis, Isometry::ReflectXAxis],
            ],
            SectorLabel::Symmetric => {
                let mut v = Vec::new();
                for first in [None, Some(Isometry::ReflectDiagonal)] {
                    for rest in [
                        &[][..],
                        &[Isometry::ReflectYAxis][..],
                        &[Isometry::ReflectXAxis][..],
                        &[Isometry::ReflectYAxis, Isometry::ReflectXAxis][..],
                    ] {
                        let mut seq: Vec<Isometry> = first.into_iter().collect();
                        seq.extend_from_slice(rest);
                        v.push(seq);
                    }
                }
                v
            }
            SectorLabel::Antisymmetric => vec![vec![down], vec![Isometry::ReflectYAxis, down]],
        };

        let src_mesh = source.mesh();
        let tgt_mesh = target.mesh();
        let mut node_maps = Vec::with_capacity(copies.len());
        let mut target_source: Vec<Option<usize>> = vec![None; target.dim()];
        for seq in &copies {
            let map = map_through(src_mesh, seq, tgt_mesh)?;
            for (src_node, &tgt_node) in map.iter().enumerate() {
                let Some(src_row) = source.row_of(src_node) else {
                    continue;
                };
                let Some(tgt_row) = target.row_of(tgt_node) else {
                    let p = tgt_mesh.nodes[tgt_node];
                    return Err(Error::Mesh(format!(
                        "free source node {src_node} lands on the Dirichlet node ({}, {}) of the target",
                        p[0], p[1]
                    )));
                };
                match target_source[tgt_row] {
                    None => target_source[tgt_row] = Some(src_row),
                    Some(r) if r == src_row => {}
                    Some(_) => {
                        let p = tgt_mesh.nodes[tgt_node];
                        return Err(Error::Mesh(format!(
                            "two source nodes land on target node ({}, {})",
                            p[0], p[1]
                        )));
                    }
                }
            }
            node_maps.push(map);
        }
        Ok(Self {
            sector,
            source,
            target,
            node_maps,
            target_source,
        })
    }

    /// Number of congruent copies of the source function in the image.
    pub fn copies(&self) -> usize {
        self.node_maps.len()
    }

    /// Image of a source coefficient vector.
    pub fn apply(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.source.dim() {
            return Err(Error::Dimension(format!(
                "vector of length {} for source dimension {}",
                u.len(),
                self.source.dim()
            )));
        }
        Ok(self
            .target_source
            .iter()
            .map(|r| r.map_or(0.0, |r| u[r]))
            .collect())
    }

    /// Rayleigh quotients of `u` on the source and of its image on the
    /// target.
    pub fn check_rayleigh_preservation(&self, u: &[f64]) -> Result<(f64, f64)> {
        let v = self.apply(u)?;
        let s = rayleigh_quotient(&self.source.stiffness, &self.source.mass, u)?;
        let t = rayleigh_quotient(&self.target.stiffness, &self.target.mass, &v)?;
        Ok((s, t))
    }

    /// Largest value of the image, over all mesh nodes, at a Dirichlet node
    /// of the target. Eliminated rows carry no value, so this is zero by
    /// construction; it is computed from the node maps as a consistency
    /// check.
    pub fn dirichlet_leak(&self, u: &[f64]) -> f64 {
        let mask = self.target.mesh().dirichlet_mask();
        let mut leak: f64 = 0.0;
        for map in &self.node_maps {
            for (src_node, &tgt_node) in map.iter().enumerate() {
                if mask[tgt_node] {
                    if let Some(r) = self.source.row_of(src_node) {
                        leak = leak.max(libm::fabs(u[r]));
                    }
                }
            }
        }
        leak
    }
}

fn map_through(source: &Mesh, seq: &[Isometry], target: &Mesh) -> Result<Vec<usize>> {
    source
        .nodes
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let q = seq.iter().fold(p, |q, iso| iso.apply(q));
            target.node_near(q).ok_or(Error::UnmatchedNode {
                node: i,
                x: q[0],
                y: q[1],
            })
        })
        .collect()
}

/// Assembles the pair-domain sector system and its comparison cross and
/// links them.
pub fn build_embedding(sector: SectorLabel, params: PairParameters) -> Result<EmbeddingMap> {
    let scale = match sector {
        SectorLabel::Antisymmetric => ScaleVariant::Half,
        _ => ScaleVariant::Unit,
    };
    let target_spec = make_domain(DomainKind::CrossDiagonal, params, scale)?;
    let full = assemble(&triangulate(&make_domain(
        DomainKind::PairDomain,
        params,
        ScaleVariant::Unit,
    )?)?)?;
    let source = reduce_to_sector(&full, sector)?;
    let target = assemble(&triangulate(&target_spec)?)?;
    EmbeddingMap::new(source, target)
}

/// `true` when `upper[n] >= lower[n] - slack` for every common index.
pub fn dominates(upper: &[f64], lower: &[f64], slack: f64) -> bool {
    upper.iter().zip(lower).all(|(u, l)| *u >= *l - slack)
}

/// The axis cross and the two pieces of its decomposition: the centre
/// square with Neumann sides and the arms with Neumann ends.
#[derive(Debug, Clone)]
pub struct BracketPair {
    pub cross: AssembledSystem,
    pub square: AssembledSystem,
    pub arms: AssembledSystem,
    /// Snapped strip half-width.
    pub half_width: f64,
    square_rows: Vec<Option<usize>>,
    arms_rows: Vec<Option<usize>>,
}

/// Counting functions of the cross and of the two pieces at one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketCounts {
    pub energy: f64,
    pub cross: usize,
    pub square: usize,
    pub arms: usize,
}

impl BracketCounts {
    /// `N(cross, E) <= N(square, E) + N(arms, E)`.
    pub fn holds(&self) -> bool {
        self.cross <= self.square + self.arms
    }
}

/// Builds the axis cross, its snapped centre square and its arms on one
/// grid and checks that they share the interface nodes.
pub fn build_bracket_pair(params: PairParameters) -> Result<BracketPair> {
    let cross_spec = make_domain(DomainKind::CrossAxis, params, ScaleVariant::Unit)?;
    let cross = assemble(&triangulate(&cross_spec)?)?;
    let square = assemble(&triangulate(&DomainSpec::snapped_square(params)?)?)?;
    let arms = assemble(&triangulate(&make_domain(
        DomainKind::ArmsDomain,
        params,
        ScaleVariant::Unit,
    )?)?)?;
    let half_width = cross_spec.snapped_half_width().unwrap_or(0.0);

    let n_tri = square.mesh().triangles.len() + arms.mesh().triangles.len();
    if n_tri != cross.mesh().triangles.len() {
        return Err(Error::Mesh(format!(
            "square and arms have {n_tri} triangles, the cross {}",
            cross.mesh().triangles.len()
        )));
    }
    let rows_in = |piece: &AssembledSystem| -> Result<Vec<Option<usize>>> {
        let mut rows = vec![None; piece.dim()];
        for (row, &node) in piece.free_nodes.iter().enumerate() {
            let key = piece.mesh().key(node);
            let c = cross.mesh().node_at_key(key).ok_or_else(|| {
                let p = piece.mesh().nodes[node];
                Error::UnmatchedNode {
                    node,
                    x: p[0],
                    y: p[1],
                }
            })?;
            rows[row] = cross.row_of(c);
        }
        Ok(rows)
    };
    let square_rows = rows_in(&square)?;
    let arms_rows = rows_in(&arms)?;
    // every free cross node must carry over to one of the pieces
    let mut seen = vec![false; cross.dim()];
    for r in square_rows.iter().chain(&arms_rows).flatten() {
        seen[*r] = true;
    }
    if let Some(r) = seen.iter().position(|s| !s) {
        let p = cross.mesh().nodes[cross.free_nodes[r]];
        return Err(Error::Mesh(format!(
            "cross node ({}, {}) is free but fixed in both pieces",
            p[0], p[1]
        )));
    }
    Ok(BracketPair {
        cross,
        square,
        arms,
        half_width,
        square_rows,
        arms_rows,
    })
}

impl BracketPair {
    /// Restrictions of a cross coefficient vector to the square and arms.
    pub fn restrict(&self, u: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        if u.len() != self.cross.dim() {
            return Err(Error::Dimension(format!(
                "vector of length {} for cross dimension {}",
                u.len(),
                self.cross.dim()
            )));
        }
        let pick = |rows: &[Option<usize>]| rows.iter().map(|r| r.map_or(0.0, |r| u[r])).collect();
        Ok((pick(&self.square_rows), pick(&self.arms_rows)))
    }

    /// `(energy, norm²)` of `u` on the cross and the sums of the same over
    /// its two restrictions.
    pub fn split_forms(&self, u: &[f64]) -> Result<([f64; 2], [f64; 2])> {
        let (s, a) = self.restrict(u)?;
        let whole = [
            self.cross.stiffness.quadratic_form(u),
            self.cross.mass.quadratic_form(u),
        ];
        let parts = [
            self.square.stiffness.quadratic_form(&s) + self.arms.stiffness.quadratic_form(&a),
            self.square.mass.quadratic_form(&s) + self.arms.mass.quadratic_form(&a),
        ];
        Ok((whole, parts))
    }

    /// Counting functions at every energy of `energies`.
    pub fn counts(&self, energies: &[f64]) -> Result<Vec<BracketCounts>> {
        let cross = self.cross.inertia_counter()?;
        let square = self.square.inertia_counter()?;
        let arms = self.arms.inertia_counter()?;
        energies
            .iter()
            .map(|&e| {
                Ok(BracketCounts {
                    energy: e,
                    cross: cross.count_below_perturbed(e)?.0,
                    square: square.count_below_perturbed(e)?.0,
                    arms: arms.count_below_perturbed(e)?.0,
                })
            })
            .collect()
    }
}
