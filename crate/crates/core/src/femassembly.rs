//! Piecewise-linear stiffness and consistent mass matrices, Dirichlet
//! elimination, and the exchange-symmetry sector reduction of the pair
//! domain.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::eigensolve::{lowest_eigenpairs_with, EigenOptions, InertiaCounter, SpectralResult};
use crate::geometry::{
    reflect_or_translate_nodes, triangulate, BoundaryOrigin, BoundaryTag, DomainKind, DomainSpec,
    Isometry, Mesh,
};
use crate::sparse::SymCsr;
use crate::{Error, Result};

/// Exchange-symmetry sector: unrestricted, `φ(x,y) = φ(y,x)` or
/// `φ(x,y) = -φ(y,x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SectorLabel {
    Full,
    Symmetric,
    Antisymmetric,
}

impl SectorLabel {
    pub const ALL: [SectorLabel; 3] = [
        SectorLabel::Full,
        SectorLabel::Symmetric,
        SectorLabel::Antisymmetric,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SectorLabel::Full => "full",
            SectorLabel::Symmetric => "s",
            SectorLabel::Antisymmetric => "a",
        }
    }
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SectorLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" | "0" => Ok(SectorLabel::Full),
            "s" | "symmetric" => Ok(SectorLabel::Symmetric),
            "a" | "antisymmetric" => Ok(SectorLabel::Antisymmetric),
            _ => Err(Error::InvalidParameter(format!("unknown sector '{s}'"))),
        }
    }
}

/// Discrete quadratic form (`stiffness`) and squared norm (`mass`) on the
/// free (non-Dirichlet) nodes of a mesh.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub stiffness: SymCsr,
    pub mass: SymCsr,
    /// Mesh node of each matrix row.
    pub free_nodes: Vec<usize>,
    pub sector: SectorLabel,
    node_rows: Vec<usize>,
    mesh: Mesh,
}

impl AssembledSystem {
    pub fn dim(&self) -> usize {
        self.free_nodes.len()
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn domain(&self) -> &DomainSpec {
        self.mesh.domain()
    }

    /// Matrix row of a mesh node, `None` for eliminated Dirichlet nodes.
    pub fn row_of(&self, node: usize) -> Option<usize> {
        let r = self.node_rows[node];
        (r != usize::MAX).then_some(r)
    }

    /// Nodal interpolant of `f` restricted to the free nodes.
    pub fn interpolate(&self, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        self.free_nodes
            .iter()
            .map(|&n| f(self.mesh.nodes[n]))
            .collect()
    }

    /// Grid key of the mesh node behind each matrix row.
    pub fn free_keys(&self) -> Vec<[i64; 2]> {
        self.free_nodes.iter().map(|&n| self.mesh.key(n)).collect()
    }

    /// Inertia counter for `(stiffness, mass)` using the grid ordering.
    pub fn inertia_counter(&self) -> Result<InertiaCounter<'_>> {
        InertiaCounter::with_grid_keys(&self.stiffness, &self.mass, &self.free_keys())
    }

    /// Number of eigenvalues strictly below `e`.
    pub fn count_below(&self, e: f64) -> Result<usize> {
        self.inertia_counter()?.count_below(e)
    }

    /// The `k` lowest eigenpairs.
    pub fn lowest_eigenpairs(&self, k: usize, options: &EigenOptions) -> Result<SpectralResult> {
        lowest_eigenpairs_with(&self.inertia_counter()?, k, options)
    }

    /// Nodal values on the whole mesh, zero at eliminated nodes.
    pub fn expand(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.mesh.num_nodes()];
        for (&node, &v) in self.free_nodes.iter().zip(u) {
            out[node] = v;
        }
        out
    }
}

/// Assembles on `mesh`, eliminating every node on a Dirichlet edge.
pub fn assemble(mesh: &Mesh) -> Result<AssembledSystem> {
    assemble_inner(mesh, true)
}

/// Assembles on every node, ignoring Dirichlet tags. Useful for checking
/// the discrete forms against exact integrals of arbitrary affine functions.
pub fn assemble_unconstrained(mesh: &Mesh) -> Result<AssembledSystem> {
    assemble_inner(mesh, false)
}

/// Triangulates `spec` and assembles the full-sector system.
pub fn assemble_domain(spec: &DomainSpec) -> Result<AssembledSystem> {
    assemble(&triangulate(spec)?)
}

fn assemble_inner(mesh: &Mesh, eliminate: bool) -> Result<AssembledSystem> {
    let n_nodes = mesh.num_nodes();
    if mesh.element_area.len() != mesh.triangles.len() {
        return Err(Error::Mesh(
            "element_area does not match the triangle list".into(),
        ));
    }
    for (i, t) in mesh.triangles.iter().enumerate() {
        if t.iter().any(|&v| v >= n_nodes) {
            return Err(Error::Mesh(format!(
                "triangle {i} references a missing node"
            )));
        }
        if mesh.element_area[i].is_nan() || mesh.element_area[i] <= 0.0 {
            return Err(Error::Mesh(format!("triangle {i} has zero area")));
        }
    }

    let dirichlet = if eliminate {
        mesh.dirichlet_mask()
    } else {
        vec![false; n_nodes]
    };
    let mut node_rows = vec![usize::MAX; n_nodes];
    let mut free_nodes = Vec::new();
    for (node, &fixed) in dirichlet.iter().enumerate() {
        if !fixed {
            node_rows[node] = free_nodes.len();
            free_nodes.push(node);
        }
    }
    let n = free_nodes.len();
    if n == 0 {
        return Err(Error::Mesh("every node is on a Dirichlet edge".into()));
    }

    let pattern = mesh.triangles.iter().flat_map(|t| {
        let rows = t.map(|v| node_rows[v]);
        (0..3).flat_map(move |a| (a..3).map(move |b| (rows[a], rows[b])))
    });
    let pattern = SymCsr::from_pattern(
        n,
        pattern.filter(|&(i, j)| i != usize::MAX && j != usize::MAX),
    );
    let mut stiffness = pattern.clone();
    let mut mass = pattern;

    for (t, &area) in mesh.triangles.iter().zip(&mesh.element_area) {
        let p = t.map(|v| mesh.nodes[v]);
        let mut b = [0.0; 3];
        let mut c = [0.0; 3];
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            b[i] = p[j][1] - p[k][1];
            c[i] = p[k][0] - p[j][0];
        }
        let rows = t.map(|v| node_rows[v]);
        for i in 0..3 {
            if rows[i] == usize::MAX {
                continue;
            }
            for j in 0..3 {
                if rows[j] == usize::MAX {
                    continue;
                }
                let k = (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
                let m = if i == j { area / 6.0 } else { area / 12.0 };
                stiffness.add(rows[i], rows[j], k);
                mass.add(rows[i], rows[j], m);
            }
        }
    }

    Ok(AssembledSystem {
        stiffness,
        mass,
        free_nodes,
        sector: SectorLabel::Full,
        node_rows,
        mesh: mesh.clone(),
    })
}

/// Restricts a full pair-domain system to one exchange sector by solving on
/// the half-domain `y >= x`: the diagonal is Neumann for the symmetric
/// sector and Dirichlet for the antisymmetric one. `Full` returns a copy.
pub fn reduce_to_sector(system: &AssembledSystem, sector: SectorLabel) -> Result<AssembledSystem> {
    if sector == SectorLabel::Full {
        return Ok(system.clone());
    }
    if system.domain().kind() != DomainKind::PairDomain {
        return Err(Error::InvalidParameter(format!(
            "sector reduction needs the pair domain, got {}",
            system.domain().kind()
        )));
    }
    if system.sector != SectorLabel::Full {
        return Err(Error::InvalidParameter(
            "system is already sector-reduced".into(),
        ));
    }
    let mesh = system.mesh();
    let swap = reflect_or_translate_nodes(mesh, Isometry::ReflectDiagonal)
        .map_err(|_| Error::NotExchangeSymmetric)?;
    let mask = mesh.dirichlet_mask();
    if (0..mesh.num_nodes()).any(|i| mask[i] != mask[swap[i]]) {
        return Err(Error::NotExchangeSymmetric);
    }
    let tag = match sector {
        SectorLabel::Symmetric => BoundaryTag::neumann(BoundaryOrigin::ExchangeDiagonal),
        _ => BoundaryTag::dirichlet(BoundaryOrigin::ExchangeDiagonal),
    };
    let half = mesh.upper_half(tag)?;
    let mut reduced = assemble(&half)?;
    reduced.sector = sector;
    Ok(reduced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_domain, PairParameters, ScaleVariant};

    fn square(h: f64) -> AssembledSystem {
        let p = PairParameters::new(1.0, 4.0, h).unwrap();
        assemble_domain(&make_domain(DomainKind::NeumannSquare, p, ScaleVariant::Unit).unwrap())
            .unwrap()
    }

    #[test]
    fn constant_has_zero_energy_and_area_mass() {
        let s = square(0.125);
        let one = vec![1.0; s.dim()];
        assert!(libm::fabs(s.stiffness.quadratic_form(&one)) < 1e-12);
        assert!(libm::fabs(s.mass.quadratic_form(&one) - 2.0) < 1e-12);
    }

    #[test]
    fn linear_function_energy_is_area() {
        let s = square(0.125);
        let u = s.interpolate(|p| p[0]);
        assert!(libm::fabs(s.stiffness.quadratic_form(&u) - 2.0) < 1e-12);
    }

    #[test]
    fn antisymmetric_reduction_tags_the_diagonal() {
        let p = PairParameters::new(1.0, 4.0, 0.25).unwrap();
        let full =
            assemble_domain(&make_domain(DomainKind::PairDomain, p, ScaleVariant::Unit).unwrap())
                .unwrap();
        for (sector, family_is_dirichlet) in [
            (SectorLabel::Antisymmetric, true),
            (SectorLabel::Symmetric, false),
        ] {
            let red = reduce_to_sector(&full, sector).unwrap();
            let mesh = red.mesh();
            let mut diagonal_edges = 0;
            for e in &mesh.boundary_edges {
                let [a, b] = e.nodes.map(|n| mesh.nodes[n]);
                if a[0] == a[1] && b[0] == b[1] {
                    diagonal_edges += 1;
                    assert_eq!(e.tag.origin, BoundaryOrigin::ExchangeDiagonal);
                    assert_eq!(e.tag.is_dirichlet(), family_is_dirichlet);
                } else {
                    assert_ne!(e.tag.origin, BoundaryOrigin::ExchangeDiagonal);
                }
            }
            // x + y < 8 along the diagonal: 16 cells of length h√2, two edges each
            assert_eq!(diagonal_edges, 2 * 16);
        }
    }

    #[test]
    fn sector_reduction_rejects_other_domains() {
        let s = square(0.25);
        assert!(reduce_to_sector(&s, SectorLabel::Symmetric).is_err());
        assert_eq!(
            reduce_to_sector(&s, SectorLabel::Full).unwrap().dim(),
            s.dim()
        );
    }
}
