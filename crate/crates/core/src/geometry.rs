//! Domains built from the four line families `x = c`, `y = c`, `x - y = c`,
//! `x + y = c`, and their criss-cross triangulations.
//!
//! Every mesh lives on a structured grid: cell corners sit at integer
//! multiples of the spacing `h` and every cell carries one extra node at its
//! centre. Node positions are stored both as coordinates and as integer
//! *keys* in units of `h / 2`, so reflections, translations and nested
//! refinements can be matched exactly. A domain is only accepted when each
//! of its boundary lines passes through grid nodes; the boundary of the mesh
//! is then an exact union of triangle edges (no staircase).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::{Error, Result};

const RATIO_TOL: f64 = 1e-9;

/// Physical parameters of the pair model plus the discretization knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairParameters {
    d: f64,
    truncation: f64,
    spacing: f64,
}

impl PairParameters {
    /// `d` is the pair extension, `truncation` the distance `L` at which the
    /// unbounded arms are closed, `spacing` the mesh size `h`.
    pub fn new(d: f64, truncation: f64, spacing: f64) -> Result<Self> {
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "d must be positive, got {d}"
            )));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "h must be positive, got {spacing}"
            )));
        }
        if !(truncation.is_finite() && truncation >= 4.0 * d * (1.0 - RATIO_TOL)) {
            return Err(Error::InvalidParameter(format!(
                "truncation L = {truncation} must be at least 4d = {}",
                4.0 * d
            )));
        }
        integer_ratio(d, spacing, "d")?;
        integer_ratio(truncation, spacing, "L")?;
        Ok(Self {
            d,
            truncation,
            spacing,
        })
    }

    /// `L = 8d`, `h = d/32`.
    pub fn with_defaults(d: f64) -> Result<Self> {
        Self::new(d, 8.0 * d, d / 32.0)
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// `d / h`.
    pub fn d_cells(&self) -> i64 {
        integer_ratio(self.d, self.spacing, "d").unwrap_or(0)
    }

    /// `L / h`.
    pub fn truncation_cells(&self) -> i64 {
        integer_ratio(self.truncation, self.spacing, "L").unwrap_or(0)
    }

    /// One cell across the pair extension; accepted but worth a warning.
    pub fn is_coarse(&self) -> bool {
        self.d_cells() == 1
    }

    /// Same `d` and `L`, spacing halved.
    pub fn refined(&self) -> Self {
        Self {
            spacing: self.spacing / 2.0,
            ..*self
        }
    }

    /// Dilates every length by `factor`.
    pub fn dilated(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.d * factor,
            self.truncation * factor,
            self.spacing * factor,
        )
    }
}

fn integer_ratio(num: f64, den: f64, what: &'static str) -> Result<i64> {
    let ratio = num / den;
    let rounded = libm::round(ratio);
    if rounded < 1.0 || libm::fabs(ratio - rounded) > RATIO_TOL * rounded.max(1.0) {
        return Err(Error::NonConforming { what, ratio });
    }
    Ok(rounded as i64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DomainKind {
    /// `{x > 0, y > 0, |x - y| < d}` capped at `x + y = 2L`.
    PairDomain,
    /// `{|x - y| < d} ∪ {|x + y| < d}`, arms capped at `|x ± y| = 2L`.
    CrossDiagonal,
    /// Strips of half-width `d/√2` (snapped) along both axes, capped at `L`.
    CrossAxis,
    /// The centre square of the axis cross, Neumann on all sides.
    NeumannSquare,
    /// The axis cross with its centre square removed.
    ArmsDomain,
}

impl DomainKind {
    pub const ALL: [DomainKind; 5] = [
        DomainKind::PairDomain,
        DomainKind::CrossDiagonal,
        DomainKind::CrossAxis,
        DomainKind::NeumannSquare,
        DomainKind::ArmsDomain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DomainKind::PairDomain => "pair",
            DomainKind::CrossDiagonal => "cross-diag",
            DomainKind::CrossAxis => "cross-axis",
            DomainKind::NeumannSquare => "square",
            DomainKind::ArmsDomain => "arms",
        }
    }
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DomainKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DomainKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown domain '{s}'")))
    }
}

/// Factor applied to `d` when building a comparison domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScaleVariant {
    Unit,
    Half,
}

impl ScaleVariant {
    pub fn factor(self) -> f64 {
        match self {
            ScaleVariant::Unit => 1.0,
            ScaleVariant::Half => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryFamily {
    Dirichlet,
    Neumann,
}

/// Which boundary piece of the continuous problem an edge discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryOrigin {
    /// `|x - y| = d` (or `|x ± y| = d` on the diagonal cross).
    HardWall,
    /// `x = 0` or `y = 0` of the pair domain.
    HalfLineWall,
    /// `x = y`, introduced by the sector reduction.
    ExchangeDiagonal,
    TruncationCap,
    /// Side of an axis-aligned strip of the axis cross.
    StripWall,
    SquareSide,
    /// Segment shared by the centre square and an arm.
    ArmInterface,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoundaryTag {
    pub family: BoundaryFamily,
    pub origin: BoundaryOrigin,
}

impl BoundaryTag {
    pub const fn dirichlet(origin: BoundaryOrigin) -> Self {
        Self {
            family: BoundaryFamily::Dirichlet,
            origin,
        }
    }

    pub const fn neumann(origin: BoundaryOrigin) -> Self {
        Self {
            family: BoundaryFamily::Neumann,
            origin,
        }
    }

    pub fn is_dirichlet(&self) -> bool {
        self.family == BoundaryFamily::Dirichlet
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum SquareWidth {
    /// Half-width exactly `d/√2`; the grid is fitted to the square.
    Exact,
    /// Half-width snapped to the axis-cross grid.
    Snapped,
}

/// Symbolic description of one of the five domains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec {
    kind: DomainKind,
    params: PairParameters,
    scale: ScaleVariant,
    square_width: SquareWidth,
}

pub fn make_domain(
    kind: DomainKind,
    params: PairParameters,
    scale: ScaleVariant,
) -> Result<DomainSpec> {
    DomainSpec::new(kind, params, scale)
}

impl DomainSpec {
    pub fn new(kind: DomainKind, params: PairParameters, scale: ScaleVariant) -> Result<Self> {
        if scale == ScaleVariant::Half
            && !matches!(kind, DomainKind::CrossDiagonal | DomainKind::CrossAxis)
        {
            return Err(Error::InvalidParameter(format!(
                "scale variant 1/2 only applies to crosses, not to {kind}"
            )));
        }
        let spec = Self {
            kind,
            params,
            scale,
            square_width: SquareWidth::Exact,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Centre square of the axis cross on the cross's own grid, as used by
    /// the bracketing decomposition.
    pub fn snapped_square(params: PairParameters) -> Result<Self> {
        let spec = Self {
            kind: DomainKind::NeumannSquare,
            params,
            scale: ScaleVariant::Unit,
            square_width: SquareWidth::Snapped,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        match self.kind {
            DomainKind::CrossDiagonal if self.scale == ScaleVariant::Half => {
                let dc = self.params.d_cells();
                if dc % 2 != 0 {
                    return Err(Error::NonConforming {
                        what: "d/2",
                        ratio: dc as f64 / 2.0,
                    });
                }
            }
            DomainKind::CrossAxis | DomainKind::ArmsDomain => {
                let w = self.snapped_half_width_cells();
                if w < 1 {
                    return Err(Error::InvalidParameter(format!(
                        "strip half-width d/√2 = {} rounds to zero cells at h = {}",
                        self.effective_d() / core::f64::consts::SQRT_2,
                        self.params.spacing
                    )));
                }
            }
            DomainKind::NeumannSquare
                if self.square_width == SquareWidth::Snapped
                    && self.snapped_half_width_cells() < 1 =>
            {
                return Err(Error::InvalidParameter(format!(
                    "square half-width rounds to zero cells at h = {}",
                    self.params.spacing
                )));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn params(&self) -> &PairParameters {
        &self.params
    }

    pub fn scale(&self) -> ScaleVariant {
        self.scale
    }

    /// `d` times the scale factor.
    pub fn effective_d(&self) -> f64 {
        self.params.d * self.scale.factor()
    }

    fn snapped_half_width_cells(&self) -> i64 {
        let w = self.effective_d() / (core::f64::consts::SQRT_2 * self.params.spacing);
        libm::round(w) as i64
    }

    /// Half-width of the axis-aligned strips after snapping to the grid, for
    /// the domains that use the snapped geometry.
    pub fn snapped_half_width(&self) -> Option<f64> {
        match (self.kind, self.square_width) {
            (DomainKind::CrossAxis | DomainKind::ArmsDomain, _)
            | (DomainKind::NeumannSquare, SquareWidth::Snapped) => {
                Some(self.snapped_half_width_cells() as f64 * self.params.spacing)
            }
            _ => None,
        }
    }

    /// Half-width of the square or of the axis strips as actually meshed.
    pub fn half_width(&self) -> Option<f64> {
        match (self.kind, self.square_width) {
            (DomainKind::NeumannSquare, SquareWidth::Exact) => {
                Some(self.effective_d() / core::f64::consts::SQRT_2)
            }
            _ => self.snapped_half_width(),
        }
    }

    /// Cells per side of the exact square.
    fn exact_square_cells(&self) -> i64 {
        let side = 2.0 * self.effective_d() / core::f64::consts::SQRT_2;
        (libm::round(side / self.params.spacing) as i64).max(1)
    }

    /// Spacing of the grid the domain is meshed on. Equal to `h` except for
    /// the exact square, whose grid is fitted to its side.
    pub fn grid_spacing(&self) -> f64 {
        match (self.kind, self.square_width) {
            (DomainKind::NeumannSquare, SquareWidth::Exact) => {
                2.0 * self.half_width().unwrap_or(0.0) / self.exact_square_cells() as f64
            }
            _ => self.params.spacing,
        }
    }

    fn grid_origin(&self) -> [f64; 2] {
        match (self.kind, self.square_width) {
            (DomainKind::NeumannSquare, SquareWidth::Exact) => {
                let w = self.half_width().unwrap_or(0.0);
                [-w, -w]
            }
            _ => [0.0, 0.0],
        }
    }

    /// Constraint description in key units (`h / 2`).
    fn region(&self) -> Region {
        use BoundaryOrigin::*;
        let dk = 2 * self.params.d_cells();
        let lk = 2 * self.params.truncation_cells();
        let d_tag = BoundaryTag::dirichlet;
        let n_tag = BoundaryTag::neumann;
        match self.kind {
            DomainKind::PairDomain => Region {
                pieces: vec![vec![
                    hp(-1, 0, 0),
                    hp(0, -1, 0),
                    hp(1, -1, dk),
                    hp(-1, 1, dk),
                    hp(1, 1, 2 * lk),
                ]],
                lines: vec![
                    line(1, -1, dk, d_tag(HardWall)),
                    line(1, -1, -dk, d_tag(HardWall)),
                    line(1, 0, 0, n_tag(HalfLineWall)),
                    line(0, 1, 0, n_tag(HalfLineWall)),
                    line(1, 1, 2 * lk, d_tag(TruncationCap)),
                ],
                bbox: [0, lk + dk, 0, lk + dk],
            },
            DomainKind::CrossDiagonal => {
                let ek = match self.scale {
                    ScaleVariant::Unit => dk,
                    ScaleVariant::Half => dk / 2,
                };
                Region {
                    pieces: vec![
                        vec![
                            hp(1, -1, ek),
                            hp(-1, 1, ek),
                            hp(1, 1, 2 * lk),
                            hp(-1, -1, 2 * lk),
                        ],
                        vec![
                            hp(1, 1, ek),
                            hp(-1, -1, ek),
                            hp(1, -1, 2 * lk),
                            hp(-1, 1, 2 * lk),
                        ],
                    ],
                    lines: vec![
                        line(1, -1, ek, d_tag(HardWall)),
                        line(1, -1, -ek, d_tag(HardWall)),
                        line(1, 1, ek, d_tag(HardWall)),
                        line(1, 1, -ek, d_tag(HardWall)),
                        line(1, 1, 2 * lk, d_tag(TruncationCap)),
                        line(1, 1, -2 * lk, d_tag(TruncationCap)),
                        line(1, -1, 2 * lk, d_tag(TruncationCap)),
                        line(1, -1, -2 * lk, d_tag(TruncationCap)),
                    ],
                    bbox: [-(lk + ek), lk + ek, -(lk + ek), lk + ek],
                }
            }
            DomainKind::CrossAxis => {
                let wk = 2 * self.snapped_half_width_cells();
                Region {
                    pieces: vec![
                        vec![hp(1, 0, wk), hp(-1, 0, wk), hp(0, 1, lk), hp(0, -1, lk)],
                        vec![hp(0, 1, wk), hp(0, -1, wk), hp(1, 0, lk), hp(-1, 0, lk)],
                    ],
                    lines: vec![
                        line(1, 0, wk, d_tag(StripWall)),
                        line(1, 0, -wk, d_tag(StripWall)),
                        line(0, 1, wk, d_tag(StripWall)),
                        line(0, 1, -wk, d_tag(StripWall)),
                        line(1, 0, lk, d_tag(TruncationCap)),
                        line(1, 0, -lk, d_tag(TruncationCap)),
                        line(0, 1, lk, d_tag(TruncationCap)),
                        line(0, 1, -lk, d_tag(TruncationCap)),
                    ],
                    bbox: [-lk, lk, -lk, lk],
                }
            }
            DomainKind::NeumannSquare => {
                let (lo, hi) = match self.square_width {
                    SquareWidth::Exact => (0, 2 * self.exact_square_cells()),
                    SquareWidth::Snapped => {
                        let wk = 2 * self.snapped_half_width_cells();
                        (-wk, wk)
                    }
                };
                Region {
                    pieces: vec![vec![
                        hp(1, 0, hi),
                        hp(-1, 0, -lo),
                        hp(0, 1, hi),
                        hp(0, -1, -lo),
                    ]],
                    lines: vec![
                        line(1, 0, lo, n_tag(SquareSide)),
                        line(1, 0, hi, n_tag(SquareSide)),
                        line(0, 1, lo, n_tag(SquareSide)),
                        line(0, 1, hi, n_tag(SquareSide)),
                    ],
                    bbox: [lo, hi, lo, hi],
                }
            }
            DomainKind::ArmsDomain => {
                let wk = 2 * self.snapped_half_width_cells();
                let interface = |a, b, c| BoundaryLine {
                    span: Some((-wk, wk)),
                    ..line(a, b, c, n_tag(ArmInterface))
                };
                Region {
                    pieces: vec![
                        vec![hp(-1, 0, -wk), hp(1, 0, lk), hp(0, 1, wk), hp(0, -1, wk)],
                        vec![hp(1, 0, -wk), hp(-1, 0, lk), hp(0, 1, wk), hp(0, -1, wk)],
                        vec![hp(0, -1, -wk), hp(0, 1, lk), hp(1, 0, wk), hp(-1, 0, wk)],
                        vec![hp(0, 1, -wk), hp(0, -1, lk), hp(1, 0, wk), hp(-1, 0, wk)],
                    ],
                    lines: vec![
                        interface(1, 0, wk),
                        interface(1, 0, -wk),
                        interface(0, 1, wk),
                        interface(0, 1, -wk),
                        line(1, 0, wk, d_tag(StripWall)),
                        line(1, 0, -wk, d_tag(StripWall)),
                        line(0, 1, wk, d_tag(StripWall)),
                        line(0, 1, -wk, d_tag(StripWall)),
                        line(1, 0, lk, d_tag(TruncationCap)),
                        line(1, 0, -lk, d_tag(TruncationCap)),
                        line(0, 1, lk, d_tag(TruncationCap)),
                        line(0, 1, -lk, d_tag(TruncationCap)),
                    ],
                    bbox: [-lk, lk, -lk, lk],
                }
            }
        }
    }
}

/// `a x + b y < c` in key units.
#[derive(Debug, Clone, Copy)]
struct HalfPlane {
    a: i64,
    b: i64,
    c: i64,
}

const fn hp(a: i64, b: i64, c: i64) -> HalfPlane {
    HalfPlane { a, b, c }
}

/// `a x + b y = c`, optionally restricted to a range of the tangential
/// coordinate `-b x + a y`.
#[derive(Debug, Clone, Copy)]
struct BoundaryLine {
    a: i64,
    b: i64,
    c: i64,
    span: Option<(i64, i64)>,
    tag: BoundaryTag,
}

const fn line(a: i64, b: i64, c: i64, tag: BoundaryTag) -> BoundaryLine {
    BoundaryLine {
        a,
        b,
        c,
        span: None,
        tag,
    }
}

impl BoundaryLine {
    fn holds(&self, p: [i64; 2]) -> bool {
        if self.a * p[0] + self.b * p[1] != self.c {
            return false;
        }
        match self.span {
            None => true,
            Some((lo, hi)) => {
                let t = -self.b * p[0] + self.a * p[1];
                lo <= t && t <= hi
            }
        }
    }
}

struct Region {
    /// Union of convex pieces, each an intersection of open half-planes.
    pieces: Vec<Vec<HalfPlane>>,
    /// Checked in order; the first line containing an edge tags it.
    lines: Vec<BoundaryLine>,
    /// `[xmin, xmax, ymin, ymax]` in key units.
    bbox: [i64; 4],
}

impl Region {
    /// `p3` is three times a point in key units (a triangle centroid sum).
    fn contains_scaled(&self, p3: [i64; 2]) -> bool {
        self.pieces
            .iter()
            .any(|piece| piece.iter().all(|h| h.a * p3[0] + h.b * p3[1] < 3 * h.c))
    }

    fn tag_edge(&self, p: [i64; 2], q: [i64; 2]) -> Option<BoundaryTag> {
        self.lines
            .iter()
            .find(|l| l.holds(p) && l.holds(q))
            .map(|l| l.tag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub tag: BoundaryTag,
}

/// Conforming triangulation with tagged boundary edges.
///
/// Nodes are ordered lexicographically by `(y, x)`.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub nodes: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub element_area: Vec<f64>,
    keys: Vec<[i64; 2]>,
    spacing: f64,
    origin: [f64; 2],
    domain: DomainSpec,
}

/// Criss-cross triangulation of the truncated domain: each `h x h` cell is
/// split into four triangles through its centre.
pub fn triangulate(spec: &DomainSpec) -> Result<Mesh> {
    let region = spec.region();
    let [x0, x1, y0, y1] = region.bbox;
    let (i0, i1) = (x0.div_euclid(2), (x1 + 1).div_euclid(2));
    let (j0, j1) = (y0.div_euclid(2), (y1 + 1).div_euclid(2));

    let mut key_tris: Vec<[[i64; 2]; 3]> = Vec::new();
    for j in j0..j1 {
        for i in i0..i1 {
            let c00 = [2 * i, 2 * j];
            let c10 = [2 * i + 2, 2 * j];
            let c11 = [2 * i + 2, 2 * j + 2];
            let c01 = [2 * i, 2 * j + 2];
            let mid = [2 * i + 1, 2 * j + 1];
            for tri in [
                [c00, c10, mid],
                [c10, c11, mid],
                [c11, c01, mid],
                [c01, c00, mid],
            ] {
                let sum = [
                    tri[0][0] + tri[1][0] + tri[2][0],
                    tri[0][1] + tri[1][1] + tri[2][1],
                ];
                if region.contains_scaled(sum) {
                    key_tris.push(tri);
                }
            }
        }
    }
    if key_tris.is_empty() {
        return Err(Error::Mesh(format!(
            "{} domain contains no triangles",
            spec.kind
        )));
    }

    let mut keys: Vec<[i64; 2]> = key_tris.iter().flat_map(|t| t.iter().copied()).collect();
    keys.sort_unstable_by_key(|k| (k[1], k[0]));
    keys.dedup();
    let index_of = |k: [i64; 2]| {
        keys.binary_search_by_key(&(k[1], k[0]), |p| (p[1], p[0]))
            .expect("triangle vertex is a mesh node")
    };
    let triangles: Vec<[usize; 3]> = key_tris
        .iter()
        .map(|t| [index_of(t[0]), index_of(t[1]), index_of(t[2])])
        .collect();

    let spacing = spec.grid_spacing();
    let origin = spec.grid_origin();
    let half = spacing / 2.0;
    let nodes: Vec<[f64; 2]> = keys
        .iter()
        .map(|k| {
            [
                origin[0] + k[0] as f64 * half,
                origin[1] + k[1] as f64 * half,
            ]
        })
        .collect();

    let mut boundary_edges = Vec::new();
    for [p, q] in boundary_edge_pairs(&triangles)? {
        let tag = region.tag_edge(keys[p], keys[q]).ok_or_else(|| {
            Error::Mesh(format!(
                "boundary edge ({:?}, {:?}) of {} lies on no boundary line; spacing {} is not conforming",
                nodes[p], nodes[q], spec.kind, spacing
            ))
        })?;
        boundary_edges.push(BoundaryEdge { nodes: [p, q], tag });
    }

    let element_area = triangles
        .iter()
        .map(|t| signed_area(&nodes, t))
        .collect::<Vec<_>>();
    if let Some(i) = element_area.iter().position(|&a| a <= 0.0) {
        return Err(Error::Mesh(format!("triangle {i} has non-positive area")));
    }

    Ok(Mesh {
        nodes,
        triangles,
        boundary_edges,
        element_area,
        keys,
        spacing,
        origin,
        domain: *spec,
    })
}

fn signed_area(nodes: &[[f64; 2]], t: &[usize; 3]) -> f64 {
    let [a, b, c] = [nodes[t[0]], nodes[t[1]], nodes[t[2]]];
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

/// Edges used by exactly one triangle, sorted. Fails on edges shared by more
/// than two triangles.
fn boundary_edge_pairs(triangles: &[[usize; 3]]) -> Result<Vec<[usize; 2]>> {
    let mut edges: Vec<[usize; 2]> = Vec::with_capacity(3 * triangles.len());
    for t in triangles {
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            edges.push([a.min(b), a.max(b)]);
        }
    }
    edges.sort_unstable();
    let mut out = Vec::new();
    let mut i = 0;
    while i < edges.len() {
        let mut j = i + 1;
        while j < edges.len() && edges[j] == edges[i] {
            j += 1;
        }
        match j - i {
            1 => out.push(edges[i]),
            2 => {}
            n => {
                return Err(Error::Mesh(format!(
                    "edge {:?} is shared by {n} triangles",
                    edges[i]
                )))
            }
        }
        i = j;
    }
    Ok(out)
}

impl Mesh {
    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Spacing of the underlying grid.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn total_area(&self) -> f64 {
        self.element_area.iter().sum()
    }

    /// Grid key (in units of half the spacing) of `node`.
    pub fn key(&self, node: usize) -> [i64; 2] {
        self.keys[node]
    }

    pub fn node_at_key(&self, key: [i64; 2]) -> Option<usize> {
        self.keys
            .binary_search_by_key(&(key[1], key[0]), |p| (p[1], p[0]))
            .ok()
    }

    /// Node whose coordinates match `p` to within rounding.
    pub fn node_near(&self, p: [f64; 2]) -> Option<usize> {
        let half = self.spacing / 2.0;
        let kx = libm::round((p[0] - self.origin[0]) / half);
        let ky = libm::round((p[1] - self.origin[1]) / half);
        let node = self.node_at_key([kx as i64, ky as i64])?;
        let q = self.nodes[node];
        let tol = 1e-9 * (1.0 + libm::fabs(p[0]) + libm::fabs(p[1]));
        (libm::fabs(q[0] - p[0]) <= tol && libm::fabs(q[1] - p[1]) <= tol).then_some(node)
    }

    /// `true` for every node touched by a Dirichlet-tagged edge.
    pub fn dirichlet_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.nodes.len()];
        for e in self.boundary_edges.iter().filter(|e| e.tag.is_dirichlet()) {
            mask[e.nodes[0]] = true;
            mask[e.nodes[1]] = true;
        }
        mask
    }

    /// The part of the mesh with `y >= x`; edges on the diagonal receive
    /// `diagonal_tag`, all other boundary edges keep their tags.
    pub fn upper_half(&self, diagonal_tag: BoundaryTag) -> Result<Mesh> {
        let kept: Vec<[usize; 3]> = self
            .triangles
            .iter()
            .copied()
            .filter(|t| {
                let sx: i64 = t.iter().map(|&n| self.keys[n][0]).sum();
                let sy: i64 = t.iter().map(|&n| self.keys[n][1]).sum();
                sy > sx
            })
            .collect();
        if kept.is_empty() {
            return Err(Error::Mesh("upper half of the mesh is empty".into()));
        }
        let mut used = vec![false; self.nodes.len()];
        for t in &kept {
            for &n in t {
                used[n] = true;
            }
        }
        let mut renumber = vec![usize::MAX; self.nodes.len()];
        let mut keys = Vec::new();
        let mut nodes = Vec::new();
        for (old, _) in used.iter().enumerate().filter(|(_, &u)| u) {
            renumber[old] = keys.len();
            keys.push(self.keys[old]);
            nodes.push(self.nodes[old]);
        }
        let triangles: Vec<[usize; 3]> = kept
            .iter()
            .map(|t| [renumber[t[0]], renumber[t[1]], renumber[t[2]]])
            .collect();

        let parent_tags: BTreeMap<[usize; 2], BoundaryTag> = self
            .boundary_edges
            .iter()
            .map(|e| {
                (
                    [e.nodes[0].min(e.nodes[1]), e.nodes[0].max(e.nodes[1])],
                    e.tag,
                )
            })
            .collect();
        let mut back = vec![0usize; keys.len()];
        for (old, &new) in renumber.iter().enumerate() {
            if new != usize::MAX {
                back[new] = old;
            }
        }
        let mut boundary_edges = Vec::new();
        for [p, q] in boundary_edge_pairs(&triangles)? {
            let (op, oq) = (back[p], back[q]);
            let tag = match parent_tags.get(&[op.min(oq), op.max(oq)]) {
                Some(&tag) => tag,
                None if keys[p][0] == keys[p][1] && keys[q][0] == keys[q][1] => diagonal_tag,
                None => {
                    return Err(Error::Mesh(format!(
                        "cut edge ({:?}, {:?}) is not on the diagonal",
                        nodes[p], nodes[q]
                    )))
                }
            };
            boundary_edges.push(BoundaryEdge { nodes: [p, q], tag });
        }
        let element_area = triangles.iter().map(|t| signed_area(&nodes, t)).collect();
        Ok(Mesh {
            nodes,
            triangles,
            boundary_edges,
            element_area,
            keys,
            spacing: self.spacing,
            origin: self.origin,
            domain: self.domain,
        })
    }
}

/// Plane isometries used by the comparison maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Isometry {
    /// `(x, y) -> (x, -y)`
    ReflectXAxis,
    /// `(x, y) -> (-x, y)`
    ReflectYAxis,
    /// `(x, y) -> (y, x)`
    ReflectDiagonal,
    Translate([f64; 2]),
}

impl Isometry {
    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        match *self {
            Isometry::ReflectXAxis => [p[0], -p[1]],
            Isometry::ReflectYAxis => [-p[0], p[1]],
            Isometry::ReflectDiagonal => [p[1], p[0]],
            Isometry::Translate(t) => [p[0] + t[0], p[1] + t[1]],
        }
    }
}

/// Image of every node of `source` under `isometry`, as node indices of
/// `target`. Fails at the first node without an exact counterpart.
pub fn map_nodes(source: &Mesh, isometry: Isometry, target: &Mesh) -> Result<Vec<usize>> {
    source
        .nodes
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let q = isometry.apply(p);
            target.node_near(q).ok_or(Error::UnmatchedNode {
                node: i,
                x: q[0],
                y: q[1],
            })
        })
        .collect()
}

/// Node permutation of `mesh` realizing one of its own symmetries.
pub fn reflect_or_translate_nodes(mesh: &Mesh, isometry: Isometry) -> Result<Vec<usize>> {
    map_nodes(mesh, isometry, mesh)
}
