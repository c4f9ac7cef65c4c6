//! Reference elements and per-element geometric operators.
//!
//! Every element kind is described by a [`ReferenceElement`] table: node
//! coordinates in the parametric domain, the integration points sitting on
//! the internal sub-control-volume (SCV) faces together with the SCV pair
//! each face separates, and the SCV centroids. The 2D kinds are the `ζ = 0`
//! restrictions of the 3D ones and share all code paths; their Jacobian is
//! padded with a unit `z` direction so that `G = B J⁻¹` has a zero `z`
//! column.

use std::sync::OnceLock;

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

pub type Point = [f64; 3];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ElementError {
    #[error("{kind:?} element is inverted or degenerate (det J = {det:e} at {at:?})")]
    Degenerate { kind: ElementKind, det: f64, at: Point },
    #[error("{kind:?} element needs {expected} nodes, got {got}")]
    NodeCount {
        kind: ElementKind,
        expected: usize,
        got: usize,
    },
    #[error("collinear vertices on the face of integration point {ip}")]
    CollinearFace { ip: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementKind {
    Hex8,
    Prism6,
    Quad4,
    Tri3,
}

impl ElementKind {
    pub const ALL: [ElementKind; 4] = [Self::Hex8, Self::Prism6, Self::Quad4, Self::Tri3];

    pub fn node_count(self) -> usize {
        match self {
            Self::Hex8 => 8,
            Self::Prism6 => 6,
            Self::Quad4 => 4,
            Self::Tri3 => 3,
        }
    }

    pub fn dimension(self) -> usize {
        match self {
            Self::Hex8 | Self::Prism6 => 3,
            Self::Quad4 | Self::Tri3 => 2,
        }
    }

    /// Keyword used by the mesh text format.
    pub fn keyword(self) -> &'static str {
        match self {
            Self::Hex8 => "HEX8",
            Self::Prism6 => "PRISM6",
            Self::Quad4 => "QUAD4",
            Self::Tri3 => "TRI3",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == word)
    }

    /// Legacy VTK cell type code.
    pub fn vtk_cell_type(self) -> u8 {
        match self {
            Self::Hex8 => 12,
            Self::Prism6 => 13,
            Self::Quad4 => 9,
            Self::Tri3 => 5,
        }
    }

    /// The kind obtained by extruding this 2D kind through the film.
    pub fn extruded(self) -> Option<Self> {
        match self {
            Self::Quad4 => Some(Self::Hex8),
            Self::Tri3 => Some(Self::Prism6),
            _ => None,
        }
    }

    pub fn reference(self) -> &'static ReferenceElement {
        static TABLES: OnceLock<[ReferenceElement; 4]> = OnceLock::new();
        let tables = TABLES.get_or_init(|| {
            [
                ReferenceElement::hex8(),
                ReferenceElement::prism6(),
                ReferenceElement::quad4(),
                ReferenceElement::tri3(),
            ]
        });
        match self {
            Self::Hex8 => &tables[0],
            Self::Prism6 => &tables[1],
            Self::Quad4 => &tables[2],
            Self::Tri3 => &tables[3],
        }
    }
}

/// An integration point on the face shared by two SCVs of one element.
///
/// The face vertices are ordered so that the area vector points from the
/// `donor` SCV (for which the point is an outflow face) into the `receiver`.
#[derive(Debug, Clone)]
pub struct IntegrationPoint {
    pub coords: Point,
    pub donor: usize,
    pub receiver: usize,
    pub face: Vec<Point>,
}

#[derive(Debug, Clone)]
pub struct ReferenceElement {
    pub kind: ElementKind,
    pub nodes: Vec<Point>,
    pub integration_points: Vec<IntegrationPoint>,
    pub scv_centroids: Vec<Point>,
    /// SCV measure as a fraction of `det J` at the SCV centroid.
    pub scv_fraction: f64,
    /// Quadrature over each SCV's parametric region that integrates `det J`
    /// exactly for this kind.
    pub scv_quadrature: Vec<Vec<(Point, f64)>>,
}

const GAUSS_OFFSET: f64 = 0.144_337_567_297_406_43; // 1/(4√3)

fn avg(points: &[Point]) -> Point {
    let n = points.len() as f64;
    let mut out = [0.0; 3];
    for p in points {
        for d in 0..3 {
            out[d] += p[d] / n;
        }
    }
    out
}

fn sub(a: Point, b: Point) -> Vector3<f64> {
    Vector3::new(a[0] - b[0], a[1] - b[1], a[2] - b[2])
}

/// Vector area of a straight-edged face: quadrilaterals use the diagonal
/// cross product, segments (2D kinds) are rotated by -90° about `z`.
fn face_area_vector(vertices: &[Point]) -> Vector3<f64> {
    match vertices.len() {
        2 => {
            let d = sub(vertices[1], vertices[0]);
            Vector3::new(d.y, -d.x, 0.0)
        }
        4 => 0.5 * sub(vertices[2], vertices[0]).cross(&sub(vertices[3], vertices[1])),
        n => panic!("unsupported face with {n} vertices"),
    }
}

impl ReferenceElement {
    fn finish(
        kind: ElementKind,
        nodes: Vec<Point>,
        ips: Vec<(Point, usize, usize, Vec<Point>)>,
        scv_centroids: Vec<Point>,
        scv_fraction: f64,
        scv_quadrature: Vec<Vec<(Point, f64)>>,
    ) -> Self {
        let integration_points = ips
            .into_iter()
            .map(|(coords, donor, receiver, mut face)| {
                let s = face_area_vector(&face);
                let dir = sub(scv_centroids[receiver], scv_centroids[donor]);
                if s.dot(&dir) < 0.0 {
                    face.reverse();
                }
                IntegrationPoint {
                    coords,
                    donor,
                    receiver,
                    face,
                }
            })
            .collect();
        Self {
            kind,
            nodes,
            integration_points,
            scv_centroids,
            scv_fraction,
            scv_quadrature,
        }
    }

    fn hex8() -> Self {
        let nodes = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 1.0],
            [1.0, 1.0, 1.0],
            [0.0, 1.0, 1.0],
        ];
        let (q, h, t) = (0.25, 0.5, 0.75);
        // (coords, donor, receiver, normal axis)
        let table: [(Point, usize, usize, usize); 12] = [
            ([h, q, q], 0, 1, 0),
            ([t, h, q], 1, 2, 1),
            ([h, t, q], 2, 3, 0),
            ([q, h, q], 3, 0, 1),
            ([h, q, t], 4, 5, 0),
            ([t, h, t], 5, 6, 1),
            ([h, t, t], 6, 7, 0),
            ([q, h, t], 7, 4, 1),
            ([q, q, h], 0, 4, 2),
            ([t, q, h], 1, 5, 2),
            ([t, t, h], 2, 6, 2),
            ([q, t, h], 3, 7, 2),
        ];
        let ips = table
            .iter()
            .map(|&(c, d, r, axis)| {
                let (b, cax) = ((axis + 1) % 3, (axis + 2) % 3);
                let face = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
                    .iter()
                    .map(|&(sb, sc)| {
                        let mut v = c;
                        v[b] += sb * q;
                        v[cax] += sc * q;
                        v
                    })
                    .collect();
                (c, d, r, face)
            })
            .collect();
        let scv_centroids: Vec<Point> = nodes
            .iter()
            .map(|p| [0.25 + 0.5 * p[0], 0.25 + 0.5 * p[1], 0.25 + 0.5 * p[2]])
            .collect();
        let scv_quadrature = scv_centroids
            .iter()
            .map(|g| {
                let mut pts = Vec::with_capacity(8);
                for sx in [-1.0, 1.0] {
                    for sy in [-1.0, 1.0] {
                        for sz in [-1.0, 1.0] {
                            pts.push((
                                [
                                    g[0] + sx * GAUSS_OFFSET,
                                    g[1] + sy * GAUSS_OFFSET,
                                    g[2] + sz * GAUSS_OFFSET,
                                ],
                                1.0 / 64.0,
                            ));
                        }
                    }
                }
                pts
            })
            .collect();
        Self::finish(ElementKind::Hex8, nodes, ips, scv_centroids, 1.0 / 8.0, scv_quadrature)
    }

    fn prism6() -> Self {
        let nodes = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 1.0],
            [0.0, 1.0, 1.0],
        ];
        let corners = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        // bottom-triangle edge midpoints m1, m2, m3 and centroid c4
        let mids = [[0.5, 0.0], [0.5, 0.5], [0.0, 0.5]];
        let c4 = [1.0 / 3.0, 1.0 / 3.0];
        let at = |p: [f64; 2], z: f64| -> Point { [p[0], p[1], z] };

        let mut ips = Vec::with_capacity(9);
        for (level, z0) in [0.0, 0.5].into_iter().enumerate() {
            for e in 0..3 {
                let m = mids[e];
                let face = vec![at(m, z0), at(c4, z0), at(c4, z0 + 0.5), at(m, z0 + 0.5)];
                let coords = [(m[0] + c4[0]) / 2.0, (m[1] + c4[1]) / 2.0, z0 + 0.25];
                ips.push((coords, 3 * level + e, 3 * level + (e + 1) % 3, face));
            }
        }
        // kite of the SCV around corner s: corner, its outgoing midpoint, centroid, incoming midpoint
        let kite = |s: usize| -> [[f64; 2]; 4] { [corners[s], mids[s], c4, mids[(s + 2) % 3]] };
        for s in 0..3 {
            let face: Vec<Point> = kite(s).iter().map(|&p| at(p, 0.5)).collect();
            let coords = avg(&face);
            ips.push((coords, s, s + 3, face));
        }
        // explicit rational values for the SCV centroids
        let g = [
            [5.0 / 24.0, 5.0 / 24.0],
            [7.0 / 12.0, 5.0 / 24.0],
            [5.0 / 24.0, 7.0 / 12.0],
        ];
        let scv_centroids: Vec<Point> = [0.25, 0.75]
            .iter()
            .flat_map(|&z| g.iter().map(move |p| [p[0], p[1], z]))
            .collect();
        let scv_quadrature = (0..6)
            .map(|s| {
                let k = kite(s % 3);
                let zc = if s < 3 { 0.25 } else { 0.75 };
                let tris = [[k[0], k[1], k[2]], [k[0], k[2], k[3]]];
                let mut pts = Vec::with_capacity(4);
                for tri in tris {
                    let cx = (tri[0][0] + tri[1][0] + tri[2][0]) / 3.0;
                    let cy = (tri[0][1] + tri[1][1] + tri[2][1]) / 3.0;
                    for sz in [-1.0, 1.0] {
                        pts.push(([cx, cy, zc + sz * GAUSS_OFFSET], 1.0 / 48.0));
                    }
                }
                pts
            })
            .collect();
        Self::finish(
            ElementKind::Prism6,
            nodes,
            ips,
            scv_centroids,
            1.0 / 12.0,
            scv_quadrature,
        )
    }

    fn quad4() -> Self {
        let hex = Self::hex8();
        let nodes = hex.nodes[..4].iter().map(|p| [p[0], p[1], 0.0]).collect();
        let ips = hex.integration_points[..4]
            .iter()
            .map(|ip| {
                let c = [ip.coords[0], ip.coords[1], 0.0];
                // segment through the point along the in-plane axis
                let along = if ip.coords[0] == 0.5 { 1 } else { 0 };
                let mut a = c;
                let mut b = c;
                a[along] -= 0.25;
                b[along] += 0.25;
                (c, ip.donor, ip.receiver, vec![a, b])
            })
            .collect();
        let scv_centroids: Vec<Point> = hex.scv_centroids[..4].iter().map(|g| [g[0], g[1], 0.0]).collect();
        let scv_quadrature = scv_centroids.iter().map(|g| vec![(*g, 0.25)]).collect();
        Self::finish(ElementKind::Quad4, nodes, ips, scv_centroids, 1.0 / 4.0, scv_quadrature)
    }

    fn tri3() -> Self {
        let prism = Self::prism6();
        let nodes = prism.nodes[..3].to_vec();
        let mids = [[0.5, 0.0, 0.0], [0.5, 0.5, 0.0], [0.0, 0.5, 0.0]];
        let c4 = [1.0 / 3.0, 1.0 / 3.0, 0.0];
        let ips = prism.integration_points[..3]
            .iter()
            .enumerate()
            .map(|(e, ip)| {
                (
                    [ip.coords[0], ip.coords[1], 0.0],
                    ip.donor,
                    ip.receiver,
                    vec![mids[e], c4],
                )
            })
            .collect();
        let scv_centroids: Vec<Point> = prism.scv_centroids[..3].iter().map(|g| [g[0], g[1], 0.0]).collect();
        let scv_quadrature = prism.scv_quadrature[..3]
            .iter()
            .map(|pts| {
                pts.chunks(2)
                    .map(|pair| ([pair[0].0[0], pair[0].0[1], 0.0], 1.0 / 12.0))
                    .collect()
            })
            .collect();
        Self::finish(ElementKind::Tri3, nodes, ips, scv_centroids, 1.0 / 6.0, scv_quadrature)
    }

    /// Signed integration-point membership of each SCV: `+1` where the SCV is
    /// the donor (outflow face), `-1` where it is the receiver.
    pub fn scv_face_signs(&self) -> Vec<Vec<(usize, f64)>> {
        let mut out = vec![Vec::new(); self.scv_centroids.len()];
        for (i, ip) in self.integration_points.iter().enumerate() {
            out[ip.donor].push((i, 1.0));
            out[ip.receiver].push((i, -1.0));
        }
        for v in &mut out {
            // outflow faces first, then by point index
            v.sort_by(|a: &(usize, f64), b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        }
        out
    }
}

/// Shape function values `N_m(ξ, η, ζ)`.
pub fn shape_functions(kind: ElementKind, xi: Point) -> Vec<f64> {
    let [x, y, z] = xi;
    match kind {
        ElementKind::Hex8 => vec![
            (1.0 - x) * (1.0 - y) * (1.0 - z),
            x * (1.0 - y) * (1.0 - z),
            x * y * (1.0 - z),
            (1.0 - x) * y * (1.0 - z),
            (1.0 - x) * (1.0 - y) * z,
            x * (1.0 - y) * z,
            x * y * z,
            (1.0 - x) * y * z,
        ],
        ElementKind::Prism6 => {
            let l = 1.0 - x - y;
            vec![l * (1.0 - z), x * (1.0 - z), y * (1.0 - z), l * z, x * z, y * z]
        }
        ElementKind::Quad4 => vec![(1.0 - x) * (1.0 - y), x * (1.0 - y), x * y, (1.0 - x) * y],
        ElementKind::Tri3 => vec![1.0 - x - y, x, y],
    }
}

/// Derivatives of the shape functions with respect to the parametric
/// coordinates; row `m` is `(∂N_m/∂ξ, ∂N_m/∂η, ∂N_m/∂ζ)`.
pub fn gradient_matrix(kind: ElementKind, xi: Point) -> Vec<[f64; 3]> {
    let [x, y, z] = xi;
    match kind {
        ElementKind::Hex8 => vec![
            [-(1.0 - y) * (1.0 - z), -(1.0 - x) * (1.0 - z), -(1.0 - x) * (1.0 - y)],
            [(1.0 - y) * (1.0 - z), -x * (1.0 - z), -x * (1.0 - y)],
            [y * (1.0 - z), x * (1.0 - z), -x * y],
            [-y * (1.0 - z), (1.0 - x) * (1.0 - z), -y * (1.0 - x)],
            [-z * (1.0 - y), -z * (1.0 - x), (1.0 - x) * (1.0 - y)],
            [z * (1.0 - y), -x * z, x * (1.0 - y)],
            [y * z, x * z, x * y],
            [-y * z, z * (1.0 - x), y * (1.0 - x)],
        ],
        ElementKind::Prism6 => {
            let l = 1.0 - x - y;
            vec![
                [-(1.0 - z), -(1.0 - z), -l],
                [1.0 - z, 0.0, -x],
                [0.0, 1.0 - z, -y],
                [-z, -z, l],
                [z, 0.0, x],
                [0.0, z, y],
            ]
        }
        ElementKind::Quad4 => vec![
            [-(1.0 - y), -(1.0 - x), 0.0],
            [1.0 - y, -x, 0.0],
            [y, x, 0.0],
            [-y, 1.0 - x, 0.0],
        ],
        ElementKind::Tri3 => vec![[-1.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
    }
}

fn check_nodes(kind: ElementKind, nodes: &[Point]) -> Result<(), ElementError> {
    if nodes.len() != kind.node_count() {
        return Err(ElementError::NodeCount {
            kind,
            expected: kind.node_count(),
            got: nodes.len(),
        });
    }
    Ok(())
}

/// `J = Z_e B` without the positivity check.
fn raw_jacobian(kind: ElementKind, nodes: &[Point], xi: Point) -> Matrix3<f64> {
    let b = gradient_matrix(kind, xi);
    let mut j = Matrix3::zeros();
    let dims = kind.dimension();
    for (x, row) in nodes.iter().zip(&b) {
        for i in 0..dims {
            for l in 0..dims {
                j[(i, l)] += x[i] * row[l];
            }
        }
    }
    if dims == 2 {
        j[(2, 2)] = 1.0;
    }
    j
}

/// Maps a parametric point into physical space.
pub fn map_point(kind: ElementKind, nodes: &[Point], xi: Point) -> Point {
    let n = shape_functions(kind, xi);
    let mut out = [0.0; 3];
    for (w, x) in n.iter().zip(nodes) {
        for d in 0..3 {
            out[d] += w * x[d];
        }
    }
    out
}

/// Jacobian `J = Z_e B(ξ, η, ζ)`; errors when `det J ≤ 0`.
pub fn jacobian(kind: ElementKind, nodes: &[Point], xi: Point) -> Result<Matrix3<f64>, ElementError> {
    check_nodes(kind, nodes)?;
    let j = raw_jacobian(kind, nodes, xi);
    let det = j.determinant();
    if det.is_nan() || det <= 0.0 {
        return Err(ElementError::Degenerate { kind, det, at: xi });
    }
    Ok(j)
}

/// Gradient tensor `G = B J⁻¹`; row `k` is the physical gradient of `N_k`.
pub fn gradient_tensor(kind: ElementKind, nodes: &[Point], xi: Point) -> Result<Vec<Vector3<f64>>, ElementError> {
    let j = jacobian(kind, nodes, xi)?;
    let inv = j
        .try_inverse()
        .ok_or(ElementError::Degenerate { kind, det: 0.0, at: xi })?;
    Ok(gradient_matrix(kind, xi)
        .iter()
        .map(|b| (Vector3::new(b[0], b[1], b[2]).transpose() * inv).transpose())
        .collect())
}

/// SCV volumes (areas for 2D kinds), integrating `det J` exactly over each
/// SCV's parametric region. Coincides with `fraction · det J(G_s)` whenever
/// `det J` is multilinear, e.g. for reference, affine and extruded elements.
pub fn scv_volumes(kind: ElementKind, nodes: &[Point]) -> Result<Vec<f64>, ElementError> {
    check_nodes(kind, nodes)?;
    let reference = kind.reference();
    reference
        .scv_quadrature
        .iter()
        .map(|pts| {
            let mut vol = 0.0;
            for &(xi, w) in pts {
                vol += w * jacobian(kind, nodes, xi)?.determinant();
            }
            if vol <= 0.0 {
                return Err(ElementError::Degenerate {
                    kind,
                    det: vol,
                    at: pts[0].0,
                });
            }
            Ok(vol)
        })
        .collect()
}

/// Single-point SCV volumes `fraction · det J(G_s)`.
pub fn scv_volumes_centroid_rule(kind: ElementKind, nodes: &[Point]) -> Result<Vec<f64>, ElementError> {
    let reference = kind.reference();
    reference
        .scv_centroids
        .iter()
        .map(|&g| Ok(reference.scv_fraction * jacobian(kind, nodes, g)?.determinant()))
        .collect()
}

/// Per integration point: the physical face area vector `ΔS_f` (oriented
/// donor → receiver) and its unit normal `n*`.
pub fn face_area_normals(
    kind: ElementKind,
    nodes: &[Point],
) -> Result<Vec<(Vector3<f64>, Vector3<f64>)>, ElementError> {
    check_nodes(kind, nodes)?;
    kind.reference()
        .integration_points
        .iter()
        .enumerate()
        .map(|(i, ip)| {
            let verts: Vec<Point> = ip.face.iter().map(|&v| map_point(kind, nodes, v)).collect();
            let s = face_area_vector(&verts);
            let norm = s.norm();
            if norm == 0.0 || !norm.is_finite() {
                return Err(ElementError::CollinearFace { ip: i });
            }
            Ok((s, s / norm))
        })
        .collect()
}

/// Cached geometry at one integration point.
#[derive(Debug, Clone)]
pub struct IpGeometry {
    pub shape: Vec<f64>,
    pub gradients: Vec<Vector3<f64>>,
    /// Face area vector `ΔS_f`, oriented donor → receiver.
    pub area: Vector3<f64>,
}

/// Precomputed geometry of one element.
#[derive(Debug, Clone)]
pub struct ElementGeometry {
    pub kind: ElementKind,
    pub nodes: Vec<Point>,
    pub ips: Vec<IpGeometry>,
    pub scv_volumes: Vec<f64>,
}

impl ElementGeometry {
    pub fn new(kind: ElementKind, nodes: Vec<Point>) -> Result<Self, ElementError> {
        check_nodes(kind, &nodes)?;
        let reference = kind.reference();
        for &g in &reference.scv_centroids {
            jacobian(kind, &nodes, g)?;
        }
        let faces = face_area_normals(kind, &nodes)?;
        let ips = reference
            .integration_points
            .iter()
            .zip(faces)
            .map(|(ip, (area, _))| {
                Ok(IpGeometry {
                    shape: shape_functions(kind, ip.coords),
                    gradients: gradient_tensor(kind, &nodes, ip.coords)?,
                    area,
                })
            })
            .collect::<Result<Vec<_>, ElementError>>()?;
        let scv_volumes = scv_volumes(kind, &nodes)?;
        Ok(Self {
            kind,
            nodes,
            ips,
            scv_volumes,
        })
    }

    pub fn volume(&self) -> f64 {
        self.scv_volumes.iter().sum()
    }

    /// Unit normal at integration point `i`.
    pub fn unit_normal(&self, i: usize) -> Vector3<f64> {
        let a = self.ips[i].area;
        a / a.norm()
    }
}

/// Aggregated diffusion tensor `B_mjki` of every SCV: the signed sum of
/// `H_mjki = N_m G_jk ΔS_i` over the SCV's integration faces.
#[derive(Debug, Clone)]
pub struct DiffusionTensor {
    m: usize,
    data: Vec<f64>,
}

impl DiffusionTensor {
    fn index(&self, s: usize, m: usize, j: usize, k: usize, i: usize) -> usize {
        (((s * self.m + m) * 3 + j) * self.m + k) * 3 + i
    }

    pub fn get(&self, s: usize, m: usize, j: usize, k: usize, i: usize) -> f64 {
        self.data[self.index(s, m, j, k, i)]
    }

    /// `𝔇_s = Σ_{m,k} B_mjki,s Γ_ijm φ_k` for nodal tensors `Γ_m`.
    pub fn scv_flux(&self, s: usize, gamma: &[Matrix3<f64>], phi: &[f64]) -> f64 {
        let mut total = 0.0;
        for (m, g) in gamma.iter().enumerate() {
            for (k, &p) in phi.iter().enumerate() {
                for i in 0..3 {
                    for j in 0..3 {
                        total += self.get(s, m, j, k, i) * g[(i, j)] * p;
                    }
                }
            }
        }
        total
    }
}

pub fn diffusion_tensor(geom: &ElementGeometry) -> DiffusionTensor {
    let reference = geom.kind.reference();
    let m = geom.kind.node_count();
    let mut t = DiffusionTensor {
        m,
        data: vec![0.0; reference.scv_centroids.len() * m * 9 * m],
    };
    for (s, faces) in reference.scv_face_signs().iter().enumerate() {
        for &(ip, sign) in faces {
            let g = &geom.ips[ip];
            for mm in 0..m {
                for j in 0..3 {
                    for k in 0..m {
                        for i in 0..3 {
                            let idx = t.index(s, mm, j, k, i);
                            t.data[idx] += sign * g.shape[mm] * g.gradients[k][j] * g.area[i];
                        }
                    }
                }
            }
        }
    }
    t
}
