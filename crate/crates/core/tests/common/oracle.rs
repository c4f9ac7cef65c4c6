//! Independent geometric and rheological reference values.

use ebfvm::elements::{ElementKind, Point};
use nalgebra::Vector3;

pub fn reference_nodes(kind: ElementKind) -> Vec<Point> {
    kind.reference().nodes.clone()
}

/// Reference nodes moved by `jitter` (three components per node, 2D kinds
/// ignore z).
pub fn distorted(kind: ElementKind, jitter: &[f64]) -> Vec<Point> {
    reference_nodes(kind)
        .into_iter()
        .enumerate()
        .map(|(i, mut p)| {
            for d in 0..kind.dimension() {
                p[d] += jitter[3 * i + d];
            }
            p
        })
        .collect()
}

pub fn sub(a: Point, b: Point) -> Vector3<f64> {
    Vector3::new(a[0] - b[0], a[1] - b[1], a[2] - b[2])
}

pub fn centroid(points: &[Point]) -> Point {
    let n = points.len() as f64;
    let mut c = [0.0; 3];
    for p in points {
        for d in 0..3 {
            c[d] += p[d] / n;
        }
    }
    c
}

/// Volume enclosed by outward-oriented faces; quadrilaterals are fanned
/// from their vertex average, which is exact for bilinear faces.
pub fn tet_volume(nodes: &[Point], faces: &[&[usize]]) -> f64 {
    let c = centroid(nodes);
    let mut v = 0.0;
    for face in faces {
        let pts: Vec<Point> = face.iter().map(|&i| nodes[i]).collect();
        let tris: Vec<[Point; 3]> = if pts.len() == 3 {
            vec![[pts[0], pts[1], pts[2]]]
        } else {
            let m = centroid(&pts);
            (0..4).map(|k| [pts[k], pts[(k + 1) % 4], m]).collect()
        };
        for [a, b, m] in tris {
            v += sub(a, c).dot(&sub(b, c).cross(&sub(m, c))) / 6.0;
        }
    }
    v
}

pub fn element_volume_oracle(kind: ElementKind, nodes: &[Point]) -> f64 {
    match kind {
        ElementKind::Hex8 => tet_volume(
            nodes,
            &[
                &[0, 3, 2, 1],
                &[4, 5, 6, 7],
                &[0, 1, 5, 4],
                &[1, 2, 6, 5],
                &[2, 3, 7, 6],
                &[3, 0, 4, 7],
            ],
        ),
        ElementKind::Prism6 => tet_volume(
            nodes,
            &[&[0, 2, 1], &[3, 4, 5], &[0, 1, 4, 3], &[1, 2, 5, 4], &[2, 0, 3, 5]],
        ),
        // shoelace
        _ => {
            let n = nodes.len();
            (0..n)
                .map(|i| {
                    let (a, b) = (nodes[i], nodes[(i + 1) % n]);
                    0.5 * (a[0] * b[1] - b[0] * a[1])
                })
                .sum()
        }
    }
}

pub fn reference_point(kind: ElementKind, u: [f64; 3]) -> Point {
    match kind {
        ElementKind::Prism6 | ElementKind::Tri3 => {
            // fold the unit square onto the triangle
            let (a, b) = if u[0] + u[1] > 1.0 {
                (1.0 - u[0], 1.0 - u[1])
            } else {
                (u[0], u[1])
            };
            [a, b, if kind == ElementKind::Prism6 { u[2] } else { 0.0 }]
        }
        ElementKind::Hex8 => u,
        ElementKind::Quad4 => [u[0], u[1], 0.0],
    }
}

/// `(p [Pa], T [K], η [Pa·s])` for the default model, evaluated with 50-digit
/// arithmetic.
pub const ROELANDS: [(f64, f64, f64); 48] = [
    (0.0, 293.15, 6.9069887599779141201),
    (0.0, 330.0, 0.35332551499412163735),
    (0.0, 353.15, 0.1),
    (0.0, 400.0, 0.017138245495252427374),
    (0.0, 450.0, 0.0051250642240618443452),
    (0.0, 520.0, 0.0017446634895715658125),
    (1e5, 293.15, 6.9080714979040329291),
    (1e5, 330.0, 0.35336670960833539809),
    (1e5, 353.15, 0.10000995369808056383),
    (1e5, 400.0, 0.017139542956318560482),
    (1e5, 450.0, 0.0051253686319645024865),
    (1e5, 520.0, 0.0017447417155585548814),
    (1e6, 293.15, 6.9178234827395126053),
    (1e6, 330.0, 0.35373766601935088537),
    (1e6, 353.15, 0.10009957884314284029),
    (1e6, 400.0, 0.017151224170671756493),
    (1e6, 450.0, 0.0051281090332711046004),
    (1e6, 520.0, 0.0017454458858218770661),
    (1e7, 293.15, 7.0160738657160385405),
    (1e7, 330.0, 0.3574675848092928144),
    (1e7, 353.15, 0.10099998687648806822),
    (1e7, 400.0, 0.017268439594239447449),
    (1e7, 450.0, 0.0051555854520022285136),
    (1e7, 520.0, 0.0017525011057755560346),
    (5e7, 293.15, 7.4692064951319055544),
    (5e7, 330.0, 0.37450067940611063119),
    (5e7, 353.15, 0.10509459040225249722),
    (5e7, 400.0, 0.017798364402993269859),
    (5e7, 450.0, 0.0052793086103737911548),
    (5e7, 520.0, 0.0017841567152746476621),
    (1e8, 293.15, 8.0752824004556416441),
    (1e8, 330.0, 0.39687524365903011219),
    (1e8, 353.15, 0.11043218388476354236),
    (1e8, 400.0, 0.018481803261979966782),
    (1e8, 450.0, 0.0054377090039673107929),
    (1e8, 520.0, 0.0018244208049062196747),
    (5e8, 293.15, 14.951475872125384701),
    (5e8, 330.0, 0.62752711073297306824),
    (5e8, 353.15, 0.1632940709318943273),
    (5e8, 400.0, 0.024885639777784847963),
    (5e8, 450.0, 0.0068673000588106775899),
    (5e8, 520.0, 0.0021759487342057810518),
    (1e9, 293.15, 31.686942033882317627),
    (1e9, 330.0, 1.0971044939373209908),
    (1e9, 353.15, 0.26308712158651518047),
    (1e9, 400.0, 0.035767492102828382183),
    (1e9, 450.0, 0.0091282403490734764694),
    (1e9, 520.0, 0.0026974557877490021053),
];
