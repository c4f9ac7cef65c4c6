//! Geometric grid: unwrapped bearing surface generation, the mesh text
//! format, texture footprints and periodic pairing.
//!
//! Node ids are 0-based in memory and 1-based in the text format.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt::Write as _;

use thiserror::Error;

use crate::elements::{ElementError, ElementGeometry, ElementKind, Point};

pub const AXIAL_LEFT: &str = "axial_left";
pub const AXIAL_RIGHT: &str = "axial_right";
pub const CIRC_START: &str = "circ_start";
pub const CIRC_END: &str = "circ_end";
pub const FEED_HOLE: &str = "feed_hole";
pub const TEXTURE: &str = "texture";

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown element kind `{word}`")]
    UnknownElementKind { line: usize, word: String },
    #[error("line {line}: reference to undefined node {id}")]
    DanglingNode { line: usize, id: usize },
    #[error("line {line}: duplicate node id {id}")]
    DuplicateNode { line: usize, id: usize },
    #[error("node ids are not contiguous from 1: id {missing} is missing")]
    NonContiguous { missing: usize },
    #[error("element {element} references node {node} but the mesh has {count} nodes")]
    NodeOutOfRange { element: usize, node: usize, count: usize },
    #[error("element {element}: {source}")]
    Element {
        element: usize,
        #[source]
        source: ElementError,
    },
    #[error("node {node} appears as a periodic slave more than once")]
    DuplicateSlave { node: usize },
    #[error("node {node} is both a periodic master and a slave")]
    ChainedPeriodic { node: usize },
    #[error("no partner for boundary node {node} within tolerance {tol:e}")]
    UnmatchedPeriodic { node: usize, tol: f64 },
    #[error("periodic boundaries have different node counts ({start} vs {end})")]
    PeriodicCountMismatch { start: usize, end: usize },
    #[error("footprint {what} lies outside the unwrapped domain")]
    FootprintOutside { what: String },
    #[error("refinement band [{lo}, {hi}] has zero width")]
    DegenerateRefinement { lo: f64, hi: f64 },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("mesh has no elements")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub kind: ElementKind,
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<Point>,
    pub elements: Vec<Element>,
    pub boundary_sets: BTreeMap<String, BTreeSet<usize>>,
    /// (master, slave) pairs.
    pub periodic_pairs: Vec<(usize, usize)>,
}

impl Mesh {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn set(&self, name: &str) -> impl Iterator<Item = usize> + '_ {
        self.boundary_sets.get(name).into_iter().flatten().copied()
    }

    pub fn element_nodes(&self, e: usize) -> Vec<Point> {
        self.elements[e].nodes.iter().map(|&n| self.nodes[n]).collect()
    }

    pub fn geometry(&self, e: usize) -> Result<ElementGeometry, MeshError> {
        ElementGeometry::new(self.elements[e].kind, self.element_nodes(e))
            .map_err(|source| MeshError::Element { element: e, source })
    }

    /// Slave → master lookup.
    pub fn master_of(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.nodes.len()];
        for &(m, s) in &self.periodic_pairs {
            out[s] = Some(m);
        }
        out
    }

    /// Checks every structural invariant: node references, positive
    /// Jacobians at all integration points and SCV centroids, and that the
    /// periodic pairs form a chain-free one-to-one map.
    pub fn validate(&self) -> Result<(), MeshError> {
        if self.elements.is_empty() {
            return Err(MeshError::Empty);
        }
        let count = self.nodes.len();
        for (e, el) in self.elements.iter().enumerate() {
            if let Some(&node) = el.nodes.iter().find(|&&n| n >= count) {
                return Err(MeshError::NodeOutOfRange {
                    element: e,
                    node,
                    count,
                });
            }
            self.geometry(e)?;
        }
        for set in self.boundary_sets.values() {
            if let Some(&node) = set.iter().find(|&&n| n >= count) {
                return Err(MeshError::NodeOutOfRange {
                    element: usize::MAX,
                    node,
                    count,
                });
            }
        }
        let mut slaves = BTreeSet::new();
        for &(m, s) in &self.periodic_pairs {
            if m >= count || s >= count {
                return Err(MeshError::NodeOutOfRange {
                    element: usize::MAX,
                    node: m.max(s),
                    count,
                });
            }
            if !slaves.insert(s) {
                return Err(MeshError::DuplicateSlave { node: s });
            }
        }
        for &(m, _) in &self.periodic_pairs {
            if slaves.contains(&m) {
                return Err(MeshError::ChainedPeriodic { node: m });
            }
        }
        Ok(())
    }
}

/// Graded subdivision of every base cell overlapping `[lo, hi]` along `axis`.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementBand {
    pub axis: Axis,
    pub lo: f64,
    pub hi: f64,
    pub factor: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub radius: f64,
    pub width: f64,
    pub clearance: f64,
    pub nx: usize,
    pub ny: usize,
    pub element: ElementKind,
    pub bands: Vec<RefinementBand>,
    /// Subdivision factor applied to the bounding boxes of all footprints.
    pub feature_refinement: usize,
}

impl DomainSpec {
    pub fn circumference(&self) -> f64 {
        2.0 * PI * self.radius
    }

    pub fn check(&self) -> Result<(), MeshError> {
        let bad = |m: &str| Err(MeshError::InvalidDomain(m.to_string()));
        if !(self.radius > 0.0 && self.width > 0.0 && self.clearance > 0.0) {
            return bad("radius, width and clearance must be positive");
        }
        if self.nx < 2 || self.ny < 2 {
            return bad("grid counts must be at least 2");
        }
        if !matches!(self.element, ElementKind::Quad4 | ElementKind::Tri3) {
            return bad("surface element must be QUAD4 or TRI3");
        }
        if self.clearance / self.radius > 0.01 {
            log::warn!(
                "clearance ratio c/R = {:.3e} is not small; the unwrapped film model loses accuracy",
                self.clearance / self.radius
            );
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Disc {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Disc {
    fn contains(&self, x: f64, y: f64) -> bool {
        let (dx, dy) = (x - self.center[0], y - self.center[1]);
        dx * dx + dy * dy <= self.radius * self.radius
    }

    fn bbox(&self) -> [f64; 4] {
        [
            self.center[0] - self.radius,
            self.center[0] + self.radius,
            self.center[1] - self.radius,
            self.center[1] + self.radius,
        ]
    }
}

/// A groove: the set of points within `half_width` of a polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct Groove {
    pub vertices: Vec<[f64; 2]>,
    pub half_width: f64,
}

impl Groove {
    fn contains(&self, x: f64, y: f64) -> bool {
        self.vertices.windows(2).any(|w| {
            let (a, b) = (w[0], w[1]);
            let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
            let len2 = ex * ex + ey * ey;
            let t = if len2 > 0.0 {
                (((x - a[0]) * ex + (y - a[1]) * ey) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let (dx, dy) = (x - a[0] - t * ex, y - a[1] - t * ey);
            dx * dx + dy * dy <= self.half_width * self.half_width
        })
    }

    fn bbox(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
        for v in &self.vertices {
            b[0] = b[0].min(v[0] - self.half_width);
            b[1] = b[1].max(v[0] + self.half_width);
            b[2] = b[2].min(v[1] - self.half_width);
            b[3] = b[3].max(v[1] + self.half_width);
        }
        b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TexturePattern {
    None,
    Dimples(Vec<Disc>),
    Herringbone(Vec<Groove>),
    Sawtooth(Vec<Groove>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TextureSpec {
    pub pattern: TexturePattern,
    pub depth: f64,
    pub feed_hole: Option<Disc>,
}

impl Default for TextureSpec {
    fn default() -> Self {
        Self {
            pattern: TexturePattern::None,
            depth: 0.0,
            feed_hole: None,
        }
    }
}

impl TextureSpec {
    /// `count` dimples evenly spaced around the circumference in each of
    /// `rows` axial rows.
    pub fn dimple_ring(count: usize, rows: usize, radius: f64, domain: &DomainSpec) -> TexturePattern {
        let pitch = domain.circumference() / count as f64;
        let mut discs = Vec::with_capacity(count * rows);
        for r in 0..rows {
            let y = -domain.width / 2.0 + domain.width * (r as f64 + 0.5) / rows as f64;
            for i in 0..count {
                discs.push(Disc {
                    center: [pitch * (i as f64 + 0.5), y],
                    radius,
                });
            }
        }
        TexturePattern::Dimples(discs)
    }

    /// `count` chevrons with the apex on the mid-plane pointing in +x.
    /// `length` is the circumferential extent of each chevron and
    /// `span` the fraction of the bearing width it covers.
    pub fn herringbone_ring(
        count: usize,
        length: f64,
        span: f64,
        half_width: f64,
        domain: &DomainSpec,
    ) -> TexturePattern {
        let pitch = domain.circumference() / count as f64;
        let b = 0.5 * span * domain.width;
        let grooves = (0..count)
            .map(|i| {
                let apex = pitch * (i as f64 + 0.5) + 0.5 * length;
                Groove {
                    vertices: vec![[apex - length, -b], [apex, 0.0], [apex - length, b]],
                    half_width,
                }
            })
            .collect();
        TexturePattern::Herringbone(grooves)
    }

    /// `count` zig-zag grooves, each made of `teeth` mini chevrons stacked
    /// across the width.
    pub fn sawtooth_ring(
        count: usize,
        teeth: usize,
        length: f64,
        span: f64,
        half_width: f64,
        domain: &DomainSpec,
    ) -> TexturePattern {
        let pitch = domain.circumference() / count as f64;
        let b = 0.5 * span * domain.width;
        let steps = 2 * teeth;
        let grooves = (0..count)
            .map(|i| {
                let x0 = pitch * (i as f64 + 0.5) - 0.5 * length;
                let vertices = (0..=steps)
                    .map(|k| {
                        let x = if k % 2 == 1 { x0 + length } else { x0 };
                        [x, -b + 2.0 * b * k as f64 / steps as f64]
                    })
                    .collect();
                Groove { vertices, half_width }
            })
            .collect();
        TexturePattern::Sawtooth(grooves)
    }

    fn footprints(&self) -> Vec<(String, [f64; 4])> {
        let mut out = Vec::new();
        match &self.pattern {
            TexturePattern::None => {}
            TexturePattern::Dimples(d) => out.extend(
                d.iter()
                    .enumerate()
                    .map(|(i, d)| (format!("dimple {}", i + 1), d.bbox())),
            ),
            TexturePattern::Herringbone(g) | TexturePattern::Sawtooth(g) => out.extend(
                g.iter()
                    .enumerate()
                    .map(|(i, g)| (format!("groove {}", i + 1), g.bbox())),
            ),
        }
        if let Some(f) = &self.feed_hole {
            out.push(("feed hole".to_string(), f.bbox()));
        }
        out
    }

    pub fn check(&self, domain: &DomainSpec) -> Result<(), MeshError> {
        if !(self.depth >= 0.0) {
            return Err(MeshError::InvalidDomain("texture depth must be non-negative".into()));
        }
        let (lx, hw) = (domain.circumference(), domain.width / 2.0);
        let eps = 1e-12 * lx;
        for (what, b) in self.footprints() {
            if b[0] < -eps || b[1] > lx + eps || b[2] < -hw - eps || b[3] > hw + eps {
                return Err(MeshError::FootprintOutside { what });
            }
        }
        Ok(())
    }

    pub fn in_texture(&self, x: f64, y: f64) -> bool {
        match &self.pattern {
            TexturePattern::None => false,
            TexturePattern::Dimples(d) => d.iter().any(|d| d.contains(x, y)),
            TexturePattern::Herringbone(g) | TexturePattern::Sawtooth(g) => g.iter().any(|g| g.contains(x, y)),
        }
    }

    pub fn in_feed_hole(&self, x: f64, y: f64) -> bool {
        self.feed_hole.as_ref().is_some_and(|f| f.contains(x, y))
    }
}

/// Texture depth at a surface point: `depth` inside a footprint, else 0.
pub fn evaluate_texture_depth(x: f64, y: f64, texture: &TextureSpec) -> f64 {
    if texture.in_texture(x, y) {
        texture.depth
    } else {
        0.0
    }
}

fn graded_lines(length: f64, origin: f64, n: usize, bands: &[(f64, f64, usize)]) -> Vec<f64> {
    let h = length / n as f64;
    let mut out = vec![origin];
    for i in 0..n {
        let (a, b) = (origin + i as f64 * h, origin + (i + 1) as f64 * h);
        let factor = bands
            .iter()
            .filter(|&&(lo, hi, _)| lo < b && hi > a)
            .map(|&(_, _, f)| f)
            .max()
            .unwrap_or(1)
            .max(1);
        for k in 1..=factor {
            out.push(if k == factor {
                b
            } else {
                a + (b - a) * k as f64 / factor as f64
            });
        }
    }
    // close exactly on the far edge
    *out.last_mut().unwrap() = origin + length;
    out
}

/// Builds the unwrapped surface mesh on `[0, 2πR_b] × [−L/2, L/2]`.
pub fn generate_bearing_mesh(domain: &DomainSpec, texture: &TextureSpec) -> Result<Mesh, MeshError> {
    domain.check()?;
    texture.check(domain)?;
    let (lx, ly) = (domain.circumference(), domain.width);

    let mut xb = Vec::new();
    let mut yb = Vec::new();
    for band in &domain.bands {
        if !(band.hi > band.lo) {
            return Err(MeshError::DegenerateRefinement {
                lo: band.lo,
                hi: band.hi,
            });
        }
        let target = if band.axis == Axis::X { &mut xb } else { &mut yb };
        target.push((band.lo, band.hi, band.factor));
    }
    if domain.feature_refinement > 1 {
        for (_, b) in texture.footprints() {
            if !(b[1] > b[0] && b[3] > b[2]) {
                return Err(MeshError::DegenerateRefinement { lo: b[0], hi: b[1] });
            }
            xb.push((b[0], b[1], domain.feature_refinement));
            yb.push((b[2], b[3], domain.feature_refinement));
        }
    }
    let xs = graded_lines(lx, 0.0, domain.nx, &xb);
    let ys = graded_lines(ly, -ly / 2.0, domain.ny, &yb);
    let (ni, nj) = (xs.len(), ys.len());
    let id = |i: usize, j: usize| j * ni + i;

    let mut mesh = Mesh::default();
    for &y in &ys {
        for &x in &xs {
            mesh.nodes.push([x, y, 0.0]);
        }
    }
    for j in 0..nj - 1 {
        for i in 0..ni - 1 {
            let q = [id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)];
            match domain.element {
                ElementKind::Quad4 => mesh.elements.push(Element {
                    kind: ElementKind::Quad4,
                    nodes: q.to_vec(),
                }),
                _ => {
                    // diagonals mirrored about y = 0 keep the split symmetric
                    let tris = if ys[j] + ys[j + 1] < 0.0 {
                        [[q[0], q[1], q[2]], [q[0], q[2], q[3]]]
                    } else {
                        [[q[0], q[1], q[3]], [q[1], q[2], q[3]]]
                    };
                    for t in tris {
                        mesh.elements.push(Element {
                            kind: ElementKind::Tri3,
                            nodes: t.to_vec(),
                        });
                    }
                }
            }
        }
    }
    let sets = &mut mesh.boundary_sets;
    sets.insert(AXIAL_LEFT.into(), (0..ni).map(|i| id(i, 0)).collect());
    sets.insert(AXIAL_RIGHT.into(), (0..ni).map(|i| id(i, nj - 1)).collect());
    sets.insert(CIRC_START.into(), (0..nj).map(|j| id(0, j)).collect());
    sets.insert(CIRC_END.into(), (0..nj).map(|j| id(ni - 1, j)).collect());
    let mut feed = BTreeSet::new();
    let mut tex = BTreeSet::new();
    for (n, p) in mesh.nodes.iter().enumerate() {
        if texture.in_feed_hole(p[0], p[1]) {
            feed.insert(n);
        }
        if texture.in_texture(p[0], p[1]) {
            tex.insert(n);
        }
    }
    if texture.feed_hole.is_some() {
        sets.insert(FEED_HOLE.into(), feed);
    }
    if texture.pattern != TexturePattern::None {
        sets.insert(TEXTURE.into(), tex);
    }
    pair_periodic_boundaries(&mut mesh, Axis::X, 1e-9 * ly)?;
    mesh.validate()?;
    Ok(mesh)
}

/// Pairs the start and end boundary of `axis` (circumferential ends for
/// `X`, axial ends for `Y`) by matching the off-axis coordinate within
/// `tol`. Start nodes become masters.
pub fn pair_periodic_boundaries(mesh: &mut Mesh, axis: Axis, tol: f64) -> Result<(), MeshError> {
    let (start, end, off) = match axis {
        Axis::X => (CIRC_START, CIRC_END, 1),
        Axis::Y => (AXIAL_LEFT, AXIAL_RIGHT, 0),
    };
    let starts: Vec<usize> = mesh.set(start).collect();
    let ends: Vec<usize> = mesh.set(end).collect();
    if starts.len() != ends.len() {
        return Err(MeshError::PeriodicCountMismatch {
            start: starts.len(),
            end: ends.len(),
        });
    }
    let mut free: BTreeSet<usize> = ends.iter().copied().collect();
    let mut pairs = Vec::with_capacity(starts.len());
    for &m in &starts {
        let cm = mesh.nodes[m];
        let hit = free.iter().copied().find(|&s| {
            let cs = mesh.nodes[s];
            (cs[off] - cm[off]).abs() <= tol && (cs[2] - cm[2]).abs() <= tol
        });
        match hit {
            Some(s) => {
                free.remove(&s);
                pairs.push((m, s));
            }
            None => return Err(MeshError::UnmatchedPeriodic { node: m, tol }),
        }
    }
    mesh.periodic_pairs
        .retain(|&(m, s)| !pairs.iter().any(|&(a, b)| (a, b) == (m, s)));
    mesh.periodic_pairs.extend(pairs);
    Ok(())
}

/// Parses the line-oriented mesh text format.
pub fn parse_mesh_file(text: &str) -> Result<Mesh, MeshError> {
    let mut nodes: BTreeMap<usize, Point> = BTreeMap::new();
    let mut elems: Vec<(usize, ElementKind, Vec<usize>)> = Vec::new();
    let mut sets: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    let mut set_lines: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tok = content.split_whitespace();
        let head = tok.next().unwrap();
        let rest: Vec<&str> = tok.collect();
        let syntax = |m: String| MeshError::Syntax { line, message: m };
        let int = |s: &str| -> Result<usize, MeshError> {
            match s.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v),
                _ => Err(syntax(format!("invalid node id `{s}`"))),
            }
        };
        match head {
            "NODE" => {
                if rest.len() != 4 {
                    return Err(syntax("NODE expects an id and three coordinates".into()));
                }
                let id = int(rest[0])?;
                let mut p = [0.0; 3];
                for d in 0..3 {
                    p[d] = rest[d + 1]
                        .parse()
                        .map_err(|_| syntax(format!("invalid coordinate `{}`", rest[d + 1])))?;
                }
                if nodes.insert(id, p).is_some() {
                    return Err(MeshError::DuplicateNode { line, id });
                }
            }
            "ELEM" => {
                let word = rest.first().ok_or_else(|| syntax("ELEM without kind".into()))?;
                let kind = ElementKind::from_keyword(word).ok_or_else(|| MeshError::UnknownElementKind {
                    line,
                    word: word.to_string(),
                })?;
                let ids = rest[1..].iter().map(|s| int(s)).collect::<Result<Vec<_>, _>>()?;
                if ids.len() != kind.node_count() {
                    return Err(syntax(format!(
                        "{} expects {} node ids, got {}",
                        kind.keyword(),
                        kind.node_count(),
                        ids.len()
                    )));
                }
                elems.push((line, kind, ids));
            }
            "SET" => {
                let name = rest.first().ok_or_else(|| syntax("SET without name".into()))?;
                let ids = rest[1..].iter().map(|s| int(s)).collect::<Result<Vec<_>, _>>()?;
                sets.entry(name.to_string())
                    .or_default()
                    .extend(ids.iter().map(|i| i - 1));
                set_lines.push((line, ids));
            }
            "PAIR" => {
                if rest.len() != 2 {
                    return Err(syntax("PAIR expects two node ids".into()));
                }
                pairs.push((line, int(rest[0])?, int(rest[1])?));
            }
            other => return Err(syntax(format!("unknown record `{other}`"))),
        }
    }
    if let Some((expected, _)) = nodes.keys().enumerate().find(|&(i, &id)| id != i + 1) {
        return Err(MeshError::NonContiguous { missing: expected + 1 });
    }
    let exists = |id: usize| nodes.contains_key(&id);
    for (line, _, ids) in &elems {
        if let Some(&id) = ids.iter().find(|&&i| !exists(i)) {
            return Err(MeshError::DanglingNode { line: *line, id });
        }
    }
    for (line, ids) in &set_lines {
        if let Some(&id) = ids.iter().find(|&&i| !exists(i)) {
            return Err(MeshError::DanglingNode { line: *line, id });
        }
    }
    for &(line, m, s) in &pairs {
        for id in [m, s] {
            if !exists(id) {
                return Err(MeshError::DanglingNode { line, id });
            }
        }
    }
    let mesh = Mesh {
        nodes: nodes.into_values().collect(),
        elements: elems
            .into_iter()
            .map(|(_, kind, ids)| Element {
                kind,
                nodes: ids.into_iter().map(|i| i - 1).collect(),
            })
            .collect(),
        boundary_sets: sets,
        periodic_pairs: pairs.into_iter().map(|(_, m, s)| (m - 1, s - 1)).collect(),
    };
    mesh.validate()?;
    Ok(mesh)
}

/// Serialises a mesh; coordinates use the shortest round-trip decimal form.
pub fn write_mesh(mesh: &Mesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# nodes {} elements {}", mesh.nodes.len(), mesh.elements.len());
    for (i, p) in mesh.nodes.iter().enumerate() {
        let _ = writeln!(out, "NODE {} {:?} {:?} {:?}", i + 1, p[0], p[1], p[2]);
    }
    for el in &mesh.elements {
        let ids: Vec<String> = el.nodes.iter().map(|n| (n + 1).to_string()).collect();
        let _ = writeln!(out, "ELEM {} {}", el.kind.keyword(), ids.join(" "));
    }
    for (name, set) in &mesh.boundary_sets {
        let ids: Vec<String> = set.iter().map(|n| (n + 1).to_string()).collect();
        let _ = writeln!(out, "SET {} {}", name, ids.join(" "));
    }
    for &(m, s) in &mesh.periodic_pairs {
        let _ = writeln!(out, "PAIR {} {}", m + 1, s + 1);
    }
    out
}
