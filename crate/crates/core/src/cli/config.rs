//! Case files: line-oriented `[section]` headers followed by `key = value`
//! pairs in SI units. `#` starts a comment.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::elements::ElementKind;
use crate::lubrication::LubricantModel;
use crate::mesh::{Disc, DomainSpec, TexturePattern, TextureSpec};
use crate::solvers::{LinearConfig, NewtonConfig, SorConfig};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown section [{section}]")]
    UnknownSection { line: usize, section: String },
    #[error("line {line}: unknown key `{key}` in [{section}]")]
    UnknownKey { line: usize, section: String, key: String },
    #[error("line {line}: duplicate key `{key}` in [{section}]")]
    DuplicateKey { line: usize, section: String, key: String },
    #[error("missing required section [{0}]")]
    MissingSection(&'static str),
    #[error("line {line}: `{key}` = {value}: {message}")]
    Invalid {
        line: usize,
        key: String,
        value: String,
        message: String,
    },
    #[error("{0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    pub radius: f64,
    pub width: f64,
    pub clearance: f64,
    /// Zero disables the feed hole.
    pub feed_hole_radius: f64,
    /// Circumferential position of the feed-hole centre [rad].
    pub feed_hole_angle: f64,
    pub feed_hole_y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshConfig {
    pub nx: usize,
    pub ny: usize,
    /// Surface kind; Quad4 extrudes to Hex8 and Tri3 to Prism6.
    pub element: ElementKind,
    pub n_layers: usize,
    pub feature_refinement: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternKind {
    None,
    Dimples,
    Herringbone,
    Sawtooth,
}

impl PatternKind {
    fn word(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Dimples => "dimples",
            Self::Herringbone => "herringbone",
            Self::Sawtooth => "sawtooth",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TextureConfig {
    pub pattern: PatternKind,
    pub depth: f64,
    pub count: usize,
    pub rows: usize,
    pub dimple_radius: f64,
    pub length: f64,
    pub span: f64,
    pub half_width: f64,
    pub teeth: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatingConfig {
    pub speed_rpm: f64,
    pub load: [f64; 2],
    pub moment: [f64; 2],
    /// Starting `(X_r, Y_r, A_r, B_r)`.
    pub q0: [f64; 4],
    pub p_ambient: f64,
    pub p_supply: f64,
    pub t_ambient: f64,
    pub t_supply: f64,
    /// Wall temperatures; `None` keeps the wall adiabatic. The bushing
    /// defaults to the ambient temperature, the journal to adiabatic.
    pub t_bushing: Option<f64>,
    pub t_journal: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    pub sor: SorConfig,
    /// SOR tolerance used inside the equilibrium iteration.
    pub sor_tol_equilibrium: f64,
    pub newton: NewtonConfig,
    pub linear: LinearConfig,
    /// Cross-film samples of the GRE coefficient integrals.
    pub n_z: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingConfig {
    pub max_outer: usize,
    pub relax_t: f64,
    pub relax_props: f64,
    pub outer_tol: f64,
    pub isothermal: bool,
    pub equilibrium: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub csv: bool,
    pub vtk: bool,
    pub convergence: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseConfig {
    pub geometry: GeometryConfig,
    pub mesh: MeshConfig,
    pub texture: TextureConfig,
    pub operating: OperatingConfig,
    pub lubricant: LubricantModel,
    pub solver: SolverSettings,
    pub coupling: CouplingConfig,
    pub output: OutputConfig,
}

impl CaseConfig {
    /// Reference bearing with every default filled.
    pub fn reference() -> Self {
        parse_case(REFERENCE_CASE).expect("reference case parses")
    }

    pub fn domain(&self) -> DomainSpec {
        DomainSpec {
            radius: self.geometry.radius,
            width: self.geometry.width,
            clearance: self.geometry.clearance,
            nx: self.mesh.nx,
            ny: self.mesh.ny,
            element: self.mesh.element,
            bands: Vec::new(),
            feature_refinement: self.mesh.feature_refinement,
        }
    }

    pub fn texture_spec(&self) -> TextureSpec {
        let d = self.domain();
        let t = &self.texture;
        let pattern = match t.pattern {
            PatternKind::None => TexturePattern::None,
            PatternKind::Dimples => TextureSpec::dimple_ring(t.count, t.rows, t.dimple_radius, &d),
            PatternKind::Herringbone => TextureSpec::herringbone_ring(t.count, t.length, t.span, t.half_width, &d),
            PatternKind::Sawtooth => TextureSpec::sawtooth_ring(t.count, t.teeth, t.length, t.span, t.half_width, &d),
        };
        let g = &self.geometry;
        let feed_hole = (g.feed_hole_radius > 0.0).then(|| Disc {
            center: [g.feed_hole_angle * g.radius, g.feed_hole_y],
            radius: g.feed_hole_radius,
        });
        TextureSpec {
            pattern,
            depth: if t.pattern == PatternKind::None { 0.0 } else { t.depth },
            feed_hole,
        }
    }

    /// Journal surface speed `ω R_b`.
    pub fn surface_speed(&self) -> f64 {
        self.operating.speed_rpm * 2.0 * PI / 60.0 * self.geometry.radius
    }

    /// `[W_X, W_Y, M_X, M_Y]`.
    pub fn external_load(&self) -> [f64; 4] {
        let o = &self.operating;
        [o.load[0], o.load[1], o.moment[0], o.moment[1]]
    }
}

/// Table-1 reference bearing.
pub const REFERENCE_CASE: &str = "\
[geometry]
radius = 0.03
width = 0.08
clearance = 20e-6
feed_hole_radius = 6e-3

[operating]
speed_rpm = 5000
load_x = 0
load_y = -8000
moment_x = 0
moment_y = 800
t_supply = 353.15
t_ambient = 353.15
p_ambient = 1e5

[lubricant]
rho0 = 810
eta0 = 0.1
k = 0.105
cp = 2300
";

#[derive(Debug)]
struct Entry {
    line: usize,
    value: String,
    used: bool,
}

#[derive(Debug)]
struct RawSection {
    entries: BTreeMap<String, Entry>,
}

const SECTIONS: [&str; 8] = [
    "geometry",
    "mesh",
    "texture",
    "operating",
    "lubricant",
    "solver",
    "coupling",
    "output",
];

fn tokenize(text: &str) -> Result<BTreeMap<String, RawSection>, ConfigError> {
    let mut out: BTreeMap<String, RawSection> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::Syntax {
                    line,
                    message: "unterminated section header".into(),
                })?
                .trim()
                .to_string();
            if !SECTIONS.contains(&name.as_str()) {
                return Err(ConfigError::UnknownSection { line, section: name });
            }
            if out.contains_key(&name) {
                return Err(ConfigError::Syntax {
                    line,
                    message: format!("section [{name}] appears twice"),
                });
            }
            out.insert(
                name.clone(),
                RawSection {
                    entries: BTreeMap::new(),
                },
            );
            current = Some(name);
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            message: format!("expected `key = value`, found `{body}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                message: "empty key or value".into(),
            });
        }
        let section = current.clone().ok_or_else(|| ConfigError::Syntax {
            line,
            message: "key outside of any section".into(),
        })?;
        let sec = out.get_mut(&section).expect("section registered");
        if sec.entries.contains_key(key) {
            return Err(ConfigError::DuplicateKey {
                line,
                section,
                key: key.into(),
            });
        }
        sec.entries.insert(
            key.into(),
            Entry {
                line,
                value: value.into(),
                used: false,
            },
        );
    }
    Ok(out)
}

/// Typed reader over one section that logs defaults and rejects leftovers.
struct Reader<'a> {
    name: &'static str,
    raw: Option<&'a mut RawSection>,
}

enum Bound {
    Any,
    Positive,
    NonNegative,
    Unit,
}

impl<'a> Reader<'a> {
    fn invalid(&self, key: &str, e: &Entry, message: impl Into<String>) -> ConfigError {
        ConfigError::Invalid {
            line: e.line,
            key: format!("{}.{key}", self.name),
            value: e.value.clone(),
            message: message.into(),
        }
    }

    fn take(&mut self, key: &str) -> Option<&mut Entry> {
        let e = self.raw.as_mut()?.entries.get_mut(key)?;
        e.used = true;
        Some(e)
    }

    fn f64(&mut self, key: &str, default: f64, bound: Bound) -> Result<f64, ConfigError> {
        let name = self.name;
        let Some(e) = self.take(key) else {
            log::info!("[{name}] {key} defaulted to {default:e}");
            return Ok(default);
        };
        let v: f64 = e.value.parse().map_err(|_| ConfigError::Invalid {
            line: e.line,
            key: format!("{name}.{key}"),
            value: e.value.clone(),
            message: "not a number".into(),
        })?;
        let ok = v.is_finite()
            && match bound {
                Bound::Any => true,
                Bound::Positive => v > 0.0,
                Bound::NonNegative => v >= 0.0,
                Bound::Unit => v > 0.0 && v <= 1.0,
            };
        if !ok {
            let e = self.raw.as_ref().unwrap().entries.get(key).unwrap();
            let msg = match bound {
                Bound::Any => "must be finite",
                Bound::Positive => "must be positive",
                Bound::NonNegative => "must be non-negative",
                Bound::Unit => "must lie in (0, 1]",
            };
            return Err(self.invalid(key, e, msg));
        }
        Ok(v)
    }

    fn opt_f64(&mut self, key: &str, default: Option<f64>) -> Result<Option<f64>, ConfigError> {
        let name = self.name;
        let Some(e) = self.take(key) else {
            log::info!("[{name}] {key} defaulted to {}", opt(default));
            return Ok(default);
        };
        if e.value == "adiabatic" {
            return Ok(None);
        }
        let line = e.line;
        let value = e.value.clone();
        match value.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(Some(v)),
            _ => Err(ConfigError::Invalid {
                line,
                key: format!("{name}.{key}"),
                value,
                message: "expected `adiabatic` or a positive temperature".into(),
            }),
        }
    }

    fn usize(&mut self, key: &str, default: usize, min: usize) -> Result<usize, ConfigError> {
        let name = self.name;
        let Some(e) = self.take(key) else {
            log::info!("[{name}] {key} defaulted to {default}");
            return Ok(default);
        };
        match e.value.parse::<usize>() {
            Ok(v) if v >= min => Ok(v),
            _ => Err(ConfigError::Invalid {
                line: e.line,
                key: format!("{name}.{key}"),
                value: e.value.clone(),
                message: format!("expected an integer ≥ {min}"),
            }),
        }
    }

    fn bool(&mut self, key: &str, default: bool) -> Result<bool, ConfigError> {
        let name = self.name;
        let Some(e) = self.take(key) else {
            log::info!("[{name}] {key} defaulted to {default}");
            return Ok(default);
        };
        match e.value.as_str() {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(ConfigError::Invalid {
                line: e.line,
                key: format!("{name}.{key}"),
                value: e.value.clone(),
                message: "expected true or false".into(),
            }),
        }
    }

    fn word<'w>(&mut self, key: &str, default: &'w str, allowed: &[&'w str]) -> Result<&'w str, ConfigError> {
        let name = self.name;
        let Some(e) = self.take(key) else {
            log::info!("[{name}] {key} defaulted to {default}");
            return Ok(default);
        };
        allowed
            .iter()
            .find(|w| **w == e.value)
            .copied()
            .ok_or_else(|| ConfigError::Invalid {
                line: e.line,
                key: format!("{name}.{key}"),
                value: e.value.clone(),
                message: format!("expected one of {}", allowed.join(", ")),
            })
    }

    fn finish(self) -> Result<(), ConfigError> {
        if let Some(raw) = self.raw {
            if let Some((key, e)) = raw.entries.iter().find(|(_, e)| !e.used) {
                return Err(ConfigError::UnknownKey {
                    line: e.line,
                    section: self.name.into(),
                    key: key.clone(),
                });
            }
        }
        Ok(())
    }
}

fn section<'a>(
    raw: &'a mut BTreeMap<String, RawSection>,
    name: &'static str,
    required: bool,
) -> Result<Reader<'a>, ConfigError> {
    let sec = raw.get_mut(name);
    if sec.is_none() {
        if required {
            return Err(ConfigError::MissingSection(name));
        }
        log::info!("[{name}] section absent, all defaults used");
    }
    Ok(Reader { name, raw: sec })
}

pub fn parse_case(text: &str) -> Result<CaseConfig, ConfigError> {
    use Bound::*;
    let mut raw = tokenize(text)?;
    for name in ["geometry", "operating", "lubricant"] {
        if !raw.contains_key(name) {
            return Err(ConfigError::MissingSection(name));
        }
    }

    let mut r = section(&mut raw, "geometry", true)?;
    let geometry = GeometryConfig {
        radius: r.f64("radius", 0.03, Positive)?,
        width: r.f64("width", 0.08, Positive)?,
        clearance: r.f64("clearance", 20e-6, Positive)?,
        feed_hole_radius: r.f64("feed_hole_radius", 6e-3, NonNegative)?,
        feed_hole_angle: r.f64("feed_hole_angle", 0.25 * PI, Any)?,
        feed_hole_y: r.f64("feed_hole_y", 0.0, Any)?,
    };
    r.finish()?;

    let mut r = section(&mut raw, "mesh", false)?;
    let element = match r.word("element", "hex", &["hex", "prism"])? {
        "hex" => ElementKind::Quad4,
        _ => ElementKind::Tri3,
    };
    let mesh = MeshConfig {
        nx: r.usize("nx", 48, 2)?,
        ny: r.usize("ny", 24, 2)?,
        element,
        n_layers: r.usize("n_layers", 8, 2)?,
        feature_refinement: r.usize("feature_refinement", 1, 1)?,
    };
    r.finish()?;

    let mut r = section(&mut raw, "texture", false)?;
    let pattern = match r.word("pattern", "none", &["none", "dimples", "herringbone", "sawtooth"])? {
        "none" => PatternKind::None,
        "dimples" => PatternKind::Dimples,
        "herringbone" => PatternKind::Herringbone,
        _ => PatternKind::Sawtooth,
    };
    let texture = TextureConfig {
        pattern,
        depth: r.f64("depth", 20e-6, NonNegative)?,
        count: r.usize("count", if pattern == PatternKind::Herringbone { 6 } else { 12 }, 1)?,
        rows: r.usize("rows", 1, 1)?,
        dimple_radius: r.f64("dimple_radius", 4e-3, Positive)?,
        length: r.f64("length", 6e-3, Positive)?,
        span: r.f64("span", 0.8, Unit)?,
        half_width: r.f64("half_width", 1e-3, Positive)?,
        teeth: r.usize("teeth", 3, 1)?,
    };
    r.finish()?;

    let mut r = section(&mut raw, "operating", true)?;
    let t_ambient = r.f64("t_ambient", 353.15, Positive)?;
    let p_ambient = r.f64("p_ambient", 1e5, NonNegative)?;
    let operating = OperatingConfig {
        speed_rpm: r.f64("speed_rpm", 5000.0, NonNegative)?,
        load: [r.f64("load_x", 0.0, Any)?, r.f64("load_y", -8000.0, Any)?],
        moment: [r.f64("moment_x", 0.0, Any)?, r.f64("moment_y", 800.0, Any)?],
        q0: [
            r.f64("x0", 0.0, Any)?,
            r.f64("y0", 0.0, Any)?,
            r.f64("a0", 0.0, Any)?,
            r.f64("b0", 0.0, Any)?,
        ],
        p_supply: r.f64("p_supply", p_ambient, NonNegative)?,
        t_supply: r.f64("t_supply", t_ambient, Positive)?,
        p_ambient,
        t_ambient,
        t_bushing: r.opt_f64("t_bushing", Some(t_ambient))?,
        t_journal: r.opt_f64("t_journal", None)?,
    };
    r.finish()?;

    let d = LubricantModel::default();
    let mut r = section(&mut raw, "lubricant", true)?;
    let lubricant = LubricantModel {
        rho0: r.f64("rho0", d.rho0, Positive)?,
        eta0: r.f64("eta0", d.eta0, Positive)?,
        c1: r.f64("c1", d.c1, NonNegative)?,
        c2: r.f64("c2", d.c2, NonNegative)?,
        c3: r.f64("c3", d.c3, NonNegative)?,
        z: r.f64("z", d.z, NonNegative)?,
        s0: r.f64("s0", d.s0, NonNegative)?,
        p_r0: r.f64("p_r0", d.p_r0, Positive)?,
        k: r.f64("k", d.k, Positive)?,
        cp: r.f64("cp", d.cp, Positive)?,
        beta: r.f64("beta", d.beta, NonNegative)?,
        p_cav: r.f64("p_cav", d.p_cav, NonNegative)?,
        t0: r.f64("t0", t_ambient, Positive)?,
    };
    r.finish()?;

    let sd = SorConfig::default();
    let nd = NewtonConfig::default();
    let ld = LinearConfig::default();
    let mut r = section(&mut raw, "solver", false)?;
    let omega_p = r.f64("omega_p", sd.omega_p, Positive)?;
    let omega_theta = r.f64("omega_theta", sd.omega_theta, Positive)?;
    let sor_tol = r.f64("sor_tol", sd.tol, Positive)?;
    let sor_max_iter = r.usize("sor_max_iter", sd.max_iter, 1)?;
    let solver = SolverSettings {
        sor: SorConfig {
            omega_p,
            omega_theta,
            tol: sor_tol,
            max_iter: sor_max_iter,
            p_cav: lubricant.p_cav,
        },
        sor_tol_equilibrium: r.f64("sor_tol_equilibrium", 1e-11, Positive)?,
        newton: NewtonConfig {
            tol: r.f64("newton_tol", nd.tol, Positive)?,
            max_iter: r.usize("newton_max_iter", nd.max_iter, 1)?,
            armijo: r.f64("armijo", nd.armijo, Unit)?,
            lambda_min: r.f64("lambda_min", nd.lambda_min, Unit)?,
            fd_rel: r.f64("fd_rel", 1e-4, Positive)?,
        },
        linear: LinearConfig {
            tol: r.f64("linear_tol", ld.tol, Positive)?,
            max_iter: r.usize("linear_max_iter", ld.max_iter, 1)?,
        },
        n_z: r.usize("n_z", 11, 3)?,
    };
    r.finish()?;

    let mut r = section(&mut raw, "coupling", false)?;
    let coupling = CouplingConfig {
        max_outer: r.usize("max_outer", 30, 1)?,
        relax_t: r.f64("relax_t", 0.5, Unit)?,
        relax_props: r.f64("relax_props", 0.5, Unit)?,
        outer_tol: r.f64("outer_tol", 1e-4, Positive)?,
        isothermal: r.bool("isothermal", false)?,
        equilibrium: r.bool("equilibrium", true)?,
    };
    r.finish()?;

    let mut r = section(&mut raw, "output", false)?;
    let output = OutputConfig {
        csv: r.bool("csv", true)?,
        vtk: r.bool("vtk", true)?,
        convergence: r.bool("convergence", true)?,
    };
    r.finish()?;

    let cfg = CaseConfig {
        geometry,
        mesh,
        texture,
        operating,
        lubricant,
        solver,
        coupling,
        output,
    };
    check_case(&cfg)?;
    Ok(cfg)
}

/// Cross-field checks that a single key cannot express.
pub fn check_case(cfg: &CaseConfig) -> Result<(), ConfigError> {
    let bad = |m: String| Err(ConfigError::Inconsistent(m));
    if cfg.solver.n_z % 2 == 0 {
        return bad(format!("solver.n_z must be odd, got {}", cfg.solver.n_z));
    }
    if !(cfg.lubricant.t0 > crate::lubrication::ROELANDS_POLE) {
        return bad("lubricant.t0 must exceed 138 K".into());
    }
    if cfg.operating.p_ambient < cfg.lubricant.p_cav {
        return bad("operating.p_ambient is below lubricant.p_cav".into());
    }
    cfg.solver.sor.check().or_else(|e| bad(e.to_string()))?;
    let domain = cfg.domain();
    domain.check().or_else(|e| bad(e.to_string()))?;
    cfg.texture_spec().check(&domain).or_else(|e| bad(e.to_string()))?;
    Ok(())
}

pub fn load_case(path: &Path) -> Result<CaseConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_case(&text)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "adiabatic".into(), |t| format!("{t:?}"))
}

/// Writes every setting, defaults included, in the case-file format.
pub fn dump_case(cfg: &CaseConfig) -> String {
    let mut s = String::new();
    let g = &cfg.geometry;
    let _ = writeln!(s, "[geometry]");
    for (k, v) in [
        ("radius", g.radius),
        ("width", g.width),
        ("clearance", g.clearance),
        ("feed_hole_radius", g.feed_hole_radius),
        ("feed_hole_angle", g.feed_hole_angle),
        ("feed_hole_y", g.feed_hole_y),
    ] {
        let _ = writeln!(s, "{k} = {v:?}");
    }
    let m = &cfg.mesh;
    let _ = writeln!(s, "\n[mesh]");
    let element = if m.element == ElementKind::Quad4 {
        "hex"
    } else {
        "prism"
    };
    let _ = writeln!(s, "element = {element}");
    for (k, v) in [
        ("nx", m.nx),
        ("ny", m.ny),
        ("n_layers", m.n_layers),
        ("feature_refinement", m.feature_refinement),
    ] {
        let _ = writeln!(s, "{k} = {v}");
    }
    let t = &cfg.texture;
    let _ = writeln!(s, "\n[texture]\npattern = {}", t.pattern.word());
    for (k, v) in [
        ("depth", t.depth),
        ("dimple_radius", t.dimple_radius),
        ("length", t.length),
        ("span", t.span),
        ("half_width", t.half_width),
    ] {
        let _ = writeln!(s, "{k} = {v:?}");
    }
    for (k, v) in [("count", t.count), ("rows", t.rows), ("teeth", t.teeth)] {
        let _ = writeln!(s, "{k} = {v}");
    }
    let o = &cfg.operating;
    let _ = writeln!(s, "\n[operating]");
    for (k, v) in [
        ("speed_rpm", o.speed_rpm),
        ("load_x", o.load[0]),
        ("load_y", o.load[1]),
        ("moment_x", o.moment[0]),
        ("moment_y", o.moment[1]),
        ("x0", o.q0[0]),
        ("y0", o.q0[1]),
        ("a0", o.q0[2]),
        ("b0", o.q0[3]),
        ("p_ambient", o.p_ambient),
        ("p_supply", o.p_supply),
        ("t_ambient", o.t_ambient),
        ("t_supply", o.t_supply),
    ] {
        let _ = writeln!(s, "{k} = {v:?}");
    }
    let _ = writeln!(s, "t_bushing = {}", opt(o.t_bushing));
    let _ = writeln!(s, "t_journal = {}", opt(o.t_journal));
    let l = &cfg.lubricant;
    let _ = writeln!(s, "\n[lubricant]");
    for (k, v) in [
        ("rho0", l.rho0),
        ("eta0", l.eta0),
        ("c1", l.c1),
        ("c2", l.c2),
        ("c3", l.c3),
        ("z", l.z),
        ("s0", l.s0),
        ("p_r0", l.p_r0),
        ("k", l.k),
        ("cp", l.cp),
        ("beta", l.beta),
        ("p_cav", l.p_cav),
        ("t0", l.t0),
    ] {
        let _ = writeln!(s, "{k} = {v:?}");
    }
    let sv = &cfg.solver;
    let _ = writeln!(s, "\n[solver]");
    for (k, v) in [
        ("omega_p", sv.sor.omega_p),
        ("omega_theta", sv.sor.omega_theta),
        ("sor_tol", sv.sor.tol),
        ("sor_tol_equilibrium", sv.sor_tol_equilibrium),
        ("newton_tol", sv.newton.tol),
        ("armijo", sv.newton.armijo),
        ("lambda_min", sv.newton.lambda_min),
        ("fd_rel", sv.newton.fd_rel),
        ("linear_tol", sv.linear.tol),
    ] {
        let _ = writeln!(s, "{k} = {v:?}");
    }
    for (k, v) in [
        ("sor_max_iter", sv.sor.max_iter),
        ("newton_max_iter", sv.newton.max_iter),
        ("linear_max_iter", sv.linear.max_iter),
        ("n_z", sv.n_z),
    ] {
        let _ = writeln!(s, "{k} = {v}");
    }
    let c = &cfg.coupling;
    let _ = writeln!(s, "\n[coupling]\nmax_outer = {}", c.max_outer);
    for (k, v) in [
        ("relax_t", c.relax_t),
        ("relax_props", c.relax_props),
        ("outer_tol", c.outer_tol),
    ] {
        let _ = writeln!(s, "{k} = {v:?}");
    }
    let _ = writeln!(s, "isothermal = {}\nequilibrium = {}", c.isothermal, c.equilibrium);
    let out = &cfg.output;
    let _ = writeln!(
        s,
        "\n[output]\ncsv = {}\nvtk = {}\nconvergence = {}",
        out.csv, out.vtk, out.convergence
    );
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_case_values() {
        let c = CaseConfig::reference();
        assert_eq!(c.geometry.radius, 0.03);
        assert_eq!(c.geometry.width, 0.08);
        assert_eq!(c.geometry.clearance, 20e-6);
        assert_eq!(c.operating.speed_rpm, 5000.0);
        assert_eq!(c.operating.load, [0.0, -8000.0]);
        assert_eq!(c.operating.moment, [0.0, 800.0]);
    }

    #[test]
    fn missing_lubricant_section() {
        let text = REFERENCE_CASE
            .replace("[lubricant]", "[output]")
            .replace("rho0 = 810\neta0 = 0.1\nk = 0.105\ncp = 2300\n", "");
        let err = parse_case(&text).unwrap_err();
        assert!(err.to_string().contains("lubricant"), "{err}");
    }

    #[test]
    fn negative_clearance_names_the_line() {
        let text = REFERENCE_CASE.replace("clearance = 20e-6", "clearance = -20e-6");
        match parse_case(&text).unwrap_err() {
            ConfigError::Invalid { line, key, .. } => {
                assert_eq!(line, 4);
                assert_eq!(key, "geometry.clearance");
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn unknown_key_and_section() {
        let text = format!("{REFERENCE_CASE}colour = blue\n");
        let expected = REFERENCE_CASE.lines().count() + 1;
        match parse_case(&text) {
            Err(ConfigError::UnknownKey { line, key, .. }) => assert_eq!((line, key.as_str()), (expected, "colour")),
            other => panic!("{other:?}"),
        }
        let text = format!("{REFERENCE_CASE}[extras]\n");
        assert!(matches!(parse_case(&text), Err(ConfigError::UnknownSection { .. })));
    }

    #[test]
    fn dump_round_trip() {
        let c = CaseConfig::reference();
        let again = parse_case(&dump_case(&c)).unwrap();
        assert_eq!(c, again);
        assert_eq!(dump_case(&again), dump_case(&c));
    }
}
