use std::collections::HashMap;
use std::path::PathBuf;

use thiserror::Error;

use crate::geometry::{
    validate_siac, BoundarySet, Domain, ExtensionMode, GeometryError, Iac, IacEntry, Labeled, Orientation, Point,
    Polyline, Qiac,
};
use crate::gridgen::{check_arrangement, collect_siacs, GridError, GridParams};
use crate::solvers::{GmresParams, SaneParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: invalid '{item}': {message}")]
    Validation { line: usize, item: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Sane,
    NewtonGmres,
    Both,
}

impl SolverChoice {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sane" => Some(Self::Sane),
            "newton-gmres" => Some(Self::NewtonGmres),
            "both" => Some(Self::Both),
            _ => None,
        }
    }

    pub fn runs_sane(self) -> bool {
        self != Self::NewtonGmres
    }

    pub fn runs_newton(self) -> bool {
        self != Self::Sane
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub kind: SolverChoice,
    pub sane: SaneParams,
    pub gmres: GmresParams,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            kind: SolverChoice::Sane,
            sane: SaneParams::default(),
            gmres: GmresParams::default(),
        }
    }
}

impl SolverConfig {
    /// Sets the stopping tolerance of both solvers.
    pub fn set_tol(&mut self, tol: f64) {
        self.sane.tol = Some(tol);
        self.gmres.tol = Some(tol);
    }

    /// Sets the outer iteration limit of both solvers.
    pub fn set_max_iters(&mut self, n: usize) {
        self.sane.max_iters = n;
        self.gmres.max_newton = n;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutputKind {
    Mesh,
    Vtk,
    Svg,
    Report,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub kind: OutputKind,
    pub path: PathBuf,
}

/// A fully validated problem description.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub name: String,
    pub domain: Domain,
    pub boundaries: BoundarySet,
    pub grid: GridParams,
    pub solver: SolverConfig,
    pub outputs: Vec<OutputSpec>,
}

struct Section {
    kind: String,
    line: usize,
    keys: Vec<(String, String, usize)>,
    /// Vertex lists; `quad` separators start a new list.
    groups: Vec<Vec<(Point, usize)>>,
}

impl Section {
    fn key(&self, k: &str) -> Option<(&str, usize)> {
        self.keys
            .iter()
            .rev()
            .find(|(key, _, _)| key == k)
            .map(|(_, v, l)| (v.as_str(), *l))
    }

    fn name(&self, counters: &mut HashMap<String, usize>) -> String {
        match self.key("name") {
            Some((v, _)) => v.to_string(),
            None => {
                let c = counters.entry(self.kind.clone()).or_insert(0);
                *c += 1;
                format!("{}-{}", self.kind, c)
            }
        }
    }

    fn points(&self) -> Vec<Point> {
        self.groups.iter().flatten().map(|(p, _)| *p).collect()
    }
}

const SECTIONS: &[&str] = &[
    "domain",
    "siac",
    "iac",
    "qiac",
    "iqiac-group",
    "well",
    "grid",
    "solver",
    "output",
];

fn allowed_keys(kind: &str) -> &'static [&'static str] {
    match kind {
        "domain" => &["name", "a", "b", "c", "d", "tol"],
        "siac" | "qiac" | "iqiac-group" => &["name"],
        "iac" => &["name", "orientation"],
        "well" => &[],
        "grid" => &["fraction", "size", "extension"],
        "solver" => &[
            "kind",
            "tol",
            "max_iters",
            "alpha0",
            "memory",
            "gamma",
            "sigma1",
            "sigma2",
            "eps",
            "delta",
            "lambda_min",
            "restart",
            "forcing",
            "max_cycles",
            "max_newton",
        ],
        "output" => &["mesh", "vtk", "svg", "report"],
        _ => &[],
    }
}

fn tokenize(text: &str) -> Result<Vec<Section>, SpecError> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |message: String| SpecError::Syntax { line, message };
        if let Some(rest) = content.strip_prefix('[') {
            let kind = rest
                .strip_suffix(']')
                .ok_or_else(|| syntax("unterminated section header".into()))?
                .trim();
            if !SECTIONS.contains(&kind) {
                return Err(syntax(format!("unknown section [{kind}]")));
            }
            sections.push(Section {
                kind: kind.to_string(),
                line,
                keys: Vec::new(),
                groups: vec![Vec::new()],
            });
            continue;
        }
        let sec = sections
            .last_mut()
            .ok_or_else(|| syntax("content before the first section header".into()))?;
        if let Some((k, v)) = content.split_once('=') {
            let (k, v) = (k.trim(), v.trim());
            if !allowed_keys(&sec.kind).contains(&k) {
                return Err(syntax(format!("unknown key '{k}' in [{}]", sec.kind)));
            }
            if v.is_empty() {
                return Err(syntax(format!("key '{k}' has no value")));
            }
            sec.keys.push((k.to_string(), v.to_string(), line));
        } else if content == "quad" {
            if sec.kind != "iqiac-group" {
                return Err(syntax("'quad' separator outside [iqiac-group]".into()));
            }
            if sec.groups.last().is_some_and(|g| !g.is_empty()) {
                sec.groups.push(Vec::new());
            }
        } else {
            if !matches!(sec.kind.as_str(), "siac" | "iac" | "qiac" | "iqiac-group" | "well") {
                return Err(syntax(format!("vertex line in [{}]", sec.kind)));
            }
            let nums: Vec<&str> = content.split_whitespace().collect();
            if nums.len() != 2 {
                return Err(syntax(format!("expected 'x y', got '{content}'")));
            }
            let x = parse_f64(nums[0], line)?;
            let y = parse_f64(nums[1], line)?;
            sec.groups.last_mut().expect("non-empty").push((Point::new(x, y), line));
        }
    }
    Ok(sections)
}

fn parse_f64(s: &str, line: usize) -> Result<f64, SpecError> {
    let v: f64 = s.parse().map_err(|_| SpecError::Syntax {
        line,
        message: format!("'{s}' is not a number"),
    })?;
    if !v.is_finite() {
        return Err(SpecError::Syntax {
            line,
            message: format!("'{s}' is not finite"),
        });
    }
    Ok(v)
}

fn parse_usize(s: &str, line: usize) -> Result<usize, SpecError> {
    s.parse().map_err(|_| SpecError::Syntax {
        line,
        message: format!("'{s}' is not a non-negative integer"),
    })
}

/// Parses `MxN`.
pub fn parse_size(s: &str) -> Option<(usize, usize)> {
    let (m, n) = s.split_once(['x', 'X'])?;
    Some((m.trim().parse().ok()?, n.trim().parse().ok()?))
}

/// Parses and validates a problem description.
pub fn parse_spec(text: &str) -> Result<ProblemSpec, SpecError> {
    let sections = tokenize(text)?;
    let domains: Vec<&Section> = sections.iter().filter(|s| s.kind == "domain").collect();
    let dsec = match domains.as_slice() {
        [d] => *d,
        [] => {
            return Err(SpecError::Syntax {
                line: 1,
                message: "missing [domain] section".into(),
            })
        }
        [_, second, ..] => {
            return Err(SpecError::Syntax {
                line: second.line,
                message: "more than one [domain] section".into(),
            })
        }
    };
    let coord = |k: &str| -> Result<f64, SpecError> {
        let (v, l) = dsec.key(k).ok_or_else(|| SpecError::Syntax {
            line: dsec.line,
            message: format!("[domain] needs '{k}'"),
        })?;
        parse_f64(v, l)
    };
    let name = dsec
        .key("name")
        .map_or_else(|| "problem".to_string(), |(v, _)| v.to_string());
    let mut domain =
        Domain::new(coord("a")?, coord("b")?, coord("c")?, coord("d")?).map_err(|e| SpecError::Validation {
            line: dsec.line,
            item: "domain".into(),
            message: e.to_string(),
        })?;
    if let Some((v, l)) = dsec.key("tol") {
        let t = parse_f64(v, l)?;
        if t <= 0.0 {
            return Err(SpecError::Syntax {
                line: l,
                message: "tolerance must be positive".into(),
            });
        }
        domain = domain.with_tolerance(t);
    }

    let mut boundaries = BoundarySet::default();
    let mut grid = GridParams::default();
    let mut solver = SolverConfig::default();
    let mut outputs = Vec::new();
    let mut counters = HashMap::new();
    let mut item_lines: HashMap<String, usize> = HashMap::new();

    for sec in &sections {
        let invalid = |item: &str, e: GeometryError| SpecError::Validation {
            line: sec.line,
            item: item.to_string(),
            message: e.to_string(),
        };
        match sec.kind.as_str() {
            "domain" => {}
            "siac" => {
                let label = sec.name(&mut counters);
                let pl = Polyline::new(sec.points()).map_err(|e| invalid(&label, e))?;
                let s = validate_siac(&pl, &domain).map_err(|e| invalid(&label, e))?;
                item_lines.insert(label.clone(), sec.line);
                boundaries.siacs.push(Labeled::new(label, s));
            }
            "iac" => {
                let label = sec.name(&mut counters);
                let orientation = match sec.key("orientation") {
                    None | Some(("auto", _)) => None,
                    Some(("horizontal", _)) => Some(Orientation::Horizontal),
                    Some(("vertical", _)) => Some(Orientation::Vertical),
                    Some((v, l)) => {
                        return Err(SpecError::Syntax {
                            line: l,
                            message: format!("orientation must be horizontal, vertical or auto, got '{v}'"),
                        })
                    }
                };
                let pl = Polyline::new(sec.points()).map_err(|e| invalid(&label, e))?;
                let iac = Iac::new(pl, &domain).map_err(|e| invalid(&label, e))?;
                item_lines.insert(label.clone(), sec.line);
                boundaries.iacs.push(Labeled::new(label, IacEntry { iac, orientation }));
            }
            "qiac" => {
                let label = sec.name(&mut counters);
                let q = Qiac::new(&sec.points(), &domain).map_err(|e| invalid(&label, e))?;
                item_lines.insert(label.clone(), sec.line);
                boundaries.qiacs.push(Labeled::new(label, q));
            }
            "iqiac-group" => {
                let label = sec.name(&mut counters);
                let mut qs = Vec::new();
                for (k, g) in sec.groups.iter().filter(|g| !g.is_empty()).enumerate() {
                    let pts: Vec<Point> = g.iter().map(|(p, _)| *p).collect();
                    let q = Qiac::new(&pts, &domain).map_err(|e| SpecError::Validation {
                        line: g[0].1,
                        item: format!("{label} quad {}", k + 1),
                        message: e.to_string(),
                    })?;
                    qs.push(q);
                }
                if qs.is_empty() {
                    return Err(SpecError::Syntax {
                        line: sec.line,
                        message: "[iqiac-group] without quads".into(),
                    });
                }
                item_lines.insert(label.clone(), sec.line);
                boundaries.iqiacs.push(Labeled::new(label, qs));
            }
            "well" => {
                for (p, l) in sec.groups.iter().flatten() {
                    if !domain.contains_strictly(*p) {
                        return Err(SpecError::Validation {
                            line: *l,
                            item: "well".into(),
                            message: format!("well at {p} is not strictly inside the domain"),
                        });
                    }
                    boundaries.wells.push(*p);
                }
            }
            "grid" => {
                if let Some((v, l)) = sec.key("fraction") {
                    grid.fraction = parse_f64(v, l)?;
                    if !(grid.fraction > 0.0 && grid.fraction <= 1.0) {
                        return Err(SpecError::Syntax {
                            line: l,
                            message: "fraction must lie in (0, 1]".into(),
                        });
                    }
                }
                if let Some((v, l)) = sec.key("size") {
                    let size = parse_size(v)
                        .filter(|&(m, n)| m >= 2 && n >= 2)
                        .ok_or(SpecError::Syntax {
                            line: l,
                            message: format!("size must look like MxN with M, N >= 2, got '{v}'"),
                        })?;
                    grid.size = Some(size);
                }
                if let Some((v, l)) = sec.key("extension") {
                    boundaries.extension = match v {
                        "tangent" => ExtensionMode::Tangent,
                        "axis" => ExtensionMode::Axis,
                        _ => {
                            return Err(SpecError::Syntax {
                                line: l,
                                message: format!("extension must be tangent or axis, got '{v}'"),
                            })
                        }
                    };
                }
            }
            "solver" => parse_solver(sec, &mut solver)?,
            "output" => {
                for (k, v, _) in &sec.keys {
                    let kind = match k.as_str() {
                        "mesh" => OutputKind::Mesh,
                        "vtk" => OutputKind::Vtk,
                        "svg" => OutputKind::Svg,
                        _ => OutputKind::Report,
                    };
                    outputs.push(OutputSpec {
                        kind,
                        path: PathBuf::from(v),
                    });
                }
            }
            _ => unreachable!("unknown sections are rejected by the tokenizer"),
        }
    }
    if outputs.is_empty() {
        return Err(SpecError::Syntax {
            line: text.lines().count().max(1),
            message: "no [output] entries".into(),
        });
    }

    // Arrangement rules between all spanning curves.
    let line_of = |label: &str| {
        let base = label.split('/').next().unwrap_or(label);
        item_lines.get(base).copied().unwrap_or(dsec.line)
    };
    let siacs = collect_siacs(&domain, &boundaries).map_err(|e| match e {
        GridError::Geometry { label, source } => SpecError::Validation {
            line: line_of(&label),
            message: source.to_string(),
            item: label,
        },
        other => SpecError::Validation {
            line: dsec.line,
            item: "boundaries".into(),
            message: other.to_string(),
        },
    })?;
    check_arrangement(&domain, &siacs).map_err(|e| match e {
        GridError::Arrangement { first, second, reason } => SpecError::Validation {
            line: line_of(&second),
            item: format!("{first} / {second}"),
            message: format!("{reason} (horizontal SIAC must be pairwise disjoint, vertical SIAC too, and each horizontal/vertical pair must meet exactly once)"),
        },
        other => SpecError::Validation {
            line: dsec.line,
            item: "boundaries".into(),
            message: other.to_string(),
        },
    })?;

    Ok(ProblemSpec {
        name,
        domain,
        boundaries,
        grid,
        solver,
        outputs,
    })
}

fn parse_solver(sec: &Section, cfg: &mut SolverConfig) -> Result<(), SpecError> {
    for (k, v, l) in &sec.keys {
        let (v, l) = (v.as_str(), *l);
        match k.as_str() {
            "kind" => {
                cfg.kind = SolverChoice::parse(v).ok_or_else(|| SpecError::Syntax {
                    line: l,
                    message: format!("solver kind must be sane, newton-gmres or both, got '{v}'"),
                })?
            }
            "tol" => cfg.set_tol(parse_f64(v, l)?),
            "max_iters" => cfg.set_max_iters(parse_usize(v, l)?),
            "alpha0" => cfg.sane.alpha0 = parse_f64(v, l)?,
            "memory" => cfg.sane.memory = parse_usize(v, l)?,
            "gamma" => cfg.sane.gamma = parse_f64(v, l)?,
            "sigma1" => cfg.sane.sigma1 = parse_f64(v, l)?,
            "sigma2" => cfg.sane.sigma2 = parse_f64(v, l)?,
            "eps" => cfg.sane.eps = parse_f64(v, l)?,
            "delta" => cfg.sane.delta = parse_f64(v, l)?,
            "lambda_min" => {
                let x = parse_f64(v, l)?;
                cfg.sane.lambda_min = x;
                cfg.gmres.lambda_min = x;
            }
            "restart" => cfg.gmres.restart = Some(parse_usize(v, l)?),
            "forcing" => cfg.gmres.forcing = parse_f64(v, l)?,
            "max_cycles" => cfg.gmres.max_cycles = parse_usize(v, l)?,
            "max_newton" => cfg.gmres.max_newton = parse_usize(v, l)?,
            _ => unreachable!("keys are checked by the tokenizer"),
        }
    }
    let wrap = |e: crate::solvers::SolverError| SpecError::Validation {
        line: sec.line,
        item: "solver".into(),
        message: e.to_string(),
    };
    cfg.sane.validate().map_err(wrap)?;
    cfg.gmres.validate().map_err(wrap)?;
    Ok(())
}
