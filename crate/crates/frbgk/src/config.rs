//! Flat `key = value` run configuration with `#` comments.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    Pulse,
    Expansion,
    Sod,
    NormalShock,
}

impl CaseKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseKind::Pulse => "pulse",
            CaseKind::Expansion => "expansion",
            CaseKind::Sod => "sod",
            CaseKind::NormalShock => "normal_shock",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollisionKind {
    Constant,
    PowerLaw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcChoice {
    Periodic,
    Neumann,
    Dirichlet,
    Specular,
}

impl BcChoice {
    fn as_str(&self) -> &'static str {
        match self {
            BcChoice::Periodic => "periodic",
            BcChoice::Neumann => "neumann",
            BcChoice::Dirichlet => "dirichlet",
            BcChoice::Specular => "specular",
        }
    }
}

/// Validated run configuration. Optional fields fall back to case defaults.
#[derive(Debug, Clone)]
pub struct Config {
    pub case: CaseKind,
    pub p: usize,
    pub n_elements: usize,
    pub domain: Option<(f64, f64)>,
    pub n_v: Option<usize>,
    pub n_r: Option<usize>,
    pub n_phi: Option<usize>,
    pub n_psi: Option<usize>,
    pub n_zeta: Option<usize>,
    pub delta: Option<f64>,
    pub kn: Option<f64>,
    pub kn_h: Option<f64>,
    pub tau: Option<f64>,
    pub collision_model: Option<CollisionKind>,
    pub omega: Option<f64>,
    pub mach: Option<f64>,
    pub beta: Option<f64>,
    pub smooth_ic: bool,
    pub t_final: Option<f64>,
    pub cfl: f64,
    pub eps_u: f64,
    pub eps_zeta: f64,
    pub dvm: bool,
    pub dvm_iters: usize,
    pub init_iters: usize,
    pub bc_left: Option<BcChoice>,
    pub bc_right: Option<BcChoice>,
    pub output_interval: Option<f64>,
    pub fu_locations: Vec<f64>,
    pub threads: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            case: CaseKind::Sod,
            p: 3,
            n_elements: 50,
            domain: None,
            n_v: None,
            n_r: None,
            n_phi: None,
            n_psi: None,
            n_zeta: None,
            delta: None,
            kn: None,
            kn_h: None,
            tau: None,
            collision_model: None,
            omega: None,
            mach: None,
            beta: None,
            smooth_ic: false,
            t_final: None,
            cfl: 0.5,
            eps_u: 1e-15,
            eps_zeta: 1e-6,
            dvm: true,
            dvm_iters: 2,
            init_iters: 5,
            bc_left: None,
            bc_right: None,
            output_interval: None,
            fu_locations: Vec::new(),
            threads: 0,
        }
    }
}

const REQUIRED_KEYS: &[&str] = &["case", "p", "n_elements", "n_v"];

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::ConfigParse {
        line,
        message: message.into(),
    }
}

pub fn parse_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<Config> {
    let mut cfg = Config::default();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, "expected `key = value`"))?;
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(parse_err(line_no, format!("empty value for `{key}`")));
        }
        if let Some(prev) = seen.insert(key.to_string(), line_no) {
            return Err(parse_err(
                line_no,
                format!("duplicate key `{key}` (first set at line {prev})"),
            ));
        }

        let fnum = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| parse_err(line_no, format!("`{key}` expects a number, got `{v}`")))
        };
        let unum = |v: &str| -> Result<usize> {
            v.parse::<usize>().map_err(|_| {
                parse_err(
                    line_no,
                    format!("`{key}` expects a nonnegative integer, got `{v}`"),
                )
            })
        };
        let boolean = |v: &str| -> Result<bool> {
            match v {
                "true" => Ok(true),
                "false" => Ok(false),
                _ => Err(parse_err(
                    line_no,
                    format!("`{key}` expects true or false, got `{v}`"),
                )),
            }
        };

        match key {
            "case" => {
                cfg.case = match value {
                    "pulse" => CaseKind::Pulse,
                    "expansion" => CaseKind::Expansion,
                    "sod" => CaseKind::Sod,
                    "normal_shock" => CaseKind::NormalShock,
                    _ => {
                        return Err(parse_err(
                            line_no,
                            format!(
                                "unknown case `{value}` (pulse | expansion | sod | normal_shock)"
                            ),
                        ))
                    }
                }
            }
            "p" => cfg.p = unum(value)?,
            "n_elements" => cfg.n_elements = unum(value)?,
            "domain" => {
                let parts: Vec<&str> = value
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .collect();
                if parts.len() != 2 {
                    return Err(parse_err(line_no, "`domain` expects two floats"));
                }
                cfg.domain = Some((fnum(parts[0])?, fnum(parts[1])?));
            }
            "n_v" => cfg.n_v = Some(unum(value)?),
            "n_r" => cfg.n_r = Some(unum(value)?),
            "n_phi" => cfg.n_phi = Some(unum(value)?),
            "n_psi" => cfg.n_psi = Some(unum(value)?),
            "n_zeta" => cfg.n_zeta = Some(unum(value)?),
            "delta" => cfg.delta = Some(fnum(value)?),
            "kn" => cfg.kn = Some(fnum(value)?),
            "kn_h" => cfg.kn_h = Some(fnum(value)?),
            "tau" => cfg.tau = Some(fnum(value)?),
            "collision_model" => {
                cfg.collision_model = Some(match value {
                    "constant" => CollisionKind::Constant,
                    "power_law" => CollisionKind::PowerLaw,
                    _ => {
                        return Err(parse_err(
                            line_no,
                            format!("unknown collision model `{value}` (constant | power_law)"),
                        ))
                    }
                })
            }
            "omega" => cfg.omega = Some(fnum(value)?),
            "mach" => cfg.mach = Some(fnum(value)?),
            "beta" => cfg.beta = Some(fnum(value)?),
            "smooth_ic" => cfg.smooth_ic = boolean(value)?,
            "t_final" => cfg.t_final = Some(fnum(value)?),
            "cfl" => cfg.cfl = fnum(value)?,
            "eps_u" => cfg.eps_u = fnum(value)?,
            "eps_zeta" => cfg.eps_zeta = fnum(value)?,
            "dvm" => cfg.dvm = boolean(value)?,
            "dvm_iters" => cfg.dvm_iters = unum(value)?,
            "init_iters" => cfg.init_iters = unum(value)?,
            "bc_left" | "bc_right" => {
                let choice = match value {
                    "periodic" => BcChoice::Periodic,
                    "neumann" => BcChoice::Neumann,
                    "dirichlet" => BcChoice::Dirichlet,
                    "specular" => BcChoice::Specular,
                    _ => {
                        return Err(parse_err(
                            line_no,
                            format!(
                                "unknown boundary `{value}` (periodic | neumann | dirichlet | specular)"
                            ),
                        ))
                    }
                };
                if key == "bc_left" {
                    cfg.bc_left = Some(choice);
                } else {
                    cfg.bc_right = Some(choice);
                }
            }
            "output_interval" => cfg.output_interval = Some(fnum(value)?),
            "fu_locations" => {
                cfg.fu_locations = value
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse::<f64>().map_err(|_| {
                            parse_err(line_no, format!("bad f_u location `{s}`"))
                        })
                    })
                    .collect::<Result<Vec<f64>>>()?;
            }
            "threads" => cfg.threads = unum(value)?,
            _ => return Err(parse_err(line_no, format!("unknown key `{key}`"))),
        }
    }

    let missing: Vec<&str> = REQUIRED_KEYS
        .iter()
        .filter(|k| !seen.contains_key(**k))
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(Error::Config(format!(
            "missing required keys: {}",
            missing.join(", ")
        )));
    }
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &Config) -> Result<()> {
    if cfg.p < 1 {
        return Err(Error::Config("p must be at least 1".into()));
    }
    if cfg.n_elements == 0 {
        return Err(Error::Config("n_elements must be positive".into()));
    }
    let n_time_scales = [cfg.kn.is_some(), cfg.kn_h.is_some(), cfg.tau.is_some()]
        .iter()
        .filter(|b| **b)
        .count();
    if n_time_scales > 1 {
        return Err(Error::Config(
            "set at most one of kn, kn_h, tau".into(),
        ));
    }
    if !(cfg.cfl > 0.0) {
        return Err(Error::Config("cfl must be positive".into()));
    }
    if !(cfg.eps_u > 0.0 && cfg.eps_u < 1.0) {
        return Err(Error::Config("eps_u must lie in (0, 1)".into()));
    }
    if !(cfg.eps_zeta > 0.0 && cfg.eps_zeta < 1.0) {
        return Err(Error::Config("eps_zeta must lie in (0, 1)".into()));
    }
    if cfg.smooth_ic && cfg.case != CaseKind::Expansion {
        return Err(Error::Config(
            "smooth_ic only applies to the expansion case".into(),
        ));
    }
    if cfg.case == CaseKind::NormalShock && cfg.mach.is_none() {
        return Err(Error::Config(
            "normal_shock needs a mach number".into(),
        ));
    }
    if let Some((a, b)) = cfg.domain {
        if !(b > a) {
            return Err(Error::Config("domain must be increasing".into()));
        }
    }
    Ok(())
}

/// Canonical single-pass normalization: every effective key, fixed order.
pub fn serialize(cfg: &Config) -> String {
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    kv("case", cfg.case.as_str().to_string());
    kv("p", cfg.p.to_string());
    kv("n_elements", cfg.n_elements.to_string());
    if let Some((a, b)) = cfg.domain {
        kv("domain", format!("{a} {b}"));
    }
    if let Some(v) = cfg.n_v {
        kv("n_v", v.to_string());
    }
    if let Some(v) = cfg.n_r {
        kv("n_r", v.to_string());
    }
    if let Some(v) = cfg.n_phi {
        kv("n_phi", v.to_string());
    }
    if let Some(v) = cfg.n_psi {
        kv("n_psi", v.to_string());
    }
    if let Some(v) = cfg.n_zeta {
        kv("n_zeta", v.to_string());
    }
    if let Some(v) = cfg.delta {
        kv("delta", v.to_string());
    }
    if let Some(v) = cfg.kn {
        kv("kn", v.to_string());
    }
    if let Some(v) = cfg.kn_h {
        kv("kn_h", v.to_string());
    }
    if let Some(v) = cfg.tau {
        kv("tau", v.to_string());
    }
    if let Some(v) = cfg.collision_model {
        kv(
            "collision_model",
            match v {
                CollisionKind::Constant => "constant".to_string(),
                CollisionKind::PowerLaw => "power_law".to_string(),
            },
        );
    }
    if let Some(v) = cfg.omega {
        kv("omega", v.to_string());
    }
    if let Some(v) = cfg.mach {
        kv("mach", v.to_string());
    }
    if let Some(v) = cfg.beta {
        kv("beta", v.to_string());
    }
    kv("smooth_ic", cfg.smooth_ic.to_string());
    if let Some(v) = cfg.t_final {
        kv("t_final", v.to_string());
    }
    kv("cfl", cfg.cfl.to_string());
    kv("eps_u", cfg.eps_u.to_string());
    kv("eps_zeta", cfg.eps_zeta.to_string());
    kv("dvm", cfg.dvm.to_string());
    kv("dvm_iters", cfg.dvm_iters.to_string());
    kv("init_iters", cfg.init_iters.to_string());
    if let Some(v) = cfg.bc_left {
        kv("bc_left", v.as_str().to_string());
    }
    if let Some(v) = cfg.bc_right {
        kv("bc_right", v.as_str().to_string());
    }
    if let Some(v) = cfg.output_interval {
        kv("output_interval", v.to_string());
    }
    if !cfg.fu_locations.is_empty() {
        let locs: Vec<String> = cfg.fu_locations.iter().map(|v| v.to_string()).collect();
        kv("fu_locations", locs.join(", "));
    }
    kv("threads", cfg.threads.to_string());
    s
}
