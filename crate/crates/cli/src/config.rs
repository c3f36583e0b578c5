//! Experiment configuration files.
//!
//! Configs are TOML: `key = value` lines, `[section]` headers and `#`
//! comments. Top-level keys pick the experiment, the seed and the output
//! directory; `[grid]` fixes the lattice; one optional section per
//! experiment kind overrides that kind's defaults. Unknown keys are errors.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spectral_lab::grid::Grid;
use spectral_lab::mild::MildSolveConfig;
use spectral_lab::random::RandomFieldSpec;
use spectral_lab::wave::{strichartz_admissible, StrichartzExponents};
use spectral_lab::LabError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    OseenScaling,
    Picard,
    ContinuousDependence,
    #[serde(rename = "bb-ratio-2d")]
    BbRatio2d,
    #[serde(rename = "bb-ratio-3d")]
    BbRatio3d,
    GnRatio,
    MaxwellStrichartz,
    WaveFixture,
}

impl Kind {
    pub const ALL: [Kind; 8] = [
        Kind::OseenScaling,
        Kind::Picard,
        Kind::ContinuousDependence,
        Kind::BbRatio2d,
        Kind::BbRatio3d,
        Kind::GnRatio,
        Kind::MaxwellStrichartz,
        Kind::WaveFixture,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::OseenScaling => "oseen-scaling",
            Kind::Picard => "picard",
            Kind::ContinuousDependence => "continuous-dependence",
            Kind::BbRatio2d => "bb-ratio-2d",
            Kind::BbRatio3d => "bb-ratio-3d",
            Kind::GnRatio => "gn-ratio",
            Kind::MaxwellStrichartz => "maxwell-strichartz",
            Kind::WaveFixture => "wave-fixture",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Kind::BbRatio3d | Kind::MaxwellStrichartz | Kind::WaveFixture => 3,
            _ => 2,
        }
    }

    /// Section holding this kind's parameters.
    pub fn section(self) -> &'static str {
        match self {
            Kind::OseenScaling => "oseen",
            Kind::Picard => "picard",
            Kind::ContinuousDependence => "dependence",
            Kind::BbRatio2d | Kind::BbRatio3d | Kind::GnRatio => "ratio",
            Kind::MaxwellStrichartz => "strichartz",
            Kind::WaveFixture => "wave",
        }
    }

    /// Keys of the kind's section, for `--list`.
    pub fn keys(self) -> &'static str {
        match self {
            Kind::OseenScaling => "alpha0, count | times",
            Kind::Picard => "datum, alpha0, separation, t_init, amplitude, radius, edge, t0 | c_init, nt, quad_m, tol, max_iter, compare_stepper",
            Kind::ContinuousDependence => "[picard] datum keys, epsilons, bump_center, bump_width",
            Kind::BbRatio2d | Kind::BbRatio3d | Kind::GnRatio => "count, beta, k_max, refine",
            Kind::MaxwellStrichartz => "q, r, qt, s, k, count, beta, k_max, t_end, nt, refine",
            Kind::WaveFixture => "t_end, nt",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
    #[serde(default = "two_pi")]
    pub box_length: f64,
}

fn two_pi() -> f64 {
    2.0 * PI
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OseenSection {
    pub alpha0: f64,
    /// Log-spaced samples over two decades ending at `sqrt(4t) = L/16`.
    pub count: usize,
    /// Explicit t-list; replaces `count`.
    pub times: Option<Vec<f64>>,
}

impl Default for OseenSection {
    fn default() -> Self {
        OseenSection { alpha0: 1.0, count: 9, times: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Datum {
    OseenDipole,
    PatchDipole,
    TwoMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PicardSection {
    pub datum: Datum,
    /// Circulation of each Oseen vortex.
    pub alpha0: f64,
    pub separation: f64,
    /// Age of the Oseen vortices in the initial datum.
    pub t_init: f64,
    /// Patch height, or the two-mode amplitude.
    pub amplitude: f64,
    pub radius: f64,
    pub edge: f64,
    /// Fixed horizon; when absent, `c_init / A0^2` halved until contracting.
    pub t0: Option<f64>,
    pub c_init: f64,
    pub t_max: f64,
    pub nt: usize,
    pub quad_m: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Also run the reference stepper and report the sup-W11 gap.
    pub compare_stepper: bool,
}

impl Default for PicardSection {
    fn default() -> Self {
        PicardSection {
            datum: Datum::OseenDipole,
            alpha0: 1.0,
            separation: 2.5,
            t_init: 0.02,
            amplitude: 1.0,
            radius: 0.8,
            edge: 0.05,
            t0: None,
            c_init: 1.0,
            t_max: 1.0,
            nt: 32,
            quad_m: 64,
            tol: 1e-10,
            max_iter: 60,
            compare_stepper: false,
        }
    }
}

impl PicardSection {
    pub fn solver(&self, t0: f64) -> MildSolveConfig {
        MildSolveConfig {
            t0,
            nt: self.nt,
            quad_m: self.quad_m,
            tol: self.tol,
            max_iter: self.max_iter,
            nonlinear: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DependenceSection {
    pub epsilons: Vec<f64>,
    pub bump_center: [f64; 2],
    pub bump_width: f64,
}

impl Default for DependenceSection {
    fn default() -> Self {
        DependenceSection { epsilons: vec![1e-2, 1e-3, 1e-4], bump_center: [2.0, 4.0], bump_width: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatioSection {
    pub count: usize,
    pub beta: f64,
    pub k_max: usize,
    /// Extra resolutions for a refinement trace.
    pub refine: Vec<usize>,
}

impl Default for RatioSection {
    fn default() -> Self {
        RatioSection { count: 64, beta: 2.0, k_max: 8, refine: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StrichartzSection {
    pub q: f64,
    pub r: f64,
    pub qt: f64,
    pub s: f64,
    pub k: f64,
    pub count: usize,
    pub beta: f64,
    pub k_max: usize,
    /// Defaults to `L/4`.
    pub t_end: Option<f64>,
    pub nt: usize,
    pub refine: Vec<usize>,
}

impl Default for StrichartzSection {
    fn default() -> Self {
        StrichartzSection {
            q: 4.0,
            r: 4.0,
            qt: 4.0,
            s: 0.5,
            k: 0.75,
            count: 32,
            beta: 2.0,
            k_max: 6,
            t_end: None,
            nt: 64,
            refine: Vec::new(),
        }
    }
}

impl StrichartzSection {
    pub fn exponents(&self) -> StrichartzExponents {
        StrichartzExponents::new(self.q, self.r, self.qt, self.s, self.k)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveSection {
    pub t_end: Option<f64>,
    pub nt: usize,
}

impl Default for WaveSection {
    fn default() -> Self {
        WaveSection { t_end: None, nt: 129 }
    }
}

/// A parsed config. Sections not relevant to the experiment must be absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Kind,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub grid: GridSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oseen: Option<OseenSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub picard: Option<PicardSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dependence: Option<DependenceSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<RatioSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strichartz: Option<StrichartzSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wave: Option<WaveSection>,
}

#[derive(Debug)]
pub enum ConfigError {
    Read { path: PathBuf, message: String },
    Parse { message: String, line: Option<usize>, column: Option<usize> },
    Precondition(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Read { path, message } => write!(f, "cannot read {}: {message}", path.display()),
            ConfigError::Parse { message, line: Some(l), column: Some(c) } => {
                write!(f, "line {l}, column {c}: {message}")
            }
            ConfigError::Parse { message, .. } => f.write_str(message),
            ConfigError::Precondition(m) => f.write_str(m),
        }
    }
}

impl From<LabError> for ConfigError {
    fn from(e: LabError) -> Self {
        ConfigError::Precondition(e.to_string())
    }
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
    (line, col)
}

pub fn parse(src: &str) -> Result<ExperimentConfig, ConfigError> {
    toml::from_str(src).map_err(|e| {
        let pos = e.span().map(|s| line_col(src, s.start));
        ConfigError::Parse { message: e.message().trim().to_string(), line: pos.map(|p| p.0), column: pos.map(|p| p.1) }
    })
}

pub fn load(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Read { path: path.to_path_buf(), message: e.to_string() })?;
    parse(&src)
}

fn positive(name: &str, x: f64) -> Result<(), ConfigError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::Precondition(format!("{name} must be finite and > 0, got {x}")))
    }
}

impl ExperimentConfig {
    pub fn grid(&self) -> Result<Grid, ConfigError> {
        Ok(Grid::new(self.experiment.dim(), self.grid.n, self.grid.box_length)?)
    }

    pub fn ratio_spec(&self, r: &RatioSection) -> RandomFieldSpec {
        RandomFieldSpec {
            seed: self.seed,
            beta: r.beta,
            dim: self.experiment.dim(),
            n: self.grid.n,
            box_length: self.grid.box_length,
            count: r.count,
            k_max: r.k_max,
        }
    }

    pub fn strichartz_spec(&self, s: &StrichartzSection) -> RandomFieldSpec {
        RandomFieldSpec {
            seed: self.seed,
            beta: s.beta,
            dim: 3,
            n: self.grid.n,
            box_length: self.grid.box_length,
            count: s.count,
            k_max: s.k_max,
        }
    }

    /// Fill in the experiment's section with defaults and check every
    /// precondition that does not need a solve.
    pub fn resolve(mut self) -> Result<ExperimentConfig, ConfigError> {
        let kind = self.experiment;
        let present = [
            ("oseen", self.oseen.is_some()),
            ("picard", self.picard.is_some()),
            ("dependence", self.dependence.is_some()),
            ("ratio", self.ratio.is_some()),
            ("strichartz", self.strichartz.is_some()),
            ("wave", self.wave.is_some()),
        ];
        let own = [kind.section()];
        let allowed: &[&str] = if kind == Kind::ContinuousDependence { &["picard", "dependence"] } else { &own };
        for (name, here) in present {
            if here && !allowed.contains(&name) {
                return Err(ConfigError::Precondition(format!("section [{name}] does not apply to experiment {kind}")));
            }
        }
        let grid = self.grid()?;
        match kind {
            Kind::OseenScaling => {
                let o = self.oseen.get_or_insert_with(Default::default);
                if let Some(ts) = &o.times {
                    if ts.len() < 2 {
                        return Err(ConfigError::Precondition("oseen.times needs at least two entries".into()));
                    }
                    for &t in ts {
                        positive("oseen.times entry", t)?;
                    }
                } else if o.count < 2 {
                    return Err(ConfigError::Precondition("oseen.count must be >= 2".into()));
                }
                if !(o.alpha0.is_finite() && o.alpha0 != 0.0) {
                    return Err(ConfigError::Precondition("oseen.alpha0 must be finite and nonzero".into()));
                }
            }
            Kind::Picard | Kind::ContinuousDependence => {
                let p = self.picard.get_or_insert_with(Default::default);
                positive("picard.c_init", p.c_init)?;
                positive("picard.t_max", p.t_max)?;
                p.solver(p.t0.unwrap_or(p.t_max)).validate()?;
                if kind == Kind::ContinuousDependence {
                    let d = self.dependence.get_or_insert_with(Default::default);
                    if d.epsilons.len() < 2 {
                        return Err(ConfigError::Precondition("dependence.epsilons needs at least two entries".into()));
                    }
                    for &e in &d.epsilons {
                        positive("dependence.epsilons entry", e)?;
                    }
                    positive("dependence.bump_width", d.bump_width)?;
                }
            }
            Kind::BbRatio2d | Kind::BbRatio3d | Kind::GnRatio => {
                let r = self.ratio.get_or_insert_with(Default::default).clone();
                self.ratio_spec(&r).validate()?;
                for &n in &r.refine {
                    self.ratio_spec(&r).with_n(n).validate()?;
                }
            }
            Kind::MaxwellStrichartz => {
                let s = self.strichartz.get_or_insert_with(Default::default);
                let verdict = strichartz_admissible(&s.exponents());
                if !verdict.admissible {
                    return Err(LabError::Inadmissible(verdict.violations).into());
                }
                let t_end = *s.t_end.get_or_insert(grid.box_length() / 4.0);
                positive("strichartz.t_end", t_end)?;
                if t_end > grid.box_length() / 4.0 * (1.0 + 1e-12) {
                    return Err(ConfigError::Precondition(format!(
                        "strichartz.t_end = {t_end} exceeds L/4 = {}",
                        grid.box_length() / 4.0
                    )));
                }
                if s.nt < 2 {
                    return Err(ConfigError::Precondition("strichartz.nt must be >= 2".into()));
                }
                let s = s.clone();
                self.strichartz_spec(&s).validate()?;
                for &n in &s.refine {
                    self.strichartz_spec(&s).with_n(n).validate()?;
                }
            }
            Kind::WaveFixture => {
                let w = self.wave.get_or_insert_with(Default::default);
                let t_end = *w.t_end.get_or_insert(grid.box_length() / 4.0);
                positive("wave.t_end", t_end)?;
                if w.nt < 2 {
                    return Err(ConfigError::Precondition("wave.nt must be >= 2".into()));
                }
            }
        }
        Ok(self)
    }

    /// The resolved config as TOML.
    pub fn dump(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
