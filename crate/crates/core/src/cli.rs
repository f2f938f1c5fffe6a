//! Front-end plumbing shared by the binary: the effective run configuration
//! and one function per subcommand producing CSV, optional SVG and a short
//! text report.

use std::collections::BTreeSet;
use std::fmt::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::analysis::{self, fmt17, Observable, ScanConfig};
use crate::exact_engines::{self, ExactRestitution};
use crate::map_core::{strip_coords, theta, word_string, ProjectiveDirection, Restitution};
use crate::spectral::{certify_pattern, eigen_p1, eigen_p2, eigen_p3, PatternWord};
use crate::svg::{Marker, SvgPlot};
use crate::windows::{self, PrecisionBudget};
use crate::{Error, Result};

/// Environment variable that redirects relative output paths.
pub const OUT_DIR_ENV: &str = "COLLAPSE_LAB_OUT_DIR";

/// Where initial data come from.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSource {
    Default,
    /// `inits` directions drawn from `seed`.
    Random,
    /// One `x,y,z` direction per line.
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Overlay {
    Windows,
    Stripes,
}

/// Every knob of every subcommand. Config-file keys and flags share names.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub r: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub n_r: usize,
    pub iters: usize,
    pub tail: usize,
    pub grid: GridSource,
    pub obs: Observable,
    pub log_theta: bool,
    pub overlay: Option<Overlay>,
    pub digits: usize,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub threads: Option<usize>,
    pub seed: u64,
    pub word: String,
    pub n_max: usize,
    pub inits: usize,
    pub symbols: usize,
    pub r_list: Vec<String>,
    pub init: Option<[f64; 3]>,
    pub max_period: usize,
    /// Keys given explicitly by a file or a flag.
    pub explicit: BTreeSet<String>,
}

pub const KEYS: [&str; 23] = [
    "command", "r", "r-min", "r-max", "nr", "iters", "tail", "grid", "obs", "log-theta", "overlay", "digits", "out", "svg", "threads", "seed", "word", "n-max", "inits", "symbols", "r-list", "init", "max-period",
];

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: "simulate".into(),
            r: 0.2,
            r_min: 0.0717,
            r_max: 0.1717,
            n_r: 200,
            iters: 5000,
            tail: 100,
            grid: GridSource::Default,
            obs: Observable::Theta,
            log_theta: false,
            overlay: None,
            digits: 64,
            out: None,
            svg: None,
            threads: None,
            seed: 1,
            word: "132312".into(),
            n_max: 100,
            inits: 10,
            symbols: 200,
            r_list: ["0.1", "0.15", "0.2", "0.3"].map(String::from).to_vec(),
            init: None,
            max_period: 160,
            explicit: BTreeSet::new(),
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Config(format!("bad value for {key}: {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!("bad value for {key}: {value:?}"))),
    }
}

fn parse_vec3(key: &str, value: &str) -> Result<[f64; 3]> {
    let parts: Vec<f64> = value.split(',').map(|p| parse(key, p)).collect::<Result<_>>()?;
    parts.try_into().map_err(|_| Error::Config(format!("{key} needs three comma-separated numbers")))
}

impl RunConfig {
    /// Sets one key; flags and config-file lines both go through here.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "command" => self.command = v.to_string(),
            "r" => self.r = parse(key, v)?,
            "r-min" => self.r_min = parse(key, v)?,
            "r-max" => self.r_max = parse(key, v)?,
            "nr" => self.n_r = parse(key, v)?,
            "iters" => self.iters = parse(key, v)?,
            "tail" => self.tail = parse(key, v)?,
            "grid" => {
                self.grid = match v {
                    "default" => GridSource::Default,
                    "random" => GridSource::Random,
                    path => GridSource::File(PathBuf::from(path)),
                }
            }
            "obs" => self.obs = v.parse()?,
            "log-theta" => self.log_theta = parse_bool(key, v)?,
            "overlay" => {
                self.overlay = match v {
                    "none" => None,
                    "windows" => Some(Overlay::Windows),
                    "stripes" => Some(Overlay::Stripes),
                    _ => return Err(Error::Config(format!("overlay must be windows, stripes or none, got {v:?}"))),
                }
            }
            "digits" => self.digits = parse(key, v)?,
            "out" => self.out = (v != "-").then(|| PathBuf::from(v)),
            "svg" => self.svg = (v != "none").then(|| PathBuf::from(v)),
            "threads" => self.threads = if v == "auto" { None } else { Some(parse(key, v)?) },
            "seed" => self.seed = parse(key, v)?,
            "word" => self.word = v.to_string(),
            "n-max" => self.n_max = parse(key, v)?,
            "inits" => self.inits = parse(key, v)?,
            "symbols" => self.symbols = parse(key, v)?,
            "r-list" => self.r_list = v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
            "init" => self.init = if v == "none" { None } else { Some(parse_vec3(key, v)?) },
            "max-period" => self.max_period = parse(key, v)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        self.explicit.insert(key.to_string());
        Ok(())
    }

    /// Applies `key=value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected key=value, got {line:?}"),
            })?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (k, v) in pairs {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    /// Current value of every key, in the order of [`KEYS`].
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let path = |p: &Option<PathBuf>, none: &str| p.as_ref().map_or(none.to_string(), |p| p.display().to_string());
        KEYS.iter()
            .map(|&k| {
                let v = match k {
                    "command" => self.command.clone(),
                    "r" => fmt17(self.r),
                    "r-min" => fmt17(self.r_min),
                    "r-max" => fmt17(self.r_max),
                    "nr" => self.n_r.to_string(),
                    "iters" => self.iters.to_string(),
                    "tail" => self.tail.to_string(),
                    "grid" => match &self.grid {
                        GridSource::Default => "default".into(),
                        GridSource::Random => "random".into(),
                        GridSource::File(p) => p.display().to_string(),
                    },
                    "obs" => self.obs.name().into(),
                    "log-theta" => self.log_theta.to_string(),
                    "overlay" => match self.overlay {
                        None => "none".into(),
                        Some(Overlay::Windows) => "windows".into(),
                        Some(Overlay::Stripes) => "stripes".into(),
                    },
                    "digits" => self.digits.to_string(),
                    "out" => path(&self.out, "-"),
                    "svg" => path(&self.svg, "none"),
                    "threads" => self.threads.map_or("auto".into(), |t| t.to_string()),
                    "seed" => self.seed.to_string(),
                    "word" => self.word.clone(),
                    "n-max" => self.n_max.to_string(),
                    "inits" => self.inits.to_string(),
                    "symbols" => self.symbols.to_string(),
                    "r-list" => self.r_list.join(","),
                    "init" => self.init.map_or("none".into(), |u| u.map(fmt17).join(",")),
                    "max-period" => self.max_period.to_string(),
                    _ => unreachable!("key list and match agree"),
                };
                (k, v)
            })
            .collect()
    }

    /// Comment lines echoing the full effective configuration.
    pub fn header(&self) -> String {
        let mut s = format!("# collapse-lab {}\n", env!("CARGO_PKG_VERSION"));
        for (k, v) in self.entries() {
            let _ = writeln!(s, "# {k}={v}");
        }
        s
    }

    /// Rebuilds a configuration from the echo written by [`RunConfig::header`].
    pub fn from_header(text: &str) -> Result<Self> {
        let table = crate::csv_io::read_table(text)?;
        let mut cfg = RunConfig::from_pairs(table.config.iter().map(|(k, v)| (k.as_str(), v.as_str())))?;
        cfg.explicit.clear();
        Ok(cfg)
    }

    fn restitution(&self) -> Result<Restitution> {
        Restitution::new(self.r)
    }

    fn is_range(&self) -> bool {
        self.explicit.contains("r-min") || self.explicit.contains("r-max") || self.explicit.contains("nr")
    }

    fn budget(&self) -> Result<PrecisionBudget> {
        PrecisionBudget::new(self.digits, 12)
    }

    pub fn initial_data(&self) -> Result<Vec<ProjectiveDirection>> {
        match &self.grid {
            GridSource::Default => Ok(analysis::default_grid()),
            GridSource::Random => Ok(analysis::random_inits(self.inits, self.seed)),
            GridSource::File(p) => read_grid_file(p),
        }
    }
}

/// Reads one `x,y,z` direction per non-empty, non-comment line.
pub fn read_grid_file(path: &Path) -> Result<Vec<ProjectiveDirection>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let [x, y, z] = parse_vec3("grid", line).map_err(|e| Error::Parse {
            line: i + 1,
            msg: e.to_string(),
        })?;
        out.push(ProjectiveDirection::new(x, y, z)?);
    }
    if out.is_empty() {
        return Err(Error::Config(format!("grid file {} has no directions", path.display())));
    }
    Ok(out)
}

/// Applies the output-directory override to relative paths.
pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Result of one subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    /// CSV including the config echo.
    pub csv: String,
    pub svg: Option<String>,
    /// Human-readable summary for stderr.
    pub report: String,
    /// `false` when the command's check failed; maps to a nonzero exit code.
    pub ok: bool,
}

impl CommandOutput {
    fn new(cfg: &RunConfig, body: String, report: String) -> Self {
        CommandOutput {
            csv: format!("{}{}", cfg.header(), body),
            svg: None,
            report,
            ok: true,
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<CommandOutput> {
    match cfg.command.as_str() {
        "simulate" => cmd_simulate(cfg),
        "bifurcate" => cmd_bifurcate(cfg),
        "windows" => cmd_windows(cfg),
        "spectrum" => cmd_spectrum(cfg),
        "pattern" => cmd_pattern(cfg),
        "validate" => cmd_validate(cfg),
        "lyapunov" => cmd_lyapunov(cfg),
        "rotation" => cmd_rotation(cfg),
        other => Err(Error::Config(format!("unknown command {other:?}"))),
    }
}

fn single_init(cfg: &RunConfig) -> Result<ProjectiveDirection> {
    match cfg.init {
        Some([x, y, z]) => ProjectiveDirection::new(x, y, z),
        None => Ok(analysis::random_inits(1, cfg.seed)[0]),
    }
}

/// One orbit; the tail in the bifurcation schema and its strip-chart picture.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<CommandOutput> {
    let r = cfg.restitution()?;
    if cfg.tail > cfg.iters {
        return Err(Error::Config(format!("tail {} exceeds iters {}", cfg.tail, cfg.iters)));
    }
    let u0 = single_init(cfg)?;
    let orbit = analysis::run_orbit(&u0, r, cfg.iters, cfg.tail);
    let mut records = Vec::with_capacity(orbit.tail.len());
    for (k, u) in &orbit.tail {
        let (w1, w2) = strip_coords(u).unwrap_or((f64::NAN, f64::NAN));
        records.push(analysis::BifurcationRecord {
            r: r.r(),
            init_index: 0,
            iter_index: *k,
            theta: theta(u).unwrap_or(f64::NAN),
            phi: crate::map_core::phi(u).unwrap_or(f64::NAN),
            w1,
            w2,
            branch: orbit.branches.get(*k).copied(),
        });
    }
    let period = analysis::detect_period(&orbit.branches, cfg.max_period);
    let mut report = format!("r = {}, init = ({}, {}, {})\n", r.r(), u0.x, u0.y, u0.z);
    match &period {
        Some((p, w)) => {
            let _ = writeln!(report, "period {p}: {w}");
        }
        None => {
            let _ = writeln!(report, "no period <= {}", cfg.max_period);
        }
    }
    if let Some((k, why)) = &orbit.stopped {
        let _ = writeln!(report, "orbit stopped at step {k}: {why}");
    }
    let mut out = CommandOutput::new(cfg, analysis::bifurcation_csv(&records), report);
    if cfg.svg.is_some() {
        let pts = records.iter().map(|x| (x.w1, x.w2)).collect();
        out.svg = Some(SvgPlot::new(&format!("orbit tail, r = {}", r.r()), "w1", "w2", pts).render());
    }
    Ok(out)
}

/// Vertical markers for window bounds or thin stripes inside `[a, b]`.
pub fn overlay_markers(kind: Overlay, a: f64, b: f64, budget: PrecisionBudget) -> Result<Vec<Marker>> {
    let mut out = Vec::new();
    match kind {
        Overlay::Windows => {
            for n in 1..=100usize {
                let up = if n == 1 { 3.0 - 2.0 * 2f64.sqrt() } else { windows::upper_f64(n) };
                if up < a {
                    break;
                }
                let w = windows::window(n, budget)?;
                for (x, color) in [(w.lower_f64(), "blue"), (w.upper_f64().unwrap_or(up), "red")] {
                    if (a..=b).contains(&x) {
                        out.push(Marker { x, color });
                    }
                }
            }
        }
        Overlay::Stripes => {
            for (_, _, x) in analysis::thin_stripes(120) {
                if (a..=b).contains(&x) {
                    out.push(Marker { x, color: "green" });
                }
            }
        }
    }
    Ok(out)
}

pub fn cmd_bifurcate(cfg: &RunConfig) -> Result<CommandOutput> {
    let scan = ScanConfig {
        r_min: cfg.r_min,
        r_max: cfg.r_max,
        n_r: cfg.n_r,
        init_grid: cfg.initial_data()?,
        n_iter: cfg.iters,
        tail: cfg.tail,
        observable: cfg.obs,
    };
    let records = analysis::bifurcation_scan(&scan)?;
    let report = format!("{} records over {} r values and {} initial data\n", records.len(), scan.n_r, scan.init_grid.len());
    let mut out = CommandOutput::new(cfg, analysis::bifurcation_csv(&records), report);
    if cfg.svg.is_some() {
        let log = cfg.log_theta && cfg.obs == Observable::Theta;
        let pts = records
            .iter()
            .map(|x| {
                let v = x.value(cfg.obs);
                (x.r, if log { v.log10() } else { v })
            })
            .collect();
        let label = if log { "log10 theta".to_string() } else { cfg.obs.name().to_string() };
        let mut plot = SvgPlot::new("bifurcation diagram", "r", &label, pts);
        if let Some(kind) = cfg.overlay {
            plot.markers = overlay_markers(kind, cfg.r_min, cfg.r_max, cfg.budget()?)?;
        }
        out.svg = Some(plot.render());
    }
    Ok(out)
}

pub fn cmd_windows(cfg: &RunConfig) -> Result<CommandOutput> {
    if cfg.n_max == 0 {
        return Err(Error::Config("n-max must be at least 1".into()));
    }
    let t = Instant::now();
    let rows = windows::window_table(cfg.n_max, cfg.budget()?)?;
    let report = format!("{} windows in {:.1} s\n", rows.len(), t.elapsed().as_secs_f64());
    Ok(CommandOutput::new(cfg, windows::windows_csv(&rows), report))
}

/// Closed-form eigen-systems of the three branch matrices over an r grid.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<CommandOutput> {
    let rs = if cfg.is_range() { analysis::linspace(cfg.r_min, cfg.r_max, cfg.n_r) } else { vec![cfg.r] };
    let mut body = String::from("r,branch,index,re,im,v1_re,v1_im,v2_re,v2_im,v3_re,v3_im,dominant\n");
    for r in rs {
        let rr = Restitution::new(r)?;
        for (b, es) in [(1, eigen_p1(rr)), (2, eigen_p2(rr)), (3, eigen_p3(rr))] {
            for i in 0..3 {
                let l = es.eigenvalues[i];
                let v = es.eigenvectors[i];
                let _ = writeln!(
                    body,
                    "{},{b},{i},{},{},{},{},{},{},{},{},{}",
                    fmt17(r),
                    fmt17(l.re),
                    fmt17(l.im),
                    fmt17(v[0].re),
                    fmt17(v[0].im),
                    fmt17(v[1].re),
                    fmt17(v[1].im),
                    fmt17(v[2].re),
                    fmt17(v[2].im),
                    es.dominant_index == Some(i)
                );
            }
        }
    }
    Ok(CommandOutput::new(cfg, body, String::new()))
}

/// Bisects the change of certified stability between `a` and `b`.
pub fn stability_boundary(w: &PatternWord, mut a: f64, mut b: f64) -> Result<f64> {
    let stable = |r: f64| Restitution::new(r).map(|rr| certify_pattern(w, rr).stable);
    let sa = stable(a)?;
    if sa == stable(b)? {
        return Err(Error::Bracket { a, b });
    }
    while b - a > 1e-15 * b.abs().max(1.0) {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if stable(m)? == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Certificate at one r, or over a grid with bisected stability boundaries.
pub fn cmd_pattern(cfg: &RunConfig) -> Result<CommandOutput> {
    let w = PatternWord::parse(&cfg.word)?;
    let rs = if cfg.is_range() { analysis::linspace(cfg.r_min, cfg.r_max, cfg.n_r) } else { vec![cfg.r] };
    let mut body = String::from("r,exists,stable,undecided,multiplier_re,multiplier_im,failed_step,failed_inequality\n");
    let mut certs = Vec::with_capacity(rs.len());
    for &r in &rs {
        let c = certify_pattern(&w, Restitution::new(r)?);
        let m = c.multiplier.unwrap_or_default();
        let (fs, fi) = c.failed_inequality.map_or((String::new(), String::new()), |(s, i)| (s.to_string(), i.to_string()));
        let _ = writeln!(body, "{},{},{},{},{},{},{fs},{fi}", fmt17(r), c.exists, c.stable, c.undecided, fmt17(m.re), fmt17(m.im));
        certs.push(c);
    }
    let mut report = String::new();
    let n_stable = certs.iter().filter(|c| c.stable).count();
    let n_undecided = certs.iter().filter(|c| c.undecided).count();
    let _ = writeln!(report, "word {w}: stable at {n_stable} of {} r values, undecided at {n_undecided}", rs.len());
    for (i, pair) in certs.windows(2).enumerate() {
        if pair[0].stable != pair[1].stable {
            let x = stability_boundary(&w, rs[i], rs[i + 1])?;
            let _ = writeln!(report, "stability boundary at r = {x:.12}");
        }
    }
    if rs.len() == 1 {
        let c = &certs[0];
        let _ = writeln!(report, "exists: {}, stable: {}, undecided: {}", c.exists, c.stable, c.undecided);
        if let Some(u) = c.direction {
            let _ = writeln!(report, "direction: ({:.15}, {:.15}, {:.15})", u.x, u.y, u.z);
        }
        if let Some((s, i)) = c.failed_inequality {
            let _ = writeln!(report, "dominant eigenvector fails {i} at step {s}");
        }
    }
    Ok(CommandOutput::new(cfg, body, report))
}

/// Relative size of the initial perturbations that set a float horizon.
pub const FLOAT_HORIZON_EPS: f64 = 1e-10;

/// Exact and floating-point comparison of one `r` given as a decimal.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRow {
    pub r: String,
    pub init: usize,
    /// The exact map, cross-product and particle engines agree.
    pub exact_agree: bool,
    /// Letters the exact word is stable for under perturbations of size
    /// [`FLOAT_HORIZON_EPS`]; float engines are compared up to here.
    pub horizon: usize,
    /// First letter where each float engine leaves the exact word:
    /// map, cross-product, particle.
    pub float_first_bad: [Option<usize>; 3],
    pub trig_included: bool,
    pub trig_first_bad: Option<usize>,
}

impl ValidationRow {
    /// Exact agreement, and every float engine exact up to the horizon.
    pub fn passes(&self) -> bool {
        let within = |b: Option<usize>| b.is_none_or(|k| k >= self.horizon);
        self.exact_agree && self.float_first_bad.iter().all(|&b| within(b)) && (!self.trig_included || within(self.trig_first_bad))
    }
}

fn first_difference(a: &[crate::map_core::Branch], b: &[crate::map_core::Branch]) -> Option<usize> {
    (0..a.len().max(b.len())).find(|&i| a.get(i) != b.get(i))
}

/// First letter at which some perturbed float orbit leaves `exact`.
pub fn float_horizon(u0: &ProjectiveDirection, r: Restitution, exact: &[crate::map_core::Branch], eps: f64) -> usize {
    let mut h = exact.len();
    for j in 0..3 {
        for s in [-1.0, 1.0] {
            let mut v = u0.vec();
            v[j] += s * eps;
            let letters: Vec<_> = match ProjectiveDirection::from_vec(v).and_then(|p| crate::map_core::iterate(&p, r, exact.len())) {
                Ok(o) => o.iter().map(|x| x.branch).collect(),
                Err(_) => Vec::new(),
            };
            h = h.min(first_difference(&letters, exact).unwrap_or(exact.len()));
        }
    }
    h
}

/// Runs every engine on `inits` for the restitution coefficient `r_text`.
/// Wall times in seconds: exact engines, float map, cross-product,
/// particle, trigonometric.
pub fn validate_r(r_text: &str, inits: &[ProjectiveDirection], n: usize) -> Result<(Vec<ValidationRow>, [f64; 5])> {
    use crate::oracles::{defn23_letters, particle_letters, trig_letters, VelocityGauge};
    let r = Restitution::new(parse::<f64>("r-list", r_text)?)?;
    let exact_r = ExactRestitution::from_decimal(r_text)?;
    let mut walls = [0.0; 5];
    let mut rows = Vec::with_capacity(inits.len());
    for (i, u0) in inits.iter().enumerate() {
        let t = Instant::now();
        let v = exact_engines::from_direction(u0);
        let exact = exact_engines::map_letters(&v, &exact_r, n);
        let exact_agree = exact_engines::defn23_letters(&v, &exact_r, n)? == exact && exact_engines::particle_letters(&v, &exact_r, n)? == exact;
        walls[0] += t.elapsed().as_secs_f64();
        let t = Instant::now();
        let map: Vec<_> = crate::map_core::iterate(u0, r, n)?.iter().map(|s| s.branch).collect();
        walls[1] += t.elapsed().as_secs_f64();
        let t = Instant::now();
        let cross = defn23_letters(u0, r, n)?.0;
        walls[2] += t.elapsed().as_secs_f64();
        let t = Instant::now();
        let particle = particle_letters(u0, r, n, VelocityGauge::Projected)?;
        walls[3] += t.elapsed().as_secs_f64();
        let t = Instant::now();
        let trig = trig_letters(u0, r, n);
        walls[4] += t.elapsed().as_secs_f64();
        rows.push(ValidationRow {
            r: r_text.to_string(),
            init: i,
            exact_agree,
            horizon: float_horizon(u0, r, &exact, FLOAT_HORIZON_EPS),
            float_first_bad: [first_difference(&map, &exact), first_difference(&cross, &exact), first_difference(&particle.letters, &exact)],
            trig_included: trig.degenerate_at.is_none() && !trig.malformed,
            trig_first_bad: first_difference(&trig.letters, &exact),
        });
    }
    Ok((rows, walls))
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<CommandOutput> {
    let inits = match cfg.grid {
        GridSource::Default if !cfg.explicit.contains("grid") => analysis::random_inits(cfg.inits, cfg.seed),
        _ => cfg.initial_data()?,
    };
    let mut body = String::from("r,init,exact_agree,horizon,map_first_bad,cross_first_bad,particle_first_bad,trig_included,trig_first_bad\n");
    let mut report = String::new();
    let mut ok = true;
    let opt = |x: Option<usize>| x.map_or(String::new(), |v| v.to_string());
    for r_text in &cfg.r_list {
        let (rows, walls) = validate_r(r_text, &inits, cfg.symbols)?;
        let bad: Vec<&ValidationRow> = rows.iter().filter(|x| !x.passes()).collect();
        let full = rows.iter().filter(|x| x.horizon == cfg.symbols).count();
        let trig = rows.iter().filter(|x| x.trig_included).count();
        let _ = writeln!(
            report,
            "r = {r_text}: {} inits, {} failures, float horizon covers all {} letters on {full}; wall exact {:.2} s, map {:.3} s, cross {:.3} s, particle {:.3} s, trig {:.3} s",
            rows.len(),
            bad.len(),
            cfg.symbols,
            walls[0],
            walls[1],
            walls[2],
            walls[3],
            walls[4]
        );
        if trig < rows.len() {
            let _ = writeln!(report, "  trig engine excluded on {} inits by its degeneracy flag", rows.len() - trig);
        }
        for b in &bad {
            let _ = writeln!(report, "  divergence: init {} horizon {} float first bad {:?} trig first bad {:?} exact agree {}", b.init, b.horizon, b.float_first_bad, b.trig_first_bad, b.exact_agree);
        }
        ok &= bad.is_empty();
        for x in rows {
            let [m, c, p] = x.float_first_bad;
            let _ = writeln!(body, "{},{},{},{},{},{},{},{},{}", x.r, x.init, x.exact_agree, x.horizon, opt(m), opt(c), opt(p), x.trig_included, opt(x.trig_first_bad));
        }
    }
    let mut out = CommandOutput::new(cfg, body, report);
    out.ok = ok;
    Ok(out)
}

pub fn cmd_lyapunov(cfg: &RunConfig) -> Result<CommandOutput> {
    let rs = if cfg.is_range() { analysis::linspace(cfg.r_min, cfg.r_max, cfg.n_r) } else { vec![cfg.r] };
    let inits = match cfg.init {
        Some(_) => vec![single_init(cfg)?],
        None => cfg.initial_data()?,
    };
    let jobs: Vec<(f64, usize)> = rs.iter().flat_map(|&r| (0..inits.len()).map(move |i| (r, i))).collect();
    let rows: Vec<(f64, usize, analysis::LyapunovEstimate)> = {
        use rayon::prelude::*;
        jobs.par_iter()
            .map(|&(r, i)| Ok((r, i, analysis::lyapunov_max(&inits[i], Restitution::new(r)?, cfg.iters)?)))
            .collect::<Result<_>>()?
    };
    let flagged = rows.iter().filter(|(_, _, e)| e.near_boundary.is_some()).count();
    let report = format!("{} estimates, {flagged} orbits passed within 1e-12 of a branch boundary\n", rows.len());
    let mut out = CommandOutput::new(cfg, analysis::lyapunov_csv(&rows), report);
    if cfg.svg.is_some() {
        let pts = rows.iter().map(|(r, _, e)| (*r, e.lambda_max)).collect();
        out.svg = Some(SvgPlot::new("largest Lyapunov exponent", "r", "lambda_max", pts).render());
    }
    Ok(out)
}

pub fn cmd_rotation(cfg: &RunConfig) -> Result<CommandOutput> {
    let r = cfg.restitution()?;
    let u0 = match cfg.init {
        Some(_) => single_init(cfg)?,
        None => ProjectiveDirection::new(1.0, 0.01, -1.0)?,
    };
    let est = analysis::rotation_number(&u0, r, cfg.iters)?;
    let body = format!("r,n,rho\n{},{},{}\n", fmt17(r.r()), est.window, fmt17(est.rho));
    let report = format!("rotation number {:.12} over {} steps\n", est.rho, est.window);
    Ok(CommandOutput::new(cfg, body, report))
}

/// Branch word of `n` steps from `u0`, as a string.
pub fn word_of(u0: &ProjectiveDirection, r: Restitution, n: usize) -> Result<String> {
    Ok(word_string(&crate::map_core::iterate(u0, r, n)?.iter().map(|s| s.branch).collect::<Vec<_>>()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.apply_text("command = bifurcate\nr-min=0.1 # lower end\nobs=phi\noverlay=stripes\ninit=1,0.5,-2\n").unwrap();
        cfg.set("r-max", "0.15").unwrap();
        let back = RunConfig::from_header(&cfg.header()).unwrap();
        assert_eq!(back.entries(), cfg.entries());
        assert_eq!(back.command, "bifurcate");
        assert_eq!(back.init, Some([1.0, 0.5, -2.0]));
    }

    #[test]
    fn rejects_unknown_keys() {
        let mut cfg = RunConfig::default();
        assert!(cfg.set("colour", "red").is_err());
        assert!(cfg.apply_text("no equals sign").is_err());
        assert!(cfg.set("obs", "psi").is_err());
    }
}
