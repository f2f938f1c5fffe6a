//! Orbit statistics: bifurcation scans, symbolic period detection, thin-stripe
//! prediction, Lyapunov exponents, rotation numbers, time correlations and
//! empirical measures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::linalg::{dot, norm, normalized, scale, sub, Mat3, Vec3, E_X, E_Y, E_Z};
use crate::map_core::{branch_matrix, classify, from_strip, phi, step, strip_coords, theta, word_string, Branch, ProjectiveDirection, Restitution};
use crate::spectral::eigen_p2;
use crate::{Error, Result};

/// Observable plotted against `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    Theta,
    Phi,
    Strip,
}

impl std::str::FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theta" => Ok(Observable::Theta),
            "phi" => Ok(Observable::Phi),
            "strip" => Ok(Observable::Strip),
            _ => Err(Error::Config(format!("unknown observable {s:?}; expected theta, phi or strip"))),
        }
    }
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::Theta => "theta",
            Observable::Phi => "phi",
            Observable::Strip => "strip",
        }
    }
}

/// Parameters of a bifurcation scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub n_r: usize,
    pub init_grid: Vec<ProjectiveDirection>,
    pub n_iter: usize,
    pub tail: usize,
    pub observable: Observable,
}

impl ScanConfig {
    /// `n_r` values on `[r_min, r_max]` with the default grid, 5000
    /// iterations and a 100-step tail.
    pub fn new(r_min: f64, r_max: f64, n_r: usize) -> Self {
        ScanConfig {
            r_min,
            r_max,
            n_r,
            init_grid: default_grid(),
            n_iter: 5000,
            tail: 100,
            observable: Observable::Theta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.r_min && self.r_min <= self.r_max && self.r_max < 1.0) {
            return Err(Error::Config(format!("need 0 < r_min <= r_max < 1, got [{}, {}]", self.r_min, self.r_max)));
        }
        if self.n_r == 0 || self.init_grid.is_empty() {
            return Err(Error::Config("scan needs at least one r value and one initial datum".into()));
        }
        if self.tail > self.n_iter {
            return Err(Error::Config(format!("tail {} exceeds n_iter {}", self.tail, self.n_iter)));
        }
        Ok(())
    }

    /// Evenly spaced restitution coefficients, endpoints included.
    pub fn r_values(&self) -> Vec<f64> {
        linspace(self.r_min, self.r_max, self.n_r)
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// One recorded tail point.
#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationRecord {
    pub r: f64,
    pub init_index: usize,
    pub iter_index: usize,
    pub theta: f64,
    pub phi: f64,
    pub w1: f64,
    pub w2: f64,
    /// Branch taken from this state; `None` when the orbit stopped here.
    pub branch: Option<Branch>,
}

impl BifurcationRecord {
    pub fn value(&self, obs: Observable) -> f64 {
        match obs {
            Observable::Theta => self.theta,
            Observable::Phi => self.phi,
            Observable::Strip => self.w1,
        }
    }
}

/// The 32 directions `(1, −9/(2+g), −0.1 − h)`, `g = 1..8` outer, `h = 1..4`
/// inner.
pub fn default_grid() -> Vec<ProjectiveDirection> {
    let mut out = Vec::with_capacity(32);
    for g in 1..=8 {
        for h in 1..=4 {
            let y = -(1.0 + 8.0) / (2.0 + g as f64);
            let z = -0.1 - h as f64;
            out.push(ProjectiveDirection::new(1.0, y, z).expect("nonzero grid vector"));
        }
    }
    out
}

/// Random directions uniform in the strip chart, `w1 ∈ [−2, 2]`,
/// `w2 ∈ (−1, 1)`, reproducible from `seed`.
pub fn random_inits(n: usize, seed: u64) -> Vec<ProjectiveDirection> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let w1 = rng.gen_range(-2.0..=2.0);
        let w2: f64 = rng.gen_range(-1.0..1.0);
        if w2 <= -1.0 {
            continue;
        }
        out.push(from_strip(w1, w2).expect("strip point is a valid direction"));
    }
    out
}

/// An orbit: the branch letters of every step and the states of the tail.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub branches: Vec<Branch>,
    /// `(iteration index, state)` for the recorded tail.
    pub tail: Vec<(usize, ProjectiveDirection)>,
    /// Step at which the map could not be applied, with the reason.
    pub stopped: Option<(usize, String)>,
}

/// Iterates `n_iter` steps and keeps the states of the last `tail` ones.
pub fn run_orbit(u0: &ProjectiveDirection, r: Restitution, n_iter: usize, tail: usize) -> Orbit {
    let mut branches = Vec::with_capacity(n_iter);
    let mut rec = Vec::with_capacity(tail);
    let mut u = *u0;
    let first_tail = n_iter.saturating_sub(tail);
    let mut stopped = None;
    for k in 0..n_iter {
        if k >= first_tail {
            rec.push((k, u));
        }
        match step(&u, r) {
            Ok(s) => {
                branches.push(s.branch);
                u = s.next;
            }
            Err(e) => {
                stopped = Some((k, e.to_string()));
                break;
            }
        }
    }
    Orbit {
        branches,
        tail: rec,
        stopped,
    }
}

fn record(r: f64, init_index: usize, k: usize, u: &ProjectiveDirection, branch: Option<Branch>) -> BifurcationRecord {
    let (w1, w2) = strip_coords(u).unwrap_or((f64::NAN, f64::NAN));
    BifurcationRecord {
        r,
        init_index,
        iter_index: k,
        theta: theta(u).unwrap_or(f64::NAN),
        phi: phi(u).unwrap_or(f64::NAN),
        w1,
        w2,
        branch,
    }
}

/// Tails of every `(r, init)` orbit, ordered by r index, then init index,
/// then iteration, independently of the thread schedule.
pub fn bifurcation_scan(cfg: &ScanConfig) -> Result<Vec<BifurcationRecord>> {
    cfg.validate()?;
    let rs = cfg.r_values();
    let jobs: Vec<(f64, usize)> = rs.iter().flat_map(|&r| (0..cfg.init_grid.len()).map(move |i| (r, i))).collect();
    let chunks: Vec<Vec<BifurcationRecord>> = jobs
        .par_iter()
        .map(|&(r, i)| {
            let rr = Restitution::new(r).expect("validated range");
            let orbit = run_orbit(&cfg.init_grid[i], rr, cfg.n_iter, cfg.tail);
            orbit
                .tail
                .iter()
                .map(|(k, u)| record(r, i, *k, u, orbit.branches.get(*k).copied()))
                .collect()
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

/// Formats a float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.16e}")
    }
}

/// CSV rows `r,init,iter,theta,phi,w1,w2,branch` with a header line.
pub fn bifurcation_csv(records: &[BifurcationRecord]) -> String {
    let mut s = String::from("r,init,iter,theta,phi,w1,w2,branch\n");
    for rec in records {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            fmt17(rec.r),
            rec.init_index,
            rec.iter_index,
            fmt17(rec.theta),
            fmt17(rec.phi),
            fmt17(rec.w1),
            fmt17(rec.w2),
            rec.branch.map_or("".to_string(), |b| b.to_string())
        ));
    }
    s
}

/// Lexicographically least rotation of a word.
pub fn canonical_rotation(word: &str) -> String {
    let n = word.len();
    let doubled = format!("{word}{word}");
    (0..n.max(1)).map(|i| &doubled[i..i + n]).min().unwrap_or("").to_string()
}

/// `true` when `a` and `b` are rotations of each other.
pub fn same_cycle(a: &str, b: &str) -> bool {
    a.len() == b.len() && canonical_rotation(a) == canonical_rotation(b)
}

/// Smallest period `p ≤ max_period` of the last `3·max_period` letters, with
/// the least rotation of one period.
pub fn detect_period(branches: &[Branch], max_period: usize) -> Option<(usize, String)> {
    if max_period == 0 {
        return None;
    }
    let w = (3 * max_period).min(branches.len());
    let tail = &branches[branches.len() - w..];
    (1..=max_period)
        .find(|&p| 2 * p <= w && (0..w - p).all(|i| tail[i] == tail[i + p]))
        .map(|p| (p, canonical_rotation(&word_string(&tail[w - p..]))))
}

/// Number of clusters among `values`, joining points closer than `tol`.
pub fn count_clusters(values: &[f64], tol: f64) -> usize {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    v.sort_by(f64::total_cmp);
    if v.is_empty() {
        return 0;
    }
    1 + v.windows(2).filter(|p| p[1] - p[0] > tol).count()
}

/// Per-orbit outcome of a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitSummary {
    pub r: f64,
    pub init_index: usize,
    pub period: Option<(usize, String)>,
    /// Distinct values of the chosen observable in the tail.
    pub clusters: usize,
    pub stopped: bool,
}

/// Period and tail clustering for every `(r, init)` pair, in scan order.
pub fn scan_summaries(r_values: &[f64], inits: &[ProjectiveDirection], n_iter: usize, tail: usize, max_period: usize, obs: Observable, tol: f64) -> Vec<OrbitSummary> {
    let jobs: Vec<(f64, usize)> = r_values.iter().flat_map(|&r| (0..inits.len()).map(move |i| (r, i))).collect();
    jobs.par_iter()
        .map(|&(r, i)| {
            let rr = Restitution::new(r).expect("r in (0, 1)");
            let orbit = run_orbit(&inits[i], rr, n_iter, tail);
            let values: Vec<f64> = orbit.tail.iter().map(|(k, u)| record(r, i, *k, u, None).value(obs)).collect();
            OrbitSummary {
                r,
                init_index: i,
                period: if orbit.stopped.is_some() { None } else { detect_period(&orbit.branches, max_period) },
                clusters: count_clusters(&values, tol),
                stopped: orbit.stopped.is_some(),
            }
        })
        .collect()
}

/// `cos β = −(1 − r)²/(4r)`, the rotation angle of `P2` on `{x = z}`.
pub fn cos_beta(r: f64) -> f64 {
    -(1.0 - r).powi(2) / (4.0 * r)
}

/// Restitution coefficient at which `P2` rotates by `2πl/m`:
/// `1 + 2ξ − 2√(ξ + ξ²)` with `ξ = cos(π − 2πl/m)`, for `1/4 ≤ l/m ≤ 3/4`.
pub fn thin_stripe_r(l: u32, m: u32) -> Result<f64> {
    if m == 0 || 4 * l < m || 4 * l > 3 * m {
        return Err(Error::Range(format!("stripe ratio {l}/{m} outside [1/4, 3/4]")));
    }
    // At l/m = 1/4 and 3/4 the cosine rounds to about ±1e-17; clamp so the
    // endpoints give r = 1 rather than NaN.
    let xi = (std::f64::consts::PI - 2.0 * std::f64::consts::PI * l as f64 / m as f64).cos().max(0.0);
    // The two roots of r² − (2 + 4ξ) r + 1 multiply to one; divide by the
    // larger to avoid cancellation.
    Ok(1.0 / (1.0 + 2.0 * xi + 2.0 * (xi + xi * xi).sqrt()))
}

/// `(l, m, r)` for every reduced ratio `l/m ∈ [1/4, 3/4]` with `m ≤ m_max`.
pub fn thin_stripes(m_max: u32) -> Vec<(u32, u32, f64)> {
    let mut out = Vec::new();
    for m in 1..=m_max {
        for l in 0..=m {
            if 4 * l >= m && 4 * l <= 3 * m && num_integer::gcd(l, m) == 1 {
                out.push((l, m, thin_stripe_r(l, m).expect("in range")));
            }
        }
    }
    out
}

/// Largest finite-time Lyapunov exponent of the normalized map.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovEstimate {
    pub lambda_max: f64,
    pub n_steps: usize,
    /// Reference vector projected to make the tangent seed.
    pub seed: &'static str,
    /// First step whose state lies within `1e-12` of a branch boundary.
    pub near_boundary: Option<usize>,
}

fn boundary_distance(u: &ProjectiveDirection, alpha: f64) -> f64 {
    [u.y.abs(), (alpha * u.y - u.x).abs(), (alpha * u.y - u.z).abs()].into_iter().fold(f64::MAX, f64::min)
}

fn tangent_seed(u: &Vec3) -> Result<(Vec3, &'static str)> {
    for (e, name) in [(E_Y, "e_y"), (E_X, "e_x"), (E_Z, "e_z")] {
        let p = sub(&e, &scale(u, dot(&e, u)));
        if norm(&p) > 1e-6 {
            return Ok((normalized(&p), name));
        }
    }
    Err(Error::DegenerateSeed)
}

/// `(1/n) Σ log ‖A_k v_k‖` with `A_k v = (I − u'u'ᵀ) P v / ‖P u‖`.
pub fn lyapunov_max(u0: &ProjectiveDirection, r: Restitution, n: usize) -> Result<LyapunovEstimate> {
    if n == 0 {
        return Err(Error::Range("lyapunov needs n >= 1".into()));
    }
    let mut u = u0.vec();
    let (mut v, seed) = tangent_seed(&u)?;
    let mut sum = 0.0;
    let mut near_boundary = None;
    for k in 0..n {
        let d = ProjectiveDirection::from_vec(u)?;
        if near_boundary.is_none() && boundary_distance(&d, r.alpha()) < 1e-12 {
            near_boundary = Some(k);
        }
        let p: Mat3 = branch_matrix(classify(&d, r)?, r);
        let pu = p.mul_vec(&u);
        let un = norm(&pu);
        let next = scale(&pu, 1.0 / un);
        let pv = scale(&p.mul_vec(&v), 1.0 / un);
        let w = sub(&pv, &scale(&next, dot(&pv, &next)));
        let g = norm(&w);
        if !(g > 0.0) {
            return Err(Error::DegenerateSeed);
        }
        sum += g.ln();
        v = scale(&w, 1.0 / g);
        u = next;
    }
    Ok(LyapunovEstimate {
        lambda_max: sum / n as f64,
        n_steps: n,
        seed,
        near_boundary,
    })
}

/// CSV rows `r,init,n,lambda_max` with a header line.
pub fn lyapunov_csv(rows: &[(f64, usize, LyapunovEstimate)]) -> String {
    let mut s = String::from("r,init,n,lambda_max\n");
    for (r, i, e) in rows {
        s.push_str(&format!("{},{},{},{}\n", fmt17(*r), i, e.n_steps, fmt17(e.lambda_max)));
    }
    s
}

/// Mean rotation per step of a branch-2 orbit, as a fraction of a turn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationEstimate {
    pub rho: f64,
    pub window: usize,
}

/// Rotation number of an orbit that stays in branch 2, measured in the
/// basis `(Re u₂, Im u₂)` of the invariant plane `{x = z}`.
pub fn rotation_number(u0: &ProjectiveDirection, r: Restitution, n: usize) -> Result<RotationEstimate> {
    if r.r() <= 3.0 - 2.0 * 2f64.sqrt() {
        return Err(Error::Range("rotation number needs r > 3 - 2 sqrt 2".into()));
    }
    let es = eigen_p2(r);
    let re: Vec3 = es.eigenvectors[1].map(|c| c.re);
    let im: Vec3 = es.eigenvectors[1].map(|c| c.im);
    let e = [1.0, 0.0, -1.0];
    let det = re[0] * im[1] - re[1] * im[0];
    let angle = |v: &Vec3| {
        // Drop the component along (1, 0, −1), then solve in the (x, y) chart.
        let w = sub(v, &scale(&e, dot(v, &e) / 2.0));
        let c1 = (w[0] * im[1] - w[1] * im[0]) / det;
        let c2 = (re[0] * w[1] - re[1] * w[0]) / det;
        c2.atan2(c1)
    };
    let p2 = branch_matrix(Branch::Two, r);
    let mut v = u0.vec();
    let mut a = angle(&v);
    let mut total = 0.0;
    for k in 0..n {
        let d = ProjectiveDirection::from_vec(v)?;
        if classify(&d, r)? != Branch::Two {
            return Err(Error::RegionExit(k));
        }
        v = normalized(&p2.mul_vec(&v));
        let b = angle(&v);
        let mut da = b - a;
        while da > std::f64::consts::PI {
            da -= 2.0 * std::f64::consts::PI;
        }
        while da <= -std::f64::consts::PI {
            da += 2.0 * std::f64::consts::PI;
        }
        total += da;
        a = b;
    }
    let rho = (total.abs() / (2.0 * std::f64::consts::PI * n as f64)).rem_euclid(1.0);
    Ok(RotationEstimate { rho, window: n })
}

/// `C_N(φ, ψ; n)` for each requested lag.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSeries {
    pub lags: Vec<usize>,
    pub values: Vec<f64>,
}

/// Time correlations along the orbit of `u0`, after `burn_in` discarded steps.
pub fn correlations<F, G>(u0: &ProjectiveDirection, r: Restitution, phi_obs: F, psi_obs: G, n: usize, lags: &[usize], burn_in: usize) -> Result<CorrelationSeries>
where
    F: Fn(&ProjectiveDirection) -> f64,
    G: Fn(&ProjectiveDirection) -> f64,
{
    let max_lag = lags.iter().copied().max().unwrap_or(0);
    if n == 0 || n <= max_lag {
        return Err(Error::Range(format!("N = {n} must exceed the largest lag {max_lag}")));
    }
    let mut u = *u0;
    for _ in 0..burn_in {
        u = step(&u, r)?.next;
    }
    let mut states = Vec::with_capacity(n + max_lag);
    for _ in 0..n + max_lag {
        states.push(u);
        u = step(&u, r)?.next;
    }
    let f: Vec<f64> = states.iter().map(&phi_obs).collect();
    let g: Vec<f64> = states.iter().map(&psi_obs).collect();
    let mean_f = f[..n].iter().sum::<f64>() / n as f64;
    let mean_g = g[..n].iter().sum::<f64>() / n as f64;
    let values = lags
        .iter()
        .map(|&lag| (0..n).map(|k| f[k] * g[k + lag]).sum::<f64>() / n as f64 - mean_f * mean_g)
        .collect();
    Ok(CorrelationSeries {
        lags: lags.to_vec(),
        values,
    })
}

/// Normalized 2-D histogram over the strip chart.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub w1_range: (f64, f64),
    pub w2_range: (f64, f64),
    pub bins: (usize, usize),
    /// Row-major `[w1_bin][w2_bin]` masses summing to one.
    pub mass: Vec<f64>,
}

impl Histogram {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.mass[i * self.bins.1 + j]
    }

    pub fn occupied(&self) -> usize {
        self.mass.iter().filter(|&&m| m > 0.0).count()
    }

    /// CSV rows `w1_bin,w2_bin,mass` for nonzero bins.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("w1_bin,w2_bin,mass\n");
        for i in 0..self.bins.0 {
            for j in 0..self.bins.1 {
                let m = self.at(i, j);
                if m > 0.0 {
                    s.push_str(&format!("{i},{j},{}\n", fmt17(m)));
                }
            }
        }
        s
    }
}

fn bin_index(x: f64, (lo, hi): (f64, f64), n: usize) -> usize {
    let t = ((x - lo) / (hi - lo) * n as f64).floor();
    t.clamp(0.0, (n - 1) as f64) as usize
}

/// Empirical measure of `n` states after `burn_in` discarded steps, on
/// `w1 ∈ [−2, 2]`, `w2 ∈ [−1, 1]` (points outside are clamped to the edge bins).
pub fn empirical_histogram(u0: &ProjectiveDirection, r: Restitution, n: usize, bins: (usize, usize), burn_in: usize) -> Result<Histogram> {
    if bins.0 == 0 || bins.1 == 0 || n == 0 {
        return Err(Error::Range("histogram needs at least one bin per axis and one sample".into()));
    }
    let (w1_range, w2_range) = ((-2.0, 2.0), (-1.0, 1.0));
    let mut counts = vec![0u64; bins.0 * bins.1];
    let mut u = *u0;
    for _ in 0..burn_in {
        u = step(&u, r)?.next;
    }
    for _ in 0..n {
        let (w1, w2) = strip_coords(&u)?;
        counts[bin_index(w1, w1_range, bins.0) * bins.1 + bin_index(w2, w2_range, bins.1)] += 1;
        u = step(&u, r)?.next;
    }
    Ok(Histogram {
        w1_range,
        w2_range,
        bins,
        mass: counts.iter().map(|&c| c as f64 / n as f64).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotations() {
        assert_eq!(canonical_rotation("132312"), "121323");
        assert!(same_cycle("132312", "121323"));
        assert!(!same_cycle("1133", "1313"));
    }

    #[test]
    fn clusters() {
        assert_eq!(count_clusters(&[0.1, 0.1 + 1e-8, 0.5, 0.9], 1e-6), 3);
        assert_eq!(count_clusters(&[], 1e-6), 0);
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.1, 0.2, 11);
        assert_eq!(v[0], 0.1);
        assert_eq!(v[10], 0.2);
    }
}
