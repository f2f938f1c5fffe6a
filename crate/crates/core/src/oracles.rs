//! Independent reference engines for the b-to-b map.
//!
//! * [`defn23_step`] follows the cross-product construction of the map: at
//!   every contact it rebuilds gaps `p = u ∧ e` and velocities `q = p ∧ u`,
//!   decides the next contact from the sign of `q·v`, applies a collision
//!   matrix and recombines `u' = q' ∧ p'`.
//! * [`trig_step`] is the spherical-billiard transcription that extracts two
//!   angles by `arccos` at each contact.
//! * [`particle_next_event`] simulates the four particles directly: free
//!   flight until a gap closes, then the collision law.
//!
//! [`triple_engine_validate`] runs them side by side against [`map_core`].
//!
//! [`map_core`]: crate::map_core

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::linalg::{cross, dot, norm, normalized, scale, sub, Mat3, Vec3, E_X, E_Y, E_Z};
use crate::map_core::{self, collision_matrix, Branch, ProjectiveDirection, Restitution, Symbol};

/// Relative tolerance deciding that two collision times coincide.
pub const SIMULTANEITY_TOL: f64 = 1e-12;

/// Relative gaps `p` and relative velocities `q` of the four particles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleState {
    pub p: Vec3,
    pub q: Vec3,
}

impl ParticleState {
    /// State right after a `b` collision whose plane has normal `u`:
    /// `p = (−z, 0, x)` and `q = (−xy, x² + z², −yz)`, both scaled to unit length.
    pub fn from_direction(u: &ProjectiveDirection) -> Self {
        let (x, y, z) = (u.x, u.y, u.z);
        ParticleState {
            p: normalized(&[-z, 0.0, x]),
            q: normalized(&[-x * y, x * x + z * z, -y * z]),
        }
    }

    /// Normal of the plane `Span[p, q]`, oriented as `q ∧ p`.
    pub fn plane_normal(&self) -> Vec3 {
        cross(&self.q, &self.p)
    }
}

/// Kinetic energy of four unit masses in their centre-of-mass frame,
/// written in relative velocities: `¼ Σ_{i<j} (v_j − v_i)²`.
pub fn relative_kinetic_energy(q: &Vec3) -> f64 {
    let d = [
        q[0],
        q[1],
        q[2],
        q[0] + q[1],
        q[1] + q[2],
        q[0] + q[1] + q[2],
    ];
    d.iter().map(|v| v * v).sum::<f64>() / 4.0
}

/// A collision, possibly the simultaneous pair `{a, c}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionEvent {
    /// Flight time since the previous event, in the rescaled units of the
    /// incoming state.
    pub time: f64,
    /// Sorted, so a simultaneous pair reads `[A, C]`.
    pub symbols: Vec<Symbol>,
}

/// How the velocity vector is re-based after each collision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VelocityGauge {
    /// Keep the physical relative velocities.
    Physical,
    /// Replace `q` by its component orthogonal to `p` after every collision.
    /// The plane `Span[p, q]` is unchanged, so the sequence of planes is the
    /// same, and a further collision always exists.
    Projected,
}

/// Advances the free flight to the next collision and applies the collision law.
///
/// Returns `None` when every gap is opening. Both output vectors are scaled
/// to unit length, which leaves the order of future collisions unchanged.
pub fn particle_next_event(
    s: &ParticleState,
    r: Restitution,
) -> Result<Option<(CollisionEvent, ParticleState)>> {
    let mut times = [f64::INFINITY; 3];
    for i in 0..3 {
        if s.q[i] < 0.0 {
            times[i] = (-s.p[i] / s.q[i]).max(0.0);
        }
    }
    let t_min = times.iter().cloned().fold(f64::INFINITY, f64::min);
    if !t_min.is_finite() {
        return Ok(None);
    }
    let hits: Vec<usize> = (0..3)
        .filter(|&i| times[i].is_finite() && times[i] - t_min <= SIMULTANEITY_TOL * t_min)
        .collect();
    let symbols: Vec<Symbol> = hits.iter().map(|&i| [Symbol::A, Symbol::B, Symbol::C][i]).collect();
    if hits.len() > 1 && hits.contains(&1) {
        let names: String = symbols.iter().map(|s| s.as_char()).collect();
        return Err(Error::TripleCollision(names));
    }

    let mut p = [0.0; 3];
    for i in 0..3 {
        p[i] = (s.p[i] + t_min * s.q[i]).max(0.0);
    }
    let mut k = Mat3::identity();
    for (&i, &sym) in hits.iter().zip(&symbols) {
        p[i] = 0.0;
        k = collision_matrix(sym, r) * k;
    }
    let q = k.mul_vec(&s.q);
    let next = ParticleState {
        p: normalized(&p),
        q: normalized(&q),
    };
    Ok(Some((CollisionEvent { time: t_min, symbols }, next)))
}

/// Flattened collision symbols of a particle run.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolRun {
    pub symbols: Vec<Symbol>,
    /// The particles stopped colliding before `n` symbols were produced.
    pub separated: bool,
}

/// The first `n` collision symbols from `(p0, q0)`, simultaneous `{a, c}`
/// listed as `a` then `c`.
pub fn particle_symbol_run(
    p0: Vec3,
    q0: Vec3,
    n: usize,
    r: Restitution,
    gauge: VelocityGauge,
) -> Result<SymbolRun> {
    let mut state = ParticleState { p: p0, q: q0 };
    let mut symbols = Vec::with_capacity(n);
    while symbols.len() < n {
        match particle_next_event(&state, r)? {
            None => return Ok(SymbolRun { symbols, separated: true }),
            Some((event, next)) => {
                symbols.extend(event.symbols.iter().copied());
                state = apply_gauge(next, gauge);
            }
        }
    }
    symbols.truncate(n);
    Ok(SymbolRun {
        symbols,
        separated: false,
    })
}

fn apply_gauge(s: ParticleState, gauge: VelocityGauge) -> ParticleState {
    match gauge {
        VelocityGauge::Physical => s,
        VelocityGauge::Projected => {
            let q = sub(&s.q, &scale(&s.p, dot(&s.q, &s.p)));
            ParticleState {
                p: s.p,
                q: normalized(&q),
            }
        }
    }
}

/// Letter of the alphabet spelled by the symbols between two `b` collisions.
pub fn branch_of_symbols(symbols: &[Symbol]) -> Option<Branch> {
    match symbols {
        [Symbol::A, Symbol::B] => Some(Branch::One),
        [Symbol::C, Symbol::B] => Some(Branch::Three),
        [Symbol::A, Symbol::C, Symbol::B] | [Symbol::C, Symbol::A, Symbol::B] => Some(Branch::Two),
        _ => None,
    }
}

/// Branch letters of a particle run together with the plane normal seen at
/// each `b` collision.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleLetters {
    pub letters: Vec<Branch>,
    pub normals: Vec<Vec3>,
    pub separated: bool,
    /// A symbol group between two `b` collisions did not spell a letter.
    pub malformed: bool,
}

/// Runs the particle system from the post-`b` state of `u0` for `n` letters.
pub fn particle_letters(
    u0: &ProjectiveDirection,
    r: Restitution,
    n: usize,
    gauge: VelocityGauge,
) -> Result<ParticleLetters> {
    let mut state = ParticleState::from_direction(u0);
    let mut out = ParticleLetters {
        letters: Vec::with_capacity(n),
        normals: Vec::with_capacity(n),
        separated: false,
        malformed: false,
    };
    let mut group: Vec<Symbol> = Vec::new();
    while out.letters.len() < n {
        match particle_next_event(&state, r)? {
            None => {
                out.separated = true;
                break;
            }
            Some((event, next)) => {
                state = apply_gauge(next, gauge);
                group.extend(event.symbols.iter().copied());
                if event.symbols.contains(&Symbol::B) {
                    match branch_of_symbols(&group) {
                        Some(b) => out.letters.push(b),
                        None => {
                            out.malformed = true;
                            break;
                        }
                    }
                    out.normals.push(state.plane_normal());
                    group.clear();
                } else if group.len() > 2 {
                    out.malformed = true;
                    break;
                }
            }
        }
    }
    Ok(out)
}

/// One step of the cross-product construction, from one `b` contact to the next.
///
/// Returns the normalized new normal (orientation as produced by the
/// construction), the letter traversed and its collision symbols. On the
/// measure-zero set `y = 0` the construction degenerates and the branch-2
/// limit is returned.
pub fn defn23_step(u: &Vec3, r: Restitution) -> Result<(Vec3, Branch, Vec<Symbol>)> {
    let mut u = if dot(u, &E_X) < 0.0 { scale(u, -1.0) } else { *u };
    u = normalized(&u);
    let mut contact = Symbol::B;
    let mut symbols = Vec::with_capacity(3);
    loop {
        if symbols.len() >= 3 {
            return Err(Error::NonTermination(3));
        }
        let e = axis(contact);
        let p = cross(&u, &e);
        let q = cross(&p, &u);
        let v = sub(&u, &scale(&e, dot(&u, &e)));
        let qv = dot(&q, &v);
        if qv == 0.0 && contact == Symbol::B && symbols.is_empty() {
            // y = 0: the outer gaps never close and the construction returns
            // the zero vector. Both one-sided limits are the branch-2 image.
            let w = map_core::branch_formula(Branch::Two, &u, r);
            let syms = Branch::Two.symbols(0.0);
            return Ok((normalized(&w), Branch::Two, syms));
        }
        let forward = qv > 0.0;
        let next = match (contact, forward) {
            (Symbol::A, true) => Symbol::B,
            (Symbol::A, false) => Symbol::C,
            (Symbol::B, true) => Symbol::C,
            (Symbol::B, false) => Symbol::A,
            (Symbol::C, true) => Symbol::A,
            (Symbol::C, false) => Symbol::B,
        };
        let p_next = cross(&axis(next), &u);
        let q_next = collision_matrix(next, r).mul_vec(&q);
        u = normalized(&cross(&q_next, &p_next));
        symbols.push(next);
        contact = next;
        if contact == Symbol::B {
            break;
        }
    }
    let branch = branch_of_symbols(&symbols).ok_or(Error::NonTermination(symbols.len()))?;
    Ok((u, branch, symbols))
}

fn axis(s: Symbol) -> Vec3 {
    match s {
        Symbol::A => E_X,
        Symbol::B => E_Y,
        Symbol::C => E_Z,
    }
}

/// Unit position and unit tangent velocity on the sphere, at a contact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalState {
    pub x: Vec3,
    pub v: Vec3,
    pub contact: Symbol,
}

/// Threshold on `|cos θ|` beyond which the angle extraction is flagged.
pub const TRIG_DEGENERACY: f64 = 1e-12;

impl SphericalState {
    /// State at a `b` contact for the plane with normal `u`.
    pub fn from_direction(u: &ProjectiveDirection) -> Self {
        let p = ParticleState::from_direction(u);
        SphericalState {
            x: p.p,
            v: p.q,
            contact: Symbol::B,
        }
    }

    /// Initial state built from the two angles, at a `b` contact.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        SphericalState {
            x: [st, 0.0, ct],
            v: [cp * ct, sp, -cp * st],
            contact: Symbol::B,
        }
    }

    /// Canonical plane normal `V ∧ X`.
    pub fn direction(&self) -> Result<ProjectiveDirection> {
        ProjectiveDirection::from_vec(cross(&self.v, &self.x))
    }
}

/// Result of one trigonometric update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigStep {
    pub state: SphericalState,
    /// `|cos θ|` came within [`TRIG_DEGENERACY`] of 0 or 1, or the extracted
    /// `cos φ` left `[−1, 1]`.
    pub degenerate: bool,
}

/// One collision-to-collision update of the trigonometric algorithm.
pub fn trig_step(s: &SphericalState, r: Restitution) -> TrigStep {
    // At a contact the position has cos θ and sin θ in two coordinates and
    // the velocity is cos φ e_θ + sin φ e_c, with e_c the axis of the closed
    // gap. Both angles come from atan2 so that grazing
    // configurations keep full precision.
    let (ic, io, ia) = match s.contact {
        Symbol::A => (1, 2, 0),
        Symbol::B => (2, 0, 1),
        Symbol::C => (0, 1, 2),
    };
    let theta = s.x[io].abs().atan2(s.x[ic]);
    let (st, ct) = theta.sin_cos();
    let mut e_theta = [0.0; 3];
    e_theta[ic] = -st;
    e_theta[io] = ct;
    let cos_phi_raw = s.v[io] / ct;
    let mut degenerate = ct.abs() >= 1.0 - TRIG_DEGENERACY
        || ct.abs() <= TRIG_DEGENERACY
        || !cos_phi_raw.is_finite()
        || cos_phi_raw.abs() > 1.0 + 1e-9;
    let phi = s.v[ia].abs().atan2(dot(&s.v, &e_theta));
    let (sp, cp) = phi.sin_cos();
    let acute = phi < std::f64::consts::FRAC_PI_2;
    let (x, next) = match (s.contact, acute) {
        (Symbol::A, true) => ([ct * sp, 0.0, cp], Symbol::B),
        (Symbol::A, false) => ([st * sp, -cp, 0.0], Symbol::C),
        (Symbol::B, true) => ([cp, ct * sp, 0.0], Symbol::C),
        (Symbol::B, false) => ([0.0, st * sp, -cp], Symbol::A),
        (Symbol::C, true) => ([0.0, cp, ct * sp], Symbol::A),
        (Symbol::C, false) => ([-cp, 0.0, st * sp], Symbol::B),
    };
    let x = normalized(&x);
    let v = collision_matrix(next, r).mul_vec(&s.v);
    let v = sub(&v, &scale(&x, dot(&v, &x)));
    let vn = norm(&v);
    if !(vn > 0.0) || !vn.is_finite() {
        degenerate = true;
    }
    TrigStep {
        state: SphericalState {
            x,
            v: scale(&v, 1.0 / vn),
            contact: next,
        },
        degenerate,
    }
}

/// Trigonometric run grouped into branch letters.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigLetters {
    pub letters: Vec<Branch>,
    /// States at the `b` contacts that close each letter.
    pub states: Vec<SphericalState>,
    /// Index of the first letter whose updates raised the degeneracy flag.
    pub degenerate_at: Option<usize>,
    pub malformed: bool,
}

pub fn trig_letters(u0: &ProjectiveDirection, r: Restitution, n: usize) -> TrigLetters {
    let mut s = SphericalState::from_direction(u0);
    let mut out = TrigLetters {
        letters: Vec::with_capacity(n),
        states: Vec::with_capacity(n),
        degenerate_at: None,
        malformed: false,
    };
    let mut group = Vec::with_capacity(3);
    while out.letters.len() < n {
        let t = trig_step(&s, r);
        if t.degenerate && out.degenerate_at.is_none() {
            out.degenerate_at = Some(out.letters.len());
        }
        s = t.state;
        group.push(s.contact);
        if s.contact == Symbol::B {
            match branch_of_symbols(&group) {
                Some(b) => out.letters.push(b),
                None => {
                    out.malformed = true;
                    break;
                }
            }
            out.states.push(s);
            group.clear();
        } else if group.len() > 2 {
            out.malformed = true;
            break;
        }
    }
    out
}

/// Branch letters from iterating the cross-product construction.
pub fn defn23_letters(u0: &ProjectiveDirection, r: Restitution, n: usize) -> Result<(Vec<Branch>, Vec<Vec3>)> {
    let mut u = u0.vec();
    let mut letters = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    for _ in 0..n {
        let (next, b, _) = defn23_step(&u, r)?;
        letters.push(b);
        normals.push(next);
        u = next;
    }
    Ok((letters, normals))
}

/// Per-initial-datum outcome of [`triple_engine_validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct InitReport {
    pub init_index: usize,
    /// First letter index where the particle or cross-product engine
    /// disagrees with the map; `None` means full agreement.
    pub first_bad: Option<usize>,
    /// Same for the trigonometric engine over its non-degenerate prefix.
    pub trig_first_bad: Option<usize>,
    /// The trigonometric engine stayed clear of its degeneracy flag.
    pub trig_included: bool,
    /// Largest projective distance between particle planes and map states.
    pub max_plane_deviation: f64,
}

/// Side-by-side run of all engines.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub r: f64,
    pub n_letters: usize,
    pub inits: Vec<InitReport>,
    pub wall_map: Duration,
    pub wall_defn23: Duration,
    pub wall_particle: Duration,
    pub wall_trig: Duration,
}

impl ValidationReport {
    /// Every non-degenerate engine agreed on every initial datum.
    pub fn all_agree(&self) -> bool {
        self.inits
            .iter()
            .all(|i| i.first_bad.is_none() && (!i.trig_included || i.trig_first_bad.is_none()))
    }

    /// `(init_index, first_bad_position)` for every disagreement.
    pub fn mismatches(&self) -> Vec<(usize, usize)> {
        self.inits
            .iter()
            .filter_map(|i| {
                let trig = if i.trig_included { i.trig_first_bad } else { None };
                match (i.first_bad, trig) {
                    (Some(a), Some(b)) => Some((i.init_index, a.min(b))),
                    (Some(a), None) | (None, Some(a)) => Some((i.init_index, a)),
                    (None, None) => None,
                }
            })
            .collect()
    }
}

/// Sine of the angle between two lines.
pub fn projective_distance(a: &Vec3, b: &Vec3) -> f64 {
    let na = norm(a);
    let nb = norm(b);
    norm(&cross(a, b)) / (na * nb)
}

fn first_difference(a: &[Branch], b: &[Branch]) -> Option<usize> {
    let n = a.len().max(b.len());
    (0..n).find(|&i| a.get(i) != b.get(i))
}

/// Compares the map with the cross-product, particle and trigonometric
/// engines on `n_letters` branch letters from each initial datum.
///
/// Branch 2 is compared as a letter, so `acb` and `cab` count as equal.
pub fn triple_engine_validate(
    r: Restitution,
    inits: &[ProjectiveDirection],
    n_letters: usize,
) -> Result<ValidationReport> {
    let mut report = ValidationReport {
        r: r.r(),
        n_letters,
        inits: Vec::with_capacity(inits.len()),
        wall_map: Duration::ZERO,
        wall_defn23: Duration::ZERO,
        wall_particle: Duration::ZERO,
        wall_trig: Duration::ZERO,
    };
    for (idx, u0) in inits.iter().enumerate() {
        let t = Instant::now();
        let orbit = map_core::iterate(u0, r, n_letters)?;
        report.wall_map += t.elapsed();
        let map_letters: Vec<Branch> = orbit.iter().map(|s| s.branch).collect();

        let t = Instant::now();
        let (d_letters, _) = defn23_letters(u0, r, n_letters)?;
        report.wall_defn23 += t.elapsed();

        let t = Instant::now();
        let particle = particle_letters(u0, r, n_letters, VelocityGauge::Projected)?;
        report.wall_particle += t.elapsed();

        let t = Instant::now();
        let trig = trig_letters(u0, r, n_letters);
        report.wall_trig += t.elapsed();

        let mut first_bad = first_difference(&map_letters, &d_letters);
        let pb = first_difference(&map_letters, &particle.letters);
        first_bad = match (first_bad, pb) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let max_plane_deviation = particle
            .normals
            .iter()
            .zip(&orbit)
            .map(|(n, s)| projective_distance(n, &s.next.vec()))
            .fold(0.0, f64::max);

        let trig_included = trig.degenerate_at.is_none() && !trig.malformed;
        let trig_first_bad = first_difference(&map_letters, &trig.letters);

        report.inits.push(InitReport {
            init_index: idx,
            first_bad,
            trig_first_bad,
            trig_included,
            max_plane_deviation,
        });
    }
    Ok(report)
}
