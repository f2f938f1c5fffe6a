//! The piecewise projective linear b-to-b map.
//!
//! A state is the normal `u = (x, y, z)` of the plane spanned by the relative
//! gaps and relative velocities at the moment the central pair collides. One
//! step of the map picks a branch matrix from the signs of `y`, `αy − x` and
//! `αy − z`, applies it, and renormalizes onto the canonical representative.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{norm, scale, Mat3, Vec3};

/// Coefficient of restitution `r ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Restitution {
    r: f64,
}

impl Restitution {
    pub fn new(r: f64) -> Result<Self> {
        if r > 0.0 && r < 1.0 {
            Ok(Restitution { r })
        } else {
            Err(Error::Restitution(r))
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `α = (r + 1) / 2`, recomputed on every call.
    pub fn alpha(&self) -> f64 {
        (self.r + 1.0) / 2.0
    }
}

/// One of the three binary collisions: `a` (pair 1–2), `b` (pair 2–3), `c` (pair 3–4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    A,
    B,
    C,
}

impl Symbol {
    pub fn as_char(self) -> char {
        match self {
            Symbol::A => 'a',
            Symbol::B => 'b',
            Symbol::C => 'c',
        }
    }
}

/// Letter of the `{1, 2, 3}` alphabet: the compound collision between two `b` events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    /// `ab`
    One,
    /// `acb` or `cab`
    Two,
    /// `cb`
    Three,
}

impl Branch {
    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            1 => Ok(Branch::One),
            2 => Ok(Branch::Two),
            3 => Ok(Branch::Three),
            _ => Err(Error::InvalidWord(id.to_string())),
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            '1' => Ok(Branch::One),
            '2' => Ok(Branch::Two),
            '3' => Ok(Branch::Three),
            _ => Err(Error::InvalidWord(c.to_string())),
        }
    }

    pub fn id(self) -> u8 {
        match self {
            Branch::One => 1,
            Branch::Two => 2,
            Branch::Three => 3,
        }
    }

    pub fn as_char(self) -> char {
        (b'0' + self.id()) as char
    }

    /// Letter obtained by exchanging the roles of the outer pairs.
    pub fn mirror(self) -> Self {
        match self {
            Branch::One => Branch::Three,
            Branch::Two => Branch::Two,
            Branch::Three => Branch::One,
        }
    }

    /// Collision symbols produced by this letter; `y` is the entry state's
    /// second component and orders the two outer collisions of branch 2.
    pub fn symbols(self, y: f64) -> Vec<Symbol> {
        match self {
            Branch::One => vec![Symbol::A, Symbol::B],
            Branch::Three => vec![Symbol::C, Symbol::B],
            Branch::Two if y < 0.0 => vec![Symbol::C, Symbol::A, Symbol::B],
            Branch::Two => vec![Symbol::A, Symbol::C, Symbol::B],
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// Renders a branch sequence as a string over `{1, 2, 3}`.
pub fn word_string(branches: &[Branch]) -> String {
    branches.iter().map(|b| b.as_char()).collect()
}

/// Canonical representative of a line of R³.
///
/// The sign is fixed so that `x ≥ 0`, then `z ≤ 0` when `x = 0`, then `y > 0`
/// when `x = z = 0`. Constructors also scale to unit length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectiveDirection {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ProjectiveDirection {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::from_vec([x, y, z])
    }

    pub fn from_vec(v: Vec3) -> Result<Self> {
        let n = norm(&v);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Domain {
                x: v[0],
                y: v[1],
                z: v[2],
                reason: "zero or non-finite vector",
            });
        }
        let v = scale(&v, canonical_sign(&v) / n);
        Ok(ProjectiveDirection {
            x: v[0],
            y: v[1],
            z: v[2],
        })
    }

    pub fn vec(&self) -> Vec3 {
        [self.x, self.y, self.z]
    }

    /// Image under the coordinate-reversing involution, `u ↦ (−z, −y, −x)`,
    /// which exchanges branches 1 and 3.
    pub fn mirror(&self) -> Self {
        Self::from_vec([-self.z, -self.y, -self.x]).expect("mirror of a nonzero vector")
    }
}

/// `+1` or `−1`, whichever makes `s·v` canonical.
pub fn canonical_sign(v: &Vec3) -> f64 {
    let [x, y, z] = *v;
    let positive = if x != 0.0 {
        x > 0.0
    } else if z != 0.0 {
        z < 0.0
    } else {
        y > 0.0
    };
    if positive {
        1.0
    } else {
        -1.0
    }
}

/// Collision matrix `A`, `B` or `C` acting on relative velocities.
pub fn collision_matrix(s: Symbol, r: Restitution) -> Mat3 {
    let (r, a) = (r.r(), r.alpha());
    match s {
        Symbol::A => Mat3::new([[-r, 0.0, 0.0], [a, 1.0, 0.0], [0.0, 0.0, 1.0]]),
        Symbol::B => Mat3::new([[1.0, a, 0.0], [0.0, -r, 0.0], [0.0, a, 1.0]]),
        Symbol::C => Mat3::new([[1.0, 0.0, 0.0], [0.0, 1.0, a], [0.0, 0.0, -r]]),
    }
}

/// Branch matrix `P1`, `P2` or `P3`.
pub fn branch_matrix(b: Branch, r: Restitution) -> Mat3 {
    let (r, a) = (r.r(), r.alpha());
    match b {
        Branch::One => Mat3::new([
            [-r, r * a, 0.0],
            [-a, a * a - r, r * a],
            [0.0, 0.0, r * r],
        ]),
        Branch::Two => Mat3::new([
            [r, -r * a, 0.0],
            [a, -2.0 * a * a + r, a],
            [0.0, -r * a, r],
        ]),
        Branch::Three => Mat3::new([
            [r * r, 0.0, 0.0],
            [r * a, a * a - r, -a],
            [0.0, r * a, -r],
        ]),
    }
}

/// The same three maps written out component by component.
pub fn branch_formula(b: Branch, u: &Vec3, r: Restitution) -> Vec3 {
    let (r, a) = (r.r(), r.alpha());
    let [x, y, z] = *u;
    match b {
        Branch::One => [
            r * (a * y - x),
            a * (a * y - x) - r * y + r * a * z,
            r * r * z,
        ],
        Branch::Two => [
            -r * (a * y - x),
            -a * (a * y - x) - a * (a * y - z) + r * y,
            -r * (a * y - z),
        ],
        Branch::Three => [
            r * r * x,
            a * (a * y - z) - r * y + r * a * x,
            r * (a * y - z),
        ],
    }
}

/// Branch taken from `u`, ties going to branch 2.
pub fn classify(u: &ProjectiveDirection, r: Restitution) -> Result<Branch> {
    classify_vec(&u.vec(), r)
}

/// Same as [`classify`] on a raw vector with `x ≥ 0 ≥ z` orientation.
pub fn classify_vec(u: &Vec3, r: Restitution) -> Result<Branch> {
    let [x, y, z] = *u;
    if (x == 0.0 && y == 0.0 && z == 0.0) || x * z > 0.0 {
        return Err(Error::Domain {
            x,
            y,
            z,
            reason: "zero vector or x·z > 0",
        });
    }
    let a = r.alpha();
    Ok(if y > 0.0 && a * y - x > 0.0 {
        Branch::One
    } else if y < 0.0 && a * y - z < 0.0 {
        Branch::Three
    } else {
        Branch::Two
    })
}

/// Outcome of one application of the map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult {
    pub next: ProjectiveDirection,
    pub branch: Branch,
    /// `‖P_i u‖` before renormalization.
    pub raw_norm: f64,
}

pub fn step(u: &ProjectiveDirection, r: Restitution) -> Result<StepResult> {
    let branch = classify(u, r)?;
    let raw = branch_matrix(branch, r).mul_vec(&u.vec());
    let raw_norm = norm(&raw);
    let next = ProjectiveDirection::from_vec(raw)?;
    Ok(StepResult {
        next,
        branch,
        raw_norm,
    })
}

/// The first `n` steps of the orbit of `u0`.
pub fn iterate(u0: &ProjectiveDirection, r: Restitution, n: usize) -> Result<Vec<StepResult>> {
    let mut out = Vec::with_capacity(n);
    let mut u = *u0;
    for _ in 0..n {
        let s = step(&u, r)?;
        u = s.next;
        out.push(s);
    }
    Ok(out)
}

/// Angle of the normalized gap vector, `θ = atan2(−z, x) ∈ [0, π/2]`.
pub fn theta(u: &ProjectiveDirection) -> Result<f64> {
    if u.x == 0.0 && u.z == 0.0 {
        return Err(Error::UndefinedAngle("theta needs x or z nonzero"));
    }
    Ok((-u.z).atan2(u.x))
}

/// Angle between the relative velocity and the tangent to the gap circle.
///
/// `cos φ = −y·√(x² + z²) / |q|` with `q = (−xy, x² + z², −yz)`, so `φ > π/2`
/// exactly when `y > 0`.
pub fn phi(u: &ProjectiveDirection) -> Result<f64> {
    let (x, y, z) = (u.x, u.y, u.z);
    let s = x * x + z * z;
    if s == 0.0 {
        return Err(Error::UndefinedAngle("phi needs x² + z² > 0"));
    }
    let q = [-x * y, s, -y * z];
    let c = (-y * s.sqrt() / norm(&q)).clamp(-1.0, 1.0);
    Ok(c.acos())
}

/// Affine chart on the plane `x − z = 1`: `(w1, w2) = (y, x + z) / (x − z)`.
pub fn strip_coords(u: &ProjectiveDirection) -> Result<(f64, f64)> {
    let d = u.x - u.z;
    if !(d > 0.0) {
        return Err(Error::StripChart(d));
    }
    Ok((u.y / d, (u.x + u.z) / d))
}

/// Inverse of [`strip_coords`]: the direction through `(x, y, z) = ((1+w2)/2, w1, (w2−1)/2)`.
pub fn from_strip(w1: f64, w2: f64) -> Result<ProjectiveDirection> {
    ProjectiveDirection::new((1.0 + w2) / 2.0, w1, (w2 - 1.0) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rr(r: f64) -> Restitution {
        Restitution::new(r).unwrap()
    }

    fn assert_vec_close(a: Vec3, b: Vec3, tol: f64) {
        for i in 0..3 {
            assert!((a[i] - b[i]).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn restitution_rejects_endpoints() {
        assert!(Restitution::new(0.0).is_err());
        assert!(Restitution::new(1.0).is_err());
        assert!(Restitution::new(f64::NAN).is_err());
        assert_eq!(rr(0.2).alpha(), 0.6);
    }

    #[test]
    fn p2_keeps_the_symmetric_direction() {
        for r in [0.05, 0.3, 0.9] {
            let m = branch_matrix(Branch::Two, rr(r));
            assert_vec_close(m.mul_vec(&[1.0, 0.0, -1.0]), [r, 0.0, -r], 1e-15);
        }
    }

    #[test]
    fn branch_determinants() {
        assert_relative_eq!(branch_matrix(Branch::One, rr(1.0 / 3.0)).det(), 1.0 / 81.0, epsilon = 1e-15);
        assert_relative_eq!(branch_matrix(Branch::Two, rr(0.5)).det(), 0.125, epsilon = 1e-15);
    }

    #[test]
    fn collision_matrix_rows() {
        let a = collision_matrix(Symbol::A, rr(0.3));
        assert_eq!(a.row(0), [-0.3, 0.0, 0.0]);
        let (a, c) = (a, collision_matrix(Symbol::C, rr(0.3)));
        assert_eq!(a * c, c * a);
    }

    #[test]
    fn branch_determinants_are_powers_of_r() {
        let r = rr(0.4);
        let det_ba = (collision_matrix(Symbol::B, r) * collision_matrix(Symbol::A, r)).det();
        assert_relative_eq!(det_ba, 0.16, epsilon = 1e-15);
        assert_relative_eq!(branch_matrix(Branch::One, r).det(), 0.4f64.powi(4), epsilon = 1e-15);
        assert_relative_eq!(branch_matrix(Branch::Two, r).det(), 0.4f64.powi(3), epsilon = 1e-15);
        assert_relative_eq!(branch_matrix(Branch::Three, r).det(), 0.4f64.powi(4), epsilon = 1e-15);
    }

    #[test]
    fn p3_is_p1_conjugated_by_the_flip() {
        let r = rr(0.37);
        let j = Mat3::flip();
        let conj = j * branch_matrix(Branch::One, r) * j;
        assert!(conj.max_abs_diff(&branch_matrix(Branch::Three, r)) < 1e-16);
    }

    #[test]
    fn classify_examples() {
        let r = rr(0.2);
        let c = |x, y, z| classify(&ProjectiveDirection::new(x, y, z).unwrap(), r).unwrap();
        assert_eq!(c(0.1, 1.0, -1.0), Branch::One);
        assert_eq!(c(1.0, 1.0, -1.0), Branch::Two);
        assert_eq!(c(1.0, -1.0, -0.1), Branch::Three);
        assert_eq!(c(1.0, 0.0, -1.0), Branch::Two);
        assert_eq!(c(0.6, 1.0, -1.0), Branch::Two);
        assert!(classify_vec(&[1.0, 0.0, 1.0], r).is_err());
        assert!(classify_vec(&[0.0, 0.0, 0.0], r).is_err());
    }

    #[test]
    fn step_examples() {
        let r = rr(0.2);
        let u = ProjectiveDirection::new(0.1, 1.0, -1.0).unwrap();
        let s = step(&u, r).unwrap();
        assert_eq!(s.branch, Branch::One);
        let expect = ProjectiveDirection::new(0.1, -0.02, -0.04).unwrap();
        assert_vec_close(s.next.vec(), expect.vec(), 1e-14);

        let u = ProjectiveDirection::new(1.0, 1.0, -1.0).unwrap();
        let s = step(&u, r).unwrap();
        assert_eq!(s.branch, Branch::Two);
        let expect = ProjectiveDirection::new(0.08, -0.52, -0.32).unwrap();
        assert_vec_close(s.next.vec(), expect.vec(), 1e-14);

        let u = ProjectiveDirection::new(1.0, 0.0, -1.0).unwrap();
        let s = step(&u, rr(0.63)).unwrap();
        assert_vec_close(s.next.vec(), u.vec(), 1e-15);
        assert_relative_eq!(s.raw_norm, 0.63, epsilon = 1e-12);
    }

    #[test]
    fn iterate_zero_steps_is_empty() {
        let u = ProjectiveDirection::new(1.0, -1.0, -1.0).unwrap();
        assert!(iterate(&u, rr(0.3), 0).unwrap().is_empty());
    }

    #[test]
    fn canonical_sign_rule() {
        let u = ProjectiveDirection::new(-1.0, 2.0, 1.0).unwrap();
        assert!(u.x > 0.0 && u.z < 0.0);
        let u = ProjectiveDirection::new(0.0, 1.0, 2.0).unwrap();
        assert_eq!(u.x, 0.0);
        assert!(u.z < 0.0);
        let u = ProjectiveDirection::new(0.0, -3.0, 0.0).unwrap();
        assert_eq!(u.vec(), [0.0, 1.0, 0.0]);
    }

    #[test]
    fn angle_examples() {
        let d = |x, y, z| ProjectiveDirection::new(x, y, z).unwrap();
        assert_relative_eq!(theta(&d(1.0, 0.0, -1.0)).unwrap(), std::f64::consts::FRAC_PI_4);
        assert_eq!(theta(&d(1.0, 5.0, 0.0)).unwrap(), 0.0);
        assert_relative_eq!(theta(&d(0.0, 5.0, -1.0)).unwrap(), std::f64::consts::FRAC_PI_2);
        assert!(theta(&d(0.0, 1.0, 0.0)).is_err());

        assert_relative_eq!(phi(&d(1.0, 0.0, -1.0)).unwrap(), std::f64::consts::FRAC_PI_2);
        let p = phi(&d(1.0, 1.0, -1.0)).unwrap();
        assert_relative_eq!(p, (-1.0 / 3f64.sqrt()).acos(), epsilon = 1e-15);
        assert!(p > std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn strip_examples() {
        let d = |x, y, z| ProjectiveDirection::new(x, y, z).unwrap();
        let (w1, w2) = strip_coords(&d(1.0, 0.0, -1.0)).unwrap();
        assert_eq!((w1, w2), (0.0, 0.0));
        let (w1, w2) = strip_coords(&d(1.0, 1.0, -1.0)).unwrap();
        assert_relative_eq!(w1, 0.5);
        assert_eq!(w2, 0.0);
        assert!(strip_coords(&d(0.0, 1.0, 0.0)).is_err());
        let u = from_strip(0.3, -0.4).unwrap();
        let (w1, w2) = strip_coords(&u).unwrap();
        assert_relative_eq!(w1, 0.3, epsilon = 1e-15);
        assert_relative_eq!(w2, -0.4, epsilon = 1e-15);
    }

    #[test]
    fn branch_symbol_expansion() {
        assert_eq!(Branch::One.symbols(1.0), vec![Symbol::A, Symbol::B]);
        assert_eq!(Branch::Three.symbols(-1.0), vec![Symbol::C, Symbol::B]);
        assert_eq!(Branch::Two.symbols(1.0), vec![Symbol::A, Symbol::C, Symbol::B]);
        assert_eq!(Branch::Two.symbols(-1.0), vec![Symbol::C, Symbol::A, Symbol::B]);
    }
}
