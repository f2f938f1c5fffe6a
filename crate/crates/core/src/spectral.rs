//! Eigen-analysis of the branch matrices and stability certificates for
//! periodic collision words.
//!
//! A word `w = l₁ l₂ … l_k` is realized by a periodic orbit when some real
//! eigenvector of `P_{l_k} ⋯ P_{l₁}` passes through the branch regions in the
//! order of the word, each region test holding strictly. When the word is
//! `h ++ mirror(h)` the full matrix equals `(J·W(h))²`, so the reduced matrix
//! `J·W(h)` carries the same eigenvectors.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::exact::{isolate_roots, refine_root, DyadicInterval, IsolatedRoot, RationalPoly};
use crate::linalg::Mat3;
use crate::map_core::{branch_matrix, word_string, Branch, ProjectiveDirection, Restitution};
use crate::{Error, Result};

type C = Complex64;
pub type CVec3 = [C; 3];

/// Relative gap below which the two largest moduli count as tied.
pub const DOMINANCE_TOL: f64 = 1e-12;

/// Monic cubic `λ³ + c2 λ² + c1 λ + c0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cubic {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl Cubic {
    pub fn eval(&self, x: C) -> C {
        ((x + self.c2) * x + self.c1) * x + self.c0
    }

    fn deriv(&self, x: C) -> C {
        (x * 3.0 + 2.0 * self.c2) * x + self.c1
    }

    /// `18abcd − 4b³d + b²c² − 4ac³ − 27a²d²` with `a = 1`.
    pub fn discriminant(&self) -> f64 {
        let (b, c, d) = (self.c2, self.c1, self.c0);
        18.0 * b * c * d - 4.0 * b.powi(3) * d + b * b * c * c - 4.0 * c.powi(3) - 27.0 * d * d
    }

    /// All three roots: one real root in closed form (trigonometric or
    /// Cardano), the remaining quadratic by deflation, then Newton polishing.
    pub fn roots(&self) -> [C; 3] {
        let (b, c, d) = (self.c2, self.c1, self.c0);
        let shift = b / 3.0;
        let p = c - b * b / 3.0;
        let q = 2.0 * b.powi(3) / 27.0 - b * c / 3.0 + d;
        let t = if p < 0.0 && 4.0 * p.powi(3) + 27.0 * q * q < 0.0 {
            // Three real roots: take the one of largest magnitude.
            let m = 2.0 * (-p / 3.0).sqrt();
            let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
            let th = arg.acos() / 3.0;
            let cands = [0.0, 1.0, 2.0].map(|k: f64| m * (th - 2.0 * std::f64::consts::PI * k / 3.0).cos());
            cands.into_iter().fold(0.0, |acc: f64, x| if (x - shift).abs() > (acc - shift).abs() { x } else { acc })
        } else {
            let disc = (q * q / 4.0 + p.powi(3) / 27.0).max(0.0).sqrt();
            (-q / 2.0 + disc).cbrt() + (-q / 2.0 - disc).cbrt()
        };
        let x0 = self.polish_real(t - shift);
        // (λ − x0)(λ² + bb λ + cc)
        let bb = b + x0;
        let cc = c + x0 * bb;
        let qd = bb * bb - 4.0 * cc;
        let (r1, r2) = if qd >= 0.0 {
            let s = qd.sqrt();
            let big = -0.5 * (bb + bb.signum() * s);
            if big == 0.0 {
                (C::new(0.0, 0.0), C::new(0.0, 0.0))
            } else {
                (C::new(big, 0.0), C::new(cc / big, 0.0))
            }
        } else {
            let s = (-qd).sqrt();
            (C::new(-bb / 2.0, -s / 2.0), C::new(-bb / 2.0, s / 2.0))
        };
        [C::new(x0, 0.0), self.polish(r1), self.polish(r2)]
    }

    fn polish_real(&self, x: f64) -> f64 {
        let mut x = x;
        for _ in 0..3 {
            let f = ((x + self.c2) * x + self.c1) * x + self.c0;
            let df = (3.0 * x + 2.0 * self.c2) * x + self.c1;
            if df == 0.0 {
                break;
            }
            let nx = x - f / df;
            if !nx.is_finite() || (self.eval(C::new(nx, 0.0)).norm() >= f.abs()) {
                break;
            }
            x = nx;
        }
        x
    }

    fn polish(&self, z: C) -> C {
        let mut z = z;
        for _ in 0..2 {
            let f = self.eval(z);
            let df = self.deriv(z);
            if df.norm() == 0.0 {
                break;
            }
            let nz = z - f / df;
            if !nz.is_finite() || self.eval(nz).norm() >= f.norm() {
                break;
            }
            // Keep real roots real.
            z = if z.im == 0.0 { C::new(nz.re, 0.0) } else { nz };
        }
        z
    }
}

/// `λ³ − tr(M) λ² + (Σ principal 2-minors) λ − det(M)`.
pub fn char_poly(m: &Mat3) -> Cubic {
    Cubic {
        c2: -m.trace(),
        c1: m.minor_sum(),
        c0: -m.det(),
    }
}

/// Eigenvalues with matched eigenvectors and the index of the strictly
/// dominant modulus, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub eigenvalues: [C; 3],
    pub eigenvectors: [CVec3; 3],
    pub dominant_index: Option<usize>,
}

impl EigenSystem {
    fn build(eigenvalues: [C; 3], eigenvectors: [CVec3; 3]) -> Self {
        let eigenvectors = eigenvectors.map(|v| scale_convention(&v));
        EigenSystem {
            dominant_index: dominant(&eigenvalues),
            eigenvalues,
            eigenvectors,
        }
    }

    /// Largest `‖Mv − λv‖ / (‖M‖·‖v‖)` over the three pairs.
    pub fn max_residual(&self, m: &Mat3) -> f64 {
        let mn = m.frobenius();
        (0..3)
            .map(|i| {
                let v = &self.eigenvectors[i];
                let mv = cmul(m, v);
                let res: f64 = (0..3).map(|k| (mv[k] - self.eigenvalues[i] * v[k]).norm_sqr()).sum::<f64>().sqrt();
                res / (mn * cnorm(v))
            })
            .fold(0.0, f64::max)
    }

    /// `true` when eigenvalue `i` is real up to a relative `1e-9`.
    pub fn is_real(&self, i: usize) -> bool {
        let l = self.eigenvalues[i];
        l.im.abs() <= 1e-9 * l.norm().max(f64::MIN_POSITIVE)
    }

    /// Real part of eigenvector `i`.
    pub fn real_vector(&self, i: usize) -> [f64; 3] {
        self.eigenvectors[i].map(|c| c.re)
    }
}

fn dominant(l: &[C; 3]) -> Option<usize> {
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| l[b].norm().total_cmp(&l[a].norm()));
    let (m0, m1) = (l[idx[0]].norm(), l[idx[1]].norm());
    if m0 == 0.0 || (m0 - m1) <= DOMINANCE_TOL * m0 {
        None
    } else {
        Some(idx[0])
    }
}

/// Scales so that `x = 1` when `|x| > 1e-9`, otherwise `y = 1`.
fn scale_convention(v: &CVec3) -> CVec3 {
    let n = cnorm(v);
    let unit = v.map(|c| c / n);
    let pivot = if unit[0].norm() > 1e-9 {
        unit[0]
    } else if unit[1].norm() > 1e-9 {
        unit[1]
    } else {
        unit[2]
    };
    unit.map(|c| c / pivot)
}

fn cnorm(v: &CVec3) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn cmul(m: &Mat3, v: &CVec3) -> CVec3 {
    std::array::from_fn(|i| v[0] * m.m[i][0] + v[1] * m.m[i][1] + v[2] * m.m[i][2])
}

fn ccross(a: &CVec3, b: &CVec3) -> CVec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Kernel direction of `M − λI` from the largest cross product of two rows.
fn eigenvector_for(m: &Mat3, lambda: C) -> CVec3 {
    let rows: [CVec3; 3] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let d = if i == j { lambda } else { C::zero() };
            C::new(m.m[i][j], 0.0) - d
        })
    });
    let cands = [ccross(&rows[0], &rows[1]), ccross(&rows[0], &rows[2]), ccross(&rows[1], &rows[2])];
    let best = cands.iter().copied().max_by(|a, b| cnorm(a).total_cmp(&cnorm(b))).unwrap();
    if cnorm(&best) > 0.0 {
        return best;
    }
    // λI − M has rank ≤ 1: any vector orthogonal to a nonzero row works.
    let row = rows.iter().copied().max_by(|a, b| cnorm(a).total_cmp(&cnorm(b))).unwrap();
    if cnorm(&row) == 0.0 {
        return [C::one(), C::zero(), C::zero()];
    }
    let e = if row[0].norm() < 0.5 * cnorm(&row) {
        [C::one(), C::zero(), C::zero()]
    } else {
        [C::zero(), C::one(), C::zero()]
    };
    ccross(&row, &e)
}

/// Numeric eigen-decomposition through the characteristic cubic.
pub fn eigen_numeric(m: &Mat3) -> EigenSystem {
    let l = char_poly(m).roots();
    let v = l.map(|x| eigenvector_for(m, x));
    EigenSystem::build(l, v)
}

fn csqrt(x: f64) -> C {
    C::new(x, 0.0).sqrt()
}

/// Closed-form eigen-elements of `P1`: `r²` with `(α, r+1, 3α)`, and
/// `(α² − 2r ∓ α√(α² − 4r))/2` with `(2r, α ∓ √(α² − 4r), 0)`.
pub fn eigen_p1(r: Restitution) -> EigenSystem {
    let (rr, a) = (r.r(), r.alpha());
    let s = csqrt(a * a - 4.0 * rr);
    let base = C::new(a * a - 2.0 * rr, 0.0);
    let l = [C::new(rr * rr, 0.0), (base - s * a) / 2.0, (base + s * a) / 2.0];
    let two_r = C::new(2.0 * rr, 0.0);
    let v = [
        [C::new(a, 0.0), C::new(rr + 1.0, 0.0), C::new(3.0 * a, 0.0)],
        [two_r, C::new(a, 0.0) - s, C::zero()],
        [two_r, C::new(a, 0.0) + s, C::zero()],
    ];
    EigenSystem::build(l, v)
}

/// Closed-form eigen-elements of `P2`: `r` with `(1, 0, −1)`, and
/// `r − α² ± α√(α² − 2r)` with `(r, α ∓ √(α² − 2r), r)`.
pub fn eigen_p2(r: Restitution) -> EigenSystem {
    let (rr, a) = (r.r(), r.alpha());
    let s = csqrt(a * a - 2.0 * rr);
    let base = C::new(rr - a * a, 0.0);
    let l = [C::new(rr, 0.0), base + s * a, base - s * a];
    let cr = C::new(rr, 0.0);
    let v = [
        [C::one(), C::zero(), -C::one()],
        [cr, C::new(a, 0.0) - s, cr],
        [cr, C::new(a, 0.0) + s, cr],
    ];
    EigenSystem::build(l, v)
}

/// `P3 = J P1 J`: the eigenvalues of `P1` with coordinate-reversed vectors.
pub fn eigen_p3(r: Restitution) -> EigenSystem {
    let e = eigen_p1(r);
    let v = e.eigenvectors.map(|v| [v[2], v[1], v[0]]);
    EigenSystem::build(e.eigenvalues, v)
}

/// Discriminant of the quadratic factor of `χ_{P1}`, `(r+1)²(r² − 14r + 1)/16`.
pub fn discriminant_p1() -> RationalPoly {
    let sq = RationalPoly::from_i64(&[1, 1]).pow(2);
    (&sq * &RationalPoly::from_i64(&[1, -14, 1])).scale(&BigRational::new(1.into(), 16.into()))
}

/// Discriminant of the quadratic factor of `χ_{P2}`, `(r+1)²(r² − 6r + 1)/4`.
pub fn discriminant_p2() -> RationalPoly {
    let sq = RationalPoly::from_i64(&[1, 1]).pow(2);
    (&sq * &RationalPoly::from_i64(&[1, -6, 1])).scale(&BigRational::new(1.into(), 4.into()))
}

/// Isolating intervals of width `≤ 2^-bits` for the sign changes of a
/// discriminant on `(0, 1)`.
pub fn regime_switches(disc: &RationalPoly, bits: u64) -> Vec<(BigRational, BigRational)> {
    let p = disc.primitive_integer();
    let unit = DyadicInterval {
        lo: BigInt::zero(),
        hi: BigInt::one(),
        k: 0,
    };
    let (roots, _) = isolate_roots(&p, &unit, bits);
    roots
        .iter()
        .map(|root| match root {
            IsolatedRoot::Exact { num, k } => {
                let q = BigRational::new(num.clone(), BigInt::one() << *k as usize);
                (q.clone(), q)
            }
            IsolatedRoot::Interval(iv) => match refine_root(&p, iv, bits) {
                IsolatedRoot::Exact { num, k } => {
                    let q = BigRational::new(num, BigInt::one() << k as usize);
                    (q.clone(), q)
                }
                IsolatedRoot::Interval(iv) => (iv.lo_rational(), iv.hi_rational()),
            },
        })
        .collect()
}

/// A nonempty word over `{1, 2, 3}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PatternWord {
    letters: Vec<Branch>,
    palindromic_half: Option<Vec<Branch>>,
}

impl PatternWord {
    pub fn new(letters: Vec<Branch>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidWord(String::new()));
        }
        let k = letters.len();
        let palindromic_half = (k % 2 == 0 && letters[..k / 2].iter().zip(&letters[k / 2..]).all(|(a, b)| a.mirror() == *b))
            .then(|| letters[..k / 2].to_vec());
        Ok(PatternWord {
            letters,
            palindromic_half,
        })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(Branch::from_char)
            .collect::<Result<Vec<_>>>()
            .map_err(|_| Error::InvalidWord(s.to_string()))?;
        Self::new(letters)
    }

    pub fn letters(&self) -> &[Branch] {
        &self.letters
    }

    /// The prefix `h` with `letters = h ++ mirror(h)`, when it exists.
    pub fn palindromic_half(&self) -> Option<&[Branch]> {
        self.palindromic_half.as_deref()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Letter-wise mirror (`1 ↔ 3`, `2` fixed).
    pub fn mirror(&self) -> PatternWord {
        PatternWord::new(self.letters.iter().map(|b| b.mirror()).collect()).expect("nonempty")
    }

    /// Number of collision symbols in one period (`1`, `3` → 2; `2` → 3).
    pub fn symbol_length(&self) -> usize {
        self.letters.iter().map(|b| if *b == Branch::Two { 3 } else { 2 }).sum()
    }
}

impl fmt::Display for PatternWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", word_string(&self.letters))
    }
}

/// Members of the three observed families: `1 → 132ⁿ`, `2 → 132ⁿ312ⁿ`,
/// `3 → 131312ⁿ313132ⁿ`.
pub fn family_word(family: u8, n: usize) -> Result<PatternWord> {
    if n == 0 {
        return Err(Error::Range("family exponent must be at least 1".into()));
    }
    let twos = "2".repeat(n);
    let s = match family {
        1 => format!("13{twos}"),
        2 => format!("13{twos}31{twos}"),
        3 => format!("13131{twos}31313{twos}"),
        _ => return Err(Error::Range(format!("unknown family {family}"))),
    };
    PatternWord::parse(&s)
}

/// `P_{l_k} ⋯ P_{l_1}`: the last letter's matrix acts last.
pub fn word_matrix(letters: &[Branch], r: Restitution) -> Mat3 {
    letters.iter().fold(Mat3::identity(), |acc, b| branch_matrix(*b, r) * acc)
}

/// `J · W(half)`.
pub fn reduced_matrix(half: &[Branch], r: Restitution) -> Mat3 {
    Mat3::flip() * word_matrix(half, r)
}

/// Exact 3×3 rational matrix.
pub type ExactMat3 = [[BigRational; 3]; 3];

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn exact_branch_matrix(b: Branch, r: &BigRational) -> ExactMat3 {
    let a = (r + q(1)) / q(2);
    let z = q(0);
    match b {
        Branch::One => [
            [-r.clone(), r * &a, z.clone()],
            [-a.clone(), &a * &a - r, r * &a],
            [z.clone(), z, r * r],
        ],
        Branch::Two => [
            [r.clone(), -(r * &a), z.clone()],
            [a.clone(), -(q(2) * &a * &a) + r, a.clone()],
            [z, -(r * &a), r.clone()],
        ],
        Branch::Three => [
            [r * r, z.clone(), z.clone()],
            [r * &a, &a * &a - r, -a.clone()],
            [z, r * &a, -r.clone()],
        ],
    }
}

fn exact_mul(x: &ExactMat3, y: &ExactMat3) -> ExactMat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).fold(q(0), |acc, k| acc + &x[i][k] * &y[k][j])))
}

fn exact_identity() -> ExactMat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { q(1) } else { q(0) }))
}

pub fn exact_word_matrix(letters: &[Branch], r: &BigRational) -> ExactMat3 {
    letters.iter().fold(exact_identity(), |acc, b| exact_mul(&exact_branch_matrix(*b, r), &acc))
}

pub fn exact_reduced_matrix(half: &[Branch], r: &BigRational) -> ExactMat3 {
    let w = exact_word_matrix(half, r);
    [w[2].clone(), w[1].clone(), w[0].clone()]
}

/// Exact `(c2, c1, c0)` of `λ³ + c2 λ² + c1 λ + c0 = det(λI − M)`.
pub fn exact_char_poly(m: &ExactMat3) -> [BigRational; 3] {
    let tr = &m[0][0] + &m[1][1] + &m[2][2];
    let minor = |i: usize, j: usize| &m[i][i] * &m[j][j] - &m[i][j] * &m[j][i];
    let minors = minor(0, 1) + minor(0, 2) + minor(1, 2);
    let det = &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]) - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0]);
    [-tr, minors, -det]
}

/// Outcome of walking a word from a starting direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Pass,
    /// 1-based step and the violated strict inequality.
    Fail { step: usize, inequality: &'static str },
}

fn first_violation(v: &[f64; 3], letter: Branch, alpha: f64) -> Option<&'static str> {
    let [x, y, z] = *v;
    if !(x > 0.0) {
        return Some("x > 0");
    }
    if !(z < 0.0) {
        return Some("z < 0");
    }
    match letter {
        Branch::One => {
            if !(y > 0.0) {
                Some("y > 0")
            } else if !(alpha * y - x > 0.0) {
                Some("alpha*y - x > 0")
            } else {
                None
            }
        }
        Branch::Three => {
            if !(y < 0.0) {
                Some("y < 0")
            } else if !(alpha * y - z < 0.0) {
                Some("alpha*y - z < 0")
            } else {
                None
            }
        }
        Branch::Two => {
            if !(y < 0.0 || alpha * y - x < 0.0) {
                Some("y < 0 or alpha*y - x < 0")
            } else if !(y > 0.0 || alpha * y - z > 0.0) {
                Some("y > 0 or alpha*y - z > 0")
            } else {
                None
            }
        }
    }
}

fn walk(letters: &[Branch], u: &[f64; 3], r: Restitution) -> Feasibility {
    let mut v = match ProjectiveDirection::from_vec(*u) {
        Ok(d) => d.vec(),
        Err(_) => return Feasibility::Fail { step: 1, inequality: "x > 0" },
    };
    for (i, b) in letters.iter().enumerate() {
        if let Some(inequality) = first_violation(&v, *b, r.alpha()) {
            return Feasibility::Fail { step: i + 1, inequality };
        }
        let next = branch_matrix(*b, r).mul_vec(&v);
        v = match ProjectiveDirection::from_vec(next) {
            Ok(d) => d.vec(),
            Err(_) => return Feasibility::Fail { step: i + 2, inequality: "x > 0" },
        };
    }
    Feasibility::Pass
}

/// Checks that the orbit of `u` follows the word with every region
/// inequality strict. `u` is taken up to sign.
pub fn feasibility_check(w: &PatternWord, u: &[f64; 3], r: Restitution) -> Feasibility {
    walk(w.letters(), u, r)
}

/// The same check on the first half only, valid for `h ++ mirror(h)` words
/// started on an eigenvector of `J·W(h)`.
pub fn feasibility_check_half(w: &PatternWord, u: &[f64; 3], r: Restitution) -> Option<Feasibility> {
    w.palindromic_half().map(|h| walk(h, u, r))
}

/// Existence and stability of a periodic orbit with the given word.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicOrbitCertificate {
    pub word: PatternWord,
    pub r: f64,
    pub exists: bool,
    pub stable: bool,
    /// Set when the two largest moduli tie, so stability is not decided.
    pub undecided: bool,
    pub direction: Option<ProjectiveDirection>,
    /// Eigenvalue of the full-period matrix on the realizing direction.
    pub multiplier: Option<C>,
    /// First violated inequality of the dominant eigenvector, if it fails.
    pub failed_inequality: Option<(usize, &'static str)>,
}

/// Tries every real eigenvector of the (reduced when possible) word matrix.
pub fn certify_pattern(w: &PatternWord, r: Restitution) -> PeriodicOrbitCertificate {
    let (m, reduced) = match w.palindromic_half() {
        Some(h) => (reduced_matrix(h, r), true),
        None => (word_matrix(w.letters(), r), false),
    };
    let es = eigen_numeric(&m);
    let mut cert = PeriodicOrbitCertificate {
        word: w.clone(),
        r: r.r(),
        exists: false,
        stable: false,
        undecided: false,
        direction: None,
        multiplier: None,
        failed_inequality: None,
    };
    // Dominant candidate first so that a stable orbit is preferred.
    let mut order: Vec<usize> = (0..3).collect();
    if let Some(d) = es.dominant_index {
        order.retain(|&i| i != d);
        order.insert(0, d);
    }
    for i in order {
        if !es.is_real(i) {
            continue;
        }
        let v = es.real_vector(i);
        match feasibility_check(w, &v, r) {
            Feasibility::Pass => {
                if cert.exists {
                    continue;
                }
                let lambda = es.eigenvalues[i];
                cert.exists = true;
                cert.direction = ProjectiveDirection::from_vec(v).ok();
                cert.multiplier = Some(if reduced { lambda * lambda } else { lambda });
                match es.dominant_index {
                    Some(d) => cert.stable = d == i,
                    None => cert.undecided = true,
                }
            }
            Feasibility::Fail { step, inequality } => {
                if Some(i) == es.dominant_index {
                    cert.failed_inequality = Some((step, inequality));
                }
            }
        }
    }
    cert
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let (mut fa, fb) = (f(a), f(b));
    if !(fa * fb < 0.0) {
        return Err(Error::Bracket { a, b });
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

fn restitution_or_nan(r: f64) -> Option<Restitution> {
    Restitution::new(r).ok()
}

/// `α u_y − u_x` on the dominant eigenvector of `J P2 P3 P1`, with `u_x = 1`.
pub fn g_132(r: f64) -> f64 {
    let Some(rr) = restitution_or_nan(r) else { return f64::NAN };
    let half = PatternWord::parse("132").expect("valid").letters().to_vec();
    let es = eigen_numeric(&reduced_matrix(&half, rr));
    let Some(d) = es.dominant_index else { return f64::NAN };
    let u = es.real_vector(d);
    rr.alpha() * u[1] / u[0] - 1.0
}

/// Lower end of the stability range of `132312`: the root of [`g_132`] in
/// `(0.19, 0.25)`.
pub fn critical_r_132(tolerance: f64) -> Result<f64> {
    if !(tolerance > 0.0) {
        return Err(Error::Range("tolerance must be positive".into()));
    }
    bisect(g_132, 0.19, 0.25, tolerance)
}

/// Eigenvector of `J P2 P2 P3 P1` for its negative real eigenvalue, scaled to
/// `u_x = 1`.
pub fn eigvec_1322_negative(r: f64) -> Option<[f64; 3]> {
    let rr = restitution_or_nan(r)?;
    let half = PatternWord::parse("1322").expect("valid").letters().to_vec();
    let es = eigen_numeric(&reduced_matrix(&half, rr));
    let i = (0..3).filter(|&i| es.is_real(i) && es.eigenvalues[i].re < 0.0).min_by(|&a, &b| {
        es.eigenvalues[a].re.total_cmp(&es.eigenvalues[b].re)
    })?;
    let u = es.real_vector(i);
    Some([1.0, u[1] / u[0], u[2] / u[0]])
}

/// Roots of `u_z` and of `α u_y − u_x` for the negative real eigenvector of
/// `J P2 P2 P3 P1` on `(0.1603, 0.2363)`, where that eigenvalue dominates and
/// `u_x ≠ 0`. Both equal `3 − 2√2`, which rules out a stable `13223122`.
pub fn boundary_roots_1322(tolerance: f64) -> Result<(f64, f64)> {
    let (a, b) = (0.1603, 0.2363);
    let uz = |r: f64| eigvec_1322_negative(r).map_or(f64::NAN, |u| u[2]);
    let g = |r: f64| eigvec_1322_negative(r).map_or(f64::NAN, |u| (r + 1.0) / 2.0 * u[1] - u[0]);
    Ok((bisect(uz, a, b, tolerance)?, bisect(g, a, b, tolerance)?))
}
