//! Rounding-free versions of the map, the cross-product construction and the
//! particle simulation.
//!
//! Every quantity is kept as an integer vector up to a positive factor: the
//! map and both oracles are projective, so scaling by a positive integer and
//! dividing out common factors never changes a branch decision. The
//! restitution coefficient is an exact rational, either a decimal literal
//! or the binary value of an `f64`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::map_core::{Branch, ProjectiveDirection, Symbol};
use crate::oracles::branch_of_symbols;

/// Integer 3-vector.
pub type IVec3 = [BigInt; 3];

/// Exact restitution data: `r = R/S` and `α = Aa/S`, with `S = 2·den`.
#[derive(Debug, Clone)]
pub struct ExactRestitution {
    big_r: BigInt,
    big_a: BigInt,
    big_s: BigInt,
}

impl ExactRestitution {
    pub fn from_f64(r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Restitution(r));
        }
        let q = BigRational::from_float(r).ok_or(Error::Restitution(r))?;
        Ok(Self::from_ratio(q.numer().clone(), q.denom().clone()))
    }

    /// Parses a plain decimal such as `"0.15"` into the rational `15/100`.
    pub fn from_decimal(text: &str) -> Result<Self> {
        let bad = || Error::Config(format!("not a decimal in (0, 1): {text:?}"));
        let t = text.trim();
        let (int_part, frac_part) = t.split_once('.').unwrap_or((t, ""));
        if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let num: BigInt = digits.parse().map_err(|_| bad())?;
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        if num.is_zero() || num >= den {
            return Err(bad());
        }
        let g = num.gcd(&den);
        Ok(Self::from_ratio(num / &g, den / g))
    }

    /// `r = num/den` with `den > 0`.
    pub fn from_ratio(num: BigInt, den: BigInt) -> Self {
        ExactRestitution {
            big_r: &num * 2,
            big_a: &num + &den,
            big_s: den * 2,
        }
    }

    /// Collision matrix scaled by `S`.
    fn collision(&self, s: Symbol) -> [[BigInt; 3]; 3] {
        let (r, a, sc) = (&self.big_r, &self.big_a, &self.big_s);
        let z = BigInt::zero;
        match s {
            Symbol::A => [[-r.clone(), z(), z()], [a.clone(), sc.clone(), z()], [z(), z(), sc.clone()]],
            Symbol::B => [[sc.clone(), a.clone(), z()], [z(), -r.clone(), z()], [z(), a.clone(), sc.clone()]],
            Symbol::C => [[sc.clone(), z(), z()], [z(), sc.clone(), a.clone()], [z(), z(), -r.clone()]],
        }
    }

    /// Branch matrix scaled by `S²`.
    fn branch(&self, b: Branch) -> [[BigInt; 3]; 3] {
        let (r, a, s) = (&self.big_r, &self.big_a, &self.big_s);
        let z = BigInt::zero;
        match b {
            Branch::One => [
                [-(r * s), r * a, z()],
                [-(a * s), a * a - r * s, r * a],
                [z(), z(), r * r],
            ],
            Branch::Two => [
                [r * s, -(r * a), z()],
                [a * s, -(a * a) * 2 + r * s, a * s],
                [z(), -(r * a), r * s],
            ],
            Branch::Three => [
                [r * r, z(), z()],
                [r * a, a * a - r * s, -(a * s)],
                [z(), r * a, -(r * s)],
            ],
        }
    }
}

fn mat_vec(m: &[[BigInt; 3]; 3], v: &IVec3) -> IVec3 {
    let row = |i: usize| &m[i][0] * &v[0] + &m[i][1] * &v[1] + &m[i][2] * &v[2];
    [row(0), row(1), row(2)]
}

fn cross(a: &IVec3, b: &IVec3) -> IVec3 {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn dot(a: &IVec3, b: &IVec3) -> BigInt {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

fn scale(a: &IVec3, s: &BigInt) -> IVec3 {
    [&a[0] * s, &a[1] * s, &a[2] * s]
}

fn sub(a: &IVec3, b: &IVec3) -> IVec3 {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

/// Lehmer's gcd: runs Euclid on the leading 64 bits with word-sized
/// cofactors and applies them to the full numbers in one step.
pub fn lehmer_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut a, mut b) = (a.abs(), b.abs());
    if a < b {
        std::mem::swap(&mut a, &mut b);
    }
    while b.bits() > 64 {
        let shift = a.bits() - 64;
        let top = |v: &BigInt| -> i128 { (v >> shift).to_u64_digits().1.first().copied().unwrap_or(0) as i128 };
        let (mut x, mut y) = (top(&a), top(&b));
        let (mut ca, mut cb, mut cc, mut cd) = (1i128, 0i128, 0i128, 1i128);
        while y + cc != 0 && y + cd != 0 {
            let q = (x + ca) / (y + cc);
            if q != (x + cb) / (y + cd) {
                break;
            }
            (ca, cc) = (cc, ca - q * cc);
            (cb, cd) = (cd, cb - q * cd);
            (x, y) = (y, x - q * y);
        }
        if cb == 0 {
            let r = &a % &b;
            a = std::mem::replace(&mut b, r);
        } else {
            let na = &a * BigInt::from(ca) + &b * BigInt::from(cb);
            let nb = &a * BigInt::from(cc) + &b * BigInt::from(cd);
            (a, b) = (na, nb);
        }
    }
    if b.is_zero() {
        return a;
    }
    (a % &b).gcd(&b)
}

/// Divides out the positive gcd of the components.
pub fn primitive(v: IVec3) -> IVec3 {
    let g = lehmer_gcd(&lehmer_gcd(&v[0], &v[1]), &v[2]);
    if g.is_zero() || g.is_one() {
        return v;
    }
    [&v[0] / &g, &v[1] / &g, &v[2] / &g]
}

/// Canonical sign, then primitive.
pub fn canonical(v: IVec3) -> IVec3 {
    let positive = if !v[0].is_zero() {
        v[0].is_positive()
    } else if !v[2].is_zero() {
        v[2].is_negative()
    } else {
        v[1].is_positive()
    };
    let v = primitive(v);
    if positive {
        v
    } else {
        [-v[0].clone(), -v[1].clone(), -v[2].clone()]
    }
}

/// Exact integer vector proportional to an `f64` direction.
pub fn from_direction(u: &ProjectiveDirection) -> IVec3 {
    let q: Vec<BigRational> = u
        .vec()
        .iter()
        .map(|c| BigRational::from_float(*c).expect("finite component"))
        .collect();
    let den = q.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let v = [
        (&q[0] * BigRational::from_integer(den.clone())).to_integer(),
        (&q[1] * BigRational::from_integer(den.clone())).to_integer(),
        (&q[2] * BigRational::from_integer(den)).to_integer(),
    ];
    canonical(v)
}

/// Exact branch decision, ties to branch 2.
pub fn classify(u: &IVec3, r: &ExactRestitution) -> Branch {
    let ay = &r.big_a * &u[1];
    if u[1].is_positive() && (&ay - &r.big_s * &u[0]).is_positive() {
        Branch::One
    } else if u[1].is_negative() && (&ay - &r.big_s * &u[2]).is_negative() {
        Branch::Three
    } else {
        Branch::Two
    }
}

/// Branch letters of the exact map orbit.
pub fn map_letters(u0: &IVec3, r: &ExactRestitution, n: usize) -> Vec<Branch> {
    let mut u = u0.clone();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let b = classify(&u, r);
        u = canonical(mat_vec(&r.branch(b), &u));
        out.push(b);
    }
    out
}

fn axis(s: Symbol) -> IVec3 {
    let (o, z) = (BigInt::one, BigInt::zero);
    match s {
        Symbol::A => [o(), z(), z()],
        Symbol::B => [z(), o(), z()],
        Symbol::C => [z(), z(), o()],
    }
}

fn zero_component(u: &IVec3, s: Symbol) -> IVec3 {
    let mut v = u.clone();
    let i = match s {
        Symbol::A => 0,
        Symbol::B => 1,
        Symbol::C => 2,
    };
    v[i] = BigInt::zero();
    v
}

/// Exact cross-product construction from one `b` contact to the next.
pub fn defn23_step(u: &IVec3, r: &ExactRestitution) -> Result<(IVec3, Branch)> {
    let mut u = if u[0].is_negative() {
        [-u[0].clone(), -u[1].clone(), -u[2].clone()]
    } else {
        u.clone()
    };
    let mut contact = Symbol::B;
    let mut symbols = Vec::with_capacity(3);
    loop {
        if symbols.len() >= 3 {
            return Err(Error::NonTermination(3));
        }
        let e = axis(contact);
        let p = cross(&u, &e);
        let q = cross(&p, &u);
        let v = zero_component(&u, contact);
        let qv = dot(&q, &v);
        if qv.is_zero() && contact == Symbol::B && symbols.is_empty() {
            let w = mat_vec(&r.branch(Branch::Two), &u);
            return Ok((primitive(w), Branch::Two));
        }
        let forward = qv.is_positive();
        let next = match (contact, forward) {
            (Symbol::A, true) => Symbol::B,
            (Symbol::A, false) => Symbol::C,
            (Symbol::B, true) => Symbol::C,
            (Symbol::B, false) => Symbol::A,
            (Symbol::C, true) => Symbol::A,
            (Symbol::C, false) => Symbol::B,
        };
        let p_next = cross(&axis(next), &u);
        let q_next = mat_vec(&r.collision(next), &q);
        u = primitive(cross(&q_next, &p_next));
        symbols.push(next);
        contact = next;
        if contact == Symbol::B {
            break;
        }
    }
    let b = branch_of_symbols(&symbols).ok_or(Error::NonTermination(symbols.len()))?;
    Ok((u, b))
}

pub fn defn23_letters(u0: &IVec3, r: &ExactRestitution, n: usize) -> Result<Vec<Branch>> {
    let mut u = u0.clone();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let (next, b) = defn23_step(&u, r)?;
        out.push(b);
        u = next;
    }
    Ok(out)
}

/// Exact particle run with the velocity re-based orthogonally to the gaps
/// after every collision. At each `b` collision the pair `(p, q)` is rebuilt
/// from the primitive plane normal, a positive rescaling of both vectors.
pub fn particle_letters(u0: &IVec3, r: &ExactRestitution, n: usize) -> Result<Vec<Branch>> {
    let (mut p, mut q) = post_b_state(u0);
    let mut out = Vec::with_capacity(n);
    let mut group: Vec<Symbol> = Vec::with_capacity(3);
    while out.len() < n {
        // Earliest closing gap: minimize p_i / (−q_i) over q_i < 0.
        let mut best: Option<usize> = None;
        for i in 0..3 {
            if !q[i].is_negative() {
                continue;
            }
            best = match best {
                None => Some(i),
                Some(j) => {
                    // p_i/(−q_i) < p_j/(−q_j)  ⇔  p_i·(−q_j) < p_j·(−q_i)
                    let lhs = &p[i] * (-&q[j]);
                    let rhs = &p[j] * (-&q[i]);
                    if lhs < rhs {
                        Some(i)
                    } else {
                        Some(j)
                    }
                }
            };
        }
        let Some(i) = best else {
            return Err(Error::Range("exact particle run separated".into()));
        };
        let w = -&q[i];
        let pi = p[i].clone();
        let moved = [
            &w * &p[0] + &pi * &q[0],
            &w * &p[1] + &pi * &q[1],
            &w * &p[2] + &pi * &q[2],
        ];
        let hits: Vec<usize> = (0..3).filter(|&j| q[j].is_negative() && moved[j].is_zero()).collect();
        let syms: Vec<Symbol> = hits.iter().map(|&j| [Symbol::A, Symbol::B, Symbol::C][j]).collect();
        if hits.len() > 1 && hits.contains(&1) {
            let names: String = syms.iter().map(|s| s.as_char()).collect();
            return Err(Error::TripleCollision(names));
        }
        let mut qn = q.clone();
        for s in &syms {
            qn = mat_vec(&r.collision(*s), &qn);
        }
        p = primitive(moved);
        let pp = dot(&p, &p);
        let qp = dot(&qn, &p);
        q = primitive(sub(&scale(&qn, &pp), &scale(&p, &qp)));
        group.extend(syms.iter().copied());
        if syms.contains(&Symbol::B) {
            let b = branch_of_symbols(&group)
                .ok_or_else(|| Error::Range(format!("malformed symbol group {group:?}")))?;
            out.push(b);
            group.clear();
            let u = canonical(cross(&q, &p));
            let (pn, qn) = post_b_state(&u);
            p = pn;
            q = qn;
        } else if group.len() > 2 {
            return Err(Error::Range(format!("malformed symbol group {group:?}")));
        }
    }
    Ok(out)
}

fn post_b_state(u: &IVec3) -> (IVec3, IVec3) {
    let (x, y, z) = (&u[0], &u[1], &u[2]);
    let p = [-z.clone(), BigInt::zero(), x.clone()];
    let q = [-(x * y), x * x + z * z, -(y * z)];
    (primitive(p), primitive(q))
}
