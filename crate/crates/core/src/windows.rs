//! Stability windows of the `(ab)ⁿ(cb)ⁿ` patterns.
//!
//! `P_n(r) = tr(J (BA)ⁿ)` is built in exact integer arithmetic (the matrices
//! `2A` and `2B` have integer polynomial entries), and the lower window bound
//! is the root of `Q_n(r) = r^{2n} P_n(r) P_n(1/r) − r^{2n}` above the
//! accumulation point `7 − 4√3`, isolated with exact signs only. The upper
//! bound `(2c − √(4c² − 1))²`, `c = cos(π/2n)`, is evaluated with interval
//! fixed-point arithmetic.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::exact::{isolate_roots, rational_to_f64, refine_root, round_half_even, DyadicInterval, IntPoly, IsolatedRoot, RationalPoly};
use crate::precision::{self, Fx};
use crate::{Error, Result};

/// Working and output precision for the window bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionBudget {
    /// Decimal digits carried through transcendental evaluation.
    pub working_digits: usize,
    /// Decimal places in the reported bounds.
    pub target_decimals: usize,
}

impl Default for PrecisionBudget {
    fn default() -> Self {
        PrecisionBudget {
            working_digits: 64,
            target_decimals: 12,
        }
    }
}

impl PrecisionBudget {
    pub fn new(working_digits: usize, target_decimals: usize) -> Result<Self> {
        if working_digits < target_decimals + 10 {
            return Err(Error::Range(format!(
                "working digits {working_digits} must exceed target decimals {target_decimals} by at least 10"
            )));
        }
        Ok(PrecisionBudget {
            working_digits,
            target_decimals,
        })
    }

    fn working_bits(&self) -> u64 {
        (self.working_digits as f64 * std::f64::consts::LOG2_10).ceil() as u64 + 32
    }
}

/// Bounds of the `n`-th window, as rounded decimal strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityWindow {
    pub n: usize,
    pub lower: String,
    /// `None` for `n = 1`, where the upper bound is not defined.
    pub upper: Option<String>,
}

impl StabilityWindow {
    pub fn lower_f64(&self) -> f64 {
        self.lower.parse().expect("lower bound is a decimal string")
    }

    pub fn upper_f64(&self) -> Option<f64> {
        self.upper.as_ref().map(|u| u.parse().expect("upper bound is a decimal string"))
    }

    /// The upper bound as printed in tables.
    pub fn upper_str(&self) -> &str {
        self.upper.as_deref().unwrap_or("not defined")
    }
}

/// Integer polynomial, coefficients low to high.
type Zp = Vec<BigInt>;

fn zp_mul(a: &Zp, b: &Zp) -> Zp {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn zp_add_assign(a: &mut Zp, b: &Zp) {
    if a.len() < b.len() {
        a.resize(b.len(), BigInt::zero());
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

fn zp(c: &[i64]) -> Zp {
    c.iter().map(|&v| BigInt::from(v)).collect()
}

type ZMat = [[Zp; 3]; 3];

fn zmat_mul(a: &ZMat, b: &ZMat) -> ZMat {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut acc = Vec::new();
            for k in 0..3 {
                zp_add_assign(&mut acc, &zp_mul(&a[i][k], &b[k][j]));
            }
            acc
        })
    })
}

/// `4BA` with entries in `Z[r]`; `2α = r + 1`.
fn four_ba() -> ZMat {
    let e = Vec::new;
    // 2A = [[−2r, 0, 0], [r+1, 2, 0], [0, 0, 2]]
    let a2: ZMat = [
        [zp(&[0, -2]), e(), e()],
        [zp(&[1, 1]), zp(&[2]), e()],
        [e(), e(), zp(&[2])],
    ];
    // 2B = [[2, r+1, 0], [0, −2r, 0], [0, r+1, 2]]
    let b2: ZMat = [
        [zp(&[2]), zp(&[1, 1]), e()],
        [e(), zp(&[0, -2]), e()],
        [e(), zp(&[1, 1]), zp(&[2])],
    ];
    zmat_mul(&b2, &a2)
}

/// `4ⁿ P_n` as an integer polynomial.
fn scaled_trace(n: usize) -> Zp {
    let mut base = four_ba();
    let mut acc: Option<ZMat> = None;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(m) => zmat_mul(&m, &base),
            });
        }
        e >>= 1;
        if e > 0 {
            base = zmat_mul(&base, &base);
        }
    }
    let m = acc.expect("n ≥ 1");
    // tr(J M) = M[2][0] + M[1][1] + M[0][2]
    let mut t = m[2][0].clone();
    zp_add_assign(&mut t, &m[1][1]);
    zp_add_assign(&mut t, &m[0][2]);
    while t.last().is_some_and(|c| c.is_zero()) {
        t.pop();
    }
    t
}

/// `16ⁿ Q_n` as an integer polynomial of degree `4n`.
fn scaled_q(n: usize) -> IntPoly {
    let t = scaled_trace(n);
    let mut rev = t.clone();
    rev.resize(2 * n + 1, BigInt::zero());
    rev.reverse();
    let mut q = zp_mul(&t, &rev);
    q.resize(4 * n + 1, BigInt::zero());
    q[2 * n] -= BigInt::one() << (4 * n);
    IntPoly { coeffs: q }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Range("window index must be at least 1".into()));
    }
    Ok(())
}

fn to_rational_poly(c: &[BigInt], den: &BigInt) -> RationalPoly {
    RationalPoly::new(c.iter().map(|v| BigRational::new(v.clone(), den.clone())).collect())
}

/// `P_n(r) = tr(J (BA)ⁿ)`, a polynomial of degree `2n`.
pub fn trace_poly(n: usize) -> Result<RationalPoly> {
    check_n(n)?;
    Ok(to_rational_poly(&scaled_trace(n), &(BigInt::one() << (2 * n))))
}

/// `Q_n(r) = r^{2n} P_n(r) P_n(1/r) − r^{2n}`, a palindromic polynomial of
/// degree `4n`.
pub fn q_poly(n: usize) -> Result<RationalPoly> {
    check_n(n)?;
    Ok(to_rational_poly(&scaled_q(n).coeffs, &(BigInt::one() << (4 * n))))
}

/// Rigorous enclosure of `(2c − √(4c² − 1))²`, `c = cos(π/2n)`, at `bits`
/// fractional bits. Requires `n ≥ 2`.
pub fn upper_enclosure(n: usize, bits: u64) -> Fx {
    assert!(n >= 2, "the upper bound needs n ≥ 2");
    let x = precision::pi(bits).div_int(2 * n as u64);
    let c = precision::cos(&x);
    let four_c2_minus_1 = c.mul(&c).mul_int(4).sub(&Fx::from_int(1, bits));
    let d = c.mul_int(2).sub(&four_c2_minus_1.sqrt());
    d.mul(&d)
}

/// Rounded upper bound of window `n`; `None` for `n = 1`.
pub fn upper_bound(n: usize, budget: PrecisionBudget) -> Result<Option<String>> {
    check_n(n)?;
    if n == 1 {
        return Ok(None);
    }
    let mut bits = budget.working_bits();
    for _ in 0..6 {
        let enc = upper_enclosure(n, bits);
        if enc.width_below_decimal(budget.target_decimals as u32 + 2) {
            if let Some(s) = enc.decimal(budget.target_decimals) {
                return Ok(Some(s));
            }
        }
        bits *= 2;
    }
    Err(Error::Range(format!("upper bound of window {n} could not be rounded unambiguously")))
}

/// Fractional bits of the dyadic lower endpoint placed just above `7 − 4√3`.
const ACCUMULATION_BITS: u64 = 200;

/// The accumulation point `7 − 4√3` of the windows.
pub fn accumulation_point() -> f64 {
    7.0 - 4.0 * 3f64.sqrt()
}

/// Numerator of a dyadic `a / 2^k` with `7 − 4√3 < a < 7 − 4√3 + 2^-k`.
fn accumulation_dyadic(k: u64) -> BigInt {
    let (floor_sqrt48, _) = precision::sqrt_bounds(48, k);
    (BigInt::from(7) << k as usize) - floor_sqrt48
}

/// Open search interval `(7 − 4√3, upper(n))` for the lower bound, with
/// dyadic endpoints that stay inside it.
fn search_interval(n: usize, budget: PrecisionBudget) -> DyadicInterval {
    let k = ACCUMULATION_BITS.max(budget.working_bits());
    let lo = accumulation_dyadic(k);
    let hi = if n == 1 {
        BigInt::one() << k as usize
    } else {
        let enc = upper_enclosure(n, k);
        // Lower end of the enclosure, still below the true upper bound.
        &enc.v - &enc.e
    };
    DyadicInterval { lo, hi, k }
}

fn root_decimal(r: &IsolatedRoot, digits: usize) -> String {
    match r {
        IsolatedRoot::Exact { num, k } => round_half_even(&BigRational::new(num.clone(), BigInt::one() << *k as usize), digits),
        IsolatedRoot::Interval(iv) => {
            let mid = (iv.lo_rational() + iv.hi_rational()) / BigRational::from_integer(2.into());
            format!("~{}", round_half_even(&mid, digits))
        }
    }
}

/// Rounded lower bound of window `n`: the unique root of `Q_n` in
/// `(7 − 4√3, upper(n))`, or in `(7 − 4√3, 1)` for `n = 1`.
pub fn lower_bound(n: usize, budget: PrecisionBudget) -> Result<String> {
    check_n(n)?;
    let q = scaled_q(n);
    let iv = search_interval(n, budget);
    let max_k = iv.k + 64;
    let (roots, unresolved) = isolate_roots(&q, &iv, max_k);
    let count = roots.len() + unresolved.iter().map(|(_, v)| *v).sum::<usize>();
    if count != 1 || roots.len() != 1 {
        return Err(Error::RootCount {
            n,
            count,
            roots: roots.iter().map(|r| root_decimal(r, budget.target_decimals)).collect(),
        });
    }
    let digits = budget.target_decimals;
    let first_k = ((digits + 2) as f64 * std::f64::consts::LOG2_10).ceil() as u64;
    let max_refine = budget.working_bits().max(first_k);
    let mut bracket = roots[0].clone();
    let mut target = first_k;
    loop {
        match &bracket {
            IsolatedRoot::Exact { num, k } => {
                return Ok(round_half_even(&BigRational::new(num.clone(), BigInt::one() << *k as usize), digits));
            }
            IsolatedRoot::Interval(cur) => {
                let refined = refine_root(&q, cur, target);
                if let IsolatedRoot::Interval(r) = &refined {
                    let a = round_half_even(&r.lo_rational(), digits);
                    let b = round_half_even(&r.hi_rational(), digits);
                    if a == b {
                        return Ok(a);
                    }
                    if target >= max_refine {
                        return Err(Error::Range(format!(
                            "lower bound of window {n} sits on a rounding boundary at {} working bits",
                            max_refine
                        )));
                    }
                }
                bracket = refined;
                target = (target * 2).min(max_refine);
            }
        }
    }
}

/// Both bounds of window `n`.
pub fn window(n: usize, budget: PrecisionBudget) -> Result<StabilityWindow> {
    Ok(StabilityWindow {
        n,
        lower: lower_bound(n, budget)?,
        upper: upper_bound(n, budget)?,
    })
}

/// Windows `1..=n_max` in order, checked for `lower < upper`, for
/// `lower(n+1) < lower(n)` and for `lower(n) > 7 − 4√3`.
pub fn window_table(n_max: usize, budget: PrecisionBudget) -> Result<Vec<StabilityWindow>> {
    check_n(n_max)?;
    let rows: Vec<StabilityWindow> = (1..=n_max)
        .into_par_iter()
        .map(|n| window(n, budget))
        .collect::<Result<_>>()?;
    let floor = accumulation_point();
    for w in &rows {
        let lo = w.lower_f64();
        if lo <= floor {
            return Err(Error::Range(format!("window {} lower bound {} is not above 7 - 4√3", w.n, w.lower)));
        }
        if let Some(up) = w.upper_f64() {
            if lo >= up {
                return Err(Error::Range(format!("window {} has lower {} ≥ upper {}", w.n, w.lower, w.upper_str())));
            }
        }
    }
    for pair in rows.windows(2) {
        if pair[1].lower_f64() >= pair[0].lower_f64() {
            return Err(Error::Range(format!("lower bounds of windows {} and {} are not decreasing", pair[0].n, pair[1].n)));
        }
    }
    Ok(rows)
}

/// `n,lower,upper` CSV lines with a header.
pub fn windows_csv(rows: &[StabilityWindow]) -> String {
    let mut out = String::from("n,lower,upper\n");
    for w in rows {
        out.push_str(&format!("{},{},{}\n", w.n, w.lower, w.upper_str()));
    }
    out
}

/// Sign of `Q_n` at an exact rational point.
pub fn q_sign_at(n: usize, r: &BigRational) -> Result<Sign> {
    check_n(n)?;
    Ok(scaled_q(n).sign_at(r))
}

/// Floating-point value of `Q_n(r)`.
pub fn q_value_f64(n: usize, r: f64) -> Result<f64> {
    let q = q_poly(n)?;
    Ok(q.eval_f64(r))
}

/// Upper bound of window `n ≥ 2` as `f64`.
pub fn upper_f64(n: usize) -> f64 {
    rational_to_f64(&upper_enclosure(n, 128).lower())
}
