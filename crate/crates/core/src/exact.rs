//! Univariate polynomials with exact rational coefficients, and exact real
//! root isolation on dyadic intervals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Polynomial in one variable; `coeffs[k]` multiplies `r^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl RationalPoly {
    /// Builds from low-to-high coefficients, trimming zero leading terms.
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        let mut p = RationalPoly { coeffs };
        p.trim();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn zero() -> Self {
        RationalPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    /// The variable `r`.
    pub fn x() -> Self {
        Self::new(vec![BigRational::zero(), BigRational::one()])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rational_to_f64(c);
        }
        acc
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `x^d · p(1/x)` for `d = deg p`: the coefficient sequence reversed.
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    /// Multiplication by `x^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = vec![BigRational::zero(); k];
        c.extend(self.coeffs.iter().cloned());
        Self::new(c)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Euclidean division: `(quotient, remainder)`.
    pub fn div_rem(&self, d: &RationalPoly) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.degree().unwrap();
        let lead = d.leading();
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return (Self::zero(), Self::zero());
        };
        if nd < dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let c = &rem[k + dd] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &c * dc;
            }
            quot[k] = c;
        }
        (Self::new(quot), Self::new(rem))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    /// `c_k = c_{d−k}` for every `k`.
    pub fn is_palindromic(&self) -> bool {
        let n = self.coeffs.len();
        (0..n / 2).all(|k| self.coeffs[k] == self.coeffs[n - 1 - k])
    }

    /// Positive integer multiple with coprime coefficients and the same sign pattern.
    pub fn primitive_integer(&self) -> IntPoly {
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let ints = if g.is_zero() || g.is_one() {
            ints
        } else {
            ints.iter().map(|c| c / &g).collect()
        };
        IntPoly { coeffs: ints }
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;

    fn add(self, o: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        RationalPoly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;

    fn sub(self, o: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        RationalPoly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;

    fn mul(self, o: &RationalPoly) -> RationalPoly {
        if self.is_zero() || o.is_zero() {
            return RationalPoly::zero();
        }
        // Multiply over a common denominator to avoid a gcd per term.
        let a = self.over_common_denominator();
        let b = o.over_common_denominator();
        let mut c = vec![BigInt::zero(); a.0.len() + b.0.len() - 1];
        for (i, x) in a.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.0.iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        let den = a.1 * b.1;
        RationalPoly::new(
            c.into_iter()
                .map(|n| BigRational::new(n, den.clone()))
                .collect(),
        )
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;

    fn neg(self) -> RationalPoly {
        RationalPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl RationalPoly {
    fn over_common_denominator(&self) -> (Vec<BigInt>, BigInt) {
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let nums = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        (nums, den)
    }
}

impl fmt::Display for RationalPoly {
    /// Highest degree first, e.g. `1/16 r^4 - 1/4 r^3 + 1/16`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag.is_one() && k > 0;
            match (k, unit) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "r")?,
                (1, false) => write!(f, "{mag} r")?,
                (_, true) => write!(f, "r^{k}")?,
                (_, false) => write!(f, "{mag} r^{k}")?,
            }
        }
        Ok(())
    }
}

/// Closest `f64` to an exact rational.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Fall back to a scaled quotient for huge numerators or denominators.
    let shift = q.denom().bits() as i64 - 60;
    let scaled = if shift > 0 {
        (q.numer() << 60usize) / q.denom()
    } else {
        q.numer() * (BigInt::one() << 60usize) / q.denom()
    };
    scaled.to_f64().unwrap_or(f64::NAN) / 2f64.powi(60)
}

/// Polynomial with integer coefficients, low to high.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    pub coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Sign of `p(num / 2^k)`, computed exactly.
    pub fn sign_at_dyadic(&self, num: &BigInt, k: u64) -> Sign {
        // 2^{kd} p(num/2^k) = Σ c_i num^i 2^{k(d−i)}, Horner from the top.
        let mut acc = BigInt::zero();
        for (j, c) in self.coeffs.iter().rev().enumerate() {
            acc = acc * num + (c << (k as usize * j));
        }
        acc.sign()
    }

    /// Sign of `p(q)` for an exact rational `q`.
    pub fn sign_at(&self, q: &BigRational) -> Sign {
        // den^d p(num/den) = Σ c_i num^i den^{d−i}, Horner from the top.
        let (n, d) = (q.numer(), q.denom());
        let mut acc = BigInt::zero();
        let mut pw = BigInt::one();
        for c in self.coeffs.iter().rev() {
            acc = acc * n + c * &pw;
            pw *= d;
        }
        acc.sign()
    }

    /// Number of sign changes in the coefficient sequence, zeros skipped.
    pub fn sign_variations(&self) -> usize {
        let mut last = Sign::NoSign;
        let mut v = 0;
        for c in &self.coeffs {
            let s = c.sign();
            if s == Sign::NoSign {
                continue;
            }
            if last != Sign::NoSign && s != last {
                v += 1;
            }
            last = s;
        }
        v
    }

    /// `p(x + a)` for an integer `a`, by repeated synthetic division.
    pub fn taylor_shift(&self, a: &BigInt) -> IntPoly {
        let mut c = self.coeffs.clone();
        let n = c.len();
        if a.is_zero() {
            return IntPoly { coeffs: c };
        }
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = &c[j + 1] * a;
                c[j] += t;
            }
        }
        IntPoly { coeffs: c }
    }

    /// Number of sign variations of `(1+t)^d p((a + b t)/(1+t))`, an upper
    /// bound on (and equal in parity to) the roots of `p` in `(a, b)`.
    ///
    /// `a = a_num / 2^k`, `b = b_num / 2^k`.
    pub fn descartes_bound(&self, a_num: &BigInt, b_num: &BigInt, k: u64) -> usize {
        let d = self.degree();
        // h(x) = 2^{kd} p(x / 2^k)
        let h = IntPoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c << (k as usize * (d - i)))
                .collect(),
        };
        // g(y) = h(a_num + (b_num − a_num) y): roots of p in (a,b) ↔ roots of g in (0,1)
        let shifted = h.taylor_shift(a_num);
        let w = b_num - a_num;
        let mut pw = BigInt::one();
        let mut g = Vec::with_capacity(shifted.coeffs.len());
        for c in shifted.coeffs {
            g.push(c * &pw);
            pw *= &w;
        }
        // (1+t)^d g(1/(1+t)): reverse then shift by one.
        g.reverse();
        IntPoly { coeffs: g }.taylor_shift(&BigInt::one()).sign_variations()
    }
}

/// An isolating interval `(lo, hi)` with dyadic endpoints `num / 2^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicInterval {
    pub lo: BigInt,
    pub hi: BigInt,
    pub k: u64,
}

impl DyadicInterval {
    pub fn lo_rational(&self) -> BigRational {
        BigRational::new(self.lo.clone(), BigInt::one() << self.k as usize)
    }

    pub fn hi_rational(&self) -> BigRational {
        BigRational::new(self.hi.clone(), BigInt::one() << self.k as usize)
    }

    /// Rescales both endpoints to the exponent `k2 ≥ k`.
    pub fn to_exponent(&self, k2: u64) -> DyadicInterval {
        let s = (k2 - self.k) as usize;
        DyadicInterval {
            lo: &self.lo << s,
            hi: &self.hi << s,
            k: k2,
        }
    }
}

/// One root found by [`isolate_roots`]: either an exact dyadic root or an
/// open interval containing exactly one root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsolatedRoot {
    Exact { num: BigInt, k: u64 },
    Interval(DyadicInterval),
}

/// Isolates every real root of a squarefree-on-the-interval polynomial in
/// the open interval `(lo/2^k, hi/2^k)`, by Descartes' rule with bisection.
///
/// Stops subdividing below width `2^-max_k`; intervals still ambiguous there
/// are reported with their variation count in the second component.
pub fn isolate_roots(p: &IntPoly, iv: &DyadicInterval, max_k: u64) -> (Vec<IsolatedRoot>, Vec<(DyadicInterval, usize)>) {
    let mut roots = Vec::new();
    let mut unresolved = Vec::new();
    let mut stack = vec![iv.clone()];
    while let Some(cur) = stack.pop() {
        let v = p.descartes_bound(&cur.lo, &cur.hi, cur.k);
        match v {
            0 => {}
            1 => roots.push(IsolatedRoot::Interval(cur)),
            _ => {
                if cur.k >= max_k {
                    unresolved.push((cur, v));
                    continue;
                }
                let c = cur.to_exponent(cur.k + 1);
                let mid = (&c.lo + &c.hi) >> 1usize;
                if p.sign_at_dyadic(&mid, c.k) == Sign::NoSign {
                    roots.push(IsolatedRoot::Exact {
                        num: mid.clone(),
                        k: c.k,
                    });
                }
                stack.push(DyadicInterval {
                    lo: mid.clone(),
                    hi: c.hi.clone(),
                    k: c.k,
                });
                stack.push(DyadicInterval {
                    lo: c.lo,
                    hi: mid,
                    k: c.k,
                });
            }
        }
    }
    roots.sort_by(|a, b| root_lo(a).cmp(&root_lo(b)));
    (roots, unresolved)
}

fn root_lo(r: &IsolatedRoot) -> BigRational {
    match r {
        IsolatedRoot::Exact { num, k } => BigRational::new(num.clone(), BigInt::one() << *k as usize),
        IsolatedRoot::Interval(iv) => iv.lo_rational(),
    }
}

/// Halves an isolating interval until its width is at most `2^-target_k`,
/// using exact signs only. Returns the final bracket, or the exact root if a
/// midpoint hits it.
pub fn refine_root(p: &IntPoly, iv: &DyadicInterval, target_k: u64) -> IsolatedRoot {
    let mut cur = iv.clone();
    let mut s_lo = p.sign_at_dyadic(&cur.lo, cur.k);
    if s_lo == Sign::NoSign {
        return IsolatedRoot::Exact { num: cur.lo, k: cur.k };
    }
    loop {
        let width_ok = (&cur.hi - &cur.lo).bits() as i64 - cur.k as i64 <= -(target_k as i64);
        if width_ok {
            return IsolatedRoot::Interval(cur);
        }
        cur = cur.to_exponent(cur.k + 1);
        let mid = (&cur.lo + &cur.hi) >> 1usize;
        let s_mid = p.sign_at_dyadic(&mid, cur.k);
        if s_mid == Sign::NoSign {
            return IsolatedRoot::Exact { num: mid, k: cur.k };
        }
        if s_mid == s_lo {
            cur.lo = mid;
            s_lo = s_mid;
        } else {
            cur.hi = mid;
        }
    }
}

/// Decimal string of `q` rounded half-to-even at `digits` places.
pub fn round_half_even(q: &BigRational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let x = q * BigRational::from_integer(scale.clone());
    let fl = x.floor();
    let frac = &x - &fl;
    let half = rat(1, 2);
    let mut n = fl.to_integer();
    if frac > half || (frac == half && n.is_odd()) {
        n += 1;
    }
    let neg = n.is_negative();
    let digits_str = n.abs().to_string();
    let padded = if digits_str.len() <= digits {
        format!("{}{}", "0".repeat(digits + 1 - digits_str.len()), digits_str)
    } else {
        digits_str
    };
    let (int_part, frac_part) = padded.split_at(padded.len() - digits);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn di(lo: i64, hi: i64, k: u64) -> DyadicInterval {
        DyadicInterval {
            lo: lo.into(),
            hi: hi.into(),
            k,
        }
    }

    #[test]
    fn arithmetic_and_display() {
        let p = RationalPoly::from_i64(&[1, -6, 1]);
        let q = RationalPoly::from_i64(&[1, 1]);
        let prod = &p * &q;
        assert_eq!(prod, RationalPoly::from_i64(&[1, -5, -5, 1]));
        let (quo, rem) = prod.div_rem(&q);
        assert_eq!(quo, p);
        assert!(rem.is_zero());
        assert_eq!(p.to_string(), "r^2 - 6 r + 1");
        assert_eq!(RationalPoly::new(vec![rat(1, 16), rat(-1, 4)]).to_string(), "-1/4 r + 1/16");
        assert_eq!(q.pow(3), RationalPoly::from_i64(&[1, 3, 3, 1]));
        assert!(RationalPoly::from_i64(&[1, -5, -5, 1]).is_palindromic());
    }

    #[test]
    fn sign_evaluation_matches_rational_evaluation() {
        let p = RationalPoly::new(vec![rat(1, 3), rat(-7, 2), rat(5, 1), rat(-1, 9)]);
        let ip = p.primitive_integer();
        for (n, k) in [(0i64, 0u64), (1, 1), (3, 3), (-5, 2), (7, 1), (1, 10)] {
            let x = BigRational::new(n.into(), BigInt::one() << k as usize);
            assert_eq!(ip.sign_at_dyadic(&n.into(), k), p.eval(&x).numer().sign());
            assert_eq!(ip.sign_at(&x), p.eval(&x).numer().sign());
        }
    }

    #[test]
    fn isolates_roots_of_r2_minus_6r_plus_1() {
        // Roots 3 ± 2√2; only 3 − 2√2 ≈ 0.1716 lies in (0, 1).
        let p = RationalPoly::from_i64(&[1, -6, 1]).primitive_integer();
        let (roots, unresolved) = isolate_roots(&p, &di(0, 1, 0), 64);
        assert!(unresolved.is_empty());
        assert_eq!(roots.len(), 1);
        let IsolatedRoot::Interval(iv) = &roots[0] else { panic!() };
        let IsolatedRoot::Interval(fine) = refine_root(&p, iv, 60) else { panic!() };
        let lo = rational_to_f64(&fine.lo_rational());
        assert!((lo - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn exact_dyadic_roots_are_reported() {
        // (4r − 1)(4r − 3) has roots 1/4 and 3/4, both dyadic.
        let p = RationalPoly::from_i64(&[3, -16, 16]).primitive_integer();
        let (roots, _) = isolate_roots(&p, &di(0, 1, 0), 64);
        assert_eq!(roots.len(), 2);
    }

    #[test]
    fn half_even_rounding() {
        assert_eq!(round_half_even(&rat(1, 8), 2), "0.12");
        assert_eq!(round_half_even(&rat(3, 8), 2), "0.38");
        assert_eq!(round_half_even(&rat(5, 1000), 2), "0.00");
        assert_eq!(round_half_even(&rat(15, 1000), 2), "0.02");
        assert_eq!(round_half_even(&rat(-1, 3), 3), "-0.333");
        assert_eq!(round_half_even(&rat(7, 1), 0), "7");
    }
}
