//! Fixed-point interval arithmetic on big integers.
//!
//! A value is `v / 2^p` known to lie within `e / 2^p` of the true number.
//! Every operation widens `e` by a bound on its own rounding, so the final
//! enclosure is rigorous.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::exact::round_half_even;

/// Enclosure `[(v − e)/2^p, (v + e)/2^p]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fx {
    pub v: BigInt,
    pub e: BigInt,
    pub p: u64,
}

impl Fx {
    pub fn from_int(n: i64, p: u64) -> Fx {
        Fx {
            v: BigInt::from(n) << p as usize,
            e: BigInt::zero(),
            p,
        }
    }

    pub fn add(&self, o: &Fx) -> Fx {
        debug_assert_eq!(self.p, o.p);
        Fx {
            v: &self.v + &o.v,
            e: &self.e + &o.e,
            p: self.p,
        }
    }

    pub fn sub(&self, o: &Fx) -> Fx {
        debug_assert_eq!(self.p, o.p);
        Fx {
            v: &self.v - &o.v,
            e: &self.e + &o.e,
            p: self.p,
        }
    }

    pub fn mul(&self, o: &Fx) -> Fx {
        let p = self.p as usize;
        let v = (&self.v * &o.v) >> p;
        // |ab − a'b'| ≤ |a|e_b + |b|e_a + e_a e_b, plus one ulp for the shift.
        let e = ((self.v.abs() * &o.e + o.v.abs() * &self.e + &self.e * &o.e) >> p) + 2;
        Fx { v, e, p: self.p }
    }

    pub fn mul_int(&self, k: i64) -> Fx {
        Fx {
            v: &self.v * k,
            e: &self.e * k.unsigned_abs(),
            p: self.p,
        }
    }

    /// Division by a positive integer.
    pub fn div_int(&self, k: u64) -> Fx {
        Fx {
            v: &self.v / k,
            e: &self.e / k + 2,
            p: self.p,
        }
    }

    /// Square root; requires the whole enclosure to be positive.
    pub fn sqrt(&self) -> Fx {
        let p = self.p as usize;
        let lo = &self.v - &self.e;
        assert!(lo.is_positive(), "square root of an enclosure touching zero");
        let v = (&self.v << p).sqrt();
        // |√a − √b| ≤ |a − b| / √min(a, b), in ulps.
        let t = (&lo << p).sqrt();
        let e = ((&self.e << p) / t) + 2;
        Fx { v, e, p: self.p }
    }

    pub fn lower(&self) -> BigRational {
        BigRational::new(&self.v - &self.e, BigInt::one() << self.p as usize)
    }

    pub fn upper(&self) -> BigRational {
        BigRational::new(&self.v + &self.e, BigInt::one() << self.p as usize)
    }

    /// The common rounding of both ends, if they agree.
    pub fn decimal(&self, digits: usize) -> Option<String> {
        let a = round_half_even(&self.lower(), digits);
        let b = round_half_even(&self.upper(), digits);
        (a == b).then_some(a)
    }

    /// `true` when the enclosure half-width is below `10^-digits`.
    pub fn width_below_decimal(&self, digits: u32) -> bool {
        let bound = BigRational::new(BigInt::one(), BigInt::from(10u32).pow(digits));
        BigRational::new(self.e.clone(), BigInt::one() << self.p as usize) < bound
    }
}

/// `atan(1/m)` by its alternating series.
fn atan_inv(m: u64, p: u64) -> Fx {
    let one = BigInt::one() << p as usize;
    let m2 = BigInt::from(m) * m;
    let mut power = BigInt::from(m); // m^{2k+1}
    let mut sum = BigInt::zero();
    let mut terms = 0u64;
    let mut k = 0u64;
    loop {
        let term = &one / (&power * (2 * k + 1));
        if term.is_zero() {
            break;
        }
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        terms += 1;
        power *= &m2;
        k += 1;
    }
    // One ulp of truncation per term plus the (sub-ulp) tail.
    Fx {
        v: sum,
        e: BigInt::from(terms + 2),
        p,
    }
}

/// π by Machin's formula.
pub fn pi(p: u64) -> Fx {
    atan_inv(5, p).mul_int(16).sub(&atan_inv(239, p).mul_int(4))
}

/// `cos x` for `|x| ≤ 1` by its Taylor series.
pub fn cos(x: &Fx) -> Fx {
    let p = x.p;
    let x2 = x.mul(x);
    let mut term = Fx::from_int(1, p);
    let mut sum = Fx::from_int(1, p);
    let mut k = 1u64;
    loop {
        term = term.mul(&x2).div_int((2 * k - 1) * (2 * k));
        let small = (&term.v.abs() + &term.e) <= BigInt::from(4);
        if k % 2 == 1 {
            sum = sum.sub(&term);
        } else {
            sum = sum.add(&term);
        }
        if small {
            // Alternating, decreasing tail: bounded by the last term.
            sum.e += 4;
            break;
        }
        k += 1;
    }
    sum
}

/// Floor and ceiling of `√n · 2^k` as integers.
pub fn sqrt_bounds(n: u64, k: u64) -> (BigInt, BigInt) {
    let s = (BigInt::from(n) << (2 * k) as usize).sqrt();
    let exact = &s * &s == (BigInt::from(n) << (2 * k) as usize);
    let hi = if exact { s.clone() } else { &s + 1 };
    (s, hi)
}
