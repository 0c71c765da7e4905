//! Outward-rounded interval arithmetic over dyadic fixed-point numbers.
//!
//! An interval at precision `bits` holds integers `lo <= hi` and encloses
//! the real interval `[lo / 2^bits, hi / 2^bits]`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::geometry::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigInt,
    pub hi: BigInt,
    pub bits: u32,
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -(-a).div_floor(b)
}

impl Interval {
    pub fn from_rational(r: &Rational, bits: u32) -> Self {
        let num = r.numer() * pow2(bits);
        Self { lo: floor_div(&num, r.denom()), hi: ceil_div(&num, r.denom()), bits }
    }

    pub fn from_int(v: i64, bits: u32) -> Self {
        let x = BigInt::from(v) << bits;
        Self { lo: x.clone(), hi: x, bits }
    }

    pub fn zero(bits: u32) -> Self {
        Self::from_int(0, bits)
    }

    fn check(&self, other: &Self) {
        debug_assert_eq!(self.bits, other.bits, "mixed precisions");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        Self { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi, bits: self.bits }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.check(o);
        Self { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo, bits: self.bits }
    }

    pub fn neg(&self) -> Self {
        Self { lo: -&self.hi, hi: -&self.lo, bits: self.bits }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        let p = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let min = p.iter().min().expect("four products");
        let max = p.iter().max().expect("four products");
        let s = pow2(self.bits);
        Self { lo: floor_div(min, &s), hi: ceil_div(max, &s), bits: self.bits }
    }

    pub fn square(&self) -> Self {
        let m = self.mul(self);
        if self.lo.is_negative() && self.hi.is_positive() {
            Self { lo: BigInt::zero(), ..m }
        } else {
            Self { lo: m.lo.max(BigInt::zero()), ..m }
        }
    }

    /// Division by an interval that excludes zero.
    pub fn div(&self, o: &Self) -> Self {
        self.check(o);
        assert!(o.lo.is_positive() || o.hi.is_negative(), "division by an interval containing zero");
        let s = pow2(self.bits);
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for a in [&self.lo, &self.hi] {
            for b in [&o.lo, &o.hi] {
                let num = a * &s;
                let f = floor_div(&num, b);
                let c = ceil_div(&num, b);
                lo = Some(lo.map_or(f.clone(), |x| x.min(f)));
                hi = Some(hi.map_or(c.clone(), |x| x.max(c)));
            }
        }
        Self { lo: lo.expect("set"), hi: hi.expect("set"), bits: self.bits }
    }

    pub fn div_int(&self, d: u64) -> Self {
        let d = BigInt::from(d);
        Self { lo: floor_div(&self.lo, &d), hi: ceil_div(&self.hi, &d), bits: self.bits }
    }

    pub fn mul_int(&self, k: i64) -> Self {
        let k = BigInt::from(k);
        let (a, b) = (&self.lo * &k, &self.hi * &k);
        Self { lo: a.clone().min(b.clone()), hi: a.max(b), bits: self.bits }
    }

    /// Square root of the non-negative part.
    pub fn sqrt(&self) -> Self {
        assert!(!self.hi.is_negative(), "square root of a negative interval");
        let s = pow2(self.bits);
        let lo_arg = self.lo.clone().max(BigInt::zero()) * &s;
        let hi_arg = &self.hi * &s;
        let lo = lo_arg.sqrt();
        let mut hi = hi_arg.sqrt();
        if &hi * &hi < hi_arg {
            hi += 1;
        }
        Self { lo, hi, bits: self.bits }
    }

    /// Largest absolute value in the interval.
    fn magnitude(&self) -> BigInt {
        self.lo.abs().max(self.hi.abs())
    }

    fn widen(&self, r: &BigInt) -> Self {
        Self { lo: &self.lo - r, hi: &self.hi + r, bits: self.bits }
    }

    /// Taylor series with the first omitted term as the error bound; the
    /// argument must lie in `[-1, 1]`.
    fn series(&self, first: Self, start: u64) -> Self {
        assert!(self.magnitude() <= pow2(self.bits), "trigonometric argument outside [-1, 1]");
        let x2 = self.square();
        let mut term = first;
        let mut sum = term.clone();
        let mut k = start;
        loop {
            term = term.mul(&x2).div_int((k + 1) * (k + 2)).neg();
            k += 2;
            let m = term.magnitude();
            if m <= BigInt::one() {
                return sum.widen(&(m + 1));
            }
            sum = sum.add(&term);
        }
    }

    pub fn sin(&self) -> Self {
        self.series(self.clone(), 1)
    }

    pub fn cos(&self) -> Self {
        self.series(Self::from_int(1, self.bits), 0)
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn lo_rational(&self) -> Rational {
        Rational::new(self.lo.clone(), pow2(self.bits))
    }

    pub fn hi_rational(&self) -> Rational {
        Rational::new(self.hi.clone(), pow2(self.bits))
    }

    pub fn mid_rational(&self) -> Rational {
        Rational::new(&self.lo + &self.hi, pow2(self.bits + 1))
    }

    pub fn to_f64(&self) -> f64 {
        self.mid_rational().to_f64().unwrap_or(f64::NAN)
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo_rational().to_f64().unwrap_or(f64::NAN)
    }

    pub fn width_f64(&self) -> f64 {
        Rational::new(&self.hi - &self.lo, pow2(self.bits)).to_f64().unwrap_or(f64::NAN)
    }

    pub fn contains(&self, r: &Rational) -> bool {
        &self.lo_rational() <= r && r <= &self.hi_rational()
    }
}

/// Rounds `r` to the nearest multiple of `10^-digits`.
pub fn round_decimal(r: &Rational, digits: u32) -> Rational {
    let scale = BigInt::from(10).pow(digits);
    let scaled = r * Rational::from_integer(scale.clone());
    let rounded = (scaled + Rational::new(BigInt::one(), BigInt::from(2))).floor();
    rounded / Rational::from_integer(scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rat;
    use proptest::prelude::*;

    fn encloses(i: &Interval, v: f64) -> bool {
        let tol = 1e-12;
        i.lo_f64() - tol <= v && v <= i.hi_rational().to_f64().unwrap() + tol
    }

    #[test]
    fn constants() {
        let two = Interval::from_int(2, 128);
        let s = two.sqrt();
        assert!(encloses(&s, std::f64::consts::SQRT_2));
        assert!(s.width_f64() < 1e-30);
        // sqrt(2)^2 encloses 2
        assert!(s.square().contains(&rat(2, 1)));
        let third = Interval::from_rational(&rat(1, 3), 64);
        assert!(third.contains(&rat(1, 3)));
        assert!(third.mul_int(3).contains(&rat(1, 1)));
    }

    #[test]
    fn trig() {
        for bits in [64, 200] {
            let x = Interval::from_rational(&rat(1, 1000), bits);
            let s = x.sin();
            let c = x.cos();
            assert!(encloses(&s, 0.001f64.sin()));
            assert!(encloses(&c, 0.001f64.cos()));
            // sin^2 + cos^2 encloses 1
            assert!(s.square().add(&c.square()).contains(&rat(1, 1)));
            assert!(s.width_f64() < 1e-15);
        }
        let one = Interval::from_int(1, 80);
        assert!(encloses(&one.sin(), 1f64.sin()));
        assert!(encloses(&one.cos(), 1f64.cos()));
    }

    #[test]
    fn rounding_to_decimals() {
        assert_eq!(round_decimal(&rat(1, 3), 3), rat(333, 1000));
        assert_eq!(round_decimal(&rat(2, 3), 3), rat(667, 1000));
        assert_eq!(round_decimal(&rat(-2, 3), 3), rat(-667, 1000));
    }

    proptest! {
        #[test]
        fn operations_enclose_exact_results(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
            let (x, y) = (rat(a, b), rat(c, d));
            let (ix, iy) = (Interval::from_rational(&x, 70), Interval::from_rational(&y, 70));
            prop_assert!(ix.add(&iy).contains(&(&x + &y)));
            prop_assert!(ix.sub(&iy).contains(&(&x - &y)));
            prop_assert!(ix.mul(&iy).contains(&(&x * &y)));
            prop_assert!(ix.square().contains(&(&x * &x)));
            if c != 0 {
                prop_assert!(ix.div(&iy).contains(&(&x / &y)));
            }
            let ax = Interval::from_rational(&(&x * &x), 70).sqrt();
            let abs = if x < rat(0, 1) { -x.clone() } else { x.clone() };
            prop_assert!(ax.contains(&abs));
        }
    }
}
