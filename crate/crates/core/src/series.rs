//! Truncated formal power series over exact rationals.
//!
//! A [`PowerSeries`] of order `T` holds the coefficients of `z^0..=z^T`.
//! Every operation truncates at the smaller order of its operands and never
//! touches indices beyond it.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Working truncation order used when none is given.
pub const DEFAULT_ORDER: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PowerSeries {
    coeffs: Vec<Rational>,
}

pub(crate) fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl PowerSeries {
    pub fn zero(order: usize) -> Self {
        PowerSeries {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Rational::one();
        s
    }

    /// Builds a series of the given order, zero-padding or truncating `coeffs`.
    pub fn from_coeffs(mut coeffs: Vec<Rational>, order: usize) -> Self {
        coeffs.resize(order + 1, Rational::zero());
        PowerSeries { coeffs }
    }

    pub fn from_integers<I, T>(coeffs: I, order: usize) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let v = coeffs
            .into_iter()
            .map(|c| Rational::from_integer(c.into()))
            .collect();
        Self::from_coeffs(v, order)
    }

    /// Exponential-sum input `Σ_{n≥1} a_n/n · zⁿ` for a sequence `a_1, a_2, …`.
    ///
    /// Missing terms beyond the supplied sequence are zero.
    pub fn log_sum(seq: &[BigInt], order: usize) -> Self {
        let mut s = Self::zero(order);
        for (i, a) in seq.iter().enumerate().take(order) {
            let n = i + 1;
            s.coeffs[n] = Rational::new(a.clone(), BigInt::from(n));
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Rational {
        &self.coeffs[i]
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::from_coeffs(self.coeffs[..=order.min(self.order())].to_vec(), order)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Exponential via `G' = F'·G`, i.e. `n·g_n = Σ_{k=1}^{n} k·f_k·g_{n-k}`.
    ///
    /// With `L` the common denominator of the `k·f_k`, the scaled values
    /// `h_n = n!·Lⁿ·g_n` obey an integer recurrence, so each coefficient is
    /// reduced once instead of once per term.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::ConstantTerm {
                op: "exp",
                expected: "0",
                found: self.coeffs[0].to_string(),
            });
        }
        let t = self.order();
        let kf: Vec<Rational> = (0..=t).map(|k| &self.coeffs[k] * rat(k as i64)).collect();
        let l = kf.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let a: Vec<BigInt> = kf.iter().map(|c| c.numer() * (&l / c.denom())).collect();
        let mut h = vec![BigInt::zero(); t + 1];
        h[0] = BigInt::one();
        let mut scale = BigInt::one();
        let mut g = Vec::with_capacity(t + 1);
        g.push(Rational::one());
        for n in 1..=t {
            // weight (n-1)!/(n-k)! · L^{k-1}
            let mut w = BigInt::one();
            let mut acc = BigInt::zero();
            for k in 1..=n {
                if !a[k].is_zero() && !h[n - k].is_zero() {
                    acc += &a[k] * &h[n - k] * &w;
                }
                if k < n {
                    w *= BigInt::from(n - k) * &l;
                }
            }
            scale *= BigInt::from(n) * &l;
            g.push(Rational::new(acc.clone(), scale.clone()));
            h[n] = acc;
        }
        Ok(PowerSeries { coeffs: g })
    }

    /// Logarithm via `F' = G'/G`, i.e. `n·f_n = n·g_n − Σ_{k=1}^{n-1} k·f_k·g_{n-k}`.
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::ConstantTerm {
                op: "log",
                expected: "1",
                found: self.coeffs[0].to_string(),
            });
        }
        let t = self.order();
        let g = &self.coeffs;
        let mut kf = vec![Rational::zero(); t + 1];
        for n in 1..=t {
            let mut acc = &g[n] * rat(n as i64);
            for k in 1..n {
                if !kf[k].is_zero() && !g[n - k].is_zero() {
                    acc -= &kf[k] * &g[n - k];
                }
            }
            kf[n] = acc;
        }
        let mut f = vec![Rational::zero(); t + 1];
        for n in 1..=t {
            f[n] = &kf[n] / rat(n as i64);
        }
        Ok(PowerSeries { coeffs: f })
    }

    /// `a(z^d)` truncated at the same order.
    pub fn substitute_power(&self, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("substitution power must be >= 1".into()));
        }
        let t = self.order();
        let mut out = Self::zero(t);
        for k in 0..=t / d {
            out.coeffs[k * d] = self.coeffs[k].clone();
        }
        Ok(out)
    }

    /// The unique b-th root with constant term 1, `exp(log(a)/b)`.
    pub fn root(&self, b: u32) -> Result<Self> {
        if b == 0 {
            return Err(Error::InvalidArgument("root index must be >= 1".into()));
        }
        if !self.coeffs[0].is_one() {
            return Err(Error::ConstantTerm {
                op: "root",
                expected: "1",
                found: self.coeffs[0].to_string(),
            });
        }
        if b == 1 {
            return Ok(self.clone());
        }
        self.log()?
            .scale(&Rational::new(BigInt::one(), BigInt::from(b)))
            .exp()
    }

    /// Integer power by repeated squaring.
    pub fn pow(&self, mut k: u32) -> Self {
        let mut acc = Self::one(self.order());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Index of the first coefficient where `self` and `other` differ, up to
    /// the smaller order.
    pub fn first_mismatch(&self, other: &Self) -> Option<usize> {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .position(|(a, b)| a != b)
    }
}

impl fmt::Debug for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PowerSeries[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "; O(z^{})]", self.order() + 1)
    }
}

impl Add for &PowerSeries {
    type Output = PowerSeries;

    fn add(self, rhs: &PowerSeries) -> PowerSeries {
        let t = self.order().min(rhs.order());
        PowerSeries {
            coeffs: (0..=t).map(|i| &self.coeffs[i] + &rhs.coeffs[i]).collect(),
        }
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;

    fn sub(self, rhs: &PowerSeries) -> PowerSeries {
        let t = self.order().min(rhs.order());
        PowerSeries {
            coeffs: (0..=t).map(|i| &self.coeffs[i] - &rhs.coeffs[i]).collect(),
        }
    }
}

impl Neg for &PowerSeries {
    type Output = PowerSeries;

    fn neg(self) -> PowerSeries {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// Cauchy product truncated at the smaller order.
impl Mul for &PowerSeries {
    type Output = PowerSeries;

    fn mul(self, rhs: &PowerSeries) -> PowerSeries {
        let t = self.order().min(rhs.order());
        let mut out = vec![Rational::zero(); t + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(t + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(t + 1 - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        PowerSeries { coeffs: out }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for PowerSeries {
            type Output = PowerSeries;
            fn $m(self, rhs: PowerSeries) -> PowerSeries {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn factorial(n: u64) -> BigInt {
        (1..=n).fold(BigInt::one(), |acc, k| acc * k)
    }

    fn geometric(order: usize) -> PowerSeries {
        PowerSeries::from_integers(vec![1; order + 1], order)
    }

    #[test]
    fn add_cancels_and_identity() {
        let a = PowerSeries::from_integers([1, 1], 6);
        let b = PowerSeries::from_integers([1, -1], 6);
        assert_eq!(&a + &b, PowerSeries::from_integers([2], 6));
        assert_eq!(&a + &PowerSeries::zero(6), a);
    }

    #[test]
    fn add_exp_pair_matches_termwise_oracle() {
        // e^z + e^{-z}, coefficients computed directly from n!
        let t = 8;
        let ez = PowerSeries::from_coeffs(
            (0..=t as u64).map(|n| Rational::new(BigInt::one(), factorial(n))).collect(),
            t,
        );
        let emz = PowerSeries::from_coeffs(
            (0..=t as u64)
                .map(|n| Rational::new(BigInt::from(if n % 2 == 0 { 1 } else { -1 }), factorial(n)))
                .collect(),
            t,
        );
        let sum = &ez + &emz;
        for n in 0..=t {
            let expected = if n % 2 == 0 {
                Rational::new(BigInt::from(2), factorial(n as u64))
            } else {
                Rational::zero()
            };
            assert_eq!(sum.coeff(n), &expected, "index {n}");
        }
    }

    #[test]
    fn mixed_orders_truncate_to_minimum() {
        let a = PowerSeries::from_integers([1, 2, 3], 4);
        let b = PowerSeries::from_integers([1, 1], 2);
        assert_eq!((&a + &b).order(), 2);
        assert_eq!((&a * &b).order(), 2);
    }

    #[test]
    fn mul_examples() {
        let t = 12;
        let one_minus_z = PowerSeries::from_integers([1, -1], t);
        assert_eq!(&one_minus_z * &geometric(t), PowerSeries::one(t));
        let f = PowerSeries::from_integers([3, -1, 4, 1, 5], t);
        assert_eq!(&f * &PowerSeries::one(t), f);
        let onez = PowerSeries::from_integers([1, 1], t);
        assert_eq!(&onez * &onez, PowerSeries::from_integers([1, 2, 1], t));
    }

    #[test]
    fn exp_examples() {
        let t = 16;
        assert_eq!(PowerSeries::zero(t).exp().unwrap(), PowerSeries::one(t));
        let mut s = PowerSeries::zero(t);
        for n in 1..=t {
            s.coeffs[n] = r(1, n as i64);
        }
        assert_eq!(s.exp().unwrap(), geometric(t));
        let z = PowerSeries::from_integers([0, 1], t);
        let e = z.exp().unwrap();
        for n in 0..=t {
            assert_eq!(e.coeff(n), &Rational::new(BigInt::one(), factorial(n as u64)));
        }
    }

    #[test]
    fn exp_rejects_nonzero_constant() {
        let s = PowerSeries::from_integers([1, 1], 4);
        assert!(matches!(s.exp(), Err(Error::ConstantTerm { op: "exp", .. })));
    }

    #[test]
    fn log_examples() {
        let t = 16;
        assert_eq!(PowerSeries::one(t).log().unwrap(), PowerSeries::zero(t));
        let f = PowerSeries::from_integers([0, 1, 0, 1], t);
        assert_eq!(f.exp().unwrap().log().unwrap(), f);
        let l = PowerSeries::from_integers([1, -1], t).log().unwrap();
        assert_eq!(l.coeff(0), &Rational::zero());
        for n in 1..=t {
            assert_eq!(l.coeff(n), &r(-1, n as i64));
        }
        assert!(PowerSeries::from_integers([2, 1], t).log().is_err());
    }

    #[test]
    fn substitute_power_examples() {
        let t = 10;
        let s = PowerSeries::from_integers([1, 1], t);
        assert_eq!(s.substitute_power(2).unwrap(), PowerSeries::from_integers([1, 0, 1], t));
        assert_eq!(s.substitute_power(1).unwrap(), s);
        let g = geometric(t).substitute_power(3).unwrap();
        for n in 0..=t {
            let expected = if n % 3 == 0 { 1 } else { 0 };
            assert_eq!(g.coeff(n), &rat(expected));
        }
        assert!(s.substitute_power(0).is_err());
    }

    #[test]
    fn root_examples() {
        let t = 16;
        let onez = PowerSeries::from_integers([1, 1], t);
        assert_eq!(onez.pow(2).root(2).unwrap(), onez);
        assert_eq!(onez.root(1).unwrap(), onez);
        // (1-z^2)^{-2} is the square of Σ z^{2n}
        let even = geometric(t).substitute_power(2).unwrap();
        let target = even.pow(2);
        assert_eq!(target.root(2).unwrap(), even);
        assert!(PowerSeries::from_integers([3], t).root(2).is_err());
    }

    fn arb_series(order: usize, constant: i64) -> impl Strategy<Value = PowerSeries> {
        prop::collection::vec((-9i64..=9, 1i64..=4), order).prop_map(move |v| {
            let mut c = vec![rat(constant)];
            c.extend(v.into_iter().map(|(n, d)| r(n, d)));
            PowerSeries::from_coeffs(c, order)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn log_inverts_exp(f in arb_series(12, 0)) {
            prop_assert_eq!(f.exp().unwrap().log().unwrap(), f);
        }

        #[test]
        fn root_then_power_is_identity(f in arb_series(10, 1), b in 1u32..=8) {
            prop_assert_eq!(f.root(b).unwrap().pow(b), f);
        }

        #[test]
        fn mul_commutative_associative(
            a in arb_series(10, 2), b in arb_series(10, -1), c in arb_series(10, 0)
        ) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn substitution_composes(f in arb_series(24, 1), a in 1usize..=4, b in 1usize..=4) {
            let lhs = f.substitute_power(a).unwrap().substitute_power(b).unwrap();
            prop_assert_eq!(lhs, f.substitute_power(a * b).unwrap());
        }
    }
}
