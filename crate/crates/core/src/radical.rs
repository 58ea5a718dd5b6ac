//! Closed forms `∏ P_i(z)^{e_i}` with integer polynomials and rational
//! exponents, and their reconstruction from truncated series.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::series::{PowerSeries, Rational};

/// Integer polynomial, lowest degree first, no trailing zeros.
///
/// The zero polynomial has an empty coefficient list.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<BigInt>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_i64s(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn one() -> Self {
        Polynomial {
            coeffs: vec![BigInt::one()],
        }
    }

    /// `1 − z^d`
    pub fn one_minus_z_pow(d: usize) -> Self {
        let mut c = vec![BigInt::zero(); d + 1];
        c[0] = BigInt::one();
        c[d] = -BigInt::one();
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeffs.first().cloned().unwrap_or_default()
    }

    pub fn eval(&self, z: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * z + c)
    }

    pub fn substitute_power(&self, d: usize) -> Self {
        if self.coeffs.is_empty() || d == 1 {
            return self.clone();
        }
        let mut c = vec![BigInt::zero(); self.degree() * d + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            c[i * d] = a.clone();
        }
        Self::new(c)
    }

    pub fn to_series(&self, order: usize) -> PowerSeries {
        PowerSeries::from_integers(self.coeffs.iter().take(order + 1).cloned(), order)
    }

    /// Coefficients `u_n = n·[zⁿ] log P` for `n = 0..=order`, which are
    /// integers when `P(0) = 1`: `u_n = n·p_n − Σ_{j=1}^{n-1} p_j·u_{n−j}`.
    pub fn log_derivative_coeffs(&self, order: usize) -> Result<Vec<BigInt>> {
        if !self.constant_term().is_one() {
            return Err(Error::ConstantTerm {
                op: "log",
                expected: "1",
                found: format!("{} in factor ({self})", self.constant_term()),
            });
        }
        let p = &self.coeffs;
        let mut u = vec![BigInt::zero(); order + 1];
        for n in 1..=order {
            let mut acc = if n < p.len() { &p[n] * BigInt::from(n) } else { BigInt::zero() };
            for j in 1..n.min(p.len()) {
                if !p[j].is_zero() {
                    acc -= &p[j] * &u[n - j];
                }
            }
            u[n] = acc;
        }
        Ok(u)
    }

    /// Exact quotient `self / divisor` in `Z[z]` for a divisor with constant
    /// term ±1. Returns `None` when the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Polynomial) -> Option<Polynomial> {
        if self.is_zero() {
            return Some(Polynomial::default());
        }
        let d0 = divisor.coeffs.first()?;
        if !d0.abs().is_one() || divisor.degree() > self.degree() {
            return if divisor.is_one() { Some(self.clone()) } else { None };
        }
        let qdeg = self.degree() - divisor.degree();
        let mut rem = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); qdeg + 1];
        for i in 0..=qdeg {
            let c = &rem[i] * d0;
            if !c.is_zero() {
                for (j, b) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] -= &c * b;
                }
            }
            q[i] = c;
        }
        if rem.iter().all(Zero::is_zero) {
            Some(Polynomial::new(q))
        } else {
            None
        }
    }
}

/// Graded lexicographic: by degree, then coefficient sequence from the
/// constant term upward.
impl Ord for Polynomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl PartialOrd for Polynomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = BigInt::zero();
        Polynomial::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::default();
        }
        let mut c = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Polynomial::new(c)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}")?;
                    }
                    write!(f, "z")?;
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

/// `∏ P_i(z)^{e_i}` over a canonical (sorted, deduplicated) factor map.
///
/// Zero exponents and the constant polynomial 1 never appear as keys, so
/// equal products of the same factors compare equal.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RadicalExpr {
    factors: BTreeMap<Polynomial, Rational>,
}

impl RadicalExpr {
    /// The constant 1.
    pub fn one() -> Self {
        Self::default()
    }

    pub fn factor(p: Polynomial, e: Rational) -> Self {
        let mut r = Self::one();
        r.insert(p, e);
        r
    }

    pub fn from_factors<I: IntoIterator<Item = (Polynomial, Rational)>>(it: I) -> Self {
        let mut r = Self::one();
        for (p, e) in it {
            r.insert(p, e);
        }
        r
    }

    /// Multiplies in `p^e`, merging exponents of identical polynomials.
    pub fn insert(&mut self, p: Polynomial, e: Rational) {
        if e.is_zero() || p.is_one() {
            return;
        }
        let merged = match self.factors.remove(&p) {
            Some(old) => old + e,
            None => e,
        };
        if !merged.is_zero() {
            self.factors.insert(p, merged);
        }
    }

    pub fn factors(&self) -> impl Iterator<Item = (&Polynomial, &Rational)> {
        self.factors.iter()
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// All exponents integral, i.e. a rational function.
    pub fn is_rational(&self) -> bool {
        self.factors.values().all(|e| e.is_integer())
    }

    /// Least common multiple of the exponent denominators: the smallest
    /// integer power of this expression that is a rational function.
    pub fn radical_index(&self) -> BigInt {
        self.factors
            .values()
            .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (p, e) in &other.factors {
            r.insert(p.clone(), e.clone());
        }
        r
    }

    pub fn pow(&self, q: &Rational) -> Self {
        Self::from_factors(self.factors.iter().map(|(p, e)| (p.clone(), e * q)))
    }

    pub fn substitute_power(&self, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("substitution power must be >= 1".into()));
        }
        Ok(Self::from_factors(
            self.factors
                .iter()
                .map(|(p, e)| (p.substitute_power(d), e.clone())),
        ))
    }

    /// Series expansion `exp(Σ e_i · log P_i(z))` to order `order`.
    pub fn expand(&self, order: usize) -> Result<PowerSeries> {
        let mut kf = vec![Rational::zero(); order + 1];
        for (p, e) in &self.factors {
            for (n, u) in p.log_derivative_coeffs(order)?.into_iter().enumerate().skip(1) {
                if !u.is_zero() {
                    kf[n] += e * Rational::from_integer(u);
                }
            }
        }
        let coeffs = kf
            .into_iter()
            .enumerate()
            .map(|(n, c)| if n == 0 { c } else { c / Rational::from_integer(n.into()) })
            .collect();
        PowerSeries::from_coeffs(coeffs, order).exp()
    }
}

impl fmt::Display for RadicalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " · ")?;
            }
            write!(f, "({p})^({e})")?;
        }
        Ok(())
    }
}

impl fmt::Debug for RadicalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadicalExpr({self})")
    }
}

/// `numerator / denominator` with `denominator(0) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    pub numerator: Polynomial,
    pub denominator: Polynomial,
}

impl RationalFunction {
    pub fn to_radical(&self, b: u32) -> RadicalExpr {
        let inv = Rational::new(BigInt::one(), BigInt::from(b));
        RadicalExpr::from_factors([
            (self.numerator.clone(), inv.clone()),
            (self.denominator.clone(), -inv),
        ])
    }
}

/// Finds `P/Q` over `Z[z]` with `Q(0) = 1`, `deg Q ≤ max_den_degree` and
/// `deg P ≤ max_den_degree` whose expansion matches every coefficient of `s`.
///
/// Denominator degrees are tried in increasing order, so the first hit has
/// minimal denominator degree. `Ok(None)` means no such fraction exists at
/// this bound.
pub fn reconstruct_rational(s: &PowerSeries, max_den_degree: usize) -> Result<Option<RationalFunction>> {
    reconstruct_rational_with(s, max_den_degree, max_den_degree)
}

/// [`reconstruct_rational`] with an independent numerator degree bound.
pub fn reconstruct_rational_with(
    s: &PowerSeries,
    max_num_degree: usize,
    max_den_degree: usize,
) -> Result<Option<RationalFunction>> {
    let t = s.order();
    if t < max_num_degree + max_den_degree + 1 {
        return Err(Error::InvalidArgument(format!(
            "reconstruction needs at least {} coefficients, series has {}",
            max_num_degree + max_den_degree + 2,
            t + 1
        )));
    }
    let c = s.coeffs();
    // P/Q over Z[z] with Q(0) = 1 expands to an integer series
    if !c.iter().all(|x| x.is_integer()) {
        return Ok(None);
    }
    let p = max_num_degree;
    for q in 0..=max_den_degree {
        // Σ_{j=1}^{q} Q_j c_{k-j} = −c_k for every k in p+1..=t
        let rows: Vec<Vec<Rational>> = (p + 1..=t)
            .map(|k| (1..=q).map(|j| c[k - j].clone()).collect())
            .collect();
        let rhs: Vec<Rational> = (p + 1..=t).map(|k| -&c[k]).collect();
        let Some(tail) = solve_consistent(rows, rhs, q) else {
            continue;
        };
        let mut den = vec![Rational::one()];
        den.extend(tail);
        let Some(den) = integral(&den) else {
            return Ok(None);
        };
        let den = Polynomial::new(den);
        let num: Vec<Rational> = (0..=p)
            .map(|k| {
                (0..=k.min(q))
                    .map(|j| Rational::from_integer(den.coeffs().get(j).cloned().unwrap_or_default()) * &c[k - j])
                    .sum()
            })
            .collect();
        let Some(num) = integral(&num) else {
            return Ok(None);
        };
        let f = RationalFunction {
            numerator: Polynomial::new(num),
            denominator: den,
        };
        debug_assert_eq!(f.expand(t).as_ref(), Some(s));
        return Ok(Some(f));
    }
    Ok(None)
}

impl RationalFunction {
    /// Series of the quotient by long division; `None` if `denominator(0) ≠ 1`.
    pub fn expand(&self, order: usize) -> Option<PowerSeries> {
        let q = self.denominator.coeffs();
        if q.first().map(|c| c.is_one()) != Some(true) {
            return None;
        }
        let p = self.numerator.coeffs();
        let mut out: Vec<BigInt> = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut v = p.get(k).cloned().unwrap_or_default();
            for j in 1..=k.min(q.len().saturating_sub(1)) {
                v -= &q[j] * &out[k - j];
            }
            out.push(v);
        }
        Some(PowerSeries::from_integers(out, order))
    }
}

fn integral(v: &[Rational]) -> Option<Vec<BigInt>> {
    v.iter()
        .map(|x| x.is_integer().then(|| x.to_integer()))
        .collect()
}

/// Solves the (possibly overdetermined) system exactly. Free variables are
/// set to zero; `None` when inconsistent.
fn solve_consistent(mut rows: Vec<Vec<Rational>>, mut rhs: Vec<Rational>, ncols: usize) -> Option<Vec<Rational>> {
    let nrows = rows.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(pr) = (r..nrows).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        rhs.swap(r, pr);
        let inv = rows[r][col].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        rhs[r] *= &inv;
        for i in 0..nrows {
            if i == r || rows[i][col].is_zero() {
                continue;
            }
            let f = rows[i][col].clone();
            for j in col..ncols {
                let v = &f * &rows[r][j];
                rows[i][j] -= v;
            }
            let v = &f * &rhs[r];
            rhs[i] -= v;
        }
        pivots.push(col);
        r += 1;
        if r == nrows {
            break;
        }
    }
    if rhs[r..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut sol = vec![Rational::zero(); ncols];
    for (i, &col) in pivots.iter().enumerate() {
        sol[col] = rhs[i].clone();
    }
    Some(sol)
}

/// Finds `(P/Q)^{1/b}` for the first `b` in `candidates` such that `s^b`
/// reconstructs as a rational function. The result re-expands to `s`.
pub fn detect_radical(s: &PowerSeries, candidates: &[u32], max_den_degree: usize) -> Result<Option<RadicalExpr>> {
    if !s.coeff(0).is_one() {
        return Err(Error::ConstantTerm {
            op: "detect_radical",
            expected: "1",
            found: s.coeff(0).to_string(),
        });
    }
    let mut power = s.clone();
    let mut at = 1;
    for &b in candidates.iter().filter(|&&b| b > 0) {
        // candidates are usually ascending; reuse the last power when they are
        if b >= at {
            power = &power * &s.pow(b - at);
        } else {
            power = s.pow(b);
        }
        at = b;
        if let Some(f) = reconstruct_rational(&power, max_den_degree)? {
            let expr = f.to_radical(b);
            if expr.expand(s.order())? == *s {
                return Ok(Some(expr));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn poly(c: &[i64]) -> Polynomial {
        Polynomial::from_i64s(c)
    }

    #[test]
    fn display_forms() {
        assert_eq!(poly(&[1, -1, -1]).to_string(), "1 - z - z^2");
        assert_eq!(poly(&[1, 0, 3]).to_string(), "1 + 3z^2");
        let e = RadicalExpr::from_factors([(poly(&[1, -1]), r(-1, 1)), (poly(&[1, 0, -1]), r(-1, 2))]);
        assert_eq!(e.to_string(), "(1 - z)^(-1) · (1 - z^2)^(-1/2)");
        assert_eq!(RadicalExpr::one().to_string(), "1");
    }

    #[test]
    fn graded_order() {
        assert!(poly(&[1, -1]) < poly(&[1, 0, -1]));
        assert!(poly(&[1, -2]) < poly(&[1, -1]));
    }

    #[test]
    fn expand_examples() {
        let t = 20;
        let geo = RadicalExpr::factor(poly(&[1, -1]), r(-1, 1)).expand(t).unwrap();
        assert_eq!(geo, PowerSeries::from_integers(vec![1; t + 1], t));
        assert_eq!(RadicalExpr::one().expand(t).unwrap(), PowerSeries::one(t));
        let both = RadicalExpr::from_factors([(poly(&[1, -1]), r(-1, 1)), (poly(&[1, 0, -1]), r(-1, 1))]);
        // oracle: convolution of Σ z^n with Σ z^{2n}
        let oracle: Vec<i64> = (0..=t as i64).map(|n| n / 2 + 1).collect();
        assert_eq!(both.expand(t).unwrap(), PowerSeries::from_integers(oracle, t));
    }

    #[test]
    fn expand_rejects_bad_constant() {
        let e = RadicalExpr::factor(poly(&[2, 1]), r(1, 1));
        assert!(matches!(e.expand(4), Err(Error::ConstantTerm { .. })));
    }

    #[test]
    fn mul_pow_substitute() {
        let a = RadicalExpr::factor(poly(&[1, -1]), r(-1, 1));
        let b = RadicalExpr::factor(poly(&[1, -1]), r(1, 1));
        assert!(a.mul(&b).is_one());
        assert_eq!(a.mul(&RadicalExpr::one()), a);
        let c = RadicalExpr::factor(poly(&[1, -1]), r(-2, 1));
        let d = RadicalExpr::factor(poly(&[1, 0, -1]), r(1, 1));
        let cd = c.mul(&d);
        assert_eq!(cd.len(), 2);
        assert_eq!(cd, RadicalExpr::from_factors([(poly(&[1, 0, -1]), r(1, 1)), (poly(&[1, -1]), r(-2, 1))]));

        let sq = RadicalExpr::factor(poly(&[1, 0, -1]), r(-2, 1));
        assert_eq!(sq.pow(&r(1, 2)), RadicalExpr::factor(poly(&[1, 0, -1]), r(-1, 1)));
        assert_eq!(cd.pow(&r(1, 1)), cd);
        assert!(cd.pow(&r(0, 1)).is_one());

        assert_eq!(a.substitute_power(2).unwrap(), RadicalExpr::factor(poly(&[1, 0, -1]), r(-1, 1)));
        assert_eq!(cd.substitute_power(1).unwrap(), cd);
        let g = RadicalExpr::factor(poly(&[1, -1, -1]), r(-1, 1));
        assert_eq!(
            g.substitute_power(3).unwrap(),
            RadicalExpr::factor(poly(&[1, 0, 0, -1, 0, 0, -1]), r(-1, 1))
        );
    }

    #[test]
    fn reconstruct_geometric() {
        let s = PowerSeries::from_integers(vec![1; 20], 19);
        let f = reconstruct_rational(&s, 4).unwrap().unwrap();
        assert_eq!(f.numerator, Polynomial::one());
        assert_eq!(f.denominator, poly(&[1, -1]));
    }

    #[test]
    fn reconstruct_round_trip() {
        let e = RadicalExpr::from_factors([(poly(&[1, 1]), r(2, 1)), (poly(&[1, -1]), r(-2, 1))]);
        let s = e.expand(32).unwrap();
        let f = reconstruct_rational(&s, 4).unwrap().unwrap();
        assert_eq!(f.numerator, poly(&[1, 2, 1]));
        assert_eq!(f.denominator, poly(&[1, -2, 1]));
    }

    #[test]
    fn reconstruct_rejects_non_rational() {
        // exp(Σ 2^n/n z^n + Σ z^{n²}/n)
        let t = 64;
        let mut l = PowerSeries::log_sum(&(1..=t as u32).map(|n| BigInt::from(2).pow(n)).collect::<Vec<_>>(), t);
        let mut extra = vec![Rational::zero(); t + 1];
        for n in 1..=8usize {
            extra[n * n] += r(1, n as i64);
        }
        l = &l + &PowerSeries::from_coeffs(extra, t);
        let s = l.exp().unwrap();
        assert_eq!(reconstruct_rational(&s, 4).unwrap(), None);
    }

    #[test]
    fn reconstruct_needs_enough_terms() {
        let s = PowerSeries::from_integers([1, 1, 1], 2);
        assert!(reconstruct_rational(&s, 4).is_err());
    }

    #[test]
    fn detect_radical_examples() {
        let half = RadicalExpr::factor(poly(&[1, 0, -1]), r(-1, 2));
        let s = half.expand(40).unwrap();
        assert_eq!(detect_radical(&s, &[1, 2], 6).unwrap(), Some(half));

        let geo = PowerSeries::from_integers(vec![1; 41], 40);
        assert_eq!(
            detect_radical(&geo, &[1], 6).unwrap(),
            Some(RadicalExpr::factor(poly(&[1, -1]), r(-1, 1)))
        );

        let cube = RadicalExpr::factor(poly(&[1, -1]), r(-1, 3)).expand(40).unwrap();
        assert_eq!(detect_radical(&cube, &[1, 2], 6).unwrap(), None);
        assert!(detect_radical(&cube, &[1, 2, 3], 6).unwrap().is_some());
    }

    fn arb_poly(max_deg: usize) -> impl Strategy<Value = Polynomial> {
        prop::collection::vec(-3i64..=3, 0..=max_deg).prop_map(|mut v| {
            v.insert(0, 1);
            Polynomial::from_i64s(&v)
        })
    }

    fn arb_expr(exp_den: i64) -> impl Strategy<Value = RadicalExpr> {
        prop::collection::vec((arb_poly(3), -3i64..=3), 0..=3).prop_map(move |fs| {
            RadicalExpr::from_factors(fs.into_iter().map(|(p, e)| (p, r(e, exp_den))))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn polynomial_log_matches_series_log(p in arb_poly(6)) {
            let t = 20;
            let general = p.to_series(t).log().unwrap();
            let u = p.log_derivative_coeffs(t).unwrap();
            for n in 1..=t {
                prop_assert_eq!(general.coeff(n) * Rational::from_integer(n.into()), Rational::from_integer(u[n].clone()));
            }
        }

        #[test]
        fn expand_is_multiplicative(a in arb_expr(2), b in arb_expr(3)) {
            let t = 16;
            prop_assert_eq!(a.mul(&b).expand(t).unwrap(), &a.expand(t).unwrap() * &b.expand(t).unwrap());
        }

        #[test]
        fn pow_matches_series_root(a in arb_expr(1), b in 1u32..=4) {
            let t = 16;
            let lhs = a.pow(&r(1, b as i64)).expand(t).unwrap();
            prop_assert_eq!(lhs, a.expand(t).unwrap().root(b).unwrap());
        }

        #[test]
        fn integer_exponent_forms_reconstruct(a in arb_expr(1)) {
            let total: usize = a.factors().map(|(p, e)| p.degree() * e.to_integer().abs().to_string().parse::<usize>().unwrap()).sum();
            prop_assume!(total <= 10);
            let s = a.expand(2 * 10 + 4).unwrap();
            let f = reconstruct_rational(&s, 10).unwrap().expect("rational form must reconstruct");
            prop_assert_eq!(f.expand(s.order()).unwrap(), s);
        }
    }
}
