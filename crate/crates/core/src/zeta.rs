//! Closed-form Nielsen zeta functions and their verification against the
//! defining exponential sum.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::descriptor::{divisors, FiberAction, MapDescriptor, MarkovTerm};
use crate::error::{Error, Result};
use crate::radical::{detect_radical, Polynomial, RadicalExpr};
use crate::series::{PowerSeries, Rational, DEFAULT_ORDER};

/// Möbius function.
pub fn moebius(d: u64) -> i8 {
    assert!(d >= 1, "moebius is defined on positive integers");
    let mut n = d;
    let mut sign = 1i8;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Memoized [`moebius`].
#[derive(Debug, Default, Clone)]
pub struct MoebiusTable {
    cache: HashMap<u64, i8>,
}

impl MoebiusTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, d: u64) -> i8 {
        *self.cache.entry(d).or_insert_with(|| moebius(d))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaOptions {
    /// Series order used when a closed form has to be reconstructed.
    pub order: usize,
    pub max_den_degree: usize,
    /// Root indices tried when reconstructing torus closed forms.
    pub radical_candidates: Vec<u32>,
}

impl Default for ZetaOptions {
    fn default() -> Self {
        ZetaOptions {
            order: DEFAULT_ORDER,
            max_den_degree: 8,
            radical_candidates: vec![1, 2],
        }
    }
}

/// `P(d) = Σ_{d₁|d} μ(d₁) N_{d/d₁}` for every divisor `d` of the period,
/// cross-checked against the recursion `P(d) = N_d − Σ_{d₁|d, d₁≠d} P(d₁)`.
pub fn periodic_p_values(period: u64, nielsen: &BTreeMap<u64, BigInt>) -> Result<BTreeMap<u64, BigInt>> {
    let lookup = |d: u64| {
        nielsen
            .get(&d)
            .ok_or_else(|| Error::InvalidDescriptor(format!("periodic: missing N_{d}")))
    };
    let mut mu = MoebiusTable::new();
    let mut p = BTreeMap::new();
    for d in divisors(period) {
        let mut v = BigInt::zero();
        for d1 in divisors(d) {
            match mu.get(d1) {
                0 => {}
                s => v += lookup(d / d1)? * s,
            }
        }
        p.insert(d, v);
    }
    for d in divisors(period) {
        let mut rec = lookup(d)?.clone();
        for d1 in divisors(d) {
            if d1 != d {
                rec -= &p[&d1];
            }
        }
        assert_eq!(rec, p[&d], "Möbius sum and recursion disagree on P({d})");
    }
    Ok(p)
}

/// `∏_{d|m} (1 − z^d)^{−P(d)/d}`.
pub fn periodic_zeta(d: &MapDescriptor) -> Result<RadicalExpr> {
    let MapDescriptor::Periodic { period, nielsen } = d else {
        return Err(wrong_kind("periodic", d));
    };
    let p = periodic_p_values(*period, nielsen)?;
    Ok(RadicalExpr::from_factors(p.into_iter().map(|(d, pd)| {
        (
            Polynomial::one_minus_z_pow(d as usize),
            -Rational::new(pd, BigInt::from(d)),
        )
    })))
}

/// `(Z_base(z))² / Z_{base²}(z²)` when the fibre orientation is reversed,
/// and 1 when it is preserved.
pub fn seifert_zeta(d: &MapDescriptor, opts: &ZetaOptions) -> Result<RadicalExpr> {
    let MapDescriptor::SeifertFibered { fiber_action, base } = d else {
        return Err(wrong_kind("seifert_fibered", d));
    };
    match fiber_action {
        FiberAction::Preserving => Ok(RadicalExpr::one()),
        FiberAction::Reversing => {
            let squared = zeta_with(base, opts)?.pow(&Rational::from_integer(BigInt::from(2)));
            let second = zeta_with(&base.iterate(2)?, &half_order(opts, 2))?.substitute_power(2)?;
            Ok(squared.mul(&second.pow(&-Rational::one())))
        }
    }
}

/// `∏ det(I − z·A_i)^{−sign_i}`.
pub fn subshift_zeta(d: &MapDescriptor, order: usize) -> Result<RadicalExpr> {
    let MapDescriptor::SubshiftMarkov { terms } = d else {
        return Err(wrong_kind("subshift_markov", d));
    };
    d.validate(order)?;
    Ok(RadicalExpr::from_factors(terms.iter().map(|MarkovTerm { matrix, sign }| {
        (
            matrix.det_one_minus_z(),
            Rational::from_integer(BigInt::from(-sign.as_i64())),
        )
    })))
}

/// Closed form for torus maps by reconstruction from the exponential sum.
fn torus_zeta(d: &MapDescriptor, opts: &ZetaOptions) -> Result<RadicalExpr> {
    let order = opts.order.max(2 * opts.max_den_degree + 2);
    d.validate(order)?;
    let s = exp_sum_series(d, order)?;
    detect_radical(&s, &opts.radical_candidates, opts.max_den_degree)?.ok_or_else(|| {
        Error::ReconstructionFailed {
            max_den_degree: opts.max_den_degree,
            candidates: opts.radical_candidates.clone(),
        }
    })
}

/// Closed-form Nielsen zeta function with default options.
pub fn zeta(d: &MapDescriptor) -> Result<RadicalExpr> {
    zeta_with(d, &ZetaOptions::default())
}

pub fn zeta_with(d: &MapDescriptor, opts: &ZetaOptions) -> Result<RadicalExpr> {
    match d {
        MapDescriptor::Periodic { .. } => {
            d.validate(0)?;
            periodic_zeta(d)
        }
        MapDescriptor::TorusLinear { .. } => torus_zeta(d, opts),
        MapDescriptor::SubshiftMarkov { .. } => subshift_zeta(d, opts.order),
        MapDescriptor::SeifertFibered { .. } => seifert_zeta(d, opts),
        MapDescriptor::Decomposition { pieces } => {
            if pieces.is_empty() {
                return Err(Error::InvalidDescriptor("decomposition: pieces list must be nonempty".into()));
            }
            let mut acc = RadicalExpr::one();
            for p in pieces {
                let n = p.return_time;
                if n == 0 {
                    return Err(Error::InvalidDescriptor("decomposition: return_time must be >= 1".into()));
                }
                let piece = zeta_with(&p.map, &half_order(opts, n as usize))?
                    .substitute_power(n as usize)?
                    .pow(&Rational::new(BigInt::one(), BigInt::from(n)));
                acc = acc.mul(&piece);
            }
            Ok(acc)
        }
    }
}

// A factor later evaluated at z^k only needs order T/k.
fn half_order(opts: &ZetaOptions, k: usize) -> ZetaOptions {
    ZetaOptions {
        order: opts.order / k,
        ..opts.clone()
    }
}

/// `exp(Σ_{n≤T} N(fⁿ)/n · zⁿ)`, the defining series.
pub fn exp_sum_series(d: &MapDescriptor, order: usize) -> Result<PowerSeries> {
    let seq = d.nielsen_sequence(order)?;
    PowerSeries::log_sum(&seq, order).exp()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub order: usize,
    /// First index where closed form and exponential sum disagree.
    pub first_mismatch: Option<usize>,
}

impl VerifyReport {
    pub fn agrees(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// Compares a closed form with the exponential sum of `d` to order `order`.
pub fn verify_closed_form(expr: &RadicalExpr, d: &MapDescriptor, order: usize) -> Result<VerifyReport> {
    let lhs = expr.expand(order)?;
    let rhs = exp_sum_series(d, order)?;
    Ok(VerifyReport {
        order,
        first_mismatch: lhs.first_mismatch(&rhs),
    })
}

/// Builds the closed form and checks it against the defining sum.
pub fn verify_zeta(d: &MapDescriptor, order: usize) -> Result<VerifyReport> {
    let opts = ZetaOptions {
        order: order.max(DEFAULT_ORDER),
        ..ZetaOptions::default()
    };
    verify_closed_form(&zeta_with(d, &opts)?, d, order)
}

/// Smallest integer power of a periodic zeta function that is rational:
/// `lcm{d : d | m, P(d) ≠ 0}`.
pub fn periodic_radical_bound(d: &MapDescriptor) -> Result<u64> {
    let MapDescriptor::Periodic { period, nielsen } = d else {
        return Err(wrong_kind("periodic", d));
    };
    Ok(periodic_p_values(*period, nielsen)?
        .into_iter()
        .filter(|(_, p)| !p.is_zero())
        .fold(1u64, |acc, (d, _)| acc.lcm(&d)))
}

fn wrong_kind(expected: &str, d: &MapDescriptor) -> Error {
    Error::InvalidArgument(format!("expected a {expected} descriptor, got {}", d.kind()))
}
