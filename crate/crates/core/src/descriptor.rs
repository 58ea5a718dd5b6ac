//! Homeomorphisms described as composable building blocks, and the Nielsen
//! number sequences `N(fⁿ)` they induce.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FiberAction {
    Preserving,
    Reversing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// One signed transition matrix; fixed points of the n-th iterate are
/// counted by `sign · tr(Aⁿ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MarkovTerm {
    pub matrix: IntMatrix,
    pub sign: Sign,
}

/// A piece of a decomposition. `map` describes the return map `φ^{n_j}`
/// restricted to the piece, where `n_j` is `return_time`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Piece {
    pub return_time: u64,
    pub map: MapDescriptor,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MapDescriptor {
    /// `f^m = id`; `nielsen` maps each divisor `d` of `m` to `N(f^d)`.
    Periodic {
        period: u64,
        nielsen: BTreeMap<u64, BigInt>,
    },
    /// Linear homeomorphism of the torus induced by `matrix`.
    TorusLinear { matrix: IntMatrix },
    /// Pseudo-Anosov map given by signed Markov transition matrices.
    SubshiftMarkov { terms: Vec<MarkovTerm> },
    SeifertFibered {
        fiber_action: FiberAction,
        base: Box<MapDescriptor>,
    },
    Decomposition { pieces: Vec<Piece> },
}

pub fn divisors(m: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= m {
        if m.is_multiple_of(d) {
            small.push(d);
            if d * d != m {
                large.push(m / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

impl MapDescriptor {
    pub fn periodic<I: IntoIterator<Item = (u64, i64)>>(period: u64, table: I) -> Self {
        MapDescriptor::Periodic {
            period,
            nielsen: table.into_iter().map(|(d, n)| (d, BigInt::from(n))).collect(),
        }
    }

    /// Period-1 map with `N(fⁿ) = c` for all n.
    pub fn constant(c: i64) -> Self {
        Self::periodic(1, [(1, c)])
    }

    pub fn seifert(fiber_action: FiberAction, base: MapDescriptor) -> Self {
        MapDescriptor::SeifertFibered {
            fiber_action,
            base: Box::new(base),
        }
    }

    pub fn subshift(matrix: IntMatrix) -> Self {
        MapDescriptor::SubshiftMarkov {
            terms: vec![MarkovTerm {
                matrix,
                sign: Sign::Plus,
            }],
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MapDescriptor::Periodic { .. } => "periodic",
            MapDescriptor::TorusLinear { .. } => "torus_linear",
            MapDescriptor::SubshiftMarkov { .. } => "subshift_markov",
            MapDescriptor::SeifertFibered { .. } => "seifert_fibered",
            MapDescriptor::Decomposition { .. } => "decomposition",
        }
    }

    /// Checks the structural invariants, and the sequence invariants
    /// (nonnegative subshift counts, nondegenerate torus iterates) for all
    /// iterates up to `order`.
    pub fn validate(&self, order: usize) -> Result<()> {
        match self {
            MapDescriptor::Periodic { period, nielsen } => {
                if *period == 0 {
                    return Err(invalid("periodic: period must be >= 1"));
                }
                let divs = divisors(*period);
                let keys: Vec<u64> = nielsen.keys().copied().collect();
                if keys != divs {
                    return Err(invalid(format!(
                        "periodic: nielsen table must be keyed by exactly the divisors {divs:?} of {period}, got {keys:?}"
                    )));
                }
                if let Some((d, v)) = nielsen.iter().find(|(_, v)| v.is_negative()) {
                    return Err(invalid(format!("periodic: N_{d} = {v} is negative")));
                }
                Ok(())
            }
            MapDescriptor::TorusLinear { matrix } => {
                if !matrix.det().abs().is_one() {
                    return Err(invalid(format!(
                        "torus_linear: |det A| must be 1, got det = {}",
                        matrix.det()
                    )));
                }
                let mut power = IntMatrix::identity(matrix.size());
                for n in 1..=order as u64 {
                    power = &power * matrix;
                    if power.minus_scalar(1).det().is_zero() {
                        return Err(Error::DegenerateIterate { n });
                    }
                }
                Ok(())
            }
            MapDescriptor::SubshiftMarkov { terms } => {
                if terms.is_empty() {
                    return Err(invalid("subshift_markov: at least one term required"));
                }
                for (i, t) in terms.iter().enumerate() {
                    if !t.matrix.is_nonnegative() {
                        return Err(invalid(format!("subshift_markov: term {i} has a negative entry")));
                    }
                }
                subshift_counts(terms, order).map(|_| ())
            }
            MapDescriptor::SeifertFibered { base, .. } => base.validate(order),
            MapDescriptor::Decomposition { pieces } => {
                if pieces.is_empty() {
                    return Err(invalid("decomposition: pieces list must be nonempty"));
                }
                for p in pieces {
                    if p.return_time == 0 {
                        return Err(invalid("decomposition: return_time must be >= 1"));
                    }
                    p.map.validate(order / p.return_time as usize)?;
                }
                Ok(())
            }
        }
    }

    /// `N(fⁿ)` for `n ≥ 1`.
    pub fn nielsen_number(&self, n: u64) -> Result<BigInt> {
        if n == 0 {
            return Err(Error::InvalidArgument("iterate index must be >= 1".into()));
        }
        match self {
            MapDescriptor::Periodic { period, nielsen } => {
                let g = n.gcd(period);
                nielsen
                    .get(&g)
                    .cloned()
                    .ok_or_else(|| invalid(format!("periodic: missing N_{g}")))
            }
            MapDescriptor::TorusLinear { matrix } => {
                let d = matrix.pow(n).minus_scalar(1).det();
                if d.is_zero() {
                    return Err(Error::DegenerateIterate { n });
                }
                Ok(d.abs())
            }
            MapDescriptor::SubshiftMarkov { terms } => {
                let v: BigInt = terms
                    .iter()
                    .map(|t| t.matrix.pow(n).trace() * t.sign.as_i64())
                    .sum();
                if v.is_negative() {
                    return Err(invalid(format!("subshift_markov: fixed point count of iterate {n} is {v}")));
                }
                Ok(v)
            }
            MapDescriptor::SeifertFibered { fiber_action, base } => match fiber_action {
                FiberAction::Preserving => Ok(BigInt::zero()),
                FiberAction::Reversing if n.is_multiple_of(2) => Ok(BigInt::zero()),
                FiberAction::Reversing => Ok(base.nielsen_number(n)? * 2),
            },
            MapDescriptor::Decomposition { pieces } => {
                let mut total = BigInt::zero();
                for p in pieces {
                    if n.is_multiple_of(p.return_time) {
                        total += p.map.nielsen_number(n / p.return_time)?;
                    }
                }
                Ok(total)
            }
        }
    }

    /// `[N(f), …, N(f^{n_max})]`.
    pub fn nielsen_sequence(&self, n_max: usize) -> Result<Vec<BigInt>> {
        match self {
            // incremental powers instead of one exponentiation per index
            MapDescriptor::TorusLinear { matrix } => {
                let mut power = IntMatrix::identity(matrix.size());
                (1..=n_max as u64)
                    .map(|n| {
                        power = &power * matrix;
                        let d = power.minus_scalar(1).det();
                        if d.is_zero() {
                            Err(Error::DegenerateIterate { n })
                        } else {
                            Ok(d.abs())
                        }
                    })
                    .collect()
            }
            MapDescriptor::SubshiftMarkov { terms } => subshift_counts(terms, n_max),
            _ => (1..=n_max as u64).map(|n| self.nielsen_number(n)).collect(),
        }
    }

    /// Descriptor of the k-th iterate `f^k`.
    pub fn iterate(&self, k: u64) -> Result<MapDescriptor> {
        if k == 0 {
            return Err(Error::InvalidArgument("iterate power must be >= 1".into()));
        }
        if k == 1 {
            return Ok(self.clone());
        }
        Ok(match self {
            MapDescriptor::Periodic { period, nielsen } => {
                let m = *period;
                let reduced = m / m.gcd(&k);
                let mut table = BTreeMap::new();
                for d in divisors(reduced) {
                    let g = (d * k).gcd(&m);
                    let v = nielsen
                        .get(&g)
                        .cloned()
                        .ok_or_else(|| invalid(format!("periodic: missing N_{g}")))?;
                    table.insert(d, v);
                }
                MapDescriptor::Periodic {
                    period: reduced,
                    nielsen: table,
                }
            }
            MapDescriptor::TorusLinear { matrix } => MapDescriptor::TorusLinear { matrix: matrix.pow(k) },
            MapDescriptor::SubshiftMarkov { terms } => MapDescriptor::SubshiftMarkov {
                terms: terms
                    .iter()
                    .map(|t| MarkovTerm {
                        matrix: t.matrix.pow(k),
                        sign: t.sign,
                    })
                    .collect(),
            },
            MapDescriptor::SeifertFibered { fiber_action, base } => {
                let action = match fiber_action {
                    FiberAction::Reversing if k % 2 == 1 => FiberAction::Reversing,
                    _ => FiberAction::Preserving,
                };
                MapDescriptor::seifert(action, base.iterate(k)?)
            }
            MapDescriptor::Decomposition { pieces } => MapDescriptor::Decomposition {
                pieces: pieces
                    .iter()
                    .map(|p| {
                        let g = p.return_time.gcd(&k);
                        Ok(Piece {
                            return_time: p.return_time / g,
                            map: p.map.iterate(k / g)?,
                        })
                    })
                    .collect::<Result<_>>()?,
            },
        })
    }
}

fn subshift_counts(terms: &[MarkovTerm], n_max: usize) -> Result<Vec<BigInt>> {
    let mut powers: Vec<IntMatrix> = terms.iter().map(|t| IntMatrix::identity(t.matrix.size())).collect();
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut v = BigInt::zero();
        for (p, t) in powers.iter_mut().zip(terms) {
            *p = &*p * &t.matrix;
            v += p.trace() * t.sign.as_i64();
        }
        if v.is_negative() {
            return Err(invalid(format!("subshift_markov: fixed point count of iterate {n} is {v}")));
        }
        out.push(v);
    }
    Ok(out)
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidDescriptor(msg.into())
}

/// Lazily evaluated `n ↦ N(fⁿ)` for a descriptor.
#[derive(Clone, Debug)]
pub struct NielsenSequence<'a> {
    source: &'a MapDescriptor,
}

impl<'a> NielsenSequence<'a> {
    pub fn new(source: &'a MapDescriptor) -> Self {
        NielsenSequence { source }
    }

    pub fn source(&self) -> &MapDescriptor {
        self.source
    }

    pub fn get(&self, n: u64) -> Result<BigInt> {
        self.source.nielsen_number(n)
    }

    pub fn take(&self, n_max: usize) -> Result<Vec<BigInt>> {
        self.source.nielsen_sequence(n_max)
    }
}
