//! Seeded random generators for descriptor, word and matrix corpora.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::descriptor::{divisors, FiberAction, MapDescriptor, Piece};
use crate::linalg::IntMatrix;
use crate::radical::Polynomial;
use crate::twisted::GroupWord;

pub const DEFAULT_SEED: u64 = 20_240_917;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Periodic descriptor with period ≤ `max_period` and table values ≤ `max_value`.
pub fn periodic<R: Rng>(rng: &mut R, max_period: u64, max_value: u64) -> MapDescriptor {
    let m = rng.gen_range(1..=max_period);
    MapDescriptor::Periodic {
        period: m,
        nielsen: divisors(m)
            .into_iter()
            .map(|d| (d, BigInt::from(rng.gen_range(0..=max_value))))
            .collect(),
    }
}

pub fn nonnegative_matrix<R: Rng>(rng: &mut R, max_size: usize, max_entry: u32) -> IntMatrix {
    let n = rng.gen_range(1..=max_size);
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(0..=max_entry) as i64).collect())
        .collect();
    IntMatrix::from_rows(&rows).expect("square by construction")
}

pub fn subshift<R: Rng>(rng: &mut R, max_size: usize, max_entry: u32) -> MapDescriptor {
    MapDescriptor::subshift(nonnegative_matrix(rng, max_size, max_entry))
}

/// Hyperbolic unimodular 2×2 matrices with no root-of-unity eigenvalues.
pub fn torus_matrices() -> Vec<IntMatrix> {
    [
        [[2, 1], [1, 1]],
        [[1, 1], [1, 2]],
        [[0, 1], [1, 1]],
        [[3, 1], [2, 1]],
        [[1, 1], [1, 0]],
        [[3, 2], [1, 1]],
    ]
    .iter()
    .map(|m| IntMatrix::from_rows(&m.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).expect("square"))
    .collect()
}

pub fn torus<R: Rng>(rng: &mut R) -> MapDescriptor {
    MapDescriptor::TorusLinear {
        matrix: torus_matrices().choose(rng).expect("nonempty").clone(),
    }
}

/// Seifert descriptor over a random periodic or subshift base.
pub fn seifert<R: Rng>(rng: &mut R, action: FiberAction) -> MapDescriptor {
    let base = if rng.gen_bool(0.5) {
        periodic(rng, 12, 100)
    } else {
        subshift(rng, 3, 2)
    };
    MapDescriptor::seifert(action, base)
}

/// Decomposition of 1–`max_pieces` pieces with return times ≤ `max_return`,
/// mixing periodic, subshift, torus and Seifert pieces.
pub fn decomposition<R: Rng>(rng: &mut R, max_pieces: usize, max_return: u64) -> MapDescriptor {
    let count = rng.gen_range(1..=max_pieces);
    let pieces = (0..count)
        .map(|_| {
            let map = match rng.gen_range(0..4) {
                0 => periodic(rng, 12, 30),
                1 => subshift(rng, 3, 2),
                2 => torus(rng),
                _ => seifert(rng, FiberAction::Reversing),
            };
            Piece {
                return_time: rng.gen_range(1..=max_return),
                map,
            }
        })
        .collect();
    MapDescriptor::Decomposition { pieces }
}

/// Reduced word of length ≤ `max_len` in rank `rank`.
pub fn word<R: Rng>(rng: &mut R, rank: usize, max_len: usize) -> GroupWord {
    let len = rng.gen_range(0..=max_len);
    let mut letters: Vec<i32> = Vec::with_capacity(len);
    while letters.len() < len {
        let g = rng.gen_range(1..=rank as i32);
        let l = if rng.gen_bool(0.5) { g } else { -g };
        if letters.last() != Some(&-l) {
            letters.push(l);
        }
    }
    GroupWord::from_letters(letters)
}

/// Square integer matrix of size 1 or 2 with entries in `[-max_abs, max_abs]`
/// and `det(I − M) ≠ 0`.
pub fn abelian_matrix<R: Rng>(rng: &mut R, max_abs: i64) -> IntMatrix {
    loop {
        let n = rng.gen_range(1..=2);
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-max_abs..=max_abs)).collect())
            .collect();
        let m = IntMatrix::from_rows(&rows).expect("square");
        if !m.scalar_minus(1).det().is_zero() {
            return m;
        }
    }
}

/// Integer polynomial with constant term 1, degree ≤ `max_deg`,
/// coefficients in `[-max_abs, max_abs]`.
pub fn unit_polynomial<R: Rng>(rng: &mut R, max_deg: usize, max_abs: i64) -> Polynomial {
    let deg = rng.gen_range(0..=max_deg);
    let mut c = vec![1i64];
    c.extend((0..deg).map(|_| rng.gen_range(-max_abs..=max_abs)));
    if deg > 0 && *c.last().unwrap() == 0 {
        *c.last_mut().unwrap() = 1;
    }
    Polynomial::from_i64s(&c)
}
