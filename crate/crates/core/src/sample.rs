//! Seeded generators for sets and automorphisms.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::endo::Endo;
use crate::exact::{int, rat, ExtReal, Rational};
use crate::green::interpolate;
use crate::qset::{QInterval, QSet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integers and halves from -3 to 3.
pub fn rational_pool() -> Vec<ExtReal> {
    (-6..=6).map(|k| ExtReal::Rat(rat(k, 2))).collect()
}

/// `√2`, `√3`, and `(1/2)√2` shifted by small rationals.
pub fn surd_pool() -> Vec<ExtReal> {
    let mut pool = vec![ExtReal::sqrt_times(int(1), 2)];
    pool.push(ExtReal::sqrt_times(int(1), 3));
    pool.push(ExtReal::sqrt_times(int(-1), 2));
    for r in [rat(-2, 1), rat(-1, 1), rat(0, 1), rat(1, 2), rat(1, 1), rat(3, 2)] {
        pool.push(ExtReal::sqrt_times(rat(1, 2), 2).add_rational(&r));
    }
    pool
}

/// A set with at most `max_components` components, sometimes unbounded.
/// An endpoint is a surd one time in four.
pub fn random_qset<R: Rng>(rng: &mut R, max_components: usize) -> QSet {
    let (rats, surds) = (rational_pool(), surd_pool());
    let n = rng.gen_range(0..=max_components);
    let mut ends: Vec<ExtReal> = (0..2 * n)
        .map(|_| if rng.gen_bool(0.25) { surds.choose(rng) } else { rats.choose(rng) }.expect("pool").clone())
        .collect();
    ends.sort();
    if n > 0 && rng.gen_bool(0.2) {
        ends[0] = ExtReal::NegInf;
    }
    if n > 0 && rng.gen_bool(0.2) {
        ends[2 * n - 1] = ExtReal::PosInf;
    }
    let mut parts = Vec::new();
    for pair in ends.chunks(2) {
        let (lo, hi) = (&pair[0], &pair[1]);
        if lo == hi {
            if let Some(q) = lo.as_rational() {
                parts.push(QInterval::point(q.clone()));
            }
            continue;
        }
        let lc = lo.is_rational() && rng.gen_bool(0.5);
        let hc = hi.is_rational() && rng.gen_bool(0.5);
        parts.extend(QInterval::new(lo.clone(), lc, hi.clone(), hc));
    }
    QSet::normalize(parts)
}

fn increasing<R: Rng>(rng: &mut R, k: usize) -> Vec<Rational> {
    let mut v = Vec::with_capacity(k);
    let mut x = rat(rng.gen_range(-8..=0), rng.gen_range(1..=3));
    for _ in 0..k {
        v.push(x.clone());
        x += rat(rng.gen_range(1..=6), rng.gen_range(1..=4));
    }
    v
}

/// A piecewise-affine automorphism with between 1 and `max_pieces` pieces.
pub fn random_automorphism<R: Rng>(rng: &mut R, max_pieces: usize) -> Endo {
    let k = rng.gen_range(1..max_pieces.max(2));
    let xs = increasing(rng, k);
    let ys = increasing(rng, k);
    interpolate(&xs, &ys).expect("increasing points")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_bounded() {
        let (mut a, mut b) = (rng(7), rng(7));
        for _ in 0..200 {
            let x = random_qset(&mut a, 4);
            assert_eq!(x, random_qset(&mut b, 4));
            assert!(x.components().len() <= 4);
            let f = random_automorphism(&mut a, 6);
            assert_eq!(f, random_automorphism(&mut b, 6));
            assert!(f.is_bijective() && f.pieces().len() <= 6);
        }
    }
}
