use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Point, Rational};

use super::Instance;

const GRID_BITS: u32 = 20;

/// `n` planar points drawn uniformly from the `2^20 x 2^20` lattice on
/// `[0, box_side]^2`. The same seed always yields the same instance.
pub fn gen_random(n: usize, box_side: &Rational, diameter: &Rational, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let res = 1i64 << GRID_BITS;
    let step = box_side / Rational::from_integer(BigInt::from(res));
    let points = (0..n)
        .map(|_| {
            let x: i64 = rng.gen_range(0..=res);
            let y: i64 = rng.gen_range(0..=res);
            Point::xy(&step * BigInt::from(x), &step * BigInt::from(y))
        })
        .collect();
    Instance::new(2, diameter.clone(), points).expect("generator parameters validated by caller")
}

/// Box side (rounded to 1/16) that gives `n` uniform points an expected
/// degree of roughly `degree` at threshold `diameter`.
pub fn box_side_for_degree(n: usize, diameter: f64, degree: f64) -> Rational {
    let side = (n as f64 * std::f64::consts::PI * diameter * diameter / degree).sqrt();
    let sixteenths = (side * 16.0).round().max(1.0) as i64;
    Rational::new(BigInt::from(sixteenths), BigInt::from(16))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rat;
    use num_traits::Zero;

    #[test]
    fn empty_when_n_is_zero() {
        assert!(gen_random(0, &rat(5, 1), &rat(2, 1), 1).is_empty());
    }

    #[test]
    fn deterministic_in_seed() {
        let a = gen_random(10, &rat(5, 1), &rat(2, 1), 7);
        let b = gen_random(10, &rat(5, 1), &rat(2, 1), 7);
        let c = gen_random(10, &rat(5, 1), &rat(2, 1), 8);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn points_lie_in_the_box() {
        let side = rat(5, 1);
        let inst = gen_random(10, &side, &rat(2, 1), 1);
        assert_eq!(inst.len(), 10);
        for p in &inst.points {
            for c in p.coords() {
                assert!(*c >= Rational::zero() && *c <= side);
            }
        }
    }
}
