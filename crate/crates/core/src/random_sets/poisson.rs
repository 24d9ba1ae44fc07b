//! Seeded streams and Poisson variates.
//!
//! Every replication draws from its own ChaCha8 stream: the 64-bit seed keys
//! the cipher and the replication index selects the stream, so results do
//! not depend on how replications are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::ln_gamma;

/// Means below this use sequential inversion; larger ones use PTRS.
pub const INVERSION_LIMIT: f64 = 30.0;

/// Generator for replication `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Poisson variate with the given mean.
///
/// Inversion by sequential search for `mean < 30`; otherwise the PTRS
/// transformed rejection method (Hörmann 1993).
pub fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    assert!(mean >= 0.0 && mean.is_finite(), "invalid Poisson mean {mean}");
    if mean == 0.0 {
        0
    } else if mean < INVERSION_LIMIT {
        inversion(mean, rng)
    } else {
        ptrs(mean, rng)
    }
}

fn inversion<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    let u: f64 = rng.random();
    let mut p = (-mean).exp();
    let mut cdf = p;
    let mut k = 0u64;
    // the tail beyond ~mean + 40 sd has no representable mass
    while u > cdf && k < 10_000 {
        k += 1;
        p *= mean / k as f64;
        cdf += p;
        if p == 0.0 && cdf < u {
            break;
        }
    }
    k
}

fn ptrs<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    let slam = mean.sqrt();
    let loglam = mean.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u: f64 = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
        if lhs <= -mean + k * loglam - ln_gamma(k + 1.0) {
            return k as u64;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments(mean: f64, n: u64) -> (f64, f64) {
        let xs: Vec<f64> = (0..n).map(|i| poisson(mean, &mut stream(7, i)) as f64).collect();
        let m = xs.iter().sum::<f64>() / n as f64;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
        (m, v)
    }

    #[test]
    fn both_regimes_have_poisson_moments() {
        for mean in [0.7, 4.0, 29.0, 30.0, 250.0] {
            let n = 40_000;
            let (m, v) = moments(mean, n);
            let se = (mean / n as f64).sqrt();
            assert!((m - mean).abs() < 4.0 * se, "mean {mean}: got {m}");
            assert!((v / mean - 1.0).abs() < 0.05, "mean {mean}: variance {v}");
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..5).map(|_| stream(1, 3).random()).collect();
        let b: Vec<u64> = (0..5).map(|_| stream(1, 3).random()).collect();
        assert_eq!(a, b);
        assert_ne!(stream(1, 3).random::<u64>(), stream(1, 4).random::<u64>());
        assert_ne!(stream(1, 3).random::<u64>(), stream(2, 3).random::<u64>());
    }

    #[test]
    fn zero_mean_is_zero() {
        assert_eq!(poisson(0.0, &mut stream(0, 0)), 0);
    }
}
