//! Random input states for Monte-Carlo averages.
//!
//! Draws are split into fixed-size chunks; chunk `j` uses ChaCha stream `j`
//! of the seed, so a batch is identical no matter how it is scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::C64;
use crate::protocol::CoefficientVector;

/// Samples drawn from one ChaCha stream before moving to the next.
pub const CHUNK: usize = 64;

/// Distribution of input states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampler {
    /// Haar-uniform pure states, i.e. uniform on the Bloch sphere.
    PureUniform,
    /// Uniform on the Bloch ball.
    MixedUniform,
}

pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Haar-random pure state from a normalized complex Gaussian 2-vector.
pub fn sample_pure<R: Rng + ?Sized>(rng: &mut R) -> CoefficientVector {
    loop {
        let a = C64::new(gaussian(rng), gaussian(rng));
        let b = C64::new(gaussian(rng), gaussian(rng));
        if a.norm_sqr() + b.norm_sqr() > 1e-300 {
            return CoefficientVector::from_amplitudes(a, b)
                .expect("normalized amplitudes give a valid pure state");
        }
    }
}

/// Uniform point of the Bloch ball: Gaussian direction, radius `U^{1/3}`.
pub fn sample_mixed<R: Rng + ?Sized>(rng: &mut R) -> CoefficientVector {
    loop {
        let v = [gaussian(rng), gaussian(rng), gaussian(rng)];
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-300 {
            continue;
        }
        let r = rng.gen::<f64>().cbrt() / norm;
        return CoefficientVector::from_bloch(v[0] * r, v[1] * r, v[2] * r)
            .expect("points inside the Bloch ball are valid states");
    }
}

pub fn sample<R: Rng + ?Sized>(sampler: Sampler, rng: &mut R) -> CoefficientVector {
    match sampler {
        Sampler::PureUniform => sample_pure(rng),
        Sampler::MixedUniform => sample_mixed(rng),
    }
}

/// `n` states for `seed`, in a reproducible order.
pub fn sample_batch(sampler: Sampler, n: usize, seed: u64) -> Vec<CoefficientVector> {
    let mut out = Vec::with_capacity(n);
    let mut stream = 0u64;
    while out.len() < n {
        let mut rng = substream(seed, stream);
        let take = CHUNK.min(n - out.len());
        out.extend((0..take).map(|_| sample(sampler, &mut rng)));
        stream += 1;
    }
    out
}
