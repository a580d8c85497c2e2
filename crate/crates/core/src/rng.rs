//! Reproducible random streams and the point-process samplers.
//!
//! A [`RandomStream`] is a master seed plus a path of 64-bit labels. Its
//! state is obtained by folding the path through [`derive_state`]:
//!
//! ```text
//! state(root)          = mix64(master_seed)
//! state(parent/label)  = mix64(state(parent) ^ mix64(label ^ LABEL_SALT))
//! ```
//!
//! where `mix64` is the SplitMix64 finalizer. The generator handed out by
//! [`RandomStream::rng`] is `ChaCha8Rng::seed_from_u64(state)`. Child streams
//! are derived, never shared, so replicates can run on any thread.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{OngError, Result};
use crate::geometry::PointSequence;

/// Generator type behind every stream.
pub type StreamRng = ChaCha8Rng;

const LABEL_SALT: u64 = 0x6A09_E667_F3BC_C909;

/// Well-known child labels shared by the samplers.
pub mod labels {
    /// Point coordinates of the binomial process.
    pub const POINTS: u64 = 0x504F_494E_5453;
    /// The Poisson count `N(lambda)`.
    pub const COUNT: u64 = 0x0043_4F55_4E54;
    /// Re-sampled replacement points.
    pub const RESAMPLE: u64 = 0x5245_5341_4D50;
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child state from a parent state and a label.
#[inline]
pub fn derive_state(parent: u64, label: u64) -> u64 {
    mix64(parent ^ mix64(label ^ LABEL_SALT))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RandomStream {
    master_seed: u64,
    path: Vec<u64>,
    state: u64,
}

impl RandomStream {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed, path: Vec::new(), state: mix64(master_seed) }
    }

    /// Rebuilds a stream from a recorded `(master_seed, path)`.
    pub fn from_path(master_seed: u64, path: &[u64]) -> Self {
        path.iter().fold(Self::new(master_seed), |s, &l| s.child(l))
    }

    pub fn child(&self, label: u64) -> Self {
        let mut path = self.path.clone();
        path.push(label);
        Self { master_seed: self.master_seed, path, state: derive_state(self.state, label) }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> StreamRng {
        ChaCha8Rng::seed_from_u64(self.state)
    }
}

/// Uniform draw on the open interval (0,1); zero is rejected.
#[inline]
pub fn uniform_open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Appends one uniform point of `(0,1)^d` to a flat buffer.
#[inline]
pub fn push_uniform_point<R: Rng + ?Sized>(buf: &mut Vec<f64>, d: usize, rng: &mut R) {
    for _ in 0..d {
        buf.push(uniform_open01(rng));
    }
}

pub fn uniform_point<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    let mut v = Vec::with_capacity(d);
    push_uniform_point(&mut v, d, rng);
    v
}

/// `n` uniform points drawn in order from `rng`; `n == 0` yields the empty
/// sequence.
pub fn sample_points<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<PointSequence> {
    if d == 0 {
        return Err(OngError::InvalidArgument("dimension must be at least 1".into()));
    }
    let mut buf = Vec::with_capacity(n * d);
    for _ in 0..n {
        push_uniform_point(&mut buf, d, rng);
    }
    Ok(PointSequence::from_flat_unchecked(d, buf))
}

/// The binomial point process `U_n`: `n` independent uniform points, in draw
/// order, taken from the start of `stream`.
pub fn sample_binomial_process(n: usize, d: usize, stream: &RandomStream) -> Result<PointSequence> {
    if n == 0 {
        return Err(OngError::InvalidArgument(
            "n must be at least 1; use PointSequence::empty for the empty sequence".into(),
        ));
    }
    sample_points(n, d, &mut stream.rng())
}

/// A draw of `N(lambda)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonDraw {
    pub count: u64,
    pub intensity: f64,
}

pub fn poisson_count<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> Result<u64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(OngError::InvalidArgument(format!("intensity must be positive, got {lambda}")));
    }
    let dist = Poisson::new(lambda).map_err(|e| OngError::InvalidArgument(e.to_string()))?;
    Ok(dist.sample(rng) as u64)
}

/// `N(lambda)` drawn from the start of `stream`.
pub fn sample_poisson_count(lambda: f64, stream: &RandomStream) -> Result<PoissonDraw> {
    let count = poisson_count(lambda, &mut stream.rng())?;
    Ok(PoissonDraw { count, intensity: lambda })
}
