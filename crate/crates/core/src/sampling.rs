//! Seeded quasi-random chart points.
//!
//! Points come from a Halton sequence with a random (Cranley-Patterson) shift
//! drawn from a ChaCha stream, so the same seed always gives the same points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const PRIMES: [u32; 6] = [2, 3, 5, 7, 11, 13];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as f64;
    let mut inv = 1.0 / b;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base as u64) as f64 * inv;
        i /= base as u64;
        inv /= b;
    }
    r
}

/// Region of a chart to sample: independent intervals for the leading
/// coordinates and an optional centered ball for the trailing ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleDomain {
    pub intervals: Vec<(f64, f64)>,
    pub ball_dim: usize,
    pub ball_radius: f64,
}

impl SampleDomain {
    pub fn boxed(intervals: Vec<(f64, f64)>) -> Self {
        Self {
            intervals,
            ball_dim: 0,
            ball_radius: 0.0,
        }
    }

    pub fn with_ball(intervals: Vec<(f64, f64)>, ball_dim: usize, ball_radius: f64) -> Self {
        Self {
            intervals,
            ball_dim,
            ball_radius,
        }
    }

    pub fn dim(&self) -> usize {
        self.intervals.len() + self.ball_dim
    }

    /// Maps a point of the unit cube into the domain; `None` when it falls
    /// outside the ball.
    fn map(&self, u: &[f64]) -> Option<Vec<f64>> {
        let mut p = Vec::with_capacity(self.dim());
        for (&(a, b), &s) in self.intervals.iter().zip(u) {
            p.push(a + (b - a) * s);
        }
        let mut r2 = 0.0;
        for &s in &u[self.intervals.len()..] {
            let v = (2.0 * s - 1.0) * self.ball_radius;
            r2 += v * v;
            p.push(v);
        }
        (r2 < self.ball_radius * self.ball_radius || self.ball_dim == 0).then_some(p)
    }

    /// `count` points, deterministic in `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let d = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
        let mut out = Vec::with_capacity(count);
        let mut i: u64 = 1;
        while out.len() < count {
            let u: Vec<f64> = (0..d)
                .map(|k| (radical_inverse(i, PRIMES[k]) + shift[k]).fract())
                .collect();
            i += 1;
            if let Some(p) = self.map(&u) {
                out.push(p);
            }
        }
        out
    }
}
