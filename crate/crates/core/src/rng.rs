//! Seeded counter RNG with labeled sub-streams.
//!
//! Every stochastic stage in the workspace draws from one of these. The
//! generator is SplitMix64: the state advances by a fixed odd increment and
//! each output is a finalizer of the state, so a (seed, label) pair fully
//! determines the stream no matter what ran before it. Hand-rolled (rather
//! than a crate) so replayed manifests stay bit-identical across platforms
//! and dependency upgrades.

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic stream of uniforms, Gaussians, and Poisson draws.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    /// Root stream for a seed.
    pub fn new(seed: u64) -> Self {
        Rng { state: mix64(seed) }
    }

    /// Independent sub-stream for `(seed of self, label)`.
    ///
    /// Derivation hashes the label into the *initial* state of the parent, so
    /// the sub-stream does not depend on how many values the parent has
    /// already produced only if taken from a fresh parent; callers that need
    /// order-independence derive all streams up front.
    pub fn stream(&self, label: &str) -> Rng {
        let mut h = self.state ^ 0x51_7c_c1_b7_27_22_0a_95;
        for &b in label.as_bytes() {
            h = mix64(h ^ u64::from(b));
        }
        Rng { state: mix64(h) }
    }

    /// Sub-stream keyed by an integer index (rows, blocks, frames).
    pub fn stream_idx(&self, label: &str, idx: u64) -> Rng {
        let mut r = self.stream(label);
        r.state = mix64(r.state ^ mix64(idx ^ GOLDEN_GAMMA));
        r
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `[lo, hi]` inclusive.
    pub fn uniform_int(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        let span = (hi - lo + 1) as u64;
        lo + (self.next_u64() % span) as i64
    }

    /// Standard normal via Box-Muller (cosine branch).
    pub fn next_gaussian(&mut self) -> f64 {
        // Guard against ln(0): map 0 to the smallest positive mantissa step.
        let mut u1 = self.next_f64();
        if u1 <= 0.0 {
            u1 = f64::MIN_POSITIVE;
        }
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Poisson draw.
    ///
    /// Inverse-transform for `lambda < 30`; Gaussian approximation
    /// `round(N(lambda, lambda))` clamped at zero above that, which keeps the
    /// first two moments at desk-scale accuracy without rejection loops.
    pub fn next_poisson(&mut self, lambda: f64) -> u64 {
        debug_assert!(lambda >= 0.0);
        if lambda <= 0.0 {
            return 0;
        }
        if lambda < 30.0 {
            let u = self.next_f64();
            let mut p = (-lambda).exp();
            let mut cdf = p;
            let mut k: u64 = 0;
            while u > cdf {
                k += 1;
                p *= lambda / k as f64;
                cdf += p;
                if k > 1_000 {
                    break; // cdf saturated by rounding
                }
            }
            k
        } else {
            let g = lambda + lambda.sqrt() * self.next_gaussian();
            if g < 0.0 {
                0
            } else {
                g.round() as u64
            }
        }
    }

    /// Uniformly distributed unit vector.
    pub fn next_unit_vec3(&mut self) -> crate::geom::Vec3 {
        loop {
            let v = crate::geom::Vec3::new(
                self.next_gaussian(),
                self.next_gaussian(),
                self.next_gaussian(),
            );
            let n = v.norm();
            if n > 1e-12 {
                return v.scale(1.0 / n);
            }
        }
    }
}
