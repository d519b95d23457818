//! Portable pseudorandom generator for synthetic fixtures.
//!
//! Synthetic data must be reproducible bit-for-bit across runs, platforms,
//! and reimplementations in other languages, so this is a fixed, fully
//! specified generator rather than a library RNG whose stream may change
//! between versions.
//!
//! State initialization (splitmix64 applied once to the user seed):
//!
//! ```text
//! s = seed + 0x9E3779B97F4A7C15
//! s = (s ^ (s >> 30)) * 0xBF58476D1CE4E5B9
//! s = (s ^ (s >> 27)) * 0x94D049BB133111EB
//! s = s ^ (s >> 31);           if s == 0 then s = 0x9E3779B97F4A7C15
//! ```
//!
//! Stream (xorshift64*, all arithmetic mod 2^64):
//!
//! ```text
//! s ^= s >> 12;  s ^= s << 25;  s ^= s >> 27;
//! output = s * 0x2545F4914F6CDD1D
//! ```
//!
//! Derived values:
//! - `uniform01`  = (output >> 11) / 2^53, in [0, 1)
//! - `uniform_sym` = 2 * uniform01 - 1, in [-1, 1)
//! - `gaussian`   = Box-Muller: with u1 = ((o1 >> 11) + 1) / 2^53 in (0, 1]
//!   and u2 = (o2 >> 11) / 2^53, return sqrt(-2 ln u1) * cos(2 pi u2).
//!   One value per draw; the sine companion is discarded.

const SPLITMIX_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Deterministic xorshift64* stream seeded through splitmix64.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        let mut s = seed.wrapping_add(SPLITMIX_GAMMA);
        s = (s ^ (s >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        s = (s ^ (s >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        s ^= s >> 31;
        if s == 0 {
            s = SPLITMIX_GAMMA;
        }
        Rng { state: s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut s = self.state;
        s ^= s >> 12;
        s ^= s << 25;
        s ^= s >> 27;
        self.state = s;
        s.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    pub fn uniform01(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [-1, 1).
    pub fn uniform_sym(&mut self) -> f64 {
        2.0 * self.uniform01() - 1.0
    }

    /// Standard normal via Box-Muller (cosine branch only).
    pub fn gaussian(&mut self) -> f64 {
        let u1 = ((self.next_u64() >> 11) + 1) as f64 / (1u64 << 53) as f64;
        let u2 = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}
