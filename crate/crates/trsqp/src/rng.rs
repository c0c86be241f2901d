//! Deterministic sampling primitives.
//!
//! All randomness in the crate flows through [`ChaCha8Rng`], a counter-based
//! stream generator with a stable, portable output sequence. Scalars are
//! derived from raw 64-bit draws with the fixed recipes below, so a given
//! seed reproduces the same values on every platform and every run:
//!
//! * `uniform_unit`: take the top 53 bits of a `u64` draw and scale by
//!   2^-53, giving a value in `[0, 1)`.
//! * `uniform_symmetric`: `2 * uniform_unit - 1`, giving `[-1, 1)`.
//! * `standard_normal`: Marsaglia polar method over `uniform_symmetric`
//!   pairs. The accept/reject decision is pure arithmetic; only the final
//!   `ln`/`sqrt` touch libm, so the Gaussian stream is deterministic per
//!   platform (and in practice identical across common targets).
//! * `splitmix64`: the standard 64-bit mixing function, used to derive
//!   per-run seeds from a base seed.

use rand_core::RngCore;
pub use rand_chacha::ChaCha8Rng;

/// Uniform draw in `[0, 1)` with 53-bit resolution.
pub fn uniform_unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw in `[-1, 1)`.
pub fn uniform_symmetric(rng: &mut ChaCha8Rng) -> f64 {
    2.0 * uniform_unit(rng) - 1.0
}

/// Standard normal draw via the Marsaglia polar method.
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u = uniform_symmetric(rng);
        let v = uniform_symmetric(rng);
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            return u * (-2.0 * s.ln() / s).sqrt();
        }
    }
}

/// SplitMix64 mixing step. Used to spread structured inputs (mode ids,
/// repetition counters) into independent-looking seeds.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
