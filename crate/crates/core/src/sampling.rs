//! Deterministic sample generation: Halton points and seeded generators.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::C64;

/// Van der Corput radical inverse of `index` in the given prime `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut acc = 0.0;
    while index > 0 {
        acc += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    acc
}

/// Two-dimensional Halton point number `index` (bases 2 and 3).
pub fn halton2(index: u64) -> (f64, f64) {
    (radical_inverse(index, 2), radical_inverse(index, 3))
}

/// Low-discrepancy samples in the rectangle `[re_min, re_max] × [im_min, im_max]`
/// of the complex plane.
///
/// The sequence starts at Halton index 1 so that no sample sits on the
/// rectangle's corner.
pub fn halton_rectangle(count: usize, re_range: (f64, f64), im_range: (f64, f64)) -> Vec<C64> {
    (1..=count as u64)
        .map(|i| {
            let (u, v) = halton2(i);
            C64::new(
                re_range.0 + u * (re_range.1 - re_range.0),
                im_range.0 + v * (im_range.1 - im_range.0),
            )
        })
        .collect()
}

/// Samples strictly inside the strip 0 < Im ζ < π, keeping a margin
/// `margin` from both boundary lines.
pub fn strip_samples(count: usize, re_half_width: f64, margin: f64) -> Vec<C64> {
    halton_rectangle(count, (-re_half_width, re_half_width), (margin, std::f64::consts::PI - margin))
}

/// A reproducible random generator derived from a user seed and a stream tag,
/// so that independent experiments do not share random streams.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
