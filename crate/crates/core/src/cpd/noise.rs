use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::DenseTensor;

/// Target signal-to-noise ratio in dB (`f64::INFINITY` for no noise) and RNG seed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub snr_db: f64,
    pub seed: u64,
}

/// `t + c·N₀` with `N₀` i.i.d. standard Gaussian and `c` chosen so that
/// `20·log10(‖t‖/‖c·N₀‖) = snr_db` exactly.
pub fn add_noise_snr<T: Scalar>(t: &DenseTensor<T>, spec: NoiseSpec) -> Result<DenseTensor<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    add_noise_with(t, spec.snr_db, &mut rng)
}

/// As [`add_noise_snr`], drawing from a caller-supplied generator.
pub fn add_noise_with<T: Scalar, R: Rng + ?Sized>(
    t: &DenseTensor<T>,
    snr_db: f64,
    rng: &mut R,
) -> Result<DenseTensor<T>> {
    if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
        return Err(Error::InvalidArgument(format!("SNR must be finite or +inf, got {snr_db}")));
    }
    if snr_db == f64::INFINITY {
        return Ok(t.clone());
    }
    let signal = t.norm();
    if signal == 0.0 {
        return Err(Error::ZeroInput);
    }
    let noise: Vec<T> = (0..t.len()).map(|_| T::standard_normal(rng)).collect();
    let noise_norm = noise.iter().map(|x| x.modulus_squared()).sum::<f64>().sqrt();
    let c = signal / (noise_norm * 10f64.powf(snr_db / 20.0));
    let data = t
        .data()
        .iter()
        .zip(&noise)
        .map(|(&x, &e)| x + e * T::from_real(c))
        .collect();
    DenseTensor::new(t.shape().to_vec(), data)
}

/// Generator for trial `stream` of a run seeded with `master`. Streams are
/// independent, so results do not depend on the order trials execute in.
pub fn trial_rng(master: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

/// Realized `20·log10(‖clean‖/‖noisy − clean‖)`.
pub fn realized_snr_db<T: Scalar>(clean: &DenseTensor<T>, noisy: &DenseTensor<T>) -> f64 {
    let diff: f64 = clean
        .data()
        .iter()
        .zip(noisy.data())
        .map(|(&a, &b)| (b - a).modulus_squared())
        .sum::<f64>()
        .sqrt();
    20.0 * (clean.norm() / diff).log10()
}
