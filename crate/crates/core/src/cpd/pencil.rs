use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::DenseTensor;
use crate::Mat;

/// How the two pencil matrices are formed from the compressed core.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PencilStrategy {
    /// The first two frontal slices of the core (after flattening modes ≥ 2).
    #[default]
    FirstTwoCoreSlices,
    /// Two independent standard-normal combinations of all core slices.
    RandomCombinations { seed: u64 },
}

impl fmt::Display for PencilStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PencilStrategy::FirstTwoCoreSlices => f.write_str("first"),
            PencilStrategy::RandomCombinations { seed } => write!(f, "random:{seed}"),
        }
    }
}

impl FromStr for PencilStrategy {
    type Err = String;

    /// Accepts `first` or `random:SEED`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        if s == "first" {
            return Ok(PencilStrategy::FirstTwoCoreSlices);
        }
        match s.strip_prefix("random:") {
            Some(seed) => seed
                .parse()
                .map(|seed| PencilStrategy::RandomCombinations { seed })
                .map_err(|e| format!("bad pencil seed `{seed}`: {e}")),
            None => Err(format!("unknown pencil strategy `{s}` (expected `first` or `random:SEED`)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PencilChoice<T: Scalar> {
    pub strategy: PencilStrategy,
    pub m1: Mat<T>,
    pub m2: Mat<T>,
    /// Slice weights behind `m1` and `m2`, indexed like the flattened slices.
    pub weights: (Vec<T>, Vec<T>),
}

/// Builds the pencil from the slices `core(:, :, k)` of the core flattened to order 3.
pub fn select_pencil<T: Scalar>(core: &DenseTensor<T>, strategy: PencilStrategy) -> Result<PencilChoice<T>> {
    if core.order() < 3 {
        return Err(Error::OrderMismatch {
            expected: 3,
            found: core.order(),
        });
    }
    let shape = core.shape();
    if shape[0] != shape[1] {
        return Err(Error::DimMismatch(format!(
            "pencil slices must be square, core is {}x{}",
            shape[0], shape[1]
        )));
    }
    let flat = core.reshape_to_order3()?;
    let k = flat.shape()[2];
    if k < 2 {
        return Err(Error::NotEnoughSlices { found: k });
    }
    let (w1, w2) = match strategy {
        PencilStrategy::FirstTwoCoreSlices => {
            let unit = |i: usize| (0..k).map(|j| if j == i { T::one() } else { T::zero() }).collect();
            (unit(0), unit(1))
        }
        PencilStrategy::RandomCombinations { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w1: Vec<T> = (0..k).map(|_| T::standard_normal(&mut rng)).collect();
            let w2: Vec<T> = (0..k).map(|_| T::standard_normal(&mut rng)).collect();
            (w1, w2)
        }
    };
    let m1 = combine(&flat, &w1);
    let m2 = combine(&flat, &w2);
    Ok(PencilChoice {
        strategy,
        m1,
        m2,
        weights: (w1, w2),
    })
}

fn combine<T: Scalar>(flat: &DenseTensor<T>, w: &[T]) -> Mat<T> {
    let (r0, r1) = (flat.shape()[0], flat.shape()[1]);
    let n = r0 * r1;
    let mut out = Mat::zeros(r0, r1);
    for (k, &wk) in w.iter().enumerate() {
        if wk == T::zero() {
            continue;
        }
        let slice = &flat.data()[k * n..(k + 1) * n];
        for (o, &x) in out.iter_mut().zip(slice) {
            *o += wk * x;
        }
    }
    out
}
