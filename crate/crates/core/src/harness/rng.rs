//! Counter-addressed random streams.
//!
//! A stream is a ChaCha20 generator whose key is derived from the campaign
//! seed and a purpose tag, and whose stream id packs the ensemble and trial
//! indices. Trial `t` of ensemble `e` therefore draws the same numbers no
//! matter which worker runs it or in what order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};

use crate::algebra::{Matrix, C64};

/// What a stream is used for. Each purpose gets an independent key.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Purpose {
    Element,
    State,
    Module,
    Parameters,
    /// The state of the element-level power-sum check.
    ElementState,
}

impl Purpose {
    fn tag(self) -> &'static [u8] {
        match self {
            Purpose::Element => b"element",
            Purpose::State => b"state",
            Purpose::Module => b"module",
            Purpose::Parameters => b"parameters",
            Purpose::ElementState => b"element-state",
        }
    }
}

pub type Stream = ChaCha20Rng;

/// The stream for `(seed, purpose, ensemble, trial)`.
pub fn trial_stream(seed: u64, purpose: Purpose, ensemble: u32, trial: u32) -> Stream {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(purpose.tag());
    let key: [u8; 32] = h.finalize().into();
    let mut rng = ChaCha20Rng::from_seed(key);
    rng.set_stream(((ensemble as u64) << 32) | trial as u64);
    rng
}

/// Standard complex Gaussian: real and imaginary parts `N(0, 1/2)`.
pub fn complex_gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows × cols` matrix of iid standard complex Gaussians.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}
