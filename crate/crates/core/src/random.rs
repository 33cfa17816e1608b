use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub(crate) type SketchRng = ChaCha8Rng;

pub(crate) fn seeded_rng(seed: u64) -> SketchRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gaussian matrix with the given standard deviation, drawn row by row so
/// that the stream order does not depend on the storage layout.
pub(crate) fn fill_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, std_dev: f64, rng: &mut R) -> Mat<f64> {
    let mut m = Mat::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let z: f64 = rng.sample(StandardNormal);
            m[(i, j)] = std_dev * z;
        }
    }
    m
}

#[cfg(test)]
pub(crate) fn gaussian_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}
