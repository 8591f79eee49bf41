//! Seeded random sources for the sample-based checkers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cmetric::PointR2;
use crate::symcone::{PositiveElement, SymMatrix};

/// The generator every checker draws from.
pub type SampleRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent generator for a sub-task.
pub fn split(rng: &mut SampleRng) -> SampleRng {
    ChaCha8Rng::seed_from_u64(rng.gen())
}

/// Symmetric matrix with entries uniform in `[-scale, scale]`.
pub fn random_symmetric(rng: &mut SampleRng, dim: usize, scale: f64) -> SymMatrix {
    let mut entries = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in i..dim {
            let v = rng.gen_range(-scale..=scale);
            entries[i * dim + j] = v;
            entries[j * dim + i] = v;
        }
    }
    SymMatrix::new(dim, entries).expect("generated matrix is symmetric")
}

/// Random cone element `B·Bᵀ` with `B` uniform in `[-scale, scale]`. About one
/// draw in four is rank deficient so the cone boundary gets exercised.
pub fn random_positive(rng: &mut SampleRng, dim: usize, scale: f64) -> PositiveElement {
    let mut b: Vec<f64> = (0..dim * dim).map(|_| rng.gen_range(-scale..=scale)).collect();
    if dim > 1 && rng.gen_bool(0.25) {
        let col = rng.gen_range(0..dim);
        for row in 0..dim {
            b[row * dim + col] = 0.0;
        }
    }
    let mut entries = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in i..dim {
            let v: f64 = (0..dim).map(|k| b[i * dim + k] * b[j * dim + k]).sum();
            entries[i * dim + j] = v;
            entries[j * dim + i] = v;
        }
    }
    PositiveElement::new(SymMatrix::new(dim, entries).expect("gram matrix is symmetric"))
        .expect("gram matrix is positive")
}

/// Cone element that is not θ.
pub fn random_nonzero_positive(rng: &mut SampleRng, dim: usize, scale: f64) -> PositiveElement {
    loop {
        let p = random_positive(rng, dim, scale);
        if !p.is_theta() {
            return p;
        }
    }
}

/// Positive definite matrix whose smallest eigenvalue is at least `floor`.
pub fn random_above(rng: &mut SampleRng, dim: usize, floor: f64, spread: f64) -> SymMatrix {
    let base = random_positive(rng, dim, spread.sqrt());
    base.matrix() + &SymMatrix::scalar(dim, floor)
}

pub fn random_point(rng: &mut SampleRng, half_width: f64) -> PointR2 {
    PointR2::new(rng.gen_range(-half_width..=half_width), rng.gen_range(-half_width..=half_width))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<f64> = (0..5).map(|_| seeded(7).gen()).collect();
        let b: Vec<f64> = (0..5).map(|_| seeded(7).gen()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn random_above_respects_floor() {
        let mut rng = seeded(3);
        for _ in 0..200 {
            assert!(random_above(&mut rng, 3, 1.05, 4.0).min_eigenvalue() >= 1.05 - 1e-12);
        }
    }
}
