#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use steerkit::qmat::{ComplexMatrix, DensityMatrix};

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `G G† / tr` with `G` a 4×rank Ginibre matrix.
pub fn random_state(rng: &mut ChaCha8Rng, rank: usize) -> DensityMatrix {
    let cols: Vec<Vec<Complex64>> = (0..rank).map(|_| (0..4).map(|_| gaussian(rng)).collect()).collect();
    let mut m = ComplexMatrix::zeros(4);
    for c in &cols {
        m = &m + &ComplexMatrix::outer(c);
    }
    let tr = m.trace().re;
    DensityMatrix::new(m.scale(1.0 / tr).hermitian_part()).unwrap()
}

pub fn random_qubit(rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let v = [gaussian(rng), gaussian(rng)];
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    let pure = ComplexMatrix::outer(&[v[0] / n, v[1] / n]);
    // shrink towards I/2 by a random amount
    let s: f64 = rng.random();
    &pure.scale(s) + &ComplexMatrix::identity(2).scale(0.5 * (1.0 - s))
}

/// Convex mixture of up to four product states.
pub fn random_separable(rng: &mut ChaCha8Rng) -> DensityMatrix {
    let k = rng.random_range(1..=4);
    let weights: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut m = ComplexMatrix::zeros(4);
    for w in weights {
        let term = random_qubit(rng).kron(&random_qubit(rng));
        m = &m + &term.scale(w / total);
    }
    DensityMatrix::new(m.hermitian_part()).unwrap()
}
