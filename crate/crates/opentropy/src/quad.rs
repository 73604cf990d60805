//! Gauss-Legendre quadrature. Nodes and weights come from Newton iteration
//! on the Legendre polynomials; for the smooth matrix-power integrands used
//! here the rule converges spectrally, so 32 nodes already sit at roundoff.

use crate::Real;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre<F: Real>(n: usize) -> (Vec<F>, Vec<F>) {
    assert!(n >= 1, "quadrature needs at least one node");
    let mut nodes = vec![F::zero(); n];
    let mut weights = vec![F::zero(); n];
    let nf = F::of(n as f64);
    for i in 0..n.div_ceil(2) {
        // Chebyshev-based initial guess for the i-th root
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = F::of(guess);
        let mut dp = F::one();
        for _ in 0..100 {
            // Legendre polynomial and derivative by upward recurrence
            let mut p0 = F::one();
            let mut p1 = x;
            for k in 2..=n {
                let kf = F::of(k as f64);
                let p2 = ((F::of(2.0) * kf - F::one()) * x * p1 - (kf - F::one()) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
            dp = nf * (x * p1 - p0) / (x * x - F::one());
            let dx = p1 / dp;
            x = x - dx;
            if dx.abs() <= F::epsilon() * F::of(4.0) {
                break;
            }
        }
        let w = F::of(2.0) / ((F::one() - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        // the middle node of an odd rule is exactly zero
        nodes[n / 2] = F::zero();
    }
    (nodes, weights)
}

/// Nodes and weights transplanted to `[0, 1]`.
pub fn gauss_legendre_unit<F: Real>(n: usize) -> (Vec<F>, Vec<F>) {
    let (nodes, weights) = gauss_legendre::<F>(n);
    let half = F::of(0.5);
    (
        nodes.iter().map(|&x| half * (x + F::one())).collect(),
        weights.iter().map(|&w| half * w).collect(),
    )
}
