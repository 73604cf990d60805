//! Concrete unital positive linear maps: block pinchings, mixtures of
//! unitary conjugations, and isometry compressions. Maps are represented by
//! data rather than closures so a failing case can serialize the exact map
//! it used.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::streams::stream;
use crate::{Error, Real, Result};

const MAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Identity,
    Pinching,
    Mixture,
    Compression,
}

impl std::str::FromStr for MapKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Self::Identity),
            "pinching" => Ok(Self::Pinching),
            "mixture" => Ok(Self::Mixture),
            "compression" => Ok(Self::Compression),
            other => Err(Error::Config(format!("unknown map kind: {other}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PositiveMap<F> {
    Identity { dim: usize },
    /// Zero the off-diagonal blocks of the given partition.
    Pinching { blocks: Vec<usize> },
    /// `X -> sum_i w_i U_i^T X U_i` with orthogonal `U_i`, convex weights.
    Mixture { weights: Vec<F>, unitaries: Vec<Matrix<F>> },
    /// `X -> V^T X V` with an isometry `V` (`V^T V = I_k`), mapping n x n to k x k.
    Compression { isometry: Matrix<F> },
}

impl<F: Real> PositiveMap<F> {
    pub fn kind(&self) -> MapKind {
        match self {
            Self::Identity { .. } => MapKind::Identity,
            Self::Pinching { .. } => MapKind::Pinching,
            Self::Mixture { .. } => MapKind::Mixture,
            Self::Compression { .. } => MapKind::Compression,
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Self::Identity { dim } => *dim,
            Self::Pinching { blocks } => blocks.iter().sum(),
            Self::Mixture { unitaries, .. } => unitaries.first().map(Matrix::rows).unwrap_or(0),
            Self::Compression { isometry } => isometry.rows(),
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            Self::Compression { isometry } => isometry.cols(),
            _ => self.input_dim(),
        }
    }

    /// Structural validity: partition consistency, convex weights, orthogonal
    /// unitaries, isometric compression. Unitality and positivity follow.
    pub fn validate(&self) -> Result<()> {
        let tol = F::of(MAP_TOL);
        match self {
            Self::Identity { dim } => {
                if *dim == 0 {
                    return Err(Error::InvalidParam("identity map of dimension 0".into()));
                }
            }
            Self::Pinching { blocks } => {
                if blocks.is_empty() || blocks.contains(&0) {
                    return Err(Error::InvalidParam(
                        "pinching blocks must be nonempty and positive".into(),
                    ));
                }
            }
            Self::Mixture { weights, unitaries } => {
                if weights.len() != unitaries.len() || weights.is_empty() {
                    return Err(Error::InvalidParam(
                        "mixture needs matching nonempty weights/unitaries".into(),
                    ));
                }
                if weights.iter().any(|&w| w < F::zero()) {
                    return Err(Error::InvalidParam("mixture weights must be >= 0".into()));
                }
                let sum = weights.iter().fold(F::zero(), |a, &b| a + b);
                if (sum - F::one()).abs() > tol {
                    return Err(Error::InvalidParam(format!(
                        "mixture weights sum to {sum}, not 1"
                    )));
                }
                let n = unitaries[0].rows();
                for u in unitaries {
                    if u.rows() != n || u.cols() != n {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            actual: u.rows(),
                        });
                    }
                    let gram = u.transpose().matmul(u);
                    let err = gram.sub(&Matrix::identity(n)).frobenius_norm();
                    if err > tol {
                        return Err(Error::InvalidParam(format!(
                            "mixture matrix is not orthogonal: ||U^T U - I|| = {err}"
                        )));
                    }
                }
            }
            Self::Compression { isometry } => {
                let k = isometry.cols();
                if k == 0 || k > isometry.rows() {
                    return Err(Error::InvalidParam(
                        "compression isometry must be n x k with 1 <= k <= n".into(),
                    ));
                }
                let gram = isometry.transpose().matmul(isometry);
                let err = gram.sub(&Matrix::identity(k)).frobenius_norm();
                if err > tol {
                    return Err(Error::InvalidParam(format!(
                        "compression V is not an isometry: ||V^T V - I|| = {err}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Apply the map to a symmetric matrix.
    pub fn apply(&self, x: &Matrix<F>) -> Result<Matrix<F>> {
        let n = self.input_dim();
        if x.rows() != n || x.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: x.rows(),
            });
        }
        Ok(match self {
            Self::Identity { .. } => x.clone(),
            Self::Pinching { blocks } => {
                let mut out = Matrix::zeros(n, n);
                let mut start = 0;
                for &len in blocks {
                    for i in start..start + len {
                        for j in start..start + len {
                            out[(i, j)] = x[(i, j)];
                        }
                    }
                    start += len;
                }
                out
            }
            Self::Mixture { weights, unitaries } => {
                let mut out = Matrix::zeros(n, n);
                for (&w, u) in weights.iter().zip(unitaries) {
                    out = out.add(&x.congruence_by(u).scale(w));
                }
                out.symmetrize()
            }
            Self::Compression { isometry } => x.congruence_by(isometry),
        })
    }
}

/// Draw a random orthogonal matrix from a Gram-Schmidt factorization of a
/// Gaussian matrix, with the R-diagonal sign fix so the distribution is Haar.
pub(crate) fn random_orthogonal<F: Real>(dim: usize, rng: &mut impl Rng) -> Matrix<F> {
    loop {
        let mut cols: Vec<Vec<F>> = Vec::with_capacity(dim);
        let mut ok = true;
        for _ in 0..dim {
            let mut v: Vec<F> = (0..dim)
                .map(|_| F::of(rng.sample::<f64, _>(StandardNormal)))
                .collect();
            // two projection passes keep orthogonality at roundoff level
            for _ in 0..2 {
                for prev in &cols {
                    let dot = v
                        .iter()
                        .zip(prev.iter())
                        .fold(F::zero(), |a, (&x, &y)| a + x * y);
                    for (vi, &pi) in v.iter_mut().zip(prev.iter()) {
                        *vi = *vi - dot * pi;
                    }
                }
            }
            let norm = v.iter().fold(F::zero(), |a, &x| a + x * x).sqrt();
            if norm < F::of(1e-8) {
                ok = false;
                break;
            }
            for vi in v.iter_mut() {
                *vi = *vi / norm;
            }
            cols.push(v);
        }
        if !ok {
            continue;
        }
        let mut q = Matrix::zeros(dim, dim);
        for (j, col) in cols.iter().enumerate() {
            for (i, &val) in col.iter().enumerate() {
                q[(i, j)] = val;
            }
        }
        return q;
    }
}

/// Deterministically generate a valid map of the requested kind.
pub fn random_map<F: Real>(dim: usize, kind: MapKind, seed: u64) -> Result<PositiveMap<F>> {
    if dim < 1 {
        return Err(Error::InvalidParam("map dimension must be >= 1".into()));
    }
    let mut rng = stream(seed, "positive-map", dim as u64);
    let map = match kind {
        MapKind::Identity => PositiveMap::Identity { dim },
        MapKind::Pinching => {
            let mut blocks = Vec::new();
            let mut left = dim;
            while left > 0 {
                let b = rng.gen_range(1..=left);
                blocks.push(b);
                left -= b;
            }
            PositiveMap::Pinching { blocks }
        }
        MapKind::Mixture => {
            let k = rng.gen_range(2..=4usize);
            let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let mut weights: Vec<F> = raw.iter().map(|&w| F::of(w / total)).collect();
            // force the weights to sum to one exactly
            let sum_rest = weights[1..].iter().fold(F::zero(), |a, &b| a + b);
            weights[0] = F::one() - sum_rest;
            let unitaries = (0..k).map(|_| random_orthogonal(dim, &mut rng)).collect();
            PositiveMap::Mixture { weights, unitaries }
        }
        MapKind::Compression => {
            let k = rng.gen_range(1..=dim);
            let q: Matrix<F> = random_orthogonal(dim, &mut rng);
            let mut v = Matrix::zeros(dim, k);
            for i in 0..dim {
                for j in 0..k {
                    v[(i, j)] = q[(i, j)];
                }
            }
            PositiveMap::Compression { isometry: v }
        }
    };
    map.validate()?;
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_spd, GenSpec};
    use crate::linalg::{loewner_leq, spectral_decompose_symmetric};
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_map() {
        let x = Matrix::from_rows(2, 2, vec![2.0, 1.0, 1.0, 3.0]).unwrap();
        let phi = PositiveMap::Identity { dim: 2 };
        assert_eq!(phi.apply(&x).unwrap(), x);
    }

    #[test]
    fn pinching_erases_off_diagonal() {
        let x = Matrix::from_rows(2, 2, vec![2.0, 1.0, 1.0, 3.0]).unwrap();
        let phi = PositiveMap::Pinching { blocks: vec![1, 1] };
        let y = phi.apply(&x).unwrap();
        assert_eq!(y[(0, 0)], 2.0);
        assert_eq!(y[(1, 1)], 3.0);
        assert_eq!(y[(0, 1)], 0.0);
    }

    #[test]
    fn mixture_with_swap_averages() {
        let swap = Matrix::from_rows(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let phi = PositiveMap::Mixture {
            weights: vec![0.5, 0.5],
            unitaries: vec![Matrix::identity(2), swap],
        };
        phi.validate().unwrap();
        let y = phi.apply(&Matrix::diag(&[2.0, 4.0])).unwrap();
        assert_abs_diff_eq!(y[(0, 0)], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(y[(1, 1)], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn random_maps_are_valid_and_unital() {
        for kind in [
            MapKind::Identity,
            MapKind::Pinching,
            MapKind::Mixture,
            MapKind::Compression,
        ] {
            for seed in 0..20u64 {
                let phi: PositiveMap<f64> = random_map(4, kind, seed).unwrap();
                phi.validate().unwrap();
                let img = phi.apply(&Matrix::identity(4)).unwrap();
                let err = img
                    .sub(&Matrix::identity(phi.output_dim()))
                    .frobenius_norm();
                assert!(err <= 1e-12, "{kind:?} seed {seed}: unitality err {err:e}");
            }
        }
    }

    #[test]
    fn mixture_weights_sum_exactly() {
        for seed in 0..50u64 {
            if let PositiveMap::Mixture { weights, .. } =
                random_map::<f64>(4, MapKind::Mixture, seed).unwrap()
            {
                let sum: f64 = weights.iter().sum();
                assert!((sum - 1.0).abs() <= 1e-15);
            } else {
                panic!("expected mixture");
            }
        }
    }

    #[test]
    fn compression_isometry_residual() {
        for seed in 0..20u64 {
            if let PositiveMap::Compression { isometry } =
                random_map::<f64>(4, MapKind::Compression, seed).unwrap()
            {
                let k = isometry.cols();
                let gram = isometry.transpose().matmul(&isometry);
                assert!(gram.sub(&Matrix::identity(k)).frobenius_norm() <= 1e-12);
            } else {
                panic!("expected compression");
            }
        }
    }

    #[test]
    fn maps_are_linear_spot_check() {
        let phi: PositiveMap<f64> = random_map(3, MapKind::Mixture, 7).unwrap();
        let x = random_spd(&GenSpec::new(3, 11)).unwrap().into_matrix();
        let y = random_spd(&GenSpec::new(3, 12)).unwrap().into_matrix();
        let lhs = phi.apply(&x.scale(2.5).add(&y)).unwrap();
        let rhs = phi.apply(&x).unwrap().scale(2.5).add(&phi.apply(&y).unwrap());
        assert!(lhs.sub(&rhs).frobenius_norm() <= 1e-12 * lhs.frobenius_norm().max(1.0));
    }

    #[test]
    fn maps_preserve_loewner_order_and_definiteness() {
        for kind in [MapKind::Pinching, MapKind::Mixture, MapKind::Compression] {
            for case in 0..200u64 {
                let dim = 2 + (case % 4) as usize;
                let phi: PositiveMap<f64> = random_map(dim, kind, case).unwrap();
                let x = random_spd(&GenSpec::new(dim, case * 2 + 1)).unwrap();
                let y = random_spd(&GenSpec::new(dim, case * 2 + 2)).unwrap();
                // X <= X + Y, so Phi(X) <= Phi(X + Y)
                let bigger = x.matrix().add(y.matrix());
                let fx = phi.apply(x.matrix()).unwrap();
                let fbig = phi.apply(&bigger).unwrap();
                let v = loewner_leq(&fx, &fbig, 1e-9).unwrap();
                assert!(v.holds, "{kind:?} case {case}: order not preserved");
                // positive definiteness of the image of a PD matrix
                let min = spectral_decompose_symmetric(&fx)
                    .unwrap()
                    .min_eigenvalue();
                assert!(min > 0.0, "{kind:?} case {case}: image not PD");
            }
        }
    }
}
