//! Deterministic random generation of SPD matrices, certified pairs, and
//! hypothesis-satisfying instances for the inequality suites. All sampling
//! is driven by counter-based streams, so identical specs produce identical
//! instances under any execution order.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::entropy::OperatorPair;
use crate::linalg::SpdMatrix;
use crate::maps::random_orthogonal;
use crate::matrix::Matrix;
use crate::scalar::SpectralWindow;
use crate::streams::stream;
use crate::{Error, Real, Result};

/// Cap on the relative spectrum used when an instance feeds the exponential
/// entropies; keeps `exp` of the spectrum well inside `f64` range.
const EXP_SPECTRUM_CAP: f64 = 8.0;

/// Fraction of the `v < 0` domain bound `1/|v|` that generated spectra may
/// occupy.
const EXP_DOMAIN_HEADROOM: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Constraint {
    /// Unconstrained pair: `A`, `B` independent.
    None,
    /// `B` is built to satisfy `mA <= B <= MA` for the spec's window.
    CertifiedWindow,
    /// Relative spectrum bounded for the deformed exponential at this `v`.
    ExpDomain { v: f64 },
    /// Hypotheses of the ratio comparison: `Sp(I + vX)` inside `[m, M]`.
    RatioK { v: f64, m: f64, big_m: f64 },
}

/// Everything needed to regenerate an instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub dim: usize,
    pub cond_max: f64,
    pub window: Option<SpectralWindow<f64>>,
    pub seed: u64,
    pub constraint: Constraint,
}

impl GenSpec {
    pub fn new(dim: usize, seed: u64) -> Self {
        Self {
            dim,
            cond_max: 1e4,
            window: None,
            seed,
            constraint: Constraint::None,
        }
    }

    pub fn with_window(mut self, window: SpectralWindow<f64>) -> Self {
        self.window = Some(window);
        self.constraint = Constraint::CertifiedWindow;
        self
    }

    pub fn with_constraint(mut self, constraint: Constraint) -> Self {
        self.constraint = constraint;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.dim < 1 {
            return Err(Error::InvalidParam("dim must be >= 1".into()));
        }
        if self.cond_max < 1.0 {
            return Err(Error::InvalidParam("cond_max must be >= 1".into()));
        }
        Ok(())
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return lo;
    }
    (rng.gen_range(lo.ln()..=hi.ln())).exp()
}

/// Assemble `Q diag(lambda) Q^T` from a fresh Haar-ish orthogonal `Q`.
fn assemble<F: Real>(rng: &mut ChaCha8Rng, eigenvalues: &[f64]) -> SpdMatrix<F> {
    let dim = eigenvalues.len();
    let q: Matrix<F> = random_orthogonal(dim, rng);
    let lam: Vec<F> = eigenvalues.iter().map(|&l| F::of(l)).collect();
    let m = q.matmul(&Matrix::diag(&lam)).matmul(&q.transpose());
    SpdMatrix::from_symmetric_unchecked(m)
}

/// Random SPD matrix with eigenvalues log-uniform in `[1, cond_max]`.
pub fn random_spd<F: Real>(spec: &GenSpec) -> Result<SpdMatrix<F>> {
    spec.validate()?;
    let mut rng = stream(spec.seed, "spd", spec.dim as u64);
    let lam: Vec<f64> = (0..spec.dim)
        .map(|_| log_uniform(&mut rng, 1.0, spec.cond_max))
        .collect();
    Ok(assemble(&mut rng, &lam))
}

/// Eigenvalues log-uniform in a window, with each one snapped to an endpoint
/// with probability `1/dim` per side so equality cases are exercised.
fn window_eigenvalues(rng: &mut ChaCha8Rng, dim: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..dim)
        .map(|_| {
            let p: f64 = rng.gen();
            let cut = 1.0 / dim as f64;
            if p < cut {
                lo
            } else if p < 2.0 * cut {
                hi
            } else {
                log_uniform(rng, lo, hi)
            }
        })
        .collect()
}

/// Random pair with a verified certificate `mA <= B <= MA`:
/// `B = A^{1/2} W A^{1/2}` with `Sp(W)` inside the window, endpoints included
/// with positive probability.
pub fn random_certified_pair<F: Real>(spec: &GenSpec) -> Result<OperatorPair<F>> {
    spec.validate()?;
    let window = spec
        .window
        .ok_or_else(|| Error::Precondition("certified pair needs a window".into()))?;
    let a: SpdMatrix<F> = random_spd(spec)?;
    let mut rng = stream(spec.seed, "certified-w", spec.dim as u64);
    let w_eigs = window_eigenvalues(&mut rng, spec.dim, window.lower(), window.upper());
    let w = assemble::<F>(&mut rng, &w_eigs);
    let sqrt = a.sqrt_pair()?;
    let b = SpdMatrix::from_symmetric_unchecked(sqrt.sandwich(w.matrix()));
    let fwindow = SpectralWindow::new(F::of(window.lower()), F::of(window.upper()))?;
    OperatorPair::with_window(a, b, fwindow)
}

/// Random pair without a window. Under [`Constraint::ExpDomain`] the relative
/// spectrum is kept strictly inside the deformed-exponential domain (and
/// under [`EXP_SPECTRUM_CAP`] in any case); otherwise `A` and `B` are
/// independent.
pub fn random_pair<F: Real>(spec: &GenSpec) -> Result<OperatorPair<F>> {
    spec.validate()?;
    match spec.constraint {
        Constraint::ExpDomain { v } => {
            let cap = if v < 0.0 {
                (EXP_DOMAIN_HEADROOM / v.abs()).min(EXP_SPECTRUM_CAP)
            } else {
                EXP_SPECTRUM_CAP
            };
            let a: SpdMatrix<F> = random_spd(spec)?;
            let mut rng = stream(spec.seed, "exp-domain-w", spec.dim as u64);
            let lo = cap / 64.0;
            let w_eigs: Vec<f64> = (0..spec.dim)
                .map(|_| log_uniform(&mut rng, lo, cap))
                .collect();
            let w = assemble::<F>(&mut rng, &w_eigs);
            let sqrt = a.sqrt_pair()?;
            let b = SpdMatrix::from_symmetric_unchecked(sqrt.sandwich(w.matrix()));
            OperatorPair::new(a, b)
        }
        _ => {
            let a: SpdMatrix<F> = random_spd(spec)?;
            let b: SpdMatrix<F> = random_spd(&GenSpec {
                seed: spec.seed ^ 0x5bd1_e995,
                ..*spec
            })?;
            OperatorPair::new(a, b)
        }
    }
}

/// Instance `(A, B, C)` for the ratio comparison: `Sp(I + vX)` inside
/// `[m, M]` for `X = A^{-1/2} B A^{-1/2}`, `C = B + PSD` with `C` kept inside
/// the deformed-exponential domain when `v < 0`. All certificates are
/// re-verified before returning.
pub fn random_ratio_k_instance<F: Real>(
    spec: &GenSpec,
) -> Result<(SpdMatrix<F>, SpdMatrix<F>, SpdMatrix<F>)> {
    spec.validate()?;
    let Constraint::RatioK { v, m, big_m } = spec.constraint else {
        return Err(Error::Precondition(
            "ratio-K instance needs the ratio-K constraint".into(),
        ));
    };
    if !(m > 0.0 && big_m > m) {
        return Err(Error::Precondition(format!(
            "ratio-K needs 0 < m < M, got m = {m}, M = {big_m}"
        )));
    }
    if v == 0.0 || !(-1.0..=1.0).contains(&v) {
        return Err(Error::Precondition(format!(
            "ratio-K needs v in [-1,0) u (0,1], got {v}"
        )));
    }
    if v > 0.0 && m <= 1.0 {
        return Err(Error::Precondition(format!(
            "ratio-K with v > 0 needs m > 1, got m = {m}"
        )));
    }
    if v < 0.0 && big_m >= 1.0 {
        return Err(Error::Precondition(format!(
            "ratio-K with v < 0 needs M < 1, got M = {big_m}"
        )));
    }

    // Sp(I + vX) in [m, M]  <=>  Sp(X) in the sorted interval of the two
    // endpoint preimages (m-1)/v, (M-1)/v.
    let (x_lo, x_hi) = {
        let p = (m - 1.0) / v;
        let q = (big_m - 1.0) / v;
        (p.min(q), p.max(q))
    };
    let a: SpdMatrix<F> = random_spd(spec)?;
    let mut rng = stream(spec.seed, "ratio-k", spec.dim as u64);
    let x_eigs = window_eigenvalues(&mut rng, spec.dim, x_lo, x_hi);
    let w = assemble::<F>(&mut rng, &x_eigs);
    let sqrt = a.sqrt_pair()?;
    let b = SpdMatrix::from_symmetric_unchecked(sqrt.sandwich(w.matrix()));

    // Perturbation headroom for C = B + P: for v < 0 the whitened spectrum
    // of C must stay below the exp_v bound 1/|v|.
    let x_max = x_eigs.iter().fold(f64::MIN, |acc, &e| acc.max(e));
    let headroom = if v < 0.0 {
        (EXP_DOMAIN_HEADROOM / v.abs() - x_max).max(0.0) * 0.9
    } else {
        x_max
    };
    let p_eigs: Vec<f64> = (0..spec.dim)
        .map(|_| rng.gen_range(0.0..=headroom.max(f64::MIN_POSITIVE)))
        .collect();
    let p_white = assemble::<F>(&mut rng, &p_eigs);
    let c = SpdMatrix::from_symmetric_unchecked(
        b.matrix().add(&sqrt.sandwich(p_white.matrix())),
    );

    // Certificate re-verification.
    let pair = OperatorPair::new(a.clone(), b.clone())?;
    let wtn = pair.whitened()?;
    let (lo, hi) = (
        wtn.relative_spectrum_min().to_f64(),
        wtn.relative_spectrum_max().to_f64(),
    );
    let slack = 1e-10 * (1.0 + x_hi.abs());
    if lo < x_lo - slack || hi > x_hi + slack {
        return Err(Error::Precondition(format!(
            "generated relative spectrum [{lo}, {hi}] escaped [{x_lo}, {x_hi}]"
        )));
    }
    if v < 0.0 {
        let pair_c = OperatorPair::new(a.clone(), c.clone())?;
        let hi_c = pair_c.whitened()?.relative_spectrum_max().to_f64();
        if hi_c >= 1.0 / v.abs() {
            return Err(Error::Precondition(format!(
                "perturbed instance left the exp_v domain: lambda_max = {hi_c}"
            )));
        }
    }
    let b_le_c = crate::linalg::loewner_leq(b.matrix(), c.matrix(), F::of(1e-10))?;
    if !b_le_c.holds {
        return Err(Error::Precondition(format!(
            "perturbation failed to keep B <= C (margin {})",
            b_le_c.margin
        )));
    }
    Ok((a, b, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::spectral_decompose;

    #[test]
    fn random_spd_is_deterministic() {
        let spec = GenSpec::new(4, 7);
        let a: SpdMatrix<f64> = random_spd(&spec).unwrap();
        let b: SpdMatrix<f64> = random_spd(&spec).unwrap();
        assert_eq!(a.matrix().data(), b.matrix().data());
    }

    #[test]
    fn random_spd_degenerate_spectrum() {
        let spec = GenSpec {
            cond_max: 1.0,
            ..GenSpec::new(2, 3)
        };
        let a: SpdMatrix<f64> = random_spd(&spec).unwrap();
        let eye = Matrix::identity(2);
        assert!(a.matrix().sub(&eye).frobenius_norm() <= 1e-12);
    }

    #[test]
    fn random_spd_condition_bounded() {
        let spec = GenSpec::new(8, 21);
        let a: SpdMatrix<f64> = random_spd(&spec).unwrap();
        let d = spectral_decompose(&a).unwrap();
        let cond = d.max_eigenvalue() / d.min_eigenvalue();
        assert!(cond <= 1e4 * (1.0 + 1e-8), "cond = {cond}");
    }

    #[test]
    fn certified_pair_verifies() {
        let w = SpectralWindow::new(0.5, 2.5).unwrap();
        for seed in 0..50 {
            let spec = GenSpec::new(3, seed).with_window(w);
            let pair: OperatorPair<f64> = random_certified_pair(&spec).unwrap();
            assert!(pair.window().is_some());
        }
    }

    #[test]
    fn certified_pair_needs_window() {
        let spec = GenSpec::new(3, 1);
        assert!(matches!(
            random_certified_pair::<f64>(&spec),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn narrow_window_collapses_to_scaled_copy() {
        let w = SpectralWindow::new(2.0, 2.0 + 1e-9).unwrap();
        let spec = GenSpec::new(3, 5).with_window(w);
        let pair: OperatorPair<f64> = random_certified_pair(&spec).unwrap();
        let target = pair.a().matrix().scale(2.0);
        let err = pair.b().matrix().sub(&target).frobenius_norm();
        assert!(err <= 1e-7 * target.frobenius_norm());
    }

    #[test]
    fn endpoint_coverage() {
        let w = SpectralWindow::new(1.0, 3.0).unwrap();
        let mut min_seen = f64::INFINITY;
        let mut max_seen = f64::MIN;
        for seed in 0..10_000u64 {
            let spec = GenSpec::new(2, seed).with_window(w);
            let pair: OperatorPair<f64> = random_certified_pair(&spec).unwrap();
            let wtn = pair.whitened().unwrap();
            min_seen = min_seen.min(wtn.relative_spectrum_min());
            max_seen = max_seen.max(wtn.relative_spectrum_max());
        }
        assert!(min_seen <= 1.0 * 1.01, "min eigenvalue never near m: {min_seen}");
        assert!(max_seen >= 3.0 * 0.99, "max eigenvalue never near M: {max_seen}");
    }

    #[test]
    fn exp_domain_constraint_bounds_spectrum() {
        for &v in &[-1.0, -0.5, 0.5] {
            for seed in 0..20 {
                let spec = GenSpec::new(4, seed).with_constraint(Constraint::ExpDomain { v });
                let pair: OperatorPair<f64> = random_pair(&spec).unwrap();
                let hi = pair.whitened().unwrap().relative_spectrum_max();
                if v < 0.0 {
                    assert!(hi < 1.0 / v.abs());
                }
                assert!(hi <= EXP_SPECTRUM_CAP * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn ratio_k_valid_instance() {
        let spec = GenSpec::new(3, 11).with_constraint(Constraint::RatioK {
            v: 0.5,
            m: 1.2,
            big_m: 2.0,
        });
        let (_a, _b, _c) = random_ratio_k_instance::<f64>(&spec).unwrap();
    }

    #[test]
    fn ratio_k_precondition_gates() {
        let spec = GenSpec::new(3, 11).with_constraint(Constraint::RatioK {
            v: -0.5,
            m: 0.5,
            big_m: 1.5,
        });
        assert!(matches!(
            random_ratio_k_instance::<f64>(&spec),
            Err(Error::Precondition(_))
        ));
        let spec = GenSpec::new(3, 11).with_constraint(Constraint::RatioK {
            v: 0.5,
            m: 0.9,
            big_m: 2.0,
        });
        assert!(random_ratio_k_instance::<f64>(&spec).is_err());
    }

    #[test]
    fn ratio_k_zero_perturbation_feasible() {
        // headroom may be ~0 for v < 0 with the spectrum near the bound;
        // C should still verify (C = B + tiny PSD)
        let spec = GenSpec::new(2, 3).with_constraint(Constraint::RatioK {
            v: -0.5,
            m: 0.3,
            big_m: 0.9,
        });
        let (a, b, c) = random_ratio_k_instance::<f64>(&spec).unwrap();
        assert_eq!(a.dim(), 2);
        let v = crate::linalg::loewner_leq(b.matrix(), c.matrix(), 1e-9).unwrap();
        assert!(v.holds);
    }
}
