//! Operator-valued quantities built from the perspective construction
//! `A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}`: weighted means, the relative
//! operator entropy, its Tsallis deformation, and the exponential-type
//! entropies.

use crate::linalg::{SpdMatrix, SpectralDecomp, SqrtPair};
use crate::matrix::Matrix;
use crate::scalar::{exp_v, ln_v, SpectralWindow, VParam};
use crate::{Error, Real, Result};

/// Certificate slack accepted when validating a window against the actual
/// relative spectrum.
const WINDOW_SLACK: f64 = 1e-10;

/// A pair of positive definite matrices, optionally carrying a certified
/// relative spectral window `[m, M]` with `mA <= B <= MA`.
#[derive(Debug, Clone)]
pub struct OperatorPair<F> {
    a: SpdMatrix<F>,
    b: SpdMatrix<F>,
    window: Option<SpectralWindow<F>>,
}

impl<F: Real> OperatorPair<F> {
    pub fn new(a: SpdMatrix<F>, b: SpdMatrix<F>) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                actual: b.dim(),
            });
        }
        Ok(Self { a, b, window: None })
    }

    /// Attach a window after verifying the certificate on the relative
    /// spectrum.
    pub fn with_window(a: SpdMatrix<F>, b: SpdMatrix<F>, window: SpectralWindow<F>) -> Result<Self> {
        let pair = Self::new(a, b)?;
        let w = pair.whitened()?;
        let lo = w.relative_spectrum_min();
        let hi = w.relative_spectrum_max();
        let slack = F::of(WINDOW_SLACK);
        if lo < window.lower() - slack * F::one().max(window.lower())
            || hi > window.upper() + slack * F::one().max(window.upper())
        {
            return Err(Error::Precondition(format!(
                "window [{}, {}] does not certify relative spectrum [{lo}, {hi}]",
                window.lower(),
                window.upper()
            )));
        }
        Ok(Self {
            window: Some(window),
            ..pair
        })
    }

    pub fn a(&self) -> &SpdMatrix<F> {
        &self.a
    }

    pub fn b(&self) -> &SpdMatrix<F> {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn window(&self) -> Option<&SpectralWindow<F>> {
        self.window.as_ref()
    }

    /// Precompute the whitening `X = A^{-1/2} B A^{-1/2}` and its spectral
    /// decomposition, reused by every entropy below.
    pub fn whitened(&self) -> Result<Whitened<F>> {
        let sqrt = self.a.sqrt_pair()?;
        let x = sqrt.whiten(self.b.matrix());
        let xd = crate::linalg::spectral_decompose_symmetric(&x)?;
        if xd.min_eigenvalue() <= F::zero() {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: xd.min_eigenvalue().to_f64(),
            });
        }
        Ok(Whitened { sqrt, xd })
    }
}

/// Whitening of an [`OperatorPair`]: `A^{1/2}`, `A^{-1/2}` and the spectral
/// decomposition of `X = A^{-1/2} B A^{-1/2}`.
#[derive(Debug, Clone)]
pub struct Whitened<F> {
    pub sqrt: SqrtPair<F>,
    pub xd: SpectralDecomp<F>,
}

impl<F: Real> Whitened<F> {
    pub fn relative_spectrum_min(&self) -> F {
        self.xd.min_eigenvalue()
    }

    pub fn relative_spectrum_max(&self) -> F {
        self.xd.max_eigenvalue()
    }

    /// Perspective `A^{1/2} f(X) A^{1/2}`.
    pub fn perspective(&self, f: impl Fn(F) -> F) -> Matrix<F> {
        self.sqrt.sandwich(&self.xd.apply(f))
    }

    /// Fallible perspective; the error names the offending eigenvalue of `X`.
    pub fn try_perspective(&self, f: impl Fn(F) -> Result<F>) -> Result<Matrix<F>> {
        Ok(self.sqrt.sandwich(&self.xd.try_apply(f)?))
    }

    /// Weighted mean `A^{1/2} X^v A^{1/2}` as a matrix.
    pub fn mean(&self, v: F) -> Matrix<F> {
        self.perspective(|t| t.powf(v))
    }
}

/// Weighted geometric-type mean `A^{1/2} (A^{-1/2} B A^{-1/2})^v A^{1/2}`
/// for any real `v` (the geometric mean proper when `v` is in `[0, 1]`).
/// `v = 0` gives `A`, `v = 1` gives `B`; commuting inputs reduce to the
/// entrywise `a^{1-v} b^v`.
pub fn natural_mean<F: Real>(pair: &OperatorPair<F>, v: F) -> Result<SpdMatrix<F>> {
    let w = pair.whitened()?;
    Ok(SpdMatrix::from_symmetric_unchecked(w.mean(v)))
}

/// Relative operator entropy `S(A|B) = A^{1/2} ln(A^{-1/2} B A^{-1/2}) A^{1/2}`.
pub fn relative_entropy<F: Real>(pair: &OperatorPair<F>) -> Result<Matrix<F>> {
    let w = pair.whitened()?;
    Ok(w.perspective(|t| t.ln()))
}

/// Tsallis relative operator entropy
/// `T_v(A|B) = (A natural_v B - A)/v = A^{1/2} ln_v(X) A^{1/2}`.
///
/// Computed through the deformed-logarithm functional calculus (one spectral
/// decomposition); the mean-difference form is [`tsallis_entropy_mean_form`],
/// kept as an independent cross-check.
pub fn tsallis_entropy<F: Real>(pair: &OperatorPair<F>, v: VParam<F>) -> Result<Matrix<F>> {
    let w = pair.whitened()?;
    let v = v.value();
    w.try_perspective(|t| ln_v(t, v))
}

/// `(A natural_v B - A)/v`, the mean-difference route to the same quantity.
pub fn tsallis_entropy_mean_form<F: Real>(
    pair: &OperatorPair<F>,
    v: VParam<F>,
) -> Result<Matrix<F>> {
    let mean = natural_mean(pair, v.value())?;
    Ok(mean
        .matrix()
        .sub(pair.a().matrix())
        .scale(v.value().recip()))
}

/// Exponential-type relative operator entropy
/// `E_v(A|B) = A^{1/2} exp_v(X) A^{1/2}`.
///
/// For `v < 0` the deformed exponential needs `lambda_max(X) < 1/|v|`; the
/// spectral radius is checked explicitly before any evaluation.
pub fn exp_entropy<F: Real>(pair: &OperatorPair<F>, v: VParam<F>) -> Result<SpdMatrix<F>> {
    let w = pair.whitened()?;
    let v = v.value();
    if v < F::zero() {
        let bound = v.abs().recip();
        let hi = w.relative_spectrum_max();
        if hi >= bound {
            return Err(Error::ExpDomain {
                lambda_max: hi.to_f64(),
                bound: bound.to_f64(),
                v: v.to_f64(),
            });
        }
    }
    let m = w.try_perspective(|t| exp_v(t, v))?;
    Ok(SpdMatrix::from_symmetric_unchecked(m))
}

/// `v -> 0` limit of [`exp_entropy`]: `E(A|B) = A^{1/2} exp(X) A^{1/2}`.
pub fn exp_entropy_limit<F: Real>(pair: &OperatorPair<F>) -> Result<SpdMatrix<F>> {
    let w = pair.whitened()?;
    Ok(SpdMatrix::from_symmetric_unchecked(
        w.perspective(|t| t.exp()),
    ))
}
