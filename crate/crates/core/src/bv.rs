//! Functions of bounded variation with respect to a fixed `k`, and the
//! symmetric two-norm `||f, h||_2G = V(f) ||h(a), k|| + V(h) ||f(a), k||`.
//!
//! Membership is decided by the estimator's `converged` status, which is a
//! heuristic: a finite refinement cannot prove the variation finite.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::{FunctionSpec, Interval};
use crate::numeric::{le_tol, slack};
use crate::spaces::{Pairing, Seminorm, SeminormAsPairing, TwoNorm};
use crate::variation::{estimate_variation, RefineConfig, Status, VariationEstimate};
use crate::vector::ComplexVector;

/// A function whose variation estimate converged. Immutable; the estimate is
/// computed once and reused by every operation.
#[derive(Debug, Clone)]
pub struct BvFunction {
    spec: FunctionSpec,
    pairing: Pairing,
    k: ComplexVector,
    variation: VariationEstimate,
    config: RefineConfig,
}

impl BvFunction {
    /// Estimates the variation of `spec` and accepts it when the estimate
    /// converged. Diverging estimates give [`Error::NotBounded`], exhausted
    /// budgets [`Error::Unconverged`].
    pub fn new(
        spec: FunctionSpec,
        pairing: Pairing,
        k: ComplexVector,
        config: RefineConfig,
    ) -> Result<Self> {
        let variation = estimate_variation(&spec, &*pairing, &k, &config)?;
        match variation.status {
            Status::Converged => Ok(Self {
                spec,
                pairing,
                k,
                variation,
                config,
            }),
            Status::Diverging => Err(Error::NotBounded {
                value: variation.value,
            }),
            Status::BudgetExhausted => Err(Error::Unconverged {
                max_points: config.max_points,
            }),
        }
    }

    pub fn spec(&self) -> &FunctionSpec {
        &self.spec
    }

    pub fn pairing(&self) -> &Pairing {
        &self.pairing
    }

    pub fn k(&self) -> &ComplexVector {
        &self.k
    }

    pub fn variation(&self) -> &VariationEstimate {
        &self.variation
    }

    /// Cached variation estimate.
    pub fn value(&self) -> f64 {
        self.variation.value
    }

    pub fn config(&self) -> &RefineConfig {
        &self.config
    }

    pub fn domain(&self) -> Interval {
        self.spec.domain()
    }

    /// `||f(a), k||`.
    pub fn start_norm(&self) -> Result<f64> {
        self.pairing
            .evaluate(&self.spec.eval(self.domain().lo())?, &self.k)
    }

    /// `alpha f` with variation set to `|alpha| V(f)` instead of re-estimated.
    pub fn scaled_formula(&self, alpha: Complex64) -> Self {
        let factor = alpha.norm();
        let mut variation = self.variation.clone();
        variation.value *= factor;
        for entry in &mut variation.trace {
            entry.sum *= factor;
        }
        Self {
            spec: self.spec.scaled(alpha),
            variation,
            ..self.clone()
        }
    }

    /// Fails with [`Error::Composition`] unless both share pairing, `k` and
    /// domain.
    pub fn check_compatible(&self, other: &BvFunction) -> Result<()> {
        let (p, q) = (&self.pairing, &other.pairing);
        if !(Arc::ptr_eq(p, q)
            || (p.name() == q.name() && p.dim_a() == q.dim_a() && p.dim_b() == q.dim_b()))
        {
            return Err(Error::Composition(format!(
                "pairings `{}` and `{}` differ",
                p.name(),
                q.name()
            )));
        }
        if self.k != other.k {
            return Err(Error::Composition(format!(
                "k differs: {} vs {}",
                self.k, other.k
            )));
        }
        if self.domain() != other.domain() {
            return Err(Error::Composition(format!(
                "domains differ: {} vs {}",
                self.domain(),
                other.domain()
            )));
        }
        Ok(())
    }
}

/// Sampled sup of `||g(x), k||` against `||g(a), k|| + ||g(b), k|| + sigma`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub sup_sample: f64,
    pub bound: f64,
    pub samples: usize,
    pub holds: bool,
}

/// Samples `||g(x), k||` on `n_samples` evenly spaced points (endpoints
/// included) and compares the largest with the bound built from `sigma`,
/// which should be at least the variation of `g`.
pub fn is_2k_bounded(
    g: &FunctionSpec,
    p: &dyn TwoNorm,
    k: &ComplexVector,
    sigma: f64,
    n_samples: usize,
) -> Result<BoundReport> {
    if sigma.is_nan() || sigma < 0.0 {
        return Err(Error::Domain(format!(
            "sigma must be nonnegative, got {sigma}"
        )));
    }
    if n_samples == 0 {
        return Err(Error::Domain("n_samples must be positive".into()));
    }
    let domain = g.domain();
    let (lo, hi) = (domain.lo(), domain.hi());
    let norm_at = |t: f64| -> Result<f64> { p.evaluate(&g.eval(t)?, k) };
    let bound = norm_at(lo)? + norm_at(hi)? + sigma;
    let mut sup_sample: f64 = 0.0;
    for j in 0..n_samples {
        let t = if j + 1 == n_samples && n_samples > 1 {
            hi
        } else if n_samples == 1 {
            lo
        } else {
            lo + domain.length() * (j as f64 / (n_samples - 1) as f64)
        };
        sup_sample = sup_sample.max(norm_at(t)?);
    }
    Ok(BoundReport {
        sup_sample,
        bound,
        samples: n_samples,
        holds: le_tol(sup_sample, bound),
    })
}

/// `alpha f + beta h`, with its variation re-estimated. The new estimate is
/// checked against `|alpha| V(f) + |beta| V(h)`, allowing for the
/// estimator's own tolerance since all three values are lower bounds.
pub fn bv_linear_combine(
    alpha: Complex64,
    f: &BvFunction,
    beta: Complex64,
    h: &BvFunction,
) -> Result<BvFunction> {
    f.check_compatible(h)?;
    let spec = FunctionSpec::combination(vec![(alpha, f.spec.clone()), (beta, h.spec.clone())])?;
    let combined = BvFunction::new(spec, f.pairing.clone(), f.k.clone(), f.config)?;
    let bound = alpha.norm() * f.value() + beta.norm() * h.value();
    let allowance = slack(combined.value(), bound) + f.config.gain_tol * bound;
    if combined.value() > bound + allowance {
        return Err(Error::Composition(format!(
            "combined variation {} exceeds the subadditive bound {bound}",
            combined.value()
        )));
    }
    Ok(combined)
}

/// Variation under the product pairing `(x, k) -> s(x) sB(k)`, computed as
/// `sB(k)` times the variation of `g` in the seminormed space `(A, s)`.
pub fn variation_via_seminorm(
    g: &FunctionSpec,
    s: Arc<dyn Seminorm>,
    k: &ComplexVector,
    s_b: Arc<dyn Seminorm>,
    cfg: &RefineConfig,
) -> Result<f64> {
    if k.dim() != s_b.dim() {
        return Err(Error::Dimension {
            expected: s_b.dim(),
            got: k.dim(),
        });
    }
    let scale = s_b.eval(k);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let pairing = SeminormAsPairing::new(s);
    let est = estimate_variation(g, &pairing, &ComplexVector::real(&[1.0]), cfg)?;
    match est.status {
        Status::Converged => Ok(scale * est.value),
        Status::Diverging => Err(Error::NotBounded {
            value: scale * est.value,
        }),
        Status::BudgetExhausted => Err(Error::Unconverged {
            max_points: cfg.max_points,
        }),
    }
}

/// `V(f) ||h(a), k|| + V(h) ||f(a), k||` from the cached variations.
pub fn bv_two_norm_2g(f: &BvFunction, h: &BvFunction) -> Result<f64> {
    f.check_compatible(h)?;
    Ok(f.value() * h.start_norm()? + h.value() * f.start_norm()?)
}
