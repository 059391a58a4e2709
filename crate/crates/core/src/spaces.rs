//! Generalized two-norms and seminorms.
//!
//! A generalized two-norm is a map `(a, b) -> ||a, b||` on an admissible set
//! `W` of pairs in `A x B`, homogeneous in each slot and subadditive in each
//! slot. Every built-in pairing here uses the full product `A x B`; a
//! restricted `W` is expressed with [`Restricted`], whose predicate must keep
//! the slices `{a : (a, b) in W}` and `{b : (a, b) in W}` vector subspaces.
//!
//! A symmetric pairing with `A = B` and `W = A x A` also covers the classical
//! two-norms of Gähler, so those need no separate type.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::vector::ComplexVector;

/// A seminorm on `C^dim`: absolutely homogeneous and subadditive, possibly
/// vanishing on nonzero vectors.
pub trait Seminorm: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    fn dim(&self) -> usize;
    fn eval(&self, x: &ComplexVector) -> f64;
}

/// Complex modulus on `C`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Modulus;

impl Seminorm for Modulus {
    fn name(&self) -> String {
        "modulus".into()
    }

    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, x: &ComplexVector) -> f64 {
        x[0].norm()
    }
}

/// Euclidean norm on `C^dim`.
#[derive(Debug, Clone, Copy)]
pub struct EuclideanNorm {
    pub dim: usize,
}

impl Seminorm for EuclideanNorm {
    fn name(&self) -> String {
        format!("euclidean{}", self.dim)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &ComplexVector) -> f64 {
        euclidean(x)
    }
}

/// `x -> |x_1|` on `C^dim`; a genuine seminorm for `dim > 1`.
#[derive(Debug, Clone, Copy)]
pub struct FirstComponent {
    pub dim: usize,
}

impl Seminorm for FirstComponent {
    fn name(&self) -> String {
        format!("first-component{}", self.dim)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &ComplexVector) -> f64 {
        x[0].norm()
    }
}

fn euclidean(x: &ComplexVector) -> f64 {
    x.components()
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// A generalized two-norm on `W ⊂ C^dim_a x C^dim_b`.
///
/// Implementations are pure: identical inputs give identical outputs.
/// [`TwoNorm::norm`] may assume its arguments have the declared dimensions
/// and lie in `W`; [`TwoNorm::evaluate`] checks both.
pub trait TwoNorm: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;
    fn dim_a(&self) -> usize;
    fn dim_b(&self) -> usize;
    fn norm(&self, a: &ComplexVector, b: &ComplexVector) -> f64;

    /// Membership predicate for `W`.
    fn admits(&self, _a: &ComplexVector, _b: &ComplexVector) -> bool {
        true
    }

    /// Whether the pairing is claimed to be a generalized symmetric two-norm
    /// on `A x A`.
    fn is_symmetric(&self) -> bool {
        false
    }

    fn evaluate(&self, a: &ComplexVector, b: &ComplexVector) -> Result<f64> {
        if a.dim() != self.dim_a() {
            return Err(Error::Dimension {
                expected: self.dim_a(),
                got: a.dim(),
            });
        }
        if b.dim() != self.dim_b() {
            return Err(Error::Dimension {
                expected: self.dim_b(),
                got: b.dim(),
            });
        }
        if !self.admits(a, b) {
            return Err(Error::Membership {
                pairing: self.name().to_string(),
            });
        }
        Ok(self.norm(a, b))
    }
}

/// Shared handle to a pairing.
pub type Pairing = Arc<dyn TwoNorm>;

/// `||a, b||` with dimension and membership checks.
pub fn eval_pairing(p: &dyn TwoNorm, a: &ComplexVector, b: &ComplexVector) -> Result<f64> {
    p.evaluate(a, b)
}

/// `(| ||a,c|| - ||b,c|| |, ||a - b, c||)`; the first never exceeds the
/// second in a generalized two-normed space.
pub fn reverse_triangle_gap(
    p: &dyn TwoNorm,
    a: &ComplexVector,
    b: &ComplexVector,
    c: &ComplexVector,
) -> Result<(f64, f64)> {
    let ac = p.evaluate(a, c)?;
    let bc = p.evaluate(b, c)?;
    let diff = a.checked_sub(b)?;
    let dc = p.evaluate(&diff, c)?;
    Ok(((ac - bc).abs(), dc))
}

/// `||w, k|| = sqrt(|w_1|^2 + ... + |w_n|^2) |k|` on `C^n x C`.
#[derive(Debug, Clone)]
pub struct EuclideanModulus {
    dim: usize,
    name: String,
}

impl EuclideanModulus {
    pub fn with_dim(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        let name = if dim == 2 {
            "euclidean-modulus".to_string()
        } else {
            format!("euclidean-modulus{dim}")
        };
        Self { dim, name }
    }
}

impl TwoNorm for EuclideanModulus {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim_a(&self) -> usize {
        self.dim
    }

    fn dim_b(&self) -> usize {
        1
    }

    fn norm(&self, a: &ComplexVector, b: &ComplexVector) -> f64 {
        euclidean(a) * b[0].norm()
    }
}

/// The pairing on `C^2 x C` given by the Euclidean norm times the modulus.
pub fn make_euclidean_modulus() -> Pairing {
    Arc::new(EuclideanModulus::with_dim(2))
}

/// `||a, b|| = s_a(a) s_b(b)` for two seminorms.
#[derive(Debug, Clone)]
pub struct SeminormProduct {
    left: Arc<dyn Seminorm>,
    right: Arc<dyn Seminorm>,
    name: String,
}

impl SeminormProduct {
    pub fn new(left: Arc<dyn Seminorm>, right: Arc<dyn Seminorm>) -> Self {
        let name = if left.name() == "modulus" && right.name() == "modulus" {
            "modulus-product".to_string()
        } else {
            format!("seminorm-product({},{})", left.name(), right.name())
        };
        Self { left, right, name }
    }

    pub fn left(&self) -> &Arc<dyn Seminorm> {
        &self.left
    }

    pub fn right(&self) -> &Arc<dyn Seminorm> {
        &self.right
    }
}

impl TwoNorm for SeminormProduct {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim_a(&self) -> usize {
        self.left.dim()
    }

    fn dim_b(&self) -> usize {
        self.right.dim()
    }

    fn norm(&self, a: &ComplexVector, b: &ComplexVector) -> f64 {
        self.left.eval(a) * self.right.eval(b)
    }

    fn is_symmetric(&self) -> bool {
        self.left.dim() == self.right.dim() && self.left.name() == self.right.name()
    }
}

pub fn make_seminorm_product(left: Arc<dyn Seminorm>, right: Arc<dyn Seminorm>) -> Pairing {
    Arc::new(SeminormProduct::new(left, right))
}

/// Product of two complex moduli on `C x C`.
pub fn make_modulus_product() -> Pairing {
    make_seminorm_product(Arc::new(Modulus), Arc::new(Modulus))
}

/// `||(w_1, w_2), k|| = |w_1|^2 |k|`. Homogeneous of degree two in the first
/// slot, so it violates G1 and G3; kept as a negative control for the
/// axiom harness.
#[derive(Debug, Clone, Copy, Default)]
pub struct BrokenG3;

impl TwoNorm for BrokenG3 {
    fn name(&self) -> &str {
        "broken-g3"
    }

    fn dim_a(&self) -> usize {
        2
    }

    fn dim_b(&self) -> usize {
        1
    }

    fn norm(&self, a: &ComplexVector, b: &ComplexVector) -> f64 {
        a[0].norm_sqr() * b[0].norm()
    }
}

/// The constant zero pairing.
#[derive(Debug, Clone, Copy)]
pub struct ZeroPairing {
    pub dim_a: usize,
    pub dim_b: usize,
}

impl TwoNorm for ZeroPairing {
    fn name(&self) -> &str {
        "zero"
    }

    fn dim_a(&self) -> usize {
        self.dim_a
    }

    fn dim_b(&self) -> usize {
        self.dim_b
    }

    fn norm(&self, _a: &ComplexVector, _b: &ComplexVector) -> f64 {
        0.0
    }

    fn is_symmetric(&self) -> bool {
        self.dim_a == self.dim_b
    }
}

type Predicate = dyn Fn(&ComplexVector, &ComplexVector) -> bool + Send + Sync;

/// A pairing restricted to the pairs accepted by `predicate`.
pub struct Restricted {
    inner: Pairing,
    predicate: Arc<Predicate>,
    name: String,
}

impl Restricted {
    pub fn new<F>(inner: Pairing, name: impl Into<String>, predicate: F) -> Self
    where
        F: Fn(&ComplexVector, &ComplexVector) -> bool + Send + Sync + 'static,
    {
        Self {
            inner,
            predicate: Arc::new(predicate),
            name: name.into(),
        }
    }
}

impl fmt::Debug for Restricted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Restricted")
            .field("inner", &self.inner)
            .field("name", &self.name)
            .finish()
    }
}

impl TwoNorm for Restricted {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim_a(&self) -> usize {
        self.inner.dim_a()
    }

    fn dim_b(&self) -> usize {
        self.inner.dim_b()
    }

    fn norm(&self, a: &ComplexVector, b: &ComplexVector) -> f64 {
        self.inner.norm(a, b)
    }

    fn admits(&self, a: &ComplexVector, b: &ComplexVector) -> bool {
        (self.predicate)(a, b) && self.inner.admits(a, b)
    }

    fn is_symmetric(&self) -> bool {
        self.inner.is_symmetric()
    }
}

/// `(x, b) -> s(x)`, ignoring the scalar second slot. Used to run the
/// refinement engine on a plain seminormed space.
#[derive(Debug, Clone)]
pub(crate) struct SeminormAsPairing {
    seminorm: Arc<dyn Seminorm>,
    name: String,
}

impl SeminormAsPairing {
    pub(crate) fn new(seminorm: Arc<dyn Seminorm>) -> Self {
        let name = format!("seminorm({})", seminorm.name());
        Self { seminorm, name }
    }
}

impl TwoNorm for SeminormAsPairing {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim_a(&self) -> usize {
        self.seminorm.dim()
    }

    fn dim_b(&self) -> usize {
        1
    }

    fn norm(&self, a: &ComplexVector, _b: &ComplexVector) -> f64 {
        self.seminorm.eval(a)
    }
}

/// Names accepted by [`pairing_by_name`].
pub const PAIRING_NAMES: &[&str] = &["euclidean-modulus", "modulus-product", "broken-g3", "zero"];

pub fn pairing_by_name(name: &str) -> Result<Pairing> {
    match name {
        "euclidean-modulus" => Ok(make_euclidean_modulus()),
        "modulus-product" => Ok(make_modulus_product()),
        "broken-g3" => Ok(Arc::new(BrokenG3)),
        "zero" => Ok(Arc::new(ZeroPairing { dim_a: 2, dim_b: 1 })),
        _ => Err(Error::Unknown {
            kind: "pairing",
            name: name.to_string(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cv(z: &[Complex64]) -> ComplexVector {
        ComplexVector::new(z.to_vec()).unwrap()
    }

    #[test]
    fn euclidean_modulus_values() {
        let p = make_euclidean_modulus();
        let v = eval_pairing(
            &*p,
            &ComplexVector::real(&[3.0, 4.0]),
            &ComplexVector::real(&[1.0]),
        )
        .unwrap();
        assert_eq!(v, 5.0);

        let v = eval_pairing(&*p, &cv(&[c(0.0, 2.0), c(0.0, -1.0)]), &cv(&[c(0.0, -0.5)])).unwrap();
        assert!((v - 5f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((v - 1.118033988).abs() < 1e-9);

        let v = eval_pairing(
            &*p,
            &cv(&[c(0.0, 1.0), c(0.0, 1.0)]),
            &ComplexVector::real(&[2f64.sqrt()]),
        )
        .unwrap();
        assert!((v - 2.0).abs() < 1e-15);

        let v = eval_pairing(&*p, &ComplexVector::zeros(2), &cv(&[c(3.0, -7.0)])).unwrap();
        assert_eq!(v, 0.0);

        let alpha = c(-1.5, 2.0);
        let v = eval_pairing(
            &*p,
            &ComplexVector::basis(2, 0).scale(alpha),
            &ComplexVector::real(&[1.0]),
        )
        .unwrap();
        assert!((v - alpha.norm()).abs() < 1e-15);
    }

    #[test]
    fn zero_second_slot_gives_zero() {
        for p in [
            make_euclidean_modulus(),
            make_modulus_product(),
            Arc::new(BrokenG3) as Pairing,
        ] {
            let a = ComplexVector::basis(p.dim_a(), 0).scale(c(3.0, 1.0));
            assert_eq!(
                p.evaluate(&a, &ComplexVector::zeros(p.dim_b())).unwrap(),
                0.0,
                "{}",
                p.name()
            );
        }
    }

    #[test]
    fn seminorm_product_values() {
        let p = make_modulus_product();
        assert_eq!(p.name(), "modulus-product");
        assert!(p.is_symmetric());
        let v = p
            .evaluate(&ComplexVector::real(&[2.0]), &cv(&[c(0.0, 3.0)]))
            .unwrap();
        assert_eq!(v, 6.0);
        assert_eq!(
            p.evaluate(&ComplexVector::zeros(1), &cv(&[c(0.0, 3.0)]))
                .unwrap(),
            0.0
        );

        let kernel = make_seminorm_product(Arc::new(FirstComponent { dim: 2 }), Arc::new(Modulus));
        assert!(!kernel.is_symmetric());
        assert_eq!(
            kernel
                .evaluate(
                    &ComplexVector::real(&[0.0, 7.0]),
                    &ComplexVector::real(&[5.0])
                )
                .unwrap(),
            0.0
        );
    }

    #[test]
    fn reverse_triangle_examples() {
        let p = make_euclidean_modulus();
        let one = ComplexVector::real(&[1.0]);
        let a = ComplexVector::real(&[3.0, 4.0]);
        assert_eq!(reverse_triangle_gap(&*p, &a, &a, &one).unwrap(), (0.0, 0.0));

        let (lo, hi) = reverse_triangle_gap(
            &*p,
            &ComplexVector::real(&[1.0, 0.0]),
            &ComplexVector::real(&[0.0, 1.0]),
            &ComplexVector::real(&[2.0]),
        )
        .unwrap();
        assert_eq!(lo, 0.0);
        assert!((hi - 2.0 * 2f64.sqrt()).abs() < 1e-15);

        let gap = reverse_triangle_gap(
            &*p,
            &ComplexVector::real(&[2.0, 0.0]),
            &ComplexVector::real(&[1.0, 0.0]),
            &one,
        )
        .unwrap();
        assert_eq!(gap, (1.0, 1.0));
    }

    #[test]
    fn dimension_and_membership_errors() {
        let p = make_euclidean_modulus();
        let err = p
            .evaluate(&ComplexVector::real(&[1.0]), &ComplexVector::real(&[1.0]))
            .unwrap_err();
        assert_eq!(
            err,
            Error::Dimension {
                expected: 2,
                got: 1
            }
        );
        let err = p
            .evaluate(
                &ComplexVector::real(&[1.0, 0.0]),
                &ComplexVector::real(&[1.0, 0.0]),
            )
            .unwrap_err();
        assert_eq!(
            err,
            Error::Dimension {
                expected: 1,
                got: 2
            }
        );

        // W = {(w, k) : w_2 = 0}: slices are subspaces.
        let restricted = Restricted::new(make_euclidean_modulus(), "first-axis", |a, _| {
            a[1] == Complex64::new(0.0, 0.0)
        });
        let one = ComplexVector::real(&[1.0]);
        assert_eq!(
            restricted
                .evaluate(&ComplexVector::real(&[2.0, 0.0]), &one)
                .unwrap(),
            2.0
        );
        assert!(matches!(
            restricted.evaluate(&ComplexVector::real(&[2.0, 1.0]), &one),
            Err(Error::Membership { .. })
        ));
        assert!(matches!(
            reverse_triangle_gap(
                &restricted,
                &ComplexVector::real(&[2.0, 1.0]),
                &ComplexVector::real(&[2.0, 0.0]),
                &one
            ),
            Err(Error::Membership { .. })
        ));
    }

    #[test]
    fn lookup_by_name() {
        for name in PAIRING_NAMES {
            assert_eq!(pairing_by_name(name).unwrap().name(), *name);
        }
        assert!(matches!(
            pairing_by_name("gahler"),
            Err(Error::Unknown { .. })
        ));
    }
}
