//! Functions `g : [a, b] -> C^n` and the built-in catalog.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{parse_expression, BinOp, Expr, Expression};
use crate::numeric::exact_sum;
use crate::spaces::TwoNorm;
use crate::vector::ComplexVector;

/// Closed interval `[lo, hi]` with `lo < hi`, both finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Domain(format!(
                "interval endpoints must be finite, got [{lo}, {hi}]"
            )));
        }
        if lo >= hi {
            return Err(Error::Domain(format!(
                "interval needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Built-in functions with known analytic behavior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatalogId {
    /// `(i t, i t)`.
    LinearIi,
    /// `t sin(1/t)`, extended by 0 at `t = 0`. Unbounded variation near 0.
    XsinInvX,
    /// `t^2 sin(1/t)`, extended by 0 at `t = 0`. Bounded variation.
    X2sinInvX,
    /// `t`.
    MonotoneId,
    /// The constant `(1, 1)`.
    ConstC,
}

impl CatalogId {
    pub const ALL: [CatalogId; 5] = [
        CatalogId::LinearIi,
        CatalogId::XsinInvX,
        CatalogId::X2sinInvX,
        CatalogId::MonotoneId,
        CatalogId::ConstC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CatalogId::LinearIi => "linear_ii",
            CatalogId::XsinInvX => "xsin_inv_x",
            CatalogId::X2sinInvX => "x2sin_inv_x",
            CatalogId::MonotoneId => "monotone_id",
            CatalogId::ConstC => "const_c",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|id| id.name() == name)
    }

    pub fn dim(self) -> usize {
        match self {
            CatalogId::LinearIi | CatalogId::ConstC => 2,
            CatalogId::XsinInvX | CatalogId::X2sinInvX | CatalogId::MonotoneId => 1,
        }
    }

    pub fn default_domain(self) -> Interval {
        Interval { lo: 0.0, hi: 1.0 }
    }

    /// First component; the whole value for scalar entries.
    pub(crate) fn eval_scalar(self, t: f64) -> Complex64 {
        match self {
            CatalogId::LinearIi => Complex64::new(0.0, t),
            CatalogId::XsinInvX => {
                Complex64::new(if t == 0.0 { 0.0 } else { t * (1.0 / t).sin() }, 0.0)
            }
            CatalogId::X2sinInvX => Complex64::new(
                if t == 0.0 {
                    0.0
                } else {
                    t * t * (1.0 / t).sin()
                },
                0.0,
            ),
            CatalogId::MonotoneId => Complex64::new(t, 0.0),
            CatalogId::ConstC => Complex64::new(1.0, 0.0),
        }
    }

    pub fn eval(self, t: f64) -> ComplexVector {
        let z = self.eval_scalar(t);
        match self.dim() {
            1 => ComplexVector::scalar(z),
            _ => ComplexVector::new(vec![z, z]).expect("nonempty"),
        }
    }

    /// Closed-form variation on `domain` under the named pairing with second
    /// argument `k`, where one is known. `Some(INFINITY)` marks a known
    /// unbounded variation.
    pub fn reference_variation(
        self,
        pairing: &str,
        k: &ComplexVector,
        domain: &Interval,
    ) -> Option<f64> {
        let len = domain.length();
        match self {
            CatalogId::ConstC => Some(0.0),
            // ||(i dt, i dt), k|| = sqrt(2) |dt| |k|; 2(b - a) for k = sqrt(2).
            CatalogId::LinearIi if pairing == "euclidean-modulus" => {
                Some(2f64.sqrt() * k[0].norm() * len)
            }
            CatalogId::MonotoneId
                if pairing == "modulus-product" || pairing == "euclidean-modulus1" =>
            {
                Some(k[0].norm() * len)
            }
            CatalogId::XsinInvX
                if domain.contains(0.0) && k[0].norm() > 0.0 && pairing == "modulus-product" =>
            {
                Some(f64::INFINITY)
            }
            _ => None,
        }
    }
}

impl fmt::Display for CatalogId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
enum Body {
    Expr(Expression),
    Catalog(CatalogId),
    /// `sum_j c_j f_j`.
    Combination(Vec<(Complex64, FunctionSpec)>),
    /// Zero-padded into a larger codomain.
    Embedded(FunctionSpec),
}

/// A function of a real variable with values in `C^codomain_dim`, defined on
/// a closed interval. Immutable and cheap to clone.
#[derive(Debug, Clone)]
pub struct FunctionSpec {
    body: Arc<Body>,
    codomain_dim: usize,
    domain: Interval,
}

impl FunctionSpec {
    pub fn catalog(id: CatalogId, domain: Interval) -> Self {
        Self {
            body: Arc::new(Body::Catalog(id)),
            codomain_dim: id.dim(),
            domain,
        }
    }

    pub fn from_expression(expr: Expression, domain: Interval) -> Self {
        let codomain_dim = expr.arity();
        Self {
            body: Arc::new(Body::Expr(expr)),
            codomain_dim,
            domain,
        }
    }

    /// A catalog identifier or an expression, with the arity taken from the
    /// text.
    pub fn from_source(source: &str, domain: Interval) -> Result<Self> {
        match CatalogId::from_name(source.trim()) {
            Some(id) => Ok(Self::catalog(id, domain)),
            None => Ok(Self::from_expression(parse_expression(source)?, domain)),
        }
    }

    /// The constant function `value`.
    pub fn constant(value: &ComplexVector, domain: Interval) -> Self {
        let mut items: Vec<Expr> = value
            .components()
            .iter()
            .map(|z| {
                Expr::Binary(
                    BinOp::Add,
                    Box::new(Expr::Num(z.re)),
                    Box::new(Expr::Imag(z.im)),
                )
            })
            .collect();
        let root = if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Expr::Tuple(items)
        };
        Self::from_expression(Expression::new(root).expect("scalar components"), domain)
    }

    /// `sum_j c_j f_j`; all terms must share codomain and domain.
    pub fn combination(terms: Vec<(Complex64, FunctionSpec)>) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::Composition("empty combination".into()));
        };
        let (dim, domain) = (first.codomain_dim, first.domain);
        for (_, f) in &terms {
            if f.codomain_dim != dim {
                return Err(Error::Composition(format!(
                    "codomain dimensions {} and {} differ",
                    dim, f.codomain_dim
                )));
            }
            if f.domain != domain {
                return Err(Error::Composition(format!(
                    "domains {} and {} differ",
                    domain, f.domain
                )));
            }
        }
        Ok(Self {
            body: Arc::new(Body::Combination(terms)),
            codomain_dim: dim,
            domain,
        })
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        Self::combination(vec![(alpha, self.clone())]).expect("single term")
    }

    pub fn sum(&self, other: &FunctionSpec) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        Self::combination(vec![(one, self.clone()), (one, other.clone())])
    }

    /// Zero-pads the codomain to `dim` components.
    pub fn embedded(&self, dim: usize) -> Result<Self> {
        match dim.cmp(&self.codomain_dim) {
            std::cmp::Ordering::Equal => Ok(self.clone()),
            std::cmp::Ordering::Less => Err(Error::Dimension {
                expected: dim,
                got: self.codomain_dim,
            }),
            std::cmp::Ordering::Greater => Ok(Self {
                body: Arc::new(Body::Embedded(self.clone())),
                codomain_dim: dim,
                domain: self.domain,
            }),
        }
    }

    /// The same function on a subinterval of its domain.
    pub fn restricted(&self, domain: Interval) -> Result<Self> {
        if !self.domain.contains_interval(&domain) {
            return Err(Error::Domain(format!(
                "{} is not inside {}",
                domain, self.domain
            )));
        }
        Ok(Self {
            body: self.body.clone(),
            codomain_dim: self.codomain_dim,
            domain,
        })
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain_dim
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn catalog_id(&self) -> Option<CatalogId> {
        match &*self.body {
            Body::Catalog(id) => Some(*id),
            _ => None,
        }
    }

    /// Source text: catalog name, printed expression, or printed combination.
    pub fn describe(&self) -> String {
        match &*self.body {
            Body::Expr(e) => e.to_string(),
            Body::Catalog(id) => id.name().to_string(),
            Body::Combination(terms) => terms
                .iter()
                .map(|(c, f)| format!("({}{:+}i)*({})", c.re, c.im, f.describe()))
                .collect::<Vec<_>>()
                .join(" + "),
            Body::Embedded(f) => format!("embed{}({})", self.codomain_dim, f.describe()),
        }
    }

    /// `g(t)` for `t` in the closed domain.
    pub fn eval(&self, t: f64) -> Result<ComplexVector> {
        if !self.domain.contains(t) {
            return Err(Error::Domain(format!("t = {t} is outside {}", self.domain)));
        }
        self.eval_unchecked(t)
    }

    fn eval_unchecked(&self, t: f64) -> Result<ComplexVector> {
        match &*self.body {
            Body::Catalog(id) => Ok(id.eval(t)),
            Body::Expr(e) => ComplexVector::new(e.eval(t)?),
            Body::Combination(terms) => {
                let mut acc = vec![Complex64::new(0.0, 0.0); self.codomain_dim];
                for (c, f) in terms {
                    let v = f.eval_unchecked(t)?;
                    for (slot, z) in acc.iter_mut().zip(v.components()) {
                        *slot += c * z;
                    }
                }
                ComplexVector::new(acc)
            }
            Body::Embedded(f) => f.eval_unchecked(t)?.pad_to(self.codomain_dim),
        }
    }
}

/// Parses `text` as a function with `codomain_dim` components on `domain`.
pub fn parse_function(text: &str, codomain_dim: usize, domain: Interval) -> Result<FunctionSpec> {
    let expr = parse_expression(text)?;
    if expr.arity() != codomain_dim {
        return Err(Error::Arity {
            expected: codomain_dim,
            got: expr.arity(),
        });
    }
    Ok(FunctionSpec::from_expression(expr, domain))
}

pub fn eval_function(f: &FunctionSpec, t: f64) -> Result<ComplexVector> {
    f.eval(t)
}

/// Tag of a point in a [`TaggedAdversary`] partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tag {
    Lo,
    Hi,
}

/// A two-valued function known only through tagged partitions: points tagged
/// [`Tag::Hi`] map to `hi_value`, points tagged [`Tag::Lo`] to `lo_value`.
///
/// Stands in for functions that switch on a property floating point cannot
/// decide, such as rationality of the argument.
#[derive(Debug, Clone)]
pub struct TaggedAdversary {
    pub hi_value: ComplexVector,
    pub lo_value: ComplexVector,
    pub domain: Interval,
}

impl TaggedAdversary {
    pub fn new(hi_value: ComplexVector, lo_value: ComplexVector, domain: Interval) -> Result<Self> {
        if hi_value.dim() != lo_value.dim() {
            return Err(Error::Dimension {
                expected: hi_value.dim(),
                got: lo_value.dim(),
            });
        }
        Ok(Self {
            hi_value,
            lo_value,
            domain,
        })
    }

    pub fn value(&self, tag: Tag) -> &ComplexVector {
        match tag {
            Tag::Hi => &self.hi_value,
            Tag::Lo => &self.lo_value,
        }
    }

    /// Uniform partition with `n` subintervals, tags alternating from `Lo`.
    pub fn alternating_partition(&self, n: usize) -> Vec<(f64, Tag)> {
        let (lo, len) = (self.domain.lo(), self.domain.length());
        (0..=n)
            .map(|j| {
                let t = if j == n {
                    self.domain.hi()
                } else {
                    lo + len * j as f64 / n as f64
                };
                (t, if j % 2 == 0 { Tag::Lo } else { Tag::Hi })
            })
            .collect()
    }

    /// `max(||hi_value, k||, ||lo_value, k||)`: the supremum of `||g(x), k||`.
    pub fn sup_norm(&self, p: &dyn TwoNorm, k: &ComplexVector) -> Result<f64> {
        Ok(p.evaluate(&self.hi_value, k)?
            .max(p.evaluate(&self.lo_value, k)?))
    }
}

/// Variation sum over the alternating partition with `n` subintervals; equals
/// `n ||hi_value - lo_value, k||`, growing without bound in `n`.
pub fn adversary_partition_sum(
    adv: &TaggedAdversary,
    p: &dyn TwoNorm,
    k: &ComplexVector,
    n: usize,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::Config(
            "the partition needs at least one subinterval".into(),
        ));
    }
    let points = adv.alternating_partition(n);
    let terms = points
        .windows(2)
        .map(|w| {
            let diff = adv.value(w[1].1).checked_sub(adv.value(w[0].1))?;
            p.evaluate(&diff, k)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(exact_sum(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::make_euclidean_modulus;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn interval_validation() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
        let i = Interval::new(3f64.sqrt(), 2.0).unwrap();
        assert!(i.contains(2.0) && i.contains(3f64.sqrt()) && !i.contains(1.7));
    }

    #[test]
    fn parse_and_evaluate() {
        let f = parse_function("(i*t, i*t)", 2, unit()).unwrap();
        assert_eq!(
            f.eval(0.5).unwrap(),
            ComplexVector::new(vec![Complex64::new(0.0, 0.5); 2]).unwrap()
        );
        assert_eq!(
            parse_function("t^2", 1, Interval::new(0.0, 4.0).unwrap())
                .unwrap()
                .eval(3.0)
                .unwrap(),
            ComplexVector::real(&[9.0])
        );
        assert_eq!(
            parse_function("t^2 * sin(1/t)", 1, unit())
                .unwrap()
                .codomain_dim(),
            1
        );
        assert!(matches!(
            parse_function("(t, t)", 1, unit()),
            Err(Error::Arity {
                expected: 1,
                got: 2
            })
        ));
        assert!(matches!(
            parse_function("(i*t,", 2, unit()),
            Err(Error::Syntax { offset: 5, .. })
        ));
    }

    #[test]
    fn domain_and_singularity_errors() {
        let f = parse_function("t*sin(1/t)", 1, unit()).unwrap();
        assert!(matches!(f.eval(1.5), Err(Error::Domain(_))));
        assert!(matches!(f.eval(0.0), Err(Error::Evaluation { .. })));
        // The catalog entry defines the closure value instead.
        let g = FunctionSpec::catalog(CatalogId::XsinInvX, unit());
        assert_eq!(g.eval(0.0).unwrap(), ComplexVector::real(&[0.0]));
        assert_eq!(
            FunctionSpec::catalog(CatalogId::X2sinInvX, unit())
                .eval(0.0)
                .unwrap(),
            ComplexVector::real(&[0.0])
        );
    }

    #[test]
    fn catalog_entries() {
        for id in CatalogId::ALL {
            assert_eq!(CatalogId::from_name(id.name()), Some(id));
            let f = FunctionSpec::catalog(id, unit());
            assert_eq!(f.eval(0.25).unwrap().dim(), id.dim());
        }
        assert_eq!(
            CatalogId::LinearIi.eval(1.0),
            ComplexVector::new(vec![Complex64::i(); 2]).unwrap()
        );
        assert_eq!(
            CatalogId::ConstC.eval(0.3),
            ComplexVector::real(&[1.0, 1.0])
        );
        let k = ComplexVector::real(&[2f64.sqrt()]);
        let v = CatalogId::LinearIi
            .reference_variation("euclidean-modulus", &k, &Interval::new(1.0, 2.0).unwrap())
            .unwrap();
        assert!((v - 2.0).abs() < 1e-15);
        assert_eq!(
            CatalogId::X2sinInvX.reference_variation("euclidean-modulus", &k, &unit()),
            None
        );
    }

    #[test]
    fn combinations_and_embedding() {
        let f = FunctionSpec::catalog(CatalogId::LinearIi, unit());
        let g = f.scaled(Complex64::new(3.0, 0.0));
        assert_eq!(
            g.eval(1.0).unwrap(),
            ComplexVector::new(vec![Complex64::new(0.0, 3.0); 2]).unwrap()
        );
        let zero = FunctionSpec::combination(vec![
            (Complex64::new(1.0, 0.0), f.clone()),
            (Complex64::new(-1.0, 0.0), f.clone()),
        ])
        .unwrap();
        assert_eq!(zero.eval(0.7).unwrap().max_modulus(), 0.0);

        let scalar = FunctionSpec::catalog(CatalogId::MonotoneId, unit());
        assert!(matches!(f.sum(&scalar), Err(Error::Composition(_))));
        let other = FunctionSpec::catalog(CatalogId::LinearIi, Interval::new(0.0, 2.0).unwrap());
        assert!(matches!(f.sum(&other), Err(Error::Composition(_))));

        let lifted = scalar.embedded(2).unwrap();
        assert_eq!(lifted.eval(0.5).unwrap(), ComplexVector::real(&[0.5, 0.0]));
        assert!(f.embedded(1).is_err());

        let sub = f.restricted(Interval::new(0.25, 0.5).unwrap()).unwrap();
        assert!(sub.eval(0.75).is_err());
        assert!(f.restricted(Interval::new(0.5, 1.5).unwrap()).is_err());
    }

    #[test]
    fn constant_function() {
        let c =
            ComplexVector::new(vec![Complex64::new(1.0, -2.0), Complex64::new(0.0, 0.5)]).unwrap();
        let f = FunctionSpec::constant(&c, unit());
        assert_eq!(f.eval(0.3).unwrap(), c);
        let s = FunctionSpec::constant(&ComplexVector::real(&[-4.0]), unit());
        assert_eq!(s.eval(0.0).unwrap(), ComplexVector::real(&[-4.0]));
    }

    fn growth_adversary() -> TaggedAdversary {
        let hi =
            ComplexVector::new(vec![Complex64::new(0.0, 2.0), Complex64::new(0.0, -1.0)]).unwrap();
        TaggedAdversary::new(
            hi,
            ComplexVector::zeros(2),
            Interval::new(3f64.sqrt(), 2.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn adversary_sum_grows_linearly() {
        let adv = growth_adversary();
        let p = make_euclidean_modulus();
        let k = ComplexVector::scalar(Complex64::new(0.0, -0.5));
        let s4 = adversary_partition_sum(&adv, &*p, &k, 4).unwrap();
        assert!((s4 - 2.0 * 5f64.sqrt()).abs() < 1e-12);
        assert!((s4 - 4.472135955).abs() < 1e-9);
        let s1 = adversary_partition_sum(&adv, &*p, &k, 1).unwrap();
        assert_eq!(
            s1,
            p.evaluate(&(&adv.hi_value - &adv.lo_value), &k).unwrap()
        );
        for n in [2usize, 3, 10, 999, 1000, 12345] {
            assert_eq!(
                adversary_partition_sum(&adv, &*p, &k, n).unwrap(),
                n as f64 * s1,
                "n = {n}"
            );
        }
        assert!(adversary_partition_sum(&adv, &*p, &k, 0).is_err());
        assert_eq!(adv.sup_norm(&*p, &k).unwrap(), s1);

        // Against k = -i every term doubles.
        let minus_i = ComplexVector::scalar(Complex64::new(0.0, -1.0));
        let s = adversary_partition_sum(&adv, &*p, &minus_i, 4).unwrap();
        assert!((s - 4.0 * 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn adversary_tags_alternate() {
        let adv = growth_adversary();
        let pts = adv.alternating_partition(3);
        assert_eq!(pts.len(), 4);
        assert_eq!(
            pts.iter().map(|p| p.1).collect::<Vec<_>>(),
            vec![Tag::Lo, Tag::Hi, Tag::Lo, Tag::Hi]
        );
        assert_eq!(pts[0].0, 3f64.sqrt());
        assert_eq!(pts[3].0, 2.0);

        let same = TaggedAdversary::new(
            ComplexVector::real(&[1.0, 1.0]),
            ComplexVector::real(&[1.0, 1.0]),
            adv.domain,
        )
        .unwrap();
        let k = ComplexVector::real(&[1.0]);
        for n in [1, 5, 100] {
            assert_eq!(
                adversary_partition_sum(&same, &*make_euclidean_modulus(), &k, n).unwrap(),
                0.0
            );
        }
    }
}
