use std::fmt;
use std::ops::{Add, Index, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite-dimensional complex vector.
///
/// Serialized as a list of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(components: Vec<Complex64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Dimension {
                expected: 1,
                got: 0,
            });
        }
        Ok(Self(components))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Self(vec![Complex64::new(0.0, 0.0); dim])
    }

    /// Real-valued vector.
    pub fn real(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "dimension must be positive");
        Self(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn scalar(z: Complex64) -> Self {
        Self(vec![z])
    }

    /// The `i`-th standard basis vector of dimension `dim`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[Complex64] {
        &self.0
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        Self(self.0.iter().map(|z| alpha * z).collect())
    }

    /// Zero-pads to `dim` components.
    pub fn pad_to(&self, dim: usize) -> Result<Self> {
        if dim < self.dim() {
            return Err(Error::Dimension {
                expected: dim,
                got: self.dim(),
            });
        }
        let mut out = self.0.clone();
        out.resize(dim, Complex64::new(0.0, 0.0));
        Ok(Self(out))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    /// Largest component modulus; zero for the zero vector.
    pub fn max_modulus(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

// The operator forms panic on mismatched dimensions; use the checked forms
// when the operands come from user input.
impl Add for &ComplexVector {
    type Output = ComplexVector;

    fn add(self, rhs: Self) -> ComplexVector {
        self.checked_add(rhs)
            .expect("dimension mismatch in vector addition")
    }
}

impl Sub for &ComplexVector {
    type Output = ComplexVector;

    fn sub(self, rhs: Self) -> ComplexVector {
        self.checked_sub(rhs)
            .expect("dimension mismatch in vector subtraction")
    }
}

impl Neg for &ComplexVector {
    type Output = ComplexVector;

    fn neg(self) -> ComplexVector {
        ComplexVector(self.0.iter().map(|z| -z).collect())
    }
}

impl From<Complex64> for ComplexVector {
    fn from(z: Complex64) -> Self {
        Self::scalar(z)
    }
}

impl TryFrom<Vec<[f64; 2]>> for ComplexVector {
    type Error = Error;

    fn try_from(pairs: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }
}

impl From<ComplexVector> for Vec<[f64; 2]> {
    fn from(v: ComplexVector) -> Self {
        v.0.into_iter().map(|z| [z.re, z.im]).collect()
    }
}

impl fmt::Display for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, z) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}{:+}i", z.re, z.im)?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_preserves_dimension() {
        let a =
            ComplexVector::new(vec![Complex64::new(1.0, 2.0), Complex64::new(0.0, -1.0)]).unwrap();
        let b = ComplexVector::real(&[3.0, 4.0]);
        let s = &a + &b;
        assert_eq!(s.dim(), 2);
        assert_eq!(s[0], Complex64::new(4.0, 2.0));
        assert_eq!((&s - &b), a);
        assert_eq!(
            a.scale(Complex64::new(0.0, 1.0))[0],
            Complex64::new(-2.0, 1.0)
        );
    }

    #[test]
    fn mismatched_dimensions_are_errors() {
        let a = ComplexVector::real(&[1.0]);
        let b = ComplexVector::real(&[1.0, 2.0]);
        assert_eq!(
            a.checked_add(&b),
            Err(Error::Dimension {
                expected: 1,
                got: 2
            })
        );
        assert!(ComplexVector::new(vec![]).is_err());
    }

    #[test]
    fn serde_pairs() {
        let v =
            ComplexVector::new(vec![Complex64::new(0.0, 2.0), Complex64::new(0.0, -1.0)]).unwrap();
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, "[[0.0,2.0],[0.0,-1.0]]");
        let back: ComplexVector = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
        assert!(serde_json::from_str::<ComplexVector>("[]").is_err());
    }
}
