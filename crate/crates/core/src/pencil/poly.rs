//! Dense univariate polynomials over an exact field.

use std::fmt;

use crate::scalar::ExactField;

/// Coefficients in ascending degree; no trailing zeros (the zero
/// polynomial has an empty coefficient list).
#[derive(Clone, PartialEq, Eq)]
pub struct Poly<F> {
    coeffs: Vec<F>,
}

impl<F: ExactField> Poly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    /// `a + b·t`.
    pub fn linear(a: F, b: F) -> Self {
        Self::new(vec![a, b])
    }

    /// Monic `∏ (t − r)` over the given roots.
    pub fn from_roots(roots: &[F]) -> Self {
        roots.iter().fold(Self::one(), |acc, r| acc.mul(&Self::linear(-r.clone(), F::one())))
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&F> {
        self.coeffs.last()
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(l) => {
                let inv = l.inv();
                Self { coeffs: self.coeffs.iter().map(|c| c.clone() * inv.clone()).collect() }
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new(
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).cloned().unwrap_or_else(F::zero);
                    let b = o.coeffs.get(i).cloned().unwrap_or_else(F::zero);
                    a + b
                })
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::new(self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    /// Quotient and remainder. Panics on division by zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dl = d.leading().expect("polynomial division by zero").inv();
        let dd = d.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        if r.len() < d.coeffs.len() {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![F::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd].clone() * dl.clone();
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] = r[k + j].clone() - c.clone() * dc.clone();
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    pub fn divides(&self, other: &Self) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.rem(self).is_zero()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * F::from_i64(i as i64))
                .collect(),
        )
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Squarefree over the algebraic closure: `gcd(p, p′)` is constant.
    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).is_constant()
    }

    pub fn eval(&self, x: &F) -> F {
        self.coeffs.iter().rev().fold(F::zero(), |acc, c| acc * x.clone() + c.clone())
    }
}

impl<F: ExactField + fmt::Display> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let coef = if i > 0 && *c == F::one() { String::new() } else { format!("({c})") };
            parts.push(match i {
                0 => format!("({c})"),
                1 => format!("{coef}t"),
                _ => format!("{coef}t^{i}"),
            });
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl<F: ExactField + fmt::Display> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Number of polynomials with a repeated root, via `gcd(p, p′)`.
pub fn count_multiple_root_factors<F: ExactField>(polys: &[Poly<F>]) -> usize {
    polys.iter().filter(|p| !p.is_squarefree()).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{GaussianRational as Q, Scalar};

    fn p(c: &[i64]) -> Poly<Q> {
        Poly::new(c.iter().map(|&v| Q::from_i64(v)).collect())
    }

    #[test]
    fn arithmetic_and_division() {
        let a = p(&[-1, 0, 1]); // t² − 1
        let b = p(&[1, 1]); // t + 1
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, p(&[-1, 1]));
        assert!(r.is_zero());
        assert!(b.divides(&a));
        assert_eq!(a.gcd(&p(&[1, 2, 1])), b);
        assert_eq!(a.derivative(), p(&[0, 2]));
        assert_eq!(a.eval(&Q::from_i64(3)), Q::from_i64(8));
    }

    #[test]
    fn multiple_root_counts() {
        assert_eq!(count_multiple_root_factors(&[p(&[0, 0, 1])]), 1);
        assert_eq!(count_multiple_root_factors(&[p(&[-1, 0, 1])]), 0);
        let one = Q::from_i64(1);
        let two = Q::from_i64(2);
        let a = Poly::from_roots(&[one.clone(), one.clone(), two]);
        let b = Poly::from_roots(&[one]);
        assert_eq!(count_multiple_root_factors(&[a, b]), 1);
        // t² + 1 splits over ℚ(i) into distinct factors
        assert_eq!(count_multiple_root_factors(&[p(&[1, 0, 1])]), 0);
        let i = Q::i();
        let sq = Poly::from_roots(&[i.clone(), i]);
        assert_eq!(count_multiple_root_factors(&[sq]), 1);
    }
}
