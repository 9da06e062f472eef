//! Polynomials in the formal parameters γ_1..γ_d with cyclotomic coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::cyclotomic::Cyclotomic;
use crate::lattice::LatticeVector;

/// Exponent vector with trailing zeros trimmed; `[]` is the constant monomial.
/// The derived order is lexicographic with γ_1 > γ_2 > …
pub type Monomial = SmallVec<[u16; 4]>;

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0))
        .collect()
}

fn mono_var(i: usize) -> Monomial {
    let mut m = SmallVec::from_elem(0, i + 1);
    m[i] = 1;
    m
}

fn mono_degree(m: &Monomial) -> u32 {
    m.iter().map(|&e| e as u32).sum()
}

#[derive(Clone, PartialEq, Eq, Default)]
pub struct GammaPolynomial {
    terms: BTreeMap<Monomial, Cyclotomic>,
}

impl GammaPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Cyclotomic) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::new(), c);
        }
        p
    }

    pub fn one() -> Self {
        Self::constant(Cyclotomic::one())
    }

    /// γ_{i+1}.
    pub fn variable(i: usize) -> Self {
        let mut p = Self::zero();
        p.terms.insert(mono_var(i), Cyclotomic::one());
        p
    }

    /// (γ|m) = Σ m_i γ_i.
    pub fn inner_form(m: &LatticeVector) -> Self {
        let mut p = Self::zero();
        for (i, &x) in m.coords().iter().enumerate() {
            if x != 0 {
                p.terms.insert(mono_var(i), Cyclotomic::integer(x));
            }
        }
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Cyclotomic)>) -> Self {
        let mut p = Self::zero();
        for (mut m, c) in terms {
            while m.last() == Some(&0) {
                m.pop();
            }
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Cyclotomic) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Cyclotomic)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value, if the polynomial has degree ≤ 0.
    pub fn as_constant(&self) -> Option<Cyclotomic> {
        match self.terms.len() {
            0 => Some(Cyclotomic::zero()),
            1 => self.terms.get(&Monomial::new()).cloned(),
            _ => None,
        }
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(mono_degree).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(mono_degree);
        match degs.next() {
            None => true,
            Some(d0) => degs.all(|d| d == d0),
        }
    }

    /// Number of variables the representation mentions (trailing unused ones excluded).
    pub fn arity(&self) -> usize {
        self.terms.keys().map(|m| m.len()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        GammaPolynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Cyclotomic) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        GammaPolynomial {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Exact quotient by the linear form (γ|m), or `None` if it does not divide.
    ///
    /// With lex order the leading term of (γ|m) is m_i γ_i for the first
    /// nonzero coordinate i, and a single polynomial is its own Gröbner
    /// basis, so divisibility is equivalent to a zero remainder.
    pub fn div_linear(&self, m: &LatticeVector) -> Option<GammaPolynomial> {
        let lead = m.coords().iter().position(|&x| x != 0)?;
        let lead_coeff = Cyclotomic::integer(m.coords()[lead]).inv().ok()?;
        let divisor = Self::inner_form(m);
        let mut work = self.clone();
        let mut quot = Self::zero();
        while let Some((mono, c)) = work.terms.iter().next_back() {
            if mono.get(lead).copied().unwrap_or(0) == 0 {
                return None;
            }
            let mut qm = mono.clone();
            qm[lead] -= 1;
            while qm.last() == Some(&0) {
                qm.pop();
            }
            let qc = c * &lead_coeff;
            let mut step = Self::zero();
            step.terms.insert(qm.clone(), qc.clone());
            work = work.sub(&step.mul(&divisor));
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Evaluates at a rational point γ = `point`.
    pub fn eval(&self, point: &[BigRational]) -> Cyclotomic {
        let mut acc = Cyclotomic::zero();
        for (m, c) in &self.terms {
            let mut v = BigRational::one();
            for (i, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    v *= &point[i];
                }
            }
            acc = &acc + &(c * &Cyclotomic::rational(v));
        }
        acc
    }
}

impl fmt::Debug for GammaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GammaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("g{}", i + 1)
                    } else {
                        format!("g{}^{}", i + 1, e)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "({c})*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> LatticeVector {
        LatticeVector::new(c.iter().copied())
    }

    #[test]
    fn inner_form_examples() {
        let p = GammaPolynomial::inner_form(&v(&[2, -1]));
        let expect = GammaPolynomial::variable(0)
            .scale(&Cyclotomic::integer(2))
            .sub(&GammaPolynomial::variable(1));
        assert_eq!(p, expect);
        assert!(GammaPolynomial::inner_form(&v(&[0, 0])).is_zero());
        assert_eq!(GammaPolynomial::inner_form(&v(&[1, 0])), GammaPolynomial::variable(0));
    }

    #[test]
    fn linear_division() {
        let a = GammaPolynomial::inner_form(&v(&[1, 2]));
        let b = GammaPolynomial::inner_form(&v(&[0, 1]));
        let prod = a.mul(&b).mul(&a);
        assert_eq!(prod.div_linear(&v(&[1, 2])).unwrap(), a.mul(&b));
        assert_eq!(prod.div_linear(&v(&[0, 1])).unwrap(), a.mul(&a));
        assert!(prod.div_linear(&v(&[1, 1])).is_none());
        assert!(GammaPolynomial::one().div_linear(&v(&[1, 0])).is_none());
        assert!(GammaPolynomial::zero().div_linear(&v(&[1, 0])).unwrap().is_zero());
    }

    #[test]
    fn homogeneity_and_degree() {
        let a = GammaPolynomial::inner_form(&v(&[1, 2]));
        let cube = a.pow(3);
        assert_eq!(cube.degree(), Some(3));
        assert!(cube.is_homogeneous());
        assert!(!cube.sub(&a).is_homogeneous());
    }
}
