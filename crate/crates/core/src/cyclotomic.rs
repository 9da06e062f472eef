//! Exact arithmetic in cyclotomic fields Q(ζ_n).
//!
//! An element is stored as its canonical representative modulo the n-th
//! cyclotomic polynomial Φ_n: a rational coefficient vector of length below
//! φ(n). Rational elements are always stored with order 1, so equal
//! rationals compare structurally; mixed orders are lifted to the lcm.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::rc::Rc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::RootOfUnity;

type Poly = Vec<BigRational>;

thread_local! {
    static PHI_CACHE: RefCell<HashMap<u32, Rc<Vec<BigInt>>>> = RefCell::new(HashMap::new());
}

/// Coefficients of Φ_n, constant term first.
pub fn cyclotomic_polynomial(n: u32) -> Rc<Vec<BigInt>> {
    assert!(n >= 1);
    if let Some(p) = PHI_CACHE.with(|c| c.borrow().get(&n).cloned()) {
        return p;
    }
    // x^n - 1 divided by Φ_d for every proper divisor d
    let mut num: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        let phi_d = cyclotomic_polynomial(d);
        num = int_exact_div_monic(&num, &phi_d);
    }
    let p = Rc::new(num);
    PHI_CACHE.with(|c| c.borrow_mut().insert(n, p.clone()));
    p
}

fn int_exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = rem.len() - 1 - dd;
    let mut quot = vec![BigInt::zero(); qd + 1];
    for k in (0..=qd).rev() {
        let c = rem[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[k + j] -= &c * dj;
        }
        quot[k] = c;
    }
    debug_assert!(rem.iter().all(|x| x.is_zero()), "inexact cyclotomic division");
    quot
}

/// Euler's totient via the degree of Φ_n.
pub fn totient(n: u32) -> usize {
    cyclotomic_polynomial(n).len() - 1
}

fn trim(p: &mut Poly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn reduce_mod_phi(mut p: Poly, n: u32) -> Poly {
    let phi = cyclotomic_polynomial(n);
    let deg = phi.len() - 1;
    trim(&mut p);
    while p.len() > deg {
        let top = p.len() - 1;
        let c = p[top].clone();
        let shift = top - deg;
        for (j, pj) in phi.iter().enumerate() {
            if !pj.is_zero() {
                p[shift + j] -= &c * BigRational::from_integer(pj.clone());
            }
        }
        trim(&mut p);
    }
    p
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &Poly, b: &Poly) -> Poly {
    let mut out = a.clone();
    if out.len() < b.len() {
        out.resize(b.len(), BigRational::zero());
    }
    for (o, y) in out.iter_mut().zip(b) {
        *o -= y;
    }
    trim(&mut out);
    out
}

fn poly_divrem(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let mut rem = a.clone();
    trim(&mut rem);
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let lead_inv = b.last().unwrap().recip();
    let mut quot = vec![BigRational::zero(); rem.len() - b.len() + 1];
    while rem.len() >= b.len() && !rem.is_empty() {
        let shift = rem.len() - b.len();
        let c = rem.last().unwrap() * &lead_inv;
        for (j, bj) in b.iter().enumerate() {
            rem[shift + j] -= &c * bj;
        }
        quot[shift] = c;
        trim(&mut rem);
    }
    trim(&mut quot);
    (quot, rem)
}

/// An element of Q(ζ_order).
#[derive(Clone)]
pub struct Cyclotomic {
    order: u32,
    coeffs: Poly,
}

impl Cyclotomic {
    fn from_poly(order: u32, poly: Poly) -> Self {
        let mut coeffs = reduce_mod_phi(poly, order);
        trim(&mut coeffs);
        let order = if coeffs.len() <= 1 { 1 } else { order };
        Cyclotomic { order, coeffs }
    }

    /// Builds Σ c_j ζ_order^j from (c_j, j) pairs.
    pub fn from_terms(order: u32, terms: impl IntoIterator<Item = (BigRational, u32)>) -> Self {
        let mut poly: Poly = Vec::new();
        for (c, j) in terms {
            let j = (j % order) as usize;
            if poly.len() <= j {
                poly.resize(j + 1, BigRational::zero());
            }
            poly[j] += c;
        }
        Self::from_poly(order, poly)
    }

    pub fn rational(q: BigRational) -> Self {
        Self::from_poly(1, vec![q])
    }

    pub fn integer(k: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(k)))
    }

    pub fn root(r: RootOfUnity) -> Self {
        let r = r.reduced();
        let mut poly = vec![BigRational::zero(); r.exp as usize + 1];
        poly[r.exp as usize] = BigRational::one();
        Self::from_poly(r.order, poly)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Canonical coefficients with respect to 1, ζ, ζ², … for `order()`.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        match self.coeffs.len() {
            0 => Some(BigRational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    /// Re-expresses the element in Q(ζ_target), `order() | target`.
    pub fn lift(&self, target: u32) -> Cyclotomic {
        assert!(target.is_multiple_of(self.order), "cannot lift order {} into {}", self.order, target);
        if self.order == target || self.is_rational() {
            return self.clone();
        }
        let step = (target / self.order) as usize;
        let mut poly = vec![BigRational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (j, c) in self.coeffs.iter().enumerate() {
            poly[j * step] = c.clone();
        }
        Self::from_poly(target, poly)
    }

    /// Coefficients in Q(ζ_target) without collapsing rationals to order 1.
    pub fn coeffs_in(&self, target: u32) -> Poly {
        if self.is_rational() {
            return self.coeffs.clone();
        }
        self.lift(target).coeffs
    }

    fn common(a: &Cyclotomic, b: &Cyclotomic) -> (u32, Poly, Poly) {
        let l = a.order.lcm(&b.order);
        (l, a.coeffs_in(l), b.coeffs_in(l))
    }

    pub fn inv(&self) -> Result<Cyclotomic> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(q) = self.to_rational() {
            return Ok(Self::rational(q.recip()));
        }
        // extended Euclid: s*a + t*Φ = g, g a nonzero constant
        let phi: Poly = cyclotomic_polynomial(self.order)
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let (mut r0, mut r1) = (phi, self.coeffs.clone());
        let (mut s0, mut s1): (Poly, Poly) = (Vec::new(), vec![BigRational::one()]);
        while r1.len() > 1 {
            let (q, r) = poly_divrem(&r0, &r1);
            let s = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        let g = r1[0].clone();
        let s: Poly = s1.into_iter().map(|c| c / &g).collect();
        Ok(Self::from_poly(self.order, s))
    }

    pub fn try_div(&self, other: &Cyclotomic) -> Result<Cyclotomic> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, k: i64) -> Result<Cyclotomic> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Cyclotomic::one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        Ok(acc)
    }
}

impl Zero for Cyclotomic {
    fn zero() -> Self {
        Cyclotomic {
            order: 1,
            coeffs: Vec::new(),
        }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for Cyclotomic {
    fn one() -> Self {
        Self::integer(1)
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        if self.is_rational() || other.is_rational() {
            // rationals are stored with order 1, so a mismatch means inequality
            return false;
        }
        let (_, a, b) = Self::common(self, other);
        a == b
    }
}

impl Eq for Cyclotomic {}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (neg, mag) = (c.is_negative(), c.abs());
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match j {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    write!(f, "z{}", self.order)?;
                    if j > 1 {
                        write!(f, "^{j}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl Add for &Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        let (l, mut a, b) = Cyclotomic::common(self, rhs);
        if a.len() < b.len() {
            a.resize(b.len(), BigRational::zero());
        }
        for (x, y) in a.iter_mut().zip(b) {
            *x += y;
        }
        Cyclotomic::from_poly(l, a)
    }
}

impl Sub for &Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        self + &(-rhs)
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        if self.is_zero() || rhs.is_zero() {
            return Cyclotomic::zero();
        }
        if let Some(q) = self.to_rational() {
            return Cyclotomic {
                order: rhs.order,
                coeffs: rhs.coeffs.iter().map(|c| c * &q).collect(),
            };
        }
        if let Some(q) = rhs.to_rational() {
            return Cyclotomic {
                order: self.order,
                coeffs: self.coeffs.iter().map(|c| c * &q).collect(),
            };
        }
        let (l, a, b) = Cyclotomic::common(self, rhs);
        Cyclotomic::from_poly(l, poly_mul(&a, &b))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Cyclotomic {
            type Output = Cyclotomic;
            fn $m(self, rhs: Cyclotomic) -> Cyclotomic {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn cyclotomic_polynomials() {
        let as_i64 = |n| {
            cyclotomic_polynomial(n)
                .iter()
                .map(|c| i64::try_from(c).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(as_i64(1), vec![-1, 1]);
        assert_eq!(as_i64(2), vec![1, 1]);
        assert_eq!(as_i64(3), vec![1, 1, 1]);
        assert_eq!(as_i64(4), vec![1, 0, 1]);
        assert_eq!(as_i64(6), vec![1, -1, 1]);
        assert_eq!(as_i64(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(totient(15), 8);
    }

    #[test]
    fn order_two_root_squares_to_one() {
        let z = Cyclotomic::root(RootOfUnity::new(2, 1));
        assert_eq!(z, Cyclotomic::integer(-1));
        assert_eq!(&z * &z, Cyclotomic::one());
    }

    #[test]
    fn roots_reduce() {
        for n in [3u32, 4, 5, 6, 12] {
            let z = Cyclotomic::root(RootOfUnity::new(n, 1));
            assert_eq!(z.pow(n as i64).unwrap(), Cyclotomic::one());
            // Φ_n(ζ) = 0
            let phi = cyclotomic_polynomial(n);
            let mut acc = Cyclotomic::zero();
            for (j, c) in phi.iter().enumerate() {
                let term = Cyclotomic::rational(BigRational::from_integer(c.clone()));
                acc = &acc + &(&term * &z.pow(j as i64).unwrap());
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn mixed_orders_lift() {
        let z3 = Cyclotomic::root(RootOfUnity::new(3, 1));
        let z6sq = Cyclotomic::root(RootOfUnity::new(6, 2));
        assert_eq!(z3, z6sq);
        let z2 = Cyclotomic::root(RootOfUnity::new(6, 3));
        assert_eq!(z2, Cyclotomic::integer(-1));
        // 1 + ζ_3 + ζ_3² = 0
        let s = &(&Cyclotomic::one() + &z3) + &(&z3 * &z3);
        assert!(s.is_zero());
    }

    #[test]
    fn inverse() {
        let z = Cyclotomic::root(RootOfUnity::new(5, 2));
        let a = &Cyclotomic::rational(q(3, 2)) + &z;
        let ai = a.inv().unwrap();
        assert_eq!(&a * &ai, Cyclotomic::one());
        assert!(Cyclotomic::zero().inv().is_err());
        let zi = z.inv().unwrap();
        assert_eq!(zi, Cyclotomic::root(RootOfUnity::new(5, 3)));
    }

    #[test]
    fn display() {
        let z = Cyclotomic::root(RootOfUnity::new(3, 1));
        assert_eq!(format!("{}", &Cyclotomic::rational(q(1, 2)) - &z), "1/2 - z3");
        assert_eq!(format!("{}", Cyclotomic::zero()), "0");
    }
}
