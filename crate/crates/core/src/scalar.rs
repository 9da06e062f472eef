//! The coefficient field Q(ζ_N)(γ_1..γ_d), with denominators restricted to
//! products of the linear forms (γ|m).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::lattice::{box_points, LatticeVector, NormalFormSpec, RootOfUnity};
use crate::poly::{GammaPolynomial, Monomial};

/// Field operations shared by the formal scalars and their specializations.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negate(&self) -> Self;
    fn try_div(&self, rhs: &Self) -> Result<Self>;
    fn from_cyclotomic(c: Cyclotomic) -> Self;

    fn from_integer(k: i64) -> Self {
        Self::from_cyclotomic(Cyclotomic::integer(k))
    }
}

impl Scalar for Cyclotomic {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negate(&self) -> Self {
        -self
    }
    fn try_div(&self, rhs: &Self) -> Result<Self> {
        Cyclotomic::try_div(self, rhs)
    }
    fn from_cyclotomic(c: Cyclotomic) -> Self {
        c
    }
}

/// `num / ∏ (γ|m)^k` in canonical form.
///
/// Denominator forms are stored primitive with positive leading coordinate
/// and `num` is coprime to each of them, so equality is structural.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct GammaScalar {
    num: GammaPolynomial,
    den: BTreeMap<LatticeVector, u32>,
}

impl GammaScalar {
    pub fn from_poly(num: GammaPolynomial) -> Self {
        GammaScalar {
            num,
            den: BTreeMap::new(),
        }
    }

    pub fn constant(c: Cyclotomic) -> Self {
        Self::from_poly(GammaPolynomial::constant(c))
    }

    pub fn rational(q: BigRational) -> Self {
        Self::constant(Cyclotomic::rational(q))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::rational(BigRational::new(n.into(), d.into()))
    }

    pub fn root(r: RootOfUnity) -> Self {
        Self::constant(Cyclotomic::root(r))
    }

    /// (γ|m) as a scalar.
    pub fn inner(m: &LatticeVector) -> Self {
        Self::from_poly(GammaPolynomial::inner_form(m))
    }

    /// Builds `num / ∏ (γ|m)^k` and canonicalizes.
    pub fn with_denominator(
        num: GammaPolynomial,
        den: impl IntoIterator<Item = (LatticeVector, u32)>,
    ) -> Result<Self> {
        let mut out = GammaScalar::from_poly(num);
        for (m, k) in den {
            if m.is_zero() {
                return Err(Error::DivisionByZero);
            }
            let (c, p) = m.primitive_part();
            let p = trim(&p);
            let scale = Cyclotomic::integer(c).pow(-(k as i64))?;
            out.num = out.num.scale(&scale);
            *out.den.entry(p).or_insert(0) += k;
        }
        out.canonicalize();
        Ok(out)
    }

    pub fn numerator(&self) -> &GammaPolynomial {
        &self.num
    }

    pub fn denominator(&self) -> &BTreeMap<LatticeVector, u32> {
        &self.den
    }

    pub fn as_constant(&self) -> Option<Cyclotomic> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else if self.num.is_zero() {
            Some(<Cyclotomic as Zero>::zero())
        } else {
            None
        }
    }

    fn den_poly(den: &BTreeMap<LatticeVector, u32>) -> GammaPolynomial {
        den.iter().fold(GammaPolynomial::one(), |acc, (m, &k)| {
            acc.mul(&GammaPolynomial::inner_form(m).pow(k))
        })
    }

    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let forms: Vec<LatticeVector> = self.den.keys().cloned().collect();
        for m in forms {
            let k = self.den.get_mut(&m).unwrap();
            while *k > 0 {
                match self.num.div_linear(&m) {
                    Some(q) => {
                        self.num = q;
                        *k -= 1;
                    }
                    None => break,
                }
            }
            if *k == 0 {
                self.den.remove(&m);
            }
        }
    }

    /// Splits a degree-one numerator as `unit * (γ|p)`, p primitive.
    fn linear_factor(num: &GammaPolynomial) -> Option<(Cyclotomic, LatticeVector)> {
        if num.degree() != Some(1) || !num.is_homogeneous() {
            return None;
        }
        let arity = num.arity();
        let mut coeffs = vec![<Cyclotomic as Zero>::zero(); arity];
        for (mono, c) in num.terms() {
            let i = mono.iter().position(|&e| e == 1)?;
            coeffs[i] = c.clone();
        }
        let unit = coeffs.iter().find(|c| !Zero::is_zero(*c))?.clone();
        let unit_inv = unit.inv().ok()?;
        let ratios: Vec<BigRational> = coeffs
            .iter()
            .map(|c| (c * &unit_inv).to_rational())
            .collect::<Option<_>>()?;
        let l = ratios
            .iter()
            .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let ints: Vec<i64> = ratios
            .iter()
            .map(|r| i64::try_from(&(r.numer() * (&l / r.denom()))).ok())
            .collect::<Option<_>>()?;
        let (content, p) = LatticeVector::new(ints).primitive_part();
        let p = trim(&p);
        // num = unit * (content / l) * (γ|p)
        let scale = &unit * &Cyclotomic::rational(BigRational::new(BigInt::from(content), l));
        Some((scale, p))
    }

    /// Pads denominator vectors to rank `d` (constants built without a rank
    /// context carry none, so this only matters for mixed-rank inputs).
    fn merge_den(a: &BTreeMap<LatticeVector, u32>, b: &BTreeMap<LatticeVector, u32>) -> BTreeMap<LatticeVector, u32> {
        let mut out = a.clone();
        for (m, &k) in b {
            let e = out.entry(m.clone()).or_insert(0);
            *e = (*e).max(k);
        }
        out
    }

    fn lift_num(&self, target: &BTreeMap<LatticeVector, u32>) -> GammaPolynomial {
        let mut extra = BTreeMap::new();
        for (m, &k) in target {
            let have = self.den.get(m).copied().unwrap_or(0);
            if k > have {
                extra.insert(m.clone(), k - have);
            }
        }
        if extra.is_empty() {
            self.num.clone()
        } else {
            self.num.mul(&Self::den_poly(&extra))
        }
    }

    /// Value at a rational specialization of γ.
    pub fn eval(&self, point: &[BigRational]) -> Result<Cyclotomic> {
        let num = self.num.eval(point);
        let den = Self::den_poly(&self.den).eval(point);
        if Zero::is_zero(&den) {
            return Err(Error::DivisionByZero);
        }
        num.try_div(&den)
    }

    /// Checks `self == other` by cross-multiplying numerators.
    pub fn cross_equal(&self, other: &GammaScalar) -> bool {
        let lhs = self.num.mul(&Self::den_poly(&other.den));
        let rhs = other.num.mul(&Self::den_poly(&self.den));
        lhs == rhs
    }

    pub fn to_repr(&self, d: usize, order: u32) -> ScalarRepr {
        let num = self
            .num
            .terms()
            .map(|(mono, c)| {
                let mut padded: Vec<u32> = mono.iter().map(|&e| e as u32).collect();
                padded.resize(d, 0);
                let coef = c
                    .coeffs_in(order)
                    .iter()
                    .enumerate()
                    .filter(|(_, q)| !q.is_zero())
                    .map(|(j, q)| (q.to_string(), j as u32))
                    .collect();
                TermRepr { mono: padded, coef }
            })
            .collect();
        let den = self
            .den
            .iter()
            .map(|(m, &k)| {
                let mut c = m.coords().to_vec();
                c.resize(d, 0);
                (c, k)
            })
            .collect();
        ScalarRepr { num, den }
    }

    pub fn from_repr(repr: &ScalarRepr, order: u32) -> Result<Self> {
        let mut terms = Vec::new();
        for t in &repr.num {
            let mut coef = Vec::new();
            for (q, j) in &t.coef {
                let q: BigRational = q
                    .parse()
                    .map_err(|_| Error::Serialization(format!("bad rational `{q}`")))?;
                coef.push((q, *j));
            }
            let mono: Monomial = t.mono.iter().map(|&e| e as u16).collect();
            terms.push((mono, Cyclotomic::from_terms(order, coef)));
        }
        let num = GammaPolynomial::from_terms(terms);
        let den: Vec<(LatticeVector, u32)> = repr
            .den
            .iter()
            .map(|(m, k)| (LatticeVector::new(m.iter().copied()), *k))
            .collect();
        Self::with_denominator(num, den)
    }
}

impl Scalar for GammaScalar {
    fn zero() -> Self {
        Self::default()
    }

    fn one() -> Self {
        Self::constant(<Cyclotomic as One>::one())
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn plus(&self, rhs: &Self) -> Self {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if self.den == rhs.den {
            let mut out = GammaScalar {
                num: self.num.add(&rhs.num),
                den: self.den.clone(),
            };
            out.canonicalize();
            return out;
        }
        let den = Self::merge_den(&self.den, &rhs.den);
        let mut out = GammaScalar {
            num: self.lift_num(&den).add(&rhs.lift_num(&den)),
            den,
        };
        out.canonicalize();
        out
    }

    fn minus(&self, rhs: &Self) -> Self {
        self.plus(&rhs.negate())
    }

    fn times(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut den = self.den.clone();
        for (m, &k) in &rhs.den {
            *den.entry(m.clone()).or_insert(0) += k;
        }
        let mut out = GammaScalar {
            num: self.num.mul(&rhs.num),
            den,
        };
        if !(self.den.is_empty() && rhs.den.is_empty()) {
            out.canonicalize();
        }
        out
    }

    fn negate(&self) -> Self {
        GammaScalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    fn try_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let rhs_den = Self::den_poly(&rhs.den);
        if let Some(c) = rhs.num.as_constant() {
            let mut out = GammaScalar {
                num: self.num.mul(&rhs_den).scale(&c.inv()?),
                den: self.den.clone(),
            };
            out.canonicalize();
            return Ok(out);
        }
        let Some((unit, form)) = Self::linear_factor(&rhs.num) else {
            return Err(Error::UnsupportedDenominator(format!(
                "divisor numerator `{}` is not a cyclotomic multiple of a linear form (γ|m)",
                rhs.num
            )));
        };
        let mut den = self.den.clone();
        *den.entry(form).or_insert(0) += 1;
        let mut out = GammaScalar {
            num: self.num.mul(&rhs_den).scale(&unit.inv()?),
            den,
        };
        out.canonicalize();
        Ok(out)
    }

    fn from_cyclotomic(c: Cyclotomic) -> Self {
        Self::constant(c)
    }
}

impl fmt::Debug for GammaScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GammaScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({})/(", self.num)?;
        for (i, (m, k)) in self.den.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "({})", GammaPolynomial::inner_form(m))?;
            if *k > 1 {
                write!(f, "^{k}")?;
            }
        }
        write!(f, ")")
    }
}

/// Denominator keys drop trailing zero coordinates so that forms built with
/// and without a rank context agree.
fn trim(m: &LatticeVector) -> LatticeVector {
    let c = m.coords();
    let len = c.iter().rposition(|&x| x != 0).map_or(0, |i| i + 1);
    LatticeVector::new(c[..len].iter().copied())
}

/// JSON shape of a scalar: monomial exponents with sparse ζ_N coefficient
/// lists, and (lattice vector, multiplicity) denominator factors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalarRepr {
    pub num: Vec<TermRepr>,
    pub den: Vec<(Vec<i64>, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRepr {
    pub mono: Vec<u32>,
    pub coef: Vec<(String, u32)>,
}

/// (γ|m)/(γ|k_1 e_1): the normalized height m_γ.
pub fn normalized_height(m: &LatticeVector, spec: &NormalFormSpec) -> Result<GammaScalar> {
    m.check_dim(spec.d)?;
    let base = LatticeVector::unit(spec.d, 0).scale(spec.k(0));
    GammaScalar::inner(m).try_div(&GammaScalar::inner(&base))
}

/// Source of γ-dependent coefficients: either formal scalars or a
/// specialization of γ to rational values.
pub trait Coefficients: Sync {
    type Scalar: Scalar;

    /// (γ|m).
    fn inner(&self, m: &LatticeVector) -> Self::Scalar;

    fn constant(&self, c: Cyclotomic) -> Self::Scalar {
        Self::Scalar::from_cyclotomic(c)
    }

    fn root(&self, r: RootOfUnity) -> Self::Scalar {
        self.constant(Cyclotomic::root(r))
    }

    fn integer(&self, k: i64) -> Self::Scalar {
        Self::Scalar::from_integer(k)
    }
}

/// Formal γ: coefficients are [`GammaScalar`]s.
#[derive(Debug, Clone, Copy, Default)]
pub struct Formal;

impl Coefficients for Formal {
    type Scalar = GammaScalar;
    fn inner(&self, m: &LatticeVector) -> GammaScalar {
        GammaScalar::inner(m)
    }
}

/// γ evaluated at a rational point; coefficients live in Q(ζ_N).
#[derive(Debug, Clone, PartialEq)]
pub struct Specialization {
    point: Vec<BigRational>,
}

/// Deterministic, irregular seeds for the specialization point.
const SEEDS: [(i64, i64); 8] = [
    (1, 1),
    (37, 11),
    (101, 13),
    (233, 17),
    (419, 19),
    (661, 23),
    (971, 29),
    (1361, 31),
];

impl Specialization {
    pub fn new(point: Vec<BigRational>) -> Self {
        Specialization { point }
    }

    /// A point with (γ|m) ≠ 0 for every nonzero m in `[-radius, radius]^d`.
    pub fn generic(d: usize, radius: i64) -> Self {
        for shift in 0i64.. {
            let point: Vec<BigRational> = (0..d)
                .map(|i| {
                    let (a, b) = SEEDS[i % SEEDS.len()];
                    BigRational::new((a + shift * (i as i64 + 1) * 7).into(), b.into())
                        + BigRational::from_integer((i / SEEDS.len()).into())
                })
                .collect();
            let spec = Specialization { point };
            if spec.avoids_zeros(radius) {
                return spec;
            }
        }
        unreachable!()
    }

    fn avoids_zeros(&self, radius: i64) -> bool {
        box_points(self.point.len(), radius)
            .iter()
            .filter(|m| !m.is_zero())
            .all(|m| !Zero::is_zero(&self.inner_value(m)))
    }

    fn inner_value(&self, m: &LatticeVector) -> BigRational {
        m.coords()
            .iter()
            .zip(&self.point)
            .map(|(&x, g)| g * BigRational::from_integer(x.into()))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn point(&self) -> &[BigRational] {
        &self.point
    }

    pub fn eval(&self, x: &GammaScalar) -> Result<Cyclotomic> {
        x.eval(&self.point)
    }
}

impl Coefficients for Specialization {
    type Scalar = Cyclotomic;
    fn inner(&self, m: &LatticeVector) -> Cyclotomic {
        Cyclotomic::rational(self.inner_value(m))
    }
}
