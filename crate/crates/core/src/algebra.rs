//! Graded elements and exact brackets for g(γ,Q), Der(C_Q), the central
//! extension g̃ and Vir[M].

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{box_points, LatticeVector, NormalFormSpec, QuantumTorus};
use crate::scalar::{Coefficients, Formal, GammaScalar, Scalar, ScalarRepr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AlgebraKind {
    /// g(γ,Q)
    G,
    /// Der(C_Q)
    DerQT,
    /// The central extension g̃ (normal form only).
    Ext,
    /// Vir[M] with M = (Bγ|Z^d).
    Vir,
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgebraKind::G => "g",
            AlgebraKind::DerQT => "Der(C_Q)",
            AlgebraKind::Ext => "g~",
            AlgebraKind::Vir => "Vir[M]",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisKey {
    /// L_m in g or g̃.
    L(LatticeVector),
    /// t^m ∂_i with m ∈ R.
    T(LatticeVector, usize),
    /// ad t^n with n ∉ R.
    Ad(LatticeVector),
    /// e_a with a = (Bγ|n), keyed by n.
    E(LatticeVector),
    C1,
    C2,
    /// The Vir[M] central element.
    C,
}

impl BasisKey {
    pub fn is_central(&self) -> bool {
        matches!(self, BasisKey::C1 | BasisKey::C2 | BasisKey::C)
    }

    /// The Z^d-degree of the key; E(n) sits in degree Bn.
    pub fn degree(&self, torus: &QuantumTorus) -> Option<LatticeVector> {
        match self {
            BasisKey::L(m) | BasisKey::T(m, _) | BasisKey::Ad(m) => Some(m.clone()),
            BasisKey::E(n) => torus.normal_form().map(|nf| scale_by_orders(n, nf)),
            _ => None,
        }
    }

    fn fits(&self, kind: AlgebraKind) -> bool {
        matches!(
            (kind, self),
            (AlgebraKind::G, BasisKey::L(_))
                | (AlgebraKind::DerQT, BasisKey::T(..) | BasisKey::Ad(_))
                | (AlgebraKind::Ext, BasisKey::L(_) | BasisKey::C1 | BasisKey::C2)
                | (AlgebraKind::Vir, BasisKey::E(_) | BasisKey::C)
        )
    }
}

impl fmt::Display for BasisKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisKey::L(m) => write!(f, "L{m}"),
            BasisKey::T(m, i) => write!(f, "t^{m}d{}", i + 1),
            BasisKey::Ad(n) => write!(f, "ad t^{n}"),
            BasisKey::E(n) => write!(f, "e{n}"),
            BasisKey::C1 => f.write_str("c1"),
            BasisKey::C2 => f.write_str("c2"),
            BasisKey::C => f.write_str("c"),
        }
    }
}

fn scale_by_orders(n: &LatticeVector, nf: &NormalFormSpec) -> LatticeVector {
    LatticeVector::new(n.coords().iter().enumerate().map(|(i, &x)| x * nf.k(i)))
}

/// Checks that `key` is a basis element of `kind` over `torus`.
pub fn check_key(torus: &QuantumTorus, kind: AlgebraKind, key: &BasisKey) -> Result<()> {
    let invalid = || Error::InvalidKey {
        key: key.to_string(),
        context: kind.to_string(),
    };
    if !key.fits(kind) {
        return Err(invalid());
    }
    if matches!(kind, AlgebraKind::Ext | AlgebraKind::Vir) {
        torus.require_normal_form()?;
    }
    match key {
        BasisKey::L(m) | BasisKey::Ad(m) | BasisKey::E(m) => m.check_dim(torus.d())?,
        BasisKey::T(m, i) => {
            m.check_dim(torus.d())?;
            if *i >= torus.d() || !torus.radical_contains(m) {
                return Err(invalid());
            }
        }
        BasisKey::C2 if torus.require_normal_form()?.z == 0 => return Err(invalid()),
        _ => {}
    }
    if let BasisKey::Ad(n) = key {
        if torus.radical_contains(n) {
            return Err(invalid());
        }
    }
    Ok(())
}

/// All basis keys of `kind` whose degree lies in `[-radius, radius]^d`,
/// followed by the central keys. Lexicographic within each family.
pub fn basis_keys(torus: &QuantumTorus, kind: AlgebraKind, radius: i64) -> Result<Vec<BasisKey>> {
    let d = torus.d();
    let pts = box_points(d, radius);
    let mut out = Vec::new();
    match kind {
        AlgebraKind::G => out.extend(pts.into_iter().map(BasisKey::L)),
        AlgebraKind::DerQT => {
            for p in pts {
                if torus.radical_contains(&p) {
                    out.extend((0..d).map(|i| BasisKey::T(p.clone(), i)));
                } else {
                    out.push(BasisKey::Ad(p));
                }
            }
        }
        AlgebraKind::Ext => {
            let nf = torus.require_normal_form()?;
            out.extend(pts.into_iter().map(BasisKey::L));
            out.push(BasisKey::C1);
            if nf.z > 0 {
                out.push(BasisKey::C2);
            }
        }
        AlgebraKind::Vir => {
            let nf = torus.require_normal_form()?;
            for p in pts {
                if nf.contains(&p) {
                    let n = p
                        .coords()
                        .iter()
                        .enumerate()
                        .map(|(i, &x)| x / nf.k(i));
                    out.push(BasisKey::E(LatticeVector::new(n)));
                }
            }
            out.push(BasisKey::C);
        }
    }
    Ok(out)
}

/// Structure constant of g: [L_m, L_n] = c(m,n) L_{m+n}.
pub fn g_constant<C: Coefficients>(
    coeffs: &C,
    torus: &QuantumTorus,
    m: &LatticeVector,
    n: &LatticeVector,
) -> C::Scalar {
    let in_m = torus.radical_contains(m);
    let in_n = torus.radical_contains(n);
    match (in_m, in_n) {
        (true, true) => coeffs
            .root(torus.sigma_unchecked(m, n))
            .times(&coeffs.inner(&(n - m))),
        (true, false) => coeffs.root(torus.sigma_unchecked(m, n)).times(&coeffs.inner(n)),
        (false, true) => coeffs
            .root(torus.sigma_unchecked(n, m))
            .times(&coeffs.inner(m))
            .negate(),
        (false, false) => {
            let a = torus.sigma_unchecked(m, n);
            let b = torus.sigma_unchecked(n, m);
            if a == b {
                C::Scalar::zero()
            } else {
                coeffs.root(a).minus(&coeffs.root(b))
            }
        }
    }
}

/// Non-central part of the g̃ bracket, written without σ factors as in the
/// normal-form bracket table.
pub fn ext_constant<C: Coefficients>(
    coeffs: &C,
    torus: &QuantumTorus,
    m: &LatticeVector,
    n: &LatticeVector,
) -> C::Scalar {
    match (torus.radical_contains(m), torus.radical_contains(n)) {
        (true, true) => coeffs.inner(&(n - m)),
        (true, false) => coeffs.inner(n),
        (false, true) => coeffs.inner(m).negate(),
        (false, false) => {
            let a = torus.sigma_unchecked(m, n);
            let b = torus.sigma_unchecked(n, m);
            if a == b {
                C::Scalar::zero()
            } else {
                coeffs.root(a).minus(&coeffs.root(b))
            }
        }
    }
}

/// m_γ = (γ|m)/(γ|k_1 e_1) in the given coefficient context.
pub fn height<C: Coefficients>(coeffs: &C, nf: &NormalFormSpec, m: &LatticeVector) -> Result<C::Scalar> {
    let base = LatticeVector::unit(nf.d, 0).scale(nf.k(0));
    coeffs.inner(m).try_div(&coeffs.inner(&base))
}

/// (h³ − h)/12.
pub(crate) fn virasoro_cubic<S: Scalar>(h: &S) -> Result<S> {
    h.times(h).times(h).minus(h).try_div(&S::from_integer(12))
}

/// Central part of [L_m, L_n]' as a (key, coefficient) pair, if any.
pub fn ext_central<C: Coefficients>(
    coeffs: &C,
    torus: &QuantumTorus,
    m: &LatticeVector,
    n: &LatticeVector,
) -> Result<Option<(BasisKey, C::Scalar)>> {
    let nf = torus.require_normal_form()?;
    if !(m + n).is_zero() || m.is_zero() {
        return Ok(None);
    }
    let h = height(coeffs, nf, m)?;
    if torus.radical_contains(m) {
        let c = virasoro_cubic(&h)?;
        Ok((!c.is_zero()).then_some((BasisKey::C1, c)))
    } else {
        let s = coeffs.root(torus.sigma_unchecked(m, n));
        Ok(Some((BasisKey::C2, s.times(&h))))
    }
}

fn push<S: Scalar>(out: &mut Vec<(BasisKey, S)>, key: BasisKey, c: S) {
    if !c.is_zero() {
        out.push((key, c));
    }
}

/// Bracket of two basis keys of `kind`, as a list of nonzero terms.
///
/// Keys are assumed valid (see [`check_key`]).
pub fn basis_bracket<C: Coefficients>(
    coeffs: &C,
    torus: &QuantumTorus,
    kind: AlgebraKind,
    a: &BasisKey,
    b: &BasisKey,
) -> Result<Vec<(BasisKey, C::Scalar)>> {
    use BasisKey::*;
    let mut out = Vec::new();
    match (kind, a, b) {
        (_, x, y) if x.is_central() || y.is_central() => {}
        (AlgebraKind::G, L(m), L(n)) => push(&mut out, L(m + n), g_constant(coeffs, torus, m, n)),
        (AlgebraKind::Ext, L(m), L(n)) => {
            push(&mut out, L(m + n), ext_constant(coeffs, torus, m, n));
            if let Some((k, c)) = ext_central(coeffs, torus, m, n)? {
                out.push((k, c));
            }
        }
        (AlgebraKind::DerQT, T(m, i), T(n, j)) => {
            let s = coeffs.root(torus.sigma_unchecked(m, n));
            let p = m + n;
            if i == j {
                let c = coeffs.integer(n.coords()[*i] - m.coords()[*i]);
                push(&mut out, T(p, *i), s.times(&c));
            } else {
                push(&mut out, T(p.clone(), *j), s.times(&coeffs.integer(n.coords()[*i])));
                push(&mut out, T(p, *i), s.times(&coeffs.integer(-m.coords()[*j])));
                out.sort_by(|x, y| x.0.cmp(&y.0));
            }
        }
        (AlgebraKind::DerQT, T(m, i), Ad(s)) => {
            let c = coeffs.root(torus.sigma_unchecked(m, s)).times(&coeffs.integer(s.coords()[*i]));
            push(&mut out, Ad(m + s), c);
        }
        (AlgebraKind::DerQT, Ad(s), T(m, i)) => {
            let c = coeffs.root(torus.sigma_unchecked(m, s)).times(&coeffs.integer(-s.coords()[*i]));
            push(&mut out, Ad(m + s), c);
        }
        (AlgebraKind::DerQT, Ad(r), Ad(s)) => {
            let x = torus.sigma_unchecked(r, s);
            let y = torus.sigma_unchecked(s, r);
            let p = r + s;
            if x != y {
                if torus.radical_contains(&p) {
                    return Err(Error::Invariant(format!(
                        "[ad t^{r}, ad t^{s}] has a nonzero coefficient in radical degree {p}"
                    )));
                }
                out.push((Ad(p), coeffs.root(x).minus(&coeffs.root(y))));
            }
        }
        (AlgebraKind::Vir, E(n), E(n2)) => {
            let nf = torus.require_normal_form()?;
            let a = coeffs.inner(&scale_by_orders(n, nf));
            let b = coeffs.inner(&scale_by_orders(n2, nf));
            let p = n + n2;
            let central = p.is_zero();
            push(&mut out, E(p), b.minus(&a));
            if central {
                push(&mut out, C, virasoro_cubic(&a)?);
            }
        }
        _ => {
            return Err(Error::InvalidKey {
                key: format!("{a}, {b}"),
                context: kind.to_string(),
            })
        }
    }
    Ok(out)
}

/// A finite linear combination of basis keys with formal coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedElement {
    kind: AlgebraKind,
    terms: BTreeMap<BasisKey, GammaScalar>,
}

impl GradedElement {
    pub fn zero(kind: AlgebraKind) -> Self {
        GradedElement {
            kind,
            terms: BTreeMap::new(),
        }
    }

    /// A single basis key, validated against `torus`.
    pub fn basis(torus: &QuantumTorus, kind: AlgebraKind, key: BasisKey) -> Result<Self> {
        check_key(torus, kind, &key)?;
        let mut x = Self::zero(kind);
        x.terms.insert(key, GammaScalar::one());
        Ok(x)
    }

    /// Shorthand for the basis element L_m of g.
    pub fn l(torus: &QuantumTorus, m: &[i64]) -> Result<Self> {
        Self::basis(torus, AlgebraKind::G, BasisKey::L(LatticeVector::new(m.iter().copied())))
    }

    pub fn from_terms(
        torus: &QuantumTorus,
        kind: AlgebraKind,
        terms: impl IntoIterator<Item = (BasisKey, GammaScalar)>,
    ) -> Result<Self> {
        let mut x = Self::zero(kind);
        for (k, c) in terms {
            check_key(torus, kind, &k)?;
            x.add_term(k, c);
        }
        Ok(x)
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn terms(&self) -> &BTreeMap<BasisKey, GammaScalar> {
        &self.terms
    }

    pub fn coefficient(&self, key: &BasisKey) -> GammaScalar {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn add_term(&mut self, key: BasisKey, c: GammaScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(v) => {
                let s = v.plus(&c);
                if s.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn add(&self, other: &GradedElement) -> Result<GradedElement> {
        same_kind(self, other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &GradedElement) -> Result<GradedElement> {
        self.add(&other.scale(&GammaScalar::from_integer(-1)))
    }

    pub fn scale(&self, c: &GammaScalar) -> GradedElement {
        let mut out = Self::zero(self.kind);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v.times(c));
        }
        out
    }

    /// Drops the central keys.
    pub fn non_central(&self) -> GradedElement {
        GradedElement {
            kind: self.kind,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| !k.is_central())
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Lattice degrees carrying a nonzero coefficient.
    pub fn support(&self, torus: &QuantumTorus) -> Vec<LatticeVector> {
        let mut s: Vec<_> = self.terms.keys().filter_map(|k| k.degree(torus)).collect();
        s.dedup();
        s
    }
}

impl fmt::Display for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})*{k}")?;
        }
        Ok(())
    }
}

fn same_kind(x: &GradedElement, y: &GradedElement) -> Result<()> {
    if x.kind != y.kind {
        return Err(Error::ContextMismatch(format!("{} vs {}", x.kind, y.kind)));
    }
    Ok(())
}

/// Bilinear extension of [`basis_bracket`] with formal coefficients.
pub fn bracket(torus: &QuantumTorus, x: &GradedElement, y: &GradedElement) -> Result<GradedElement> {
    same_kind(x, y)?;
    let mut out = GradedElement::zero(x.kind);
    for (a, ca) in &x.terms {
        for (b, cb) in &y.terms {
            let cab = ca.times(cb);
            for (k, c) in basis_bracket(&Formal, torus, x.kind, a, b)? {
                out.add_term(k, c.times(&cab));
            }
        }
    }
    Ok(out)
}

fn expect_kind(x: &GradedElement, kind: AlgebraKind) -> Result<()> {
    if x.kind != kind {
        return Err(Error::ContextMismatch(format!("expected {kind}, got {}", x.kind)));
    }
    Ok(())
}

pub fn bracket_g(torus: &QuantumTorus, x: &GradedElement, y: &GradedElement) -> Result<GradedElement> {
    expect_kind(x, AlgebraKind::G)?;
    bracket(torus, x, y)
}

pub fn bracket_derqt(torus: &QuantumTorus, x: &GradedElement, y: &GradedElement) -> Result<GradedElement> {
    expect_kind(x, AlgebraKind::DerQT)?;
    bracket(torus, x, y)
}

pub fn bracket_ext(torus: &QuantumTorus, x: &GradedElement, y: &GradedElement) -> Result<GradedElement> {
    expect_kind(x, AlgebraKind::Ext)?;
    bracket(torus, x, y)
}

pub fn bracket_vir(torus: &QuantumTorus, x: &GradedElement, y: &GradedElement) -> Result<GradedElement> {
    expect_kind(x, AlgebraKind::Vir)?;
    bracket(torus, x, y)
}

/// Image of a basis key of g in Der(C_Q).
pub fn embed_key(torus: &QuantumTorus, m: &LatticeVector) -> Vec<(BasisKey, GammaScalar)> {
    if torus.radical_contains(m) {
        (0..torus.d())
            .map(|i| {
                let gi = GammaScalar::inner(&LatticeVector::unit(torus.d(), i));
                (BasisKey::T(m.clone(), i), gi)
            })
            .collect()
    } else {
        vec![(BasisKey::Ad(m.clone()), GammaScalar::one())]
    }
}

/// L_m ↦ Σ γ_i t^m ∂_i (m ∈ R), L_n ↦ ad t^n (n ∉ R).
pub fn embed_g(torus: &QuantumTorus, x: &GradedElement) -> Result<GradedElement> {
    expect_kind(x, AlgebraKind::G)?;
    let mut out = GradedElement::zero(AlgebraKind::DerQT);
    for (k, c) in &x.terms {
        let BasisKey::L(m) = k else { unreachable!() };
        for (key, v) in embed_key(torus, m) {
            out.add_term(key, v.times(c));
        }
    }
    Ok(out)
}

/// L_{Bn} ↦ e_{(Bγ|n)}.
pub fn virasoro_embed(torus: &QuantumTorus, x: &GradedElement) -> Result<GradedElement> {
    expect_kind(x, AlgebraKind::G)?;
    let nf = torus.require_normal_form()?;
    let mut out = GradedElement::zero(AlgebraKind::Vir);
    for (k, c) in &x.terms {
        let BasisKey::L(m) = k else { unreachable!() };
        if !nf.contains(m) {
            return Err(Error::Domain(format!("L{m} is not supported on R")));
        }
        let n = m.coords().iter().enumerate().map(|(i, &v)| v / nf.k(i));
        out.add_term(BasisKey::E(LatticeVector::new(n)), c.clone());
    }
    Ok(out)
}

/// One entry of the exported structure-constant table of g.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureRecord {
    pub x: Vec<i64>,
    pub y: Vec<i64>,
    pub bracket: Vec<StructureTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureTerm {
    pub key: Vec<i64>,
    pub coef: ScalarRepr,
}

/// All brackets [L_x, L_y] of g with x, y in `[-radius, radius]^d`, ordered
/// lexicographically by (x, y).
pub fn export_structure(torus: &QuantumTorus, radius: i64) -> Vec<StructureRecord> {
    let pts = box_points(torus.d(), radius.max(0));
    let mut out = Vec::with_capacity(pts.len() * pts.len());
    for x in &pts {
        for y in &pts {
            let c = g_constant(&Formal, torus, x, y);
            let bracket = if c.is_zero() {
                Vec::new()
            } else {
                vec![StructureTerm {
                    key: (x + y).coords().to_vec(),
                    coef: c.to_repr(torus.d(), torus.n()),
                }]
            };
            out.push(StructureRecord {
                x: x.coords().to_vec(),
                y: y.coords().to_vec(),
                bracket,
            });
        }
    }
    out
}

/// Re-imports an exported table as basis brackets of g.
pub fn import_structure(
    torus: &QuantumTorus,
    records: &[StructureRecord],
) -> Result<BTreeMap<(LatticeVector, LatticeVector), GradedElement>> {
    let mut out = BTreeMap::new();
    for r in records {
        let x = LatticeVector::new(r.x.iter().copied());
        let y = LatticeVector::new(r.y.iter().copied());
        let mut terms = Vec::new();
        for t in &r.bracket {
            let coef = GammaScalar::from_repr(&t.coef, torus.n())?;
            terms.push((BasisKey::L(LatticeVector::new(t.key.iter().copied())), coef));
        }
        out.insert((x, y), GradedElement::from_terms(torus, AlgebraKind::G, terms)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::RootOfUnity;

    fn v(c: &[i64]) -> LatticeVector {
        LatticeVector::new(c.iter().copied())
    }

    fn torus22() -> QuantumTorus {
        QuantumTorus::from_normal_form(NormalFormSpec::new(2, 1, vec![2, 2]).unwrap())
    }

    fn g(i: usize) -> GammaScalar {
        GammaScalar::inner(&LatticeVector::unit(2, i))
    }

    #[test]
    fn g_bracket_examples() {
        let t = torus22();
        let x = GradedElement::l(&t, &[1, 0]).unwrap();
        let y = GradedElement::l(&t, &[0, 1]).unwrap();
        let b = bracket_g(&t, &x, &y).unwrap();
        assert_eq!(b.coefficient(&BasisKey::L(v(&[1, 1]))), GammaScalar::from_integer(2));
        assert_eq!(b.terms().len(), 1);

        let l0 = GradedElement::l(&t, &[0, 0]).unwrap();
        let b = bracket_g(&t, &l0, &x).unwrap();
        assert_eq!(b.coefficient(&BasisKey::L(v(&[1, 0]))), g(0));
        assert!(bracket_g(&t, &x, &x).unwrap().is_zero());
    }

    #[test]
    fn derqt_bracket_examples() {
        let t = torus22();
        let d1 = GradedElement::basis(&t, AlgebraKind::DerQT, BasisKey::T(v(&[0, 0]), 0)).unwrap();
        let ad = GradedElement::basis(&t, AlgebraKind::DerQT, BasisKey::Ad(v(&[1, 0]))).unwrap();
        let b = bracket_derqt(&t, &d1, &ad).unwrap();
        assert_eq!(b.coefficient(&BasisKey::Ad(v(&[1, 0]))), GammaScalar::one());
        assert!(bracket_derqt(&t, &d1, &d1).unwrap().is_zero());
        let ad2 = GradedElement::basis(&t, AlgebraKind::DerQT, BasisKey::Ad(v(&[0, 1]))).unwrap();
        let b = bracket_derqt(&t, &ad, &ad2).unwrap();
        assert_eq!(b.coefficient(&BasisKey::Ad(v(&[1, 1]))), GammaScalar::from_integer(2));
    }

    #[test]
    fn key_validation() {
        let t = torus22();
        assert!(check_key(&t, AlgebraKind::DerQT, &BasisKey::T(v(&[1, 0]), 0)).is_err());
        assert!(check_key(&t, AlgebraKind::DerQT, &BasisKey::Ad(v(&[2, 0]))).is_err());
        assert!(check_key(&t, AlgebraKind::G, &BasisKey::C1).is_err());
        assert!(check_key(&t, AlgebraKind::G, &BasisKey::L(v(&[1, 0, 0]))).is_err());
        let z0 = QuantumTorus::from_normal_form(NormalFormSpec::new(2, 0, vec![1, 1]).unwrap());
        assert!(check_key(&z0, AlgebraKind::Ext, &BasisKey::C2).is_err());
    }

    #[test]
    fn embedding_examples() {
        let t = torus22();
        let x = embed_g(&t, &GradedElement::l(&t, &[2, 0]).unwrap()).unwrap();
        assert_eq!(x.coefficient(&BasisKey::T(v(&[2, 0]), 0)), g(0));
        assert_eq!(x.coefficient(&BasisKey::T(v(&[2, 0]), 1)), g(1));
        let y = embed_g(&t, &GradedElement::l(&t, &[1, 0]).unwrap()).unwrap();
        assert_eq!(y.terms().len(), 1);
        assert_eq!(y.coefficient(&BasisKey::Ad(v(&[1, 0]))), GammaScalar::one());
        assert!(embed_g(&t, &GradedElement::zero(AlgebraKind::G)).unwrap().is_zero());
    }

    #[test]
    fn extension_examples() {
        let t = torus22();
        let l = |m: &[i64]| GradedElement::basis(&t, AlgebraKind::Ext, BasisKey::L(v(m))).unwrap();
        let b = bracket_ext(&t, &l(&[4, 0]), &l(&[-4, 0])).unwrap();
        assert_eq!(b.coefficient(&BasisKey::L(v(&[0, 0]))), g(0).times(&GammaScalar::from_integer(-8)));
        assert_eq!(b.coefficient(&BasisKey::C1), GammaScalar::ratio(1, 2));
        let b = bracket_ext(&t, &l(&[2, 0]), &l(&[-2, 0])).unwrap();
        assert!(b.coefficient(&BasisKey::C1).is_zero());
        let b = bracket_ext(&t, &l(&[1, 0]), &l(&[-1, 0])).unwrap();
        assert!(b.coefficient(&BasisKey::L(v(&[0, 0]))).is_zero());
        assert_eq!(b.coefficient(&BasisKey::C2), GammaScalar::ratio(1, 2));
        let c1 = GradedElement::basis(&t, AlgebraKind::Ext, BasisKey::C1).unwrap();
        assert!(bracket_ext(&t, &c1, &l(&[1, 0])).unwrap().is_zero());
    }

    #[test]
    fn virasoro_examples() {
        let t = torus22();
        let e = virasoro_embed(&t, &GradedElement::l(&t, &[2, 0]).unwrap()).unwrap();
        assert_eq!(e.coefficient(&BasisKey::E(v(&[1, 0]))), GammaScalar::one());
        assert!(matches!(
            virasoro_embed(&t, &GradedElement::l(&t, &[1, 0]).unwrap()),
            Err(Error::Domain(_))
        ));
        assert!(bracket_vir(&t, &e, &e).unwrap().is_zero());
        let f = virasoro_embed(&t, &GradedElement::l(&t, &[0, 2]).unwrap()).unwrap();
        let b = bracket_vir(&t, &e, &f).unwrap();
        let expect = g(1).minus(&g(0)).times(&GammaScalar::from_integer(2));
        assert_eq!(b.coefficient(&BasisKey::E(v(&[1, 1]))), expect);
    }

    #[test]
    fn context_mismatch() {
        let t = torus22();
        let x = GradedElement::l(&t, &[1, 0]).unwrap();
        let y = GradedElement::basis(&t, AlgebraKind::DerQT, BasisKey::Ad(v(&[1, 0]))).unwrap();
        assert!(matches!(bracket(&t, &x, &y), Err(Error::ContextMismatch(_))));
        assert!(matches!(bracket_derqt(&t, &x, &x), Err(Error::ContextMismatch(_))));
    }

    #[test]
    fn ext_matches_g_off_center() {
        let t = torus22();
        for m in box_points(2, 3) {
            for n in box_points(2, 3) {
                assert_eq!(g_constant(&Formal, &t, &m, &n), ext_constant(&Formal, &t, &m, &n));
            }
        }
        assert_eq!(t.sigma(&v(&[2, 0]), &v(&[1, 1])).unwrap(), RootOfUnity::one(2));
    }

    #[test]
    fn structure_round_trip() {
        let t = torus22();
        let recs = export_structure(&t, 1);
        assert_eq!(recs.len(), 81);
        let json = serde_json::to_string(&recs).unwrap();
        let back: Vec<StructureRecord> = serde_json::from_str(&json).unwrap();
        let table = import_structure(&t, &back).unwrap();
        for ((x, y), b) in table {
            let direct = bracket_g(
                &t,
                &GradedElement::l(&t, x.coords()).unwrap(),
                &GradedElement::l(&t, y.coords()).unwrap(),
            )
            .unwrap();
            assert_eq!(b, direct);
        }
        let empty = export_structure(&t, 0);
        assert_eq!(empty.len(), 1);
        assert!(empty[0].bracket.is_empty());
    }
}
