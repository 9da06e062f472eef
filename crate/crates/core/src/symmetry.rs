//! Automorphisms θ_{λ,χ}, graded derivations, and truncated solves for the
//! graded derivation spaces of g.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::algebra::{bracket, g_constant, AlgebraKind, BasisKey, GradedElement};
use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::lattice::{box_index, box_points, LatticeVector, QuantumTorus, RootOfUnity};
use crate::linalg::{dot, project, rank, Echelon, SparseVec};
use crate::scalar::{Formal, GammaScalar, Scalar, Specialization};
use crate::verify::SweepReport;

/// A character χ of Z^d, fixed by its values on e_1..e_d.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Character {
    values: Vec<Cyclotomic>,
}

impl Character {
    pub fn new(values: Vec<Cyclotomic>) -> Result<Self> {
        if values.iter().any(Scalar::is_zero) {
            return Err(Error::Domain("character values must be nonzero".into()));
        }
        Ok(Character { values })
    }

    pub fn trivial(d: usize) -> Self {
        Character {
            values: vec![Scalar::one(); d],
        }
    }

    pub fn from_roots(roots: &[RootOfUnity]) -> Self {
        Character {
            values: roots.iter().map(|r| Cyclotomic::root(*r)).collect(),
        }
    }

    pub fn values(&self) -> &[Cyclotomic] {
        &self.values
    }

    /// χ(n) = ∏ χ(e_i)^{n_i}.
    pub fn eval(&self, n: &LatticeVector) -> Result<Cyclotomic> {
        n.check_dim(self.values.len())?;
        let mut out: Cyclotomic = Scalar::one();
        for (v, &k) in self.values.iter().zip(n.coords()) {
            out = out.times(&v.pow(k)?);
        }
        Ok(out)
    }
}

/// θ: L_n ↦ λ^{δ(n,R)} χ(n) L_{λn}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalAutomorphism {
    lambda: i64,
    chi: Character,
}

impl CanonicalAutomorphism {
    pub fn new(lambda: i64, chi: Character) -> Result<Self> {
        if lambda != 1 && lambda != -1 {
            return Err(Error::Domain(format!("lambda must be ±1, got {lambda}")));
        }
        Ok(CanonicalAutomorphism { lambda, chi })
    }

    pub fn identity(d: usize) -> Self {
        CanonicalAutomorphism {
            lambda: 1,
            chi: Character::trivial(d),
        }
    }

    pub fn lambda(&self) -> i64 {
        self.lambda
    }

    pub fn chi(&self) -> &Character {
        &self.chi
    }

    /// a_n = λ^{δ(n,R)} χ(n).
    pub fn coefficient(&self, torus: &QuantumTorus, n: &LatticeVector) -> Result<Cyclotomic> {
        let c = self.chi.eval(n)?;
        Ok(if self.lambda == -1 && torus.radical_contains(n) {
            c.negate()
        } else {
            c
        })
    }

    pub fn apply(&self, torus: &QuantumTorus, x: &GradedElement) -> Result<GradedElement> {
        if x.kind() != AlgebraKind::G {
            return Err(Error::ContextMismatch(format!("automorphisms act on g, got {}", x.kind())));
        }
        let mut out = GradedElement::zero(AlgebraKind::G);
        for (k, c) in x.terms() {
            let BasisKey::L(n) = k else { unreachable!() };
            let a = GammaScalar::constant(self.coefficient(torus, n)?);
            out.add_term(BasisKey::L(n.scale(self.lambda)), a.times(c));
        }
        Ok(out)
    }

    /// (λ, n ↦ χ(λn)^{-1}).
    pub fn inverse(&self) -> Result<Self> {
        let d = self.chi.values.len();
        let values = (0..d)
            .map(|i| self.chi.eval(&LatticeVector::unit(d, i).scale(self.lambda))?.inv())
            .collect::<Result<_>>()?;
        Ok(CanonicalAutomorphism {
            lambda: self.lambda,
            chi: Character { values },
        })
    }

    /// `other ∘ self`: (λ_1λ_2, n ↦ χ_1(n) χ_2(λ_1 n)).
    pub fn then(&self, other: &CanonicalAutomorphism) -> Result<Self> {
        let d = self.chi.values.len();
        let values = (0..d)
            .map(|i| {
                let e = LatticeVector::unit(d, i);
                Ok(self.chi.eval(&e)?.times(&other.chi.eval(&e.scale(self.lambda))?))
            })
            .collect::<Result<_>>()?;
        Ok(CanonicalAutomorphism {
            lambda: self.lambda * other.lambda,
            chi: Character { values },
        })
    }
}

/// Checks that L_n ↦ a(n) L_{λn} preserves all brackets of basis pairs with
/// m, n, m + n in `[-radius, radius]^d`.
pub fn verify_graded_map(
    torus: &QuantumTorus,
    lambda: i64,
    a: impl Fn(&LatticeVector) -> Result<Cyclotomic>,
    radius: i64,
) -> Result<SweepReport> {
    let pts = box_points(torus.d(), radius);
    let coef: BTreeMap<&LatticeVector, GammaScalar> = pts
        .iter()
        .map(|p| Ok((p, GammaScalar::constant(a(p)?))))
        .collect::<Result<_>>()?;
    let mut checked = 0;
    let mut bad = Vec::new();
    for m in &pts {
        for n in &pts {
            let s = m + n;
            let Some(a_s) = coef.get(&s) else { continue };
            checked += 1;
            let lhs = g_constant(&Formal, torus, m, n).times(a_s);
            let rhs = coef[m]
                .times(&coef[n])
                .times(&g_constant(&Formal, torus, &m.scale(lambda), &n.scale(lambda)));
            if lhs != rhs {
                bad.push(format!("bracket not preserved on (L{m}, L{n})"));
            }
        }
    }
    Ok(sweep(checked, bad))
}

fn sweep(checked: usize, mut bad: Vec<String>) -> SweepReport {
    bad.sort();
    let count = bad.len();
    bad.truncate(16);
    SweepReport {
        checked,
        violations: bad,
        violation_count: count,
    }
}

pub fn verify_automorphism(torus: &QuantumTorus, theta: &CanonicalAutomorphism, radius: i64) -> Result<SweepReport> {
    verify_graded_map(torus, theta.lambda, |n| theta.coefficient(torus, n), radius)
}

/// Checks a_{m+n} = a_m a_n (λ = 1) or a_{m+n} = (−1)^{[ι(m,n)>0]} a_m a_n
/// (λ = −1) on all pairs inside the table.
pub fn multiplicativity_check(
    torus: &QuantumTorus,
    table: &BTreeMap<LatticeVector, GammaScalar>,
    lambda: i64,
) -> Result<SweepReport> {
    if let Some((n, _)) = table.iter().find(|(_, v)| v.is_zero()) {
        return Err(Error::Domain(format!("a{n} is zero")));
    }
    let mut checked = 0;
    let mut bad = Vec::new();
    for (m, am) in table {
        for (n, an) in table {
            let Some(amn) = table.get(&(m + n)) else { continue };
            checked += 1;
            let mut rhs = am.times(an);
            if lambda == -1 && torus.iota(m, n)? > 0 {
                rhs = rhs.negate();
            }
            if *amn != rhs {
                bad.push(format!("a{} != a{m} a{n}", m + n));
            }
        }
    }
    Ok(sweep(checked, bad))
}

/// Table-backed degree-n map D(L_m) = φ(m) L_{m+n} on a box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedDerivationCandidate {
    pub degree: LatticeVector,
    pub radius: i64,
    pub table: BTreeMap<LatticeVector, GammaScalar>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derivation {
    /// ∂_i: L_m ↦ m_i L_m.
    Partial(usize),
    /// ad L_n.
    Ad(LatticeVector),
    Table(GradedDerivationCandidate),
}

impl Derivation {
    pub fn degree(&self, d: usize) -> LatticeVector {
        match self {
            Derivation::Partial(_) => LatticeVector::zero(d),
            Derivation::Ad(n) => n.clone(),
            Derivation::Table(t) => t.degree.clone(),
        }
    }

    /// φ(m) with D(L_m) = φ(m) L_{m+deg}.
    pub fn coefficient(&self, torus: &QuantumTorus, m: &LatticeVector) -> Result<GammaScalar> {
        m.check_dim(torus.d())?;
        match self {
            Derivation::Partial(i) => Ok(GammaScalar::from_integer(m.coords()[*i])),
            Derivation::Ad(n) => Ok(g_constant(&Formal, torus, n, m)),
            Derivation::Table(t) => t.table.get(m).cloned().ok_or_else(|| Error::BoxEscape {
                point: m.clone(),
                radius: t.radius,
            }),
        }
    }
}

/// ∂_1..∂_d.
pub fn builtin_derivations(torus: &QuantumTorus) -> Vec<Derivation> {
    (0..torus.d()).map(Derivation::Partial).collect()
}

pub fn derivation_apply(torus: &QuantumTorus, der: &Derivation, x: &GradedElement) -> Result<GradedElement> {
    if x.kind() != AlgebraKind::G {
        return Err(Error::ContextMismatch(format!("derivations act on g, got {}", x.kind())));
    }
    let deg = der.degree(torus.d());
    let mut out = GradedElement::zero(AlgebraKind::G);
    for (k, c) in x.terms() {
        let BasisKey::L(m) = k else { unreachable!() };
        out.add_term(BasisKey::L(m + &deg), der.coefficient(torus, m)?.times(c));
    }
    Ok(out)
}

/// D[x, y] = [Dx, y] + [x, Dy] on basis pairs with m, n, m + n in the box.
pub fn verify_leibniz(torus: &QuantumTorus, der: &Derivation, radius: i64) -> Result<SweepReport> {
    let pts = box_points(torus.d(), radius);
    let mut checked = 0;
    let mut bad = Vec::new();
    for m in &pts {
        let x = GradedElement::l(torus, m.coords())?;
        let dx = derivation_apply(torus, der, &x)?;
        for n in &pts {
            if !(m + n).in_box(radius) {
                continue;
            }
            checked += 1;
            let y = GradedElement::l(torus, n.coords())?;
            let lhs = derivation_apply(torus, der, &bracket(torus, &x, &y)?)?;
            let rhs = bracket(torus, &dx, &y)?.add(&bracket(torus, &x, &derivation_apply(torus, der, &y)?)?)?;
            if lhs != rhs {
                bad.push(format!("Leibniz fails on (L{m}, L{n})"));
            }
        }
    }
    Ok(sweep(checked, bad))
}

/// Result of a truncated solve for the degree-n derivations of g.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivationSpace {
    pub degree: LatticeVector,
    pub radius: i64,
    /// Dimension of the solutions restricted to the inner box.
    pub dimension: usize,
    /// Dimension over the whole box.
    pub full_dimension: usize,
    /// "span{∂_i}" or "ad L_n" when the inner-box space equals that family.
    pub matched: Option<String>,
    /// The full-box solution space equals the formal family, which holds
    /// the Leibniz rule identically in γ; the answer is then independent of
    /// the specialization.
    pub certified: bool,
    /// The matched formal family on the inner box (empty when unmatched).
    pub basis: Vec<GradedDerivationCandidate>,
    /// Specialized solutions restricted to the inner box.
    pub specialized_basis: Vec<BTreeMap<LatticeVector, Cyclotomic>>,
    pub point: Vec<String>,
}

impl DerivationSpace {
    pub fn to_json(&self, torus: &QuantumTorus) -> Value {
        let basis: Vec<Value> = self
            .basis
            .iter()
            .map(|b| {
                let table: Vec<Value> = b
                    .table
                    .iter()
                    .map(|(m, c)| json!({"m": m.coords(), "coef": c.to_repr(torus.d(), torus.n())}))
                    .collect();
                json!({"degree": b.degree.coords(), "table": table})
            })
            .collect();
        json!({
            "degree": self.degree.coords(),
            "box": self.radius,
            "dimension": self.dimension,
            "full_dimension": self.full_dimension,
            "matched": self.matched,
            "certified": self.certified,
            "basis": basis,
            "specialization": self.point,
        })
    }
}

/// Solves the Leibniz system for φ on `[-radius, radius]^d` at a generic
/// rational specialization of γ and compares it with ∂_i (degree 0) or
/// ad L_n (degree n ≠ 0).
pub fn solve_derivation_space(torus: &QuantumTorus, degree: &LatticeVector, radius: i64) -> Result<DerivationSpace> {
    degree.check_dim(torus.d())?;
    if radius < 2 {
        return Err(Error::Domain("derivation solves need a box of radius at least 2".into()));
    }
    let d = torus.d();
    let spec = Specialization::generic(d, 4 * radius + 2 * degree.norm_inf());
    let pts = box_points(d, radius);
    let idx = |p: &LatticeVector| box_index(p, radius).expect("point in box");
    let c = |a: &LatticeVector, b: &LatticeVector| g_constant(&spec, torus, a, b);

    let mut ech = Echelon::<Cyclotomic>::new(pts.len());
    let mut rows = Vec::new();
    for a in &pts {
        for b in &pts {
            let s = a + b;
            if !s.in_box(radius) || a > b {
                continue;
            }
            let mut row: SparseVec<Cyclotomic> = BTreeMap::new();
            let mut add = |j: usize, v: Cyclotomic| {
                let e = row.entry(j).or_insert_with(Scalar::zero);
                *e = e.plus(&v);
            };
            add(idx(&s), c(a, b));
            add(idx(a), c(&(a + degree), b).negate());
            add(idx(b), c(a, &(b + degree)).negate());
            row.retain(|_, v| !Scalar::is_zero(v));
            if !row.is_empty() {
                rows.push(row.clone());
                ech.insert(row)?;
            }
        }
    }
    let kernel = ech.nullspace();

    let family: Vec<Derivation> = if degree.is_zero() {
        builtin_derivations(torus)
    } else {
        vec![Derivation::Ad(degree.clone())]
    };
    let family_vecs: Vec<SparseVec<Cyclotomic>> = family
        .iter()
        .map(|f| {
            pts.iter()
                .enumerate()
                .map(|(j, p)| Ok((j, spec.eval(&f.coefficient(torus, p)?)?)))
                .filter(|r| !matches!(r, Ok((_, v)) if Scalar::is_zero(v)))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let family_solves = family_vecs
        .iter()
        .all(|v| rows.iter().all(|r| Scalar::is_zero(&dot(r, v))));

    let inner = radius - 1;
    let keep: BTreeMap<usize, usize> = pts
        .iter()
        .enumerate()
        .filter(|(_, p)| p.in_box(inner))
        .enumerate()
        .map(|(k, (j, _))| (j, k))
        .collect();
    let ninner = keep.len();
    let proj_kernel: Vec<_> = kernel.iter().map(|v| project(v, &keep)).collect();
    let proj_family: Vec<_> = family_vecs.iter().map(|v| project(v, &keep)).collect();
    let dimension = rank(ninner, proj_kernel.clone())?;
    let family_rank = rank(ninner, proj_family.clone())?;
    let joint = rank(ninner, proj_kernel.iter().chain(&proj_family).cloned())?;
    let matched = family_solves && dimension == family_rank && joint == dimension;
    let full_family_rank = rank(pts.len(), family_vecs.clone())?;

    let formal_ok = family
        .iter()
        .map(|f| verify_leibniz(torus, f, radius).map(|r| r.passed()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|x| x);
    let certified = matched && formal_ok && kernel.len() == full_family_rank;

    let inner_pts: Vec<&LatticeVector> = pts.iter().filter(|p| p.in_box(inner)).collect();
    let basis = if matched {
        family
            .iter()
            .map(|f| {
                let table = inner_pts
                    .iter()
                    .map(|p| Ok(((*p).clone(), f.coefficient(torus, p)?)))
                    .collect::<Result<_>>()?;
                Ok(GradedDerivationCandidate {
                    degree: degree.clone(),
                    radius: inner,
                    table,
                })
            })
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let specialized_basis = proj_kernel
        .iter()
        .filter(|v| !v.is_empty())
        .map(|v| v.iter().map(|(&k, x)| (inner_pts[k].clone(), x.clone())).collect())
        .collect();
    let label = if degree.is_zero() { "span{d_i}" } else { "ad L_n" };
    Ok(DerivationSpace {
        degree: degree.clone(),
        radius,
        dimension,
        full_dimension: kernel.len(),
        matched: matched.then(|| label.to_string()),
        certified,
        basis,
        specialized_basis,
        point: spec.point().iter().map(|q| q.to_string()).collect(),
    })
}

/// Support sizes of (ad x)^j y for j = 0..=steps. Bounded growth is
/// consistent with x acting locally finitely; this is a probe, not a proof.
pub fn locally_finite_probe(
    torus: &QuantumTorus,
    x: &GradedElement,
    y: &GradedElement,
    steps: usize,
) -> Result<Vec<usize>> {
    let mut cur = y.clone();
    let mut out = vec![cur.terms().len()];
    for _ in 0..steps {
        cur = bracket(torus, x, &cur)?;
        out.push(cur.terms().len());
    }
    Ok(out)
}
