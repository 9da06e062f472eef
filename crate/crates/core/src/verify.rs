//! Exhaustive identity sweeps over basis elements in a lattice box.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{
    basis_bracket, basis_keys, bracket, embed_g, embed_key, ext_constant, ext_central, height,
    virasoro_cubic, virasoro_embed, AlgebraKind, BasisKey, GradedElement,
};
use crate::error::Result;
use crate::lattice::{box_points, LatticeVector, QuantumTorus};
use crate::scalar::{Formal, GammaScalar, Scalar};

type Terms = Vec<(BasisKey, GammaScalar)>;

/// Outcome of a sweep: how many cases ran and the first few failures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub checked: usize,
    pub violations: Vec<String>,
    pub violation_count: usize,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }

    pub(crate) fn from_violations(checked: usize, mut violations: Vec<String>) -> Self {
        violations.sort();
        let violation_count = violations.len();
        violations.truncate(MAX_WITNESSES);
        SweepReport {
            checked,
            violations,
            violation_count,
        }
    }

    pub fn merge(mut self, other: SweepReport) -> SweepReport {
        self.checked += other.checked;
        self.violation_count += other.violation_count;
        self.violations.extend(other.violations);
        self.violations.sort();
        self.violations.truncate(MAX_WITNESSES);
        self
    }
}

const MAX_WITNESSES: usize = 16;

/// Runs `f` on a rayon pool of `threads` workers, or inline when `threads <= 1`.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    if threads <= 1 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

fn accumulate(acc: &mut BTreeMap<BasisKey, GammaScalar>, key: &BasisKey, c: GammaScalar) {
    match acc.get_mut(key) {
        Some(v) => *v = v.plus(&c),
        None => {
            acc.insert(key.clone(), c);
        }
    }
}

/// Basis brackets [u, v] with u of degree ≤ 2·radius and v of degree ≤ radius.
struct BracketTable {
    map: HashMap<(BasisKey, BasisKey), Terms>,
}

impl BracketTable {
    fn build(torus: &QuantumTorus, kind: AlgebraKind, radius: i64, parallel: bool) -> Result<Self> {
        let outer = basis_keys(torus, kind, 2 * radius)?;
        let inner = basis_keys(torus, kind, radius)?;
        let row = |u: &BasisKey| -> Result<Vec<((BasisKey, BasisKey), Terms)>> {
            inner
                .iter()
                .map(|v| Ok(((u.clone(), v.clone()), basis_bracket(&Formal, torus, kind, u, v)?)))
                .collect()
        };
        let rows: Vec<_> = if parallel {
            outer.par_iter().map(row).collect::<Result<_>>()?
        } else {
            outer.iter().map(row).collect::<Result<_>>()?
        };
        Ok(BracketTable {
            map: rows.into_iter().flatten().collect(),
        })
    }

    fn get(&self, u: &BasisKey, v: &BasisKey) -> &Terms {
        &self.map[&(u.clone(), v.clone())]
    }

    /// [[x, y], z]
    fn nested(&self, x: &BasisKey, y: &BasisKey, z: &BasisKey, acc: &mut BTreeMap<BasisKey, GammaScalar>) {
        for (w, c) in self.get(x, y) {
            for (k, d) in self.get(w, z) {
                accumulate(acc, k, c.times(d));
            }
        }
    }
}

/// Jacobi identity on all basis triples of `kind` in `[-radius, radius]^d`.
///
/// Antisymmetry is checked on all ordered pairs; given that, the Jacobi
/// expression is alternating, so distinct triples x < y < z suffice.
pub fn verify_jacobi(torus: &QuantumTorus, kind: AlgebraKind, radius: i64, parallel: bool) -> Result<SweepReport> {
    let table = BracketTable::build(torus, kind, radius, parallel)?;
    let keys = basis_keys(torus, kind, radius)?;
    let n = keys.len();

    let mut anti = Vec::new();
    for (i, x) in keys.iter().enumerate() {
        for y in &keys[i..] {
            let mut acc = BTreeMap::new();
            for (k, c) in table.get(x, y).iter().chain(table.get(y, x)) {
                accumulate(&mut acc, k, c.clone());
            }
            if acc.values().any(|c| !c.is_zero()) {
                anti.push(format!("antisymmetry fails for [{x}, {y}]"));
            }
        }
    }
    let anti = SweepReport::from_violations(n * (n + 1) / 2, anti);

    let row = |i: usize| -> Vec<String> {
        let x = &keys[i];
        let mut bad = Vec::new();
        for j in i + 1..n {
            let y = &keys[j];
            for z in &keys[j + 1..] {
                let mut acc = BTreeMap::new();
                table.nested(x, y, z, &mut acc);
                table.nested(y, z, x, &mut acc);
                table.nested(z, x, y, &mut acc);
                if acc.values().any(|c| !c.is_zero()) {
                    bad.push(format!("Jacobi fails for ({x}, {y}, {z})"));
                }
            }
        }
        bad
    };
    let bad: Vec<String> = if parallel {
        (0..n).into_par_iter().flat_map_iter(row).collect()
    } else {
        (0..n).flat_map(row).collect()
    };
    let triples = if n >= 3 { n * (n - 1) * (n - 2) / 6 } else { 0 };
    Ok(anti.merge(SweepReport::from_violations(triples, bad)))
}

/// embed_g preserves brackets on all basis pairs, and distinct basis
/// elements have disjoint, nonempty image supports.
pub fn verify_embedding(torus: &QuantumTorus, radius: i64, parallel: bool) -> Result<SweepReport> {
    let pts = box_points(torus.d(), radius);
    let check = |m: &LatticeVector| -> Result<Vec<String>> {
        let x = GradedElement::l(torus, m.coords())?;
        let ex = embed_g(torus, &x)?;
        let mut bad = Vec::new();
        for n in &pts {
            let y = GradedElement::l(torus, n.coords())?;
            let lhs = embed_g(torus, &bracket(torus, &x, &y)?)?;
            let rhs = bracket(torus, &ex, &embed_g(torus, &y)?)?;
            if lhs != rhs {
                bad.push(format!("embedding fails on (L{m}, L{n})"));
            }
        }
        Ok(bad)
    };
    let bad: Vec<Vec<String>> = if parallel {
        pts.par_iter().map(check).collect::<Result<_>>()?
    } else {
        pts.iter().map(check).collect::<Result<_>>()?
    };
    let mut bad: Vec<String> = bad.into_iter().flatten().collect();

    let mut seen: BTreeMap<BasisKey, LatticeVector> = BTreeMap::new();
    for m in &pts {
        let image = embed_key(torus, m);
        if image.is_empty() {
            bad.push(format!("L{m} embeds to zero"));
        }
        for (k, _) in image {
            if let Some(prev) = seen.insert(k.clone(), m.clone()) {
                bad.push(format!("L{prev} and L{m} share image key {k}"));
            }
        }
    }
    Ok(SweepReport::from_violations(pts.len() * pts.len() + pts.len(), bad))
}

/// virasoro_embed is a homomorphism onto the centerless part on
/// R-supported basis pairs in the box.
pub fn verify_virasoro(torus: &QuantumTorus, radius: i64) -> Result<SweepReport> {
    let nf = torus.require_normal_form()?;
    let pts: Vec<_> = box_points(torus.d(), radius)
        .into_iter()
        .filter(|p| nf.contains(p))
        .collect();
    let mut bad = Vec::new();
    for m in &pts {
        let x = GradedElement::l(torus, m.coords())?;
        let vx = virasoro_embed(torus, &x)?;
        for n in &pts {
            let y = GradedElement::l(torus, n.coords())?;
            let lhs = virasoro_embed(torus, &bracket(torus, &x, &y)?)?;
            let rhs = bracket(torus, &vx, &virasoro_embed(torus, &y)?)?.non_central();
            if lhs != rhs {
                bad.push(format!("Virasoro embedding fails on (L{m}, L{n})"));
            }
        }
    }
    Ok(SweepReport::from_violations(pts.len() * pts.len(), bad))
}

/// Restriction of g̃ to span{L_m (m ∈ R), c_1}: with E_a = L_m/(γ|k_1e_1),
/// a = m_γ and c = c_1/(γ|k_1e_1)², the bracket must read
/// (b − a)E_{a+b} + δ_{a+b,0}(a³ − a)/12 c.
pub fn verify_extension_virasoro_shape(torus: &QuantumTorus, radius: i64) -> Result<SweepReport> {
    let nf = torus.require_normal_form()?;
    let pts: Vec<_> = box_points(torus.d(), radius)
        .into_iter()
        .filter(|p| nf.contains(p))
        .collect();
    virasoro_shape_on(torus, &pts)
}

/// The same check on the points l k_1 e_1 with |l| ≤ `max_height`.
pub fn verify_extension_virasoro_line(torus: &QuantumTorus, max_height: i64) -> Result<SweepReport> {
    let nf = torus.require_normal_form()?;
    let ke = LatticeVector::unit(nf.d, 0).scale(nf.k(0));
    let pts: Vec<_> = (-max_height..=max_height).map(|l| ke.scale(l)).collect();
    virasoro_shape_on(torus, &pts)
}

fn virasoro_shape_on(torus: &QuantumTorus, pts: &[LatticeVector]) -> Result<SweepReport> {
    let nf = torus.require_normal_form()?;
    let base = GammaScalar::inner(&LatticeVector::unit(nf.d, 0).scale(nf.k(0)));
    let mut bad = Vec::new();
    for m in pts {
        let a = height(&Formal, nf, m)?;
        for n in pts {
            let b = height(&Formal, nf, n)?;
            // [E_a, E_b] = (ext/(γ|k_1e_1)) E_{a+b} + central·c
            let e_coef = ext_constant(&Formal, torus, m, n).try_div(&base)?;
            let c_coef = ext_central(&Formal, torus, m, n)?
                .map(|(_, c)| c)
                .unwrap_or_default();
            let want_c = if (m + n).is_zero() {
                virasoro_cubic(&a)?
            } else {
                GammaScalar::zero()
            };
            if e_coef != b.minus(&a) || c_coef != want_c {
                bad.push(format!("Virasoro shape fails on (L{m}, L{n})"));
            }
        }
    }
    Ok(SweepReport::from_violations(pts.len() * pts.len(), bad))
}
