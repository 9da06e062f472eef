//! Lattice vectors, the commutation form σ and the radical subgroup R.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::intmat::{hermite_normal_form, smith_normal_form, IntMatrix};

/// A point of Z^d. Ordering is lexicographic on coordinates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(SmallVec<[i64; 4]>);

impl LatticeVector {
    pub fn new(coords: impl IntoIterator<Item = i64>) -> Self {
        LatticeVector(coords.into_iter().collect())
    }

    pub fn zero(d: usize) -> Self {
        LatticeVector(SmallVec::from_elem(0, d))
    }

    /// The standard basis vector e_{i+1} (zero-based index `i`).
    pub fn unit(d: usize, i: usize) -> Self {
        let mut v = Self::zero(d);
        v.0[i] = 1;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn scale(&self, k: i64) -> Self {
        LatticeVector(self.0.iter().map(|&x| x * k).collect())
    }

    /// Largest absolute coordinate (the box radius this point needs).
    pub fn norm_inf(&self) -> i64 {
        self.0.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    pub fn in_box(&self, radius: i64) -> bool {
        self.norm_inf() <= radius
    }

    pub fn dot(&self, other: &LatticeVector) -> i64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    /// Splits off the content: returns `(c, p)` with `self = c * p`, `p`
    /// primitive and its first nonzero coordinate positive.
    pub fn primitive_part(&self) -> (i64, LatticeVector) {
        let g = self.0.iter().fold(0i64, |g, &x| g.gcd(&x));
        if g == 0 {
            return (0, self.clone());
        }
        let lead = *self.0.iter().find(|&&x| x != 0).unwrap();
        let c = if lead < 0 { -g } else { g };
        (c, LatticeVector(self.0.iter().map(|&x| x / c).collect()))
    }

    pub(crate) fn check_dim(&self, d: usize) -> Result<()> {
        if self.dim() != d {
            return Err(Error::Dimension {
                expected: d,
                found: self.dim(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl Add for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        debug_assert_eq!(self.dim(), rhs.dim());
        LatticeVector(self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        debug_assert_eq!(self.dim(), rhs.dim());
        LatticeVector(self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector(self.0.iter().map(|a| -a).collect())
    }
}

impl Add for LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: LatticeVector) -> LatticeVector {
        &self + &rhs
    }
}

impl Sub for LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: LatticeVector) -> LatticeVector {
        &self - &rhs
    }
}

impl Neg for LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        -&self
    }
}

/// All points of `[-radius, radius]^d` in lexicographic order.
pub fn box_points(d: usize, radius: i64) -> Vec<LatticeVector> {
    if radius < 0 {
        return Vec::new();
    }
    let side = (2 * radius + 1) as usize;
    let total = side.pow(d as u32);
    (0..total)
        .map(|mut idx| {
            let mut c = SmallVec::from_elem(0, d);
            for i in (0..d).rev() {
                c[i] = (idx % side) as i64 - radius;
                idx /= side;
            }
            LatticeVector(c)
        })
        .collect()
}

/// Position of `p` in `box_points(d, radius)`, if inside.
pub fn box_index(p: &LatticeVector, radius: i64) -> Option<usize> {
    if !p.in_box(radius) {
        return None;
    }
    let side = 2 * radius + 1;
    Some(
        p.coords()
            .iter()
            .fold(0i64, |acc, &x| acc * side + (x + radius)) as usize,
    )
}

/// The value ζ_N^exp.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RootOfUnity {
    pub order: u32,
    pub exp: u32,
}

impl RootOfUnity {
    pub fn new(order: u32, exp: i64) -> Self {
        assert!(order >= 1);
        RootOfUnity {
            order,
            exp: exp.rem_euclid(order as i64) as u32,
        }
    }

    pub fn one(order: u32) -> Self {
        Self::new(order, 0)
    }

    pub fn is_one(&self) -> bool {
        self.exp == 0
    }

    pub fn mul(&self, other: &RootOfUnity) -> RootOfUnity {
        let l = self.order.lcm(&other.order);
        RootOfUnity::new(
            l,
            self.exp as i64 * (l / self.order) as i64 + other.exp as i64 * (l / other.order) as i64,
        )
    }

    pub fn inv(&self) -> RootOfUnity {
        RootOfUnity::new(self.order, -(self.exp as i64))
    }

    pub fn pow(&self, k: i64) -> RootOfUnity {
        RootOfUnity::new(self.order, (self.exp as i64) * k.rem_euclid(self.order as i64))
    }

    /// Same value, written with the smallest possible order.
    pub fn reduced(&self) -> RootOfUnity {
        let g = self.order.gcd(&self.exp);
        let g = if g == 0 { self.order } else { g };
        RootOfUnity {
            order: self.order / g,
            exp: self.exp / g,
        }
    }

    /// Multiplicative order of the value.
    pub fn value_order(&self) -> u32 {
        self.reduced().order
    }
}

impl PartialEq for RootOfUnity {
    fn eq(&self, other: &Self) -> bool {
        let a = self.reduced();
        let b = other.reduced();
        a.order == b.order && a.exp == b.exp
    }
}

impl Eq for RootOfUnity {}

/// Exponent matrix of Q: q_ij = ζ_N^{exps[i][j]}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QMatrixSpec {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: u32,
    pub exps: Vec<Vec<i64>>,
}

impl QMatrixSpec {
    /// Validates and reduces the exponents modulo N.
    pub fn new(d: usize, n: u32, exps: Vec<Vec<i64>>) -> Result<Self> {
        if d < 2 {
            return Err(Error::config("d", "rank must satisfy d > 1"));
        }
        if n < 1 {
            return Err(Error::config("N", "root-of-unity order must be at least 1"));
        }
        if exps.len() != d || exps.iter().any(|r| r.len() != d) {
            return Err(Error::config("exps", format!("expected a {d}x{d} matrix")));
        }
        let nn = n as i64;
        let exps: Vec<Vec<i64>> = exps
            .into_iter()
            .map(|r| r.into_iter().map(|a| a.rem_euclid(nn)).collect())
            .collect();
        for i in 0..d {
            if exps[i][i] != 0 {
                return Err(Error::config(
                    "exps",
                    format!("diagonal entry ({},{}) must be 0 mod N (q_ii = 1)", i + 1, i + 1),
                ));
            }
            for j in 0..d {
                if (exps[i][j] + exps[j][i]) % nn != 0 {
                    return Err(Error::config(
                        "exps",
                        format!(
                            "entries ({},{}) and ({},{}) must be opposite mod N (q_ij q_ji = 1)",
                            i + 1,
                            j + 1,
                            j + 1,
                            i + 1
                        ),
                    ));
                }
            }
        }
        Ok(QMatrixSpec { d, n, exps })
    }

    pub fn q(&self, i: usize, j: usize) -> RootOfUnity {
        RootOfUnity::new(self.n, self.exps[i][j])
    }

    /// σ(m,n) = ∏_{i<j} q_ji^{m_j n_i}.
    pub fn sigma(&self, m: &LatticeVector, n: &LatticeVector) -> Result<RootOfUnity> {
        m.check_dim(self.d)?;
        n.check_dim(self.d)?;
        Ok(RootOfUnity::new(self.n, self.sigma_exponent(m, n)))
    }

    pub(crate) fn sigma_exponent(&self, m: &LatticeVector, n: &LatticeVector) -> i64 {
        let (m, n) = (m.coords(), n.coords());
        let nn = self.n as i64;
        let mut e = 0i64;
        for i in 0..self.d {
            for j in i + 1..self.d {
                let a = self.exps[j][i];
                if a != 0 {
                    e = (e + a * ((m[j] * n[i]).rem_euclid(nn))) % nn;
                }
            }
        }
        e
    }

    /// Matrix C with σ(m,e_k)/σ(e_k,m) = ζ_N^{(C m)_k}.
    pub fn commutator_matrix(&self) -> IntMatrix {
        let d = self.d;
        let nn = self.n as i64;
        let mut c = vec![vec![0i64; d]; d];
        for k in 0..d {
            for j in 0..d {
                c[k][j] = match j.cmp(&k) {
                    std::cmp::Ordering::Greater => self.exps[j][k],
                    std::cmp::Ordering::Less => -self.exps[k][j],
                    std::cmp::Ordering::Equal => 0,
                }
                .rem_euclid(nn);
            }
        }
        c
    }
}

/// Normal-form description of a rational Q.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalFormSpec {
    pub d: usize,
    pub z: usize,
    pub orders: Vec<u32>,
}

impl NormalFormSpec {
    pub fn new(d: usize, z: usize, orders: Vec<u32>) -> Result<Self> {
        if d < 2 {
            return Err(Error::config("normal_form.d", "rank must satisfy d > 1"));
        }
        if 2 * z > d {
            return Err(Error::config("normal_form.z", "2z must not exceed d"));
        }
        if orders.len() != d {
            return Err(Error::config(
                "normal_form.orders",
                format!("expected {d} orders, got {}", orders.len()),
            ));
        }
        if orders.contains(&0) {
            return Err(Error::config("normal_form.orders", "orders must be positive"));
        }
        for j in 0..z {
            if orders[2 * j] != orders[2 * j + 1] {
                return Err(Error::config(
                    "normal_form.orders",
                    format!("k_{} must equal k_{}", 2 * j + 1, 2 * j + 2),
                ));
            }
            if orders[2 * j] < 2 {
                return Err(Error::config(
                    "normal_form.orders",
                    format!("paired order k_{} must exceed 1", 2 * j + 1),
                ));
            }
        }
        for i in 0..(2 * z).saturating_sub(1) {
            if !orders[i].is_multiple_of(orders[i + 1]) {
                return Err(Error::config(
                    "normal_form.orders",
                    format!("k_{} must divide k_{}", i + 2, i + 1),
                ));
            }
        }
        if let Some(l) = (2 * z..d).find(|&l| orders[l] != 1) {
            return Err(Error::config(
                "normal_form.orders",
                format!("k_{} must be 1 beyond the paired block", l + 1),
            ));
        }
        Ok(NormalFormSpec { d, z, orders })
    }

    /// Common root-of-unity order N (= k_1, or 1 when z = 0).
    pub fn root_order(&self) -> u32 {
        self.orders.iter().fold(1u32, |acc, &k| acc.lcm(&k))
    }

    pub fn k(&self, i: usize) -> i64 {
        self.orders[i] as i64
    }

    /// Expands to the exponent matrix with q_{2i-1,2i} = ζ_{k_{2i-1}}.
    pub fn to_qmatrix(&self) -> QMatrixSpec {
        let n = self.root_order();
        let mut exps = vec![vec![0i64; self.d]; self.d];
        for j in 0..self.z {
            let step = (n / self.orders[2 * j]) as i64;
            exps[2 * j][2 * j + 1] = step;
            exps[2 * j + 1][2 * j] = -step;
        }
        QMatrixSpec::new(self.d, n, exps).expect("normal form expands to a valid Q")
    }

    /// Recognizes an exponent matrix already in normal-form shape.
    pub fn recognize(q: &QMatrixSpec) -> Option<NormalFormSpec> {
        let d = q.d;
        let mut orders = vec![1u32; d];
        let mut z = 0;
        for i in 0..d {
            for j in i + 1..d {
                if q.exps[i][j] == 0 {
                    continue;
                }
                if i % 2 != 0 || j != i + 1 {
                    return None;
                }
                let k = q.q(i, j).value_order();
                orders[i] = k;
                orders[j] = k;
            }
        }
        while 2 * z + 1 < d && orders[2 * z] > 1 {
            z += 1;
        }
        NormalFormSpec::new(d, z, orders).ok()
    }

    pub fn contains(&self, m: &LatticeVector) -> bool {
        m.coords()
            .iter()
            .zip(&self.orders)
            .all(|(&x, &k)| x.rem_euclid(k as i64) == 0)
    }
}

/// A rational quantum torus: the matrix Q together with its radical data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantumTorus {
    q: QMatrixSpec,
    normal: Option<NormalFormSpec>,
    commutator: IntMatrix,
    radical: Vec<LatticeVector>,
}

impl QuantumTorus {
    pub fn new(q: QMatrixSpec) -> Self {
        let normal = NormalFormSpec::recognize(&q);
        Self::build(q, normal)
    }

    pub fn from_normal_form(spec: NormalFormSpec) -> Self {
        let q = spec.to_qmatrix();
        Self::build(q, Some(spec))
    }

    fn build(q: QMatrixSpec, normal: Option<NormalFormSpec>) -> Self {
        let commutator = q.commutator_matrix();
        let radical = compute_radical_basis(&q, &commutator);
        QuantumTorus {
            q,
            normal,
            commutator,
            radical,
        }
    }

    pub fn d(&self) -> usize {
        self.q.d
    }

    /// The root-of-unity order N.
    pub fn n(&self) -> u32 {
        self.q.n
    }

    pub fn qmatrix(&self) -> &QMatrixSpec {
        &self.q
    }

    pub fn normal_form(&self) -> Option<&NormalFormSpec> {
        self.normal.as_ref()
    }

    pub fn require_normal_form(&self) -> Result<&NormalFormSpec> {
        self.normal.as_ref().ok_or(Error::NormalFormRequired)
    }

    pub fn sigma(&self, m: &LatticeVector, n: &LatticeVector) -> Result<RootOfUnity> {
        self.q.sigma(m, n)
    }

    /// σ without the rank check, for hot loops over validated vectors.
    pub(crate) fn sigma_unchecked(&self, m: &LatticeVector, n: &LatticeVector) -> RootOfUnity {
        RootOfUnity::new(self.q.n, self.q.sigma_exponent(m, n))
    }

    /// HNF basis of R.
    pub fn radical_basis(&self) -> &[LatticeVector] {
        &self.radical
    }

    /// δ(m,R).
    pub fn radical_contains(&self, m: &LatticeVector) -> bool {
        let nn = self.q.n as i64;
        self.commutator
            .iter()
            .all(|row| row.iter().zip(m.coords()).map(|(a, x)| a * x).sum::<i64>().rem_euclid(nn) == 0)
    }

    /// Membership of `n` in G_r = {n | σ(r,n) = σ(n,r)}.
    pub fn commutation_subgroup_contains(
        &self,
        r: &LatticeVector,
        n: &LatticeVector,
    ) -> Result<SubgroupMembership> {
        let contains = self.sigma(r, n)? == self.sigma(n, r)?;
        Ok(SubgroupMembership {
            contains,
            whole_lattice: self.radical_contains(r),
        })
    }

    /// ι(m,n): how many of the distinct points {m, n, m+n} lie in R.
    pub fn iota(&self, m: &LatticeVector, n: &LatticeVector) -> Result<usize> {
        m.check_dim(self.d())?;
        n.check_dim(self.d())?;
        let s = m + n;
        let mut pts = vec![m.clone(), n.clone(), s];
        pts.sort();
        pts.dedup();
        Ok(pts.iter().filter(|p| self.radical_contains(p)).count())
    }
}

/// Result of a G_r membership query; `whole_lattice` flags r ∈ R, where
/// G_r is all of Z^d.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubgroupMembership {
    pub contains: bool,
    pub whole_lattice: bool,
}

/// Solves C m ≡ 0 (mod N) through the Smith form U C V = D, then reports
/// the Hermite normal form of the solution lattice.
fn compute_radical_basis(q: &QMatrixSpec, commutator: &IntMatrix) -> Vec<LatticeVector> {
    let d = q.d;
    let nn = q.n as i64;
    let smith = smith_normal_form(commutator);
    // y_i must be a multiple of N / gcd(D_ii, N)
    let scales: Vec<i64> = (0..d)
        .map(|i| {
            let di = smith.diagonal.get(i).copied().unwrap_or(0);
            nn / di.gcd(&nn)
        })
        .collect();
    let generators: IntMatrix = (0..d)
        .map(|i| (0..d).map(|r| smith.right[r][i] * scales[i]).collect())
        .collect();
    hermite_normal_form(&generators)
        .into_iter()
        .map(LatticeVector::new)
        .collect()
}

/// Γ: the non-radical points of the box ∏[0, k_i), in lexicographic order.
pub fn fundamental_domain(spec: &NormalFormSpec) -> Result<Vec<LatticeVector>> {
    if spec.z == 0 {
        return Err(Error::Domain(
            "fundamental domain is empty when z = 0 (R = Z^d)".into(),
        ));
    }
    let mut out = vec![LatticeVector(SmallVec::new())];
    for &k in &spec.orders {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..k as i64).map(move |x| {
                    let mut c = p.0.clone();
                    c.push(x);
                    LatticeVector(c)
                })
            })
            .collect();
    }
    out.retain(|p| !spec.contains(p));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> LatticeVector {
        LatticeVector::new(c.iter().copied())
    }

    fn torus22() -> QuantumTorus {
        QuantumTorus::from_normal_form(NormalFormSpec::new(2, 1, vec![2, 2]).unwrap())
    }

    #[test]
    fn sigma_on_unit_vectors() {
        let q = QMatrixSpec::new(2, 2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let e1 = v(&[1, 0]);
        let e2 = v(&[0, 1]);
        assert!(q.sigma(&e1, &e2).unwrap().is_one());
        assert_eq!(q.sigma(&e2, &e1).unwrap(), RootOfUnity::new(2, 1));
        assert!(q.sigma(&v(&[3, -2]), &v(&[0, 0])).unwrap().is_one());
    }

    #[test]
    fn sigma_rank_mismatch() {
        let q = QMatrixSpec::new(2, 2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(matches!(
            q.sigma(&v(&[1, 0, 0]), &v(&[1, 0])),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn radical_of_normal_forms() {
        assert_eq!(torus22().radical_basis(), &[v(&[2, 0]), v(&[0, 2])]);
        let t = QuantumTorus::from_normal_form(NormalFormSpec::new(3, 1, vec![3, 3, 1]).unwrap());
        assert_eq!(t.radical_basis(), &[v(&[3, 0, 0]), v(&[0, 3, 0]), v(&[0, 0, 1])]);
    }

    #[test]
    fn radical_of_generic_input_matches_scan() {
        let q = QMatrixSpec::new(2, 3, vec![vec![0, 1], vec![2, 0]]).unwrap();
        let t = QuantumTorus::new(q.clone());
        assert_eq!(t.radical_basis(), &[v(&[3, 0]), v(&[0, 3])]);
        // brute-force oracle over [-3,3]^2
        let es = [v(&[1, 0]), v(&[0, 1])];
        for m in box_points(2, 3) {
            let scan = es
                .iter()
                .all(|e| q.sigma(&m, e).unwrap() == q.sigma(e, &m).unwrap());
            assert_eq!(scan, t.radical_contains(&m), "at {m}");
        }
    }

    #[test]
    fn radical_of_non_diagonal_lattice() {
        // d=3 with q_12 = q_13 = ζ_2: R = {m | m_2 + m_3 even, m_1 even}
        let q = QMatrixSpec::new(3, 2, vec![vec![0, 1, 1], vec![1, 0, 0], vec![1, 0, 0]]).unwrap();
        let t = QuantumTorus::new(q);
        assert!(t.normal_form().is_none());
        assert_eq!(
            t.radical_basis(),
            &[v(&[2, 0, 0]), v(&[0, 1, 1]), v(&[0, 0, 2])]
        );
        for b in t.radical_basis() {
            assert!(t.radical_contains(b));
        }
        assert!(!t.radical_contains(&v(&[0, 1, 0])));
    }

    #[test]
    fn membership_examples() {
        let t = torus22();
        assert!(t.radical_contains(&v(&[2, 0])));
        assert!(!t.radical_contains(&v(&[1, 0])));
        assert!(t.radical_contains(&v(&[0, 0])));
    }

    #[test]
    fn commutation_subgroup_examples() {
        let t = torus22();
        let r = v(&[1, 0]);
        let m = t.commutation_subgroup_contains(&r, &v(&[0, 1])).unwrap();
        assert!(!m.contains);
        assert!(!m.whole_lattice);
        assert!(t.commutation_subgroup_contains(&r, &r).unwrap().contains);
        assert!(t.commutation_subgroup_contains(&r, &v(&[0, 2])).unwrap().contains);
        assert!(t
            .commutation_subgroup_contains(&v(&[2, 0]), &v(&[0, 1]))
            .unwrap()
            .whole_lattice);
    }

    #[test]
    fn fundamental_domain_examples() {
        let nf = NormalFormSpec::new(2, 1, vec![2, 2]).unwrap();
        assert_eq!(
            fundamental_domain(&nf).unwrap(),
            vec![v(&[0, 1]), v(&[1, 0]), v(&[1, 1])]
        );
        let nf = NormalFormSpec::new(3, 1, vec![3, 3, 1]).unwrap();
        let g = fundamental_domain(&nf).unwrap();
        assert_eq!(g.len(), 8);
        assert!(g.iter().all(|p| p.coords()[2] == 0 && !(p.coords()[0] == 0 && p.coords()[1] == 0)));
        let nf = NormalFormSpec::new(2, 0, vec![1, 1]).unwrap();
        assert!(fundamental_domain(&nf).is_err());
    }

    #[test]
    fn iota_examples() {
        let t = torus22();
        assert_eq!(t.iota(&v(&[2, 0]), &v(&[0, 2])).unwrap(), 3);
        assert_eq!(t.iota(&v(&[1, 0]), &v(&[1, 0])).unwrap(), 1);
        assert_eq!(t.iota(&v(&[1, 0]), &v(&[0, 1])).unwrap(), 0);
    }

    #[test]
    fn normal_form_validation() {
        assert!(NormalFormSpec::new(2, 1, vec![2, 3]).is_err());
        assert!(NormalFormSpec::new(1, 0, vec![1]).is_err());
        assert!(NormalFormSpec::new(4, 2, vec![2, 2, 4, 4]).is_err());
        assert!(NormalFormSpec::new(4, 2, vec![4, 4, 2, 2]).is_ok());
        assert!(NormalFormSpec::new(3, 1, vec![3, 3, 2]).is_err());
    }

    #[test]
    fn normal_form_recognized_from_exponents() {
        let q = QMatrixSpec::new(2, 2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(
            NormalFormSpec::recognize(&q),
            Some(NormalFormSpec::new(2, 1, vec![2, 2]).unwrap())
        );
        let q = QMatrixSpec::new(2, 1, vec![vec![0, 0], vec![0, 0]]).unwrap();
        assert_eq!(
            NormalFormSpec::recognize(&q),
            Some(NormalFormSpec::new(2, 0, vec![1, 1]).unwrap())
        );
    }

    #[test]
    fn box_index_roundtrip() {
        for (i, p) in box_points(3, 2).iter().enumerate() {
            assert_eq!(box_index(p, 2), Some(i));
        }
        assert_eq!(box_index(&v(&[3, 0, 0]), 2), None);
    }
}
