//! Sparse exact elimination over any [`Scalar`].

use std::collections::BTreeMap;

use crate::error::Result;
use crate::scalar::Scalar;

pub type SparseVec<S> = BTreeMap<usize, S>;

/// Row echelon form built one row at a time. Each stored row is scaled so
/// its lowest-index entry (the pivot) is 1.
#[derive(Debug, Clone)]
pub struct Echelon<S: Scalar> {
    ncols: usize,
    rows: Vec<SparseVec<S>>,
    pivot_row: BTreeMap<usize, usize>,
}

impl<S: Scalar> Echelon<S> {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            rows: Vec::new(),
            pivot_row: BTreeMap::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Stored rows in echelon form, each led by its pivot.
    pub fn rows(&self) -> &[SparseVec<S>] {
        &self.rows
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivot_row.keys().copied()
    }

    /// Reduces `row` against the stored pivots, lowest column first.
    pub fn reduce(&self, mut row: SparseVec<S>) -> SparseVec<S> {
        row.retain(|_, v| !v.is_zero());
        let mut cursor = 0;
        loop {
            let Some((&col, coef)) = row.range(cursor..).find(|(c, _)| self.pivot_row.contains_key(c)) else {
                break;
            };
            let coef = coef.clone();
            let pivot = &self.rows[self.pivot_row[&col]];
            for (&j, v) in pivot {
                let nv = match row.get(&j) {
                    Some(x) => x.minus(&coef.times(v)),
                    None => coef.times(v).negate(),
                };
                if nv.is_zero() {
                    row.remove(&j);
                } else {
                    row.insert(j, nv);
                }
            }
            cursor = col + 1;
        }
        row
    }

    /// Adds a row; returns whether it was independent of the stored rows.
    pub fn insert(&mut self, row: SparseVec<S>) -> Result<bool> {
        let row = self.reduce(row);
        let Some((&lead, lc)) = row.iter().next() else {
            return Ok(false);
        };
        let inv = S::one().try_div(lc)?;
        let row: SparseVec<S> = row.into_iter().map(|(j, v)| (j, v.times(&inv))).collect();
        self.pivot_row.insert(lead, self.rows.len());
        self.rows.push(row);
        debug_assert!(lead < self.ncols);
        Ok(true)
    }

    /// Basis of the solution space of the stored rows, one vector per free
    /// column, with that free column set to 1 and the others to 0.
    pub fn nullspace(&self) -> Vec<SparseVec<S>> {
        let free: Vec<usize> = (0..self.ncols).filter(|c| !self.pivot_row.contains_key(c)).collect();
        let order: Vec<(usize, usize)> = self.pivot_row.iter().rev().map(|(&c, &r)| (c, r)).collect();
        free.iter()
            .map(|&f| {
                let mut x: SparseVec<S> = BTreeMap::new();
                x.insert(f, S::one());
                for &(col, r) in &order {
                    let mut acc = S::zero();
                    for (&j, v) in &self.rows[r] {
                        if j != col {
                            if let Some(xj) = x.get(&j) {
                                acc = acc.minus(&v.times(xj));
                            }
                        }
                    }
                    if !acc.is_zero() {
                        x.insert(col, acc);
                    }
                }
                x
            })
            .collect()
    }
}

/// Rank of a set of sparse vectors over `ncols` coordinates.
pub fn rank<S: Scalar>(ncols: usize, vectors: impl IntoIterator<Item = SparseVec<S>>) -> Result<usize> {
    let mut e = Echelon::new(ncols);
    for v in vectors {
        e.insert(v)?;
    }
    Ok(e.rank())
}

/// Keeps only the coordinates in `keep`, renumbered in their given order.
pub fn project<S: Scalar>(v: &SparseVec<S>, keep: &BTreeMap<usize, usize>) -> SparseVec<S> {
    v.iter()
        .filter_map(|(j, x)| keep.get(j).map(|&k| (k, x.clone())))
        .collect()
}

pub fn dot<S: Scalar>(a: &SparseVec<S>, b: &SparseVec<S>) -> S {
    let (small, big) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small
        .iter()
        .filter_map(|(j, x)| big.get(j).map(|y| x.times(y)))
        .fold(S::zero(), |acc, t| acc.plus(&t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::Cyclotomic;
    use proptest::prelude::*;

    fn row(entries: &[(usize, i64)]) -> SparseVec<Cyclotomic> {
        entries.iter().map(|&(j, v)| (j, Cyclotomic::integer(v))).collect()
    }

    #[test]
    fn rank_and_kernel() {
        let mut e = Echelon::new(3);
        assert!(e.insert(row(&[(0, 1), (1, 2), (2, 3)])).unwrap());
        assert!(e.insert(row(&[(0, 2), (1, 4), (2, 7)])).unwrap());
        assert!(!e.insert(row(&[(0, 3), (1, 6), (2, 10)])).unwrap());
        assert_eq!(e.rank(), 2);
        let ker = e.nullspace();
        assert_eq!(ker.len(), 1);
        assert_eq!(ker[0], row(&[(0, -2), (1, 1)]));
    }

    #[test]
    fn empty_rows_are_dependent() {
        let mut e = Echelon::<Cyclotomic>::new(2);
        assert!(!e.insert(BTreeMap::new()).unwrap());
        assert!(!e.insert(row(&[(1, 0)])).unwrap());
        assert_eq!(e.nullspace().len(), 2);
    }

    proptest! {
        #[test]
        fn kernel_vectors_solve_every_row(
            rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 5), 1..5)
        ) {
            let rows: Vec<SparseVec<Cyclotomic>> = rows
                .iter()
                .map(|r| r.iter().enumerate().map(|(j, &v)| (j, Cyclotomic::integer(v))).collect())
                .collect();
            let mut e = Echelon::new(5);
            for r in &rows {
                e.insert(r.clone()).unwrap();
            }
            let ker = e.nullspace();
            prop_assert_eq!(ker.len() + e.rank(), 5);
            for k in &ker {
                for r in &rows {
                    prop_assert!(Scalar::is_zero(&dot(r, k)));
                }
            }
            prop_assert_eq!(rank(5, ker.clone()).unwrap(), ker.len());
        }
    }
}
