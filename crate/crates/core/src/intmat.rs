//! Small dense integer matrices: Smith and Hermite normal forms.
//!
//! Sizes here are the rank of the lattice (a handful of rows), so plain
//! `i64` arithmetic with overflow checks is sufficient.

pub type IntMatrix = Vec<Vec<i64>>;

fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

fn swap_cols(m: &mut IntMatrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// row[dst] += k * row[src]
fn add_row(m: &mut IntMatrix, dst: usize, src: usize, k: i64) {
    if k == 0 {
        return;
    }
    let src_row = m[src].clone();
    for (x, s) in m[dst].iter_mut().zip(src_row) {
        *x = x.checked_add(k.checked_mul(s).expect("overflow")).expect("overflow");
    }
}

/// col[dst] += k * col[src]
fn add_col(m: &mut IntMatrix, dst: usize, src: usize, k: i64) {
    if k == 0 {
        return;
    }
    for row in m.iter_mut() {
        row[dst] = row[dst]
            .checked_add(k.checked_mul(row[src]).expect("overflow"))
            .expect("overflow");
    }
}

fn negate_row(m: &mut IntMatrix, r: usize) {
    for x in m[r].iter_mut() {
        *x = -*x;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Smith {
    /// Diagonal entries d_0 | d_1 | ..., nonnegative; zeros trail.
    pub diagonal: Vec<i64>,
    /// Unimodular row transform.
    pub left: IntMatrix,
    /// Unimodular column transform with `left * a * right = diag`.
    pub right: IntMatrix,
}

/// Smith normal form of a square or rectangular integer matrix.
pub fn smith_normal_form(a: &IntMatrix) -> Smith {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m = a.clone();
    let mut left = identity(rows);
    let mut right = identity(cols);

    let mut t = 0;
    while t < rows.min(cols) {
        // pivot of least absolute value in the trailing block
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| m[i][j] != 0)
            .min_by_key(|&(i, j)| (m[i][j].abs(), i, j));
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        left.swap(t, pi);
        swap_cols(&mut m, t, pj);
        swap_cols(&mut right, t, pj);

        let mut done = false;
        while !done {
            done = true;
            for i in t + 1..rows {
                let q = m[i][t].div_euclid(m[t][t]);
                add_row(&mut m, i, t, -q);
                add_row(&mut left, i, t, -q);
                if m[i][t] != 0 {
                    m.swap(t, i);
                    left.swap(t, i);
                    done = false;
                }
            }
            for j in t + 1..cols {
                let q = m[t][j].div_euclid(m[t][t]);
                add_col(&mut m, j, t, -q);
                add_col(&mut right, j, t, -q);
                if m[t][j] != 0 {
                    swap_cols(&mut m, t, j);
                    swap_cols(&mut right, t, j);
                    done = false;
                }
            }
            if done {
                // divisibility of the remaining block
                let p = m[t][t];
                let bad = (t + 1..rows)
                    .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| m[i][j] % p != 0);
                if let Some((i, _)) = bad {
                    add_row(&mut m, t, i, 1);
                    add_row(&mut left, t, i, 1);
                    done = false;
                }
            }
        }
        if m[t][t] < 0 {
            negate_row(&mut m, t);
            negate_row(&mut left, t);
        }
        t += 1;
    }

    let diagonal = (0..rows.min(cols)).map(|i| m[i][i]).collect();
    Smith {
        diagonal,
        left,
        right,
    }
}

/// Row-style Hermite normal form of a full-rank square lattice basis.
///
/// The rows of the result generate the same lattice as `rows`; the result is
/// upper triangular with positive pivots and entries above each pivot reduced
/// into `[0, pivot)`.
pub fn hermite_normal_form(rows: &IntMatrix) -> IntMatrix {
    let n = rows.len();
    let cols = if n == 0 { 0 } else { rows[0].len() };
    let mut m = rows.clone();
    let mut r = 0;
    for c in 0..cols {
        if r == n {
            break;
        }
        // Euclid on column c among rows r..n
        loop {
            let nonzero: Vec<usize> = (r..n).filter(|&i| m[i][c] != 0).collect();
            if nonzero.is_empty() {
                break;
            }
            let &piv = nonzero.iter().min_by_key(|&&i| (m[i][c].abs(), i)).unwrap();
            m.swap(r, piv);
            if nonzero.len() == 1 {
                break;
            }
            for i in r + 1..n {
                let q = m[i][c].div_euclid(m[r][c]);
                add_row(&mut m, i, r, -q);
            }
        }
        if m[r][c] == 0 {
            continue;
        }
        if m[r][c] < 0 {
            negate_row(&mut m, r);
        }
        for i in 0..r {
            let q = m[i][c].div_euclid(m[r][c]);
            add_row(&mut m, i, r, -q);
        }
        r += 1;
    }
    m.truncate(r);
    m
}
