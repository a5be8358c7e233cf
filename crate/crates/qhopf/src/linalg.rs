//! Exact rational linear algebra: sparse row echelon for rank and span
//! membership, dense elimination for solving and nullspaces.
//!
//! All pivoting is exact; there are no tolerances anywhere in this module.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::scalar::Scalar;

/// Sparse vector: coordinate index -> nonzero value.
pub type SparseVec = BTreeMap<usize, Scalar>;

pub fn sparse_is_zero(v: &SparseVec) -> bool {
    v.is_empty()
}

fn sparse_axpy(target: &mut SparseVec, coeff: &Scalar, src: &SparseVec) {
    if coeff.is_zero() {
        return;
    }
    for (i, x) in src {
        let entry = target.entry(*i).or_insert_with(Scalar::zero);
        *entry += coeff * x;
        if entry.is_zero() {
            target.remove(i);
        }
    }
}

/// Incremental row-echelon basis of a growing span.
#[derive(Debug, Default, Clone)]
pub struct Echelon {
    /// pivot column -> row, normalized to pivot value 1.
    rows: BTreeMap<usize, SparseVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the current basis; the result has no support on
    /// existing pivot columns.
    pub fn reduce(&self, mut v: SparseVec) -> SparseVec {
        loop {
            let hit = v
                .iter()
                .find_map(|(i, c)| self.rows.get_key_value(i).map(|(p, row)| (*p, c.clone(), row.clone())));
            match hit {
                Some((_, c, row)) => {
                    let neg = -c;
                    sparse_axpy(&mut v, &neg, &row);
                }
                None => return v,
            }
        }
    }

    /// Inserts `v` into the span; returns true if the rank grew.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let r = self.reduce(v);
        match r.iter().next() {
            None => false,
            Some((pivot, c)) => {
                let pivot = *pivot;
                let inv = Scalar::new(c.denom().clone(), c.numer().clone());
                let mut row = SparseVec::new();
                sparse_axpy(&mut row, &inv, &r);
                self.rows.insert(pivot, row);
                true
            }
        }
    }

    /// True iff `v` lies in the current span.
    pub fn contains(&self, v: SparseVec) -> bool {
        sparse_is_zero(&self.reduce(v))
    }
}

/// Rank of a list of sparse vectors.
pub fn rank(vectors: impl IntoIterator<Item = SparseVec>) -> usize {
    let mut e = Echelon::new();
    for v in vectors {
        e.insert(v);
    }
    e.rank()
}

/// Solves `sum_k x_k col_k = rhs` exactly. Returns one solution if the
/// system is consistent (the solution with free variables set to zero).
pub fn solve_columns(columns: &[SparseVec], rhs: &SparseVec) -> Option<Vec<Scalar>> {
    // Coordinates actually used.
    let mut coords: Vec<usize> = columns
        .iter()
        .flat_map(|c| c.keys().copied())
        .chain(rhs.keys().copied())
        .collect();
    coords.sort_unstable();
    coords.dedup();
    let index: BTreeMap<usize, usize> = coords.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let nrows = coords.len();
    let ncols = columns.len();

    // Dense augmented matrix [A | b].
    let mut m: Vec<Vec<Scalar>> = vec![vec![Scalar::zero(); ncols + 1]; nrows];
    for (j, col) in columns.iter().enumerate() {
        for (c, v) in col {
            m[index[c]][j] = v.clone();
        }
    }
    for (c, v) in rhs {
        m[index[c]][ncols] = v.clone();
    }

    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut row = 0;
    for col in 0..ncols {
        if row >= nrows {
            break;
        }
        let Some(pr) = (row..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pr);
        let inv = {
            let p = &m[row][col];
            Scalar::new(p.denom().clone(), p.numer().clone())
        };
        for v in m[row].iter_mut() {
            *v *= &inv;
        }
        for r in 0..nrows {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in 0..=ncols {
                    let delta = &f * &m[row][j];
                    m[r][j] -= delta;
                }
            }
        }
        pivot_of_col[col] = Some(row);
        row += 1;
    }
    // Inconsistent if a zero row has nonzero rhs.
    for r in row..nrows {
        if !m[r][ncols].is_zero() {
            return None;
        }
    }
    let mut x = vec![Scalar::zero(); ncols];
    for (col, pr) in pivot_of_col.iter().enumerate() {
        if let Some(r) = pr {
            x[col] = m[*r][ncols].clone();
        }
    }
    Some(x)
}

/// Nullspace basis of the dense matrix `rows` with `ncols` columns.
pub fn nullspace(rows: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<Scalar>> {
    let mut m: Vec<Vec<Scalar>> = rows.to_vec();
    let nrows = m.len();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row >= nrows {
            break;
        }
        let Some(pr) = (row..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pr);
        let inv = {
            let p = &m[row][col];
            Scalar::new(p.denom().clone(), p.numer().clone())
        };
        for v in m[row].iter_mut() {
            *v *= &inv;
        }
        for r in 0..nrows {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in 0..ncols {
                    let delta = &f * &m[row][j];
                    m[r][j] -= delta;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; ncols];
        for &c in &pivot_cols {
            v[c] = true;
        }
        v
    };
    let mut basis = Vec::new();
    for free in 0..ncols {
        if is_pivot[free] {
            continue;
        }
        let mut v = vec![Scalar::zero(); ncols];
        v[free] = Scalar::from(num_bigint::BigInt::from(1));
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -m[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn sv(entries: &[(usize, Scalar)]) -> SparseVec {
        entries.iter().cloned().collect()
    }

    #[test]
    fn rank_and_membership() {
        let v1 = sv(&[(0, int(1)), (1, int(2))]);
        let v2 = sv(&[(1, int(1))]);
        let v3 = sv(&[(0, int(3)), (1, int(4))]); // in span{v1,v2}
        let mut e = Echelon::new();
        assert!(e.insert(v1));
        assert!(e.insert(v2));
        assert!(!e.insert(v3.clone()));
        assert_eq!(e.rank(), 2);
        assert!(e.contains(v3));
        assert!(!e.contains(sv(&[(2, int(1))])));
    }

    #[test]
    fn solve_small_system() {
        // col0 = (1,1), col1 = (1,-1); rhs = (3,1) -> x = (2,1)
        let cols = vec![
            sv(&[(0, int(1)), (1, int(1))]),
            sv(&[(0, int(1)), (1, int(-1))]),
        ];
        let rhs = sv(&[(0, int(3)), (1, int(1))]);
        let x = solve_columns(&cols, &rhs).unwrap();
        assert_eq!(x, vec![int(2), int(1)]);
        // inconsistent
        let cols2 = vec![sv(&[(0, int(1))])];
        assert!(solve_columns(&cols2, &sv(&[(1, int(1))])).is_none());
    }

    #[test]
    fn solve_with_rational_pivots() {
        let cols = vec![sv(&[(0, rat(1, 2))])];
        let x = solve_columns(&cols, &sv(&[(0, rat(3, 4))])).unwrap();
        assert_eq!(x, vec![rat(3, 2)]);
    }

    #[test]
    fn nullspace_of_rank_one() {
        // x + y + z = 0 in Q^3 -> nullspace dim 2
        let rows = vec![vec![int(1), int(1), int(1)]];
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let s = v.iter().fold(Scalar::zero(), |acc, x| acc + x);
            assert!(s.is_zero());
        }
    }
}
