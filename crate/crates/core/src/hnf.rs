//! Hermite normal form and integer kernels over any signed integer type.

use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Row-style echelon form over `Z` using only unimodular row operations.
///
/// Reduces the first `cols` columns; returns the transformed rows and the
/// pivot columns in order.
fn echelon<T: Integer + Signed + Clone>(mut rows: Vec<Vec<T>>, cols: usize) -> (Vec<Vec<T>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        loop {
            // Smallest nonzero |entry| in column c at or below row r.
            let best = (r..rows.len())
                .filter(|&i| !rows[i][c].is_zero())
                .min_by(|&i, &j| rows[i][c].abs().cmp(&rows[j][c].abs()));
            let Some(best) = best else { break };
            rows.swap(r, best);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                let pivot_row = rows[r].clone();
                for (x, p) in rows[i].iter_mut().zip(pivot_row) {
                    *x = x.clone() - q.clone() * p;
                }
                done &= rows[i][c].is_zero();
            }
            if done {
                break;
            }
        }
        if r < rows.len() && !rows[r][c].is_zero() {
            if rows[r][c].is_negative() {
                for x in rows[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            pivots.push(c);
            r += 1;
        }
    }
    (rows, pivots)
}

/// Hermite normal form of the lattice spanned by `rows`: nonzero rows only,
/// positive pivots, entries above each pivot reduced into `[0, pivot)`.
pub fn hermite_normal_form<T: Integer + Signed + Clone>(rows: Vec<Vec<T>>) -> Vec<Vec<T>> {
    let Some(width) = rows.first().map(Vec::len) else {
        return Vec::new();
    };
    let (mut rows, pivots) = echelon(rows, width);
    rows.truncate(pivots.len());
    for (r, &c) in pivots.iter().enumerate() {
        for i in 0..r {
            let q = rows[i][c].div_floor(&rows[r][c]);
            if q.is_zero() {
                continue;
            }
            let pivot_row = rows[r].clone();
            for (x, p) in rows[i].iter_mut().zip(pivot_row) {
                *x = x.clone() - q.clone() * p;
            }
        }
    }
    rows
}

/// A basis of `{x ∈ Z^n : A x = 0}` for the `m × n` matrix `a`.
pub fn integer_kernel<T: Integer + Signed + Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    // Rows of [Aᵀ | I]; row operations track the unimodular transform.
    let rows: Vec<Vec<T>> = (0..n)
        .map(|j| {
            let mut row: Vec<T> = (0..m).map(|i| a[i][j].clone()).collect();
            row.extend((0..n).map(|k| if k == j { T::one() } else { T::zero() }));
            row
        })
        .collect();
    let (rows, _) = echelon(rows, m);
    rows.into_iter().filter(|r| r[..m].iter().all(Zero::is_zero)).map(|r| r[m..].to_vec()).collect()
}

/// A sublattice of `Z^n`, stored in Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice<T> {
    basis: Vec<Vec<T>>,
}

impl<T: Integer + Signed + Clone> Lattice<T> {
    pub fn span(generators: Vec<Vec<T>>) -> Self {
        Lattice { basis: hermite_normal_form(generators) }
    }

    pub fn basis(&self) -> &[Vec<T>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: &[T]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        hermite_normal_form(rows) == self.basis
    }

    /// Image under the coordinate projection onto the first `k` coordinates.
    pub fn project(&self, k: usize) -> Self {
        Lattice::span(self.basis.iter().map(|r| r[..k].to_vec()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hnf_small() {
        let h = hermite_normal_form(vec![vec![1i64, 1, -2], vec![1, -1, 0]]);
        assert_eq!(h, vec![vec![1, 1, -2], vec![0, 2, -2]]);
        let h = hermite_normal_form(vec![vec![2i64, 4], vec![3, 6], vec![0, 0]]);
        assert_eq!(h, vec![vec![1, 2]]);
    }

    #[test]
    fn kernel_small() {
        let k = integer_kernel(&[vec![1i64, 1, 1]]);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(v.iter().sum::<i64>(), 0);
        }
        assert_eq!(Lattice::span(k), Lattice::span(vec![vec![1, -1, 0], vec![0, 1, -1]]));
    }

    #[test]
    fn works_for_bigint() {
        use num_bigint::BigInt;
        let rows: Vec<Vec<BigInt>> = vec![vec![6.into(), 4.into()], vec![4.into(), 6.into()]];
        let h = hermite_normal_form(rows);
        assert_eq!(h, vec![vec![BigInt::from(2), BigInt::from(8)], vec![BigInt::from(0), BigInt::from(10)]]);
    }

    proptest! {
        #[test]
        fn hnf_is_invariant_under_unimodular_moves(
            rows in proptest::collection::vec(proptest::collection::vec(-20i64..20, 3), 1..5),
            k in -5i64..5,
            i in 0usize..5,
            j in 0usize..5,
        ) {
            let mut moved = rows.clone();
            let (i, j) = (i % rows.len(), j % rows.len());
            if i != j {
                let rj = moved[j].clone();
                for (x, y) in moved[i].iter_mut().zip(rj) {
                    *x += k * y;
                }
            }
            moved.reverse();
            prop_assert_eq!(hermite_normal_form(rows), hermite_normal_form(moved));
        }

        #[test]
        fn kernel_vectors_are_in_the_kernel(
            a in proptest::collection::vec(proptest::collection::vec(-6i64..6, 4), 1..3),
        ) {
            for v in integer_kernel(&a) {
                for row in &a {
                    prop_assert_eq!(row.iter().zip(&v).map(|(x, y)| x * y).sum::<i64>(), 0);
                }
            }
        }
    }
}
