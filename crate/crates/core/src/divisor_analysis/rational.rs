//! Exact linear algebra over the rationals for small integer matrices.

use num_integer::Integer;
use num_rational::Ratio;

type Q = Ratio<i128>;

/// Reduced row echelon form in place; returns the pivot columns.
fn rref(m: &mut Vec<Vec<Q>>, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(pr) = (row..m.len()).find(|&r| m[r][col] != Q::from_integer(0)) else {
            continue;
        };
        m.swap(row, pr);
        let lead = m[row][col];
        for x in m[row].iter_mut() {
            *x /= lead;
        }
        for r in 0..m.len() {
            if r != row && m[r][col] != Q::from_integer(0) {
                let f = m[r][col];
                let pivot_row = m[row].clone();
                for (x, y) in m[r].iter_mut().zip(pivot_row) {
                    *x -= f * y;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    pivots
}

fn to_q(rows: &[Vec<i64>]) -> Vec<Vec<Q>> {
    rows.iter()
        .map(|r| r.iter().map(|x| Q::from_integer(*x as i128)).collect())
        .collect()
}

pub fn rank(rows: &[Vec<i64>], cols: usize) -> usize {
    let mut m = to_q(rows);
    rref(&mut m, cols).len()
}

/// Basis of `{n : <row, n> = 0 for every row}` over the rationals.
pub fn rational_null_space(rows: &[Vec<i64>], cols: usize) -> Vec<Vec<Ratio<i128>>> {
    let mut m = to_q(rows);
    let pivots = rref(&mut m, cols);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Q::from_integer(0); cols];
            v[free] = Q::from_integer(1);
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[i][free];
            }
            v
        })
        .collect()
}

/// Canonical integer basis of the span of `vectors`: reduced echelon form,
/// each row scaled to coprime integers with a positive leading entry.
pub fn primitive_integer_rows(vectors: &[Vec<Ratio<i128>>]) -> Vec<Vec<i64>> {
    let Some(cols) = vectors.first().map(|v| v.len()) else {
        return Vec::new();
    };
    let mut m = vectors.to_vec();
    let pivots = rref(&mut m, cols);
    m.truncate(pivots.len());
    m.into_iter()
        .map(|row| {
            let den = row.iter().fold(1i128, |acc, x| acc.lcm(x.denom()));
            let ints: Vec<i128> = row.iter().map(|x| (x * Q::from_integer(den)).to_integer()).collect();
            let g = ints.iter().fold(0i128, |acc, x| acc.gcd(x)).max(1);
            let sign = if ints.iter().find(|x| **x != 0).copied().unwrap_or(1) < 0 { -1 } else { 1 };
            ints.iter().map(|x| (sign * x / g) as i64).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_a_single_difference() {
        let ns = rational_null_space(&[vec![1, -1]], 2);
        assert_eq!(primitive_integer_rows(&ns), vec![vec![1, 1]]);
    }

    #[test]
    fn full_rank_has_trivial_kernel() {
        assert!(rational_null_space(&[vec![1, 0], vec![0, 1]], 2).is_empty());
        assert_eq!(rank(&[vec![2, 4], vec![1, 2]], 2), 1);
    }

    #[test]
    fn kernel_rows_are_primitive_and_reduced() {
        let ns = rational_null_space(&[vec![2, 3, -1]], 3);
        let rows = primitive_integer_rows(&ns);
        assert_eq!(rows.len(), 2);
        for r in &rows {
            assert_eq!(2 * r[0] + 3 * r[1] - r[2], 0);
        }
        assert_eq!(rows, vec![vec![1, 0, 2], vec![0, 1, 3]]);
    }
}
