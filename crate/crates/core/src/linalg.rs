//! Small dense matrices over a coefficient ring, and matrices of forms.

use crate::error::{Error, Result};
use crate::form::{Coeff, Form};
use crate::jet::C64;

pub type Matrix<C> = Vec<Vec<C>>;

pub fn identity<C: Coeff>(n: usize, like: &C) -> Matrix<C> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { like.one_like() } else { like.zero_like() })
                .collect()
        })
        .collect()
}

pub fn mat_mul<C: Coeff>(a: &Matrix<C>, b: &Matrix<C>) -> Matrix<C> {
    let n = a.len();
    let m = b[0].len();
    let inner = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = a[i][0].mul_c(&b[0][j]);
                    for k in 1..inner {
                        s = s.add_c(&a[i][k].mul_c(&b[k][j]));
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn conj<C: Coeff>(a: &Matrix<C>) -> Matrix<C> {
    a.iter().map(|row| row.iter().map(|c| c.conj_c()).collect()).collect()
}

pub fn transpose<C: Coeff>(a: &Matrix<C>) -> Matrix<C> {
    let n = a.len();
    let m = a[0].len();
    (0..m).map(|j| (0..n).map(|i| a[i][j].clone()).collect()).collect()
}

/// Conjugate transpose.
pub fn adjoint<C: Coeff>(a: &Matrix<C>) -> Matrix<C> {
    transpose(&conj(a))
}

/// Gauss-Jordan inverse with partial pivoting on base-point magnitudes.
pub fn inverse<C: Coeff>(a: &Matrix<C>) -> Result<Matrix<C>> {
    let n = a.len();
    let mut lhs = a.clone();
    let mut rhs = identity(n, &a[0][0]);
    let scale = a
        .iter()
        .flatten()
        .map(|c| c.magnitude())
        .fold(0.0, f64::max);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| {
                lhs[x][col]
                    .magnitude()
                    .partial_cmp(&lhs[y][col].magnitude())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty");
        if lhs[pivot][col].magnitude() <= 1e-14 * scale.max(1e-300) {
            return Err(Error::Singular("matrix inverse"));
        }
        lhs.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = lhs[col][col].recip_c()?;
        for j in 0..n {
            lhs[col][j] = lhs[col][j].mul_c(&inv);
            rhs[col][j] = rhs[col][j].mul_c(&inv);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = lhs[r][col].clone();
            if f.negligible() {
                continue;
            }
            for j in 0..n {
                lhs[r][j] = lhs[r][j].sub_c(&f.mul_c(&lhs[col][j]));
                rhs[r][j] = rhs[r][j].sub_c(&f.mul_c(&rhs[col][j]));
            }
        }
    }
    Ok(rhs)
}

/// Determinant by cofactor expansion (matrices here are at most 6×6 and
/// mostly 2×2 or 3×3).
pub fn det<C: Coeff>(a: &Matrix<C>) -> C {
    let n = a.len();
    match n {
        1 => a[0][0].clone(),
        2 => a[0][0].mul_c(&a[1][1]).sub_c(&a[0][1].mul_c(&a[1][0])),
        _ => {
            let mut acc = a[0][0].zero_like();
            for j in 0..n {
                let minor: Matrix<C> = (1..n)
                    .map(|i| (0..n).filter(|&k| k != j).map(|k| a[i][k].clone()).collect())
                    .collect();
                let term = a[0][j].mul_c(&det(&minor));
                acc = if j % 2 == 0 { acc.add_c(&term) } else { acc.sub_c(&term) };
            }
            acc
        }
    }
}

/// Solve `a x = b` for a single right-hand side.
pub fn solve<C: Coeff>(a: &Matrix<C>, b: &[C]) -> Result<Vec<C>> {
    let inv = inverse(a)?;
    Ok(inv
        .iter()
        .map(|row| {
            let mut s = row[0].mul_c(&b[0]);
            for k in 1..b.len() {
                s = s.add_c(&row[k].mul_c(&b[k]));
            }
            s
        })
        .collect())
}

/// Matrix whose entries are forms of a common degree.
pub type FormMatrix<C> = Vec<Vec<Form<C>>>;

/// Scalar matrix times form matrix.
pub fn scalar_form_mul<C: Coeff>(a: &Matrix<C>, f: &FormMatrix<C>) -> FormMatrix<C> {
    let n = a.len();
    let m = f[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = f[0][j].mul_coeff(&a[i][0]);
                    for k in 1..f.len() {
                        s = s.add(&f[k][j].mul_coeff(&a[i][k]));
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Form matrix times scalar matrix.
pub fn form_scalar_mul<C: Coeff>(f: &FormMatrix<C>, a: &Matrix<C>) -> FormMatrix<C> {
    let n = f.len();
    let m = a[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = f[i][0].mul_coeff(&a[0][j]);
                    for k in 1..a.len() {
                        s = s.add(&f[i][k].mul_coeff(&a[k][j]));
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Entrywise wedge matrix product.
pub fn form_wedge_mul<C: Coeff>(a: &FormMatrix<C>, b: &FormMatrix<C>) -> FormMatrix<C> {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = a[i][0].wedge(&b[0][j]);
                    for k in 1..b.len() {
                        s = s.add(&a[i][k].wedge(&b[k][j]));
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn form_trace<C: Coeff>(a: &FormMatrix<C>) -> Form<C> {
    let mut s = a[0][0].clone();
    for (i, row) in a.iter().enumerate().skip(1) {
        s = s.add(&row[i]);
    }
    s
}

pub fn form_matrix_sup<C: Coeff>(a: &FormMatrix<C>) -> f64 {
    a.iter().flatten().map(|f| f.sup_norm()).fold(0.0, f64::max)
}

pub fn matrix_value(a: &Matrix<crate::jet::Jet>) -> Matrix<C64> {
    a.iter().map(|row| row.iter().map(|c| c.value()).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_det_agree() {
        let a: Matrix<C64> = vec![
            vec![C64::new(2.0, 0.0), C64::new(0.0, 1.0), C64::new(0.5, 0.0)],
            vec![C64::new(0.0, -1.0), C64::new(3.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(0.5, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        ];
        let inv = inverse(&a).unwrap();
        let prod = mat_mul(&a, &inv);
        for (i, row) in prod.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((v - e).norm() < 1e-14);
            }
        }
        // det by hand: 2(3) - i(-i·1 - 0) + 0.5(0 - 1.5) = 6 - 1 - 0.75
        assert!((det(&a) - C64::new(4.25, 0.0)).norm() < 1e-14);
        let sin = vec![vec![C64::new(1.0, 0.0); 2]; 2];
        assert!(inverse(&sin).is_err());
    }
}
