use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest Gram-matrix condition number (estimated from the R factor) that
/// [`least_squares`] accepts.
pub const CONDITION_CAP: f64 = 1e12;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "matrix data has {} entries, expected {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::invalid(format!(
                    "row {i} has {} columns, expected {cols}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn push_row(&mut self, row: &[f64]) -> Result<()> {
        if self.rows > 0 && row.len() != self.cols {
            return Err(Error::invalid(format!(
                "row has {} columns, expected {}",
                row.len(),
                self.cols
            )));
        }
        if self.rows == 0 {
            self.cols = row.len();
        }
        self.data.extend_from_slice(row);
        self.rows += 1;
        Ok(())
    }

    /// New matrix made of the given rows, in order. Indices may repeat.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self { rows: indices.len(), cols: self.cols, data }
    }

    pub fn column_means(&self) -> Vec<f64> {
        let mut means = vec![0.0; self.cols];
        if self.rows == 0 {
            return means;
        }
        for i in 0..self.rows {
            for (m, x) in means.iter_mut().zip(self.row(i)) {
                *m += x;
            }
        }
        let n = self.rows as f64;
        means.iter_mut().for_each(|m| *m /= n);
        means
    }

    /// Copy with `center` subtracted from every row.
    pub fn centered(&self, center: &[f64]) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows {
            let row = &mut out.data[i * self.cols..(i + 1) * self.cols];
            for (x, c) in row.iter_mut().zip(center) {
                *x -= c;
            }
        }
        out
    }

    /// Sample covariance of the rows, `(rows - 1)` divisor.
    pub fn covariance(&self) -> Self {
        let p = self.cols;
        let mut cov = Self::zeros(p, p);
        if self.rows < 2 {
            return cov;
        }
        let means = self.column_means();
        for i in 0..self.rows {
            let row = self.row(i);
            for a in 0..p {
                let da = row[a] - means[a];
                for b in a..p {
                    cov.data[a * p + b] += da * (row[b] - means[b]);
                }
            }
        }
        let denom = (self.rows - 1) as f64;
        for a in 0..p {
            for b in a..p {
                let v = cov.data[a * p + b] / denom;
                cov.data[a * p + b] = v;
                cov.data[b * p + a] = v;
            }
        }
        cov
    }

    /// `vᵀ M v` for a square matrix.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        debug_assert_eq!(self.rows, self.cols);
        debug_assert_eq!(v.len(), self.cols);
        let mut total = 0.0;
        for i in 0..self.rows {
            let row = self.row(i);
            let inner: f64 = row.iter().zip(v).map(|(m, x)| m * x).sum();
            total += v[i] * inner;
        }
        total
    }

    /// `M v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Ordinary least squares `argmin_b ||response - design b||²` via Householder QR.
///
/// No intercept column is added; callers pass centered covariates when they
/// want one absorbed.
pub fn least_squares(design: &Matrix, response: &[f64]) -> Result<Vec<f64>> {
    let (m, p) = (design.rows(), design.cols());
    if response.len() != m {
        return Err(Error::invalid(format!(
            "response has {} entries, design has {m} rows",
            response.len()
        )));
    }
    if p == 0 {
        return Err(Error::SingularCovariance("design has no columns".into()));
    }
    if m < p + 1 {
        return Err(Error::SingularCovariance(format!(
            "{m} rows cannot identify {p} coefficients"
        )));
    }
    if design.as_slice().iter().chain(response).any(|x| !x.is_finite()) {
        return Err(Error::invalid("least squares input contains non-finite values"));
    }

    // Column-major working copy.
    let mut a: Vec<Vec<f64>> = (0..p).map(|j| design.column(j)).collect();
    let mut y = response.to_vec();
    let mut diag = vec![0.0; p];

    for k in 0..p {
        let norm = libm::sqrt(a[k][k..].iter().map(|x| x * x).sum::<f64>());
        if norm == 0.0 {
            return Err(Error::SingularCovariance(format!("column {k} is linearly dependent")));
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        // v = x - alpha e1, stored in place.
        a[k][k] -= alpha;
        let vnorm2: f64 = a[k][k..].iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            let (head, tail) = a.split_at_mut(k + 1);
            let v = &head[k][k..];
            for col in tail.iter_mut() {
                let s = 2.0 * dot(v, &col[k..]) / vnorm2;
                for (c, vi) in col[k..].iter_mut().zip(v) {
                    *c -= s * vi;
                }
            }
            let s = 2.0 * dot(v, &y[k..]) / vnorm2;
            for (c, vi) in y[k..].iter_mut().zip(v) {
                *c -= s * vi;
            }
        }
        diag[k] = alpha;
    }

    let largest = diag.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
    let smallest = diag.iter().fold(f64::INFINITY, |acc, d| acc.min(d.abs()));
    let ratio = largest / smallest;
    if !(ratio * ratio <= CONDITION_CAP) {
        return Err(Error::SingularCovariance(format!(
            "Gram matrix condition estimate {:.3e} exceeds {CONDITION_CAP:.0e}",
            ratio * ratio
        )));
    }

    // Back substitution on R (diag on the diagonal, a[j][i] above it).
    let mut coef = vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = y[i];
        for j in i + 1..p {
            s -= a[j][i] * coef[j];
        }
        coef[i] = s / diag[i];
    }
    Ok(coef)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residuals(x: &Matrix, y: &[f64], b: &[f64]) -> Vec<f64> {
        y.iter().zip(x.mul_vec(b)).map(|(yi, fi)| yi - fi).collect()
    }

    #[test]
    fn zero_response_gives_zero_coefficients() {
        let x = Matrix::from_rows(&[[1.0, 2.0], [-1.0, 0.5], [0.0, -2.5], [3.0, 1.0]]).unwrap();
        let b = least_squares(&x, &[0.0; 4]).unwrap();
        assert!(b.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn exact_fit_on_first_column() {
        let x = Matrix::from_rows(&[[1.0, 2.0], [-1.0, 0.5], [0.0, -2.5], [3.0, 1.0]]).unwrap();
        let y = x.column(0);
        let b = least_squares(&x, &y).unwrap();
        assert!((b[0] - 1.0).abs() < 1e-12 && b[1].abs() < 1e-12, "{b:?}");
    }

    #[test]
    fn matches_hand_normal_equations() {
        // XᵀX = [[4, 2], [2, 6]], Xᵀy = [3, 7]  =>  b = [0.2, 1.1]
        let x = Matrix::from_rows(&[[1.0, 1.0], [1.0, -1.0], [1.0, 2.0], [1.0, 0.0]]).unwrap();
        let y = [2.0, -1.0, 2.0, 0.0];
        let b = least_squares(&x, &y).unwrap();
        assert!((b[0] - 0.2).abs() < 1e-12, "{b:?}");
        assert!((b[1] - 1.1).abs() < 1e-12, "{b:?}");
    }

    #[test]
    fn singular_design_is_rejected() {
        let x = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0], [3.0, 6.0], [4.0, 8.0]]).unwrap();
        assert!(matches!(
            least_squares(&x, &[1.0, 2.0, 3.0, 5.0]),
            Err(Error::SingularCovariance(_))
        ));
        let thin = Matrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        assert!(matches!(least_squares(&thin, &[1.0, 2.0]), Err(Error::SingularCovariance(_))));
    }

    #[test]
    fn covariance_of_known_rows() {
        let x = Matrix::from_rows(&[[1.0, 0.0], [3.0, 2.0], [5.0, 1.0]]).unwrap();
        let c = x.covariance();
        assert!((c.get(0, 0) - 4.0).abs() < 1e-12);
        assert!((c.get(1, 1) - 1.0).abs() < 1e-12);
        assert!((c.get(0, 1) - 1.0).abs() < 1e-12);
        assert_eq!(c.get(0, 1), c.get(1, 0));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn residuals_orthogonal_to_columns(
                cells in proptest::collection::vec(-5.0f64..5.0, 24),
                y in proptest::collection::vec(-10.0f64..10.0, 8),
            ) {
                let x = Matrix::new(8, 3, cells).unwrap();
                if let Ok(b) = least_squares(&x, &y) {
                    let r = residuals(&x, &y, &b);
                    let scale: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
                    for j in 0..3 {
                        let col = x.column(j);
                        let cn: f64 = col.iter().map(|v| v * v).sum::<f64>().sqrt();
                        prop_assert!(dot(&col, &r).abs() <= 1e-8 * cn * scale);
                    }
                }
            }
        }
    }
}
