//! Dense complex matrices in row-major order.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::NumError;

/// Dense complex matrix, row-major storage.
///
/// The carrier type for every operator in this crate: states, Kraus
/// operators, projectors, bases. Dimensions stay small (≤ 64), so all
/// operations are straightforward dense loops.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(
        rows: usize,
        cols: usize,
        mut f: F,
    ) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Real diagonal matrix from a slice of eigenvalues.
    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, Complex64::new(v, 0.0));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self, NumError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(NumError::ShapeError(
                "ragged rows in matrix constructor".into(),
            ));
        }
        let data: Vec<Complex64> = rows.into_iter().flatten().collect();
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(NumError::ShapeError("non-finite matrix entry".into()));
        }
        Ok(Self { rows: r, cols: c, data })
    }

    /// Rank-one projector |v⟩⟨v| from a column vector (d×1 matrix).
    pub fn outer(v: &[Complex64]) -> Self {
        let d = v.len();
        Self::from_fn(d, d, |i, j| v[i] * v[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn conjugate(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self, NumError> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, NumError> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, NumError> {
        if self.cols != other.rows {
            return Err(NumError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// A·v for a column vector v.
    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j) * v[j])
                    .sum::<Complex64>()
            })
            .collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i))
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from the adjoint, ‖M − M†‖_max.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_defect() <= tol
    }

    /// (M + M†)/2. Used before every spectral call to absorb round-off.
    pub fn hermitize(&self) -> Self {
        let adj = self.adjoint();
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j) + adj.get(i, j)) * 0.5
        })
    }

    /// Re Tr[A·B]; the Hilbert-Schmidt pairing for Hermitian A, B.
    pub fn inner_trace(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.cols, other.rows);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self.get(i, k) * other.get(k, i);
            }
        }
        acc.re
    }

    /// Kronecker product, with the left factor on the coarse index.
    pub fn kron(&self, other: &Self) -> Self {
        let (ra, ca) = (self.rows, self.cols);
        let (rb, cb) = (other.rows, other.cols);
        Self::from_fn(ra * rb, ca * cb, |i, j| {
            self.get(i / rb, j / cb) * other.get(i % rb, j % cb)
        })
    }

    /// Partial trace over subsystem `traced` of a square matrix on the
    /// tensor product with factor dimensions `dims` (row-major nesting,
    /// leftmost factor coarsest). Preserves the total trace exactly.
    pub fn partial_trace(&self, dims: &[usize], traced: usize) -> Result<Self, NumError> {
        let total: usize = dims.iter().product();
        if !self.is_square() || self.rows != total {
            return Err(NumError::DimensionMismatch {
                expected: total,
                found: self.rows,
            });
        }
        if traced >= dims.len() {
            return Err(NumError::ShapeError(format!(
                "subsystem index {} out of range for {} factors",
                traced,
                dims.len()
            )));
        }
        let dt = dims[traced];
        let keep: Vec<usize> = dims
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != traced)
            .map(|(_, &d)| d)
            .collect();
        let dout: usize = keep.iter().product();
        // Strides of each factor in the flat index.
        let mut strides = vec![1usize; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let keep_strides: Vec<usize> = strides
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != traced)
            .map(|(_, &s)| s)
            .collect();
        let expand = |mut idx: usize| -> usize {
            // map a compound kept-index to the flat index with traced slot 0
            let mut flat = 0usize;
            for (k, &d) in keep.iter().enumerate().rev() {
                flat += (idx % d) * keep_strides[k];
                idx /= d;
            }
            flat
        };
        let mut out = Self::zeros(dout, dout);
        for i in 0..dout {
            let base_i = expand(i);
            for j in 0..dout {
                let base_j = expand(j);
                let mut acc = Complex64::new(0.0, 0.0);
                for t in 0..dt {
                    acc += self.get(base_i + t * strides[traced], base_j + t * strides[traced]);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    fn check_same_shape(&self, other: &Self) -> Result<(), NumError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(NumError::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        Ok(())
    }
}

/// JSON wire form: `{"rows": n, "cols": m, "re": [[...]], "im": [[...]]}`.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let re = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).re).collect())
            .collect();
        let im = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).im).collect())
            .collect();
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            re,
            im,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = MatrixJson::deserialize(de)?;
        if raw.re.len() != raw.rows || raw.im.len() != raw.rows {
            return Err(D::Error::custom("matrix row count mismatch"));
        }
        let mut m = ComplexMatrix::zeros(raw.rows, raw.cols);
        for i in 0..raw.rows {
            if raw.re[i].len() != raw.cols || raw.im[i].len() != raw.cols {
                return Err(D::Error::custom("matrix column count mismatch"));
            }
            for j in 0..raw.cols {
                let z = Complex64::new(raw.re[i][j], raw.im[i][j]);
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(D::Error::custom("non-finite matrix entry"));
                }
                m.set(i, j, z);
            }
        }
        Ok(m)
    }
}
