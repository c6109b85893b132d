//! Multi-vector and pooled embedding types.
//!
//! A [`MultiVector`] is one document's or query's bag of embedding vectors:
//! one row per token or image patch, `dim` columns. Rows are stored row-major
//! in a flat buffer. Values are kept in binary32 in memory; the [`Dtype`] tag
//! records the storage precision, and constructing a binary16 multi-vector
//! quantizes the rows so that the in-memory values are exactly the values a
//! binary16 index file would hold.

use half::f16;

use crate::error::{Error, Result};

/// Storage precision of an embedding payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dtype {
    /// IEEE 754 binary32.
    F32,
    /// IEEE 754 binary16.
    F16,
}

impl Dtype {
    /// Bytes per stored value.
    pub fn size_bytes(self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::F16 => 2,
        }
    }

    /// On-disk dtype code.
    pub fn code(self) -> u8 {
        match self {
            Dtype::F32 => 0,
            Dtype::F16 => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Dtype::F32),
            1 => Some(Dtype::F16),
            _ => None,
        }
    }
}

impl std::fmt::Display for Dtype {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dtype::F32 => write!(f, "f32"),
            Dtype::F16 => write!(f, "f16"),
        }
    }
}

/// Round a binary32 value to the nearest binary16 and back.
///
/// Round-to-nearest-even, matching what a binary16 file payload preserves.
pub fn quantize_f16(v: f32) -> f32 {
    f16::from_f32(v).to_f32()
}

/// A bag of `n` embedding vectors of uniform dimension, with an identifier.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiVector {
    id: String,
    data: Vec<f32>,
    dim: usize,
    dtype: Dtype,
}

impl MultiVector {
    /// Build from a flat row-major buffer of `n * dim` values.
    ///
    /// Rejects empty data, zero dimension, ragged buffers, and non-finite
    /// values. With [`Dtype::F16`] the values are quantized to binary16
    /// precision so round-tripping through an index file is the identity.
    pub fn new(id: impl Into<String>, data: Vec<f32>, dim: usize, dtype: Dtype) -> Result<Self> {
        let id = id.into();
        if data.is_empty() || dim == 0 {
            return Err(Error::EmptyVectors { id });
        }
        if data.len() % dim != 0 {
            return Err(Error::InvalidArgument {
                what: "data",
                reason: format!("{} values do not divide into rows of {dim}", data.len()),
            });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { id, index });
        }
        let mut data = data;
        if dtype == Dtype::F16 {
            for v in &mut data {
                *v = quantize_f16(*v);
            }
        }
        Ok(MultiVector {
            id,
            data,
            dim,
            dtype,
        })
    }

    /// Build a binary32 multi-vector from explicit rows.
    pub fn from_rows(id: impl Into<String>, rows: &[Vec<f32>]) -> Result<Self> {
        let id = id.into();
        let dim = rows.first().map_or(0, Vec::len);
        for row in rows {
            if row.len() != dim {
                return Err(Error::InvalidArgument {
                    what: "rows",
                    reason: format!("ragged rows: {} vs {dim}", row.len()),
                });
            }
        }
        let data: Vec<f32> = rows.iter().flatten().copied().collect();
        MultiVector::new(id, data, dim, Dtype::F32)
    }

    /// Re-tag (and if needed quantize) to another storage precision.
    pub fn with_dtype(&self, dtype: Dtype) -> MultiVector {
        let mut data = self.data.clone();
        if dtype == Dtype::F16 && self.dtype == Dtype::F32 {
            for v in &mut data {
                *v = quantize_f16(*v);
            }
        }
        MultiVector {
            id: self.id.clone(),
            data,
            dim: self.dim,
            dtype,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of vector rows (tokens or patches).
    pub fn n_vectors(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn dtype(&self) -> Dtype {
        self.dtype
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f32]> {
        self.data.chunks_exact(self.dim)
    }

    /// Flat row-major view of all values.
    pub fn data(&self) -> &[f32] {
        &self.data
    }
}

/// A single dense vector with an identifier (bi-encoder representation).
#[derive(Debug, Clone, PartialEq)]
pub struct PooledVector {
    id: String,
    vector: Vec<f32>,
}

impl PooledVector {
    pub fn new(id: impl Into<String>, vector: Vec<f32>) -> Result<Self> {
        let id = id.into();
        if vector.is_empty() {
            return Err(Error::EmptyVectors { id });
        }
        if let Some(index) = vector.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { id, index });
        }
        Ok(PooledVector { id, vector })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn vector(&self) -> &[f32] {
        &self.vector
    }
}

/// One ranked retrieval result.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredDoc {
    pub doc_id: String,
    pub score: f32,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty() {
        assert!(matches!(
            MultiVector::from_rows("x", &[]),
            Err(Error::EmptyVectors { .. })
        ));
        assert!(matches!(
            MultiVector::new("x", vec![], 4, Dtype::F32),
            Err(Error::EmptyVectors { .. })
        ));
    }

    #[test]
    fn rejects_non_finite() {
        let err = MultiVector::new("x", vec![1.0, f32::NAN], 2, Dtype::F32).unwrap_err();
        assert!(matches!(err, Error::NonFinite { index: 1, .. }));
        let err = MultiVector::new("x", vec![f32::INFINITY, 0.0], 2, Dtype::F32).unwrap_err();
        assert!(matches!(err, Error::NonFinite { index: 0, .. }));
    }

    #[test]
    fn rejects_ragged() {
        assert!(MultiVector::new("x", vec![1.0, 2.0, 3.0], 2, Dtype::F32).is_err());
        assert!(MultiVector::from_rows("x", &[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn row_access() {
        let mv = MultiVector::from_rows("d", &[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(mv.n_vectors(), 2);
        assert_eq!(mv.dim(), 2);
        assert_eq!(mv.row(1), &[3.0, 4.0]);
        assert_eq!(mv.rows().count(), 2);
    }

    #[test]
    fn f16_construction_quantizes() {
        // 0.1 is not exactly representable in binary16.
        let mv = MultiVector::new("d", vec![0.1, 1.0], 2, Dtype::F16).unwrap();
        assert_eq!(mv.row(0)[0], quantize_f16(0.1));
        assert_ne!(mv.row(0)[0], 0.1f32);
        assert_eq!(mv.row(0)[1], 1.0); // exactly representable
    }

    #[test]
    fn with_dtype_round_trip_is_stable() {
        let mv = MultiVector::new("d", vec![0.3, -2.5, 0.007], 3, Dtype::F32).unwrap();
        let q = mv.with_dtype(Dtype::F16);
        // A second quantization pass changes nothing.
        assert_eq!(q.with_dtype(Dtype::F16).data(), q.data());
        assert_eq!(q.with_dtype(Dtype::F32).data(), q.data());
    }

    #[test]
    fn pooled_rejects_non_finite() {
        assert!(PooledVector::new("p", vec![f32::NAN]).is_err());
        assert!(PooledVector::new("p", vec![]).is_err());
    }

    #[test]
    fn dtype_codes() {
        assert_eq!(Dtype::from_code(0), Some(Dtype::F32));
        assert_eq!(Dtype::from_code(1), Some(Dtype::F16));
        assert_eq!(Dtype::from_code(7), None);
        assert_eq!(Dtype::F16.size_bytes(), 2);
        assert_eq!(Dtype::F32.size_bytes(), 4);
    }
}
