//! MVEC on-disk format, versions 1 (uncompressed) and 2 (centroid-compressed).
//!
//! All integers are little-endian; vector payloads are IEEE 754 binary16 or
//! binary32 little-endian, row-major. Serialization is canonical: identical
//! input produces byte-identical files on every platform (metadata is JSON
//! with sorted keys).
//!
//! Version 1 layout:
//!
//! ```text
//! magic      4 bytes  "MVEC"
//! version    u32      = 1
//! dtype      u8       0 = binary32, 1 = binary16
//! dim        u32
//! doc_count  u64
//! meta_len   u32      followed by UTF-8 JSON object (string -> string)
//! per document:
//!   id_len     u16    followed by UTF-8 id
//!   n_vectors  u32
//!   payload    n_vectors * dim values
//! ```
//!
//! Version 2 replaces the dtype byte with a residual flag (0 = none,
//! 1 = binary16) and stores a centroid block (`k: u32`, then `k * dim`
//! binary32 values) between the metadata and the documents; each document
//! carries one u32 centroid assignment per row, then its binary16 residual
//! payload when the flag is set.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use half::f16;

use crate::error::{Error, Result};
use crate::index::compress::{CompressedDoc, CompressedIndex, ResidualDtype};
use crate::index::CorpusIndex;
use crate::multivector::{Dtype, MultiVector};

const MAGIC: [u8; 4] = *b"MVEC";
/// magic + version + dtype/residual flag + dim + doc_count + meta_len.
pub(crate) const HEADER_LEN: usize = 4 + 4 + 1 + 4 + 8 + 4;

// ---------------------------------------------------------------------------
// Writing
// ---------------------------------------------------------------------------

fn push_meta(out: &mut Vec<u8>, meta: &BTreeMap<String, String>) {
    let blob = serde_json::to_vec(meta).expect("string map serializes");
    out.extend_from_slice(&(blob.len() as u32).to_le_bytes());
    out.extend_from_slice(&blob);
}

fn push_id(out: &mut Vec<u8>, id: &str) -> Result<()> {
    let len = u16::try_from(id.len()).map_err(|_| Error::InvalidArgument {
        what: "doc id",
        reason: format!("id '{}...' exceeds {} bytes", &id[..32.min(id.len())], u16::MAX),
    })?;
    out.extend_from_slice(&len.to_le_bytes());
    out.extend_from_slice(id.as_bytes());
    Ok(())
}

fn push_values(out: &mut Vec<u8>, values: &[f32], dtype: Dtype) {
    match dtype {
        Dtype::F32 => {
            for v in values {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Dtype::F16 => {
            for v in values {
                out.extend_from_slice(&f16::from_f32(*v).to_bits().to_le_bytes());
            }
        }
    }
}

/// Serialize an index to canonical MVEC v1 bytes.
pub fn index_to_bytes(index: &CorpusIndex) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(HEADER_LEN);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&1u32.to_le_bytes());
    out.push(index.dtype().code());
    out.extend_from_slice(&(index.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(index.len() as u64).to_le_bytes());
    push_meta(&mut out, index.meta());
    for doc in index.docs() {
        push_id(&mut out, doc.id())?;
        out.extend_from_slice(&(doc.n_vectors() as u32).to_le_bytes());
        push_values(&mut out, doc.data(), index.dtype());
    }
    Ok(out)
}

/// Write an index as MVEC v1.
pub fn write_index(index: &CorpusIndex, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = index_to_bytes(index)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Serialize a compressed index to canonical MVEC v2 bytes.
pub fn compressed_index_to_bytes(index: &CompressedIndex) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(HEADER_LEN);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&2u32.to_le_bytes());
    out.push(match index.residual_dtype() {
        ResidualDtype::None => 0,
        ResidualDtype::F16 => 1,
    });
    out.extend_from_slice(&(index.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(index.docs().len() as u64).to_le_bytes());
    push_meta(&mut out, index.meta());
    out.extend_from_slice(&(index.k() as u32).to_le_bytes());
    push_values(&mut out, index.centroids(), Dtype::F32);
    for doc in index.docs() {
        push_id(&mut out, &doc.id)?;
        out.extend_from_slice(&(doc.assignments.len() as u32).to_le_bytes());
        for a in &doc.assignments {
            out.extend_from_slice(&a.to_le_bytes());
        }
        if let Some(res) = doc.residuals() {
            push_values(&mut out, res, Dtype::F16);
        }
    }
    Ok(out)
}

/// Write a compressed index as MVEC v2.
pub fn write_compressed_index(index: &CompressedIndex, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = compressed_index_to_bytes(index)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------------------
// Reading
// ---------------------------------------------------------------------------

/// Byte-slice reader that reports the offset of every failure.
struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Reader { bytes, pos: 0 }
    }

    fn offset(&self) -> u64 {
        self.pos as u64
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::Truncated {
                offset: self.pos as u64,
                needed: n as u64,
            });
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(Error::TrailingData {
                offset: self.pos as u64,
            });
        }
        Ok(())
    }

    fn magic_and_version(&mut self) -> Result<u32> {
        let offset = self.offset();
        let magic: [u8; 4] = self.take(4)?.try_into().unwrap();
        if magic != MAGIC {
            return Err(Error::BadMagic {
                found: magic,
                offset,
            });
        }
        self.u32()
    }

    fn meta(&mut self) -> Result<BTreeMap<String, String>> {
        let len = self.u32()? as usize;
        let offset = self.offset();
        let blob = self.take(len)?;
        serde_json::from_slice(blob).map_err(|e| Error::BadMetadata {
            offset,
            reason: e.to_string(),
        })
    }

    fn id(&mut self) -> Result<String> {
        let len = self.u16()? as usize;
        let offset = self.offset();
        let raw = self.take(len)?;
        String::from_utf8(raw.to_vec()).map_err(|_| Error::BadUtf8 { offset })
    }

    /// Decode `count` values, rejecting NaN and infinity.
    fn values(&mut self, count: usize, dtype: Dtype, doc_id: &str) -> Result<Vec<f32>> {
        let raw = self.take(count * dtype.size_bytes())?;
        let mut out = Vec::with_capacity(count);
        let base = self.offset() - raw.len() as u64;
        match dtype {
            Dtype::F32 => {
                for (i, chunk) in raw.chunks_exact(4).enumerate() {
                    let v = f32::from_le_bytes(chunk.try_into().unwrap());
                    if !v.is_finite() {
                        return Err(Error::NonFinitePayload {
                            doc_id: doc_id.to_string(),
                            offset: base + i as u64 * 4,
                        });
                    }
                    out.push(v);
                }
            }
            Dtype::F16 => {
                for (i, chunk) in raw.chunks_exact(2).enumerate() {
                    let h = f16::from_bits(u16::from_le_bytes(chunk.try_into().unwrap()));
                    if !h.is_finite() {
                        return Err(Error::NonFinitePayload {
                            doc_id: doc_id.to_string(),
                            offset: base + i as u64 * 2,
                        });
                    }
                    out.push(h.to_f32());
                }
            }
        }
        Ok(out)
    }
}

/// Parse MVEC v1 bytes. Exact inverse of [`index_to_bytes`]: binary16
/// payloads round-trip bit-exactly.
pub fn index_from_bytes(bytes: &[u8]) -> Result<CorpusIndex> {
    let mut r = Reader::new(bytes);
    let version = r.magic_and_version()?;
    if version != 1 {
        return Err(Error::UnsupportedVersion { version, offset: 4 });
    }
    let dtype_offset = r.offset();
    let code = r.u8()?;
    let dtype = Dtype::from_code(code).ok_or(Error::UnknownDtype {
        code,
        offset: dtype_offset,
    })?;
    let dim = r.u32()? as usize;
    let doc_count = r.u64()?;
    let meta = r.meta()?;

    let mut docs = Vec::with_capacity(doc_count.min(1 << 20) as usize);
    for _ in 0..doc_count {
        let id = r.id()?;
        let n_vectors = r.u32()? as usize;
        let values = r.values(n_vectors * dim, dtype, &id)?;
        docs.push(MultiVector::new(id, values, dim, dtype)?);
    }
    r.finish()?;
    CorpusIndex::new(docs, dim, dtype, meta)
}

/// Read an MVEC v1 file.
pub fn read_index(path: impl AsRef<Path>) -> Result<CorpusIndex> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    index_from_bytes(&bytes)
}

/// Parse MVEC v2 bytes.
pub fn compressed_index_from_bytes(bytes: &[u8]) -> Result<CompressedIndex> {
    let mut r = Reader::new(bytes);
    let version = r.magic_and_version()?;
    if version != 2 {
        return Err(Error::UnsupportedVersion { version, offset: 4 });
    }
    let flag_offset = r.offset();
    let residual_dtype = match r.u8()? {
        0 => ResidualDtype::None,
        1 => ResidualDtype::F16,
        code => {
            return Err(Error::UnknownDtype {
                code,
                offset: flag_offset,
            })
        }
    };
    let dim = r.u32()? as usize;
    let doc_count = r.u64()?;
    let meta = r.meta()?;
    let k = r.u32()? as usize;
    let centroids = r.values(k * dim, Dtype::F32, "<centroids>")?;

    let mut docs = Vec::with_capacity(doc_count.min(1 << 20) as usize);
    for _ in 0..doc_count {
        let id = r.id()?;
        let n_vectors = r.u32()? as usize;
        let mut assignments = Vec::with_capacity(n_vectors);
        for chunk in r.take(n_vectors * 4)?.chunks_exact(4) {
            assignments.push(u32::from_le_bytes(chunk.try_into().unwrap()));
        }
        let residuals = match residual_dtype {
            ResidualDtype::None => None,
            ResidualDtype::F16 => Some(r.values(n_vectors * dim, Dtype::F16, &id)?),
        };
        docs.push(CompressedDoc::new(id, assignments, residuals));
    }
    r.finish()?;
    CompressedIndex::new(centroids, k, dim, docs, residual_dtype, meta)
}

/// Read an MVEC v2 file.
pub fn read_compressed_index(path: impl AsRef<Path>) -> Result<CompressedIndex> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    compressed_index_from_bytes(&bytes)
}
