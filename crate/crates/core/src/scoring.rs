//! Embedding representations and similarity kernels.
//!
//! A document (or query) is either a [`TokenMatrix`] — one embedding row
//! per token, the multi-vector representation scored with MaxSim — or a
//! [`PooledVector`] — a single unit vector produced by a pooling
//! strategy. [`BinaryMatrix`] is the 1-bit sign-quantized form of a
//! token matrix, scored by Hamming similarity.
//!
//! All arithmetic is `f64`; storage precision is a separate concern
//! handled by the index layer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when checking unit-norm invariants.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// Similarity function applied to embedding pairs.
///
/// On unit-normalized inputs the two variants agree; `Dot` is the
/// default because every embedding this crate produces is normalized at
/// creation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityKind {
    #[default]
    Dot,
    Cosine,
}

/// Pooling strategy that collapsed a token matrix into one vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolingKind {
    Mean,
    LastToken,
}

/// Per-token embedding matrix: `rows` tokens by `dim` dimensions,
/// row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenMatrix {
    id: String,
    rows: usize,
    dim: usize,
    values: Vec<f64>,
    normalized: bool,
}

impl TokenMatrix {
    /// Build from a flat row-major buffer. Requires at least one row,
    /// a positive dimension, and all-finite values.
    pub fn new(id: impl Into<String>, dim: usize, values: Vec<f64>) -> Result<Self> {
        let id = id.into();
        if dim == 0 {
            return Err(Error::InvalidInput(format!("token matrix `{id}`: dim must be >= 1")));
        }
        if values.is_empty() || values.len() % dim != 0 {
            return Err(Error::InvalidInput(format!(
                "token matrix `{id}`: {} values do not form whole rows of dim {dim}",
                values.len()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite(format!("token matrix `{id}`")));
        }
        let rows = values.len() / dim;
        let normalized = (0..rows).all(|i| {
            let norm = l2_norm(&values[i * dim..(i + 1) * dim]);
            (norm - 1.0).abs() <= NORM_TOLERANCE
        });
        Ok(Self { id, rows, dim, values, normalized })
    }

    /// Build from a list of rows.
    pub fn from_rows(id: impl Into<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let id = id.into();
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidInput(format!("token matrix `{id}`: ragged rows")));
        }
        Self::new(id, dim, rows.into_iter().flatten().collect())
    }

    /// Rescale every row to unit Euclidean norm.
    pub fn normalize(mut self) -> Result<Self> {
        for i in 0..self.rows {
            let row = &mut self.values[i * self.dim..(i + 1) * self.dim];
            let norm = l2_norm(row);
            if norm == 0.0 {
                return Err(Error::ZeroNorm(format!("row {i} of token matrix `{}`", self.id)));
            }
            for v in row.iter_mut() {
                *v /= norm;
            }
        }
        self.normalized = true;
        Ok(self)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// True when every row was within [`NORM_TOLERANCE`] of unit norm at
    /// construction (or the matrix has been normalized since).
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter_rows().map(<[f64]>::to_vec).collect()
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }
}

/// Single-vector representation, unit-normalized at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledVector {
    id: String,
    values: Vec<f64>,
    pooling: PoolingKind,
}

impl PooledVector {
    /// Normalizes `values` to unit norm; a zero vector is an error.
    pub fn new(id: impl Into<String>, mut values: Vec<f64>, pooling: PoolingKind) -> Result<Self> {
        let id = id.into();
        if values.is_empty() {
            return Err(Error::EmptyInput(format!("pooled vector `{id}`")));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite(format!("pooled vector `{id}`")));
        }
        let norm = l2_norm(&values);
        if norm == 0.0 {
            return Err(Error::ZeroNorm(format!("pooled vector `{id}`")));
        }
        for v in &mut values {
            *v /= norm;
        }
        Ok(Self { id, values, pooling })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn pooling(&self) -> PoolingKind {
        self.pooling
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }
}

/// Sign-quantized token matrix: one bit per element, rows packed into
/// 64-bit words (bit `j` of a row lives in word `j / 64`, position
/// `j % 64`, LSB first). Padding bits in the last word are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    id: String,
    rows: usize,
    dim: usize,
    words: Vec<u64>,
}

impl BinaryMatrix {
    pub fn words_per_row(dim: usize) -> usize {
        dim.div_ceil(64)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bit(&self, row: usize, col: usize) -> bool {
        let w = Self::words_per_row(self.dim);
        (self.words[row * w + col / 64] >> (col % 64)) & 1 == 1
    }

    /// Packed words of one row.
    pub fn row_words(&self, row: usize) -> &[u64] {
        let w = Self::words_per_row(self.dim);
        &self.words[row * w..(row + 1) * w]
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Exact packed size: rows x ceil(dim/64) x 8 bytes.
    pub fn storage_bytes(&self) -> usize {
        self.rows * Self::words_per_row(self.dim) * 8
    }

    /// Rebuild from packed words (used by the index loader).
    pub fn from_words(id: impl Into<String>, rows: usize, dim: usize, words: Vec<u64>) -> Result<Self> {
        let id = id.into();
        if rows == 0 || dim == 0 {
            return Err(Error::InvalidInput(format!("binary matrix `{id}`: empty shape")));
        }
        if words.len() != rows * Self::words_per_row(dim) {
            return Err(Error::InvalidInput(format!(
                "binary matrix `{id}`: expected {} words, got {}",
                rows * Self::words_per_row(dim),
                words.len()
            )));
        }
        Ok(Self { id, rows, dim, words })
    }
}

fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Dot product or cosine of two equal-length vectors.
///
/// Cosine requires both vectors to have positive norm.
pub fn similarity(a: &[f64], b: &[f64], kind: SimilarityKind) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), actual: b.len() });
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    match kind {
        SimilarityKind::Dot => Ok(dot),
        SimilarityKind::Cosine => {
            let na = l2_norm(a);
            let nb = l2_norm(b);
            if na == 0.0 || nb == 0.0 {
                return Err(Error::ZeroNorm("cosine similarity input".into()));
            }
            Ok(dot / (na * nb))
        }
    }
}

/// MaxSim kernel over flat row-major buffers (shared by the public API
/// and the index scorer).
pub(crate) fn maxsim_flat(
    query: &[f64],
    doc: &[f64],
    dim: usize,
    kind: SimilarityKind,
) -> Result<f64> {
    let mut total = 0.0;
    for q in query.chunks_exact(dim) {
        let mut best = f64::NEG_INFINITY;
        for d in doc.chunks_exact(dim) {
            let s = similarity(q, d, kind)?;
            if s > best {
                best = s;
            }
        }
        total += best;
    }
    Ok(total)
}

/// Late-interaction relevance: for each query token take the maximum
/// similarity over document tokens, then sum across query tokens.
///
/// For unit-normalized inputs the score lies in `[-rows, rows]` where
/// `rows` is the query token count.
pub fn maxsim_score(query: &TokenMatrix, doc: &TokenMatrix, kind: SimilarityKind) -> Result<f64> {
    if query.dim != doc.dim {
        return Err(Error::DimensionMismatch { expected: query.dim, actual: doc.dim });
    }
    maxsim_flat(&query.values, &doc.values, query.dim, kind)
}

/// Column-wise mean of all rows, normalized to unit norm.
pub fn mean_pool(m: &TokenMatrix) -> Result<PooledVector> {
    let mut acc = vec![0.0; m.dim];
    for row in m.iter_rows() {
        for (a, v) in acc.iter_mut().zip(row) {
            *a += v;
        }
    }
    let rows = m.rows as f64;
    for a in &mut acc {
        *a /= rows;
    }
    PooledVector::new(m.id.clone(), acc, PoolingKind::Mean)
}

/// Last row, normalized to unit norm.
pub fn last_token_pool(m: &TokenMatrix) -> Result<PooledVector> {
    PooledVector::new(m.id.clone(), m.row(m.rows - 1).to_vec(), PoolingKind::LastToken)
}

/// Reduce the token count by pooling consecutive groups of `factor`
/// rows into their normalized mean; a final partial group is pooled the
/// same way. Output rows = ceil(rows / factor).
pub fn late_pool(m: &TokenMatrix, factor: usize) -> Result<TokenMatrix> {
    if factor == 0 {
        return Err(Error::InvalidInput("late_pool factor must be >= 1".into()));
    }
    let mut out = Vec::with_capacity(m.rows.div_ceil(factor) * m.dim);
    for (g, group) in m.values.chunks(factor * m.dim).enumerate() {
        let group_rows = (group.len() / m.dim) as f64;
        let mut acc = vec![0.0; m.dim];
        for row in group.chunks_exact(m.dim) {
            for (a, v) in acc.iter_mut().zip(row) {
                *a += v;
            }
        }
        for a in &mut acc {
            *a /= group_rows;
        }
        let norm = l2_norm(&acc);
        if norm == 0.0 {
            return Err(Error::ZeroNorm(format!("group {g} mean in late_pool of `{}`", m.id)));
        }
        for a in &mut acc {
            *a /= norm;
        }
        out.extend_from_slice(&acc);
    }
    TokenMatrix::new(m.id.clone(), m.dim, out)
}

/// Dense projection applied row-wise, `in_dim -> out_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMatrix {
    in_dim: usize,
    out_dim: usize,
    values: Vec<f64>,
}

impl ProjectionMatrix {
    /// Row-major `in_dim x out_dim` weights.
    pub fn new(in_dim: usize, out_dim: usize, values: Vec<f64>) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::InvalidInput("projection dims must be >= 1".into()));
        }
        if values.len() != in_dim * out_dim {
            return Err(Error::InvalidInput(format!(
                "projection: expected {} weights, got {}",
                in_dim * out_dim,
                values.len()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("projection weights".into()));
        }
        Ok(Self { in_dim, out_dim, values })
    }

    pub fn identity(dim: usize) -> Self {
        let mut values = vec![0.0; dim * dim];
        for i in 0..dim {
            values[i * dim + i] = 1.0;
        }
        Self { in_dim: dim, out_dim: dim, values }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Project a single vector: `y = x W`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.in_dim {
            return Err(Error::DimensionMismatch { expected: self.in_dim, actual: x.len() });
        }
        let mut y = vec![0.0; self.out_dim];
        for (i, &xi) in x.iter().enumerate() {
            let w = &self.values[i * self.out_dim..(i + 1) * self.out_dim];
            for (yj, wj) in y.iter_mut().zip(w) {
                *yj += xi * wj;
            }
        }
        Ok(y)
    }
}

/// Right-multiply each row by `w` and renormalize: the dimension
/// reduction used to shrink multi-vector storage (e.g. 3072 -> 512).
pub fn project(m: &TokenMatrix, w: &ProjectionMatrix) -> Result<TokenMatrix> {
    if m.dim != w.in_dim {
        return Err(Error::DimensionMismatch { expected: w.in_dim, actual: m.dim });
    }
    let mut out = Vec::with_capacity(m.rows * w.out_dim);
    for (i, row) in m.iter_rows().enumerate() {
        let y = w.apply(row)?;
        let norm = l2_norm(&y);
        if norm == 0.0 {
            return Err(Error::ZeroNorm(format!("projected row {i} of `{}`", m.id)));
        }
        out.extend(y.into_iter().map(|v| v / norm));
    }
    TokenMatrix::new(m.id.clone(), w.out_dim, out)
}

/// Sign quantization: bit (i, j) is 1 iff value (i, j) >= 0.
pub fn binary_quantize(m: &TokenMatrix) -> BinaryMatrix {
    let wpr = BinaryMatrix::words_per_row(m.dim);
    let mut words = vec![0u64; m.rows * wpr];
    for (i, row) in m.iter_rows().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v >= 0.0 {
                words[i * wpr + j / 64] |= 1u64 << (j % 64);
            }
        }
    }
    BinaryMatrix { id: m.id.clone(), rows: m.rows, dim: m.dim, words }
}

/// Quantize a single row of f64 values into packed sign bits.
pub(crate) fn quantize_row_words(row: &[f64]) -> Vec<u64> {
    let mut words = vec![0u64; BinaryMatrix::words_per_row(row.len())];
    for (j, &v) in row.iter().enumerate() {
        if v >= 0.0 {
            words[j / 64] |= 1u64 << (j % 64);
        }
    }
    words
}

/// Normalized Hamming agreement between two packed bit rows of width
/// `dim`: `(dim - hamming_distance) / dim`, in [0, 1].
pub fn hamming_similarity_words(a: &[u64], b: &[u64], dim: usize) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), actual: b.len() });
    }
    let differing: u32 = a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones()).sum();
    Ok((dim as f64 - f64::from(differing)) / dim as f64)
}

/// [`hamming_similarity_words`] addressed by matrix rows.
pub fn hamming_similarity(a: &BinaryMatrix, a_row: usize, b: &BinaryMatrix, b_row: usize) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { expected: a.dim, actual: b.dim });
    }
    hamming_similarity_words(a.row_words(a_row), b.row_words(b_row), a.dim)
}

/// MaxSim over sign bits: sum over query rows of the best Hamming
/// similarity against any document row.
pub fn binary_maxsim(query: &BinaryMatrix, doc: &BinaryMatrix) -> Result<f64> {
    if query.dim != doc.dim {
        return Err(Error::DimensionMismatch { expected: query.dim, actual: doc.dim });
    }
    let mut total = 0.0;
    for qi in 0..query.rows {
        let qw = query.row_words(qi);
        let mut best = f64::NEG_INFINITY;
        for dj in 0..doc.rows {
            let s = hamming_similarity_words(qw, doc.row_words(dj), query.dim)?;
            if s > best {
                best = s;
            }
        }
        total += best;
    }
    Ok(total)
}
