use serde::{Deserialize, Serialize};

use super::EmbedError;

/// Total embedding dimensionality.
pub const EMBEDDING_DIM: usize = 768;

/// A 768-dimensional embedding; unit L2 norm unless all-zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn zeros() -> Self {
        Self(vec![0.0; EMBEDDING_DIM])
    }

    /// Wraps raw components without normalizing.
    pub fn from_raw(values: Vec<f64>) -> Result<Self, EmbedError> {
        if values.len() != EMBEDDING_DIM {
            return Err(EmbedError::Dimension {
                expected: EMBEDDING_DIM,
                got: values.len(),
            });
        }
        Ok(Self(values))
    }

    /// Scales to unit norm; the zero vector stays zero.
    pub fn normalized(values: Vec<f64>) -> Result<Self, EmbedError> {
        let mut v = Self::from_raw(values)?;
        let norm = v.norm();
        if norm > 0.0 {
            for x in &mut v.0 {
                *x /= norm;
            }
        }
        Ok(v)
    }

    pub fn from_f32(values: &[f32]) -> Result<Self, EmbedError> {
        Self::normalized(values.iter().map(|x| f64::from(*x)).collect())
    }

    pub fn to_f32(&self) -> Vec<f32> {
        self.0.iter().map(|x| *x as f32).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| *x == 0.0)
    }
}

/// Cosine similarity of two equal-length slices; 0 when either is zero.
pub fn cosine_slices(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0)
}

pub fn cosine(a: &EmbeddingVector, b: &EmbeddingVector) -> f64 {
    cosine_slices(a.as_slice(), b.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_hot(i: usize) -> EmbeddingVector {
        let mut v = vec![0.0; EMBEDDING_DIM];
        v[i] = 1.0;
        EmbeddingVector::from_raw(v).unwrap()
    }

    #[test]
    fn cosine_conventions() {
        let v = EmbeddingVector::normalized((0..EMBEDDING_DIM).map(|i| i as f64).collect()).unwrap();
        assert!((cosine(&v, &v) - 1.0).abs() < 1e-12);
        assert_eq!(cosine(&v, &EmbeddingVector::zeros()), 0.0);
        assert_eq!(cosine(&one_hot(3), &one_hot(9)), 0.0);
    }

    #[test]
    fn wrong_dimension_rejected() {
        assert!(matches!(
            EmbeddingVector::from_raw(vec![1.0; 3]),
            Err(EmbedError::Dimension { got: 3, .. })
        ));
    }
}
