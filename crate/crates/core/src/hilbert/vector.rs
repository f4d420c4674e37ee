use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{is_finite_vec, CVector, C64};
use crate::error::{invalid, Result};

/// A finite vector of `ℂ^N` with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct HVector(CVector);

impl HVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        Self::from_vector(CVector::from_vec(entries))
    }

    pub fn from_vector(v: CVector) -> Result<Self> {
        if v.is_empty() {
            return invalid("vector must have positive dimension");
        }
        if !is_finite_vec(&v) {
            return invalid("vector has non-finite entries");
        }
        Ok(HVector(v))
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        HVector(CVector::zeros(dim.max(1)))
    }

    /// Canonical basis vector `e_k`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return invalid(format!("basis index {k} outside dimension {dim}"));
        }
        Ok(HVector(super::basis_vector(dim, k)))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn as_vector(&self) -> &CVector {
        &self.0
    }

    pub fn into_inner(self) -> CVector {
        self.0
    }

    pub fn entries(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn scaled(&self, s: C64) -> Self {
        HVector(&self.0 * s)
    }
}

impl AsRef<CVector> for HVector {
    fn as_ref(&self) -> &CVector {
        &self.0
    }
}

impl Serialize for HVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for HVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<C64>::deserialize(d)?;
        HVector::new(entries).map_err(serde::de::Error::custom)
    }
}
