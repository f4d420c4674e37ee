use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::hilbert::{CMatrix, DenseOperator, C64};

/// How the shift treats the right edge of the window.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftFill {
    /// `e_N ↦ 0`; the truncation is nilpotent.
    #[default]
    ZeroFill,
    /// `e_N ↦ e_{−N}`; the truncation is a unitary permutation.
    Cyclic,
}

/// Right shift `e_n ↦ e_{n+1}` on the window of sites `−N..=N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftSpec {
    pub radius: usize,
    #[serde(default)]
    pub fill: ShiftFill,
}

impl ShiftSpec {
    pub fn new(radius: usize, fill: ShiftFill) -> Self {
        ShiftSpec { radius, fill }
    }

    pub fn dim(&self) -> usize {
        2 * self.radius + 1
    }

    /// Storage position of site `n`.
    pub fn position(&self, site: i64) -> Result<usize> {
        let r = self.radius as i64;
        if site < -r || site > r {
            return invalid(format!("site {site} outside window [-{r}, {r}]"));
        }
        Ok((site + r) as usize)
    }

    pub fn site(&self, position: usize) -> i64 {
        position as i64 - self.radius as i64
    }
}

pub fn build_shift(spec: ShiftSpec) -> Result<DenseOperator> {
    if spec.radius == 0 {
        return invalid("shift window radius must be at least 1");
    }
    let k = spec.dim();
    let mut m = CMatrix::zeros(k, k);
    for p in 0..k - 1 {
        m[(p + 1, p)] = C64::new(1.0, 0.0);
    }
    if spec.fill == ShiftFill::Cyclic {
        m[(0, k - 1)] = C64::new(1.0, 0.0);
    }
    DenseOperator::detect(m)
}
