use serde::{Deserialize, Serialize};

use super::Provenance;
use crate::error::{invalid, Result};
use crate::hilbert::{DenseOperator, HVector};

/// Tail slopes below this count as "flat".
pub const FLAT_SLOPE: f64 = 0.1;
/// Tail slopes above this count as "growing".
pub const GROWING_SLOPE: f64 = 0.5;
/// Decay exponents `p̂` of `‖Aⁿg‖^{−1/n} ~ n^{−p̂}` at or below this read as a
/// divergent series.
pub const QA_DIVERGING_MAX: f64 = 1.1;
/// Decay exponents at or above this read as a convergent series.
pub const QA_CONVERGING_MIN: f64 = 1.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassVerdict {
    Yes,
    No,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QaVerdict {
    Diverging,
    Converging,
    Inconclusive,
}

/// A fitted growth constant with the tail statistic behind the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassFit {
    pub verdict: ClassVerdict,
    pub constant: f64,
    /// Least-squares slope of `log(root_n)` against `log n` over the last
    /// half of the sequence.
    pub tail_slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorClassReport {
    /// `‖Aⁿg‖` for `n = 0, 1, …`, cut at the first zero or overflow.
    pub norms: Vec<f64>,
    /// `B_g = max ‖Aⁿg‖^{1/n}`.
    pub bounded: ClassFit,
    /// `C_g = max (‖Aⁿg‖/n!)^{1/n}`.
    pub analytic: ClassFit,
    /// Entry `m − 1` is `Σ_{n=1}^{m} ‖Aⁿg‖^{−1/n}`.
    pub qa_partial_sums: Vec<f64>,
    pub qa_verdict: QaVerdict,
    /// Decay exponent `p̂` of the series terms.
    pub qa_exponent: f64,
    /// First `n` with `‖Aⁿg‖ = 0`; every class holds trivially.
    pub terminated_at_zero: Option<usize>,
    /// First `n` at which `‖Aⁿg‖` overflowed.
    pub overflow_at: Option<usize>,
    pub provenance: Option<Provenance>,
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx > 0.0 {
        sxy / sxx
    } else {
        0.0
    }
}

/// `log ‖Aⁿg‖` for `n ≥ 0`, `−∞` marking zero norms. The entries must not
/// contain NaN or `+∞`.
pub fn classify_log_norms(log_norms: &[f64]) -> Result<VectorClassReport> {
    if log_norms.len() < 2 {
        return invalid("vector classification needs at least n = 0 and n = 1");
    }
    if log_norms.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
        return invalid("log norms must not be NaN or +inf");
    }
    let zero_at = log_norms.iter().position(|&v| v == f64::NEG_INFINITY || v < f64::MIN_POSITIVE.ln());
    let overflow_at = log_norms.iter().position(|&v| v >= f64::MAX.ln());
    let cut = [zero_at, overflow_at].into_iter().flatten().min().unwrap_or(log_norms.len());
    let logs = &log_norms[..cut];
    let norms: Vec<f64> = logs.iter().map(|v| v.exp()).collect();

    let mut log_fact = 0.0;
    let (mut ns, mut root_b, mut root_c) = (Vec::new(), Vec::new(), Vec::new());
    for (n, &l) in logs.iter().enumerate().skip(1) {
        log_fact += (n as f64).ln();
        ns.push(n as f64);
        root_b.push(l / n as f64);
        root_c.push((l - log_fact) / n as f64);
    }
    let b_const = root_b.iter().copied().fold(0.0_f64, |m, v| m.max(v.exp()));
    let c_const = root_c.iter().copied().fold(0.0_f64, |m, v| m.max(v.exp()));

    let mut partial = Vec::with_capacity(root_b.len());
    let mut acc = 0.0_f64;
    for lr in &root_b {
        acc = (acc + (-lr).exp()).min(f64::MAX);
        partial.push(acc);
    }

    let tail = ns.len() / 2;
    let slope_of = |ys: &[f64]| {
        let xs: Vec<f64> = ns[tail..].iter().map(|n| n.ln()).collect();
        ls_slope(&xs, &ys[tail..])
    };
    let enough = ns.len() - tail >= 2;
    let (b_slope, c_slope) = if enough { (slope_of(&root_b), slope_of(&root_c)) } else { (0.0, 0.0) };

    let terminated = zero_at.is_some_and(|z| overflow_at.is_none_or(|o| z < o));
    let grade_slope = |s: f64| {
        if terminated {
            ClassVerdict::Yes
        } else if !enough {
            ClassVerdict::Inconclusive
        } else if s < FLAT_SLOPE {
            ClassVerdict::Yes
        } else if s > GROWING_SLOPE {
            ClassVerdict::No
        } else {
            ClassVerdict::Inconclusive
        }
    };
    let qa = if terminated {
        QaVerdict::Diverging
    } else if !enough {
        QaVerdict::Inconclusive
    } else if b_slope <= QA_DIVERGING_MAX {
        QaVerdict::Diverging
    } else if b_slope >= QA_CONVERGING_MIN {
        QaVerdict::Converging
    } else {
        QaVerdict::Inconclusive
    };

    Ok(VectorClassReport {
        norms,
        bounded: ClassFit { verdict: grade_slope(b_slope), constant: b_const, tail_slope: b_slope },
        analytic: ClassFit { verdict: grade_slope(c_slope), constant: c_const, tail_slope: c_slope },
        qa_partial_sums: partial,
        qa_verdict: qa,
        qa_exponent: b_slope,
        terminated_at_zero: if terminated { zero_at } else { None },
        overflow_at: overflow_at.filter(|&o| zero_at.is_none_or(|z| o < z)),
        provenance: None,
    })
}

/// As [`classify_log_norms`] for plain norms `‖Aⁿg‖`.
pub fn classify_norm_sequence(norms: &[f64]) -> Result<VectorClassReport> {
    if norms.iter().any(|v| v.is_nan() || *v < 0.0) {
        return invalid("norms must be nonnegative numbers");
    }
    let logs: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let first_inf = logs.iter().position(|v| *v == f64::INFINITY).unwrap_or(logs.len());
    let mut rep = classify_log_norms(&logs[..first_inf.max(2).min(logs.len())])?;
    if first_inf < logs.len() && rep.overflow_at.is_none() && rep.terminated_at_zero.is_none() {
        rep.overflow_at = Some(first_inf);
    }
    Ok(rep)
}

/// Growth class of `g` under `A` from `‖Aⁿg‖`, `n = 0..=n_max`, computed by
/// renormalized powers so that intermediate vectors never overflow.
pub fn vector_class(a: &DenseOperator, g: &HVector, n_max: usize) -> Result<VectorClassReport> {
    a.check_vector(g)?;
    if n_max < 4 {
        return invalid("vector classification needs n_max >= 4");
    }
    let g_norm = g.norm();
    let mut logs = vec![g_norm.ln()];
    if g_norm > 0.0 {
        let mut v = g.as_vector().unscale(g_norm);
        for _ in 1..=n_max {
            let w = a.apply(&v);
            let nrm = w.norm();
            let last = *logs.last().expect("nonempty");
            if nrm == 0.0 {
                logs.push(f64::NEG_INFINITY);
                break;
            }
            logs.push(last + nrm.ln());
            v = w.unscale(nrm);
        }
    } else {
        logs.push(f64::NEG_INFINITY);
    }
    let mut rep = classify_log_norms(&logs)?;
    rep.provenance = Some(Provenance::of(a, g));
    Ok(rep)
}
