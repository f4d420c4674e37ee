use super::{
    approximant_trace, flag, projections, Check, Ctx, DatumSpec, ExperimentReport, LabeledTrace, LabeledVerdict,
    SequenceSpec,
};
use crate::diagnostics::{
    krylov_intersection, reducibility, verdict, DistanceEvidence, GuardStatus, Provenance, Solvability,
    SolvabilityVerdict, VerdictInputs, WindowGuard,
};
use crate::error::{invalid, LabError, Result};
use crate::gallery::{shift_szego_datum, ShiftFill, ShiftSpec, SzegoParams};
use crate::hilbert::{CVector, DenseOperator, HVector, C64};
use crate::krylov::{krylov_basis, solve_truncated, TruncationScheme};

/// Left shift `(L x)_n = x_{n+1}`, `(L x)_N = 0`: the solution of `R f = g`
/// in `ℓ²(ℤ)` restricted to the window, exact up to `|g_{−N}|`.
pub(super) fn left_shift(x: &CVector) -> CVector {
    let k = x.len();
    CVector::from_fn(k, |p, _| if p + 1 < k { x[p + 1] } else { C64::new(0.0, 0.0) })
}

/// `g` with sites outside `[−m, m]` set to zero.
fn truncate(spec: &ShiftSpec, g: &CVector, m: usize) -> CVector {
    CVector::from_fn(g.len(), |p, _| if spec.site(p).unsigned_abs() as usize <= m { g[p] } else { C64::new(0.0, 0.0) })
}

fn short(x: f64) -> String {
    format!("{x}").replace('.', "_")
}

/// Distance trace of `f` against `𝒦_n(R, g)`, cut to the prefix on which the
/// approximants `P_n f` pass the window guard.
struct GuardedTrace {
    distances: Vec<f64>,
    approximants: Vec<CVector>,
    guard: GuardStatus,
    /// Length of the guarded prefix.
    trusted: usize,
    built: usize,
}

fn guarded_trace(r: &DenseOperator, g: &HVector, f: &CVector, n_max: usize, guard: &WindowGuard, tol: f64) -> Result<GuardedTrace> {
    let basis = krylov_basis(r, g, n_max, tol)?;
    let all = projections(f, &basis);
    let full = guard.check(all.iter())?;
    let trusted = full.first_violation.unwrap_or(all.len());
    let approximants: Vec<CVector> = all.into_iter().take(trusted).collect();
    let guard_status = if trusted >= 2 { guard.check(approximants.iter())? } else { full };
    let mut best = f64::INFINITY;
    let distances = approximants
        .iter()
        .map(|x| {
            best = best.min((f - x).norm());
            best
        })
        .collect();
    Ok(GuardedTrace { distances, approximants, guard: guard_status, trusted, built: basis.len() })
}

/// Verdict on a Szegő-type problem from a guarded distance trace. The grade
/// is never reached inside the guarded range, so at most an empirical
/// statement about the trend is possible.
fn empirical_verdict(r: &DenseOperator, g: &HVector, f: &CVector, t: &GuardedTrace, ctx: &Ctx) -> Result<SolvabilityVerdict> {
    let provenance = Provenance::of(r, g);
    let inputs = VerdictInputs {
        provenance: provenance.clone(),
        a_norm: 1.0,
        grade: None,
        n_used: t.distances.len(),
        invertible: false,
        reducibility: None,
        intersection: None,
        distance: Some(DistanceEvidence {
            distances: t.distances.clone(),
            reference_norm: f.norm(),
            reference_is_unique: false,
            provenance,
        }),
        grade_residual: None,
        guard: t.guard.clone(),
        unique: None,
        minimal_norm: None,
        tolerances: ctx.verdict_tolerances(),
    };
    let mut v = verdict(&inputs)?;
    if let (Some(first), Some(last)) = (t.distances.first(), t.distances.last()) {
        v.chain.push(format!(
            "empirical: distance falls from {first:.4e} to {last:.4e} over n <= {} (window-guarded range)",
            t.distances.len()
        ));
    }
    Ok(v)
}

fn push_decrease(report: &mut ExperimentReport, label: &str, t: &GuardedTrace) {
    let ratio = match (t.distances.first(), t.distances.last()) {
        (Some(&a), Some(&b)) if a > 0.0 => b / a,
        _ => 1.0,
    };
    report.push_check(Check::at_most(format!("{label}_distance_ratio"), ratio, DECREASE_RATIO));
    report.push_check(Check::at_least(format!("{label}_guarded_n"), t.trusted as f64, 2.0));
    if t.trusted < t.built {
        report.notes.push(format!(
            "{label}: approximants leave the guarded window after n = {}; the trace is cut there",
            t.trusted
        ));
    }
}

/// A perturbed trace counts as decreasing when its last distance is at most
/// this fraction of its first.
const DECREASE_RATIO: f64 = 0.95;

fn nonincreasing(xs: &[f64]) -> f64 {
    xs.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max).max(0.0)
}

pub(super) fn run(ctx: &Ctx, report: &mut ExperimentReport) -> Result<()> {
    let spec = ctx
        .built
        .shift
        .ok_or_else(|| LabError::PreconditionFailed("E2 needs a shift operator".into()))?;
    if spec.fill != ShiftFill::ZeroFill {
        return Err(LabError::PreconditionFailed("E2 needs the zero-fill (non-cyclic) shift".into()));
    }
    if ctx.cfg.datum_spec != (DatumSpec::Canonical { index: 0 }) {
        return invalid("E2 takes the canonical datum e_0 as the loss-leg limit");
    }
    let (sharpness, radii) = match ctx.cfg.window.sequence.clone().unwrap_or_else(SequenceSpec::default_loss_gain) {
        SequenceSpec::LossGain { sharpness, truncation_radii } => (sharpness, truncation_radii),
        _ => return invalid("E2 needs a loss_gain sequence"),
    };
    if sharpness.is_empty() || radii.is_empty() {
        return invalid("E2 needs at least one sharpness and one truncation radius");
    }
    if radii.iter().any(|&m| m + 1 >= spec.radius) {
        return invalid("truncation radii must be below N - 1");
    }
    let r = ctx.a();
    let guard = ctx.guard().expect("shift operators carry a guard");
    let tol = ctx.tol();
    let n_max = ctx.cfg.window.n_max.min(spec.dim());
    let e0 = ctx.g.clone();

    // Loss leg, limit problem R f = e_0 with f = e_{−1}.
    let f_limit = left_shift(e0.as_vector());
    let basis = krylov_basis(r, &e0, spec.dim(), tol.breakdown_tol)?;
    let approx = projections(&f_limit, &basis);
    let limit_guard = guard.check(approx.iter())?;
    report.merge_guard(&limit_guard);
    let mut best = f64::INFINITY;
    let distances: Vec<f64> = approx
        .iter()
        .map(|x| {
            best = best.min((&f_limit - x).norm());
            best
        })
        .collect();
    let min_d = distances.iter().copied().fold(f64::INFINITY, f64::min);
    report.push_check(Check::at_least("loss_limit_min_distance", min_d, 1.0 - tol.distance_tol));
    report.traces.push(LabeledTrace {
        label: "loss_limit".into(),
        trace: approximant_trace(r, e0.as_vector(), Some(&f_limit), &approx),
    });
    let n = basis.len();
    let x = solve_truncated(r, &e0, &basis, TruncationScheme::Gmres, n)?;
    let grade_residual = basis.grade().map(|_| (r.apply(x.as_vector()) - e0.as_vector()).norm() / e0.norm());
    let provenance = Provenance::of(r, &e0);
    let inputs = VerdictInputs {
        provenance: provenance.clone(),
        a_norm: basis.a_norm(),
        grade: basis.grade(),
        n_used: n,
        invertible: false,
        reducibility: Some(reducibility(r, &basis)?),
        intersection: Some(krylov_intersection(r, &basis, tol.angle_tol)?),
        distance: Some(DistanceEvidence {
            distances,
            reference_norm: f_limit.norm(),
            reference_is_unique: false,
            provenance,
        }),
        grade_residual,
        guard: limit_guard,
        unique: None,
        minimal_norm: None,
        tolerances: ctx.verdict_tolerances(),
    };
    let v = verdict(&inputs)?;
    report.push_check(Check::equal(
        "loss_limit_not_solvable",
        flag(v.verdict == Solvability::NotKrylovSolvable),
        1.0,
    ));
    report.verdicts.push(LabeledVerdict { label: "loss_limit".into(), verdict: v });

    // Loss leg, perturbed data: Szegő data approaching e_0.
    let loss: Vec<(f64, HVector)> = sharpness
        .iter()
        .map(|&s| Ok((s, shift_szego_datum(&spec, &SzegoParams { sharpness: s, ..SzegoParams::default() })?)))
        .collect::<Result<_>>()?;
    let datum_dist: Vec<f64> = loss.iter().map(|(_, g)| (g.as_vector() - e0.as_vector()).norm()).collect();
    report.push_check(Check::at_most("loss_datum_distance_increase", nonincreasing(&datum_dist), 0.0));
    let datum_guard = guard.check(loss.iter().map(|(_, g)| g.as_vector()))?;
    report.merge_guard(&datum_guard);
    for ((s, gs), dd) in loss.iter().zip(&datum_dist) {
        let label = format!("loss_s{}", short(*s));
        let fs = left_shift(gs.as_vector());
        let edge = (r.apply(&fs) - gs.as_vector()).norm() / gs.norm();
        report.push_check(Check::at_most(format!("{label}_edge_residual"), edge, guard.mass_tol.sqrt()).informational());
        report.measure(format!("{label}_datum_distance"), *dd);
        report.measure(format!("{label}_solution_distance"), (&fs - f_limit.clone()).norm());
        let t = guarded_trace(r, gs, &fs, n_max, &guard, tol.breakdown_tol)?;
        report.merge_guard(&t.guard);
        push_decrease(report, &label, &t);
        let v = empirical_verdict(r, gs, &fs, &t, ctx)?;
        report.traces.push(LabeledTrace {
            label: label.clone(),
            trace: approximant_trace(r, gs.as_vector(), Some(&fs), &t.approximants),
        });
        report.verdicts.push(LabeledVerdict { label, verdict: v });
    }

    // Gain leg, limit: the first Szegő datum.
    let (s0, g_gain) = loss[0].clone();
    let f_gain = left_shift(g_gain.as_vector());
    let t = guarded_trace(r, &g_gain, &f_gain, n_max, &guard, tol.breakdown_tol)?;
    report.merge_guard(&t.guard);
    push_decrease(report, "gain_limit", &t);
    let v = empirical_verdict(r, &g_gain, &f_gain, &t, ctx)?;
    report.traces.push(LabeledTrace {
        label: "gain_limit".into(),
        trace: approximant_trace(r, g_gain.as_vector(), Some(&f_gain), &t.approximants),
    });
    report.verdicts.push(LabeledVerdict { label: "gain_limit".into(), verdict: v });
    report.notes.push(format!("gain leg limit datum: Szegő datum with sharpness {s0}"));

    // Gain leg, perturbed data: truncations of the limit datum.
    let mut radii = radii;
    radii.sort_unstable();
    let gain_dist: Vec<f64> = radii
        .iter()
        .map(|&m| (truncate(&spec, g_gain.as_vector(), m) - g_gain.as_vector()).norm())
        .collect();
    report.push_check(Check::at_most("gain_datum_distance_increase", nonincreasing(&gain_dist), 0.0));
    for (&m, dd) in radii.iter().zip(&gain_dist) {
        let label = format!("gain_m{m}");
        let gm = HVector::from_vector(truncate(&spec, g_gain.as_vector(), m))?;
        let fm = left_shift(gm.as_vector());
        let floor = gm.entries()[spec.position(-(m as i64))?].norm();
        let basis = krylov_basis(r, &gm, n_max, tol.breakdown_tol)?;
        let approx = projections(&fm, &basis);
        let g_status = guard.check(approx.iter())?;
        report.merge_guard(&g_status);
        let min_d = approx.iter().map(|x| (&fm - x).norm()).fold(f64::INFINITY, f64::min);
        report.push_check(Check::at_least(format!("{label}_distance_floor"), min_d, floor * (1.0 - 1e-10)));
        report.measure(format!("{label}_datum_distance"), *dd);
        report.measure(format!("{label}_solution_distance"), (&fm - &f_gain).norm());
        let mut chain = vec![
            format!("K(R, g_m) lies in span{{e_n : n >= -{m}}} because g_m is supported in [-{m}, {m}]"),
            format!(
                "every solution of R f = g_m has the entry g[-{m}] = {floor:.4e} at site -{}, so its distance to K is at least that",
                m + 1
            ),
        ];
        let outcome = if floor > 0.0 && g_status.passed {
            chain.push("not Krylov solvable".into());
            Solvability::NotKrylovSolvable
        } else {
            Solvability::Inconclusive
        };
        report.push_check(Check::equal(
            format!("{label}_not_solvable"),
            flag(outcome == Solvability::NotKrylovSolvable),
            1.0,
        ));
        report.verdicts.push(LabeledVerdict {
            label: label.clone(),
            verdict: SolvabilityVerdict {
                verdict: outcome,
                chain,
                tolerances: ctx.verdict_tolerances(),
                guard: g_status,
                unique: None,
                minimal_norm: None,
                provenance: Provenance::of(r, &gm),
            },
        });
        report.traces.push(LabeledTrace { label, trace: approximant_trace(r, gm.as_vector(), Some(&fm), &approx) });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn left_shift_inverts_right_shift_inside() {
        let spec = ShiftSpec::new(3, ShiftFill::ZeroFill);
        let r = crate::gallery::build_shift(spec).unwrap();
        let g = CVector::from_fn(7, |p, _| C64::new(if p == 0 { 0.0 } else { p as f64 }, 0.0));
        let f = left_shift(&g);
        assert!((r.apply(&f) - &g).norm() < 1e-15);
    }

    #[test]
    fn truncation_keeps_centre() {
        let spec = ShiftSpec::new(3, ShiftFill::ZeroFill);
        let g = CVector::from_element(7, C64::new(1.0, 0.0));
        let t = truncate(&spec, &g, 1);
        assert_eq!(t.iter().filter(|z| z.norm() > 0.0).count(), 3);
        assert_eq!(t[3], C64::new(1.0, 0.0));
    }
}
