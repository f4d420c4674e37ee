use super::{
    flag, Check, Ctx, ExperimentReport, GapRecord, LabeledDiagnostics, LabeledVerdict, PropositionOutcome, SequenceSpec,
};
use crate::diagnostics::{diagnose, Solvability};
use crate::error::{invalid, Result};
use crate::gallery::{shift_szego_datum, SzegoParams};
use crate::hilbert::{dense_solve, HVector, C64};
use crate::weak_gap::{datum_continuity_check, ContinuityOptions, GapOptions};

/// The perturbed data `g_m` described by `seq`, in order of approach.
fn sequence(ctx: &Ctx, seq: &SequenceSpec) -> Result<Vec<HVector>> {
    let (a, g) = (ctx.a(), ctx.g);
    match seq {
        SequenceSpec::AddImage { count } => {
            let ag = a.apply(g.as_vector());
            (1..=*count)
                .map(|m| HVector::from_vector(g.as_vector() + &ag * C64::new(1.0 / m as f64, 0.0)))
                .collect()
        }
        SequenceSpec::Constant { count } => Ok(vec![g.clone(); *count]),
        SequenceSpec::SzegoSharpness { values } => {
            let Some(spec) = &ctx.built.shift else {
                return invalid("a szego_sharpness sequence needs a shift operator");
            };
            values
                .iter()
                .map(|&s| shift_szego_datum(spec, &SzegoParams { sharpness: s, ..SzegoParams::default() }))
                .collect()
        }
        SequenceSpec::Explicit { data } => data
            .iter()
            .map(|row| {
                if row.len() != a.dim() {
                    return invalid("explicit sequence entries must match the operator dimension");
                }
                HVector::new(row.iter().map(|s| s.value()).collect())
            })
            .collect(),
        SequenceSpec::LossGain { .. } => invalid("loss_gain sequences belong to E2"),
    }
}

/// Values that are all below `tol`, or nonincreasing and ending at or
/// below a tenth of the first value.
pub fn trends_to_zero(values: &[f64], tol: f64) -> bool {
    let (Some(&first), Some(&last)) = (values.first(), values.last()) else {
        return false;
    };
    if last <= tol {
        return true;
    }
    let monotone = values.windows(2).all(|w| w[1] <= w[0] + tol);
    monotone && last <= 0.1 * first
}

pub(super) fn run(ctx: &Ctx, report: &mut ExperimentReport) -> Result<()> {
    let (a, g) = (ctx.a(), ctx.g);
    let tol = ctx.tol();
    let Some(seq) = &ctx.cfg.window.sequence else {
        return invalid("E6 needs window.sequence");
    };
    let data = sequence(ctx, seq)?;
    if data.is_empty() {
        return invalid("E6 needs at least one perturbed datum");
    }
    let n_max = ctx.cfg.window.n_max.min(a.dim());
    let opts = ctx.diagnose_options();
    let invertible = a.flags().invertible_known;
    report.push_check(Check::equal("operator_invertible", flag(invertible), 1.0).informational());

    let mut all_solvable = true;
    for (i, gm) in data.iter().enumerate() {
        let label = format!("perturbed_{}", i + 1);
        let d = diagnose(a, gm, n_max, &opts)?;
        report.merge_guard(&d.verdict.guard);
        all_solvable &= d.verdict.verdict == Solvability::KrylovSolvable;
        report.verdicts.push(LabeledVerdict { label: label.clone(), verdict: d.verdict.clone() });
        report.diagnostics.push(LabeledDiagnostics { label, report: d });
    }
    report.push_check(Check::equal("perturbed_all_solvable", flag(all_solvable), 1.0).informational());

    let copts = ContinuityOptions {
        closure_n: Some(n_max),
        breakdown_tol: tol.breakdown_tol,
        gap: GapOptions { seed: ctx.cfg.seed, ..GapOptions::default() },
    };
    let entries = datum_continuity_check(a, g, &data, &ctx.built.weights, &copts)?;
    let f_limit = if invertible { Some(dense_solve(a, g)?) } else { None };
    let mut solution_dists = Vec::new();
    for (i, (entry, gm)) in entries.into_iter().zip(&data).enumerate() {
        let solution_distance = match &f_limit {
            Some(f) => {
                let fm = dense_solve(a, gm)?;
                let d = (fm.as_vector() - f.as_vector()).norm();
                solution_dists.push(d);
                Some(d)
            }
            None => None,
        };
        report.gaps.push(GapRecord { label: format!("perturbed_{}", i + 1), entry, solution_distance });
    }
    let gaps: Vec<f64> = report.gaps.iter().map(|r| r.entry.symmetric.value).collect();
    let gaps_vanish = trends_to_zero(&gaps, tol.gap_tol);
    report.measure("last_gap", *gaps.last().expect("nonempty"));
    report.push_check(Check::equal("gaps_trend_to_zero", flag(gaps_vanish), 1.0).informational());

    let limit = diagnose(a, g, n_max, &opts)?;
    report.merge_guard(&limit.verdict.guard);
    let limit_solvable = limit.verdict.verdict == Solvability::KrylovSolvable;
    report.verdicts.push(LabeledVerdict { label: "limit".into(), verdict: limit.verdict.clone() });
    report.diagnostics.push(LabeledDiagnostics { label: "limit".into(), report: limit });

    let hypothesis = invertible && all_solvable && gaps_vanish;
    let outcome = if !hypothesis {
        let mut why = Vec::new();
        if !invertible {
            why.push("A is not known to be invertible");
        }
        if !all_solvable {
            why.push("not every perturbed problem is Krylov solvable");
        }
        if !gaps_vanish {
            why.push("the weak gaps do not trend to zero");
        }
        report.notes.push(format!("hypothesis not satisfied: {}", why.join("; ")));
        PropositionOutcome::HypothesisFailed
    } else {
        let converge = trends_to_zero(&solution_dists, tol.solution_tol);
        report.push_check(Check::equal("limit_solvable", flag(limit_solvable), 1.0));
        report.push_check(Check::equal("solutions_converge", flag(converge), 1.0));
        if limit_solvable && converge {
            PropositionOutcome::Confirmed
        } else {
            PropositionOutcome::Contradiction
        }
    };
    report.proposition = Some(outcome);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trend_rules() {
        assert!(trends_to_zero(&[0.0, 0.0], 1e-6));
        assert!(trends_to_zero(&[1.0, 0.5, 0.05], 1e-6));
        assert!(!trends_to_zero(&[1.0, 0.5, 0.2], 1e-6));
        assert!(!trends_to_zero(&[0.3, 0.35, 0.01], 1e-6));
        assert!(!trends_to_zero(&[], 1e-6));
    }
}
