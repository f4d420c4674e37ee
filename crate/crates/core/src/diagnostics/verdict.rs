use serde::{Deserialize, Serialize};

use super::{
    krylov_intersection, reducibility, vector_class, IntersectionReport, Provenance, ReducibilityReport,
    VectorClassReport, DEFAULT_ANGLE_TOL,
};
use crate::error::{invalid, LabError, Result};
use crate::hilbert::{dense_solve, min_norm_solve, singular_values, CVector, DenseOperator, HVector};
use crate::krylov::{krylov_basis, solve_truncated, KrylovBasis, TruncationScheme, DEFAULT_BREAKDOWN_TOL};

/// Validity check for windows `[−N, N]` standing in for `ℓ²(ℤ)`: vectors
/// must carry a negligible energy fraction near the window edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowGuard {
    pub radius: usize,
    /// Sites with `|n| > (1 − outer_fraction)·N` form the guarded region.
    pub outer_fraction: f64,
    /// Largest tolerated `Σ_outer |v_n|² / ‖v‖²`.
    pub mass_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuardStatus {
    pub applicable: bool,
    pub checked: usize,
    pub max_outer_mass: f64,
    pub mass_tol: f64,
    pub passed: bool,
    /// Index (in check order) of the first vector over the tolerance.
    pub first_violation: Option<usize>,
}

impl GuardStatus {
    pub fn not_applicable() -> Self {
        GuardStatus { applicable: false, checked: 0, max_outer_mass: 0.0, mass_tol: 0.0, passed: true, first_violation: None }
    }
}

impl WindowGuard {
    pub fn new(radius: usize) -> Self {
        WindowGuard { radius, outer_fraction: 0.1, mass_tol: 1e-8 }
    }

    fn dim(&self) -> usize {
        2 * self.radius + 1
    }

    /// Energy fraction of `v` in the guarded region.
    pub fn outer_mass(&self, v: &CVector) -> f64 {
        let total = v.norm_squared();
        if total == 0.0 {
            return 0.0;
        }
        let edge = (1.0 - self.outer_fraction) * self.radius as f64;
        let outer: f64 = v
            .iter()
            .enumerate()
            .filter(|(p, _)| (*p as f64 - self.radius as f64).abs() > edge)
            .map(|(_, z)| z.norm_sqr())
            .sum();
        outer / total
    }

    pub fn check<'a>(&self, vectors: impl IntoIterator<Item = &'a CVector>) -> Result<GuardStatus> {
        let mut status = GuardStatus {
            applicable: true,
            checked: 0,
            max_outer_mass: 0.0,
            mass_tol: self.mass_tol,
            passed: true,
            first_violation: None,
        };
        for (i, v) in vectors.into_iter().enumerate() {
            if v.len() != self.dim() {
                return invalid(format!("guarded vector has dimension {}, window needs {}", v.len(), self.dim()));
            }
            let m = self.outer_mass(v);
            status.checked += 1;
            status.max_outer_mass = status.max_outer_mass.max(m);
            if m > self.mass_tol && status.first_violation.is_none() {
                status.first_violation = Some(i);
                status.passed = false;
            }
        }
        Ok(status)
    }
}

/// `‖f_* − P_{𝒦_n} f_*‖` for `n = 1..=basis.len()`, from explicit residuals
/// made monotone by a running minimum.
pub fn solution_distance_trace(f_star: &HVector, basis: &KrylovBasis) -> Result<Vec<f64>> {
    if f_star.dim() != basis.ambient_dim() {
        return invalid("reference solution and Krylov basis live in different spaces");
    }
    let f = f_star.as_vector();
    let mut best = f64::INFINITY;
    Ok((1..=basis.len())
        .map(|n| {
            best = best.min(basis.frame(n).distance(f));
            best
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solvability {
    KrylovSolvable,
    NotKrylovSolvable,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerdictTolerances {
    /// Relative distance `‖f_* − P_n f_*‖/‖f_*‖` accepted as membership.
    pub distance_tol: f64,
    /// Relative residual at the grade accepted as `g ∈ A𝒦`.
    pub residual_tol: f64,
    /// Relative residual (or distance) at the grade taken as proof of absence.
    pub separation_tol: f64,
    pub angle_tol: f64,
    /// Off-block norm, relative to `‖A‖`, accepted as reducibility.
    pub reducibility_tol: f64,
}

impl Default for VerdictTolerances {
    fn default() -> Self {
        VerdictTolerances {
            distance_tol: 1e-8,
            residual_tol: 1e-8,
            separation_tol: 1e-6,
            angle_tol: DEFAULT_ANGLE_TOL,
            reducibility_tol: 1e-10,
        }
    }
}

/// Distance trace to a reference solution, with what is known about it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceEvidence {
    pub distances: Vec<f64>,
    pub reference_norm: f64,
    /// The reference is the only solution (A injective).
    pub reference_is_unique: bool,
    pub provenance: Provenance,
}

/// Everything [`verdict`] may combine. Absent reports are simply not used.
#[derive(Debug, Clone, PartialEq)]
pub struct VerdictInputs {
    pub provenance: Provenance,
    pub a_norm: f64,
    pub grade: Option<usize>,
    pub n_used: usize,
    pub invertible: bool,
    pub reducibility: Option<ReducibilityReport>,
    pub intersection: Option<IntersectionReport>,
    pub distance: Option<DistanceEvidence>,
    /// `‖A f_m − g‖/‖g‖` for the GMRES solution at the grade `m`.
    pub grade_residual: Option<f64>,
    pub guard: GuardStatus,
    pub unique: Option<bool>,
    pub minimal_norm: Option<bool>,
    pub tolerances: VerdictTolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolvabilityVerdict {
    pub verdict: Solvability,
    /// Implications used, in the order they were applied.
    pub chain: Vec<String>,
    pub tolerances: VerdictTolerances,
    pub guard: GuardStatus,
    /// `A` is injective on the Krylov space, so the Krylov solution is unique.
    pub unique: Option<bool>,
    /// The Krylov solution is the minimal-norm solution.
    pub minimal_norm: Option<bool>,
    pub provenance: Provenance,
}

fn same_source(p: &Provenance, q: &Provenance, what: &str) -> Result<()> {
    if p != q {
        return Err(LabError::InvalidInput(format!("{what} was computed for a different operator, datum or window")));
    }
    Ok(())
}

/// Combines diagnostic evidence into a tolerance-qualified verdict.
pub fn verdict(inputs: &VerdictInputs) -> Result<SolvabilityVerdict> {
    let p = &inputs.provenance;
    let tol = inputs.tolerances;
    if let Some(r) = &inputs.reducibility {
        same_source(p, &r.provenance, "reducibility report")?;
        if r.n_used != inputs.n_used {
            return invalid("reducibility report uses a different Krylov dimension");
        }
    }
    if let Some(i) = &inputs.intersection {
        same_source(p, &i.provenance, "intersection report")?;
        if i.n_used != inputs.n_used {
            return invalid("intersection report uses a different Krylov dimension");
        }
    }
    if let Some(d) = &inputs.distance {
        same_source(p, &d.provenance, "distance trace")?;
        if d.distances.len() != inputs.n_used {
            return invalid("distance trace length differs from the Krylov dimension");
        }
    }

    let mut chain = Vec::new();
    let mut positive = false;
    let mut negative = false;
    let at_grade = inputs.grade.is_some();
    let has_solution = inputs.invertible || inputs.distance.is_some();

    if let (Some(m), Some(r)) = (inputs.grade, inputs.grade_residual) {
        if r <= tol.residual_tol {
            chain.push(format!("grade {m} reached and min over K_{m} of |Af - g|/|g| = {r:.3e}: g in A K, Krylov solution exists"));
            positive = true;
        } else if r >= tol.separation_tol {
            chain.push(format!("grade {m} reached and min over K_{m} of |Af - g|/|g| = {r:.3e}: g not in A K, no Krylov solution"));
            negative = true;
        } else {
            chain.push(format!("grade {m} residual {r:.3e} lies between tolerances; not used"));
        }
    }

    if let Some(d) = &inputs.distance {
        let last = d.distances.last().copied().unwrap_or(d.reference_norm);
        let rel = if d.reference_norm > 0.0 { last / d.reference_norm } else { 0.0 };
        if rel <= tol.distance_tol {
            chain.push(format!("reference solution within relative distance {rel:.3e} of K_{}: Krylov solution", inputs.n_used));
            positive = true;
        } else if at_grade && d.reference_is_unique && rel >= tol.separation_tol {
            chain.push(format!("unique solution stays at relative distance {rel:.3e} from the invariant space K: not Krylov solvable"));
            negative = true;
        } else {
            chain.push(format!("reference solution at relative distance {rel:.3e} from K_{}; not conclusive", inputs.n_used));
        }
    }

    if let Some(i) = &inputs.intersection {
        if !i.trusted {
            chain.push("intersection computed before the grade; not used".into());
        } else if !i.margin_ok() {
            chain.push(format!("intersection margin {:.3e} below 10 x angle_tol; not used", i.margin));
        } else if i.est_dim == 0 {
            if has_solution {
                chain.push("trivial Krylov intersection and a solution exists: Krylov solution".into());
                positive = true;
            } else {
                chain.push("trivial Krylov intersection, but solvability of Af = g is unknown".into());
            }
        } else if inputs.invertible {
            chain.push(format!("Krylov intersection of dimension {} with bounded inverse: not Krylov solvable", i.est_dim));
            negative = true;
        } else {
            chain.push(format!("Krylov intersection of dimension {} (A not known invertible)", i.est_dim));
        }
    }

    if let Some(r) = &inputs.reducibility {
        if r.trusted && r.off_block_perp_to_k <= tol.reducibility_tol * inputs.a_norm.max(f64::MIN_POSITIVE) {
            if has_solution {
                chain.push("A is K-reduced, hence trivial intersection: Krylov solution".into());
                positive = true;
            } else {
                chain.push("A is K-reduced".into());
            }
        }
    }

    let mut outcome = match (positive, negative) {
        (true, false) => Solvability::KrylovSolvable,
        (false, true) => Solvability::NotKrylovSolvable,
        (true, true) => {
            chain.push("evidence is contradictory".into());
            Solvability::Inconclusive
        }
        (false, false) => Solvability::Inconclusive,
    };
    if inputs.guard.applicable && !inputs.guard.passed {
        chain.push(format!("window guard violated (outer mass {:.3e}): verdict withheld", inputs.guard.max_outer_mass));
        outcome = Solvability::Inconclusive;
    }
    let solvable = outcome == Solvability::KrylovSolvable;
    Ok(SolvabilityVerdict {
        verdict: outcome,
        chain,
        tolerances: tol,
        guard: inputs.guard.clone(),
        unique: inputs.unique.filter(|_| solvable),
        minimal_norm: inputs.minimal_norm.filter(|_| solvable),
        provenance: p.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseOptions {
    pub breakdown_tol: f64,
    pub vector_class_n: usize,
    pub guard: Option<WindowGuard>,
    pub tolerances: VerdictTolerances,
}

impl Default for DiagnoseOptions {
    fn default() -> Self {
        DiagnoseOptions {
            breakdown_tol: DEFAULT_BREAKDOWN_TOL,
            vector_class_n: 24,
            guard: None,
            tolerances: VerdictTolerances::default(),
        }
    }
}

/// Full diagnostic pass over one `(A, g)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub provenance: Provenance,
    pub n_used: usize,
    pub grade: Option<usize>,
    pub a_norm: f64,
    pub reducibility: ReducibilityReport,
    pub intersection: IntersectionReport,
    pub vector_class: VectorClassReport,
    /// Which solution the distance trace refers to, if any.
    pub reference: Option<String>,
    pub distance_trace: Option<Vec<f64>>,
    pub grade_residual: Option<f64>,
    pub verdict: SolvabilityVerdict,
}

/// Builds `𝒦_n(A, g)` up to `n_max` and runs every diagnostic on it. The
/// reference solution is `A⁻¹g` for invertible `A`, otherwise the
/// minimal-norm solution when `g ∈ ran A`.
pub fn diagnose(a: &DenseOperator, g: &HVector, n_max: usize, opts: &DiagnoseOptions) -> Result<DiagnosticsReport> {
    let basis = krylov_basis(a, g, n_max, opts.breakdown_tol)?;
    let provenance = Provenance::of(a, g);
    let red = reducibility(a, &basis)?;
    let inter = krylov_intersection(a, &basis, opts.tolerances.angle_tol)?;
    let vc = vector_class(a, g, opts.vector_class_n.max(4))?;
    let invertible = a.flags().invertible_known;

    let (reference, ref_name) = if invertible {
        (Some(dense_solve(a, g)?), Some("dense_solve".to_string()))
    } else {
        match min_norm_solve(a, g) {
            Ok(f) => (Some(f), Some("min_norm_solve".to_string())),
            Err(LabError::NoSolution { .. }) => (None, None),
            Err(e) => return Err(e),
        }
    };
    let distance = match &reference {
        Some(f) => Some(DistanceEvidence {
            distances: solution_distance_trace(f, &basis)?,
            reference_norm: f.norm(),
            reference_is_unique: invertible,
            provenance: provenance.clone(),
        }),
        None => None,
    };

    let n = basis.len();
    let krylov_solution = solve_truncated(a, g, &basis, TruncationScheme::Gmres, n)?;
    let rel_res = (a.apply(krylov_solution.as_vector()) - g.as_vector()).norm() / g.norm();
    let grade_residual = basis.grade().map(|_| rel_res);

    let guard = match &opts.guard {
        Some(w) => match &reference {
            Some(f) => {
                let approximants: Vec<CVector> = (1..=n).map(|k| basis.frame(k).project_raw(f.as_vector())).collect();
                w.check(approximants.iter())?
            }
            None => {
                let cols: Vec<CVector> = basis.frame(n).basis().column_iter().map(|c| c.into_owned()).collect();
                w.check(cols.iter())?
            }
        },
        None => GuardStatus::not_applicable(),
    };

    let aq = a.matrix() * basis.frame(n).basis();
    let unique = singular_values(&aq).last().map(|&s| s > 1e-10 * basis.a_norm());
    let minimal_norm = match min_norm_solve(a, g) {
        Ok(f) => Some((krylov_solution.as_vector() - f.as_vector()).norm() <= 1e-8 * f.norm().max(f64::MIN_POSITIVE)),
        Err(_) => None,
    };

    let inputs = VerdictInputs {
        provenance: provenance.clone(),
        a_norm: basis.a_norm(),
        grade: basis.grade(),
        n_used: n,
        invertible,
        reducibility: Some(red.clone()),
        intersection: Some(inter.clone()),
        distance: distance.clone(),
        grade_residual,
        guard,
        unique,
        minimal_norm,
        tolerances: opts.tolerances,
    };
    let v = verdict(&inputs)?;
    Ok(DiagnosticsReport {
        provenance,
        n_used: n,
        grade: basis.grade(),
        a_norm: basis.a_norm(),
        reducibility: red,
        intersection: inter,
        vector_class: vc,
        reference: ref_name,
        distance_trace: distance.map(|d| d.distances),
        grade_residual,
        verdict: v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{build_compact_normal, build_shift, ShiftFill, ShiftSpec};
    use crate::hilbert::{c64, CMatrix, C64};

    fn diag(d: &[f64]) -> DenseOperator {
        let m = CMatrix::from_diagonal(&CVector::from_iterator(d.len(), d.iter().map(|&x| C64::new(x, 0.0))));
        DenseOperator::detect(m).unwrap()
    }

    fn shift_e0(radius: usize) -> (DenseOperator, HVector, ShiftSpec) {
        let spec = ShiftSpec::new(radius, ShiftFill::ZeroFill);
        let r = build_shift(spec).unwrap();
        let g = HVector::basis(spec.dim(), spec.position(0).unwrap()).unwrap();
        (r, g, spec)
    }

    #[test]
    fn distance_trace_examples() {
        let (r, g, spec) = shift_e0(5);
        let b = krylov_basis(&r, &g, 11, DEFAULT_BREAKDOWN_TOL).unwrap();
        let f = HVector::basis(spec.dim(), spec.position(-1).unwrap()).unwrap();
        let d = solution_distance_trace(&f, &b).unwrap();
        assert!(d.iter().all(|&x| (x - 1.0).abs() < 1e-15));

        let a = diag(&[1.0, 2.0, 3.0]);
        let g = HVector::from_real(&[1.0, 1.0, 1.0]).unwrap();
        let b = krylov_basis(&a, &g, 3, DEFAULT_BREAKDOWN_TOL).unwrap();
        let d = solution_distance_trace(&dense_solve(&a, &g).unwrap(), &b).unwrap();
        assert!(d[2] <= 1e-10);
        assert!(d.windows(2).all(|w| w[1] <= w[0]));
        assert!(solution_distance_trace(&g, &b).unwrap()[0] < 1e-15);
    }

    #[test]
    fn invertible_diagonal_is_solvable() {
        let a = diag(&[1.0, 2.0, 3.0]);
        let g = HVector::from_real(&[1.0, 1.0, 1.0]).unwrap();
        let rep = diagnose(&a, &g, 3, &DiagnoseOptions::default()).unwrap();
        assert_eq!(rep.intersection.est_dim, 0);
        assert_eq!(rep.verdict.verdict, Solvability::KrylovSolvable);
        assert_eq!(rep.verdict.unique, Some(true));
    }

    #[test]
    fn zero_fill_shift_is_not_solvable() {
        let (r, g, spec) = shift_e0(6);
        let rep = diagnose(&r, &g, spec.dim(), &DiagnoseOptions::default()).unwrap();
        assert_eq!(rep.verdict.verdict, Solvability::NotKrylovSolvable);
        assert!(rep.intersection.est_dim >= 1);
        assert!(rep.grade_residual.unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn compact_normal_unique_minimal_norm() {
        let a = build_compact_normal(&[c64(1.0, 0.0), c64(0.5, 0.0), c64(0.25, 0.0)]).unwrap();
        let g = HVector::from_real(&[1.0, 1.0, 1.0]).unwrap();
        let rep = diagnose(&a, &g, 3, &DiagnoseOptions::default()).unwrap();
        assert_eq!(rep.verdict.verdict, Solvability::KrylovSolvable);
        assert_eq!(rep.verdict.unique, Some(true));
        assert_eq!(rep.verdict.minimal_norm, Some(true));
    }

    #[test]
    fn semidefinite_consistent_data() {
        let a = diag(&[1.0, 2.0, 0.0]);
        let g = HVector::from_real(&[1.0, 2.0, 0.0]).unwrap();
        let rep = diagnose(&a, &g, 3, &DiagnoseOptions::default()).unwrap();
        assert_eq!(rep.reference.as_deref(), Some("min_norm_solve"));
        assert_eq!(rep.verdict.verdict, Solvability::KrylovSolvable);
        assert_eq!(rep.verdict.minimal_norm, Some(true));
    }

    #[test]
    fn guard_violation_withholds_verdict() {
        let d: Vec<f64> = (1..=13).map(|k| k as f64).collect();
        let a = diag(&d);
        let g = HVector::from_real(&[1.0; 13]).unwrap();
        let opts = DiagnoseOptions { guard: Some(WindowGuard::new(6)), ..Default::default() };
        let rep = diagnose(&a, &g, 13, &opts).unwrap();
        // the solution has weight at both window edges
        assert!(!rep.verdict.guard.passed);
        assert_eq!(rep.verdict.verdict, Solvability::Inconclusive);
        let plain = diagnose(&a, &g, 13, &DiagnoseOptions::default()).unwrap();
        assert_eq!(plain.verdict.verdict, Solvability::KrylovSolvable);
    }

    #[test]
    fn mismatched_provenance_is_rejected() {
        let a = diag(&[1.0, 2.0, 3.0]);
        let g = HVector::from_real(&[1.0, 1.0, 1.0]).unwrap();
        let h = HVector::from_real(&[1.0, 0.0, 1.0]).unwrap();
        let bg = krylov_basis(&a, &g, 3, DEFAULT_BREAKDOWN_TOL).unwrap();
        let bh = krylov_basis(&a, &h, 3, DEFAULT_BREAKDOWN_TOL).unwrap();
        let inputs = VerdictInputs {
            provenance: Provenance::of(&a, &g),
            a_norm: 3.0,
            grade: bg.grade(),
            n_used: bg.len(),
            invertible: true,
            reducibility: Some(reducibility(&a, &bh).unwrap()),
            intersection: None,
            distance: None,
            grade_residual: None,
            guard: GuardStatus::not_applicable(),
            unique: None,
            minimal_norm: None,
            tolerances: VerdictTolerances::default(),
        };
        assert!(matches!(verdict(&inputs), Err(LabError::InvalidInput(_))));
    }

    #[test]
    fn contradictory_evidence_is_inconclusive() {
        let a = diag(&[1.0, 2.0, 3.0]);
        let g = HVector::from_real(&[1.0, 1.0, 1.0]).unwrap();
        let b = krylov_basis(&a, &g, 3, DEFAULT_BREAKDOWN_TOL).unwrap();
        let inputs = VerdictInputs {
            provenance: Provenance::of(&a, &g),
            a_norm: 3.0,
            grade: b.grade(),
            n_used: b.len(),
            invertible: true,
            reducibility: None,
            intersection: None,
            distance: Some(DistanceEvidence {
                distances: vec![1.0, 1.0, 1e-12],
                reference_norm: 1.0,
                reference_is_unique: true,
                provenance: Provenance::of(&a, &g),
            }),
            grade_residual: Some(0.5),
            guard: GuardStatus::not_applicable(),
            unique: None,
            minimal_norm: None,
            tolerances: VerdictTolerances::default(),
        };
        let v = verdict(&inputs).unwrap();
        assert_eq!(v.verdict, Solvability::Inconclusive);
        assert!(v.chain.iter().any(|c| c.contains("contradictory")));
    }

    #[test]
    fn guard_mass_is_an_energy_fraction() {
        let w = WindowGuard::new(10);
        let mut v = CVector::zeros(21);
        v[10] = C64::new(1.0, 0.0);
        assert_eq!(w.outer_mass(&v), 0.0);
        v[20] = C64::new(1e-3, 0.0);
        assert!((w.outer_mass(&v) - 1e-6 / (1.0 + 1e-6)).abs() < 1e-18);
        assert!(!w.check([&v]).unwrap().passed);
    }
}
