use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, LabError, Result};
use crate::gallery::{
    band_limited_datum, build_compact_normal, build_friedrichs_1d, build_prototype, build_shift, fourier_mode,
    grid_points, random, shift_szego_datum, Friedrichs1DSpec, PrototypeSpec, ShiftFill, ShiftSpec, SzegoParams,
};
use crate::hilbert::{CMatrix, CVector, DenseOperator, HVector, C64};
use crate::weak_gap::WeakNormWeights;

/// Environment variable that replaces the configured seed.
pub const SEED_ENV: &str = "LAB_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExperimentId {
    #[serde(rename = "E1_selfadjoint_cg")]
    E1SelfadjointCg,
    #[serde(rename = "E2_shift_loss_gain")]
    E2ShiftLossGain,
    #[serde(rename = "E3_normal_equations")]
    E3NormalEquations,
    #[serde(rename = "E4_prototype_friedrichs")]
    E4PrototypeFriedrichs,
    #[serde(rename = "E5_compact_normal")]
    E5CompactNormal,
    #[serde(rename = "E6_perturbation_limits")]
    E6PerturbationLimits,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 6] = [
        ExperimentId::E1SelfadjointCg,
        ExperimentId::E2ShiftLossGain,
        ExperimentId::E3NormalEquations,
        ExperimentId::E4PrototypeFriedrichs,
        ExperimentId::E5CompactNormal,
        ExperimentId::E6PerturbationLimits,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::E1SelfadjointCg => "E1_selfadjoint_cg",
            ExperimentId::E2ShiftLossGain => "E2_shift_loss_gain",
            ExperimentId::E3NormalEquations => "E3_normal_equations",
            ExperimentId::E4PrototypeFriedrichs => "E4_prototype_friedrichs",
            ExperimentId::E5CompactNormal => "E5_compact_normal",
            ExperimentId::E6PerturbationLimits => "E6_perturbation_limits",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            ExperimentId::E1SelfadjointCg => "self- and skew-adjoint problems: CG or Galerkin against the minimal-norm solution",
            ExperimentId::E2ShiftLossGain => "right shift: loss and gain of Krylov solvability under datum perturbation",
            ExperimentId::E3NormalEquations => "normal equations A*A f = A*g when A + A* is a multiple of the identity",
            ExperimentId::E4PrototypeFriedrichs => "Friedrichs prototype -f' + c f = g with band-limited data",
            ExperimentId::E5CompactNormal => "compact normal operators: unique minimal-norm Krylov solution",
            ExperimentId::E6PerturbationLimits => "Krylov solvability of limits of solvable problems under the weak gap",
        }
    }
}

/// A real number or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl Scalar {
    pub fn value(self) -> C64 {
        match self {
            Scalar::Real(x) => C64::new(x, 0.0),
            Scalar::Complex([re, im]) => C64::new(re, im),
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::Real(0.0)
    }
}

fn two_pi() -> f64 {
    2.0 * PI
}

fn one() -> Scalar {
    Scalar::Real(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RandomStructure {
    /// Self-adjoint with spectrum in `[lo, hi]`, `lo > 0`.
    Spd { lo: f64, hi: f64 },
    /// Self-adjoint, kernel of dimension `kernel_dim`, other eigenvalues in `[lo, hi]`.
    Psd { kernel_dim: usize, lo: f64, hi: f64 },
    Hermitian { scale: f64 },
    /// `UΣV*` with singular values spread over `[1/cond, 1]`.
    Invertible { cond: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorSpec {
    Dense {
        rows: Vec<Vec<Scalar>>,
    },
    Diagonal {
        entries: Vec<Scalar>,
    },
    CompactNormal {
        eigenvalues: Vec<Scalar>,
    },
    Shift {
        radius: usize,
        #[serde(default)]
        fill: ShiftFill,
    },
    /// Constant-coefficient system `∂(B f) + C f` with `r = B.len()` components.
    Friedrichs1d {
        points: usize,
        #[serde(default = "two_pi")]
        length: f64,
        b: Vec<Vec<Scalar>>,
        c: Vec<Vec<Scalar>>,
        mu: f64,
    },
    /// `−f′ + c f` with `c(x) = c0 + c_sin·sin(2πx/L) + c_cos·cos(2πx/L)`.
    Prototype {
        modes: usize,
        #[serde(default = "two_pi")]
        length: f64,
        #[serde(default = "one")]
        c0: Scalar,
        #[serde(default)]
        c_sin: f64,
        #[serde(default)]
        c_cos: f64,
    },
    Random {
        dim: usize,
        structure: RandomStructure,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierTerm {
    pub k: i64,
    pub amplitude: Scalar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatumSpec {
    Explicit {
        entries: Vec<Scalar>,
    },
    /// `e_index`; for shift windows `index` is a site in `[−N, N]`, otherwise
    /// a storage position.
    Canonical {
        index: i64,
    },
    Ones,
    /// Grid operators only; `component` selects the unknown of a system.
    FourierModes {
        modes: Vec<FourierTerm>,
        #[serde(default)]
        component: usize,
    },
    /// Shift windows only.
    Szego {
        #[serde(default = "default_sharpness")]
        sharpness: f64,
        #[serde(default = "default_bin_offset")]
        bin_offset: f64,
    },
    /// Standard complex Gaussian entries drawn from the seed.
    Random,
    /// `A x` for the datum `x` described by `of`.
    Image {
        of: Box<DatumSpec>,
    },
}

fn default_sharpness() -> f64 {
    SzegoParams::default().sharpness
}

fn default_bin_offset() -> f64 {
    SzegoParams::default().bin_offset
}

/// How the perturbed data `g_m` of E2 and E6 are produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceSpec {
    /// `g_m = g + A g / m`, `m = 1..=count`.
    AddImage { count: usize },
    /// `g_m = g`.
    Constant { count: usize },
    /// Szegő data of increasing sharpness, which approach `e_0`.
    SzegoSharpness { values: Vec<f64> },
    /// E2: Szegő loss leg and truncated gain leg.
    LossGain { sharpness: Vec<f64>, truncation_radii: Vec<usize> },
    Explicit { data: Vec<Vec<Scalar>> },
}

impl SequenceSpec {
    pub fn default_loss_gain() -> Self {
        SequenceSpec::LossGain { sharpness: vec![1.0, 2.0, 4.0], truncation_radii: vec![4, 8, 16, 32] }
    }
}

fn default_outer_fraction() -> f64 {
    0.1
}

fn default_mass_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowParams {
    /// Largest Krylov dimension used.
    pub n_max: usize,
    #[serde(default)]
    pub sequence: Option<SequenceSpec>,
    #[serde(default = "default_outer_fraction")]
    pub guard_outer_fraction: f64,
    #[serde(default = "default_mass_tol")]
    pub guard_mass_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative residual at which iterations stop.
    pub residual_tol: f64,
    /// Relative agreement with direct-solve oracles.
    pub solution_tol: f64,
    /// Relative distance accepted as Krylov membership.
    pub distance_tol: f64,
    pub angle_tol: f64,
    pub breakdown_tol: f64,
    /// Span-inclusion distance for E3.
    pub inclusion_tol: f64,
    /// Defect allowed in `A + A* = α I` (E3) and in the Friedrichs sum.
    pub identity_tol: f64,
    /// Weak-gap value counted as zero (E6).
    pub gap_tol: f64,
    /// Agreement of the two solution routes of E3 with the direct solve.
    pub route_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual_tol: 1e-12,
            solution_tol: 1e-8,
            distance_tol: 1e-8,
            angle_tol: crate::diagnostics::DEFAULT_ANGLE_TOL,
            breakdown_tol: crate::krylov::DEFAULT_BREAKDOWN_TOL,
            inclusion_tol: 1e-8,
            identity_tol: 1e-10,
            gap_tol: 1e-6,
            route_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment_id: ExperimentId,
    pub operator_spec: OperatorSpec,
    pub datum_spec: DatumSpec,
    pub window: WindowParams,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<String>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| LabError::InvalidInput(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Replaces the seed with `LAB_SEED` when that variable is set.
    pub fn apply_env_seed(&mut self) -> Result<()> {
        if let Some(seed) = env_seed()? {
            self.seed = seed;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.window.n_max == 0 {
            return invalid("window.n_max must be positive");
        }
        let w = &self.window;
        if !(w.guard_outer_fraction > 0.0 && w.guard_outer_fraction < 1.0) {
            return invalid("guard_outer_fraction must lie in (0, 1)");
        }
        if !(w.guard_mass_tol > 0.0) {
            return invalid("guard_mass_tol must be positive");
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("residual_tol", t.residual_tol),
            ("solution_tol", t.solution_tol),
            ("distance_tol", t.distance_tol),
            ("angle_tol", t.angle_tol),
            ("breakdown_tol", t.breakdown_tol),
            ("inclusion_tol", t.inclusion_tol),
            ("identity_tol", t.identity_tol),
            ("gap_tol", t.gap_tol),
            ("route_tol", t.route_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return invalid(format!("tolerance {name} must be positive and finite"));
            }
        }
        Ok(())
    }
}

/// Seed from `LAB_SEED`, if set.
pub fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| LabError::InvalidInput(format!("{SEED_ENV} must be an unsigned integer, got {s:?}"))),
        Err(_) => Ok(None),
    }
}

/// Grid layout of a discretized differential operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub points: usize,
    pub length: f64,
    pub components: usize,
}

/// An operator together with what the experiments need to know about it.
#[derive(Debug, Clone)]
pub struct BuiltOperator {
    pub op: DenseOperator,
    /// Formal adjoint `Ã` of a Friedrichs operator.
    pub formal_adjoint: Option<DenseOperator>,
    pub shift: Option<ShiftSpec>,
    pub grid: Option<Grid>,
    pub weights: WeakNormWeights,
}

const DATUM_STREAM: u64 = 0xD1B5_4A32_D192_ED03;

fn square_matrix(rows: &[Vec<Scalar>], what: &str) -> Result<CMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return invalid(format!("{what} must be a nonempty square matrix"));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j].value()))
}

fn values(entries: &[Scalar]) -> Vec<C64> {
    entries.iter().map(|s| s.value()).collect()
}

pub fn build_operator(spec: &OperatorSpec, seed: u64) -> Result<BuiltOperator> {
    let plain = |op: DenseOperator| {
        let dim = op.dim();
        BuiltOperator { op, formal_adjoint: None, shift: None, grid: None, weights: WeakNormWeights::canonical(dim) }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(match spec {
        OperatorSpec::Dense { rows } => plain(DenseOperator::detect(square_matrix(rows, "operator rows")?)?),
        OperatorSpec::Diagonal { entries } => {
            if entries.is_empty() {
                return invalid("diagonal operator needs at least one entry");
            }
            let d = CVector::from_vec(values(entries));
            plain(DenseOperator::detect(CMatrix::from_diagonal(&d))?)
        }
        OperatorSpec::CompactNormal { eigenvalues } => plain(build_compact_normal(&values(eigenvalues))?),
        OperatorSpec::Shift { radius, fill } => {
            let s = ShiftSpec::new(*radius, *fill);
            BuiltOperator {
                op: build_shift(s)?,
                formal_adjoint: None,
                shift: Some(s),
                grid: None,
                weights: WeakNormWeights::zigzag(&s),
            }
        }
        OperatorSpec::Friedrichs1d { points, length, b, c, mu } => {
            let b = square_matrix(b, "B")?;
            let c = square_matrix(c, "C")?;
            if b.nrows() != c.nrows() {
                return invalid("B and C must have the same size");
            }
            let r = b.nrows();
            let (a, at) = build_friedrichs_1d(&Friedrichs1DSpec::constant(*points, *length, b, c, *mu))?;
            BuiltOperator {
                weights: WeakNormWeights::canonical(a.dim()),
                op: a,
                formal_adjoint: Some(at),
                shift: None,
                grid: Some(Grid { points: *points, length: *length, components: r }),
            }
        }
        OperatorSpec::Prototype { modes, length, c0, c_sin, c_cos } => {
            if *modes == 0 {
                return invalid("prototype needs at least one mode");
            }
            let xs = grid_points(*modes, *length);
            let c: Vec<C64> = xs
                .iter()
                .map(|&x| {
                    let t = 2.0 * PI * x / length;
                    c0.value() + C64::new(c_sin * t.sin() + c_cos * t.cos(), 0.0)
                })
                .collect();
            let a = build_prototype(&PrototypeSpec { c, length: *length })?;
            // Formal adjoint of −D + c is D + c̄.
            let d = crate::gallery::spectral_derivative(*modes, *length);
            let cbar = CMatrix::from_diagonal(&a.matrix().diagonal().map(|z| z.conj()));
            let at = DenseOperator::detect(d + cbar)?;
            BuiltOperator {
                weights: WeakNormWeights::canonical(a.dim()),
                op: a,
                formal_adjoint: Some(at),
                shift: None,
                grid: Some(Grid { points: *modes, length: *length, components: 1 }),
            }
        }
        OperatorSpec::Random { dim, structure } => {
            if *dim == 0 {
                return invalid("random operator dimension must be positive");
            }
            let op = match *structure {
                RandomStructure::Spd { lo, hi } => {
                    if !(lo > 0.0 && hi >= lo) {
                        return invalid("spd spectrum needs 0 < lo <= hi");
                    }
                    random::spd(*dim, lo, hi, &mut rng)
                }
                RandomStructure::Psd { kernel_dim, lo, hi } => {
                    if kernel_dim >= *dim || !(lo > 0.0 && hi >= lo) {
                        return invalid("psd needs kernel_dim < dim and 0 < lo <= hi");
                    }
                    random::psd_with_kernel(*dim, kernel_dim, lo, hi, &mut rng)
                }
                RandomStructure::Hermitian { scale } => random::hermitian(*dim, scale, &mut rng),
                RandomStructure::Invertible { cond } => {
                    if !(cond >= 1.0) {
                        return invalid("invertible needs cond >= 1");
                    }
                    random::invertible(*dim, cond, &mut rng)
                }
            };
            plain(op)
        }
    })
}

pub fn build_datum(spec: &DatumSpec, built: &BuiltOperator, seed: u64) -> Result<HVector> {
    let dim = built.op.dim();
    match spec {
        DatumSpec::Explicit { entries } => {
            if entries.len() != dim {
                return invalid(format!("datum has {} entries, operator dimension is {dim}", entries.len()));
            }
            HVector::new(values(entries))
        }
        DatumSpec::Canonical { index } => {
            let pos = match &built.shift {
                Some(s) => s.position(*index)?,
                None => {
                    if *index < 0 || *index as usize >= dim {
                        return invalid(format!("canonical index {index} outside 0..{dim}"));
                    }
                    *index as usize
                }
            };
            HVector::basis(dim, pos)
        }
        DatumSpec::Ones => HVector::new(vec![C64::new(1.0, 0.0); dim]),
        DatumSpec::FourierModes { modes, component } => {
            let Some(grid) = built.grid else {
                return invalid("Fourier-mode data need a grid operator");
            };
            if *component >= grid.components {
                return invalid(format!("component {component} out of range for r = {}", grid.components));
            }
            let terms: Vec<(i64, C64)> = modes.iter().map(|t| (t.k, t.amplitude.value())).collect();
            let scalar = band_limited_datum(grid.points, &terms)?;
            let mut v = CVector::zeros(dim);
            for j in 0..grid.points {
                v[j * grid.components + component] = scalar.entries()[j];
            }
            HVector::from_vector(v)
        }
        DatumSpec::Szego { sharpness, bin_offset } => {
            let Some(s) = &built.shift else {
                return invalid("Szegő data need a shift operator");
            };
            shift_szego_datum(s, &SzegoParams { sharpness: *sharpness, bin_offset: *bin_offset })
        }
        DatumSpec::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ DATUM_STREAM);
            HVector::from_vector(random::gaussian_vector(dim, &mut rng))
        }
        DatumSpec::Image { of } => {
            let x = build_datum(of, built, seed)?;
            built.op.apply_h(&x)
        }
    }
}

/// Unit Fourier mode of a grid operator; used by examples and tests.
pub fn grid_mode(grid: &Grid, k: i64, component: usize) -> CVector {
    let scalar = fourier_mode(grid.points, k);
    let mut v = CVector::zeros(grid.points * grid.components);
    for j in 0..grid.points {
        v[j * grid.components + component] = scalar[j];
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_forms_parse() {
        let s: Vec<Scalar> = serde_json::from_str("[1.5, [0.0, -2.0]]").unwrap();
        assert_eq!(s[0].value(), C64::new(1.5, 0.0));
        assert_eq!(s[1].value(), C64::new(0.0, -2.0));
    }

    #[test]
    fn minimal_config_parses_with_defaults() {
        let text = r#"{
            "experiment_id": "E5_compact_normal",
            "operator_spec": {"kind": "compact_normal", "eigenvalues": [1.0, 0.5, 0.25]},
            "datum_spec": {"kind": "ones"},
            "window": {"n_max": 3},
            "seed": 7
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.experiment_id, ExperimentId::E5CompactNormal);
        assert_eq!(cfg.tolerances, Tolerances::default());
        assert_eq!(cfg.window.guard_mass_tol, 1e-8);
        let again: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn unknown_fields_and_ids_are_rejected() {
        let bad_field = r#"{"experiment_id": "E5_compact_normal", "operator_spec": {"kind": "diagonal", "entries": [1]},
            "datum_spec": {"kind": "ones"}, "window": {"n_max": 3}, "seed": 1, "extra": 0}"#;
        assert!(matches!(ExperimentConfig::from_json(bad_field), Err(LabError::InvalidInput(_))));
        let bad_id = r#"{"experiment_id": "E9", "operator_spec": {"kind": "diagonal", "entries": [1]},
            "datum_spec": {"kind": "ones"}, "window": {"n_max": 3}, "seed": 1}"#;
        assert!(ExperimentConfig::from_json(bad_id).is_err());
        let no_seed = r#"{"experiment_id": "E5_compact_normal", "operator_spec": {"kind": "diagonal", "entries": [1]},
            "datum_spec": {"kind": "ones"}, "window": {"n_max": 3}}"#;
        assert!(ExperimentConfig::from_json(no_seed).is_err());
    }

    #[test]
    fn shift_canonical_uses_sites() {
        let b = build_operator(&OperatorSpec::Shift { radius: 3, fill: ShiftFill::ZeroFill }, 0).unwrap();
        let g = build_datum(&DatumSpec::Canonical { index: -1 }, &b, 0).unwrap();
        assert_eq!(g.entries()[2], C64::new(1.0, 0.0));
        assert_eq!(b.weights.basis_id, "shift_zigzag");
        assert!(build_datum(&DatumSpec::Canonical { index: 4 }, &b, 0).is_err());
    }

    #[test]
    fn image_datum_applies_operator() {
        let b = build_operator(&OperatorSpec::Diagonal { entries: vec![Scalar::Real(2.0), Scalar::Real(3.0)] }, 0)
            .unwrap();
        let g = build_datum(&DatumSpec::Image { of: Box::new(DatumSpec::Ones) }, &b, 0).unwrap();
        assert_eq!(g.entries(), &[C64::new(2.0, 0.0), C64::new(3.0, 0.0)]);
    }

    #[test]
    fn prototype_formal_adjoint_sums_to_two() {
        let b = build_operator(
            &OperatorSpec::Prototype { modes: 16, length: two_pi(), c0: Scalar::Real(1.0), c_sin: 0.0, c_cos: 0.0 },
            0,
        )
        .unwrap();
        let at = b.formal_adjoint.unwrap();
        let sum = b.op.matrix() + at.matrix() - CMatrix::identity(16, 16) * C64::new(2.0, 0.0);
        assert!(sum.norm() < 1e-12);
    }

    #[test]
    fn random_operators_depend_on_seed_only() {
        let spec = OperatorSpec::Random { dim: 5, structure: RandomStructure::Spd { lo: 1.0, hi: 2.0 } };
        let a = build_operator(&spec, 11).unwrap();
        let b = build_operator(&spec, 11).unwrap();
        let c = build_operator(&spec, 12).unwrap();
        assert_eq!(a.op, b.op);
        assert_ne!(a.op, c.op);
        assert!(a.op.flags().positive && a.op.flags().self_adjoint);
    }

    #[test]
    fn fourier_datum_on_system_component() {
        let spec = OperatorSpec::Friedrichs1d {
            points: 8,
            length: two_pi(),
            b: vec![vec![Scalar::Real(1.0), Scalar::Real(0.0)], vec![Scalar::Real(0.0), Scalar::Real(-1.0)]],
            c: vec![vec![Scalar::Real(1.0), Scalar::Real(0.0)], vec![Scalar::Real(0.0), Scalar::Real(1.0)]],
            mu: 1.0,
        };
        let b = build_operator(&spec, 0).unwrap();
        let g = build_datum(
            &DatumSpec::FourierModes { modes: vec![FourierTerm { k: 1, amplitude: Scalar::Real(1.0) }], component: 1 },
            &b,
            0,
        )
        .unwrap();
        assert_eq!(g.dim(), 16);
        assert!(g.entries().iter().step_by(2).all(|z| z.norm() == 0.0));
        assert!((g.norm() - 1.0).abs() < 1e-14);
    }
}
