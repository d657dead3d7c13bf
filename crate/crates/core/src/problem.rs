//! On-disk problem description and its assembly into solver inputs.
//!
//! Problems are JSON documents naming the variables, the objective
//! expressions, the dual generators of the ordering cone, the feasible set,
//! a starting point, and an optional block of solver parameter overrides.
//! Box bounds use `null` for an unbounded side, since JSON has no infinity
//! literal.

use crate::cone::{ConeError, ConeOrder};
use crate::function::{FunctionError, VectorFunction};
use crate::set::{FeasibleSet, SetError};
use crate::solver::{ConfigError, SolverConfig};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

/// Failures reading, writing, or assembling a problem file.
#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("cannot access problem file: {0}")]
    Io(#[from] std::io::Error),
    #[error("problem file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("problem pieces disagree: {detail}")]
    Shape { detail: String },
}

/// Serialized feasible set. `Box` sides use `null` per coordinate for an
/// unbounded direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FeasibleSetSpec {
    WholeSpace { dim: usize },
    Box {
        lower: Vec<Option<f64>>,
        upper: Vec<Option<f64>>,
    },
    Ball { center: Vec<f64>, radius: f64 },
    Simplex { dim: usize, scale: f64 },
}

impl FeasibleSetSpec {
    pub fn to_set(&self) -> Result<FeasibleSet, SetError> {
        match self {
            FeasibleSetSpec::WholeSpace { dim } => Ok(FeasibleSet::whole_space(*dim)),
            FeasibleSetSpec::Box { lower, upper } => {
                let lo = lower.iter().map(|b| b.unwrap_or(f64::NEG_INFINITY)).collect();
                let hi = upper.iter().map(|b| b.unwrap_or(f64::INFINITY)).collect();
                FeasibleSet::bounded_box(lo, hi)
            }
            FeasibleSetSpec::Ball { center, radius } => {
                FeasibleSet::ball(center.clone(), *radius)
            }
            FeasibleSetSpec::Simplex { dim, scale } => FeasibleSet::simplex(*dim, *scale),
        }
    }

    pub fn from_set(set: &FeasibleSet) -> Self {
        let finite = |v: f64| v.is_finite().then_some(v);
        match set {
            FeasibleSet::WholeSpace { dim } => FeasibleSetSpec::WholeSpace { dim: *dim },
            FeasibleSet::Box { lower, upper } => FeasibleSetSpec::Box {
                lower: lower.iter().map(|&b| finite(b)).collect(),
                upper: upper.iter().map(|&b| finite(b)).collect(),
            },
            FeasibleSet::Ball { center, radius } => FeasibleSetSpec::Ball {
                center: center.clone(),
                radius: *radius,
            },
            FeasibleSet::Simplex { dim, scale } => FeasibleSetSpec::Simplex {
                dim: *dim,
                scale: *scale,
            },
        }
    }
}

/// Optional overrides applied on top of [`SolverConfig::default`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamPatch {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_hat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_stat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_backtracks: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fw_max_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fw_gap_tol: Option<f64>,
}

impl ParamPatch {
    /// Applies the overrides to a base configuration without validating;
    /// validation happens when the config is used.
    pub fn apply(&self, base: &SolverConfig) -> SolverConfig {
        SolverConfig {
            beta_hat: self.beta_hat.unwrap_or(base.beta_hat),
            delta: self.delta.unwrap_or(base.delta),
            tau: self.tau.unwrap_or(base.tau),
            sigma: self.sigma.unwrap_or(base.sigma),
            eps_stat: self.eps_stat.unwrap_or(base.eps_stat),
            order_tol: self.order_tol.unwrap_or(base.order_tol),
            max_iter: self.max_iter.unwrap_or(base.max_iter),
            max_backtracks: self.max_backtracks.unwrap_or(base.max_backtracks),
            fw_max_iters: self.fw_max_iters.unwrap_or(base.fw_max_iters),
            fw_gap_tol: self.fw_gap_tol.unwrap_or(base.fw_gap_tol),
        }
    }
}

/// The JSON document describing one problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub name: String,
    pub variables: Vec<String>,
    pub objectives: Vec<String>,
    pub cone_dual_generators: Vec<Vec<f64>>,
    pub feasible_set: FeasibleSetSpec,
    pub x0: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamPatch>,
}

/// Everything [`crate::solver::solve`] needs, built from a [`ProblemFile`].
#[derive(Debug)]
pub struct AssembledProblem {
    pub name: String,
    pub function: VectorFunction,
    pub cone: ConeOrder,
    pub set: FeasibleSet,
    pub x0: Vec<f64>,
    pub config: SolverConfig,
}

impl ProblemFile {
    pub fn read(path: &Path) -> Result<Self, ProblemError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), ProblemError> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    /// Parses the expressions, builds the cone and set, patches the default
    /// configuration, and cross-checks all dimensions.
    pub fn assemble(&self) -> Result<AssembledProblem, ProblemError> {
        let function = VectorFunction::from_expressions(&self.variables, &self.objectives)?;
        let cone = ConeOrder::new(function.m(), &self.cone_dual_generators)?;
        let set = self.feasible_set.to_set()?;
        if set.dim() != function.n() {
            return Err(ProblemError::Shape {
                detail: format!(
                    "feasible set lives in dimension {} but there are {} variables",
                    set.dim(),
                    function.n()
                ),
            });
        }
        if self.x0.len() != function.n() {
            return Err(ProblemError::Shape {
                detail: format!(
                    "x0 has length {} but there are {} variables",
                    self.x0.len(),
                    function.n()
                ),
            });
        }
        let config = self
            .params
            .as_ref()
            .map(|patch| patch.apply(&SolverConfig::default()))
            .unwrap_or_default();
        config.validate()?;
        Ok(AssembledProblem {
            name: self.name.clone(),
            function,
            cone,
            set,
            x0: self.x0.clone(),
            config,
        })
    }

    /// Snapshot of a built-in registry problem in file form.
    pub fn from_registry(problem: &crate::registry::RegistryProblem) -> Self {
        ProblemFile {
            name: problem.name.to_string(),
            variables: problem.function.variable_names(),
            objectives: problem
                .function
                .objective_texts()
                .expect("registry problems are expression-based"),
            cone_dual_generators: problem.cone.generators().to_vec(),
            feasible_set: FeasibleSetSpec::from_set(&problem.set),
            x0: problem.x0.clone(),
            params: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::registry_problem;
    use crate::solver::{solve, SolveStatus};

    fn sample_file() -> ProblemFile {
        ProblemFile {
            name: "sample".into(),
            variables: vec!["x".into()],
            objectives: vec!["x^2".into(), "(x - 2)^2".into()],
            cone_dual_generators: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            feasible_set: FeasibleSetSpec::Box {
                lower: vec![None],
                upper: vec![Some(3.0)],
            },
            x0: vec![3.0],
            params: Some(ParamPatch {
                sigma: Some(0.2),
                max_iter: Some(77),
                ..ParamPatch::default()
            }),
        }
    }

    #[test]
    fn json_round_trip_preserves_everything() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sample.json");
        let original = sample_file();
        original.write(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"cone_dual_generators\""));
        assert!(text.contains("null"), "open bound should serialize as null");
        let reread = ProblemFile::read(&path).unwrap();
        assert_eq!(original, reread);
    }

    #[test]
    fn assembly_patches_the_default_config() {
        let assembled = sample_file().assemble().unwrap();
        assert_eq!(assembled.config.sigma, 0.2);
        assert_eq!(assembled.config.max_iter, 77);
        assert_eq!(assembled.config.delta, SolverConfig::default().delta);
        assert_eq!(assembled.function.m(), 2);
        let unbounded = match &assembled.set {
            FeasibleSet::Box { lower, .. } => lower[0],
            other => panic!("expected a box, got {other:?}"),
        };
        assert_eq!(unbounded, f64::NEG_INFINITY);
    }

    #[test]
    fn assembled_problems_solve() {
        let assembled = sample_file().assemble().unwrap();
        let result = solve(
            &assembled.cone,
            &assembled.function,
            &assembled.set,
            &assembled.x0,
            &assembled.config,
        )
        .unwrap();
        assert_eq!(result.status, SolveStatus::Stationary);
        assert_eq!(result.x_final, vec![2.0]);
    }

    #[test]
    fn shape_and_content_errors_are_reported() {
        let mut bad = sample_file();
        bad.x0 = vec![1.0, 2.0];
        assert!(matches!(bad.assemble(), Err(ProblemError::Shape { .. })));

        let mut bad = sample_file();
        bad.objectives = vec!["x^2 +".into(), "x".into()];
        assert!(matches!(bad.assemble(), Err(ProblemError::Function(_))));

        let mut bad = sample_file();
        bad.cone_dual_generators = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
        assert!(matches!(bad.assemble(), Err(ProblemError::Cone(_))));

        let mut bad = sample_file();
        bad.params = Some(ParamPatch {
            sigma: Some(1.5),
            ..ParamPatch::default()
        });
        assert!(matches!(bad.assemble(), Err(ProblemError::Config(_))));

        let mut bad = sample_file();
        bad.feasible_set = FeasibleSetSpec::Ball {
            center: vec![0.0, 0.0],
            radius: 1.0,
        };
        assert!(matches!(bad.assemble(), Err(ProblemError::Shape { .. })));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{
            "name": "x", "variables": ["x"], "objectives": ["x^2"],
            "cone_dual_generators": [[1.0]],
            "feasible_set": {"type": "whole_space", "dim": 1},
            "x0": [0.0], "unexpected": 1
        }"#;
        assert!(serde_json::from_str::<ProblemFile>(text).is_err());
        let text = r#"{
            "name": "x", "variables": ["x"], "objectives": ["x^2"],
            "cone_dual_generators": [[1.0]],
            "feasible_set": {"type": "whole_space", "dim": 1},
            "x0": [0.0], "params": {"stepsize": 0.1}
        }"#;
        assert!(serde_json::from_str::<ProblemFile>(text).is_err());
    }

    #[test]
    fn registry_snapshots_assemble_to_the_same_problem() {
        for (name, _) in crate::registry::registry_names() {
            let built = registry_problem(name).unwrap();
            let file = ProblemFile::from_registry(&built);
            let assembled = file.assemble().unwrap();
            assert_eq!(assembled.function.n(), built.function.n());
            assert_eq!(assembled.function.m(), built.function.m());
            // Generators pass through one extra normalization on re-assembly,
            // which can perturb the last bit.
            for (a, b) in assembled
                .cone
                .generators()
                .iter()
                .zip(built.cone.generators())
            {
                for (ai, bi) in a.iter().zip(b) {
                    assert!((ai - bi).abs() <= 1e-15, "generator drift: {ai} vs {bi}");
                }
            }
            assert_eq!(assembled.x0, built.x0);
            let x = &built.x0;
            assert_eq!(
                assembled.function.eval(x).unwrap(),
                built.function.eval(x).unwrap()
            );
        }
    }
}
