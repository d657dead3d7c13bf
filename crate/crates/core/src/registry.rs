//! Built-in benchmark problems with documented stationary sets.
//!
//! These cover every feasible-set variant and both the classical single
//! objective setting and genuinely vector-ordered ones, so tests and the CLI
//! have known ground truth to check against.

use crate::cone::ConeOrder;
use crate::function::VectorFunction;
use crate::set::FeasibleSet;
use thiserror::Error;

/// Lookup failures for the built-in problem registry.
#[derive(Debug, Error, PartialEq)]
pub enum RegistryError {
    #[error("no built-in problem named '{name}'")]
    NotFound { name: String },
}

/// A fully assembled built-in problem.
#[derive(Debug)]
pub struct RegistryProblem {
    pub name: &'static str,
    pub description: &'static str,
    /// Human-readable description of the exact stationary set.
    pub stationary_set: &'static str,
    pub function: VectorFunction,
    pub cone: ConeOrder,
    pub set: FeasibleSet,
    pub x0: Vec<f64>,
}

struct Entry {
    name: &'static str,
    description: &'static str,
    stationary_set: &'static str,
    variables: &'static [&'static str],
    objectives: &'static [&'static str],
    dual_generators: &'static [&'static [f64]],
    build_set: fn() -> FeasibleSet,
    x0: &'static [f64],
}

const ENTRIES: &[Entry] = &[
    Entry {
        name: "double_well",
        description: "double-well quartic paired with a centered quadratic under a skewed plane cone on [-3, 3]; \
                      the quartic scalarization is extremely flat near the solution",
        stationary_set: "{0}",
        variables: &["t"],
        objectives: &["4*t^2", "t^4 - 4*t^2 + 2"],
        dual_generators: &[&[1.0, 0.0], &[1.0, 1.0]],
        build_set: || FeasibleSet::bounded_box(vec![-3.0], vec![3.0]).expect("static bounds"),
        x0: &[3.0],
    },
    Entry {
        name: "pareto_quad2",
        description: "two shifted parabolas under the componentwise order on the real line",
        stationary_set: "the interval [0, 2]",
        variables: &["x"],
        objectives: &["x^2", "(x - 2)^2"],
        dual_generators: &[&[1.0, 0.0], &[0.0, 1.0]],
        build_set: || FeasibleSet::whole_space(1),
        x0: &[3.0],
    },
    Entry {
        name: "scalar_quad",
        description: "single quadratic objective, the classical projected gradient setting",
        stationary_set: "{0}",
        variables: &["x"],
        objectives: &["x^2"],
        dual_generators: &[&[1.0]],
        build_set: || FeasibleSet::whole_space(1),
        x0: &[3.7],
    },
    Entry {
        name: "pareto_quad2d",
        description: "two planar quadratic bowls under the componentwise order on a box",
        stationary_set: "the segment from (0, 0) to (2, 1)",
        variables: &["x", "y"],
        objectives: &["x^2 + y^2", "(x - 2)^2 + (y - 1)^2"],
        dual_generators: &[&[1.0, 0.0], &[0.0, 1.0]],
        build_set: || {
            FeasibleSet::bounded_box(vec![-5.0, -5.0], vec![5.0, 5.0]).expect("static bounds")
        },
        x0: &[4.0, -3.0],
    },
    Entry {
        name: "ball_quad2",
        description: "two planar quadratic bowls with centers outside the unit ball",
        stationary_set: "the unit-circle arc from (1, 0) to (0, 1)",
        variables: &["x", "y"],
        objectives: &["(x - 2)^2 + y^2", "x^2 + (y - 2)^2"],
        dual_generators: &[&[1.0, 0.0], &[0.0, 1.0]],
        build_set: || FeasibleSet::ball(vec![0.0, 0.0], 1.0).expect("static radius"),
        x0: &[0.0, 0.0],
    },
];

fn build(entry: &Entry) -> RegistryProblem {
    let variables: Vec<String> = entry.variables.iter().map(|s| s.to_string()).collect();
    let objectives: Vec<String> = entry.objectives.iter().map(|s| s.to_string()).collect();
    let function = VectorFunction::from_expressions(&variables, &objectives)
        .expect("built-in expressions parse");
    let generators: Vec<Vec<f64>> = entry.dual_generators.iter().map(|g| g.to_vec()).collect();
    let cone = ConeOrder::new(entry.dual_generators[0].len(), &generators)
        .expect("built-in cones validate");
    RegistryProblem {
        name: entry.name,
        description: entry.description,
        stationary_set: entry.stationary_set,
        function,
        cone,
        set: (entry.build_set)(),
        x0: entry.x0.to_vec(),
    }
}

/// All built-in problems.
pub fn builtin_registry() -> Vec<RegistryProblem> {
    ENTRIES.iter().map(build).collect()
}

/// Names and descriptions, in registry order.
pub fn registry_names() -> Vec<(&'static str, &'static str)> {
    ENTRIES.iter().map(|e| (e.name, e.description)).collect()
}

/// Looks up one built-in problem by name.
pub fn registry_problem(name: &str) -> Result<RegistryProblem, RegistryError> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .map(build)
        .ok_or_else(|| RegistryError::NotFound {
            name: name.to_string(),
        })
}
