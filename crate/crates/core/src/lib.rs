//! Formal abductive and contrastive explanations for tree classifiers.
//!
//! An abductive explanation (AXp) of a prediction is a subset-minimal set of
//! the instance's feature values that forces the prediction on its own. A
//! contrastive explanation (CXp) is a subset-minimal set of feature values
//! that, once released, lets the prediction change. Each family is exactly
//! the set of minimal hitting sets of the other, which the enumeration
//! engine exploits and [`duality::verify_duality`] checks.
//!
//! ```
//! use xdual_core::{explain, fixtures, Oracle, ExplanationProblem};
//!
//! let model = fixtures::poole();
//! let problem = ExplanationProblem::new(&model, fixtures::e2()).unwrap();
//! let mut oracle = Oracle::new(&model);
//! let axp = explain::extract_axp(&problem, &mut oracle, None).unwrap();
//! assert_eq!(model.space().format_literals(axp.literals()), "{T=new, L=short}");
//! ```

pub mod brute;
pub mod budget;
pub mod duality;
pub mod enumerate;
pub mod error;
pub mod explain;
pub mod fixtures;
pub mod hitting_set;
pub mod io;
pub mod model;
pub mod oracle;
pub mod stats;
pub mod synth;

pub use budget::Budget;
pub use error::{Error, Result};
pub use explain::{Axp, Cxp, CxpWitness, ExplanationProblem};
pub use model::{
    ClassLabel, Classifier, FeatureSpace, Instance, Literal, Model, PartialAssignment,
};
pub use oracle::{Oracle, OracleStats};
