//! Module-privacy analysis for provenance views of data-processing
//! workflows.
//!
//! A workflow is a DAG of *modules* — finite total functions over named
//! attributes — wired together by shared attribute names. Its provenance is
//! the relation obtained by running every initial input through the DAG.
//! Publishing a *view* of that relation (a projection that hides a set `H`
//! of attribute columns) leaks information about the private modules: an
//! observer can consider every *possible world* — every relation that agrees
//! with the view on the visible columns, satisfies each module's functional
//! dependency, and reproduces each public module's known behavior — and ask
//! which input/output behaviors remain plausible.
//!
//! This crate provides:
//!
//! * exact possible-worlds oracles and Γ-privacy checks for a module in
//!   isolation ([`standalone`]) and within a workflow ([`privacy`]);
//! * the downstream/upstream safety conditions on public modules and their
//!   enumeration ([`public_safety`]);
//! * public/downward closures and the single-predecessor workflow
//!   classification ([`closures`]);
//! * theorem-backed assembly of workflow hidden sets from per-module safe
//!   subsets, with constructive witness worlds ([`privacy`]);
//! * minimum-cost hidden-set optimization over chain, tree and general DAG
//!   closures ([`optimize`]);
//! * a JSON workflow format and bundled example fixtures ([`model`],
//!   [`fixtures`]).

pub mod closures;
pub mod equiv;
pub mod error;
pub mod fixtures;
pub mod model;
pub mod optimize;
pub mod privacy;
pub mod public_safety;
pub mod standalone;

pub use error::{Error, PlanCondition, Result};
pub use model::{
    build_workflow, workflow_to_spec, AttrSet, CostModel, CostScalar, DomainValue, ModuleTable,
    Relation, Tuple, Universe, Visibility, Workflow, WorkflowSpec,
};
