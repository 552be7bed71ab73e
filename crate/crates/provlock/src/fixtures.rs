//! Bundled example workflows used by the test suite and the `reproduce`
//! command.

use crate::error::{Error, Result};
use crate::model::{build_workflow, Workflow, WorkflowSpec};

/// Bundled fixture files, keyed by name.
pub const FIXTURES: &[(&str, &str)] = &[
    ("fig1-m1", include_str!("../fixtures/fig1-m1.json")),
    ("fig3-r1", include_str!("../fixtures/fig3-r1.json")),
    ("fig3-r2", include_str!("../fixtures/fig3-r2.json")),
    ("wb-chain", include_str!("../fixtures/wb-chain.json")),
    ("wa-nopred", include_str!("../fixtures/wa-nopred.json")),
    ("app-multipred", include_str!("../fixtures/app-multipred.json")),
    ("app-datashare", include_str!("../fixtures/app-datashare.json")),
    ("fig2-singlepred", include_str!("../fixtures/fig2-singlepred.json")),
];

pub fn fixture_names() -> Vec<&'static str> {
    FIXTURES.iter().map(|(n, _)| *n).collect()
}

/// Raw JSON of a bundled fixture.
pub fn fixture_json(name: &str) -> Result<&'static str> {
    FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, j)| *j)
        .ok_or_else(|| Error::Parse(format!("unknown fixture {name}")))
}

/// Parsed spec of a bundled fixture.
pub fn fixture_spec(name: &str) -> Result<WorkflowSpec> {
    WorkflowSpec::from_json(fixture_json(name)?)
}

/// Validated workflow of a bundled fixture.
pub fn fixture_workflow(name: &str) -> Result<Workflow> {
    build_workflow(&fixture_spec(name)?)
}
