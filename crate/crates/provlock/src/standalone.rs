//! Standalone possible worlds and Γ-standalone-privacy for a single module
//! (optimization pipeline Step I).
//!
//! Worlds are enumerated as row-wise completions of the visible projection of
//! the module table: every row of the projection is completed on the hidden
//! attributes from their domains, and a completion is a world iff the result
//! satisfies the functional dependency `I → O`. This enumeration is the
//! oracle used throughout the test suite.

use std::collections::{BTreeSet, HashMap};
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AttrSet, ModuleTable, Relation, Tuple, Universe};

/// Per-module list of safe hidden subsets at a privacy target Γ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SafeCatalog {
    pub module: String,
    pub gamma: u64,
    /// Deterministically ordered: by size, then by ascending attribute index.
    pub subsets: Vec<AttrSet>,
}

/// Serialized form of a catalog (safe or UD-safe): attribute-name arrays.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogJson {
    pub module: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<u64>,
    pub subsets: Vec<Vec<String>>,
}

impl SafeCatalog {
    pub fn to_json(&self, u: &Universe) -> CatalogJson {
        CatalogJson {
            module: self.module.clone(),
            gamma: Some(self.gamma),
            subsets: self.subsets.iter().map(|s| u.names(*s)).collect(),
        }
    }
}

/// Visit every standalone possible world of `m` with hidden set `h`.
/// The visitor may stop the enumeration early with [`ControlFlow::Break`].
///
/// Identical relations reached through different row completions are visited
/// once each time they arise; callers needing distinct worlds should
/// deduplicate (as [`standalone_worlds`] does).
pub fn for_each_standalone_world<B>(
    u: &Universe,
    m: &ModuleTable,
    h: AttrSet,
    mut visit: impl FnMut(&Relation) -> ControlFlow<B>,
) -> Option<B> {
    let attrs = m.attrs();
    let h = h.inter(attrs);
    let visible = attrs.diff(h);
    // Distinct visible rows of the module relation, in deterministic order.
    let vis_rows: Vec<Tuple> = m.relation().project(visible).tuples().collect();
    // Completions of each visible row over the hidden attributes.
    let hidden_products = u.product(h);
    let candidates: Vec<Vec<Tuple>> = vis_rows
        .iter()
        .map(|vr| hidden_products.iter().map(|ht| vr.merge(ht)).collect())
        .collect();

    // Depth-first choice of one completion per row, pruning on the FD I → O.
    fn rec<B>(
        m: &ModuleTable,
        candidates: &[Vec<Tuple>],
        row_idx: usize,
        fd: &mut HashMap<Vec<u8>, Vec<u8>>,
        chosen: &mut Vec<Tuple>,
        visit: &mut impl FnMut(&Relation) -> ControlFlow<B>,
    ) -> ControlFlow<B> {
        if row_idx == candidates.len() {
            let world: Relation = chosen.iter().cloned().collect();
            return visit(&world);
        }
        for t in &candidates[row_idx] {
            let x = t.project(m.inputs).vals;
            let y = t.project(m.outputs).vals;
            let inserted = match fd.get(&x) {
                Some(prev) if *prev != y => continue,
                Some(_) => false,
                None => {
                    fd.insert(x.clone(), y.clone());
                    true
                }
            };
            chosen.push(t.clone());
            let flow = rec(m, candidates, row_idx + 1, fd, chosen, visit);
            chosen.pop();
            if inserted {
                fd.remove(&x);
            }
            flow?;
        }
        ControlFlow::Continue(())
    }

    match rec(m, &candidates, 0, &mut HashMap::new(), &mut Vec::new(), &mut visit) {
        ControlFlow::Break(b) => Some(b),
        ControlFlow::Continue(()) => None,
    }
}

/// All distinct standalone possible worlds, up to an optional cap.
pub fn standalone_worlds(
    u: &Universe,
    m: &ModuleTable,
    h: AttrSet,
    cap: Option<usize>,
) -> Vec<Relation> {
    let mut seen: BTreeSet<Vec<Vec<u8>>> = BTreeSet::new();
    let mut out = Vec::new();
    for_each_standalone_world(u, m, h, |world| {
        let key: Vec<Vec<u8>> = world.tuples().map(|t| t.vals).collect();
        if seen.insert(key) {
            out.push(world.clone());
            if cap.is_some_and(|c| out.len() >= c) {
                return ControlFlow::Break(());
            }
        }
        ControlFlow::<()>::Continue(())
    });
    out
}

/// `Out_{x,m,H}` (conjunctive form): the output tuples `y` such that some
/// world contains a row with input `x` and output `y`.
pub fn standalone_out(
    u: &Universe,
    m: &ModuleTable,
    x: &Tuple,
    h: AttrSet,
) -> Result<BTreeSet<Tuple>> {
    check_input(u, m, x)?;
    if h.inter(m.attrs()).is_subset(m.outputs) {
        // Output-only fast path: Out = { y : y ≡_h m(x) } — the hidden output
        // coordinates range freely, the visible ones are pinned to m(x).
        let z = m.eval(x);
        let hidden_out = h.inter(m.outputs);
        return Ok(u.product(hidden_out).iter().map(|ht| z.overwrite(hidden_out, ht)).collect());
    }
    let mut out = BTreeSet::new();
    for_each_standalone_world(u, m, h, |world| {
        for t in world.tuples() {
            if t.project(m.inputs) == *x {
                out.insert(t.project(m.outputs));
            }
        }
        ControlFlow::<()>::Continue(())
    });
    Ok(out)
}

/// Γ-standalone-privacy check: every input admits at least `gamma` possible
/// outputs over the worlds.
pub fn is_standalone_safe(u: &Universe, m: &ModuleTable, h: AttrSet, gamma: u64) -> bool {
    assert!(gamma >= 1, "privacy targets start at 1");
    if h.inter(m.attrs()).is_subset(m.outputs) {
        // Output-only fast path: |Out| = ∏_{a∈h∩O} |Δ_a| for every input.
        let count: u64 = h
            .inter(m.outputs)
            .iter()
            .map(|a| u.domain_size(a) as u64)
            .product();
        return count >= gamma;
    }
    // Mixed subsets: accumulate Out-sets for all inputs over one worlds pass,
    // stopping early once every input has reached the target.
    let inputs: Vec<Tuple> = m.io_rows().map(|(x, _)| x).collect();
    let mut outs: HashMap<Vec<u8>, BTreeSet<Vec<u8>>> =
        inputs.iter().map(|x| (x.vals.clone(), BTreeSet::new())).collect();
    let saturated = for_each_standalone_world(u, m, h, |world| {
        for t in world.tuples() {
            let x = t.project(m.inputs).vals;
            let y = t.project(m.outputs).vals;
            if let Some(set) = outs.get_mut(&x) {
                set.insert(y);
            }
        }
        if outs.values().all(|s| s.len() as u64 >= gamma) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    saturated.is_some() || outs.values().all(|s| s.len() as u64 >= gamma)
}

/// Enumerate all safe hidden subsets at target `gamma` (pipeline Step I).
/// With `outputs_only` (the default elsewhere) only subsets of `O_i` are
/// considered (hiding inputs is never required for standalone privacy).
/// The catalog keeps *all* safe subsets, not just minimum-cost ones.
pub fn enumerate_safe_subsets(
    u: &Universe,
    m: &ModuleTable,
    gamma: u64,
    outputs_only: bool,
) -> SafeCatalog {
    let pool = if outputs_only { m.outputs } else { m.attrs() };
    let subsets = pool
        .subsets()
        .into_iter()
        .filter(|&h| is_standalone_safe(u, m, h, gamma))
        .collect();
    SafeCatalog { module: m.id.clone(), gamma, subsets }
}

fn check_input(u: &Universe, m: &ModuleTable, x: &Tuple) -> Result<()> {
    if x.schema != m.inputs {
        return Err(Error::SchemaMismatch(format!(
            "module {}: input tuple schema differs from I",
            m.id
        )));
    }
    if !m.io_rows().any(|(xx, _)| xx == *x) {
        return Err(Error::InputNotInRelation(x.display(u)));
    }
    Ok(())
}
