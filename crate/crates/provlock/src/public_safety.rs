//! D-safe / U-safe / UD-safe decision procedures for public modules,
//! UD-safe enumeration by a grouping/counting algorithm, and composite
//! public modules (optimization pipeline Step II).

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{AttrSet, ModuleTable, Relation, Tuple, Universe, Workflow};
use crate::standalone::CatalogJson;

/// A uniform input/output view of a module or a composite: the function as
/// explicit `(input, output)` rows. Safety predicates operate on this view.
#[derive(Clone, Debug)]
pub struct ModuleView {
    pub id: String,
    pub inputs: AttrSet,
    pub outputs: AttrSet,
    pub rows: Vec<(Tuple, Tuple)>,
}

impl ModuleView {
    pub fn of(m: &ModuleTable) -> ModuleView {
        ModuleView {
            id: m.id.clone(),
            inputs: m.inputs,
            outputs: m.outputs,
            rows: m.io_rows().collect(),
        }
    }

    pub fn attrs(&self) -> AttrSet {
        self.inputs.union(self.outputs)
    }

    /// Apply the (materialized) function to an input tuple.
    pub fn eval(&self, x: &Tuple) -> Result<Tuple> {
        self.rows
            .iter()
            .find(|(xx, _)| xx == x)
            .map(|(_, y)| y.clone())
            .ok_or_else(|| Error::SchemaMismatch(format!("{}: input outside the table", self.id)))
    }
}

/// Per-module list of UD-safe hidden subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UDSafeCatalog {
    pub module: String,
    /// Deterministically ordered: by size, then by ascending attribute index.
    pub subsets: Vec<AttrSet>,
}

impl UDSafeCatalog {
    pub fn to_json(&self, u: &Universe) -> CatalogJson {
        CatalogJson {
            module: self.module.clone(),
            gamma: None,
            subsets: self.subsets.iter().map(|s| u.names(*s)).collect(),
        }
    }
}

/// Downstream-safety: inputs equivalent modulo `h` map to outputs equivalent
/// modulo `h`.
pub fn is_dsafe(m: &ModuleView, h: AttrSet) -> bool {
    let vis_in = m.inputs.diff(h);
    let vis_out = m.outputs.diff(h);
    for (x1, y1) in &m.rows {
        for (x2, y2) in &m.rows {
            if x1.project(vis_in) == x2.project(vis_in) && y1.project(vis_out) != y2.project(vis_out)
            {
                return false;
            }
        }
    }
    true
}

/// Upstream-safety: outputs equivalent modulo `h` arise only from inputs
/// equivalent modulo `h`.
pub fn is_usafe(m: &ModuleView, h: AttrSet) -> bool {
    let vis_in = m.inputs.diff(h);
    let vis_out = m.outputs.diff(h);
    for (x1, y1) in &m.rows {
        for (x2, y2) in &m.rows {
            if y1.project(vis_out) == y2.project(vis_out) && x1.project(vis_in) != x2.project(vis_in)
            {
                return false;
            }
        }
    }
    true
}

/// UD-safety: both downstream- and upstream-safe.
pub fn is_udsafe(m: &ModuleView, h: AttrSet) -> bool {
    is_dsafe(m, h) && is_usafe(m, h)
}

/// Enumerate all UD-safe hidden subsets of a module by grouping and
/// counting: for each subset, downstream-safety is decided by grouping rows
/// on visible inputs and requiring a constant visible output per group;
/// upstream-safety then reduces to comparing the number of distinct visible
/// inputs with the number of distinct visible outputs.
///
/// The trivial subset `A_j` is always a member.
pub fn enumerate_udsafe(m: &ModuleView) -> UDSafeCatalog {
    let subsets = m
        .attrs()
        .subsets()
        .into_iter()
        .filter(|&h| udsafe_by_counting(m, h))
        .collect();
    UDSafeCatalog { module: m.id.clone(), subsets }
}

/// Enumerate all D-safe hidden subsets (used by the general-workflow route,
/// where downstream-safety alone suffices).
pub fn enumerate_dsafe(m: &ModuleView) -> UDSafeCatalog {
    let subsets = m
        .attrs()
        .subsets()
        .into_iter()
        .filter(|&h| is_dsafe(m, h))
        .collect();
    UDSafeCatalog { module: m.id.clone(), subsets }
}

fn udsafe_by_counting(m: &ModuleView, h: AttrSet) -> bool {
    let vis_in = m.inputs.diff(h);
    let vis_out = m.outputs.diff(h);
    // Group rows on the visible input part; downstream-safety requires the
    // visible output part to be constant within every group.
    let mut groups: BTreeMap<Vec<u8>, BTreeSet<Vec<u8>>> = BTreeMap::new();
    for (x, y) in &m.rows {
        groups
            .entry(x.project(vis_in).vals)
            .or_default()
            .insert(y.project(vis_out).vals);
    }
    if groups.values().any(|outs| outs.len() > 1) {
        return false;
    }
    // Upstream-safety: the visible input → visible output map (well-defined
    // once D-safe) must be injective, i.e. n1 distinct visible inputs produce
    // n2 = n1 distinct visible outputs.
    let n1 = groups.len();
    let n2 = groups
        .values()
        .flat_map(|outs| outs.iter().cloned())
        .collect::<BTreeSet<_>>()
        .len();
    n1 == n2
}

/// A virtual composite module encapsulating a connected public sub-workflow.
#[derive(Clone, Debug)]
pub struct CompositeModule {
    /// Member module indices within the owning workflow.
    pub members: Vec<usize>,
    /// Boundary inputs: attributes entering from outside the members.
    pub inputs: AttrSet,
    /// Boundary outputs: member outputs leaving the members or final.
    pub outputs: AttrSet,
    /// The composite as a function over the boundary, materialized by forward
    /// evaluation over the product of the boundary-input domains.
    pub view: ModuleView,
    /// The joined relation over all member attributes.
    pub relation: Relation,
}

/// Build the composite module for the given public members. Members
/// must be public and connected by shared attributes.
pub fn compose_public(w: &Workflow, member_ids: &[&str]) -> Result<CompositeModule> {
    let mut members = Vec::new();
    for id in member_ids {
        let i = w.module_idx(id)?;
        if !w.modules[i].is_public() {
            return Err(Error::NonPublicMember(id.to_string()));
        }
        members.push(i);
    }
    members.sort_unstable();
    members.dedup();
    if members.is_empty() {
        return Err(Error::NotConnected("empty member list".into()));
    }
    // Undirected connectivity via shared attributes.
    let mut reached = vec![false; members.len()];
    reached[0] = true;
    let mut frontier = vec![0usize];
    while let Some(k) = frontier.pop() {
        for (l, r) in reached.iter_mut().enumerate() {
            if !*r
                && !w.modules[members[k]]
                    .attrs()
                    .inter(w.modules[members[l]].attrs())
                    .is_empty()
            {
                *r = true;
                frontier.push(l);
            }
        }
    }
    if !reached.iter().all(|&r| r) {
        return Err(Error::NotConnected(member_ids.join(",")));
    }

    let produced: AttrSet = members
        .iter()
        .fold(AttrSet::EMPTY, |s, &i| s.union(w.modules[i].outputs));
    let consumed: AttrSet = members
        .iter()
        .fold(AttrSet::EMPTY, |s, &i| s.union(w.modules[i].inputs));
    let inputs = consumed.diff(produced);
    // An output leaves the composite if some non-member consumes it or no
    // module consumes it (final output).
    let outputs: AttrSet = produced
        .iter()
        .filter(|&a| {
            let consumers = w.consumers_of(a);
            consumers.is_empty() || consumers.iter().any(|c| !members.contains(c))
        })
        .collect();

    // Forward-evaluate the members in topological order over the boundary
    // input product.
    let order: Vec<usize> = w.topo.iter().copied().filter(|i| members.contains(i)).collect();
    let mut rows = Vec::new();
    let mut relation = Relation::new(produced.union(consumed));
    for x in w.universe.product(inputs) {
        let mut full = x.clone();
        for &i in &order {
            let m = &w.modules[i];
            let y = m.eval(&full.project(m.inputs));
            full = full.merge(&y);
        }
        rows.push((x, full.project(outputs)));
        relation.insert(full);
    }
    let id = format!(
        "composite({})",
        members
            .iter()
            .map(|&i| w.modules[i].id.as_str())
            .collect::<Vec<_>>()
            .join(",")
    );
    let view = ModuleView { id, inputs, outputs, rows };
    Ok(CompositeModule { members, inputs, outputs, view, relation })
}
