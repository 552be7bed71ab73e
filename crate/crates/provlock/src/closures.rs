//! Public paths, public-closure, directed paths, downward-closure, and
//! single-predecessor classification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AttrIdx, AttrSet, Workflow};

/// Is there a directed public path from `a` to `b`? Both modules must be
/// public; a module reaches itself by the length-1 sequence.
pub fn directed_public_path(w: &Workflow, a: usize, b: usize) -> bool {
    debug_assert!(w.modules[a].is_public() && w.modules[b].is_public());
    let mut seen = vec![false; w.modules.len()];
    seen[a] = true;
    let mut frontier = vec![a];
    while let Some(i) = frontier.pop() {
        if i == b {
            return true;
        }
        for j in 0..w.modules.len() {
            if !seen[j]
                && w.modules[j].is_public()
                && !w.modules[i].outputs.inter(w.modules[j].inputs).is_empty()
            {
                seen[j] = true;
                frontier.push(j);
            }
        }
    }
    false
}

/// Is there an undirected public path from `a` to `b` (public modules chained
/// by shared attributes, in either direction)?
pub fn undirected_public_path(w: &Workflow, a: usize, b: usize) -> bool {
    debug_assert!(w.modules[a].is_public() && w.modules[b].is_public());
    let mut seen = vec![false; w.modules.len()];
    seen[a] = true;
    let mut frontier = vec![a];
    while let Some(i) = frontier.pop() {
        if i == b {
            return true;
        }
        for j in 0..w.modules.len() {
            if !seen[j]
                && w.modules[j].is_public()
                && !w.modules[i].attrs().inter(w.modules[j].attrs()).is_empty()
            {
                seen[j] = true;
                frontier.push(j);
            }
        }
    }
    false
}

/// The public-closure `C(h)`: all public modules reachable from some
/// attribute of `h` by an undirected public path. `h` must consist of output
/// attributes of a single private module. The result is in topological order.
pub fn public_closure(w: &Workflow, h: AttrSet) -> Result<Vec<usize>> {
    check_private_outputs(w, h)?;
    Ok(public_closure_unchecked(w, h))
}

/// Closure reachability without the ownership precondition (used internally
/// where the caller has already validated `h`).
pub(crate) fn public_closure_unchecked(w: &Workflow, h: AttrSet) -> Vec<usize> {
    let mut member = vec![false; w.modules.len()];
    let mut frontier = Vec::new();
    for (j, m) in w.modules.iter().enumerate() {
        if m.is_public() && !m.attrs().inter(h).is_empty() {
            member[j] = true;
            frontier.push(j);
        }
    }
    while let Some(i) = frontier.pop() {
        for j in 0..w.modules.len() {
            if !member[j]
                && w.modules[j].is_public()
                && !w.modules[i].attrs().inter(w.modules[j].attrs()).is_empty()
            {
                member[j] = true;
                frontier.push(j);
            }
        }
    }
    w.topo.iter().copied().filter(|&j| member[j]).collect()
}

/// The downward-closure `D(h)`: every module (public or private) that some
/// attribute of `h` has a directed path to — its direct consumers and all
/// their directed descendants. Topological order.
pub fn downward_closure(w: &Workflow, h: AttrSet) -> Vec<usize> {
    let mut member = vec![false; w.modules.len()];
    let mut frontier = Vec::new();
    for (j, m) in w.modules.iter().enumerate() {
        if !m.inputs.inter(h).is_empty() {
            member[j] = true;
            frontier.push(j);
        }
    }
    while let Some(i) = frontier.pop() {
        for j in 0..w.modules.len() {
            if !member[j] && !w.modules[i].outputs.inter(w.modules[j].inputs).is_empty() {
                member[j] = true;
                frontier.push(j);
            }
        }
    }
    w.topo.iter().copied().filter(|&j| member[j]).collect()
}

/// Which single-predecessor condition a workflow violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    /// An attribute is input to two different modules.
    DataSharing,
    /// A closure public module has no private module with a directed public
    /// path to it.
    NoDirectedPath,
    /// A closure public module is reachable by directed public paths from
    /// more than one private module.
    MultiplePrivatePredecessors,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// The offending attribute or module name.
    pub witness: String,
}

/// Result of single-predecessor classification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub is_single_predecessor: bool,
    pub violations: Vec<Violation>,
}

/// Does the private module `p` have a directed public path to the public
/// module `j`: a public consumer of `p`'s outputs with a directed public path
/// to `j` (including the length-1 case)?
pub fn private_reaches_public(w: &Workflow, p: usize, j: usize) -> bool {
    debug_assert!(!w.modules[p].is_public() && w.modules[j].is_public());
    (0..w.modules.len()).any(|k| {
        w.modules[k].is_public()
            && !w.modules[p].outputs.inter(w.modules[k].inputs).is_empty()
            && directed_public_path(w, k, j)
    })
}

/// Check the two single-predecessor conditions: no data sharing, and every
/// public module in some private module's public-closure has exactly one
/// private module with a directed public path to it — the closure's owner.
pub fn classify_single_predecessor(w: &Workflow) -> Classification {
    let mut violations = Vec::new();

    // (1) No data sharing: each attribute feeds at most one module.
    let mut consumed = AttrSet::EMPTY;
    let mut shared = AttrSet::EMPTY;
    for m in &w.modules {
        shared = shared.union(consumed.inter(m.inputs));
        consumed = consumed.union(m.inputs);
    }
    for a in shared.iter() {
        violations.push(Violation {
            kind: ViolationKind::DataSharing,
            witness: w.universe.name(a).to_string(),
        });
    }

    // (2) For every closure public module, exactly one private predecessor,
    // and it is the owner of the closure.
    let privates: Vec<usize> = (0..w.modules.len())
        .filter(|&i| !w.modules[i].is_public())
        .collect();
    for &i in &privates {
        for j in public_closure_unchecked(w, w.modules[i].outputs) {
            let preds: Vec<usize> = privates
                .iter()
                .copied()
                .filter(|&p| private_reaches_public(w, p, j))
                .collect();
            let witness = w.modules[j].id.clone();
            let violation = match preds.as_slice() {
                [] => Some(ViolationKind::NoDirectedPath),
                [p] if *p != i => Some(ViolationKind::NoDirectedPath),
                [_] => None,
                _ => Some(ViolationKind::MultiplePrivatePredecessors),
            };
            if let Some(kind) = violation {
                let v = Violation { kind, witness };
                if !violations.contains(&v) {
                    violations.push(v);
                }
            }
        }
    }

    Classification { is_single_predecessor: violations.is_empty(), violations }
}

fn check_private_outputs(w: &Workflow, h: AttrSet) -> Result<()> {
    for a in h.iter() {
        match h_owner(w, a) {
            Some(i) if !w.modules[i].is_public() && owner_consistent(w, h, i) => {}
            _ => {
                return Err(Error::NotOutputOfPrivate(w.universe.name(a).to_string()));
            }
        }
    }
    Ok(())
}

fn h_owner(w: &Workflow, a: AttrIdx) -> Option<usize> {
    w.producer_of(a)
}

fn owner_consistent(w: &Workflow, h: AttrSet, i: usize) -> bool {
    h.is_subset(w.modules[i].outputs)
}
