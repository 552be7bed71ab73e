//! Workflow possible worlds, Γ-workflow-privacy, theorem-based hidden-set
//! assembly, and constructive witness worlds.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::closures::{classify_single_predecessor, downward_closure, public_closure_unchecked};
use crate::equiv::{eflip, equiv, flip};
use crate::error::{Error, PlanCondition, Result};
use crate::model::{AttrSet, Relation, Tuple, Universe, Workflow};
use crate::public_safety::{compose_public, is_dsafe, is_udsafe, ModuleView};
use crate::standalone::is_standalone_safe;

// ---------------------------------------------------------------------------
// Possible worlds of a workflow relation
// ---------------------------------------------------------------------------

/// Visit every possible world of the workflow relation `r` with hidden set
/// `h`: every row-wise completion of the distinct visible rows of
/// `π_{A∖H}(r)` that satisfies all functional dependencies `I_i → O_i` and
/// reproduces every public module's behavior on every row.
pub fn for_each_workflow_world<B>(
    r: &Relation,
    w: &Workflow,
    h: AttrSet,
    visit: impl FnMut(&Relation) -> ControlFlow<B>,
) -> Option<B> {
    let h = h.inter(r.schema);
    let visible = r.schema.diff(h);
    let vis_rows: Vec<Tuple> = r.project(visible).tuples().collect();
    let hidden_products = w.universe.product(h);
    // Candidate completions per visible row, pre-filtered on the public
    // modules: a world row must reproduce every public module exactly.
    let candidates: Vec<Vec<Tuple>> = vis_rows
        .iter()
        .map(|vr| {
            hidden_products
                .iter()
                .map(|ht| vr.merge(ht))
                .filter(|t| {
                    w.modules.iter().filter(|m| m.is_public()).all(|m| {
                        t.project(m.outputs) == m.eval(&t.project(m.inputs))
                    })
                })
                .collect()
        })
        .collect();

    // Depth-first choice of one completion per row, pruning on the private
    // modules' functional dependencies (public FDs hold by the filter above).
    let privates: Vec<usize> = (0..w.modules.len())
        .filter(|&i| !w.modules[i].is_public())
        .collect();
    struct Search<'a, B, F: FnMut(&Relation) -> ControlFlow<B>> {
        w: &'a Workflow,
        privates: &'a [usize],
        candidates: &'a [Vec<Tuple>],
        fds: Vec<HashMap<Vec<u8>, Vec<u8>>>,
        chosen: Vec<Tuple>,
        visit: F,
    }
    impl<B, F: FnMut(&Relation) -> ControlFlow<B>> Search<'_, B, F> {
        fn rec(&mut self, row_idx: usize) -> ControlFlow<B> {
            if row_idx == self.candidates.len() {
                let world: Relation = self.chosen.iter().cloned().collect();
                return (self.visit)(&world);
            }
            'cand: for ci in 0..self.candidates[row_idx].len() {
                let t = self.candidates[row_idx][ci].clone();
                let mut undo: Vec<(usize, Vec<u8>)> = Vec::new();
                for (pi, &mi) in self.privates.iter().enumerate() {
                    let m = &self.w.modules[mi];
                    let x = t.project(m.inputs).vals;
                    let y = t.project(m.outputs).vals;
                    match self.fds[pi].get(&x) {
                        Some(prev) if *prev != y => {
                            for (pj, xs) in undo {
                                self.fds[pj].remove(&xs);
                            }
                            continue 'cand;
                        }
                        Some(_) => {}
                        None => {
                            self.fds[pi].insert(x.clone(), y);
                            undo.push((pi, x));
                        }
                    }
                }
                self.chosen.push(t);
                let flow = self.rec(row_idx + 1);
                self.chosen.pop();
                for (pj, xs) in undo {
                    self.fds[pj].remove(&xs);
                }
                flow?;
            }
            ControlFlow::Continue(())
        }
    }
    let mut search = Search {
        w,
        privates: &privates,
        candidates: &candidates,
        fds: vec![HashMap::new(); privates.len()],
        chosen: Vec::new(),
        visit,
    };
    match search.rec(0) {
        ControlFlow::Break(b) => Some(b),
        ControlFlow::Continue(()) => None,
    }
}

/// All distinct workflow possible worlds, up to an optional cap.
pub fn workflow_worlds(
    r: &Relation,
    w: &Workflow,
    h: AttrSet,
    cap: Option<usize>,
) -> Vec<Relation> {
    let mut seen: BTreeSet<Vec<Vec<u8>>> = BTreeSet::new();
    let mut out = Vec::new();
    for_each_workflow_world(r, w, h, |world| {
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

/// Direct membership test for a candidate world: visible projections agree
/// as sets, all FDs hold, and every public module's behavior is reproduced.
pub fn is_workflow_world(r: &Relation, w: &Workflow, h: AttrSet, candidate: &Relation) -> bool {
    if candidate.schema != r.schema {
        return false;
    }
    let visible = r.schema.diff(h);
    if candidate.project(visible) != r.project(visible) {
        return false;
    }
    for m in &w.modules {
        if !candidate.satisfies_fd(m.inputs, m.outputs) {
            return false;
        }
        if m.is_public()
            && !candidate
                .tuples()
                .all(|t| t.project(m.outputs) == m.eval(&t.project(m.inputs)))
        {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Γ-workflow-privacy
// ---------------------------------------------------------------------------

/// `Out_{x,W,H}` for private module `m_i` — the implication form: a tuple
/// `y` qualifies iff some world has output `y` on *every* row with input
/// `x`; a world in which `x` never appears admits every `y`.
pub fn workflow_out(
    r: &Relation,
    w: &Workflow,
    h: AttrSet,
    module_id: &str,
    x: &Tuple,
) -> Result<BTreeSet<Tuple>> {
    let i = w.module_idx(module_id)?;
    let m = &w.modules[i];
    if x.schema != m.inputs {
        return Err(Error::SchemaMismatch(format!(
            "module {module_id}: input tuple schema differs from I"
        )));
    }
    if !r.project(m.inputs).contains(x) {
        return Err(Error::InputNotInRelation(x.display(&w.universe)));
    }
    let full: BTreeSet<Tuple> = w.universe.product(m.outputs).into_iter().collect();
    let mut out = BTreeSet::new();
    for_each_workflow_world(r, w, h, |world| {
        let mut present = None;
        for t in world.tuples() {
            if t.project(m.inputs) == *x {
                present = Some(t.project(m.outputs));
                break; // the FD makes the output unique
            }
        }
        match present {
            Some(y) => {
                out.insert(y);
            }
            None => out.extend(full.iter().cloned()), // vacuous satisfaction
        }
        if out.len() == full.len() {
            ControlFlow::Break(())
        } else {
            ControlFlow::<()>::Continue(())
        }
    });
    Ok(out)
}

/// Per-module privacy targets; modules without an entry default to 1.
#[derive(Clone, Debug)]
pub enum GammaTargets {
    Uniform(u64),
    PerModule(BTreeMap<String, u64>),
}

impl GammaTargets {
    pub fn get(&self, module: &str) -> u64 {
        match self {
            GammaTargets::Uniform(g) => *g,
            GammaTargets::PerModule(m) => m.get(module).copied().unwrap_or(1),
        }
    }
}

/// Out-set sizes for one private module, per input tuple.
#[derive(Clone, Debug)]
pub struct ModulePrivacy {
    pub module: String,
    pub out_sizes: Vec<(Tuple, u64)>,
}

/// Result of a Γ-workflow-privacy check.
#[derive(Clone, Debug)]
pub struct PrivacyReport {
    /// min over private modules and inputs of |Out|; at least 1 (the true
    /// world is always a world).
    pub gamma: u64,
    pub modules: Vec<ModulePrivacy>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrivacyReportJson {
    pub gamma: u64,
    pub modules: Vec<ModulePrivacyJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModulePrivacyJson {
    pub module: String,
    pub out_sizes: Vec<(String, u64)>,
}

impl PrivacyReport {
    pub fn to_json(&self, u: &Universe) -> PrivacyReportJson {
        PrivacyReportJson {
            gamma: self.gamma,
            modules: self
                .modules
                .iter()
                .map(|m| ModulePrivacyJson {
                    module: m.module.clone(),
                    out_sizes: m
                        .out_sizes
                        .iter()
                        .map(|(x, n)| (x.display(u), *n))
                        .collect(),
                })
                .collect(),
        }
    }
}

/// Exact achieved Γ over all private modules and inputs, by one pass over
/// the worlds. With `cap = Some(targets)` the pass stops early once every
/// module has reached its target (Out sizes are then reported saturated).
pub fn gamma_achieved(r: &Relation, w: &Workflow, h: AttrSet) -> PrivacyReport {
    gamma_report(r, w, h, None)
}

/// Early-stopping check that every private module meets its target.
pub fn meets_targets(r: &Relation, w: &Workflow, h: AttrSet, targets: &GammaTargets) -> bool {
    let report = gamma_report(r, w, h, Some(targets));
    report
        .modules
        .iter()
        .all(|m| m.out_sizes.iter().all(|(_, n)| *n >= targets.get(&m.module)))
}

fn gamma_report(
    r: &Relation,
    w: &Workflow,
    h: AttrSet,
    cap: Option<&GammaTargets>,
) -> PrivacyReport {
    struct Track {
        module: usize,
        input: Tuple,
        outs: BTreeSet<Vec<u8>>,
        full: usize,
        target: u64,
    }
    let mut tracks: Vec<Track> = Vec::new();
    for (i, m) in w.modules.iter().enumerate() {
        if m.is_public() {
            continue;
        }
        let full = w.universe.product(m.outputs).len();
        for x in r.project(m.inputs).tuples() {
            let target = match cap {
                Some(t) => t.get(&m.id).min(full as u64),
                None => u64::MAX,
            };
            tracks.push(Track { module: i, input: x, outs: BTreeSet::new(), full, target });
        }
    }
    for_each_workflow_world(r, w, h, |world| {
        // Output of each private module per input present in this world.
        let mut maps: HashMap<usize, HashMap<Vec<u8>, Vec<u8>>> = HashMap::new();
        for t in world.tuples() {
            for (i, m) in w.modules.iter().enumerate() {
                if !m.is_public() {
                    maps.entry(i)
                        .or_default()
                        .insert(t.project(m.inputs).vals, t.project(m.outputs).vals);
                }
            }
        }
        for tr in tracks.iter_mut() {
            match maps.get(&tr.module).and_then(|mm| mm.get(&tr.input.vals)) {
                Some(y) => {
                    tr.outs.insert(y.clone());
                }
                None => {
                    // Vacuous world: every output qualifies; mark saturated.
                    for y in w.universe.product(w.modules[tr.module].outputs) {
                        tr.outs.insert(y.vals);
                    }
                }
            }
        }
        let done = tracks.iter().all(|tr| {
            let limit = tr.target.min(tr.full as u64);
            tr.outs.len() as u64 >= limit
        });
        if done && cap.is_some() {
            ControlFlow::Break(())
        } else {
            ControlFlow::<()>::Continue(())
        }
    });
    let mut modules: Vec<ModulePrivacy> = Vec::new();
    for tr in tracks {
        let id = w.modules[tr.module].id.clone();
        if modules.last().map(|m| &m.module) != Some(&id) {
            modules.push(ModulePrivacy { module: id.clone(), out_sizes: Vec::new() });
        }
        modules
            .last_mut()
            .unwrap()
            .out_sizes
            .push((tr.input, tr.outs.len() as u64));
    }
    let gamma = modules
        .iter()
        .flat_map(|m| m.out_sizes.iter().map(|(_, n)| *n))
        .min()
        .unwrap_or(1)
        .max(1);
    PrivacyReport { gamma, modules }
}

// ---------------------------------------------------------------------------
// Assembly plans (composability theorems)
// ---------------------------------------------------------------------------

/// One private module's part of an assembly-plan choice: its safe subset
/// plus a chosen subset per closure module.
#[derive(Clone, Debug)]
pub struct PlanChoice {
    pub module: String,
    /// `h_i ⊆ O_i`, standalone-safe at the module's Γ target.
    pub safe_subset: AttrSet,
    /// Public (single-pred) or closure (general) module id → chosen subset
    /// of its attributes.
    pub closure_subsets: Vec<(String, AttrSet)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    SinglePred,
    General,
}

/// A validated hidden-set assembly: per private module its safe subset and
/// full hidden share `H_i`, plus the workflow hidden set `H = ∪ H_i`.
#[derive(Clone, Debug)]
pub struct AssemblyPlan {
    pub route: Route,
    pub modules: Vec<PlanModule>,
    pub hidden: AttrSet,
}

#[derive(Clone, Debug)]
pub struct PlanModule {
    pub module: String,
    pub safe_subset: AttrSet,
    pub hidden: AttrSet,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AssemblyPlanJson {
    pub route: Route,
    pub modules: Vec<PlanModuleJson>,
    pub hidden: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlanModuleJson {
    pub module: String,
    pub safe_subset: Vec<String>,
    pub hidden: Vec<String>,
}

impl AssemblyPlan {
    pub fn to_json(&self, u: &Universe) -> AssemblyPlanJson {
        AssemblyPlanJson {
            route: self.route,
            modules: self
                .modules
                .iter()
                .map(|m| PlanModuleJson {
                    module: m.module.clone(),
                    safe_subset: u.names(m.safe_subset),
                    hidden: u.names(m.hidden),
                })
                .collect(),
            hidden: u.names(self.hidden),
        }
    }
}

/// Validate an assembly for a single-predecessor workflow (composability
/// theorem): (i) each `h_i` safe at its Γ target, (ii) every public-closure
/// module UD-safe w.r.t. its share of `H_i`, (iii) `H_i` confined to
/// `O_i ∪ ∪_{C(h_i)} A_j`; the `H_i` must be pairwise disjoint.
pub fn assemble_single_pred(
    w: &Workflow,
    targets: &GammaTargets,
    choices: &[PlanChoice],
) -> Result<AssemblyPlan> {
    let class = classify_single_predecessor(w);
    if !class.is_single_predecessor {
        let v = &class.violations[0];
        return Err(Error::NotSinglePredecessor(format!("{:?} at {}", v.kind, v.witness)));
    }
    assemble(w, targets, choices, Route::SinglePred)
}

/// Validate an assembly for an arbitrary workflow (general privacy theorem):
/// like the single-predecessor form, but closures are downward-closures,
/// closure modules need only be D-safe, and the `H_i` may overlap (union
/// safety holds because D-safety is closed under union of hidden sets).
pub fn assemble_general(
    w: &Workflow,
    targets: &GammaTargets,
    choices: &[PlanChoice],
) -> Result<AssemblyPlan> {
    assemble(w, targets, choices, Route::General)
}

fn assemble(
    w: &Workflow,
    targets: &GammaTargets,
    choices: &[PlanChoice],
    route: Route,
) -> Result<AssemblyPlan> {
    // Every private module with a target above 1 must have a choice.
    for m in &w.modules {
        if !m.is_public()
            && targets.get(&m.id) > 1
            && !choices.iter().any(|c| c.module == m.id)
        {
            return Err(Error::ConditionViolated {
                condition: PlanCondition::SafeSubset,
                witness: format!("no safe subset chosen for {}", m.id),
            });
        }
    }

    let mut modules = Vec::new();
    for c in choices {
        let i = w.module_idx(&c.module)?;
        let m = &w.modules[i];
        if m.is_public() || !c.safe_subset.is_subset(m.outputs) {
            return Err(Error::NotOutputOfPrivate(c.module.clone()));
        }
        // Condition (i): h_i standalone-safe at the module's target.
        if !is_standalone_safe(&w.universe, m, c.safe_subset, targets.get(&c.module).max(1)) {
            return Err(Error::ConditionViolated {
                condition: PlanCondition::SafeSubset,
                witness: format!(
                    "{} with {:?} at Γ={}",
                    c.module,
                    w.universe.names(c.safe_subset),
                    targets.get(&c.module)
                ),
            });
        }
        let closure: Vec<usize> = match route {
            Route::SinglePred => public_closure_unchecked(w, c.safe_subset),
            Route::General => downward_closure(w, c.safe_subset),
        };
        // H_i = h_i ∪ chosen closure subsets; named modules must be members.
        let mut h_i = c.safe_subset;
        for (id, sub) in &c.closure_subsets {
            let j = w.module_idx(id)?;
            if !closure.contains(&j) || !sub.is_subset(w.modules[j].attrs()) {
                return Err(Error::ConditionViolated {
                    condition: PlanCondition::Containment,
                    witness: format!("{id} is not in the closure of {}", c.module),
                });
            }
            h_i = h_i.union(*sub);
        }
        // Condition (ii): closure modules safe w.r.t. their share of H_i.
        for &j in &closure {
            let view = ModuleView::of(&w.modules[j]);
            let share = view.attrs().inter(h_i);
            let ok = match route {
                Route::SinglePred => is_udsafe(&view, share),
                Route::General => is_dsafe(&view, share),
            };
            if !ok {
                return Err(Error::ConditionViolated {
                    condition: PlanCondition::ClosureSafety,
                    witness: format!(
                        "{} w.r.t. {:?}",
                        w.modules[j].id,
                        w.universe.names(share)
                    ),
                });
            }
        }
        // Condition (iii): H_i ⊆ O_i ∪ closure attributes.
        let bound = closure
            .iter()
            .fold(m.outputs, |s, &j| s.union(w.modules[j].attrs()));
        if !h_i.is_subset(bound) {
            return Err(Error::ConditionViolated {
                condition: PlanCondition::Containment,
                witness: format!(
                    "H_{} strays to {:?}",
                    c.module,
                    w.universe.names(h_i.diff(bound))
                ),
            });
        }
        modules.push(PlanModule { module: c.module.clone(), safe_subset: c.safe_subset, hidden: h_i });
    }
    if route == Route::SinglePred {
        for a in 0..modules.len() {
            for b in a + 1..modules.len() {
                let overlap = modules[a].hidden.inter(modules[b].hidden);
                if !overlap.is_empty() {
                    return Err(Error::ConditionViolated {
                        condition: PlanCondition::Disjointness,
                        witness: format!(
                            "H_{} ∩ H_{} = {:?}",
                            modules[a].module,
                            modules[b].module,
                            w.universe.names(overlap)
                        ),
                    });
                }
            }
        }
    }
    let hidden = modules.iter().fold(AttrSet::EMPTY, |s, m| s.union(m.hidden));
    Ok(AssemblyPlan { route, modules, hidden })
}

// ---------------------------------------------------------------------------
// Constructive witness worlds
// ---------------------------------------------------------------------------

/// Build the possible world witnessing `y ∈ Out_{x,W,H}` for private module
/// `m_i` with safe subset `h_i`, by redefining modules with `Flip`/`EFlip`
/// exactly as in the composability proofs. Selects the single-predecessor
/// construction (Case I/Case II by whether the closure composite has
/// successors) when the workflow classifies single-predecessor, and the
/// general one (only `m_i` redefined) otherwise.
pub fn construct_witness_world(
    w: &Workflow,
    module_id: &str,
    h_i: AttrSet,
    x: &Tuple,
    y: &Tuple,
) -> Result<Relation> {
    let i = w.module_idx(module_id)?;
    let m = &w.modules[i];
    if m.is_public() || !h_i.is_subset(m.outputs) {
        return Err(Error::PreconditionViolated(format!(
            "{module_id} must be private with h ⊆ O"
        )));
    }
    if x.schema != m.inputs || y.schema != m.outputs {
        return Err(Error::PreconditionViolated(
            "witness x/y schemas must match the module".into(),
        ));
    }
    let z = m.eval(x);
    // y ∈ Out_{x,m_i,h_i} ⇔ y ≡_{h_i} m_i(x) for output-only hidden sets.
    if !equiv(y, &z, m.outputs, h_i)? {
        return Err(Error::PreconditionViolated(format!(
            "y is not in the standalone Out-set of x under {:?}",
            w.universe.names(h_i)
        )));
    }
    if classify_single_predecessor(w).is_single_predecessor {
        witness_single_pred(w, i, h_i, y, &z)
    } else {
        Ok(witness_general(w, i, y, &z))
    }
}

/// Single-predecessor construction (Case I / Case II).
fn witness_single_pred(
    w: &Workflow,
    i: usize,
    h_i: AttrSet,
    y: &Tuple,
    z: &Tuple,
) -> Result<Relation> {
    let m_i = &w.modules[i];
    let closure = public_closure_unchecked(w, h_i);
    // Case selection: does the closure composite have (private) successors?
    let composite = if closure.is_empty() {
        None
    } else {
        let ids: Vec<&str> = closure.iter().map(|&j| w.modules[j].id.as_str()).collect();
        Some(compose_public(w, &ids)?)
    };
    let has_successor = composite.as_ref().is_some_and(|c| {
        c.outputs
            .iter()
            .any(|a| w.consumers_of(a).iter().any(|j| !c.members.contains(j)))
    });

    if let (Some(c), true) = (&composite, has_successor) {
        // Case II: flip w.r.t. Y = y ⧺ M(π_{I_M}(y)) and Z = z ⧺ M(π_{I_M}(z)).
        if !c.inputs.is_subset(m_i.outputs) {
            return Err(Error::PreconditionViolated(format!(
                "closure composite inputs {:?} are not all outputs of {}",
                w.universe.names(c.inputs),
                m_i.id
            )));
        }
        let w_y = c.view.eval(&y.project(c.inputs))?;
        let w_z = c.view.eval(&z.project(c.inputs))?;
        let big_y = y.merge(&w_y);
        let big_z = z.merge(&w_z);
        let i_m = c.inputs;
        let rest = m_i.outputs.diff(i_m);
        let view = c.view.clone();
        Ok(eval_modified(w, |j, u| {
            let m = &w.modules[j];
            if j == i {
                let base = m.eval(u);
                let part1 = flip(&big_y, &big_z, &base.project(rest));
                let pivot = view
                    .eval(&base.project(i_m))
                    .expect("composite view is total over its boundary inputs");
                let part2 = eflip(&big_y, &big_z, &pivot, &base.project(i_m));
                part1.merge(&part2)
            } else if m.is_public() {
                m.eval(u)
            } else {
                m.eval(&flip(&big_y, &big_z, u))
            }
        }))
    } else {
        // Case I (also covers the empty closure / all-private case).
        Ok(eval_modified(w, |j, u| {
            let m = &w.modules[j];
            if j == i {
                flip(y, z, &m.eval(u))
            } else if m.is_public() {
                m.eval(u)
            } else {
                m.eval(&flip(y, z, u))
            }
        }))
    }
}

/// General-workflow construction: only `m_i` is redefined.
fn witness_general(w: &Workflow, i: usize, y: &Tuple, z: &Tuple) -> Relation {
    eval_modified(w, |j, u| {
        let m = &w.modules[j];
        if j == i {
            flip(y, z, &m.eval(u))
        } else {
            m.eval(u)
        }
    })
}

/// Forward-evaluate the workflow with per-module functions replaced by
/// `redefine(module index, input tuple) → output tuple`.
fn eval_modified(w: &Workflow, redefine: impl Fn(usize, &Tuple) -> Tuple) -> Relation {
    let mut r = Relation::new(w.attrs);
    for p in w.universe.product(w.initial) {
        let mut row = p;
        for &j in &w.topo {
            let m = &w.modules[j];
            let y = redefine(j, &row.project(m.inputs));
            debug_assert_eq!(y.schema, m.outputs);
            row = row.merge(&y);
        }
        r.insert(row);
    }
    r
}
