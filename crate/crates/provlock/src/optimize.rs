//! Pipeline Steps III–IV: minimum-cost hidden set per private module over
//! its closure (chain DP, tree DP, DAG brute force) and the workflow-level
//! union, with the single-predecessor and general routes.
//!
//! All three per-closure solvers share one validity semantics: a choice of
//! one catalog subset `U_j` per closure module, together with the private
//! module's safe subset `S`, is valid iff for every closure module
//! `A_j ∩ (S ∪ ⋃U) = U_j` — the hidden set restricted to each closure module
//! is exactly its chosen (UD-/D-safe) subset. The resulting hidden share is
//! `H_i = S ∪ ⋃U` with cost `c(H_i)`.

use std::collections::BTreeMap;

use crate::closures::{classify_single_predecessor, downward_closure, public_closure_unchecked};
use crate::error::{Error, Result};
use crate::model::{AttrSet, CostModel, CostScalar, Workflow};
use crate::privacy::{assemble_general, assemble_single_pred, AssemblyPlan, GammaTargets, PlanChoice, Route};
use crate::public_safety::{enumerate_dsafe, enumerate_udsafe, ModuleView};
use crate::standalone::enumerate_safe_subsets;

/// Catalog picks per closure module, keyed by module index.
pub type Catalogs = BTreeMap<usize, Vec<AttrSet>>;

/// Chain DP table: `q[j][ℓ]` holds the minimum cost of hiding along the
/// chain prefix `m_1..m_j` with `U_{jℓ}` chosen at `m_j`, together with the
/// accumulated hidden set that realizes it (serving as the back-pointer).
#[derive(Clone, Debug)]
pub struct DPTable<T> {
    pub q: Vec<Vec<Option<(T, AttrSet)>>>,
}

/// Ascending-attribute lexicographic order, the deterministic tie-break.
fn lex_less(a: AttrSet, b: AttrSet) -> bool {
    a.iter().collect::<Vec<_>>() < b.iter().collect::<Vec<_>>()
}

fn better<T: CostScalar>(a: &(T, AttrSet), b: &(T, AttrSet)) -> bool {
    match a.0.partial_cmp(&b.0) {
        Some(std::cmp::Ordering::Less) => true,
        Some(std::cmp::Ordering::Equal) => lex_less(a.1, b.1),
        _ => false,
    }
}

fn take_better<T: CostScalar>(best: &mut Option<(T, AttrSet)>, cand: (T, AttrSet)) {
    if best.as_ref().is_none_or(|b| better(&cand, b)) {
        *best = Some(cand);
    }
}

/// Minimum-cost hidden share over a chain closure `m_1..m_k` of the private
/// module (`O_{j−1} = I_j`, `I_1 ⊆ O_i`). Returns `None` if no pick sequence
/// is consistent.
pub fn optimize_chain_closure<T: CostScalar>(
    w: &Workflow,
    module: usize,
    s: AttrSet,
    chain: &[usize],
    catalogs: &Catalogs,
    cost: &CostModel<T>,
) -> Result<Option<(AttrSet, T)>> {
    let m_i = &w.modules[module];
    if chain.is_empty() {
        return Ok(Some((s, cost.cost_of(s))));
    }
    if !w.modules[chain[0]].inputs.is_subset(m_i.outputs) {
        return Err(Error::NotAChain(format!(
            "{} does not take all inputs from {}",
            w.modules[chain[0]].id, m_i.id
        )));
    }
    for pair in chain.windows(2) {
        if w.modules[pair[0]].outputs != w.modules[pair[1]].inputs {
            return Err(Error::NotAChain(format!(
                "O({}) ≠ I({})",
                w.modules[pair[0]].id, w.modules[pair[1]].id
            )));
        }
    }
    let table = chain_dp(w, s, chain, catalogs, cost)?;
    let mut best: Option<(T, AttrSet)> = None;
    let tail = s.diff(w.modules[chain[0]].attrs());
    for cell in table.q[chain.len() - 1].iter().flatten() {
        take_better(
            &mut best,
            (cell.0 + cost.cost_of(tail), cell.1.union(s)),
        );
    }
    Ok(best.map(|(c, h)| (h, c)))
}

fn chain_dp<T: CostScalar>(
    w: &Workflow,
    s: AttrSet,
    chain: &[usize],
    catalogs: &Catalogs,
    cost: &CostModel<T>,
) -> Result<DPTable<T>> {
    let empty = Vec::new();
    let cat = |j: usize| catalogs.get(&chain[j]).unwrap_or(&empty);
    let mut q: Vec<Vec<Option<(T, AttrSet)>>> = Vec::with_capacity(chain.len());
    // Init: the first module must absorb the part of S it consumes.
    let feed = s.inter(w.modules[chain[0]].attrs());
    q.push(
        cat(0)
            .iter()
            .map(|&u| feed.is_subset(u).then(|| (cost.cost_of(u), u)))
            .collect(),
    );
    for j in 1..chain.len() {
        let m = &w.modules[chain[j]];
        let prev_o = w.modules[chain[j - 1]].outputs;
        let row: Vec<Option<(T, AttrSet)>> = cat(j)
            .iter()
            .map(|&u| {
                let mut best: Option<(T, AttrSet)> = None;
                for (p, cell) in cat(j - 1).iter().zip(&q[j - 1]) {
                    if let Some((pc, ph)) = cell {
                        // Transition: U_{j−1} ∩ O_{j−1} = U_j ∩ I_j.
                        if p.inter(prev_o) == u.inter(m.inputs) {
                            take_better(
                                &mut best,
                                (*pc + cost.cost_of(u.inter(m.outputs)), ph.union(u)),
                            );
                        }
                    }
                }
                best
            })
            .collect();
        q.push(row);
    }
    Ok(DPTable { q })
}

/// Minimum-cost hidden share over a tree closure rooted at the private
/// module: each closure module draws all its inputs from exactly one parent
/// (the private root or another closure module). Bottom-up DP; each node is
/// charged for its hidden inputs plus any hidden outputs no tree child
/// consumes, so every attribute is charged exactly once.
pub fn optimize_tree_closure<T: CostScalar>(
    w: &Workflow,
    module: usize,
    s: AttrSet,
    closure: &[usize],
    catalogs: &Catalogs,
    cost: &CostModel<T>,
) -> Result<Option<(AttrSet, T)>> {
    if closure.is_empty() {
        return Ok(Some((s, cost.cost_of(s))));
    }
    // Parent of each closure node: the unique producer of all its inputs.
    let mut children: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut roots = Vec::new();
    for &j in closure {
        let m = &w.modules[j];
        let producers: Vec<Option<usize>> =
            m.inputs.iter().map(|a| w.producer_of(a)).collect();
        let parent = match producers.first() {
            Some(p) if producers.iter().all(|x| x == p) => *p,
            _ => None,
        };
        match parent {
            Some(p) if p == module => roots.push(j),
            Some(p) if closure.contains(&p) => children.entry(p).or_default().push(j),
            _ => {
                return Err(Error::NotATree(format!(
                    "{} does not take all inputs from a single closure parent",
                    m.id
                )))
            }
        }
    }
    // Reachability from the root covers the whole closure (no stray cycles
    // are possible in a DAG, but orphaned components are).
    let mut seen = vec![false; w.modules.len()];
    let mut stack = roots.clone();
    while let Some(j) = stack.pop() {
        if !std::mem::replace(&mut seen[j], true) {
            stack.extend(children.get(&j).into_iter().flatten());
        }
    }
    if let Some(&j) = closure.iter().find(|&&j| !seen[j]) {
        return Err(Error::NotATree(format!(
            "{} is not reachable from {}",
            w.modules[j].id, w.modules[module].id
        )));
    }

    // Bottom-up: best (cost, hidden) per node and catalog subset.
    fn solve<T: CostScalar>(
        w: &Workflow,
        j: usize,
        children: &BTreeMap<usize, Vec<usize>>,
        catalogs: &Catalogs,
        cost: &CostModel<T>,
    ) -> Vec<(AttrSet, Option<(T, AttrSet)>)> {
        let m = &w.modules[j];
        let kids = children.get(&j).cloned().unwrap_or_default();
        let kid_tables: Vec<(usize, Vec<(AttrSet, Option<(T, AttrSet)>)>)> = kids
            .iter()
            .map(|&c| (c, solve(w, c, children, catalogs, cost)))
            .collect();
        let consumed_by_kids = kids
            .iter()
            .fold(AttrSet::EMPTY, |acc, &c| acc.union(w.modules[c].inputs));
        let free_out = m.outputs.diff(consumed_by_kids);
        let empty = Vec::new();
        catalogs
            .get(&j)
            .unwrap_or(&empty)
            .iter()
            .map(|&u| {
                let own = cost.cost_of(u.inter(m.inputs.union(free_out)));
                let mut acc: Option<(T, AttrSet)> = Some((own, u));
                for (c, table) in &kid_tables {
                    let want = u.inter(w.modules[*c].inputs);
                    let mut best: Option<(T, AttrSet)> = None;
                    for (cu, cell) in table {
                        if let Some((cc, ch)) = cell {
                            if cu.inter(w.modules[*c].inputs) == want {
                                take_better(&mut best, (*cc, *ch));
                            }
                        }
                    }
                    acc = match (acc, best) {
                        (Some((a, ah)), Some((b, bh))) => Some((a + b, ah.union(bh))),
                        _ => None,
                    };
                }
                (u, acc)
            })
            .collect()
    }

    // Root: match each child against the part of S it consumes (the child
    // may hide more of O_i; the surplus is simply added to H).
    let mut total: Option<(T, AttrSet)> = Some((
        cost.cost_of(s.diff(roots.iter().fold(AttrSet::EMPTY, |a, &c| a.union(w.modules[c].inputs)))),
        s,
    ));
    for &c in &roots {
        let table = solve(w, c, &children, catalogs, cost);
        let feed = s.inter(w.modules[c].inputs);
        let mut best: Option<(T, AttrSet)> = None;
        for (cu, cell) in &table {
            if let Some((cc, ch)) = cell {
                if feed.is_subset(cu.inter(w.modules[c].inputs)) {
                    take_better(&mut best, (*cc, *ch));
                }
            }
        }
        total = match (total, best) {
            (Some((a, ah)), Some((b, bh))) => Some((a + b, ah.union(bh))),
            _ => None,
        };
    }
    Ok(total.map(|(c, h)| (h, c)))
}

/// Exhaustive minimum over per-module catalog picks for an arbitrary DAG
/// closure: valid iff every closure module's share of the union equals its
/// pick. Always applicable; exponential in the closure size.
pub fn optimize_dag_closure<T: CostScalar>(
    w: &Workflow,
    s: AttrSet,
    closure: &[usize],
    catalogs: &Catalogs,
    cost: &CostModel<T>,
) -> Option<(AttrSet, T)> {
    if closure.is_empty() {
        return Some((s, cost.cost_of(s)));
    }
    let empty = Vec::new();
    let cats: Vec<&Vec<AttrSet>> = closure
        .iter()
        .map(|j| catalogs.get(j).unwrap_or(&empty))
        .collect();
    if cats.iter().any(|c| c.is_empty()) {
        return None;
    }
    let mut best: Option<(T, AttrSet)> = None;
    let mut picks = vec![0usize; closure.len()];
    loop {
        let h = picks
            .iter()
            .enumerate()
            .fold(s, |acc, (k, &p)| acc.union(cats[k][p]));
        let consistent = closure
            .iter()
            .enumerate()
            .all(|(k, &j)| w.modules[j].attrs().inter(h) == cats[k][picks[k]]);
        if consistent {
            take_better(&mut best, (cost.cost_of(h), h));
        }
        // Odometer step over the pick indices.
        let mut pos = picks.len();
        loop {
            if pos == 0 {
                return best.map(|(c, h)| (h, c));
            }
            pos -= 1;
            picks[pos] += 1;
            if picks[pos] < cats[pos].len() {
                break;
            }
            picks[pos] = 0;
        }
    }
}

/// Which theorem route the optimizer should target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptimizeRoute {
    SinglePred,
    General,
    Both,
}

/// Full pipeline: per private module enumerate safe subsets (Step I),
/// closure safety catalogs (Step II), minimum-cost closure extension
/// (Step III, shape-dispatched), then the workflow union (Step IV). Returns
/// the validated plan and its total cost.
pub fn optimize_workflow<T: CostScalar>(
    w: &Workflow,
    targets: &GammaTargets,
    cost: &CostModel<T>,
    route: OptimizeRoute,
) -> Result<(AssemblyPlan, T)> {
    match route {
        OptimizeRoute::SinglePred => optimize_route(w, targets, cost, Route::SinglePred),
        OptimizeRoute::General => optimize_route(w, targets, cost, Route::General),
        OptimizeRoute::Both => {
            let sp = optimize_route(w, targets, cost, Route::SinglePred);
            let gen = optimize_route(w, targets, cost, Route::General);
            match (sp, gen) {
                (Ok(a), Ok(b)) => {
                    let pick_a = better(&(a.1, a.0.hidden), &(b.1, b.0.hidden));
                    Ok(if pick_a { a } else { b })
                }
                (Ok(a), Err(_)) => Ok(a),
                (Err(_), Ok(b)) => Ok(b),
                (Err(e), Err(_)) => Err(e),
            }
        }
    }
}

fn optimize_route<T: CostScalar>(
    w: &Workflow,
    targets: &GammaTargets,
    cost: &CostModel<T>,
    route: Route,
) -> Result<(AssemblyPlan, T)> {
    if route == Route::SinglePred {
        let class = classify_single_predecessor(w);
        if !class.is_single_predecessor {
            let v = &class.violations[0];
            return Err(Error::NotSinglePredecessor(format!("{:?} at {}", v.kind, v.witness)));
        }
    }
    let mut choices = Vec::new();
    for (i, m) in w.modules.iter().enumerate() {
        if m.is_public() {
            continue;
        }
        let gamma = targets.get(&m.id);
        if gamma <= 1 {
            continue; // nothing to protect
        }
        let safe = enumerate_safe_subsets(&w.universe, m, gamma, true);
        let mut best: Option<(T, AttrSet, AttrSet)> = None; // (cost, H_i, S)
        for &s in &safe.subsets {
            let closure: Vec<usize> = match route {
                Route::SinglePred => public_closure_unchecked(w, s),
                Route::General => downward_closure(w, s),
            };
            let catalogs: Catalogs = closure
                .iter()
                .map(|&j| {
                    let view = ModuleView::of(&w.modules[j]);
                    let cat = match route {
                        Route::SinglePred => enumerate_udsafe(&view),
                        Route::General => enumerate_dsafe(&view),
                    };
                    (j, cat.subsets)
                })
                .collect();
            let solved = match route {
                Route::SinglePred => {
                    match optimize_chain_closure(w, i, s, &closure, &catalogs, cost) {
                        Ok(r) => r,
                        Err(Error::NotAChain(_)) => {
                            match optimize_tree_closure(w, i, s, &closure, &catalogs, cost) {
                                Ok(r) => r,
                                Err(Error::NotATree(_)) => {
                                    optimize_dag_closure(w, s, &closure, &catalogs, cost)
                                }
                                Err(e) => return Err(e),
                            }
                        }
                        Err(e) => return Err(e),
                    }
                }
                Route::General => optimize_dag_closure(w, s, &closure, &catalogs, cost),
            };
            if let Some((h, c)) = solved {
                let cand = (c, h);
                if best
                    .as_ref()
                    .is_none_or(|(bc, bh, _)| better(&cand, &(*bc, *bh)))
                {
                    best = Some((c, h, s));
                }
            }
        }
        let Some((_, h_i, s)) = best else {
            return Err(Error::NoFeasiblePlan(format!(
                "no closure-consistent hidden set for {} at Γ={gamma}",
                m.id
            )));
        };
        let closure: Vec<usize> = match route {
            Route::SinglePred => public_closure_unchecked(w, s),
            Route::General => downward_closure(w, s),
        };
        choices.push(PlanChoice {
            module: m.id.clone(),
            safe_subset: s,
            closure_subsets: closure
                .iter()
                .map(|&j| (w.modules[j].id.clone(), w.modules[j].attrs().inter(h_i)))
                .collect(),
        });
    }
    let plan = match route {
        Route::SinglePred => assemble_single_pred(w, targets, &choices)?,
        Route::General => assemble_general(w, targets, &choices)?,
    };
    let total = cost.cost_of(plan.hidden);
    Ok((plan, total))
}
