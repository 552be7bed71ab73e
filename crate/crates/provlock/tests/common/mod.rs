//! Shared helpers for the integration tests: seeded random generators for
//! boolean modules and workflows.
#![allow(dead_code)] // each test binary uses its own subset of the helpers

use provlock::model::{
    AttrSet, DomainValue, ModuleTable, Tuple, Universe, Visibility, Workflow,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn bool_domain() -> Vec<DomainValue> {
    vec![DomainValue::Int(0), DomainValue::Int(1)]
}

/// Build a universe of `n` boolean attributes `a0..a{n-1}` with unit costs.
pub fn bool_universe(n: usize) -> Universe {
    let mut u = Universe::new();
    for i in 0..n {
        u.declare(&format!("a{i}"), bool_domain(), 1.0).unwrap();
    }
    u
}

/// A module with the given wiring and an arbitrary random boolean table.
pub fn random_table(
    rng: &mut impl Rng,
    u: &Universe,
    id: &str,
    visibility: Visibility,
    inputs: AttrSet,
    outputs: AttrSet,
) -> ModuleTable {
    let rows: Vec<(Tuple, Tuple)> = u
        .product(inputs)
        .into_iter()
        .map(|x| {
            let vals = (0..outputs.len()).map(|_| rng.gen_range(0..2u8)).collect();
            (x, Tuple::new(outputs, vals))
        })
        .collect();
    ModuleTable::new(u, id, visibility, inputs, outputs, &rows).unwrap()
}

/// A standalone random boolean module with `n_in` inputs and `n_out`
/// outputs over a fresh universe.
pub fn random_module(
    rng: &mut impl Rng,
    n_in: usize,
    n_out: usize,
    visibility: Visibility,
) -> (Universe, ModuleTable) {
    let u = bool_universe(n_in + n_out);
    let inputs: AttrSet = (0..n_in).collect();
    let outputs: AttrSet = (n_in..n_in + n_out).collect();
    let m = random_table(rng, &u, "m", visibility, inputs, outputs);
    (u, m)
}

/// A random boolean workflow with up to `max_modules` modules and at most 8
/// attributes. With `no_sharing`, every attribute feeds at most one module.
pub fn random_workflow(rng: &mut impl Rng, max_modules: usize, no_sharing: bool) -> Workflow {
    const MAX_ATTRS: usize = 8;
    let n_initial = rng.gen_range(1..=2);
    let mut u = Universe::new();
    for i in 0..n_initial {
        u.declare(&format!("a{i}"), bool_domain(), 1.0).unwrap();
    }
    let mut next = n_initial;
    // Attributes still available as module inputs.
    let mut pool: Vec<usize> = (0..n_initial).collect();
    let mut modules = Vec::new();
    let n_modules = rng.gen_range(1..=max_modules);
    for k in 0..n_modules {
        if pool.is_empty() || next >= MAX_ATTRS {
            break;
        }
        let n_in = rng.gen_range(1..=2.min(pool.len()));
        let mut inputs = AttrSet::EMPTY;
        for _ in 0..n_in {
            let pos = rng.gen_range(0..pool.len());
            let a = if no_sharing { pool.remove(pos) } else { pool[pos] };
            inputs.insert(a);
        }
        let n_out = rng.gen_range(1..=2.min(MAX_ATTRS - next).max(1));
        let mut outputs = AttrSet::EMPTY;
        for _ in 0..n_out.min(MAX_ATTRS - next) {
            u.declare(&format!("a{next}"), bool_domain(), 1.0).unwrap();
            outputs.insert(next);
            pool.push(next);
            next += 1;
        }
        let vis = if rng.gen_bool(0.5) { Visibility::Private } else { Visibility::Public };
        modules.push(random_table(rng, &u, &format!("m{k}"), vis, inputs, outputs));
    }
    Workflow::new(u, modules).unwrap()
}
