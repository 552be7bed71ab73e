//! Core data model: attributes, tuples, relations, module tables, workflows
//! and the additive cost model.
//!
//! A module is a total function from its input attributes to its output
//! attributes, stored as an explicit table; viewed as a relation over
//! `I ∪ O` it satisfies the functional dependency `I → O` by construction.
//! A workflow is a DAG of modules wired by shared attribute names; its
//! relation is obtained by forward evaluation over the initial inputs.

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of an attribute within a [`Universe`].
pub type AttrIdx = usize;

/// A set of attributes, represented as a bitmask over universe indices.
///
/// The library is a desk-scale analysis tool; universes are limited to 64
/// attributes, which comfortably covers every fixture and random instance.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct AttrSet(pub u64);

impl AttrSet {
    pub const EMPTY: AttrSet = AttrSet(0);

    pub fn singleton(a: AttrIdx) -> AttrSet {
        AttrSet(1u64 << a)
    }

    pub fn contains(self, a: AttrIdx) -> bool {
        self.0 & (1u64 << a) != 0
    }

    pub fn insert(&mut self, a: AttrIdx) {
        self.0 |= 1u64 << a;
    }

    pub fn union(self, other: AttrSet) -> AttrSet {
        AttrSet(self.0 | other.0)
    }

    pub fn inter(self, other: AttrSet) -> AttrSet {
        AttrSet(self.0 & other.0)
    }

    pub fn diff(self, other: AttrSet) -> AttrSet {
        AttrSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: AttrSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Iterate the member indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = AttrIdx> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let a = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(a)
            }
        })
    }

    /// Position of `a` among the members of this set (ascending order).
    /// `a` must be a member.
    pub fn rank(self, a: AttrIdx) -> usize {
        debug_assert!(self.contains(a));
        (self.0 & ((1u64 << a) - 1)).count_ones() as usize
    }

    /// All subsets of this set, smallest first and lexicographic within a
    /// size under the ascending index order (deterministic enumeration).
    pub fn subsets(self) -> Vec<AttrSet> {
        let members: Vec<AttrIdx> = self.iter().collect();
        let mut out: Vec<AttrSet> = (0..(1u64 << members.len()))
            .map(|mask| {
                let mut s = AttrSet::EMPTY;
                for (pos, &a) in members.iter().enumerate() {
                    if mask & (1 << pos) != 0 {
                        s.insert(a);
                    }
                }
                s
            })
            .collect();
        out.sort_by_key(|s| (s.len(), s.0));
        out
    }
}

impl FromIterator<AttrIdx> for AttrSet {
    fn from_iter<T: IntoIterator<Item = AttrIdx>>(iter: T) -> Self {
        let mut s = AttrSet::EMPTY;
        for a in iter {
            s.insert(a);
        }
        s
    }
}

impl fmt::Debug for AttrSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AttrSet{:?}", self.iter().collect::<Vec<_>>())
    }
}

/// One value of a finite attribute domain.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainValue {
    Int(i64),
    Str(String),
}

impl fmt::Display for DomainValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainValue::Int(v) => write!(f, "{v}"),
            DomainValue::Str(s) => write!(f, "{s}"),
        }
    }
}

/// Declaration of a single attribute: name, finite domain, hiding cost.
#[derive(Clone, Debug)]
pub struct AttrInfo {
    pub name: String,
    pub domain: Vec<DomainValue>,
    pub cost: f64,
}

/// The attribute universe of a workflow: declaration-ordered attribute
/// metadata. Tuple values are stored as indices into each attribute's domain.
#[derive(Clone, Debug, Default)]
pub struct Universe {
    attrs: Vec<AttrInfo>,
    by_name: IndexMap<String, AttrIdx>,
}

impl Universe {
    pub fn new() -> Universe {
        Universe::default()
    }

    /// Declare an attribute; returns its index. Errors on duplicates, empty
    /// names, empty domains and universes larger than the bitmask width.
    pub fn declare(&mut self, name: &str, domain: Vec<DomainValue>, cost: f64) -> Result<AttrIdx> {
        if name.is_empty() {
            return Err(Error::Parse("empty attribute name".into()));
        }
        if self.by_name.contains_key(name) {
            return Err(Error::Parse(format!("attribute {name} declared twice")));
        }
        if domain.is_empty() {
            return Err(Error::InvalidValue(format!("attribute {name} has an empty domain")));
        }
        if domain.iter().collect::<BTreeSet<_>>().len() != domain.len() {
            return Err(Error::InvalidValue(format!("attribute {name} has duplicate domain values")));
        }
        if !(cost >= 0.0) {
            return Err(Error::InvalidValue(format!("attribute {name} has negative cost")));
        }
        if self.attrs.len() >= 64 {
            return Err(Error::TooLarge("more than 64 attributes".into()));
        }
        let idx = self.attrs.len();
        self.attrs.push(AttrInfo { name: name.to_string(), domain, cost });
        self.by_name.insert(name.to_string(), idx);
        Ok(idx)
    }

    pub fn len(&self) -> usize {
        self.attrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attrs.is_empty()
    }

    pub fn idx(&self, name: &str) -> Result<AttrIdx> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownAttribute(name.to_string()))
    }

    pub fn info(&self, a: AttrIdx) -> &AttrInfo {
        &self.attrs[a]
    }

    pub fn name(&self, a: AttrIdx) -> &str {
        &self.attrs[a].name
    }

    pub fn domain_size(&self, a: AttrIdx) -> usize {
        self.attrs[a].domain.len()
    }

    /// Resolve a list of attribute names to a set.
    pub fn set_of(&self, names: &[impl AsRef<str>]) -> Result<AttrSet> {
        let mut s = AttrSet::EMPTY;
        for n in names {
            s.insert(self.idx(n.as_ref())?);
        }
        Ok(s)
    }

    /// Member names of a set, in declaration order.
    pub fn names(&self, set: AttrSet) -> Vec<String> {
        set.iter().map(|a| self.attrs[a].name.clone()).collect()
    }

    /// All tuples over the product of the domains of `schema`,
    /// in odometer order (last attribute varies fastest).
    pub fn product(&self, schema: AttrSet) -> Vec<Tuple> {
        let attrs: Vec<AttrIdx> = schema.iter().collect();
        let mut out = Vec::new();
        let mut vals = vec![0u8; attrs.len()];
        loop {
            out.push(Tuple { schema, vals: vals.clone() });
            let mut pos = attrs.len();
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                if (vals[pos] as usize) + 1 < self.domain_size(attrs[pos]) {
                    vals[pos] += 1;
                    for v in vals.iter_mut().skip(pos + 1) {
                        *v = 0;
                    }
                    break;
                }
            }
        }
    }
}

/// A tuple over an explicit schema; `vals[k]` is the domain-value index of
/// the k-th schema attribute in ascending universe order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tuple {
    pub schema: AttrSet,
    pub vals: Vec<u8>,
}

impl Tuple {
    pub fn new(schema: AttrSet, vals: Vec<u8>) -> Tuple {
        debug_assert_eq!(schema.len(), vals.len());
        Tuple { schema, vals }
    }

    pub fn empty() -> Tuple {
        Tuple { schema: AttrSet::EMPTY, vals: Vec::new() }
    }

    pub fn get(&self, a: AttrIdx) -> u8 {
        self.vals[self.schema.rank(a)]
    }

    /// Projection onto `sub ⊆ schema`.
    pub fn project(&self, sub: AttrSet) -> Tuple {
        debug_assert!(sub.is_subset(self.schema));
        let vals = sub.iter().map(|a| self.get(a)).collect();
        Tuple { schema: sub, vals }
    }

    /// Union of two tuples on disjoint (or agreeing) schemas.
    pub fn merge(&self, other: &Tuple) -> Tuple {
        let schema = self.schema.union(other.schema);
        let vals = schema
            .iter()
            .map(|a| {
                if self.schema.contains(a) {
                    self.get(a)
                } else {
                    other.get(a)
                }
            })
            .collect();
        Tuple { schema, vals }
    }

    /// Copy of `self` with the attributes in `sub` overwritten from `src`
    /// (`sub` must be contained in both schemas).
    pub fn overwrite(&self, sub: AttrSet, src: &Tuple) -> Tuple {
        let vals = self
            .schema
            .iter()
            .map(|a| if sub.contains(a) { src.get(a) } else { self.get(a) })
            .collect();
        Tuple { schema: self.schema, vals }
    }

    /// Render against a universe, e.g. `(a1=0, a3=1)`.
    pub fn display(&self, u: &Universe) -> String {
        let parts: Vec<String> = self
            .schema
            .iter()
            .map(|a| format!("{}={}", u.name(a), u.info(a).domain[self.get(a) as usize]))
            .collect();
        format!("({})", parts.join(", "))
    }
}

impl fmt::Debug for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tuple{:?}{:?}", self.schema.iter().collect::<Vec<_>>(), self.vals)
    }
}

/// A relation: a set of rows over a fixed schema (set semantics).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Relation {
    pub schema: AttrSet,
    rows: BTreeSet<Vec<u8>>,
}

impl Relation {
    pub fn new(schema: AttrSet) -> Relation {
        Relation { schema, rows: BTreeSet::new() }
    }

    pub fn insert(&mut self, t: Tuple) {
        debug_assert_eq!(t.schema, self.schema);
        self.rows.insert(t.vals);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn contains(&self, t: &Tuple) -> bool {
        debug_assert_eq!(t.schema, self.schema);
        self.rows.contains(&t.vals)
    }

    pub fn tuples(&self) -> impl Iterator<Item = Tuple> + '_ {
        self.rows.iter().map(|vals| Tuple { schema: self.schema, vals: vals.clone() })
    }

    /// Projection onto `sub ⊆ schema` (set semantics: duplicates collapse).
    pub fn project(&self, sub: AttrSet) -> Relation {
        let mut out = Relation::new(sub);
        for t in self.tuples() {
            out.insert(t.project(sub));
        }
        out
    }

    /// Does the functional dependency `lhs → rhs` hold?
    pub fn satisfies_fd(&self, lhs: AttrSet, rhs: AttrSet) -> bool {
        let mut seen: std::collections::HashMap<Vec<u8>, Vec<u8>> = Default::default();
        for t in self.tuples() {
            let l = t.project(lhs).vals;
            let r = t.project(rhs).vals;
            if let Some(prev) = seen.get(&l) {
                if *prev != r {
                    return false;
                }
            } else {
                seen.insert(l, r);
            }
        }
        true
    }
}

impl FromIterator<Tuple> for Relation {
    fn from_iter<T: IntoIterator<Item = Tuple>>(iter: T) -> Self {
        let mut it = iter.into_iter().peekable();
        let schema = it.peek().map(|t| t.schema).unwrap_or(AttrSet::EMPTY);
        let mut r = Relation::new(schema);
        for t in it {
            r.insert(t);
        }
        r
    }
}

/// Module visibility: public behavior is common knowledge, private behavior
/// is the secret to protect.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Public,
    Private,
}

/// A finite module: a total function from input tuples to output tuples.
#[derive(Clone, Debug)]
pub struct ModuleTable {
    pub id: String,
    pub visibility: Visibility,
    pub inputs: AttrSet,
    pub outputs: AttrSet,
    /// Input values (ascending input-attr order) → output values (ascending
    /// output-attr order). Total over the input domain product.
    table: std::collections::BTreeMap<Vec<u8>, Vec<u8>>,
}

impl ModuleTable {
    /// Build and validate a module table. `rows` pairs input tuples with
    /// output tuples; the table must be total and in-domain.
    pub fn new(
        u: &Universe,
        id: &str,
        visibility: Visibility,
        inputs: AttrSet,
        outputs: AttrSet,
        rows: &[(Tuple, Tuple)],
    ) -> Result<ModuleTable> {
        if !inputs.inter(outputs).is_empty() {
            return Err(Error::DuplicateOutputAttr(format!(
                "module {id}: inputs and outputs overlap on {:?}",
                u.names(inputs.inter(outputs))
            )));
        }
        let mut table = std::collections::BTreeMap::new();
        for (x, y) in rows {
            if x.schema != inputs || y.schema != outputs {
                return Err(Error::SchemaMismatch(format!("module {id}: table row schema")));
            }
            if table.insert(x.vals.clone(), y.vals.clone()).is_some() {
                return Err(Error::PartialTable(format!(
                    "module {id}: duplicate table entry for {}",
                    x.display(u)
                )));
            }
        }
        let expected: usize = inputs.iter().map(|a| u.domain_size(a)).product();
        if table.len() != expected {
            return Err(Error::PartialTable(format!(
                "module {id}: table has {} rows, input domain product has {expected}",
                table.len()
            )));
        }
        Ok(ModuleTable { id: id.to_string(), visibility, inputs, outputs, table })
    }

    pub fn is_public(&self) -> bool {
        self.visibility == Visibility::Public
    }

    /// All attributes `A_i = I_i ∪ O_i`.
    pub fn attrs(&self) -> AttrSet {
        self.inputs.union(self.outputs)
    }

    /// Apply the module function to an input tuple on `I_i`.
    pub fn eval(&self, x: &Tuple) -> Tuple {
        debug_assert_eq!(x.schema, self.inputs);
        Tuple { schema: self.outputs, vals: self.table[&x.vals].clone() }
    }

    /// Iterate `(input, output)` tuple pairs in input order.
    pub fn io_rows(&self) -> impl Iterator<Item = (Tuple, Tuple)> + '_ {
        self.table.iter().map(|(x, y)| {
            (
                Tuple { schema: self.inputs, vals: x.clone() },
                Tuple { schema: self.outputs, vals: y.clone() },
            )
        })
    }

    /// The module viewed as a relation over `I_i ∪ O_i`.
    pub fn relation(&self) -> Relation {
        self.io_rows().map(|(x, y)| x.merge(&y)).collect()
    }
}

/// A validated workflow: a DAG of modules over a shared attribute universe.
#[derive(Clone, Debug)]
pub struct Workflow {
    pub universe: Universe,
    pub modules: Vec<ModuleTable>,
    /// Module indices in a deterministic topological order.
    pub topo: Vec<usize>,
    /// Initial inputs `I0`: module attributes produced by no module.
    pub initial: AttrSet,
    /// All module attributes `A = ∪ A_i`.
    pub attrs: AttrSet,
}

impl Workflow {
    /// Validate the structural workflow assumptions and compute the evaluation
    /// order: disjoint outputs, acyclic wiring, total tables (checked by
    /// [`ModuleTable::new`]).
    pub fn new(universe: Universe, modules: Vec<ModuleTable>) -> Result<Workflow> {
        let mut produced = AttrSet::EMPTY;
        for m in &modules {
            let dup = produced.inter(m.outputs);
            if !dup.is_empty() {
                return Err(Error::DuplicateOutputAttr(format!(
                    "attribute {} produced twice",
                    universe.names(dup).join(",")
                )));
            }
            produced = produced.union(m.outputs);
        }
        let attrs = modules.iter().fold(AttrSet::EMPTY, |s, m| s.union(m.attrs()));
        let initial = attrs.diff(produced);

        // Kahn's algorithm over the data-flow edges m_i → m_j iff O_i ∩ I_j ≠ ∅,
        // preferring lower module indices for a deterministic order.
        let n = modules.len();
        let mut indeg = vec![0usize; n];
        let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if i != j && !modules[i].outputs.inter(modules[j].inputs).is_empty() {
                    succs[i].push(j);
                    indeg[j] += 1;
                }
            }
        }
        let mut topo = Vec::with_capacity(n);
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        while let Some(&i) = ready.iter().next() {
            ready.remove(&i);
            topo.push(i);
            for &j in &succs[i] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    ready.insert(j);
                }
            }
        }
        if topo.len() != n {
            let stuck: Vec<&str> = (0..n)
                .filter(|&i| indeg[i] > 0)
                .map(|i| modules[i].id.as_str())
                .collect();
            return Err(Error::CycleDetected(stuck.join(",")));
        }
        Ok(Workflow { universe, modules, topo, initial, attrs })
    }

    pub fn module_idx(&self, id: &str) -> Result<usize> {
        self.modules
            .iter()
            .position(|m| m.id == id)
            .ok_or_else(|| Error::Parse(format!("unknown module {id}")))
    }

    pub fn module(&self, id: &str) -> Result<&ModuleTable> {
        Ok(&self.modules[self.module_idx(id)?])
    }

    /// Index of the module producing attribute `a`, if any.
    pub fn producer_of(&self, a: AttrIdx) -> Option<usize> {
        self.modules.iter().position(|m| m.outputs.contains(a))
    }

    /// Indices of the modules consuming attribute `a`.
    pub fn consumers_of(&self, a: AttrIdx) -> Vec<usize> {
        (0..self.modules.len())
            .filter(|&i| self.modules[i].inputs.contains(a))
            .collect()
    }

    /// Forward-evaluate one full row from an initial-input tuple.
    pub fn eval_row(&self, p: &Tuple) -> Tuple {
        debug_assert_eq!(p.schema, self.initial);
        let mut row = p.clone();
        for &i in &self.topo {
            let m = &self.modules[i];
            let y = m.eval(&row.project(m.inputs));
            row = row.merge(&y);
        }
        row
    }

    /// The workflow relation: one row per initial-input tuple, computed by
    /// forward evaluation in topological order. With `inputs = None` the full
    /// product of the initial-input domains is used.
    pub fn relation(&self, inputs: Option<&[Tuple]>) -> Result<Relation> {
        let full;
        let inputs = match inputs {
            Some(ts) => {
                for t in ts {
                    if t.schema != self.initial {
                        return Err(Error::SchemaMismatch(
                            "initial-input tuple schema differs from I0".into(),
                        ));
                    }
                }
                ts
            }
            None => {
                full = self.universe.product(self.initial);
                &full
            }
        };
        let mut r = Relation::new(self.attrs);
        for p in inputs {
            r.insert(self.eval_row(p));
        }
        Ok(r)
    }
}

/// Additive per-attribute cost model, generic over the cost scalar so that
/// exact integer costs and floating-point costs share the optimizer code.
#[derive(Clone, Debug)]
pub struct CostModel<T> {
    costs: Vec<T>,
}

/// Scalar bound for costs: closed under addition, totally compared, copyable.
pub trait CostScalar:
    num_traits::Zero + std::ops::Add<Output = Self> + PartialOrd + Copy + fmt::Debug
{
}
impl<T> CostScalar for T where
    T: num_traits::Zero + std::ops::Add<Output = T> + PartialOrd + Copy + fmt::Debug
{
}

impl<T: CostScalar> CostModel<T> {
    pub fn from_fn(u: &Universe, f: impl Fn(AttrIdx) -> T) -> CostModel<T> {
        CostModel { costs: (0..u.len()).map(f).collect() }
    }

    pub fn attr_cost(&self, a: AttrIdx) -> T {
        self.costs[a]
    }

    /// `cost(H) = Σ_{a∈H} cost(a)`.
    pub fn cost_of(&self, h: AttrSet) -> T {
        h.iter().fold(T::zero(), |acc, a| acc + self.costs[a])
    }
}

impl CostModel<f64> {
    /// The costs declared in the workflow file.
    pub fn from_universe(u: &Universe) -> CostModel<f64> {
        CostModel { costs: (0..u.len()).map(|a| u.info(a).cost).collect() }
    }
}

// ---------------------------------------------------------------------------
// Workflow description files
// ---------------------------------------------------------------------------

/// JSON shape of one attribute declaration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AttrSpec {
    pub domain: Vec<DomainValue>,
    #[serde(default = "default_cost")]
    pub cost: f64,
}

fn default_cost() -> f64 {
    1.0
}

/// JSON shape of one module declaration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub name: String,
    pub visibility: Visibility,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    /// `[[input values...], [output values...]]` pairs; row order is
    /// irrelevant.
    pub table: Vec<(Vec<DomainValue>, Vec<DomainValue>)>,
}

/// JSON shape of a workflow description file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WorkflowSpec {
    /// Attribute name → declaration, in declaration order.
    pub attributes: IndexMap<String, AttrSpec>,
    pub modules: Vec<ModuleSpec>,
}

impl WorkflowSpec {
    pub fn from_json(text: &str) -> Result<WorkflowSpec> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialization cannot fail")
    }
}

/// Build a validated [`Workflow`] from a parsed description, reporting the
/// first violation found (unknown attribute, shared output, cycle, partial
/// table).
pub fn build_workflow(spec: &WorkflowSpec) -> Result<Workflow> {
    let mut universe = Universe::new();
    for (name, attr) in &spec.attributes {
        universe.declare(name, attr.domain.clone(), attr.cost)?;
    }
    let mut modules = Vec::new();
    for ms in &spec.modules {
        let inputs = universe.set_of(&ms.inputs)?;
        let outputs = universe.set_of(&ms.outputs)?;
        if inputs.len() != ms.inputs.len() || outputs.len() != ms.outputs.len() {
            return Err(Error::Parse(format!("module {}: repeated attribute", ms.name)));
        }
        let mut rows = Vec::new();
        for (xs, ys) in &ms.table {
            let x = tuple_from_values(&universe, inputs, &ms.inputs, xs)?;
            let y = tuple_from_values(&universe, outputs, &ms.outputs, ys)?;
            rows.push((x, y));
        }
        modules.push(ModuleTable::new(
            &universe,
            &ms.name,
            ms.visibility,
            inputs,
            outputs,
            &rows,
        )?);
    }
    Workflow::new(universe, modules)
}

/// Re-serialize a workflow to its file form (round-trip support).
pub fn workflow_to_spec(w: &Workflow) -> WorkflowSpec {
    let mut attributes = IndexMap::new();
    for a in 0..w.universe.len() {
        let info = w.universe.info(a);
        attributes.insert(
            info.name.clone(),
            AttrSpec { domain: info.domain.clone(), cost: info.cost },
        );
    }
    let modules = w
        .modules
        .iter()
        .map(|m| ModuleSpec {
            name: m.id.clone(),
            visibility: m.visibility,
            inputs: w.universe.names(m.inputs),
            outputs: w.universe.names(m.outputs),
            table: m
                .io_rows()
                .map(|(x, y)| (values_of(&w.universe, &x), values_of(&w.universe, &y)))
                .collect(),
        })
        .collect();
    WorkflowSpec { attributes, modules }
}

/// Decode a table row given the declared attribute order of the spec file.
fn tuple_from_values(
    u: &Universe,
    schema: AttrSet,
    names: &[String],
    values: &[DomainValue],
) -> Result<Tuple> {
    if names.len() != values.len() {
        return Err(Error::Parse(format!(
            "table row has {} values for {} attributes",
            values.len(),
            names.len()
        )));
    }
    let mut t = Tuple::new(schema, vec![0; schema.len()]);
    for (name, value) in names.iter().zip(values) {
        let a = u.idx(name)?;
        let vi = u
            .info(a)
            .domain
            .iter()
            .position(|d| d == value)
            .ok_or_else(|| Error::InvalidValue(format!("{value} not in domain of {name}")))?;
        t.vals[schema.rank(a)] = vi as u8;
    }
    Ok(t)
}

fn values_of(u: &Universe, t: &Tuple) -> Vec<DomainValue> {
    t.schema
        .iter()
        .map(|a| u.info(a).domain[t.get(a) as usize].clone())
        .collect()
}
