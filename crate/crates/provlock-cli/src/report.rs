//! Deterministic fixture reports for the `reproduce` command. Each bundled
//! fixture regenerates the table(s) it illustrates; the output is compared
//! byte-for-byte against a bundled expected file.

use provlock::closures::{classify_single_predecessor, public_closure};
use provlock::fixtures::fixture_workflow;
use provlock::model::{AttrSet, Relation, Tuple, Workflow};
use provlock::privacy::{construct_witness_world, gamma_achieved};
use provlock::public_safety::{enumerate_udsafe, ModuleView};
use provlock::standalone::standalone_worlds;
use provlock::Result;

/// Expected report per fixture, bundled at compile time.
pub const EXPECTED: &[(&str, &str)] = &[
    ("fig1-m1", include_str!("../expected/fig1-m1.txt")),
    ("fig3-r1", include_str!("../expected/fig3-r1.txt")),
    ("fig3-r2", include_str!("../expected/fig3-r2.txt")),
    ("wb-chain", include_str!("../expected/wb-chain.txt")),
    ("wa-nopred", include_str!("../expected/wa-nopred.txt")),
    ("app-multipred", include_str!("../expected/app-multipred.txt")),
    ("app-datashare", include_str!("../expected/app-datashare.txt")),
    ("fig2-singlepred", include_str!("../expected/fig2-singlepred.txt")),
];

/// Render a relation as a CSV-like table; hidden columns are flagged `*`.
fn table(w: &Workflow, r: &Relation, hidden: AttrSet) -> String {
    let mut out = String::new();
    let header: Vec<String> = r
        .schema
        .iter()
        .map(|a| {
            let name = w.universe.name(a);
            if hidden.contains(a) {
                format!("{name}*")
            } else {
                name.to_string()
            }
        })
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for t in r.tuples() {
        let row: Vec<String> = r
            .schema
            .iter()
            .map(|a| w.universe.info(a).domain[t.get(a) as usize].to_string())
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn gamma_line(w: &Workflow, r: &Relation, names: &[&str]) -> Result<String> {
    let h = w.universe.set_of(names)?;
    let g = gamma_achieved(r, w, h).gamma;
    Ok(format!("gamma with {{{}}} hidden: {g}\n", names.join(",")))
}

/// Build the report for one fixture.
pub fn report(name: &str) -> Result<String> {
    let w = fixture_workflow(name)?;
    let r = w.relation(None)?;
    let mut out = format!("fixture: {name}\n\nrelation:\n");
    out.push_str(&table(&w, &r, AttrSet::EMPTY));
    match name {
        "fig1-m1" => {
            let m = w.module("m1")?;
            let h = w.universe.set_of(&["a2", "a4"])?;
            let n = standalone_worlds(&w.universe, m, h, None).len();
            out.push_str(&format!("\nstandalone worlds with {{a2,a4}} hidden: {n}\n"));
        }
        "fig3-r1" | "fig3-r2" => {
            let cat = enumerate_udsafe(&ModuleView::of(w.module("m")?));
            out.push_str("\nUD-safe subsets:\n");
            for s in &cat.subsets {
                out.push_str(&format!("{{{}}}\n", w.universe.names(*s).join(",")));
            }
        }
        "wb-chain" => {
            let m1 = w.module("m1")?;
            let x = Tuple::new(m1.inputs, vec![0, 0]);
            let y = Tuple::new(m1.outputs, vec![1, 0]);
            let h_i = w.universe.set_of(&["a3"])?;
            let witness = construct_witness_world(&w, "m1", h_i, &x, &y)?;
            out.push_str("\nwitness world for m1: (0,0) -> (1,0), {a3,a4,a5} hidden:\n");
            out.push_str(&table(&w, &witness, w.universe.set_of(&["a3", "a4", "a5"])?));
            out.push('\n');
            out.push_str(&gamma_line(&w, &r, &["a3", "a4", "a5"])?);
            out.push_str(&gamma_line(&w, &r, &["a3", "a5"])?);
        }
        "wa-nopred" => {
            out.push('\n');
            out.push_str(&gamma_line(&w, &r, &["a2", "a3", "a4", "a5"])?);
        }
        "app-multipred" => {
            out.push('\n');
            out.push_str(&gamma_line(&w, &r, &["a2", "a3", "a4", "a5"])?);
        }
        "app-datashare" => {
            out.push('\n');
            out.push_str(&gamma_line(&w, &r, &["a3", "a4", "a5"])?);
        }
        "fig2-singlepred" => {
            out.clear();
            out.push_str(&format!("fixture: {name}\n\n"));
            for h in ["a2", "a3", "a4", "a5"] {
                let c = public_closure(&w, w.universe.set_of(&[h])?)?;
                let ids: Vec<&str> = c.iter().map(|&i| w.modules[i].id.as_str()).collect();
                out.push_str(&format!("public closure of {{{h}}}: {{{}}}\n", ids.join(",")));
            }
            let class = classify_single_predecessor(&w);
            out.push_str(&format!("single-predecessor: {}\n", class.is_single_predecessor));
        }
        _ => {}
    }
    Ok(out)
}

pub fn expected(name: &str) -> Option<&'static str> {
    EXPECTED.iter().find(|(n, _)| *n == name).map(|(_, e)| *e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use provlock::fixtures::fixture_names;

    /// Regenerate the bundled expected files (`cargo test -p provlock-cli
    /// -- --ignored bless`).
    #[test]
    #[ignore]
    fn bless() {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/expected");
        for name in fixture_names() {
            let r = report(name).unwrap();
            std::fs::write(format!("{dir}/{name}.txt"), r).unwrap();
        }
    }

    #[test]
    fn reports_match_expected() {
        for name in fixture_names() {
            assert_eq!(report(name).unwrap(), expected(name).unwrap(), "fixture {name}");
        }
    }
}
