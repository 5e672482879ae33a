//! Formulas quoted in the literature: each parses, prints, and keeps its
//! weight and variable count across a round trip.

use detach::{parse_formula, print_formula, Term};

fn corpus() -> Vec<(String, Term)> {
    include_str!("data/corpus.txt")
        .lines()
        .map(|l| l.split('%').next().unwrap().trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            let (name, formula) = l.split_once(':').unwrap();
            let term = parse_formula(formula).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name.trim().to_string(), term)
        })
        .collect()
}

fn get(name: &str) -> Term {
    corpus().into_iter().find(|(n, _)| n == name).unwrap().1
}

#[test]
fn every_entry_round_trips() {
    let all = corpus();
    assert_eq!(all.len(), 13);
    for (name, t) in all {
        let again = parse_formula(&print_formula(&t)).unwrap();
        assert_eq!(again, t, "{name}");
        assert_eq!(again.weight(), t.weight(), "{name}");
        assert_eq!(again.distinct_vars(), t.distinct_vars(), "{name}");
    }
}

#[test]
fn single_axiom_has_23_letters() {
    let t = get("luk23");
    assert_eq!(t.weight(), 23);
    assert_eq!(t.distinct_vars(), 6);
    assert_eq!(print_formula(&t), "i(i(i(x,y),i(i(i(n(z),n(u)),v),z)),i(w,i(i(z,x),i(u,x))))");
    assert_eq!(t.canonicalize(), t);
}

#[test]
fn lattice_axiom_has_29_letters() {
    assert_eq!(get("lattice").weight(), 29);
}

#[test]
fn group_axiom_variable_counts() {
    assert_eq!(get("kunen_group").distinct_vars(), 3);
    assert_eq!(get("mccune_group").distinct_vars(), 4);
}

#[test]
fn wrapped_axioms_lose_the_wrapper() {
    let c4 = get("c4");
    assert_eq!(print_formula(&c4), "i(i(x,i(i(y,i(z,z)),i(x,u))),i(i(u,v),i(w,i(x,v))))");
    assert!(print_formula(&get("fitelson_sheffer")).starts_with("D(D(x,"));
    assert_eq!(get("harris").distinct_vars(), 17);
}
