use super::{Cardinality, Formula, Term};

const IMPLIES: u8 = 0;
const OR: u8 = 1;
const AND: u8 = 2;
const UNARY: u8 = 3;

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => IMPLIES,
        Formula::Or(_) => OR,
        Formula::And(_) => AND,
        _ => UNARY,
    }
}

/// Canonical ASCII rendering. Reparses to the same AST.
pub fn render(f: &Formula) -> String {
    let mut out = String::new();
    write(f, &mut out);
    out
}

fn write_at(f: &Formula, min: u8, out: &mut String) {
    if level(f) < min {
        out.push('(');
        write(f, out);
        out.push(')');
    } else {
        write(f, out);
    }
}

fn selector(card: Cardinality) -> char {
    match card {
        Cardinality::Uncountable => 'u',
        Cardinality::Aleph0 => 'c',
    }
}

fn write(f: &Formula, out: &mut String) {
    match f {
        Formula::Atom(a) => {
            out.push_str(&a.letter);
            if !a.args.is_empty() {
                out.push('(');
                for (i, t) in a.args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    match t {
                        Term::Var(v) => out.push_str(v),
                        Term::Const(c) => out.push_str(&c.to_string()),
                    }
                }
                out.push(')');
            }
            if let Some(tag) = a.tag {
                out.push('#');
                out.push_str(&tag.to_string());
            }
        }
        Formula::Neg(c) => {
            out.push('~');
            write_at(c, UNARY, out);
        }
        // nested same-connective operands keep their parentheses so the
        // tree shape survives a round trip
        Formula::And(cs) | Formula::Or(cs) => {
            let (sep, lvl) = if matches!(f, Formula::And(_)) { (" & ", AND) } else { (" | ", OR) };
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    out.push_str(sep);
                }
                write_at(c, lvl + 1, out);
            }
        }
        Formula::Implies(a, b) => {
            write_at(a, OR, out);
            out.push_str(" -> ");
            write_at(b, IMPLIES, out);
        }
        Formula::ChoiceAll(v, c) | Formula::ChoiceExists(v, c) => {
            out.push(if matches!(f, Formula::ChoiceAll(..)) { 'A' } else { 'E' });
            out.push(' ');
            out.push_str(v);
            out.push_str(". ");
            write_at(c, UNARY, out);
        }
        Formula::PRec(c) => {
            out.push_str("!p ");
            write_at(c, UNARY, out);
        }
        Formula::PCorec(c) => {
            out.push_str("?p ");
            write_at(c, UNARY, out);
        }
        Formula::BRec(k, c) => {
            out.push('!');
            out.push(selector(*k));
            out.push(' ');
            write_at(c, UNARY, out);
        }
        Formula::BCorec(k, c) => {
            out.push('?');
            out.push(selector(*k));
            out.push(' ');
            write_at(c, UNARY, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_formula, Atom, Constant};
    use proptest::prelude::*;

    #[test]
    fn atoms_and_recurrences() {
        assert_eq!(render(&Formula::atom("P")), "P");
        let f = Formula::BRec(Cardinality::Uncountable, Box::new(Formula::atom("P")));
        assert_eq!(render(&f), "!u P");
    }

    #[test]
    fn nested_operands_keep_parentheses() {
        let f = parse_formula("(P & Q) & R").unwrap();
        assert_eq!(render(&f), "(P & Q) & R");
        let g = parse_formula("P -> Q -> R").unwrap();
        assert_eq!(render(&g), "P -> Q -> R");
        let h = parse_formula("(P -> Q) -> R").unwrap();
        assert_eq!(render(&h), "(P -> Q) -> R");
    }

    #[test]
    fn canonicalizes_spacing() {
        let f = parse_formula("  E x.A y.p(x,y)#2|~!c  P ").unwrap();
        assert_eq!(render(&f), "E x. A y. p(x, y)#2 | ~!c P");
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            prop::sample::select(vec!["P", "Q", "R"]).prop_map(Formula::atom),
            (prop::sample::select(vec!["P", "Q"]), 1u32..9)
                .prop_map(|(l, t)| Formula::Atom(Atom::new(l).tagged(t))),
            (1u64..20, 1u64..20).prop_map(|(a, b)| Formula::Atom(Atom::with_args(
                "p",
                vec![Term::Const(Constant(a)), Term::Const(Constant(b))],
            ))),
        ];
        leaf.prop_recursive(4, 32, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::neg),
                prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::And),
                prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::Or),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
                inner.clone().prop_map(|f| Formula::PRec(Box::new(f))),
                inner.clone().prop_map(|f| Formula::PCorec(Box::new(f))),
                inner.clone().prop_map(|f| Formula::BRec(Cardinality::Aleph0, Box::new(f))),
                inner.clone().prop_map(|f| Formula::BCorec(Cardinality::Uncountable, Box::new(f))),
                inner.clone().prop_map(|f| Formula::ChoiceAll("x".into(), Box::new(f))),
                inner.prop_map(|f| Formula::ChoiceExists("y".into(), Box::new(f))),
            ]
        })
        .prop_filter("no shadowing", |f| !shadows(f, &mut Vec::new()))
    }

    fn shadows(f: &Formula, bound: &mut Vec<String>) -> bool {
        match f {
            Formula::ChoiceAll(v, b) | Formula::ChoiceExists(v, b) => {
                if bound.contains(v) {
                    return true;
                }
                bound.push(v.clone());
                let r = shadows(b, bound);
                bound.pop();
                r
            }
            _ => f.children().into_iter().any(|c| shadows(c, bound)),
        }
    }

    proptest! {
        #[test]
        fn parse_inverts_render(f in arb_formula()) {
            let text = render(&f);
            let back = parse_formula(&text).unwrap();
            prop_assert_eq!(&back, &f);
            prop_assert_eq!(render(&back), text);
        }
    }
}
