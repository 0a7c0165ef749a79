use super::Formula;

/// Eliminate `->`, push negation down to the atoms and flatten nested
/// conjunctions and disjunctions.
pub fn to_nnf(f: &Formula) -> Formula {
    push(f, false)
}

/// No implication, and negation only directly over atoms.
pub fn is_nnf(f: &Formula) -> bool {
    match f {
        Formula::Implies(..) => false,
        Formula::Neg(c) => matches!(**c, Formula::Atom(_)),
        _ => f.children().into_iter().all(is_nnf),
    }
}

fn junction(and: bool, parts: Vec<Formula>) -> Formula {
    let mut flat = Vec::with_capacity(parts.len());
    for p in parts {
        match p {
            Formula::And(cs) if and => flat.extend(cs),
            Formula::Or(cs) if !and => flat.extend(cs),
            other => flat.push(other),
        }
    }
    if flat.len() == 1 {
        return flat.pop().unwrap();
    }
    if and {
        Formula::And(flat)
    } else {
        Formula::Or(flat)
    }
}

fn push(f: &Formula, negated: bool) -> Formula {
    let boxed = |c: &Formula, n: bool| Box::new(push(c, n));
    match f {
        Formula::Atom(_) if negated => Formula::neg(f.clone()),
        Formula::Atom(_) => f.clone(),
        Formula::Neg(c) => push(c, !negated),
        Formula::And(cs) => junction(!negated, cs.iter().map(|c| push(c, negated)).collect()),
        Formula::Or(cs) => junction(negated, cs.iter().map(|c| push(c, negated)).collect()),
        Formula::Implies(a, b) => junction(negated, vec![push(a, !negated), push(b, negated)]),
        Formula::ChoiceAll(v, c) if negated => Formula::ChoiceExists(v.clone(), boxed(c, true)),
        Formula::ChoiceAll(v, c) => Formula::ChoiceAll(v.clone(), boxed(c, false)),
        Formula::ChoiceExists(v, c) if negated => Formula::ChoiceAll(v.clone(), boxed(c, true)),
        Formula::ChoiceExists(v, c) => Formula::ChoiceExists(v.clone(), boxed(c, false)),
        Formula::PRec(c) if negated => Formula::PCorec(boxed(c, true)),
        Formula::PRec(c) => Formula::PRec(boxed(c, false)),
        Formula::PCorec(c) if negated => Formula::PRec(boxed(c, true)),
        Formula::PCorec(c) => Formula::PCorec(boxed(c, false)),
        Formula::BRec(k, c) if negated => Formula::BCorec(*k, boxed(c, true)),
        Formula::BRec(k, c) => Formula::BRec(*k, boxed(c, false)),
        Formula::BCorec(k, c) if negated => Formula::BRec(*k, boxed(c, true)),
        Formula::BCorec(k, c) => Formula::BCorec(*k, boxed(c, false)),
    }
}
