use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{parse_with_bang, to_nnf, Atom, Bang, Formula, Term};

/// The production principles and their two instances used for separation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// `P & !(P -> P & Q) -> !Q`
    #[serde(rename = "short", alias = "short-prod")]
    ShortProd,
    /// `P & !(P -> P & Q) & !(R | Q -> R) -> !R`
    #[serde(rename = "long", alias = "long-prod")]
    LongProd,
    /// Short production with `P = Q = E x. A y. p(x, y)`.
    S4,
    /// Long production with `P = Q = R`, an enumeration letter.
    S6,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::ShortProd => "short",
            Scheme::LongProd => "long",
            Scheme::S4 => "s4",
            Scheme::S6 => "s6",
        }
    }

    /// The surface form, with implications, before substitution.
    pub fn surface(self) -> &'static str {
        match self {
            Scheme::ShortProd | Scheme::S4 => "P & !(P -> P & Q) -> !Q",
            Scheme::LongProd | Scheme::S6 => "P & !(P -> P & Q) & !(R | Q -> R) -> !R",
        }
    }

    fn letters(self) -> &'static [&'static str] {
        match self {
            Scheme::ShortProd | Scheme::S4 => &["P", "Q"],
            Scheme::LongProd | Scheme::S6 => &["P", "Q", "R"],
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "short" | "short-prod" => Ok(Scheme::ShortProd),
            "long" | "long-prod" => Ok(Scheme::LongProd),
            "s4" | "s4-instance" => Ok(Scheme::S4),
            "s6" | "s6-instance" => Ok(Scheme::S6),
            other => Err(format!("unknown scheme `{other}`")),
        }
    }
}

/// What a scheme letter is replaced by.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Binding {
    /// A nullary enumeration letter.
    Enumeration(String),
    /// `E x. A y. name(x, y)` with `name` a binary elementary letter.
    Elementary(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("scheme {scheme} needs {expected} letters, `{letter}` is bound otherwise")]
    KindMismatch { scheme: Scheme, letter: String, expected: &'static str },
    #[error("scheme {scheme} is not played under the {bang} recurrence")]
    Unsupported { scheme: Scheme, bang: &'static str },
    #[error("`{0}` is not a letter of the scheme")]
    UnknownLetter(String),
    #[error("letter `{0}` is bound both as enumeration and as elementary")]
    Conflict(String),
}

impl Binding {
    fn formula(&self) -> Formula {
        match self {
            Binding::Enumeration(name) => Formula::atom(name),
            Binding::Elementary(name) => Formula::ChoiceExists(
                "x".into(),
                Box::new(Formula::ChoiceAll(
                    "y".into(),
                    Box::new(Formula::Atom(Atom::with_args(
                        name.clone(),
                        vec![Term::Var("x".into()), Term::Var("y".into())],
                    ))),
                )),
            ),
        }
    }
}

/// Build the normal-form game formula of a scheme, with atom occurrences
/// tagged `1..` from left to right.
///
/// Letters missing from `letters` default to themselves (`P` to the enumeration
/// letter `P`) for the two production schemes; the instances fix their own.
pub fn instantiate_scheme(
    scheme: Scheme,
    bang: Bang,
    letters: &BTreeMap<String, Binding>,
) -> Result<Formula, SchemeError> {
    for l in letters.keys() {
        if !scheme.letters().contains(&l.as_str()) {
            return Err(SchemeError::UnknownLetter(l.clone()));
        }
    }
    let fixed = match scheme {
        Scheme::S4 => Some(Binding::Elementary("p".into())),
        Scheme::S6 => Some(Binding::Enumeration("P".into())),
        _ => None,
    };
    if let Some(fixed) = &fixed {
        if bang == Bang::Parallel {
            return Err(SchemeError::Unsupported { scheme, bang: bang.name() });
        }
        for (l, b) in letters {
            if std::mem::discriminant(b) != std::mem::discriminant(fixed) {
                let expected =
                    if matches!(fixed, Binding::Elementary(_)) { "elementary" } else { "enumeration" };
                return Err(SchemeError::KindMismatch { scheme, letter: l.clone(), expected });
            }
        }
    }
    let mut binding = BTreeMap::new();
    for &l in scheme.letters() {
        let b = match (&fixed, letters.get(l)) {
            (_, Some(b)) => b.clone(),
            (Some(f), None) => f.clone(),
            (None, None) => Binding::Enumeration(l.to_string()),
        };
        binding.insert(l.to_string(), b);
    }
    let surface = parse_with_bang(scheme.surface(), bang).expect("scheme surfaces parse");
    let substituted = replace_letters(&surface, &binding);
    substituted.letters().map_err(SchemeError::Conflict)?;
    let mut nnf = to_nnf(&substituted);
    let mut next = 1;
    tag_atoms(&mut nnf, &mut next);
    Ok(nnf)
}

fn replace_letters(f: &Formula, binding: &BTreeMap<String, Binding>) -> Formula {
    let r = |c: &Formula| Box::new(replace_letters(c, binding));
    match f {
        Formula::Atom(a) => binding.get(&a.letter).map(Binding::formula).unwrap_or_else(|| f.clone()),
        Formula::Neg(c) => Formula::Neg(r(c)),
        Formula::And(cs) => Formula::And(cs.iter().map(|c| replace_letters(c, binding)).collect()),
        Formula::Or(cs) => Formula::Or(cs.iter().map(|c| replace_letters(c, binding)).collect()),
        Formula::ChoiceAll(v, c) => Formula::ChoiceAll(v.clone(), r(c)),
        Formula::ChoiceExists(v, c) => Formula::ChoiceExists(v.clone(), r(c)),
        Formula::PRec(c) => Formula::PRec(r(c)),
        Formula::PCorec(c) => Formula::PCorec(r(c)),
        Formula::BRec(k, c) => Formula::BRec(*k, r(c)),
        Formula::BCorec(k, c) => Formula::BCorec(*k, r(c)),
        Formula::Implies(a, b) => Formula::Implies(r(a), r(b)),
    }
}

fn tag_atoms(f: &mut Formula, next: &mut u32) {
    match f {
        Formula::Atom(a) => {
            a.tag = Some(*next);
            *next += 1;
        }
        Formula::And(cs) | Formula::Or(cs) => cs.iter_mut().for_each(|c| tag_atoms(c, next)),
        Formula::Implies(a, b) => {
            tag_atoms(a, next);
            tag_atoms(b, next);
        }
        Formula::Neg(c)
        | Formula::ChoiceAll(_, c)
        | Formula::ChoiceExists(_, c)
        | Formula::PRec(c)
        | Formula::PCorec(c)
        | Formula::BRec(_, c)
        | Formula::BCorec(_, c) => tag_atoms(c, next),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::render;

    fn inst(s: Scheme, b: Bang) -> Formula {
        instantiate_scheme(s, b, &BTreeMap::new()).unwrap()
    }

    #[test]
    fn s4_instance() {
        assert_eq!(
            render(&inst(Scheme::S4, Bang::Aleph0)),
            "A x. E y. ~p(x, y)#1 | ?c (E x. A y. p(x, y)#2 & (A x. E y. ~p(x, y)#3 | \
             A x. E y. ~p(x, y)#4)) | !c E x. A y. p(x, y)#5"
        );
    }

    #[test]
    fn short_production_tags() {
        let mut b = BTreeMap::new();
        b.insert("Q".to_string(), Binding::Enumeration("P".into()));
        let f = instantiate_scheme(Scheme::ShortProd, Bang::Parallel, &b).unwrap();
        assert_eq!(render(&f), "~P#1 | ?p (P#2 & (~P#3 | ~P#4)) | !p P#5");
    }

    #[test]
    fn s6_instance_occurrences() {
        let f = inst(Scheme::S6, Bang::Uncountable);
        assert_eq!(
            render(&f),
            "~P#1 | ?u (P#2 & (~P#3 | ~P#4)) | ?u ((P#5 | P#6) & ~P#7) | !u P#8"
        );
        let atoms = f.atoms();
        assert_eq!(atoms.len(), 8);
        let negative = count_negative(&f);
        assert_eq!(negative, 4);
    }

    fn count_negative(f: &Formula) -> usize {
        match f {
            Formula::Neg(_) => 1,
            _ => f.children().into_iter().map(count_negative).sum(),
        }
    }

    #[test]
    fn errors() {
        let mut b = BTreeMap::new();
        b.insert("P".to_string(), Binding::Enumeration("P".into()));
        assert!(matches!(
            instantiate_scheme(Scheme::S4, Bang::Aleph0, &b),
            Err(SchemeError::KindMismatch { .. })
        ));
        assert!(matches!(
            instantiate_scheme(Scheme::S6, Bang::Parallel, &BTreeMap::new()),
            Err(SchemeError::Unsupported { .. })
        ));
        let mut c = BTreeMap::new();
        c.insert("P".to_string(), Binding::Enumeration("p".into()));
        c.insert("Q".to_string(), Binding::Elementary("p".into()));
        assert!(matches!(
            instantiate_scheme(Scheme::ShortProd, Bang::Parallel, &c),
            Err(SchemeError::Conflict(_))
        ));
    }
}
