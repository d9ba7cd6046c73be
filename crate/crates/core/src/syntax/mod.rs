//! Lexing and parsing of the input language, plus constant normalization.

mod ast;
mod constants;
mod lexer;
mod parser;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use ast::{
    AggregateAtom, AggregateElement, AggregateFn, Atom, BinOp, ChoiceCondition, Comparator,
    Comparison, Head, Literal, RawRule, Term,
};
pub use constants::{normalize_constants, ConstantTable};
pub(crate) use constants::visit_rule_terms;

/// A syntax error with its source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl ParseError {
    fn new(line: u32, col: u32, message: impl Into<String>) -> Self {
        ParseError { line, col, message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl core::error::Error for ParseError {}

/// Result of [`parse_program`]: the rules in source order plus non-fatal
/// diagnostics (ignored directives, arity conflicts).
#[derive(Debug, Clone, Default)]
pub struct ParsedProgram {
    pub rules: Vec<RawRule>,
    pub diagnostics: Vec<String>,
}

/// Parses a program text into rules.
///
/// Facts are rules with an empty body; `:-` separates head and body and each
/// statement ends with `.`. A predicate used with two different arities is
/// reported as a diagnostic and the two uses are treated as distinct
/// predicates.
pub fn parse_program(text: &str) -> Result<ParsedProgram, ParseError> {
    let tokens = lexer::tokenize(text)?;
    let mut parser = parser::Parser::new(tokens);
    let rules = parser.parse_program()?;
    let mut diagnostics = parser.diagnostics;
    diagnostics.extend(arity_conflicts(&rules));
    Ok(ParsedProgram { rules, diagnostics })
}

/// Reports predicate names used with more than one arity.
fn arity_conflicts(rules: &[RawRule]) -> Vec<String> {
    use alloc::collections::{BTreeMap, BTreeSet};
    use alloc::string::ToString;
    let mut arities: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    fn note(arities: &mut BTreeMap<String, BTreeSet<usize>>, atom: &Atom) {
        arities.entry(atom.predicate.to_string()).or_default().insert(atom.arity());
    }
    for rule in rules {
        match &rule.head {
            Head::Atom(a) => note(&mut arities, a),
            Head::Falsum => {}
            Head::Disjunction(atoms) => atoms.iter().for_each(|a| note(&mut arities, a)),
            Head::Choice { conditions, .. } => {
                for cond in conditions {
                    note(&mut arities, &cond.head);
                    cond.literals.iter().for_each(|l| note(&mut arities, l.atom()));
                }
            }
        }
        rule.positive_body.iter().for_each(|a| note(&mut arities, a));
        rule.negative_body.iter().for_each(|a| note(&mut arities, a));
        for agg in &rule.aggregates {
            for elem in &agg.elements {
                elem.literals.iter().for_each(|l| note(&mut arities, l.atom()));
            }
        }
    }
    arities
        .into_iter()
        .filter(|(_, set)| set.len() > 1)
        .map(|(name, set)| {
            let list: Vec<String> = set.iter().map(|a| format!("{a}")).collect();
            format!(
                "predicate `{name}` used with arities {}; treated as distinct predicates",
                list.join(", ")
            )
        })
        .collect()
}

/// Pretty-prints rules one per line, in source order.
pub fn render_program(rules: &[RawRule]) -> String {
    let mut out = String::new();
    for rule in rules {
        out.push_str(&format!("{rule}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::borrow::ToOwned;
    use alloc::vec;

    fn parse(text: &str) -> Vec<RawRule> {
        parse_program(text).expect("parse failed").rules
    }

    #[test]
    fn facts_and_rule() {
        let rules = parse("p(1). p(2). r(3). q(X,1) :- p(X).");
        assert_eq!(rules.len(), 4);
        let last = &rules[3];
        assert_eq!(
            last.head,
            Head::Atom(Atom::new("q", vec![Term::Variable("X".into()), Term::Integer(1)]))
        );
        assert_eq!(last.positive_body, vec![Atom::new("p", vec![Term::Variable("X".into())])]);
        assert!(last.negative_body.is_empty());
    }

    #[test]
    fn empty_program() {
        assert!(parse("").is_empty());
    }

    #[test]
    fn constraint_with_negative_literal() {
        let rules = parse(":- p(X), not s(X).");
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].head, Head::Falsum);
        assert_eq!(rules[0].positive_body, vec![Atom::new("p", vec![Term::Variable("X".into())])]);
        assert_eq!(rules[0].negative_body, vec![Atom::new("s", vec![Term::Variable("X".into())])]);
    }

    #[test]
    fn pools_intervals_functions() {
        let rules = parse("p(a;b) :- q(c;d).\np(1..3, a) :- q(1..2).\nt(f(a,g(X))).");
        match &rules[0].head {
            Head::Atom(a) => assert!(matches!(a.terms[0], Term::Pool(ref m) if m.len() == 2)),
            other => panic!("unexpected head {other:?}"),
        }
        match &rules[1].head {
            Head::Atom(a) => {
                assert!(matches!(a.terms[0], Term::Interval(_, _)));
                assert_eq!(a.terms[1], Term::Symbol("a".into()));
            }
            other => panic!("unexpected head {other:?}"),
        }
    }

    #[test]
    fn aggregates_both_bound_sides() {
        let rules = parse("p(X) :- q(X), #count{Y : r(X,Y)} < 3.\n:- 5 <= #sum{X : c(X)}.");
        let agg = &rules[0].aggregates[0];
        assert_eq!(agg.function, AggregateFn::Count);
        assert_eq!(agg.comparator, Comparator::Lt);
        assert_eq!(agg.bound, Term::Integer(3));
        let agg = &rules[1].aggregates[0];
        assert_eq!(agg.function, AggregateFn::Sum);
        // `5 <= #sum{...}` is the same constraint as `#sum{...} >= 5`.
        assert_eq!(agg.comparator, Comparator::Ge);
        assert_eq!(agg.bound, Term::Integer(5));
    }

    #[test]
    fn choice_and_disjunction() {
        let rules = parse("1{p(X) : q(1); p(Y)}1 :- r(X,Y), s(Y).\na(1) | a(2) :- b.");
        match &rules[0].head {
            Head::Choice { lower, upper, conditions } => {
                assert_eq!((*lower, *upper), (Some(1), Some(1)));
                assert_eq!(conditions.len(), 2);
                assert_eq!(conditions[0].literals.len(), 1);
                assert!(conditions[1].literals.is_empty());
            }
            other => panic!("unexpected head {other:?}"),
        }
        match &rules[1].head {
            Head::Disjunction(atoms) => assert_eq!(atoms.len(), 2),
            other => panic!("unexpected head {other:?}"),
        }
    }

    #[test]
    fn classical_negation_is_name_mangled() {
        let rules = parse("-p(X) :- q(X), -r(X).");
        match &rules[0].head {
            Head::Atom(a) => assert_eq!(a.predicate, "-p"),
            other => panic!("unexpected head {other:?}"),
        }
        assert_eq!(rules[0].positive_body[1].predicate, "-r");
    }

    #[test]
    fn directives_ignored_or_rejected() {
        let parsed = parse_program("#show p/1. p(1).").unwrap();
        assert_eq!(parsed.rules.len(), 1);
        assert_eq!(parsed.diagnostics, vec!["ignored directive #show".to_owned()]);

        assert!(parse_program("#external p(1).").is_err());
        assert!(parse_program(":~ p(X). [1@1]").is_err());
        assert!(parse_program("#minimize{X : p(X)}.").is_err());
    }

    #[test]
    fn error_positions() {
        let err = parse_program("p(1).\nq(").unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse_program("p(_).").unwrap_err();
        assert_eq!((err.line, err.col), (1, 3));
    }

    #[test]
    fn arity_conflict_reported_not_fatal() {
        let parsed = parse_program("p(1). p(1,2).").unwrap();
        assert_eq!(parsed.rules.len(), 2);
        assert_eq!(parsed.diagnostics.len(), 1);
        assert!(parsed.diagnostics[0].contains("`p`"));
    }

    #[test]
    fn negative_integers_and_arithmetic() {
        let rules = parse("p(-3). q(X) :- r(X - 1), s(2*X+Y).");
        match &rules[0].head {
            Head::Atom(a) => assert_eq!(a.terms[0], Term::Integer(-3)),
            other => panic!("unexpected head {other:?}"),
        }
        assert!(matches!(rules[1].positive_body[0].terms[0], Term::BinaryOp(BinOp::Sub, _, _)));
    }

    #[test]
    fn comparisons_collected_separately() {
        let rules = parse("p(X) :- q(X), X < 3, X != 2.");
        assert_eq!(rules[0].comparisons.len(), 2);
        assert_eq!(rules[0].positive_body.len(), 1);
    }

    #[test]
    fn constant_mapping_follows_sorted_positions() {
        // Constants {a, b} with greatest integer 5: a -> 6, b -> 7.
        let parsed = parse("p(a). p(b). q(5).");
        let (rules, table) = normalize_constants(&parsed);
        assert_eq!(table.forward["a"], 6);
        assert_eq!(table.forward["b"], 7);
        assert_eq!(table.max_original_integer, 5);
        match &rules[0].head {
            Head::Atom(a) => assert_eq!(a.terms[0], Term::Integer(6)),
            other => panic!("unexpected head {other:?}"),
        }
    }

    #[test]
    fn constant_mapping_without_integers() {
        // {z, a} with no integers: a -> 1, z -> 2.
        let parsed = parse("p(z). p(a).");
        let (_, table) = normalize_constants(&parsed);
        assert_eq!(table.forward["a"], 1);
        assert_eq!(table.forward["z"], 2);
        assert_eq!(table.max_original_integer, 0);
    }

    #[test]
    fn integer_only_program_has_empty_table() {
        let parsed = parse("p(1). p(2).");
        let (rules, table) = normalize_constants(&parsed);
        assert!(table.forward.is_empty());
        assert_eq!(rules, parse("p(1). p(2)."));
    }

    #[test]
    fn max_integer_scans_intervals_pools_and_arithmetic() {
        let parsed = parse("p(1..9). q(c).");
        let (_, table) = normalize_constants(&parsed);
        assert_eq!(table.forward["c"], 10);

        let parsed = parse("p(2;11). q(c).");
        let (_, table) = normalize_constants(&parsed);
        assert_eq!(table.forward["c"], 12);

        let parsed = parse("p(X) :- q(X + 20). r(c).");
        let (_, table) = normalize_constants(&parsed);
        assert_eq!(table.forward["c"], 21);

        // Negative integers do not raise the floor.
        let parsed = parse("p(-50). q(c).");
        let (_, table) = normalize_constants(&parsed);
        assert_eq!(table.forward["c"], 1);
    }
}
