//! Lowering of parsed rules into plain estimation rules.
//!
//! The pipeline applies, in order: pool/interval expansion, aggregate
//! stripping, head splitting (disjunction and choice), and term lowering
//! (function terms and arithmetic). The result contains only rules of the
//! shape `h :- b1,...,bn` where every term is an integer constant or a
//! variable; everything else is accounted for in `ignored_literals`.

mod transform;

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::syntax::{self, ConstantTable, ParseError, RawRule};

pub use transform::{
    expand_pools_and_intervals, lower_terms, split_heads, strip_aggregates, LoweredRule,
    SyntheticTable,
};

/// A predicate key. The same name with different arities names distinct
/// predicates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Predicate {
    pub name: String,
    pub arity: usize,
}

impl Predicate {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Predicate { name: name.into(), arity }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// An argument position `p[i]` of a predicate, 1-based.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArgumentId {
    pub predicate: Predicate,
    pub position: usize,
}

impl ArgumentId {
    pub fn new(name: impl Into<String>, arity: usize, position: usize) -> Self {
        debug_assert!(position >= 1 && position <= arity);
        ArgumentId { predicate: Predicate::new(name, arity), position }
    }
}

impl fmt::Display for ArgumentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.predicate, self.position)
    }
}

/// A term of a normalized rule: an integer constant or a variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NormTerm {
    Const(i64),
    Var(String),
}

impl NormTerm {
    pub fn as_var(&self) -> Option<&str> {
        match self {
            NormTerm::Var(v) => Some(v),
            NormTerm::Const(_) => None,
        }
    }

    pub fn as_const(&self) -> Option<i64> {
        match self {
            NormTerm::Const(c) => Some(*c),
            NormTerm::Var(_) => None,
        }
    }
}

impl fmt::Display for NormTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormTerm::Const(c) => write!(f, "{c}"),
            NormTerm::Var(v) => f.write_str(v),
        }
    }
}

/// An atom of a normalized rule.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormAtom {
    pub predicate: String,
    pub terms: Vec<NormTerm>,
}

impl NormAtom {
    pub fn key(&self) -> Predicate {
        Predicate::new(self.predicate.clone(), self.terms.len())
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().filter_map(NormTerm::as_var)
    }
}

impl fmt::Display for NormAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.terms.is_empty() {
            f.write_str("(")?;
            for (i, t) in self.terms.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Head of a normalized rule.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NormHead {
    Atom(NormAtom),
    Falsum,
}

impl NormHead {
    pub fn atom(&self) -> Option<&NormAtom> {
        match self {
            NormHead::Atom(a) => Some(a),
            NormHead::Falsum => None,
        }
    }
}

/// Index of the source rule an estimation rule was derived from. Pool and
/// interval copies and split heads all share the origin of their source rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OriginId(pub usize);

impl fmt::Display for OriginId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The unit the estimation formulas consume: one head atom (or falsum), a
/// positive body, and a count of everything that was stripped or demoted.
///
/// Among the rules split from one disjunctive or choice head exactly one is
/// marked `representative`; only representatives contribute to grounding-size
/// totals, so each source rule is counted once per pool/interval copy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EstimationRule {
    pub head: NormHead,
    pub positive_body: Vec<NormAtom>,
    /// Negative literals + stripped aggregates + demoted atoms + comparisons.
    pub ignored_literals: usize,
    pub origin: OriginId,
    pub representative: bool,
    /// Variables that must be bound by the positive body: head variables plus
    /// variables of negative literals, comparisons, and demoted atoms.
    /// Variables occurring only inside aggregates or function terms vanish.
    pub required_vars: BTreeSet<String>,
}

impl EstimationRule {
    /// All variables of the remaining rule structure (head + positive body).
    pub fn variables(&self) -> BTreeSet<&str> {
        let mut vars: BTreeSet<&str> = BTreeSet::new();
        if let Some(atom) = self.head.atom() {
            vars.extend(atom.variables());
        }
        for atom in &self.positive_body {
            vars.extend(atom.variables());
        }
        vars
    }

    pub fn is_fact(&self) -> bool {
        matches!(self.head, NormHead::Atom(_)) && self.positive_body.is_empty()
    }
}

impl fmt::Display for EstimationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.head {
            NormHead::Atom(a) => write!(f, "{a}")?,
            NormHead::Falsum => {}
        }
        if !self.positive_body.is_empty() || matches!(self.head, NormHead::Falsum) {
            if matches!(self.head, NormHead::Falsum) {
                f.write_str(":- ")?;
            } else {
                f.write_str(" :- ")?;
            }
            for (i, atom) in self.positive_body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{atom}")?;
            }
        }
        f.write_str(".")
    }
}

/// Errors raised while lowering a parsed program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    IntervalBoundNotGround { rule: String },
    ExpansionLimitExceeded { cap: u64, rule: String },
    UnsafeRule { rule: String, variables: Vec<String> },
}

impl fmt::Display for NormalizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalizeError::IntervalBoundNotGround { rule } => {
                write!(f, "interval bound is not an integer constant in `{rule}`")
            }
            NormalizeError::ExpansionLimitExceeded { cap, rule } => {
                write!(f, "pool/interval expansion of `{rule}` exceeds the cap of {cap} rules")
            }
            NormalizeError::UnsafeRule { rule, variables } => {
                write!(f, "unsafe rule `{rule}`: variable(s) {} do not occur in the positive body",
                    variables.join(", "))
            }
        }
    }
}

impl core::error::Error for NormalizeError {}

/// Error of the combined parse + normalize pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProgramError {
    Parse(ParseError),
    Normalize(NormalizeError),
}

impl fmt::Display for ProgramError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProgramError::Parse(e) => write!(f, "{e}"),
            ProgramError::Normalize(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ProgramError {}

impl From<ParseError> for ProgramError {
    fn from(e: ParseError) -> Self {
        ProgramError::Parse(e)
    }
}

impl From<NormalizeError> for ProgramError {
    fn from(e: NormalizeError) -> Self {
        ProgramError::Normalize(e)
    }
}

/// Knobs for the normalization pipeline.
#[derive(Debug, Clone)]
pub struct NormalizeOptions {
    /// Upper bound on the number of rules a single rule may expand into.
    pub expansion_cap: u64,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions { expansion_cap: 1_000_000 }
    }
}

/// A fully normalized program: the unit of analysis.
#[derive(Debug, Clone)]
pub struct Program {
    pub rules: Vec<EstimationRule>,
    pub constants: ConstantTable,
    pub synthetics: SyntheticTable,
    /// Pretty-printed source rule per origin id.
    pub origins: Vec<String>,
    pub diagnostics: Vec<String>,
}

impl Program {
    /// Parses and normalizes a program with default options.
    pub fn parse(text: &str) -> Result<Program, ProgramError> {
        Program::parse_with(text, &NormalizeOptions::default())
    }

    pub fn parse_with(text: &str, opts: &NormalizeOptions) -> Result<Program, ProgramError> {
        let parsed = syntax::parse_program(text)?;
        let (rules, constants) = syntax::normalize_constants(&parsed.rules);
        let program = normalize(rules, constants, parsed.diagnostics, opts)?;
        Ok(program)
    }

    /// Every predicate occurring in a head or kept positive body.
    pub fn predicates(&self) -> BTreeSet<Predicate> {
        let mut set = BTreeSet::new();
        for rule in &self.rules {
            if let Some(atom) = rule.head.atom() {
                set.insert(atom.key());
            }
            for atom in &rule.positive_body {
                set.insert(atom.key());
            }
        }
        set
    }

    /// Every argument position of every predicate in the program.
    pub fn arguments(&self) -> Vec<ArgumentId> {
        let mut out = Vec::new();
        for pred in self.predicates() {
            for position in 1..=pred.arity {
                out.push(ArgumentId { predicate: pred.clone(), position });
            }
        }
        out
    }

    /// Renders a numeric constant using its source spelling when one exists.
    pub fn constant_name(&self, code: i64) -> String {
        if let Some(shape) = self.synthetics.shape_of(code) {
            return shape.to_string();
        }
        self.constants.display(code)
    }

    /// Pretty-prints a normalized atom with source constant names.
    pub fn render_atom(&self, atom: &NormAtom) -> String {
        let mut out = String::new();
        out.push_str(&atom.predicate);
        if !atom.terms.is_empty() {
            out.push('(');
            for (i, t) in atom.terms.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match t {
                    NormTerm::Const(c) => out.push_str(&self.constant_name(*c)),
                    NormTerm::Var(v) => out.push_str(v),
                }
            }
            out.push(')');
        }
        out
    }
}

/// Lowers constant-normalized rules into a [`Program`].
pub fn normalize(
    rules: Vec<RawRule>,
    constants: ConstantTable,
    mut diagnostics: Vec<String>,
    opts: &NormalizeOptions,
) -> Result<Program, NormalizeError> {
    let origins: Vec<String> = rules.iter().map(|r| r.to_string()).collect();

    // Expand pools/intervals and split heads first so every rule the term
    // lowering sees has a plain atom (or falsum) head.
    let mut flat: Vec<(RawRule, OriginId, bool, usize)> = Vec::new();
    for (idx, rule) in rules.into_iter().enumerate() {
        let origin = OriginId(idx);
        // Aggregates are stripped first so pools inside them cannot multiply
        // the rule.
        let (rule, stripped) = strip_aggregates(rule);
        let copies = expand_pools_and_intervals(&rule, opts.expansion_cap)?;
        for copy in copies {
            let split = split_heads(copy);
            for (piece, representative) in split {
                flat.push((piece, origin, representative, stripped));
            }
        }
    }

    // Synthetic constants for function terms and ground arithmetic are
    // allocated from the sorted set of shapes so the assignment does not
    // depend on rule order.
    let mut synthetics = SyntheticTable::new(constants.max_code() + 1);
    synthetics.prepopulate(flat.iter().map(|(r, _, _, _)| r));

    let mut out_rules = Vec::new();
    for (piece, origin, representative, stripped) in &flat {
        let lowered = lower_terms(piece, &mut synthetics);
        if lowered.demoted_head {
            diagnostics.push(format!(
                "head atom with multi-variable arithmetic in rule {origin}; treated as opaque"
            ));
        }
        let rule = EstimationRule {
            head: lowered.head,
            positive_body: lowered.positive_body,
            ignored_literals: lowered.ignored_literals + stripped,
            origin: *origin,
            representative: *representative,
            required_vars: lowered.required_vars,
        };
        check_safety(&rule)?;
        out_rules.push(rule);
    }

    Ok(Program { rules: out_rules, constants, synthetics, origins, diagnostics })
}

/// Verifies that every variable that must be bound occurs in a kept
/// positive-body atom.
pub fn check_safety(rule: &EstimationRule) -> Result<(), NormalizeError> {
    let positive: BTreeSet<&str> =
        rule.positive_body.iter().flat_map(NormAtom::variables).collect();
    let offending: Vec<String> = rule
        .required_vars
        .iter()
        .filter(|v| !positive.contains(v.as_str()))
        .cloned()
        .collect();
    if offending.is_empty() {
        Ok(())
    } else {
        Err(NormalizeError::UnsafeRule { rule: rule.to_string(), variables: offending })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    fn parse_raw(text: &str) -> Vec<RawRule> {
        let parsed = syntax::parse_program(text).unwrap();
        let (rules, _) = syntax::normalize_constants(&parsed.rules);
        rules
    }

    fn rule_texts(rules: &[RawRule]) -> Vec<String> {
        rules.iter().map(|r| r.to_string()).collect()
    }

    #[test]
    fn pool_expansion_is_cartesian() {
        let raw = parse_raw("p(a;b) :- q(c;d).");
        let out = expand_pools_and_intervals(&raw[0], 1_000_000).unwrap();
        // a->1, b->2, c->3, d->4 after constant normalization.
        assert_eq!(
            rule_texts(&out),
            vec![
                "p(1) :- q(3).",
                "p(1) :- q(4).",
                "p(2) :- q(3).",
                "p(2) :- q(4).",
            ]
        );
    }

    #[test]
    fn interval_expansion_is_cartesian() {
        let raw = parse_raw("p(1..3, a) :- q(1..2).");
        let out = expand_pools_and_intervals(&raw[0], 1_000_000).unwrap();
        assert_eq!(out.len(), 6);
        assert_eq!(out[0].to_string(), "p(1,4) :- q(1).");
        assert_eq!(out[5].to_string(), "p(3,4) :- q(2).");
    }

    #[test]
    fn singleton_and_empty_intervals() {
        let raw = parse_raw("p(1..1).");
        let out = expand_pools_and_intervals(&raw[0], 1_000_000).unwrap();
        assert_eq!(rule_texts(&out), vec!["p(1)."]);

        let raw = parse_raw("p(3..1).");
        let out = expand_pools_and_intervals(&raw[0], 1_000_000).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn expansion_count_is_product_of_cardinalities() {
        let raw = parse_raw("p(1..4, a;b;c) :- q(1..5).");
        let out = expand_pools_and_intervals(&raw[0], 1_000_000).unwrap();
        assert_eq!(out.len(), 4 * 3 * 5);
    }

    #[test]
    fn expansion_cap_is_enforced() {
        let raw = parse_raw("p(1..100).");
        let err = expand_pools_and_intervals(&raw[0], 99).unwrap_err();
        assert!(matches!(err, NormalizeError::ExpansionLimitExceeded { cap: 99, .. }));
    }

    #[test]
    fn interval_bounds_must_be_integers() {
        let raw = parse_raw("p(X..3) :- q(X).");
        let err = expand_pools_and_intervals(&raw[0], 1_000_000).unwrap_err();
        assert!(matches!(err, NormalizeError::IntervalBoundNotGround { .. }));
    }

    #[test]
    fn aggregates_are_stripped() {
        let program = Program::parse("q(1). r(1,1). p(X) :- q(X), #count{Y : r(X,Y)} < 3.").unwrap();
        let rule = program.rules.last().unwrap();
        assert_eq!(rule.to_string(), "p(X) :- q(X).");
        assert_eq!(rule.ignored_literals, 1);
        // Y occurred only inside the aggregate and vanished with it.
        assert!(!rule.variables().contains("Y"));
    }

    #[test]
    fn aggregate_only_constraint_keeps_empty_body() {
        let program = Program::parse(":- #sum{X : c(X)} >= 5.").unwrap();
        let rule = &program.rules[0];
        assert_eq!(rule.head, NormHead::Falsum);
        assert!(rule.positive_body.is_empty());
        assert_eq!(rule.ignored_literals, 1);
    }

    #[test]
    fn disjunction_splits_with_one_representative() {
        let raw = parse_raw("p(1) | p(2) :- q(1).");
        let out = split_heads(raw[0].clone());
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].0.to_string(), "p(1) :- q(1).");
        assert_eq!(out[1].0.to_string(), "p(2) :- q(1).");
        assert_eq!((out[0].1, out[1].1), (true, false));
    }

    #[test]
    fn choice_splits_keep_condition_literals() {
        let program =
            Program::parse("r(1,1). s(1). q(1). 1{p(X) : q(1); p(Y)}1 :- r(X,Y), s(Y).").unwrap();
        let texts: Vec<String> = program.rules[3..].iter().map(|r| r.to_string()).collect();
        assert_eq!(
            texts,
            vec!["p(X) :- r(X,Y), s(Y), q(1).", "p(Y) :- r(X,Y), s(Y)."]
        );
        assert!(program.rules[3].representative);
        assert!(!program.rules[4].representative);
    }

    #[test]
    fn empty_choice_degenerates_to_constraint() {
        let program = Program::parse("q(1). {} :- q(X).").unwrap();
        let rule = program.rules.last().unwrap();
        assert_eq!(rule.head, NormHead::Falsum);
        assert!(rule.representative);
    }

    #[test]
    fn arithmetic_atoms_are_classified() {
        // p(1+1): opaque constant; q(2*X+1): seen as q(X); r(2*X+Y): demoted;
        // s(Y): kept.
        let program =
            Program::parse("s(1). :- p(1+1), q(2*X+1), r(2*X+Y), s(Y), t(X).").unwrap();
        let rule = program.rules.last().unwrap();
        let preds: Vec<&str> =
            rule.positive_body.iter().map(|a| a.predicate.as_str()).collect();
        assert_eq!(preds, vec!["p", "q", "s", "t"]);
        let q = &rule.positive_body[1];
        assert_eq!(q.terms, vec![NormTerm::Var("X".into())]);
        let p = &rule.positive_body[0];
        assert!(matches!(p.terms[0], NormTerm::Const(c) if program.synthetics.shape_of(c).is_some()));
        // r was demoted; together with nothing else ignored this rule counts 1.
        assert_eq!(rule.ignored_literals, 1);
    }

    #[test]
    fn function_terms_share_synthetic_constants() {
        let program = Program::parse("p(f(a)). q(f(a)). r(f(b)).").unwrap();
        let c0 = program.rules[0].head.atom().unwrap().terms[0].as_const().unwrap();
        let c1 = program.rules[1].head.atom().unwrap().terms[0].as_const().unwrap();
        let c2 = program.rules[2].head.atom().unwrap().terms[0].as_const().unwrap();
        assert_eq!(c0, c1);
        assert_ne!(c0, c2);
        // Synthetic codes sit above every table code.
        assert!(c0 > program.constants.max_code());
        assert_eq!(program.synthetics.shape_of(c0), Some("f(1)"));
    }

    #[test]
    fn single_variable_arithmetic_becomes_the_variable() {
        let program = Program::parse("q(1). p(X+0) :- q(X).").unwrap();
        let rule = program.rules.last().unwrap();
        assert_eq!(rule.to_string(), "p(X) :- q(X).");
    }

    #[test]
    fn safety_accepts_bound_variables() {
        assert!(Program::parse("p(1). q(X,1) :- p(X).").is_ok());
    }

    #[test]
    fn safety_rejects_negative_only_variables() {
        let err = Program::parse("p(X) :- not q(X).").unwrap_err();
        match err {
            ProgramError::Normalize(NormalizeError::UnsafeRule { variables, .. }) => {
                assert_eq!(variables, vec!["X".to_string()]);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn safety_rejects_variables_whose_binding_was_demoted() {
        let err = Program::parse("s(1). p(X) :- q(2*X+Y), s(Y).").unwrap_err();
        match err {
            ProgramError::Normalize(NormalizeError::UnsafeRule { variables, .. }) => {
                assert_eq!(variables, vec!["X".to_string()]);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn safety_rejects_unbound_comparison_variables() {
        assert!(Program::parse("p(1). :- p(X), X < Y.").is_err());
    }

    #[test]
    fn variables_inside_function_terms_do_not_bind() {
        // X occurs only inside f(...) in the body, so the head X is unbound.
        let err = Program::parse("p(X) :- q(f(X)).").unwrap_err();
        assert!(matches!(
            err,
            ProgramError::Normalize(NormalizeError::UnsafeRule { .. })
        ));
        // A variable occurring nowhere else vanishes entirely.
        assert!(Program::parse("p(1). q(X) :- p(X), r(f(Y)).").is_ok());
        assert!(Program::parse("p(1). q(X) :- p(X), p(Y), r(f(Y)).").is_ok());
    }

    #[test]
    fn pool_copies_each_count_once() {
        let program = Program::parse("p(a;b).").unwrap();
        assert_eq!(program.rules.len(), 2);
        assert!(program.rules.iter().all(|r| r.representative));
        assert_eq!(program.rules[0].origin, program.rules[1].origin);
    }

    #[test]
    fn normalization_is_deterministic() {
        let text = "p(f(a)). q(g(b)). r(X) :- p(X), #count{Y : t(Y)} > 1.";
        let a = Program::parse(text).unwrap();
        let b = Program::parse(text).unwrap();
        assert_eq!(a.rules, b.rules);
    }

    #[test]
    fn synthetic_codes_do_not_depend_on_rule_order() {
        let a = Program::parse("p(f(a)). q(g(b)).").unwrap();
        let b = Program::parse("q(g(b)). p(f(a)).").unwrap();
        let code = |p: &Program, pred: &str| {
            p.rules
                .iter()
                .find(|r| r.head.atom().unwrap().predicate == pred)
                .unwrap()
                .head
                .atom()
                .unwrap()
                .terms[0]
                .as_const()
                .unwrap()
        };
        assert_eq!(code(&a, "p"), code(&b, "p"));
        assert_eq!(code(&a, "q"), code(&b, "q"));
    }
}
