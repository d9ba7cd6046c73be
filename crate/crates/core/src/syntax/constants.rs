//! Mapping of symbolic object constants to natural numbers.
//!
//! All alphanumeric object constants in the program are collected, sorted
//! byte-wise lexicographically, and the constant at (1-based) position `k`
//! is assigned the number `max_original_integer + k`, where
//! `max_original_integer` is the greatest integer literal occurring in the
//! program (floored at 0; negative literals do not count). Integers already
//! present are left unchanged, so assigned codes never collide with them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::ast::{Head, RawRule, Term};

/// Bidirectional mapping between symbolic constants and their numeric codes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstantTable {
    pub forward: BTreeMap<String, i64>,
    pub inverse: BTreeMap<i64, String>,
    pub max_original_integer: i64,
}

impl ConstantTable {
    /// The largest code in use (assigned or original); synthetic constants
    /// introduced later are allocated above this.
    pub fn max_code(&self) -> i64 {
        self.inverse
            .keys()
            .next_back()
            .copied()
            .unwrap_or(self.max_original_integer)
            .max(self.max_original_integer)
    }

    /// Renders a numeric constant using the original symbolic name when one
    /// was assigned.
    pub fn display(&self, code: i64) -> String {
        match self.inverse.get(&code) {
            Some(name) => name.clone(),
            None => alloc::format!("{code}"),
        }
    }
}

/// Replaces every symbolic constant in `rules` by its numeric code.
pub fn normalize_constants(rules: &[RawRule]) -> (Vec<RawRule>, ConstantTable) {
    let mut symbols = BTreeSet::new();
    let mut max_int: i64 = 0;
    for rule in rules {
        scan_rule(rule, &mut symbols, &mut max_int);
    }

    let mut table = ConstantTable {
        forward: BTreeMap::new(),
        inverse: BTreeMap::new(),
        max_original_integer: max_int,
    };
    for (idx, name) in symbols.iter().enumerate() {
        let code = max_int + idx as i64 + 1;
        table.forward.insert(name.clone(), code);
        table.inverse.insert(code, name.clone());
    }

    let rewritten = rules.iter().map(|r| rewrite_rule(r, &table)).collect();
    (rewritten, table)
}

fn scan_rule(rule: &RawRule, symbols: &mut BTreeSet<String>, max_int: &mut i64) {
    match &rule.head {
        Head::Atom(a) => scan_terms(&a.terms, symbols, max_int),
        Head::Falsum => {}
        Head::Disjunction(atoms) => {
            for a in atoms {
                scan_terms(&a.terms, symbols, max_int);
            }
        }
        Head::Choice { lower, upper, conditions } => {
            for bound in [lower, upper].into_iter().flatten() {
                *max_int = (*max_int).max(*bound);
            }
            for cond in conditions {
                scan_terms(&cond.head.terms, symbols, max_int);
                for lit in &cond.literals {
                    scan_terms(&lit.atom().terms, symbols, max_int);
                }
            }
        }
    }
    for atom in rule.positive_body.iter().chain(&rule.negative_body) {
        scan_terms(&atom.terms, symbols, max_int);
    }
    for cmp in &rule.comparisons {
        scan_term_rec(&cmp.left, symbols, max_int);
        scan_term_rec(&cmp.right, symbols, max_int);
    }
    for agg in &rule.aggregates {
        for elem in &agg.elements {
            scan_terms(&elem.terms, symbols, max_int);
            for lit in &elem.literals {
                scan_terms(&lit.atom().terms, symbols, max_int);
            }
        }
        scan_term_rec(&agg.bound, symbols, max_int);
    }
}

fn scan_terms(terms: &[Term], symbols: &mut BTreeSet<String>, max_int: &mut i64) {
    for t in terms {
        scan_term_rec(t, symbols, max_int);
    }
}

fn scan_term_rec(term: &Term, symbols: &mut BTreeSet<String>, max_int: &mut i64) {
    match term {
        Term::Integer(n) => {
            if *n > *max_int {
                *max_int = *n;
            }
        }
        Term::Symbol(s) => {
            symbols.insert(s.clone());
        }
        Term::Variable(_) => {}
        Term::Function(_, args) | Term::Pool(args) => {
            for a in args {
                scan_term_rec(a, symbols, max_int);
            }
        }
        Term::BinaryOp(_, l, r) | Term::Interval(l, r) => {
            scan_term_rec(l, symbols, max_int);
            scan_term_rec(r, symbols, max_int);
        }
    }
}

fn rewrite_rule(rule: &RawRule, table: &ConstantTable) -> RawRule {
    let mut out = rule.clone();
    visit_rule_terms(&mut out, &mut |t| rewrite_term(t, table));
    out
}

fn rewrite_term(term: &mut Term, table: &ConstantTable) {
    match term {
        Term::Symbol(s) => {
            let code = table.forward[s.as_str()];
            *term = Term::Integer(code);
        }
        Term::Integer(_) | Term::Variable(_) => {}
        Term::Function(_, args) | Term::Pool(args) => {
            for a in args {
                rewrite_term(a, table);
            }
        }
        Term::BinaryOp(_, l, r) | Term::Interval(l, r) => {
            rewrite_term(l, table);
            rewrite_term(r, table);
        }
    }
}

/// Applies `f` to every term of the rule, in every position.
pub(crate) fn visit_rule_terms(rule: &mut RawRule, f: &mut impl FnMut(&mut Term)) {
    match &mut rule.head {
        Head::Atom(a) => a.terms.iter_mut().for_each(&mut *f),
        Head::Falsum => {}
        Head::Disjunction(atoms) => {
            atoms.iter_mut().flat_map(|a| a.terms.iter_mut()).for_each(&mut *f)
        }
        Head::Choice { conditions, .. } => {
            for cond in conditions {
                cond.head.terms.iter_mut().for_each(&mut *f);
                for lit in &mut cond.literals {
                    match lit {
                        super::ast::Literal::Positive(a) | super::ast::Literal::Negative(a) => {
                            a.terms.iter_mut().for_each(&mut *f)
                        }
                    }
                }
            }
        }
    }
    for atom in rule.positive_body.iter_mut().chain(&mut rule.negative_body) {
        atom.terms.iter_mut().for_each(&mut *f);
    }
    for cmp in &mut rule.comparisons {
        f(&mut cmp.left);
        f(&mut cmp.right);
    }
    for agg in &mut rule.aggregates {
        for elem in &mut agg.elements {
            elem.terms.iter_mut().for_each(&mut *f);
            for lit in &mut elem.literals {
                match lit {
                    super::ast::Literal::Positive(a) | super::ast::Literal::Negative(a) => {
                        a.terms.iter_mut().for_each(&mut *f)
                    }
                }
            }
        }
        f(&mut agg.bound);
    }
}
