//! The individual rule transformations of the normalization pipeline.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::syntax::{visit_rule_terms, Atom, Head, Literal, RawRule, Term};

use super::{NormAtom, NormHead, NormTerm, NormalizeError};

/// Expands every pool and interval term in the rule; the result is the
/// Cartesian product over all of them, in source order. Interval bounds must
/// be integer constants (symbolic constants have already been mapped to
/// integers at this point).
pub fn expand_pools_and_intervals(
    rule: &RawRule,
    cap: u64,
) -> Result<Vec<RawRule>, NormalizeError> {
    let mut out = Vec::new();
    let mut budget = cap;
    expand_rec(rule.clone(), &mut out, &mut budget, cap)?;
    Ok(out)
}

fn expand_rec(
    rule: RawRule,
    out: &mut Vec<RawRule>,
    budget: &mut u64,
    cap: u64,
) -> Result<(), NormalizeError> {
    // Find one pool/interval occurrence; if none, the rule is fully expanded.
    let mut choices: Option<Vec<Term>> = None;
    {
        let mut probe = rule.clone();
        visit_rule_terms(&mut probe, &mut |t| {
            if choices.is_some() {
                return;
            }
            if let Some(found) = find_expandable(t) {
                choices = Some(found);
            }
        });
    }
    let choices = match choices {
        None => {
            if *budget == 0 {
                return Err(NormalizeError::ExpansionLimitExceeded {
                    cap,
                    rule: rule.to_string(),
                });
            }
            *budget -= 1;
            out.push(rule);
            return Ok(());
        }
        Some(c) => c,
    };

    let members = expand_interval_members(&choices, &rule, cap)?;
    for member in members {
        let mut copy = rule.clone();
        let mut replaced = false;
        visit_rule_terms(&mut copy, &mut |t| {
            if !replaced && replace_first_expandable(t, &member) {
                replaced = true;
            }
        });
        debug_assert!(replaced);
        expand_rec(copy, out, budget, cap)?;
    }
    Ok(())
}

/// Returns the replacement candidates if `t` contains a pool or interval,
/// searching outer terms before their subterms.
fn find_expandable(t: &Term) -> Option<Vec<Term>> {
    match t {
        Term::Pool(members) => Some(members.clone()),
        Term::Interval(lo, hi) => Some(alloc::vec![Term::Interval(lo.clone(), hi.clone())]),
        Term::Integer(_) | Term::Symbol(_) | Term::Variable(_) => None,
        Term::Function(_, args) => args.iter().find_map(find_expandable),
        Term::BinaryOp(_, l, r) => find_expandable(l).or_else(|| find_expandable(r)),
    }
}

/// Turns an interval candidate into its member list; pools pass through.
fn expand_interval_members(
    choices: &[Term],
    rule: &RawRule,
    cap: u64,
) -> Result<Vec<Term>, NormalizeError> {
    if let [Term::Interval(lo, hi)] = choices {
        let (lo, hi) = match (lo.as_ref(), hi.as_ref()) {
            (Term::Integer(a), Term::Integer(b)) => (*a, *b),
            _ => {
                return Err(NormalizeError::IntervalBoundNotGround { rule: rule.to_string() })
            }
        };
        // An empty interval (lo > hi) legitimately yields zero copies.
        let span = if lo > hi { 0 } else { (hi as i128) - (lo as i128) + 1 };
        if span > cap as i128 {
            return Err(NormalizeError::ExpansionLimitExceeded { cap, rule: rule.to_string() });
        }
        let mut members = Vec::new();
        let mut v = lo;
        while v <= hi {
            members.push(Term::Integer(v));
            v = match v.checked_add(1) {
                Some(next) => next,
                None => break,
            };
        }
        Ok(members)
    } else {
        Ok(choices.to_vec())
    }
}

/// Replaces the first pool/interval occurrence in `t` with `member`.
/// Returns true if a replacement happened.
fn replace_first_expandable(t: &mut Term, member: &Term) -> bool {
    match t {
        Term::Pool(_) | Term::Interval(_, _) => {
            *t = member.clone();
            true
        }
        Term::Integer(_) | Term::Symbol(_) | Term::Variable(_) => false,
        Term::Function(_, args) => {
            for a in args {
                if replace_first_expandable(a, member) {
                    return true;
                }
            }
            false
        }
        Term::BinaryOp(_, l, r) => {
            replace_first_expandable(l, member) || replace_first_expandable(r, member)
        }
    }
}

/// Removes all aggregate atoms from the rule; variables occurring only
/// inside aggregates vanish with them. Returns the number removed.
pub fn strip_aggregates(mut rule: RawRule) -> (RawRule, usize) {
    let stripped = rule.aggregates.len();
    rule.aggregates.clear();
    (rule, stripped)
}

/// Splits disjunctive and choice heads into one rule per head atom, all
/// sharing the body. Exactly one output is flagged as the representative that
/// carries the original rule's grounding-size contribution.
///
/// Choice conditions keep their condition literals: they are appended to the
/// generated rule's body according to their sign. A choice with no conditions
/// degenerates to a constraint-shaped rule so the source rule still counts.
pub fn split_heads(rule: RawRule) -> Vec<(RawRule, bool)> {
    match rule.head {
        Head::Atom(_) | Head::Falsum => alloc::vec![(rule, true)],
        Head::Disjunction(ref atoms) => {
            let atoms = atoms.clone();
            atoms
                .into_iter()
                .enumerate()
                .map(|(i, atom)| {
                    let mut copy = rule.clone();
                    copy.head = Head::Atom(atom);
                    (copy, i == 0)
                })
                .collect()
        }
        Head::Choice { ref conditions, .. } => {
            if conditions.is_empty() {
                let mut copy = rule.clone();
                copy.head = Head::Falsum;
                return alloc::vec![(copy, true)];
            }
            let conditions = conditions.clone();
            conditions
                .into_iter()
                .enumerate()
                .map(|(i, cond)| {
                    let mut copy = rule.clone();
                    copy.head = Head::Atom(cond.head);
                    for lit in cond.literals {
                        match lit {
                            Literal::Positive(a) => copy.positive_body.push(a),
                            Literal::Negative(a) => copy.negative_body.push(a),
                        }
                    }
                    (copy, i == 0)
                })
                .collect()
        }
    }
}

/// Synthetic object constants standing in for function terms and for
/// arithmetic over constants. Identical shapes map to the same constant.
#[derive(Debug, Clone, Default)]
pub struct SyntheticTable {
    next_code: i64,
    by_shape: BTreeMap<String, i64>,
    inverse: BTreeMap<i64, String>,
}

impl SyntheticTable {
    pub fn new(first_code: i64) -> Self {
        SyntheticTable { next_code: first_code, by_shape: BTreeMap::new(), inverse: BTreeMap::new() }
    }

    /// Pre-assigns codes to every shape occurring in `rules`, in sorted shape
    /// order, so the assignment is independent of rule order.
    pub fn prepopulate<'a>(&mut self, rules: impl Iterator<Item = &'a RawRule>) {
        let mut shapes = BTreeSet::new();
        for rule in rules {
            if let Head::Atom(atom) = &rule.head {
                collect_atom_shapes(atom, &mut shapes);
            }
            for atom in &rule.positive_body {
                collect_atom_shapes(atom, &mut shapes);
            }
        }
        for shape in shapes {
            self.code_for(&shape);
        }
    }

    pub fn code_for(&mut self, shape: &str) -> i64 {
        if let Some(&code) = self.by_shape.get(shape) {
            return code;
        }
        let code = self.next_code;
        self.next_code += 1;
        self.by_shape.insert(shape.to_string(), code);
        self.inverse.insert(code, shape.to_string());
        code
    }

    pub fn shape_of(&self, code: i64) -> Option<&str> {
        self.inverse.get(&code).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.by_shape.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_shape.is_empty()
    }
}

fn collect_atom_shapes(atom: &Atom, shapes: &mut BTreeSet<String>) {
    if atom_is_demoted(atom) {
        return;
    }
    for term in &atom.terms {
        match term {
            Term::Function(_, _) => {
                shapes.insert(term.to_string());
            }
            Term::BinaryOp(_, _, _) => {
                if outer_variables(term).is_empty() {
                    shapes.insert(term.to_string());
                }
            }
            _ => {}
        }
    }
}

/// Variables of a term, not counting those inside function terms (a function
/// term is treated as an opaque object constant).
fn outer_variables(term: &Term) -> BTreeSet<&str> {
    let mut vars = BTreeSet::new();
    collect_outer_vars(term, &mut vars);
    vars
}

fn collect_outer_vars<'a>(term: &'a Term, out: &mut BTreeSet<&'a str>) {
    match term {
        Term::Variable(v) => {
            out.insert(v.as_str());
        }
        Term::Integer(_) | Term::Symbol(_) | Term::Function(_, _) => {}
        Term::BinaryOp(_, l, r) | Term::Interval(l, r) => {
            collect_outer_vars(l, out);
            collect_outer_vars(r, out);
        }
        Term::Pool(members) => {
            for m in members {
                collect_outer_vars(m, out);
            }
        }
    }
}

/// True if the atom must be moved out of the positive body: it contains an
/// arithmetic term over two or more variables.
fn atom_is_demoted(atom: &Atom) -> bool {
    atom.terms.iter().any(|t| {
        matches!(t, Term::BinaryOp(_, _, _)) && outer_variables(t).len() >= 2
    })
}

/// Result of lowering one rule.
#[derive(Debug, Clone)]
pub struct LoweredRule {
    pub head: NormHead,
    pub positive_body: Vec<NormAtom>,
    /// Negative literals + comparisons + demoted atoms.
    pub ignored_literals: usize,
    pub required_vars: BTreeSet<String>,
    /// True if a head term had to be treated as an opaque constant.
    pub demoted_head: bool,
}

/// Lowers every term of the rule to an integer constant or a variable.
///
/// Function terms become synthetic object constants (one per distinct
/// shape). An arithmetic term with no variables becomes a synthetic
/// constant, with exactly one variable it becomes that variable, and an
/// atom containing an arithmetic term over two or more variables is dropped
/// from the positive body and counted as ignored.
pub fn lower_terms(rule: &RawRule, synthetics: &mut SyntheticTable) -> LoweredRule {
    debug_assert!(rule.aggregates.is_empty(), "aggregates must be stripped before lowering");
    let mut required_vars = BTreeSet::new();
    let mut ignored = rule.negative_body.len() + rule.comparisons.len();
    let mut demoted_head = false;

    // Negative literals and comparisons are only counted, but the variables
    // they mention still have to be bound by the positive body.
    for atom in &rule.negative_body {
        for term in &atom.terms {
            required_vars.extend(outer_variables(term).into_iter().map(String::from));
        }
    }
    for cmp in &rule.comparisons {
        required_vars.extend(outer_variables(&cmp.left).into_iter().map(String::from));
        required_vars.extend(outer_variables(&cmp.right).into_iter().map(String::from));
    }

    let head = match &rule.head {
        Head::Falsum => NormHead::Falsum,
        Head::Atom(atom) => {
            let lowered = lower_atom_opaque(atom, synthetics, &mut demoted_head);
            required_vars.extend(lowered.variables().map(String::from));
            NormHead::Atom(lowered)
        }
        Head::Disjunction(_) | Head::Choice { .. } => {
            unreachable!("heads are split before lowering")
        }
    };

    let mut positive_body = Vec::new();
    for atom in &rule.positive_body {
        if atom_is_demoted(atom) {
            ignored += 1;
            for term in &atom.terms {
                required_vars.extend(outer_variables(term).into_iter().map(String::from));
            }
        } else {
            positive_body.push(lower_atom(atom, synthetics));
        }
    }

    LoweredRule { head, positive_body, ignored_literals: ignored, required_vars, demoted_head }
}

/// Lowers a kept (non-demoted) atom.
fn lower_atom(atom: &Atom, synthetics: &mut SyntheticTable) -> NormAtom {
    let terms = atom
        .terms
        .iter()
        .map(|t| lower_term(t, synthetics).expect("demoted atoms are filtered before lowering"))
        .collect();
    NormAtom { predicate: atom.predicate.clone(), terms }
}

/// Lowers a head atom; a multi-variable arithmetic term cannot be demoted
/// here, so it is treated as an opaque constant and flagged.
fn lower_atom_opaque(
    atom: &Atom,
    synthetics: &mut SyntheticTable,
    demoted_head: &mut bool,
) -> NormAtom {
    let terms = atom
        .terms
        .iter()
        .map(|t| match lower_term(t, synthetics) {
            Some(t) => t,
            None => {
                *demoted_head = true;
                NormTerm::Const(synthetics.code_for(&t.to_string()))
            }
        })
        .collect();
    NormAtom { predicate: atom.predicate.clone(), terms }
}

fn lower_term(term: &Term, synthetics: &mut SyntheticTable) -> Option<NormTerm> {
    match term {
        Term::Integer(n) => Some(NormTerm::Const(*n)),
        Term::Variable(v) => Some(NormTerm::Var(v.clone())),
        Term::Function(_, _) => {
            Some(NormTerm::Const(synthetics.code_for(&term.to_string())))
        }
        Term::BinaryOp(_, _, _) => {
            let vars = outer_variables(term);
            match vars.len() {
                0 => Some(NormTerm::Const(synthetics.code_for(&term.to_string()))),
                1 => Some(NormTerm::Var(vars.into_iter().next().unwrap().to_string())),
                _ => None,
            }
        }
        Term::Symbol(_) => unreachable!("symbolic constants are numeric after normalization"),
        Term::Pool(_) | Term::Interval(_, _) => {
            unreachable!("pools and intervals are expanded before lowering")
        }
    }
}
