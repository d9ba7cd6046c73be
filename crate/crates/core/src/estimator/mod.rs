//! Argument range/size estimation and per-rule grounding-size products.
//!
//! Per argument `p[i]` the estimator computes:
//!
//! * `est_min` / `est_max` — bounds on the values an intelligent grounder
//!   could place at that argument, derived from head constants and the
//!   bounds of body arguments sharing the head variable;
//! * `range` — how many values fit between those bounds, clamped to the
//!   number of object constants in the program;
//! * `size` — an estimate of the number of distinct values the argument
//!   will hold, the quantity rule-size products are built from.
//!
//! Recursive components are handled by indexing the recursion with the
//! group `j` of the component partition; the index strictly decreases on
//! intra-component steps, which makes plain memoized recursion total.

mod keys;
mod tight;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::depgraph::{build_component_analysis, build_dependency_graph, ComponentAnalysis};
use crate::normalize::{ArgumentId, EstimationRule, NormTerm, Program};

pub use keys::{kvars, KeyError, KeyMap};
pub use tight::{tight_estimates, NotTightError, TightEstimate};

/// Object constants at head position `i` of predicate `p`, over all rules.
/// Variables contribute nothing.
pub fn oc_argument(rules: &[EstimationRule], arg: &ArgumentId) -> BTreeSet<i64> {
    let mut set = BTreeSet::new();
    for rule in rules {
        if let Some(atom) = rule.head.atom() {
            if atom.key() == arg.predicate {
                if let Some(NormTerm::Const(c)) = atom.terms.get(arg.position - 1) {
                    set.insert(*c);
                }
            }
        }
    }
    set
}

/// All object constants occurring in head atoms, at any position.
pub fn oc_program(rules: &[EstimationRule]) -> BTreeSet<i64> {
    let mut set = BTreeSet::new();
    for rule in rules {
        if let Some(atom) = rule.head.atom() {
            for term in &atom.terms {
                if let NormTerm::Const(c) = term {
                    set.insert(*c);
                }
            }
        }
    }
    set
}

/// Final estimates for one argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgumentEstimate {
    /// `None` when no value can reach the argument at all.
    pub est_min: Option<i64>,
    pub est_max: Option<i64>,
    pub range: BigUint,
    pub size: BigUint,
    pub oc: BTreeSet<i64>,
}

/// Memoized estimates for every argument of a program.
#[derive(Debug, Clone)]
pub struct EstimateTable {
    arguments: BTreeMap<ArgumentId, ArgumentEstimate>,
    oc_program: BTreeSet<i64>,
    pub diagnostics: Vec<String>,
}

impl EstimateTable {
    /// Runs the full analysis for a program: dependency graph, component
    /// partitions, and every per-argument estimate.
    pub fn build(program: &Program) -> EstimateTable {
        let graph = build_dependency_graph(&program.rules);
        let analysis = build_component_analysis(&graph, &program.rules);
        EstimateTable::build_with(program, &analysis)
    }

    pub fn build_with(program: &Program, analysis: &ComponentAnalysis) -> EstimateTable {
        let mut evaluator = Evaluator::new(program, analysis);
        let mut arguments = BTreeMap::new();
        for arg in program.arguments() {
            let estimate = ArgumentEstimate {
                est_min: evaluator.est_min(&arg),
                est_max: evaluator.est_max(&arg),
                range: evaluator.est_range(&arg),
                size: evaluator.est_size(&arg),
                oc: evaluator.oc(&arg).clone(),
            };
            arguments.insert(arg, estimate);
        }
        let mut diagnostics = analysis.diagnostics.clone();
        diagnostics.extend(evaluator.diagnostics.iter().cloned());
        EstimateTable { arguments, oc_program: evaluator.oc_program.clone(), diagnostics }
    }

    pub fn get(&self, arg: &ArgumentId) -> Option<&ArgumentEstimate> {
        self.arguments.get(arg)
    }

    /// Argument size estimate; zero for arguments of unknown predicates.
    pub fn size(&self, arg: &ArgumentId) -> BigUint {
        self.arguments.get(arg).map(|e| e.size.clone()).unwrap_or_else(BigUint::zero)
    }

    pub fn oc_program(&self) -> &BTreeSet<i64> {
        &self.oc_program
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ArgumentId, &ArgumentEstimate)> {
        self.arguments.iter()
    }
}

/// The number of ground rules a single rule is estimated to produce: the
/// product, over its key variables, of the smallest size estimate among the
/// positive-body arguments carrying that variable. Only the representative
/// of a split head contributes; other split siblings return zero so the
/// source rule is counted once.
pub fn rule_size(rule: &EstimationRule, table: &EstimateTable, keys: &KeyMap) -> BigUint {
    if !rule.representative {
        return BigUint::zero();
    }
    let mut product = BigUint::one();
    for var in kvars(rule, keys) {
        let mut factor: Option<BigUint> = None;
        for atom in &rule.positive_body {
            let pred = atom.key();
            for (idx, term) in atom.terms.iter().enumerate() {
                if term.as_var() == Some(var.as_str()) {
                    let arg = ArgumentId { predicate: pred.clone(), position: idx + 1 };
                    let size = table.size(&arg);
                    factor = Some(match factor {
                        Some(f) => f.min(size),
                        None => size,
                    });
                }
            }
        }
        // kvars only yields variables that occur in the positive body, so a
        // missing factor cannot happen; fall back loudly if it ever does.
        let factor = factor.unwrap_or_else(|| BigUint::from(table.oc_program().len()));
        if factor.is_zero() {
            return BigUint::zero();
        }
        product *= factor;
    }
    product
}

/// Whole-program estimate: the sum of rule estimates over representative
/// rules. Facts contribute one each.
pub fn program_size(program: &Program, table: &EstimateTable, keys: &KeyMap) -> BigUint {
    program.rules.iter().map(|r| rule_size(r, table, keys)).sum()
}

/// Convenience: build the table and size the program in one call.
pub fn estimate_program_size(program: &Program, keys: &KeyMap) -> BigUint {
    let table = EstimateTable::build(program);
    program_size(program, &table, keys)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewriteDecision {
    Keep,
    Discard,
}

impl fmt::Display for RewriteDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RewriteDecision::Keep => f.write_str("Keep"),
            RewriteDecision::Discard => f.write_str("Discard"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonOutcome {
    pub decision: RewriteDecision,
    pub original: BigUint,
    pub rewritten: BigUint,
}

/// The rewrite gate: keep the rewriting iff its predicted grounding size is
/// smaller than or equal to the original's (ties keep it).
pub fn decide_rewrite(original: &Program, rewritten: &Program, keys: &KeyMap) -> ComparisonOutcome {
    let original_size = estimate_program_size(original, keys);
    let rewritten_size = estimate_program_size(rewritten, keys);
    let decision = if rewritten_size <= original_size {
        RewriteDecision::Keep
    } else {
        RewriteDecision::Discard
    };
    ComparisonOutcome { decision, original: original_size, rewritten: rewritten_size }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmptyCandidateList;

impl fmt::Display for EmptyCandidateList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("no candidate programs given")
    }
}

impl core::error::Error for EmptyCandidateList {}

/// Index of the candidate with the smallest predicted grounding size; ties
/// go to the lowest index.
pub fn pick_best(
    candidates: &[Program],
    keys: &KeyMap,
) -> Result<(usize, Vec<BigUint>), EmptyCandidateList> {
    if candidates.is_empty() {
        return Err(EmptyCandidateList);
    }
    let sizes: Vec<BigUint> =
        candidates.iter().map(|p| estimate_program_size(p, keys)).collect();
    let best = sizes
        .iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| a.cmp(b).then(ia.cmp(ib)))
        .map(|(i, _)| i)
        .expect("non-empty");
    Ok((best, sizes))
}

/// The j-indexed estimate recursions with memoization. `j` ranges over the
/// groups of the component partition of the argument's component; queries
/// with the full cardinality give the final estimates.
pub struct Evaluator<'p> {
    rules: &'p [EstimationRule],
    analysis: &'p ComponentAnalysis,
    oc_sets: BTreeMap<ArgumentId, BTreeSet<i64>>,
    oc_program: BTreeSet<i64>,
    min_gr: BTreeMap<(ArgumentId, usize), Option<i64>>,
    max_gr: BTreeMap<(ArgumentId, usize), Option<i64>>,
    size_gr: BTreeMap<(ArgumentId, usize), BigUint>,
    range_memo: BTreeMap<ArgumentId, BigUint>,
    pub diagnostics: Vec<String>,
}

impl<'p> Evaluator<'p> {
    pub fn new(program: &'p Program, analysis: &'p ComponentAnalysis) -> Self {
        Evaluator {
            rules: &program.rules,
            analysis,
            oc_sets: BTreeMap::new(),
            oc_program: oc_program(&program.rules),
            min_gr: BTreeMap::new(),
            max_gr: BTreeMap::new(),
            size_gr: BTreeMap::new(),
            range_memo: BTreeMap::new(),
            diagnostics: Vec::new(),
        }
    }

    fn oc(&mut self, arg: &ArgumentId) -> &BTreeSet<i64> {
        if !self.oc_sets.contains_key(arg) {
            let set = oc_argument(self.rules, arg);
            self.oc_sets.insert(arg.clone(), set);
        }
        &self.oc_sets[arg]
    }

    /// Partition cardinality of the argument's component; `None` encodes a
    /// component whose module has no exit rule.
    fn cardinality(&self, arg: &ArgumentId) -> Option<usize> {
        use crate::depgraph::Partition;
        match self.analysis.component_index(&arg.predicate) {
            Some(c) => match &self.analysis.partitions[c] {
                Partition::NoExitRule => None,
                Partition::Groups(groups) => Some(groups.len()),
            },
            // Unknown predicate: treated like an empty module.
            None => Some(0),
        }
    }

    /// Estimated minimum value of the argument; `None` when no value can
    /// appear there.
    pub fn est_min(&mut self, arg: &ArgumentId) -> Option<i64> {
        match self.cardinality(arg) {
            None => None,
            Some(n) => self.min_at(arg, n),
        }
    }

    pub fn est_max(&mut self, arg: &ArgumentId) -> Option<i64> {
        match self.cardinality(arg) {
            None => None,
            Some(n) => self.max_at(arg, n),
        }
    }

    /// `↓` restricted to the prefix `M1..Mj` of the component partition.
    pub fn min_at(&mut self, arg: &ArgumentId, j: usize) -> Option<i64> {
        let key = (arg.clone(), j);
        if let Some(v) = self.min_gr.get(&key) {
            return *v;
        }
        let mut best = self.oc(arg).iter().next().copied();
        for rule_idx in self.analysis.rules_m_prefix(self.rules, arg, j) {
            let contribution = self.min_rule(arg, j, rule_idx);
            best = match (best, contribution) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, None) => a,
                (None, b) => b,
            };
        }
        self.min_gr.insert(key, best);
        best
    }

    /// Per-rule bound: the head variable cannot go below the largest of the
    /// minimums of the body arguments carrying it. An unusable body argument
    /// (no possible value) makes the whole rule contribute nothing.
    fn min_rule(&mut self, arg: &ArgumentId, j: usize, rule_idx: usize) -> Option<i64> {
        let splits = self.split_args(arg, rule_idx);
        if splits.is_empty() {
            self.diagnostics.push(format_empty_args(arg, rule_idx));
            return None;
        }
        let mut best: Option<i64> = None;
        for (body_arg, same_component) in splits {
            let value = if same_component {
                self.min_at(&body_arg, j - 1)
            } else {
                self.est_min(&body_arg)
            };
            match value {
                None => return None,
                Some(v) => best = Some(best.map_or(v, |b: i64| b.max(v))),
            }
        }
        best
    }

    pub fn max_at(&mut self, arg: &ArgumentId, j: usize) -> Option<i64> {
        let key = (arg.clone(), j);
        if let Some(v) = self.max_gr.get(&key) {
            return *v;
        }
        let mut best = self.oc(arg).iter().next_back().copied();
        for rule_idx in self.analysis.rules_m_prefix(self.rules, arg, j) {
            let contribution = self.max_rule(arg, j, rule_idx);
            best = match (best, contribution) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, None) => a,
                (None, b) => b,
            };
        }
        self.max_gr.insert(key, best);
        best
    }

    fn max_rule(&mut self, arg: &ArgumentId, j: usize, rule_idx: usize) -> Option<i64> {
        let splits = self.split_args(arg, rule_idx);
        if splits.is_empty() {
            self.diagnostics.push(format_empty_args(arg, rule_idx));
            return None;
        }
        let mut best: Option<i64> = None;
        for (body_arg, same_component) in splits {
            let value = if same_component {
                self.max_at(&body_arg, j - 1)
            } else {
                self.est_max(&body_arg)
            };
            match value {
                None => return None,
                Some(v) => best = Some(best.map_or(v, |b: i64| b.min(v))),
            }
        }
        best
    }

    /// The body arguments carrying the head variable of `arg` in the given
    /// rule, each flagged with whether its predicate shares the component.
    fn split_args(&self, arg: &ArgumentId, rule_idx: usize) -> Vec<(ArgumentId, bool)> {
        let rule = &self.rules[rule_idx];
        let head = rule.head.atom().expect("rules_m only yields atom heads");
        let var = match head.terms.get(arg.position - 1) {
            Some(NormTerm::Var(v)) => v.as_str(),
            _ => return Vec::new(),
        };
        let component = self.analysis.component_index(&arg.predicate);
        let mut out = Vec::new();
        for atom in &rule.positive_body {
            let pred = atom.key();
            for (idx, term) in atom.terms.iter().enumerate() {
                if term.as_var() == Some(var) {
                    let same = self.analysis.component_index(&pred) == component
                        && component.is_some();
                    out.push((ArgumentId { predicate: pred.clone(), position: idx + 1 }, same));
                }
            }
        }
        out
    }

    /// Number of values expected between the min and max estimates, clamped
    /// to the number of object constants in the program. Zero when either
    /// bound is undefined or min exceeds max.
    pub fn est_range(&mut self, arg: &ArgumentId) -> BigUint {
        if let Some(v) = self.range_memo.get(arg) {
            return v.clone();
        }
        let value = match (self.est_min(arg), self.est_max(arg)) {
            (Some(lo), Some(hi)) => {
                let width: BigInt = BigInt::from(hi) - BigInt::from(lo) + 1;
                if width.is_positive() {
                    let width = width.to_biguint().expect("positive");
                    width.min(BigUint::from(self.oc_program.len()))
                } else {
                    BigUint::zero()
                }
            }
            _ => BigUint::zero(),
        };
        self.range_memo.insert(arg.clone(), value.clone());
        value
    }

    /// Final size estimate for an argument.
    pub fn est_size(&mut self, arg: &ArgumentId) -> BigUint {
        match self.cardinality(arg) {
            None => BigUint::zero(),
            Some(n) => self.size_at(arg, n),
        }
    }

    /// Size restricted to the prefix `M1..Mj`: the sum of per-rule bounds
    /// plus the argument's own constants, clamped by the range.
    pub fn size_at(&mut self, arg: &ArgumentId, j: usize) -> BigUint {
        let key = (arg.clone(), j);
        if let Some(v) = self.size_gr.get(&key) {
            return v.clone();
        }
        let mut sum = BigUint::from(self.oc(arg).len());
        for rule_idx in self.analysis.rules_m_prefix(self.rules, arg, j) {
            sum += self.size_rule(arg, j, rule_idx);
        }
        let value = sum.min(self.est_range(arg));
        self.size_gr.insert(key, value.clone());
        value
    }

    /// Per-rule bound: the head variable takes at most as many values as the
    /// smallest body argument carrying it.
    fn size_rule(&mut self, arg: &ArgumentId, j: usize, rule_idx: usize) -> BigUint {
        let splits = self.split_args(arg, rule_idx);
        if splits.is_empty() {
            self.diagnostics.push(format_empty_args(arg, rule_idx));
            return BigUint::from(self.oc_program.len());
        }
        let mut best: Option<BigUint> = None;
        for (body_arg, same_component) in splits {
            let value = if same_component {
                self.size_at(&body_arg, j - 1)
            } else {
                self.est_size(&body_arg)
            };
            best = Some(match best {
                Some(b) => b.min(value),
                None => value,
            });
        }
        best.expect("non-empty splits")
    }
}

fn format_empty_args(arg: &ArgumentId, rule_idx: usize) -> String {
    alloc::format!(
        "head variable of {arg} has no positive-body occurrence in rule index {rule_idx}; \
         using the worst-case fallback"
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const BASE: &str = "p(1). p(2). r(3). q(X,1) :- p(X).";
    const EXTENDED: &str = "p(1). p(2). r(3). q(X,1) :- p(X). r(2). r(4). \
                            s(X,Y,Z) :- r(X), p(X), p(Y), q(Y,Z).";
    const CYCLIC: &str = "p(1). p(2). r(3). q(X,1) :- p(X). r(2). r(4). \
                          s(X,Y,Z) :- r(X), p(X), p(Y), q(Y,Z). q(Y,X) :- s(X,Y,Z).";

    fn arg(name: &str, arity: usize, pos: usize) -> ArgumentId {
        ArgumentId::new(name, arity, pos)
    }

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn head_constant_sets() {
        let program = Program::parse(BASE).unwrap();
        assert_eq!(oc_argument(&program.rules, &arg("p", 1, 1)), [1, 2].into());
        assert!(oc_argument(&program.rules, &arg("q", 2, 1)).is_empty());
        assert_eq!(oc_argument(&program.rules, &arg("q", 2, 2)), [1].into());
        assert_eq!(oc_program(&program.rules), [1, 2, 3].into());
        // A predicate never in a head has an empty set.
        let program = Program::parse("q(1). p(X) :- q(X), u(X).").unwrap();
        assert!(oc_argument(&program.rules, &arg("u", 1, 1)).is_empty());
    }

    #[test]
    fn extended_sample_constant_sets() {
        let program = Program::parse(EXTENDED).unwrap();
        assert_eq!(oc_argument(&program.rules, &arg("r", 1, 1)), [2, 3, 4].into());
        assert_eq!(oc_program(&program.rules), [1, 2, 3, 4].into());
    }

    #[test]
    fn worked_bound_estimates() {
        let program = Program::parse(EXTENDED).unwrap();
        let table = EstimateTable::build(&program);
        let s1 = table.get(&arg("s", 3, 1)).unwrap();
        assert_eq!(s1.est_min, Some(2));
        assert_eq!(s1.est_max, Some(2));
        assert_eq!(s1.range, big(1));
        let r1 = table.get(&arg("r", 1, 1)).unwrap();
        assert_eq!((r1.est_min, r1.est_max), (Some(2), Some(4)));
        let p1 = table.get(&arg("p", 1, 1)).unwrap();
        assert_eq!((p1.est_min, p1.est_max), (Some(1), Some(2)));
    }

    #[test]
    fn worked_size_estimates() {
        let program = Program::parse(EXTENDED).unwrap();
        let table = EstimateTable::build(&program);
        assert_eq!(table.size(&arg("p", 1, 1)), big(2));
        assert_eq!(table.size(&arg("q", 2, 1)), big(2));
        assert_eq!(table.size(&arg("s", 3, 2)), big(2));
        assert_eq!(table.size(&arg("r", 1, 1)), big(3));
        assert_eq!(table.size(&arg("q", 2, 2)), big(1));
        assert_eq!(table.get(&arg("q", 2, 2)).unwrap().range, big(1));
    }

    #[test]
    fn fact_only_arguments_take_oc_extremes() {
        let program = Program::parse("p(7). p(3). p(5).").unwrap();
        let table = EstimateTable::build(&program);
        let e = table.get(&arg("p", 1, 1)).unwrap();
        assert_eq!((e.est_min, e.est_max), (Some(3), Some(7)));
        assert_eq!(e.size, big(3));
    }

    #[test]
    fn crossed_bounds_give_zero_range() {
        // r's argument is bounded below by 5 (from p) and above by 1 (from q).
        let program = Program::parse("p(5). q(1). r(X) :- p(X), q(X).").unwrap();
        let table = EstimateTable::build(&program);
        let e = table.get(&arg("r", 1, 1)).unwrap();
        assert_eq!((e.est_min, e.est_max), (Some(5), Some(1)));
        assert_eq!(e.range, big(0));
        assert_eq!(e.size, big(0));
    }

    #[test]
    fn no_exit_rule_component_is_all_zero() {
        let program = Program::parse("a(X) :- b(X). b(X) :- a(X).").unwrap();
        let table = EstimateTable::build(&program);
        let e = table.get(&arg("a", 1, 1)).unwrap();
        assert_eq!(e.est_min, None);
        assert_eq!(e.est_max, None);
        assert_eq!(e.range, big(0));
        assert_eq!(e.size, big(0));
    }

    #[test]
    fn undefined_body_argument_disables_the_rule() {
        // u never appears in a head: q gets no values through the rule, but
        // keeps its own head constants.
        let program = Program::parse("q(9). q(X) :- u(X).").unwrap();
        let table = EstimateTable::build(&program);
        let u = table.get(&arg("u", 1, 1)).unwrap();
        assert_eq!((u.est_min, u.est_max), (None, None));
        assert_eq!(u.size, big(0));
        let q = table.get(&arg("q", 1, 1)).unwrap();
        assert_eq!((q.est_min, q.est_max), (Some(9), Some(9)));
        assert_eq!(q.size, big(1));
    }

    #[test]
    fn recursive_size_estimate_is_clamped_and_stable() {
        let program = Program::parse(CYCLIC).unwrap();
        let table = EstimateTable::build(&program);
        let q1 = table.get(&arg("q", 2, 1)).unwrap();
        assert_eq!(q1.size, big(2));
        assert_eq!(q1.range, big(2));
        assert!(q1.size <= q1.range);
    }

    #[test]
    fn rule_sizes_for_the_worked_example() {
        let program = Program::parse(EXTENDED).unwrap();
        let table = EstimateTable::build(&program);
        let keys = KeyMap::new();
        // Facts contribute 1 each (empty product).
        assert_eq!(rule_size(&program.rules[0], &table, &keys), big(1));
        // X: min(3,2)=2, Y: min(2,2)=2, Z: min(1)=1.
        let s_rule = program.rules.last().unwrap();
        assert_eq!(rule_size(s_rule, &table, &keys), big(4));
    }

    #[test]
    fn zero_size_body_argument_zeroes_the_rule() {
        let program = Program::parse("q(1). r(X,Y) :- q(X), u(Y).").unwrap();
        let table = EstimateTable::build(&program);
        let rule = program.rules.last().unwrap();
        assert_eq!(rule_size(rule, &table, &KeyMap::new()), big(0));
    }

    #[test]
    fn program_sizes_for_the_worked_examples() {
        let base = Program::parse(BASE).unwrap();
        assert_eq!(estimate_program_size(&base, &KeyMap::new()), big(5));
        let extended = Program::parse(EXTENDED).unwrap();
        assert_eq!(estimate_program_size(&extended, &KeyMap::new()), big(11));
    }

    #[test]
    fn split_heads_count_once() {
        let program = Program::parse("q(1). p(1) | p(2) :- q(1).").unwrap();
        let table = EstimateTable::build(&program);
        let keys = KeyMap::new();
        let total: BigUint =
            program.rules.iter().map(|r| rule_size(r, &table, &keys)).sum();
        // One fact + one disjunctive rule counted once.
        assert_eq!(total, big(2));
    }

    #[test]
    fn keys_shrink_rule_products() {
        let text = "q(1,1). q(2,7). p(X,V) :- q(X,V).";
        let program = Program::parse(text).unwrap();
        let table = EstimateTable::build(&program);
        let rule = program.rules.last().unwrap();
        assert_eq!(rule_size(rule, &table, &KeyMap::new()), big(4));
        let mut keys = KeyMap::new();
        keys.declare(crate::normalize::Predicate::new("q", 2), [1].into_iter().collect())
            .unwrap();
        assert_eq!(rule_size(rule, &table, &keys), big(2));
    }

    #[test]
    fn rewrite_gate_keeps_ties() {
        let a = Program::parse(EXTENDED).unwrap();
        let b = Program::parse(EXTENDED).unwrap();
        let keys = KeyMap::new();
        let outcome = decide_rewrite(&a, &b, &keys);
        assert_eq!(outcome.decision, RewriteDecision::Keep);
        assert_eq!(outcome.original, outcome.rewritten);

        let forward = Program::parse("p(1). q(X) :- p(X).").unwrap();
        let smaller = Program::parse("p(1).").unwrap();
        assert_eq!(decide_rewrite(&forward, &smaller, &keys).decision, RewriteDecision::Keep);
        assert_eq!(decide_rewrite(&smaller, &forward, &keys).decision, RewriteDecision::Discard);
    }

    #[test]
    fn pick_best_prefers_first_minimum() {
        let keys = KeyMap::new();
        let candidates = vec![
            Program::parse("p(1). p(2). p(3).").unwrap(),
            Program::parse("p(1). p(2).").unwrap(),
            Program::parse("q(3). q(4).").unwrap(),
        ];
        let (best, sizes) = pick_best(&candidates, &keys).unwrap();
        assert_eq!(best, 1);
        assert_eq!(sizes, vec![big(3), big(2), big(2)]);

        let single = vec![Program::parse("p(1).").unwrap()];
        assert_eq!(pick_best(&single, &keys).unwrap().0, 0);

        assert_eq!(pick_best(&[], &keys), Err(EmptyCandidateList));
    }

    #[test]
    fn pick_best_finds_zero_size_candidate() {
        let keys = KeyMap::new();
        // The second candidate's rule depends on an unreachable predicate, so
        // its only rule has size zero.
        let candidates = vec![
            Program::parse("p(1). q(X) :- p(X).").unwrap(),
            Program::parse("q(X) :- u(X).").unwrap(),
        ];
        let (best, sizes) = pick_best(&candidates, &keys).unwrap();
        assert_eq!(best, 1);
        assert_eq!(sizes[1], big(0));
    }

    #[test]
    fn tight_route_matches_general_route_on_tight_samples() {
        for text in [BASE, EXTENDED, "p(1..3). q(X,Y) :- p(X), p(Y)."] {
            let program = Program::parse(text).unwrap();
            let table = EstimateTable::build(&program);
            let tight = tight_estimates(&program).unwrap();
            for (argument, estimate) in table.iter() {
                let t = &tight[argument];
                assert_eq!(t.est_min, estimate.est_min, "min of {argument} in {text}");
                assert_eq!(t.est_max, estimate.est_max, "max of {argument} in {text}");
                assert_eq!(t.range, estimate.range, "range of {argument} in {text}");
                assert_eq!(t.size, estimate.size, "size of {argument} in {text}");
            }
        }
    }

    #[test]
    fn tight_route_rejects_cycles() {
        let program = Program::parse(CYCLIC).unwrap();
        assert_eq!(tight_estimates(&program).unwrap_err(), NotTightError);
    }
}
