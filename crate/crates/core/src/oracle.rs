//! Reference grounder used to measure true grounding sizes at small scale.
//!
//! Two modes are provided. The default mode mirrors intelligent grounding:
//! a bottom-up fixpoint starting from the facts, producing a ground
//! instance of a rule whenever its positive body atoms are already derived.
//! The naive mode instantiates every rule with every combination of the
//! program's head object constants.
//!
//! Negative literals never block derivation in either mode: this is a
//! grounding-size oracle, not a solver. Rule counts only include
//! representative rules, one per distinct ground substitution of the rule's
//! variables, so split heads are counted once like the estimator does.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::estimator::oc_program;
use crate::normalize::{ArgumentId, EstimationRule, NormHead, NormTerm, Predicate, Program};

/// Caps on the fixpoint so adversarial inputs fail fast instead of looping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroundLimits {
    pub max_rules: u64,
    pub max_atoms: u64,
}

impl Default for GroundLimits {
    fn default() -> Self {
        GroundLimits { max_rules: 1_000_000, max_atoms: 1_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    Rules,
    Atoms,
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitKind::Rules => f.write_str("rules"),
            LimitKind::Atoms => f.write_str("atoms"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroundError {
    LimitExceeded { kind: LimitKind, limit: u64 },
}

impl fmt::Display for GroundError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundError::LimitExceeded { kind, limit } => {
                write!(f, "grounding exceeded the limit of {limit} {kind}")
            }
        }
    }
}

impl core::error::Error for GroundError {}

/// The result of grounding: derived atoms plus, per representative rule, the
/// set of ground substitutions it fired with.
#[derive(Debug, Clone)]
pub struct GroundProgram {
    /// `(rule index, variable names in order, substitution tuples)` for every
    /// representative rule with at least one instance.
    instances: Vec<(usize, Vec<String>, BTreeSet<Vec<i64>>)>,
    /// Ground tuples per predicate. In intelligent mode these are the derived
    /// atoms; in naive mode, every atom occurring in the instantiated rules.
    pub atoms: BTreeMap<Predicate, BTreeSet<Vec<i64>>>,
    total_rules: u64,
    fact_rules: u64,
}

impl GroundProgram {
    /// Number of ground rules. When `count_facts` is false, rules with an
    /// atom head and an empty body are excluded.
    pub fn rule_count(&self, count_facts: bool) -> u64 {
        if count_facts {
            self.total_rules
        } else {
            self.total_rules - self.fact_rules
        }
    }

    pub fn derived_atom_count(&self) -> u64 {
        self.atoms.values().map(|s| s.len() as u64).sum()
    }

    /// Distinct constants per argument position over the ground extensions.
    pub fn argument_sizes(&self) -> BTreeMap<ArgumentId, usize> {
        let mut out = BTreeMap::new();
        for (pred, tuples) in &self.atoms {
            for position in 1..=pred.arity {
                let distinct: BTreeSet<i64> =
                    tuples.iter().map(|t| t[position - 1]).collect();
                out.insert(
                    ArgumentId { predicate: pred.clone(), position },
                    distinct.len(),
                );
            }
        }
        out
    }

    /// Renders the ground program in input syntax, one rule per line, using
    /// source constant names.
    pub fn render(&self, program: &Program) -> String {
        let mut out = String::new();
        for (rule_idx, vars, substs) in &self.instances {
            let rule = &program.rules[*rule_idx];
            for tuple in substs {
                let env: BTreeMap<&str, i64> =
                    vars.iter().map(String::as_str).zip(tuple.iter().copied()).collect();
                match &rule.head {
                    NormHead::Atom(atom) => {
                        out.push_str(&program.render_atom(&instantiate(atom, &env)))
                    }
                    NormHead::Falsum => {}
                }
                if !rule.positive_body.is_empty() || matches!(rule.head, NormHead::Falsum) {
                    out.push_str(if matches!(rule.head, NormHead::Falsum) {
                        ":- "
                    } else {
                        " :- "
                    });
                    for (i, atom) in rule.positive_body.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        out.push_str(&program.render_atom(&instantiate(atom, &env)));
                    }
                }
                out.push_str(".\n");
            }
        }
        out
    }

    /// Iterates ground rules as `(head, body)` pairs of fully instantiated
    /// atoms, in deterministic order.
    pub fn ground_rules<'a>(
        &'a self,
        program: &'a Program,
    ) -> impl Iterator<Item = (Option<NormAtomOwned>, Vec<NormAtomOwned>)> + 'a {
        self.instances.iter().flat_map(move |(rule_idx, vars, substs)| {
            let rule = &program.rules[*rule_idx];
            substs.iter().map(move |tuple| {
                let env: BTreeMap<&str, i64> =
                    vars.iter().map(String::as_str).zip(tuple.iter().copied()).collect();
                let head = rule.head.atom().map(|a| instantiate(a, &env));
                let body = rule.positive_body.iter().map(|a| instantiate(a, &env)).collect();
                (head, body)
            })
        })
    }
}

/// A fully ground atom (all terms constants).
pub type NormAtomOwned = crate::normalize::NormAtom;

fn instantiate(atom: &crate::normalize::NormAtom, env: &BTreeMap<&str, i64>) -> NormAtomOwned {
    let terms = atom
        .terms
        .iter()
        .map(|t| match t {
            NormTerm::Const(c) => NormTerm::Const(*c),
            NormTerm::Var(v) => NormTerm::Const(env[v.as_str()]),
        })
        .collect();
    crate::normalize::NormAtom { predicate: atom.predicate.clone(), terms }
}

/// Bottom-up fixpoint grounding over positive bodies.
pub fn ground(program: &Program, limits: &GroundLimits) -> Result<GroundProgram, GroundError> {
    ground_rules_fixpoint(&program.rules, limits)
}

/// Same as [`ground`] but over a bare rule slice (used by tests that build
/// rule sets directly).
pub fn ground_rules_fixpoint(
    rules: &[EstimationRule],
    limits: &GroundLimits,
) -> Result<GroundProgram, GroundError> {
    let mut state = GroundState::new(rules, limits);

    // Rules with an empty positive body fire exactly once.
    for (idx, rule) in rules.iter().enumerate() {
        if rule.positive_body.is_empty() {
            state.record_instance(idx, Vec::new())?;
        }
    }
    state.promote_delta()?;

    while !state.delta_empty() {
        let mut found: Vec<(usize, Vec<i64>)> = Vec::new();
        for (idx, rule) in rules.iter().enumerate() {
            if rule.positive_body.is_empty() {
                continue;
            }
            for delta_pos in 0..rule.positive_body.len() {
                state.enumerate_matches(idx, delta_pos, &mut |tuple| {
                    found.push((idx, tuple));
                });
            }
        }
        state.clear_delta();
        for (idx, tuple) in found {
            state.record_instance(idx, tuple)?;
        }
        state.promote_delta()?;
    }

    Ok(state.finish())
}

struct GroundState<'r> {
    rules: &'r [EstimationRule],
    limits: GroundLimits,
    rule_vars: Vec<Vec<String>>,
    relations: BTreeMap<Predicate, BTreeSet<Vec<i64>>>,
    delta: BTreeMap<Predicate, BTreeSet<Vec<i64>>>,
    pending: BTreeMap<Predicate, BTreeSet<Vec<i64>>>,
    substs: Vec<BTreeSet<Vec<i64>>>,
    total_rules: u64,
    fact_rules: u64,
    atom_count: u64,
}

impl<'r> GroundState<'r> {
    fn new(rules: &'r [EstimationRule], limits: &GroundLimits) -> Self {
        let rule_vars = rules
            .iter()
            .map(|r| r.variables().into_iter().map(String::from).collect())
            .collect();
        GroundState {
            rules,
            limits: *limits,
            rule_vars,
            relations: BTreeMap::new(),
            delta: BTreeMap::new(),
            pending: BTreeMap::new(),
            substs: alloc::vec![BTreeSet::new(); rules.len()],
            total_rules: 0,
            fact_rules: 0,
            atom_count: 0,
        }
    }

    fn delta_empty(&self) -> bool {
        self.delta.values().all(BTreeSet::is_empty)
    }

    fn clear_delta(&mut self) {
        self.delta.clear();
    }

    /// Moves newly derived atoms into the delta and merges them into the
    /// full relations.
    fn promote_delta(&mut self) -> Result<(), GroundError> {
        let pending = core::mem::take(&mut self.pending);
        for (pred, tuples) in pending {
            for tuple in tuples {
                if self.relations.entry(pred.clone()).or_default().insert(tuple.clone()) {
                    self.atom_count += 1;
                    if self.atom_count > self.limits.max_atoms {
                        return Err(GroundError::LimitExceeded {
                            kind: LimitKind::Atoms,
                            limit: self.limits.max_atoms,
                        });
                    }
                    self.delta.entry(pred.clone()).or_default().insert(tuple);
                }
            }
        }
        Ok(())
    }

    /// Registers one ground substitution of a rule: counts it if the rule is
    /// representative and queues the instantiated head for derivation.
    fn record_instance(&mut self, rule_idx: usize, tuple: Vec<i64>) -> Result<(), GroundError> {
        let rule = &self.rules[rule_idx];
        if rule.representative && self.substs[rule_idx].insert(tuple.clone()) {
            self.total_rules += 1;
            if rule.is_fact() {
                self.fact_rules += 1;
            }
            if self.total_rules > self.limits.max_rules {
                return Err(GroundError::LimitExceeded {
                    kind: LimitKind::Rules,
                    limit: self.limits.max_rules,
                });
            }
        }
        if let NormHead::Atom(head) = &rule.head {
            let env: BTreeMap<&str, i64> = self.rule_vars[rule_idx]
                .iter()
                .map(String::as_str)
                .zip(tuple.iter().copied())
                .collect();
            let ground: Vec<i64> = head
                .terms
                .iter()
                .map(|t| match t {
                    NormTerm::Const(c) => *c,
                    NormTerm::Var(v) => env[v.as_str()],
                })
                .collect();
            let pred = head.key();
            if !self.relations.get(&pred).is_some_and(|s| s.contains(&ground)) {
                self.pending.entry(pred).or_default().insert(ground);
            }
        }
        Ok(())
    }

    /// Enumerates substitutions of a rule where the atom at `delta_pos`
    /// matches a delta tuple and every other atom matches the full relation.
    fn enumerate_matches(
        &self,
        rule_idx: usize,
        delta_pos: usize,
        emit: &mut impl FnMut(Vec<i64>),
    ) {
        let rule = &self.rules[rule_idx];
        let vars = &self.rule_vars[rule_idx];
        let mut env: BTreeMap<&str, i64> = BTreeMap::new();
        self.match_from(rule, delta_pos, 0, &mut env, vars, emit);
    }

    fn match_from<'a>(
        &self,
        rule: &'a EstimationRule,
        delta_pos: usize,
        body_pos: usize,
        env: &mut BTreeMap<&'a str, i64>,
        vars: &[String],
        emit: &mut impl FnMut(Vec<i64>),
    ) {
        if body_pos == rule.positive_body.len() {
            let tuple: Vec<i64> = vars.iter().map(|v| env[v.as_str()]).collect();
            emit(tuple);
            return;
        }
        let atom = &rule.positive_body[body_pos];
        let source = if body_pos == delta_pos { &self.delta } else { &self.relations };
        let Some(tuples) = source.get(&atom.key()) else { return };
        for tuple in tuples {
            let mut bound: Vec<&str> = Vec::new();
            let mut ok = true;
            for (term, value) in atom.terms.iter().zip(tuple) {
                match term {
                    NormTerm::Const(c) => {
                        if c != value {
                            ok = false;
                            break;
                        }
                    }
                    NormTerm::Var(v) => match env.get(v.as_str()) {
                        Some(existing) => {
                            if existing != value {
                                ok = false;
                                break;
                            }
                        }
                        None => {
                            env.insert(v.as_str(), *value);
                            bound.push(v.as_str());
                        }
                    },
                }
            }
            if ok {
                self.match_from(rule, delta_pos, body_pos + 1, env, vars, emit);
            }
            for v in bound {
                env.remove(v);
            }
        }
    }

    fn finish(self) -> GroundProgram {
        let instances = self
            .substs
            .into_iter()
            .enumerate()
            .filter(|(_, s)| !s.is_empty())
            .map(|(idx, s)| (idx, self.rule_vars[idx].clone(), s))
            .collect();
        GroundProgram {
            instances,
            atoms: self.relations,
            total_rules: self.total_rules,
            fact_rules: self.fact_rules,
        }
    }
}

/// Full instantiation over the program's head constants: every variable of
/// every rule is replaced by every object constant.
pub fn ground_naive(
    program: &Program,
    limits: &GroundLimits,
) -> Result<GroundProgram, GroundError> {
    let rules = &program.rules;
    let constants: Vec<i64> = oc_program(rules).into_iter().collect();
    let mut atoms: BTreeMap<Predicate, BTreeSet<Vec<i64>>> = BTreeMap::new();
    let mut instances = Vec::new();
    let mut total_rules: u64 = 0;
    let mut fact_rules: u64 = 0;

    fn record_atom(
        atoms: &mut BTreeMap<Predicate, BTreeSet<Vec<i64>>>,
        atom: &crate::normalize::NormAtom,
        env: &BTreeMap<&str, i64>,
    ) {
        let ground: Vec<i64> = atom
            .terms
            .iter()
            .map(|t| match t {
                NormTerm::Const(c) => *c,
                NormTerm::Var(v) => env[v.as_str()],
            })
            .collect();
        atoms.entry(atom.key()).or_default().insert(ground);
    }

    for (idx, rule) in rules.iter().enumerate() {
        let vars: Vec<String> = rule.variables().into_iter().map(String::from).collect();
        let combos = (constants.len() as u64)
            .checked_pow(vars.len() as u32)
            .filter(|&c| c <= limits.max_rules)
            .ok_or(GroundError::LimitExceeded {
                kind: LimitKind::Rules,
                limit: limits.max_rules,
            })?;
        if rule.representative {
            total_rules += combos;
            if total_rules > limits.max_rules {
                return Err(GroundError::LimitExceeded {
                    kind: LimitKind::Rules,
                    limit: limits.max_rules,
                });
            }
            if rule.is_fact() {
                fact_rules += combos;
            }
        }

        let mut substs = BTreeSet::new();
        let enumerate = EnumerateAll { vars: &vars, constants: &constants };
        let mut error = None;
        enumerate.run(&mut |env| {
            if rule.representative {
                let tuple: Vec<i64> = vars.iter().map(|v| env[v.as_str()]).collect();
                substs.insert(tuple);
            }
            if let NormHead::Atom(h) = &rule.head {
                record_atom(&mut atoms, h, env);
            }
            for atom in &rule.positive_body {
                record_atom(&mut atoms, atom, env);
            }
            let count: u64 = atoms.values().map(|s| s.len() as u64).sum();
            if count > limits.max_atoms {
                error = Some(GroundError::LimitExceeded {
                    kind: LimitKind::Atoms,
                    limit: limits.max_atoms,
                });
            }
            error.is_none()
        });
        if let Some(e) = error {
            return Err(e);
        }
        if rule.representative && !substs.is_empty() {
            instances.push((idx, vars.clone(), substs));
        }
    }

    Ok(GroundProgram { instances, atoms, total_rules, fact_rules })
}

struct EnumerateAll<'a> {
    vars: &'a [String],
    constants: &'a [i64],
}

impl<'a> EnumerateAll<'a> {
    /// Calls `f` with every assignment of constants to variables; `f`
    /// returns false to abort.
    fn run(&self, f: &mut impl FnMut(&BTreeMap<&str, i64>) -> bool) {
        let mut env = BTreeMap::new();
        self.rec(0, &mut env, f);
    }

    fn rec<'b>(
        &'b self,
        pos: usize,
        env: &mut BTreeMap<&'b str, i64>,
        f: &mut impl FnMut(&BTreeMap<&str, i64>) -> bool,
    ) -> bool {
        if pos == self.vars.len() {
            return f(env);
        }
        for &c in self.constants {
            env.insert(self.vars[pos].as_str(), c);
            if !self.rec(pos + 1, env, f) {
                return false;
            }
        }
        env.remove(self.vars[pos].as_str());
        true
    }
}

/// Exact error factor `predicted / actual`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroActualSize;

impl fmt::Display for ZeroActualSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("actual grounding size is zero; the error factor is undefined")
    }
}

impl core::error::Error for ZeroActualSize {}

pub fn error_factor(predicted: &BigUint, actual: &BigUint) -> Result<BigRational, ZeroActualSize> {
    if actual.is_zero() {
        return Err(ZeroActualSize);
    }
    Ok(BigRational::new(predicted.clone().into(), actual.clone().into()))
}

/// Arithmetic mean of error factors; `None` for an empty slice.
pub fn mean_factor(factors: &[BigRational]) -> Option<BigRational> {
    if factors.is_empty() {
        return None;
    }
    let sum: BigRational = factors.iter().cloned().sum();
    Some(sum / BigRational::from_integer(factors.len().into()))
}

/// Best-effort conversion for display; huge ratios saturate to infinity.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    let numer = r.numer().to_f64().unwrap_or(f64::INFINITY);
    let denom = r.denom().to_f64().unwrap_or(f64::INFINITY);
    numer / denom
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec::Vec;

    const BASE: &str = "p(1). p(2). r(3). q(X,1) :- p(X).";
    const EXTENDED: &str = "p(1). p(2). r(3). q(X,1) :- p(X). r(2). r(4). \
                            s(X,Y,Z) :- r(X), p(X), p(Y), q(Y,Z).";

    fn arg(name: &str, arity: usize, pos: usize) -> ArgumentId {
        ArgumentId::new(name, arity, pos)
    }

    #[test]
    fn base_sample_grounds_to_five_rules() {
        let program = Program::parse(BASE).unwrap();
        let ground = ground(&program, &GroundLimits::default()).unwrap();
        assert_eq!(ground.rule_count(true), 5);
        let text = ground.render(&program);
        assert!(text.contains("q(1,1) :- p(1)."));
        assert!(text.contains("q(2,1) :- p(2)."));
        // The instance for the undervived p(3) is absent.
        assert!(!text.contains("q(3,1)"));
    }

    #[test]
    fn extended_sample_adds_exactly_two_instances() {
        let program = Program::parse(EXTENDED).unwrap();
        let ground = ground(&program, &GroundLimits::default()).unwrap();
        assert_eq!(ground.rule_count(true), 9);
        let text = ground.render(&program);
        assert!(text.contains("s(2,1,1) :- r(2), p(2), p(1), q(1,1)."));
        assert!(text.contains("s(2,2,1) :- r(2), p(2), p(2), q(2,1)."));
    }

    #[test]
    fn unsatisfiable_body_contributes_nothing() {
        let program = Program::parse("q(1). p(X) :- q(X), u(X).").unwrap();
        let ground = ground(&program, &GroundLimits::default()).unwrap();
        assert_eq!(ground.rule_count(true), 1);
        assert!(!ground.atoms.contains_key(&Predicate::new("p", 1)));
    }

    #[test]
    fn naive_mode_instantiates_everything() {
        let program = Program::parse(BASE).unwrap();
        let ground = ground_naive(&program, &GroundLimits::default()).unwrap();
        assert_eq!(ground.rule_count(true), 6);
        let sizes = ground.argument_sizes();
        assert_eq!(sizes[&arg("p", 1, 1)], 3);
        assert_eq!(sizes[&arg("q", 2, 1)], 3);
        assert_eq!(sizes[&arg("q", 2, 2)], 1);
    }

    #[test]
    fn intelligent_argument_sizes() {
        let program = Program::parse(BASE).unwrap();
        let ground = ground(&program, &GroundLimits::default()).unwrap();
        let sizes = ground.argument_sizes();
        assert_eq!(sizes[&arg("q", 2, 1)], 2);
        assert_eq!(sizes[&arg("q", 2, 2)], 1);
        assert_eq!(sizes[&arg("p", 1, 1)], 2);
    }

    #[test]
    fn empty_program_measures_nothing() {
        let program = Program::parse("").unwrap();
        let ground = ground(&program, &GroundLimits::default()).unwrap();
        assert_eq!(ground.rule_count(true), 0);
        assert!(ground.argument_sizes().is_empty());
    }

    #[test]
    fn negative_literals_do_not_block_derivation() {
        let program = Program::parse("p(1). q(X) :- p(X), not q(X).").unwrap();
        let ground = ground(&program, &GroundLimits::default()).unwrap();
        assert_eq!(ground.rule_count(true), 2);
        assert!(ground.atoms[&Predicate::new("q", 1)].contains(&alloc::vec![1]));
    }

    #[test]
    fn split_heads_all_derive_but_count_once() {
        let program = Program::parse("q(1). p(1) | p(2) :- q(1).").unwrap();
        let ground = ground(&program, &GroundLimits::default()).unwrap();
        assert_eq!(ground.rule_count(true), 2);
        let p = &ground.atoms[&Predicate::new("p", 1)];
        assert!(p.contains(&alloc::vec![1]) && p.contains(&alloc::vec![2]));
    }

    #[test]
    fn recursive_programs_reach_a_fixpoint() {
        let program =
            Program::parse("e(1,2). e(2,3). e(3,4). t(X,Y) :- e(X,Y). t(X,Z) :- t(X,Y), e(Y,Z).")
                .unwrap();
        let ground = ground(&program, &GroundLimits::default()).unwrap();
        let t = &ground.atoms[&Predicate::new("t", 2)];
        assert_eq!(t.len(), 6);
        // 3 facts + 3 base instances + transitive instances (1,2->3),(1,3->4),
        // (2,3->4): one per (t(X,Y), e(Y,Z)) pair = 3+3+3.
        assert_eq!(ground.rule_count(true), 9);
    }

    #[test]
    fn fact_counting_toggle() {
        let program = Program::parse(BASE).unwrap();
        let ground = ground(&program, &GroundLimits::default()).unwrap();
        assert_eq!(ground.rule_count(true), 5);
        assert_eq!(ground.rule_count(false), 2);
    }

    #[test]
    fn limits_are_enforced() {
        let program = Program::parse("p(1..50).").unwrap();
        let tight_rules = GroundLimits { max_rules: 10, max_atoms: 1_000_000 };
        assert_eq!(
            ground(&program, &tight_rules).unwrap_err(),
            GroundError::LimitExceeded { kind: LimitKind::Rules, limit: 10 }
        );
        let tight_atoms = GroundLimits { max_rules: 1_000_000, max_atoms: 10 };
        assert_eq!(
            ground(&program, &tight_atoms).unwrap_err(),
            GroundError::LimitExceeded { kind: LimitKind::Atoms, limit: 10 }
        );
        let naive = Program::parse("c(1..9). p(X,Y,Z,W) :- c(X), c(Y), c(Z), c(W).").unwrap();
        assert!(matches!(
            ground_naive(&naive, &GroundLimits { max_rules: 100, max_atoms: 1_000_000 }),
            Err(GroundError::LimitExceeded { kind: LimitKind::Rules, .. })
        ));
    }

    #[test]
    fn error_factor_examples() {
        let two = error_factor(&BigUint::from(4u32), &BigUint::from(2u32)).unwrap();
        assert_eq!(two, BigRational::from_integer(2.into()));
        let one = error_factor(&BigUint::from(7u32), &BigUint::from(7u32)).unwrap();
        assert_eq!(one, BigRational::from_integer(1.into()));
        let quarter = error_factor(&BigUint::from(1u32), &BigUint::from(4u32)).unwrap();
        assert_eq!(ratio_to_f64(&quarter), 0.25);
        assert_eq!(
            error_factor(&BigUint::from(1u32), &BigUint::from(0u32)),
            Err(ZeroActualSize)
        );
    }

    #[test]
    fn mean_of_factors() {
        let factors: Vec<BigRational> = [(1, 1), (2, 1)]
            .into_iter()
            .map(|(n, d)| BigRational::new(n.into(), d.into()))
            .collect();
        let mean = mean_factor(&factors).unwrap();
        assert_eq!(mean, BigRational::new(3.into(), 2.into()));
        assert_eq!(mean_factor(&[]), None);
    }

    #[test]
    fn rendering_is_deterministic_and_named() {
        let program = Program::parse("p(a). q(X) :- p(X).").unwrap();
        let ground = ground(&program, &GroundLimits::default()).unwrap();
        let text = ground.render(&program);
        assert_eq!(text, "p(a).\nq(a) :- p(a).\n");
        assert_eq!(ground.render(&program), text);
    }

    #[test]
    fn ground_rule_bodies_are_derived() {
        let program = Program::parse(EXTENDED).unwrap();
        let result = ground(&program, &GroundLimits::default()).unwrap();
        for (_, body) in result.ground_rules(&program) {
            for atom in body {
                let tuple: Vec<i64> =
                    atom.terms.iter().map(|t| t.as_const().unwrap()).collect();
                assert!(result.atoms[&atom.key()].contains(&tuple));
            }
        }
    }
}
