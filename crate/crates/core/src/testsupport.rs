//! Deterministic random-program generators and a cache-free reference
//! evaluator, shared by the property and acceptance test suites.
//!
//! Enabled by the `test-support` feature; not part of the stable API.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

use crate::depgraph::{ComponentAnalysis, Partition};
use crate::estimator::KeyMap;
use crate::normalize::{ArgumentId, EstimationRule, NormTerm, Program};

/// xorshift64* generator; deterministic across platforms.
#[derive(Debug, Clone)]
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    /// Uniform value in `0..n` (`n` > 0).
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    /// True with probability `percent`/100.
    pub fn chance(&mut self, percent: u64) -> bool {
        self.below(100) < percent
    }
}

/// Bounds for the random program generator.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub max_predicates: usize,
    pub max_rules: usize,
    pub max_facts: usize,
    pub max_arity: usize,
    pub max_constant: i64,
    pub max_body_atoms: usize,
    /// When false, rule bodies only use predicates with a strictly smaller
    /// index than the head, which makes the program tight by construction.
    pub allow_recursion: bool,
    /// Probability (percent) of attaching a negative literal to a rule.
    pub negative_percent: u64,
}

impl GenConfig {
    pub fn tight() -> Self {
        GenConfig {
            max_predicates: 8,
            max_rules: 15,
            max_facts: 20,
            max_arity: 3,
            max_constant: 9,
            max_body_atoms: 3,
            allow_recursion: false,
            negative_percent: 20,
        }
    }

    pub fn recursive() -> Self {
        GenConfig { allow_recursion: true, ..GenConfig::tight() }
    }

    /// Small enough for the cache-free reference evaluator.
    pub fn small() -> Self {
        GenConfig {
            max_predicates: 4,
            max_rules: 5,
            max_facts: 6,
            max_arity: 2,
            max_constant: 6,
            max_body_atoms: 2,
            allow_recursion: true,
            negative_percent: 10,
        }
    }
}

/// Generates rule texts, one statement per entry. Every rule is safe by
/// construction: head variables are drawn from the body's variables.
pub fn generate_rules(rng: &mut Rng, cfg: &GenConfig) -> Vec<String> {
    let npreds = 1 + rng.below(cfg.max_predicates as u64) as usize;
    let arities: Vec<usize> =
        (0..npreds).map(|_| 1 + rng.below(cfg.max_arity as u64) as usize).collect();
    let pred_name = |i: usize| format!("p{i}");
    let mut out = Vec::new();

    let nfacts = 1 + rng.below(cfg.max_facts as u64);
    for _ in 0..nfacts {
        let p = rng.below(npreds as u64) as usize;
        let terms: Vec<String> = (0..arities[p])
            .map(|_| format!("{}", 1 + rng.below(cfg.max_constant as u64)))
            .collect();
        out.push(format!("{}({}).", pred_name(p), terms.join(",")));
    }

    let nrules = rng.below(cfg.max_rules as u64 + 1);
    for _ in 0..nrules {
        let head = if cfg.allow_recursion || npreds == 1 {
            rng.below(npreds as u64) as usize
        } else {
            1 + rng.below(npreds as u64 - 1) as usize
        };
        let body_choices = if cfg.allow_recursion { npreds } else { head.max(1) };
        let nbody = 1 + rng.below(cfg.max_body_atoms as u64) as usize;
        let nvars = 1 + rng.below(4);
        let var_name = |i: u64| format!("X{i}");

        let mut body = Vec::new();
        let mut body_vars: Vec<String> = Vec::new();
        for _ in 0..nbody {
            let b = rng.below(body_choices as u64) as usize;
            let terms: Vec<String> = (0..arities[b])
                .map(|_| {
                    if rng.chance(60) {
                        let v = var_name(rng.below(nvars));
                        if !body_vars.contains(&v) {
                            body_vars.push(v.clone());
                        }
                        v
                    } else {
                        format!("{}", 1 + rng.below(cfg.max_constant as u64))
                    }
                })
                .collect();
            body.push(format!("{}({})", pred_name(b), terms.join(",")));
        }

        let head_terms: Vec<String> = (0..arities[head])
            .map(|_| {
                if !body_vars.is_empty() && rng.chance(60) {
                    body_vars[rng.below(body_vars.len() as u64) as usize].clone()
                } else {
                    format!("{}", 1 + rng.below(cfg.max_constant as u64))
                }
            })
            .collect();

        if !body_vars.is_empty() && rng.chance(cfg.negative_percent) {
            let b = rng.below(body_choices as u64) as usize;
            let terms: Vec<String> = (0..arities[b])
                .map(|_| body_vars[rng.below(body_vars.len() as u64) as usize].clone())
                .collect();
            body.push(format!("not {}({})", pred_name(b), terms.join(",")));
        }

        out.push(format!(
            "{}({}) :- {}.",
            pred_name(head),
            head_terms.join(","),
            body.join(", ")
        ));
    }
    out
}

pub fn generate_program(rng: &mut Rng, cfg: &GenConfig) -> Program {
    let text = generate_rules(rng, cfg).join("\n");
    Program::parse(&text).expect("generated programs are well-formed")
}

/// Declares a random key (a non-empty position subset) for roughly half of
/// the program's predicates.
pub fn generate_keys(rng: &mut Rng, program: &Program) -> KeyMap {
    let mut keys = KeyMap::new();
    for pred in program.predicates() {
        if pred.arity == 0 || !rng.chance(50) {
            continue;
        }
        let mut positions = BTreeSet::new();
        for pos in 1..=pred.arity {
            if rng.chance(50) {
                positions.insert(pos);
            }
        }
        if positions.is_empty() {
            positions.insert(1 + rng.below(pred.arity as u64) as usize);
        }
        keys.declare(pred, positions).expect("fresh predicate");
    }
    keys
}

/// Cache-free evaluation of the general estimate recursions, written
/// directly from their definitions. Exponential in the worst case; only for
/// small programs.
pub mod reference {
    use super::*;

    fn oc(rules: &[EstimationRule], arg: &ArgumentId) -> BTreeSet<i64> {
        crate::estimator::oc_argument(rules, arg)
    }

    fn cardinality(analysis: &ComponentAnalysis, arg: &ArgumentId) -> Option<usize> {
        match analysis.component_index(&arg.predicate) {
            Some(c) => match &analysis.partitions[c] {
                Partition::NoExitRule => None,
                Partition::Groups(groups) => Some(groups.len()),
            },
            None => Some(0),
        }
    }

    /// Body arguments carrying the head variable, with the intra-component
    /// flag.
    fn splits(
        rules: &[EstimationRule],
        analysis: &ComponentAnalysis,
        arg: &ArgumentId,
        rule_idx: usize,
    ) -> Vec<(ArgumentId, bool)> {
        let rule = &rules[rule_idx];
        let head = rule.head.atom().expect("atom head");
        let var = match &head.terms[arg.position - 1] {
            NormTerm::Var(v) => v.as_str(),
            NormTerm::Const(_) => return Vec::new(),
        };
        let comp = analysis.component_index(&arg.predicate);
        let mut out = Vec::new();
        for atom in &rule.positive_body {
            for (idx, term) in atom.terms.iter().enumerate() {
                if term.as_var() == Some(var) {
                    let same = comp.is_some() && analysis.component_index(&atom.key()) == comp;
                    out.push((ArgumentId { predicate: atom.key(), position: idx + 1 }, same));
                }
            }
        }
        out
    }

    pub fn est_min(
        rules: &[EstimationRule],
        analysis: &ComponentAnalysis,
        arg: &ArgumentId,
    ) -> Option<i64> {
        cardinality(analysis, arg).and_then(|n| gr_min(rules, analysis, arg, n))
    }

    fn gr_min(
        rules: &[EstimationRule],
        analysis: &ComponentAnalysis,
        arg: &ArgumentId,
        j: usize,
    ) -> Option<i64> {
        let mut best = oc(rules, arg).into_iter().next();
        for rule_idx in analysis.rules_m_prefix(rules, arg, j) {
            let mut bound: Option<i64> = None;
            let mut usable = true;
            let args = splits(rules, analysis, arg, rule_idx);
            if args.is_empty() {
                continue;
            }
            for (body_arg, same) in args {
                let v = if same {
                    gr_min(rules, analysis, &body_arg, j - 1)
                } else {
                    est_min(rules, analysis, &body_arg)
                };
                match v {
                    None => {
                        usable = false;
                        break;
                    }
                    Some(v) => bound = Some(bound.map_or(v, |b: i64| b.max(v))),
                }
            }
            if usable {
                best = match (best, bound) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, None) => a,
                    (None, b) => b,
                };
            }
        }
        best
    }

    pub fn est_max(
        rules: &[EstimationRule],
        analysis: &ComponentAnalysis,
        arg: &ArgumentId,
    ) -> Option<i64> {
        cardinality(analysis, arg).and_then(|n| gr_max(rules, analysis, arg, n))
    }

    fn gr_max(
        rules: &[EstimationRule],
        analysis: &ComponentAnalysis,
        arg: &ArgumentId,
        j: usize,
    ) -> Option<i64> {
        let mut best = oc(rules, arg).into_iter().next_back();
        for rule_idx in analysis.rules_m_prefix(rules, arg, j) {
            let mut bound: Option<i64> = None;
            let mut usable = true;
            let args = splits(rules, analysis, arg, rule_idx);
            if args.is_empty() {
                continue;
            }
            for (body_arg, same) in args {
                let v = if same {
                    gr_max(rules, analysis, &body_arg, j - 1)
                } else {
                    est_max(rules, analysis, &body_arg)
                };
                match v {
                    None => {
                        usable = false;
                        break;
                    }
                    Some(v) => bound = Some(bound.map_or(v, |b: i64| b.min(v))),
                }
            }
            if usable {
                best = match (best, bound) {
                    (Some(a), Some(b)) => Some(a.max(b)),
                    (a, None) => a,
                    (None, b) => b,
                };
            }
        }
        best
    }

    pub fn est_range(
        rules: &[EstimationRule],
        analysis: &ComponentAnalysis,
        arg: &ArgumentId,
    ) -> BigUint {
        let oc_program_len = crate::estimator::oc_program(rules).len();
        match (est_min(rules, analysis, arg), est_max(rules, analysis, arg)) {
            (Some(lo), Some(hi)) => {
                let width: BigInt = BigInt::from(hi) - BigInt::from(lo) + 1;
                if width.is_positive() {
                    width.to_biguint().unwrap().min(BigUint::from(oc_program_len))
                } else {
                    BigUint::zero()
                }
            }
            _ => BigUint::zero(),
        }
    }

    pub fn est_size(
        rules: &[EstimationRule],
        analysis: &ComponentAnalysis,
        arg: &ArgumentId,
    ) -> BigUint {
        match cardinality(analysis, arg) {
            None => BigUint::zero(),
            Some(n) => gr_size(rules, analysis, arg, n),
        }
    }

    pub fn gr_size(
        rules: &[EstimationRule],
        analysis: &ComponentAnalysis,
        arg: &ArgumentId,
        j: usize,
    ) -> BigUint {
        let oc_set = oc(rules, arg);
        let mut sum = BigUint::from(oc_set.len());
        for rule_idx in analysis.rules_m_prefix(rules, arg, j) {
            let args = splits(rules, analysis, arg, rule_idx);
            if args.is_empty() {
                sum += BigUint::from(crate::estimator::oc_program(rules).len());
                continue;
            }
            let mut bound: Option<BigUint> = None;
            for (body_arg, same) in args {
                let v = if same {
                    gr_size(rules, analysis, &body_arg, j - 1)
                } else {
                    est_size(rules, analysis, &body_arg)
                };
                bound = Some(match bound {
                    Some(b) => b.min(v),
                    None => v,
                });
            }
            sum += bound.expect("non-empty args");
        }
        sum.min(est_range(rules, analysis, arg))
    }
}
