//! Direct evaluation of the estimate formulas for tight programs.
//!
//! This is a separate, simpler recursion that does not use component
//! partitions at all: in a tight program every rule is an exit rule, so the
//! estimates for an argument only depend on arguments of predicates strictly
//! earlier in the dependency order. It exists as an independent route for
//! cross-checking the general recursion.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

use crate::normalize::{ArgumentId, EstimationRule, NormTerm, Program};

use super::{oc_argument, oc_program};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TightEstimate {
    pub est_min: Option<i64>,
    pub est_max: Option<i64>,
    pub range: BigUint,
    pub size: BigUint,
}

/// Raised when the direct tight evaluation meets a dependency cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotTightError;

impl fmt::Display for NotTightError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("program is not tight: the dependency graph has a cycle")
    }
}

impl core::error::Error for NotTightError {}

/// Evaluates the tight-case formulas for every argument of the program.
pub fn tight_estimates(
    program: &Program,
) -> Result<BTreeMap<ArgumentId, TightEstimate>, NotTightError> {
    let mut eval = TightEval {
        rules: &program.rules,
        oc_program_len: oc_program(&program.rules).len(),
        oc: BTreeMap::new(),
        min_memo: BTreeMap::new(),
        max_memo: BTreeMap::new(),
        size_memo: BTreeMap::new(),
        min_active: BTreeSet::new(),
        max_active: BTreeSet::new(),
        size_active: BTreeSet::new(),
    };
    let mut out = BTreeMap::new();
    for arg in program.arguments() {
        let est_min = eval.down(&arg)?;
        let est_max = eval.up(&arg)?;
        let range = eval.range(&arg)?;
        let size = eval.size(&arg)?;
        out.insert(arg, TightEstimate { est_min, est_max, range, size });
    }
    Ok(out)
}

struct TightEval<'p> {
    rules: &'p [EstimationRule],
    oc_program_len: usize,
    oc: BTreeMap<ArgumentId, BTreeSet<i64>>,
    min_memo: BTreeMap<ArgumentId, Option<i64>>,
    max_memo: BTreeMap<ArgumentId, Option<i64>>,
    size_memo: BTreeMap<ArgumentId, BigUint>,
    min_active: BTreeSet<ArgumentId>,
    max_active: BTreeSet<ArgumentId>,
    size_active: BTreeSet<ArgumentId>,
}

impl<'p> TightEval<'p> {
    fn oc(&mut self, arg: &ArgumentId) -> &BTreeSet<i64> {
        if !self.oc.contains_key(arg) {
            let set = oc_argument(self.rules, arg);
            self.oc.insert(arg.clone(), set);
        }
        &self.oc[arg]
    }

    /// Rules with head predicate `p` and a variable at head position `i`,
    /// each paired with the body arguments carrying that variable.
    fn defining_rules(&self, arg: &ArgumentId) -> Vec<Vec<ArgumentId>> {
        let mut out = Vec::new();
        for rule in self.rules {
            let Some(head) = rule.head.atom() else { continue };
            if head.key() != arg.predicate {
                continue;
            }
            let Some(NormTerm::Var(var)) = head.terms.get(arg.position - 1) else {
                continue;
            };
            let mut body_args = Vec::new();
            for atom in &rule.positive_body {
                let pred = atom.key();
                for (idx, term) in atom.terms.iter().enumerate() {
                    if term.as_var() == Some(var.as_str()) {
                        body_args.push(ArgumentId { predicate: pred.clone(), position: idx + 1 });
                    }
                }
            }
            out.push(body_args);
        }
        out
    }

    fn down(&mut self, arg: &ArgumentId) -> Result<Option<i64>, NotTightError> {
        if let Some(v) = self.min_memo.get(arg) {
            return Ok(*v);
        }
        if !self.min_active.insert(arg.clone()) {
            return Err(NotTightError);
        }
        let mut best = self.oc(arg).iter().next().copied();
        for body_args in self.defining_rules(arg) {
            let mut rule_bound: Option<i64> = None;
            let mut usable = !body_args.is_empty();
            for body_arg in &body_args {
                match self.down(body_arg)? {
                    None => {
                        usable = false;
                        break;
                    }
                    Some(v) => rule_bound = Some(rule_bound.map_or(v, |b: i64| b.max(v))),
                }
            }
            if usable {
                best = match (best, rule_bound) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, None) => a,
                    (None, b) => b,
                };
            }
        }
        self.min_active.remove(arg);
        self.min_memo.insert(arg.clone(), best);
        Ok(best)
    }

    fn up(&mut self, arg: &ArgumentId) -> Result<Option<i64>, NotTightError> {
        if let Some(v) = self.max_memo.get(arg) {
            return Ok(*v);
        }
        if !self.max_active.insert(arg.clone()) {
            return Err(NotTightError);
        }
        let mut best = self.oc(arg).iter().next_back().copied();
        for body_args in self.defining_rules(arg) {
            let mut rule_bound: Option<i64> = None;
            let mut usable = !body_args.is_empty();
            for body_arg in &body_args {
                match self.up(body_arg)? {
                    None => {
                        usable = false;
                        break;
                    }
                    Some(v) => rule_bound = Some(rule_bound.map_or(v, |b: i64| b.min(v))),
                }
            }
            if usable {
                best = match (best, rule_bound) {
                    (Some(a), Some(b)) => Some(a.max(b)),
                    (a, None) => a,
                    (None, b) => b,
                };
            }
        }
        self.max_active.remove(arg);
        self.max_memo.insert(arg.clone(), best);
        Ok(best)
    }

    fn range(&mut self, arg: &ArgumentId) -> Result<BigUint, NotTightError> {
        let value = match (self.down(arg)?, self.up(arg)?) {
            (Some(lo), Some(hi)) => {
                let width: BigInt = BigInt::from(hi) - BigInt::from(lo) + 1;
                if width.is_positive() {
                    width.to_biguint().expect("positive").min(BigUint::from(self.oc_program_len))
                } else {
                    BigUint::zero()
                }
            }
            _ => BigUint::zero(),
        };
        Ok(value)
    }

    fn size(&mut self, arg: &ArgumentId) -> Result<BigUint, NotTightError> {
        if let Some(v) = self.size_memo.get(arg) {
            return Ok(v.clone());
        }
        if !self.size_active.insert(arg.clone()) {
            return Err(NotTightError);
        }
        let mut sum = BigUint::from(self.oc(arg).len());
        for body_args in self.defining_rules(arg) {
            let mut rule_bound: Option<BigUint> = None;
            for body_arg in &body_args {
                let v = self.size(body_arg)?;
                rule_bound = Some(match rule_bound {
                    Some(b) => b.min(v),
                    None => v,
                });
            }
            sum += rule_bound.unwrap_or_else(|| BigUint::from(self.oc_program_len));
        }
        let value = sum.min(self.range(arg)?);
        self.size_active.remove(arg);
        self.size_memo.insert(arg.clone(), value.clone());
        Ok(value)
    }
}
