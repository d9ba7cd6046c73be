//! Primary-key declarations and the key-variable set of a rule.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;

use crate::normalize::{EstimationRule, Predicate};

/// User-declared primary keys: at most one set of argument positions per
/// predicate. Predicates without a declared key default to all positions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeyMap {
    keys: BTreeMap<Predicate, BTreeSet<usize>>,
}

impl KeyMap {
    pub fn new() -> Self {
        KeyMap::default()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Declares the primary key of a predicate.
    pub fn declare(
        &mut self,
        predicate: Predicate,
        positions: BTreeSet<usize>,
    ) -> Result<(), KeyError> {
        if positions.is_empty() {
            return Err(KeyError::new(format!("empty key for {predicate}")));
        }
        if let Some(&bad) = positions.iter().find(|&&p| p < 1 || p > predicate.arity) {
            return Err(KeyError::new(format!(
                "key position {bad} out of range for {predicate}"
            )));
        }
        if self.keys.contains_key(&predicate) {
            return Err(KeyError::new(format!("duplicate key declaration for {predicate}")));
        }
        self.keys.insert(predicate, positions);
        Ok(())
    }

    /// True if `position` (1-based) belongs to `key(predicate)`.
    pub fn is_key_position(&self, predicate: &Predicate, position: usize) -> bool {
        match self.keys.get(predicate) {
            Some(positions) => positions.contains(&position),
            None => true,
        }
    }

    pub fn declared(&self) -> impl Iterator<Item = (&Predicate, &BTreeSet<usize>)> {
        self.keys.iter()
    }

    /// Parses key declarations, one per line: `predicate/arity: i,j,...`.
    /// `#` starts a comment; blank lines are skipped. Declaring the same
    /// predicate twice is an error.
    pub fn parse(text: &str) -> Result<KeyMap, KeyError> {
        let mut map = KeyMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| KeyError::new(format!("line {}: {msg}", lineno + 1));
            let (pred_part, pos_part) =
                line.split_once(':').ok_or_else(|| err("expected `predicate/arity: positions`"))?;
            let (name, arity) = pred_part
                .trim()
                .split_once('/')
                .ok_or_else(|| err("expected `name/arity` before `:`"))?;
            let name = name.trim();
            if name.is_empty() {
                return Err(err("empty predicate name"));
            }
            let arity: usize =
                arity.trim().parse().map_err(|_| err("arity is not a number"))?;
            let mut positions = BTreeSet::new();
            for piece in pos_part.split(',') {
                let piece = piece.trim();
                if piece.is_empty() {
                    return Err(err("empty key position"));
                }
                let pos: usize = piece.parse().map_err(|_| err("key position is not a number"))?;
                positions.insert(pos);
            }
            map.declare(Predicate::new(name, arity), positions)
                .map_err(|e| KeyError::new(format!("line {}: {}", lineno + 1, e.message)))?;
        }
        Ok(map)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyError {
    pub message: String,
}

impl KeyError {
    fn new(message: impl Into<String>) -> Self {
        KeyError { message: message.into() }
    }
}

impl fmt::Display for KeyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid key declaration: {}", self.message)
    }
}

impl core::error::Error for KeyError {}

/// The variables of a rule that occur at key argument positions in its
/// positive body. These are the factors of the rule-size product.
pub fn kvars(rule: &EstimationRule, keys: &KeyMap) -> BTreeSet<String> {
    let mut vars = BTreeSet::new();
    for atom in &rule.positive_body {
        let pred = atom.key();
        for (idx, term) in atom.terms.iter().enumerate() {
            if let Some(var) = term.as_var() {
                if keys.is_key_position(&pred, idx + 1) {
                    vars.insert(var.to_string());
                }
            }
        }
    }
    vars
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize::{ArgumentId, Program};
    use alloc::vec::Vec;

    #[test]
    fn default_key_covers_all_variables() {
        let program =
            Program::parse("r(2). p(1). q(1,1). s(X,Y,Z) :- r(X), p(X), p(Y), q(Y,Z).").unwrap();
        let rule = program.rules.last().unwrap();
        let set = kvars(rule, &KeyMap::new());
        let vars: Vec<&str> = set.iter().map(String::as_str).collect();
        assert_eq!(vars, ["X", "Y", "Z"]);
    }

    #[test]
    fn declared_key_excludes_non_key_variables() {
        let program = Program::parse("q(1,1,1). p(X) :- q(X,Y,V).").unwrap();
        let rule = program.rules.last().unwrap();
        let mut keys = KeyMap::new();
        keys.declare(Predicate::new("q", 3), [1, 2].into_iter().collect()).unwrap();
        let vars = kvars(rule, &keys);
        assert!(vars.contains("X"));
        assert!(vars.contains("Y"));
        assert!(!vars.contains("V"));
        // args(r, V) is non-empty; V is dropped purely because q[3] is not a
        // key argument.
        let occurs_at: Vec<ArgumentId> = rule
            .positive_body
            .iter()
            .flat_map(|a| {
                a.terms.iter().enumerate().filter_map(|(i, t)| {
                    (t.as_var() == Some("V")).then(|| ArgumentId::new("q", 3, i + 1))
                })
            })
            .collect();
        assert_eq!(occurs_at, [ArgumentId::new("q", 3, 3)]);
    }

    #[test]
    fn facts_have_no_key_variables() {
        let program = Program::parse("p(1,2).").unwrap();
        assert!(kvars(&program.rules[0], &KeyMap::new()).is_empty());
    }

    #[test]
    fn key_file_grammar() {
        let text = "# keys\nobs_elabel/3: 1,2\n\nat/2: 1 # trailing comment\n";
        let keys = KeyMap::parse(text).unwrap();
        assert!(keys.is_key_position(&Predicate::new("obs_elabel", 3), 1));
        assert!(keys.is_key_position(&Predicate::new("obs_elabel", 3), 2));
        assert!(!keys.is_key_position(&Predicate::new("obs_elabel", 3), 3));
        assert!(keys.is_key_position(&Predicate::new("at", 2), 1));
        assert!(!keys.is_key_position(&Predicate::new("at", 2), 2));

        assert!(KeyMap::parse("p/2: 1\np/2: 2\n").is_err());
        assert!(KeyMap::parse("p/2: 3\n").is_err());
        assert!(KeyMap::parse("p: 1\n").is_err());
    }
}
