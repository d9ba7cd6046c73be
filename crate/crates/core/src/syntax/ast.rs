//! Abstract syntax for the accepted ASP-Core-2 subset.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Binary arithmetic operators allowed in terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "\\",
        }
    }
}

/// A term of the input language.
///
/// Object constants are either integers or symbolic names; symbolic names
/// are mapped to integers by [`normalize_constants`](super::normalize_constants)
/// before any analysis runs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Integer(i64),
    Symbol(String),
    Variable(String),
    Function(String, Vec<Term>),
    BinaryOp(BinOp, Box<Term>, Box<Term>),
    Pool(Vec<Term>),
    Interval(Box<Term>, Box<Term>),
}

impl Term {
    pub fn is_ground(&self) -> bool {
        match self {
            Term::Integer(_) | Term::Symbol(_) => true,
            Term::Variable(_) => false,
            Term::Function(_, args) | Term::Pool(args) => args.iter().all(Term::is_ground),
            Term::BinaryOp(_, l, r) | Term::Interval(l, r) => l.is_ground() && r.is_ground(),
        }
    }

    /// Collects the names of all variables occurring in the term, including
    /// those nested inside functions and arithmetic.
    pub fn collect_variables(&self, out: &mut alloc::collections::BTreeSet<String>) {
        match self {
            Term::Integer(_) | Term::Symbol(_) => {}
            Term::Variable(name) => {
                out.insert(name.clone());
            }
            Term::Function(_, args) | Term::Pool(args) => {
                for arg in args {
                    arg.collect_variables(out);
                }
            }
            Term::BinaryOp(_, l, r) | Term::Interval(l, r) => {
                l.collect_variables(out);
                r.collect_variables(out);
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Integer(n) => write!(f, "{n}"),
            Term::Symbol(s) => f.write_str(s),
            Term::Variable(v) => f.write_str(v),
            Term::Function(name, args) => {
                f.write_str(name)?;
                f.write_str("(")?;
                write_joined(f, args, ",")?;
                f.write_str(")")
            }
            // Always parenthesized so the printed form reparses to the same tree.
            Term::BinaryOp(op, l, r) => write!(f, "({l}{}{r})", op.symbol()),
            Term::Pool(members) => {
                f.write_str("(")?;
                write_joined(f, members, ";")?;
                f.write_str(")")
            }
            Term::Interval(lo, hi) => write!(f, "{lo}..{hi}"),
        }
    }
}

/// An atom `p(t1,...,tk)`. Arity is the number of terms; the same name used
/// with different arities denotes distinct predicates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub terms: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, terms: Vec<Term>) -> Self {
        Atom { predicate: predicate.into(), terms }
    }

    pub fn arity(&self) -> usize {
        self.terms.len()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.terms.is_empty() {
            f.write_str("(")?;
            write_joined(f, &self.terms, ",")?;
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// A body literal: an atom or its negation-as-failure.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Literal {
    Positive(Atom),
    Negative(Atom),
}

impl Literal {
    pub fn atom(&self) -> &Atom {
        match self {
            Literal::Positive(a) | Literal::Negative(a) => a,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Positive(a) => write!(f, "{a}"),
            Literal::Negative(a) => write!(f, "not {a}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Comparator {
    Lt,
    Le,
    Eq,
    Ne,
    Gt,
    Ge,
}

impl Comparator {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Eq => "=",
            Comparator::Ne => "!=",
            Comparator::Gt => ">",
            Comparator::Ge => ">=",
        }
    }

    /// The comparator with its operands swapped (for bound-on-the-left
    /// aggregate literals).
    pub fn flipped(self) -> Self {
        match self {
            Comparator::Lt => Comparator::Gt,
            Comparator::Le => Comparator::Ge,
            Comparator::Eq => Comparator::Eq,
            Comparator::Ne => Comparator::Ne,
            Comparator::Gt => Comparator::Lt,
            Comparator::Ge => Comparator::Le,
        }
    }
}

/// A comparison literal such as `X < Y`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Comparison {
    pub left: Term,
    pub op: Comparator,
    pub right: Term,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.left, self.op.symbol(), self.right)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AggregateFn {
    Count,
    Sum,
    Max,
    Min,
}

impl AggregateFn {
    pub fn name(self) -> &'static str {
        match self {
            AggregateFn::Count => "#count",
            AggregateFn::Sum => "#sum",
            AggregateFn::Max => "#max",
            AggregateFn::Min => "#min",
        }
    }
}

/// One element `t0,...,tk : l0,...,ln` of an aggregate atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AggregateElement {
    pub terms: Vec<Term>,
    pub literals: Vec<Literal>,
}

impl fmt::Display for AggregateElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_joined(f, &self.terms, ",")?;
        if !self.literals.is_empty() {
            f.write_str(":")?;
            write_joined(f, &self.literals, ",")?;
        }
        Ok(())
    }
}

/// An aggregate atom `#aggr{e0;...;en} ≺ t`. The element list may be empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AggregateAtom {
    pub function: AggregateFn,
    pub elements: Vec<AggregateElement>,
    pub comparator: Comparator,
    pub bound: Term,
}

impl fmt::Display for AggregateAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.function.name())?;
        f.write_str("{")?;
        write_joined(f, &self.elements, ";")?;
        f.write_str("}")?;
        write!(f, "{}{}", self.comparator.symbol(), self.bound)
    }
}

/// One `head : literals` condition inside a choice atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChoiceCondition {
    pub head: Atom,
    pub literals: Vec<Literal>,
}

impl fmt::Display for ChoiceCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.literals.is_empty() {
            f.write_str(":")?;
            write_joined(f, &self.literals, ",")?;
        }
        Ok(())
    }
}

/// Rule head shapes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Head {
    Atom(Atom),
    /// The head of a constraint (`:- body.`).
    Falsum,
    Disjunction(Vec<Atom>),
    Choice {
        lower: Option<i64>,
        upper: Option<i64>,
        conditions: Vec<ChoiceCondition>,
    },
}

impl fmt::Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Head::Atom(a) => write!(f, "{a}"),
            Head::Falsum => Ok(()),
            Head::Disjunction(atoms) => write_joined(f, atoms, "|"),
            Head::Choice { lower, upper, conditions } => {
                if let Some(l) = lower {
                    write!(f, "{l}")?;
                }
                f.write_str("{")?;
                write_joined(f, conditions, ";")?;
                f.write_str("}")?;
                if let Some(u) = upper {
                    write!(f, "{u}")?;
                }
                Ok(())
            }
        }
    }
}

/// A parsed rule, with body literals separated by kind.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RawRule {
    pub head: Head,
    pub positive_body: Vec<Atom>,
    pub negative_body: Vec<Atom>,
    pub aggregates: Vec<AggregateAtom>,
    pub comparisons: Vec<Comparison>,
}

impl RawRule {
    pub fn fact(head: Atom) -> Self {
        RawRule {
            head: Head::Atom(head),
            positive_body: Vec::new(),
            negative_body: Vec::new(),
            aggregates: Vec::new(),
            comparisons: Vec::new(),
        }
    }

    pub fn has_body(&self) -> bool {
        !self.positive_body.is_empty()
            || !self.negative_body.is_empty()
            || !self.aggregates.is_empty()
            || !self.comparisons.is_empty()
    }
}

impl fmt::Display for RawRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let constraint = matches!(self.head, Head::Falsum);
        if !constraint {
            write!(f, "{}", self.head)?;
        }
        if self.has_body() || constraint {
            if constraint {
                f.write_str(":- ")?;
            } else {
                f.write_str(" :- ")?;
            }
            let mut first = true;
            let mut sep = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
                if first {
                    first = false;
                    Ok(())
                } else {
                    f.write_str(", ")
                }
            };
            for a in &self.positive_body {
                sep(f)?;
                write!(f, "{a}")?;
            }
            for a in &self.negative_body {
                sep(f)?;
                write!(f, "not {a}")?;
            }
            for c in &self.comparisons {
                sep(f)?;
                write!(f, "{c}")?;
            }
            for agg in &self.aggregates {
                sep(f)?;
                write!(f, "{agg}")?;
            }
        }
        f.write_str(".")
    }
}

fn write_joined<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T], sep: &str) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}
