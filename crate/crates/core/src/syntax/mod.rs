//! Modal formulas in negation normal form and the fragments `L_C[Prop]`.
//!
//! Negation is only representable on atoms ([`Formula::NegAtom`]), so every
//! value of [`Formula`] is in NNF. Conjunctions and disjunctions are n-ary;
//! the smart constructors flatten nested operators of the same kind, sort the
//! operands and drop duplicates, which gives every formula a canonical shape
//! for hashing and for `parse(render(f)) == f`.

mod enumerate;
mod fragment;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

pub use enumerate::{enumerate_formulas, FormulaCatalog};
pub use fragment::{in_fragment, Connective, Fragment, Polarity};
pub use parse::{parse_formula, ParseError};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(String),
    NegAtom(String),
    Top,
    Bot,
    Dia(Box<Formula>),
    Box(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    pub fn neg_atom(name: impl Into<String>) -> Self {
        Formula::NegAtom(name.into())
    }

    pub fn dia(f: Formula) -> Self {
        Formula::Dia(Box::new(f))
    }

    pub fn boxed(f: Formula) -> Self {
        Formula::Box(Box::new(f))
    }

    /// `◇^n f`.
    pub fn dia_n(n: usize, f: Formula) -> Self {
        (0..n).fold(f, |acc, _| Formula::dia(acc))
    }

    /// `□^n f`.
    pub fn box_n(n: usize, f: Formula) -> Self {
        (0..n).fold(f, |acc, _| Formula::boxed(acc))
    }

    /// Canonical n-ary conjunction. Returns `None` for an empty operand list.
    pub fn try_and(ops: impl IntoIterator<Item = Formula>) -> Option<Self> {
        Self::nary(ops, true)
    }

    /// Canonical n-ary disjunction. Returns `None` for an empty operand list.
    pub fn try_or(ops: impl IntoIterator<Item = Formula>) -> Option<Self> {
        Self::nary(ops, false)
    }

    /// Panics on an empty operand list.
    pub fn and(ops: impl IntoIterator<Item = Formula>) -> Self {
        Self::try_and(ops).expect("conjunction needs at least one operand")
    }

    /// Panics on an empty operand list.
    pub fn or(ops: impl IntoIterator<Item = Formula>) -> Self {
        Self::try_or(ops).expect("disjunction needs at least one operand")
    }

    fn nary(ops: impl IntoIterator<Item = Formula>, conj: bool) -> Option<Self> {
        let mut flat = Vec::new();
        for op in ops {
            match op {
                Formula::And(inner) if conj => flat.extend(inner),
                Formula::Or(inner) if !conj => flat.extend(inner),
                other => flat.push(other),
            }
        }
        flat.sort();
        flat.dedup();
        match flat.len() {
            0 => None,
            1 => flat.pop(),
            _ if conj => Some(Formula::And(flat)),
            _ => Some(Formula::Or(flat)),
        }
    }

    /// Nesting depth of modal operators.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::NegAtom(_) | Formula::Top | Formula::Bot => 0,
            Formula::Dia(f) | Formula::Box(f) => 1 + f.modal_depth(),
            Formula::And(ops) | Formula::Or(ops) => {
                ops.iter().map(Formula::modal_depth).max().unwrap_or(0)
            }
        }
    }

    /// Proposition names occurring in the formula, negated or not.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(p) | Formula::NegAtom(p) => {
                out.insert(p.clone());
            }
            Formula::Top | Formula::Bot => {}
            Formula::Dia(f) | Formula::Box(f) => f.collect_variables(out),
            Formula::And(ops) | Formula::Or(ops) => {
                ops.iter().for_each(|f| f.collect_variables(out))
            }
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::NegAtom(_) | Formula::Top | Formula::Bot => 1,
            Formula::Dia(f) | Formula::Box(f) => 1 + f.size(),
            Formula::And(ops) | Formula::Or(ops) => 1 + ops.iter().map(Formula::size).sum::<usize>(),
        }
    }

    /// Connectives used by internal nodes and constants.
    pub fn connectives(&self) -> BTreeSet<Connective> {
        let mut out = BTreeSet::new();
        self.collect_connectives(&mut out);
        out
    }

    fn collect_connectives(&self, out: &mut BTreeSet<Connective>) {
        match self {
            Formula::Atom(_) | Formula::NegAtom(_) => {}
            Formula::Top => {
                out.insert(Connective::Top);
            }
            Formula::Bot => {
                out.insert(Connective::Bot);
            }
            Formula::Dia(f) => {
                out.insert(Connective::Dia);
                f.collect_connectives(out);
            }
            Formula::Box(f) => {
                out.insert(Connective::Box);
                f.collect_connectives(out);
            }
            Formula::And(ops) => {
                out.insert(Connective::And);
                ops.iter().for_each(|f| f.collect_connectives(out));
            }
            Formula::Or(ops) => {
                out.insert(Connective::Or);
                ops.iter().for_each(|f| f.collect_connectives(out));
            }
        }
    }

    pub fn has_positive_literal(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::NegAtom(_) | Formula::Top | Formula::Bot => false,
            Formula::Dia(f) | Formula::Box(f) => f.has_positive_literal(),
            Formula::And(ops) | Formula::Or(ops) => ops.iter().any(Formula::has_positive_literal),
        }
    }

    pub fn has_negative_literal(&self) -> bool {
        match self {
            Formula::NegAtom(_) => true,
            Formula::Atom(_) | Formula::Top | Formula::Bot => false,
            Formula::Dia(f) | Formula::Box(f) => f.has_negative_literal(),
            Formula::And(ops) | Formula::Or(ops) => ops.iter().any(Formula::has_negative_literal),
        }
    }

    /// Rebuilds the formula bottom-up, mapping every literal through `f`.
    pub fn map_literals<E>(
        &self,
        f: &mut impl FnMut(&Formula) -> Result<Formula, E>,
    ) -> Result<Formula, E> {
        Ok(match self {
            Formula::Atom(_) | Formula::NegAtom(_) => f(self)?,
            Formula::Top | Formula::Bot => self.clone(),
            Formula::Dia(g) => Formula::dia(g.map_literals(f)?),
            Formula::Box(g) => Formula::boxed(g.map_literals(f)?),
            Formula::And(ops) => {
                Formula::and(ops.iter().map(|g| g.map_literals(f)).collect::<Result<Vec<_>, E>>()?)
            }
            Formula::Or(ops) => {
                Formula::or(ops.iter().map(|g| g.map_literals(f)).collect::<Result<Vec<_>, E>>()?)
            }
        })
    }

    /// ASCII rendering accepted by [`parse_formula`].
    pub fn render(&self) -> String {
        self.to_string()
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Or(_) => 0,
            Formula::And(_) => 1,
            _ => 2,
        }
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(p) => write!(f, "{p}"),
            Formula::NegAtom(p) => write!(f, "~{p}"),
            Formula::Top => write!(f, "T"),
            Formula::Bot => write!(f, "F"),
            Formula::Dia(g) => {
                write!(f, "<>")?;
                g.fmt_operand(f, 2)
            }
            Formula::Box(g) => {
                write!(f, "[]")?;
                g.fmt_operand(f, 2)
            }
            Formula::And(ops) | Formula::Or(ops) => {
                let (sep, min) = match self {
                    Formula::And(_) => (" & ", 2),
                    _ => (" | ", 1),
                };
                for (i, op) in ops.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    op.fmt_operand(f, min)?;
                }
                Ok(())
            }
        }
    }
}

/// Free-function form of [`Formula::render`].
pub fn render(f: &Formula) -> String {
    f.render()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }
    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn render_examples() {
        assert_eq!(p().render(), "p");
        assert_eq!(Formula::boxed(Formula::Bot).render(), "[]F");
        assert_eq!(Formula::and([p(), Formula::dia(q())]).render(), "p & <>q");
        assert_eq!(
            Formula::dia(Formula::or([p(), q()])).render(),
            "<>(p | q)"
        );
        assert_eq!(
            Formula::and([Formula::or([p(), q()]), Formula::atom("r")]).render(),
            "r & (p | q)"
        );
    }

    #[test]
    fn modal_depth_examples() {
        assert_eq!(Formula::and([p(), q()]).modal_depth(), 0);
        assert_eq!(Formula::dia(p()).modal_depth(), 1);
        // □□⊥ ∧ ◇⊤
        let f = Formula::and([Formula::box_n(2, Formula::Bot), Formula::dia(Formula::Top)]);
        assert_eq!(f.modal_depth(), 2);
    }

    #[test]
    fn nary_constructors_are_canonical() {
        let a = Formula::and([q(), Formula::and([p(), q()])]);
        assert_eq!(a, Formula::And(vec![p(), q()]));
        assert_eq!(Formula::and([p(), p()]), p());
        assert_eq!(Formula::try_or(std::iter::empty()), None);
        assert_eq!(
            Formula::dia(p()).variables().into_iter().collect::<Vec<_>>(),
            vec!["p".to_string()]
        );
        let mixed = Formula::and([Formula::neg_atom("p"), Formula::dia(p())]);
        assert_eq!(mixed.variables().len(), 1);
    }
}
