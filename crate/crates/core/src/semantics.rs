//! Kripke satisfaction, fitting, and bounded equivalence.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::budget::Budget;
use crate::characterize::ExampleSet;
use crate::error::{Error, Result};
use crate::kripke::{KripkeModel, PointedModel, PropSet};
use crate::syntax::Formula;

/// Worlds of `m` where `f` holds, computed bottom-up once per distinct
/// subformula.
pub fn eval(m: &KripkeModel, f: &Formula) -> Result<FixedBitSet> {
    let mut memo = HashMap::new();
    eval_memo(m, f, &mut memo)
}

fn eval_memo<'f>(
    m: &KripkeModel,
    f: &'f Formula,
    memo: &mut HashMap<&'f Formula, FixedBitSet>,
) -> Result<FixedBitSet> {
    if let Some(b) = memo.get(f) {
        return Ok(b.clone());
    }
    let n = m.len();
    let out = match f {
        Formula::Atom(p) | Formula::NegAtom(p) => {
            let i = m
                .props()
                .index_of(p)
                .ok_or_else(|| Error::UnknownProposition(p.clone()))?;
            let mut b = FixedBitSet::with_capacity(n);
            for w in 0..n {
                b.set(w, m.holds(w, i) == matches!(f, Formula::Atom(_)));
            }
            b
        }
        Formula::Top => {
            let mut b = FixedBitSet::with_capacity(n);
            b.insert_range(..);
            b
        }
        Formula::Bot => FixedBitSet::with_capacity(n),
        Formula::Dia(g) => dia(m, &eval_memo(m, g, memo)?),
        Formula::Box(g) => boxed(m, &eval_memo(m, g, memo)?),
        Formula::And(ops) => {
            let mut b = eval_memo(m, &ops[0], memo)?;
            for g in &ops[1..] {
                b.intersect_with(&eval_memo(m, g, memo)?);
            }
            b
        }
        Formula::Or(ops) => {
            let mut b = eval_memo(m, &ops[0], memo)?;
            for g in &ops[1..] {
                b.union_with(&eval_memo(m, g, memo)?);
            }
            b
        }
    };
    memo.insert(f, out.clone());
    Ok(out)
}

/// Worlds with some successor in `x`.
pub(crate) fn dia(m: &KripkeModel, x: &FixedBitSet) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(m.len());
    for w in 0..m.len() {
        if m.successors(w).iter().any(|&u| x.contains(u)) {
            b.insert(w);
        }
    }
    b
}

/// Worlds all of whose successors are in `x`.
pub(crate) fn boxed(m: &KripkeModel, x: &FixedBitSet) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(m.len());
    for w in 0..m.len() {
        if m.successors(w).iter().all(|&u| x.contains(u)) {
            b.insert(w);
        }
    }
    b
}

pub fn satisfies(m: &PointedModel, f: &Formula) -> Result<bool> {
    Ok(eval(m.model(), f)?.contains(m.point()))
}

/// `f` holds at every positive and fails at every negative example.
pub fn fits(f: &Formula, e: &ExampleSet) -> Result<bool> {
    for m in &e.positive {
        if !satisfies(m, f)? {
            return Ok(false);
        }
    }
    for m in &e.negative {
        if satisfies(m, f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// K-equivalence, decided on the tree types of depth `max(d(f), d(g))`.
pub fn equivalent(f: &Formula, g: &Formula, props: &PropSet, budget: &Budget) -> Result<bool> {
    Ok(crate::verify::find_distinguishing_model(f, g, props, budget)?.is_none())
}
