//! Strategies and naive reference implementations shared by the integration
//! tests. Nothing here calls into the library's solvers.

#![allow(dead_code)]

use std::collections::BTreeSet;

use modalchar::kripke::{KripkeModel, PointedModel, PropSet};
use modalchar::syntax::Formula;
use proptest::prelude::*;

pub fn props(names: &[&str]) -> PropSet {
    PropSet::new(names.iter().copied()).unwrap()
}

pub fn build(props: &PropSet, vals: &[u64], edges: &[(usize, usize)], point: usize) -> PointedModel {
    let mut m = KripkeModel::new(props.clone());
    for (i, &v) in vals.iter().enumerate() {
        m.add_world_mask(format!("w{i}"), v);
    }
    for &(a, b) in edges {
        m.add_edge(a, b);
    }
    PointedModel::new(m, point)
}

/// Models with 1..=`max_worlds` worlds over `props`, arbitrary edges.
pub fn model(props: PropSet, max_worlds: usize) -> impl Strategy<Value = PointedModel> {
    let full = props.full_mask();
    (1..=max_worlds).prop_flat_map(move |n| {
        let props = props.clone();
        (
            prop::collection::vec(0..=full, n),
            prop::collection::vec(any::<bool>(), n * n),
            0..n,
        )
            .prop_map(move |(vals, adj, point)| {
                let edges: Vec<(usize, usize)> = (0..n * n).filter(|&i| adj[i]).map(|i| (i / n, i % n)).collect();
                build(&props, &vals, &edges, point)
            })
    })
}

#[derive(Clone, Copy, Debug)]
pub struct Grammar {
    pub negation: bool,
    pub constants: bool,
    pub boxes: bool,
    pub ors: bool,
}

impl Grammar {
    pub const FULL: Grammar = Grammar { negation: true, constants: true, boxes: true, ors: true };
    pub const POSITIVE: Grammar = Grammar { negation: false, constants: false, boxes: true, ors: true };
    pub const CONJ_DIAMOND: Grammar = Grammar { negation: false, constants: false, boxes: false, ors: false };
}

/// Formulas over `names` with modal depth at most `depth`.
pub fn formula(names: &'static [&'static str], g: Grammar, depth: usize) -> BoxedStrategy<Formula> {
    let mut leaves: Vec<BoxedStrategy<Formula>> = vec![prop::sample::select(names).prop_map(Formula::atom).boxed()];
    if g.negation {
        leaves.push(prop::sample::select(names).prop_map(Formula::neg_atom).boxed());
    }
    if g.constants {
        leaves.push(Just(Formula::Top).boxed());
        leaves.push(Just(Formula::Bot).boxed());
    }
    let leaf = prop::strategy::Union::new(leaves).boxed();
    if depth == 0 {
        return boolean(leaf, g);
    }
    let inner = formula(names, g, depth - 1);
    let mut modal: Vec<BoxedStrategy<Formula>> = vec![inner.clone().prop_map(Formula::dia).boxed()];
    if g.boxes {
        modal.push(inner.prop_map(Formula::boxed).boxed());
    }
    let base = prop::strategy::Union::new(vec![leaf, prop::strategy::Union::new(modal).boxed()]).boxed();
    boolean(base, g)
}

fn boolean(base: BoxedStrategy<Formula>, g: Grammar) -> BoxedStrategy<Formula> {
    base.prop_recursive(2, 8, 3, move |inner| {
        let and = prop::collection::vec(inner.clone(), 2..=3).prop_map(Formula::and);
        if g.ors {
            prop_oneof![and, prop::collection::vec(inner, 2..=3).prop_map(Formula::or)].boxed()
        } else {
            and.boxed()
        }
    })
    .boxed()
}

/// Textbook satisfaction, by direct recursion.
pub fn holds(m: &KripkeModel, w: usize, f: &Formula) -> bool {
    let val = |p: &str| m.props().index_of(p).is_some_and(|i| m.valuation(w) >> i & 1 == 1);
    match f {
        Formula::Top => true,
        Formula::Bot => false,
        Formula::Atom(p) => val(p),
        Formula::NegAtom(p) => !val(p),
        Formula::And(ops) => ops.iter().all(|g| holds(m, w, g)),
        Formula::Or(ops) => ops.iter().any(|g| holds(m, w, g)),
        Formula::Dia(g) => m.successors(w).iter().any(|&u| holds(m, u, g)),
        Formula::Box(g) => m.successors(w).iter().all(|&u| holds(m, u, g)),
    }
}

/// Every world reachable from `w` (including `w`) has valuation `mask` and a
/// successor: the reachability reading of bisimilarity with the loop `↻_mask`.
pub fn loop_like(m: &KripkeModel, w: usize, mask: u64) -> bool {
    let mut seen = BTreeSet::from([w]);
    let mut stack = vec![w];
    while let Some(u) = stack.pop() {
        if m.valuation(u) != mask || m.successors(u).is_empty() {
            return false;
        }
        for &v in m.successors(u) {
            if seen.insert(v) {
                stack.push(v);
            }
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Bisim,
    Sim,
    Weak,
}

/// Greatest relation of the given kind, by repeatedly deleting every pair
/// that breaks a clause until nothing changes.
pub fn naive_greatest(kind: Kind, s: &KripkeModel, t: &KripkeModel) -> BTreeSet<(usize, usize)> {
    let full = s.props().full_mask();
    let mut z: BTreeSet<(usize, usize)> = BTreeSet::new();
    for a in 0..s.len() {
        for b in 0..t.len() {
            let (va, vb) = (s.valuation(a), t.valuation(b));
            let ok = match kind {
                Kind::Bisim => va == vb,
                _ => va & !vb == 0,
            };
            if ok {
                z.insert((a, b));
            }
        }
    }
    loop {
        let keep: BTreeSet<(usize, usize)> = z
            .iter()
            .copied()
            .filter(|&(a, b)| {
                let forth = s.successors(a).iter().all(|&u| {
                    (kind == Kind::Weak && loop_like(s, u, 0)) || t.successors(b).iter().any(|&v| z.contains(&(u, v)))
                });
                let back = t.successors(b).iter().all(|&v| {
                    (kind == Kind::Weak && loop_like(t, v, full)) || s.successors(a).iter().any(|&u| z.contains(&(u, v)))
                });
                forth && back
            })
            .collect();
        if keep.len() == z.len() {
            return z;
        }
        z = keep;
    }
}

pub fn naive_relates(kind: Kind, target: &PointedModel, source: &PointedModel) -> bool {
    naive_greatest(kind, source.model(), target.model()).contains(&(source.point(), target.point()))
}

/// The tree model of a `◇,∧` formula: atoms at the node, one child per `◇`.
pub fn canonical_tree(f: &Formula, props: &PropSet) -> PointedModel {
    fn parts<'a>(f: &'a Formula, atoms: &mut Vec<&'a str>, kids: &mut Vec<&'a Formula>) {
        match f {
            Formula::Top => {}
            Formula::Atom(p) => atoms.push(p),
            Formula::Dia(g) => kids.push(g),
            Formula::And(ops) => ops.iter().for_each(|g| parts(g, atoms, kids)),
            other => panic!("`{other}` is not a <>,& formula"),
        }
    }
    fn grow(f: &Formula, m: &mut KripkeModel) -> usize {
        let (mut atoms, mut kids) = (Vec::new(), Vec::new());
        parts(f, &mut atoms, &mut kids);
        let mask = m.props().mask_of(atoms).unwrap();
        let w = m.add_world_mask(format!("w{}", m.len()), mask);
        for g in kids {
            let u = grow(g, m);
            m.add_edge(w, u);
        }
        w
    }
    let mut m = KripkeModel::new(props.clone());
    grow(f, &mut m);
    PointedModel::new(m, 0)
}

/// Truth vectors of every formula class built from `literals` by closing
/// each level under the allowed Boolean operations, with `◇`/`□` applied to
/// the previous level. Returns one `(vector, formula)` per class.
pub fn closure_classes(
    universe: &[PointedModel],
    literals: &[Formula],
    ands: bool,
    ors: bool,
    modal: &[fn(Formula) -> Formula],
    depth: usize,
) -> Vec<(Vec<bool>, Formula)> {
    let vector = |f: &Formula| -> Vec<bool> { universe.iter().map(|m| holds(m.model(), m.point(), f)).collect() };
    let mut level: Vec<(Vec<bool>, Formula)> = Vec::new();
    for k in 0..=depth {
        let mut gens: Vec<Formula> = literals.to_vec();
        if k > 0 {
            for (_, x) in &level {
                for wrap in modal {
                    gens.push(wrap(x.clone()));
                }
            }
        }
        let mut classes: std::collections::BTreeMap<Vec<bool>, Formula> = std::collections::BTreeMap::new();
        let mut frontier: Vec<Formula> = Vec::new();
        for g in gens {
            let v = vector(&g);
            if let std::collections::btree_map::Entry::Vacant(slot) = classes.entry(v) {
                slot.insert(g.clone());
                frontier.push(g);
            }
        }
        while let Some(x) = frontier.pop() {
            let current: Vec<Formula> = classes.values().cloned().collect();
            for y in current {
                let mut next = Vec::new();
                if ands {
                    next.push(Formula::and([x.clone(), y.clone()]));
                }
                if ors {
                    next.push(Formula::or([x.clone(), y.clone()]));
                }
                for z in next {
                    let v = vector(&z);
                    if let std::collections::btree_map::Entry::Vacant(slot) = classes.entry(v) {
                        slot.insert(z.clone());
                        frontier.push(z);
                    }
                }
            }
        }
        level = classes.into_iter().collect();
    }
    level
}
