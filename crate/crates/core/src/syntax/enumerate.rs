use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::kripke::{KripkeModel, PointedModel, Universe};
use crate::semantics;

use super::{Connective, Formula, Fragment};

#[derive(Clone, Copy, Debug)]
enum Recipe {
    Leaf(usize),
    Dia(usize),
    Box(usize),
    And(usize, usize),
    Or(usize, usize),
}

#[derive(Clone, Debug)]
struct Class {
    truth: FixedBitSet,
    recipe: Recipe,
    depth: usize,
    size: usize,
}

/// The fragment's formulas of bounded depth, one class per truth vector over
/// the worlds of a universe.
///
/// Level `k` is the ∧/∨-closure (as far as the fragment allows) of the
/// literals, the constants, and `◇x`, `□x` for every class `x` of level
/// `k-1`. Classes are stored as truth bitsets with a construction recipe;
/// formulas are only materialized on request.
#[derive(Clone, Debug)]
pub struct FormulaCatalog {
    leaves: Vec<Formula>,
    classes: Vec<Class>,
    index: HashMap<FixedBitSet, usize>,
    level_end: Vec<usize>,
    limit: usize,
}

impl FormulaCatalog {
    /// Builds levels `0..=max_depth` over the worlds of `model`, which must
    /// be closed enough to separate the fragment's classes (e.g. a type
    /// universe of depth `max_depth`).
    pub fn build(fr: &Fragment, max_depth: usize, model: &KripkeModel, budget: &Budget) -> Result<Self> {
        let mut leaves = Vec::new();
        if fr.has(Connective::Top) {
            leaves.push(Formula::Top);
        }
        if fr.has(Connective::Bot) {
            leaves.push(Formula::Bot);
        }
        leaves.extend(fr.literals());
        let mut cat = FormulaCatalog {
            leaves,
            classes: Vec::new(),
            index: HashMap::new(),
            level_end: Vec::new(),
            limit: budget.max_formulas,
        };
        let leaf_truth: Vec<FixedBitSet> = cat
            .leaves
            .iter()
            .map(|l| semantics::eval(model, l))
            .collect::<Result<_>>()?;
        for k in 0..=max_depth {
            let mut gens = Vec::new();
            for (i, t) in leaf_truth.iter().enumerate() {
                gens.push(cat.intern(t.clone(), Recipe::Leaf(i), 0, 1)?);
            }
            if k > 0 {
                for x in 0..cat.level_end[k - 1] {
                    let (d, s) = (cat.classes[x].depth + 1, cat.classes[x].size + 1);
                    if fr.has(Connective::Dia) {
                        let t = semantics::dia(model, &cat.classes[x].truth);
                        gens.push(cat.intern(t, Recipe::Dia(x), d, s)?);
                    }
                    if fr.has(Connective::Box) {
                        let t = semantics::boxed(model, &cat.classes[x].truth);
                        gens.push(cat.intern(t, Recipe::Box(x), d, s)?);
                    }
                }
            }
            dedup_keep_order(&mut gens);
            let meets = if fr.has(Connective::And) {
                cat.meet_closure(&gens)?
            } else {
                gens
            };
            if fr.has(Connective::Or) {
                cat.join_closure(meets)?;
            }
            cat.level_end.push(cat.classes.len());
        }
        Ok(cat)
    }

    fn intern(&mut self, truth: FixedBitSet, recipe: Recipe, depth: usize, size: usize) -> Result<usize> {
        if let Some(&id) = self.index.get(&truth) {
            let c = &mut self.classes[id];
            if (depth, size) < (c.depth, c.size) {
                c.recipe = recipe;
                c.depth = depth;
                c.size = size;
            }
            return Ok(id);
        }
        if self.classes.len() >= self.limit {
            return Err(Error::exhausted("formula enumeration", "more", self.limit));
        }
        let id = self.classes.len();
        self.index.insert(truth.clone(), id);
        self.classes.push(Class {
            truth,
            recipe,
            depth,
            size,
        });
        Ok(id)
    }

    fn combine(&mut self, a: usize, b: usize, conj: bool) -> Result<usize> {
        let (ca, cb) = (&self.classes[a], &self.classes[b]);
        let mut t = ca.truth.clone();
        if conj {
            t.intersect_with(&cb.truth);
        } else {
            t.union_with(&cb.truth);
        }
        let d = ca.depth.max(cb.depth);
        let s = 1 + ca.size + cb.size;
        let r = if conj { Recipe::And(a, b) } else { Recipe::Or(a, b) };
        self.intern(t, r, d, s)
    }

    fn meet_closure(&mut self, gens: &[usize]) -> Result<Vec<usize>> {
        let mut seen = FixedBitSet::new();
        let mut items = Vec::new();
        for &g in gens {
            grow_insert(&mut seen, g);
            items.push(g);
        }
        let mut i = 0;
        while i < items.len() {
            let a = items[i];
            for &g in gens {
                let c = self.combine(a, g, true)?;
                if !grow_contains(&seen, c) {
                    grow_insert(&mut seen, c);
                    items.push(c);
                }
            }
            i += 1;
        }
        Ok(items)
    }

    fn join_closure(&mut self, mut meets: Vec<usize>) -> Result<Vec<usize>> {
        meets.sort_by_key(|&m| (self.classes[m].truth.count_ones(..), m));
        let mut seen = FixedBitSet::new();
        let mut out: Vec<usize> = Vec::new();
        for m in meets {
            if grow_contains(&seen, m) {
                continue;
            }
            let snapshot = out.len();
            grow_insert(&mut seen, m);
            out.push(m);
            for j in 0..snapshot {
                let c = self.combine(out[j], m, false)?;
                if !grow_contains(&seen, c) {
                    grow_insert(&mut seen, c);
                    out.push(c);
                }
            }
        }
        Ok(out)
    }

    /// Number of classes up to and including the last level.
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Number of classes of depth at most `k`.
    pub fn level_len(&self, k: usize) -> usize {
        self.level_end[k.min(self.level_end.len() - 1)]
    }

    pub fn truth(&self, id: usize) -> &FixedBitSet {
        &self.classes[id].truth
    }

    /// Class whose truth vector equals `truth`, if any.
    pub fn lookup(&self, truth: &FixedBitSet) -> Option<usize> {
        self.index.get(truth).copied()
    }

    pub fn formula(&self, id: usize) -> Formula {
        let mut memo = HashMap::new();
        self.materialize(id, &mut memo)
    }

    /// Every class's representative, indexed by class id.
    pub fn formulas(&self) -> Vec<Formula> {
        let mut memo = HashMap::new();
        (0..self.len()).map(|i| self.materialize(i, &mut memo)).collect()
    }

    fn materialize(&self, id: usize, memo: &mut HashMap<usize, Formula>) -> Formula {
        if let Some(f) = memo.get(&id) {
            return f.clone();
        }
        let f = match self.classes[id].recipe {
            Recipe::Leaf(i) => self.leaves[i].clone(),
            Recipe::Dia(x) => Formula::dia(self.materialize(x, memo)),
            Recipe::Box(x) => Formula::boxed(self.materialize(x, memo)),
            Recipe::And(a, b) => Formula::and([self.materialize(a, memo), self.materialize(b, memo)]),
            Recipe::Or(a, b) => Formula::or([self.materialize(a, memo), self.materialize(b, memo)]),
        };
        memo.insert(id, f.clone());
        f
    }
}

fn dedup_keep_order(v: &mut Vec<usize>) {
    let mut seen = FixedBitSet::new();
    v.retain(|&x| {
        let fresh = !grow_contains(&seen, x);
        grow_insert(&mut seen, x);
        fresh
    });
}

fn grow_insert(b: &mut FixedBitSet, i: usize) {
    if i >= b.len() {
        b.grow((i + 1).max(2 * b.len()));
    }
    b.insert(i);
}

fn grow_contains(b: &FixedBitSet, i: usize) -> bool {
    i < b.len() && b.contains(i)
}

/// One representative per class of fragment members of depth at most
/// `max_depth`, where two formulas are identified when they agree on every
/// model of `dedup_universe`. Sorted by depth, size, then syntax.
pub fn enumerate_formulas(
    fr: &Fragment,
    max_depth: usize,
    dedup_universe: &[PointedModel],
    budget: &Budget,
) -> Result<Vec<Formula>> {
    let universe = Universe::from_models(&fr.props, dedup_universe)?;
    let cat = FormulaCatalog::build(fr, max_depth, universe.model(), budget)?;
    let mut reps: Vec<Formula> = cat.formulas();
    reps.sort_by_cached_key(|f| (f.modal_depth(), f.size(), f.clone()));
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for f in reps {
        let t = semantics::eval(universe.model(), &f)?;
        let key: Vec<bool> = universe.points().iter().map(|&w| t.contains(w)).collect();
        if seen.insert(key) {
            out.push(f);
        }
    }
    Ok(out)
}
