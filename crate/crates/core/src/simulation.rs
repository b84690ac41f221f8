//! Bisimulation, simulation and weak simulation as greatest fixpoints, with
//! witnesses that can be re-checked clause by clause.
//!
//! A relation `Z` goes from a *source* model `M` to a *target* model `M'`;
//! `(t, t') ∈ Z` means `t'` simulates `t`. Clauses for every pair:
//!
//! * atom: `V(t) ⊆ V(t')` (equality for bisimulation);
//! * forth: every successor `u` of `t` is matched by a successor `u'` of `t'`
//!   with `(u, u') ∈ Z`; in a weak simulation `u` may instead be bisimilar to
//!   `↻_∅`;
//! * back: every successor `u'` of `t'` is matched by a successor `u` of `t`;
//!   in a weak simulation `u'` may instead be bisimilar to `↻_Prop`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::kripke::{reflexive_point_mask, KripkeModel, PointedModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimKind {
    Bisimulation,
    Simulation,
    WeakSimulation,
}

impl fmt::Display for SimKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimKind::Bisimulation => "bisimulation",
            SimKind::Simulation => "simulation",
            SimKind::WeakSimulation => "weak-simulation",
        })
    }
}

/// A binary relation between the worlds of two models, stored densely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    ns: usize,
    nt: usize,
    bits: FixedBitSet,
}

impl Relation {
    fn full(ns: usize, nt: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(ns * nt);
        bits.insert_range(..);
        Relation { ns, nt, bits }
    }

    pub fn contains(&self, s: usize, t: usize) -> bool {
        self.bits.contains(s * self.nt + t)
    }

    fn remove(&mut self, s: usize, t: usize) {
        self.bits.set(s * self.nt + t, false);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    /// Pairs in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bits.ones().map(move |i| (i / self.nt, i % self.nt))
    }

    pub fn source_len(&self) -> usize {
        self.ns
    }

    pub fn target_len(&self) -> usize {
        self.nt
    }
}

/// `flags[w]` iff `M, w` is bisimilar to the one-point loop with valuation
/// `mask`.
pub(crate) fn loop_flags(m: &KripkeModel, mask: u64) -> Vec<bool> {
    let lp = reflexive_point_mask(m.props(), mask);
    let rel = fixpoint(SimKind::Bisimulation, m, lp.model(), None, None);
    (0..m.len()).map(|w| rel.contains(w, 0)).collect()
}

struct Escapes {
    source_empty: Vec<bool>,
    target_full: Vec<bool>,
}

/// Largest relation of the given kind from `source` to `target`, computed by
/// pruning violating pairs until stable. Fails when the pair space exceeds
/// `budget.max_models`.
pub fn greatest_relation(
    kind: SimKind,
    source: &KripkeModel,
    target: &KripkeModel,
    budget: &Budget,
) -> Result<Relation> {
    greatest_relation_ordered(kind, source, target, budget, None)
}

/// As [`greatest_relation`], visiting pairs in the given permutation of
/// `0..|source|*|target|` during pruning. The result does not depend on it.
pub fn greatest_relation_ordered(
    kind: SimKind,
    source: &KripkeModel,
    target: &KripkeModel,
    budget: &Budget,
    order: Option<&[usize]>,
) -> Result<Relation> {
    if source.props() != target.props() {
        return Err(Error::Precondition(format!(
            "models over different propositions {} and {}",
            source.props(),
            target.props()
        )));
    }
    let pairs = source.len() as u128 * target.len() as u128;
    if pairs > budget.max_models as u128 {
        return Err(Error::exhausted("relation pairs", pairs, budget.max_models));
    }
    let escapes = (kind == SimKind::WeakSimulation).then(|| Escapes {
        source_empty: loop_flags(source, 0),
        target_full: loop_flags(target, target.props().full_mask()),
    });
    Ok(fixpoint(kind, source, target, escapes.as_ref(), order))
}

fn atom_ok(kind: SimKind, vs: u64, vt: u64) -> bool {
    match kind {
        SimKind::Bisimulation => vs == vt,
        _ => vs & !vt == 0,
    }
}

fn fixpoint(
    kind: SimKind,
    s: &KripkeModel,
    t: &KripkeModel,
    esc: Option<&Escapes>,
    order: Option<&[usize]>,
) -> Relation {
    let (ns, nt) = (s.len(), t.len());
    let mut rel = Relation::full(ns, nt);
    for a in 0..ns {
        for b in 0..nt {
            if !atom_ok(kind, s.valuation(a), t.valuation(b)) {
                rel.remove(a, b);
            }
        }
    }
    let natural: Vec<usize>;
    let order = match order {
        Some(o) => o,
        None => {
            natural = (0..ns * nt).collect();
            &natural
        }
    };
    loop {
        let mut changed = false;
        for &i in order {
            let (a, b) = (i / nt, i % nt);
            if !rel.contains(a, b) {
                continue;
            }
            let forth = s.successors(a).iter().all(|&u| {
                esc.is_some_and(|e| e.source_empty[u])
                    || t.successors(b).iter().any(|&v| rel.contains(u, v))
            });
            let back = forth
                && t.successors(b).iter().all(|&v| {
                    esc.is_some_and(|e| e.target_full[v])
                        || s.successors(a).iter().any(|&u| rel.contains(u, v))
                });
            if !back {
                rel.remove(a, b);
                changed = true;
            }
        }
        if !changed {
            return rel;
        }
    }
}

/// A relation `Z` from `source` to `target` claimed to be of kind `kind`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimWitness {
    pub kind: SimKind,
    pub source: PointedModel,
    pub target: PointedModel,
    pub pairs: BTreeSet<(usize, usize)>,
}

impl SimWitness {
    /// Pairs by world name, for display and JSON output.
    pub fn named_pairs(&self) -> Vec<(String, String)> {
        self.pairs
            .iter()
            .map(|&(a, b)| {
                (
                    self.source.model().name(a).to_string(),
                    self.target.model().name(b).to_string(),
                )
            })
            .collect()
    }
}

fn witness(kind: SimKind, target: &PointedModel, source: &PointedModel) -> Option<SimWitness> {
    let rel = greatest_relation(kind, source.model(), target.model(), &Budget::new(usize::MAX, 0))
        .expect("props checked by caller");
    rel.contains(source.point(), target.point()).then(|| SimWitness {
        kind,
        source: source.clone(),
        target: target.clone(),
        pairs: rel.pairs().collect(),
    })
}

fn same_props(a: &PointedModel, b: &PointedModel) -> Result<()> {
    if a.props() != b.props() {
        return Err(Error::Precondition(format!(
            "models over different propositions {} and {}",
            a.props(),
            b.props()
        )));
    }
    Ok(())
}

/// Largest bisimulation between `a` and `b`, if it relates the points.
pub fn bisimilar(a: &PointedModel, b: &PointedModel) -> Result<Option<SimWitness>> {
    same_props(a, b)?;
    Ok(witness(SimKind::Bisimulation, b, a))
}

/// Largest simulation from `source` to `target`, if `target` simulates
/// `source` at the points.
pub fn simulates(target: &PointedModel, source: &PointedModel) -> Result<Option<SimWitness>> {
    same_props(target, source)?;
    Ok(witness(SimKind::Simulation, target, source))
}

/// Largest weak simulation from `source` to `target`, if `target` weakly
/// simulates `source` at the points.
pub fn weakly_simulates(target: &PointedModel, source: &PointedModel) -> Result<Option<SimWitness>> {
    same_props(target, source)?;
    Ok(witness(SimKind::WeakSimulation, target, source))
}

/// `flags[w]` iff every world reachable from `w` (including `w`) has
/// valuation `mask` and a successor, i.e. `M, w` is bisimilar to `↻_mask`.
fn loop_like(m: &KripkeModel, mask: u64) -> Vec<bool> {
    // greatest set closed under "valuation = mask, has a successor, all
    // successors in the set"; computed from the complement by backward
    // propagation
    let n = m.len();
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
    for w in 0..n {
        for &u in m.successors(w) {
            pred[u].push(w);
        }
    }
    let mut bad: Vec<bool> = (0..n)
        .map(|w| m.valuation(w) != mask || m.successors(w).is_empty())
        .collect();
    let mut stack: Vec<usize> = (0..n).filter(|&w| bad[w]).collect();
    while let Some(u) = stack.pop() {
        for &w in &pred[u] {
            if !bad[w] {
                bad[w] = true;
                stack.push(w);
            }
        }
    }
    bad.into_iter().map(|b| !b).collect()
}

/// Independent pair-by-pair check of a witness. Returns a description of the
/// first violated clause.
pub fn check_witness(w: &SimWitness) -> std::result::Result<(), String> {
    let (s, t) = (w.source.model(), w.target.model());
    if s.props() != t.props() {
        return Err("models over different propositions".into());
    }
    if !w.pairs.contains(&(w.source.point(), w.target.point())) {
        return Err("point pair missing".into());
    }
    let weak = w.kind == SimKind::WeakSimulation;
    let (src_empty, tgt_full) = if weak {
        (loop_like(s, 0), loop_like(t, t.props().full_mask()))
    } else {
        (vec![false; s.len()], vec![false; t.len()])
    };
    for &(a, b) in &w.pairs {
        if a >= s.len() || b >= t.len() {
            return Err(format!("pair ({a}, {b}) out of range"));
        }
        let (va, vb) = (s.valuation(a), t.valuation(b));
        let atom = match w.kind {
            SimKind::Bisimulation => va == vb,
            _ => va & !vb == 0,
        };
        if !atom {
            return Err(format!("atom clause fails at ({}, {})", s.name(a), t.name(b)));
        }
        for &u in s.successors(a) {
            if !src_empty[u] && !t.successors(b).iter().any(|&v| w.pairs.contains(&(u, v))) {
                return Err(format!(
                    "forth clause fails at ({}, {}) for successor {}",
                    s.name(a),
                    t.name(b),
                    s.name(u)
                ));
            }
        }
        for &v in t.successors(b) {
            if !tgt_full[v] && !s.successors(a).iter().any(|&u| w.pairs.contains(&(u, v))) {
                return Err(format!(
                    "back clause fails at ({}, {}) for successor {}",
                    s.name(a),
                    t.name(b),
                    t.name(v)
                ));
            }
        }
    }
    Ok(())
}

/// Relational composition `z1 ; z2`, re-validated.
pub fn compose_witnesses(z1: &SimWitness, z2: &SimWitness) -> Result<SimWitness> {
    if z1.kind != z2.kind {
        return Err(Error::Compose(format!("kinds differ: {} and {}", z1.kind, z2.kind)));
    }
    if z1.target != z2.source {
        return Err(Error::Compose("target of the first witness is not the source of the second".into()));
    }
    let mut by_mid: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(b, c) in &z2.pairs {
        by_mid.entry(b).or_default().push(c);
    }
    let mut pairs = BTreeSet::new();
    for &(a, b) in &z1.pairs {
        if let Some(cs) = by_mid.get(&b) {
            pairs.extend(cs.iter().map(|&c| (a, c)));
        }
    }
    let out = SimWitness {
        kind: z1.kind,
        source: z1.source.clone(),
        target: z2.target.clone(),
        pairs,
    };
    check_witness(&out).map_err(Error::Compose)?;
    Ok(out)
}

/// The identity relation on the worlds of `m`.
pub fn identity_witness(kind: SimKind, m: &PointedModel) -> SimWitness {
    SimWitness {
        kind,
        source: m.clone(),
        target: m.clone(),
        pairs: (0..m.model().len()).map(|w| (w, w)).collect(),
    }
}

/// Bisimulation quotient by partition refinement: block of every world.
pub fn bisimulation_classes(m: &KripkeModel) -> Vec<usize> {
    let n = m.len();
    let mut block: Vec<usize> = relabel((0..n).map(|w| m.valuation(w)).collect());
    loop {
        let sigs: Vec<(u64, Vec<usize>)> = (0..n)
            .map(|w| {
                let mut succ: Vec<usize> = m.successors(w).iter().map(|&u| block[u]).collect();
                succ.sort_unstable();
                succ.dedup();
                (block[w] as u64, succ)
            })
            .collect();
        let next = relabel(sigs);
        let done = next.iter().max() == block.iter().max();
        block = next;
        if done {
            return block;
        }
    }
}

fn relabel<K: std::hash::Hash + Eq>(keys: Vec<K>) -> Vec<usize> {
    let mut ids = HashMap::new();
    keys.into_iter()
        .map(|k| {
            let next = ids.len();
            *ids.entry(k).or_insert(next)
        })
        .collect()
}

/// Smallest model bisimilar to `pm`: the quotient of its reachable part,
/// renamed canonically.
pub fn minimize(pm: &PointedModel) -> PointedModel {
    let r = pm.reachable();
    let m = r.model();
    let block = bisimulation_classes(m);
    let nb = block.iter().max().map_or(0, |b| b + 1);
    let mut q = KripkeModel::new(m.props().clone());
    let mut rep = vec![usize::MAX; nb];
    for w in 0..m.len() {
        if rep[block[w]] == usize::MAX {
            rep[block[w]] = w;
        }
    }
    for (b, &w) in rep.iter().enumerate() {
        q.add_world_mask(format!("b{b}"), m.valuation(w));
    }
    for w in 0..m.len() {
        for &u in m.successors(w) {
            q.add_edge(block[w], block[u]);
        }
    }
    q.reachable_from(block[r.point()])
}
