//! Finite Kripke models, pointed models and the canonical small models
//! `·_P` (deadlock point) and `↻_P` (reflexive point).

mod json;
mod universe;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::budget::Budget;
use crate::error::{Error, Result};

pub use json::{ExampleSetFile, ModelFile};
pub use universe::{enumerate_models, SizedTrees, Universe};
pub(crate) use universe::type_count;

/// Maximum number of propositions; valuations are stored as `u64` masks.
pub const MAX_PROPS: usize = 64;

/// Finite, sorted, duplicate-free set of proposition names.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PropSet(Vec<String>);

impl PropSet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let set: BTreeSet<String> = names.into_iter().map(Into::into).collect();
        if set.len() > MAX_PROPS {
            return Err(Error::TooManyPropositions {
                got: set.len(),
                max: MAX_PROPS,
            });
        }
        Ok(PropSet(set.into_iter().collect()))
    }

    pub fn empty() -> Self {
        PropSet(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.binary_search_by(|p| p.as_str().cmp(name)).ok()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    /// Mask with every proposition set.
    pub fn full_mask(&self) -> u64 {
        if self.0.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.0.len()) - 1
        }
    }

    pub fn union(&self, other: &PropSet) -> Result<PropSet> {
        PropSet::new(self.iter().chain(other.iter()))
    }

    pub fn is_subset(&self, other: &PropSet) -> bool {
        self.iter().all(|p| other.contains(p))
    }

    pub fn names_of(&self, mask: u64) -> Vec<String> {
        self.0
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, p)| p.clone())
            .collect()
    }

    pub fn mask_of<S: AsRef<str>>(&self, names: impl IntoIterator<Item = S>) -> Result<u64> {
        let mut mask = 0;
        for n in names {
            let i = self
                .index_of(n.as_ref())
                .ok_or_else(|| Error::UnknownProposition(n.as_ref().to_string()))?;
            mask |= 1 << i;
        }
        Ok(mask)
    }

    /// Re-expresses a mask over `self` as a mask over the superset `to`.
    fn remap(&self, mask: u64, to: &PropSet) -> u64 {
        let mut out = 0;
        for (i, p) in self.0.iter().enumerate() {
            if mask >> i & 1 == 1 {
                out |= 1 << to.index_of(p).expect("target is a superset");
            }
        }
        out
    }
}

impl fmt::Display for PropSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.join(","))
    }
}

/// A finite Kripke model `(dom(M), R, V)` over an ambient proposition set.
///
/// Worlds are addressed by dense indices; each carries a string name used by
/// the JSON format. Successor lists are kept sorted and duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeModel {
    props: PropSet,
    names: Vec<String>,
    succ: Vec<Vec<usize>>,
    val: Vec<u64>,
}

impl KripkeModel {
    pub fn new(props: PropSet) -> Self {
        KripkeModel {
            props,
            names: Vec::new(),
            succ: Vec::new(),
            val: Vec::new(),
        }
    }

    pub fn props(&self) -> &PropSet {
        &self.props
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, w: usize) -> &str {
        &self.names[w]
    }

    pub fn world(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn successors(&self, w: usize) -> &[usize] {
        &self.succ[w]
    }

    pub fn valuation(&self, w: usize) -> u64 {
        self.val[w]
    }

    pub fn holds(&self, w: usize, prop: usize) -> bool {
        self.val[w] >> prop & 1 == 1
    }

    pub fn valuation_names(&self, w: usize) -> Vec<String> {
        self.props.names_of(self.val[w])
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    /// Adds a world with a valuation mask over the ambient props.
    pub fn add_world_mask(&mut self, name: impl Into<String>, mask: u64) -> usize {
        debug_assert_eq!(mask & !self.props.full_mask(), 0);
        self.names.push(name.into());
        self.succ.push(Vec::new());
        self.val.push(mask);
        self.names.len() - 1
    }

    pub fn add_world<S: AsRef<str>>(
        &mut self,
        name: impl Into<String>,
        true_props: impl IntoIterator<Item = S>,
    ) -> Result<usize> {
        let name = name.into();
        if self.world(&name).is_some() {
            return Err(Error::InvalidModel(format!("duplicate world `{name}`")));
        }
        let mask = self.props.mask_of(true_props)?;
        Ok(self.add_world_mask(name, mask))
    }

    pub fn add_edge(&mut self, from: usize, to: usize) {
        let list = &mut self.succ[from];
        if let Err(i) = list.binary_search(&to) {
            list.insert(i, to);
        }
    }

    /// Same model over a larger proposition set; new propositions are false
    /// everywhere.
    pub fn widen(&self, props: &PropSet) -> Result<KripkeModel> {
        if !self.props.is_subset(props) {
            return Err(Error::Precondition(format!(
                "cannot widen {} to {}",
                self.props, props
            )));
        }
        Ok(KripkeModel {
            props: props.clone(),
            names: self.names.clone(),
            succ: self.succ.clone(),
            val: self.val.iter().map(|&m| self.props.remap(m, props)).collect(),
        })
    }

    /// The submodel reachable from `point`, with worlds renamed `w0, w1, ...`
    /// in breadth-first order.
    pub fn reachable_from(&self, point: usize) -> PointedModel {
        let mut index = BTreeMap::new();
        let mut order = vec![point];
        index.insert(point, 0usize);
        let mut queue = VecDeque::from([point]);
        while let Some(w) = queue.pop_front() {
            for &u in &self.succ[w] {
                if let std::collections::btree_map::Entry::Vacant(e) = index.entry(u) {
                    e.insert(order.len());
                    order.push(u);
                    queue.push_back(u);
                }
            }
        }
        let mut m = KripkeModel::new(self.props.clone());
        for (i, &w) in order.iter().enumerate() {
            m.add_world_mask(format!("w{i}"), self.val[w]);
        }
        for (i, &w) in order.iter().enumerate() {
            for u in &self.succ[w] {
                m.add_edge(i, index[u]);
            }
        }
        PointedModel::new(m, 0)
    }

    /// Appends a copy of `other` (which must share the ambient props); returns
    /// the index offset of the copied worlds.
    pub(crate) fn append(&mut self, other: &KripkeModel, prefix: &str) -> usize {
        debug_assert_eq!(self.props, other.props);
        let offset = self.len();
        for w in 0..other.len() {
            self.add_world_mask(format!("{prefix}{}", other.names[w]), other.val[w]);
        }
        for w in 0..other.len() {
            self.succ[offset + w] = other.succ[w].iter().map(|u| u + offset).collect();
        }
        offset
    }
}

/// A Kripke model with a designated world.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedModel {
    model: KripkeModel,
    point: usize,
}

impl PointedModel {
    pub fn new(model: KripkeModel, point: usize) -> Self {
        assert!(point < model.len(), "point must be a world of the model");
        PointedModel { model, point }
    }

    pub fn model(&self) -> &KripkeModel {
        &self.model
    }

    pub fn point(&self) -> usize {
        self.point
    }

    pub fn props(&self) -> &PropSet {
        self.model.props()
    }

    pub fn widen(&self, props: &PropSet) -> Result<PointedModel> {
        Ok(PointedModel {
            model: self.model.widen(props)?,
            point: self.point,
        })
    }

    /// Reachable part, renamed canonically.
    pub fn reachable(&self) -> PointedModel {
        self.model.reachable_from(self.point)
    }

    /// Canonical compact JSON, also used as a deterministic tie-breaker.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ModelFile::from(self)).expect("model serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<PointedModel> {
        let file: ModelFile = serde_json::from_str(text)?;
        file.into_model(None)
    }

    /// Ordering key: world count, then canonical JSON.
    pub fn canonical_key(&self) -> (usize, String) {
        (self.model.len(), self.to_json())
    }

    /// Complements the given propositions in every world's valuation.
    pub fn complement(&self, props_to_flip: u64) -> PointedModel {
        let mut m = self.model.clone();
        for v in &mut m.val {
            *v ^= props_to_flip;
        }
        PointedModel {
            model: m,
            point: self.point,
        }
    }
}

/// A natural number or infinity; infinity is the maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedNat {
    Finite(usize),
    Infinite,
}

impl fmt::Display for ExtendedNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedNat::Finite(n) => write!(f, "{n}"),
            ExtendedNat::Infinite => write!(f, "inf"),
        }
    }
}

/// `·_P`: a single world without successors where exactly `true_props` hold.
pub fn single_point<S: AsRef<str>>(
    props: &PropSet,
    true_props: impl IntoIterator<Item = S>,
) -> Result<PointedModel> {
    let mut m = KripkeModel::new(props.clone());
    m.add_world("w0", true_props)?;
    Ok(PointedModel::new(m, 0))
}

/// `↻_P`: a single reflexive world where exactly `true_props` hold.
pub fn reflexive_point<S: AsRef<str>>(
    props: &PropSet,
    true_props: impl IntoIterator<Item = S>,
) -> Result<PointedModel> {
    let mut m = KripkeModel::new(props.clone());
    let w = m.add_world("w0", true_props)?;
    m.add_edge(w, w);
    Ok(PointedModel::new(m, 0))
}

pub(crate) fn reflexive_point_mask(props: &PropSet, mask: u64) -> PointedModel {
    let mut m = KripkeModel::new(props.clone());
    let w = m.add_world_mask("w0", mask);
    m.add_edge(w, w);
    PointedModel::new(m, 0)
}

/// `↻_∅`, the weak initial object.
pub fn loop_empty(props: &PropSet) -> PointedModel {
    reflexive_point_mask(props, 0)
}

/// `↻_Prop`, the weak final object.
pub fn loop_full(props: &PropSet) -> PointedModel {
    reflexive_point_mask(props, props.full_mask())
}

/// A path `w0 -> w1 -> ... -> wn` with the given valuation masks.
pub fn chain(props: &PropSet, valuations: &[u64]) -> PointedModel {
    assert!(!valuations.is_empty());
    let mut m = KripkeModel::new(props.clone());
    for (i, &v) in valuations.iter().enumerate() {
        m.add_world_mask(format!("w{i}"), v);
        if i > 0 {
            m.add_edge(i - 1, i);
        }
    }
    PointedModel::new(m, 0)
}

/// Length of the longest path from the point, or infinity when a cycle is
/// reachable.
pub fn height(pm: &PointedModel) -> ExtendedNat {
    let m = pm.model();
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done(usize),
    }
    let mut mark = vec![Mark::New; m.len()];
    // iterative DFS: (world, next successor index)
    let mut stack = vec![(pm.point(), 0usize)];
    mark[pm.point()] = Mark::Open;
    while let Some(&mut (w, ref mut i)) = stack.last_mut() {
        if let Some(&u) = m.successors(w).get(*i) {
            *i += 1;
            match mark[u] {
                Mark::Open => return ExtendedNat::Infinite,
                Mark::New => {
                    mark[u] = Mark::Open;
                    stack.push((u, 0));
                }
                Mark::Done(_) => {}
            }
        } else {
            let h = m
                .successors(w)
                .iter()
                .map(|&u| match mark[u] {
                    Mark::Done(h) => h + 1,
                    _ => unreachable!("successors are finished before their parent"),
                })
                .max()
                .unwrap_or(0);
            mark[w] = Mark::Done(h);
            stack.pop();
        }
    }
    match mark[pm.point()] {
        Mark::Done(h) => ExtendedNat::Finite(h),
        _ => unreachable!(),
    }
}

/// Tree unraveling of `pm` cut at depth `d`: worlds at depth `d` keep their
/// valuation but lose their successors.
pub fn truncate(pm: &PointedModel, d: usize, budget: &Budget) -> Result<PointedModel> {
    let src = pm.model();
    let mut out = KripkeModel::new(src.props().clone());
    let mut queue = VecDeque::new();
    out.add_world_mask("w0", src.valuation(pm.point()));
    queue.push_back((pm.point(), 0usize, 0usize));
    while let Some((w, node, depth)) = queue.pop_front() {
        if depth == d {
            continue;
        }
        for &u in src.successors(w) {
            if out.len() >= budget.max_models {
                return Err(Error::exhausted("truncation", "more", budget.max_models));
            }
            let child = out.len();
            out.add_world_mask(format!("w{child}"), src.valuation(u));
            out.add_edge(node, child);
            queue.push_back((u, child, depth + 1));
        }
    }
    Ok(PointedModel::new(out, 0))
}
