use crate::budget::Budget;
use crate::error::{Error, Result};

use super::{KripkeModel, PointedModel, PropSet};

/// A finite family of pointed models sharing one Kripke model.
///
/// Type universes are stored as a type graph: every world is a tree type
/// (valuation plus the set of its child types), so all worlds are pairwise
/// non-bisimilar and the submodel generated by a world is its minimal model.
#[derive(Clone, Debug)]
pub struct Universe {
    model: KripkeModel,
    points: Vec<usize>,
    tree_size: Vec<usize>,
}

impl Universe {
    /// All bisimulation types of depth at most `depth` over `props`, optionally
    /// with `↻_∅`/`↻_Prop` grafted in as extra pseudo-types at every level.
    pub fn types(props: &PropSet, depth: usize, graft_loops: bool, budget: &Budget) -> Result<Self> {
        let nvals: u64 = 1 << props.len().min(63);
        if props.len() > 20 {
            return Err(Error::exhausted("model enumeration", format!("2^{}", props.len()), budget.max_models));
        }
        let full = props.full_mask();
        let mut model = KripkeModel::new(props.clone());
        let mut tree_size = Vec::new();
        let mut loops = Vec::new();
        if graft_loops {
            let le = model.add_world_mask("l0", 0);
            model.add_edge(le, le);
            loops.push(le);
            tree_size.push(1);
            if !props.is_empty() {
                let lf = model.add_world_mask("l1", full);
                model.add_edge(lf, lf);
                loops.push(lf);
                tree_size.push(1);
            }
        }
        let excluded = |v: u64, children: &[usize]| -> bool {
            graft_loops
                && children.len() == 1
                && ((v == 0 && children[0] == loops[0]) || (v == full && children[0] == *loops.last().unwrap()))
        };

        // `prev` = all types of depth <= k-1; `fresh` = those of depth exactly k-1.
        let mut prev: Vec<usize> = loops.clone();
        let mut fresh: Vec<bool> = vec![false; prev.len()];
        for k in 0..=depth {
            let pool: Vec<usize> = if k == 0 { loops.clone() } else { prev.clone() };
            if pool.len() >= 63 {
                return Err(Error::exhausted(
                    "model enumeration",
                    format!("{nvals}*2^{}", pool.len()),
                    budget.max_models,
                ));
            }
            let needed = (nvals as u128) << pool.len();
            if needed + model.len() as u128 > budget.max_models as u128 {
                return Err(Error::exhausted("model enumeration", needed, budget.max_models));
            }
            let mut added = Vec::new();
            for v in 0..nvals {
                for mask in 0u64..(1u64 << pool.len()) {
                    let children: Vec<usize> = (0..pool.len())
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| pool[i])
                        .collect();
                    let is_new = k == 0 || (0..pool.len()).any(|i| mask >> i & 1 == 1 && fresh[i]);
                    if !is_new || excluded(v, &children) {
                        continue;
                    }
                    let w = model.add_world_mask(format!("t{}", model.len()), v);
                    tree_size.push(1 + children.iter().map(|&c| tree_size[c]).sum::<usize>());
                    for c in children {
                        model.add_edge(w, c);
                    }
                    added.push(w);
                }
            }
            fresh = vec![false; prev.len()];
            fresh.extend(std::iter::repeat_n(true, added.len()));
            prev.extend(added);
        }
        let points = (0..model.len()).collect();
        Ok(Universe {
            model,
            points,
            tree_size,
        })
    }

    /// Disjoint union of the given models; props must agree.
    pub fn from_models(props: &PropSet, models: &[PointedModel]) -> Result<Self> {
        let mut u = Universe {
            model: KripkeModel::new(props.clone()),
            points: Vec::new(),
            tree_size: Vec::new(),
        };
        u.extend(models)?;
        Ok(u)
    }

    /// Appends models as extra points; returns their indices in `points()`.
    pub fn extend(&mut self, models: &[PointedModel]) -> Result<Vec<usize>> {
        let mut idx = Vec::new();
        for (i, m) in models.iter().enumerate() {
            if m.props() != self.model.props() {
                return Err(Error::Precondition(format!(
                    "model over {} in a universe over {}",
                    m.props(),
                    self.model.props()
                )));
            }
            let offset = self.model.append(m.model(), &format!("x{i}_"));
            self.tree_size
                .extend(std::iter::repeat_n(usize::MAX, m.model().len()));
            self.tree_size[offset + m.point()] = m.model().len();
            idx.push(self.points.len());
            self.points.push(offset + m.point());
        }
        Ok(idx)
    }

    pub fn props(&self) -> &PropSet {
        self.model.props()
    }

    pub fn model(&self) -> &KripkeModel {
        &self.model
    }

    /// World index of every member, in canonical order.
    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The `i`-th member as a standalone pointed model.
    pub fn pointed(&self, i: usize) -> PointedModel {
        self.model.reachable_from(self.points[i])
    }

    pub fn to_models(&self) -> Vec<PointedModel> {
        (0..self.len()).map(|i| self.pointed(i)).collect()
    }

    /// Number of nodes of the member's tree unraveling (loops count once).
    pub fn size_of(&self, i: usize) -> usize {
        self.tree_size[self.points[i]]
    }
}

/// One representative per bisimulation class of tree models of depth at most
/// `max_depth` over `props`, plus grafted `↻_∅`/`↻_Prop` variants on request.
pub fn enumerate_models(
    props: &PropSet,
    max_depth: usize,
    graft_loops: bool,
    budget: &Budget,
) -> Result<Vec<PointedModel>> {
    Ok(Universe::types(props, max_depth, graft_loops, budget)?.to_models())
}

/// `|T_d|` for `n` propositions, when it fits in a `u128`.
pub(crate) fn type_count(n: usize, depth: usize) -> Option<u128> {
    if n >= 64 {
        return None;
    }
    let vals = 1u128 << n;
    let mut t = vals;
    for _ in 0..depth {
        if t >= 127 - n as u128 {
            return None;
        }
        t = vals << t;
    }
    Some(t)
}

/// Lazily grows the bisimulation-distinct trees of bounded depth in order of
/// increasing size.
pub struct SizedTrees {
    model: KripkeModel,
    size: Vec<usize>,
    depth: Vec<usize>,
    max_depth: usize,
    next_size: usize,
    limit: usize,
    total: Option<u128>,
}

impl SizedTrees {
    pub fn new(props: &PropSet, max_depth: usize, budget: &Budget) -> Self {
        SizedTrees {
            model: KripkeModel::new(props.clone()),
            size: Vec::new(),
            depth: Vec::new(),
            max_depth,
            next_size: 1,
            limit: budget.max_models,
            total: type_count(props.len(), max_depth),
        }
    }

    /// True once every tree of the depth bound has been generated.
    pub fn is_complete(&self) -> bool {
        self.total == Some(self.model.len() as u128)
    }

    pub fn model(&self) -> &KripkeModel {
        &self.model
    }

    /// Size of the next batch to be generated.
    pub fn next_size(&self) -> usize {
        self.next_size
    }

    /// Generates every tree with `next_size()` nodes; returns the range of new
    /// world indices. Fails once the arena would exceed the budget.
    pub fn grow(&mut self) -> Result<std::ops::Range<usize>> {
        let s = self.next_size;
        let start = self.model.len();
        let mut sets = Vec::new();
        let mut current = Vec::new();
        self.child_sets(0, s - 1, &mut current, &mut sets)?;
        let nvals = 1u64 << self.model.props().len();
        if start + sets.len() * nvals as usize > self.limit {
            return Err(Error::exhausted("tree enumeration", start + sets.len() * nvals as usize, self.limit));
        }
        for v in 0..nvals {
            for children in &sets {
                let w = self.model.add_world_mask(format!("t{}", self.model.len()), v);
                for &c in children {
                    self.model.add_edge(w, c);
                }
                self.size.push(s);
                self.depth
                    .push(children.iter().map(|&c| self.depth[c] + 1).max().unwrap_or(0));
            }
        }
        self.next_size += 1;
        Ok(start..self.model.len())
    }

    /// Sets of distinct existing types (increasing index) with sizes summing
    /// to `remaining` and depth below the bound.
    fn child_sets(
        &self,
        from: usize,
        remaining: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        if remaining == 0 {
            if out.len() >= self.limit {
                return Err(Error::exhausted("tree enumeration", "more", self.limit));
            }
            out.push(current.clone());
            return Ok(());
        }
        for i in from..self.size.len() {
            if self.size[i] > remaining || self.depth[i] + 1 > self.max_depth {
                continue;
            }
            current.push(i);
            self.child_sets(i + 1, remaining - self.size[i], current, out)?;
            current.pop();
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> PropSet {
        PropSet::new(["p"]).unwrap()
    }

    #[test]
    fn type_counts() {
        let b = Budget::default();
        assert_eq!(Universe::types(&p(), 0, false, &b).unwrap().len(), 2);
        assert_eq!(Universe::types(&p(), 1, false, &b).unwrap().len(), 8);
        assert_eq!(Universe::types(&p(), 2, false, &b).unwrap().len(), 512);
        let pq = PropSet::new(["p", "q"]).unwrap();
        assert_eq!(Universe::types(&pq, 1, false, &b).unwrap().len(), 64);
        assert_eq!(Universe::types(&p(), 0, true, &b).unwrap().len(), 8);
        assert_eq!(Universe::types(&p(), 1, true, &b).unwrap().len(), 512);
        assert_eq!(Universe::types(&pq, 0, true, &b).unwrap().len(), 16);
        assert_eq!(Universe::types(&PropSet::empty(), 0, true, &b).unwrap().len(), 2);
        assert!(matches!(
            Universe::types(&p(), 3, false, &b),
            Err(Error::ResourceExhausted { .. })
        ));
        assert!(matches!(
            Universe::types(&p(), 2, true, &b),
            Err(Error::ResourceExhausted { .. })
        ));
    }

    #[test]
    fn depth_zero_models() {
        let ms = enumerate_models(&p(), 0, false, &Budget::default()).unwrap();
        assert_eq!(ms.len(), 2);
        assert_eq!(ms[0], crate::kripke::single_point(&p(), Vec::<&str>::new()).unwrap());
        assert_eq!(ms[1], crate::kripke::single_point(&p(), ["p"]).unwrap());
        let g = enumerate_models(&p(), 0, true, &Budget::default()).unwrap();
        assert!(g.contains(&crate::kripke::loop_empty(&p())));
        assert!(g.contains(&crate::kripke::loop_full(&p())));
    }

    #[test]
    fn sized_trees_counts() {
        // unlabeled rooted trees with distinct child sets: 1, 1, 1, 2, 3
        let mut t = SizedTrees::new(&PropSet::empty(), 10, &Budget::default());
        let counts: Vec<usize> = (0..5).map(|_| t.grow().unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3]);
        let mut t = SizedTrees::new(&PropSet::empty(), 1, &Budget::default());
        let counts: Vec<usize> = (0..3).map(|_| t.grow().unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 0]);
    }
}
