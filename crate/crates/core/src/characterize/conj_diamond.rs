use std::collections::BTreeSet;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::kripke::{KripkeModel, PointedModel, PropSet};
use crate::simulation::minimize;
use crate::syntax::{Connective, Formula, Fragment, Polarity};

use super::{require_connectives, require_member, ExampleSet};

/// A `◇,∧` formula as a tree: atoms at the node, one child per `◇`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Tree {
    atoms: BTreeSet<String>,
    children: Vec<Tree>,
}

impl Tree {
    pub(crate) fn of(f: &Formula) -> Result<Tree> {
        let mut t = Tree {
            atoms: BTreeSet::new(),
            children: Vec::new(),
        };
        t.absorb(f)?;
        Ok(t)
    }

    fn absorb(&mut self, f: &Formula) -> Result<()> {
        match f {
            Formula::Atom(p) => {
                self.atoms.insert(p.clone());
            }
            Formula::Top => {}
            Formula::Dia(g) => self.children.push(Tree::of(g)?),
            Formula::And(ops) => {
                for g in ops {
                    self.absorb(g)?;
                }
            }
            other => {
                return Err(Error::UnsupportedFragment {
                    op: "characterize_conj_diamond",
                    reason: format!("`{other}` is not a <>,& formula"),
                })
            }
        }
        Ok(())
    }

    /// The formula of `self` holds at the tree model of `other`.
    pub(crate) fn maps_into(&self, other: &Tree) -> bool {
        self.atoms.is_subset(&other.atoms)
            && self
                .children
                .iter()
                .all(|c| other.children.iter().any(|d| c.maps_into(d)))
    }

    /// Equivalent tree with no redundant `◇`-children.
    fn core(&self) -> Tree {
        let children: Vec<Tree> = self.children.iter().map(Tree::core).collect();
        let mut keep: Vec<Tree> = Vec::new();
        for (i, c) in children.iter().enumerate() {
            let implied = children.iter().enumerate().any(|(j, d)| {
                j != i && c.maps_into(d) && (!d.maps_into(c) || j < i)
            });
            if !implied {
                keep.push(c.clone());
            }
        }
        keep.sort();
        Tree {
            atoms: self.atoms.clone(),
            children: keep,
        }
    }

    /// Trees strictly weaker than `self` such that every strictly weaker
    /// `◇,∧` formula holds at one of them.
    fn frontier(&self) -> Vec<Tree> {
        let mut out = Vec::new();
        for a in &self.atoms {
            let mut t = self.clone();
            t.atoms.remove(a);
            out.push(t);
        }
        for i in 0..self.children.len() {
            let mut t = self.clone();
            let child = t.children.remove(i);
            t.children.extend(child.frontier());
            out.push(t);
        }
        out
    }

    pub(crate) fn to_formula(&self) -> Formula {
        let parts = self
            .atoms
            .iter()
            .map(|a| Formula::atom(a.clone()))
            .chain(self.children.iter().map(|c| Formula::dia(c.to_formula())));
        Formula::try_and(parts).unwrap_or(Formula::Top)
    }

    pub(crate) fn to_model(&self, props: &PropSet) -> Result<PointedModel> {
        let mut m = KripkeModel::new(props.clone());
        self.build(&mut m)?;
        Ok(PointedModel::new(m, 0))
    }

    fn build(&self, m: &mut KripkeModel) -> Result<usize> {
        let w = m.len();
        let mask = m.props().mask_of(&self.atoms)?;
        m.add_world_mask(format!("w{w}"), mask);
        for c in &self.children {
            let u = c.build(m)?;
            m.add_edge(w, u);
        }
        Ok(w)
    }
}

/// One core tree per class of `◇,∧` formulas of depth at most `depth` over
/// `props`; the empty tree (`⊤`) only if `top` is set.
pub(crate) fn core_classes(props: &PropSet, depth: usize, top: bool, budget: &Budget) -> Result<Vec<Tree>> {
    let names: Vec<&str> = props.iter().collect();
    let atom_sets: Vec<BTreeSet<String>> = (0u64..1 << names.len())
        .map(|m| {
            (0..names.len())
                .filter(|i| m >> i & 1 == 1)
                .map(|i| names[i].to_string())
                .collect()
        })
        .collect();
    let mut prev: Vec<Tree> = Vec::new();
    for k in 0..=depth {
        let antichains = if k == 0 {
            vec![Vec::new()]
        } else {
            antichains(&prev, budget)?
        };
        let needed = atom_sets.len() as u128 * antichains.len() as u128;
        if needed > budget.max_formulas as u128 {
            return Err(Error::exhausted("<>,& formula classes", needed.to_string(), budget.max_formulas));
        }
        let mut cur = Vec::new();
        for atoms in &atom_sets {
            for children in &antichains {
                if atoms.is_empty() && children.is_empty() && !top {
                    continue;
                }
                let mut children = children.clone();
                children.sort();
                cur.push(Tree {
                    atoms: atoms.clone(),
                    children,
                });
            }
        }
        prev = cur;
    }
    prev.sort_by_cached_key(|t| {
        let g = t.to_formula();
        (g.modal_depth(), g.size(), g)
    });
    Ok(prev)
}

/// Sets of pairwise non-implying trees drawn from `pool`.
fn antichains(pool: &[Tree], budget: &Budget) -> Result<Vec<Vec<Tree>>> {
    let n = pool.len();
    let comparable: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| pool[i].maps_into(&pool[j]) || pool[j].maps_into(&pool[i])).collect())
        .collect();
    let mut out: Vec<Vec<Tree>> = Vec::new();
    let mut stack: Vec<(usize, Vec<usize>)> = vec![(0, Vec::new())];
    while let Some((start, chosen)) = stack.pop() {
        if out.len() >= budget.max_formulas {
            return Err(Error::exhausted("<>,& antichains", format!("> {}", budget.max_formulas), budget.max_formulas));
        }
        out.push(chosen.iter().map(|&i| pool[i].clone()).collect());
        for (i, row) in comparable.iter().enumerate().skip(start) {
            if chosen.iter().all(|&j| !row[j]) {
                let mut next = chosen.clone();
                next.push(i);
                stack.push((i + 1, next));
            }
        }
    }
    Ok(out)
}

/// Characterization of a `◇,∧` formula: its canonical tree model as the sole
/// positive example, and the frontier of strictly weaker trees as negatives.
/// Runs in time polynomial in the size of `f`.
pub fn characterize_conj_diamond(f: &Formula, fr: &Fragment) -> Result<ExampleSet> {
    if fr.polarity != Polarity::Positive {
        return Err(Error::UnsupportedFragment {
            op: "characterize_conj_diamond",
            reason: format!("{} is not a positive fragment", fr.spec_string()),
        });
    }
    require_connectives(fr, &[Connective::Dia, Connective::And], "characterize_conj_diamond")?;
    require_member(f, fr)?;
    let tree = Tree::of(f)?.core();
    let positive = vec![minimize(&tree.to_model(&fr.props)?)];
    let mut negative: Vec<PointedModel> = Vec::new();
    for t in tree.frontier() {
        let m = minimize(&t.to_model(&fr.props)?);
        if !negative.contains(&m) {
            negative.push(m);
        }
    }
    negative.sort_by_key(PointedModel::canonical_key);
    ExampleSet::new(fr.props.clone(), positive, negative)
}
