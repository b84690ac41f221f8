//! Brute-force uniqueness oracle for characterizations, and counterexample
//! search for formula equivalence.

use std::collections::HashMap;

use serde::Serialize;

use crate::budget::Budget;
use crate::characterize::{core_classes, ExampleSet, Tree};
use crate::error::{Error, Result};
use crate::kripke::{ModelFile, PointedModel, PropSet, SizedTrees, Universe};
use crate::semantics::{eval, fits, satisfies};
use crate::syntax::{in_fragment, Connective, Formula, FormulaCatalog, Fragment, Polarity};

/// Upper bound on the number of classes enumerated before falling back to
/// the lattice-bounds method.
const EXHAUSTIVE_CLASS_CAP: usize = 100_000;
/// Upper bound on catalog bits (classes times universe size).
const EXHAUSTIVE_BIT_CAP: usize = 1 << 31;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    /// `positive[i]` or `negative[i]`.
    pub example: String,
    pub expected: bool,
    pub actual: bool,
}

/// A fragment formula that fits the examples but is not equivalent to the
/// characterized one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Competitor {
    pub formula: String,
    pub trace: Vec<TraceEntry>,
    /// A model on which the competitor and the target disagree.
    pub distinguishing_model: Option<ModelFile>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Every class up to the depth bound was enumerated.
    Exhaustive,
    /// Only the least and greatest fitting formulas were compared.
    Bounds,
    /// Every class of a `◇,∧` fragment was enumerated as a core tree.
    Trees,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub method: Method,
    pub depth_bound: usize,
    /// Number of formula classes inspected (exhaustive method only).
    pub classes: usize,
    pub competitors: Vec<Competitor>,
}

impl VerifyReport {
    pub fn unique(&self) -> bool {
        self.competitors.is_empty()
    }

    /// One JSON object per competitor, one per line.
    pub fn to_json_lines(&self) -> String {
        self.competitors
            .iter()
            .map(|c| serde_json::to_string(c).expect("competitor serialization cannot fail") + "\n")
            .collect()
    }
}

fn trace(g: &Formula, e: &ExampleSet) -> Result<Vec<TraceEntry>> {
    let mut out = Vec::new();
    for (i, m) in e.positive.iter().enumerate() {
        out.push(TraceEntry {
            example: format!("positive[{i}]"),
            expected: true,
            actual: satisfies(m, g)?,
        });
    }
    for (i, m) in e.negative.iter().enumerate() {
        out.push(TraceEntry {
            example: format!("negative[{i}]"),
            expected: false,
            actual: satisfies(m, g)?,
        });
    }
    Ok(out)
}

/// Lists every fragment formula of depth at most `depth_bound` that fits `e`
/// and is not equivalent to `f`. An empty report means `e` characterizes `f`
/// up to that depth.
///
/// Classes are enumerated exhaustively when there are few enough. Otherwise,
/// for fragments with both `∧` and `∨`, the fitting formulas form an interval
/// of the formula lattice whose ends are computed directly from the examples;
/// the report then holds whichever end differs from `f`.
pub fn verify_characterization(
    f: &Formula,
    e: &ExampleSet,
    fr: &Fragment,
    depth_bound: usize,
    budget: &Budget,
) -> Result<VerifyReport> {
    if !in_fragment(f, fr) {
        return Err(Error::NotInFragment {
            formula: f.render(),
            fragment: fr.to_string(),
        });
    }
    let props = e.props.union(&fr.props)?;
    let e = e.widen(&props)?;
    if !fits(f, &e)? {
        return Err(Error::Precondition(format!("{f} does not fit the examples")));
    }
    let lattice = fr.has(Connective::And) && fr.has(Connective::Or);
    let existential = fr.polarity == Polarity::Positive
        && fr.connectives.iter().all(|c| matches!(c, Connective::Dia | Connective::And | Connective::Top));
    match exhaustive(f, &e, fr, depth_bound, budget) {
        Err(Error::ResourceExhausted { .. }) if lattice => bounds(f, &e, fr, depth_bound, budget),
        Err(Error::ResourceExhausted { .. }) if existential => trees(f, &e, fr, depth_bound, budget),
        other => other,
    }
}

fn exhaustive(
    f: &Formula,
    e: &ExampleSet,
    fr: &Fragment,
    depth: usize,
    budget: &Budget,
) -> Result<VerifyReport> {
    let universe = Universe::types(&fr.props, depth, false, budget)?;
    let cap = budget
        .max_formulas
        .min(EXHAUSTIVE_CLASS_CAP)
        .min(EXHAUSTIVE_BIT_CAP / universe.len().max(1));
    let catalog = FormulaCatalog::build(fr, depth, universe.model(), &Budget::new(budget.max_models, cap))?;
    let pos: Vec<usize> = e.positive.iter().map(|m| locate(&universe, m, depth)).collect();
    let neg: Vec<usize> = e.negative.iter().map(|m| locate(&universe, m, depth)).collect();
    let target = eval(universe.model(), f)?;
    let mut order: Vec<usize> = (0..universe.len()).collect();
    order.sort_by_key(|&i| (universe.size_of(i), i));

    let mut competitors = Vec::new();
    let mut found: Vec<(usize, Formula)> = Vec::new();
    for id in 0..catalog.len() {
        let t = catalog.truth(id);
        if *t == target || !pos.iter().all(|&w| t.contains(w)) || neg.iter().any(|&w| t.contains(w)) {
            continue;
        }
        found.push((id, catalog.formula(id)));
    }
    found.sort_by_cached_key(|(_, g)| (g.modal_depth(), g.size(), g.clone()));
    for (id, g) in found {
        let t = catalog.truth(id);
        let w = order
            .iter()
            .copied()
            .find(|&w| t.contains(w) != target.contains(w))
            .expect("distinct truth vectors differ somewhere");
        competitors.push(Competitor {
            formula: g.render(),
            trace: trace(&g, e)?,
            distinguishing_model: Some(ModelFile::from(&universe.pointed(w).widen(&e.props)?)),
        });
    }
    Ok(VerifyReport {
        method: Method::Exhaustive,
        depth_bound: depth,
        classes: catalog.len(),
        competitors,
    })
}

/// Classes of a `◇,∧` fragment are core trees, and a tree formula holds at a
/// tree model exactly when it maps into it.
fn trees(f: &Formula, e: &ExampleSet, fr: &Fragment, depth: usize, budget: &Budget) -> Result<VerifyReport> {
    let classes = core_classes(&fr.props, depth, fr.has(Connective::Top), budget)?;
    let target = Tree::of(f)?;
    let mut competitors = Vec::new();
    for t in &classes {
        let (down, up) = (t.maps_into(&target), target.maps_into(t));
        if down && up {
            continue;
        }
        let g = t.to_formula();
        if !fits(&g, e)? {
            continue;
        }
        let witness = if down { t } else { &target };
        competitors.push(Competitor {
            formula: g.render(),
            trace: trace(&g, e)?,
            distinguishing_model: Some(ModelFile::from(&witness.to_model(&fr.props)?.widen(&e.props)?)),
        });
    }
    Ok(VerifyReport {
        method: Method::Trees,
        depth_bound: depth,
        classes: classes.len(),
        competitors,
    })
}

/// The type of `truncate(m, depth)` in a type universe of that depth,
/// reading only the universe's propositions.
fn locate(universe: &Universe, m: &PointedModel, depth: usize) -> usize {
    let u = universe.model();
    let mut index: HashMap<(u64, Vec<usize>), usize> = HashMap::new();
    for w in 0..u.len() {
        index.insert((u.valuation(w), u.successors(w).to_vec()), w);
    }
    let mapping: Vec<(usize, usize)> = u
        .props()
        .iter()
        .enumerate()
        .filter_map(|(i, p)| m.props().index_of(p).map(|j| (i, j)))
        .collect();
    let project = |v: u64| mapping.iter().fold(0u64, |acc, &(i, j)| acc | ((v >> j & 1) << i));
    let mm = m.model();
    // types[k][w]: type of world w cut at depth k
    let mut prev: Vec<usize> = Vec::new();
    for k in 0..=depth {
        let cur: Vec<usize> = (0..mm.len())
            .map(|w| {
                let mut kids: Vec<usize> = if k == 0 {
                    Vec::new()
                } else {
                    mm.successors(w).iter().map(|&x| prev[x]).collect()
                };
                kids.sort_unstable();
                kids.dedup();
                index[&(project(mm.valuation(w)), kids)]
            })
            .collect();
        prev = cur;
    }
    prev[m.point()]
}

fn literals_true(fr: &Fragment, m: &PointedModel, w: usize, truth: bool) -> Vec<Formula> {
    let mut out = Vec::new();
    for lit in fr.literals() {
        let holds = match &lit {
            Formula::Atom(p) => m.props().index_of(p).is_some_and(|i| m.model().holds(w, i)),
            Formula::NegAtom(p) => !m.props().index_of(p).is_some_and(|i| m.model().holds(w, i)),
            _ => unreachable!(),
        };
        if holds == truth {
            out.push(lit);
        }
    }
    out
}

/// Least and greatest fitting formulas of the lattice of fragment formulas
/// of bounded depth.
struct Bounds<'a> {
    fr: &'a Fragment,
    bottom: Vec<Option<Formula>>,
    top: Vec<Option<Formula>>,
}

impl<'a> Bounds<'a> {
    fn new(fr: &'a Fragment, depth: usize) -> Self {
        let mut b = Bounds {
            fr,
            bottom: Vec::new(),
            top: Vec::new(),
        };
        for k in 0..=depth {
            let lits = fr.literals();
            let mut lo: Vec<Formula> = lits.clone();
            let mut hi: Vec<Formula> = lits;
            if fr.has(Connective::Top) {
                lo.push(Formula::Top);
                hi.push(Formula::Top);
            }
            if fr.has(Connective::Bot) {
                lo.push(Formula::Bot);
                hi.push(Formula::Bot);
            }
            if k > 0 {
                for (c, wrap) in [(Connective::Dia, Formula::dia as fn(Formula) -> Formula), (Connective::Box, Formula::boxed)] {
                    if fr.has(c) {
                        if let Some(x) = b.bottom[k - 1].clone() {
                            lo.push(wrap(x));
                        }
                        if let Some(x) = b.top[k - 1].clone() {
                            hi.push(wrap(x));
                        }
                    }
                }
            }
            b.bottom.push(Formula::try_and(lo));
            b.top.push(Formula::try_or(hi));
        }
        b
    }

    /// Least level-`k` formula true at `w`.
    fn chi(&self, m: &PointedModel, w: usize, k: usize) -> Option<Formula> {
        let mut parts = literals_true(self.fr, m, w, true);
        if self.fr.has(Connective::Top) {
            parts.push(Formula::Top);
        }
        if k > 0 {
            let succ = m.model().successors(w);
            let kids: Vec<Option<Formula>> = succ.iter().map(|&u| self.chi(m, u, k - 1)).collect();
            if self.fr.has(Connective::Dia) {
                parts.extend(kids.iter().flatten().cloned().map(Formula::dia));
            }
            if self.fr.has(Connective::Box) {
                if succ.is_empty() {
                    parts.extend(self.bottom[k - 1].clone().map(Formula::boxed));
                } else if kids.iter().all(Option::is_some) {
                    parts.push(Formula::boxed(Formula::or(kids.into_iter().flatten())));
                }
            }
        }
        Formula::try_and(parts)
    }

    /// Greatest level-`k` formula false at `w`.
    fn delta(&self, m: &PointedModel, w: usize, k: usize) -> Option<Formula> {
        let mut parts = literals_true(self.fr, m, w, false);
        if self.fr.has(Connective::Bot) {
            parts.push(Formula::Bot);
        }
        if k > 0 {
            let succ = m.model().successors(w);
            let kids: Vec<Option<Formula>> = succ.iter().map(|&u| self.delta(m, u, k - 1)).collect();
            if self.fr.has(Connective::Dia) {
                if succ.is_empty() {
                    parts.extend(self.top[k - 1].clone().map(Formula::dia));
                } else if kids.iter().all(Option::is_some) {
                    parts.push(Formula::dia(Formula::and(kids.iter().flatten().cloned())));
                }
            }
            if self.fr.has(Connective::Box) {
                parts.extend(kids.into_iter().flatten().map(Formula::boxed));
            }
        }
        Formula::try_or(parts)
    }
}

fn bounds(f: &Formula, e: &ExampleSet, fr: &Fragment, depth: usize, budget: &Budget) -> Result<VerifyReport> {
    let b = Bounds::new(fr, depth);
    let least = if e.positive.is_empty() {
        b.bottom[depth].clone()
    } else {
        let chis: Option<Vec<Formula>> = e.positive.iter().map(|m| b.chi(m, m.point(), depth)).collect();
        chis.and_then(Formula::try_or)
    };
    let greatest = if e.negative.is_empty() {
        b.top[depth].clone()
    } else {
        let deltas: Option<Vec<Formula>> = e.negative.iter().map(|m| b.delta(m, m.point(), depth)).collect();
        deltas.and_then(Formula::try_and)
    };
    let mut competitors = Vec::new();
    for g in [least, greatest].into_iter().flatten() {
        if competitors.iter().any(|c: &Competitor| c.formula == g.render()) {
            continue;
        }
        if let Some(m) = find_distinguishing_model(&g, f, &e.props, budget)? {
            competitors.push(Competitor {
                formula: g.render(),
                trace: trace(&g, e)?,
                distinguishing_model: Some(ModelFile::from(&m)),
            });
        }
    }
    Ok(VerifyReport {
        method: Method::Bounds,
        depth_bound: depth,
        classes: 0,
        competitors,
    })
}

/// A smallest tree model of depth at most `max(d(f), d(g))` on which `f` and
/// `g` disagree, or `None` when they are equivalent.
///
/// The search ranges over the propositions occurring in `f` or `g`; the model
/// is returned over `props`, with every other proposition false.
pub fn find_distinguishing_model(
    f: &Formula,
    g: &Formula,
    props: &PropSet,
    budget: &Budget,
) -> Result<Option<PointedModel>> {
    let mut vars = f.variables();
    vars.extend(g.variables());
    if let Some(p) = vars.iter().find(|p| !props.contains(p)) {
        return Err(Error::UnknownProposition(p.clone()));
    }
    let sub = PropSet::new(vars)?;
    let depth = f.modal_depth().max(g.modal_depth());
    let fits_budget = crate::kripke::type_count(sub.len(), depth)
        .is_some_and(|n| n <= budget.max_models as u128);
    if fits_budget {
        let universe = Universe::types(&sub, depth, false, budget)?;
        let (tf, tg) = (eval(universe.model(), f)?, eval(universe.model(), g)?);
        let best = (0..universe.len())
            .filter(|&i| tf.contains(i) != tg.contains(i))
            .min_by_key(|&i| (universe.size_of(i), i));
        return best.map(|i| universe.pointed(i).widen(props)).transpose();
    }
    let mut trees = SizedTrees::new(&sub, depth, budget);
    while !trees.is_complete() {
        let range = trees.grow()?;
        if range.is_empty() {
            continue;
        }
        let (tf, tg) = (eval(trees.model(), f)?, eval(trees.model(), g)?);
        if let Some(w) = range.clone().find(|&w| tf.contains(w) != tg.contains(w)) {
            return Ok(Some(trees.model().reachable_from(w).widen(props)?));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::{chain, single_point};
    use crate::semantics::equivalent;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn props(names: &[&str]) -> PropSet {
        PropSet::new(names.iter().copied()).unwrap()
    }

    #[test]
    fn conjunction_set_is_unique_at_depth_zero() {
        let pqr = props(&["p", "q", "r"]);
        let e = ExampleSet::new(
            pqr.clone(),
            vec![single_point(&pqr, ["p", "q"]).unwrap()],
            vec![single_point(&pqr, ["p"]).unwrap(), single_point(&pqr, ["q"]).unwrap()],
        )
        .unwrap();
        let fr = Fragment::parse("pos:&", pqr).unwrap();
        let r = verify_characterization(&f("p & q"), &e, &fr, 0, &Budget::default()).unwrap();
        assert!(r.unique());
    }

    #[test]
    fn refuter_is_a_competitor() {
        let e0 = PropSet::empty();
        let e = ExampleSet::new(
            e0.clone(),
            vec![single_point(&e0, Vec::<&str>::new()).unwrap()],
            vec![chain(&e0, &[0, 0])],
        )
        .unwrap();
        let fr = Fragment::full(e0.clone());
        let b = Budget::default();
        let r = verify_characterization(&f("[]F"), &e, &fr, 3, &b).unwrap();
        assert_eq!(r.method, Method::Exhaustive);
        let refuter = f("[][][]F & <><>T | []F");
        assert!(r
            .competitors
            .iter()
            .any(|c| equivalent(&parse_formula(&c.formula).unwrap(), &refuter, &e0, &b).unwrap()));
        for c in &r.competitors {
            let g = parse_formula(&c.formula).unwrap();
            assert!(fits(&g, &e).unwrap());
            assert!(!equivalent(&g, &f("[]F"), &e0, &b).unwrap());
        }
    }

    #[test]
    fn disjunction_competitor() {
        let pq = props(&["p", "q"]);
        let e = ExampleSet::new(pq.clone(), vec![single_point(&pq, ["p"]).unwrap()], vec![]).unwrap();
        let fr = Fragment::parse("pos:&,|", pq).unwrap();
        let r = verify_characterization(&f("p"), &e, &fr, 0, &Budget::default()).unwrap();
        assert!(r.competitors.iter().any(|c| c.formula == "p | q"));
    }

    #[test]
    fn bounds_route_agrees_with_exhaustive() {
        let p = props(&["p"]);
        let fr = Fragment::parse("pos:&,|,<>,[]", p.clone()).unwrap();
        let e = ExampleSet::new(p.clone(), vec![single_point(&p, ["p"]).unwrap()], vec![single_point(&p, Vec::<&str>::new()).unwrap()]).unwrap();
        let b = Budget::default();
        let ex = exhaustive(&f("p"), &e, &fr, 1, &b).unwrap();
        let bo = bounds(&f("p"), &e, &fr, 1, &b).unwrap();
        assert_eq!(ex.unique(), bo.unique());
        assert!(!ex.unique());
    }

    #[test]
    fn distinguishing_examples() {
        let b = Budget::default();
        let e0 = PropSet::empty();
        let m = find_distinguishing_model(&f("[]F"), &f("[][]F & <>T | []F"), &e0, &b).unwrap().unwrap();
        assert_eq!(m, chain(&e0, &[0, 0]));
        assert!(find_distinguishing_model(&f("<>p"), &f("<>p"), &props(&["p"]), &b).unwrap().is_none());
        let pq = props(&["p", "q"]);
        let m = find_distinguishing_model(&f("p"), &f("p | q"), &pq, &b).unwrap().unwrap();
        assert_eq!(m, single_point(&pq, ["q"]).unwrap());
        assert!(find_distinguishing_model(&f("z"), &f("p"), &pq, &b).is_err());
    }

    #[test]
    fn lazy_search_finds_deep_witnesses() {
        let b = Budget::default();
        let e0 = PropSet::empty();
        let phi = f("[][][][][][][]F & <><><><><><>T | []F");
        let m = find_distinguishing_model(&phi, &f("[]F"), &e0, &b).unwrap().unwrap();
        assert_eq!(m, chain(&e0, &[0; 7]));
        let tight = Budget::new(50, 50);
        assert!(matches!(
            find_distinguishing_model(&f("[][][][][][]p"), &f("[][][][][][](p | p)"), &props(&["p"]), &tight),
            Err(Error::ResourceExhausted { .. })
        ));
    }
}
