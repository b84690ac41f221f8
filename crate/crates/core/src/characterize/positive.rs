use std::collections::BTreeMap;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::kripke::{PointedModel, Universe};
use crate::semantics::eval;
use crate::simulation::{greatest_relation, SimKind};
use crate::syntax::{Connective, Formula, Fragment, Polarity};
use crate::verify::verify_characterization;

use super::{check_duality, require_connectives, require_member, ExampleSet};

/// Examples for a formula of `L⁺_{□,◇,∧,∨}`: the weak-simulation-minimal
/// models and maximal non-models among the grafted types of depth `d(f)`.
///
/// The result is checked with [`check_duality`] on that universe and with
/// [`verify_characterization`] at depth `d(f) + 1`; a rejection is an error.
pub fn characterize_positive(f: &Formula, fr: &Fragment, budget: &Budget) -> Result<ExampleSet> {
    if fr.polarity != Polarity::Positive {
        return Err(Error::UnsupportedFragment {
            op: "characterize_positive",
            reason: format!("{} is not a positive fragment", fr.spec_string()),
        });
    }
    require_connectives(
        fr,
        &[Connective::Box, Connective::Dia, Connective::And, Connective::Or],
        "characterize_positive",
    )?;
    require_member(f, fr)?;
    let d = f.modal_depth();
    let universe = Universe::types(&fr.props, d, true, budget)?;
    let rel = greatest_relation(SimKind::WeakSimulation, universe.model(), universe.model(), budget)?;
    let truth = eval(universe.model(), f)?;
    let (sat, unsat): (Vec<usize>, Vec<usize>) = (0..universe.model().len()).partition(|&w| truth.contains(w));

    // u ≤ v iff v weakly simulates u
    let le = |u: usize, v: usize| rel.contains(u, v);
    let positive = extremes(&universe, &sat, le);
    let negative = extremes(&universe, &unsat, |u, v| le(v, u));
    let e = ExampleSet::new(fr.props.clone(), positive, negative)?;

    let models = universe.to_models();
    let report = check_duality(f, &e, &models)?;
    if let Some(v) = report.violations.first() {
        return Err(Error::ConstructionRejected(format!(
            "duality fails for {f} at universe model {} ({:?} side)",
            v.model.to_json(),
            v.side
        )));
    }
    let report = verify_characterization(f, &e, fr, d + 1, budget)?;
    if let Some(c) = report.competitors.first() {
        return Err(Error::ConstructionRejected(format!(
            "{} also fits the examples for {f}",
            c.formula
        )));
    }
    Ok(e)
}

/// Members of `set` with nothing strictly `below` them in `set`, one per
/// mutual class, each the smallest by (world count, canonical JSON).
fn extremes(
    universe: &Universe,
    set: &[usize],
    below: impl Fn(usize, usize) -> bool,
) -> Vec<PointedModel> {
    let extreme: Vec<usize> = set
        .iter()
        .copied()
        .filter(|&u| !set.iter().any(|&v| below(v, u) && !below(u, v)))
        .collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &u in &extreme {
        match groups.iter_mut().find(|g| below(g[0], u) && below(u, g[0])) {
            Some(g) => g.push(u),
            None => groups.push(vec![u]),
        }
    }
    let mut out: Vec<PointedModel> = groups
        .into_iter()
        .map(|g| {
            g.into_iter()
                .map(|w| universe.model().reachable_from(w))
                .min_by_key(PointedModel::canonical_key)
                .expect("groups are non-empty")
        })
        .collect();
    out.sort_by_key(PointedModel::canonical_key);
    out
}

/// Characterization of a uniform formula: propositions mapped to
/// [`Polarity::Negative`] may only occur negated, all others only
/// positively. Negated literals are renamed to positive ones, the result is
/// characterized with [`characterize_positive`], and the renamed
/// propositions are complemented in the output.
pub fn characterize_uniform(
    f: &Formula,
    polarity_map: &BTreeMap<String, Polarity>,
    fr: &Fragment,
    budget: &Budget,
) -> Result<ExampleSet> {
    require_connectives(
        fr,
        &[Connective::Box, Connective::Dia, Connective::And, Connective::Or],
        "characterize_uniform",
    )?;
    let negative = |p: &str| polarity_map.get(p) == Some(&Polarity::Negative);
    for p in f.variables() {
        if !fr.props.contains(&p) {
            return Err(Error::UnknownProposition(p));
        }
    }
    let renamed = f.map_literals(&mut |lit| match lit {
        Formula::NegAtom(p) if negative(p) => Ok(Formula::atom(p.clone())),
        Formula::Atom(p) if !negative(p) => Ok(lit.clone()),
        Formula::Atom(p) => Err(Error::PolarityViolation(format!("`{p}` must occur negated"))),
        Formula::NegAtom(p) => Err(Error::PolarityViolation(format!("`{p}` must occur positively"))),
        _ => unreachable!("map_literals only visits literals"),
    })?;
    let positive_fr = fr.with_polarity(Polarity::Positive);
    let e = characterize_positive(&renamed, &positive_fr, budget)?;
    let flip = fr.props.mask_of(fr.props.iter().filter(|p| negative(p)))?;
    Ok(ExampleSet {
        props: e.props,
        positive: e.positive.iter().map(|m| m.complement(flip)).collect(),
        negative: e.negative.iter().map(|m| m.complement(flip)).collect(),
    })
}
