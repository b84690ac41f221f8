//! Finite characterizations by examples: constructions, the duality check,
//! and refuters showing that `□⊥` has no finite characterization.

mod conj_diamond;
mod positive;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::kripke::{height, ExampleSetFile, ExtendedNat, ModelFile, PointedModel, PropSet};
use crate::semantics::{fits, satisfies};
use crate::simulation::weakly_simulates;
use crate::syntax::{in_fragment, Connective, Formula, Fragment, Polarity};
use crate::verify::find_distinguishing_model;

pub use conj_diamond::characterize_conj_diamond;
pub(crate) use conj_diamond::{core_classes, Tree};
pub use positive::{characterize_positive, characterize_uniform};

/// Labelled examples `(E⁺, E⁻)` over a common proposition set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExampleSet {
    pub props: PropSet,
    pub positive: Vec<PointedModel>,
    pub negative: Vec<PointedModel>,
}

impl ExampleSet {
    /// Models over a subset of `props` are widened to `props`.
    pub fn new(props: PropSet, positive: Vec<PointedModel>, negative: Vec<PointedModel>) -> Result<Self> {
        let widen = |ms: Vec<PointedModel>| -> Result<Vec<PointedModel>> {
            ms.iter().map(|m| m.widen(&props)).collect()
        };
        Ok(ExampleSet {
            positive: widen(positive)?,
            negative: widen(negative)?,
            props,
        })
    }

    pub fn widen(&self, props: &PropSet) -> Result<Self> {
        ExampleSet::new(props.clone(), self.positive.clone(), self.negative.clone())
    }

    pub fn from_file(file: ExampleSetFile) -> Result<Self> {
        let props = PropSet::new(file.props)?;
        let load = |ms: Vec<ModelFile>| -> Result<Vec<PointedModel>> {
            ms.into_iter().map(|m| m.into_model(Some(&props))).collect()
        };
        Ok(ExampleSet {
            positive: load(file.positive)?,
            negative: load(file.negative)?,
            props,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }

    pub fn to_file(&self) -> ExampleSetFile {
        ExampleSetFile {
            props: self.props.iter().map(String::from).collect(),
            positive: self.positive.iter().map(ModelFile::from).collect(),
            negative: self.negative.iter().map(ModelFile::from).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("example set serialization cannot fail")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// A model of the formula that weakly simulates no positive example.
    Positive,
    /// A non-model weakly simulated by no negative example.
    Negative,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityViolation {
    pub index: usize,
    pub model: PointedModel,
    pub side: Side,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DualityReport {
    pub violations: Vec<DualityViolation>,
}

impl DualityReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every universe model that breaks the duality contract: a model of `f`
/// above no positive example, or a non-model below no negative example.
pub fn check_duality(f: &Formula, e: &ExampleSet, universe: &[PointedModel]) -> Result<DualityReport> {
    let mut report = DualityReport::default();
    for (index, m) in universe.iter().enumerate() {
        let m = m.widen(&e.props)?;
        let violation = if satisfies(&m, f)? {
            let mut covered = false;
            for p in &e.positive {
                if weakly_simulates(&m, p)?.is_some() {
                    covered = true;
                    break;
                }
            }
            (!covered).then_some(Side::Positive)
        } else {
            let mut covered = false;
            for n in &e.negative {
                if weakly_simulates(n, &m)?.is_some() {
                    covered = true;
                    break;
                }
            }
            (!covered).then_some(Side::Negative)
        };
        if let Some(side) = violation {
            report.violations.push(DualityViolation { index, model: m, side });
        }
    }
    Ok(report)
}

/// 1 + the largest finite height among the negative examples (1 if none).
fn refuter_depth(e: &ExampleSet) -> usize {
    e.negative
        .iter()
        .filter_map(|m| match height(m) {
            ExtendedNat::Finite(h) => Some(h),
            ExtendedNat::Infinite => None,
        })
        .max()
        .map_or(1, |h| h + 1)
}

fn bot_box() -> Formula {
    Formula::boxed(Formula::Bot)
}

fn require_box_bot_fits(e: &ExampleSet) -> Result<()> {
    if !fits(&bot_box(), e)? {
        return Err(Error::Precondition("[]F does not fit the example set".into()));
    }
    Ok(())
}

fn postcheck(phi: &Formula, e: &ExampleSet, props: &PropSet, budget: &Budget) -> Result<()> {
    if !fits(phi, e)? {
        return Err(Error::ConstructionRejected(format!("{phi} does not fit the examples")));
    }
    if find_distinguishing_model(phi, &bot_box(), props, budget)?.is_none() {
        return Err(Error::ConstructionRejected(format!("{phi} is equivalent to []F")));
    }
    Ok(())
}

/// `(□^{n+1}⊥ ∧ ◇^n⊤) ∨ □⊥`: fits every finite set that `□⊥` fits, yet is
/// not equivalent to `□⊥`.
pub fn refute_full_language(e: &ExampleSet, budget: &Budget) -> Result<Formula> {
    require_box_bot_fits(e)?;
    let n = refuter_depth(e);
    let phi = Formula::or([
        Formula::and([Formula::box_n(n + 1, Formula::Bot), Formula::dia_n(n, Formula::Top)]),
        bot_box(),
    ]);
    postcheck(&phi, e, &e.props, budget)?;
    Ok(phi)
}

/// As [`refute_full_language`] with `⊤` replaced by the fresh variable, so the
/// result lies in `L⁺_{□,◇,∧,∨,⊥}`.
pub fn refute_bot_fragment(e: &ExampleSet, fresh: &str, budget: &Budget) -> Result<Formula> {
    require_box_bot_fits(e)?;
    if e.props.contains(fresh) {
        return Err(Error::Precondition(format!("`{fresh}` is not fresh")));
    }
    let n = refuter_depth(e);
    let phi = Formula::or([
        Formula::and([
            Formula::box_n(n + 1, Formula::Bot),
            Formula::dia_n(n, Formula::atom(fresh)),
        ]),
        bot_box(),
    ]);
    let props = PropSet::new(e.props.iter().chain([fresh]))?;
    let wide = e.widen(&props)?;
    postcheck(&phi, &wide, &props, budget)?;
    Ok(phi)
}

/// `L⁺_{□,◇,∧,∨,⊥}` over `props`.
pub fn bot_fragment(props: PropSet) -> Fragment {
    Fragment::new(
        [Connective::Box, Connective::Dia, Connective::And, Connective::Or, Connective::Bot],
        Polarity::Positive,
        props,
    )
}

pub(crate) fn require_member(f: &Formula, fr: &Fragment) -> Result<()> {
    if !in_fragment(f, fr) {
        return Err(Error::NotInFragment {
            formula: f.render(),
            fragment: fr.to_string(),
        });
    }
    Ok(())
}

pub(crate) fn require_connectives(fr: &Fragment, allowed: &[Connective], op: &'static str) -> Result<()> {
    let allowed: BTreeSet<Connective> = allowed.iter().copied().collect();
    if !fr.connectives.is_subset(&allowed) {
        return Err(Error::UnsupportedFragment {
            op,
            reason: format!("connectives of {} are not within {{{}}}", fr.spec_string(),
                allowed.iter().map(|c| c.token()).collect::<Vec<_>>().join(",")),
        });
    }
    Ok(())
}
