//! Exact learning of fragment formulas from membership queries.
//!
//! The stdio protocol is line based: the learner writes
//! `QUERY <model-json>`, the teacher answers `TRUE` or `FALSE`, and the
//! learner finishes with `ANSWER <formula>`.

use std::io::{BufRead, Write};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::kripke::{ModelFile, PointedModel, Universe};
use crate::semantics::satisfies;
use crate::syntax::{parse_formula, Formula, FormulaCatalog, Fragment};

/// Answers "does the hidden formula hold here?".
pub trait MembershipOracle {
    fn ask(&mut self, m: &PointedModel) -> Result<bool>;
    /// Queries answered so far.
    fn queries(&self) -> usize;
}

/// Oracle backed by a known formula.
#[derive(Clone, Debug)]
pub struct SimulatedOracle {
    hidden: Formula,
    queries: usize,
}

pub fn simulate_oracle(hidden: Formula) -> SimulatedOracle {
    SimulatedOracle { hidden, queries: 0 }
}

impl MembershipOracle for SimulatedOracle {
    fn ask(&mut self, m: &PointedModel) -> Result<bool> {
        self.queries += 1;
        satisfies(m, &self.hidden)
    }

    fn queries(&self) -> usize {
        self.queries
    }
}

/// Oracle speaking the stdio protocol over a reader/writer pair.
pub struct StdioOracle<R, W> {
    reader: R,
    writer: W,
    queries: usize,
}

impl<R: BufRead, W: Write> StdioOracle<R, W> {
    pub fn new(reader: R, writer: W) -> Self {
        StdioOracle {
            reader,
            writer,
            queries: 0,
        }
    }

    /// Sends the final `ANSWER` line.
    pub fn finish(&mut self, answer: &Formula) -> Result<()> {
        writeln!(self.writer, "ANSWER {answer}")?;
        self.writer.flush()?;
        Ok(())
    }
}

impl<R: BufRead, W: Write> MembershipOracle for StdioOracle<R, W> {
    fn ask(&mut self, m: &PointedModel) -> Result<bool> {
        writeln!(self.writer, "QUERY {}", m.to_json())?;
        self.writer.flush()?;
        let mut line = String::new();
        if self.reader.read_line(&mut line)? == 0 {
            return Err(Error::Protocol("teacher closed the stream".into()));
        }
        self.queries += 1;
        match line.trim() {
            "TRUE" => Ok(true),
            "FALSE" => Ok(false),
            other => Err(Error::Protocol(format!("expected TRUE or FALSE, got `{other}`"))),
        }
    }

    fn queries(&self) -> usize {
        self.queries
    }
}

/// Teacher side of the stdio protocol for a known formula. Returns the
/// learner's answer, or `None` if the stream ended without one.
pub fn serve_teacher<R: BufRead, W: Write>(hidden: &Formula, reader: R, mut writer: W) -> Result<Option<Formula>> {
    for line in reader.lines() {
        let line = line?;
        let line = line.trim();
        if let Some(json) = line.strip_prefix("QUERY ") {
            let file: ModelFile = serde_json::from_str(json)?;
            let m = file.into_model(None)?;
            let props = m.props().union(&crate::kripke::PropSet::new(hidden.variables())?)?;
            let answer = satisfies(&m.widen(&props)?, hidden)?;
            writeln!(writer, "{}", if answer { "TRUE" } else { "FALSE" })?;
            writer.flush()?;
        } else if let Some(text) = line.strip_prefix("ANSWER ") {
            return Ok(Some(parse_formula(text).map_err(Error::Parse)?));
        } else if !line.is_empty() {
            return Err(Error::Protocol(format!("unexpected line `{line}`")));
        }
    }
    Ok(None)
}

/// Version-space learner: keeps the live classes of fragment formulas of
/// depth at most `depth_bound` and queries the first grafted type on which
/// they disagree until one class remains.
pub fn learn_version_space(
    fr: &Fragment,
    depth_bound: usize,
    oracle: &mut dyn MembershipOracle,
    budget: &Budget,
) -> Result<Formula> {
    let universe = Universe::types(&fr.props, depth_bound, true, budget)?;
    let catalog = FormulaCatalog::build(fr, depth_bound, universe.model(), budget)?;
    let mut live: Vec<usize> = (0..catalog.len()).collect();
    if live.is_empty() {
        return Err(Error::Precondition(format!("{fr} has no formulas of depth {depth_bound}")));
    }
    let mut next = 0;
    while live.len() > 1 {
        let w = (next..universe.len())
            .find(|&w| {
                let first = catalog.truth(live[0]).contains(w);
                live.iter().any(|&c| catalog.truth(c).contains(w) != first)
            })
            .expect("distinct classes differ on the universe");
        let answer = oracle.ask(&universe.pointed(w))?;
        live.retain(|&c| catalog.truth(c).contains(w) == answer);
        if live.is_empty() {
            return Err(Error::OracleInconsistent);
        }
        next = w + 1;
    }
    Ok(catalog.formula(live[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::{single_point, PropSet};
    use crate::semantics::equivalent;
    use std::io::Cursor;

    fn fr(spec: &str, names: &[&str]) -> Fragment {
        Fragment::parse(spec, PropSet::new(names.iter().copied()).unwrap()).unwrap()
    }

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn learns_diamond_p() {
        let b = Budget::default();
        let fragment = fr("pos:<>,&", &["p"]);
        let mut oracle = simulate_oracle(f("<>p"));
        let g = learn_version_space(&fragment, 1, &mut oracle, &b).unwrap();
        assert!(equivalent(&g, &f("<>p"), &fragment.props, &b).unwrap());
        assert!(oracle.queries() <= 2);
    }

    #[test]
    fn single_class_needs_no_queries() {
        let mut oracle = simulate_oracle(f("p"));
        let g = learn_version_space(&fr("pos:&", &["p"]), 0, &mut oracle, &Budget::default()).unwrap();
        assert_eq!(g, f("p"));
        assert_eq!(oracle.queries(), 0);
    }

    #[test]
    fn simulated_oracle_counts() {
        let pq = PropSet::new(["p", "q"]).unwrap();
        let mut o = simulate_oracle(f("p & q"));
        assert!(o.ask(&single_point(&pq, ["p", "q"]).unwrap()).unwrap());
        assert!(!o.ask(&single_point(&pq, ["p"]).unwrap()).unwrap());
        assert_eq!(o.queries(), 2);
    }

    #[test]
    fn stdio_round_trip() {
        let hidden = f("p & <>q");
        let pq = PropSet::new(["p", "q"]).unwrap();
        let m = single_point(&pq, ["p", "q"]).unwrap();
        let input = format!("QUERY {}\nANSWER p & <>q\n", m.to_json());
        let mut out = Vec::new();
        let ans = serve_teacher(&hidden, Cursor::new(input), &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "FALSE\n");
        assert_eq!(ans, Some(hidden));

        let mut oracle = StdioOracle::new(Cursor::new("TRUE\nmaybe\n"), Vec::new());
        assert!(oracle.ask(&m).unwrap());
        assert!(matches!(oracle.ask(&m), Err(Error::Protocol(_))));
        assert!(matches!(oracle.ask(&m), Err(Error::Protocol(_))));
    }
}
