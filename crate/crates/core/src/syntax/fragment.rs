use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kripke::PropSet;

use super::Formula;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Connective {
    And,
    Or,
    Dia,
    Box,
    Top,
    Bot,
}

impl Connective {
    pub const ALL: [Connective; 6] = [
        Connective::And,
        Connective::Or,
        Connective::Dia,
        Connective::Box,
        Connective::Top,
        Connective::Bot,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Connective::And => "&",
            Connective::Or => "|",
            Connective::Dia => "<>",
            Connective::Box => "[]",
            Connective::Top => "T",
            Connective::Bot => "F",
        }
    }

    fn from_token(tok: &str) -> Option<Self> {
        Connective::ALL.into_iter().find(|c| c.token() == tok)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Positive,
    Negative,
    Unrestricted,
}

impl Polarity {
    fn prefix(self) -> &'static str {
        match self {
            Polarity::Positive => "pos",
            Polarity::Negative => "neg",
            Polarity::Unrestricted => "any",
        }
    }
}

/// A modal language `L_C[Prop]`, optionally restricted to its positive or
/// negative formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fragment {
    pub connectives: BTreeSet<Connective>,
    pub polarity: Polarity,
    pub props: PropSet,
}

impl Fragment {
    pub fn new(
        connectives: impl IntoIterator<Item = Connective>,
        polarity: Polarity,
        props: PropSet,
    ) -> Self {
        Fragment {
            connectives: connectives.into_iter().collect(),
            polarity,
            props,
        }
    }

    /// Parses a spec string such as `pos:&,|,<>,[]`.
    pub fn parse(spec: &str, props: PropSet) -> Result<Self> {
        let (prefix, rest) = spec
            .split_once(':')
            .ok_or_else(|| Error::InvalidFragment(format!("missing polarity prefix in `{spec}`")))?;
        let polarity = match prefix.trim() {
            "pos" => Polarity::Positive,
            "neg" => Polarity::Negative,
            "any" => Polarity::Unrestricted,
            other => return Err(Error::InvalidFragment(format!("unknown polarity `{other}`"))),
        };
        let mut connectives = BTreeSet::new();
        for tok in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let c = Connective::from_token(tok)
                .ok_or_else(|| Error::InvalidFragment(format!("unknown connective `{tok}`")))?;
            connectives.insert(c);
        }
        Ok(Fragment {
            connectives,
            polarity,
            props,
        })
    }

    /// The full modal language over `props`.
    pub fn full(props: PropSet) -> Self {
        Fragment::new(Connective::ALL, Polarity::Unrestricted, props)
    }

    pub fn has(&self, c: Connective) -> bool {
        self.connectives.contains(&c)
    }

    pub fn spec_string(&self) -> String {
        let toks: Vec<_> = self.connectives.iter().map(|c| c.token()).collect();
        format!("{}:{}", self.polarity.prefix(), toks.join(","))
    }

    pub fn allows_positive_literals(&self) -> bool {
        self.polarity != Polarity::Negative
    }

    pub fn allows_negative_literals(&self) -> bool {
        self.polarity != Polarity::Positive
    }

    /// Literals of the fragment, in canonical order.
    pub fn literals(&self) -> Vec<Formula> {
        let mut out = Vec::new();
        for p in self.props.iter() {
            if self.allows_positive_literals() {
                out.push(Formula::atom(p));
            }
            if self.allows_negative_literals() {
                out.push(Formula::neg_atom(p));
            }
        }
        out
    }

    pub fn contains(&self, f: &Formula) -> bool {
        in_fragment(f, self)
    }

    pub fn with_polarity(&self, polarity: Polarity) -> Self {
        Fragment {
            polarity,
            ..self.clone()
        }
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {}", self.spec_string(), self.props)
    }
}

impl FromStr for Polarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pos" | "positive" => Ok(Polarity::Positive),
            "neg" | "negative" => Ok(Polarity::Negative),
            "any" | "unrestricted" => Ok(Polarity::Unrestricted),
            other => Err(Error::InvalidFragment(format!("unknown polarity `{other}`"))),
        }
    }
}

/// Membership of `f` in `fr`: connectives, literal polarity, and variables.
pub fn in_fragment(f: &Formula, fr: &Fragment) -> bool {
    if !f.connectives().is_subset(&fr.connectives) {
        return false;
    }
    if !fr.allows_negative_literals() && f.has_negative_literal() {
        return false;
    }
    if !fr.allows_positive_literals() && f.has_positive_literal() {
        return false;
    }
    f.variables().iter().all(|p| fr.props.contains(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn props(names: &[&str]) -> PropSet {
        PropSet::new(names.iter().copied()).unwrap()
    }

    #[test]
    fn membership_examples() {
        let conj = Fragment::parse("pos:&", props(&["p", "q", "r"])).unwrap();
        assert!(in_fragment(&parse_formula("p & q").unwrap(), &conj));

        let pos = Fragment::parse("pos:&,|,<>,[]", props(&["p"])).unwrap();
        assert!(!in_fragment(&parse_formula("~p").unwrap(), &pos));
        assert!(!in_fragment(&parse_formula("[]F").unwrap(), &pos));
        assert!(in_fragment(&parse_formula("[]p | <>p").unwrap(), &pos));

        let neg = Fragment::parse("neg:&", props(&["p"])).unwrap();
        assert!(in_fragment(&parse_formula("~p").unwrap(), &neg));
        assert!(!in_fragment(&parse_formula("p").unwrap(), &neg));

        // variables outside Prop
        assert!(!in_fragment(&parse_formula("q").unwrap(), &pos));
    }

    #[test]
    fn spec_string_round_trip() {
        let fr = Fragment::parse("pos:[],<>,|,&", props(&["p"])).unwrap();
        assert_eq!(fr.spec_string(), "pos:&,|,<>,[]");
        assert!(Fragment::parse("xx:&", props(&[])).is_err());
        assert!(Fragment::parse("pos:&,!", props(&[])).is_err());
        assert!(Fragment::parse("&,|", props(&[])).is_err());
    }
}
