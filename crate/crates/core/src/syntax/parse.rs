use thiserror::Error;

use super::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at column {}: {message}", .position + 1)]
pub struct ParseError {
    /// Zero-based byte offset into the input.
    pub position: usize,
    pub message: String,
}

/// Parses the ASCII grammar: atoms `[a-z][a-z0-9_]*`, `~atom`, `T`, `F`,
/// `<>`, `[]`, `&`, `|` and parentheses. Precedence: unary > `&` > `|`.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let f = parser.disjunction()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseError {
        ParseError {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut ops = vec![self.conjunction()?];
        while self.eat("|") {
            ops.push(self.conjunction()?);
        }
        Ok(Formula::or(ops))
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut ops = vec![self.unary()?];
        while self.eat("&") {
            ops.push(self.unary()?);
        }
        Ok(Formula::and(ops))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'<') => {
                if !self.eat("<>") {
                    return Err(self.error("expected `<>`"));
                }
                Ok(Formula::dia(self.unary()?))
            }
            Some(b'[') => {
                if !self.eat("[]") {
                    return Err(self.error("expected `[]`"));
                }
                Ok(Formula::boxed(self.unary()?))
            }
            Some(b'~') => {
                self.pos += 1;
                match self.peek() {
                    Some(c) if c.is_ascii_lowercase() => Ok(Formula::NegAtom(self.atom_name())),
                    _ => Err(self.error("negation only on atoms")),
                }
            }
            Some(b'(') => {
                self.pos += 1;
                let f = self.disjunction()?;
                if !self.eat(")") {
                    return Err(self.error("expected `)`"));
                }
                Ok(f)
            }
            Some(b'T') => {
                self.pos += 1;
                Ok(Formula::Top)
            }
            Some(b'F') => {
                self.pos += 1;
                Ok(Formula::Bot)
            }
            Some(c) if c.is_ascii_lowercase() => Ok(Formula::Atom(self.atom_name())),
            Some(_) => Err(self.error("expected a formula")),
        }
    }

    fn atom_name(&mut self) -> String {
        let start = self.pos;
        self.pos += 1;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_lowercase()
                || self.src[self.pos].is_ascii_digit()
                || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grammar_examples() {
        assert_eq!(
            parse_formula("p & <>q").unwrap(),
            Formula::And(vec![Formula::atom("p"), Formula::dia(Formula::atom("q"))])
        );
        assert_eq!(parse_formula("[]F").unwrap(), Formula::boxed(Formula::Bot));
        let err = parse_formula("~<>p").unwrap_err();
        assert_eq!(err.message, "negation only on atoms");
        assert_eq!(err.position, 1);
    }

    #[test]
    fn precedence_and_errors() {
        let f = parse_formula("p | q & r").unwrap();
        assert_eq!(
            f,
            Formula::or([Formula::atom("p"), Formula::and([Formula::atom("q"), Formula::atom("r")])])
        );
        let g = parse_formula("<>p & q").unwrap();
        assert_eq!(g, Formula::and([Formula::dia(Formula::atom("p")), Formula::atom("q")]));
        assert!(parse_formula("~(p)").is_err());
        assert!(parse_formula("~T").is_err());
        assert!(parse_formula("p &").is_err());
        assert!(parse_formula("(p").is_err());
        assert!(parse_formula("p q").is_err());
        assert!(parse_formula("P").is_err());
        assert!(parse_formula("<p").is_err());
        assert_eq!(parse_formula(" ~x_1 ").unwrap(), Formula::neg_atom("x_1"));
    }

    pub(crate) fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            prop::sample::select(vec!["p", "q", "r1"]).prop_map(Formula::atom),
            prop::sample::select(vec!["p", "q"]).prop_map(Formula::neg_atom),
            Just(Formula::Top),
            Just(Formula::Bot),
        ];
        leaf.prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::dia),
                inner.clone().prop_map(Formula::boxed),
                prop::collection::vec(inner.clone(), 1..4).prop_map(Formula::and),
                prop::collection::vec(inner, 1..4).prop_map(Formula::or),
            ]
        })
    }

    proptest! {
        #[test]
        fn parse_inverts_render(f in arb_formula()) {
            let text = f.render();
            prop_assert_eq!(parse_formula(&text).unwrap(), f.clone());
            // render . parse is the identity on canonical strings
            prop_assert_eq!(parse_formula(&text).unwrap().render(), text);
        }
    }
}
