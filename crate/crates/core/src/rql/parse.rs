use super::ast::{Clause, Connective, Operator, PhraseTerm, RqlQuery, SemanticLabel};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at byte {offset}: expected {expected}, found {found}")]
pub struct SyntaxError {
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Eq,
    Amp,
    Pipe,
    Comma,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(s) => format!("phrase {s:?}"),
            Tok::Eq => "`=`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Comma => "`,`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let mut out = Vec::new();
    let mut it = src.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        let single = match c {
            '=' => Some(Tok::Eq),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Pipe),
            ',' => Some(Tok::Comma),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            _ => None,
        };
        if let Some(t) = single {
            it.next();
            out.push((t, pos));
            continue;
        }
        if c == '"' {
            it.next();
            let mut s = String::new();
            let mut closed = false;
            while let Some((_, d)) = it.next() {
                match d {
                    '\\' => match it.next() {
                        Some((_, e)) => s.push(e),
                        None => break,
                    },
                    '"' => {
                        closed = true;
                        break;
                    }
                    _ => s.push(d),
                }
            }
            if !closed {
                return Err(SyntaxError {
                    offset: src.len(),
                    expected: "closing `\"`".into(),
                    found: "end of input".into(),
                });
            }
            out.push((Tok::Str(s), pos));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut end = pos;
            while let Some(&(p, d)) = it.peek() {
                if d.is_ascii_alphanumeric() || d == '_' || d == '.' {
                    end = p + d.len_utf8();
                    it.next();
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(src[pos..end].to_string()), pos));
            continue;
        }
        return Err(SyntaxError {
            offset: pos,
            expected: "a token".into(),
            found: format!("`{c}`"),
        });
    }
    out.push((Tok::Eof, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    clauses: Vec<Clause>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, expected: &str) -> Result<T, SyntaxError> {
        Err(SyntaxError {
            offset: self.offset(),
            expected: expected.to_string(),
            found: self.peek().describe(),
        })
    }

    fn keyword(&self) -> Option<String> {
        match self.peek() {
            Tok::Ident(s) => Some(s.to_ascii_lowercase()),
            _ => None,
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), SyntaxError> {
        if self.keyword().as_deref() == Some(kw) {
            self.bump();
            Ok(())
        } else {
            self.err(&format!("`{kw}`"))
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), SyntaxError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(what)
        }
    }

    fn query(&mut self) -> Result<RqlQuery, SyntaxError> {
        self.expect_keyword("select")?;
        self.expect_keyword("x")?;
        self.expect_keyword("where")?;
        let tree = self.disjunction()?;
        if *self.peek() != Tok::Eof {
            return self.err("`&`, `|`, `and`, `or` or end of input");
        }
        Ok(RqlQuery {
            clauses: std::mem::take(&mut self.clauses),
            tree,
        })
    }

    fn at_or(&self) -> bool {
        *self.peek() == Tok::Pipe || self.keyword().as_deref() == Some("or")
    }

    fn at_and(&self) -> bool {
        matches!(self.peek(), Tok::Amp | Tok::Comma) || self.keyword().as_deref() == Some("and")
    }

    fn disjunction(&mut self) -> Result<Connective, SyntaxError> {
        let mut left = self.conjunction()?;
        while self.at_or() {
            self.bump();
            let right = self.conjunction()?;
            left = Connective::or(left, right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Connective, SyntaxError> {
        let mut left = self.factor()?;
        while self.at_and() {
            self.bump();
            let right = self.factor()?;
            left = Connective::and(left, right);
        }
        Ok(left)
    }

    fn factor(&mut self) -> Result<Connective, SyntaxError> {
        if *self.peek() == Tok::LParen {
            self.bump();
            let inner = self.disjunction()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(inner);
        }
        let clause = self.clause()?;
        self.clauses.push(clause);
        Ok(Connective::Leaf(self.clauses.len() - 1))
    }

    fn clause(&mut self) -> Result<Clause, SyntaxError> {
        let label = match self.peek() {
            Tok::Ident(name) => match SemanticLabel::from_name(name) {
                Some(l) => l,
                None => return self.err("a label (x, x.type, x.attribute, x.location, user.attribute, user.location)"),
            },
            _ => return self.err("a label (x, x.type, x.attribute, x.location, user.attribute, user.location) or `(`"),
        };
        self.bump();
        let mut operators = Vec::new();
        loop {
            let op = match self.keyword().as_deref() {
                Some("not") => Operator::Not,
                Some("pref") => Operator::Pref,
                Some("similar") => Operator::Similar,
                Some("near") => Operator::Near,
                _ => break,
            };
            self.bump();
            operators.push(op);
        }
        let phrases = match self.peek().clone() {
            Tok::Eq => {
                self.bump();
                vec![self.phrase()?]
            }
            Tok::Str(s) if !operators.is_empty() => {
                self.bump();
                vec![s]
            }
            Tok::Ident(k) if k.eq_ignore_ascii_case("in") => {
                self.bump();
                let (close, op) = match self.peek() {
                    Tok::LBrace => (Tok::RBrace, Operator::InSet),
                    Tok::LBracket => (Tok::RBracket, Operator::InRange),
                    _ => return self.err("`{` or `[`"),
                };
                self.bump();
                let mut items = vec![self.phrase()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    items.push(self.phrase()?);
                }
                if op == Operator::InRange && items.len() != 2 && *self.peek() == close {
                    return self.err("exactly two range endpoints");
                }
                let what = if close == Tok::RBrace {
                    "`,` or `}`"
                } else {
                    "`,` or `]`"
                };
                self.expect(close, what)?;
                operators.push(op);
                items
            }
            _ => {
                let hint = if operators.is_empty() {
                    "`=`, `in`, or an operator (NOT, PREF, SIMILAR, NEAR)"
                } else {
                    "`=`, `in`, an operator, or a quoted phrase"
                };
                return self.err(hint);
            }
        };
        Ok(Clause {
            label,
            operators,
            terminal: PhraseTerm { phrases },
        })
    }

    fn phrase(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.err("a quoted phrase"),
        }
    }
}

/// Parses the concrete RQL syntax, e.g.
/// `select x where x.type="hotel" & x.attribute NOT = "noisy"`.
pub fn parse_rql(text: &str) -> Result<RqlQuery, SyntaxError> {
    let toks = lex(text)?;
    Parser {
        toks,
        pos: 0,
        clauses: Vec::new(),
    }
    .query()
}
