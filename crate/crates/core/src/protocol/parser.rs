use std::collections::{BTreeMap, HashSet};

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::ProtocolError;
use crate::diaphragm::Side;
use crate::linalg::Keep;
use crate::observers::Observer;
use crate::thermo::SecondLaw;

const HEADER_KEYWORDS: [&str; 5] = ["DIM", "TEMPERATURE", "PARTICLES", "VOLUME", "OBSERVER"];

struct Cursor<'a> {
    tokens: &'a [Token],
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn col(&self) -> usize {
        self.tokens[self.pos].col
    }

    fn advance(&mut self) -> &Tok {
        let tok = &self.tokens[self.pos].tok;
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: impl Into<String>) -> ProtocolError {
        ProtocolError::SyntaxError {
            line: self.line,
            col: self.col(),
            expected: expected.into(),
            found: self.peek().describe(),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ProtocolError> {
        match self.peek() {
            Tok::Ident(s) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => Err(self.error(what)),
        }
    }

    fn keyword(&mut self, options: &[&str]) -> Result<String, ProtocolError> {
        match self.peek() {
            Tok::Ident(s) if options.contains(&s.as_str()) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => Err(self.error(
                options
                    .iter()
                    .map(|o| format!("`{o}`"))
                    .collect::<Vec<_>>()
                    .join(" or "),
            )),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ProtocolError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            Err(self.error(tok.describe()))
        }
    }

    fn at_end(&self) -> bool {
        *self.peek() == Tok::End
    }

    fn end(&mut self) -> Result<(), ProtocolError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("end of line"))
        }
    }

    /// Optionally signed literal.
    fn number(&mut self, what: &str) -> Result<f64, ProtocolError> {
        let negative = if *self.peek() == Tok::Minus {
            self.advance();
            true
        } else {
            false
        };
        match *self.peek() {
            Tok::Number(x) => {
                self.advance();
                Ok(if negative { -x } else { x })
            }
            _ => Err(self.error(what)),
        }
    }

    fn positive(&mut self, what: &str) -> Result<f64, ProtocolError> {
        let col = self.col();
        let x = self.number(what)?;
        if x > 0.0 && x.is_finite() {
            Ok(x)
        } else {
            Err(ProtocolError::SyntaxError {
                line: self.line,
                col,
                expected: what.to_string(),
                found: format!("{x}"),
            })
        }
    }

    fn count(&mut self, what: &str) -> Result<usize, ProtocolError> {
        let col = self.col();
        match *self.peek() {
            Tok::Number(x) if x >= 1.0 && x.fract() == 0.0 && x <= u32::MAX as f64 => {
                self.advance();
                Ok(x as usize)
            }
            _ => Err(ProtocolError::SyntaxError {
                line: self.line,
                col,
                expected: what.to_string(),
                found: self.peek().describe(),
            }),
        }
    }

    fn idents_to_end(&mut self, what: &str) -> Result<Vec<String>, ProtocolError> {
        let mut out = Vec::new();
        while !self.at_end() {
            out.push(self.ident(what)?);
        }
        Ok(out)
    }

    /// `key=value` pairs to the end of the line.
    fn pairs<V>(
        &mut self,
        sep: Tok,
        what: &str,
        mut value: impl FnMut(&mut Self) -> Result<V, ProtocolError>,
    ) -> Result<Vec<(String, V)>, ProtocolError> {
        let mut out = Vec::new();
        while !self.at_end() {
            let key = self.ident(what)?;
            self.expect(sep.clone())?;
            out.push((key, value(self)?));
        }
        if out.is_empty() {
            return Err(self.error(what));
        }
        Ok(out)
    }

    fn expr(&mut self) -> Result<Expr, ProtocolError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ProtocolError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ProtocolError> {
        if *self.peek() == Tok::Minus {
            self.advance();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, ProtocolError> {
        match self.peek().clone() {
            Tok::Number(x) => {
                self.advance();
                Ok(Expr::Number(x))
            }
            Tok::Imag(x) => {
                self.advance();
                Ok(Expr::Imaginary(x))
            }
            Tok::LParen => {
                self.advance();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.advance();
                if *self.peek() != Tok::LParen {
                    return Ok(Expr::Name(name));
                }
                self.advance();
                let mut args = Vec::new();
                if *self.peek() != Tok::RParen {
                    loop {
                        args.push(self.expr()?);
                        if *self.peek() == Tok::Comma {
                            self.advance();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::RParen)?;
                Ok(Expr::Call(name, args))
            }
            _ => Err(self.error("an expression")),
        }
    }
}

#[derive(Default)]
struct HeaderDraft {
    dim: Option<DimSpec>,
    temperature: Option<f64>,
    particles: Option<f64>,
    volume: Option<f64>,
    observers: Vec<Observer>,
}

struct Parser {
    header: HeaderDraft,
    header_done: bool,
    statements: Vec<Statement>,
    names: HashSet<String>,
    seen_process_step: bool,
}

/// Parses a `.qg` script. LF and CRLF line endings are accepted.
pub fn parse(text: &str) -> Result<Protocol, ProtocolError> {
    let mut p = Parser {
        header: HeaderDraft::default(),
        header_done: false,
        statements: Vec::new(),
        names: HashSet::new(),
        seen_process_step: false,
    };
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let tokens = tokenize(raw.strip_suffix('\r').unwrap_or(raw), line)?;
        if tokens.len() == 1 {
            continue;
        }
        p.line(&tokens, line)?;
    }
    let dim = p
        .header
        .dim
        .ok_or(ProtocolError::HeaderMissing { line: last_line.max(1) })?;
    Ok(Protocol {
        header: Header {
            dim,
            temperature: p.header.temperature.unwrap_or(1.0),
            particles: p.header.particles.unwrap_or(1.0),
            volume: p.header.volume.unwrap_or(1.0),
            observers: p.header.observers,
        },
        statements: p.statements,
    })
}

impl Parser {
    fn line(&mut self, tokens: &[Token], line: usize) -> Result<(), ProtocolError> {
        let mut c = Cursor { tokens, pos: 0, line };
        let keyword = match c.peek() {
            Tok::Ident(k) => k.clone(),
            _ => return Err(c.error("a keyword")),
        };
        if HEADER_KEYWORDS.contains(&keyword.as_str()) {
            if self.header_done {
                return Err(c.error("a statement (header lines come first)"));
            }
            c.advance();
            return self.header_line(&keyword, &mut c);
        }
        if !self.header_done {
            if self.header.dim.is_none() {
                return Err(ProtocolError::HeaderMissing { line });
            }
            self.header_done = true;
        }
        c.advance();
        let kind = self.statement(&keyword, &mut c)?;
        c.end()?;
        if kind.is_process_step() {
            self.seen_process_step = true;
        }
        self.statements.push(Statement { line, kind });
        Ok(())
    }

    fn header_line(&mut self, keyword: &str, c: &mut Cursor) -> Result<(), ProtocolError> {
        let duplicate = |c: &Cursor| ProtocolError::DuplicateName {
            line: c.line,
            name: keyword.to_string(),
        };
        match keyword {
            "DIM" => {
                if self.header.dim.is_some() {
                    return Err(duplicate(c));
                }
                self.header.dim = Some(if matches!(c.peek(), Tok::Ident(s) if s == "classical") {
                    c.advance();
                    DimSpec::Classical
                } else {
                    DimSpec::Quantum(c.count("a dimension or `classical`")?)
                });
            }
            "TEMPERATURE" | "PARTICLES" | "VOLUME" => {
                let slot = match keyword {
                    "TEMPERATURE" => &mut self.header.temperature,
                    "PARTICLES" => &mut self.header.particles,
                    _ => &mut self.header.volume,
                };
                if slot.is_some() {
                    return Err(duplicate(c));
                }
                *slot = Some(c.positive("a positive number")?);
            }
            _ => {
                let name = c.ident("an observer name")?;
                if self.header.observers.iter().any(|o| o.name == name) {
                    return Err(ProtocolError::DuplicateName { line: c.line, name });
                }
                let mode = c.keyword(&["full", "trace", "species"])?;
                let observer = match mode.as_str() {
                    "full" => Observer::full(name),
                    "trace" => {
                        let d1 = c.count("a factor dimension")?;
                        let d2 = c.count("a factor dimension")?;
                        c.keyword(&["keep"])?;
                        let keep = match c.keyword(&["first", "second"])?.as_str() {
                            "first" => Keep::First,
                            _ => Keep::Second,
                        };
                        Observer::partial_trace(name, d1, d2, keep)
                    }
                    _ => {
                        let map: BTreeMap<String, String> = c
                            .pairs(Tok::Eq, "species=observed_name", |c| {
                                c.ident("an observed species name")
                            })?
                            .into_iter()
                            .collect();
                        Observer::species_map(name, map)
                    }
                };
                self.header.observers.push(observer);
            }
        }
        c.end()
    }

    fn define(&mut self, name: &str, line: usize) -> Result<(), ProtocolError> {
        if !self.names.insert(name.to_string()) {
            return Err(ProtocolError::DuplicateName {
                line,
                name: name.to_string(),
            });
        }
        Ok(())
    }

    fn check_names(&self, e: &Expr, line: usize) -> Result<(), ProtocolError> {
        match e.names().into_iter().find(|n| !self.names.contains(*n)) {
            Some(name) => Err(ProtocolError::UndefinedName {
                line,
                name: name.to_string(),
            }),
            None => Ok(()),
        }
    }

    fn checked_expr(&self, c: &mut Cursor) -> Result<Expr, ProtocolError> {
        let e = c.expr()?;
        self.check_names(&e, c.line)?;
        Ok(e)
    }

    fn statement(&mut self, keyword: &str, c: &mut Cursor) -> Result<StatementKind, ProtocolError> {
        let line = c.line;
        Ok(match keyword {
            "STATE" => {
                let name = c.ident("a state name")?;
                let expr = self.checked_expr(c)?;
                self.define(&name, line)?;
                StatementKind::State { name, expr }
            }
            "INSTRUMENT" => {
                let name = c.ident("an instrument name")?;
                let eigen = matches!(c.peek(), Tok::Ident(s) if s == "eigenbasis")
                    && c.tokens.get(c.pos + 1).is_some_and(|t| t.tok == Tok::LParen);
                let spec = if eigen {
                    c.advance();
                    c.expect(Tok::LParen)?;
                    let of = self.checked_expr(c)?;
                    c.expect(Tok::RParen)?;
                    InstrumentSpec::Eigenbasis {
                        of,
                        labels: c.idents_to_end("an outcome label")?,
                    }
                } else {
                    let mut projectors = Vec::new();
                    for (label, e) in c.pairs(Tok::Eq, "label=projector", |c| c.expr())? {
                        self.check_names(&e, line)?;
                        projectors.push((label, e));
                    }
                    InstrumentSpec::Projectors(projectors)
                };
                self.define(&name, line)?;
                StatementKind::Instrument { name, spec }
            }
            "CHAMBER" => {
                if self.seen_process_step {
                    return Err(ProtocolError::SyntaxError {
                        line,
                        col: 1,
                        expected: "CHAMBER lines before the first process step".into(),
                        found: "`CHAMBER`".into(),
                    });
                }
                let label = c.ident("a chamber label")?;
                let fraction = c.positive("a positive volume fraction")?;
                let contents = match self.header.dim {
                    Some(DimSpec::Classical) => ChamberSpec::Classical(
                        c.pairs(Tok::Colon, "species:weight", |c| c.positive("a positive weight"))?,
                    ),
                    _ => ChamberSpec::Quantum(self.checked_expr(c)?),
                };
                StatementKind::Chamber {
                    label,
                    fraction,
                    contents,
                }
            }
            "SEPARATE" => {
                let chamber = c.ident("a chamber label")?;
                let instrument = c.ident("an instrument name")?;
                if !self.names.contains(&instrument) {
                    return Err(ProtocolError::UndefinedName { line, name: instrument });
                }
                StatementKind::Separate { chamber, instrument }
            }
            "CSEPARATE" => {
                let chamber = c.ident("a chamber label")?;
                let permeability = c.pairs(Tok::Eq, "species=transmitted|reflected", |c| {
                    Ok(match c.keyword(&["transmitted", "reflected"])?.as_str() {
                        "transmitted" => Side::Transmitted,
                        _ => Side::Reflected,
                    })
                })?;
                StatementKind::ClassicalSeparate { chamber, permeability }
            }
            "MIX" => {
                let distinguishing = c.keyword(&["distinguishing", "free"])? == "distinguishing";
                let target = c.ident("a target chamber label")?;
                StatementKind::Mix {
                    distinguishing,
                    target,
                    chambers: c.idents_to_end("a chamber label")?,
                }
            }
            "REMOVE_PARTITION" => {
                let target = c.ident("a target chamber label")?;
                StatementKind::RemovePartition {
                    target,
                    chambers: c.idents_to_end("a chamber label")?,
                }
            }
            "PARTITION" => {
                let chamber = c.ident("a chamber label")?;
                StatementKind::Partition {
                    chamber,
                    parts: c.pairs(Tok::Eq, "label=fraction", |c| c.positive("a positive fraction"))?,
                }
            }
            "ROTATE" => {
                let chamber = c.ident("a chamber label")?;
                StatementKind::Rotate {
                    chamber,
                    unitary: self.checked_expr(c)?,
                }
            }
            "CLAIM_CYCLE" => StatementKind::ClaimCycle,
            "EXPECT" => StatementKind::Expect(self.expectation(c)?),
            _ => {
                return Err(ProtocolError::SyntaxError {
                    line,
                    col: 1,
                    expected: "a statement keyword".into(),
                    found: format!("`{keyword}`"),
                })
            }
        })
    }

    fn expectation(&self, c: &mut Cursor) -> Result<Expectation, ProtocolError> {
        let what = c.keyword(&["Q_total", "volume", "chambers", "cycle", "second_law"])?;
        let tolerance = |c: &mut Cursor| -> Result<Option<f64>, ProtocolError> {
            if c.at_end() {
                Ok(None)
            } else {
                c.positive("a positive tolerance").map(Some)
            }
        };
        Ok(match what.as_str() {
            "Q_total" => {
                c.expect(Tok::Approx)?;
                let value = c.number("a number")?;
                Expectation::TotalHeat {
                    value,
                    tol: tolerance(c)?,
                }
            }
            "volume" => {
                let chamber = c.ident("a chamber label")?;
                c.expect(Tok::Approx)?;
                let value = c.number("a number")?;
                Expectation::Volume {
                    chamber,
                    value,
                    tol: tolerance(c)?,
                }
            }
            "chambers" => {
                let col = c.col();
                match *c.peek() {
                    Tok::Number(x) if x >= 0.0 && x.fract() == 0.0 => {
                        c.advance();
                        Expectation::Chambers(x as usize)
                    }
                    _ => {
                        return Err(ProtocolError::SyntaxError {
                            line: c.line,
                            col,
                            expected: "a chamber count".into(),
                            found: c.peek().describe(),
                        })
                    }
                }
            }
            "cycle" => {
                let observer = self.observer_ref(c)?;
                let actual = c.keyword(&["true", "false"])? == "true";
                Expectation::Cycle { observer, actual }
            }
            _ => {
                let observer = self.observer_ref(c)?;
                let verdict = match c.keyword(&["satisfied", "violated", "not_applicable"])?.as_str() {
                    "satisfied" => SecondLaw::Satisfied,
                    "violated" => SecondLaw::Violated,
                    _ => SecondLaw::NotApplicable,
                };
                Expectation::SecondLaw { observer, verdict }
            }
        })
    }

    fn observer_ref(&self, c: &mut Cursor) -> Result<String, ProtocolError> {
        let name = c.ident("an observer name")?;
        let known = if self.header.observers.is_empty() {
            name == "truth"
        } else {
            self.header.observers.iter().any(|o| o.name == name)
        };
        if known {
            Ok(name)
        } else {
            Err(ProtocolError::UndefinedName { line: c.line, name })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_script() {
        let p = parse("DIM 2\nCHAMBER whole 1 ket(1, 0)\n").unwrap();
        assert_eq!(p.statements.len(), 1);
        assert_eq!(p.header.dim, DimSpec::Quantum(2));
        assert_eq!(p.header.temperature, 1.0);
        assert_eq!(p.header.effective_observers()[0].name, "truth");
    }

    #[test]
    fn forward_reference_is_undefined() {
        let err = parse("DIM 2\nCHAMBER upper 0.5 zplus\nSTATE zplus ket(1, 0)\n").unwrap_err();
        assert_eq!(
            err,
            ProtocolError::UndefinedName {
                line: 2,
                name: "zplus".into()
            }
        );
    }

    #[test]
    fn duplicate_names() {
        let err = parse("DIM 2\nSTATE a ket(1,0)\nINSTRUMENT a up=proj(a)\n").unwrap_err();
        assert!(matches!(err, ProtocolError::DuplicateName { line: 3, .. }));
    }

    #[test]
    fn header_is_required_and_first() {
        assert!(matches!(
            parse("STATE a ket(1,0)\n"),
            Err(ProtocolError::HeaderMissing { line: 1 })
        ));
        assert!(matches!(parse("# nothing\n"), Err(ProtocolError::HeaderMissing { .. })));
        let late = parse("DIM 2\nSTATE a ket(1,0)\nTEMPERATURE 2\n").unwrap_err();
        assert!(matches!(late, ProtocolError::SyntaxError { line: 3, col: 1, .. }));
    }

    #[test]
    fn syntax_errors_carry_columns() {
        match parse("DIM 2\nSTATE a ket(1, 0\n").unwrap_err() {
            ProtocolError::SyntaxError { line, col, .. } => assert_eq!((line, col), (2, 17)),
            e => panic!("{e:?}"),
        }
        match parse("DIM 2\nMIX sometimes whole\n").unwrap_err() {
            ProtocolError::SyntaxError { line, col, .. } => assert_eq!((line, col), (2, 5)),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn crlf_and_comments() {
        let p = parse("# header\r\nDIM 2\r\nSTATE a ket(1, 0) # z+\r\n\r\nCLAIM_CYCLE\r\n").unwrap();
        assert_eq!(p.statements.len(), 2);
        assert_eq!(p.statements[1].line, 5);
    }

    #[test]
    fn expression_precedence() {
        let p = parse("DIM 2\nSTATE a ket(1,0)\nSTATE b mix(0.5*a + 0.5*a - -a / 2)\n").unwrap();
        let StatementKind::State { expr, .. } = &p.statements[1].kind else {
            panic!()
        };
        assert_eq!(expr.to_string(), "mix((((0.5 * a) + (0.5 * a)) - (-a / 2)))");
    }

    #[test]
    fn chamber_after_process_step() {
        let err = parse("DIM 2\nSTATE a ket(1,0)\nCHAMBER x 1 a\nCLAIM_CYCLE\nCHAMBER y 1 a\n").unwrap_err();
        assert!(matches!(err, ProtocolError::SyntaxError { line: 5, .. }));
    }

    #[test]
    fn classical_header_and_chambers() {
        let p = parse(
            "DIM classical\nOBSERVER johann species aAr=Ar bAr=Ar\nCHAMBER upper 0.5 aAr:1\nCSEPARATE upper aAr=transmitted\nEXPECT second_law johann violated\n",
        )
        .unwrap();
        assert_eq!(p.header.dim, DimSpec::Classical);
        assert!(matches!(
            &p.statements[0].kind,
            StatementKind::Chamber { contents: ChamberSpec::Classical(s), .. } if s == &vec![("aAr".to_string(), 1.0)]
        ));
        assert!(parse("DIM classical\nEXPECT cycle marie true\n").is_err());
    }

    #[test]
    fn render_round_trip() {
        let src = "DIM 4\nOBSERVER t trace 2 2 keep first\nOBSERVER w full\nSTATE a ket(1, 0.5i)\nSTATE b tensor(a, a)\nINSTRUMENT m eigenbasis(mix(0.5*b + 0.5*proj(b))) p q\nINSTRUMENT n up=proj(b) dn=identity(4) - proj(b)\nCHAMBER c 1 b\nSEPARATE c m\nMIX free c\nPARTITION c x=0.25 y=0.75\nROTATE x identity(4)\nCLAIM_CYCLE\nEXPECT Q_total ≈ -0.5 1e-6\nEXPECT volume x ≈ 0.25\nEXPECT chambers 2\nEXPECT cycle t false\nEXPECT second_law w not_applicable\n";
        let p = parse(src).unwrap();
        let again = parse(&p.to_string()).unwrap();
        assert_eq!(p, again);
    }
}
