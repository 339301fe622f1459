use super::ProtocolError;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Number(f64),
    /// Imaginary literal such as `2i` or `0.5i`; bare `i` is `Imag(1.0)`.
    Imag(f64),
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Eq,
    Colon,
    /// `≈` or `~`.
    Approx,
    End,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(x) => format!("number {x}"),
            Tok::Imag(x) => format!("imaginary {x}i"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Approx => "`≈`".into(),
            Tok::End => "end of line".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    /// 1-based, in characters.
    pub col: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.'
}

/// Tokenizes one line (without its terminator). Comments start at `#`.
/// The result always ends with [`Tok::End`].
pub fn tokenize(line: &str, line_no: usize) -> Result<Vec<Token>, ProtocolError> {
    let chars: Vec<char> = line.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '=' => Some(Tok::Eq),
            ':' => Some(Tok::Colon),
            '≈' | '~' => Some(Tok::Approx),
            _ => None,
        };
        if let Some(tok) = single {
            tokens.push(Token { tok, col });
            i += 1;
            continue;
        }
        if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let tok = if word == "i" { Tok::Imag(1.0) } else { Tok::Ident(word) };
            tokens.push(Token { tok, col });
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value: f64 = text.parse().map_err(|_| ProtocolError::SyntaxError {
                line: line_no,
                col,
                expected: "a number".into(),
                found: format!("`{text}`"),
            })?;
            let imaginary = i < chars.len() && chars[i] == 'i' && !chars.get(i + 1).is_some_and(|&d| is_ident_char(d));
            if imaginary {
                i += 1;
                tokens.push(Token {
                    tok: Tok::Imag(value),
                    col,
                });
            } else if i < chars.len() && is_ident_char(chars[i]) {
                return Err(ProtocolError::SyntaxError {
                    line: line_no,
                    col: i + 1,
                    expected: "separator after number".into(),
                    found: format!("`{}`", chars[i]),
                });
            } else {
                tokens.push(Token {
                    tok: Tok::Number(value),
                    col,
                });
            }
            continue;
        }
        return Err(ProtocolError::SyntaxError {
            line: line_no,
            col,
            expected: "a token".into(),
            found: format!("`{c}`"),
        });
    }
    let end_col = chars.iter().position(|&c| c == '#').unwrap_or(chars.len()) + 1;
    tokens.push(Token {
        tok: Tok::End,
        col: end_col,
    });
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s, 1).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn numbers_and_imaginaries() {
        assert_eq!(
            toks("ket(0.3+0.4i, 1e-3, 2i, i)"),
            vec![
                Tok::Ident("ket".into()),
                Tok::LParen,
                Tok::Number(0.3),
                Tok::Plus,
                Tok::Imag(0.4),
                Tok::Comma,
                Tok::Number(1e-3),
                Tok::Comma,
                Tok::Imag(2.0),
                Tok::Comma,
                Tok::Imag(1.0),
                Tok::RParen,
                Tok::End,
            ]
        );
    }

    #[test]
    fn dotted_idents_comments_and_columns() {
        let t = tokenize("  ROTATE whole.plus h # trailing", 3).unwrap();
        assert_eq!(t[0].col, 3);
        assert_eq!(t[1].tok, Tok::Ident("whole.plus".into()));
        assert_eq!(t[1].col, 10);
        assert_eq!(t.last().unwrap().tok, Tok::End);
        assert_eq!(t.len(), 4);
    }

    #[test]
    fn approx_symbols() {
        assert_eq!(toks("≈ ~"), vec![Tok::Approx, Tok::Approx, Tok::End]);
    }

    #[test]
    fn bad_characters_report_column() {
        match tokenize("STATE a $", 7) {
            Err(ProtocolError::SyntaxError { line: 7, col: 9, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(tokenize("x 2abc", 1).is_err());
    }
}
