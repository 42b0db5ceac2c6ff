use serde::{Deserialize, Serialize};

use super::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Word,
    Number,
    String,
    Symbol,
    Newline,
    End,
}

/// A lexeme with its 1-based source position. For strings `text` holds the
/// unescaped contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub line: usize,
    pub column: usize,
    /// Whether whitespace or a comment separates this token from the previous one.
    pub spaced: bool,
}

impl Token {
    pub fn is_symbol(&self, s: &str) -> bool {
        self.kind == TokenKind::Symbol && self.text == s
    }

    pub fn is_word(&self, s: &str) -> bool {
        self.kind == TokenKind::Word && self.text == s
    }
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    src: &'a str,
}

impl Lexer<'_> {
    fn peek(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    fn bump(&mut self) -> char {
        let c = self.chars[self.pos];
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        c
    }

    fn error(&self, line: usize, column: usize, message: impl Into<String>, offending: impl Into<String>) -> ParseError {
        let _ = self.src;
        ParseError { message: message.into(), line, column, offending: offending.into() }
    }

    fn number_starts(&self) -> bool {
        let digit = |c: Option<char>| c.is_some_and(|c| c.is_ascii_digit());
        match self.peek(0) {
            Some(c) if c.is_ascii_digit() => true,
            Some('.') => digit(self.peek(1)),
            Some('-') => digit(self.peek(1)) || (self.peek(1) == Some('.') && digit(self.peek(2))),
            _ => false,
        }
    }

    fn digits(&mut self, text: &mut String) {
        while self.peek(0).is_some_and(|c| c.is_ascii_digit()) {
            text.push(self.bump());
        }
    }

    fn number(&mut self) -> String {
        let mut text = String::new();
        if self.peek(0) == Some('-') {
            text.push(self.bump());
        }
        self.digits(&mut text);
        if self.peek(0) == Some('.') && self.peek(1).is_some_and(|c| c.is_ascii_digit()) {
            text.push(self.bump());
            self.digits(&mut text);
        }
        if matches!(self.peek(0), Some('e' | 'E')) {
            let sign = matches!(self.peek(1), Some('+' | '-'));
            let d = if sign { self.peek(2) } else { self.peek(1) };
            if d.is_some_and(|c| c.is_ascii_digit()) {
                text.push(self.bump());
                if sign {
                    text.push(self.bump());
                }
                self.digits(&mut text);
            }
        }
        text
    }

    fn string(&mut self, line: usize, column: usize) -> Result<String, ParseError> {
        self.bump();
        let mut out = String::new();
        loop {
            match self.peek(0) {
                None | Some('\n') => return Err(self.error(line, column, "unterminated string", "\"")),
                Some('"') => {
                    self.bump();
                    return Ok(out);
                }
                Some('\\') => {
                    let (l, c) = (self.line, self.column);
                    self.bump();
                    let esc = match self.peek(0) {
                        Some('"') => '"',
                        Some('\\') => '\\',
                        Some('n') => '\n',
                        Some('t') => '\t',
                        Some('r') => '\r',
                        Some(other) => return Err(self.error(l, c, format!("unknown escape \\{other}"), format!("\\{other}"))),
                        None => return Err(self.error(line, column, "unterminated string", "\"")),
                    };
                    self.bump();
                    out.push(esc);
                }
                Some(_) => out.push(self.bump()),
            }
        }
    }
}

/// Splits `text` into tokens, always ending with an `End` token.
pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut lx = Lexer { chars: text.chars().collect(), pos: 0, line: 1, column: 1, src: text };
    let mut out: Vec<Token> = Vec::new();
    let mut spaced = true;
    while let Some(c) = lx.peek(0) {
        let (line, column) = (lx.line, lx.column);
        let push = |out: &mut Vec<Token>, kind, text: String, spaced: &mut bool| {
            out.push(Token { kind, text, line, column, spaced: *spaced });
            *spaced = false;
        };
        match c {
            '\n' => {
                lx.bump();
                push(&mut out, TokenKind::Newline, "\n".into(), &mut spaced);
                spaced = true;
            }
            '\r' if lx.peek(1) == Some('\n') => {
                lx.bump();
            }
            c if c.is_whitespace() => {
                lx.bump();
                spaced = true;
            }
            '#' => {
                while lx.peek(0).is_some_and(|c| c != '\n') {
                    lx.bump();
                }
                spaced = true;
            }
            '"' => {
                let s = lx.string(line, column)?;
                push(&mut out, TokenKind::String, s, &mut spaced);
            }
            '.' if lx.peek(1) == Some('.') => {
                lx.bump();
                lx.bump();
                push(&mut out, TokenKind::Symbol, "..".into(), &mut spaced);
            }
            _ if lx.number_starts() => {
                let n = lx.number();
                push(&mut out, TokenKind::Number, n, &mut spaced);
            }
            '=' | ',' | '(' | ')' => {
                lx.bump();
                push(&mut out, TokenKind::Symbol, c.to_string(), &mut spaced);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut w = String::new();
                while lx.peek(0).is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                    w.push(lx.bump());
                }
                push(&mut out, TokenKind::Word, w, &mut spaced);
            }
            other => return Err(lx.error(line, column, format!("unexpected character {other:?}"), other.to_string())),
        }
    }
    out.push(Token { kind: TokenKind::End, text: String::new(), line: lx.line, column: lx.column, spaced });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<(TokenKind, String)> {
        tokenize(text).unwrap().into_iter().map(|t| (t.kind, t.text)).collect()
    }

    #[test]
    fn iso_line() {
        use TokenKind::{End, Number, Symbol, Word};
        let expected: Vec<(TokenKind, std::string::String)> = [
            (Word, "iso"),
            (Word, "add"),
            (Word, "view"),
            (Symbol, "="),
            (Number, "0"),
            (Word, "level"),
            (Symbol, "="),
            (Number, "0.005"),
            (End, ""),
        ]
        .into_iter()
        .map(|(k, t)| (k, t.to_string()))
        .collect();
        assert_eq!(kinds("iso add view=0 level=0.005"), expected);
    }

    #[test]
    fn empty_is_end() {
        assert_eq!(kinds(""), vec![(TokenKind::End, String::new())]);
    }

    #[test]
    fn string_and_comment() {
        let k = kinds("load \"a b.raw\" as m  # meteorite");
        assert_eq!(k[1], (TokenKind::String, "a b.raw".into()));
        assert_eq!(k.len(), 5);
    }

    #[test]
    fn range_and_negative_numbers() {
        let k = kinds("1..8 -0.5 -.25 2e-3 3e");
        let texts: Vec<&str> = k.iter().map(|t| t.1.as_str()).collect();
        assert_eq!(texts, ["1", "..", "8", "-0.5", "-.25", "2e-3", "3", "e", ""]);
    }

    #[test]
    fn dims_lex_as_number_then_adjacent_word() {
        let t = tokenize("16x16x16x16").unwrap();
        assert_eq!((t[0].kind, t[0].text.as_str()), (TokenKind::Number, "16"));
        assert_eq!((t[1].kind, t[1].text.as_str(), t[1].spaced), (TokenKind::Word, "x16x16x16", false));
    }

    #[test]
    fn positions_are_one_based() {
        let t = tokenize("a\n  b").unwrap();
        assert_eq!((t[0].line, t[0].column), (1, 1));
        assert_eq!((t[2].line, t[2].column), (2, 3));
    }

    #[test]
    fn unterminated_string_points_at_quote() {
        let e = tokenize("load \"abc").unwrap_err();
        assert_eq!((e.line, e.column), (1, 6));
    }

    #[test]
    fn escapes_and_crlf() {
        let k = kinds("\"a\\\"b\\\\\"\r\nx");
        assert_eq!(k[0].1, "a\"b\\");
        assert_eq!(k[1].0, TokenKind::Newline);
        assert!(tokenize("$").is_err());
    }
}
