use super::Span;
use crate::error::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Variable(String),
    Integer(i64),
    Str(String),
    /// `#name`, without the hash.
    Directive(String),
    Amp,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    If,
    Dot,
    DotDot,
    Plus,
    Minus,
    Star,
    Slash,
    Backslash,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    Pipe,
    Arrow,
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
    /// Byte offset of the first character.
    pub offset: usize,
}

pub struct Lexer<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str) -> Self {
        Lexer { src, chars: src.char_indices().collect(), pos: 0, line: 1, col: 1 }
    }

    pub fn tokenize(mut self) -> Result<Vec<Token>, Error> {
        let mut out = Vec::new();
        loop {
            let tok = self.next_token()?;
            let eof = tok.kind == TokenKind::Eof;
            out.push(tok);
            if eof {
                return Ok(out);
            }
        }
    }

    fn peek(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).map(|(_, c)| *c)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek(0)?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map(|(o, _)| *o).unwrap_or(self.src.len())
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.line, col: self.col, msg: msg.into() }
    }

    fn skip_trivia(&mut self) -> Result<(), Error> {
        loop {
            match self.peek(0) {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('%') if self.peek(1) == Some('*') => {
                    let (line, col) = (self.line, self.col);
                    self.bump();
                    self.bump();
                    loop {
                        match self.bump() {
                            Some('*') if self.peek(0) == Some('%') => {
                                self.bump();
                                break;
                            }
                            Some(_) => {}
                            None => {
                                return Err(Error::Parse {
                                    line,
                                    col,
                                    msg: "unterminated block comment".into(),
                                })
                            }
                        }
                    }
                }
                Some('%') => {
                    while let Some(c) = self.peek(0) {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn ident(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek(0) {
            if c.is_alphanumeric() || c == '_' || c == '\'' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn next_token(&mut self) -> Result<Token, Error> {
        self.skip_trivia()?;
        let span = Span { line: self.line, col: self.col };
        let offset = self.offset();
        let Some(c) = self.peek(0) else {
            return Ok(Token { kind: TokenKind::Eof, span, offset });
        };
        let kind = match c {
            'a'..='z' => TokenKind::Ident(self.ident()),
            '_' => {
                let s = self.ident();
                if s.chars().all(|c| c == '_') {
                    TokenKind::Variable("_".into())
                } else if s.trim_start_matches('_').starts_with(|c: char| c.is_uppercase()) {
                    TokenKind::Variable(s)
                } else {
                    TokenKind::Ident(s)
                }
            }
            'A'..='Z' => TokenKind::Variable(self.ident()),
            '0'..='9' => {
                let mut s = String::new();
                while let Some(d) = self.peek(0).filter(|d| d.is_ascii_digit()) {
                    s.push(d);
                    self.bump();
                }
                TokenKind::Integer(s.parse().map_err(|_| self.error("integer out of range"))?)
            }
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        Some('"') => break,
                        Some('\\') => match self.bump() {
                            Some('n') => s.push('\n'),
                            Some(e) => s.push(e),
                            None => return Err(self.error("unterminated string")),
                        },
                        Some(ch) => s.push(ch),
                        None => return Err(self.error("unterminated string")),
                    }
                }
                TokenKind::Str(s)
            }
            '#' => {
                self.bump();
                let name = self.ident();
                if name.is_empty() {
                    return Err(Error::Parse { line: span.line, col: span.col, msg: "expected directive name after '#'".into() });
                }
                TokenKind::Directive(name)
            }
            _ => {
                self.bump();
                match (c, self.peek(0)) {
                    (':', Some('-')) => {
                        self.bump();
                        TokenKind::If
                    }
                    ('.', Some('.')) => {
                        self.bump();
                        TokenKind::DotDot
                    }
                    ('<', Some('=')) => {
                        self.bump();
                        TokenKind::Le
                    }
                    ('>', Some('=')) => {
                        self.bump();
                        TokenKind::Ge
                    }
                    ('!', Some('=')) => {
                        self.bump();
                        TokenKind::Ne
                    }
                    ('=', Some('>')) => {
                        self.bump();
                        TokenKind::Arrow
                    }
                    ('=', Some('=')) => {
                        self.bump();
                        TokenKind::Eq
                    }
                    ('&', _) => TokenKind::Amp,
                    ('(', _) => TokenKind::LParen,
                    (')', _) => TokenKind::RParen,
                    ('{', _) => TokenKind::LBrace,
                    ('}', _) => TokenKind::RBrace,
                    ('[', _) => TokenKind::LBracket,
                    (']', _) => TokenKind::RBracket,
                    (',', _) => TokenKind::Comma,
                    (';', _) => TokenKind::Semi,
                    (':', _) => TokenKind::Colon,
                    ('.', _) => TokenKind::Dot,
                    ('+', _) => TokenKind::Plus,
                    ('-', _) => TokenKind::Minus,
                    ('*', _) => TokenKind::Star,
                    ('/', _) => TokenKind::Slash,
                    ('\\', _) => TokenKind::Backslash,
                    ('<', _) => TokenKind::Lt,
                    ('>', _) => TokenKind::Gt,
                    ('=', _) => TokenKind::Eq,
                    ('|', _) => TokenKind::Pipe,
                    _ => {
                        return Err(Error::Parse {
                            line: span.line,
                            col: span.col,
                            msg: format!("unexpected character '{c}'"),
                        })
                    }
                }
            }
        };
        Ok(Token { kind, span, offset })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(s: &str) -> Vec<TokenKind> {
        Lexer::new(s).tokenize().unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn lexes_rule_tokens() {
        use TokenKind::*;
        assert_eq!(
            kinds("p(X) :- not q. % comment\n&i(0,#sup)"),
            vec![
                Ident("p".into()),
                LParen,
                Variable("X".into()),
                RParen,
                If,
                Ident("not".into()),
                Ident("q".into()),
                Dot,
                Amp,
                Ident("i".into()),
                LParen,
                Integer(0),
                Comma,
                Directive("sup".into()),
                RParen,
                Eof
            ]
        );
    }

    #[test]
    fn positions_are_monotone() {
        let toks = Lexer::new("a.\n  b :- c,\n d.").tokenize().unwrap();
        for w in toks.windows(2) {
            assert!(w[0].span < w[1].span);
        }
        assert_eq!(toks[2].span, Span { line: 2, col: 3 });
    }

    #[test]
    fn block_comment_and_errors() {
        assert_eq!(kinds("%* x *% a"), vec![TokenKind::Ident("a".into()), TokenKind::Eof]);
        assert!(Lexer::new("%* open").tokenize().is_err());
        assert!(Lexer::new("a ? b").tokenize().is_err());
    }
}
