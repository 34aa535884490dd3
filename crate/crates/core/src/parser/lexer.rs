use chrono::NaiveDate;

use super::SourceError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Slash,
    /// `<=`
    Le,
    /// `->`
    Arrow,
    Ident(String),
    Str(String),
    Number(f64),
    Date(NaiveDate),
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::Number(_) => "number".into(),
            Tok::Date(_) => "date".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

struct Lexer<'a> {
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

fn ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.'
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, SourceError> {
    let mut lx = Lexer { src, chars: src.chars().collect(), pos: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    let (mut last_line, mut last_col) = (1, 1);
    loop {
        lx.skip_trivia();
        let (line, col) = (lx.line, lx.col);
        let Some(c) = lx.peek(0) else {
            out.push(Token { tok: Tok::Eof, line: last_line, col: last_col });
            return Ok(out);
        };
        let tok = lx.token(c)?;
        out.push(Token { tok, line, col });
        // end-of-input errors point at the last real character
        (last_line, last_col) = (lx.line, lx.col.saturating_sub(1).max(1));
    }
}

impl Lexer<'_> {
    fn peek(&self, n: usize) -> Option<char> {
        self.chars.get(self.pos + n).copied()
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

    fn err(&self, line: usize, col: usize, msg: impl Into<String>) -> SourceError {
        SourceError::at(self.src, line, col, msg)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek(0) {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') if self.peek(1) == Some('/') => {
                    while let Some(c) = self.peek(0) {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn token(&mut self, c: char) -> Result<Tok, SourceError> {
        let (line, col) = (self.line, self.col);
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '/' => Some(Tok::Slash),
            _ => None,
        };
        if let Some(t) = single {
            self.bump();
            return Ok(t);
        }
        match c {
            '<' if self.peek(1) == Some('=') => {
                self.bump();
                self.bump();
                Ok(Tok::Le)
            }
            '-' if self.peek(1) == Some('>') => {
                self.bump();
                self.bump();
                Ok(Tok::Arrow)
            }
            '-' if self.peek(1).is_some_and(|d| d.is_ascii_digit()) => self.number(),
            '"' => self.string(),
            c if c.is_ascii_digit() => {
                if self.looks_like_date() {
                    self.date()
                } else {
                    self.number()
                }
            }
            c if c.is_ascii_alphabetic() => Ok(self.ident()),
            c => Err(self.err(line, col, format!("unexpected character `{}`", c.escape_debug()))),
        }
    }

    fn ident(&mut self) -> Tok {
        let mut s = String::new();
        while let Some(c) = self.peek(0) {
            let dash = c == '-' && self.peek(1).is_some_and(|n| n.is_ascii_alphanumeric() || n == '_');
            if ident_continue(c) || dash {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        Tok::Ident(s)
    }

    fn looks_like_date(&self) -> bool {
        let pat = "dddd-dd-dd";
        pat.chars().enumerate().all(|(i, p)| match (p, self.peek(i)) {
            ('d', Some(c)) => c.is_ascii_digit(),
            ('-', Some('-')) => true,
            _ => false,
        })
    }

    fn date(&mut self) -> Result<Tok, SourceError> {
        let (line, col) = (self.line, self.col);
        let text: String = (0..10).filter_map(|_| self.bump()).collect();
        if self.peek(0).is_some_and(|c| ident_continue(c) || c == '-') {
            return Err(self.err(line, col, "malformed date literal"));
        }
        NaiveDate::parse_from_str(&text, "%Y-%m-%d")
            .map(Tok::Date)
            .map_err(|_| self.err(line, col, format!("invalid date `{text}`")))
    }

    fn number(&mut self) -> Result<Tok, SourceError> {
        let (line, col) = (self.line, self.col);
        let mut s = String::new();
        if self.peek(0) == Some('-') {
            s.push('-');
            self.bump();
        }
        self.digits(&mut s);
        if self.peek(0) == Some('.') && self.peek(1).is_some_and(|c| c.is_ascii_digit()) {
            s.push('.');
            self.bump();
            self.digits(&mut s);
        }
        if matches!(self.peek(0), Some('e' | 'E')) {
            let sign = matches!(self.peek(1), Some('+' | '-'));
            let digit_at = if sign { 2 } else { 1 };
            if self.peek(digit_at).is_some_and(|c| c.is_ascii_digit()) {
                for _ in 0..digit_at {
                    s.push(self.bump().expect("peeked"));
                }
                self.digits(&mut s);
            }
        }
        if self.peek(0).is_some_and(|c| ident_continue(c)) {
            return Err(self.err(line, col, "malformed number literal"));
        }
        let value: f64 = s
            .parse()
            .map_err(|_| self.err(line, col, format!("malformed number literal `{s}`")))?;
        if !value.is_finite() {
            return Err(self.err(line, col, format!("non-finite double literal `{s}`")));
        }
        Ok(Tok::Number(value))
    }

    fn digits(&mut self, s: &mut String) {
        while let Some(c) = self.peek(0).filter(char::is_ascii_digit) {
            s.push(c);
            self.bump();
        }
    }

    fn string(&mut self) -> Result<Tok, SourceError> {
        let (line, col) = (self.line, self.col);
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err(line, col, "unterminated string literal")),
                Some('"') => return Ok(Tok::Str(s)),
                Some('\\') => {
                    let (el, ec) = (self.line, self.col);
                    match self.bump() {
                        Some('"') => s.push('"'),
                        Some('\\') => s.push('\\'),
                        Some('n') => s.push('\n'),
                        Some('t') => s.push('\t'),
                        Some('r') => s.push('\r'),
                        _ => return Err(self.err(el, ec.saturating_sub(1).max(1), "invalid escape sequence")),
                    }
                }
                Some(c) => s.push(c),
            }
        }
    }
}
