use super::ast::{CmpOp, Pos};
use super::error::{QueryError, QueryErrorKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Var(String),
    Str(String),
    Int(i64),
    LParen,
    RParen,
    Comma,
    Dot,
    If,
    Cmp(CmpOp),
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Var(s) => format!("variable `{s}`"),
            Tok::Str(_) => "string".to_string(),
            Tok::Int(i) => format!("integer `{i}`"),
            Tok::LParen => "`(`".to_string(),
            Tok::RParen => "`)`".to_string(),
            Tok::Comma => "`,`".to_string(),
            Tok::Dot => "`.`".to_string(),
            Tok::If => "`:-`".to_string(),
            Tok::Cmp(op) => format!("`{}`", op.as_str()),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<(Tok, Pos)>, QueryError> {
    let mut lexer = Lexer {
        chars: src.chars().collect(),
        at: 0,
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    loop {
        let (tok, pos) = lexer.next_token()?;
        let done = tok == Tok::Eof;
        out.push((tok, pos));
        if done {
            return Ok(out);
        }
    }
}

struct Lexer {
    chars: Vec<char>,
    at: usize,
    line: usize,
    column: usize,
}

impl Lexer {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).copied()
    }

    fn peek2(&self) -> Option<char> {
        self.chars.get(self.at + 1).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.at += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn error(&self, message: impl Into<String>, pos: Pos) -> QueryError {
        QueryError::new(QueryErrorKind::Syntax, message, pos)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '%' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(|&c| pred(c)) {
            s.push(c);
            self.bump();
        }
        s
    }

    fn next_token(&mut self) -> Result<(Tok, Pos), QueryError> {
        self.skip_trivia();
        let pos = self.pos();
        let Some(c) = self.peek() else {
            return Ok((Tok::Eof, pos));
        };
        let tok = match c {
            'a'..='z' => {
                Tok::Ident(self.take_while(|c| matches!(c, 'a'..='z' | '0'..='9' | '_' | '-')))
            }
            'A'..='Z' => Tok::Var(self.take_while(|c| c.is_ascii_alphanumeric() || c == '_')),
            '0'..='9' => self.integer(false, pos)?,
            '-' if matches!(self.peek2(), Some('0'..='9')) => {
                self.bump();
                self.integer(true, pos)?
            }
            '"' => self.string(pos)?,
            _ => {
                self.bump();
                match (c, self.peek()) {
                    ('(', _) => Tok::LParen,
                    (')', _) => Tok::RParen,
                    (',', _) => Tok::Comma,
                    ('.', _) => Tok::Dot,
                    (':', Some('-')) => {
                        self.bump();
                        Tok::If
                    }
                    ('=', Some('=')) => {
                        self.bump();
                        Tok::Cmp(CmpOp::Eq)
                    }
                    ('!', Some('=')) => {
                        self.bump();
                        Tok::Cmp(CmpOp::Ne)
                    }
                    ('<', Some('=')) => {
                        self.bump();
                        Tok::Cmp(CmpOp::Le)
                    }
                    ('>', Some('=')) => {
                        self.bump();
                        Tok::Cmp(CmpOp::Ge)
                    }
                    ('<', _) => Tok::Cmp(CmpOp::Lt),
                    ('>', _) => Tok::Cmp(CmpOp::Gt),
                    _ => return Err(self.error(format!("unexpected character `{c}`"), pos)),
                }
            }
        };
        Ok((tok, pos))
    }

    fn integer(&mut self, negative: bool, pos: Pos) -> Result<Tok, QueryError> {
        let digits = self.take_while(|c| c.is_ascii_digit());
        let text = if negative {
            format!("-{digits}")
        } else {
            digits
        };
        text.parse::<i64>()
            .map(Tok::Int)
            .map_err(|_| self.error(format!("integer `{text}` out of range"), pos))
    }

    fn string(&mut self, pos: Pos) -> Result<Tok, QueryError> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error("unterminated string", pos)),
                Some('"') => return Ok(Tok::Str(s)),
                Some('\\') => {
                    let at = self.pos();
                    match self.bump() {
                        Some('"') => s.push('"'),
                        Some('\\') => s.push('\\'),
                        Some('n') => s.push('\n'),
                        Some('t') => s.push('\t'),
                        Some(c) => return Err(self.error(format!("unknown escape `\\{c}`"), at)),
                        None => return Err(self.error("unterminated string", pos)),
                    }
                }
                Some(c) => s.push(c),
            }
        }
    }
}
