//! Tokenizer for the schema text format. `#` starts a comment that runs to
//! end of line. String literals use `\\`, `\"`, `\n`, `\t`, `\r`, and
//! `\u{hex}` escapes and may not span lines.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Position of a token in source text. Line and column are 1-based and
/// counted in characters; `length` is the token's character count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSpan {
    pub line: u32,
    pub column: u32,
    pub length: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    /// Identifier or keyword; the parser decides by position.
    Ident(String),
    /// Decoded string literal.
    Label(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Colon,
    Semi,
    Arrow,
    TriggerArrow,
    Dot,
    /// A character or malformed literal the lexer could not accept. The
    /// payload describes what was found.
    Bad(String),
    Eof,
}

impl TokenKind {
    /// Short description used in "expected X, found Y" messages.
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(name) => format!("`{name}`"),
            TokenKind::Label(_) => "string".into(),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::LBracket => "`[`".into(),
            TokenKind::RBracket => "`]`".into(),
            TokenKind::Colon => "`:`".into(),
            TokenKind::Semi => "`;`".into(),
            TokenKind::Arrow => "`->`".into(),
            TokenKind::TriggerArrow => "`~>`".into(),
            TokenKind::Dot => "`.`".into(),
            TokenKind::Bad(what) => what.clone(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

pub fn lex(text: &str) -> Vec<Token> {
    Lexer {
        chars: text.chars().collect(),
        pos: 0,
        line: 1,
        column: 1,
        tokens: Vec::new(),
    }
    .run()
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    column: u32,
    tokens: Vec<Token>,
}

impl Lexer {
    fn run(mut self) -> Vec<Token> {
        loop {
            self.skip_trivia();
            let span_start = (self.line, self.column);
            let Some(c) = self.peek() else {
                self.push(TokenKind::Eof, span_start, 0);
                return self.tokens;
            };
            match c {
                '{' => self.single(TokenKind::LBrace),
                '}' => self.single(TokenKind::RBrace),
                '[' => self.single(TokenKind::LBracket),
                ']' => self.single(TokenKind::RBracket),
                ':' => self.single(TokenKind::Colon),
                ';' => self.single(TokenKind::Semi),
                '.' => self.single(TokenKind::Dot),
                '-' | '~' => self.arrow(c),
                '"' => self.string_literal(),
                c if c.is_ascii_alphabetic() || c == '_' => self.ident(),
                c => {
                    self.bump();
                    self.push(
                        TokenKind::Bad(format!("character {c:?}")),
                        span_start,
                        1,
                    );
                }
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn push(&mut self, kind: TokenKind, (line, column): (u32, u32), length: u32) {
        self.tokens.push(Token {
            kind,
            span: SourceSpan {
                line,
                column,
                length,
            },
        });
    }

    fn single(&mut self, kind: TokenKind) {
        let start = (self.line, self.column);
        self.bump();
        self.push(kind, start, 1);
    }

    fn arrow(&mut self, first: char) {
        let start = (self.line, self.column);
        self.bump();
        if self.peek() == Some('>') {
            self.bump();
            let kind = if first == '-' {
                TokenKind::Arrow
            } else {
                TokenKind::TriggerArrow
            };
            self.push(kind, start, 2);
        } else {
            self.push(TokenKind::Bad(format!("character {first:?}")), start, 1);
        }
    }

    fn ident(&mut self) {
        let start = (self.line, self.column);
        let mut name = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                name.push(c);
                self.bump();
            } else {
                break;
            }
        }
        let len = name.chars().count() as u32;
        self.push(TokenKind::Ident(name), start, len);
    }

    fn string_literal(&mut self) {
        let start = (self.line, self.column);
        self.bump(); // opening quote
        let mut value = String::new();
        let mut length = 1u32;
        loop {
            match self.peek() {
                None | Some('\n') => {
                    self.push(TokenKind::Bad("unterminated string".into()), start, length);
                    return;
                }
                Some('"') => {
                    self.bump();
                    length += 1;
                    self.push(TokenKind::Label(value), start, length);
                    return;
                }
                Some('\\') => {
                    self.bump();
                    length += 1;
                    match self.escape() {
                        Some((c, esc_len)) => {
                            value.push(c);
                            length += esc_len;
                        }
                        None => {
                            self.push(TokenKind::Bad("bad escape sequence".into()), start, length);
                            return;
                        }
                    }
                }
                Some(c) => {
                    self.bump();
                    value.push(c);
                    length += 1;
                }
            }
        }
    }

    /// Decodes the escape after a consumed backslash. Returns the decoded
    /// character and how many characters the escape body occupied.
    fn escape(&mut self) -> Option<(char, u32)> {
        let c = self.bump()?;
        match c {
            '\\' => Some(('\\', 1)),
            '"' => Some(('"', 1)),
            'n' => Some(('\n', 1)),
            't' => Some(('\t', 1)),
            'r' => Some(('\r', 1)),
            'u' => {
                if self.bump()? != '{' {
                    return None;
                }
                let mut hex = String::new();
                loop {
                    match self.bump()? {
                        '}' => break,
                        c if c.is_ascii_hexdigit() && hex.len() < 6 => hex.push(c),
                        _ => return None,
                    }
                }
                let code = u32::from_str_radix(&hex, 16).ok()?;
                let decoded = char::from_u32(code)?;
                Some((decoded, hex.chars().count() as u32 + 3))
            }
            _ => None,
        }
    }
}
