//! Recursive-descent parser for the schema text format.
//!
//! Parsing is purely syntactic: unknown machine references, duplicate ids,
//! and illegal stage pairs all parse fine and are left to `fm_core::validate`.
//! On a syntax error the parser records it and skips ahead to the next
//! statement; after [`MAX_ERRORS`] errors it gives up.

use std::fmt;

use fm_core::{Endpoint, Flow, Id, Machine, Schema, Sphere, StageKind, Trigger};
use serde::{Deserialize, Serialize};

use crate::lexer::{lex, SourceSpan, Token, TokenKind};

/// Parsing stops after this many errors.
pub const MAX_ERRORS: usize = 10;

/// Sphere blocks may nest at most this deep.
pub const MAX_DEPTH: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: String,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: expected {}, found {}",
            self.span, self.expected, self.found
        )
    }
}

impl std::error::Error for ParseError {}

/// Parses schema text. Returns the schema only when the text is free of
/// syntax errors; otherwise returns every recorded error in source order.
pub fn parse(text: &str) -> Result<Schema, Vec<ParseError>> {
    let mut parser = Parser {
        tokens: lex(text),
        pos: 0,
        errors: Vec::new(),
        schema: Schema::new(),
    };
    parser.file();
    if parser.errors.is_empty() {
        Ok(parser.schema)
    } else {
        Err(parser.errors)
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    errors: Vec<ParseError>,
    schema: Schema,
}

impl Parser {
    fn peek(&self) -> &Token {
        // The lexer always terminates the stream with Eof.
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> Token {
        let token = self.peek().clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        token
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek().kind, TokenKind::Eof)
    }

    fn at_keyword(&self, word: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(name) if name == word)
    }

    fn gave_up(&self) -> bool {
        self.errors.len() >= MAX_ERRORS
    }

    fn error(&mut self, expected: impl Into<String>) {
        if self.gave_up() {
            return;
        }
        let token = self.peek();
        self.errors.push(ParseError {
            span: token.span,
            expected: expected.into(),
            found: token.kind.describe(),
        });
    }

    /// Skips to the start of the next statement: a statement keyword, a
    /// closing brace (left for the enclosing block), or just past the next
    /// semicolon.
    fn recover(&mut self) {
        loop {
            match &self.peek().kind {
                TokenKind::Eof | TokenKind::RBrace => return,
                TokenKind::Semi => {
                    self.bump();
                    return;
                }
                TokenKind::Ident(name)
                    if matches!(name.as_str(), "sphere" | "machine" | "flow" | "trigger") =>
                {
                    return;
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn expect_keyword(&mut self, word: &str) -> bool {
        if self.at_keyword(word) {
            self.bump();
            true
        } else {
            self.error(format!("`{word}`"));
            false
        }
    }

    fn expect(&mut self, kind: TokenKind, expected: &str) -> bool {
        if self.peek().kind == kind {
            self.bump();
            true
        } else {
            self.error(expected);
            false
        }
    }

    fn expect_id(&mut self) -> Option<Id> {
        match &self.peek().kind {
            TokenKind::Ident(name) => {
                // Lexed identifiers always satisfy the id grammar.
                let id = Id::new(name.clone()).expect("lexer produced a malformed identifier");
                self.bump();
                Some(id)
            }
            _ => {
                self.error("identifier");
                None
            }
        }
    }

    fn expect_label(&mut self) -> Option<String> {
        match &self.peek().kind {
            TokenKind::Label(value) => {
                let value = value.clone();
                self.bump();
                Some(value)
            }
            _ => {
                self.error("quoted label");
                None
            }
        }
    }

    fn expect_stage(&mut self) -> Option<StageKind> {
        if let TokenKind::Ident(name) = &self.peek().kind {
            if let Some(stage) = StageKind::from_name(name) {
                self.bump();
                return Some(stage);
            }
        }
        self.error("stage name (Create, Process, Receive, Release, or Transfer)");
        None
    }

    // ── Grammar productions ──────────────────────────────────────────────

    fn file(&mut self) {
        if !self.expect_keyword("schema") || !self.expect(TokenKind::LBrace, "`{`") {
            return;
        }
        loop {
            if self.gave_up() || self.at_eof() {
                break;
            }
            if self.peek().kind == TokenKind::RBrace {
                self.bump();
                if !self.at_eof() {
                    self.error("end of input");
                }
                return;
            }
            self.top_item();
        }
        if !self.gave_up() && self.at_eof() {
            self.error("`}`");
        }
    }

    fn top_item(&mut self) {
        if self.at_keyword("sphere") {
            self.sphere(None, 0);
        } else if self.at_keyword("flow") {
            self.connection(false);
        } else if self.at_keyword("trigger") {
            self.connection(true);
        } else {
            self.error("`sphere`, `flow`, or `trigger`");
            self.bump(); // guarantee progress even when sitting on a keyword
            self.recover();
        }
    }

    fn sphere(&mut self, parent: Option<&Id>, depth: usize) {
        if depth >= MAX_DEPTH {
            self.error("sphere nested less deeply");
            self.recover();
            return;
        }
        self.bump(); // `sphere`
        let Some(id) = self.expect_id() else {
            self.recover();
            return;
        };
        let Some(label) = self.expect_label() else {
            self.recover();
            return;
        };
        self.schema.spheres.push(Sphere {
            id: id.clone(),
            label,
            parent: parent.cloned(),
        });
        if !self.expect(TokenKind::LBrace, "`{`") {
            self.recover();
            return;
        }
        loop {
            if self.gave_up() || self.at_eof() {
                return;
            }
            if self.peek().kind == TokenKind::RBrace {
                self.bump();
                return;
            }
            if self.at_keyword("sphere") {
                self.sphere(Some(&id), depth + 1);
            } else if self.at_keyword("machine") {
                self.machine(&id);
            } else {
                self.error("`sphere`, `machine`, or `}`");
                self.bump(); // guarantee progress even when sitting on a keyword
                self.recover();
            }
        }
    }

    fn machine(&mut self, sphere: &Id) {
        self.bump(); // `machine`
        let parsed = (|| {
            let id = self.expect_id()?;
            if !self.expect_keyword("thing") {
                return None;
            }
            let thing = self.expect_label()?;
            if !self.expect_keyword("stages") || !self.expect(TokenKind::LBracket, "`[`") {
                return None;
            }
            let mut stages = std::collections::BTreeSet::new();
            loop {
                if self.peek().kind == TokenKind::RBracket {
                    self.bump();
                    break;
                }
                stages.insert(self.expect_stage()?);
            }
            Some(Machine {
                id,
                thing,
                sphere: sphere.clone(),
                stages,
            })
        })();
        match parsed {
            Some(machine) => self.schema.machines.push(machine),
            None => self.recover(),
        }
    }

    fn connection(&mut self, is_trigger: bool) {
        self.bump(); // `flow` or `trigger`
        let parsed = (|| {
            let id = self.expect_id()?;
            if !self.expect(TokenKind::Colon, "`:`") {
                return None;
            }
            let from = self.endpoint()?;
            let arrow_ok = if is_trigger {
                self.expect(TokenKind::TriggerArrow, "`~>`")
            } else {
                self.expect(TokenKind::Arrow, "`->`")
            };
            if !arrow_ok {
                return None;
            }
            let to = self.endpoint()?;
            if !self.expect(TokenKind::Semi, "`;`") {
                return None;
            }
            Some((id, from, to))
        })();
        match parsed {
            Some((id, from, to)) if is_trigger => {
                self.schema.triggers.push(Trigger { id, from, to });
            }
            Some((id, from, to)) => {
                self.schema.flows.push(Flow { id, from, to });
            }
            None => self.recover(),
        }
    }

    fn endpoint(&mut self) -> Option<Endpoint> {
        let machine = self.expect_id()?;
        if !self.expect(TokenKind::Dot, "`.`") {
            return None;
        }
        let stage = self.expect_stage()?;
        Some(Endpoint { machine, stage })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> Id {
        Id::new(s).unwrap()
    }

    const PUT: &str = r#"
schema {
  sphere i "I" {
    machine book_i thing "book" stages [Release Transfer]
  }
  sphere table "table" {
    machine book_t thing "book" stages [Transfer Receive]
  }
  flow f1: book_i.Release -> book_i.Transfer ;
  flow f2: book_i.Transfer -> book_t.Transfer ;
  flow f3: book_t.Transfer -> book_t.Receive ;
}
"#;

    #[test]
    fn parses_put_schema() {
        let schema = parse(PUT).unwrap();
        assert_eq!(schema.spheres.len(), 2);
        assert_eq!(schema.machines.len(), 2);
        assert_eq!(schema.flows.len(), 3);
        assert_eq!(schema.triggers.len(), 0);
        let book_i = schema.machine(&id("book_i")).unwrap();
        assert_eq!(book_i.sphere, id("i"));
        assert_eq!(book_i.thing, "book");
        assert_eq!(
            book_i.stages,
            [StageKind::Release, StageKind::Transfer].into()
        );
        assert_eq!(schema.flows[1].from, Endpoint::new(id("book_i"), StageKind::Transfer));
        assert_eq!(schema.flows[1].to, Endpoint::new(id("book_t"), StageKind::Transfer));
        assert_eq!(fm_core::validate(&schema), vec![]);
    }

    #[test]
    fn comments_change_nothing() {
        let commented = r#"
# The put example.
schema { # open
  sphere i "I" { # inner
    machine book_i thing "book" stages [Release Transfer]
  }
  sphere table "table" {
    machine book_t thing "book" stages [Transfer Receive]
  }
  flow f1: book_i.Release -> book_i.Transfer ; # step one
  flow f2: book_i.Transfer -> book_t.Transfer ;
  flow f3: book_t.Transfer -> book_t.Receive ;
} # close
"#;
        assert_eq!(parse(commented).unwrap(), parse(PUT).unwrap());
    }

    #[test]
    fn parses_empty_schema() {
        let schema = parse("schema {}").unwrap();
        assert!(schema.is_empty());
    }

    #[test]
    fn parses_nested_spheres_and_triggers() {
        let text = r#"
schema {
  sphere outer "Outer" {
    sphere inner "Inner" {
      machine m thing "thing" stages [Create Process]
    }
  }
  trigger t1: m.Create ~> m.Process ;
}
"#;
        let schema = parse(text).unwrap();
        assert_eq!(schema.sphere(&id("inner")).unwrap().parent, Some(id("outer")));
        assert_eq!(schema.machines[0].sphere, id("inner"));
        assert_eq!(schema.triggers.len(), 1);
    }

    #[test]
    fn duplicate_ids_are_not_a_parse_error() {
        let text = r#"
schema {
  sphere a "A" {
    machine a thing "x" stages [Process]
  }
}
"#;
        let schema = parse(text).unwrap();
        assert_eq!(schema.spheres[0].id, schema.machines[0].id);
    }

    #[test]
    fn missing_semicolon_is_reported_and_recovered() {
        let text = r#"
schema {
  sphere i "I" {
    machine m thing "x" stages [Release Transfer]
  }
  flow f1: m.Release -> m.Transfer
  flow f2: m.Release -> m.Transfer ;
}
"#;
        let errors = parse(text).unwrap_err();
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].expected, "`;`");
        assert_eq!(errors[0].found, "`flow`");
        assert_eq!(errors[0].span.line, 7);
    }

    #[test]
    fn bad_stage_name_is_reported() {
        let text = r#"
schema {
  sphere i "I" {
    machine m thing "x" stages [Creat]
  }
}
"#;
        let errors = parse(text).unwrap_err();
        assert_eq!(errors.len(), 1);
        assert!(errors[0].expected.contains("stage name"));
        assert_eq!(errors[0].found, "`Creat`");
    }

    #[test]
    fn stops_after_ten_errors() {
        let mut text = String::from("schema {\n");
        for i in 0..30 {
            text.push_str(&format!("  flow f{i} m.Release -> m.Transfer ;\n"));
        }
        text.push('}');
        let errors = parse(&text).unwrap_err();
        assert_eq!(errors.len(), MAX_ERRORS);
    }

    #[test]
    fn deep_nesting_errors_instead_of_overflowing() {
        let mut text = String::from("schema {\n");
        for i in 0..5_000 {
            text.push_str(&format!("sphere s{i} \"x\" {{\n"));
        }
        let errors = parse(&text).unwrap_err();
        assert!(!errors.is_empty());
        assert!(errors.len() <= MAX_ERRORS);
    }

    #[test]
    fn flow_inside_sphere_is_rejected() {
        let text = r#"
schema {
  sphere i "I" {
    flow f1: a.Release -> a.Transfer ;
  }
}
"#;
        let errors = parse(text).unwrap_err();
        assert_eq!(errors[0].expected, "`sphere`, `machine`, or `}`");
    }

    #[test]
    fn trailing_garbage_is_rejected() {
        let errors = parse("schema {} schema {}").unwrap_err();
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].expected, "end of input");
    }

    #[test]
    fn never_panics_on_garbage() {
        for text in [
            "",
            "schema",
            "schema {",
            "schema } {",
            "\u{0}\u{1}\u{2}",
            "sphere \"\" {}{}{}",
            "schema { sphere a \"l } flow ; ~> ",
            "schema { machine m thing \"x\" stages [Create] }",
        ] {
            let _ = parse(text);
        }
    }
}
