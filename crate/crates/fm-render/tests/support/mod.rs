//! A small recursive-descent checker for the DOT subset the renderer
//! emits: digraphs of nodes, edges, attributes, and nested subgraphs.

#[derive(Debug, PartialEq)]
enum Tok {
    Ident(String),
    Str,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Eq,
    Semi,
    Comma,
    Arrow,
}

fn lex(text: &str) -> Result<Vec<Tok>, String> {
    let mut toks = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '{' => {
                chars.next();
                toks.push(Tok::LBrace);
            }
            '}' => {
                chars.next();
                toks.push(Tok::RBrace);
            }
            '[' => {
                chars.next();
                toks.push(Tok::LBracket);
            }
            ']' => {
                chars.next();
                toks.push(Tok::RBracket);
            }
            '=' => {
                chars.next();
                toks.push(Tok::Eq);
            }
            ';' => {
                chars.next();
                toks.push(Tok::Semi);
            }
            ',' => {
                chars.next();
                toks.push(Tok::Comma);
            }
            '-' => {
                chars.next();
                if chars.next() != Some('>') {
                    return Err("stray '-' without '>'".into());
                }
                toks.push(Tok::Arrow);
            }
            '"' => {
                chars.next();
                loop {
                    match chars.next() {
                        None => return Err("unterminated string".into()),
                        Some('\\') => {
                            if chars.next().is_none() {
                                return Err("dangling escape".into());
                            }
                        }
                        Some('"') => break,
                        Some(_) => {}
                    }
                }
                toks.push(Tok::Str);
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut ident = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        ident.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push(Tok::Ident(ident));
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, want: Tok) -> Result<(), String> {
        match self.toks.get(self.pos) {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            other => Err(format!("expected {want:?}, found {other:?}")),
        }
    }

    fn ident(&mut self) -> Result<String, String> {
        match self.toks.get(self.pos) {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(name.clone())
            }
            other => Err(format!("expected identifier, found {other:?}")),
        }
    }

    fn value(&mut self) -> Result<(), String> {
        match self.toks.get(self.pos) {
            Some(Tok::Ident(_)) | Some(Tok::Str) => {
                self.pos += 1;
                Ok(())
            }
            other => Err(format!("expected value, found {other:?}")),
        }
    }

    fn attr_list(&mut self) -> Result<(), String> {
        self.eat(Tok::LBracket)?;
        loop {
            if self.peek() == Some(&Tok::RBracket) {
                self.pos += 1;
                return Ok(());
            }
            self.ident()?;
            self.eat(Tok::Eq)?;
            self.value()?;
            if self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
            }
        }
    }

    fn body(&mut self) -> Result<(), String> {
        self.eat(Tok::LBrace)?;
        loop {
            match self.peek() {
                Some(Tok::RBrace) => {
                    self.pos += 1;
                    return Ok(());
                }
                Some(Tok::Ident(name)) if name == "subgraph" => {
                    self.pos += 1;
                    self.ident()?;
                    self.body()?;
                }
                Some(Tok::Ident(_)) => {
                    self.ident()?;
                    match self.peek() {
                        // graph or node attribute: name=value ;
                        Some(Tok::Eq) => {
                            self.pos += 1;
                            self.value()?;
                        }
                        Some(Tok::Arrow) => {
                            self.pos += 1;
                            self.ident()?;
                            if self.peek() == Some(&Tok::LBracket) {
                                self.attr_list()?;
                            }
                        }
                        _ => {
                            if self.peek() == Some(&Tok::LBracket) {
                                self.attr_list()?;
                            }
                        }
                    }
                    self.eat(Tok::Semi)?;
                }
                other => return Err(format!("expected statement, found {other:?}")),
            }
        }
    }
}

/// Checks that `text` is a digraph in the emitted DOT subset.
pub fn check_dot(text: &str) -> Result<(), String> {
    let toks = lex(text)?;
    let mut parser = Parser { toks: &toks, pos: 0 };
    match parser.ident()?.as_str() {
        "digraph" => {}
        other => return Err(format!("expected digraph, found {other}")),
    }
    if matches!(parser.peek(), Some(Tok::Ident(_))) {
        parser.ident()?;
    }
    parser.body()?;
    if parser.pos != toks.len() {
        return Err("trailing tokens after digraph".into());
    }
    Ok(())
}
