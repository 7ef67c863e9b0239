//! Minimal strict XML reader/writer for the closed kaf/tcf grammars.
//!
//! Only elements, attributes, character data and the five standard
//! character entities are understood. Anything else (processing
//! instructions, comments, doctypes, unknown entities) is rejected.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub name: String,
    pub attrs: Vec<(String, String)>,
    pub children: Vec<Node>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Element(Element),
    Text(String),
}

impl Element {
    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }

    pub fn child_elements(&self) -> impl Iterator<Item = &Element> {
        self.children.iter().filter_map(|n| match n {
            Node::Element(e) => Some(e),
            Node::Text(_) => None,
        })
    }

    /// Concatenated character data of the direct children.
    pub fn text(&self) -> String {
        let mut out = String::new();
        for n in &self.children {
            if let Node::Text(t) = n {
                out.push_str(t);
            }
        }
        out
    }
}

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

struct Parser<'a> {
    input: &'a str,
    pos: usize,
}

/// Parses a document consisting of exactly one root element, optionally
/// surrounded by whitespace.
pub fn parse_document(input: &str) -> Result<Element, String> {
    let mut p = Parser { input, pos: 0 };
    p.skip_whitespace();
    let root = p.parse_element()?;
    p.skip_whitespace();
    if p.pos != p.input.len() {
        return Err(format!("trailing content after root element at byte {}", p.pos));
    }
    Ok(root)
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.input[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_whitespace(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.bump();
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), String> {
        if self.rest().starts_with(s) {
            self.pos += s.len();
            Ok(())
        } else {
            Err(format!("expected `{s}` at byte {}", self.pos))
        }
    }

    fn parse_name(&mut self) -> Result<String, String> {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            self.bump();
        }
        if self.pos == start {
            return Err(format!("expected a name at byte {}", self.pos));
        }
        Ok(self.input[start..self.pos].to_string())
    }

    fn parse_element(&mut self) -> Result<Element, String> {
        self.expect("<")?;
        if matches!(self.peek(), Some('?') | Some('!')) {
            return Err(format!(
                "processing instructions and declarations are not accepted (byte {})",
                self.pos
            ));
        }
        let name = self.parse_name()?;
        let mut attrs = Vec::new();
        loop {
            let before = self.pos;
            self.skip_whitespace();
            match self.peek() {
                Some('/') => {
                    self.expect("/>")?;
                    return Ok(Element {
                        name,
                        attrs,
                        children: Vec::new(),
                    });
                }
                Some('>') => {
                    self.bump();
                    break;
                }
                Some(_) if self.pos > before => {
                    let attr_name = self.parse_name()?;
                    self.expect("=\"")?;
                    let value = self.parse_until_quote()?;
                    attrs.push((attr_name, value));
                }
                _ => return Err(format!("malformed tag at byte {}", self.pos)),
            }
        }
        let mut children = Vec::new();
        loop {
            if self.rest().starts_with("</") {
                self.expect("</")?;
                let close = self.parse_name()?;
                self.expect(">")?;
                if close != name {
                    return Err(format!("`<{name}>` closed by `</{close}>`"));
                }
                return Ok(Element {
                    name,
                    attrs,
                    children,
                });
            }
            match self.peek() {
                Some('<') => children.push(Node::Element(self.parse_element()?)),
                Some(_) => {
                    let text = self.parse_text()?;
                    children.push(Node::Text(text));
                }
                None => return Err(format!("`<{name}>` is never closed")),
            }
        }
    }

    fn parse_until_quote(&mut self) -> Result<String, String> {
        let mut out = String::new();
        loop {
            match self.peek() {
                Some('"') => {
                    self.bump();
                    return Ok(out);
                }
                Some('<') | None => return Err(format!("unterminated attribute at byte {}", self.pos)),
                Some('&') => out.push(self.parse_entity()?),
                Some(c) => {
                    self.bump();
                    out.push(c);
                }
            }
        }
    }

    fn parse_text(&mut self) -> Result<String, String> {
        let mut out = String::new();
        loop {
            match self.peek() {
                Some('<') | None => return Ok(out),
                Some('&') => out.push(self.parse_entity()?),
                Some(c) => {
                    self.bump();
                    out.push(c);
                }
            }
        }
    }

    fn parse_entity(&mut self) -> Result<char, String> {
        let at = self.pos;
        for (entity, ch) in [
            ("&amp;", '&'),
            ("&lt;", '<'),
            ("&gt;", '>'),
            ("&quot;", '"'),
            ("&apos;", '\''),
        ] {
            if self.rest().starts_with(entity) {
                self.pos += entity.len();
                return Ok(ch);
            }
        }
        Err(format!("unknown entity at byte {at}"))
    }
}
