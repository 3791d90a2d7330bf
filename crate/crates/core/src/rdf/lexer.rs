//! Character cursor and token readers shared by the Turtle, N-Triples and
//! query parsers. Positions are 1-based.

use super::{RdfError, XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER};

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Self::at_line(src, 1)
    }

    pub fn at_line(src: &'a str, line: usize) -> Self {
        Cursor {
            src,
            pos: 0,
            line,
            column: 1,
        }
    }

    pub fn position(&self) -> (usize, usize) {
        (self.line, self.column)
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn is_eof(&self) -> bool {
        self.pos >= self.src.len()
    }

    pub fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub fn peek_nth(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    pub fn eat(&mut self, expected: char) -> bool {
        if self.peek() == Some(expected) {
            self.bump();
            true
        } else {
            false
        }
    }

    /// Case-insensitive keyword match that must not run into a name
    /// character.
    pub fn eat_keyword(&mut self, keyword: &str) -> bool {
        let rest = self.rest();
        if rest.len() < keyword.len() || !rest[..keyword.len()].eq_ignore_ascii_case(keyword) {
            return false;
        }
        if rest[keyword.len()..]
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_' || c == ':')
        {
            return false;
        }
        for _ in 0..keyword.chars().count() {
            self.bump();
        }
        true
    }

    pub fn skip_whitespace_and_comments(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
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

    /// Skips spaces and tabs only (line-oriented formats).
    pub fn skip_blanks(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.bump();
        }
    }

    pub fn error(&self, message: impl Into<String>) -> RdfError {
        RdfError::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    pub fn expect(&mut self, c: char, what: &str) -> Result<(), RdfError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    /// Reads `<...>` and returns the raw IRI text between the brackets.
    pub fn read_iriref(&mut self) -> Result<String, RdfError> {
        self.expect('<', "'<' opening an IRI")?;
        let mut out = String::new();
        loop {
            match self.peek() {
                Some('>') => {
                    self.bump();
                    return Ok(out);
                }
                Some(c) if c <= ' ' || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`' | '\\') => {
                    return Err(self.error(format!("unexpected character {c:?} inside IRI")));
                }
                Some(c) => {
                    self.bump();
                    out.push(c);
                }
                None => return Err(self.error("expected '>' closing the IRI")),
            }
        }
    }

    /// Reads a single-line string literal quoted with `"` or `'`.
    pub fn read_string(&mut self) -> Result<String, RdfError> {
        let quote = match self.peek() {
            Some(q @ ('"' | '\'')) => q,
            _ => return Err(self.error("expected string literal")),
        };
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                Some(c) if c == quote => return Ok(out),
                Some('\\') => out.push(self.read_escape()?),
                Some('\n' | '\r') | None => {
                    return Err(self.error(format!("expected {quote} closing the string literal")))
                }
                Some(c) => out.push(c),
            }
        }
    }

    fn read_escape(&mut self) -> Result<char, RdfError> {
        let c = match self.bump() {
            Some('t') => '\t',
            Some('b') => '\u{8}',
            Some('n') => '\n',
            Some('r') => '\r',
            Some('f') => '\u{c}',
            Some('"') => '"',
            Some('\'') => '\'',
            Some('\\') => '\\',
            Some('u') => return self.read_hex_char(4),
            Some('U') => return self.read_hex_char(8),
            _ => return Err(self.error("expected escape sequence")),
        };
        Ok(c)
    }

    fn read_hex_char(&mut self, digits: usize) -> Result<char, RdfError> {
        let mut value = 0u32;
        for _ in 0..digits {
            let d = self
                .peek()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.error("expected hex digit in \\u escape"))?;
            self.bump();
            value = value * 16 + d;
        }
        char::from_u32(value).ok_or_else(|| self.error("escape is not a Unicode scalar value"))
    }

    /// Reads a language tag after the `@` has been consumed.
    pub fn read_lang_tag(&mut self) -> Result<String, RdfError> {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == '-')
        {
            self.bump();
        }
        let tag = &self.src[start..self.pos];
        if super::is_valid_lang_tag(tag) {
            Ok(tag.to_owned())
        } else {
            Err(self.error("expected language tag"))
        }
    }

    /// Reads a blank node label after `_:` has been consumed.
    pub fn read_blank_label(&mut self) -> Result<String, RdfError> {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            self.bump();
        }
        if self.pos == start {
            return Err(self.error("expected blank node label"));
        }
        Ok(self.src[start..self.pos].to_owned())
    }

    /// Reads `prefix:local`. The caller has established that a name or `:`
    /// starts here.
    pub fn read_prefixed_name(&mut self) -> Result<(String, String), RdfError> {
        let start = self.pos;
        while self.peek().is_some_and(is_name_char) {
            self.bump();
        }
        let prefix = &self.src[start..self.pos];
        if !is_valid_prefix_name(prefix) || self.peek() != Some(':') {
            return Err(self.error("expected prefixed name"));
        }
        self.bump();
        let local_start = self.pos;
        let mut end = self.pos;
        for (i, c) in self.rest().char_indices() {
            if is_name_char(c) {
                if c != '.' {
                    end = local_start + i + c.len_utf8();
                }
            } else {
                break;
            }
        }
        let local = &self.src[local_start..end];
        if local.starts_with(['-', '.']) {
            return Err(self.error("expected local name"));
        }
        while self.pos < end {
            self.bump();
        }
        Ok((prefix.to_owned(), local.to_owned()))
    }

    /// Reads an integer, decimal or double shorthand literal. Returns the
    /// exact lexical form and its datatype IRI.
    pub fn read_number(&mut self) -> Result<(String, &'static str), RdfError> {
        let start = self.pos;
        if matches!(self.peek(), Some('+' | '-')) {
            self.bump();
        }
        let mut digits = self.eat_digits();
        let mut datatype = XSD_INTEGER;
        if self.peek() == Some('.') && self.peek_nth(1).is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            digits += self.eat_digits();
            datatype = XSD_DECIMAL;
        }
        if digits == 0 {
            return Err(self.error("expected numeric literal"));
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            self.bump();
            if matches!(self.peek(), Some('+' | '-')) {
                self.bump();
            }
            if self.eat_digits() == 0 {
                return Err(self.error("expected exponent digits"));
            }
            datatype = XSD_DOUBLE;
        }
        Ok((self.src[start..self.pos].to_owned(), datatype))
    }

    fn eat_digits(&mut self) -> usize {
        let mut n = 0;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            n += 1;
        }
        n
    }
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.')
}

pub(crate) fn is_valid_prefix_name(name: &str) -> bool {
    if name.is_empty() {
        return true;
    }
    name.starts_with(|c: char| c.is_ascii_alphabetic())
        && !name.ends_with('.')
        && name.chars().all(is_name_char)
}

pub(crate) fn is_valid_local_name(name: &str) -> bool {
    name.is_empty()
        || (name.starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_')
            && !name.ends_with('.')
            && name.chars().all(is_name_char))
}
