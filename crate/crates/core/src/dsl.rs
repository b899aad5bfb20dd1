//! Line-oriented chemistry description language.
//!
//! ```text
//! # comments run to end of line
//! molecules: a, a1, c
//! reaction r1: a + a1 -> 2 c
//! init: 2 a, 1 a1
//! equiv mutants: a, a1
//! ```
//!
//! `molecules:` may be repeated; every symbol used elsewhere must be
//! declared somewhere in the file. A coefficient is written before the
//! symbol (`2 c`, also `2c`) and defaults to 1.

use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, ParseError, ParseErrorKind, Result};
use crate::multiset::{Multiset, Symbol};
use crate::reaction::{ChemistrySpec, EquivClass, Reaction};

pub fn parse_chemistry(text: &str) -> Result<ChemistrySpec> {
    let mut parser = Parser::default();
    for (i, raw) in text.lines().enumerate() {
        parser.line(i + 1, raw)?;
    }
    parser.finish()
}

fn is_symbol_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '′' | '.' | '*')
}

#[derive(Default)]
struct Parser {
    molecules: Vec<Symbol>,
    reactions: Vec<Reaction>,
    reaction_names: HashSet<String>,
    initial: Option<Multiset>,
    equivalences: Vec<EquivClass>,
    // every symbol use, for the declaration check after the whole file is read
    uses: Vec<(Symbol, usize, usize)>,
}

/// Cursor over one source line with 1-based column reporting.
struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn column(&self) -> usize {
        self.src[..self.pos].chars().count() + 1
    }

    fn error(&self, kind: ParseErrorKind) -> Error {
        Error::Parse(ParseError { line: self.line, column: self.column(), kind })
    }

    fn syntax(&self, msg: impl Into<String>) -> Error {
        self.error(ParseErrorKind::Syntax(msg.into()))
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.src.len()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{token}`")))
        }
    }

    fn peek_is(&mut self, token: &str) -> bool {
        self.skip_ws();
        self.rest().starts_with(token)
    }

    /// Reads an identifier; returns it with its starting column.
    fn ident(&mut self, what: &str) -> Result<(String, usize)> {
        self.skip_ws();
        let col = self.column();
        let rest = self.rest();
        let len: usize = rest.chars().take_while(|&c| is_symbol_char(c)).map(char::len_utf8).sum();
        if len == 0 {
            return Err(self.syntax(format!("expected {what}")));
        }
        if rest.starts_with(|c: char| c.is_ascii_digit()) {
            return Err(self.syntax(format!("{what} must not start with a digit")));
        }
        self.pos += len;
        Ok((rest[..len].to_owned(), col))
    }

    /// `[<int>] <sym>`
    fn term(&mut self) -> Result<(u64, String, usize)> {
        self.skip_ws();
        let rest = self.rest();
        let digits = rest.chars().take_while(char::is_ascii_digit).count();
        let mut coefficient = 1;
        if digits > 0 {
            coefficient = rest[..digits]
                .parse::<u64>()
                .map_err(|_| self.syntax("coefficient out of range"))?;
            if coefficient == 0 {
                return Err(self.syntax("coefficient must be positive"));
            }
            self.pos += digits;
        }
        let (sym, col) = self.ident("molecule symbol")?;
        Ok((coefficient, sym, col))
    }
}

impl Parser {
    fn line(&mut self, line_no: usize, raw: &str) -> Result<()> {
        let content = raw.split('#').next().unwrap_or("");
        let mut cur = Cursor { src: content, pos: 0, line: line_no };
        if cur.at_end() {
            return Ok(());
        }
        if cur.eat("molecules") {
            cur.expect(":")?;
            for (sym, _) in self.symbol_list(&mut cur)? {
                self.molecules.push(Symbol::from(sym));
            }
        } else if cur.eat("init") {
            cur.expect(":")?;
            if self.initial.is_some() {
                return Err(cur.syntax("duplicate `init:` line"));
            }
            let mut m = Multiset::new();
            if !cur.at_end() {
                loop {
                    let (n, sym, col) = cur.term()?;
                    let sym = Symbol::from(sym);
                    self.uses.push((sym.clone(), line_no, col));
                    m.add(sym, n);
                    if !cur.eat(",") {
                        break;
                    }
                }
            }
            self.initial = Some(m);
        } else if cur.eat("reaction") {
            self.reaction(&mut cur)?;
        } else if cur.eat("equiv") {
            let (name, _) = cur.ident("equivalence class name")?;
            cur.expect(":")?;
            let mut members = Vec::new();
            for (sym, col) in self.symbol_list(&mut cur)? {
                let sym = Symbol::from(sym);
                self.uses.push((sym.clone(), line_no, col));
                if members.contains(&sym) {
                    continue;
                }
                if self.equivalences.iter().any(|c| c.members.contains(&sym)) {
                    return Err(Error::Parse(ParseError {
                        line: line_no,
                        column: col,
                        kind: ParseErrorKind::OverlappingEquivalence(sym),
                    }));
                }
                members.push(sym);
            }
            self.equivalences.push(EquivClass { name, members });
        } else {
            return Err(cur.syntax("expected `molecules:`, `reaction`, `init:` or `equiv`"));
        }
        if !cur.at_end() {
            return Err(cur.syntax("unexpected trailing input"));
        }
        Ok(())
    }

    fn symbol_list(&mut self, cur: &mut Cursor<'_>) -> Result<Vec<(String, usize)>> {
        let mut out = vec![cur.ident("molecule symbol")?];
        while cur.eat(",") {
            out.push(cur.ident("molecule symbol")?);
        }
        Ok(out)
    }

    fn side(&mut self, cur: &mut Cursor<'_>, stop_at_arrow: bool) -> Result<Multiset> {
        let mut m = Multiset::new();
        if (stop_at_arrow && cur.peek_is("->")) || cur.at_end() {
            return Ok(m);
        }
        loop {
            let (n, sym, col) = cur.term()?;
            let sym = Symbol::from(sym);
            self.uses.push((sym.clone(), cur.line, col));
            m.add(sym, n);
            if !cur.eat("+") {
                return Ok(m);
            }
        }
    }

    fn reaction(&mut self, cur: &mut Cursor<'_>) -> Result<()> {
        let (name, name_col) = cur.ident("reaction name")?;
        cur.expect(":")?;
        let input = self.side(cur, true)?;
        if input.is_empty() {
            return Err(Error::Parse(ParseError {
                line: cur.line,
                column: name_col,
                kind: ParseErrorKind::EmptyReactionInput(name),
            }));
        }
        cur.expect("->")?;
        let output = self.side(cur, false)?;
        if !self.reaction_names.insert(name.clone()) {
            return Err(Error::Parse(ParseError {
                line: cur.line,
                column: name_col,
                kind: ParseErrorKind::DuplicateReaction(name),
            }));
        }
        self.reactions.push(Reaction::new(name, input, output));
        Ok(())
    }

    fn finish(self) -> Result<ChemistrySpec> {
        let declared: BTreeSet<&Symbol> = self.molecules.iter().collect();
        if let Some((sym, line, column)) = self.uses.iter().find(|(s, _, _)| !declared.contains(s)) {
            return Err(Error::Parse(ParseError {
                line: *line,
                column: *column,
                kind: ParseErrorKind::UndeclaredSymbol(sym.clone()),
            }));
        }
        ChemistrySpec::new(
            self.molecules,
            self.reactions,
            self.initial.unwrap_or_default(),
            self.equivalences,
        )
    }
}
