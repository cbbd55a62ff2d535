//! The textual surfaces of the CLI, with column-accurate errors.
//!
//! Word grammar (letters separated by whitespace, read cyclically):
//!
//! ```text
//! LETTER := label '\''? ':' perm '\''?
//! perm   := 'I' | 'T' | 'G(' theta ',' b ',' d ')'     theta ∈ {1, -1}
//! ```
//!
//! A single `'` marks the conjugate transpose; it is accepted after the
//! permutation (canonical) or after the label, but not both.
//!
//! Transpose-spec grammar: `t=<±1>,b=<expr>,d=<expr>` with
//! `expr := integer | 'N' | 'N/' integer | 'N^' decimal`.

use num_rational::Rational64;

use super::CliError;
use crate::freeness::{DimRule, TransposeSpec};
use crate::moments::{Letter, Word};
use crate::ncpart::Sign;
use crate::perms::{EntryPermutation, Side};

fn parse_err(column: usize, msg: impl Into<String>) -> CliError {
    CliError::Parse {
        column: column + 1,
        msg: msg.into(),
    }
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { text, pos: 0 }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn expect(&mut self, wanted: char) -> Result<(), CliError> {
        match self.peek() {
            Some(c) if c == wanted => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(parse_err(self.pos, format!("expected '{wanted}', found '{c}'"))),
            None => Err(parse_err(self.pos, format!("expected '{wanted}', found end of input"))),
        }
    }

    fn skip_spaces(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if pred(c)) {
            self.bump();
        }
        &self.text[start..self.pos]
    }

    fn integer<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, CliError> {
        let start = self.pos;
        if self.peek() == Some('-') {
            self.bump();
        }
        self.take_while(|c| c.is_ascii_digit());
        self.text[start..self.pos]
            .parse::<T>()
            .map_err(|_| parse_err(start, format!("expected {what}")))
    }

    fn at_end(&self) -> bool {
        self.pos >= self.text.len()
    }
}

fn parse_perm(cur: &mut Cursor<'_>, dim: usize) -> Result<EntryPermutation, CliError> {
    let start = cur.pos;
    match cur.bump() {
        Some('I') => Ok(EntryPermutation::identity(dim)),
        Some('T') => Ok(EntryPermutation::full_transpose(dim)),
        Some('G') => {
            cur.expect('(')?;
            let theta: i64 = cur.integer("ϑ ∈ {1, -1}")?;
            cur.expect(',')?;
            let b: usize = cur.integer("a positive block count")?;
            cur.expect(',')?;
            let d: usize = cur.integer("a positive block size")?;
            cur.expect(')')?;
            if b == 0 || d == 0 {
                return Err(parse_err(start, "block parameters must be positive"));
            }
            if b * d != dim {
                return Err(parse_err(
                    start,
                    format!("G(·,{b},{d}) acts on [{m}]² but N = {dim}", m = b * d),
                ));
            }
            EntryPermutation::gamma(theta, b, d).map_err(|e| parse_err(start, e.to_string()))
        }
        Some(c) => Err(parse_err(cur.pos - c.len_utf8(), format!("unknown permutation '{c}'"))),
        None => Err(parse_err(cur.pos, "expected a permutation")),
    }
}

/// Parse a word in the CLI grammar against matrix dimension `dim`.
pub fn parse_word(text: &str, dim: usize) -> Result<Word, CliError> {
    if dim == 0 {
        return Err(CliError::usage("N must be positive"));
    }
    let mut cur = Cursor::new(text);
    let mut letters = Vec::new();
    loop {
        cur.skip_spaces();
        if cur.at_end() {
            break;
        }
        let label_start = cur.pos;
        let label = cur.take_while(|c| c.is_alphanumeric() || c == '_');
        if label.is_empty() {
            return Err(parse_err(label_start, "expected a letter label"));
        }
        let mut starred = false;
        if cur.peek() == Some('\'') {
            cur.bump();
            starred = true;
        }
        cur.expect(':')?;
        let perm = parse_perm(&mut cur, dim)?;
        if cur.peek() == Some('\'') {
            if starred {
                return Err(parse_err(cur.pos, "duplicate conjugation mark"));
            }
            cur.bump();
            starred = true;
        }
        if let Some(c) = cur.peek() {
            if !c.is_whitespace() {
                return Err(parse_err(cur.pos, format!("unexpected '{c}' after letter")));
            }
        }
        letters.push(Letter::new(
            label,
            perm,
            if starred { Sign::Star } else { Sign::One },
        ));
    }
    if letters.is_empty() {
        return Err(CliError::usage("the word is empty"));
    }
    Word::new(letters, dim).map_err(CliError::from)
}

/// Parse a sign pattern like `uu*uu*` or `uu*vv*`; distinct letters become
/// distinct labels. Returns the colored pattern and the label count.
pub fn parse_pattern(text: &str) -> Result<(Vec<(usize, Sign)>, usize), CliError> {
    let mut labels: Vec<char> = Vec::new();
    let mut pattern = Vec::new();
    let mut cur = Cursor::new(text);
    loop {
        cur.skip_spaces();
        let Some(c) = cur.bump() else { break };
        if !c.is_alphabetic() {
            return Err(parse_err(cur.pos - c.len_utf8(), format!("expected a letter, found '{c}'")));
        }
        let label = match labels.iter().position(|&l| l == c) {
            Some(idx) => idx,
            None => {
                labels.push(c);
                labels.len() - 1
            }
        };
        let sign = if cur.peek() == Some('*') {
            cur.bump();
            Sign::Star
        } else {
            Sign::One
        };
        pattern.push((label, sign));
    }
    if pattern.is_empty() {
        return Err(CliError::usage("the pattern is empty"));
    }
    Ok((pattern, labels.len()))
}

fn parse_decimal_exponent(text: &str, offset: usize) -> Result<Rational64, CliError> {
    let mut parts = text.splitn(2, '.');
    let whole = parts.next().unwrap_or_default();
    let frac = parts.next().unwrap_or_default();
    if whole.is_empty() && frac.is_empty() {
        return Err(parse_err(offset, "expected an exponent"));
    }
    if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(parse_err(offset, format!("bad exponent '{text}'")));
    }
    if frac.len() > 9 {
        return Err(parse_err(offset, "exponent has too many decimal places"));
    }
    let whole_val: i64 = if whole.is_empty() { 0 } else { whole.parse().unwrap() };
    let den = 10i64.pow(frac.len() as u32);
    let frac_val: i64 = if frac.is_empty() { 0 } else { frac.parse().unwrap() };
    Ok(Rational64::new(whole_val * den + frac_val, den))
}

fn parse_dim_expr(text: &str, offset: usize) -> Result<DimRule, CliError> {
    if text == "N" {
        return Ok(DimRule::Full);
    }
    if let Some(rest) = text.strip_prefix("N/") {
        let k: u64 = rest
            .parse()
            .map_err(|_| parse_err(offset, format!("bad divisor in '{text}'")))?;
        if k == 0 {
            return Err(parse_err(offset, "divisor must be positive"));
        }
        return Ok(DimRule::OverK(k));
    }
    if let Some(rest) = text.strip_prefix("N^") {
        return Ok(DimRule::Power(parse_decimal_exponent(rest, offset + 2)?));
    }
    let value: u64 = text
        .parse()
        .map_err(|_| parse_err(offset, format!("bad dimension expression '{text}'")))?;
    if value == 0 {
        return Err(parse_err(offset, "dimensions must be positive"));
    }
    Ok(DimRule::Const(value))
}

/// Parse `t=<±1>,b=<expr>,d=<expr>` into a [`TransposeSpec`].
pub fn parse_transpose_spec(text: &str) -> Result<TransposeSpec, CliError> {
    let mut side: Option<Side> = None;
    let mut b_rule: Option<DimRule> = None;
    let mut d_rule: Option<DimRule> = None;
    let mut offset = 0usize;
    for field in text.split(',') {
        let Some((key, value)) = field.split_once('=') else {
            return Err(parse_err(offset, format!("expected key=value, found '{field}'")));
        };
        let value_offset = offset + key.len() + 1;
        match key.trim() {
            "t" => {
                let theta: i64 = value
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(value_offset, "ϑ must be 1 or -1"))?;
                side = Some(
                    Side::from_theta(theta).map_err(|e| parse_err(value_offset, e.to_string()))?,
                );
            }
            "b" => b_rule = Some(parse_dim_expr(value.trim(), value_offset)?),
            "d" => d_rule = Some(parse_dim_expr(value.trim(), value_offset)?),
            other => {
                return Err(parse_err(offset, format!("unknown field '{other}'")));
            }
        }
        offset += field.len() + 1;
    }
    match (side, b_rule, d_rule) {
        (Some(side), Some(b_rule), Some(d_rule)) => {
            Ok(TransposeSpec::new(side, b_rule, d_rule))
        }
        _ => Err(CliError::usage(format!(
            "spec '{text}' must provide t=, b= and d="
        ))),
    }
}

/// Parse a comma-separated size grid like `8,16,32`.
pub fn parse_grid(text: &str) -> Result<Vec<u64>, CliError> {
    let mut grid = Vec::new();
    for (idx, part) in text.split(',').enumerate() {
        let m: u64 = part
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad grid entry '{part}' at position {}", idx + 1)))?;
        if m == 0 {
            return Err(CliError::usage("grid sizes must be positive"));
        }
        grid.push(m);
    }
    if grid.is_empty() {
        return Err(CliError::usage("the grid is empty"));
    }
    Ok(grid)
}
