//! Line-oriented reaction language.
//!
//! ```text
//! # species: X1 X2 X3
//! X1 + X2 -> X1 + X2 + X3 ; k=1/2 ; k1
//! 2X1 -> 0
//! ```
//!
//! One reaction per line: `complex -> complex [; k=RATE] [; LABEL]`. A complex
//! is `0` or `INT? NAME (+ INT? NAME)*`. `#` starts a comment; the special
//! comment `# species: A B C` fixes the species order (species that only
//! appear in reactions are appended in first-appearance order). Rates are
//! positive decimals or rationals and are kept exact.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Complex, NetworkError, Reaction, ReactionNetwork};

/// Result of parsing: the network plus the optional rate written on each line.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedNetwork {
    pub network: ReactionNetwork,
    pub rates: Vec<Option<BigRational>>,
}

pub fn parse_network(text: &str) -> Result<ReactionNetwork, NetworkError> {
    parse_with_rates(text).map(|p| p.network)
}

struct RawReaction {
    source: Vec<(String, u32)>,
    target: Vec<(String, u32)>,
    rate: Option<BigRational>,
    label: Option<String>,
    line: usize,
}

pub fn parse_with_rates(text: &str) -> Result<ParsedNetwork, NetworkError> {
    let mut names: Vec<String> = Vec::new();
    let mut raw = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let (body, comment) = match line.find('#') {
            Some(pos) => (&line[..pos], Some(&line[pos + 1..])),
            None => (line, None),
        };
        if let Some(comment) = comment {
            if let Some(list) = comment.trim().strip_prefix("species:") {
                for name in list.split_whitespace() {
                    if !is_identifier(name) {
                        return Err(NetworkError::Parse {
                            line: lineno,
                            column: 1,
                            message: format!("invalid species name `{name}`"),
                        });
                    }
                    if names.iter().any(|n| n == name) {
                        return Err(NetworkError::DuplicateSpecies(name.to_string()));
                    }
                    names.push(name.to_string());
                }
            }
        }
        if body.trim().is_empty() {
            continue;
        }
        let mut cursor = Cursor::new(body, lineno);
        raw.push(cursor.reaction()?);
    }

    for r in &raw {
        for (name, _) in r.source.iter().chain(&r.target) {
            if !names.iter().any(|n| n == name) {
                names.push(name.clone());
            }
        }
    }
    let n = names.len();
    let to_complex = |terms: &[(String, u32)]| {
        let mut c = alloc::vec![0u32; n];
        for (name, m) in terms {
            let i = names.iter().position(|x| x == name).expect("collected above");
            c[i] += m;
        }
        Complex::new(c)
    };
    let mut reactions = Vec::with_capacity(raw.len());
    let mut rates = Vec::with_capacity(raw.len());
    for r in &raw {
        let source = to_complex(&r.source);
        let target = to_complex(&r.target);
        if source == target {
            return Err(NetworkError::Parse {
                line: r.line,
                column: 1,
                message: "source and target complexes are identical".into(),
            });
        }
        reactions.push(Reaction {
            source,
            target,
            label: r.label.clone(),
        });
        rates.push(r.rate.clone());
    }
    let network = ReactionNetwork::new(names, reactions)?;
    Ok(ParsedNetwork { network, rates })
}

/// Canonical text for a network; `rates`, when given, must have one entry per
/// reaction.
pub fn print_network(net: &ReactionNetwork, rates: Option<&[BigRational]>) -> String {
    let mut out = String::new();
    out.push_str("# species:");
    for s in net.species() {
        out.push(' ');
        out.push_str(&s.name);
    }
    out.push('\n');
    for (i, r) in net.reactions().iter().enumerate() {
        out.push_str(&net.format_reaction(r));
        if let Some(rates) = rates {
            let _ = write!(out, " ; k={}", format_rational(&rates[i]));
        }
        if let Some(label) = &r.label {
            let _ = write!(out, " ; {label}");
        }
        out.push('\n');
    }
    out
}

pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `3`, `0.25`, `-1/2`, `1e-3` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let mut all = String::from(int);
    all.push_str(frac);
    let value: BigInt = if all.is_empty() {
        BigInt::zero()
    } else {
        all.parse().ok()?
    };
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = BigRational::from_integer(value);
    if scale >= 0 {
        q *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        q /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -q } else { q })
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn new(src: &str, line: usize) -> Self {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
            line,
        }
    }

    fn error(&self, message: impl Into<String>) -> NetworkError {
        NetworkError::Parse {
            line: self.line,
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn looking_at(&self, s: &str) -> bool {
        let n = s.chars().count();
        self.chars.len() >= self.pos + n && s.chars().zip(&self.chars[self.pos..]).all(|(a, &b)| a == b)
    }

    fn eat(&mut self, s: &str) -> bool {
        let found = self.looking_at(s);
        if found {
            self.pos += s.chars().count();
        }
        found
    }

    fn reaction(&mut self) -> Result<RawReaction, NetworkError> {
        let source = self.complex()?;
        self.skip_ws();
        if !self.eat("->") {
            return Err(self.error("expected `->`"));
        }
        let target = self.complex()?;
        self.skip_ws();
        let mut rate = None;
        let mut label = None;
        while self.peek() == Some(';') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.chars.len() && self.chars[self.pos] != ';' {
                self.pos += 1;
            }
            let field: String = self.chars[start..self.pos].iter().collect();
            let field = field.trim();
            if let Some(value) = field.strip_prefix("k=") {
                if rate.is_some() {
                    return Err(self.error_at(start, "rate given twice"));
                }
                let q = parse_rational(value)
                    .ok_or_else(|| self.error_at(start, format!("invalid rate `{value}`")))?;
                if !q.is_positive() {
                    return Err(self.error_at(start, "rate must be positive"));
                }
                rate = Some(q);
            } else if field.is_empty() {
                return Err(self.error_at(start, "empty field after `;`"));
            } else if label.is_some() {
                return Err(self.error_at(start, "unexpected extra field"));
            } else {
                label = Some(field.to_string());
            }
        }
        if self.pos < self.chars.len() {
            return Err(self.error("unexpected trailing input"));
        }
        Ok(RawReaction {
            source,
            target,
            rate,
            label,
            line: self.line,
        })
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> NetworkError {
        NetworkError::Parse {
            line: self.line,
            column: pos + 1,
            message: message.into(),
        }
    }

    fn complex(&mut self) -> Result<Vec<(String, u32)>, NetworkError> {
        self.skip_ws();
        if self.peek() == Some('0') {
            let save = self.pos;
            self.pos += 1;
            self.skip_ws();
            if matches!(self.peek(), None | Some(';')) || self.looking_at("->") {
                return Ok(Vec::new());
            }
            self.pos = save;
        }
        let mut terms = Vec::new();
        loop {
            terms.push(self.term()?);
            self.skip_ws();
            if self.peek() == Some('+') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<(String, u32), NetworkError> {
        self.skip_ws();
        match self.peek() {
            Some('-') if self.chars.get(self.pos + 1) != Some(&'>') => {
                return Err(self.error("negative coefficient"));
            }
            None | Some('-') | Some('+') | Some(';') => return Err(self.error("expected species term")),
            _ => {}
        }
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let coeff = if self.pos > start {
            let digits: String = self.chars[start..self.pos].iter().collect();
            if matches!(self.peek(), Some('.') | Some('/')) {
                return Err(self.error_at(start, "non-integer coefficient"));
            }
            let value: u32 = digits
                .parse()
                .map_err(|_| self.error_at(start, "coefficient out of range"))?;
            if value == 0 {
                return Err(self.error_at(start, "coefficient must be positive"));
            }
            value
        } else {
            1
        };
        self.skip_ws();
        let name_start = self.pos;
        if !matches!(self.peek(), Some(c) if c.is_ascii_alphabetic() || c == '_') {
            return Err(self.error("expected species name"));
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        let name: String = self.chars[name_start..self.pos].iter().collect();
        Ok((name, coeff))
    }
}
