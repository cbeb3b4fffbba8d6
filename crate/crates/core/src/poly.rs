//! Sparse multivariate polynomials with rational coefficients in a canonical
//! form: terms keyed by exponent in graded lexicographic order, like terms
//! merged, no zero coefficients.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::linalg::Q;

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exponent vector ordered by total degree, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Exponent(pub Vec<u32>);

impl Exponent {
    pub fn zero(n: usize) -> Self {
        Exponent(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Exponent(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        let mut acc = Q::one();
        for (xi, &e) in x.iter().zip(&self.0) {
            if e > 0 {
                acc *= num_traits::pow(xi.clone(), e as usize);
            }
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let mut acc = 1.0;
        for (&xi, &e) in x.iter().zip(&self.0) {
            for _ in 0..e {
                acc *= xi;
            }
        }
        acc
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: Q,
    pub exponent: Exponent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePolynomial {
    nvars: usize,
    terms: BTreeMap<Exponent, Q>,
}

impl SparsePolynomial {
    pub fn zero(nvars: usize) -> Self {
        SparsePolynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        Self::monomial(nvars, c, Exponent::zero(nvars))
    }

    pub fn variable(nvars: usize, i: usize) -> Self {
        Self::monomial(nvars, Q::one(), Exponent::unit(nvars, i))
    }

    pub fn monomial(nvars: usize, c: Q, e: Exponent) -> Self {
        assert_eq!(e.0.len(), nvars, "exponent length");
        let mut p = Self::zero(nvars);
        p.add_term(e, c);
        p
    }

    /// Sum of all variables.
    pub fn linear_sum(nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        for i in 0..nvars {
            p.add_term(Exponent::unit(nvars, i), Q::one());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &Exponent) -> Q {
        self.terms.get(e).cloned().unwrap_or_else(Q::zero)
    }

    /// Terms from highest to lowest in graded lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Q)> {
        self.terms.iter().rev()
    }

    pub fn monomials(&self) -> Vec<Monomial> {
        self.terms()
            .map(|(e, c)| Monomial {
                coeff: c.clone(),
                exponent: e.clone(),
            })
            .collect()
    }

    pub fn add_term(&mut self, e: Exponent, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }

    pub fn scale(&self, k: &Q) -> Self {
        if k.is_zero() {
            return Self::zero(self.nvars);
        }
        SparsePolynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1.mul(e2), c1 * c2);
            }
        }
        out
    }

    /// Total degree if all terms share one; `None` for zero or mixed degrees.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(Exponent::degree);
        let d = degrees.next()?;
        degrees.all(|x| x == d).then_some(d)
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        self.terms
            .iter()
            .fold(Q::zero(), |acc, (e, c)| acc + c * e.eval(x))
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| q_to_f64(c) * e.eval_f64(x))
            .sum()
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a SparsePolynomial,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        for (k, (e, c)) in self.poly.terms().enumerate() {
            let mag = c.abs();
            match (k, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mut first = true;
            if !mag.is_one() || e.degree() == 0 {
                write!(f, "{}", crate::network::text::format_rational(&mag))?;
                first = false;
            }
            for (i, &p) in e.0.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                f.write_str(&self.names[i])?;
                if p > 1 {
                    write!(f, "^{p}")?;
                }
            }
        }
        Ok(())
    }
}

/// One polynomial per species.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolynomialField {
    components: Vec<SparsePolynomial>,
}

impl PolynomialField {
    pub fn zero(n: usize) -> Self {
        PolynomialField {
            components: vec![SparsePolynomial::zero(n); n],
        }
    }

    pub fn new(components: Vec<SparsePolynomial>) -> Self {
        let n = components.len();
        assert!(components.iter().all(|p| p.nvars() == n), "field must be square");
        PolynomialField { components }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[SparsePolynomial] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &SparsePolynomial {
        &self.components[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut SparsePolynomial {
        &mut self.components[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(SparsePolynomial::is_zero)
    }

    pub fn sum(&self) -> SparsePolynomial {
        self.components
            .iter()
            .fold(SparsePolynomial::zero(self.dim()), |acc, p| acc.add(p))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.components.iter().zip(&other.components).map(|(a, b)| a.add(b)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.components.iter().zip(&other.components).map(|(a, b)| a.sub(b)).collect())
    }

    pub fn scale(&self, k: &Q) -> Self {
        Self::new(self.components.iter().map(|p| p.scale(k)).collect())
    }

    pub fn eval(&self, x: &[Q]) -> Vec<Q> {
        self.components.iter().map(|p| p.eval(x)).collect()
    }

    pub fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|p| p.eval_f64(x)).collect()
    }

    pub fn compile(&self) -> CompiledField {
        CompiledField::new(self)
    }

    /// `dx1/dt = ...` lines, one per component, using `x1..xn`.
    pub fn to_text(&self) -> String {
        let names: Vec<String> = (1..=self.dim()).map(|i| alloc::format!("x{i}")).collect();
        let mut out = String::new();
        for (i, p) in self.components.iter().enumerate() {
            out.push_str(&alloc::format!("d{}/dt = {}\n", names[i], p.display(&names)));
        }
        out
    }
}

/// Floating-point evaluation form of a field for integrators.
#[derive(Debug, Clone)]
pub struct CompiledField {
    dim: usize,
    // (component, coefficient, sparse exponent)
    #[allow(clippy::type_complexity)]
    terms: Vec<(usize, f64, Vec<(usize, u32)>)>,
}

impl CompiledField {
    pub fn new(field: &PolynomialField) -> Self {
        let mut terms = Vec::new();
        for (i, p) in field.components().iter().enumerate() {
            for (e, c) in p.terms() {
                let sparse = e.0.iter().enumerate().filter(|(_, &a)| a > 0).map(|(j, &a)| (j, a)).collect();
                terms.push((i, q_to_f64(c), sparse));
            }
        }
        CompiledField { dim: field.dim(), terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (i, c, e) in &self.terms {
            let mut m = *c;
            for &(j, a) in e {
                for _ in 0..a {
                    m *= x[j];
                }
            }
            out[*i] += m;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("polynomial parse error at byte {pos}: {message}")]
pub struct PolyParseError {
    pub pos: usize,
    pub message: String,
}

/// Parses a polynomial in `x1..xn` such as `x1^2*x2 - 3/2*x3 + 1`.
pub fn parse_polynomial(text: &str, nvars: usize) -> Result<SparsePolynomial, PolyParseError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let err = |pos: usize, m: &str| PolyParseError {
        pos,
        message: String::from(m),
    };
    let skip = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let mut out = SparsePolynomial::zero(nvars);
    let mut first = true;
    loop {
        skip(&mut pos);
        if pos >= bytes.len() {
            if first {
                return Err(err(pos, "empty polynomial"));
            }
            return Ok(out);
        }
        let mut sign = Q::one();
        if bytes[pos] == b'+' || bytes[pos] == b'-' {
            if bytes[pos] == b'-' {
                sign = -sign;
            }
            pos += 1;
            skip(&mut pos);
        } else if !first {
            return Err(err(pos, "expected '+' or '-'"));
        }
        first = false;
        let mut coeff = sign;
        let mut exp = Exponent::zero(nvars);
        loop {
            skip(&mut pos);
            let start = pos;
            if pos < bytes.len() && bytes[pos] == b'x' {
                pos += 1;
                let ds = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                let idx: usize = text[ds..pos].parse().map_err(|_| err(ds, "expected variable index"))?;
                if idx == 0 || idx > nvars {
                    return Err(err(ds, "variable index out of range"));
                }
                let mut power = 1u32;
                skip(&mut pos);
                if pos < bytes.len() && bytes[pos] == b'^' {
                    pos += 1;
                    skip(&mut pos);
                    let ps = pos;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    power = text[ps..pos].parse().map_err(|_| err(ps, "expected exponent"))?;
                }
                exp.0[idx - 1] += power;
            } else {
                while pos < bytes.len() && (bytes[pos].is_ascii_digit() || matches!(bytes[pos], b'.' | b'/' | b'e' | b'E')) {
                    pos += 1;
                }
                let c = crate::network::text::parse_rational(&text[start..pos])
                    .ok_or_else(|| err(start, "expected number or variable"))?;
                coeff *= c;
            }
            skip(&mut pos);
            if pos < bytes.len() && bytes[pos] == b'*' {
                pos += 1;
            } else {
                break;
            }
        }
        out.add_term(exp, coeff);
    }
}

/// Inverse of [`PolynomialField::to_text`].
pub fn parse_field(text: &str) -> Result<PolynomialField, PolyParseError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let n = lines.len();
    let mut comps = vec![None; n];
    for (line, l) in lines {
        let bad = |m: &str| PolyParseError {
            pos: line,
            message: String::from(m),
        };
        let (lhs, rhs) = l.split_once('=').ok_or_else(|| bad("expected 'dxi/dt = ...'"))?;
        let idx: usize = lhs
            .trim()
            .strip_prefix("dx")
            .and_then(|s| s.strip_suffix("/dt"))
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| bad("expected 'dxi/dt' on the left"))?;
        if idx == 0 || idx > n || comps[idx - 1].is_some() {
            return Err(bad("component index out of range or repeated"));
        }
        comps[idx - 1] = Some(parse_polynomial(rhs, n)?);
    }
    Ok(PolynomialField::new(comps.into_iter().map(|c| c.expect("all set")).collect()))
}
