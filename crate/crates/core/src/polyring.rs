//! Polynomials over `Z_N`, their text syntax, and the hypergraph/multigraph
//! inputs used to build `h`-type polynomials and partition functions.
//!
//! Variables are written `x1 … xn` in text and addressed by 0-based index
//! in the API (`x1` is index 0).
//!
//! Text grammar (whitespace insignificant):
//!
//! ```text
//! poly   := ['+'|'-'] term (('+'|'-') term)*
//! term   := [integer ['*']] factor ('*'? factor)* | integer
//! factor := 'x' index ['^' integer]
//! ```

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Largest accepted exponent of a single variable.
pub const MAX_EXPONENT: u32 = (1 << 31) - 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("variable x{index} at position {position} is outside x1..x{nvars}")]
    VariableOutOfRange { index: usize, nvars: usize, position: usize },
    #[error("monomial {monomial} has degree {degree}, expected at most 2")]
    Degree { monomial: String, degree: u64 },
    #[error("expected {expected} values, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("template has {expected} variables but hypergraph edges have arity {found}")]
    Arity { expected: usize, found: usize },
    #[error("modulus must be positive, got {0}")]
    InvalidModulus(BigInt),
    #[error("malformed graph: {0}")]
    Graph(String),
}

type Result<T> = std::result::Result<T, PolyError>;

/// A polynomial in `n` variables over `Z_N`, stored as a map from exponent
/// vectors to nonzero coefficients in `[0, N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePoly {
    nvars: usize,
    modulus: BigInt,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl SparsePoly {
    pub fn zero(nvars: usize, modulus: &BigInt) -> Result<Self> {
        if !modulus.is_positive() {
            return Err(PolyError::InvalidModulus(modulus.clone()));
        }
        Ok(SparsePoly { nvars, modulus: modulus.clone(), terms: BTreeMap::new() })
    }

    /// Builds a polynomial from `(coefficient, exponents)` pairs; repeated
    /// exponent vectors accumulate.
    pub fn from_terms<I>(nvars: usize, modulus: &BigInt, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BigInt, Vec<u32>)>,
    {
        let mut poly = Self::zero(nvars, modulus)?;
        for (coeff, exps) in terms {
            if exps.len() != nvars {
                return Err(PolyError::LengthMismatch { expected: nvars, found: exps.len() });
            }
            poly.add_term(&coeff, exps);
        }
        Ok(poly)
    }

    pub fn parse(text: &str, modulus: &BigInt, nvars: usize) -> Result<Self> {
        parse_poly(text, modulus, nvars)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    /// Nonzero terms as `(coefficient, exponents)`.
    pub fn terms(&self) -> impl Iterator<Item = (&BigInt, &[u32])> {
        self.terms.iter().map(|(e, c)| (c, e.as_slice()))
    }

    pub fn coefficient(&self, exps: &[u32]) -> BigInt {
        self.terms.get(exps).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u64 {
        self.terms.keys().map(|e| total_degree(e)).max().unwrap_or(0)
    }

    pub(crate) fn add_term(&mut self, coeff: &BigInt, exps: Vec<u32>) {
        let c = coeff.mod_floor(&self.modulus);
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps).or_insert_with(BigInt::zero);
        *entry = (&*entry + c).mod_floor(&self.modulus);
        if entry.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    fn add_assign(&mut self, other: &SparsePoly) {
        for (c, e) in other.terms() {
            self.add_term(c, e.to_vec());
        }
    }

    fn mul(&self, other: &SparsePoly) -> SparsePoly {
        let mut out = SparsePoly { nvars: self.nvars, modulus: self.modulus.clone(), terms: BTreeMap::new() };
        for (ca, ea) in self.terms() {
            for (cb, eb) in other.terms() {
                let exps = ea.iter().zip(eb).map(|(a, b)| a.saturating_add(*b)).collect();
                out.add_term(&(ca * cb), exps);
            }
        }
        out
    }

    fn constant(nvars: usize, modulus: &BigInt, c: &BigInt) -> SparsePoly {
        let mut out = SparsePoly { nvars, modulus: modulus.clone(), terms: BTreeMap::new() };
        out.add_term(c, vec![0; nvars]);
        out
    }

    /// `f(x) mod N`.
    pub fn eval_point(&self, x: &[BigInt]) -> Result<BigInt> {
        if x.len() != self.nvars {
            return Err(PolyError::LengthMismatch { expected: self.nvars, found: x.len() });
        }
        let mut acc = BigInt::zero();
        for (c, e) in self.terms() {
            let mut term = c.clone();
            for (xi, &ei) in x.iter().zip(e) {
                if ei > 0 {
                    term = term * xi.mod_floor(&self.modulus).modpow(&BigInt::from(ei), &self.modulus) % &self.modulus;
                }
            }
            acc += term;
        }
        Ok(acc.mod_floor(&self.modulus))
    }

    /// `a·f` with coefficients reduced modulo `new_modulus`.
    pub fn scalar_retarget(&self, a: &BigInt, new_modulus: &BigInt) -> Result<SparsePoly> {
        let mut out = SparsePoly::zero(self.nvars, new_modulus)?;
        for (c, e) in self.terms() {
            out.add_term(&(c * a), e.to_vec());
        }
        Ok(out)
    }

    /// The same polynomial with `extra` unused variables appended.
    pub fn with_extra_vars(&self, extra: usize) -> SparsePoly {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e = e.clone();
                e.resize(self.nvars + extra, 0);
                (e, c.clone())
            })
            .collect();
        SparsePoly { nvars: self.nvars + extra, modulus: self.modulus.clone(), terms }
    }

    /// Converts to dense quadratic form; fails on any monomial of degree > 2.
    pub fn as_quadratic(&self) -> Result<QuadraticPoly> {
        let mut q = QuadraticPoly::zero(self.nvars, &self.modulus)?;
        for (c, e) in self.terms() {
            let degree = total_degree(e);
            let vars: Vec<usize> = e
                .iter()
                .enumerate()
                .flat_map(|(i, &k)| std::iter::repeat_n(i, k.min(3) as usize))
                .collect();
            match (degree, vars.as_slice()) {
                (0, _) => q.constant = c.clone(),
                (1, [i]) => q.linear[*i] = c.clone(),
                (2, [i, j]) => q.quad[*i][*j] = c.clone(),
                _ => {
                    return Err(PolyError::Degree { monomial: monomial_string(e), degree });
                }
            }
        }
        Ok(q)
    }
}

fn total_degree(e: &[u32]) -> u64 {
    e.iter().map(|&k| k as u64).sum()
}

fn monomial_string(e: &[u32]) -> String {
    let factors: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, &k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, k) })
        .collect();
    if factors.is_empty() {
        "1".to_string()
    } else {
        factors.join("*")
    }
}

impl fmt::Display for SparsePoly {
    /// Canonical text form, highest total degree first; parses back to the
    /// same polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut entries: Vec<(&Vec<u32>, &BigInt)> = self.terms.iter().collect();
        entries.sort_by(|a, b| total_degree(b.0).cmp(&total_degree(a.0)).then_with(|| b.0.cmp(a.0)));
        let rendered: Vec<String> = entries
            .into_iter()
            .map(|(e, c)| {
                if total_degree(e) == 0 {
                    c.to_string()
                } else if c.is_one() {
                    monomial_string(e)
                } else {
                    format!("{}*{}", c, monomial_string(e))
                }
            })
            .collect();
        write!(f, "{}", rendered.join(" + "))
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(PolyError::Syntax { position: self.pos, message: message.into() })
    }

    fn digits(&mut self) -> Option<&str> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits"))
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        match self.digits() {
            Some(d) => Ok(d.parse().expect("digit run parses")),
            None => self.error("expected an integer"),
        }
    }

    fn factor(&mut self, exps: &mut [u32]) -> Result<()> {
        self.skip_ws();
        let at = self.pos;
        if self.src.get(self.pos) != Some(&b'x') {
            return self.error("expected a variable");
        }
        self.pos += 1;
        let index: usize = match self.digits() {
            Some(d) => d.parse().unwrap_or(usize::MAX),
            None => return self.error("expected a variable index after 'x'"),
        };
        if index == 0 || index > self.nvars {
            return Err(PolyError::VariableOutOfRange { index, nvars: self.nvars, position: at });
        }
        let mut power = 1u64;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let p = self.integer()?;
            power = match p.to_u64() {
                Some(p) if p <= MAX_EXPONENT as u64 => p,
                _ => return self.error(format!("exponent {p} exceeds {MAX_EXPONENT}")),
            };
        }
        let total = exps[index - 1] as u64 + power;
        if total > MAX_EXPONENT as u64 {
            return self.error(format!("exponent of x{index} exceeds {MAX_EXPONENT}"));
        }
        exps[index - 1] = total as u32;
        Ok(())
    }

    fn term(&mut self) -> Result<(BigInt, Vec<u32>)> {
        let mut coeff = BigInt::one();
        let mut exps = vec![0u32; self.nvars];
        loop {
            match self.peek() {
                Some(b'x') => self.factor(&mut exps)?,
                Some(c) if c.is_ascii_digit() => coeff *= self.integer()?,
                _ => return self.error("expected an integer or a variable"),
            }
            match self.peek() {
                Some(b'*') => self.pos += 1,
                Some(b'x') => {}
                _ => return Ok((coeff, exps)),
            }
        }
    }

    fn poly(&mut self, modulus: &BigInt) -> Result<SparsePoly> {
        let mut poly = SparsePoly::zero(self.nvars, modulus)?;
        let mut negate = false;
        match self.peek() {
            Some(b'-') => {
                negate = true;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            None => return self.error("empty polynomial"),
            _ => {}
        }
        loop {
            let (c, e) = self.term()?;
            poly.add_term(&if negate { -c } else { c }, e);
            match self.peek() {
                None => return Ok(poly),
                Some(b'+') => negate = false,
                Some(b'-') => negate = true,
                Some(_) => return self.error("expected '+' or '-'"),
            }
            self.pos += 1;
        }
    }
}

/// Parses the text grammar into a polynomial over `Z_modulus` in `nvars`
/// variables.
pub fn parse_poly(text: &str, modulus: &BigInt, nvars: usize) -> Result<SparsePoly> {
    Parser { src: text.as_bytes(), pos: 0, nvars }.poly(modulus)
}

/// Dense quadratic polynomial
/// `Σ_{i≤j} c_{i,j} x_i x_j + Σ c_i x_i + c₀` over `Z_N`.
///
/// Indices are 0-based; `quad(i, j)` and `quad(j, i)` address the same
/// coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticPoly {
    pub(crate) nvars: usize,
    pub(crate) modulus: BigInt,
    /// Upper triangle (`j >= i`) of the coefficient matrix; entries below the
    /// diagonal stay zero.
    pub(crate) quad: Vec<Vec<BigInt>>,
    pub(crate) linear: Vec<BigInt>,
    pub(crate) constant: BigInt,
}

impl QuadraticPoly {
    pub fn zero(nvars: usize, modulus: &BigInt) -> Result<Self> {
        if !modulus.is_positive() {
            return Err(PolyError::InvalidModulus(modulus.clone()));
        }
        Ok(QuadraticPoly {
            nvars,
            modulus: modulus.clone(),
            quad: vec![vec![BigInt::zero(); nvars]; nvars],
            linear: vec![BigInt::zero(); nvars],
            constant: BigInt::zero(),
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn quad(&self, i: usize, j: usize) -> &BigInt {
        &self.quad[i.min(j)][i.max(j)]
    }

    pub fn linear(&self, i: usize) -> &BigInt {
        &self.linear[i]
    }

    pub fn constant(&self) -> &BigInt {
        &self.constant
    }

    pub fn set_quad(&mut self, i: usize, j: usize, c: &BigInt) {
        self.quad[i.min(j)][i.max(j)] = c.mod_floor(&self.modulus);
    }

    pub fn set_linear(&mut self, i: usize, c: &BigInt) {
        self.linear[i] = c.mod_floor(&self.modulus);
    }

    pub fn set_constant(&mut self, c: &BigInt) {
        self.constant = c.mod_floor(&self.modulus);
    }

    pub fn to_sparse(&self) -> SparsePoly {
        let n = self.nvars;
        let mut out = SparsePoly { nvars: n, modulus: self.modulus.clone(), terms: BTreeMap::new() };
        for i in 0..n {
            for j in i..n {
                let mut e = vec![0; n];
                e[i] += 1;
                e[j] += 1;
                out.add_term(&self.quad[i][j], e);
            }
            let mut e = vec![0; n];
            e[i] = 1;
            out.add_term(&self.linear[i], e);
        }
        out.add_term(&self.constant, vec![0; n]);
        out
    }
}

/// An `r`-uniform hypergraph with ordered edges over vertices `1..=n`,
/// matching variable names `x1..xn`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    arity: usize,
    nverts: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(arity: usize, nverts: usize) -> Self {
        Hypergraph { arity, nverts, edges: Vec::new() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn nverts(&self) -> usize {
        self.nverts
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn add_edge(&mut self, edge: Vec<usize>) -> Result<()> {
        if edge.len() != self.arity {
            return Err(PolyError::Graph(format!("edge {edge:?} does not have arity {}", self.arity)));
        }
        if let Some(v) = edge.iter().find(|&&v| v == 0 || v > self.nverts) {
            return Err(PolyError::Graph(format!("vertex {v} outside 1..={}", self.nverts)));
        }
        self.edges.push(edge);
        Ok(())
    }

    /// Reads `"r n"` followed by one edge of `r` vertex indices per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let header = parse_numbers(lines.next().ok_or_else(|| PolyError::Graph("missing header".into()))?)?;
        let [arity, nverts] = header[..] else {
            return Err(PolyError::Graph("header must be \"r n\"".into()));
        };
        let mut g = Hypergraph::new(arity, nverts);
        for line in lines {
            g.add_edge(parse_numbers(line)?)?;
        }
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.arity, self.nverts);
        for e in &self.edges {
            let cols: Vec<String> = e.iter().map(|v| v.to_string()).collect();
            out.push_str(&cols.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Undirected multigraph without self-loops over vertices `0..n`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Multigraph {
    nverts: usize,
    edges: BTreeMap<(usize, usize), u64>,
}

impl Multigraph {
    pub fn new(nverts: usize) -> Self {
        Multigraph { nverts, edges: BTreeMap::new() }
    }

    pub fn nverts(&self) -> usize {
        self.nverts
    }

    /// Adds `mult` parallel edges between `u` and `v`.
    pub fn add_edge(&mut self, u: usize, v: usize, mult: u64) -> Result<()> {
        if u == v {
            return Err(PolyError::Graph(format!("self-loop at vertex {u}")));
        }
        if u >= self.nverts || v >= self.nverts {
            return Err(PolyError::Graph(format!("edge ({u}, {v}) outside 0..{}", self.nverts)));
        }
        if mult == 0 {
            return Ok(());
        }
        *self.edges.entry((u.min(v), u.max(v))).or_insert(0) += mult;
        Ok(())
    }

    /// Appends a fresh vertex and returns its index.
    pub fn add_vertex(&mut self) -> usize {
        self.nverts += 1;
        self.nverts - 1
    }

    /// Distinct vertex pairs `(u, v)` with `u < v` and their multiplicities.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.edges.iter().map(|(&(u, v), &m)| (u, v, m))
    }

    /// Number of edges counted with multiplicity.
    pub fn edge_count(&self) -> u64 {
        self.edges.values().sum()
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u64 {
        self.edges.get(&(u.min(v), u.max(v))).copied().unwrap_or(0)
    }

    /// Reads `"n"` followed by lines `"u v mult"` (0-based vertices).
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let header = parse_numbers(lines.next().ok_or_else(|| PolyError::Graph("missing header".into()))?)?;
        let [nverts] = header[..] else {
            return Err(PolyError::Graph("header must be the vertex count".into()));
        };
        let mut g = Multigraph::new(nverts);
        for line in lines {
            let [u, v, m] = parse_numbers(line)?[..] else {
                return Err(PolyError::Graph(format!("edge line must be \"u v mult\": {line:?}")));
            };
            if m == 0 {
                return Err(PolyError::Graph(format!("zero multiplicity on ({u}, {v})")));
            }
            g.add_edge(u, v, m as u64)?;
        }
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.nverts);
        for (u, v, m) in self.edges() {
            out.push_str(&format!("{u} {v} {m}\n"));
        }
        out
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn parse_numbers(line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| tok.parse::<usize>().map_err(|_| PolyError::Graph(format!("not a number: {tok:?}"))))
        .collect()
}

/// `Σ_{(i₁,…,i_r) ∈ E} h(x_{i₁}, …, x_{i_r})` over `Z_modulus`.
pub fn h_type_expand(h: &SparsePoly, graph: &Hypergraph, modulus: &BigInt) -> Result<SparsePoly> {
    if h.nvars() != graph.arity() {
        return Err(PolyError::Arity { expected: h.nvars(), found: graph.arity() });
    }
    let mut out = SparsePoly::zero(graph.nverts(), modulus)?;
    for edge in graph.edges() {
        for (c, e) in h.terms() {
            let mut exps = vec![0u32; graph.nverts()];
            for (&v, &k) in edge.iter().zip(e) {
                exps[v - 1] = exps[v - 1].saturating_add(k);
            }
            out.add_term(c, exps);
        }
    }
    Ok(out)
}

/// `f(T·y + t)`, expanded and reduced modulo `N`.
pub fn affine_substitute(f: &SparsePoly, transform: &[Vec<BigInt>], shift: &[BigInt]) -> Result<SparsePoly> {
    let n = f.nvars();
    if transform.len() != n {
        return Err(PolyError::LengthMismatch { expected: n, found: transform.len() });
    }
    if let Some(row) = transform.iter().find(|r| r.len() != n) {
        return Err(PolyError::LengthMismatch { expected: n, found: row.len() });
    }
    if shift.len() != n {
        return Err(PolyError::LengthMismatch { expected: n, found: shift.len() });
    }
    let modulus = f.modulus();
    let images: Vec<SparsePoly> = (0..n)
        .map(|i| {
            let mut img = SparsePoly::constant(n, modulus, &shift[i]);
            for (j, c) in transform[i].iter().enumerate() {
                let mut e = vec![0; n];
                e[j] = 1;
                img.add_term(c, e);
            }
            img
        })
        .collect();
    let mut out = SparsePoly::zero(n, modulus)?;
    for (c, e) in f.terms() {
        let mut term = SparsePoly::constant(n, modulus, c);
        for (i, &k) in e.iter().enumerate() {
            for _ in 0..k {
                term = term.mul(&images[i]);
            }
        }
        out.add_assign(&term);
    }
    Ok(out)
}
