//! Sparse multivariate polynomials over `f64` coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`] in graded-lex order,
//! so iteration (and therefore printing, SDP assembly and anything derived
//! from it) is deterministic across runs. Arithmetic is exact over the term
//! map; coefficients whose magnitude falls below [`DEDUP_EPS`] after an
//! operation are dropped to suppress floating-point cancellation noise.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Coefficients below this magnitude are removed after arithmetic.
pub const DEDUP_EPS: f64 = 1e-14;

/// A monomial as an exponent vector, one entry per variable.
///
/// Ordering is graded lexicographic: lower total degree first, then the
/// exponent vector compared lexicographically with the *larger* vector
/// first within a degree, so `basis(2,2)` enumerates
/// `1, x1, x2, x1^2, x1*x2, x2^2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial { exps }
    }

    pub fn constant(nvars: usize) -> Self {
        Monomial { exps: vec![0; nvars] }
    }

    /// The monomial `x_{var}` (0-based index).
    pub fn variable(nvars: usize, var: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[var] = 1;
        Monomial { exps }
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.exps
            .iter()
            .zip(x)
            .map(|(&e, &xi)| xi.powi(e as i32))
            .product()
    }

    /// Embed into a larger variable space, keeping existing exponents in place.
    pub fn extend(&self, nvars: usize) -> Monomial {
        let mut exps = self.exps.clone();
        exps.resize(nvars, 0);
        Monomial { exps }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Polynomial::zero(nvars);
        p.add_term(Monomial::constant(nvars), c);
        p
    }

    /// The polynomial `x_{var}` (0-based index).
    pub fn variable(nvars: usize, var: usize) -> Self {
        let mut p = Polynomial::zero(nvars);
        p.add_term(Monomial::variable(nvars, var), 1.0);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, f64)>) -> Self {
        let mut p = Polynomial::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial arity mismatch");
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &f64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn coeff(&self, m: &Monomial) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |acc, c| acc.max(c.abs()))
    }

    fn add_term(&mut self, m: Monomial, c: f64) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().abs() < DEDUP_EPS {
                    e.remove();
                }
            }
            Entry::Vacant(v) => {
                if c.abs() >= DEDUP_EPS {
                    v.insert(c);
                }
            }
        }
    }

    fn check_nvars(&self, other: &Polynomial) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch(format!(
                "polynomials over {} and {} variables",
                self.nvars, other.nvars
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_nvars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_nvars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out.prune();
        Ok(out)
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_nvars(other)?;
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn scale(&self, factor: f64) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * factor);
        }
        out.prune();
        out
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(-1.0)
    }

    pub fn pow(&self, exp: u32) -> Result<Polynomial> {
        let mut out = Polynomial::constant(self.nvars, 1.0);
        for _ in 0..exp {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.abs() >= DEDUP_EPS);
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch(format!(
                "evaluating {}-variable polynomial at point of length {}",
                self.nvars,
                x.len()
            )));
        }
        Ok(self.terms.iter().map(|(m, c)| c * m.eval(x)).sum())
    }

    /// Partial derivative with respect to variable `var` (0-based).
    pub fn partial(&self, var: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exponents()[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.exponents().to_vec();
            exps[var] = e - 1;
            out.add_term(Monomial::new(exps), c * e as f64);
        }
        out.prune();
        out
    }

    pub fn gradient(&self) -> Vec<Polynomial> {
        (0..self.nvars).map(|i| self.partial(i)).collect()
    }

    /// Symmetric matrix of second partials; entry (i,j) equals (j,i) term-for-term.
    pub fn hessian(&self) -> Vec<Vec<Polynomial>> {
        let grad = self.gradient();
        let mut rows = Vec::with_capacity(self.nvars);
        for i in 0..self.nvars {
            let mut row = Vec::with_capacity(self.nvars);
            for j in 0..self.nvars {
                if j < i {
                    // mirror the already-computed upper triangle
                    let prev: &Vec<Polynomial> = &rows[j];
                    row.push(prev[i].clone());
                } else {
                    row.push(grad[i].partial(j));
                }
            }
            rows.push(row);
        }
        rows
    }

    /// Substitute `subs[i]` for variable `i`. All substitutes must share an arity,
    /// which becomes the arity of the result.
    pub fn substitute(&self, subs: &[Polynomial]) -> Result<Polynomial> {
        if subs.len() != self.nvars {
            return Err(Error::DimensionMismatch(format!(
                "substituting {} polynomials into {} variables",
                subs.len(),
                self.nvars
            )));
        }
        let out_nvars = subs.first().map(|p| p.nvars).unwrap_or(0);
        let mut out = Polynomial::zero(out_nvars);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(out_nvars, *c);
            for (var, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    term = term.mul(&subs[var].pow(e)?)?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Reinterpret over a larger variable space (existing variables keep their indices).
    pub fn extend(&self, nvars: usize) -> Polynomial {
        assert!(nvars >= self.nvars);
        let mut out = Polynomial::zero(nvars);
        for (m, c) in &self.terms {
            out.add_term(m.extend(nvars), *c);
        }
        out
    }

    /// Parse the text form: a sum of `coeff*x1^e1*...*xn^en` terms.
    ///
    /// Whitespace-insensitive. Accepts `-` separated terms, bare constants,
    /// monomials without explicit coefficients (`x2^3`), exponent-free
    /// variables (`x1` = `x1^1`) and scientific-notation coefficients.
    pub fn parse(input: &str, nvars: usize) -> Result<Polynomial> {
        let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial text".into()));
        }
        let mut out = Polynomial::zero(nvars);
        for piece in split_terms(&compact) {
            if piece == "0" || piece == "-0" || piece == "+0" {
                continue;
            }
            let (m, c) = parse_term(&piece, nvars)?;
            out.add_term(m, c);
        }
        out.prune();
        Ok(out)
    }
}

/// Split a compacted expression into signed term strings.
/// `+`/`-` separate terms except when part of a scientific exponent.
fn split_terms(s: &str) -> Vec<String> {
    let chars: Vec<char> = s.chars().collect();
    let mut pieces = Vec::new();
    let mut cur = String::new();
    for (i, &ch) in chars.iter().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 {
            let prev = chars[i - 1];
            if prev != 'e' && prev != 'E' {
                pieces.push(std::mem::take(&mut cur));
                if ch == '-' {
                    cur.push('-');
                }
                continue;
            }
        }
        cur.push(ch);
    }
    pieces.push(cur);
    pieces.retain(|p| !p.is_empty() && p != "+");
    pieces
}

fn parse_term(term: &str, nvars: usize) -> Result<(Monomial, f64)> {
    let mut coeff = 1.0;
    let mut body = term;
    if let Some(rest) = body.strip_prefix('-') {
        coeff = -1.0;
        body = rest;
    }
    let mut exps = vec![0u32; nvars];
    let mut saw_factor = false;
    for factor in body.split('*') {
        if factor.is_empty() {
            return Err(Error::Parse(format!("empty factor in term `{term}`")));
        }
        saw_factor = true;
        if let Some(var_part) = factor.strip_prefix('x') {
            let (idx_str, exp) = match var_part.split_once('^') {
                Some((i, e)) => {
                    let exp: u32 = e
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent in `{factor}`")))?;
                    (i, exp)
                }
                None => (var_part, 1),
            };
            let idx: usize = idx_str
                .parse()
                .map_err(|_| Error::Parse(format!("bad variable index in `{factor}`")))?;
            if idx == 0 || idx > nvars {
                return Err(Error::Parse(format!(
                    "variable x{idx} out of range 1..={nvars}"
                )));
            }
            exps[idx - 1] += exp;
        } else {
            let c: f64 = factor
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient `{factor}`")))?;
            coeff *= c;
        }
    }
    if !saw_factor {
        return Err(Error::Parse(format!("empty term `{term}`")));
    }
    Ok((Monomial::new(exps), coeff))
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let (sep, mag) = if k == 0 {
                (if *c < 0.0 { "-" } else { "" }, c.abs())
            } else if *c < 0.0 {
                (" - ", c.abs())
            } else {
                (" + ", c.abs())
            };
            write!(f, "{sep}{mag}")?;
            for (var, &e) in m.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{}", var + 1)?,
                    _ => write!(f, "*x{}^{}", var + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> Polynomial {
        Polynomial::parse(s, n).unwrap()
    }

    #[test]
    fn eval_basic() {
        assert_eq!(p("x1^2 + x2^2", 2).eval(&[1.0, 1.0]).unwrap(), 2.0);
        assert_eq!(p("1", 3).eval(&[9.0, -4.0, 0.5]).unwrap(), 1.0);
        assert_eq!(p("x1*x2 - x3", 3).eval(&[2.0, 3.0, 5.0]).unwrap(), 1.0);
    }

    #[test]
    fn eval_dimension_mismatch() {
        assert!(p("x1", 1).eval(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn product_of_conjugates() {
        let a = p("x1 + 1", 1);
        let b = p("x1 - 1", 1);
        assert_eq!(a.mul(&b).unwrap(), p("x1^2 - 1", 1));
    }

    #[test]
    fn cancellation_yields_zero() {
        let a = p("2*x1^3 + x2", 2);
        let diff = a.add(&a.scale(-1.0)).unwrap();
        assert!(diff.is_zero());
    }

    #[test]
    fn scale_by_fifty() {
        assert_eq!(p("x1", 1).scale(50.0), p("50*x1", 1));
    }

    #[test]
    fn arity_mismatch_rejected() {
        assert!(p("x1", 1).add(&p("x1", 2)).is_err());
    }

    #[test]
    fn gradient_quadratic() {
        let g = p("x1^2 + x2^2", 2).gradient();
        assert_eq!(g[0], p("2*x1", 2));
        assert_eq!(g[1], p("2*x2", 2));
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let g = p("7", 3).gradient();
        assert!(g.iter().all(Polynomial::is_zero));
    }

    #[test]
    fn hessian_examples() {
        let h = p("x1^2 + x2^2", 2).hessian();
        assert_eq!(h[0][0], p("2", 2));
        assert_eq!(h[0][1], p("0", 2));
        assert_eq!(h[1][1], p("2", 2));

        let h = p("x1*x2", 2).hessian();
        assert_eq!(h[0][1], p("1", 2));
        assert_eq!(h[1][0], p("1", 2));

        let h = p("x1^4", 1).hessian();
        assert_eq!(h[0][0], p("12*x1^2", 1));
    }

    #[test]
    fn hessian_is_symmetric_term_for_term() {
        let q = p("x1^3*x2 - 2*x2^2*x3 + x1*x3^3", 3);
        let h = q.hessian();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(h[i][j], h[j][i]);
            }
        }
    }

    /// Central-difference oracle for first and second partials.
    fn central_diff(pf: &Polynomial, x: &[f64], var: usize, h: f64) -> f64 {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[var] += h;
        xm[var] -= h;
        (pf.eval(&xp).unwrap() - pf.eval(&xm).unwrap()) / (2.0 * h)
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let q = p("0.5*x1^3 - 2*x1*x2^2 + x2^3 + 3*x1 - 1", 2);
        let pts = [[0.3, -0.7], [1.2, 0.4], [-1.5, 1.1]];
        for x in &pts {
            for var in 0..2 {
                let exact = q.partial(var).eval(x).unwrap();
                let approx = central_diff(&q, x, var, 1e-5);
                let scale = 1.0 + exact.abs();
                assert!(
                    (exact - approx).abs() <= 1e-6 * scale,
                    "partial {var} at {x:?}: exact {exact}, fd {approx}"
                );
            }
        }
    }

    #[test]
    fn substitute_linear_change() {
        // p(x) = x^2 under x -> 2y + 1 gives 4y^2 + 4y + 1
        let q = p("x1^2", 1);
        let sub = p("2*x1 + 1", 1);
        assert_eq!(q.substitute(&[sub]).unwrap(), p("4*x1^2 + 4*x1 + 1", 1));
    }

    #[test]
    fn parse_print_round_trip() {
        let cases = [
            ("x1^2 + x2^2", 2),
            ("-0.5*x1*x2 + 3.25*x2^4 - 1", 2),
            ("1e-3*x1 - 2.5e2*x2^2", 2),
            ("0", 2),
        ];
        for (s, n) in cases {
            let q = p(s, n);
            let back = Polynomial::parse(&q.to_string(), n).unwrap();
            assert_eq!(q, back, "round trip failed for `{s}`");
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(Polynomial::parse("x9", 2).is_err());
        assert!(Polynomial::parse("", 2).is_err());
        assert!(Polynomial::parse("x1^x1", 2).is_err());
    }

    #[test]
    fn graded_lex_ordering() {
        // degree first, then lexicographic with x1-heavy monomials first
        let m = |e: &[u32]| Monomial::new(e.to_vec());
        let mut v = vec![m(&[0, 2]), m(&[1, 0]), m(&[0, 0]), m(&[1, 1]), m(&[2, 0]), m(&[0, 1])];
        v.sort();
        assert_eq!(
            v,
            vec![m(&[0, 0]), m(&[1, 0]), m(&[0, 1]), m(&[2, 0]), m(&[1, 1]), m(&[0, 2])]
        );
    }
}
