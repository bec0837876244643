//! Graded-lex monomial bases and Gram-form polynomials `z(x)^T A z(x)`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::poly::{Monomial, Polynomial};

/// All monomials of total degree at most `maxdeg` in `nvars` variables,
/// in graded-lex order. The constant monomial sits at index 0 and the
/// length is `C(nvars + maxdeg, maxdeg)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    nvars: usize,
    maxdeg: u32,
    elements: Vec<Monomial>,
}

impl MonomialBasis {
    pub fn new(nvars: usize, maxdeg: u32) -> Self {
        assert!(nvars >= 1, "basis needs at least one variable");
        let mut elements = Vec::with_capacity(binomial(nvars + maxdeg as usize, maxdeg as usize));
        let mut exps = vec![0u32; nvars];
        enumerate(&mut exps, 0, maxdeg, &mut elements);
        elements.sort();
        MonomialBasis { nvars, maxdeg, elements }
    }

    /// Build a basis from an explicit monomial list (used for structured
    /// witness bases such as the Hessian scalarization). The list is sorted
    /// into graded-lex order and deduplicated.
    pub fn from_monomials(nvars: usize, monomials: Vec<Monomial>) -> Self {
        let maxdeg = monomials.iter().map(Monomial::degree).max().unwrap_or(0);
        let mut elements = monomials;
        for m in &elements {
            assert_eq!(m.nvars(), nvars, "monomial arity mismatch");
        }
        elements.sort();
        elements.dedup();
        MonomialBasis { nvars, maxdeg, elements }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn maxdeg(&self) -> u32 {
        self.maxdeg
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Monomial] {
        &self.elements
    }

    /// Evaluate the basis vector z(x).
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch(format!(
                "basis over {} variables evaluated at point of length {}",
                self.nvars,
                x.len()
            )));
        }
        Ok(self.elements.iter().map(|m| m.eval(x)).collect())
    }
}

fn enumerate(exps: &mut Vec<u32>, var: usize, remaining: u32, out: &mut Vec<Monomial>) {
    if var == exps.len() {
        out.push(Monomial::new(exps.clone()));
        return;
    }
    for e in 0..=remaining {
        exps[var] = e;
        enumerate(exps, var + 1, remaining - e, out);
    }
    exps[var] = 0;
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// A polynomial in Gram form: `V(x) = z(x)^T A z(x)` for a symmetric matrix A
/// over a monomial basis z. Construction mirrors the upper triangle so the
/// stored matrix is exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct GramForm {
    basis: MonomialBasis,
    matrix: DMatrix<f64>,
}

impl GramForm {
    pub fn new(basis: MonomialBasis, matrix: DMatrix<f64>) -> Result<Self> {
        let n = basis.len();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "Gram matrix {}x{} over basis of length {}",
                matrix.nrows(),
                matrix.ncols(),
                n
            )));
        }
        let mut sym = matrix;
        for i in 0..n {
            for j in (i + 1)..n {
                let v = sym[(i, j)];
                sym[(j, i)] = v;
            }
        }
        Ok(GramForm { basis, matrix: sym })
    }

    /// Build from the upper triangle in row-major order
    /// (`a11 a12 ... a1n a22 a23 ...`).
    pub fn from_upper_triangle(basis: MonomialBasis, upper: &[f64]) -> Result<Self> {
        let n = basis.len();
        if upper.len() != n * (n + 1) / 2 {
            return Err(Error::DimensionMismatch(format!(
                "expected {} upper-triangle entries, got {}",
                n * (n + 1) / 2,
                upper.len()
            )));
        }
        let mut m = DMatrix::zeros(n, n);
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                m[(i, j)] = upper[k];
                m[(j, i)] = upper[k];
                k += 1;
            }
        }
        Ok(GramForm { basis, matrix: m })
    }

    pub fn identity(basis: MonomialBasis) -> Self {
        let n = basis.len();
        GramForm { basis, matrix: DMatrix::identity(n, n) }
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Expand `z^T A z` into a plain polynomial. Linear in the entries of A.
    pub fn expand(&self) -> Polynomial {
        let n = self.basis.len();
        let nvars = self.basis.nvars();
        let mut terms: Vec<(Monomial, f64)> = Vec::new();
        for i in 0..n {
            for j in i..n {
                let c = self.matrix[(i, j)];
                if c == 0.0 {
                    continue;
                }
                let weight = if i == j { c } else { 2.0 * c };
                terms.push((self.basis.elements()[i].mul(&self.basis.elements()[j]), weight));
            }
        }
        Polynomial::from_terms(nvars, terms)
    }

    /// Evaluate `z(x)^T A z(x)` directly, without expanding.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let z = self.basis.eval(x)?;
        let n = z.len();
        let mut acc = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += self.matrix[(i, j)] * z[j];
            }
            acc += z[i] * row;
        }
        Ok(acc)
    }

    /// Smallest eigenvalue of A (symmetric eigendecomposition).
    pub fn min_eigenvalue(&self) -> f64 {
        if self.matrix.nrows() == 0 {
            return 0.0;
        }
        let eig = self.matrix.clone().symmetric_eigen();
        eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_sizes() {
        assert_eq!(MonomialBasis::new(2, 1).len(), 3);
        assert_eq!(MonomialBasis::new(2, 2).len(), 6);
        assert_eq!(MonomialBasis::new(3, 4).len(), 35);
    }

    #[test]
    fn basis_order_and_stability() {
        let b = MonomialBasis::new(2, 1);
        let names: Vec<_> = b.elements().iter().map(|m| m.exponents().to_vec()).collect();
        assert_eq!(names, vec![vec![0, 0], vec![1, 0], vec![0, 1]]);
        assert!(b.elements()[0].is_constant());
        // two calls return identical orderings
        assert_eq!(b, MonomialBasis::new(2, 1));
    }

    #[test]
    fn basis_length_formula() {
        for n in 1..=4usize {
            for d in 0..=5u32 {
                let b = MonomialBasis::new(n, d);
                assert_eq!(b.len(), binomial(n + d as usize, d as usize));
            }
        }
    }

    #[test]
    fn gram_identity_expansion() {
        let g = GramForm::identity(MonomialBasis::new(2, 1));
        let p = g.expand();
        assert_eq!(p, Polynomial::parse("1 + x1^2 + x2^2", 2).unwrap());
    }

    #[test]
    fn gram_off_diagonal_pair() {
        // A with A12 = A21 = 1/2 over [1, x1] expands to x1
        let b = MonomialBasis::new(1, 1);
        let g = GramForm::from_upper_triangle(b, &[0.0, 0.5, 0.0]).unwrap();
        assert_eq!(g.expand(), Polynomial::parse("x1", 1).unwrap());
    }

    #[test]
    fn gram_expand_matches_quadratic_form() {
        // oracle: evaluate z(x)^T A z(x) by hand and compare to the expansion
        let b = MonomialBasis::new(2, 2);
        let n = b.len();
        let mut a = DMatrix::zeros(n, n);
        let mut seed = 1234567u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 33) as f64 / (1u64 << 31) as f64) - 1.0
        };
        for i in 0..n {
            for j in i..n {
                let v = next();
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        let g = GramForm::new(b.clone(), a.clone()).unwrap();
        let expanded = g.expand();
        for k in 0..50 {
            let x = [next() * 2.0, next() * 2.0];
            let z = b.eval(&x).unwrap();
            let mut direct = 0.0;
            for i in 0..n {
                for j in 0..n {
                    direct += z[i] * a[(i, j)] * z[j];
                }
            }
            let via_poly = expanded.eval(&x).unwrap();
            let scale = 1.0 + direct.abs();
            assert!(
                (direct - via_poly).abs() <= 1e-12 * scale,
                "sample {k}: direct {direct} vs expanded {via_poly}"
            );
        }
    }

    #[test]
    fn gram_expand_is_linear() {
        let b = MonomialBasis::new(2, 1);
        let g1 = GramForm::from_upper_triangle(b.clone(), &[1.0, 0.5, -2.0, 3.0, 0.0, 1.5]).unwrap();
        let g2 = GramForm::from_upper_triangle(b.clone(), &[-1.0, 2.0, 0.25, 0.0, 1.0, -0.5]).unwrap();
        let sum = GramForm::new(b, g1.matrix() + g2.matrix()).unwrap();
        let lhs = sum.expand();
        let rhs = g1.expand().add(&g2.expand()).unwrap();
        assert_eq!(lhs, rhs);
    }
}
