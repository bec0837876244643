//! SOS-to-SDP compiler.
//!
//! An [`SosProgram`] holds Gram-parametrized decision blocks (the fitted
//! polynomial's matrix, SOS multipliers, witnesses), polynomial identities
//! that must hold coefficient-wise, and affine point constraints. Every
//! identity `expr(x) = w(x)^T W w(x)` becomes one equality row per monomial
//! of the witness span; point constraints become single rows with 1x1 slack
//! blocks. Compilation is deterministic: blocks in declaration order, rows
//! in identity order with graded-lex monomial enumeration inside each.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;

use crate::basis::MonomialBasis;
use crate::error::{Error, Result};
use crate::poly::{Monomial, Polynomial};
use crate::sdp::{BlockKind, Entry, Objective, SdpProblem};

/// Handle to a declared Gram block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockId(pub usize);

#[derive(Debug, Clone)]
struct DecisionBlock {
    label: String,
    basis: MonomialBasis,
}

/// A polynomial-valued expression, affine in the entries of decision blocks:
/// `constant(x) + sum_blocks <P^b(x), Q_b>` where each `P^b` is a symmetric
/// matrix of polynomial coefficients stored as an upper triangle.
#[derive(Debug, Clone)]
pub struct AffineExpr {
    nvars: usize,
    constant: Polynomial,
    terms: Vec<BlockTerm>,
}

#[derive(Debug, Clone)]
struct BlockTerm {
    block: BlockId,
    /// Row-major upper triangle, length N(N+1)/2; entry (i,j) multiplies
    /// `Q_ij` under the symmetric inner-product convention.
    entry_polys: Vec<Polynomial>,
}

impl AffineExpr {
    pub fn constant(nvars: usize, p: Polynomial) -> Self {
        assert_eq!(p.nvars(), nvars);
        AffineExpr { nvars, constant: p, terms: Vec::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    fn check_space(&self, other: &AffineExpr) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch(format!(
                "affine expressions over {} and {} variables",
                self.nvars, other.nvars
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &AffineExpr) -> Result<AffineExpr> {
        self.check_space(other)?;
        let mut out = self.clone();
        out.constant = out.constant.add(&other.constant)?;
        for term in &other.terms {
            match out.terms.iter_mut().find(|t| t.block == term.block) {
                Some(existing) => {
                    for (a, b) in existing.entry_polys.iter_mut().zip(&term.entry_polys) {
                        *a = a.add(b)?;
                    }
                }
                None => out.terms.push(term.clone()),
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &AffineExpr) -> Result<AffineExpr> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, factor: f64) -> AffineExpr {
        AffineExpr {
            nvars: self.nvars,
            constant: self.constant.scale(factor),
            terms: self
                .terms
                .iter()
                .map(|t| BlockTerm {
                    block: t.block,
                    entry_polys: t.entry_polys.iter().map(|p| p.scale(factor)).collect(),
                })
                .collect(),
        }
    }

    pub fn add_polynomial(&self, p: &Polynomial) -> Result<AffineExpr> {
        let mut out = self.clone();
        out.constant = out.constant.add(p)?;
        Ok(out)
    }

    /// Largest total degree across the constant and all entry polynomials.
    pub fn degree(&self) -> u32 {
        let mut d = self.constant.degree();
        for t in &self.terms {
            for p in &t.entry_polys {
                d = d.max(p.degree());
            }
        }
        d
    }

    /// Substitute concrete Gram matrices (indexed by block id) to recover the
    /// plain polynomial value of the expression.
    pub fn instantiate(&self, values: &[DMatrix<f64>]) -> Result<Polynomial> {
        let mut out = self.constant.clone();
        for term in &self.terms {
            let q = values.get(term.block.0).ok_or_else(|| {
                Error::ShapeMismatch(format!("no value for block {}", term.block.0))
            })?;
            let n = q.nrows();
            if term.entry_polys.len() != n * (n + 1) / 2 {
                return Err(Error::ShapeMismatch(format!(
                    "block {} has dimension {} but term carries {} entry polynomials",
                    term.block.0,
                    n,
                    term.entry_polys.len()
                )));
            }
            let mut k = 0;
            for i in 0..n {
                for j in i..n {
                    let w = if i == j { q[(i, j)] } else { 2.0 * q[(i, j)] };
                    if w != 0.0 && !term.entry_polys[k].is_zero() {
                        out = out.add(&term.entry_polys[k].scale(w))?;
                    }
                    k += 1;
                }
            }
        }
        Ok(out)
    }
}

/// Upper-triangle index iterator helper.
fn upper_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i..n).map(move |j| (i, j)))
}

#[derive(Debug, Clone)]
struct Identity {
    label: String,
    expr: AffineExpr,
    witness: BlockId,
}

#[derive(Debug, Clone)]
struct PointConstraint {
    /// Numeric coefficient entries per block, upper triangle.
    entries: Vec<(BlockId, Vec<(usize, usize, f64)>)>,
    rhs: f64,
}

/// Handle to an added constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstraintId(pub usize);

#[derive(Debug, Clone, Default)]
pub struct SosProgram {
    nvars: usize,
    blocks: Vec<DecisionBlock>,
    identities: Vec<Identity>,
    points: Vec<PointConstraint>,
    objective_block: Option<BlockId>,
}

impl SosProgram {
    pub fn new(nvars: usize) -> Self {
        SosProgram { nvars, ..Default::default() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_label(&self, id: BlockId) -> &str {
        &self.blocks[id.0].label
    }

    pub fn block_basis(&self, id: BlockId) -> &MonomialBasis {
        &self.blocks[id.0].basis
    }

    pub fn block_dim(&self, id: BlockId) -> usize {
        self.blocks[id.0].basis.len()
    }

    /// Declare a Gram-parametrized PSD block over an explicit basis.
    pub fn declare_gram(&mut self, basis: MonomialBasis, label: impl Into<String>) -> Result<BlockId> {
        let label = label.into();
        if self.blocks.iter().any(|b| b.label == label) {
            return Err(Error::DuplicateLabel(label));
        }
        if basis.is_empty() {
            return Err(Error::InvalidParameter(format!("empty basis for block `{label}`")));
        }
        self.blocks.push(DecisionBlock { label, basis });
        Ok(BlockId(self.blocks.len() - 1))
    }

    /// Declare an SOS multiplier `s = w_h(x)^T Q w_h(x)` of half-degree `halfdeg`.
    pub fn declare_multiplier(&mut self, nvars: usize, halfdeg: u32, label: impl Into<String>) -> Result<BlockId> {
        self.declare_gram(MonomialBasis::new(nvars, halfdeg), label)
    }

    /// `z^T Q z` as an affine expression over the block's own variable space.
    pub fn gram_expr(&self, id: BlockId) -> AffineExpr {
        self.gram_expr_times(id, None)
    }

    /// `g(x) * z^T Q z`; `None` for plain expansion.
    pub fn gram_expr_times(&self, id: BlockId, scale: Option<&Polynomial>) -> AffineExpr {
        let basis = &self.blocks[id.0].basis;
        let nvars = basis.nvars();
        let elems = basis.elements();
        let entry_polys = upper_pairs(elems.len())
            .map(|(i, j)| {
                let prod = Polynomial::from_terms(nvars, [(elems[i].mul(&elems[j]), 1.0)]);
                match scale {
                    Some(g) => prod.mul(g).expect("scale polynomial arity"),
                    None => prod,
                }
            })
            .collect();
        AffineExpr {
            nvars,
            constant: Polynomial::zero(nvars),
            terms: vec![BlockTerm { block: id, entry_polys }],
        }
    }

    /// Lie derivative `grad(z^T Q z) . f` as an affine expression.
    pub fn lie_derivative_expr(&self, id: BlockId, field: &[Polynomial]) -> Result<AffineExpr> {
        let basis = &self.blocks[id.0].basis;
        let nvars = basis.nvars();
        if field.len() != nvars {
            return Err(Error::DimensionMismatch(format!(
                "field with {} components over a {}-variable basis",
                field.len(),
                nvars
            )));
        }
        let elems = basis.elements();
        let mut entry_polys = Vec::with_capacity(elems.len() * (elems.len() + 1) / 2);
        for (i, j) in upper_pairs(elems.len()) {
            let prod = Polynomial::from_terms(nvars, [(elems[i].mul(&elems[j]), 1.0)]);
            let mut lie = Polynomial::zero(nvars);
            for (k, fk) in field.iter().enumerate() {
                lie = lie.add(&prod.partial(k).mul(fk)?)?;
            }
            entry_polys.push(lie);
        }
        Ok(AffineExpr {
            nvars,
            constant: Polynomial::zero(nvars),
            terms: vec![BlockTerm { block: id, entry_polys }],
        })
    }

    /// `y^T Hess(z^T Q z)(x) y` in the doubled variable space `(x, y)`.
    pub fn hessian_quad_expr(&self, id: BlockId) -> AffineExpr {
        let basis = &self.blocks[id.0].basis;
        let n = basis.nvars();
        let elems = basis.elements();
        let mut entry_polys = Vec::with_capacity(elems.len() * (elems.len() + 1) / 2);
        for (i, j) in upper_pairs(elems.len()) {
            let prod = Polynomial::from_terms(n, [(elems[i].mul(&elems[j]), 1.0)]);
            let hess = prod.hessian();
            let mut quad = Polynomial::zero(2 * n);
            for (k, row) in hess.iter().enumerate() {
                for (l, h) in row.iter().enumerate() {
                    if h.is_zero() {
                        continue;
                    }
                    let yk = Polynomial::variable(2 * n, n + k);
                    let yl = Polynomial::variable(2 * n, n + l);
                    let ykl = yk.mul(&yl).unwrap();
                    quad = quad.add(&h.extend(2 * n).mul(&ykl).unwrap()).unwrap();
                }
            }
            entry_polys.push(quad);
        }
        AffineExpr {
            nvars: 2 * n,
            constant: Polynomial::zero(2 * n),
            terms: vec![BlockTerm { block: id, entry_polys }],
        }
    }

    /// Witness basis for the Hessian scalarization: monomials `y_k * m(x)`
    /// with `deg m <= x_halfdeg`, in the doubled variable space.
    pub fn hessian_witness_basis(nvars: usize, x_halfdeg: u32) -> MonomialBasis {
        let xs = MonomialBasis::new(nvars, x_halfdeg);
        let mut monos = Vec::with_capacity(nvars * xs.len());
        for k in 0..nvars {
            for m in xs.elements() {
                let mut exps = m.exponents().to_vec();
                exps.resize(2 * nvars, 0);
                exps[nvars + k] = 1;
                monos.push(Monomial::new(exps));
            }
        }
        MonomialBasis::from_monomials(2 * nvars, monos)
    }

    /// Constrain `expr(x) = w(x)^T W w(x)` for a fresh witness block `W`.
    pub fn add_sos_identity(
        &mut self,
        expr: AffineExpr,
        witness_basis: MonomialBasis,
        label: impl Into<String>,
    ) -> Result<ConstraintId> {
        let label = label.into();
        if expr.nvars != witness_basis.nvars() {
            return Err(Error::DimensionMismatch(format!(
                "identity `{label}`: expression over {} variables, witness over {}",
                expr.nvars,
                witness_basis.nvars()
            )));
        }
        // Every monomial of the expression must be representable by witness
        // pair products.
        let span = witness_product_span(&witness_basis);
        for (m, c) in expr_support(&expr) {
            if c != 0.0 && !span.contains(&m) {
                return Err(Error::DegreeOverflow(format!(
                    "identity `{label}`: monomial of degree {} outside the witness span (max degree {})",
                    m.degree(),
                    2 * witness_basis.maxdeg()
                )));
            }
        }
        let witness = self.declare_gram(witness_basis, label.clone())?;
        self.identities.push(Identity { label, expr, witness });
        Ok(ConstraintId(self.identities.len() - 1))
    }

    /// Convexity tightening: constrain `y^T Hess(V)(x) y` to be SOS with a
    /// witness linear in `y` and of half-degree `x_halfdeg` in `x`.
    pub fn add_hessian_sos(
        &mut self,
        v: BlockId,
        x_halfdeg: u32,
        label: impl Into<String>,
    ) -> Result<ConstraintId> {
        let expr = self.hessian_quad_expr(v);
        let witness = Self::hessian_witness_basis(self.blocks[v.0].basis.nvars(), x_halfdeg);
        self.add_sos_identity(expr, witness, label)
    }

    /// Constrain `expr(point) <= bound` via a 1x1 slack block.
    pub fn add_point_upper_bound(&mut self, expr: &AffineExpr, point: &[f64], bound: f64) -> Result<ConstraintId> {
        if point.len() != expr.nvars {
            return Err(Error::DimensionMismatch(format!(
                "point of length {} for an expression over {} variables",
                point.len(),
                expr.nvars
            )));
        }
        let mut entries = Vec::new();
        for term in &expr.terms {
            let n = self.blocks[term.block.0].basis.len();
            let mut coeffs = Vec::new();
            for ((i, j), p) in upper_pairs(n).zip(&term.entry_polys) {
                let v = p.eval(point)?;
                if v != 0.0 {
                    coeffs.push((i, j, v));
                }
            }
            if !coeffs.is_empty() {
                entries.push((term.block, coeffs));
            }
        }
        let rhs = bound - expr.constant.eval(point)?;
        self.points.push(PointConstraint { entries, rhs });
        Ok(ConstraintId(self.identities.len() + self.points.len() - 1))
    }

    /// Mark a block as carrying the `-log det` objective.
    pub fn set_logdet_objective(&mut self, id: BlockId) -> Result<()> {
        if self.objective_block.is_some() {
            return Err(Error::InvalidParameter(
                "log-det objective already assigned to a block".into(),
            ));
        }
        self.objective_block = Some(id);
        Ok(())
    }

    /// Instantiate an expression with concrete matrices for this program's
    /// blocks (indexed by declaration order).
    pub fn instantiate(&self, expr: &AffineExpr, values: &[DMatrix<f64>]) -> Result<Polynomial> {
        expr.instantiate(values)
    }

    /// Lower the program to block-diagonal SDP standard form.
    pub fn compile(&self) -> Result<SdpProblem> {
        let mut sdp = SdpProblem::new();
        for block in &self.blocks {
            sdp.add_block(block.label.clone(), block.basis.len(), BlockKind::Psd);
        }
        for identity in &self.identities {
            let witness_basis = &self.blocks[identity.witness.0].basis;
            // monomial -> witness pairs, in graded-lex order
            let mut pair_map: BTreeMap<Monomial, Vec<(usize, usize)>> = BTreeMap::new();
            let elems = witness_basis.elements();
            for (i, j) in upper_pairs(elems.len()) {
                pair_map.entry(elems[i].mul(&elems[j])).or_default().push((i, j));
            }
            // monomial -> expression entries
            let mut expr_map: BTreeMap<Monomial, Vec<Entry>> = BTreeMap::new();
            for term in &identity.expr.terms {
                let n = self.blocks[term.block.0].basis.len();
                for ((i, j), p) in upper_pairs(n).zip(&term.entry_polys) {
                    for (m, &c) in p.terms() {
                        expr_map
                            .entry(m.clone())
                            .or_default()
                            .push(Entry::new(term.block.0, i, j, c));
                    }
                }
            }
            for m in expr_map.keys().chain(identity.expr.constant.terms().map(|(m, _)| m)) {
                if !pair_map.contains_key(m) {
                    return Err(Error::DegreeOverflow(format!(
                        "identity `{}`: expression monomial outside the witness span",
                        identity.label
                    )));
                }
            }
            for (m, pairs) in &pair_map {
                let mut entries = expr_map.remove(m).unwrap_or_default();
                for &(i, j) in pairs {
                    entries.push(Entry::new(identity.witness.0, i, j, -1.0));
                }
                let rhs = -identity.expr.constant.coeff(m);
                sdp.add_row(entries, rhs);
            }
        }
        for (k, pc) in self.points.iter().enumerate() {
            let slack = sdp.add_block(format!("slack{k}"), 1, BlockKind::Slack);
            let mut entries = Vec::new();
            for (block, coeffs) in &pc.entries {
                for &(i, j, v) in coeffs {
                    entries.push(Entry::new(block.0, i, j, v));
                }
            }
            entries.push(Entry::new(slack, 0, 0, 1.0));
            sdp.add_row(entries, pc.rhs);
        }
        sdp.objective = Objective {
            linear: Vec::new(),
            logdet_block: self.objective_block.map(|b| b.0),
        };
        sdp.validate()?;
        Ok(sdp)
    }
}

/// Union of all monomials reachable as witness pair products.
fn witness_product_span(basis: &MonomialBasis) -> BTreeSet<Monomial> {
    let elems = basis.elements();
    let mut span = BTreeSet::new();
    for (i, j) in upper_pairs(elems.len()) {
        span.insert(elems[i].mul(&elems[j]));
    }
    span
}

fn expr_support(expr: &AffineExpr) -> Vec<(Monomial, f64)> {
    let mut out: Vec<(Monomial, f64)> =
        expr.constant.terms().map(|(m, c)| (m.clone(), *c)).collect();
    for term in &expr.terms {
        for p in &term.entry_polys {
            for (m, c) in p.terms() {
                out.push((m.clone(), *c));
            }
        }
    }
    out
}

/// Default multiplier half-degree: `ceil((target_deg - deg g) / 2)`, so the
/// product `s * g` reaches the identity's target degree.
pub fn multiplier_halfdeg(target_deg: u32, g_deg: u32) -> u32 {
    target_deg.saturating_sub(g_deg).div_ceil(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::BlockKind;
    use crate::solver::{solve, SolveStatus, SolverOptions};

    #[test]
    fn declare_sizes_and_duplicates() {
        let mut prog = SosProgram::new(2);
        let v = prog.declare_gram(MonomialBasis::new(2, 1), "V").unwrap();
        assert_eq!(prog.block_dim(v), 3);
        let big = SosProgram::new(3)
            .declare_gram(MonomialBasis::new(3, 4), "V")
            .map(|_| 35usize)
            .unwrap();
        assert_eq!(big, 35);
        assert!(prog.declare_gram(MonomialBasis::new(2, 1), "V").is_err());
    }

    #[test]
    fn multiplier_sizes() {
        let mut prog = SosProgram::new(2);
        let s0 = prog.declare_multiplier(2, 0, "s0").unwrap();
        assert_eq!(prog.block_dim(s0), 1);
        let s1 = prog.declare_multiplier(2, 1, "s1").unwrap();
        assert_eq!(prog.block_dim(s1), 3);
    }

    #[test]
    fn default_multiplier_degree_balances_the_identity() {
        // deg V = 2d; deg(s*g) = 2*halfdeg + deg g must reach 2d
        for (two_d, g_deg) in [(8u32, 2u32), (6, 2), (8, 4), (9, 2)] {
            let h = multiplier_halfdeg(two_d, g_deg);
            assert!(2 * h + g_deg >= two_d, "2*{h}+{g_deg} < {two_d}");
            assert!(2 * h + g_deg <= two_d + 1);
        }
    }

    #[test]
    fn identity_rows_force_witness_entries() {
        // expr = x1^2 over witness [1, x1]: rows force W11=0, W12=0, W22=1
        let mut prog = SosProgram::new(1);
        let expr = AffineExpr::constant(1, Polynomial::parse("x1^2", 1).unwrap());
        prog.add_sos_identity(expr, MonomialBasis::new(1, 1), "w").unwrap();
        let sdp = prog.compile().unwrap();
        assert_eq!(sdp.rows.len(), 3); // monomials 1, x1, x1^2
        // row for constant monomial: -W11 = 0
        assert_eq!(sdp.rows[0].entries.len(), 1);
        assert_eq!(sdp.rhs[0], 0.0);
        // x1^2 row: -W22 = -1
        assert_eq!(sdp.rhs[2], -1.0);
        // the forced solution diag(0, 1) satisfies all rows
        let w = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        for (row, rhs) in sdp.rows.iter().zip(&sdp.rhs) {
            assert_eq!(row.value(&[w.clone()]), *rhs);
        }
    }

    #[test]
    fn negative_expression_is_infeasible() {
        let mut prog = SosProgram::new(1);
        let expr = AffineExpr::constant(1, Polynomial::parse("-1 - x1^2", 1).unwrap());
        prog.add_sos_identity(expr, MonomialBasis::new(1, 1), "w").unwrap();
        let sdp = prog.compile().unwrap();
        let sol = solve(&sdp, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
    }

    #[test]
    fn degree_overflow_is_rejected() {
        let mut prog = SosProgram::new(1);
        let expr = AffineExpr::constant(1, Polynomial::parse("x1^4", 1).unwrap());
        let err = prog.add_sos_identity(expr, MonomialBasis::new(1, 1), "w");
        assert!(matches!(err, Err(Error::DegreeOverflow(_))));
    }

    #[test]
    fn point_constraint_compiles_to_slack_row() {
        // one 1x1 objective block, constraint a <= 2
        let mut prog = SosProgram::new(1);
        let a = prog
            .declare_gram(MonomialBasis::from_monomials(1, vec![Monomial::constant(1)]), "a")
            .unwrap();
        prog.set_logdet_objective(a).unwrap();
        let expr = prog.gram_expr(a);
        prog.add_point_upper_bound(&expr, &[0.0], 2.0).unwrap();
        let sdp = prog.compile().unwrap();
        assert_eq!(sdp.rows.len(), 1);
        assert_eq!(sdp.blocks.len(), 2);
        assert_eq!(sdp.blocks[1].kind, BlockKind::Slack);
        assert_eq!(sdp.rhs[0], 2.0);
    }

    #[test]
    fn four_point_compile_hand_count() {
        // opt (6) with 4 points, d=1, n=2: 3x3 objective block + 4 slacks + 4 rows
        let mut prog = SosProgram::new(2);
        let v = prog.declare_gram(MonomialBasis::new(2, 1), "V").unwrap();
        prog.set_logdet_objective(v).unwrap();
        let expr = prog.gram_expr(v);
        for b in [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]] {
            prog.add_point_upper_bound(&expr, &b, 1.0).unwrap();
        }
        let sdp = prog.compile().unwrap();
        assert_eq!(sdp.blocks.len(), 5);
        assert_eq!(sdp.blocks[0].dim, 3);
        assert!(sdp.blocks[1..].iter().all(|b| b.dim == 1 && b.kind == BlockKind::Slack));
        assert_eq!(sdp.rows.len(), 4);
    }

    #[test]
    fn disk_identity_row_count_matches_combinatorics() {
        // (1 - V) - s*g with witness basis(2,4): C(10,2) = 45 rows
        let mut prog = SosProgram::new(2);
        let v = prog.declare_gram(MonomialBasis::new(2, 4), "V").unwrap();
        let s = prog.declare_multiplier(2, 3, "s").unwrap();
        let g = Polynomial::parse("1 - x1^2 - x2^2", 2).unwrap();
        let one = AffineExpr::constant(2, Polynomial::constant(2, 1.0));
        let expr = one
            .sub(&prog.gram_expr(v))
            .unwrap()
            .sub(&prog.gram_expr_times(s, Some(&g)))
            .unwrap();
        prog.add_sos_identity(expr, MonomialBasis::new(2, 4), "w").unwrap();
        let sdp = prog.compile().unwrap();
        assert_eq!(sdp.rows.len(), 45);
    }

    #[test]
    fn compilation_is_deterministic() {
        let build = || {
            let mut prog = SosProgram::new(2);
            let v = prog.declare_gram(MonomialBasis::new(2, 2), "V").unwrap();
            let s = prog.declare_multiplier(2, 1, "s").unwrap();
            prog.set_logdet_objective(v).unwrap();
            let g = Polynomial::parse("1 - x1^2 - x2^2", 2).unwrap();
            let expr = AffineExpr::constant(2, Polynomial::constant(2, 1.0))
                .sub(&prog.gram_expr(v))
                .unwrap()
                .sub(&prog.gram_expr_times(s, Some(&g)))
                .unwrap();
            prog.add_sos_identity(expr, MonomialBasis::new(2, 2), "w").unwrap();
            prog.compile().unwrap()
        };
        assert_eq!(build(), build());
    }

    #[test]
    fn hessian_expression_of_simple_quadratics() {
        // V = x1^2 + x2^2 (Gram = diag(0,1,1) over [1,x1,x2]) gives
        // y^T Hess V y = 2 y1^2 + 2 y2^2
        let mut prog = SosProgram::new(2);
        let v = prog.declare_gram(MonomialBasis::new(2, 1), "V").unwrap();
        let expr = prog.hessian_quad_expr(v);
        let q = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let p = expr.instantiate(&[q]).unwrap();
        assert_eq!(p, Polynomial::parse("2*x3^2 + 2*x4^2", 4).unwrap());
    }

    #[test]
    fn hessian_witness_spans_the_expression() {
        // quartic V: Hessian quadratic-in-y with x-degree 2 witnesses
        let mut prog = SosProgram::new(1);
        let v = prog.declare_gram(MonomialBasis::new(1, 2), "V").unwrap();
        let expr = prog.hessian_quad_expr(v);
        let witness = SosProgram::hessian_witness_basis(1, 1);
        let mut prog2 = prog.clone();
        assert!(prog2.add_sos_identity(expr, witness, "hess").is_ok());
    }

    #[test]
    fn instantiate_recovers_identity_polynomial() {
        let mut prog = SosProgram::new(2);
        let v = prog.declare_gram(MonomialBasis::new(2, 1), "V").unwrap();
        let expr = AffineExpr::constant(2, Polynomial::constant(2, 1.0))
            .sub(&prog.gram_expr(v))
            .unwrap();
        // V = x1^2 + x2^2
        let q = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let p = expr.instantiate(&[q]).unwrap();
        assert_eq!(p, Polynomial::parse("1 - x1^2 - x2^2", 2).unwrap());
    }
}
