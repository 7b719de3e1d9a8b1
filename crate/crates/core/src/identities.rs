//! The bivariate product identity over `F_{q^n}` and the univariate factorizations it rests on.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::field::{default_ctx, prime_power, FieldCtx, FieldElem, FieldError};
use crate::poly::{BiPoly, Poly, PolyError};

/// Largest field order handled by the dense grids.
pub const DENSE_LIMIT: u64 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdentityError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("division left a nonzero remainder")]
    NonExactDivision,
    #[error("q^n = {0} exceeds the dense limit")]
    SizeLimit(u64),
}

/// A concrete field `F_{q^n}` with the set `Δ = {(w^q − w)^{q−1} : w ∉ F_q}`.
#[derive(Clone, Debug)]
pub struct IdentityInstance {
    pub q: u64,
    pub n: u32,
    pub k: u32,
    pub ctx: Arc<FieldCtx>,
    pub delta: BTreeSet<FieldElem>,
}

impl IdentityInstance {
    pub fn new(q: u64, n: u32) -> Result<IdentityInstance, IdentityError> {
        let (p, k) = prime_power(q)?;
        let size = q.checked_pow(n).unwrap_or(u64::MAX);
        if n == 0 || size > DENSE_LIMIT {
            return Err(IdentityError::SizeLimit(size));
        }
        let ctx = default_ctx(p, k * n)?;
        let delta = ctx
            .elements()
            .filter(|&w| !ctx.in_subfield(w, k))
            .map(|w| ctx.pow_u64(ctx.sub(ctx.pow_u64(w, q), w), q - 1))
            .collect();
        Ok(IdentityInstance { q, n, k, ctx, delta })
    }

    pub fn size(&self) -> u64 {
        self.q.pow(self.n)
    }

    /// `(q^n − 1)/(q − 1)`.
    fn m(&self) -> u64 {
        (self.size() - 1) / (self.q - 1)
    }

    /// `(q^{n−1} − 1)/(q − 1)`.
    pub fn expected_delta_len(&self) -> usize {
        ((self.q.pow(self.n - 1) - 1) / (self.q - 1)) as usize
    }
}

/// Dense bivariate polynomial with `X`-degree and `Y`-degree at most `dim − 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseGrid {
    dim: usize,
    cells: Vec<FieldElem>,
}

impl DenseGrid {
    pub fn zero(dim: usize) -> DenseGrid {
        DenseGrid { dim, cells: vec![FieldElem::ZERO; dim * dim] }
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        self.cells[i * self.dim + j]
    }

    fn slot(&mut self, i: usize, j: usize) -> &mut FieldElem {
        &mut self.cells[i * self.dim + j]
    }

    /// Multiplies in place by `1 + sX + tY`, assuming the current total degree is at most `deg`.
    fn mul_linear(&mut self, ctx: &FieldCtx, s: FieldElem, t: FieldElem, deg: usize) {
        for total in (1..=deg + 1).rev() {
            for i in 0..=total.min(self.dim - 1) {
                let j = total - i;
                if j >= self.dim {
                    continue;
                }
                let mut acc = self.get(i, j);
                if i > 0 {
                    acc = ctx.add(acc, ctx.mul(s, self.get(i - 1, j)));
                }
                if j > 0 {
                    acc = ctx.add(acc, ctx.mul(t, self.get(i, j - 1)));
                }
                *self.slot(i, j) = acc;
            }
        }
    }

    pub fn to_bipoly(&self, ctx: &Arc<FieldCtx>) -> BiPoly {
        let mut out = BiPoly::zero(ctx);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let c = self.get(i, j);
                if !c.is_zero() {
                    out.add_term(i as u32, j as u32, c);
                }
            }
        }
        out
    }
}

/// `X^{q^n−1} − 1 + Π_{z ≠ 0}(1 + zX − z^q Y)`.
pub fn thm81_lhs(inst: &IdentityInstance) -> BiPoly {
    let ctx = &inst.ctx;
    let dim = inst.size() as usize;
    let mut grid = DenseGrid::zero(dim);
    *grid.slot(0, 0) = FieldElem::ONE;
    for (deg, z) in ctx.elements().skip(1).enumerate() {
        grid.mul_linear(ctx, z, ctx.neg(ctx.pow_u64(z, inst.q)), deg);
    }
    let mut out = grid.to_bipoly(ctx);
    out.add_term((inst.size() - 1) as u32, 0, FieldElem::ONE);
    out.add_term(0, 0, ctx.neg(FieldElem::ONE));
    out
}

/// Long division in `X` by a divisor whose leading `X`-coefficient is one and free of `Y`.
fn divide_in_x(num: &BiPoly, den: &BiPoly) -> Result<BiPoly, IdentityError> {
    let ctx = num.ctx().clone();
    let lead_x = den.terms().map(|(i, _, _)| i).max().ok_or(PolyError::DivisionByZeroPoly)?;
    let lead: Vec<_> = den.terms().filter(|&(i, _, _)| i == lead_x).collect();
    if lead.len() != 1 || lead[0].1 != 0 || lead[0].2 != FieldElem::ONE {
        return Err(IdentityError::NonExactDivision);
    }
    let mut rem = num.clone();
    let mut quot = BiPoly::zero(&ctx);
    while let Some((i, j, c)) = rem.terms().filter(|&(i, _, _)| i >= lead_x).max_by_key(|&(i, j, _)| (i, j)) {
        let step = BiPoly::monomial(&ctx, c, i - lead_x, j);
        quot = quot.add(&step);
        rem = rem.sub(&step.mul(den));
    }
    if !rem.is_zero() {
        return Err(IdentityError::NonExactDivision);
    }
    Ok(quot)
}

/// `−Y · (X^{q^n−1} − Y^{q^n−1})/(X^M − Y^M) · (Y^{(q^n−q)/(q−1)} + Σ X^{1+(q^n−q^{i+1})/(q−1)} Y^{(q^i−q)/(q−1)})`.
pub fn thm81_rhs(inst: &IdentityInstance) -> Result<BiPoly, IdentityError> {
    let ctx = &inst.ctx;
    let (q, size, m) = (inst.q, inst.size(), inst.m() as u32);
    let one = FieldElem::ONE;
    let neg_one = ctx.neg(one);
    let top = (size - 1) as u32;
    let num = BiPoly::from_terms(ctx, &[(top, 0, one), (0, top, neg_one)]);
    let den = BiPoly::from_terms(ctx, &[(m, 0, one), (0, m, neg_one)]);
    let quotient = divide_in_x(&num, &den)?;
    let mut tail = BiPoly::monomial(ctx, one, 0, ((size - q) / (q - 1)) as u32);
    for i in 1..inst.n {
        let xe = 1 + (size - q.pow(i + 1)) / (q - 1);
        let ye = (q.pow(i) - q) / (q - 1);
        tail.add_term(xe as u32, ye as u32, one);
    }
    Ok(BiPoly::monomial(ctx, neg_one, 0, 1).mul(&quotient).mul(&tail))
}

pub fn verify_thm81(inst: &IdentityInstance) -> Result<bool, IdentityError> {
    Ok(thm81_lhs(inst) == thm81_rhs(inst)?)
}

/// `Π_{z ≠ 0}(1 + z − z^q Y)`, the left side at `X = 1`.
pub fn lemma82_product(inst: &IdentityInstance) -> Poly {
    let ctx = &inst.ctx;
    ctx.elements().skip(1).fold(Poly::one(ctx), |acc, z| {
        acc.mul(&Poly::new(ctx, vec![ctx.add(FieldElem::ONE, z), ctx.neg(ctx.pow_u64(z, inst.q))]))
    })
}

fn delta_power_product(inst: &IdentityInstance) -> Poly {
    let ctx = &inst.ctx;
    inst.delta.iter().fold(Poly::one(ctx), |acc, &u| acc.mul(&Poly::new(ctx, vec![ctx.neg(u), FieldElem::ONE])))
}

fn binomial(ctx: &Arc<FieldCtx>, e: u64, c: i64) -> Poly {
    Poly::from_terms(ctx, &[(e as usize, FieldElem::ONE), (0, ctx.from_int(c))])
}

/// `−(Y^{q^n} − Y)/(Y^M − 1) · Π_{u ∈ Δ}(Y − u)^q`.
pub fn lemma82_rhs(inst: &IdentityInstance) -> Result<Poly, IdentityError> {
    let ctx = &inst.ctx;
    let num = Poly::from_terms(ctx, &[(inst.size() as usize, FieldElem::ONE), (1, ctx.neg(FieldElem::ONE))]);
    let (quot, rem) = num.divrem(&binomial(ctx, inst.m(), -1))?;
    if !rem.is_zero() {
        return Err(IdentityError::NonExactDivision);
    }
    Ok(quot.neg().mul(&delta_power_product(inst).pow(inst.q)))
}

pub fn verify_lemma82(inst: &IdentityInstance) -> Result<bool, IdentityError> {
    Ok(inst.delta.len() == inst.expected_delta_len() && lemma82_product(inst) == lemma82_rhs(inst)?)
}

/// `Π_{z ∈ F}(Y − (z+1)z^{q−1})`.
pub fn cor83_product(inst: &IdentityInstance) -> Poly {
    let ctx = &inst.ctx;
    ctx.elements().fold(Poly::one(ctx), |acc, z| {
        let v = ctx.mul(ctx.add(z, FieldElem::ONE), ctx.pow_u64(z, inst.q - 1));
        acc.mul(&Poly::new(ctx, vec![ctx.neg(v), FieldElem::ONE]))
    })
}

/// `Y^2 · (Y^{q^n−1} − 1)/(Y^M − 1) · Π_{u ∈ Δ}(Y − u)^q`.
pub fn cor83_rhs(inst: &IdentityInstance) -> Result<Poly, IdentityError> {
    let ctx = &inst.ctx;
    let (quot, rem) = binomial(ctx, inst.size() - 1, -1).divrem(&binomial(ctx, inst.m(), -1))?;
    if !rem.is_zero() {
        return Err(IdentityError::NonExactDivision);
    }
    Ok(quot.shift(2).mul(&delta_power_product(inst).pow(inst.q)))
}

pub fn verify_cor83(inst: &IdentityInstance) -> Result<bool, IdentityError> {
    Ok(cor83_product(inst) == cor83_rhs(inst)?)
}

/// `Σ_{i=1}^{n} Y^{(q^{i−1} − 1)/(q − 1)}`.
pub fn lemma84_sum(inst: &IdentityInstance) -> Poly {
    let ctx = &inst.ctx;
    let terms: Vec<(usize, FieldElem)> =
        (1..=inst.n).map(|i| (((inst.q.pow(i - 1) - 1) / (inst.q - 1)) as usize, FieldElem::ONE)).collect();
    Poly::from_terms(ctx, &terms)
}

pub fn verify_lemma84(inst: &IdentityInstance) -> bool {
    delta_power_product(inst) == lemma84_sum(inst)
}

/// Whether the left side at `X = 1` reproduces the univariate product.
pub fn verify_x1_consistency(inst: &IdentityInstance) -> bool {
    thm81_lhs(inst).eval_x(FieldElem::ONE) == lemma82_product(inst)
}

/// Whether the number of values of `z ↦ (z+1)z^{q−1}` equals the number of distinct roots of the factored side.
pub fn verify_image_size(inst: &IdentityInstance) -> Result<bool, IdentityError> {
    let ctx = &inst.ctx;
    let values: BTreeSet<FieldElem> =
        ctx.elements().map(|z| ctx.mul(ctx.add(z, FieldElem::ONE), ctx.pow_u64(z, inst.q - 1))).collect();
    Ok(values.len() == cor83_rhs(inst)?.count_roots_in_field())
}

/// Outcome of every check for one `(q, n)`.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub q: u64,
    pub n: u32,
    pub delta_len: usize,
    pub thm81: Option<bool>,
    pub lemma82: Option<bool>,
    pub cor83: Option<bool>,
    pub lemma84: Option<bool>,
    pub x1_consistency: Option<bool>,
    pub image_size: Option<bool>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        [self.thm81, self.lemma82, self.cor83, self.lemma84, self.x1_consistency, self.image_size]
            .iter()
            .all(|v| v.unwrap_or(true))
    }
}

/// Which checks to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Thm81,
    Lem82,
    Cor83,
    Lem84,
    All,
}

pub fn run_identities(q: u64, n: u32, which: Which) -> Result<IdentityReport, IdentityError> {
    let inst = IdentityInstance::new(q, n)?;
    let on = |w: Which| which == Which::All || which == w;
    let mut report = IdentityReport {
        q,
        n,
        delta_len: inst.delta.len(),
        thm81: None,
        lemma82: None,
        cor83: None,
        lemma84: None,
        x1_consistency: None,
        image_size: None,
    };
    if on(Which::Thm81) {
        report.thm81 = Some(verify_thm81(&inst)?);
    }
    if on(Which::Lem82) {
        report.lemma82 = Some(verify_lemma82(&inst)?);
    }
    if on(Which::Cor83) {
        report.cor83 = Some(verify_cor83(&inst)?);
    }
    if on(Which::Lem84) {
        report.lemma84 = Some(verify_lemma84(&inst));
    }
    if which == Which::All {
        report.x1_consistency = Some(verify_x1_consistency(&inst));
        report.image_size = Some(verify_image_size(&inst)?);
    }
    Ok(report)
}

/// Every `(q, n)` with `q` in the standard list and `q^n ≤ 256`.
pub fn standard_instances() -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for q in [2u64, 3, 4, 5, 7, 8, 9, 16] {
        let mut n = 1;
        while q.pow(n) <= DENSE_LIMIT {
            out.push((q, n));
            n += 1;
        }
    }
    out
}
