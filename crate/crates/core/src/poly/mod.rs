//! Dense univariate polynomials over a field context.

mod bipoly;
mod rational;

pub use bipoly::BiPoly;
pub use rational::{
    mu_perm_deg1_test, mu_to_p1_test, ramification_index, ramification_multiset, realized_ramification,
    DegreeOneMap, P1Point, RamReport, RationalMap, RealizedRamification, SeparableSplit,
};

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::field::{FieldCtx, FieldElem, FieldError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,
    #[error("numerator and denominator are both zero")]
    BothZero,
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("degree-one map is degenerate")]
    DegenerateMap,
    #[error("map is constant")]
    ConstantMap,
    #[error("only {found} of {expected} preimages lie in the ambient field")]
    SplitFailure { found: usize, expected: usize },
    #[error("degree {0} exceeds the allowed maximum")]
    DegreeTooHigh(usize),
    #[error("beta must be a nonzero element of the subfield")]
    BetaNotInFqStar,
    #[error("q must be even")]
    OddCharacteristic,
    #[error("division is not exact")]
    NonExactDivision,
    #[error("shape test and enumeration disagree: {0}")]
    CrossCheck(String),
    #[error("malformed polynomial text: {0}")]
    Parse(String),
}

/// Polynomial with coefficients stored low degree first; no trailing zeros.
#[derive(Clone)]
pub struct Poly {
    ctx: Arc<FieldCtx>,
    coeffs: Vec<FieldElem>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]", self.to_text())
    }
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl Eq for Poly {}

impl Poly {
    pub fn new(ctx: &Arc<FieldCtx>, mut coeffs: Vec<FieldElem>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { ctx: ctx.clone(), coeffs }
    }

    pub fn zero(ctx: &Arc<FieldCtx>) -> Poly {
        Poly { ctx: ctx.clone(), coeffs: Vec::new() }
    }

    pub fn one(ctx: &Arc<FieldCtx>) -> Poly {
        Poly::constant(ctx, FieldElem::ONE)
    }

    pub fn constant(ctx: &Arc<FieldCtx>, c: FieldElem) -> Poly {
        Poly::new(ctx, vec![c])
    }

    pub fn x(ctx: &Arc<FieldCtx>) -> Poly {
        Poly::monomial(ctx, FieldElem::ONE, 1)
    }

    /// `c·X^deg`.
    pub fn monomial(ctx: &Arc<FieldCtx>, c: FieldElem, deg: usize) -> Poly {
        let mut coeffs = vec![FieldElem::ZERO; deg + 1];
        coeffs[deg] = c;
        Poly::new(ctx, coeffs)
    }

    /// Builds a polynomial from `(exponent, coefficient)` terms; repeated exponents add up.
    pub fn from_terms(ctx: &Arc<FieldCtx>, terms: &[(usize, FieldElem)]) -> Poly {
        let top = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let mut coeffs = vec![FieldElem::ZERO; top + 1];
        for &(e, c) in terms {
            coeffs[e] = ctx.add(coeffs[e], c);
        }
        Poly::new(ctx, coeffs)
    }

    pub fn from_encodings(ctx: &Arc<FieldCtx>, encs: &[u64]) -> Result<Poly, PolyError> {
        let coeffs = encs.iter().map(|&e| ctx.elem(e)).collect::<Result<Vec<_>, _>>()?;
        Ok(Poly::new(ctx, coeffs))
    }

    /// Parses `c_0,c_1,...,c_n`.
    pub fn parse(ctx: &Arc<FieldCtx>, text: &str) -> Result<Poly, PolyError> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Poly::zero(ctx));
        }
        let encs = text
            .split(',')
            .map(|s| s.trim().parse::<u64>().map_err(|_| PolyError::Parse(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Poly::from_encodings(ctx, &encs)
    }

    pub fn to_text(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        self.coeffs.iter().map(|c| c.0.to_string()).collect::<Vec<_>>().join(",")
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs.get(i).copied().unwrap_or(FieldElem::ZERO)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn lead(&self) -> FieldElem {
        self.coeffs.last().copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.ctx.add(self.coeff(i), other.coeff(i))).collect();
        Poly::new(&self.ctx, coeffs)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.ctx.sub(self.coeff(i), other.coeff(i))).collect();
        Poly::new(&self.ctx, coeffs)
    }

    pub fn neg(&self) -> Poly {
        Poly::new(&self.ctx, self.coeffs.iter().map(|&c| self.ctx.neg(c)).collect())
    }

    pub fn scale(&self, s: FieldElem) -> Poly {
        Poly::new(&self.ctx, self.coeffs.iter().map(|&c| self.ctx.mul(c, s)).collect())
    }

    /// `self · X^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![FieldElem::ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { ctx: self.ctx.clone(), coeffs }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.ctx);
        }
        let ctx = &self.ctx;
        let mut out = vec![FieldElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = ctx.add(out[i + j], ctx.mul(a, b));
            }
        }
        Poly::new(ctx, out)
    }

    pub fn pow(&self, mut n: u64) -> Poly {
        let mut acc = Poly::one(&self.ctx);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn eval(&self, x: FieldElem) -> FieldElem {
        self.coeffs.iter().rev().fold(FieldElem::ZERO, |acc, &c| self.ctx.add(self.ctx.mul(acc, x), c))
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| self.ctx.mul(self.ctx.from_int(i as i64), c))
            .collect();
        Poly::new(&self.ctx, coeffs)
    }

    pub fn divrem(&self, divisor: &Poly) -> Result<(Poly, Poly), PolyError> {
        let db = divisor.degree().ok_or(PolyError::DivisionByZeroPoly)?;
        let ctx = &self.ctx;
        let mut rem = self.coeffs.clone();
        if rem.len() <= db {
            return Ok((Poly::zero(ctx), self.clone()));
        }
        let inv = ctx.inv(divisor.lead())?;
        let mut quot = vec![FieldElem::ZERO; rem.len() - db];
        for i in (db..rem.len()).rev() {
            let c = rem[i];
            if c.is_zero() {
                continue;
            }
            let t = ctx.mul(c, inv);
            quot[i - db] = t;
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                rem[i - db + j] = ctx.sub(rem[i - db + j], ctx.mul(t, b));
            }
        }
        rem.truncate(db);
        Ok((Poly::new(ctx, quot), Poly::new(ctx, rem)))
    }

    pub fn rem(&self, divisor: &Poly) -> Result<Poly, PolyError> {
        Ok(self.divrem(divisor)?.1)
    }

    /// Quotient when `divisor` divides `self`.
    pub fn exact_div(&self, divisor: &Poly) -> Result<Poly, PolyError> {
        let (q, r) = self.divrem(divisor)?;
        if !r.is_zero() {
            return Err(PolyError::NonExactDivision);
        }
        Ok(q)
    }

    pub fn divides(&self, other: &Poly) -> Result<bool, PolyError> {
        Ok(other.rem(self)?.is_zero())
    }

    /// Scales to leading coefficient 1; the zero polynomial is returned unchanged.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.ctx.inv(self.lead()).expect("nonzero leading coefficient");
        self.scale(inv)
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Applies `z ↦ z^{p^e}` to every coefficient.
    pub fn frobenius_coeffs(&self, e: u64) -> Poly {
        Poly::new(&self.ctx, self.coeffs.iter().map(|&c| self.ctx.frobenius(c, e)).collect())
    }

    /// `A^{(q)}`: every coefficient raised to the power `q`.
    pub fn conj(&self, q: u64) -> Poly {
        Poly::new(&self.ctx, self.coeffs.iter().map(|&c| self.ctx.pow_u64(c, q)).collect())
    }

    /// `X^{deg A} A^{(q)}(1/X)`.
    pub fn hat(&self, q: u64) -> Result<Poly, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let coeffs = self.coeffs.iter().rev().map(|&c| self.ctx.pow_u64(c, q)).collect();
        Ok(Poly::new(&self.ctx, coeffs))
    }

    /// Self-conjugate-reciprocal test; returns the unit `α` with `hat(A) = α·A`.
    pub fn scr_unit(&self, q: u64) -> Result<Option<FieldElem>, PolyError> {
        let h = self.hat(q)?;
        if h.degree() != self.degree() {
            return Ok(None);
        }
        let alpha = self.ctx.div(h.lead(), self.lead())?;
        Ok((h == self.scale(alpha)).then_some(alpha))
    }

    pub fn is_scr(&self, q: u64) -> Result<bool, PolyError> {
        Ok(self.scr_unit(q)?.is_some())
    }

    /// Order of vanishing at `x`.
    pub fn multiplicity_at(&self, x: FieldElem) -> u32 {
        if self.is_zero() {
            return u32::MAX;
        }
        let lin = Poly::new(&self.ctx, vec![self.ctx.neg(x), FieldElem::ONE]);
        let mut cur = self.clone();
        let mut m = 0;
        while cur.eval(x).is_zero() {
            cur = cur.exact_div(&lin).expect("root gives exact division");
            m += 1;
        }
        m
    }

    /// Roots in `μ_{q+1}` with multiplicities, in the generator-power order of the subgroup.
    pub fn roots_in_mu(&self, q: u64) -> Result<Vec<(FieldElem, u32)>, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let mu = self.ctx.mu_subgroup(q)?;
        Ok(mu.into_iter().filter(|&z| self.eval(z).is_zero()).map(|z| (z, self.multiplicity_at(z))).collect())
    }

    /// `X^e mod self`.
    fn x_pow_mod(&self, mut e: u64) -> Poly {
        let mut acc = Poly::one(&self.ctx).rem(self).expect("nonzero modulus");
        let mut base = Poly::x(&self.ctx).rem(self).expect("nonzero modulus");
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(self).expect("nonzero modulus");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).rem(self).expect("nonzero modulus");
            }
        }
        acc
    }

    /// Number of distinct roots in the ambient field, via `deg gcd(P, X^{|F|} − X)`.
    pub fn count_roots_in_field(&self) -> usize {
        match self.degree() {
            None | Some(0) => 0,
            Some(1) => 1,
            Some(_) => {
                let t = self.x_pow_mod(self.ctx.size() as u64).sub(&Poly::x(&self.ctx));
                self.gcd(&t).degree().unwrap_or(0)
            }
        }
    }

    /// Distinct roots in the ambient field in increasing encoding order.
    pub fn roots_in_field(&self) -> Vec<FieldElem> {
        let want = self.count_roots_in_field();
        if want == 0 {
            return Vec::new();
        }
        if self.degree() == Some(1) {
            let r = self.ctx.div(self.ctx.neg(self.coeff(0)), self.coeff(1)).expect("degree one");
            return vec![r];
        }
        let mut out = Vec::with_capacity(want);
        for z in self.ctx.elements() {
            if self.eval(z).is_zero() {
                out.push(z);
                if out.len() == want {
                    break;
                }
            }
        }
        out
    }

    /// For `P` with `P' = 0`, the polynomial `R` with `P(X) = R(X)^p`.
    pub fn pth_root(&self) -> Poly {
        let p = self.ctx.characteristic() as usize;
        let coeffs = self.coeffs.iter().step_by(p).map(|&c| self.ctx.frobenius_inv(c, 1)).collect();
        Poly::new(&self.ctx, coeffs)
    }

    /// Squarefree decomposition `P = lc · Π S_i^i`, sorted by multiplicity.
    pub fn squarefree_decomposition(&self) -> Result<Vec<(Poly, u32)>, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let mut acc = BTreeMap::new();
        sqf_rec(&self.monic(), 1, &mut acc);
        Ok(acc.into_iter().map(|(i, s)| (s, i)).collect())
    }

    /// Substitutes `X ↦ X^m`.
    pub fn expand(&self, m: usize) -> Poly {
        if self.is_zero() || m == 1 {
            return self.clone();
        }
        let mut coeffs = vec![FieldElem::ZERO; (self.coeffs.len() - 1) * m + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * m] = c;
        }
        Poly::new(&self.ctx, coeffs)
    }
}

fn sqf_insert(acc: &mut BTreeMap<u32, Poly>, mult: u32, s: Poly) {
    let merged = match acc.remove(&mult) {
        Some(prev) => prev.mul(&s),
        None => s,
    };
    acc.insert(mult, merged);
}

fn sqf_rec(f: &Poly, mult: u32, acc: &mut BTreeMap<u32, Poly>) {
    if f.is_constant() {
        return;
    }
    let p = f.ctx.characteristic();
    let d = f.derivative();
    if d.is_zero() {
        sqf_rec(&f.pth_root().monic(), mult * p, acc);
        return;
    }
    let mut c = f.gcd(&d);
    let mut w = f.exact_div(&c).expect("gcd divides");
    let mut i = 1;
    while !w.is_constant() {
        let y = w.gcd(&c);
        let z = w.exact_div(&y).expect("gcd divides");
        if !z.is_constant() {
            sqf_insert(acc, i * mult, z.monic());
        }
        i += 1;
        w = y;
        c = c.exact_div(&w).expect("gcd divides");
    }
    if !c.is_constant() {
        sqf_rec(&c.pth_root().monic(), mult * p, acc);
    }
}

/// Outcome of the quadratic self-conjugate-reciprocal root test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadScrReport {
    pub trace_value: FieldElem,
    pub root_count: usize,
}

/// For even `q` and `β ∈ F_q^*`: `Tr_{F_q/F_2}(α^{q+1}/β²)` and the number of distinct
/// roots of `αX² + βX + α^q` in `μ_{q+1}`.
pub fn quad_scr_mu_roots(
    ctx: &Arc<FieldCtx>,
    alpha: FieldElem,
    beta: FieldElem,
    q: u64,
) -> Result<QuadScrReport, PolyError> {
    let (p, k) = crate::field::prime_power(q)?;
    if p != 2 {
        return Err(PolyError::OddCharacteristic);
    }
    if beta.is_zero() || ctx.pow_u64(beta, q) != beta {
        return Err(PolyError::BetaNotInFqStar);
    }
    let norm = ctx.pow_u64(alpha, q + 1);
    let arg = ctx.div(norm, ctx.mul(beta, beta))?;
    let trace_value = ctx.rel_trace(arg, k, 1)?;
    let poly = Poly::new(ctx, vec![ctx.pow_u64(alpha, q), beta, alpha]);
    let root_count = poly.roots_in_mu(q)?.len();
    Ok(QuadScrReport { trace_value, root_count })
}

/// `Δ(P) = β² − 4αγ` for `P = αX² + βX + γ`.
pub fn discriminant2(poly: &Poly) -> Result<FieldElem, PolyError> {
    if let Some(d) = poly.degree() {
        if d > 2 {
            return Err(PolyError::DegreeTooHigh(d));
        }
    }
    let ctx = poly.ctx();
    let (g, b, a) = (poly.coeff(0), poly.coeff(1), poly.coeff(2));
    let four_ag = ctx.mul(ctx.from_int(4), ctx.mul(a, g));
    Ok(ctx.sub(ctx.mul(b, b), four_ag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::default_ctx;

    fn f(ctx: &Arc<FieldCtx>, c: &[u64]) -> Poly {
        Poly::from_encodings(ctx, c).unwrap()
    }

    #[test]
    fn conj_and_hat_examples() {
        let ctx = default_ctx(2, 2).unwrap();
        let (w, w2) = (2, 3);
        assert_eq!(f(&ctx, &[1, w]).conj(2), f(&ctx, &[1, w2]));
        assert_eq!(f(&ctx, &[1, 1, 0, 1]).conj(2), f(&ctx, &[1, 1, 0, 1]));
        assert_eq!(Poly::x(&ctx).hat(2).unwrap(), Poly::one(&ctx));
        assert_eq!(Poly::zero(&ctx).hat(2), Err(PolyError::ZeroPolynomial));
        assert_eq!(f(&ctx, &[1, 1]).scr_unit(2).unwrap(), Some(FieldElem::ONE));
        assert_eq!(f(&ctx, &[w, 1]).scr_unit(2).unwrap(), Some(FieldElem(w2 as u32)));
    }

    #[test]
    fn mu_roots_examples() {
        let ctx = default_ctx(2, 2).unwrap();
        let roots = f(&ctx, &[1, 1, 1]).roots_in_mu(2).unwrap();
        assert_eq!(roots, vec![(FieldElem(2), 1), (FieldElem(3), 1)]);
        assert!(f(&ctx, &[0, 0, 1]).roots_in_mu(2).unwrap().is_empty());
        assert_eq!(f(&ctx, &[1, 0, 1]).roots_in_mu(2).unwrap(), vec![(FieldElem::ONE, 2)]);
    }

    #[test]
    fn gcd_derivative_divrem_examples() {
        let ctx = default_ctx(2, 1).unwrap();
        assert_eq!(f(&ctx, &[1, 0, 1]).gcd(&f(&ctx, &[1, 1])), f(&ctx, &[1, 1]));
        assert!(f(&ctx, &[0, 0, 0, 0, 1]).derivative().is_zero());
        let (q, r) = f(&ctx, &[0, 0, 0, 1]).divrem(&f(&ctx, &[0, 0, 1])).unwrap();
        assert_eq!(q, Poly::x(&ctx));
        assert!(r.is_zero());
        assert_eq!(f(&ctx, &[1]).divrem(&Poly::zero(&ctx)).unwrap_err(), PolyError::DivisionByZeroPoly);
    }

    #[test]
    fn squarefree_examples() {
        let ctx = default_ctx(2, 1).unwrap();
        // (X+1)^2 X = X^3 + X
        let d = f(&ctx, &[0, 1, 0, 1]).squarefree_decomposition().unwrap();
        assert_eq!(d, vec![(Poly::x(&ctx), 1), (f(&ctx, &[1, 1]), 2)]);
        let d = f(&ctx, &[1, 0, 0, 0, 1]).squarefree_decomposition().unwrap();
        assert_eq!(d, vec![(f(&ctx, &[1, 1]), 4)]);
        assert_eq!(Poly::zero(&ctx).squarefree_decomposition(), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn squarefree_in_characteristic_three() {
        let ctx = default_ctx(3, 1).unwrap();
        // (X+1)^3 (X+2)^4 X
        let a = f(&ctx, &[1, 1]).pow(3).mul(&f(&ctx, &[2, 1]).pow(4)).mul(&Poly::x(&ctx));
        let d = a.squarefree_decomposition().unwrap();
        assert_eq!(d, vec![(Poly::x(&ctx), 1), (f(&ctx, &[1, 1]), 3), (f(&ctx, &[2, 1]), 4)]);
    }

    #[test]
    fn quad_scr_small_cases() {
        let ctx = default_ctx(2, 2).unwrap();
        let r = quad_scr_mu_roots(&ctx, FieldElem::ONE, FieldElem::ONE, 2).unwrap();
        assert_eq!((r.trace_value, r.root_count), (FieldElem::ONE, 2));
        let r = quad_scr_mu_roots(&ctx, FieldElem::ZERO, FieldElem::ONE, 2).unwrap();
        assert_eq!((r.trace_value, r.root_count), (FieldElem::ZERO, 0));
        assert_eq!(
            quad_scr_mu_roots(&ctx, FieldElem::ONE, FieldElem(2), 2),
            Err(PolyError::BetaNotInFqStar)
        );
    }

    #[test]
    fn discriminant_examples() {
        let ctx = default_ctx(2, 1).unwrap();
        assert_eq!(discriminant2(&f(&ctx, &[1, 1, 1])).unwrap(), FieldElem::ONE);
        assert_eq!(discriminant2(&f(&ctx, &[0, 0, 1])).unwrap(), FieldElem::ZERO);
        assert_eq!(discriminant2(&f(&ctx, &[0, 0, 0, 1])), Err(PolyError::DegreeTooHigh(3)));
    }

    #[test]
    fn field_roots() {
        let ctx = default_ctx(2, 4).unwrap();
        let p = f(&ctx, &[0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]);
        assert_eq!(p.count_roots_in_field(), 16);
        assert_eq!(p.roots_in_field().len(), 16);
        let irr = f(&ctx, &[1, 1, 1]);
        assert_eq!(irr.roots_in_field().len(), 2);
        let ctx2 = default_ctx(2, 1).unwrap();
        assert!(f(&ctx2, &[1, 1, 1]).roots_in_field().is_empty());
    }
}
