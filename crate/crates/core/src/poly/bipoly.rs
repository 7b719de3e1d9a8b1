use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::field::{FieldCtx, FieldElem};

/// Sparse bivariate polynomial in `X` and `Y`.
#[derive(Clone)]
pub struct BiPoly {
    ctx: Arc<FieldCtx>,
    terms: BTreeMap<(u32, u32), FieldElem>,
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|(k, v)| (k, v.0))).finish()
    }
}

impl PartialEq for BiPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for BiPoly {}

impl BiPoly {
    pub fn zero(ctx: &Arc<FieldCtx>) -> BiPoly {
        BiPoly { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ctx: &Arc<FieldCtx>, c: FieldElem) -> BiPoly {
        BiPoly::monomial(ctx, c, 0, 0)
    }

    /// `c·X^i·Y^j`.
    pub fn monomial(ctx: &Arc<FieldCtx>, c: FieldElem, i: u32, j: u32) -> BiPoly {
        let mut out = BiPoly::zero(ctx);
        out.add_term(i, j, c);
        out
    }

    pub fn from_terms(ctx: &Arc<FieldCtx>, terms: &[(u32, u32, FieldElem)]) -> BiPoly {
        let mut out = BiPoly::zero(ctx);
        for &(i, j, c) in terms {
            out.add_term(i, j, c);
        }
        out
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: FieldElem) {
        let cur = self.terms.get(&(i, j)).copied().unwrap_or(FieldElem::ZERO);
        let s = self.ctx.add(cur, c);
        if s.is_zero() {
            self.terms.remove(&(i, j));
        } else {
            self.terms.insert((i, j), s);
        }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn coeff(&self, i: u32, j: u32) -> FieldElem {
        self.terms.get(&(i, j)).copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, FieldElem)> + '_ {
        self.terms.iter().map(|(&(i, j), &c)| (i, j, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (i, j, c) in other.terms() {
            out.add_term(i, j, c);
        }
        out
    }

    pub fn neg(&self) -> BiPoly {
        let mut out = BiPoly::zero(&self.ctx);
        for (i, j, c) in self.terms() {
            out.add_term(i, j, self.ctx.neg(c));
        }
        out
    }

    pub fn sub(&self, other: &BiPoly) -> BiPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: FieldElem) -> BiPoly {
        let mut out = BiPoly::zero(&self.ctx);
        for (i, j, c) in self.terms() {
            out.add_term(i, j, self.ctx.mul(c, s));
        }
        out
    }

    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero(&self.ctx);
        for (i, j, a) in self.terms() {
            for (k, l, b) in other.terms() {
                out.add_term(i + k, j + l, self.ctx.mul(a, b));
            }
        }
        out
    }

    pub fn eval(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        let ctx = &self.ctx;
        self.terms().fold(FieldElem::ZERO, |acc, (i, j, c)| {
            let t = ctx.mul(c, ctx.mul(ctx.pow_u64(x, i as u64), ctx.pow_u64(y, j as u64)));
            ctx.add(acc, t)
        })
    }

    /// Substitutes `X = x`, giving a univariate polynomial in `Y`.
    pub fn eval_x(&self, x: FieldElem) -> super::Poly {
        let ctx = &self.ctx;
        let terms: Vec<(usize, FieldElem)> =
            self.terms().map(|(i, j, c)| (j as usize, ctx.mul(c, ctx.pow_u64(x, i as u64)))).collect();
        super::Poly::from_terms(ctx, &terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::default_ctx;

    #[test]
    fn frobenius_square() {
        let ctx = default_ctx(2, 1).unwrap();
        let xy = BiPoly::from_terms(&ctx, &[(1, 0, FieldElem::ONE), (0, 1, FieldElem::ONE)]);
        let sq = xy.mul(&xy);
        assert_eq!(sq, BiPoly::from_terms(&ctx, &[(2, 0, FieldElem::ONE), (0, 2, FieldElem::ONE)]));
    }

    #[test]
    fn eval_xy() {
        let ctx = default_ctx(2, 2).unwrap();
        let xy = BiPoly::monomial(&ctx, FieldElem::ONE, 1, 1);
        assert_eq!(xy.eval(FieldElem(2), FieldElem(3)), FieldElem::ONE);
    }

    #[test]
    fn product_order_is_irrelevant() {
        let ctx = default_ctx(2, 2).unwrap();
        let factor = |z: FieldElem| {
            BiPoly::from_terms(&ctx, &[(0, 0, FieldElem::ONE), (1, 0, z), (0, 1, ctx.neg(ctx.pow_u64(z, 2)))])
        };
        let elems: Vec<_> = ctx.elements().skip(1).collect();
        let fwd = elems.iter().fold(BiPoly::constant(&ctx, FieldElem::ONE), |acc, &z| acc.mul(&factor(z)));
        let rev = elems.iter().rev().fold(BiPoly::constant(&ctx, FieldElem::ONE), |acc, &z| acc.mul(&factor(z)));
        assert_eq!(fwd, rev);
        for x in ctx.elements() {
            for y in ctx.elements() {
                let direct = elems.iter().fold(FieldElem::ONE, |acc, &z| ctx.mul(acc, factor(z).eval(x, y)));
                assert_eq!(fwd.eval(x, y), direct);
            }
        }
    }
}
