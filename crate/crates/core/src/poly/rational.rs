use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use super::{Poly, PolyError};
use crate::field::{FieldCtx, FieldElem};

/// A point of the projective line over the ambient field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum P1Point {
    Finite(FieldElem),
    Infinity,
}

impl fmt::Display for P1Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            P1Point::Finite(z) => write!(f, "{z}"),
            P1Point::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for P1Point {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl P1Point {
    pub fn finite(self) -> Option<FieldElem> {
        match self {
            P1Point::Finite(z) => Some(z),
            P1Point::Infinity => None,
        }
    }
}

/// Quotient `num/den` with `gcd(num, den) = 1` and `den` monic.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMap {
    num: Poly,
    den: Poly,
    removed: Poly,
}

impl fmt::Debug for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// `g = g_0 ∘ X^{p^ℓ}` with `g_0` separable.
#[derive(Clone, Debug)]
pub struct SeparableSplit {
    pub separable: bool,
    pub ell: u32,
    pub base: RationalMap,
}

impl RationalMap {
    /// Divides out the common factor and makes the denominator monic.
    pub fn new(num: Poly, den: Poly) -> Result<RationalMap, PolyError> {
        if num.is_zero() && den.is_zero() {
            return Err(PolyError::BothZero);
        }
        if den.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        let c = num.gcd(&den);
        let num = num.exact_div(&c)?;
        let den = den.exact_div(&c)?;
        let inv = num.ctx().inv(den.lead())?;
        Ok(RationalMap { num: num.scale(inv), den: den.scale(inv), removed: c })
    }

    pub fn from_poly(p: Poly) -> RationalMap {
        let ctx = p.ctx().clone();
        RationalMap { num: p, den: Poly::one(&ctx), removed: Poly::one(&ctx) }
    }

    /// Parses `num|den`; a bare polynomial has denominator 1.
    pub fn parse(ctx: &Arc<FieldCtx>, text: &str) -> Result<RationalMap, PolyError> {
        match text.split_once('|') {
            Some((n, d)) => RationalMap::new(Poly::parse(ctx, n)?, Poly::parse(ctx, d)?),
            None => Ok(RationalMap::from_poly(Poly::parse(ctx, text)?)),
        }
    }

    pub fn to_text(&self) -> String {
        format!("{}|{}", self.num.to_text(), self.den.to_text())
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        self.num.ctx()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    /// The monic common factor removed during normalization.
    pub fn removed_factor(&self) -> &Poly {
        &self.removed
    }

    pub fn degree(&self) -> usize {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn eval(&self, x: P1Point) -> P1Point {
        let ctx = self.ctx();
        match x {
            P1Point::Finite(z) => {
                let d = self.den.eval(z);
                if d.is_zero() {
                    P1Point::Infinity
                } else {
                    P1Point::Finite(ctx.div(self.num.eval(z), d).expect("nonzero"))
                }
            }
            P1Point::Infinity => {
                let dn = self.num.degree();
                let dd = self.den.degree().expect("nonzero denominator");
                match dn {
                    None => P1Point::Finite(FieldElem::ZERO),
                    Some(n) if n > dd => P1Point::Infinity,
                    Some(n) if n < dd => P1Point::Finite(FieldElem::ZERO),
                    Some(_) => P1Point::Finite(ctx.div(self.num.lead(), self.den.lead()).expect("nonzero")),
                }
            }
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &RationalMap) -> Result<RationalMap, PolyError> {
        let m = self.degree();
        let ctx = self.ctx();
        let mut p_pows = vec![Poly::one(ctx)];
        let mut r_pows = vec![Poly::one(ctx)];
        for i in 0..m {
            p_pows.push(p_pows[i].mul(&inner.num));
            r_pows.push(r_pows[i].mul(&inner.den));
        }
        let homog = |f: &Poly| {
            (0..=m).fold(Poly::zero(ctx), |acc, i| {
                let c = f.coeff(i);
                if c.is_zero() {
                    acc
                } else {
                    acc.add(&p_pows[i].mul(&r_pows[m - i]).scale(c))
                }
            })
        };
        RationalMap::new(homog(&self.num), homog(&self.den))
    }

    /// `num'·den − num·den'`; zero exactly when the map lies in `K(X^p)`.
    pub fn wronskian(&self) -> Poly {
        self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative()))
    }

    pub fn frobenius_coeffs(&self, e: u64) -> RationalMap {
        RationalMap {
            num: self.num.frobenius_coeffs(e),
            den: self.den.frobenius_coeffs(e),
            removed: self.removed.frobenius_coeffs(e),
        }
    }

    /// Writes the map as `g_0 ∘ X^{p^ℓ}` with `g_0` separable.
    pub fn separable_split(&self) -> Result<SeparableSplit, PolyError> {
        if self.is_constant() {
            return Err(PolyError::ConstantMap);
        }
        let p = self.ctx().characteristic() as usize;
        let in_p = |f: &Poly| f.coeffs().iter().enumerate().all(|(i, c)| c.is_zero() || i % p == 0);
        let mut cur = self.clone();
        let mut ell = 0;
        while in_p(&cur.num) && in_p(&cur.den) {
            let squeeze = |f: &Poly| {
                let coeffs = f.coeffs().iter().step_by(p).copied().collect();
                Poly::new(f.ctx(), coeffs)
            };
            cur = RationalMap { num: squeeze(&cur.num), den: squeeze(&cur.den), removed: cur.removed.clone() };
            ell += 1;
        }
        Ok(SeparableSplit { separable: ell == 0, ell, base: cur })
    }
}

/// `(aX + b)/(cX + d)` with `ad − bc ≠ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeOneMap {
    pub a: FieldElem,
    pub b: FieldElem,
    pub c: FieldElem,
    pub d: FieldElem,
}

impl DegreeOneMap {
    pub fn new(ctx: &FieldCtx, a: FieldElem, b: FieldElem, c: FieldElem, d: FieldElem) -> Result<DegreeOneMap, PolyError> {
        if ctx.sub(ctx.mul(a, d), ctx.mul(b, c)).is_zero() {
            return Err(PolyError::DegenerateMap);
        }
        Ok(DegreeOneMap { a, b, c, d })
    }

    pub fn identity() -> DegreeOneMap {
        DegreeOneMap { a: FieldElem::ONE, b: FieldElem::ZERO, c: FieldElem::ZERO, d: FieldElem::ONE }
    }

    pub fn inverse(&self, ctx: &FieldCtx) -> DegreeOneMap {
        DegreeOneMap { a: self.d, b: ctx.neg(self.b), c: ctx.neg(self.c), d: self.a }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, ctx: &FieldCtx, inner: &DegreeOneMap) -> DegreeOneMap {
        let m = |x, y| ctx.mul(x, y);
        DegreeOneMap {
            a: ctx.add(m(self.a, inner.a), m(self.b, inner.c)),
            b: ctx.add(m(self.a, inner.b), m(self.b, inner.d)),
            c: ctx.add(m(self.c, inner.a), m(self.d, inner.c)),
            d: ctx.add(m(self.c, inner.b), m(self.d, inner.d)),
        }
    }

    pub fn eval(&self, ctx: &FieldCtx, x: P1Point) -> P1Point {
        match x {
            P1Point::Finite(z) => {
                let den = ctx.add(ctx.mul(self.c, z), self.d);
                if den.is_zero() {
                    P1Point::Infinity
                } else {
                    let num = ctx.add(ctx.mul(self.a, z), self.b);
                    P1Point::Finite(ctx.div(num, den).expect("nonzero"))
                }
            }
            P1Point::Infinity => {
                if self.c.is_zero() {
                    P1Point::Infinity
                } else {
                    P1Point::Finite(ctx.div(self.a, self.c).expect("nonzero"))
                }
            }
        }
    }

    pub fn to_rational(&self, ctx: &Arc<FieldCtx>) -> RationalMap {
        RationalMap::new(Poly::new(ctx, vec![self.b, self.a]), Poly::new(ctx, vec![self.d, self.c]))
            .expect("nondegenerate map")
    }

    /// `ρ ∘ g ∘ σ`.
    pub fn sandwich(ctx: &Arc<FieldCtx>, rho: &DegreeOneMap, g: &RationalMap, sigma: &DegreeOneMap) -> Result<RationalMap, PolyError> {
        rho.to_rational(ctx).compose(&g.compose(&sigma.to_rational(ctx))?)
    }
}

fn in_mu(ctx: &FieldCtx, z: FieldElem, q: u64) -> bool {
    ctx.pow_u64(z, q + 1) == FieldElem::ONE
}

/// Whether `ρ` permutes `μ_{q+1}`, decided from the shape `(β^q X + α^q)/(αX + β)` with
/// `α^{q+1} ≠ β^{q+1}` and confirmed by enumeration.
pub fn mu_perm_deg1_test(ctx: &FieldCtx, rho: &DegreeOneMap, q: u64) -> Result<bool, PolyError> {
    let (a, b, c, d) = (rho.a, rho.b, rho.c, rho.d);
    let t = if !d.is_zero() { ctx.div(a, ctx.pow_u64(d, q))? } else { ctx.div(b, ctx.pow_u64(c, q))? };
    let shape = in_mu(ctx, t, q)
        && a == ctx.mul(t, ctx.pow_u64(d, q))
        && b == ctx.mul(t, ctx.pow_u64(c, q))
        && ctx.pow_u64(c, q + 1) != ctx.pow_u64(d, q + 1);
    let mu = ctx.mu_subgroup(q)?;
    let enumerated = mu.iter().all(|&z| match rho.eval(ctx, P1Point::Finite(z)) {
        P1Point::Finite(w) => in_mu(ctx, w, q),
        P1Point::Infinity => false,
    });
    if shape != enumerated {
        return Err(PolyError::CrossCheck(format!("mu permutation: shape {shape}, enumeration {enumerated}")));
    }
    Ok(shape)
}

/// Whether `ρ(μ_{q+1}) = P^1(F_q)`, decided from the shape `(δX + γδ^q)/(X + γ)` up to
/// scaling with `γ ∈ μ_{q+1}`, `δ ∉ F_q`, and confirmed by enumeration.
pub fn mu_to_p1_test(ctx: &FieldCtx, rho: &DegreeOneMap, q: u64) -> Result<bool, PolyError> {
    let shape = if rho.c.is_zero() {
        false
    } else {
        let gamma = ctx.div(rho.d, rho.c)?;
        let delta = ctx.div(rho.a, rho.c)?;
        let beta = ctx.div(rho.b, rho.c)?;
        in_mu(ctx, gamma, q) && ctx.pow_u64(delta, q) != delta && beta == ctx.mul(gamma, ctx.pow_u64(delta, q))
    };
    let mu = ctx.mu_subgroup(q)?;
    let enumerated = mu.iter().all(|&z| match rho.eval(ctx, P1Point::Finite(z)) {
        P1Point::Finite(w) => ctx.pow_u64(w, q) == w,
        P1Point::Infinity => true,
    });
    if shape != enumerated {
        return Err(PolyError::CrossCheck(format!("mu to P1(F_q): shape {shape}, enumeration {enumerated}")));
    }
    Ok(shape)
}

/// Ramification data of a map over one point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RamReport {
    pub target: P1Point,
    /// Ramification indices of all preimages over the algebraic closure, sorted.
    pub multiset: Vec<u32>,
    /// Number of distinct preimages over the algebraic closure.
    pub preimage_count: usize,
    /// Preimages found in the ambient field, with their indices.
    pub resolved: Vec<(P1Point, u32)>,
}

impl RamReport {
    pub fn fully_resolved(&self) -> bool {
        self.resolved.len() == self.preimage_count
    }

    /// Fails with `SplitFailure` unless every preimage lies in the ambient field.
    pub fn require_split(self) -> Result<RamReport, PolyError> {
        if self.fully_resolved() {
            Ok(self)
        } else {
            Err(PolyError::SplitFailure { found: self.resolved.len(), expected: self.preimage_count })
        }
    }

    /// `Σ (e − 1)` over the fiber.
    pub fn excess(&self) -> u32 {
        self.multiset.iter().map(|e| e - 1).sum()
    }
}

/// The ramification multiset of `g` over `beta`, from a squarefree decomposition of the fiber
/// polynomial; preimages outside the ambient field are counted but left unresolved.
pub fn ramification_multiset(g: &RationalMap, beta: P1Point) -> Result<RamReport, PolyError> {
    if g.is_constant() {
        return Err(PolyError::ConstantMap);
    }
    let deg = g.degree();
    let fiber = match beta {
        P1Point::Finite(b) => g.num.sub(&g.den.scale(b)),
        P1Point::Infinity => g.den.clone(),
    };
    let fdeg = fiber.degree().ok_or(PolyError::ConstantMap)?;
    let mut multiset = Vec::new();
    let mut resolved = Vec::new();
    let mut preimage_count = 0;
    if fdeg > 0 {
        for (s, i) in fiber.squarefree_decomposition()? {
            let d = s.degree().unwrap_or(0);
            multiset.extend(std::iter::repeat_n(i, d));
            preimage_count += d;
            resolved.extend(s.roots_in_field().into_iter().map(|z| (P1Point::Finite(z), i)));
        }
    }
    if deg > fdeg {
        let e = (deg - fdeg) as u32;
        multiset.push(e);
        preimage_count += 1;
        resolved.push((P1Point::Infinity, e));
    }
    multiset.sort_unstable();
    resolved.sort_unstable();
    Ok(RamReport { target: beta, multiset, preimage_count, resolved })
}

/// `e_g(α)`.
pub fn ramification_index(g: &RationalMap, alpha: P1Point) -> Result<u32, PolyError> {
    if g.is_constant() {
        return Err(PolyError::ConstantMap);
    }
    let beta = g.eval(alpha);
    match alpha {
        P1Point::Finite(z) => {
            let fiber = match beta {
                P1Point::Finite(b) => g.num.sub(&g.den.scale(b)),
                P1Point::Infinity => g.den.clone(),
            };
            Ok(fiber.multiplicity_at(z))
        }
        P1Point::Infinity => {
            let fiber_deg = match beta {
                P1Point::Finite(b) => g.num.sub(&g.den.scale(b)).degree().unwrap_or(0),
                P1Point::Infinity => g.den.degree().unwrap_or(0),
            };
            Ok((g.degree() - fiber_deg) as u32)
        }
    }
}

/// Ramification over every branch point that has a ramification point in the ambient field.
#[derive(Clone, Debug)]
pub struct RealizedRamification {
    pub fibers: Vec<RamReport>,
}

impl RealizedRamification {
    /// `Σ (e − 1)` over all ramification points lying over the collected branch points.
    pub fn total_excess(&self) -> u32 {
        self.fibers.iter().map(RamReport::excess).sum()
    }
}

/// Collects the fibers over `g(α)` for every ramification point `α ∈ P^1` of the ambient field.
pub fn realized_ramification(g: &RationalMap) -> Result<RealizedRamification, PolyError> {
    if g.is_constant() {
        return Err(PolyError::ConstantMap);
    }
    let w = g.wronskian();
    let mut candidates: Vec<P1Point> = w.roots_in_field().into_iter().map(P1Point::Finite).collect();
    candidates.push(P1Point::Infinity);
    let mut branch = BTreeSet::new();
    for a in candidates {
        if ramification_index(g, a)? > 1 {
            branch.insert(g.eval(a));
        }
    }
    let fibers = branch.into_iter().map(|b| ramification_multiset(g, b)).collect::<Result<Vec<_>, _>>()?;
    Ok(RealizedRamification { fibers })
}
