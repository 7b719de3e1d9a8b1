//! Condition checkers for the corollary families derived from the main criterion, each paired
//! with a brute-force permutation test.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::criteria::{canonical_r, conditions, trace_target_degree, QuadInput};
use crate::field::{default_ctx, gcd, ord2, FieldCtx, FieldElem, FieldError};
use crate::oracle::{is_perm_fq2, OracleError, SparsePoly};
use crate::rng::Stream;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConjectureError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(&'static str),
    #[error("no positive solution of the exponent congruence")]
    NoAdmissibleExponent,
    #[error("no admissible λ for k = {k}, ℓ = {l}")]
    NoAdmissibleLambda { k: u32, l: u32 },
    #[error("expected {expected} coefficients, got {found}")]
    BadPayload { expected: usize, found: usize },
    #[error("unknown corollary id {0:?}")]
    UnknownId(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CorId {
    C91,
    C92,
    C93,
    C94,
    C95,
    C95b,
    C96,
    C97,
    Remark96,
    Generalized97,
}

impl CorId {
    pub const ALL: [CorId; 10] = [
        CorId::C91,
        CorId::C92,
        CorId::C93,
        CorId::C94,
        CorId::C95,
        CorId::C95b,
        CorId::C96,
        CorId::C97,
        CorId::Remark96,
        CorId::Generalized97,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CorId::C91 => "9.1",
            CorId::C92 => "9.2",
            CorId::C93 => "9.3",
            CorId::C94 => "9.4",
            CorId::C95 => "9.5",
            CorId::C95b => "9.5b",
            CorId::C96 => "9.6",
            CorId::C97 => "9.7",
            CorId::Remark96 => "remark96",
            CorId::Generalized97 => "generalized97",
        }
    }

    /// Number of payload coefficients.
    pub fn arity(self) -> usize {
        match self {
            CorId::C91 | CorId::Generalized97 => 4,
            CorId::C92 | CorId::C93 => 3,
            CorId::C94 | CorId::C95 | CorId::C95b | CorId::C96 | CorId::C97 => 2,
            CorId::Remark96 => 1,
        }
    }

    /// Degree over `F_2` of the field the payload and oracle live in.
    pub fn ambient_degree(self, k: u32) -> u32 {
        match self {
            CorId::C95 | CorId::C95b => k,
            _ => 2 * k,
        }
    }
}

impl fmt::Display for CorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CorId {
    type Err = ConjectureError;

    fn from_str(s: &str) -> Result<CorId, ConjectureError> {
        let t = s.trim().to_ascii_lowercase();
        CorId::ALL
            .into_iter()
            .find(|id| id.label() == t)
            .ok_or_else(|| ConjectureError::UnknownId(s.to_string()))
    }
}

/// One parameter point. `exponent_shift` adds multiples of the congruence modulus to the
/// exponents, which must not change the induced function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorParams {
    pub id: CorId,
    pub k: u32,
    pub l: u32,
    pub payload: Vec<FieldElem>,
    pub exponent_shift: u64,
}

impl CorParams {
    pub fn new(id: CorId, k: u32, l: u32, payload: &[FieldElem]) -> CorParams {
        CorParams { id, k, l, payload: payload.to_vec(), exponent_shift: 0 }
    }

    pub fn q(&self) -> u64 {
        1 << self.k
    }

    pub fn big_q(&self) -> u64 {
        1 << self.l
    }
}

/// Parameter-level hypotheses, independent of the payload.
pub fn check_hypotheses(id: CorId, k: u32, l: u32) -> Result<(), ConjectureError> {
    if k == 0 || l == 0 {
        return Err(ConjectureError::HypothesisViolated("k and ℓ must be positive"));
    }
    if 2 * k > 24 || l > 24 {
        return Err(ConjectureError::HypothesisViolated("field too large"));
    }
    let (q, big_q) = (1u64 << k, 1u64 << l);
    let (k64, l64) = (k as u64, l as u64);
    match id {
        CorId::C91 if k.is_multiple_of(2) || l.is_multiple_of(2) => Err(ConjectureError::HypothesisViolated("k and ℓ must be odd")),
        CorId::C92 | CorId::C96 if gcd(big_q - 1, q + 1) != 1 => {
            Err(ConjectureError::HypothesisViolated("gcd(Q−1, q+1) must be 1"))
        }
        CorId::C93 | CorId::C94 if gcd(big_q + 1, q + 1) != 1 => {
            Err(ConjectureError::HypothesisViolated("gcd(Q+1, q+1) must be 1"))
        }
        CorId::C95 | CorId::C95b if k.is_multiple_of(2) || gcd(k64, l64) != 1 => {
            Err(ConjectureError::HypothesisViolated("k must be odd and coprime to ℓ"))
        }
        CorId::C97 | CorId::Generalized97 if gcd(2 * k64, l64) != 1 => {
            Err(ConjectureError::HypothesisViolated("gcd(2k, ℓ) must be 1"))
        }
        CorId::Remark96 if ord2(k64) != ord2(l64) => Err(ConjectureError::HypothesisViolated("ord2(k) must equal ord2(ℓ)")),
        _ => Ok(()),
    }
}

/// Smallest positive `u` with `u·mult ≡ target (mod modulus)`.
pub fn smallest_exponent(mult: u64, target: u64, modulus: u64) -> Result<u64, ConjectureError> {
    (1..=modulus)
        .find(|&u| (u % modulus) * (mult % modulus) % modulus == target % modulus)
        .ok_or(ConjectureError::NoAdmissibleExponent)
}

/// The exponent pair `(u, v)` of the corollaries that carry one.
pub fn exponents(id: CorId, k: u32, l: u32) -> Result<(u64, u64), ConjectureError> {
    let (q, big_q) = (1u64 << k, 1u64 << l);
    let m = q + 1;
    match id {
        CorId::C92 => Ok((smallest_exponent(big_q - 1, q, m)?, smallest_exponent(big_q - 1, big_q, m)?)),
        CorId::C93 | CorId::C94 => Ok((smallest_exponent(big_q + 1, 1, m)?, smallest_exponent(big_q + 1, big_q, m)?)),
        CorId::C96 | CorId::Remark96 => Ok((smallest_exponent(big_q - 1, big_q, m)?, smallest_exponent(big_q - 1, q, m)?)),
        CorId::C97 | CorId::Generalized97 => {
            let u = (big_q.pow(k + 1) - 1) / (big_q - 1);
            let v = 1 + q * ((big_q.pow(k) - 1) / (big_q - 1));
            Ok((u, v))
        }
        _ => Err(ConjectureError::NoAdmissibleExponent),
    }
}

struct Ops<'a> {
    ctx: &'a FieldCtx,
    k: u32,
    q: u64,
    big_q: u64,
    m: u32,
}

impl<'a> Ops<'a> {
    fn new(ctx: &'a FieldCtx, k: u32, l: u32) -> Ops<'a> {
        Ops { ctx, k, q: 1 << k, big_q: 1 << l, m: trace_target_degree(k, l) }
    }

    fn add(&self, xs: &[FieldElem]) -> FieldElem {
        xs.iter().fold(FieldElem::ZERO, |acc, &x| self.ctx.add(acc, x))
    }

    fn mul(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        self.ctx.mul(x, y)
    }

    fn pow(&self, x: FieldElem, e: u64) -> FieldElem {
        self.ctx.pow_u64(x, e)
    }

    fn cj(&self, x: FieldElem) -> FieldElem {
        self.pow(x, self.q)
    }

    fn norm(&self, x: FieldElem) -> FieldElem {
        self.pow(x, self.q + 1)
    }

    /// `lhs^Q = e^{Q−1}·rhs`.
    fn q_relation(&self, lhs: FieldElem, e: FieldElem, rhs: FieldElem) -> bool {
        self.pow(lhs, self.big_q) == self.mul(self.pow(e, self.big_q - 1), rhs)
    }

    fn div(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        self.ctx.div(x, y).expect("nonzero divisor")
    }

    /// `Tr_{F_q/F_{2^m}}`.
    fn trace_m(&self, x: FieldElem) -> FieldElem {
        self.ctx.trace_poly(x, self.m, self.k)
    }

    /// `Tr_{F_q/F_2}`.
    fn trace_2(&self, x: FieldElem) -> FieldElem {
        self.ctx.trace_poly(x, 1, self.k)
    }

    fn in_fq(&self, x: FieldElem) -> bool {
        self.ctx.in_subfield(x, self.k)
    }

    fn permutes(&self, terms: &[(u64, FieldElem)]) -> Result<bool, ConjectureError> {
        let f = SparsePoly::new(self.ctx, terms);
        Ok(is_perm_fq2(self.ctx, &f, self.q)?.is_permutation)
    }
}

fn bit(b: bool) -> FieldElem {
    FieldElem(b as u32)
}

fn check_ambient(ctx: &FieldCtx, id: CorId, k: u32) -> Result<(), ConjectureError> {
    let need = id.ambient_degree(k);
    if ctx.characteristic() != 2 || !ctx.degree().is_multiple_of(need) {
        return Err(ConjectureError::HypothesisViolated("ambient field does not contain the required extension"));
    }
    Ok(())
}

/// `(condition verdict, oracle verdict)` in the default ambient field for the corollary.
pub fn cor_check(params: &CorParams) -> Result<(bool, bool), ConjectureError> {
    check_hypotheses(params.id, params.k, params.l)?;
    let ctx = default_ctx(2, params.id.ambient_degree(params.k))?;
    cor_check_in(&ctx, params)
}

/// As [`cor_check`] with an explicit ambient field.
pub fn cor_check_in(ctx: &Arc<FieldCtx>, params: &CorParams) -> Result<(bool, bool), ConjectureError> {
    let (id, k, l) = (params.id, params.k, params.l);
    check_hypotheses(id, k, l)?;
    check_ambient(ctx, id, k)?;
    if params.payload.len() != id.arity() {
        return Err(ConjectureError::BadPayload { expected: id.arity(), found: params.payload.len() });
    }
    let p = &params.payload;
    let o = Ops::new(ctx, k, l);
    let (q, big_q) = (o.q, o.big_q);
    let one = FieldElem::ONE;
    let shift = params.exponent_shift * (q + 1);
    match id {
        CorId::C91 => {
            let [a, b, c, d] = [p[0], p[1], p[2], p[3]];
            let e = o.add(&[o.norm(a), o.norm(b), o.norm(c), o.norm(d)]);
            let cond = !e.is_zero()
                && o.q_relation(
                    o.add(&[o.mul(o.cj(a), b), o.mul(o.cj(c), d)]),
                    e,
                    o.add(&[o.mul(o.cj(a), c), o.mul(o.cj(b), d)]),
                )
                && o.trace_2(o.div(o.add(&[o.norm(b), o.norm(c)]), e)) == one;
            let r = big_q + 1 + shift * (q - 1);
            let oracle = o.permutes(&[(r + (big_q + 1) * (q - 1), a), (r + big_q * (q - 1), b), (r + q - 1, c), (r, d)])?;
            Ok((cond, oracle))
        }
        CorId::C92 => {
            let [a, b, d] = [p[0], p[1], p[2]];
            let (u, v) = exponents(id, k, l)?;
            let (u, v) = (u + shift, v + shift);
            let e = o.add(&[one, o.norm(a), o.norm(b), o.norm(d)]);
            let cond = !e.is_zero()
                && o.q_relation(o.add(&[o.mul(a, o.cj(b)), o.cj(d)]), e, o.add(&[a, o.mul(b, o.cj(d))]))
                && o.trace_m(o.div(o.add(&[o.norm(a), o.norm(d)]), e)).is_zero();
            let oracle = o.permutes(&[(1, one), (q, b), (1 + v * (q - 1), a), (1 + u * (q - 1), d)])?;
            Ok((cond, oracle))
        }
        CorId::C93 => {
            let [a, b, c] = [p[0], p[1], p[2]];
            let (u, v) = exponents(id, k, l)?;
            let (u, v) = (u + shift, v + shift);
            let e = o.add(&[one, o.norm(a), o.norm(b), o.norm(c)]);
            let cond = !e.is_zero()
                && o.q_relation(o.add(&[o.mul(o.cj(a), b), o.cj(c)]), e, o.add(&[o.mul(o.cj(a), c), o.cj(b)]))
                && o.trace_m(o.div(o.add(&[o.norm(b), o.norm(c)]), e)).is_zero();
            let oracle = o.permutes(&[(1, one), (q, a), (1 + v * (q - 1), b), (1 + u * (q - 1), c)])?;
            Ok((cond, oracle))
        }
        CorId::C94 => {
            let [b, c] = [p[0], p[1]];
            let (u, v) = exponents(id, k, l)?;
            let (u, v) = (u + shift, v + shift);
            let e = o.add(&[one, o.norm(b), o.norm(c)]);
            let target = bit((k / o.m) % 2 == 1);
            let cond = !e.is_zero() && o.q_relation(c, e, b) && o.trace_m(o.div(one, e)) == target;
            let oracle = o.permutes(&[(1, one), (1 + v * (q - 1), b), (1 + u * (q - 1), c)])?;
            Ok((cond, oracle))
        }
        CorId::C95 | CorId::C95b => {
            let map = ButterflyMap::new(ctx, k, l, p[0], p[1])?;
            if id == CorId::C95 {
                cor95_check(ctx, &map)
            } else {
                cor95b_check(ctx, &map)
            }
        }
        CorId::C96 => {
            let [a, d] = [p[0], p[1]];
            if !o.in_fq(a) || !o.in_fq(d) {
                return Err(ConjectureError::HypothesisViolated("a and d must lie in F_q"));
            }
            let (u, v) = exponents(id, k, l)?;
            let (u, v) = (u + shift, v + shift);
            let cond = pair_conditions(&o, a, d);
            let oracle = o.permutes(&[(1, one), (1 + u * (q - 1), a), (1 + v * (q - 1), d)])?;
            Ok((cond, oracle))
        }
        CorId::C97 => {
            let [a, b] = [p[0], p[1]];
            if a.is_zero() || b.is_zero() || !o.in_fq(b) {
                return Err(ConjectureError::HypothesisViolated("need a ≠ 0 and b ∈ F_q^*"));
            }
            let s = o.add(&[a, b, one]);
            if s.is_zero() {
                return Err(ConjectureError::HypothesisViolated("a + b must differ from 1"));
            }
            let (u, _) = exponents(id, k, l)?;
            let u = u + params.exponent_shift * (q * q - 1);
            let fq = ctx.subfield_elements(k)?;
            let formula_holds = fq.iter().filter(|&&lam| o.pow(lam, big_q - 1) == b).any(|&lam| {
                let tail = o.add(&(1..=l).map(|i| o.pow(lam, big_q - (1u64 << i))).collect::<Vec<_>>());
                [FieldElem::ZERO, one].iter().any(|&eps| o.add(&[o.mul(eps, o.pow(lam, big_q)), tail]) == a)
            });
            let cond = formula_holds && o.trace_2(o.div(a, s)).is_zero();
            let oracle = o.permutes(&[(1, one), (q, b), (u, a)])?;
            Ok((cond, oracle))
        }
        CorId::Remark96 => {
            let member = remark96_family(ctx, k, l, p[0])?;
            Ok((member.conditions_hold && member.obstruction_nonzero, member.permutes))
        }
        CorId::Generalized97 => generalized97_check(ctx, k, l, [p[0], p[1], p[2], p[3]]),
    }
}

fn pair_conditions(o: &Ops<'_>, a: FieldElem, d: FieldElem) -> bool {
    let sq = |x| o.mul(x, x);
    let e = o.add(&[FieldElem::ONE, sq(a), sq(d)]);
    !e.is_zero() && o.q_relation(d, e, a) && o.trace_m(o.div(o.add(&[sq(a), sq(d)]), e)).is_zero()
}

/// `ψ(x, y) = (R(x, y), R(y, x))` with `R(X, Y) = (X + αY)^{Q+1} + (βY)^{Q+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ButterflyMap {
    pub k: u32,
    pub l: u32,
    pub alpha: FieldElem,
    pub beta: FieldElem,
}

impl ButterflyMap {
    pub fn new(ctx: &FieldCtx, k: u32, l: u32, alpha: FieldElem, beta: FieldElem) -> Result<ButterflyMap, ConjectureError> {
        check_hypotheses(CorId::C95, k, l)?;
        check_ambient(ctx, CorId::C95, k)?;
        if alpha.is_zero() || beta.is_zero() || !ctx.in_subfield(alpha, k) || !ctx.in_subfield(beta, k) {
            return Err(ConjectureError::HypothesisViolated("α and β must lie in F_q^*"));
        }
        Ok(ButterflyMap { k, l, alpha, beta })
    }

    pub fn q(&self) -> u64 {
        1 << self.k
    }

    pub fn big_q(&self) -> u64 {
        1 << self.l
    }

    /// The same map with `ℓ` replaced by `k + ℓ`.
    pub fn reduced(&self) -> ButterflyMap {
        ButterflyMap { l: self.k + self.l, ..*self }
    }
}

fn butterfly_r(ctx: &FieldCtx, map: &ButterflyMap, x: FieldElem, y: FieldElem) -> FieldElem {
    let e = map.big_q() + 1;
    ctx.add(ctx.pow_u64(ctx.add(x, ctx.mul(map.alpha, y)), e), ctx.pow_u64(ctx.mul(map.beta, y), e))
}

pub fn butterfly_eval(ctx: &FieldCtx, map: &ButterflyMap, x: FieldElem, y: FieldElem) -> (FieldElem, FieldElem) {
    (butterfly_r(ctx, map, x, y), butterfly_r(ctx, map, y, x))
}

/// Brute-force bijectivity of `ψ` on `F_q × F_q`.
pub fn butterfly_permutes(ctx: &FieldCtx, map: &ButterflyMap) -> Result<bool, ConjectureError> {
    let fq = ctx.subfield_elements(map.k)?;
    let n = fq.len();
    let mut pos = vec![u32::MAX; ctx.size() as usize];
    for (i, z) in fq.iter().enumerate() {
        pos[z.0 as usize] = i as u32;
    }
    let mut seen = vec![false; n * n];
    for &x in &fq {
        for &y in &fq {
            let (s, t) = butterfly_eval(ctx, map, x, y);
            let slot = pos[s.0 as usize] as usize * n + pos[t.0 as usize] as usize;
            if seen[slot] {
                return Ok(false);
            }
            seen[slot] = true;
        }
    }
    Ok(true)
}

/// `(α² + αβ + β² = 1, ψ bijective)`.
pub fn cor95_check(ctx: &FieldCtx, map: &ButterflyMap) -> Result<(bool, bool), ConjectureError> {
    let (a, b) = (map.alpha, map.beta);
    let lhs = ctx.add(ctx.add(ctx.mul(a, a), ctx.mul(a, b)), ctx.mul(b, b));
    Ok((lhs == FieldElem::ONE, butterfly_permutes(ctx, map)?))
}

/// `(β ≠ α + 1 ∧ u^Q = e^{Q−1} v, ψ bijective)`.
pub fn cor95b_check(ctx: &FieldCtx, map: &ButterflyMap) -> Result<(bool, bool), ConjectureError> {
    let o = Ops::new(ctx, map.k, map.l);
    let (a, b, big_q) = (map.alpha, map.beta, map.big_q());
    let a1 = ctx.add(a, FieldElem::ONE);
    let a1p = o.pow(a1, 2 * big_q + 2);
    let bp = o.pow(b, 2 * big_q + 2);
    let bq1 = o.pow(b, big_q + 1);
    let e = o.add(&[a1p, bp]);
    let u = o.add(&[a1p, o.pow(a, 2 * big_q + 1), a, o.mul(o.pow(a, big_q), bq1), bp]);
    let v = o.add(&[a1p, o.pow(a, big_q + 2), o.pow(a, big_q), o.mul(a, bq1), bp]);
    let cond = b != a1 && o.q_relation(u, e, v);
    Ok((cond, butterfly_permutes(ctx, map)?))
}

/// A member of the explicit family of permutations `X + aX^{u(q−1)+1} + dX^{v(q−1)+1}` with
/// `(a + d)·Tr_{F_q/F_2}(d/e) ≠ 0`.
#[derive(Clone, Debug, Serialize)]
pub struct Remark96Member {
    pub lambda: FieldElem,
    pub a: FieldElem,
    pub d: FieldElem,
    #[serde(skip)]
    pub poly: SparsePoly,
    pub permutes: bool,
    pub conditions_hold: bool,
    pub obstruction_nonzero: bool,
}

pub fn remark96_family(ctx: &FieldCtx, k: u32, l: u32, lambda: FieldElem) -> Result<Remark96Member, ConjectureError> {
    check_hypotheses(CorId::Remark96, k, l)?;
    check_hypotheses(CorId::C96, k, l)?;
    check_ambient(ctx, CorId::Remark96, k)?;
    let o = Ops::new(ctx, k, l);
    let (q, big_q) = (o.q, o.big_q);
    let one = FieldElem::ONE;
    if lambda.is_zero() || o.pow(lambda, q + 1) != one || o.pow(lambda, big_q + 1) == one {
        return Err(ConjectureError::HypothesisViolated("λ must lie in μ_(q+1) outside μ_(Q+1)"));
    }
    let lp = |e: u64| o.pow(lambda, e);
    let a = o.div(o.add(&[lp(big_q - 2), lp(big_q)]), o.add(&[one, lp(2 * big_q - 2)]));
    let d = o.div(o.add(&[one, lp(2 * big_q)]), o.add(&[lambda, lp(2 * big_q - 1)]));
    let (u, v) = exponents(CorId::Remark96, k, l)?;
    let poly = SparsePoly::new(ctx, &[(1, one), (u * (q - 1) + 1, a), (v * (q - 1) + 1, d)]);
    let permutes = is_perm_fq2(ctx, &poly, q)?.is_permutation;
    let conditions_hold = o.in_fq(a) && o.in_fq(d) && pair_conditions(&o, a, d);
    let e = o.add(&[one, o.mul(a, a), o.mul(d, d)]);
    let obstruction_nonzero = a != d && !e.is_zero() && o.trace_2(o.div(d, e)) == one;
    Ok(Remark96Member { lambda, a, d, poly, permutes, conditions_hold, obstruction_nonzero })
}

/// All admissible `λ`, in generator-power order.
pub fn remark96_lambdas(ctx: &FieldCtx, k: u32, l: u32) -> Result<Vec<FieldElem>, ConjectureError> {
    check_hypotheses(CorId::Remark96, k, l)?;
    let big_q = 1u64 << l;
    let lambdas: Vec<_> = ctx
        .mu_subgroup(1 << k)?
        .into_iter()
        .filter(|&z| ctx.pow_u64(z, big_q + 1) != FieldElem::ONE)
        .collect();
    if lambdas.is_empty() {
        return Err(ConjectureError::NoAdmissibleLambda { k, l });
    }
    Ok(lambdas)
}

pub fn remark96_members(ctx: &FieldCtx, k: u32, l: u32) -> Result<Vec<Remark96Member>, ConjectureError> {
    remark96_lambdas(ctx, k, l)?.into_iter().map(|lam| remark96_family(ctx, k, l, lam)).collect()
}

/// `aX^u + bX^q + cX + dX^v` against the main criterion on `(a, b, c, d)`.
pub fn generalized97_check(ctx: &FieldCtx, k: u32, l: u32, coeffs: [FieldElem; 4]) -> Result<(bool, bool), ConjectureError> {
    check_hypotheses(CorId::Generalized97, k, l)?;
    check_ambient(ctx, CorId::Generalized97, k)?;
    let o = Ops::new(ctx, k, l);
    let r = canonical_r(o.q, o.big_q).ok_or(ConjectureError::HypothesisViolated("no admissible r"))?;
    let cond = conditions(ctx, &QuadInput::new(2, k, l, r, coeffs)).verdict();
    let (u, v) = exponents(CorId::Generalized97, k, l)?;
    let [a, b, c, d] = coeffs;
    let oracle = o.permutes(&[(u, a), (o.q, b), (1, c), (v, d)])?;
    Ok((cond, oracle))
}

/// The finite set each payload coefficient ranges over.
pub fn payload_domain(ctx: &FieldCtx, id: CorId, k: u32, l: u32) -> Result<Vec<Vec<FieldElem>>, ConjectureError> {
    check_hypotheses(id, k, l)?;
    let small = ctx.subfield_elements(k)?;
    let big = || ctx.subfield_elements(2 * k);
    let nonzero = |v: &[FieldElem]| v.iter().copied().filter(|z| !z.is_zero()).collect::<Vec<_>>();
    Ok(match id {
        CorId::C95 | CorId::C95b => vec![nonzero(&small), nonzero(&small)],
        CorId::C96 => vec![small.clone(), small],
        CorId::C97 => vec![nonzero(&big()?), nonzero(&small)],
        CorId::Remark96 => vec![remark96_lambdas(ctx, k, l)?],
        _ => vec![big()?; id.arity()],
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorMismatch {
    pub payload: Vec<u32>,
    pub condition: bool,
    pub oracle: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CorSweepReport {
    pub id: String,
    pub k: u32,
    pub l: u32,
    pub checked: u64,
    pub agreements: u64,
    pub permutations: u64,
    /// Points excluded by a per-point hypothesis.
    pub skipped: u64,
    pub consistency_checked: u64,
    pub consistency_failures: u64,
    pub mismatches: Vec<CorMismatch>,
}

impl CorSweepReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.consistency_failures == 0 && self.agreements == self.checked
    }
}

#[derive(Default)]
struct Partial {
    checked: u64,
    agreements: u64,
    permutations: u64,
    skipped: u64,
    consistency_checked: u64,
    consistency_failures: u64,
    mismatches: Vec<(u64, CorMismatch)>,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.checked += other.checked;
        self.agreements += other.agreements;
        self.permutations += other.permutations;
        self.skipped += other.skipped;
        self.consistency_checked += other.consistency_checked;
        self.consistency_failures += other.consistency_failures;
        self.mismatches.extend(other.mismatches);
        self
    }
}

const ALT_STRIDE: u64 = 64;

/// Extra invariants checked alongside the main comparison.
fn consistency(ctx: &Arc<FieldCtx>, params: &CorParams, verdict: (bool, bool), index: u64) -> Result<Option<bool>, ConjectureError> {
    match params.id {
        CorId::C95 | CorId::C95b => {
            let map = ButterflyMap::new(ctx, params.k, params.l, params.payload[0], params.payload[1])?;
            let red = map.reduced();
            let pairs = [cor95_check(ctx, &map)?, cor95b_check(ctx, &map)?, cor95_check(ctx, &red)?, cor95b_check(ctx, &red)?];
            Ok(Some(pairs.iter().all(|&p| p == verdict)))
        }
        CorId::Remark96 | CorId::Generalized97 => Ok(None),
        _ if index.is_multiple_of(ALT_STRIDE) => {
            let alt = CorParams { exponent_shift: 1, ..params.clone() };
            Ok(Some(cor_check_in(ctx, &alt)? == verdict))
        }
        _ => Ok(None),
    }
}

fn visit(ctx: &Arc<FieldCtx>, id: CorId, k: u32, l: u32, index: u64, payload: Vec<FieldElem>) -> Result<Partial, ConjectureError> {
    let params = CorParams::new(id, k, l, &payload);
    let mut part = Partial::default();
    let verdict = match cor_check_in(ctx, &params) {
        Ok(v) => v,
        Err(ConjectureError::HypothesisViolated(_)) => {
            part.skipped = 1;
            return Ok(part);
        }
        Err(e) => return Err(e),
    };
    part.checked = 1;
    part.permutations = verdict.1 as u64;
    if verdict.0 == verdict.1 {
        part.agreements = 1;
    } else {
        let mismatch = CorMismatch { payload: payload.iter().map(|z| z.0).collect(), condition: verdict.0, oracle: verdict.1 };
        part.mismatches.push((index, mismatch));
    }
    if let Some(ok) = consistency(ctx, &params, verdict, index)? {
        part.consistency_checked = 1;
        part.consistency_failures = !ok as u64;
    }
    Ok(part)
}

fn finish(id: CorId, k: u32, l: u32, part: Partial) -> CorSweepReport {
    let mut mismatches = part.mismatches;
    mismatches.sort_by_key(|m| m.0);
    CorSweepReport {
        id: id.label().to_string(),
        k,
        l,
        checked: part.checked,
        agreements: part.agreements,
        permutations: part.permutations,
        skipped: part.skipped,
        consistency_checked: part.consistency_checked,
        consistency_failures: part.consistency_failures,
        mismatches: mismatches.into_iter().map(|m| m.1).collect(),
    }
}

/// Number of points in the exhaustive sweep.
pub fn sweep_size(id: CorId, k: u32, l: u32) -> Result<u64, ConjectureError> {
    let ctx = default_ctx(2, id.ambient_degree(k))?;
    Ok(payload_domain(&ctx, id, k, l)?.iter().map(|d| d.len() as u64).product())
}

/// Every payload point, compared in parallel.
pub fn sweep_exhaustive(id: CorId, k: u32, l: u32) -> Result<CorSweepReport, ConjectureError> {
    let ctx = default_ctx(2, id.ambient_degree(k))?;
    let domain = payload_domain(&ctx, id, k, l)?;
    let total: u64 = domain.iter().map(|d| d.len() as u64).product();
    let part = (0..total)
        .into_par_iter()
        .map(|index| {
            let mut rest = index;
            let payload = domain
                .iter()
                .rev()
                .map(|d| {
                    let z = d[(rest % d.len() as u64) as usize];
                    rest /= d.len() as u64;
                    z
                })
                .collect::<Vec<_>>()
                .into_iter()
                .rev()
                .collect();
            visit(&ctx, id, k, l, index, payload)
        })
        .try_reduce(Partial::default, |a, b| Ok(a.merge(b)))?;
    Ok(finish(id, k, l, part))
}

/// `samples` seeded random payload points; sample `i` reads the stream from counter `i·arity`.
pub fn sweep_random(id: CorId, k: u32, l: u32, samples: u64, seed: u64) -> Result<CorSweepReport, ConjectureError> {
    let ctx = default_ctx(2, id.ambient_degree(k))?;
    let domain = payload_domain(&ctx, id, k, l)?;
    let width = domain.len() as u64;
    let part = (0..samples)
        .into_par_iter()
        .map(|index| {
            let mut stream = Stream::at(seed, index * width);
            let payload = domain.iter().map(|d| stream.pick(d)).collect();
            visit(&ctx, id, k, l, index, payload)
        })
        .try_reduce(Partial::default, |a, b| Ok(a.merge(b)))?;
    Ok(finish(id, k, l, part))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn omega(ctx: &FieldCtx) -> FieldElem {
        ctx.mu_subgroup(2).unwrap().into_iter().find(|&z| z != FieldElem::ONE).unwrap()
    }

    #[test]
    fn smallest_exponents() {
        assert_eq!(exponents(CorId::C92, 1, 1).unwrap(), (2, 2));
        assert_eq!(exponents(CorId::C97, 1, 1).unwrap(), (3, 3));
        assert!(smallest_exponent(3, 1, 6).is_err());
    }

    #[test]
    fn x_plus_x2_plus_x3_fails() {
        let ctx = default_ctx(2, 2).unwrap();
        let p = CorParams::new(CorId::C97, 1, 1, &[FieldElem::ONE, FieldElem::ONE]);
        assert_eq!(cor_check_in(&ctx, &p).unwrap(), (false, false));
    }

    #[test]
    fn worked_tuple_for_odd_degrees() {
        let ctx = default_ctx(2, 2).unwrap();
        let w2 = ctx.mul(omega(&ctx), omega(&ctx));
        let p = CorParams::new(CorId::C91, 1, 1, &[w2, FieldElem::ZERO, FieldElem::ONE, w2]);
        assert_eq!(cor_check_in(&ctx, &p).unwrap(), (true, true));
    }

    #[test]
    fn vanishing_e_fails_both() {
        let ctx = default_ctx(2, 4).unwrap();
        let one = FieldElem::ONE;
        let p = CorParams::new(CorId::C94, 2, 1, &[one, FieldElem::ZERO]);
        let (cond, oracle) = cor_check_in(&ctx, &p).unwrap();
        assert!(!cond && !oracle);
    }

    #[test]
    fn butterfly_unit_parameters() {
        let ctx = default_ctx(2, 3).unwrap();
        let map = ButterflyMap::new(&ctx, 3, 1, FieldElem::ONE, FieldElem::ONE).unwrap();
        assert_eq!(cor95_check(&ctx, &map).unwrap(), (true, true));
        assert_eq!(cor95b_check(&ctx, &map).unwrap(), (true, true));
    }

    #[test]
    fn butterfly_rejects_even_k() {
        let ctx = default_ctx(2, 4).unwrap();
        assert!(ButterflyMap::new(&ctx, 2, 1, FieldElem::ONE, FieldElem::ONE).is_err());
    }

    #[test]
    fn remark_family_needs_q_not_dividing() {
        let ctx = default_ctx(2, 2).unwrap();
        assert_eq!(remark96_lambdas(&ctx, 1, 1), Err(ConjectureError::NoAdmissibleLambda { k: 1, l: 1 }));
        let ctx = default_ctx(2, 6).unwrap();
        let members = remark96_members(&ctx, 3, 1).unwrap();
        assert_eq!(members.len(), 6);
        assert!(members.iter().all(|m| m.permutes && m.conditions_hold && m.obstruction_nonzero));
    }

    #[test]
    fn identity_map_generalized() {
        let ctx = default_ctx(2, 2).unwrap();
        let z = FieldElem::ZERO;
        assert_eq!(generalized97_check(&ctx, 1, 1, [z, z, FieldElem::ONE, z]).unwrap(), (true, true));
    }

    #[test]
    fn small_exhaustive_sweeps() {
        for (id, k, l) in [(CorId::C91, 1, 1), (CorId::C92, 1, 1), (CorId::C93, 1, 2), (CorId::C96, 2, 1), (CorId::C97, 1, 1)] {
            let rep = sweep_exhaustive(id, k, l).unwrap();
            assert!(rep.passed(), "{id} {k} {l}: {rep:?}");
            assert!(rep.checked > 0);
        }
    }

    #[test]
    fn ids_round_trip() {
        for id in CorId::ALL {
            assert_eq!(id.label().parse::<CorId>().unwrap(), id);
        }
        assert!("9.9".parse::<CorId>().is_err());
    }
}
