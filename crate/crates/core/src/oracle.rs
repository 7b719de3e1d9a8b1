//! Brute-force permutation tests and the reductions between `F_{q^2}`, `μ_{q+1}` and `P^1(F_q)`.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::criteria::QuadInput;
use crate::field::{gcd, prime_power, FieldCtx, FieldElem, FieldError};
use crate::poly::{mu_to_p1_test, ramification_multiset, DegreeOneMap, P1Point, Poly, PolyError, RationalMap};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("map sends {0} outside the domain")]
    MapNotStable(P1Point),
    #[error("conjugating maps do not send μ_(q+1) onto P^1(F_q)")]
    BadConjugators,
    #[error("ramification multiset over the given point is {found:?}, not {expected:?}")]
    RamMismatch { expected: Vec<u32>, found: Vec<u32> },
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("sporadic entry fails to permute: {0}")]
    TableEntryFails(String),
    #[error("q = {0} is too large for the table-driven oracle")]
    TooLarge(u64),
}

/// Sparse univariate polynomial with arbitrary exponents, evaluated by exponent reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePoly {
    terms: Vec<(u64, FieldElem)>,
}

impl SparsePoly {
    /// Merges equal exponents and drops zero coefficients; `ctx` supplies addition.
    pub fn new(ctx: &FieldCtx, terms: &[(u64, FieldElem)]) -> SparsePoly {
        let mut merged: Vec<(u64, FieldElem)> = Vec::new();
        let mut sorted = terms.to_vec();
        sorted.sort_by_key(|t| t.0);
        for (e, c) in sorted {
            match merged.last_mut() {
                Some(last) if last.0 == e => last.1 = ctx.add(last.1, c),
                _ => merged.push((e, c)),
            }
        }
        merged.retain(|t| !t.1.is_zero());
        SparsePoly { terms: merged }
    }

    /// `X^r A(X^{q−1})` for the quadrinomial input.
    pub fn quad(ctx: &FieldCtx, input: &QuadInput) -> SparsePoly {
        let (q, big_q, r) = (input.q(), input.big_q(), input.r);
        SparsePoly::new(
            ctx,
            &[
                (r + (q - 1) * (big_q + 1), input.a),
                (r + (q - 1) * big_q, input.b),
                (r + q - 1, input.c),
                (r, input.d),
            ],
        )
    }

    /// `X^r (X^{t(q−1)} − α)`.
    pub fn binomial(ctx: &FieldCtx, r: u64, t: u64, alpha: FieldElem, q: u64) -> SparsePoly {
        SparsePoly::new(ctx, &[(r + t * (q - 1), FieldElem::ONE), (r, ctx.neg(alpha))])
    }

    pub fn from_poly(p: &Poly) -> SparsePoly {
        let terms: Vec<_> = p.coeffs().iter().enumerate().map(|(i, &c)| (i as u64, c)).collect();
        SparsePoly::new(p.ctx(), &terms)
    }

    pub fn terms(&self) -> &[(u64, FieldElem)] {
        &self.terms
    }

    /// `f(x)`; `0^0 = 1` so a constant term is kept at `x = 0`.
    pub fn eval(&self, ctx: &FieldCtx, x: FieldElem) -> FieldElem {
        self.terms.iter().fold(FieldElem::ZERO, |acc, &(e, c)| ctx.add(acc, ctx.mul(c, ctx.pow_u64(x, e))))
    }
}

/// Outcome of a bijectivity test; the witness is the first colliding pair in encoding order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PermVerdict {
    pub is_permutation: bool,
    pub witness: Option<(P1Point, P1Point)>,
}

/// Tests injectivity of `f` on `domain`, which must be sorted; `stable` rejects images outside the target.
fn verdict_over(
    domain: &[P1Point],
    mut f: impl FnMut(P1Point) -> P1Point,
    stable: impl Fn(P1Point) -> bool,
) -> Result<PermVerdict, OracleError> {
    let mut seen: HashMap<P1Point, P1Point> = HashMap::with_capacity(domain.len());
    let mut witness = None;
    for &x in domain {
        let y = f(x);
        if !stable(y) {
            return Err(OracleError::MapNotStable(x));
        }
        if let Some(&prev) = seen.get(&y) {
            if witness.is_none() {
                witness = Some((prev, x));
            }
        } else {
            seen.insert(y, x);
        }
    }
    Ok(PermVerdict { is_permutation: witness.is_none(), witness })
}

fn finite_domain(elems: Vec<FieldElem>) -> Vec<P1Point> {
    elems.into_iter().map(P1Point::Finite).collect()
}

fn mu_domain(ctx: &FieldCtx, q: u64) -> Result<Vec<P1Point>, OracleError> {
    let mut mu = ctx.mu_subgroup(q)?;
    mu.sort_unstable();
    Ok(finite_domain(mu))
}

fn subfield_degree(ctx: &FieldCtx, q: u64) -> Result<u32, OracleError> {
    let (p, k) = prime_power(q)?;
    if p != ctx.characteristic() {
        return Err(OracleError::Precondition("field order has the wrong characteristic"));
    }
    Ok(k)
}

fn in_mu(ctx: &FieldCtx, z: FieldElem, q: u64) -> bool {
    ctx.pow_u64(z, q + 1) == FieldElem::ONE
}

/// Whether `f` permutes `F_{q^2}`.
pub fn is_perm_fq2(ctx: &FieldCtx, f: &SparsePoly, q: u64) -> Result<PermVerdict, OracleError> {
    let k = subfield_degree(ctx, q)?;
    let domain = finite_domain(ctx.subfield_elements(2 * k)?);
    verdict_over(&domain, |x| P1Point::Finite(f.eval(ctx, x.finite().expect("finite"))), |_| true)
}

/// Whether `g` permutes `μ_{q+1}`.
pub fn is_perm_mu(ctx: &FieldCtx, g: &RationalMap, q: u64) -> Result<PermVerdict, OracleError> {
    let domain = mu_domain(ctx, q)?;
    verdict_over(&domain, |x| g.eval(x), |y| matches!(y, P1Point::Finite(z) if in_mu(ctx, z, q)))
}

/// Whether `h` permutes `P^1(F_q)`.
pub fn is_perm_p1fq(ctx: &FieldCtx, h: &RationalMap, q: u64) -> Result<PermVerdict, OracleError> {
    let k = subfield_degree(ctx, q)?;
    let mut domain = finite_domain(ctx.subfield_elements(k)?);
    domain.push(P1Point::Infinity);
    verdict_over(&domain, |x| h.eval(x), |y| match y {
        P1Point::Finite(z) => ctx.in_subfield(z, k),
        P1Point::Infinity => true,
    })
}

/// The function `z ↦ z^r A(z)^{q−1}` on `μ_{q+1}`.
#[derive(Clone, Debug)]
pub struct MuFunction {
    pub r: u64,
    pub a: Poly,
    pub q: u64,
}

impl MuFunction {
    pub fn eval(&self, z: FieldElem) -> FieldElem {
        let ctx = self.a.ctx();
        ctx.mul(ctx.pow_u64(z, self.r), ctx.pow_u64(self.a.eval(z), self.q - 1))
    }

    /// Bijectivity on `μ_{q+1}`; a zero value makes the map fail, with the zero as witness.
    pub fn permutes_mu(&self) -> Result<PermVerdict, OracleError> {
        let ctx = self.a.ctx();
        let domain = mu_domain(ctx, self.q)?;
        let q = self.q;
        if let Some(&z) = domain.iter().find(|x| self.eval(x.finite().expect("finite")).is_zero()) {
            return Ok(PermVerdict { is_permutation: false, witness: Some((z, z)) });
        }
        verdict_over(
            &domain,
            |x| P1Point::Finite(self.eval(x.finite().expect("finite"))),
            |y| matches!(y, P1Point::Finite(z) if in_mu(ctx, z, q)),
        )
    }
}

/// Splits bijectivity of `X^r A(X^{q−1})` on `F_{q^2}` into `gcd(r, q−1) = 1` and a map on `μ_{q+1}`.
pub fn reduce_lemma_old(r: u64, a: &Poly, q: u64) -> Result<(bool, MuFunction), OracleError> {
    if a.is_zero() {
        return Err(PolyError::ZeroPolynomial.into());
    }
    Ok((gcd(r, q - 1) == 1, MuFunction { r, a: a.clone(), q }))
}

/// `g = X^s A^{(q)}(1/X) / A(X)`.
pub fn build_g_from_a(a: &Poly, s: i64, q: u64) -> Result<RationalMap, OracleError> {
    let deg = a.degree().ok_or(PolyError::ZeroPolynomial)? as i64;
    let conj = a.conj(q);
    let (num_shift, den_shift) = if s >= deg { (s, 0) } else { (deg, deg - s) };
    let ctx = a.ctx();
    let terms: Vec<(usize, FieldElem)> =
        conj.coeffs().iter().enumerate().map(|(i, &c)| ((num_shift - i as i64) as usize, c)).collect();
    let num = Poly::from_terms(ctx, &terms);
    let den = a.shift(den_shift as usize);
    Ok(RationalMap::new(num, den)?)
}

/// `h = ρ ∘ g ∘ σ^{−1}`, defined over `F_q` when `ρ, σ` send `μ_{q+1}` onto `P^1(F_q)`.
pub fn build_h_from_g(
    ctx: &Arc<FieldCtx>,
    g: &RationalMap,
    rho: &DegreeOneMap,
    sigma: &DegreeOneMap,
    q: u64,
) -> Result<RationalMap, OracleError> {
    if !mu_to_p1_test(ctx, rho, q)? || !mu_to_p1_test(ctx, sigma, q)? {
        return Err(OracleError::BadConjugators);
    }
    Ok(DegreeOneMap::sandwich(ctx, rho, g, &sigma.inverse(ctx))?)
}

/// Whether `h^{(p^e)} = h`.
pub fn frobenius_fixed(h: &RationalMap, e: u64) -> bool {
    let hq = h.frobenius_coeffs(e);
    h.num().mul(hq.den()) == hq.num().mul(h.den())
}

/// Closed-form bijectivity of `X^r (X^{t(q−1)} − α)` on `F_{q^2}` for `gcd(t, q+1) = 1`.
pub fn binomial_criterion(ctx: &FieldCtx, r: u64, t: u64, alpha: FieldElem, q: u64) -> Result<bool, OracleError> {
    if r == 0 || t == 0 || gcd(t, q + 1) != 1 {
        return Err(OracleError::Precondition("r, t >= 1 and gcd(t, q+1) = 1"));
    }
    if alpha.is_zero() {
        return Err(OracleError::Precondition("alpha != 0"));
    }
    Ok(gcd(r, q - 1) == 1 && r % (q + 1) == t % (q + 1) && !in_mu(ctx, alpha, q))
}

/// For `g = X^r A^{(q)}(1/X)/A` with ramification `[s, t]` over `γ`: bijectivity on `μ_{q+1}` holds
/// iff `s ≡ 0 (mod q+1)` and `γ ∈ P^1(F_{q^2}) \ μ_{q+1}`.
pub fn lpp_check(
    ctx: &Arc<FieldCtx>,
    a: &Poly,
    r: i64,
    s: u32,
    t: u32,
    gamma: P1Point,
    q: u64,
) -> Result<bool, OracleError> {
    if gcd(t as u64, q + 1) != 1 {
        return Err(OracleError::Precondition("gcd(t, q+1) = 1"));
    }
    if !a.roots_in_mu(q)?.is_empty() {
        return Err(OracleError::Precondition("A has no roots in mu_(q+1)"));
    }
    let g = build_g_from_a(a, r, q)?;
    let rep = ramification_multiset(&g, gamma)?;
    let mut expected = vec![s, t];
    expected.sort_unstable();
    if rep.multiset != expected {
        return Err(OracleError::RamMismatch { expected, found: rep.multiset });
    }
    let k = subfield_degree(ctx, q)?;
    let gamma_ok = match gamma {
        P1Point::Infinity => true,
        P1Point::Finite(z) => ctx.in_subfield(z, 2 * k) && !in_mu(ctx, z, q),
    };
    Ok((s as u64).is_multiple_of(q + 1) && gamma_ok)
}

/// Finds `(α, β, n)` with `g(x) = β f(α x^n)` on `F`, `|F| = field_order`, scanning `n`, then `α`, then `β`.
pub fn mult_equiv(
    ctx: &FieldCtx,
    f: &SparsePoly,
    g: &SparsePoly,
    field_order: u64,
) -> Result<Option<(FieldElem, FieldElem, u64)>, OracleError> {
    let d = subfield_degree(ctx, field_order)?;
    let elems = ctx.subfield_elements(d)?;
    let g_table: Vec<FieldElem> = elems.iter().map(|&x| g.eval(ctx, x)).collect();
    let units: Vec<FieldElem> = elems.iter().copied().filter(|z| !z.is_zero()).collect();
    for n in 1..=(field_order - 1) {
        if gcd(n, field_order - 1) != 1 {
            continue;
        }
        for &alpha in &units {
            let t: Vec<FieldElem> = elems.iter().map(|&x| f.eval(ctx, ctx.mul(alpha, ctx.pow_u64(x, n)))).collect();
            let beta = match t.iter().position(|v| !v.is_zero()) {
                Some(i) => ctx.div(g_table[i], t[i])?,
                None => FieldElem::ONE,
            };
            if beta.is_zero() {
                continue;
            }
            if t.iter().zip(&g_table).all(|(&tv, &gv)| ctx.mul(beta, tv) == gv) {
                return Ok(Some((alpha, beta, n)));
            }
        }
    }
    Ok(None)
}

/// One sporadic degree-four rational function together with its parameter choice.
#[derive(Clone, Debug, Serialize)]
pub struct Table3Entry {
    pub q: u64,
    pub label: String,
    pub parameter: Option<FieldElem>,
    pub permutes: bool,
}

fn roots_of(ctx: &Arc<FieldCtx>, coeffs: &[i64]) -> Vec<FieldElem> {
    let p = Poly::new(ctx, coeffs.iter().map(|&c| ctx.from_int(c)).collect());
    ctx.elements().filter(|&z| p.eval(z).is_zero()).collect()
}

fn table_map(ctx: &Arc<FieldCtx>, num: &[(usize, FieldElem)], den: &[(usize, FieldElem)]) -> Result<RationalMap, OracleError> {
    Ok(RationalMap::new(Poly::from_terms(ctx, num), Poly::from_terms(ctx, den))?)
}

/// Builds every sporadic entry for every admissible parameter and tests it on `P^1(F_q)`.
pub fn table3_entries() -> Result<Vec<Table3Entry>, OracleError> {
    let mut out = Vec::new();
    let mut push = |ctx: &Arc<FieldCtx>, q: u64, label: &str, param: Option<FieldElem>, h: RationalMap| {
        let permutes = is_perm_p1fq(ctx, &h, q)?.is_permutation;
        out.push(Table3Entry { q, label: label.to_string(), parameter: param, permutes });
        Ok::<(), OracleError>(())
    };
    let i = |ctx: &Arc<FieldCtx>, n: i64| ctx.from_int(n);

    let f8 = crate::field::default_ctx(2, 3)?;
    for alpha in roots_of(&f8, &[1, 1, 0, 1]) {
        let one = i(&f8, 1);
        let h = table_map(&f8, &[(4, one), (3, alpha), (1, one)], &[(2, one), (1, one), (0, one)])?;
        push(&f8, 8, "(X^4+aX^3+X)/(X^2+X+1), a^3+a=1", Some(alpha), h)?;
    }

    let f7 = crate::field::default_ctx(7, 1)?;
    let h = table_map(&f7, &[(4, i(&f7, 1)), (1, i(&f7, 3))], &[(0, i(&f7, 1))])?;
    push(&f7, 7, "X^4+3X", None, h)?;

    let f5 = crate::field::default_ctx(5, 1)?;
    let one = i(&f5, 1);
    let h = table_map(&f5, &[(4, one), (1, one), (0, one)], &[(2, one), (0, i(&f5, 2))])?;
    push(&f5, 5, "(X^4+X+1)/(X^2+2)", None, h)?;
    let h = table_map(&f5, &[(4, one), (3, one), (0, one)], &[(2, one), (0, i(&f5, 2))])?;
    push(&f5, 5, "(X^4+X^3+1)/(X^2+2)", None, h)?;

    let f4 = crate::field::default_ctx(2, 2)?;
    let one = i(&f4, 1);
    for w in roots_of(&f4, &[1, 1, 1]) {
        let w2 = f4.mul(w, w);
        let h = table_map(&f4, &[(4, one), (1, w)], &[(3, one), (0, w2)])?;
        push(&f4, 4, "(X^4+wX)/(X^3+w^2), w^2+w=1", Some(w), h)?;
        let h = table_map(&f4, &[(4, one), (2, one), (1, one)], &[(3, one), (0, w)])?;
        push(&f4, 4, "(X^4+X^2+X)/(X^3+w), w^2+w=1", Some(w), h)?;
        let h = table_map(&f4, &[(4, one), (2, w), (1, one)], &[(3, one), (1, one), (0, one)])?;
        push(&f4, 4, "(X^4+wX^2+X)/(X^3+X+1), w^2+w=1", Some(w), h)?;
    }

    let f3 = crate::field::default_ctx(3, 1)?;
    let one = i(&f3, 1);
    let h = table_map(&f3, &[(4, one), (2, i(&f3, -1)), (1, one)], &[(0, one)])?;
    push(&f3, 3, "X^4-X^2+X", None, h)?;
    let h = table_map(&f3, &[(4, one), (1, one), (0, one)], &[(2, one), (0, one)])?;
    push(&f3, 3, "(X^4+X+1)/(X^2+1)", None, h)?;
    let h = table_map(&f3, &[(4, one), (3, one), (0, one)], &[(2, one), (0, one)])?;
    push(&f3, 3, "(X^4+X^3+1)/(X^2+1)", None, h)?;

    let f2 = crate::field::default_ctx(2, 1)?;
    let one = i(&f2, 1);
    let h = table_map(&f2, &[(4, one), (3, one), (1, one)], &[(0, one)])?;
    push(&f2, 2, "X^4+X^3+X", None, h)?;
    let h = table_map(&f2, &[(4, one), (3, one), (1, one)], &[(2, one), (1, one), (0, one)])?;
    push(&f2, 2, "(X^4+X^3+X)/(X^2+X+1)", None, h)?;
    Ok(out)
}

/// Fails on the first sporadic entry that does not permute.
pub fn table3_verify() -> Result<Vec<Table3Entry>, OracleError> {
    let entries = table3_entries()?;
    if let Some(bad) = entries.iter().find(|e| !e.permutes) {
        return Err(OracleError::TableEntryFails(format!("q={} {}", bad.q, bad.label)));
    }
    Ok(entries)
}

/// Table-driven form of the `μ_{q+1}` reduction for the quadrinomial family at fixed `(q, Q, r)`.
///
/// `A(z)` is assembled incrementally: first `a z^{Q+1} + b z^Q`, then `+ c z`, then `+ d`.
#[derive(Clone, Debug)]
pub struct QuadOracle {
    ctx: Arc<FieldCtx>,
    q: u64,
    gcd_ok: bool,
    z_q1: Vec<FieldElem>,
    z_q: Vec<FieldElem>,
    z: Vec<FieldElem>,
    /// `(r·j) mod (q+1)` for `z_j = ζ^j`.
    rj: Vec<u16>,
    /// `μ`-index of `x^{q−1}` for every ambient encoding; unused at zero.
    mu_index: Vec<u16>,
    char2: bool,
}

impl QuadOracle {
    pub fn new(ctx: &Arc<FieldCtx>, k: u32, l: u32, r: u64) -> Result<QuadOracle, OracleError> {
        let p = ctx.characteristic() as u64;
        let q = p.pow(k);
        let big_q = p.pow(l);
        if q + 1 > 256 {
            return Err(OracleError::TooLarge(q));
        }
        if !ctx.has_log_tables() {
            return Err(OracleError::Precondition("log tables required"));
        }
        let mu = ctx.mu_subgroup(q)?;
        let order = ctx.order() as u64;
        let cofactor = order / (q * q - 1);
        let mut mu_index = vec![0u16; ctx.size() as usize];
        for x in ctx.elements().skip(1) {
            let lg = ctx.log(x).expect("nonzero") as u64;
            if lg.is_multiple_of(cofactor) {
                mu_index[x.0 as usize] = ((lg / cofactor) % (q + 1)) as u16;
            }
        }
        Ok(QuadOracle {
            ctx: ctx.clone(),
            q,
            gcd_ok: gcd(r, q - 1) == 1,
            z_q1: mu.iter().map(|&z| ctx.pow_u64(z, big_q + 1)).collect(),
            z_q: mu.iter().map(|&z| ctx.pow_u64(z, big_q)).collect(),
            rj: (0..=q).map(|j| ((r % (q + 1)) * j % (q + 1)) as u16).collect(),
            z: mu,
            mu_index,
            char2: p == 2,
        })
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn gcd_ok(&self) -> bool {
        self.gcd_ok
    }

    #[inline]
    fn add(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        if self.char2 {
            FieldElem(x.0 ^ y.0)
        } else {
            self.ctx.add(x, y)
        }
    }

    /// `a z^{Q+1} + b z^Q` at every `z ∈ μ_{q+1}`.
    pub fn stage_ab(&self, a: FieldElem, b: FieldElem, out: &mut [FieldElem]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.add(self.ctx.mul(a, self.z_q1[j]), self.ctx.mul(b, self.z_q[j]));
        }
    }

    /// Adds `c z` to a previous stage.
    pub fn stage_c(&self, prev: &[FieldElem], c: FieldElem, out: &mut [FieldElem]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.add(prev[j], self.ctx.mul(c, self.z[j]));
        }
    }

    /// Whether `z ↦ z^r (t_j + d)^{q−1}` permutes `μ_{q+1}`, ignoring the gcd condition.
    #[inline]
    pub fn finish_d(&self, partial: &[FieldElem], d: FieldElem) -> bool {
        let mut seen = [0u64; 4];
        for (j, &t) in partial.iter().enumerate() {
            let v = self.add(t, d);
            if v.is_zero() {
                return false;
            }
            let mut idx = self.rj[j] as usize + self.mu_index[v.0 as usize] as usize;
            if idx > self.q as usize {
                idx -= self.q as usize + 1;
            }
            let (w, bit) = (idx >> 6, 1u64 << (idx & 63));
            if seen[w] & bit != 0 {
                return false;
            }
            seen[w] |= bit;
        }
        true
    }

    /// Bijectivity of `X^r A(X^{q−1})` on `F_{q^2}`.
    pub fn permutes(&self, coeffs: [FieldElem; 4]) -> bool {
        if !self.gcd_ok {
            return false;
        }
        let [a, b, c, d] = coeffs;
        let mut s = vec![FieldElem::ZERO; self.len()];
        let mut t = vec![FieldElem::ZERO; self.len()];
        self.stage_ab(a, b, &mut s);
        self.stage_c(&s, c, &mut t);
        self.finish_d(&t, d)
    }
}
