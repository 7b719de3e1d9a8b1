//! The explicit parametric families of permutation quadrinomials and their `(γ, δ)` orbits.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::field::{gcd, ord2, FieldCtx, FieldElem, FieldError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("parameter constraint violated: {0}")]
    ConstraintViolated(&'static str),
    #[error("r = {r} must satisfy r ≡ Q+1 (mod q+1) and gcd(r, q−1) = 1")]
    BadR { r: u64 },
}

/// One of the three parametric shapes of `A_0`, or one of the two monomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FamilyCase {
    Case1 { alpha: FieldElem, beta: FieldElem },
    Case2 { alpha: FieldElem, beta: FieldElem },
    Mono2,
    Case3 { alpha: FieldElem, beta: FieldElem },
    Mono3,
}

impl FamilyCase {
    pub fn id(&self) -> &'static str {
        match self {
            FamilyCase::Case1 { .. } => "1",
            FamilyCase::Case2 { .. } => "2",
            FamilyCase::Mono2 => "mono_2",
            FamilyCase::Case3 { .. } => "3",
            FamilyCase::Mono3 => "mono_3",
        }
    }
}

fn in_mu(ctx: &FieldCtx, z: FieldElem, q: u64) -> bool {
    ctx.pow_u64(z, q + 1) == FieldElem::ONE
}

/// Coefficients `(a, b, c, d)` of `A_0 = aX^{Q+1} + bX^Q + cX + d` for the given case.
pub fn gen_a0(ctx: &FieldCtx, case: FamilyCase, k: u32, l: u32) -> Result<[FieldElem; 4], FamilyError> {
    if ctx.characteristic() != 2 {
        return Err(FamilyError::ConstraintViolated("characteristic 2"));
    }
    let (q, big_q) = (1u64 << k, 1u64 << l);
    let (ok, ol) = (ord2(k as u64), ord2(l as u64));
    let pw = |z, e| ctx.pow_u64(z, e);
    let add = |x, y| ctx.add(x, y);
    let mul = |x, y| ctx.mul(x, y);
    let in_fq = |z| ctx.in_subfield(z, k);
    let in_fq2 = |z| ctx.in_subfield(z, 2 * k);
    let (one, zero) = (FieldElem::ONE, FieldElem::ZERO);
    match case {
        FamilyCase::Case1 { alpha, beta } => {
            if ok > ol {
                return Err(FamilyError::ConstraintViolated("ord2(k) <= ord2(l)"));
            }
            if !in_fq2(alpha) || !in_fq2(beta) || in_fq(alpha) || in_fq(beta) {
                return Err(FamilyError::ConstraintViolated("alpha, beta in F_(q^2) \\ F_q"));
            }
            Ok([
                add(pw(alpha, big_q + 1), beta),
                add(pw(alpha, q + big_q), beta),
                add(pw(alpha, q * big_q + 1), beta),
                add(pw(alpha, q * big_q + q), beta),
            ])
        }
        FamilyCase::Case2 { alpha, beta } => {
            if ok == ol {
                return Err(FamilyError::ConstraintViolated("ord2(k) != ord2(l)"));
            }
            if !in_fq2(alpha) || !in_fq2(beta) || in_mu(ctx, alpha, q) || in_mu(ctx, beta, q) {
                return Err(FamilyError::ConstraintViolated("alpha, beta in F_(q^2) \\ mu_(q+1)"));
            }
            Ok([
                add(pw(alpha, q * big_q + q), beta),
                add(pw(alpha, q * big_q), mul(alpha, beta)),
                add(pw(alpha, q), mul(pw(alpha, big_q), beta)),
                add(one, mul(pw(alpha, big_q + 1), beta)),
            ])
        }
        FamilyCase::Mono2 => {
            if ok == ol {
                return Err(FamilyError::ConstraintViolated("ord2(k) != ord2(l)"));
            }
            Ok([one, zero, zero, zero])
        }
        FamilyCase::Case3 { alpha, beta } => {
            if ok < ol {
                return Err(FamilyError::ConstraintViolated("ord2(k) >= ord2(l)"));
            }
            if !in_fq2(alpha) || !in_fq2(beta) || in_mu(ctx, alpha, q) || in_mu(ctx, beta, q) {
                return Err(FamilyError::ConstraintViolated("alpha, beta in F_(q^2) \\ mu_(q+1)"));
            }
            Ok([
                add(pw(alpha, q * big_q), mul(pw(alpha, q), beta)),
                add(pw(alpha, q * big_q + 1), beta),
                add(one, mul(pw(alpha, q + big_q), beta)),
                add(alpha, mul(pw(alpha, big_q), beta)),
            ])
        }
        FamilyCase::Mono3 => {
            if ok < ol {
                return Err(FamilyError::ConstraintViolated("ord2(k) >= ord2(l)"));
            }
            Ok([zero, one, zero, zero])
        }
    }
}

pub type Tuple = [FieldElem; 4];

/// Scales a nonzero tuple so that its first nonzero entry is one.
fn normalize(ctx: &FieldCtx, t: Tuple) -> Option<Tuple> {
    let lead = *t.iter().find(|z| !z.is_zero())?;
    let inv = ctx.inv(lead).ok()?;
    Some(t.map(|z| ctx.mul(z, inv)))
}

/// All `δ A_0(γX)` with `γ ∈ μ_{q+1}`, `δ ∈ F_{q^2}^*`.
pub fn orbit_expand(ctx: &FieldCtx, a0: Tuple, k: u32, l: u32) -> Result<HashSet<Tuple>, FamilyError> {
    let q = (ctx.characteristic() as u64).pow(k);
    let big_q = (ctx.characteristic() as u64).pow(l);
    if a0.iter().all(|z| z.is_zero()) {
        return Err(FamilyError::ConstraintViolated("A_0 nonzero"));
    }
    let mu = ctx.mu_subgroup(q)?;
    let units: Vec<FieldElem> = ctx.subfield_elements(2 * k)?.into_iter().filter(|z| !z.is_zero()).collect();
    let mut out = HashSet::new();
    for &g in &mu {
        let [a, b, c, d] = a0;
        let twisted = [
            ctx.mul(a, ctx.pow_u64(g, big_q + 1)),
            ctx.mul(b, ctx.pow_u64(g, big_q)),
            ctx.mul(c, g),
            d,
        ];
        for &delta in &units {
            out.insert(twisted.map(|z| ctx.mul(z, delta)));
        }
    }
    Ok(out)
}

/// Every family tuple for `(q, Q, r)` with per-case counts of distinct normalized `A_0`.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyEnumeration {
    #[serde(skip)]
    pub tuples: HashSet<Tuple>,
    pub case_counts: BTreeMap<String, usize>,
    pub total_distinct: usize,
}

/// Enumerates the union of all orbits permitted by the `ord2` gates; empty in odd characteristic.
pub fn enumerate_families(ctx: &Arc<FieldCtx>, k: u32, l: u32, r: u64) -> Result<FamilyEnumeration, FamilyError> {
    let p = ctx.characteristic() as u64;
    let (q, big_q) = (p.pow(k), p.pow(l));
    let mut case_counts = BTreeMap::new();
    if p != 2 {
        return Ok(FamilyEnumeration { tuples: HashSet::new(), case_counts, total_distinct: 0 });
    }
    if r % (q + 1) != (big_q + 1) % (q + 1) || gcd(r, q - 1) != 1 {
        return Err(FamilyError::BadR { r });
    }
    let (ok, ol) = (ord2(k as u64), ord2(l as u64));
    let field: Vec<FieldElem> = ctx.subfield_elements(2 * k)?;
    let outside_fq: Vec<FieldElem> = field.iter().copied().filter(|&z| !ctx.in_subfield(z, k)).collect();
    let outside_mu: Vec<FieldElem> = field.iter().copied().filter(|&z| !in_mu(ctx, z, q)).collect();
    let mut cases: Vec<FamilyCase> = Vec::new();
    if ok <= ol {
        for &alpha in &outside_fq {
            cases.extend(outside_fq.iter().map(|&beta| FamilyCase::Case1 { alpha, beta }));
        }
    }
    if ok != ol {
        cases.push(FamilyCase::Mono2);
        for &alpha in &outside_mu {
            cases.extend(outside_mu.iter().map(|&beta| FamilyCase::Case2 { alpha, beta }));
        }
    }
    if ok >= ol {
        cases.push(FamilyCase::Mono3);
        for &alpha in &outside_mu {
            cases.extend(outside_mu.iter().map(|&beta| FamilyCase::Case3 { alpha, beta }));
        }
    }
    let mut seeds: HashSet<Tuple> = HashSet::new();
    let mut per_case: BTreeMap<String, HashSet<Tuple>> = BTreeMap::new();
    for case in cases {
        let a0 = gen_a0(ctx, case, k, l)?;
        if let Some(n) = normalize(ctx, a0) {
            per_case.entry(case.id().to_string()).or_default().insert(n);
            seeds.insert(n);
        }
    }
    for (id, set) in &per_case {
        case_counts.insert(id.clone(), set.len());
    }
    let mut tuples = HashSet::new();
    let mut covered: HashSet<Tuple> = HashSet::new();
    for seed in seeds {
        if covered.contains(&seed) {
            continue;
        }
        for t in orbit_expand(ctx, seed, k, l)? {
            if let Some(n) = normalize(ctx, t) {
                covered.insert(n);
            }
            tuples.insert(t);
        }
    }
    let total_distinct = tuples.len();
    Ok(FamilyEnumeration { tuples, case_counts, total_distinct })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{canonical_r, check_main_theorem, QuadInput};
    use crate::field::default_ctx;

    #[test]
    fn case_one_example() {
        let ctx = default_ctx(2, 2).unwrap();
        let w = FieldElem(2);
        let a0 = gen_a0(&ctx, FamilyCase::Case1 { alpha: w, beta: w }, 1, 1).unwrap();
        assert_eq!(a0, [FieldElem(3), FieldElem::ZERO, FieldElem::ONE, FieldElem(3)]);
        assert!(gen_a0(&ctx, FamilyCase::Case1 { alpha: FieldElem::ONE, beta: w }, 1, 1).is_err());
        assert!(gen_a0(&ctx, FamilyCase::Mono2, 1, 1).is_err());
    }

    #[test]
    fn monomials() {
        let ctx = default_ctx(2, 2).unwrap();
        let o = FieldElem::ZERO;
        let i = FieldElem::ONE;
        assert_eq!(gen_a0(&ctx, FamilyCase::Mono2, 1, 2).unwrap(), [i, o, o, o]);
        assert_eq!(gen_a0(&ctx, FamilyCase::Mono3, 1, 1).unwrap(), [o, i, o, o]);
    }

    #[test]
    fn orbit_sizes() {
        let ctx = default_ctx(2, 2).unwrap();
        let (o, i) = (FieldElem::ZERO, FieldElem::ONE);
        assert_eq!(orbit_expand(&ctx, [o, o, i, o], 1, 1).unwrap().len(), 3);
        assert_eq!(orbit_expand(&ctx, [i, o, o, o], 1, 1).unwrap().len(), 3);
        let orbit = orbit_expand(&ctx, [FieldElem(3), o, i, FieldElem(3)], 1, 1).unwrap();
        for t in &orbit {
            for delta in [FieldElem(2), FieldElem(3)] {
                assert!(orbit.contains(&t.map(|z| ctx.mul(z, delta))));
            }
        }
    }

    #[test]
    fn members_satisfy_criterion() {
        let ctx = default_ctx(2, 4).unwrap();
        let r = canonical_r(4, 2).unwrap();
        let fam = enumerate_families(&ctx, 2, 1, r).unwrap();
        assert!(fam.total_distinct > 0);
        for t in &fam.tuples {
            let input = QuadInput::new(2, 2, 1, r, *t);
            assert!(check_main_theorem(&ctx, &input).unwrap().verdict);
        }
    }

    #[test]
    fn odd_characteristic_is_empty() {
        let ctx = default_ctx(3, 2).unwrap();
        assert_eq!(enumerate_families(&ctx, 1, 1, 4).unwrap().total_distinct, 0);
        let f4 = default_ctx(2, 2).unwrap();
        assert_eq!(enumerate_families(&f4, 1, 1, 2).unwrap_err(), FamilyError::BadR { r: 2 });
    }
}
