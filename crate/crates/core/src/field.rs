//! Finite fields `F_{p^N}` in a polynomial basis.
//!
//! Elements are encoded canonically as `Σ digit_i · p^i`, where `digit_i` is
//! the coefficient of `x^i` in the power basis of the defining polynomial.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Largest supported field size.
pub const MAX_FIELD_SIZE: u64 = 1 << 24;

const LOG_TABLE_LIMIT: u32 = 1 << 20;

const DEFAULT_TABLE: &str = include_str!("../data/default_fields.txt");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of size {p}^{n} exceeds the supported limit 2^24")]
    TooLarge { p: u32, n: u32 },
    #[error("defining polynomial must be monic of degree {0} with coefficients below p")]
    MalformedPolynomial(u32),
    #[error("defining polynomial is reducible over F_{0}")]
    NotIrreducible(u32),
    #[error("no default defining polynomial for p={p}, N={n}")]
    NoTableEntry { p: u32, n: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("element encoding {0} is out of range")]
    BadElement(u64),
    #[error("element is not in the subfield of degree {0}")]
    NotInSubfield(u32),
    #[error("subfield tower {m} | {d} | {n} does not hold")]
    BadTower { m: u32, d: u32, n: u32 },
    #[error("{0}+1 does not divide the multiplicative group order")]
    BadOrder(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("malformed field data: {0}")]
    Parse(String),
}

/// One element of a field context, stored by its canonical encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElem(pub u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn encoding(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for FieldElem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FieldSpec {
    pub p: u32,
    pub n: u32,
    /// Defining polynomial, low degree first, length `n + 1`, monic.
    pub irred: Vec<u32>,
}

/// Defining polynomials keyed by `(p, N)`.
#[derive(Clone, Debug, Default)]
pub struct FieldTable {
    entries: HashMap<(u32, u32), Vec<u32>>,
}

impl FieldTable {
    /// The shipped table covering `p ∈ {2,3,5,7}` and `p^N ≤ 2^24`.
    pub fn defaults() -> &'static FieldTable {
        static TABLE: OnceLock<FieldTable> = OnceLock::new();
        TABLE.get_or_init(|| FieldTable::parse(DEFAULT_TABLE).expect("shipped field table parses"))
    }

    /// Parses records of the form `p N c_0,c_1,...,c_N`. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<FieldTable, FieldError> {
        let mut entries = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| FieldError::Parse(format!("line {}: {}", lineno + 1, what));
            let mut parts = line.split_whitespace();
            let p: u32 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("p"))?;
            let n: u32 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("N"))?;
            let coeffs: Vec<u32> = parts
                .next()
                .ok_or_else(|| bad("coefficients"))?
                .split(',')
                .map(|c| c.trim().parse::<u32>())
                .collect::<Result<_, _>>()
                .map_err(|_| bad("coefficient"))?;
            if parts.next().is_some() {
                return Err(bad("trailing fields"));
            }
            entries.insert((p, n), coeffs);
        }
        Ok(FieldTable { entries })
    }

    /// Entries of `other` replace entries of `self`.
    pub fn merged_with(&self, other: &FieldTable) -> FieldTable {
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().map(|(k, v)| (*k, v.clone())));
        FieldTable { entries }
    }

    pub fn get(&self, p: u32, n: u32) -> Option<&[u32]> {
        self.entries.get(&(p, n)).map(|v| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> Vec<(u32, u32)> {
        let mut k: Vec<_> = self.entries.keys().copied().collect();
        k.sort_unstable();
        k
    }
}

struct LogTables {
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// An ambient field `F_{p^N}`.
pub struct FieldCtx {
    spec: FieldSpec,
    size: u32,
    order: u32,
    primitive: FieldElem,
    pow_p: Vec<u32>,
    irred_mask: u64,
    tables: Option<LogTables>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("spec", &self.spec)
            .field("primitive", &self.primitive)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for FieldCtx {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Splits `q = p^k` with `p` prime and `k ≥ 1`.
pub fn prime_power(q: u64) -> Result<(u32, u32), FieldError> {
    if q < 2 {
        return Err(FieldError::NotPrimePower(q));
    }
    let p = prime_factors(q)[0];
    let mut k = 0;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
        k += 1;
    }
    if r != 1 {
        return Err(FieldError::NotPrimePower(q));
    }
    Ok((p as u32, k))
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Largest `i` with `2^i | n`.
pub fn ord2(n: u64) -> u32 {
    assert!(n >= 1, "ord2 of zero");
    n.trailing_zeros()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Decides whether `gcd(2^i ± 1, 2^j + 1) = 1` from the 2-adic orders of `i` and `j`.
pub fn gcd_power_rule(i: u64, j: u64, sign: Sign) -> bool {
    match sign {
        Sign::Plus => ord2(i) != ord2(j),
        Sign::Minus => ord2(i) <= ord2(j),
    }
}

pub fn mod_pow(mut base: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

// Polynomials over F_p as digit vectors, used only while validating a defining polynomial.
fn fp_trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn fp_inv(a: u32, p: u32) -> u32 {
    mod_pow(a as u64, p as u64 - 2, p as u64) as u32
}

fn fp_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    fp_trim(&mut r);
    let db = b.len() - 1;
    let inv = fp_inv(b[db], p);
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = (r[r.len() - 1] as u64 * inv as u64 % p as u64) as u32;
        for (i, &bc) in b.iter().enumerate() {
            let t = (c as u64 * bc as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - t) % p;
        }
        fp_trim(&mut r);
    }
    r
}

fn fp_gcd_is_one(a: &[u32], b: &[u32], p: u32) -> bool {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    fp_trim(&mut x);
    fp_trim(&mut y);
    while !y.is_empty() {
        let r = fp_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x.len() == 1
}

impl FieldCtx {
    /// Builds `F_{p^N}` from an explicit defining polynomial.
    pub fn new(p: u32, n: u32, irred: &[u32]) -> Result<FieldCtx, FieldError> {
        if !is_prime(p as u64) {
            return Err(FieldError::NotPrime(p));
        }
        if n == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let size = (p as u64).checked_pow(n).filter(|&s| s <= MAX_FIELD_SIZE);
        let size = size.ok_or(FieldError::TooLarge { p, n })? as u32;
        if irred.len() != n as usize + 1 || irred[n as usize] != 1 || irred.iter().any(|&c| c >= p) {
            return Err(FieldError::MalformedPolynomial(n));
        }
        let mut pow_p = Vec::with_capacity(n as usize + 1);
        let mut acc = 1u32;
        for i in 0..=n {
            pow_p.push(acc);
            if i < n {
                acc = acc.wrapping_mul(p);
            }
        }
        let irred_mask = if p == 2 {
            irred.iter().enumerate().fold(0u64, |m, (i, &c)| m | ((c as u64) << i))
        } else {
            0
        };
        let mut ctx = FieldCtx {
            spec: FieldSpec { p, n, irred: irred.to_vec() },
            size,
            order: size - 1,
            primitive: FieldElem::ONE,
            pow_p,
            irred_mask,
            tables: None,
        };
        ctx.check_irreducible()?;
        ctx.primitive = ctx.find_primitive();
        if size <= LOG_TABLE_LIMIT {
            ctx.tables = Some(ctx.build_tables());
        }
        Ok(ctx)
    }

    /// Builds `F_{p^N}` from the given table.
    pub fn from_table(p: u32, n: u32, table: &FieldTable) -> Result<FieldCtx, FieldError> {
        let irred = table.get(p, n).ok_or(FieldError::NoTableEntry { p, n })?;
        FieldCtx::new(p, n, irred)
    }

    fn check_irreducible(&self) -> Result<(), FieldError> {
        let (p, n) = (self.spec.p, self.spec.n);
        if n == 1 {
            return Ok(());
        }
        let x = FieldElem(p);
        let mut xp = x;
        for _ in 1..=n / 2 {
            xp = self.pow_raw(xp, p as u64);
            let mut diff = self.digits(self.sub(xp, x));
            fp_trim(&mut diff);
            if diff.is_empty() || !fp_gcd_is_one(&self.spec.irred, &diff, p) {
                return Err(FieldError::NotIrreducible(p));
            }
        }
        Ok(())
    }

    fn find_primitive(&self) -> FieldElem {
        let order = self.order as u64;
        let factors = prime_factors(order);
        (1..self.size)
            .map(FieldElem)
            .find(|&g| factors.iter().all(|&r| self.pow_raw(g, order / r) != FieldElem::ONE))
            .expect("multiplicative group of a field is cyclic")
    }

    fn build_tables(&self) -> LogTables {
        let order = self.order as usize;
        let mut exp = vec![0u32; 2 * order.max(1)];
        let mut log = vec![0u32; self.size as usize];
        let mut cur = FieldElem::ONE;
        for (i, slot) in exp.iter_mut().take(order.max(1)).enumerate() {
            *slot = cur.0;
            log[cur.0 as usize] = i as u32;
            cur = self.mul_raw(cur, self.primitive);
        }
        exp.copy_within(0..order, order);
        LogTables { exp, log }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn characteristic(&self) -> u32 {
        self.spec.p
    }

    pub fn degree(&self) -> u32 {
        self.spec.n
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    /// Order of the multiplicative group.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn primitive(&self) -> FieldElem {
        self.primitive
    }

    pub fn has_log_tables(&self) -> bool {
        self.tables.is_some()
    }

    pub fn elem(&self, enc: u64) -> Result<FieldElem, FieldError> {
        if enc < self.size as u64 {
            Ok(FieldElem(enc as u32))
        } else {
            Err(FieldError::BadElement(enc))
        }
    }

    /// Image of the integer `n` in the prime field.
    pub fn from_int(&self, n: i64) -> FieldElem {
        FieldElem(n.rem_euclid(self.spec.p as i64) as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.size).map(FieldElem)
    }

    pub fn digits(&self, x: FieldElem) -> Vec<u32> {
        let p = self.spec.p;
        let mut v = x.0;
        (0..self.spec.n)
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u32]) -> Result<FieldElem, FieldError> {
        if digits.len() > self.spec.n as usize || digits.iter().any(|&d| d >= self.spec.p) {
            return Err(FieldError::BadElement(u64::MAX));
        }
        Ok(FieldElem(digits.iter().zip(&self.pow_p).map(|(&d, &w)| d * w).sum()))
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.spec.p == 2 {
            return FieldElem(a.0 ^ b.0);
        }
        let p = self.spec.p;
        let (mut x, mut y, mut out, mut w) = (a.0, b.0, 0u32, 1u32);
        while x != 0 || y != 0 {
            let s = x % p + y % p;
            out += (if s >= p { s - p } else { s }) * w;
            x /= p;
            y /= p;
            w = w.wrapping_mul(p);
        }
        FieldElem(out)
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        if self.spec.p == 2 {
            return a;
        }
        let p = self.spec.p;
        let (mut x, mut out, mut w) = (a.0, 0u32, 1u32);
        while x != 0 {
            let d = x % p;
            out += (if d == 0 { 0 } else { p - d }) * w;
            x /= p;
            w = w.wrapping_mul(p);
        }
        FieldElem(out)
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.spec.p == 2 {
            return FieldElem(a.0 ^ b.0);
        }
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem::ZERO;
        }
        match &self.tables {
            Some(t) => FieldElem(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]),
            None => self.mul_raw(a, b),
        }
    }

    fn mul_raw(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let n = self.spec.n as usize;
        if self.spec.p == 2 {
            let (x, mut y) = (a.0 as u64, b.0 as u64);
            let mut prod = 0u64;
            let mut shift = 0;
            while y != 0 {
                if y & 1 == 1 {
                    prod ^= x << shift;
                }
                y >>= 1;
                shift += 1;
            }
            for i in (n..2 * n).rev() {
                if prod >> i & 1 == 1 {
                    prod ^= self.irred_mask << (i - n);
                }
            }
            return FieldElem(prod as u32);
        }
        let p = self.spec.p as u64;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u64; 2 * n - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] += x as u64 * y as u64;
            }
        }
        for c in prod.iter_mut() {
            *c %= p;
        }
        for i in (n..2 * n - 1).rev() {
            let c = prod[i];
            if c != 0 {
                for (j, &f) in self.spec.irred.iter().enumerate() {
                    prod[i - n + j] = (prod[i - n + j] + (p - c) * f as u64) % p;
                }
            }
        }
        FieldElem(prod[..n].iter().zip(&self.pow_p).map(|(&d, &w)| d as u32 * w).sum())
    }

    fn pow_raw(&self, mut base: FieldElem, mut e: u64) -> FieldElem {
        let mut acc = FieldElem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match &self.tables {
            Some(t) => {
                let l = t.log[a.0 as usize];
                FieldElem(t.exp[((self.order - l) % self.order.max(1)) as usize])
            }
            None => self.pow_raw(a, self.order as u64 - 1),
        })
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` for any nonnegative exponent; `0^0 = 1`.
    pub fn pow_u64(&self, a: FieldElem, e: u64) -> FieldElem {
        if e == 0 {
            return FieldElem::ONE;
        }
        if a.is_zero() {
            return FieldElem::ZERO;
        }
        let order = self.order as u64;
        match &self.tables {
            Some(t) => {
                let l = t.log[a.0 as usize] as u64;
                FieldElem(t.exp[((l * (e % order)) % order) as usize])
            }
            None => self.pow_raw(a, e % order),
        }
    }

    /// `a^e` with negative exponents via inversion.
    pub fn pow(&self, a: FieldElem, e: i64) -> Result<FieldElem, FieldError> {
        if e >= 0 {
            Ok(self.pow_u64(a, e as u64))
        } else {
            Ok(self.pow_u64(self.inv(a)?, e.unsigned_abs()))
        }
    }

    /// `z^{p^e}`.
    pub fn frobenius(&self, z: FieldElem, e: u64) -> FieldElem {
        if z.is_zero() || self.order <= 1 {
            return z;
        }
        let e = e % self.spec.n as u64;
        if e == 0 {
            return z;
        }
        let exp = mod_pow(self.spec.p as u64, e, self.order as u64);
        self.pow_u64(z, if exp == 0 { self.order as u64 } else { exp })
    }

    /// `z^{1/p^e}`, the inverse of [`FieldCtx::frobenius`].
    pub fn frobenius_inv(&self, z: FieldElem, e: u64) -> FieldElem {
        let n = self.spec.n as u64;
        self.frobenius(z, (n - e % n) % n)
    }

    /// Whether `z` lies in the subfield `F_{p^d}`.
    pub fn in_subfield(&self, z: FieldElem, d: u32) -> bool {
        self.frobenius(z, d as u64) == z
    }

    /// `Tr_{F_{p^d}/F_{p^m}}(z)`.
    pub fn rel_trace(&self, z: FieldElem, d: u32, m: u32) -> Result<FieldElem, FieldError> {
        let n = self.spec.n;
        if m == 0 || d == 0 || !d.is_multiple_of(m) || !n.is_multiple_of(d) {
            return Err(FieldError::BadTower { m, d, n });
        }
        if !self.in_subfield(z, d) {
            return Err(FieldError::NotInSubfield(d));
        }
        Ok(self.trace_poly(z, m, d))
    }

    /// Evaluates the trace polynomial `X + X^s + ... + X^{t/s}` with `s = p^s_exp`, `t = p^t_exp`
    /// at an arbitrary ambient element.
    pub fn trace_poly(&self, z: FieldElem, s_exp: u32, t_exp: u32) -> FieldElem {
        assert!(s_exp > 0 && t_exp.is_multiple_of(s_exp), "trace polynomial needs s | t");
        (0..t_exp / s_exp).fold(FieldElem::ZERO, |acc, i| {
            self.add(acc, self.frobenius(z, (s_exp * i) as u64))
        })
    }

    /// All `z` with `z^{q+1} = 1`, listed as consecutive powers of a generator.
    pub fn mu_subgroup(&self, q: u64) -> Result<Vec<FieldElem>, FieldError> {
        let order = self.order as u64;
        if order == 0 || !order.is_multiple_of(q + 1) {
            return Err(FieldError::BadOrder(q));
        }
        let step = order / (q + 1);
        let gen = self.pow_u64(self.primitive, step);
        let mut out = Vec::with_capacity(q as usize + 1);
        let mut cur = FieldElem::ONE;
        for _ in 0..=q {
            out.push(cur);
            cur = self.mul(cur, gen);
        }
        Ok(out)
    }

    /// Elements of the subfield `F_{p^d}` in increasing encoding order.
    pub fn subfield_elements(&self, d: u32) -> Result<Vec<FieldElem>, FieldError> {
        let n = self.spec.n;
        if d == 0 || !n.is_multiple_of(d) {
            return Err(FieldError::BadTower { m: d, d, n });
        }
        let sub_order = (self.spec.p as u64).pow(d) - 1;
        let gen = self.pow_u64(self.primitive, self.order as u64 / sub_order);
        let mut out = Vec::with_capacity(sub_order as usize + 1);
        out.push(FieldElem::ZERO);
        let mut cur = FieldElem::ONE;
        for _ in 0..sub_order {
            out.push(cur);
            cur = self.mul(cur, gen);
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Discrete logarithm to the primitive base, when log tables are present.
    pub fn log(&self, z: FieldElem) -> Option<u32> {
        if z.is_zero() {
            return None;
        }
        self.tables.as_ref().map(|t| t.log[z.0 as usize])
    }

    /// `primitive^i`.
    pub fn exp(&self, i: u64) -> FieldElem {
        match &self.tables {
            Some(t) => FieldElem(t.exp[(i % self.order.max(1) as u64) as usize]),
            None => self.pow_u64(self.primitive, i),
        }
    }

    /// Writes `z` as `g^i` for small fields, the encoding otherwise.
    pub fn pretty(&self, z: FieldElem) -> String {
        if z.is_zero() {
            return "0".into();
        }
        match self.log(z) {
            Some(l) if self.size <= 256 => format!("g^{l}"),
            _ => z.0.to_string(),
        }
    }
}

/// A field homomorphism from a subfield context into a larger context.
pub struct Embedding {
    images: Vec<FieldElem>,
}

impl Embedding {
    /// Maps `small` into `big` by sending `x` to the smallest-encoded root of the defining
    /// polynomial of `small` inside `big`.
    pub fn new(small: &FieldCtx, big: &FieldCtx) -> Result<Embedding, FieldError> {
        let (p, d) = (small.characteristic(), small.degree());
        if big.characteristic() != p || !big.degree().is_multiple_of(d) {
            return Err(FieldError::BadTower { m: d, d, n: big.degree() });
        }
        let eval = |t: FieldElem| {
            small.spec.irred.iter().rev().fold(FieldElem::ZERO, |acc, &c| {
                big.add(big.mul(acc, t), big.from_int(c as i64))
            })
        };
        let theta = big
            .subfield_elements(d)?
            .into_iter()
            .find(|&t| eval(t).is_zero())
            .ok_or(FieldError::NotIrreducible(p))?;
        let powers: Vec<FieldElem> = (0..d).map(|i| big.pow_u64(theta, i as u64)).collect();
        let images = small
            .elements()
            .map(|z| {
                small.digits(z).iter().zip(&powers).fold(FieldElem::ZERO, |acc, (&c, &w)| {
                    big.add(acc, big.mul(big.from_int(c as i64), w))
                })
            })
            .collect();
        Ok(Embedding { images })
    }

    pub fn map(&self, z: FieldElem) -> FieldElem {
        self.images[z.0 as usize]
    }

    /// Preimage of `z`, if it lies in the image.
    pub fn preimage(&self, z: FieldElem) -> Option<FieldElem> {
        self.images.iter().position(|&w| w == z).map(|i| FieldElem(i as u32))
    }
}

fn cache() -> &'static Mutex<HashMap<FieldSpec, Arc<FieldCtx>>> {
    static CACHE: OnceLock<Mutex<HashMap<FieldSpec, Arc<FieldCtx>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared context for an explicit spec, built once per process.
pub fn shared_ctx(p: u32, n: u32, irred: &[u32]) -> Result<Arc<FieldCtx>, FieldError> {
    let spec = FieldSpec { p, n, irred: irred.to_vec() };
    if let Some(ctx) = cache().lock().expect("field cache").get(&spec) {
        return Ok(ctx.clone());
    }
    let ctx = Arc::new(FieldCtx::new(p, n, irred)?);
    cache().lock().expect("field cache").insert(spec, ctx.clone());
    Ok(ctx)
}

/// Shared context using the default table entry for `(p, N)`.
pub fn default_ctx(p: u32, n: u32) -> Result<Arc<FieldCtx>, FieldError> {
    table_ctx(p, n, FieldTable::defaults())
}

/// Shared context using a specific table.
pub fn table_ctx(p: u32, n: u32, table: &FieldTable) -> Result<Arc<FieldCtx>, FieldError> {
    if !is_prime(p as u64) {
        return Err(FieldError::NotPrime(p));
    }
    let irred = table.get(p, n).ok_or(FieldError::NoTableEntry { p, n })?;
    shared_ctx(p, n, irred)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> Arc<FieldCtx> {
        default_ctx(2, 2).unwrap()
    }

    #[test]
    fn builds_f4_and_rejects_reducible() {
        let ctx = FieldCtx::new(2, 2, &[1, 1, 1]).unwrap();
        assert_eq!(ctx.size(), 4);
        let w = FieldElem(2);
        assert_eq!(ctx.mul(w, w), ctx.add(w, FieldElem::ONE));
        assert_eq!(FieldCtx::new(2, 2, &[1, 0, 1]).unwrap_err(), FieldError::NotIrreducible(2));
        assert!(matches!(FieldCtx::new(2, 5, &[1, 1, 1, 0, 0, 1]), Err(FieldError::NotIrreducible(2))));
    }

    #[test]
    fn rejects_reducible_without_small_divisor_degrees() {
        // (x^2+x+1)(x^3+x+1) has no root and no factor of degree dividing 5.
        assert!(matches!(FieldCtx::new(2, 5, &[1, 0, 0, 1, 1, 1]), Err(FieldError::NotIrreducible(2))));
    }

    #[test]
    fn missing_table_entry() {
        assert_eq!(
            FieldCtx::from_table(11, 2, FieldTable::defaults()).unwrap_err(),
            FieldError::NoTableEntry { p: 11, n: 2 }
        );
    }

    #[test]
    fn f9_primitive_has_order_eight() {
        let ctx = default_ctx(3, 2).unwrap();
        let g = ctx.primitive();
        let mut cur = g;
        let mut ord = 1;
        while cur != FieldElem::ONE {
            cur = ctx.mul(cur, g);
            ord += 1;
        }
        assert_eq!(ord, 8);
        for z in ctx.elements().skip(1) {
            assert_eq!(ctx.mul(ctx.inv(z).unwrap(), z), FieldElem::ONE);
        }
        assert_eq!(ctx.inv(FieldElem::ZERO), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn small_f4_facts() {
        let ctx = f4();
        let w = FieldElem(2);
        let w2 = ctx.mul(w, w);
        assert_eq!(ctx.mul(w, w2), FieldElem::ONE);
        assert_eq!(ctx.add(w, w), FieldElem::ZERO);
        assert_eq!(ctx.frobenius(w, 1), w2);
        assert_eq!(ctx.frobenius(w, 0), w);
        assert_eq!(ctx.rel_trace(w, 2, 1).unwrap(), FieldElem::ONE);
        assert_eq!(ctx.mu_subgroup(2).unwrap().len(), 3);
        assert_eq!(ctx.pow(w, -1).unwrap(), w2);
    }

    #[test]
    fn frobenius_in_f64_is_an_involution_at_three() {
        let ctx = default_ctx(2, 6).unwrap();
        for z in ctx.elements() {
            assert_eq!(ctx.frobenius(ctx.frobenius(z, 3), 3), z);
            assert_eq!(ctx.frobenius(z, 6), z);
            assert_eq!(ctx.pow_u64(z, 64), z);
        }
    }

    #[test]
    fn absolute_trace_on_f16_is_balanced() {
        let ctx = default_ctx(2, 4).unwrap();
        let traces: Vec<_> = ctx.elements().map(|z| ctx.rel_trace(z, 4, 1).unwrap()).collect();
        assert!(traces.iter().all(|t| t.0 <= 1));
        assert_eq!(traces.iter().filter(|t| t.0 == 1).count(), 8);
    }

    #[test]
    fn rel_trace_errors() {
        let ctx = default_ctx(2, 4).unwrap();
        let outside = ctx.elements().find(|&z| !ctx.in_subfield(z, 2)).unwrap();
        assert_eq!(ctx.rel_trace(outside, 2, 1), Err(FieldError::NotInSubfield(2)));
        assert!(matches!(ctx.rel_trace(FieldElem::ONE, 3, 1), Err(FieldError::BadTower { .. })));
        assert!(matches!(ctx.rel_trace(FieldElem::ONE, 4, 3), Err(FieldError::BadTower { .. })));
    }

    #[test]
    fn mu9_meets_f8_trivially() {
        let ctx = default_ctx(2, 6).unwrap();
        let mu = ctx.mu_subgroup(8).unwrap();
        assert_eq!(mu.len(), 9);
        let inside: Vec<_> = mu.iter().filter(|&&z| ctx.in_subfield(z, 3)).collect();
        assert_eq!(inside, vec![&FieldElem::ONE]);
        assert_eq!(ctx.mu_subgroup(4), Err(FieldError::BadOrder(4)));
        assert_eq!(default_ctx(2, 4).unwrap().mu_subgroup(4).unwrap().len(), 5);
    }

    #[test]
    fn ord2_and_gcd_rule() {
        assert_eq!(ord2(12), 2);
        assert_eq!(ord2(7), 0);
        assert_eq!(ord2(64), 6);
        assert!(gcd_power_rule(1, 2, Sign::Plus));
        assert!(!gcd_power_rule(1, 1, Sign::Plus));
        assert!(!gcd_power_rule(2, 1, Sign::Minus));
        for i in 1..=30u64 {
            for j in 1..=30u64 {
                let plus = gcd((1 << i) + 1, (1 << j) + 1) == 1;
                let minus = gcd((1 << i) - 1, (1 << j) + 1) == 1;
                assert_eq!(gcd_power_rule(i, j, Sign::Plus), plus, "({i},{j},+)");
                assert_eq!(gcd_power_rule(i, j, Sign::Minus), minus, "({i},{j},-)");
            }
        }
    }

    #[test]
    fn default_table_is_complete_and_irreducible() {
        let table = FieldTable::defaults();
        for p in [2u32, 3, 5, 7] {
            let mut n = 1;
            while (p as u64).pow(n) <= MAX_FIELD_SIZE {
                assert!(table.get(p, n).is_some(), "missing ({p},{n})");
                n += 1;
            }
        }
        for (p, n) in table.keys() {
            if (p as u64).pow(n) <= 1 << 16 {
                FieldCtx::from_table(p, n, table).unwrap();
            }
        }
    }

    #[test]
    fn large_field_without_tables_agrees_with_axioms() {
        let ctx = default_ctx(2, 22).unwrap();
        assert!(!ctx.has_log_tables());
        let g = ctx.primitive();
        assert_eq!(ctx.pow_u64(g, ctx.order() as u64), FieldElem::ONE);
        let a = ctx.elem(123_457).unwrap();
        let b = ctx.elem(3_000_001).unwrap();
        assert_eq!(ctx.mul(ctx.inv(a).unwrap(), a), FieldElem::ONE);
        assert_eq!(ctx.frobenius(a, 22), a);
        assert_eq!(ctx.mul(a, ctx.add(b, g)), ctx.add(ctx.mul(a, b), ctx.mul(a, g)));
    }

    #[test]
    fn embedding_is_a_homomorphism() {
        let small = default_ctx(2, 4).unwrap();
        let big = default_ctx(2, 8).unwrap();
        let emb = Embedding::new(&small, &big).unwrap();
        for a in small.elements() {
            for b in small.elements() {
                assert_eq!(emb.map(small.mul(a, b)), big.mul(emb.map(a), emb.map(b)));
                assert_eq!(emb.map(small.add(a, b)), big.add(emb.map(a), emb.map(b)));
            }
            assert_eq!(emb.preimage(emb.map(a)), Some(a));
        }
        let s3 = default_ctx(3, 2).unwrap();
        let b3 = default_ctx(3, 4).unwrap();
        let e3 = Embedding::new(&s3, &b3).unwrap();
        for a in s3.elements() {
            for b in s3.elements() {
                assert_eq!(e3.map(s3.mul(a, b)), b3.mul(e3.map(a), e3.map(b)));
            }
        }
    }
}
