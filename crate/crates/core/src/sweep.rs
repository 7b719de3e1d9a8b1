//! Criterion-versus-oracle sweeps over the coefficient space, exhaustive or seeded random.

use std::collections::HashSet;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::criteria::{canonical_r, CriterionError, FastCriterion};
use crate::families::{enumerate_families, FamilyError, Tuple};
use crate::field::{FieldCtx, FieldElem};
use crate::oracle::{OracleError, QuadOracle};
use crate::rng::Stream;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SweepError {
    #[error(transparent)]
    Criterion(#[from] CriterionError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("work estimate {estimate} exceeds the budget {budget}")]
    BudgetExceeded { estimate: u128, budget: u128 },
    #[error("no admissible r for q = {q}, Q = {big_q}")]
    NoResidue { q: u64, big_q: u64 },
    #[error("sweeps need the ambient field to be exactly F_(q^2)")]
    AmbientNotQuadratic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SweepMode {
    Exhaustive,
    Random { samples: u64, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepConfig {
    pub k: u32,
    pub l: u32,
    /// Defaults to the canonical residue.
    pub r: Option<u64>,
    pub mode: SweepMode,
    pub keep_rows: bool,
}

/// One evaluated tuple; columns follow the CSV layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub q: u64,
    #[serde(rename = "Q")]
    pub big_q: u64,
    pub r: u64,
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
    pub criterion: bool,
    pub oracle: bool,
    #[serde(rename = "match")]
    pub agree: bool,
}

pub const MISMATCH_CAP: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub q: u64,
    #[serde(rename = "Q")]
    pub big_q: u64,
    pub r: u64,
    pub mode: SweepMode,
    pub total: u64,
    pub permutations: u64,
    pub criterion_positive: u64,
    pub mismatches: u64,
    /// The first mismatching tuples in sweep order, at most [`MISMATCH_CAP`].
    pub mismatch_examples: Vec<[u32; 4]>,
    /// SHA-256 over the per-chunk digests of the verdict stream.
    pub digest: String,
    #[serde(skip)]
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

/// Exhaustive work estimate `(q^2)^4 (q+1)`.
pub fn work_estimate(q: u64) -> u128 {
    let s = (q * q) as u128;
    s.pow(4) * (q as u128 + 1)
}

pub fn check_budget(q: u64, budget: u128) -> Result<(), SweepError> {
    let estimate = work_estimate(q);
    if estimate > budget {
        return Err(SweepError::BudgetExceeded { estimate, budget });
    }
    Ok(())
}

struct Chunk {
    total: u64,
    permutations: u64,
    positive: u64,
    mismatches: u64,
    examples: Vec<[u32; 4]>,
    digest: [u8; 32],
    rows: Vec<SweepRow>,
}

struct Engine {
    criterion: FastCriterion,
    oracle: QuadOracle,
    q: u64,
    big_q: u64,
    r: u64,
    keep_rows: bool,
}

struct Acc<'a> {
    engine: &'a Engine,
    hasher: Sha256,
    chunk: Chunk,
}

impl<'a> Acc<'a> {
    fn new(engine: &'a Engine) -> Acc<'a> {
        Acc {
            engine,
            hasher: Sha256::new(),
            chunk: Chunk {
                total: 0,
                permutations: 0,
                positive: 0,
                mismatches: 0,
                examples: Vec::new(),
                digest: [0; 32],
                rows: Vec::new(),
            },
        }
    }

    #[inline]
    fn record(&mut self, t: Tuple, criterion: bool, oracle: bool) {
        let ch = &mut self.chunk;
        ch.total += 1;
        ch.permutations += oracle as u64;
        ch.positive += criterion as u64;
        self.hasher.update([(criterion as u8) << 1 | oracle as u8]);
        let enc = [t[0].0, t[1].0, t[2].0, t[3].0];
        if criterion != oracle {
            ch.mismatches += 1;
            if ch.examples.len() < MISMATCH_CAP {
                ch.examples.push(enc);
            }
        }
        if self.engine.keep_rows {
            let e = self.engine;
            ch.rows.push(SweepRow {
                q: e.q,
                big_q: e.big_q,
                r: e.r,
                a: enc[0],
                b: enc[1],
                c: enc[2],
                d: enc[3],
                criterion,
                oracle,
                agree: criterion == oracle,
            });
        }
    }

    fn finish(mut self) -> Chunk {
        self.chunk.digest = self.hasher.finalize().into();
        self.chunk
    }
}

fn engine(ctx: &Arc<FieldCtx>, cfg: &SweepConfig) -> Result<Engine, SweepError> {
    let p = ctx.characteristic() as u64;
    let (q, big_q) = (p.pow(cfg.k), p.pow(cfg.l));
    if ctx.degree() != 2 * cfg.k {
        return Err(SweepError::AmbientNotQuadratic);
    }
    let r = match cfg.r {
        Some(r) => r,
        None => canonical_r(q, big_q).ok_or(SweepError::NoResidue { q, big_q })?,
    };
    Ok(Engine {
        criterion: FastCriterion::new(ctx, cfg.k, cfg.l, r)?,
        oracle: QuadOracle::new(ctx, cfg.k, cfg.l, r)?,
        q,
        big_q,
        r,
        keep_rows: cfg.keep_rows,
    })
}

const RANDOM_CHUNK: u64 = 4096;

pub fn run_sweep(ctx: &Arc<FieldCtx>, cfg: &SweepConfig) -> Result<SweepReport, SweepError> {
    let eng = engine(ctx, cfg)?;
    let size = ctx.size() as u64;
    let n = eng.oracle.len();
    let gcd_ok = eng.oracle.gcd_ok();
    let chunks: Vec<Chunk> = match cfg.mode {
        SweepMode::Exhaustive => (0..size * size)
            .into_par_iter()
            .map(|ab| {
                let (a, b) = (FieldElem((ab / size) as u32), FieldElem((ab % size) as u32));
                let mut acc = Acc::new(&eng);
                let mut s = vec![FieldElem::ZERO; n];
                let mut t = vec![FieldElem::ZERO; n];
                eng.oracle.stage_ab(a, b, &mut s);
                for c in ctx.elements() {
                    eng.oracle.stage_c(&s, c, &mut t);
                    for d in ctx.elements() {
                        let oracle = gcd_ok && eng.oracle.finish_d(&t, d);
                        acc.record([a, b, c, d], eng.criterion.verdict([a, b, c, d]), oracle);
                    }
                }
                acc.finish()
            })
            .collect(),
        SweepMode::Random { samples, seed } => (0..samples.div_ceil(RANDOM_CHUNK))
            .into_par_iter()
            .map(|chunk| {
                let mut acc = Acc::new(&eng);
                let end = ((chunk + 1) * RANDOM_CHUNK).min(samples);
                for i in chunk * RANDOM_CHUNK..end {
                    let t = random_tuple(ctx, seed, i);
                    acc.record(t, eng.criterion.verdict(t), eng.oracle.permutes(t));
                }
                acc.finish()
            })
            .collect(),
    };
    let mut report = SweepReport {
        q: eng.q,
        big_q: eng.big_q,
        r: eng.r,
        mode: cfg.mode,
        total: 0,
        permutations: 0,
        criterion_positive: 0,
        mismatches: 0,
        mismatch_examples: Vec::new(),
        digest: String::new(),
        rows: Vec::new(),
    };
    let mut outer = Sha256::new();
    for ch in chunks {
        report.total += ch.total;
        report.permutations += ch.permutations;
        report.criterion_positive += ch.positive;
        report.mismatches += ch.mismatches;
        let room = MISMATCH_CAP - report.mismatch_examples.len();
        report.mismatch_examples.extend(ch.examples.into_iter().take(room));
        report.rows.extend(ch.rows);
        outer.update(ch.digest);
    }
    report.digest = hex(&outer.finalize());
    Ok(report)
}

/// The `i`-th random tuple, drawn from counters `4i .. 4i+3`.
pub fn random_tuple(ctx: &FieldCtx, seed: u64, i: u64) -> Tuple {
    let mut s = Stream::at(seed, 4 * i);
    [s.elem(ctx), s.elem(ctx), s.elem(ctx), s.elem(ctx)]
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// All tuples accepted by the criterion, by exhaustive enumeration.
pub fn criterion_positive_set(ctx: &Arc<FieldCtx>, k: u32, l: u32, r: u64) -> Result<HashSet<Tuple>, SweepError> {
    let crit = FastCriterion::new(ctx, k, l, r)?;
    let size = ctx.size() as u64;
    Ok((0..size * size)
        .into_par_iter()
        .flat_map_iter(|ab| {
            let (a, b) = (FieldElem((ab / size) as u32), FieldElem((ab % size) as u32));
            let crit = &crit;
            ctx.elements()
                .flat_map(move |c| ctx.elements().map(move |d| [a, b, c, d]))
                .filter(move |&t| crit.verdict(t))
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyCrossCheck {
    pub generated: usize,
    pub criterion_positive: usize,
    pub only_generated: usize,
    pub only_criterion: usize,
    pub equal: bool,
}

/// Compares the explicit families with the criterion-positive set.
pub fn family_cross_check(ctx: &Arc<FieldCtx>, k: u32, l: u32) -> Result<FamilyCrossCheck, SweepError> {
    let p = ctx.characteristic() as u64;
    let (q, big_q) = (p.pow(k), p.pow(l));
    let r = canonical_r(q, big_q).ok_or(SweepError::NoResidue { q, big_q })?;
    let generated = enumerate_families(ctx, k, l, r)?.tuples;
    let positive = criterion_positive_set(ctx, k, l, r)?;
    let only_generated = generated.difference(&positive).count();
    let only_criterion = positive.difference(&generated).count();
    Ok(FamilyCrossCheck {
        generated: generated.len(),
        criterion_positive: positive.len(),
        only_generated,
        only_criterion,
        equal: only_generated == 0 && only_criterion == 0,
    })
}
