use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use quadperm::conjectures::{cor95_check, cor95b_check, sweep_exhaustive, sweep_random, ButterflyMap, CorId, CorSweepReport};
use quadperm::criteria::{canonical_r, check_main_theorem, verify_identities, FastCriterion, QuadInput};
use quadperm::field::{default_ctx, FieldCtx, FieldElem};
use quadperm::identities::{run_identities, standard_instances, IdentityInstance, Which};
use quadperm::oracle::{is_perm_fq2, is_perm_mu, table3_entries, QuadOracle, SparsePoly};
use quadperm::poly::{quad_scr_mu_roots, realized_ramification, Poly, RationalMap};
use quadperm::rng::Stream;
use quadperm::sweep::{family_cross_check, random_tuple, run_sweep, SweepConfig, SweepMode};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn quad_ctx(k: u32) -> Arc<FieldCtx> {
    default_ctx(2, 2 * k).expect("field")
}

/// Ties the table-driven sweep engine back to the reference criterion and the direct oracle.
fn spot_check(ctx: &Arc<FieldCtx>, k: u32, l: u32, r: u64, samples: u64) -> Result<(), String> {
    let fast = FastCriterion::new(ctx, k, l, r).map_err(|e| e.to_string())?;
    let quick = QuadOracle::new(ctx, k, l, r).map_err(|e| e.to_string())?;
    let q = 1u64 << k;
    (0..samples).into_par_iter().try_for_each(|i| {
        let t = random_tuple(ctx, 0x5eed, i);
        let input = QuadInput::new(2, k, l, r, t);
        let slow = check_main_theorem(ctx, &input).map_err(|e| e.to_string())?.verdict;
        let f = SparsePoly::quad(ctx, &input);
        let brute = is_perm_fq2(ctx, &f, q).map_err(|e| e.to_string())?.is_permutation;
        ensure(slow == fast.verdict(t) && brute == quick.permutes(t) && slow == brute, format!("spot check {t:?}"))
    })
}

fn main_exhaustive() -> Outcome {
    let mut parts = Vec::new();
    let mut slowest = Duration::ZERO;
    for (k, l) in [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3), (3, 1), (3, 2)] {
        let ctx = quad_ctx(k);
        let start = Instant::now();
        let cfg = SweepConfig { k, l, r: None, mode: SweepMode::Exhaustive, keep_rows: false };
        let rep = run_sweep(&ctx, &cfg).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        let size = 1u64 << (2 * k);
        ensure(rep.total == size.pow(4), format!("q={} Q={}: {} tuples", rep.q, rep.big_q, rep.total))?;
        ensure(rep.mismatches == 0, format!("q={} Q={}: {} mismatches {:?}", rep.q, rep.big_q, rep.mismatches, rep.mismatch_examples))?;
        spot_check(&ctx, k, l, rep.r, 2000)?;
        parts.push(format!("({},{}) {} perms", rep.q, rep.big_q, rep.permutations));
    }
    ensure(slowest <= Duration::from_secs(600), format!("slowest sweep took {slowest:?}"))?;
    Ok(format!("{}; slowest {:.1?}", parts.join(", "), slowest))
}

fn main_random() -> Outcome {
    let mut parts = Vec::new();
    for l in [1, 2] {
        let ctx = quad_ctx(4);
        let start = Instant::now();
        let cfg = SweepConfig { k: 4, l, r: None, mode: SweepMode::Random { samples: 1_000_000, seed: 42 }, keep_rows: false };
        let rep = run_sweep(&ctx, &cfg).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        ensure(rep.total == 1_000_000 && rep.mismatches == 0, format!("Q={}: {} mismatches", rep.big_q, rep.mismatches))?;
        ensure(elapsed <= Duration::from_secs(120), format!("Q={} took {elapsed:?}", rep.big_q))?;
        spot_check(&ctx, 4, l, rep.r, 500)?;
        parts.push(format!("Q={} {} perms in {:.1?}", rep.big_q, rep.permutations, elapsed));
    }
    Ok(parts.join(", "))
}

fn odd_characteristic() -> Outcome {
    let ctx = default_ctx(3, 2).map_err(|e| e.to_string())?;
    let oracle = QuadOracle::new(&ctx, 1, 1, 4).map_err(|e| e.to_string())?;
    let n = oracle.len();
    let mut exceptions = 0u64;
    let mut checked = 0u64;
    let (mut s, mut t) = (vec![FieldElem::ZERO; n], vec![FieldElem::ZERO; n]);
    for a in ctx.elements() {
        for b in ctx.elements() {
            oracle.stage_ab(a, b, &mut s);
            for c in ctx.elements() {
                oracle.stage_c(&s, c, &mut t);
                for d in ctx.elements() {
                    if [a, b, c, d].iter().all(|z| z.is_zero()) {
                        continue;
                    }
                    checked += 1;
                    exceptions += oracle.finish_d(&t, d) as u64;
                }
            }
        }
    }
    ensure(checked == 6560, format!("{checked} tuples"))?;
    ensure(exceptions == 0, format!("{exceptions} exceptions"))?;
    let mut stream = Stream::new(3);
    for _ in 0..300 {
        let t = [stream.elem(&ctx), stream.elem(&ctx), stream.elem(&ctx), stream.elem(&ctx)];
        let input = QuadInput::new(3, 1, 1, 4, t);
        let a = input.poly_a(&ctx);
        if a.is_zero() {
            continue;
        }
        let root_free = a.roots_in_mu(3).map_err(|e| e.to_string())?.is_empty();
        let direct = root_free
            && match RationalMap::new(input.poly_b(&ctx), a) {
                Ok(g) => is_perm_mu(&ctx, &g, 3).map(|v| v.is_permutation).unwrap_or(false),
                Err(_) => false,
            };
        ensure(!direct, format!("direct μ_4 test accepts {t:?}"))?;
    }
    Ok(format!("{checked} nonzero tuples, 0 exceptions"))
}

fn family_completeness() -> Outcome {
    let mut parts = Vec::new();
    for (k, l) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        let cc = family_cross_check(&quad_ctx(k), k, l).map_err(|e| e.to_string())?;
        ensure(cc.equal, format!("k={k} ℓ={l}: {cc:?}"))?;
        parts.push(format!("({},{}) {}", 1 << k, 1 << l, cc.generated));
    }
    Ok(format!("family sets equal criterion sets: {}", parts.join(", ")))
}

fn exact_identities() -> Outcome {
    let mut parts = Vec::new();
    for (k, l) in [(1, 1), (2, 1), (2, 2), (3, 3)] {
        let ctx = quad_ctx(k);
        let r = canonical_r(1 << k, 1 << l).expect("residue");
        let tuples: Vec<_> = (0..).map(|i| random_tuple(&ctx, 0x1d, i)).filter(|t| t.iter().any(|z| !z.is_zero())).take(100_000).collect();
        let failures: u64 = tuples
            .into_par_iter()
            .map(|t| {
                let input = QuadInput::new(2, k, l, r, t);
                match verify_identities(&ctx, &input) {
                    Ok(chk) => !chk.all() as u64,
                    Err(_) => 1,
                }
            })
            .sum();
        ensure(failures == 0, format!("(q,Q)=({},{}): {failures} failures", 1 << k, 1 << l))?;
        parts.push(format!("({},{})", 1 << k, 1 << l));
    }
    Ok(format!("10^5 nonzero tuples each for {}", parts.join(", ")))
}

fn dense_identities() -> Outcome {
    let start = Instant::now();
    let instances = standard_instances();
    for &(q, n) in &instances {
        let rep = run_identities(q, n, Which::All).map_err(|e| format!("q={q} n={n}: {e}"))?;
        let expected = IdentityInstance::new(q, n).map_err(|e| e.to_string())?.expected_delta_len();
        ensure(rep.all_pass(), format!("q={q} n={n}: {rep:?}"))?;
        ensure(rep.delta_len == expected, format!("q={q} n={n}: |Δ|={} expected {expected}", rep.delta_len))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed <= Duration::from_secs(60), format!("took {elapsed:?}"))?;
    Ok(format!("{} instances in {:.1?}", instances.len(), elapsed))
}

fn check_sweep(rep: CorSweepReport) -> Result<u64, String> {
    ensure(rep.passed() && rep.checked > 0, format!("{} k={} ℓ={}: {:?}", rep.id, rep.k, rep.l, rep))?;
    Ok(rep.checked)
}

fn corollaries() -> Outcome {
    let mut points = 0;
    let ex = |id, k, l| sweep_exhaustive(id, k, l).map_err(|e| format!("{id} {k} {l}: {e}"));
    points += check_sweep(ex(CorId::C91, 1, 1)?)?;
    for l in [1, 3] {
        points += check_sweep(sweep_random(CorId::C91, 3, l, 100_000, 91).map_err(|e| e.to_string())?)?;
    }
    for id in [CorId::C92, CorId::C93, CorId::C94, CorId::C96] {
        let mut any = false;
        for k in [1, 2] {
            for l in 1..=4 {
                if quadperm::conjectures::check_hypotheses(id, k, l).is_ok() {
                    points += check_sweep(ex(id, k, l)?)?;
                    any = true;
                }
            }
        }
        ensure(any, format!("{id}: no admissible parameters"))?;
    }
    for id in [CorId::C95, CorId::C95b] {
        for (k, l) in [(3, 1), (5, 1), (5, 3)] {
            points += check_sweep(ex(id, k, l)?)?;
        }
    }
    for (k, l) in [(1, 1), (3, 1), (3, 5)] {
        points += check_sweep(ex(CorId::C97, k, l)?)?;
    }
    points += check_sweep(ex(CorId::Remark96, 3, 1)?)?;
    points += check_sweep(ex(CorId::Generalized97, 1, 1)?)?;
    points += check_sweep(sweep_random(CorId::Generalized97, 3, 1, 20_000, 97).map_err(|e| e.to_string())?)?;

    let ctx = default_ctx(2, 3).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let nonzero: Vec<FieldElem> = ctx.elements().skip(1).collect();
    let mut pairs = 0;
    for &alpha in &nonzero {
        for &beta in &nonzero {
            let map = ButterflyMap::new(&ctx, 3, 1, alpha, beta).map_err(|e| e.to_string())?;
            let one = cor95_check(&ctx, &map).map_err(|e| e.to_string())?;
            let two = cor95b_check(&ctx, &map).map_err(|e| e.to_string())?;
            ensure(one.0 == one.1 && two == one, format!("butterfly α={alpha:?} β={beta:?}"))?;
            pairs += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(pairs == 49 && elapsed < Duration::from_secs(1), format!("butterfly grid took {elapsed:?}"))?;
    let unit = ButterflyMap::new(&ctx, 3, 1, FieldElem::ONE, FieldElem::ONE).map_err(|e| e.to_string())?;
    ensure(cor95_check(&ctx, &unit).map_err(|e| e.to_string())? == (true, true), "α=β=1 is not a permutation")?;
    Ok(format!("{points} parameter points, 0 mismatches; butterfly q=8 grid in {elapsed:.1?}"))
}

fn table3() -> Outcome {
    let entries = table3_entries().map_err(|e| e.to_string())?;
    let failing: Vec<_> = entries.iter().filter(|e| !e.permutes).map(|e| format!("q={} {}", e.q, e.label)).collect();
    let labels: std::collections::BTreeSet<_> = entries.iter().map(|e| (e.q, e.label.as_str())).collect();
    ensure(labels.len() >= 11, format!("only {} sporadic maps", labels.len()))?;
    ensure(failing.is_empty(), format!("failing: {failing:?}"))?;
    Ok(format!("{} sporadic maps ({} parameter instances), all permute", labels.len(), entries.len()))
}

fn worked_instance() -> Outcome {
    let ctx = quad_ctx(1);
    let w2 = FieldElem(3);
    let input = QuadInput::new(2, 1, 1, 3, [w2, FieldElem::ZERO, FieldElem::ONE, w2]);
    let rep = check_main_theorem(&ctx, &input).map_err(|e| e.to_string())?;
    ensure(rep.verdict, "criterion rejects the tuple")?;
    let f = SparsePoly::quad(&ctx, &input);
    let identity = ctx.elements().all(|x| f.eval(&ctx, x) == x);
    ensure(identity, "f is not the identity on F_4")?;
    Ok("verdict true, f(x) = x on all of F_4".into())
}

fn scr_quadratic() -> Outcome {
    let mut checked = 0;
    for k in [1, 2, 3] {
        let ctx = quad_ctx(k);
        let q = 1u64 << k;
        let betas: Vec<FieldElem> = ctx.subfield_elements(k).map_err(|e| e.to_string())?.into_iter().filter(|z| !z.is_zero()).collect();
        for alpha in ctx.elements() {
            for &beta in &betas {
                let rep = quad_scr_mu_roots(&ctx, alpha, beta, q).map_err(|e| e.to_string())?;
                let expected = if rep.trace_value == FieldElem::ONE { 2 } else { 0 };
                ensure(rep.root_count == expected, format!("q={q} α={alpha:?} β={beta:?}: {rep:?}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (α,β) pairs, 0 exceptions"))
}

fn riemann_hurwitz() -> Outcome {
    let ctx = default_ctx(2, 12).map_err(|e| e.to_string())?;
    let small = ctx.subfield_elements(4).map_err(|e| e.to_string())?;
    let mut stream = Stream::new(2009);
    let (mut tested, mut split_failures, mut attempts, mut unresolved) = (0u32, 0u32, 0u32, 0u32);
    while tested + split_failures < 1000 {
        attempts += 1;
        ensure(attempts < 100_000, "could not draw enough separable maps")?;
        let dn = stream.below(7) as usize;
        let dd = stream.below(7) as usize;
        let num = Poly::new(&ctx, (0..=dn).map(|_| stream.pick(&small)).collect());
        let den = Poly::new(&ctx, (0..=dd).map(|_| stream.pick(&small)).collect());
        let Ok(g) = RationalMap::new(num, den) else { continue };
        if g.is_constant() || g.wronskian().is_zero() {
            continue;
        }
        let real = realized_ramification(&g).map_err(|e| e.to_string())?;
        let n = g.degree() as u32;
        if real.fibers.iter().any(|f| f.multiset.iter().sum::<u32>() != n) {
            split_failures += 1;
            continue;
        }
        unresolved += real.fibers.iter().any(|f| !f.fully_resolved()) as u32;
        ensure(real.total_excess() <= 2 * n - 2, format!("excess {} > 2·{n}−2 for {g:?}", real.total_excess()))?;
        tested += 1;
    }
    let rate = split_failures as f64 / 1000.0;
    ensure(rate <= 0.05, format!("split failure rate {rate}"))?;
    Ok(format!(
        "{tested} maps satisfy the bound, {split_failures} split failures excluded ({:.1}%), {unresolved} with preimages outside the ambient field",
        rate * 100.0
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("main criterion vs oracle, exhaustive", main_exhaustive),
        ("main criterion vs oracle, random q=16", main_random),
        ("no odd-characteristic examples", odd_characteristic),
        ("explicit families are complete", family_completeness),
        ("polynomial identities among A, B, U, V, W", exact_identities),
        ("dense bivariate identities", dense_identities),
        ("corollary sweeps and butterfly maps", corollaries),
        ("sporadic degree-4 maps", table3),
        ("worked positive instance", worked_instance),
        ("quadratic SCR roots on μ", scr_quadratic),
        ("Riemann-Hurwitz bound", riemann_hurwitz),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS [{elapsed:>8.2?}] {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL [{elapsed:>8.2?}] {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
