//! Acceptance suite. Runs without the libtest harness so that the report
//! (one line per criterion) is always printed; exits non-zero on any failure.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use qform_core::blockdiag::{apply_transform, block_diagonalize, blocks_to_matrix};
use qform_core::counting::{count_composite, count_form, stable_level, CountTable};
use qform_core::oracle::{
    chi_square_uniform, counts_all_targets, enumerate_counts_all, enumerate_mod, enumerate_reps,
    DEFAULT_BUDGET,
};
use qform_core::sampling::{CompositeSampler, FormSampler, SamplingStats};
use qform_core::sqroots::{lift_sqrt_odd, sqrt_unit_mod_2k};
use qform_core::symbols::{enumerate_symbols, split_class_size, split_pair_count_mod_p, symbol_of};
use qform_core::{
    Block, Order, PkSymbol, PrimePower, QuadraticForm, RandomSource, RepKind, SampleOutcome,
};

use common::{eval_mod, form, pp, random_form, to_u64s};

type Outcome = Result<String, String>;

const KINDS: [RepKind; 3] = [RepKind::Any, RepKind::Primitive, RepKind::NonPrimitive];

fn main() -> ExitCode {
    let mut stats = SamplingStats::default();
    let mut results: Vec<(usize, &str, Outcome, f64)> = Vec::new();
    let mut run = |id: usize, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let out = f();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match &out {
            Ok(d) => ("PASS", d.as_str()),
            Err(d) => ("FAIL", d.as_str()),
        };
        println!("criterion {id} [{name}]: {tag} ({detail}; {secs:.1}s)");
        results.push((id, name, out, secs));
    };
    run(1, "counting vs enumeration", &mut counting_oracle);
    run(2, "split sizes vs pair enumeration", &mut split_sizes);
    run(3, "diagonalization contract", &mut diagonalization);
    run(4, "square-root suite", &mut square_roots);
    run(5, "sampler support and uniformity", &mut || sampler_grid(&mut stats));
    run(6, "stabilization law", &mut stabilization);
    run(7, "CRT law", &mut || crt_law(&mut stats));
    run(8, "Las Vegas discipline", &mut || las_vegas(&mut stats));
    let failed = results.iter().filter(|r| r.2.is_err()).count();
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn cells() -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5, 7] {
        let mut k = 1;
        while p.pow(k) <= 256 {
            out.push((p, k));
            k += 1;
        }
    }
    out
}

fn counting_oracle() -> Outcome {
    let mut rng = RandomSource::from_seed(0x0001);
    let (mut forms, mut targets) = (0u64, 0u64);
    for (p, k) in cells() {
        let pp = pp(p, k);
        for n in 1..=3 {
            for _ in 0..25 {
                let q = random_form(&mut rng, n, p, k);
                let table = CountTable::new(&q, &pp);
                let oracle = counts_all_targets(&q, &pp).map_err(|e| e.to_string())?;
                for (t, want) in oracle.iter().enumerate() {
                    let got = table.get(&BigInt::from(t));
                    if got != want {
                        return Err(format!(
                            "p={p} k={k} Q={} t={t}: got {got}, oracle {want}",
                            q.matrix()
                        ));
                    }
                    targets += 1;
                }
                forms += 1;
            }
        }
    }
    Ok(format!("{forms} forms, {targets} (form, t) pairs, all exact"))
}

// Symbol from first principles: trial division and the list of squares mod p.
fn naive_symbol(p: u64, q: u64, x: u64) -> PkSymbol {
    let x = x % q;
    if x == 0 {
        return PkSymbol::ZERO;
    }
    let (mut ord, mut cop) = (0u64, x);
    while cop % p == 0 {
        cop /= p;
        ord += 1;
    }
    let sgn = if p == 2 {
        (cop % 8) as i8
    } else if (1..p).any(|y| y * y % p == cop % p) {
        1
    } else {
        -1
    };
    PkSymbol { ord: Order::Finite(ord), sgn }
}

fn split_sizes() -> Outcome {
    let mut triples = 0u64;
    for (p, k) in cells().into_iter().filter(|&(_, k)| k <= 4) {
        let pp = pp(p, k);
        let q = p.pow(k);
        let syms = enumerate_symbols(&pp);
        for t in 0..q {
            let mut hist: BTreeMap<(PkSymbol, PkSymbol), u64> = BTreeMap::new();
            for a in 0..q {
                let key = (naive_symbol(p, q, a), naive_symbol(p, q, t + q - a));
                *hist.entry(key).or_default() += 1;
            }
            let g = naive_symbol(p, q, t);
            for g1 in &syms {
                for g2 in &syms {
                    let want = hist.get(&(*g1, *g2)).copied().unwrap_or(0);
                    let got = split_class_size(&pp, &g, g1, g2);
                    if got != BigUint::from(want) {
                        return Err(format!("p={p} k={k} t={t} {g1} {g2}: got {got}, want {want}"));
                    }
                    triples += 1;
                }
            }
        }
    }
    // Table of split sets modulo p, including primes beyond the exhaustive range
    for p in [3u64, 5, 7, 11, 13, 17, 19] {
        let pb = BigUint::from(p);
        let is_res = |x: u64| (1..p).any(|y| y * y % p == x % p);
        let leg = |x: u64| if is_res(x) { 1i8 } else { -1 };
        for a in 1..p {
            for s1 in [1i8, -1] {
                for s2 in [1i8, -1] {
                    let want = (1..p)
                        .filter(|&x| (x + a) % p != 0 && leg(x) == s1 && leg(x + a) == s2)
                        .count();
                    if split_pair_count_mod_p(&pb, leg(a), s1, s2) != BigUint::from(want) {
                        return Err(format!("pair count p={p} a={a} [{s1},{s2}]"));
                    }
                }
            }
        }
    }
    let spot = split_pair_count_mod_p(&BigUint::from(13u8), 1, 1, 1);
    if spot != BigUint::from((13u64 - 1) / 4 - 1) {
        return Err(format!("p=13 [+,+] = {spot}, expected (p-1)/4 - 1"));
    }
    Ok(format!("{triples} (t, γ1, γ2) triples exact; mod-p table exact for p ≤ 19"))
}

fn check_diag(q: &QuadraticForm, pp: &PrimePower) -> Result<Vec<Block>, String> {
    let bd = block_diagonalize(q, pp);
    let ctx = || format!("{pp} Q={}", q.matrix());
    if !bd.u.det_mod(pp.modulus()).is_one() {
        return Err(format!("det U != 1 for {}", ctx()));
    }
    let lhs = apply_transform(q, &bd.u, pp).map_err(|e| e.to_string())?;
    if lhs != blocks_to_matrix(&bd).reduced(pp.modulus()) {
        return Err(format!("U'QU != blocks for {}", ctx()));
    }
    for blk in &bd.blocks {
        if let Block::TypeII { b, .. } = blk {
            if !pp.is_two() {
                return Err(format!("Type II block for odd p: {}", ctx()));
            }
            if (b % 2u8).is_zero() {
                return Err(format!("Type II block with even b: {}", ctx()));
            }
        }
    }
    Ok(bd.blocks)
}

fn diagonalization() -> Outcome {
    let mut rng = RandomSource::from_seed(0x0003);
    let mut oracle_checked = 0;
    while oracle_checked < 200 {
        let p = [2u64, 3, 5][rng.uniform_u64(3) as usize];
        let k = 1 + rng.uniform_u64(5) as u32;
        let n = 1 + rng.uniform_u64(4) as usize;
        if (p.pow(k) as u128).pow(n as u32) > 1 << 22 {
            continue;
        }
        let pp = pp(p, k);
        let q = random_form(&mut rng, n, p, k);
        let blocks = check_diag(&q, &pp)?;
        let d = qform_core::blockdiag::BlockDiagForm {
            blocks,
            u: qform_core::Matrix::identity(n),
            modulus: pp.clone(),
        };
        let a = counts_all_targets(&q, &pp).map_err(|e| e.to_string())?;
        let b = counts_all_targets(&blocks_to_matrix(&d), &pp).map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("oracle counts differ for {pp} Q={}", q.matrix()));
        }
        oracle_checked += 1;
    }
    // the full parameter range, where exhaustive counting is out of reach
    let mut structural = 0;
    for _ in 0..200 {
        let p = [2u64, 3, 5][rng.uniform_u64(3) as usize];
        let k = 1 + rng.uniform_u64(5) as u32;
        let n = 1 + rng.uniform_u64(4) as usize;
        check_diag(&random_form(&mut rng, n, p, k), &pp(p, k))?;
        structural += 1;
    }
    Ok(format!(
        "{oracle_checked} instances with oracle count equality, {structural} more over the full range"
    ))
}

fn square_roots() -> Outcome {
    let mut checked = 0u64;
    for k in 1..=11u32 {
        let q = 1u64 << k;
        let mut by_square = vec![Vec::new(); q as usize];
        for x in 0..q {
            by_square[(x * x % q) as usize].push(x);
        }
        let expect = [1usize, 2, 4][(k.min(3) - 1) as usize];
        for t in (1..q).step_by(2) {
            let brute = &by_square[t as usize];
            match sqrt_unit_mod_2k(k, &BigInt::from(t)) {
                Ok(r) => {
                    let r: Vec<u64> = r.iter().map(|v| v.to_u64().unwrap()).collect();
                    if r.len() != expect || &r != brute {
                        return Err(format!("2^{k}, t={t}: {r:?} vs {brute:?}"));
                    }
                }
                Err(_) if brute.is_empty() => {}
                Err(e) => return Err(format!("2^{k}, t={t}: {e}")),
            }
            checked += 1;
        }
    }
    let mut rng = RandomSource::from_seed(0x0004);
    for p in (3u64..50).filter(|&p| (2..p).all(|d| p % d != 0)) {
        for k in 1..=3u32 {
            let pp = pp(p, k);
            let q = p.pow(k);
            let mut by_square = vec![Vec::new(); q as usize];
            for x in 0..q {
                by_square[(x * x % q) as usize].push(x);
            }
            for t in (1..q).filter(|t| t % p != 0) {
                let brute = &by_square[t as usize];
                match lift_sqrt_odd(&pp, &BigInt::from(t), &mut rng) {
                    Ok((a, b)) => {
                        let r = vec![a.to_u64().unwrap(), b.to_u64().unwrap()];
                        let squares_back = r.iter().all(|x| x * x % q == t);
                        if &r != brute || !squares_back {
                            return Err(format!("{p}^{k}, t={t}: {r:?} vs {brute:?}"));
                        }
                    }
                    Err(_) if brute.is_empty() => {}
                    Err(e) => return Err(format!("{p}^{k}, t={t}: {e}")),
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} residues, all root sets exact"))
}

fn grid_forms() -> Vec<QuadraticForm> {
    vec![
        form(&[&[1]]),
        form(&[&[2]]),
        form(&[&[3]]),
        form(&[&[5]]),
        form(&[&[6]]),
        form(&[&[0]]),
        form(&[&[1, 0], &[0, 1]]),
        form(&[&[0, 1], &[1, 0]]),
        form(&[&[1, 1], &[1, 2]]),
        form(&[&[2, 1], &[1, 2]]),
        form(&[&[1, 0], &[0, 2]]),
        form(&[&[1, 0], &[0, 3]]),
        form(&[&[2, 1], &[1, 4]]),
        form(&[&[1, 0], &[0, 5]]),
        form(&[&[3, 0], &[0, 6]]),
        form(&[&[4, 2], &[2, 6]]),
    ]
}

// One target per symbol from each end of Z/q.
fn grid_targets(pp: &PrimePower, q: u64) -> Vec<u64> {
    let mut seen = BTreeSet::new();
    let mut out = BTreeSet::new();
    for t in 0..q {
        if seen.insert(symbol_of(pp, &BigInt::from(t))) {
            out.insert(t);
        }
    }
    seen.clear();
    for t in (0..q).rev() {
        if seen.insert(symbol_of(pp, &BigInt::from(t))) {
            out.insert(t);
        }
    }
    out.into_iter().collect()
}

fn is_prim(x: &[u64], primes: &[u64]) -> bool {
    primes.iter().all(|p| x.iter().any(|c| c % p != 0))
}

// Draws 100·|S| times; returns (support matches, chi-square pass).
fn sample_cell(
    sampler: &FormSampler,
    qf: &QuadraticForm,
    support: &[Vec<u64>],
    t: u64,
    kind: RepKind,
    seed: u64,
    stats: &mut SamplingStats,
) -> Result<(bool, bool), String> {
    let q = sampler.modulus().modulus().to_u64().unwrap();
    let p = sampler.modulus().p().to_u64().unwrap();
    let index: BTreeMap<&[u64], usize> =
        support.iter().enumerate().map(|(i, v)| (v.as_slice(), i)).collect();
    let mut hist = vec![0u64; support.len()];
    let mut rng = RandomSource::from_seed(seed);
    for _ in 0..100 * support.len() {
        match sampler.sample_with_stats(&BigInt::from(t), kind, &mut rng, stats) {
            SampleOutcome::Solution(x) => {
                let x = to_u64s(&x);
                if eval_mod(qf, &x, q) != t % q || !kind.matches(is_prim(&x, &[p])) {
                    return Err(format!("invalid draw {x:?} for t={t} {kind} mod {q}"));
                }
                match index.get(x.as_slice()) {
                    Some(&i) => hist[i] += 1,
                    None => return Err(format!("draw {x:?} outside the oracle set")),
                }
            }
            other => return Err(format!("unexpected {other:?} for t={t} {kind} mod {q}")),
        }
    }
    let chi = chi_square_uniform(&hist, support.len()).map_err(|e| e.to_string())?;
    Ok((hist.iter().all(|&h| h > 0), chi.pass))
}

fn sampler_grid(stats: &mut SamplingStats) -> Outcome {
    let (mut cells, mut chi_pass, mut reruns) = (0u64, 0u64, 0u64);
    let mut draws = 0u64;
    for p in [2u64, 3, 5] {
        for k in 1..=3u32 {
            let pp = pp(p, k);
            let q = p.pow(k);
            for qf in grid_forms() {
                let sampler = FormSampler::new(&qf, &pp);
                for t in grid_targets(&pp, q) {
                    let (all, _) = enumerate_reps(&qf, &pp, &BigInt::from(t)).map_err(|e| e.to_string())?;
                    let all: Vec<Vec<u64>> = all.iter().map(|v| common::big_to_u64s(v)).collect();
                    for kind in KINDS {
                        let support: Vec<Vec<u64>> =
                            all.iter().filter(|x| kind.matches(is_prim(x, &[p]))).cloned().collect();
                        if support.is_empty() {
                            let mut rng = RandomSource::from_seed(t);
                            let o = sampler.sample(&BigInt::from(t), kind, &mut rng);
                            if o != SampleOutcome::NoSolution {
                                return Err(format!("expected NoSolution, got {o:?}"));
                            }
                            continue;
                        }
                        if support.len() > 64 {
                            continue;
                        }
                        cells += 1;
                        draws += 100 * support.len() as u64;
                        let seed = 1000 * cells + 5;
                        let (full, mut pass) = sample_cell(&sampler, &qf, &support, t, kind, seed, stats)?;
                        if !full {
                            return Err(format!("support mismatch: {pp} Q={} t={t} {kind}", qf.matrix()));
                        }
                        if !pass {
                            reruns += 1;
                            let (full, again) =
                                sample_cell(&sampler, &qf, &support, t, kind, seed + 1, stats)?;
                            if !full {
                                return Err(format!("support mismatch on rerun: {pp} t={t} {kind}"));
                            }
                            pass = again;
                        }
                        chi_pass += u64::from(pass);
                    }
                }
            }
        }
    }
    let rate = chi_pass as f64 / cells as f64;
    let detail = format!(
        "{cells} cells, {draws} draws, support exact everywhere, chi-square passed {chi_pass}/{cells} ({:.1}%), {reruns} reruns",
        100.0 * rate
    );
    if rate >= 0.95 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn stabilization() -> Outcome {
    let mut rng = RandomSource::from_seed(0x0006);
    let (mut done, mut nonzero) = (0, 0);
    while done < 50 {
        let p = [2u64, 3, 5][rng.uniform_u64(3) as usize];
        let n = 1 + rng.uniform_u64(2) as usize;
        let mut rows = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let v = BigInt::from(rng.uniform_u64(9) as i64 - 4);
                rows[i][j] = v.clone();
                rows[j][i] = v;
            }
        }
        let qf = QuadraticForm::from_rows(rows).unwrap();
        let t = BigInt::from(1 + rng.uniform_u64(20));
        let Ok(s) = stable_level(&qf, &BigUint::from(p), &t) else {
            continue;
        };
        if (p as u128).pow((s + 2) * n as u32) > 1 << 22 {
            continue;
        }
        let mut totals = Vec::new();
        for k in s..=s + 2 {
            let pp = pp(p, k);
            let (_, oracle) = enumerate_reps(&qf, &pp, &t).map_err(|e| e.to_string())?;
            if count_form(&qf, &pp, &t) != oracle {
                return Err(format!("count_form differs from oracle at {pp}, Q={}", qf.matrix()));
            }
            totals.push(oracle.total);
        }
        let factor = BigUint::from(p).pow(n as u32 - 1);
        if totals[1] != &totals[0] * &factor || totals[2] != &totals[1] * &factor {
            return Err(format!(
                "p={p} s={s} Q={} t={t}: totals {:?}",
                qf.matrix(),
                totals.iter().map(|v| v.to_string()).collect::<Vec<_>>()
            ));
        }
        nonzero += usize::from(!totals[0].is_zero());
        done += 1;
    }
    Ok(format!("{done} instances ({nonzero} with solutions), levels s, s+1, s+2 checked"))
}

fn factor(mut q: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while q > 1 {
        let mut e = 0;
        while q % d == 0 {
            q /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    out
}

fn crt_law(stats: &mut SamplingStats) -> Outcome {
    let moduli = [
        6u64, 10, 12, 14, 15, 18, 20, 21, 30, 35, 36, 42, 45, 60, 63, 70, 72, 84, 90, 100, 105,
        120, 126, 140, 150, 180, 196, 200,
    ];
    let forms = [
        form(&[&[1]]),
        form(&[&[2]]),
        form(&[&[3]]),
        form(&[&[1, 0], &[0, 1]]),
        form(&[&[0, 1], &[1, 0]]),
        form(&[&[1, 1], &[1, 3]]),
        form(&[&[2, 1], &[1, 2]]),
        form(&[&[1, 0], &[0, 6]]),
    ];
    let (mut count_checks, mut support_checks) = (0u64, 0u64);
    let mut rng = RandomSource::from_seed(0x0007);
    for q in moduli {
        let fac = factor(q);
        let primes: Vec<u64> = fac.iter().map(|f| f.0).collect();
        let factors: Vec<PrimePower> = fac.iter().map(|&(p, k)| pp(p, k)).collect();
        for qf in &forms {
            let brute = enumerate_counts_all(qf, q, &primes, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
            for (t, want) in brute.iter().enumerate() {
                let got = count_composite(qf, &factors, &BigInt::from(t)).map_err(|e| e.to_string())?;
                if &got != want {
                    return Err(format!("q={q} Q={} t={t}: got {got}, brute {want}", qf.matrix()));
                }
                count_checks += 1;
            }
            let sampler = CompositeSampler::new(qf, &factors).map_err(|e| e.to_string())?;
            for t in [0, 1, 2, q - 1] {
                let (sols, _) = enumerate_mod(qf, q, &primes, &BigInt::from(t), DEFAULT_BUDGET)
                    .map_err(|e| e.to_string())?;
                let sols: Vec<Vec<u64>> = sols.iter().map(|v| common::big_to_u64s(v)).collect();
                for kind in KINDS {
                    let want: BTreeSet<Vec<u64>> = sols
                        .iter()
                        .filter(|x| kind.matches(is_prim(x, &primes)))
                        .cloned()
                        .collect();
                    if want.len() > 256 {
                        continue;
                    }
                    let mut seen = BTreeSet::new();
                    let draws = if want.is_empty() { 1 } else { 25 * want.len() };
                    for _ in 0..draws {
                        match sampler.sample_with_stats(&BigInt::from(t), kind, &mut rng, stats) {
                            SampleOutcome::Solution(x) => {
                                let x = to_u64s(&x);
                                if !want.contains(&x) {
                                    return Err(format!("q={q} t={t} {kind}: draw {x:?} not a solution"));
                                }
                                seen.insert(x);
                            }
                            SampleOutcome::NoSolution if want.is_empty() => {}
                            other => return Err(format!("q={q} t={t} {kind}: {other:?}")),
                        }
                    }
                    if seen != want {
                        return Err(format!(
                            "q={q} Q={} t={t} {kind}: support {} of {}",
                            qf.matrix(),
                            seen.len(),
                            want.len()
                        ));
                    }
                    support_checks += 1;
                }
            }
        }
    }
    Ok(format!(
        "{count_checks} composite counts exact, {support_checks} sampler supports exact"
    ))
}

fn las_vegas(stats: &mut SamplingStats) -> Outcome {
    // exercise the equal-order split rejection on primes above the brute-force cutoff
    let forms = [
        form(&[&[1, 0], &[0, 1]]),
        form(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]),
        form(&[&[1, 0, 0], &[0, 3, 0], &[0, 0, 5]]),
        form(&[&[2, 1], &[1, 7]]),
    ];
    let mut rng = RandomSource::from_seed(0x0008);
    for p in [11u64, 13, 17] {
        for k in 1..=2u32 {
            let pp = pp(p, k);
            for qf in &forms {
                let sampler = FormSampler::new(qf, &pp);
                for t in [1u64, 2, 3, p, 2 * p] {
                    for kind in [RepKind::Any, RepKind::Primitive] {
                        for _ in 0..300 {
                            match sampler.sample_with_stats(&BigInt::from(t), kind, &mut rng, stats) {
                                SampleOutcome::Solution(x) => {
                                    if eval_mod(qf, &to_u64s(&x), p.pow(k)) != t % p.pow(k) {
                                        return Err(format!("invalid draw mod {p}^{k}"));
                                    }
                                }
                                SampleOutcome::NoSolution => break,
                                SampleOutcome::Fail => {}
                            }
                        }
                    }
                }
            }
        }
    }
    let bound = 11.0 / 12.0 + 0.05;
    let Some(rate) = stats.split_failure_rate() else {
        return Err("the rejection loop never ran".into());
    };
    let detail = format!(
        "{} driver fails, {} restarts; rejection loop {} trials, failure rate {:.4} (bound {:.4})",
        stats.fails, stats.restarts, stats.split_trials, rate, bound
    );
    if stats.fails == 0 && rate <= bound {
        Ok(detail)
    } else {
        Err(detail)
    }
}
