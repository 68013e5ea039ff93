//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! With `HCLAB_ACCEPTANCE_EMIT=<dir>` set, the binary only writes its CSV
//! artifacts to `<dir>`; criterion 9 uses this to obtain a second,
//! independent run.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;

use hclab_core::criterion::{
    ball_condition_search, check_hc_criterion, check_prop4, doubling_search, fan_error, rolewicz_instance,
    theorem2_witness, BallSearchOutcome, CriterionWitness, IndexChain, OrbitPoint, Prop4Bounds, HC_FORWARD,
    HC_IDENTITY, HC_INVERSE,
};
use hclab_core::operator::{apply_matrix, build_dense_matrix, relative_error, ExpansionTable};
use hclab_core::report;
use hclab_core::schedule::{
    build_schedule, compact_schedule, layoff_coefficient, Block, FanOrigin, FanSpec, IntervalSchedule, LayoffSpec,
    ScheduleParams,
};
use hclab_core::{LabError, Polynomial, SpaceNorm, SparseVector};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lab<T>(r: Result<T, LabError>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        (a - b).abs() / b.abs()
    }
}

fn default_table() -> ExpansionTable {
    ExpansionTable::new(build_schedule(&ScheduleParams::default()).expect("default schedule"))
}

/// Lay-offs of lengths 4, 16, 64 and 4096 separated by three fans.
fn layoff_ladder() -> IntervalSchedule {
    let lay = |start: u64, len: u64| Block::Layoff(LayoffSpec { start: start.into(), length: len.into() });
    let fan = |n: usize, c: u64, nu: u64| {
        Block::Fan(FanSpec {
            n,
            c: c.into(),
            nu: nu.into(),
            gamma: ScheduleParams::gamma(n),
            p: Polynomial::constant(1.0),
            origin: FanOrigin::BaseGrid,
        })
    };
    IntervalSchedule::from_blocks(vec![
        Block::Origin,
        lay(1, 4),
        fan(1, 5, 0),
        lay(6, 16),
        fan(2, 22, 5),
        lay(28, 64),
        fan(3, 92, 27),
        lay(120, 4096),
    ])
    .expect("ladder schedule")
}

fn criterion1() -> Check {
    let table = ExpansionTable::new(layoff_ladder());
    let mut count = 0usize;
    let mut worst = 0.0f64;
    for l in table.schedule().layoffs() {
        let len: u64 = l.length.to_string().parse().unwrap();
        let nu: u64 = l.nu().to_string().parse().unwrap();
        for j in nu + 1..=nu + len {
            let jj = BigUint::from(j);
            let formula = lab(layoff_coefficient(&l.length, &l.nu(), &jj))?;
            // direct evaluation of 2^{-(l/2 + nu + 1 - j)/sqrt(l)}
            let direct = (-((len as f64) / 2.0 + nu as f64 + 1.0 - j as f64) / (len as f64).sqrt()).exp2();
            worst = worst.max(rel(formula, direct));
            let v = lab(table.expand_e(&jj))?;
            for space in SpaceNorm::ALL {
                let got = lab(table.orbit_norm(&jj, space))?;
                worst = worst.max(rel(got, formula)).max(rel(v.norm(space), formula));
            }
            count += 1;
        }
        let mid = &l.nu() + 1u32 + (&l.length >> 1u32);
        let log2 = lab(table.layoff_log2_norm(&mid))?.expect("midpoint is in the lay-off");
        ensure(log2 == 0.0, || format!("midpoint of length {len} has log2 norm {log2}"))?;
    }
    ensure(worst <= 1e-12, || format!("worst relative error {worst:e}"))?;
    Ok(format!("{count} indices, worst relative error {worst:.1e}, midpoints exactly 1"))
}

fn criterion2() -> Check {
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    for schedule in [compact_schedule(), lab(IntervalSchedule::layoff_only(2047))?] {
        let total: usize = schedule.total_length().to_string().parse().unwrap();
        let table = ExpansionTable::new(schedule.clone());
        let t = lab(build_dense_matrix(schedule, total + 1))?;
        let mut v = SparseVector::single(0u8, 1.0);
        for j in 0..=total {
            if j > 0 {
                v = lab(apply_matrix(&t, &v))?;
            }
            let e = lab(table.expand_e_u64(j as u64))?;
            let r = relative_error(&v, &e, SpaceNorm::L1);
            ensure(r <= 1e-9, || format!("j = {j}: relative error {r:e}"))?;
            worst = worst.max(r);
            checked += 1;
        }
    }
    Ok(format!("{checked} orbit vectors, worst relative error {worst:.1e}"))
}

fn criterion3() -> Check {
    let table = ExpansionTable::new(lab(build_schedule(&ScheduleParams::with_fans(6)))?);
    ensure(table.schedule().num_fans() == 6, || "schedule does not have 6 fans".into())?;
    for fan in table.schedule().fans() {
        let expected = 2f64.powi(-(fan.n as i32));
        for space in SpaceNorm::ALL {
            let got = lab(fan_error(&table, fan.n, &fan.p, space))?;
            ensure(rel(got, expected) <= 1e-12, || format!("fan {} in {space}: {got} vs {expected}", fan.n))?;
        }
    }
    Ok("fan_error(n, p_n) = 2^-n for n = 1..6 in l1, l2, sup".into())
}

fn scaled_quadratic() -> Polynomial {
    let p = Polynomial::from_coeffs(&[1.0, -3.0, 0.5]);
    p.scaled(4.0 / p.modulus())
}

fn verify_chain(table: &ExpansionTable, chain: &IndexChain, p: &Polynomial, eps: f64) -> Result<(), String> {
    let j = chain.j as i32;
    ensure(p.modulus() <= 2f64.powi(j) && (j == 0 || p.modulus() > 2f64.powi(j - 1)), || {
        format!("j = {j} is not minimal for |p| = {}", p.modulus())
    })?;
    ensure(chain.steps.len() == chain.j as usize + 1, || format!("{} steps for j = {j}", chain.steps.len()))?;
    for (idx, step) in chain.steps.iter().enumerate() {
        let m = idx as i32 + 1;
        let budget = eps * 2f64.powi(-2 * (j - m + 1));
        let target = p.scaled(2f64.powi(-(j - m + 1)));
        let direct = lab(fan_error(table, step.fan, &target, SpaceNorm::L1))?;
        ensure(direct < budget * (1.0 + 1e-12), || format!("step {m}: error {direct} over budget {budget}"))?;
        ensure(rel(direct, step.error) <= 1e-12, || format!("step {m}: recorded {} vs {direct}", step.error))?;
        if idx > 0 {
            let prev = &chain.steps[idx - 1];
            ensure(step.fan > prev.fan, || "fan indices not increasing".into())?;
            let fan = table.schedule().fan(step.fan).unwrap();
            ensure(fan.p == Polynomial::monomial(2.0, prev.c.clone()), || format!("fan {} does not double", step.fan))?;
        }
    }
    let last = chain.steps.last().unwrap().fan;
    let direct = lab(fan_error(table, last, p, SpaceNorm::L1))?;
    ensure(direct < eps, || format!("final error {direct} not below {eps}"))?;
    ensure(rel(direct, chain.final_error) <= 1e-12, || "final error not reproduced".into())?;
    Ok(())
}

fn doubling_cases() -> Result<Vec<(String, f64, IndexChain)>, String> {
    let table = default_table();
    let q = scaled_quadratic();
    let params = ScheduleParams { requests: vec![q.scaled(0.25)], ..ScheduleParams::default() };
    let q_table = ExpansionTable::new(lab(build_schedule(&params))?);
    let mut out = Vec::new();
    for eps in [1.0, 0.25] {
        for c in [1.0, 2.0, 4.0, 16.0] {
            let p = Polynomial::constant(c);
            let chain = lab(doubling_search(&table, &p, eps, SpaceNorm::L1))?;
            verify_chain(&table, &chain, &p, eps).map_err(|e| format!("p = {c}, eps = {eps}: {e}"))?;
            out.push((format!("{c}"), eps, chain));
        }
        let chain = lab(doubling_search(&q_table, &q, eps, SpaceNorm::L1))?;
        verify_chain(&q_table, &chain, &q, eps).map_err(|e| format!("scaled quadratic, eps = {eps}: {e}"))?;
        out.push(("quadratic".into(), eps, chain));
    }
    Ok(out)
}

fn criterion4() -> Check {
    let cases = doubling_cases()?;
    let longest = cases.iter().map(|c| c.2.steps.len()).max().unwrap_or(0);
    Ok(format!("{} chains verified, longest has {longest} steps", cases.len()))
}

fn witness(k: u32) -> Result<CriterionWitness, String> {
    lab(theorem2_witness(&default_table(), k, SpaceNorm::L1))
}

fn criterion5() -> Check {
    let w = witness(3)?;
    ensure(w.rows.len() == 3, || "witness too short".into())?;
    for r in &w.rows {
        let half = 2f64.powi(-(r.k as i32));
        ensure(r.w.norm(SpaceNorm::L1) <= half, || format!("k = {}: ||w_k|| = {}", r.k, r.norm_w))?;
        ensure(r.norm_q_e0 <= half, || format!("k = {}: ||q_k(T)e0|| = {}", r.k, r.norm_q_e0))?;
        ensure(r.norm_residual < half * half, || format!("k = {}: residual {}", r.k, r.norm_residual))?;
        ensure(r.fan_error < 1.0, || format!("k = {}: fan error {}", r.k, r.fan_error))?;
    }
    let report = check_prop4(&w, &Prop4Bounds::default());
    ensure(report.passed(), || format!("check_prop4 failed: {:?}", report.failed_conditions()))?;
    let last = w.rows.last().unwrap();
    Ok(format!("n_k = {:?}, residual at k = 3 is {:.3e}", ns(&w), last.norm_residual))
}

fn ns(w: &CriterionWitness) -> Vec<usize> {
    w.rows.iter().map(|r| r.n_k).collect()
}

fn criterion6() -> Check {
    let g0 = ScheduleParams::default().g0 as f64;
    let w = witness(3)?;
    let mut worst = 0.0f64;
    for r in &w.rows {
        let scale = 2f64.powi(r.k as i32);
        let dev = (r.norm_w * scale - 1.0).abs();
        let bound = std::f64::consts::LN_2 / scale / (2.0 * g0.sqrt());
        ensure(dev <= bound, || format!("k = {}: deviation {dev:e} over {bound:e}", r.k))?;
        worst = worst.max(dev / bound);
    }
    Ok(format!("largest deviation is {worst:.2e} of the bound"))
}

fn criterion7() -> Check {
    let inst = lab(rolewicz_instance(12, 8, false))?;
    let report = lab(check_hc_criterion(&inst, 0.01))?;
    ensure(report.passed(), || "Rolewicz instance failed".into())?;
    for r in report.rows_for(HC_FORWARD).filter(|r| r.k > 1) {
        ensure(r.max_norm == 0.0, || format!("(i) at k = {}: {}", r.k, r.max_norm))?;
    }
    for r in report.rows_for(HC_INVERSE) {
        // max over {f0, f0 + f1}: ||y|| = 2
        let expected = 2.0 * 2f64.powi(-(r.k as i32));
        ensure(r.max_norm == expected, || format!("(ii) at k = {}: {}", r.k, r.max_norm))?;
    }
    for r in report.rows_for(HC_IDENTITY) {
        ensure(r.max_norm == 0.0, || format!("(iii) at k = {}: {}", r.k, r.max_norm))?;
    }
    let broken = lab(check_hc_criterion(&lab(rolewicz_instance(12, 8, true))?, 0.01))?;
    ensure(!broken.passed(), || "broken instance passed".into())?;
    ensure(broken.failed_conditions().contains(&HC_INVERSE), || "broken instance passed (ii)".into())?;
    Ok(format!("exact values; broken instance fails {:?}", broken.failed_conditions()))
}

fn criterion8(budget: &mut Duration) -> Check {
    let table = default_table();
    let w = lab(theorem2_witness(&table, 4, SpaceNorm::L1))?;
    let start = Instant::now();
    let e0 = lab(OrbitPoint::new(&table, Polynomial::constant(1.0)))?;
    let found = lab(ball_condition_search(&table, &e0, &e0, 0.3, 0.3, &w, SpaceNorm::L1))?;
    let cert = found.certificate().ok_or("no certificate for K = 4")?;
    ensure(cert.k == 2, || format!("certificate at k = {}", cert.k))?;
    // independent re-evaluation of the three certificate inequalities
    let pu = lab(table.poly_orbit_vector(&cert.p))?.norm(SpaceNorm::L1);
    let wn = cert.w_prime.norm(SpaceNorm::L1);
    let row = &w.rows[1];
    let image = lab(table.poly_orbit_vector(&Polynomial::monomial(1.0 / 16.0, row.c_k.clone())))?;
    let res = (&image - &e0.vector).norm(SpaceNorm::L1);
    ensure(pu < 0.3 && wn < 0.3 && res < 0.3, || format!("certificate does not verify: {pu} {wn} {res}"))?;
    let empty = CriterionWitness { space: SpaceNorm::L1, rows: vec![] };
    let none = lab(ball_condition_search(&table, &e0, &e0, 0.3, 0.3, &empty, SpaceNorm::L1))?;
    ensure(none == BallSearchOutcome::NotFound, || "empty witness found a certificate".into())?;
    *budget = start.elapsed();
    Ok(format!("certificate at k = 2 (||p(T)u|| = {pu:.4}, ||w'|| = {wn:.4}, residual = {res:.2e})"))
}

fn artifacts() -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    out.push(("schedule6.txt".into(), lab(build_schedule(&ScheduleParams::with_fans(6)))?.dump()));
    for (i, (p, eps, chain)) in doubling_cases()?.iter().enumerate() {
        out.push((format!("chain{i:02}_{p}_{eps}.csv"), report::chain_csv(chain)));
    }
    let w = witness(3)?;
    out.push(("witness3.csv".into(), report::witness_csv(&w)));
    out.push(("prop4.csv".into(), report::check_report_csv(&check_prop4(&w, &Prop4Bounds::default()))));
    for broken in [false, true] {
        let rep = lab(check_hc_criterion(&lab(rolewicz_instance(12, 8, broken))?, 0.01))?;
        out.push((format!("hc_{}.csv", rep.check.replace(':', "_")), report::check_report_csv(&rep)));
    }
    Ok(out)
}

fn write_artifacts(dir: &Path) -> Result<Vec<String>, String> {
    std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    let mut names = Vec::new();
    for (name, text) in artifacts()? {
        std::fs::write(dir.join(&name), text).map_err(|e| e.to_string())?;
        names.push(name);
    }
    Ok(names)
}

fn criterion9() -> Check {
    let root = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    let (first, second) = (root.join("run1"), root.join("run2"));
    for d in [&first, &second] {
        let _ = std::fs::remove_dir_all(d);
    }
    let names = write_artifacts(&first)?;
    let exe = std::env::current_exe().map_err(|e| e.to_string())?;
    let status = Command::new(exe)
        .env("HCLAB_ACCEPTANCE_EMIT", &second)
        .status()
        .map_err(|e| e.to_string())?;
    ensure(status.success(), || format!("second run exited with {status}"))?;
    let mut bytes = 0usize;
    for name in &names {
        let a = std::fs::read(first.join(name)).map_err(|e| e.to_string())?;
        let b = std::fs::read(second.join(name)).map_err(|e| format!("{name}: {e}"))?;
        ensure(a == b, || format!("{name} differs between runs"))?;
        bytes += a.len();
    }
    Ok(format!("{} artifacts ({bytes} bytes) identical across two processes", names.len()))
}

fn main() {
    if let Some(dir) = std::env::var_os("HCLAB_ACCEPTANCE_EMIT") {
        if let Err(e) = write_artifacts(Path::new(&dir)) {
            eprintln!("artifact run failed: {e}");
            std::process::exit(1);
        }
        return;
    }
    let mut failures = 0;
    let mut run = |id: u32, name: &str, limit: Duration, f: &mut dyn FnMut(&mut Duration) -> Check| {
        let start = Instant::now();
        let mut timed = Duration::ZERO;
        let result = f(&mut timed);
        if timed.is_zero() {
            timed = start.elapsed();
        }
        let result = result.and_then(|msg| {
            ensure(timed <= limit, || format!("took {:.2} s, limit {:.0} s", timed.as_secs_f64(), limit.as_secs_f64()))
                .map(|_| msg)
        });
        let (tag, msg) = match result {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failures += 1;
                ("FAIL", m)
            }
        };
        println!("criterion {id}: {tag} {name} ({:.2} s): {msg}", timed.as_secs_f64());
    };
    let secs = Duration::from_secs;
    run(1, "lay-off formula agreement", secs(1), &mut |_| criterion1());
    run(2, "dense and lazy orbits agree", secs(10), &mut |_| criterion2());
    run(3, "fan exactness", secs(1), &mut |_| criterion3());
    run(4, "doubling chains", secs(30), &mut |_| criterion4());
    run(5, "witness bounds", secs(60), &mut |_| criterion5());
    run(6, "midpoint convergence rate", secs(1), &mut |_| criterion6());
    run(7, "criterion harness on the Rolewicz operator", secs(1), &mut |_| criterion7());
    run(8, "ball search certificate", secs(1), &mut criterion8);
    run(9, "deterministic artifacts", secs(120), &mut |_| criterion9());
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
