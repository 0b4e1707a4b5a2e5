//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use autoexp::experiments::*;
use autoexp::{Budget, Result};
use serde_json::Value;

fn oracle() -> Value {
    serde_json::from_str(include_str!("fixtures/oracle.json")).expect("oracle fixture")
}

fn u64s(v: &Value) -> Vec<u64> {
    v.as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(1.0)
}

fn run(id: u32, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Result<(bool, String)>) -> bool {
    let start = Instant::now();
    let (ok, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let pass = ok && in_time;
    let limit_note = limit.map(|l| format!(", limit {}s", l.as_secs())).unwrap_or_default();
    let late = if in_time { "" } else { " (over time limit)" };
    println!(
        "{} {id:>2} {name}: {detail}{late} [{:.2}s{limit_note}]",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    pass
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn non_increasing(v: &[u64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0])
}

fn main() -> ExitCode {
    let oracle = oracle();
    let secs = Duration::from_secs;
    let mut results = Vec::new();

    results.push(run(1, "complete sum of 1/X is -1 for p <= 499", Some(secs(1)), || {
        let rows = exact_inverse(&ExactInverseConfig::default())?;
        let bad: Vec<u64> = rows.iter().filter(|r| r.value.as_deref() != Some("-1")).map(|r| r.p).collect();
        Ok((bad.is_empty(), format!("{} primes, {} not exactly -1 {bad:?}", rows.len(), bad.len())))
    }));

    results.push(run(2, "Kloosterman sums within 2 sqrt(p)", Some(secs(30)), || {
        let rows = weil_grid(&WeilGridConfig::default())?;
        let over = rows.iter().filter(|r| r.abs > r.bound + 1e-6).count();
        let imag = rows.iter().filter(|r| r.im.abs() >= 1e-9).count();
        let worst = rows.iter().map(|r| r.abs / r.bound).fold(0.0, f64::max);
        Ok((over == 0 && imag == 0, format!("{} cells, {over} over bound, {imag} with |im| >= 1e-9, max |S|/2sqrt(p) = {worst:.6}", rows.len())))
    }));

    results.push(run(3, "local factors agree with the direct formula", None, || {
        let rows = crt_consistency(&CrtConfig::default())?;
        let bad = rows.iter().filter(|r| !r.agree || r.local.is_none()).count();
        Ok((rows.len() == 100 && bad == 0, format!("{} trials, {bad} disagreements", rows.len())))
    }));

    results.push(run(4, "matrix van der Corput inequality", None, || {
        let s = vdc_fuzz(&VdcFuzzConfig::default())?;
        Ok((s.trials == 10_000 && s.failures == 0, format!("{} trials, {} failures, min relative slack {:.3e}", s.trials, s.failures, s.min_relative_slack)))
    }));

    results.push(run(5, "derivative-difference gcd is 1", None, || {
        let reps = gcd_grid(&GcdGridConfig::default())?;
        let violations: usize = reps.iter().map(|r| r.violations.len()).sum();
        let checked: usize = reps.iter().map(|r| r.checked.len()).sum();
        let small: usize = reps.iter().map(|r| r.small_primes.len()).sum();
        Ok((violations == 0 && checked > 0, format!("{} (f, r, l) cases, {checked} prime checks, {violations} violations, {small} at p <= deg f", reps.len())))
    }));

    results.push(run(6, "quadratic incomplete sums under the geometric bound", None, || {
        let rows = quadratic_grid(&QuadraticGridConfig::default())?;
        let bad = rows.iter().filter(|r| !r.holds).count();
        Ok((bad == 0, format!("{} cells, {bad} above comparator", rows.len())))
    }));

    results.push(run(7, "thue_morse_even ratio decreases along q", Some(secs(10)), || {
        let reports = pv_scan(&PvConfig::default())?;
        let mut ok = true;
        let mut notes = Vec::new();
        for (key, rep) in ["0", "1", "10"].iter().zip(&reports) {
            let pinned = oracle["pv"][key].as_array().unwrap();
            for (row, want) in rep.rows.iter().zip(pinned) {
                let w: Vec<f64> = want.as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
                if row.x as f64 != w[2] || !close(row.re, w[3]) || !close(row.im, w[4]) {
                    ok = false;
                    notes.push(format!("q={} differs from fixture", row.q));
                }
            }
            let ratios: Vec<f64> = rep.rows.iter().map(|r| r.ratio).collect();
            let dec = strictly_decreasing(&ratios);
            ok &= dec;
            let fmt: Vec<String> = ratios.iter().map(|r| format!("{r:.4}")).collect();
            notes.push(format!("y={:?}: [{}]{}", rep.meta.y_policy, fmt.join(", "), if dec { "" } else { " not decreasing" }));
        }
        Ok((ok, notes.join("; ")))
    }));

    results.push(run(8, "evil-number congruence counts", Some(secs(60)), || {
        let rows = congruence_scan(&CongruenceConfig::default(), Budget::DEFAULT)?;
        let pinned: Vec<u128> = ["101", "1009", "10007"]
            .iter()
            .map(|q| oracle["congruence"][q]["N"].as_u64().unwrap() as u128)
            .collect();
        let counts: Vec<u128> = rows.iter().map(|r| r.report.count).collect();
        let brute_ok = rows[0].brute == Some(counts[0]) && rows.iter().all(|r| r.brute.is_none_or(|b| b == r.report.count));
        let (e_small, e_large) = (rows[0].report.relative_error.abs(), rows[2].report.relative_error.abs());
        let ok = counts == pinned && brute_ok && e_large < e_small;
        Ok((ok, format!("N = {counts:?}, brute at 101 = {:?}, |rel| {e_small:.3e} -> {e_large:.3e}", rows[0].brute)))
    }));

    results.push(run(9, "carry violations decay in rho", None, || {
        let rows = carry_decay(&CarryConfig::default(), Budget::DEFAULT)?;
        let mut ok = true;
        let mut notes = Vec::new();
        for r in [0u64, 1, 7] {
            let counts: Vec<u64> = rows.iter().filter(|row| row.r == r).map(|row| row.count).collect();
            ok &= counts == u64s(&oracle["carry"][r.to_string()]);
            ok &= non_increasing(&counts) && 2 * counts[4] <= counts[0];
            notes.push(format!("r={r}: {counts:?}"));
        }
        Ok((ok, notes.join("; ")))
    }));

    results.push(run(10, "block_11 sync failures decay in lambda", None, || {
        let counts: Vec<u64> = sync_decay(&SyncConfig::default())?.iter().map(|r| r.count).collect();
        let ok = counts == u64s(&oracle["sync11"]) && non_increasing(&counts) && 4 * counts[8] < counts[0];
        Ok((ok, format!("{counts:?}")))
    }));

    results.push(run(11, "Weyl stages reconstruct S0 exactly", None, || {
        let rows = weyl_grid(&WeylGridConfig::default())?;
        let bad = rows.iter().filter(|r| !(r.exact && r.identities && r.matches_direct)).count();
        Ok((rows.len() == 20 && bad == 0, format!("{} configurations, {bad} with a stage mismatch", rows.len())))
    }));

    results.push(run(12, "convolution algebra", None, || {
        let s = convolution_algebra(&AlgebraConfig::default())?;
        let fails = s.commutativity_failures + s.associativity_failures + s.mass_failures;
        Ok((s.instances == 200 && fails == 0, format!("{} instances, {fails} failures", s.instances)))
    }));

    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
