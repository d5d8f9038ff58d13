//! Acceptance run: one line per criterion, exit status 1 if any fails.
//! Criteria 1-4, 6 and 7 go through the binary so the envelopes are what
//! gets judged; 5 drives the library directly over freshly drawn channels.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use propsign::channels::{
    analyze_channel, apply_channel, invert_channel, random_density, random_nonproportional_pair,
    random_unitary, split_unitary, Verdict,
};

struct Run {
    args: Vec<String>,
    stdout: Vec<u8>,
    code: Option<i32>,
    json: Value,
}

fn propsign(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_propsign"))
        .args(args)
        .output()
        .expect("binary runs");
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    Run {
        args: args.iter().map(|s| s.to_string()).collect(),
        stdout: out.stdout,
        code: out.status.code(),
        json,
    }
}

fn rows<'a>(r: &'a Run, part: Option<&str>) -> Vec<&'a Value> {
    r.json["results"]
        .as_array()
        .map(|a| a.iter().filter(|v| part.is_none_or(|p| v["part"] == p)).collect())
        .unwrap_or_default()
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or(f64::NAN)
}

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, n: u32, title: &str, elapsed: Duration, limit_s: Option<u64>, result: Result<String, String>) {
        let in_time = limit_s.is_none_or(|l| elapsed.as_secs() < l);
        let (ok, detail) = match result {
            Ok(d) if in_time => (true, d),
            Ok(d) => (false, format!("{d}; too slow")),
            Err(d) => (false, d),
        };
        if !ok {
            self.failures += 1;
        }
        println!(
            "criterion {n} [{}] {title}: {detail} ({:.1} s{})",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit_s.map(|l| format!(", limit {l} s")).unwrap_or_default()
        );
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn exit_ok(r: &Run) -> Result<(), String> {
    if r.code == Some(0) {
        Ok(())
    } else {
        Err(format!("`propsign {}` exited with {:?}", r.args.join(" "), r.code))
    }
}

fn free_positivity() -> (Result<String, String>, Run) {
    let r = propsign(&["free-sign", "--param", "n=100"]);
    let res = (|| {
        exit_ok(&r)?;
        let rs = rows(&r, None);
        if rs.len() != 100 {
            return Err(format!("{} functions evaluated", rs.len()));
        }
        let worst = rs.iter().map(|v| num(v, "relative")).fold(f64::INFINITY, f64::min);
        if !(worst >= -1e-9) {
            return Err(format!("minimum relative value {worst:e}"));
        }
        Ok(format!("100 functions, minimum Re/|f|^2 = {worst:.3e}"))
    })();
    (res, r)
}

fn im_indeterminacy() -> (Result<String, String>, Vec<Run>) {
    let mut runs = Vec::new();
    let mut worst_gap: f64 = 0.0;
    let mut err = None;
    for beta in ["0.25", "0.5", "0.9"] {
        let r = propsign(&["im-indeterminate", "--param", &format!("beta={beta}"), "--param", "mass=1"]);
        let check = (|| {
            exit_ok(&r)?;
            let w = rows(&r, None)[0];
            let (p, m) = (num(w, "quadrature_plus"), num(w, "quadrature_minus"));
            let gap = num(w, "discrepancy");
            if !(p < 0.0 && 0.0 < m && p * m < 0.0) {
                return Err(format!("beta {beta}: value_plus {p:e}, value_minus {m:e}"));
            }
            if !(gap <= 1e-3) {
                return Err(format!("beta {beta}: route gap {gap:e}"));
            }
            Ok(gap)
        })();
        match check {
            Ok(g) => worst_gap = worst_gap.max(g),
            Err(e) => err = err.or(Some(e)),
        }
        runs.push(r);
    }
    let res = match err {
        Some(e) => Err(e),
        None => Ok(format!("signs opposite for beta 0.25, 0.5, 0.9; worst route gap {worst_gap:.2e}")),
    };
    (res, runs)
}

fn identities() -> (Result<String, String>, Run) {
    let r = propsign(&["bessel-identities"]);
    let res = (|| {
        exit_ok(&r)?;
        let rs = rows(&r, None);
        let worst = |id: &str| {
            rs.iter().filter(|v| v["identity"] == id).map(|v| num(v, "error")).fold(0.0, f64::max)
        };
        let count = |id: &str| rs.iter().filter(|v| v["identity"] == id).count();
        let light_cone = rs.iter().any(|v| num(v, "dt") == num(v, "x"));
        let (a, b) = (worst("gr_3876_1"), worst("gr_6677_6"));
        if count("gr_3876_1") != 125 || count("gr_6677_6") != 125 {
            return Err("lattice is not 125 points".into());
        }
        if !light_cone {
            return Err("lattice misses the light cone".into());
        }
        if !(a <= 1e-5 && b <= 1e-8) {
            return Err(format!("worst errors {a:e} and {b:e}"));
        }
        Ok(format!("125 points, worst errors {a:.2e} (3.876.1) and {b:.2e} (6.677.6)"))
    })();
    (res, r)
}

fn covariant_map() -> (Result<String, String>, Run) {
    let r = propsign(&["covmap"]);
    let res = (|| {
        exit_ok(&r)?;
        let rs = rows(&r, None);
        let get = |check: &'static str| rs.iter().filter(move |v| v["check"] == check);
        let worst = |check: &'static str| get(check).map(|v| num(v, "error")).fold(0.0, f64::max);
        let round = worst("roundtrip");
        let decomp = worst("decomposition");
        let route = worst("route_gap");
        let purity = get("purity_rate").next().ok_or("no purity row")?;
        let purity_rel = num(purity, "error") / num(purity, "reference").abs();
        let w_min = get("witness_min").next().map(|v| num(v, "value")).ok_or("no witness row")?;
        if !(round <= 1e-12 && decomp <= 1e-9 && purity_rel <= 1e-4 && route <= 1e-6 && w_min < 0.0) {
            return Err(format!(
                "roundtrip {round:e}, decomposition {decomp:e}, purity {purity_rel:e}, routes {route:e}, min w {w_min}"
            ));
        }
        Ok(format!(
            "roundtrip {round:.1e}, decomposition {decomp:.1e}, purity rate rel {purity_rel:.1e}, min(w+, w-) = {w_min:.4}, route gap {route:.1e}"
        ))
    })();
    (res, r)
}

fn kraus() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_u: f64 = 0.0;
    let mut worst_rt: f64 = 0.0;
    let mut false_verdicts = 0;
    for _ in 0..50 {
        let d = rng.random_range(2..=4);
        let u = random_unitary(d, &mut rng);
        let pieces = rng.random_range(2..=4);
        let k = split_unitary(&u, pieces, &mut rng).map_err(|e| e.to_string())?;
        let rep = analyze_channel(&k, 2 * d * d, &mut rng).map_err(|e| e.to_string())?;
        if rep.verdict != Verdict::InvertibleUnitary {
            false_verdicts += 1;
            continue;
        }
        worst_u = worst_u.max(rep.unitary_deviation.unwrap_or(f64::INFINITY));
        let inv = invert_channel(&k, 2 * d * d, &mut rng).map_err(|e| e.to_string())?;
        for _ in 0..5 {
            let rho = random_density(d, &mut rng);
            let back = apply_channel(&inv, &apply_channel(&k, &rho).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            worst_rt = worst_rt.max(back.max_distance(&rho));
        }
    }
    for _ in 0..50 {
        let d = rng.random_range(2..=4);
        let k = random_nonproportional_pair(d, &mut rng).map_err(|e| e.to_string())?;
        let rep = analyze_channel(&k, 2 * d * d, &mut rng).map_err(|e| e.to_string())?;
        if rep.verdict != Verdict::NotInvertible {
            false_verdicts += 1;
        }
    }
    if false_verdicts > 0 || !(worst_u <= 1e-9 && worst_rt <= 1e-9) {
        return Err(format!(
            "{false_verdicts} false verdicts, max|U^dag U - 1| {worst_u:e}, round trip {worst_rt:e}"
        ));
    }
    Ok(format!(
        "50 unitary + 50 non-proportional, no false verdicts, max|U^dag U - 1| {worst_u:.1e}, round trip {worst_rt:.1e}"
    ))
}

fn rwa_exactness(r: &Run) -> Result<String, String> {
    exit_ok(r)?;
    let rs = rows(r, Some("oracle"));
    if rs.len() != 10 {
        return Err(format!("{} oracle rows", rs.len()));
    }
    let err = rs.iter().map(|v| num(v, "error")).fold(0.0, f64::max);
    let leak = rs.iter().map(|v| num(v, "leakage")).fold(0.0, f64::max);
    if !(err <= 1e-4 && leak <= 1e-8) {
        return Err(format!("worst relative error {err:e}, leakage {leak:e}"));
    }
    Ok(format!("10 queries at n_max = 12, worst relative error {err:.1e}, leakage {leak:.1e}"))
}

fn rwa_positivity(r: &Run) -> Result<String, String> {
    exit_ok(r)?;
    let sweep = rows(r, Some("sweep"));
    let violations = sweep.iter().filter(|v| !(num(v, "value") >= 0.0)).count();
    let laplace = rows(r, Some("laplace"));
    let lap_err = laplace.iter().map(|v| num(v, "error")).fold(0.0, f64::max);
    let func = rows(r, Some("functional"));
    let func_min = func.iter().map(|v| num(v, "value")).fold(f64::INFINITY, f64::min);
    let func_ok = func.iter().all(|v| num(v, "value") >= -1e-9 * num(v, "value").abs());
    if sweep.len() != 10_000 || violations > 0 {
        return Err(format!("{violations} violations in {} sweep points", sweep.len()));
    }
    if laplace.len() != 18 || !(lap_err <= 1e-5) {
        return Err(format!("{} laplace rows, worst error {lap_err:e}", laplace.len()));
    }
    if func.len() != 10 || !func_ok {
        return Err(format!("{} functional rows, minimum {func_min:e}", func.len()));
    }
    Ok(format!(
        "10^4 points without violation, laplace gap {lap_err:.1e} on 9 points x 2 sectors, functional min {func_min:.3e}"
    ))
}

fn main() -> ExitCode {
    let mut report = Report { failures: 0 };
    let mut first_runs: Vec<Run> = Vec::new();

    let ((res, run), t) = timed(free_positivity);
    report.line(1, "free propagator positivity", t, Some(60), res);
    first_runs.push(run);

    let ((res, runs), t) = timed(im_indeterminacy);
    report.line(2, "indeterminate sign of Im", t, Some(120), res);
    first_runs.extend(runs);

    let ((res, run), t) = timed(identities);
    report.line(3, "tabulated integral identities", t, Some(60), res);
    first_runs.push(run);

    let ((res, run), t) = timed(covariant_map);
    report.line(4, "covariant dephasing map", t, Some(30), res);
    first_runs.push(run);

    let (res, t) = timed(kraus);
    report.line(5, "Kraus invertibility", t, Some(60), res);

    // criteria 6 and 7 read disjoint parts of one rwa run
    let (run, t_rwa) = timed(|| propsign(&["rwa"]));
    let (res6, t6) = timed(|| rwa_exactness(&run));
    let (res7, t7) = timed(|| rwa_positivity(&run));
    report.line(6, "RWA two-time averages vs truncated Lindblad", t_rwa + t6, Some(120), res6);
    report.line(7, "RWA positivity", t_rwa + t7, Some(180), res7);
    first_runs.push(run);

    let (res, t) = timed(|| {
        let mut differing = Vec::new();
        for r in &first_runs {
            let args: Vec<&str> = r.args.iter().map(|s| s.as_str()).collect();
            if propsign(&args).stdout != r.stdout || r.json.is_null() {
                differing.push(r.args.join(" "));
            }
        }
        if differing.is_empty() {
            Ok(format!("{} commands rerun, JSON byte-identical", first_runs.len()))
        } else {
            Err(format!("output changed for: {}", differing.join("; ")))
        }
    });
    report.line(8, "determinism", t, None, res);

    if report.failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", report.failures);
        ExitCode::FAILURE
    }
}
