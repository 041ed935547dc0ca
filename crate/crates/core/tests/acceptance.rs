//! Full acceptance run: `verify all --seed 1` twice through the binary, then
//! one PASS/FAIL line per criterion. Runs without the libtest harness so the
//! lines are never captured. Thresholds are restated here so a
//! loosened default tolerance in the runner cannot make this test pass.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::Command;

use modschatten::bench::{Record, Report};
use serde_json::Value;

fn verify_all(out: &Path) -> (Report, Vec<u8>, Value) {
    let o = Command::new(env!("CARGO_BIN_EXE_modschatten"))
        .args(["verify", "all", "--seed", "1", "--out"])
        .arg(out)
        .output()
        .unwrap();
    assert!(
        o.status.code().is_some_and(|c| c <= 1),
        "verify errored: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    let json = std::fs::read(out.join("report.json")).unwrap();
    let report = Report::from_json(std::str::from_utf8(&json).unwrap()).unwrap();
    let timing = serde_json::from_str(&std::fs::read_to_string(out.join("timing.json")).unwrap()).unwrap();
    (report, json, timing)
}

enum Bound {
    /// Stored lhs is an error; it must not exceed the tolerance.
    Small(f64),
    /// lhs <= rhs (1 + slack).
    Le(f64),
    /// lhs / rhs <= factor.
    Within(f64),
}

struct Check<'a> {
    report: &'a Report,
    notes: Vec<String>,
    ok: bool,
}

impl<'a> Check<'a> {
    fn new(report: &'a Report) -> Self {
        Check {
            report,
            notes: Vec::new(),
            ok: true,
        }
    }

    fn records(&self, check: &str) -> Vec<&'a Record> {
        self.report.records.iter().filter(|r| r.measurement.check == check).collect()
    }

    fn require(&mut self, cond: bool, what: impl Into<String>) {
        if !cond {
            self.ok = false;
            self.notes.push(format!("violated: {}", what.into()));
        }
    }

    /// Every record of `check` satisfies `bound`, and there are at least `min` of them.
    fn bounded(&mut self, check: &str, min: usize, bound: Bound) -> Vec<&'a Record> {
        let recs = self.records(check);
        let mut worst = 0.0f64;
        let mut bad = 0;
        for r in &recs {
            let m = &r.measurement;
            let (value, limit) = match bound {
                Bound::Small(tol) => (m.lhs, tol),
                Bound::Le(slack) => (if m.lhs == 0.0 { 0.0 } else { m.lhs / m.rhs }, 1.0 + slack),
                Bound::Within(f) => (m.lhs / m.rhs, f),
            };
            if !(value <= limit) {
                bad += 1;
            }
            worst = worst.max(value / limit);
        }
        self.require(recs.len() >= min, format!("{check}: {} records, need {min}", recs.len()));
        self.require(bad == 0, format!("{check}: {bad} records out of bounds"));
        self.notes.push(format!("{check} n={} worst/limit={worst:.3e}", recs.len()));
        recs
    }

    fn line(&self, n: usize, title: &str) -> bool {
        println!(
            "criterion {n:>2} {}: {title}; {}",
            if self.ok { "PASS" } else { "FAIL" },
            self.notes.join("; ")
        );
        self.ok
    }
}

fn param<'a>(r: &'a Record, key: &str) -> &'a Value {
    &r.inputs.params[key]
}

fn as_key(v: &Value) -> String {
    v.to_string()
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let (report, first, timing) = verify_all(&dir.path().join("a"));
    let (_, second, _) = verify_all(&dir.path().join("b"));
    let mut results = Vec::new();

    // 1. Factorization exactness and norm law.
    let mut c = Check::new(&report);
    let split = c.bounded("factorization-product", 1000, Bound::Small(1e-12));
    c.bounded("factorization-norm-law", 1000, Bound::Small(1e-10));
    c.bounded("factorization-multcont", 1000, Bound::Le(1e-10));
    let p0s: BTreeSet<String> = split.iter().map(|r| as_key(param(r, "p0"))).collect();
    c.require(p0s.len() == 3, format!("p0 values {p0s:?}"));
    let max_n = split
        .iter()
        .map(|r| param(r, "shape").as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).product::<u64>())
        .max()
        .unwrap_or(0);
    c.require(max_n <= 64, format!("matrix size {max_n} > 64"));
    results.push(c.line(1, "factorization exactness and norm law"));

    // 2. Hilbert-Schmidt identification.
    let mut c = Check::new(&report);
    c.bounded("hilbert-schmidt", 200, Bound::Small(1e-10));
    results.push(c.line(2, "Hilbert-Schmidt norm equals the U2 norm"));

    // 3. Schatten embedding for p <= 2, counterexample beyond 2.
    let mut c = Check::new(&report);
    let emb = c.bounded("schatten-embedding", 1000, Bound::Le(1e-10));
    let mut per_p: BTreeMap<String, usize> = BTreeMap::new();
    let mut kinds = BTreeSet::new();
    for r in &emb {
        *per_p.entry(as_key(param(r, "p"))).or_default() += 1;
        for w in ["w1", "w2"] {
            kinds.insert(as_key(&param(r, w)["kind"]));
        }
    }
    c.require(per_p.len() == 5 && per_p.values().all(|&k| k >= 200), format!("per-p counts {per_p:?}"));
    c.require(kinds.iter().any(|k| k.contains("poly")) && kinds.iter().any(|k| k.contains("exp")), format!("weight kinds {kinds:?}"));
    let probe = c.records("schatten-probe");
    let worst = probe.iter().map(|r| r.measurement.lhs / r.measurement.rhs).fold(0.0, f64::max);
    c.require(worst > 1.0, "p > 2 probe found no ratio above 1");
    c.notes.push(format!("p>2 probe max ratio={worst:.3} (informational)"));
    results.push(c.line(3, "Schatten embedding"));

    // 4. Matrix continuity.
    let mut c = Check::new(&report);
    let cont = c.bounded("matrix-continuity", 2000, Bound::Le(1e-10));
    let mut per_tuple: BTreeMap<String, usize> = BTreeMap::new();
    for r in &cont {
        *per_tuple.entry(as_key(param(r, "tuple"))).or_default() += 1;
    }
    let pq: BTreeSet<(String, String)> = cont
        .iter()
        .map(|r| (as_key(&param(r, "tuple")["p"]), as_key(&param(r, "tuple")["q"])))
        .collect();
    c.require(per_tuple.len() >= 10, format!("{} tuples", per_tuple.len()));
    c.require(per_tuple.values().all(|&k| k >= 200), "fewer than 200 pairs for some tuple");
    c.require(pq.contains(&("\"inf\"".into(), "1.0".into())), "(p,q)=(inf,1) missing");
    c.require(pq.contains(&("1.0".into(), "1.0".into())), "(p,q)=(1,1) missing");
    c.require(pq.iter().any(|(_, q)| q.parse::<f64>().is_ok_and(|q| q > 1.0) || q == "\"inf\""), "no q > 1 tuple");
    c.notes.push(format!("{} tuples", per_tuple.len()));
    results.push(c.line(4, "matrix continuity"));

    // 5. Gabor reconstruction.
    let mut c = Check::new(&report);
    for check in ["reconstruction-dual-synthesis", "reconstruction-dual-analysis"] {
        let recs = c.bounded(check, 150, Bound::Small(1e-8));
        let configs: BTreeSet<(u64, u64, u64)> = recs
            .iter()
            .map(|r| (param(r, "n").as_u64().unwrap(), param(r, "a").as_u64().unwrap(), param(r, "b").as_u64().unwrap()))
            .collect();
        c.require(configs.contains(&(64, 4, 4)) && configs.contains(&(128, 8, 8)), format!("configs {configs:?}"));
        c.require(configs.iter().all(|&(n, a, b)| a * b < n), "a*b >= N");
    }
    c.bounded("frame-commutation", 1, Bound::Small(1e-10));
    results.push(c.line(5, "Gabor reconstruction"));

    // 6. Operator factorization.
    let mut c = Check::new(&report);
    c.bounded("op-factorization", 400, Bound::Small(1e-6));
    c.bounded("op-identity", 20, Bound::Small(1e-8));
    results.push(c.line(6, "operator factorization through the Gabor matrix"));

    // 7. Rank-one, covariance and involution identities.
    let mut c = Check::new(&report);
    let ro = c.bounded("rank-one", 4, Bound::Small(1e-10));
    let ts: BTreeSet<String> = ro.iter().flat_map(|r| param(r, "ts").as_array().unwrap().iter().map(as_key)).collect();
    c.require(["0.0", "0.25", "0.5", "1.0"].iter().all(|t| ts.contains(*t)), format!("t values {ts:?}"));
    c.bounded("calculus-covariance", 1, Bound::Small(1e-12));
    let inv = c.bounded("symplectic-involution", 1, Bound::Small(1e-12));
    c.require(inv.iter().all(|r| param(r, "n").as_u64() == Some(63)), "involution not at N=63");
    results.push(c.line(7, "rank-one, covariance and involution identities"));

    // 8. Wigner convolution identity and norm stability.
    let mut c = Check::new(&report);
    c.bounded("convolution-identity", 10, Bound::Small(1e-8));
    c.bounded("convolution-norm-stability", 1, Bound::Within(2.0));
    results.push(c.line(8, "Wigner convolution identity"));

    // 9. Empirical constants stay within a factor 4 across sizes.
    let mut c = Check::new(&report);
    for name in ["op-continuity", "op-schatten", "wigner-bound", "window-bound"] {
        let stab = c.bounded(&format!("{name}-stability"), 1, Bound::Within(4.0));
        let constants = c.records(&format!("{name}-constant")).len();
        c.require(constants >= 3 * stab.len(), format!("{name}: constants logged at fewer than 3 sizes"));
    }
    results.push(c.line(9, "empirical-constant stability"));

    // 10. Determinism.
    let same = first == second;
    println!(
        "criterion 10 {}: two `verify all --seed 1` runs give identical reports ({} bytes)",
        if same { "PASS" } else { "FAIL" },
        first.len()
    );
    results.push(same);

    for t in timing.as_array().unwrap() {
        println!("suite {} ran in {:.1}s", t["suite"].as_str().unwrap(), t["seconds"].as_f64().unwrap());
    }
    assert!(report.errors.is_empty(), "{:#?}", report.errors);
    assert!(report.pass);
    assert!(results.iter().all(|&x| x), "acceptance failures: {results:?}");
}
