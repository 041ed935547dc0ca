use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::codec::fmt_f64;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// JSON numbers for finite values, `"inf"`, `"-inf"` or `"nan"` otherwise.
mod float {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(serde::de::Error::custom(format!("bad float `{t}`"))),
            },
        }
    }
}

/// Everything needed to regenerate one experiment instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub suite: String,
    pub kind: String,
    pub seed: u64,
    pub params: serde_json::Value,
}

impl Case {
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(self).expect("case serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// One measured relation. `pass` is `ratio <= bound`; records without a bound are informational.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub check: String,
    /// The relation being certified, e.g. `lhs <= rhs`.
    pub relation: String,
    #[serde(with = "float")]
    pub lhs: f64,
    #[serde(with = "float")]
    pub rhs: f64,
    pub bound: Option<f64>,
}

impl Measurement {
    /// `lhs <= rhs (1 + slack)`.
    pub fn le(check: &str, relation: &str, lhs: f64, rhs: f64, slack: f64) -> Self {
        Measurement {
            check: check.into(),
            relation: relation.into(),
            lhs,
            rhs,
            bound: Some(1.0 + slack),
        }
    }

    /// `error <= tol`.
    pub fn small(check: &str, relation: &str, error: f64, tol: f64) -> Self {
        Measurement {
            check: check.into(),
            relation: relation.into(),
            lhs: error,
            rhs: tol,
            bound: Some(1.0),
        }
    }

    /// `lhs / rhs <= factor`.
    pub fn within(check: &str, relation: &str, lhs: f64, rhs: f64, factor: f64) -> Self {
        Measurement {
            check: check.into(),
            relation: relation.into(),
            lhs,
            rhs,
            bound: Some(factor),
        }
    }

    pub fn info(check: &str, relation: &str, lhs: f64, rhs: f64) -> Self {
        Measurement {
            check: check.into(),
            relation: relation.into(),
            lhs,
            rhs,
            bound: None,
        }
    }

    pub fn ratio(&self) -> f64 {
        if self.lhs == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs
        }
    }

    pub fn pass(&self) -> Option<bool> {
        self.bound.map(|b| self.ratio() <= b)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    /// Hash of the inputs and the position of the measurement within its case.
    pub digest: String,
    pub suite: String,
    #[serde(flatten)]
    pub measurement: Measurement,
    pub item: usize,
    #[serde(with = "float")]
    pub ratio: f64,
    pub pass: Option<bool>,
    pub inputs: Case,
}

impl Record {
    pub fn new(case: &Case, item: usize, m: Measurement) -> Self {
        let digest = hex::encode(Sha256::digest(format!("{}:{}:{item}", case.digest(), m.check).as_bytes()));
        Record {
            digest,
            suite: case.suite.clone(),
            ratio: m.ratio(),
            pass: m.pass(),
            measurement: m,
            item,
            inputs: case.clone(),
        }
    }
}

/// Summary of all records sharing a suite and check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub suite: String,
    pub check: String,
    pub relation: String,
    pub records: usize,
    pub normative: usize,
    pub failures: usize,
    #[serde(with = "float")]
    pub worst_ratio: f64,
    #[serde(with = "float")]
    pub min_ratio: f64,
}

/// Failure of a whole case, e.g. a violated precondition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseError {
    pub digest: String,
    pub inputs: Case,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub seed: u64,
    pub suites: Vec<String>,
    pub pass: bool,
    pub aggregates: Vec<Aggregate>,
    pub errors: Vec<CaseError>,
    pub records: Vec<Record>,
}

impl Report {
    /// Sorts records by digest and derives the aggregates.
    pub fn assemble(seed: u64, suites: Vec<String>, mut records: Vec<Record>, mut errors: Vec<CaseError>) -> Self {
        records.sort_by(|a, b| a.digest.cmp(&b.digest));
        errors.sort_by(|a, b| a.digest.cmp(&b.digest));
        let mut groups: BTreeMap<(String, String), Aggregate> = BTreeMap::new();
        for r in &records {
            let g = groups
                .entry((r.suite.clone(), r.measurement.check.clone()))
                .or_insert_with(|| Aggregate {
                    suite: r.suite.clone(),
                    check: r.measurement.check.clone(),
                    relation: r.measurement.relation.clone(),
                    records: 0,
                    normative: 0,
                    failures: 0,
                    worst_ratio: f64::NEG_INFINITY,
                    min_ratio: f64::INFINITY,
                });
            g.records += 1;
            if let Some(p) = r.pass {
                g.normative += 1;
                if !p {
                    g.failures += 1;
                }
            }
            g.worst_ratio = g.worst_ratio.max(r.ratio);
            g.min_ratio = g.min_ratio.min(r.ratio);
        }
        let aggregates: Vec<Aggregate> = groups.into_values().collect();
        let pass = errors.is_empty() && aggregates.iter().all(|a| a.failures == 0);
        Report {
            schema_version: SCHEMA_VERSION,
            seed,
            suites,
            pass,
            aggregates,
            errors,
            records,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Report = serde_json::from_str(text).map_err(|e| Error::Parse(format!("report: {e}")))?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported report schema {}", r.schema_version)));
        }
        Ok(r)
    }

    /// Per-record table.
    pub fn records_csv(&self) -> String {
        let mut s = format!("# modschatten records schema={SCHEMA_VERSION} seed={}\n", self.seed);
        s.push_str("digest,suite,check,item,lhs,rhs,ratio,bound,pass\n");
        for r in &self.records {
            let m = &r.measurement;
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.digest,
                r.suite,
                m.check,
                r.item,
                fmt_f64(m.lhs),
                fmt_f64(m.rhs),
                fmt_f64(r.ratio),
                m.bound.map(fmt_f64).unwrap_or_default(),
                r.pass.map(|p| p.to_string()).unwrap_or_default()
            ));
        }
        s
    }

    /// Per-check summary table.
    pub fn aggregates_csv(&self) -> String {
        let mut s = format!("# modschatten aggregates schema={SCHEMA_VERSION} seed={}\n", self.seed);
        s.push_str("suite,check,records,normative,failures,worst_ratio,min_ratio\n");
        for a in &self.aggregates {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                a.suite,
                a.check,
                a.records,
                a.normative,
                a.failures,
                fmt_f64(a.worst_ratio),
                fmt_f64(a.min_ratio)
            ));
        }
        s
    }

    /// Writes `report.json`, `records.csv` and `aggregates.csv` into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.to_json())?;
        std::fs::write(dir.join("records.csv"), self.records_csv())?;
        std::fs::write(dir.join("aggregates.csv"), self.aggregates_csv())?;
        Ok(())
    }
}
