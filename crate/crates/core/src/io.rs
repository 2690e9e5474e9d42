//! JSON instance documents and CSV path traces.
//!
//! Every Puiseux scalar is stored as a list of `[exp_num, exp_den,
//! coeff_num, coeff_den]` quadruples, one per monomial. Rows are either
//! `"le"` (`a·x ≤ b`, slack name optional) or `"eq"` (`a·x + slack = b`).

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::counterexample::{CexParams, LpInstance, TropPathPoint};
use crate::numeric::{log_map, PathSample};
use crate::puiseux::{PuiseuxMatrix, PuiseuxPoly};
use crate::tropical::TropScalar;
use crate::Rational;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("unsupported format_version {0}")]
    Version(u32),
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("duplicate name {0:?}")]
    DuplicateName(String),
    #[error("row {0} is an equality without a slack variable")]
    MissingSlack(usize),
    #[error("zero denominator in a scalar")]
    ZeroDenominator,
    #[error("value does not fit a 64-bit integer: {0}")]
    Overflow(BigInt),
    #[error("unknown family kind {0:?}")]
    UnknownFamily(String),
    #[error("column {0:?} not found")]
    MissingColumn(String),
    #[error("empty trace")]
    Empty,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Puiseux(#[from] crate::puiseux::PuiseuxError),
    #[error(transparent)]
    Numeric(#[from] crate::numeric::NumericError),
}

/// One monomial: `[exp_num, exp_den, coeff_num, coeff_den]`.
pub type Quad = [i64; 4];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyTag {
    pub kind: String,
    pub r: u32,
    #[serde(default)]
    pub extended: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKindDoc {
    Le,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack: Option<String>,
    pub kind: RowKindDoc,
    pub coeffs: BTreeMap<String, Vec<Quad>>,
    #[serde(default)]
    pub rhs: Vec<Quad>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpDocument {
    pub format_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyTag>,
    pub variables: Vec<String>,
    pub rows: Vec<RowDoc>,
    #[serde(default)]
    pub objective: BTreeMap<String, Vec<Quad>>,
}

fn to_i64(v: &BigInt) -> Result<i64, FormatError> {
    v.to_i64().ok_or_else(|| FormatError::Overflow(v.clone()))
}

pub fn poly_to_quads(f: &PuiseuxPoly) -> Result<Vec<Quad>, FormatError> {
    f.terms()
        .iter()
        .map(|(e, c)| Ok([to_i64(e.numer())?, to_i64(e.denom())?, to_i64(c.numer())?, to_i64(c.denom())?]))
        .collect()
}

pub fn quads_to_poly(q: &[Quad]) -> Result<PuiseuxPoly, FormatError> {
    if q.iter().any(|[_, ed, _, cd]| *ed == 0 || *cd == 0) {
        return Err(FormatError::ZeroDenominator);
    }
    Ok(PuiseuxPoly::from_terms(
        q.iter().map(|[en, ed, cn, cd]| (Rational::new((*en).into(), (*ed).into()), Rational::new((*cn).into(), (*cd).into()))),
    ))
}

impl LpDocument {
    pub fn from_instance(lp: &LpInstance, name: Option<String>) -> Result<Self, FormatError> {
        let n = lp.nvars();
        let mut rows = Vec::with_capacity(lp.nrows());
        for i in 0..lp.nrows() {
            let mut coeffs = BTreeMap::new();
            for j in 0..n {
                let a = lp.a.get(i, j);
                if !a.is_zero() {
                    coeffs.insert(lp.var_names[j].clone(), poly_to_quads(a)?);
                }
            }
            rows.push(RowDoc {
                slack: Some(lp.slack_names[i].clone()),
                kind: RowKindDoc::Eq,
                coeffs,
                rhs: poly_to_quads(&lp.b[i])?,
            });
        }
        let mut objective = BTreeMap::new();
        for (j, c) in lp.c.iter().enumerate() {
            if !c.is_zero() {
                objective.insert(lp.var_names[j].clone(), poly_to_quads(c)?);
            }
        }
        Ok(LpDocument {
            format_version: FORMAT_VERSION,
            name,
            family: lp.family.map(|p| FamilyTag { kind: "lp_r".into(), r: p.r, extended: p.extended }),
            variables: lp.var_names.clone(),
            rows,
            objective,
        })
    }

    pub fn to_instance(&self) -> Result<LpInstance, FormatError> {
        if self.format_version != FORMAT_VERSION {
            return Err(FormatError::Version(self.format_version));
        }
        let mut index = HashMap::new();
        for (j, v) in self.variables.iter().enumerate() {
            if index.insert(v.as_str(), j).is_some() {
                return Err(FormatError::DuplicateName(v.clone()));
            }
        }
        let lookup = |name: &str| index.get(name).copied().ok_or_else(|| FormatError::UnknownVariable(name.to_string()));
        let n = self.variables.len();
        let mut a = PuiseuxMatrix::zeros(self.rows.len(), n);
        let mut b = Vec::with_capacity(self.rows.len());
        let mut slack_names = Vec::with_capacity(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            for (name, q) in &row.coeffs {
                a.set(i, lookup(name)?, quads_to_poly(q)?);
            }
            b.push(quads_to_poly(&row.rhs)?);
            let slack = match (&row.slack, row.kind) {
                (Some(s), _) => s.clone(),
                (None, RowKindDoc::Le) => format!("w{i}"),
                (None, RowKindDoc::Eq) => return Err(FormatError::MissingSlack(i)),
            };
            if index.contains_key(slack.as_str()) || slack_names.contains(&slack) {
                return Err(FormatError::DuplicateName(slack));
            }
            slack_names.push(slack);
        }
        let mut c = vec![PuiseuxPoly::zero(); n];
        for (name, q) in &self.objective {
            c[lookup(name)?] = quads_to_poly(q)?;
        }
        let family = match &self.family {
            None => None,
            Some(f) if f.kind == "lp_r" => Some(CexParams { r: f.r, extended: f.extended }),
            Some(f) => return Err(FormatError::UnknownFamily(f.kind.clone())),
        };
        Ok(LpInstance { a, b, c, var_names: self.variables.clone(), slack_names, family })
    }

    pub fn to_json(&self) -> Result<String, FormatError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(s)?)
    }
}

/// An exact tropical trace: one row per `λ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropTrace {
    pub columns: Vec<String>,
    pub rows: Vec<(Rational, Vec<TropScalar>)>,
}

impl TropTrace {
    /// Rows of [`TropPathPoint`]s named by `names`; dual columns are
    /// suffixed `_d`.
    pub fn from_path(names: &[String], points: &[TropPathPoint], with_dual: bool) -> Self {
        let mut columns = names.to_vec();
        if with_dual {
            columns.extend(names.iter().map(|n| format!("{n}_d")));
        }
        let rows = points
            .iter()
            .map(|p| {
                let v = if with_dual { p.primal_dual_vector() } else { p.primal_vector() };
                (p.lambda.clone(), v.into_inner())
            })
            .collect();
        TropTrace { columns, rows }
    }

    pub fn column(&self, name: &str) -> Result<usize, FormatError> {
        self.columns.iter().position(|c| c == name).ok_or_else(|| FormatError::MissingColumn(name.into()))
    }

    pub fn write<W: Write>(&self, out: W) -> Result<(), FormatError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(std::iter::once("lambda").chain(self.columns.iter().map(String::as_str)))?;
        for (lam, vals) in &self.rows {
            let mut rec = vec![lam.to_string()];
            rec.extend(vals.iter().map(TropScalar::to_string));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read<R: Read>(input: R) -> Result<Self, FormatError> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers()?.clone();
        if header.get(0) != Some("lambda") {
            return Err(FormatError::MissingColumn("lambda".into()));
        }
        let columns: Vec<String> = header.iter().skip(1).map(String::from).collect();
        let mut rows = Vec::new();
        for (k, rec) in r.records().enumerate() {
            let rec = rec?;
            let line = k + 2;
            let bad = |msg: String| FormatError::Parse { line, msg };
            let lam: Rational = rec[0].trim().parse().map_err(|_| bad(format!("bad lambda {:?}", &rec[0])))?;
            let vals = rec
                .iter()
                .skip(1)
                .map(|s| s.parse::<TropScalar>().map_err(|e| bad(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push((lam, vals));
        }
        Ok(TropTrace { columns, rows })
    }
}

/// Decimal, `p/q` or `-inf`.
fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    s.parse::<f64>().ok().or_else(|| s.parse::<Rational>().ok().and_then(|q| q.to_f64()))
}

/// A numeric trace. The first two columns are `lambda` and `mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct NumTrace {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl NumTrace {
    /// Raw primal and dual values followed by their `log_t` images.
    pub fn from_samples(names: &[String], samples: &[PathSample], t: f64) -> Result<Self, FormatError> {
        let mut raw: Vec<String> = names.to_vec();
        raw.extend(names.iter().map(|n| format!("{n}_d")));
        let mut columns = vec!["lambda".to_string(), "mu".to_string()];
        columns.extend(raw.iter().cloned());
        columns.extend(raw.iter().map(|n| format!("{n}_logt")));
        let mut rows = Vec::with_capacity(samples.len());
        for s in samples {
            let mut row = vec![s.lambda, s.mu];
            row.extend(s.primal());
            row.extend(s.dual());
            row.extend(log_map(s, t)?);
            rows.push(row);
        }
        Ok(NumTrace { columns, rows })
    }

    pub fn column(&self, name: &str) -> Result<usize, FormatError> {
        self.columns.iter().position(|c| c == name).ok_or_else(|| FormatError::MissingColumn(name.into()))
    }

    pub fn write<W: Write>(&self, out: W) -> Result<(), FormatError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(f64::to_string))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read<R: Read>(input: R) -> Result<Self, FormatError> {
        let mut r = csv::Reader::from_reader(input);
        let columns: Vec<String> = r.headers()?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for (k, rec) in r.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| parse_real(s).ok_or_else(|| FormatError::Parse { line: k + 2, msg: format!("{s:?} is not a number") }))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Ok(NumTrace { columns, rows })
    }
}
