//! Published reference tables, checked in as JSON under `fixtures/`.
//!
//! Numbers are kept as the original decimal strings (`"-.130166356702E+01"`)
//! and parsed here. Each complex entry is `[re, im, flag]` and each real entry
//! is `[value, flag]`. The flag is `"tol"` when the digits are compared at the
//! table tolerance, or one of `"exact"`, `"exact_re"`, `"exact_im"` when a
//! printed component is round-off of an analytically vanishing quantity.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const T2_JSON: &str = include_str!("../../fixtures/t2.json");
pub const T3_JSON: &str = include_str!("../../fixtures/t3.json");
pub const T4_JSON: &str = include_str!("../../fixtures/t4.json");
pub const T5_JSON: &str = include_str!("../../fixtures/t5.json");
pub const T6_JSON: &str = include_str!("../../fixtures/t6.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TableId {
    T2,
    T3,
    T4,
    T5,
    T6,
}

impl TableId {
    pub const ALL: [TableId; 5] = [TableId::T2, TableId::T3, TableId::T4, TableId::T5, TableId::T6];

    pub fn json(self) -> &'static str {
        match self {
            TableId::T2 => T2_JSON,
            TableId::T3 => T3_JSON,
            TableId::T4 => T4_JSON,
            TableId::T5 => T5_JSON,
            TableId::T6 => T6_JSON,
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches(['T', 't']);
        match t {
            "2" => Ok(TableId::T2),
            "3" => Ok(TableId::T3),
            "4" => Ok(TableId::T4),
            "5" => Ok(TableId::T5),
            "6" => Ok(TableId::T6),
            _ => Err(Error::Parse(format!("unknown table '{s}' (expected T2..T6)"))),
        }
    }
}

/// How a reference component is compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    /// Against the printed digits at the table tolerance.
    Tolerance,
    /// Against zero at the exact-zero tolerance.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefComplex {
    pub value: Complex64,
    pub re: Check,
    pub im: Check,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefReal {
    pub value: f64,
    pub check: Check,
}

/// Parses one printed number. Accepts the leading-dot Fortran style.
pub fn parse_number(s: &str) -> Result<f64> {
    let t = s.trim();
    let v: f64 = t.parse().map_err(|_| Error::Parse(format!("invalid number '{s}'")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("non-finite number '{s}'")));
    }
    Ok(v)
}

fn parse_flag(f: &str) -> Result<(Check, Check)> {
    Ok(match f {
        "tol" => (Check::Tolerance, Check::Tolerance),
        "exact" => (Check::Zero, Check::Zero),
        "exact_re" => (Check::Zero, Check::Tolerance),
        "exact_im" => (Check::Tolerance, Check::Zero),
        _ => return Err(Error::Parse(format!("unknown flag '{f}'"))),
    })
}

fn parse_complex_entry(name: &str, raw: &[String]) -> Result<RefComplex> {
    let [re, im, flag] = raw else {
        return Err(Error::Parse(format!("entry '{name}' must be [re, im, flag]")));
    };
    let (cr, ci) = parse_flag(flag)?;
    Ok(RefComplex {
        value: Complex64::new(parse_number(re)?, parse_number(im)?),
        re: cr,
        im: ci,
    })
}

fn parse_real_entry(name: &str, raw: &[String]) -> Result<RefReal> {
    let [v, flag] = raw else {
        return Err(Error::Parse(format!("entry '{name}' must be [value, flag]")));
    };
    let (check, _) = parse_flag(flag)?;
    Ok(RefReal {
        value: parse_number(v)?,
        check,
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    #[serde(rename = "A-2")]
    am2: f64,
    #[serde(rename = "A-1")]
    am1: f64,
    #[serde(rename = "A0")]
    a0: f64,
    #[serde(rename = "A1")]
    a1: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRow {
    #[serde(rename = "A2")]
    a2: f64,
    entries: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamilyTable {
    table: String,
    params: RawFamily,
    #[serde(default)]
    quantity: Option<String>,
    rows: Vec<RawRow>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJaffeLay {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoeffRow {
    m: u32,
    entries: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoeffTable {
    table: String,
    jaffe_lay: RawJaffeLay,
    nu1: String,
    xi1: String,
    xi2: String,
    rows: Vec<RawCoeffRow>,
}

/// One row of a table over the `A₂` family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyRow {
    pub a2: f64,
    pub entries: BTreeMap<String, RefComplex>,
}

/// Tables T2–T5: complex quantities along the family
/// `A = (A₋₂, A₋₁, A₀, A₁, A₂)` with `A₂` varying.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyTable {
    pub id: TableId,
    /// `[A₋₂, A₋₁, A₀, A₁]`.
    pub fixed: [f64; 4],
    pub rows: Vec<FamilyRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientRow {
    pub m: u32,
    /// Keys `c-m,1`, `cm,1`, `c-m,2`, `cm,2`.
    pub entries: BTreeMap<String, RefReal>,
}

/// Table T6: Laurent coefficients of the Jaffé–Lay multiplicative pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub jaffe_lay: [f64; 4],
    pub nu1: f64,
    pub xi1: f64,
    pub xi2: f64,
    pub rows: Vec<CoefficientRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Fixture {
    Family(FamilyTable),
    Coefficients(CoefficientTable),
}

const FAMILY_KEYS: [(TableId, &[&str]); 4] = [
    (TableId::T2, &["nu1"]),
    (TableId::T3, &["T13", "T14", "T15", "T16", "T23", "T24", "T25", "T26"]),
    (TableId::T4, &["zeta1", "zeta2"]),
    (TableId::T5, &["Treg3", "Treg4"]),
];

/// Parses and validates a fixture document.
pub fn parse_fixture(json: &str) -> Result<Fixture> {
    let probe: serde_json::Value = serde_json::from_str(json)?;
    let id: TableId = probe
        .get("table")
        .and_then(|t| t.as_str())
        .ok_or_else(|| Error::Parse("missing \"table\" field".into()))?
        .parse()?;
    if id == TableId::T6 {
        let raw: RawCoeffTable = serde_json::from_value(probe)?;
        let _ = raw.table;
        let mut rows = Vec::with_capacity(raw.rows.len());
        for r in raw.rows {
            if r.m == 0 {
                return Err(Error::Parse("coefficient rows start at m = 1".into()));
            }
            let mut entries = BTreeMap::new();
            for key in ["c-m,1", "cm,1", "c-m,2", "cm,2"] {
                let v = r
                    .entries
                    .get(key)
                    .ok_or_else(|| Error::Parse(format!("row m = {} lacks '{key}'", r.m)))?;
                entries.insert(key.to_string(), parse_real_entry(key, v)?);
            }
            if r.entries.len() != 4 {
                return Err(Error::Parse(format!("row m = {} has unexpected entries", r.m)));
            }
            rows.push(CoefficientRow { m: r.m, entries });
        }
        let j = raw.jaffe_lay;
        return Ok(Fixture::Coefficients(CoefficientTable {
            jaffe_lay: [j.alpha, j.beta, j.gamma, j.delta],
            nu1: parse_number(&raw.nu1)?,
            xi1: parse_number(&raw.xi1)?,
            xi2: parse_number(&raw.xi2)?,
            rows,
        }));
    }

    let raw: RawFamilyTable = serde_json::from_value(probe)?;
    let _ = (raw.table, raw.quantity);
    let keys = FAMILY_KEYS.iter().find(|(t, _)| *t == id).map(|(_, k)| *k).unwrap_or(&[]);
    let p = raw.params;
    let fixed = [p.am2, p.am1, p.a0, p.a1];
    if fixed.iter().any(|x| !x.is_finite()) {
        return Err(Error::Parse("non-finite family parameter".into()));
    }
    let mut rows = Vec::with_capacity(raw.rows.len());
    for r in raw.rows {
        if !r.a2.is_finite() {
            return Err(Error::Parse("non-finite A2".into()));
        }
        let mut entries = BTreeMap::new();
        for (name, v) in &r.entries {
            if !keys.contains(&name.as_str()) {
                return Err(Error::Parse(format!("{id} has no entry '{name}'")));
            }
            entries.insert(name.clone(), parse_complex_entry(name, v)?);
        }
        if entries.len() != keys.len() {
            return Err(Error::Parse(format!("{id} row A2 = {} is incomplete", r.a2)));
        }
        rows.push(FamilyRow { a2: r.a2, entries });
    }
    Ok(Fixture::Family(FamilyTable { id, fixed, rows }))
}

/// The checked-in fixture for `id`.
pub fn load_fixture(id: TableId) -> Fixture {
    parse_fixture(id.json()).expect("checked-in fixtures are valid")
}
