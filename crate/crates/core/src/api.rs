//! String-in, JSON-out entry points over a field chosen at runtime. Used by
//! the command-line tool and the C interface.

use serde_json::{json, Map, Value};

use crate::aut::{automorphisms_bruteforce, automorphisms_closed_form, AutError};
use crate::canonical::{canonical_msc, enumerate_canonical, CanonicalFamily, ClassLabel, Regime};
use crate::classify::{are_isomorphic, census_summary, classify_msc, orbit_census};
use crate::der::{derivation_algebra, derivations_closed_form};
use crate::errata::Reading;
use crate::field::{AnyField, Field, FieldSpec};
use crate::msc::{Mat2, Msc};
use crate::text::{parse_family, parse_msc};
use crate::verify::{run_verification, VerificationReport, VerifyConfig};

/// Failure of an entry point, split by whether the input was malformed.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ApiError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
}

impl ApiError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ApiError::Usage(_) => 2,
            ApiError::Compute(_) => 1,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> ApiError {
    ApiError::Usage(e.to_string())
}

fn compute(e: impl std::fmt::Display) -> ApiError {
    ApiError::Compute(e.to_string())
}

/// An MSC given directly or as a canonical family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Input<'a> {
    Msc(&'a str),
    Family(&'a str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerSource {
    Kernel,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AutMethod {
    Brute,
    Closed,
    Both,
}

/// JSON document plus a flat table view of the same result.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub json: Value,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// False when two methods disagree or a check failed.
    pub ok: bool,
}

impl Report {
    fn new(json: Value, headers: &[&str], rows: Vec<Vec<String>>) -> Self {
        Self {
            json,
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows,
            ok: true,
        }
    }
}

pub fn parse_field(spec: &str) -> Result<AnyField, ApiError> {
    spec.parse::<FieldSpec>()
        .map(|s| s.build())
        .map_err(|e| ApiError::Usage(format!("field {spec:?}: {e}")))
}

macro_rules! with_field {
    ($any:expr, $f:ident => $body:expr) => {
        match $any {
            AnyField::Finite($f) => $body,
            AnyField::Rational($f) => $body,
        }
    };
}

/// Integers as JSON numbers, anything else as strings.
pub fn element_value(s: &str) -> Value {
    s.parse::<i64>().map(Value::from).unwrap_or_else(|_| Value::from(s))
}

fn matrix_value(m: &[[String; 2]; 2]) -> Value {
    Value::Array(
        m.iter()
            .map(|r| Value::Array(r.iter().map(|x| element_value(x)).collect()))
            .collect(),
    )
}

fn mat_value<F: Field>(f: &F, m: &Mat2<F::Elem>) -> Value {
    matrix_value(&m.rows().map(|r| r.map(|x| f.format(&x))))
}

fn msc_value<F: Field>(f: &F, a: &Msc<F::Elem>) -> Value {
    Value::Array(
        a.rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(|x| element_value(&f.format(x))).collect()))
            .collect(),
    )
}

enum Resolved<E> {
    Msc(Msc<E>),
    Family(CanonicalFamily<E>, Msc<E>),
}

impl<E: Clone> Resolved<E> {
    fn msc(&self) -> &Msc<E> {
        match self {
            Resolved::Msc(a) | Resolved::Family(_, a) => a,
        }
    }
}

fn resolve<F: Field>(f: &F, input: Input<'_>) -> Result<Resolved<F::Elem>, ApiError> {
    match input {
        Input::Msc(s) => Ok(Resolved::Msc(parse_msc(f, s).map_err(|e| {
            ApiError::Usage(format!("msc {s:?}: {e}"))
        })?)),
        Input::Family(s) => {
            let fam = parse_family(f, s).map_err(|e| ApiError::Usage(format!("family {s:?}: {e}")))?;
            let a = canonical_msc(f, &fam).map_err(usage)?;
            Ok(Resolved::Family(fam, a))
        }
    }
}

fn input_value<F: Field>(f: &F, r: &Resolved<F::Elem>) -> Value {
    let mut m = Map::new();
    m.insert("msc".into(), msc_value(f, r.msc()));
    if let Resolved::Family(fam, _) = r {
        m.insert("family".into(), serde_json::to_value(fam.record(f)).expect("serializable"));
    }
    Value::Object(m)
}

fn matrix_rows(label: &str, mats: &[Value]) -> Vec<Vec<String>> {
    mats.iter()
        .enumerate()
        .map(|(i, m)| {
            let flat: Vec<String> = m
                .as_array()
                .into_iter()
                .flatten()
                .flat_map(|r| r.as_array().cloned().unwrap_or_default())
                .map(|x| match x {
                    Value::String(s) => s,
                    other => other.to_string(),
                })
                .collect();
            let mut row = vec![label.to_string(), i.to_string()];
            row.extend(flat);
            row
        })
        .collect()
}

/// Derivation algebra. The default source is the kernel for an MSC and the
/// closed form for a family.
pub fn der(
    field: &str,
    input: Input<'_>,
    source: Option<DerSource>,
    reading: &Reading,
) -> Result<Report, ApiError> {
    with_field!(parse_field(field)?, f => {
        let r = resolve(&f, input)?;
        let source = source.unwrap_or(match r {
            Resolved::Msc(_) => DerSource::Kernel,
            Resolved::Family(..) => DerSource::ClosedForm,
        });
        let basis = match (&r, source) {
            (_, DerSource::Kernel) => derivation_algebra(&f, r.msc()),
            (Resolved::Family(fam, _), DerSource::ClosedForm) => {
                derivations_closed_form(&f, fam, reading).map_err(compute)?
            }
            (Resolved::Msc(_), DerSource::ClosedForm) => {
                return Err(ApiError::Usage("the closed form needs --family".into()))
            }
        };
        let basis: Vec<Value> = basis.basis.iter().map(|m| mat_value(&f, m)).collect();
        let source = match source {
            DerSource::Kernel => "kernel",
            DerSource::ClosedForm => "closed-form",
        };
        let rows = matrix_rows(source, &basis);
        let json = json!({
            "field": f.spec().to_string(),
            "input": input_value(&f, &r),
            "dimension": basis.len(),
            "basis": basis,
            "source": source,
        });
        Ok(Report::new(json, &["source", "index", "a", "b", "c", "d"], rows))
    })
}

/// Automorphism group by exhaustive scan, closed form, or both.
pub fn aut(
    field: &str,
    input: Input<'_>,
    method: AutMethod,
    reading: &Reading,
) -> Result<Report, ApiError> {
    with_field!(parse_field(field)?, f => {
        let r = resolve(&f, input)?;
        let brute = || -> Result<Value, ApiError> {
            let b = automorphisms_bruteforce(&f, r.msc()).map_err(|e| match e {
                AutError::Infinite(_) => ApiError::Compute(format!(
                    "the exhaustive scan needs a finite field, got {}",
                    f.spec()
                )),
                e => compute(e),
            })?;
            let els: Vec<Value> = b.group.elements.iter().map(|m| mat_value(&f, m)).collect();
            Ok(json!({
                "order": els.len(),
                "elements": els,
                "filter_used": b.filter_used,
            }))
        };
        let closed = || -> Result<Value, ApiError> {
            let fam = match &r {
                Resolved::Family(fam, _) => fam,
                Resolved::Msc(_) => {
                    return Err(ApiError::Usage("the closed form needs --family".into()))
                }
            };
            let g = automorphisms_closed_form(&f, fam, reading).map_err(compute)?;
            let rec = g.record(&f);
            let els: Option<Vec<Value>> = rec
                .elements
                .as_ref()
                .map(|es| es.iter().map(matrix_value).collect());
            Ok(json!({
                "order": rec.order,
                "elements": els,
                "symbolic": rec.symbolic,
                "notes": rec.notes,
            }))
        };
        let mut json = match method {
            AutMethod::Brute => brute()?,
            AutMethod::Closed => closed()?,
            AutMethod::Both => {
                let (b, c) = (brute()?, closed()?);
                let agree = b["elements"] == c["elements"];
                json!({
                    "order": b["order"],
                    "elements": b["elements"],
                    "filter_used": b["filter_used"],
                    "agree": agree,
                    "closed_form": c,
                })
            }
        };
        let method_name = match method {
            AutMethod::Brute => "brute",
            AutMethod::Closed => "closed",
            AutMethod::Both => "both",
        };
        let obj = json.as_object_mut().expect("object");
        obj.insert("method".into(), method_name.into());
        obj.insert("field".into(), f.spec().to_string().into());
        obj.insert("input".into(), input_value(&f, &r));
        let ok = json.get("agree").and_then(Value::as_bool).unwrap_or(true);
        let els: Vec<Value> = json["elements"].as_array().cloned().unwrap_or_default();
        let mut report = Report::new(
            json,
            &["method", "index", "a", "b", "c", "d"],
            matrix_rows(method_name, &els),
        );
        report.ok = ok;
        Ok(report)
    })
}

/// Isomorphism test with an explicit witness `g`, `transform(A, g) = B`.
pub fn iso(field: &str, a: &str, b: &str) -> Result<Report, ApiError> {
    with_field!(parse_field(field)?, f => {
        let ra = resolve(&f, Input::Msc(a))?;
        let rb = resolve(&f, Input::Msc(b))?;
        let w = are_isomorphic(&f, ra.msc(), rb.msc()).map_err(compute)?;
        let witness = w.as_ref().map(|g| mat_value(&f, g));
        let json = json!({
            "field": f.spec().to_string(),
            "isomorphic": w.is_some(),
            "witness": witness,
        });
        let row = vec![
            w.is_some().to_string(),
            w.as_ref().map(|g| g.format(&f)).unwrap_or_default(),
        ];
        Ok(Report::new(json, &["isomorphic", "witness"], vec![row]))
    })
}

/// The canonical class of an MSC over a small finite field.
pub fn classify(field: &str, msc: &str) -> Result<Report, ApiError> {
    let any = parse_field(field)?;
    let f = match any {
        AnyField::Finite(f) => f,
        AnyField::Rational(_) => {
            return Err(ApiError::Compute(
                "classification over the rationals is out of scope: there is no finite orbit search"
                    .into(),
            ))
        }
    };
    let a = parse_msc(&f, msc).map_err(|e| ApiError::Usage(format!("msc {msc:?}: {e}")))?;
    let label = classify_msc(&f, &a).map_err(compute)?;
    let witness = match &label {
        ClassLabel::Trivial => None,
        ClassLabel::Family(fam) => {
            let b = canonical_msc(&f, fam).map_err(compute)?;
            are_isomorphic(&f, &a, &b).map_err(compute)?
        }
    };
    let family = match &label {
        ClassLabel::Trivial => Value::Null,
        ClassLabel::Family(fam) => serde_json::to_value(fam.record(&f)).expect("serializable"),
    };
    let json = json!({
        "field": f.spec().to_string(),
        "msc": msc_value(&f, &a),
        "class": label.label(&f),
        "family": family,
        "witness": witness.as_ref().map(|g| mat_value(&f, g)),
    });
    let row = vec![
        label.label(&f),
        witness.as_ref().map(|g| g.format(&f)).unwrap_or_default(),
    ];
    Ok(Report::new(json, &["class", "witness"], vec![row]))
}

/// Orbit census: one record per orbit and a summary.
pub fn census(field: &str) -> Result<(Vec<Value>, Report), ApiError> {
    let f = match parse_field(field)? {
        AnyField::Finite(f) => f,
        AnyField::Rational(_) => return Err(ApiError::Compute("the census needs a finite field".into())),
    };
    let reports = orbit_census(&f).map_err(compute)?;
    let orbits = reports
        .iter()
        .map(|r| serde_json::to_value(r.record(&f)).expect("serializable"))
        .collect();
    let s = census_summary(&f, &reports);
    let row = vec![
        s.field.clone(),
        s.orbit_count.to_string(),
        s.sum_sizes.to_string(),
        s.unmatched_count.to_string(),
        s.collision_count.to_string(),
    ];
    let ok = s.unmatched_count == 0 && s.collision_count == 0;
    let mut report = Report::new(
        serde_json::to_value(&s).expect("serializable"),
        &["field", "orbit_count", "sum_sizes", "unmatched_count", "collision_count"],
        vec![row],
    );
    report.ok = ok;
    Ok((orbits, report))
}

/// The canonical classes over a finite field, with per-family counts.
pub fn families(field: &str) -> Result<Report, ApiError> {
    let f = match parse_field(field)? {
        AnyField::Finite(f) => f,
        AnyField::Rational(_) => {
            return Err(ApiError::Compute(
                "the rationals have infinitely many classes; give a finite field".into(),
            ))
        }
    };
    let classes = enumerate_canonical(&f).map_err(compute)?;
    let regime = Regime::of_characteristic(f.characteristic());
    let mut counts = Map::new();
    let mut rows = Vec::new();
    let trivial = classes.iter().filter(|c| matches!(c, ClassLabel::Trivial)).count();
    counts.insert("trivial".into(), trivial.into());
    rows.push(vec!["trivial".to_string(), trivial.to_string()]);
    for &tag in regime.families() {
        let n = classes
            .iter()
            .filter(|c| matches!(c, ClassLabel::Family(fam) if fam.tag == tag))
            .count();
        counts.insert(tag.name(), n.into());
        rows.push(vec![tag.name(), n.to_string()]);
    }
    let labels: Vec<String> = classes.iter().map(|c| c.label(&f)).collect();
    let json = json!({
        "field": f.spec().to_string(),
        "regime": regime,
        "total": classes.len(),
        "counts": counts,
        "classes": labels,
    });
    Ok(Report::new(json, &["family", "count"], rows))
}

/// Parses `all`, `ne23`, `char2` or `char3`.
pub fn parse_regimes(s: &str) -> Result<Vec<Regime>, ApiError> {
    match s {
        "all" => Ok(vec![Regime::CharNot2Or3, Regime::Char2, Regime::Char3]),
        "ne23" | "char_ne_2_3" => Ok(vec![Regime::CharNot2Or3]),
        "char2" => Ok(vec![Regime::Char2]),
        "char3" => Ok(vec![Regime::Char3]),
        other => Err(ApiError::Usage(format!(
            "regime {other:?}: expected all, ne23, char2 or char3"
        ))),
    }
}

/// Default test fields of each regime.
pub fn default_fields(regimes: &[Regime]) -> Vec<FieldSpec> {
    let mut out = Vec::new();
    for r in regimes {
        let qs: &[u64] = match r {
            Regime::CharNot2Or3 => &[5, 7],
            Regime::Char2 => &[2, 4],
            Regime::Char3 => &[3, 9, 27],
        };
        out.extend(qs.iter().map(|&q| FieldSpec::of_order(q).expect("prime power")));
    }
    out
}

/// Table verification. `fields` is a comma-separated list; when absent every
/// selected regime's default fields are used.
pub fn verify_table(
    regime: &str,
    fields: Option<&str>,
    budget: usize,
    reading: Reading,
) -> Result<VerificationReport, ApiError> {
    let regimes = parse_regimes(regime)?;
    let fields = match fields {
        None => default_fields(&regimes),
        Some(list) => list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                s.parse::<FieldSpec>()
                    .map_err(|e| ApiError::Usage(format!("field {s:?}: {e}")))
            })
            .collect::<Result<_, _>>()?,
    };
    let config = VerifyConfig {
        regimes,
        fields,
        budget,
        reading,
    };
    run_verification(&config).map_err(|e| match e {
        e @ (crate::verify::VerifyError::RegimeMismatch { .. }
        | crate::verify::VerifyError::InfiniteField(_)) => usage(e),
        e => compute(e),
    })
}
