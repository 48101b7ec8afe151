//! Text forms of MSCs and family names.
//!
//! An MSC is written `a1,a2,a3,a4;b1,b2,b3,b4` with field-element literals.
//! A family is written `NAME` or `NAME@c=p1,p2,...`, where `NAME` is `A3`
//! (regime taken from the field's characteristic), a full tag such as
//! `A3_2` or `A2_2s`, or `A2s`/`A5s` for the char-2 split forms.

use thiserror::Error;

use crate::canonical::{CanonicalFamily, FamilyTag, Regime};
use crate::field::{ElementParseError, Field};
use crate::msc::Msc;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("expected 2 rows of 4 entries separated by ';' and ',', got {found:?}")]
    Arity { found: String },
    #[error("row {row}, column {col}: {source}")]
    Element {
        row: usize,
        col: usize,
        source: ElementParseError,
    },
    #[error("unknown family {name:?} for {regime}")]
    UnknownFamily { name: String, regime: Regime },
    #[error("parameter {index} of {name}: {source}")]
    Parameter {
        name: String,
        index: usize,
        source: ElementParseError,
    },
}

pub fn parse_msc<F: Field>(f: &F, text: &str) -> Result<Msc<F::Elem>, ParseError> {
    let arity = || ParseError::Arity {
        found: text.to_string(),
    };
    let rows: Vec<&str> = text.split(';').collect();
    if rows.len() != 2 {
        return Err(arity());
    }
    let mut entries = Vec::with_capacity(8);
    for (r, row) in rows.iter().enumerate() {
        let tokens: Vec<&str> = row.split(',').collect();
        if tokens.len() != 4 {
            return Err(arity());
        }
        for (c, token) in tokens.iter().enumerate() {
            let x = f.parse(token.trim()).map_err(|source| ParseError::Element {
                row: r + 1,
                col: c + 1,
                source,
            })?;
            entries.push(x);
        }
    }
    let entries: [F::Elem; 8] = entries.try_into().expect("eight entries");
    Ok(Msc::from_entries(entries))
}

pub fn render_msc<F: Field>(f: &F, a: &Msc<F::Elem>) -> String {
    a.format(f)
}

pub fn parse_family<F: Field>(f: &F, text: &str) -> Result<CanonicalFamily<F::Elem>, ParseError> {
    let regime = Regime::of_characteristic(f.characteristic());
    let (name, params_text) = match text.split_once('@') {
        Some((n, rest)) => (n.trim(), Some(rest.trim())),
        None => (text.trim(), None),
    };
    let unknown = || ParseError::UnknownFamily {
        name: text.to_string(),
        regime,
    };
    let mut params = Vec::new();
    if let Some(p) = params_text {
        let list = p.strip_prefix("c=").ok_or_else(unknown)?;
        if !list.trim().is_empty() {
            for (i, token) in list.split(',').enumerate() {
                let x = f.parse(token.trim()).map_err(|source| ParseError::Parameter {
                    name: name.to_string(),
                    index: i + 1,
                    source,
                })?;
                params.push(x);
            }
        }
    }
    let tag = resolve_name(name, regime).ok_or_else(unknown)?;
    Ok(split_form(f, tag, params))
}

fn resolve_name(name: &str, regime: Regime) -> Option<FamilyTag> {
    if let Some(tag) = FamilyTag::from_name(name).filter(|t| t.regime() == regime) {
        return Some(tag);
    }
    if name.contains('_') {
        return None;
    }
    let full = match (regime, name) {
        (Regime::Char2, "A2s") => "A2_2s".to_string(),
        (Regime::Char2, "A5s") => "A5_2s".to_string(),
        (Regime::CharNot2Or3, _) => return None,
        (Regime::Char2, n) => format!("{n}_2"),
        (Regime::Char3, n) => format!("{n}_3"),
    };
    FamilyTag::from_name(&full)
}

/// `A2_2(α1, 0, 1)` and `A5_2(1, 0)` are listed as separate forms.
fn split_form<F: Field>(f: &F, tag: FamilyTag, params: Vec<F::Elem>) -> CanonicalFamily<F::Elem> {
    let (zero, one) = (f.zero(), f.one());
    match tag {
        FamilyTag::A2_2 if params.len() == 3 && params[1] == zero && params[2] == one => {
            CanonicalFamily::new(FamilyTag::A2_2Split, vec![params[0].clone()])
        }
        FamilyTag::A5_2 if params == [one.clone(), zero] => {
            CanonicalFamily::new(FamilyTag::A5_2Split, Vec::new())
        }
        _ => CanonicalFamily::new(tag, params),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldSpec, FiniteField, Rationals};

    fn gf(q: u64) -> FiniteField {
        FiniteField::new(FieldSpec::of_order(q).unwrap())
    }

    #[test]
    fn msc_examples() {
        let f = gf(7);
        assert_eq!(
            parse_msc(&f, "0,0,0,0;1,0,0,0").unwrap().entries(),
            [0, 0, 0, 0, 1, 0, 0, 0]
        );
        assert_eq!(
            parse_msc(&f, " 0, 0,0,1 ; 2,0,0,0 ").unwrap().entries(),
            [0, 0, 0, 1, 2, 0, 0, 0]
        );
        assert!(matches!(parse_msc(&f, "1,2;3,4"), Err(ParseError::Arity { .. })));
        assert_eq!(parse_msc(&f, "1/2,0,0,0;0,0,0,0").unwrap().entries()[0], 4);
        match parse_msc(&f, "0,0,t,0;0,0,0,0") {
            Err(ParseError::Element { row: 1, col: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trip_extension_and_rational() {
        let f = gf(9);
        let a = parse_msc(&f, "t,1+t,2*t,0;1,2,t^2,0").unwrap();
        assert_eq!(parse_msc(&f, &render_msc(&f, &a)).unwrap(), a);
        let q = Rationals::new();
        let a = parse_msc(&q, "1/2,-3,0,7/5;1,0,0,-1/3").unwrap();
        assert_eq!(parse_msc(&q, &render_msc(&q, &a)).unwrap(), a);
    }

    #[test]
    fn family_names() {
        let f7 = gf(7);
        assert_eq!(
            parse_family(&f7, "A3@c=1,0,2").unwrap(),
            CanonicalFamily::new(FamilyTag::A3, vec![1, 0, 2])
        );
        assert_eq!(parse_family(&f7, "A13").unwrap().tag, FamilyTag::A13);
        assert!(parse_family(&f7, "A3_2@c=1,0,1").is_err());
        let f2 = gf(2);
        assert_eq!(parse_family(&f2, "A3@c=1,0,1").unwrap().tag, FamilyTag::A3_2);
        assert_eq!(
            parse_family(&f2, "A2@c=1,0,1").unwrap(),
            CanonicalFamily::new(FamilyTag::A2_2Split, vec![1])
        );
        assert_eq!(parse_family(&f2, "A5@c=1,0").unwrap().tag, FamilyTag::A5_2Split);
        assert_eq!(parse_family(&f2, "A2_2s@c=0").unwrap().tag, FamilyTag::A2_2Split);
        assert_eq!(parse_family(&gf(3), "A10@c=2").unwrap().tag, FamilyTag::A10_3);
        assert!(parse_family(&f2, "A13").is_err());
        assert!(parse_family(&f7, "A3@c=1,x,2").is_err());
    }
}
