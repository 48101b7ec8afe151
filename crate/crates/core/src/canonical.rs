//! Canonical forms of non-trivial two-dimensional algebras.
//!
//! Three lists of parametrized normal forms cover the characteristic
//! regimes char ∉ {2, 3}, char = 2 and char = 3. Each family carries its
//! parameter constraints (nonvanishing entries and polynomial root
//! exclusions) and, for some families, an identification: a map on the
//! parameters, driven by a witness `a` (and `b`), under which the two
//! algebras are isomorphic.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, FieldError};
use crate::msc::Msc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "char_ne_2_3")]
    CharNot2Or3,
    #[serde(rename = "char_2")]
    Char2,
    #[serde(rename = "char_3")]
    Char3,
}

impl Regime {
    pub fn of_characteristic(p: u64) -> Self {
        match p {
            2 => Regime::Char2,
            3 => Regime::Char3,
            _ => Regime::CharNot2Or3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::CharNot2Or3 => "char_ne_2_3",
            Regime::Char2 => "char_2",
            Regime::Char3 => "char_3",
        }
    }

    pub fn families(self) -> &'static [FamilyTag] {
        let start = FamilyTag::ALL
            .iter()
            .position(|t| t.regime() == self)
            .expect("every regime has families");
        let len = FamilyTag::ALL[start..]
            .iter()
            .take_while(|t| t.regime() == self)
            .count();
        &FamilyTag::ALL[start..start + len]
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One canonical family. Names follow the usual `A_i`, `A_{i,2}`, `A_{i,3}`
/// numbering; `A2_2Split` and `A5_2Split` are the separately listed forms
/// `A_{2,2}(α1, 0, 1)` and `A_{5,2}(1, 0)`.
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyTag {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    A9,
    A10,
    A11,
    A12,
    A13,
    A1_2,
    A2_2,
    A2_2Split,
    A3_2,
    A4_2,
    A5_2,
    A5_2Split,
    A6_2,
    A7_2,
    A8_2,
    A9_2,
    A10_2,
    A11_2,
    A12_2,
    A1_3,
    A2_3,
    A3_3,
    A4_3,
    A5_3,
    A6_3,
    A7_3,
    A8_3,
    A9_3,
    A10_3,
    A11_3,
    A12_3,
    A13_3,
}

/// How a family's parameters may be changed without changing the
/// isomorphism class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identification {
    None,
    /// `c[index] -> a^2 c[index]`, `a != 0`.
    SquareScale { index: usize },
    /// `β1 -> a^3 β1` or `β1 -> a^3 / β1`, `a != 0`.
    CubeScaleOrInverse,
    /// `β1 -> β1 + (1 + β2) a + a^2` (A_{4,2}).
    ShiftByBeta2,
    /// `β1 -> β1 + a α1 + a + a^2` (A_{7,2}).
    ShiftByAlpha1,
    /// `β1 -> β1 + a + a^2` (A_{10,2}).
    ShiftArtinSchreier,
    /// `β1 -> b^2 (β1 + a^2)`, `b != 0` (A_{11,2}).
    ShiftThenSquareScale,
    /// `β1 -> N(a)^2 / D(a)^3` with `D(t) = β1 t^2 + β1 t + 1`.
    RationalMap(RationalMapKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RationalMapKind {
    /// N(t) = β1² t³ + 6 β1 t² + 3 β1 t + β1 − 2
    A10,
    /// N(t) = β1² t³ + β1 t + β1
    A8_2,
    /// N(t) = β1² t³ + β1 − 2
    A9_3,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 40] = [
        FamilyTag::A1,
        FamilyTag::A2,
        FamilyTag::A3,
        FamilyTag::A4,
        FamilyTag::A5,
        FamilyTag::A6,
        FamilyTag::A7,
        FamilyTag::A8,
        FamilyTag::A9,
        FamilyTag::A10,
        FamilyTag::A11,
        FamilyTag::A12,
        FamilyTag::A13,
        FamilyTag::A1_2,
        FamilyTag::A2_2,
        FamilyTag::A2_2Split,
        FamilyTag::A3_2,
        FamilyTag::A4_2,
        FamilyTag::A5_2,
        FamilyTag::A5_2Split,
        FamilyTag::A6_2,
        FamilyTag::A7_2,
        FamilyTag::A8_2,
        FamilyTag::A9_2,
        FamilyTag::A10_2,
        FamilyTag::A11_2,
        FamilyTag::A12_2,
        FamilyTag::A1_3,
        FamilyTag::A2_3,
        FamilyTag::A3_3,
        FamilyTag::A4_3,
        FamilyTag::A5_3,
        FamilyTag::A6_3,
        FamilyTag::A7_3,
        FamilyTag::A8_3,
        FamilyTag::A9_3,
        FamilyTag::A10_3,
        FamilyTag::A11_3,
        FamilyTag::A12_3,
        FamilyTag::A13_3,
    ];

    pub fn regime(self) -> Regime {
        use FamilyTag::*;
        match self {
            A1 | A2 | A3 | A4 | A5 | A6 | A7 | A8 | A9 | A10 | A11 | A12 | A13 => {
                Regime::CharNot2Or3
            }
            A1_2 | A2_2 | A2_2Split | A3_2 | A4_2 | A5_2 | A5_2Split | A6_2 | A7_2 | A8_2
            | A9_2 | A10_2 | A11_2 | A12_2 => Regime::Char2,
            _ => Regime::Char3,
        }
    }

    /// Position in its regime's list, starting at 1 (split forms share the
    /// number of their parent family).
    pub fn number(self) -> u8 {
        use FamilyTag::*;
        match self {
            A1 | A1_2 | A1_3 => 1,
            A2 | A2_2 | A2_2Split | A2_3 => 2,
            A3 | A3_2 | A3_3 => 3,
            A4 | A4_2 | A4_3 => 4,
            A5 | A5_2 | A5_2Split | A5_3 => 5,
            A6 | A6_2 | A6_3 => 6,
            A7 | A7_2 | A7_3 => 7,
            A8 | A8_2 | A8_3 => 8,
            A9 | A9_2 | A9_3 => 9,
            A10 | A10_2 | A10_3 => 10,
            A11 | A11_2 | A11_3 => 11,
            A12 | A12_2 | A12_3 => 12,
            A13 | A13_3 => 13,
        }
    }

    pub fn is_split(self) -> bool {
        matches!(self, FamilyTag::A2_2Split | FamilyTag::A5_2Split)
    }

    /// Machine name: `A3`, `A3_2`, `A2_2s`, `A10_3`.
    pub fn name(self) -> String {
        let n = self.number();
        match (self.regime(), self.is_split()) {
            (Regime::CharNot2Or3, _) => format!("A{n}"),
            (Regime::Char2, false) => format!("A{n}_2"),
            (Regime::Char2, true) => format!("A{n}_2s"),
            (Regime::Char3, _) => format!("A{n}_3"),
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        FamilyTag::ALL.into_iter().find(|t| t.name() == name)
    }

    pub fn param_names(self) -> &'static [&'static str] {
        use FamilyTag::*;
        match self {
            A1 | A1_2 | A1_3 => &["α1", "α2", "α4", "β1"],
            A2 | A3 | A2_2 | A3_2 | A2_3 | A3_3 => &["α1", "α4", "β2"],
            A4 | A4_3 => &["β1", "β2"],
            A4_2 => &["α1", "β1", "β2"],
            A5 | A5_3 | A2_2Split => &["α1"],
            A6 | A7 | A5_2 | A6_2 | A6_3 | A7_3 => &["α1", "α4"],
            A7_2 => &["α1", "β1"],
            A8 | A10 | A11 | A12 | A8_2 | A9_2 | A10_2 | A11_2 | A8_3 | A9_3 | A10_3
            | A11_3 => &["β1"],
            A9 | A13 | A5_2Split | A12_2 | A12_3 | A13_3 => &[],
        }
    }

    pub fn arity(self) -> usize {
        self.param_names().len()
    }

    pub fn identification(self) -> Identification {
        use FamilyTag::*;
        match self {
            A3 | A7 | A3_2 | A6_2 | A3_3 | A7_3 => Identification::SquareScale { index: 1 },
            A12 | A11_3 => Identification::SquareScale { index: 0 },
            A11 | A9_2 | A10_3 => Identification::CubeScaleOrInverse,
            A4_2 => Identification::ShiftByBeta2,
            A7_2 => Identification::ShiftByAlpha1,
            A10_2 => Identification::ShiftArtinSchreier,
            A11_2 => Identification::ShiftThenSquareScale,
            A10 => Identification::RationalMap(RationalMapKind::A10),
            A8_2 => Identification::RationalMap(RationalMapKind::A8_2),
            A9_3 => Identification::RationalMap(RationalMapKind::A9_3),
            _ => Identification::None,
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonicalError {
    #[error("{tag} belongs to regime {regime} but the field has characteristic {characteristic}")]
    RegimeMismatch {
        tag: FamilyTag,
        regime: Regime,
        characteristic: u64,
    },
    #[error("{tag} takes {expected} parameter(s), got {got}")]
    Arity {
        tag: FamilyTag,
        expected: usize,
        got: usize,
    },
    #[error("{tag}: {condition}")]
    Constraint { tag: FamilyTag, condition: String },
    #[error("cannot compare {0} with {1}")]
    TagMismatch(FamilyTag, FamilyTag),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A family together with a parameter tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalFamily<E> {
    pub tag: FamilyTag,
    pub params: Vec<E>,
}

impl<E: Clone> CanonicalFamily<E> {
    pub fn new(tag: FamilyTag, params: Vec<E>) -> Self {
        Self { tag, params }
    }

    pub fn regime(&self) -> Regime {
        self.tag.regime()
    }

    pub fn record<F: Field<Elem = E>>(&self, f: &F) -> FamilyRecord {
        FamilyRecord {
            regime: self.regime(),
            tag: self.tag.name(),
            params: self.params.iter().map(|x| f.format(x)).collect(),
        }
    }

    /// `A3@c=1,0,2` style label.
    pub fn label<F: Field<Elem = E>>(&self, f: &F) -> String {
        if self.params.is_empty() {
            self.tag.name()
        } else {
            let ps: Vec<String> = self.params.iter().map(|x| f.format(x)).collect();
            format!("{}@c={}", self.tag.name(), ps.join(","))
        }
    }
}

/// Serialized form of a [`CanonicalFamily`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub regime: Regime,
    pub tag: String,
    pub params: Vec<String>,
}

/// Result of classifying an MSC: the zero algebra or one canonical family.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassLabel<E> {
    Trivial,
    Family(CanonicalFamily<E>),
}

impl<E: Clone> ClassLabel<E> {
    pub fn label<F: Field<Elem = E>>(&self, f: &F) -> String {
        match self {
            ClassLabel::Trivial => "trivial".to_string(),
            ClassLabel::Family(fam) => fam.label(f),
        }
    }
}

fn check_shape<F: Field>(f: &F, fam: &CanonicalFamily<F::Elem>) -> Result<(), CanonicalError> {
    let regime = Regime::of_characteristic(f.characteristic());
    if fam.regime() != regime {
        return Err(CanonicalError::RegimeMismatch {
            tag: fam.tag,
            regime: fam.regime(),
            characteristic: f.characteristic(),
        });
    }
    if fam.params.len() != fam.tag.arity() {
        return Err(CanonicalError::Arity {
            tag: fam.tag,
            expected: fam.tag.arity(),
            got: fam.params.len(),
        });
    }
    Ok(())
}

/// Polynomial factors (constant term first) that must have no root in the
/// field, each with a printable description.
fn root_exclusions<F: Field>(f: &F, tag: FamilyTag, params: &[F::Elem]) -> Vec<(String, Vec<F::Elem>)> {
    use FamilyTag::*;
    let n = |x: i64| f.from_i64(x);
    let Some(b) = params.first() else {
        return Vec::new();
    };
    let b2 = f.mul(b, b);
    let quadratic = || ("β1t^2+β1t+1".to_string(), vec![n(1), b.clone(), b.clone()]);
    let cube_minus = || ("β1-t^3".to_string(), vec![b.clone(), n(0), n(0), n(-1)]);
    match tag {
        A10 => vec![
            ("β1t^3-3t-1".to_string(), vec![n(-1), n(-3), n(0), b.clone()]),
            quadratic(),
            (
                "β1^2t^3+6β1t^2+3β1t+β1-2".to_string(),
                vec![
                    f.sub(b, &n(2)),
                    f.mul(&n(3), b),
                    f.mul(&n(6), b),
                    b2,
                ],
            ),
        ],
        A11 | A10_3 => vec![cube_minus()],
        A8_2 => vec![
            ("β1t^3+t+1".to_string(), vec![n(1), n(1), n(0), b.clone()]),
            quadratic(),
        ],
        A9_2 => vec![("β1+t^3".to_string(), vec![b.clone(), n(0), n(0), n(1)])],
        A9_3 => vec![
            cube_minus(),
            quadratic(),
            ("β1^2t^3+β1-2".to_string(), vec![f.sub(b, &n(2)), n(0), n(0), b2]),
        ],
        _ => Vec::new(),
    }
}

/// Checks the family's parameter constraints, naming the first violated one.
pub fn check_constraints<F: Field>(
    f: &F,
    fam: &CanonicalFamily<F::Elem>,
) -> Result<(), CanonicalError> {
    use FamilyTag::*;
    check_shape(f, fam)?;
    let violation = |condition: String| CanonicalError::Constraint {
        tag: fam.tag,
        condition,
    };
    match fam.tag {
        A2 | A6 | A2_2 | A5_2 | A2_3 | A6_3 if f.is_zero(&fam.params[1]) => {
            return Err(violation("α4 ≠ 0 required".to_string()));
        }
        A11 | A10_3 if f.is_zero(&fam.params[0]) => {
            return Err(violation("β1 ≠ 0 required".to_string()));
        }
        _ => {}
    }
    for (name, poly) in root_exclusions(f, fam.tag, &fam.params) {
        // A vanishing factor has every element as a root.
        let root = if poly.iter().all(|c| f.is_zero(c)) {
            Some(f.zero())
        } else {
            f.roots(&poly)?.into_iter().next()
        };
        if let Some(t) = root {
            return Err(violation(format!(
                "{name} must have no root in {}, but t = {} is a root",
                f.spec(),
                f.format(&t)
            )));
        }
    }
    Ok(())
}

pub fn is_admissible<F: Field>(f: &F, fam: &CanonicalFamily<F::Elem>) -> bool {
    check_constraints(f, fam).is_ok()
}

/// The structure-constant matrix of a canonical family, after checking its
/// constraints.
pub fn canonical_msc<F: Field>(
    f: &F,
    fam: &CanonicalFamily<F::Elem>,
) -> Result<Msc<F::Elem>, CanonicalError> {
    check_constraints(f, fam)?;
    Ok(build_msc(f, fam.tag, &fam.params))
}

/// The matrix of a family without the nonvanishing and root-exclusion
/// checks; regime and arity are still enforced.
pub fn canonical_msc_unchecked<F: Field>(
    f: &F,
    fam: &CanonicalFamily<F::Elem>,
) -> Result<Msc<F::Elem>, CanonicalError> {
    check_shape(f, fam)?;
    Ok(build_msc(f, fam.tag, &fam.params))
}

fn build_msc<F: Field>(f: &F, tag: FamilyTag, c: &[F::Elem]) -> Msc<F::Elem> {
    use FamilyTag::*;
    let n = |x: i64| f.from_i64(x);
    let add = |x: &F::Elem, y: &F::Elem| f.add(x, y);
    let sub = |x: &F::Elem, y: &F::Elem| f.sub(x, y);
    let neg = |x: &F::Elem| f.neg(x);
    let one = n(1);
    let zero = n(0);
    let z = || zero.clone();
    match tag {
        A1 | A1_3 => Msc::new(
            [c[0].clone(), c[1].clone(), add(&one, &c[1]), c[2].clone()],
            [c[3].clone(), neg(&c[0]), sub(&one, &c[0]), neg(&c[1])],
        ),
        A2 | A2_3 => Msc::new(
            [c[0].clone(), z(), z(), c[1].clone()],
            [one.clone(), c[2].clone(), sub(&one, &c[0]), z()],
        ),
        A3 | A3_3 => Msc::new(
            [c[0].clone(), z(), z(), c[1].clone()],
            [z(), c[2].clone(), sub(&one, &c[0]), z()],
        ),
        A4 | A4_3 => Msc::new(
            [z(), one.clone(), one.clone(), z()],
            [c[0].clone(), c[1].clone(), one.clone(), n(-1)],
        ),
        A5 | A5_3 => Msc::new(
            [c[0].clone(), z(), z(), z()],
            [
                one.clone(),
                sub(&f.mul(&n(2), &c[0]), &one),
                sub(&one, &c[0]),
                z(),
            ],
        ),
        A6 | A6_3 => Msc::new(
            [c[0].clone(), z(), z(), c[1].clone()],
            [one.clone(), sub(&one, &c[0]), neg(&c[0]), z()],
        ),
        A7 | A7_3 => Msc::new(
            [c[0].clone(), z(), z(), c[1].clone()],
            [z(), sub(&one, &c[0]), neg(&c[0]), z()],
        ),
        A8 | A8_3 => Msc::new(
            [z(), one.clone(), one.clone(), z()],
            [c[0].clone(), one.clone(), z(), n(-1)],
        ),
        A9 => {
            let third = f.inv(&n(3)).expect("characteristic is not 3");
            Msc::new(
                [third.clone(), z(), z(), z()],
                [one.clone(), f.mul(&n(2), &third), neg(&third), z()],
            )
        }
        A10 | A9_3 => Msc::new(
            [z(), one.clone(), one.clone(), one.clone()],
            [c[0].clone(), z(), z(), n(-1)],
        ),
        A11 | A10_3 | A9_2 => Msc::new([z(), z(), z(), one.clone()], [c[0].clone(), z(), z(), z()]),
        A12 | A11_3 => Msc::new(
            [z(), one.clone(), one.clone(), z()],
            [c[0].clone(), z(), z(), n(-1)],
        ),
        A13 | A12_2 | A13_3 => Msc::new([z(), z(), z(), z()], [one.clone(), z(), z(), z()]),
        A1_2 => Msc::new(
            [c[0].clone(), c[1].clone(), add(&c[1], &one), c[2].clone()],
            [c[3].clone(), c[0].clone(), add(&one, &c[0]), c[1].clone()],
        ),
        A2_2 => Msc::new(
            [c[0].clone(), z(), z(), c[1].clone()],
            [one.clone(), c[2].clone(), add(&one, &c[0]), z()],
        ),
        A2_2Split => Msc::new(
            [c[0].clone(), z(), z(), z()],
            [one.clone(), one.clone(), add(&one, &c[0]), z()],
        ),
        A3_2 => Msc::new(
            [c[0].clone(), z(), z(), c[1].clone()],
            [z(), c[2].clone(), add(&one, &c[0]), z()],
        ),
        A4_2 => Msc::new(
            [c[0].clone(), one.clone(), one.clone(), z()],
            [c[1].clone(), c[2].clone(), add(&one, &c[0]), one.clone()],
        ),
        A5_2 => Msc::new(
            [c[0].clone(), z(), z(), c[1].clone()],
            [one.clone(), add(&one, &c[0]), c[0].clone(), z()],
        ),
        A5_2Split => Msc::new(
            [one.clone(), z(), z(), z()],
            [one.clone(), z(), one.clone(), z()],
        ),
        A6_2 => Msc::new(
            [c[0].clone(), z(), z(), c[1].clone()],
            [z(), add(&one, &c[0]), c[0].clone(), z()],
        ),
        A7_2 => Msc::new(
            [c[0].clone(), one.clone(), one.clone(), z()],
            [c[1].clone(), add(&one, &c[0]), c[0].clone(), one.clone()],
        ),
        A8_2 => Msc::new(
            [z(), one.clone(), one.clone(), one.clone()],
            [c[0].clone(), z(), z(), one.clone()],
        ),
        A10_2 => Msc::new(
            [one.clone(), one.clone(), one.clone(), z()],
            [c[0].clone(), one.clone(), one.clone(), one.clone()],
        ),
        A11_2 => Msc::new(
            [z(), one.clone(), one.clone(), z()],
            [c[0].clone(), z(), z(), one.clone()],
        ),
        A12_3 => Msc::new(
            [one.clone(), z(), z(), z()],
            [one.clone(), n(-1), n(-1), z()],
        ),
    }
}

/// Witness of a parameter identification. `values` holds `a` (and `b` for
/// A_{11,2}); it is empty when the two tuples are identical. `inverse` marks
/// the `a^3 / β1` branch of the cube identification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness<E> {
    pub values: Vec<E>,
    pub inverse: bool,
}

impl<E> Witness<E> {
    pub fn identical() -> Self {
        Self {
            values: Vec::new(),
            inverse: false,
        }
    }
}

fn rational_map_parts<F: Field>(
    f: &F,
    kind: RationalMapKind,
    b: &F::Elem,
) -> (Vec<F::Elem>, Vec<F::Elem>) {
    let n = |x: i64| f.from_i64(x);
    let b2 = f.mul(b, b);
    let numerator = match kind {
        RationalMapKind::A10 => vec![
            f.sub(b, &n(2)),
            f.mul(&n(3), b),
            f.mul(&n(6), b),
            b2,
        ],
        RationalMapKind::A8_2 => vec![b.clone(), b.clone(), n(0), b2],
        RationalMapKind::A9_3 => vec![f.sub(b, &n(2)), n(0), n(0), b2],
    };
    let denominator = vec![n(1), b.clone(), b.clone()];
    (numerator, denominator)
}

/// Image of `params` under the family's identification for one witness,
/// or `None` when the witness is outside the allowed range.
pub fn apply_identification<F: Field>(
    f: &F,
    tag: FamilyTag,
    params: &[F::Elem],
    witness: &Witness<F::Elem>,
) -> Option<Vec<F::Elem>> {
    if witness.values.is_empty() {
        return Some(params.to_vec());
    }
    let a = &witness.values[0];
    let mut out = params.to_vec();
    match tag.identification() {
        Identification::None => return None,
        Identification::SquareScale { index } => {
            if f.is_zero(a) {
                return None;
            }
            out[index] = f.mul(&f.mul(a, a), &params[index]);
        }
        Identification::CubeScaleOrInverse => {
            if f.is_zero(a) {
                return None;
            }
            let cube = f.pow(a, 3);
            out[0] = if witness.inverse {
                f.div(&cube, &params[0]).ok()?
            } else {
                f.mul(&cube, &params[0])
            };
        }
        Identification::ShiftByBeta2 => {
            let lin = f.mul(&f.add(&f.one(), &params[2]), a);
            out[1] = f.add(&f.add(&params[1], &lin), &f.mul(a, a));
        }
        Identification::ShiftByAlpha1 => {
            let shift = f.add(&f.add(&f.mul(a, &params[0]), a), &f.mul(a, a));
            out[1] = f.add(&params[1], &shift);
        }
        Identification::ShiftArtinSchreier => {
            out[0] = f.add(&f.add(&params[0], a), &f.mul(a, a));
        }
        Identification::ShiftThenSquareScale => {
            let b = witness.values.get(1)?;
            if f.is_zero(b) {
                return None;
            }
            out[0] = f.mul(&f.mul(b, b), &f.add(&params[0], &f.mul(a, a)));
        }
        Identification::RationalMap(kind) => {
            let (num, den) = rational_map_parts(f, kind, &params[0]);
            let d = f.eval_poly(&den, a);
            if f.is_zero(&d) {
                return None;
            }
            let nv = f.eval_poly(&num, a);
            out[0] = f.div(&f.mul(&nv, &nv), &f.pow(&d, 3)).ok()?;
        }
    }
    Some(out)
}

/// Every witness for a finite field, in canonical order.
fn witnesses<F: Field>(f: &F, tag: FamilyTag) -> Result<Vec<Witness<F::Elem>>, CanonicalError> {
    let els = f.elements().ok_or(FieldError::InfiniteField)?;
    let single = |inverse: bool| {
        els.iter()
            .map(move |a| Witness {
                values: vec![a.clone()],
                inverse,
            })
            .collect::<Vec<_>>()
    };
    Ok(match tag.identification() {
        Identification::None => Vec::new(),
        Identification::CubeScaleOrInverse => {
            let mut w = single(false);
            w.extend(single(true));
            w
        }
        Identification::ShiftThenSquareScale => els
            .iter()
            .flat_map(|a| {
                els.iter().filter(|b| !f.is_zero(b)).map(move |b| Witness {
                    values: vec![a.clone(), b.clone()],
                    inverse: false,
                })
            })
            .collect(),
        _ => single(false),
    })
}

/// Whether two parameter tuples of one family are related by its stated
/// identification; returns the first witness found.
///
/// Over finite fields every witness is tried. Over the rationals the
/// witnesses are the rational roots of the polynomial relation between
/// source and target, which decides the question exactly.
pub fn param_equivalent<F: Field>(
    f: &F,
    fam1: &CanonicalFamily<F::Elem>,
    fam2: &CanonicalFamily<F::Elem>,
) -> Result<Option<Witness<F::Elem>>, CanonicalError> {
    if fam1.tag != fam2.tag {
        return Err(CanonicalError::TagMismatch(fam1.tag, fam2.tag));
    }
    check_shape(f, fam1)?;
    check_shape(f, fam2)?;
    if fam1.params == fam2.params {
        return Ok(Some(Witness::identical()));
    }
    if f.elements().is_some() {
        return Ok(witnesses(f, fam1.tag)?.into_iter().find(|w| {
            apply_identification(f, fam1.tag, &fam1.params, w).as_deref()
                == Some(fam2.params.as_slice())
        }));
    }
    algebraic_witness(f, fam1, fam2)
}

fn algebraic_witness<F: Field>(
    f: &F,
    fam1: &CanonicalFamily<F::Elem>,
    fam2: &CanonicalFamily<F::Elem>,
) -> Result<Option<Witness<F::Elem>>, CanonicalError> {
    let (src, dst) = (&fam1.params, &fam2.params);
    let n = |x: i64| f.from_i64(x);
    let others_equal = |skip: usize| {
        src.iter()
            .zip(dst)
            .enumerate()
            .all(|(i, (x, y))| i == skip || x == y)
    };
    let single = |a: F::Elem, inverse: bool| Witness {
        values: vec![a],
        inverse,
    };
    match fam1.tag.identification() {
        Identification::None => Ok(None),
        Identification::SquareScale { index } => {
            if !others_equal(index) || f.is_zero(&src[index]) || f.is_zero(&dst[index]) {
                return Ok(None);
            }
            let ratio = f.div(&dst[index], &src[index])?;
            let roots = f.roots(&[f.neg(&ratio), n(0), n(1)])?;
            Ok(roots.into_iter().next().map(|a| single(a, false)))
        }
        Identification::CubeScaleOrInverse => {
            if f.is_zero(&src[0]) || f.is_zero(&dst[0]) {
                return Ok(None);
            }
            let direct = f.div(&dst[0], &src[0])?;
            if let Some(a) = f.roots(&[f.neg(&direct), n(0), n(0), n(1)])?.into_iter().next() {
                return Ok(Some(single(a, false)));
            }
            let inverted = f.mul(&dst[0], &src[0]);
            Ok(f
                .roots(&[f.neg(&inverted), n(0), n(0), n(1)])?
                .into_iter()
                .next()
                .map(|a| single(a, true)))
        }
        Identification::RationalMap(kind) => {
            let (num, den) = rational_map_parts(f, kind, &src[0]);
            // N(a)^2 - target * D(a)^3 = 0 with D(a) != 0.
            let num_sq = poly_mul(f, &num, &num);
            let den_cu = poly_mul(f, &poly_mul(f, &den, &den), &den);
            let len = num_sq.len().max(den_cu.len());
            let relation: Vec<F::Elem> = (0..len)
                .map(|i| {
                    let x = num_sq.get(i).cloned().unwrap_or_else(|| f.zero());
                    let y = den_cu.get(i).cloned().unwrap_or_else(|| f.zero());
                    f.sub(&x, &f.mul(&dst[0], &y))
                })
                .collect();
            if relation.iter().all(|c| f.is_zero(c)) {
                return Ok(Some(single(f.zero(), false)));
            }
            Ok(f
                .roots(&relation)?
                .into_iter()
                .find(|a| !f.is_zero(&f.eval_poly(&den, a)))
                .map(|a| single(a, false)))
        }
        // The remaining identifications belong to characteristic 2 only.
        _ => Err(FieldError::InfiniteField.into()),
    }
}

fn poly_mul<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    out
}

/// All admissible parameter tuples of a family over a finite field, in
/// lexicographic order.
pub fn admissible_params<F: Field>(
    f: &F,
    tag: FamilyTag,
) -> Result<Vec<Vec<F::Elem>>, CanonicalError> {
    Ok(all_tuples(f, tag.arity())?
        .into_iter()
        .filter(|c| is_admissible(f, &CanonicalFamily::new(tag, c.clone())))
        .collect())
}

/// All tuples of the given length over a finite field, lexicographically.
pub fn all_tuples<F: Field>(f: &F, arity: usize) -> Result<Vec<Vec<F::Elem>>, CanonicalError> {
    let els = f.elements().ok_or(FieldError::InfiniteField)?;
    let mut out: Vec<Vec<F::Elem>> = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                els.iter().map(move |x| {
                    let mut t = prefix.clone();
                    t.push(x.clone());
                    t
                })
            })
            .collect();
    }
    Ok(out)
}

/// Every admissible parameter tuple reachable from `params` by one
/// application of the identification (including `params` itself).
pub fn identification_class<F: Field>(
    f: &F,
    tag: FamilyTag,
    params: &[F::Elem],
) -> Result<Vec<Vec<F::Elem>>, CanonicalError> {
    let mut out = vec![params.to_vec()];
    for w in witnesses(f, tag)? {
        if let Some(img) = apply_identification(f, tag, params, &w) {
            if is_admissible(f, &CanonicalFamily::new(tag, img.clone())) {
                out.push(img);
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// One representative per identification class of every family of the
/// field's regime, plus the trivial algebra (listed first).
pub fn enumerate_canonical<F: Field>(f: &F) -> Result<Vec<ClassLabel<F::Elem>>, CanonicalError> {
    f.elements().ok_or(FieldError::InfiniteField)?;
    let regime = Regime::of_characteristic(f.characteristic());
    let mut out = vec![ClassLabel::Trivial];
    for &tag in regime.families() {
        let mut seen: HashSet<Vec<F::Elem>> = HashSet::new();
        for params in admissible_params(f, tag)? {
            if seen.contains(&params) {
                continue;
            }
            seen.extend(identification_class(f, tag, &params)?);
            out.push(ClassLabel::Family(CanonicalFamily::new(tag, params)));
        }
    }
    Ok(out)
}

/// Source parameters, witness, image parameters.
pub type IdentificationSample<E> = (Vec<E>, Witness<E>, Vec<E>);

/// Up to `limit` samples with source and image both admissible and
/// distinct, in canonical order.
pub fn identification_samples<F: Field>(
    f: &F,
    tag: FamilyTag,
    limit: usize,
) -> Result<Vec<IdentificationSample<F::Elem>>, CanonicalError> {
    let mut out = Vec::new();
    if tag.identification() == Identification::None {
        return Ok(out);
    }
    'outer: for params in admissible_params(f, tag)? {
        for w in witnesses(f, tag)? {
            let Some(img) = apply_identification(f, tag, &params, &w) else {
                continue;
            };
            if img != params && is_admissible(f, &CanonicalFamily::new(tag, img.clone())) {
                out.push((params.clone(), w, img));
                if out.len() >= limit {
                    break 'outer;
                }
            }
        }
    }
    Ok(out)
}
