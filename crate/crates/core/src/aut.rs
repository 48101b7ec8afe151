//! Automorphism groups: exhaustive scans of GL(2, q) and the closed-form
//! table per canonical family.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::canonical::{
    canonical_msc_unchecked, check_constraints, CanonicalError, CanonicalFamily, FamilyTag,
};
use crate::der::mat2_strings;
use crate::errata::{Erratum, Reading};
use crate::field::{Field, FieldError};
use crate::msc::{p_invariant, satisfies_aut_equation, Mat2, Msc};

/// Largest field for exhaustive automorphism scans.
pub const MAX_SCAN_FIELD: u64 = 1 << 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("field of order {0} is too large for an exhaustive scan (limit {MAX_SCAN_FIELD})")]
    TooLarge(u64),
    #[error("the group is infinite over {0}")]
    Infinite(String),
    #[error(transparent)]
    Canonical(#[from] CanonicalError),
}

/// A subgroup family with free parameters, e.g. `{(1 0; c 1) : c ∈ F}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pattern {
    /// (1 0; c 1)
    LowerUnipotent,
    /// (1 0; 0 d), d ≠ 0
    DiagSecond,
    /// (1 0; c d), d ≠ 0
    LowerOneRow,
    /// (a 0; c a²), a ≠ 0
    ScaledLower,
    /// (a 0; 0 1), a ≠ 0
    DiagFirst,
    /// (a b; 0 1), a ≠ 0
    UpperAffine,
}

impl Pattern {
    pub fn describe(self) -> &'static str {
        match self {
            Pattern::LowerUnipotent => "{(1 0; c 1) : c in F}",
            Pattern::DiagSecond => "{(1 0; 0 d) : d in F, d != 0}",
            Pattern::LowerOneRow => "{(1 0; c d) : c, d in F, d != 0}",
            Pattern::ScaledLower => "{(a 0; c a^2) : a, c in F, a != 0}",
            Pattern::DiagFirst => "{(a 0; 0 1) : a in F, a != 0}",
            Pattern::UpperAffine => "{(a b; 0 1) : a, b in F, a != 0}",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Pattern::LowerUnipotent | Pattern::DiagSecond | Pattern::DiagFirst => 1,
            _ => 2,
        }
    }

    /// The member for the given parameters (the second is ignored by
    /// one-parameter patterns), or `None` if they are outside the range.
    pub fn instantiate<F: Field>(self, f: &F, x: &F::Elem, y: &F::Elem) -> Option<Mat2<F::Elem>> {
        let (zero, one) = (f.zero(), f.one());
        let m = match self {
            Pattern::LowerUnipotent => Mat2::new(one.clone(), zero, x.clone(), one),
            Pattern::DiagSecond if !f.is_zero(x) => Mat2::new(one, zero.clone(), zero, x.clone()),
            Pattern::LowerOneRow if !f.is_zero(y) => Mat2::new(one, zero, x.clone(), y.clone()),
            Pattern::ScaledLower if !f.is_zero(x) => {
                Mat2::new(x.clone(), zero, y.clone(), f.mul(x, x))
            }
            Pattern::DiagFirst if !f.is_zero(x) => Mat2::new(x.clone(), zero.clone(), zero, one),
            Pattern::UpperAffine if !f.is_zero(x) => Mat2::new(x.clone(), y.clone(), zero, one),
            _ => return None,
        };
        Some(m)
    }

    fn materialize<F: Field>(self, f: &F, els: &[F::Elem]) -> Vec<Mat2<F::Elem>> {
        let zero = f.zero();
        let seconds: &[F::Elem] = if self.arity() == 2 { els } else { std::slice::from_ref(&zero) };
        els.iter()
            .flat_map(|x| seconds.iter().filter_map(move |y| self.instantiate(f, x, y)))
            .collect()
    }
}

/// An automorphism group: explicit members plus parametric patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupDescription<E> {
    /// Sorted, without duplicates.
    pub elements: Vec<Mat2<E>>,
    pub patterns: Vec<Pattern>,
    /// Coincidences between separately listed members, found while building.
    pub notes: Vec<String>,
}

impl<E: Clone + Ord> GroupDescription<E> {
    pub fn explicit(mut elements: Vec<Mat2<E>>) -> Self {
        elements.sort();
        elements.dedup();
        Self {
            elements,
            patterns: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn pattern(p: Pattern) -> Self {
        Self {
            elements: Vec::new(),
            patterns: vec![p],
            notes: Vec::new(),
        }
    }

    /// All members over a finite field, sorted and deduplicated.
    pub fn materialize<F: Field<Elem = E>>(&self, f: &F) -> Result<Vec<Mat2<E>>, AutError> {
        if self.patterns.is_empty() {
            return Ok(self.elements.clone());
        }
        let els = f
            .elements()
            .ok_or_else(|| AutError::Infinite(f.spec().to_string()))?;
        let mut out = self.elements.clone();
        for p in &self.patterns {
            out.extend(p.materialize(f, &els));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    pub fn record<F: Field<Elem = E>>(&self, f: &F) -> GroupRecord {
        let order = group_order(self, f).ok();
        let elements = if self.patterns.is_empty() || f.elements().is_some() {
            self.materialize(f)
                .ok()
                .map(|els| els.iter().map(|m| mat2_strings(f, m)).collect())
        } else {
            Some(self.elements.iter().map(|m| mat2_strings(f, m)).collect())
        };
        GroupRecord {
            order,
            elements,
            symbolic: self.patterns.iter().map(|p| p.describe().to_string()).collect(),
            notes: self.notes.clone(),
        }
    }
}

/// Serialized form of a [`GroupDescription`]. Over infinite fields
/// `elements` lists only the explicit members and `order` is absent when a
/// pattern is present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupRecord {
    pub order: Option<u64>,
    pub elements: Option<Vec<[[String; 2]; 2]>>,
    pub symbolic: Vec<String>,
    pub notes: Vec<String>,
}

pub fn group_order<F: Field>(g: &GroupDescription<F::Elem>, f: &F) -> Result<u64, AutError> {
    Ok(g.materialize(f)?.len() as u64)
}

/// Result of an exhaustive scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForceAut<E> {
    pub group: GroupDescription<E>,
    /// Whether a row of P(A) equal to (1, 0) restricted the scan to
    /// `g = (1 0; c d)`.
    pub filter_used: bool,
}

/// Every invertible `g` with `gA = A(g⊗g)`, in lexicographic order.
pub fn automorphisms_bruteforce<F: Field>(
    f: &F,
    a: &Msc<F::Elem>,
) -> Result<BruteForceAut<F::Elem>, AutError> {
    automorphisms_bruteforce_with(f, a, true)
}

/// As [`automorphisms_bruteforce`], with the P(A) row filter optional.
pub fn automorphisms_bruteforce_with<F: Field>(
    f: &F,
    a: &Msc<F::Elem>,
    allow_filter: bool,
) -> Result<BruteForceAut<F::Elem>, AutError> {
    let els = scan_elements(f)?;
    let p = p_invariant(f, a);
    let unit_row = [f.one(), f.zero()];
    let filter_used = allow_filter && (p.row1() == unit_row || p.row2() == unit_row);
    let firsts: Vec<(F::Elem, F::Elem)> = if filter_used {
        vec![(f.one(), f.zero())]
    } else {
        els.iter()
            .flat_map(|x| els.iter().map(move |y| (x.clone(), y.clone())))
            .collect()
    };
    let mut found: Vec<Mat2<F::Elem>> = firsts
        .par_iter()
        .flat_map_iter(|(x, y)| {
            let els = &els;
            els.iter().flat_map(move |z| {
                els.iter().filter_map(move |w| {
                    let g = Mat2::new(x.clone(), y.clone(), z.clone(), w.clone());
                    (g.is_invertible(f) && satisfies_aut_equation(f, a, &g)).then_some(g)
                })
            })
        })
        .collect();
    found.sort();
    Ok(BruteForceAut {
        group: GroupDescription::explicit(found),
        filter_used,
    })
}

fn scan_elements<F: Field>(f: &F) -> Result<Vec<F::Elem>, AutError> {
    let q = f
        .size()
        .ok_or(AutError::Field(FieldError::InfiniteField))?;
    if q > MAX_SCAN_FIELD {
        return Err(AutError::TooLarge(q));
    }
    Ok(f.elements().expect("finite field"))
}

/// All invertible 2x2 matrices over a finite field, lexicographically.
pub fn general_linear_group<F: Field>(f: &F) -> Result<Vec<Mat2<F::Elem>>, AutError> {
    let els = scan_elements(f)?;
    let mut out = Vec::new();
    for x in &els {
        for y in &els {
            for z in &els {
                for w in &els {
                    let g = Mat2::new(x.clone(), y.clone(), z.clone(), w.clone());
                    if g.is_invertible(f) {
                        out.push(g);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Solutions of `poly = 0`; a vanishing polynomial is solved by every
/// element of a finite field.
fn solutions<F: Field>(f: &F, poly: &[F::Elem]) -> Result<Vec<F::Elem>, AutError> {
    if poly.iter().all(|c| f.is_zero(c)) {
        return f
            .elements()
            .ok_or_else(|| AutError::Infinite(f.spec().to_string()));
    }
    Ok(f.roots(poly)?)
}

/// The tabulated automorphism group of a canonical family.
pub fn automorphisms_closed_form<F: Field>(
    f: &F,
    fam: &CanonicalFamily<F::Elem>,
    reading: &Reading,
) -> Result<GroupDescription<F::Elem>, AutError> {
    check_constraints(f, fam)?;
    automorphisms_closed_form_unchecked(f, fam, reading)
}

/// The table entry evaluated without the family's constraints. Conditional
/// members are still produced exactly when their defining equation holds.
pub fn automorphisms_closed_form_unchecked<F: Field>(
    f: &F,
    fam: &CanonicalFamily<F::Elem>,
    reading: &Reading,
) -> Result<GroupDescription<F::Elem>, AutError> {
    use FamilyTag::*;
    canonical_msc_unchecked(f, fam)?;
    let n = |x: i64| f.from_i64(x);
    let m = |a: i64, b: i64, c: i64, d: i64| Mat2::new(n(a), n(b), n(c), n(d));
    let id = Mat2::identity(f);
    let c = &fam.params;
    let nonzero = |x: &F::Elem| !f.is_zero(x);
    let plus_minus = || GroupDescription::explicit(vec![id.clone(), m(1, 0, 0, -1)]);
    let group = match fam.tag {
        A1 | A2 | A4 | A6 | A8 | A1_2 | A2_2 | A5_2 | A1_3 | A2_3 | A4_3 | A6_3 | A8_3 => {
            GroupDescription::explicit(vec![id])
        }
        A3 | A3_3 => {
            let two_a1_minus_1 = f.sub(&f.mul(&n(2), &c[0]), &n(1));
            if nonzero(&c[1]) {
                plus_minus()
            } else if c[2] != two_a1_minus_1 {
                GroupDescription::pattern(Pattern::DiagSecond)
            } else {
                GroupDescription::pattern(Pattern::LowerOneRow)
            }
        }
        A7 | A7_3 => {
            if nonzero(&c[1]) {
                plus_minus()
            } else if f.characteristic() == 3 || c[0] != f.inv(&n(3)).expect("char is not 3") {
                GroupDescription::pattern(Pattern::DiagSecond)
            } else {
                GroupDescription::pattern(Pattern::LowerOneRow)
            }
        }
        A5 | A9 | A5_3 | A12_3 | A2_2Split | A5_2Split => {
            GroupDescription::pattern(Pattern::LowerUnipotent)
        }
        A11 | A9_2 | A10_3 => {
            let cube_roots = solutions(f, &[n(-1), n(0), n(0), n(1)])?;
            GroupDescription::explicit(
                cube_roots
                    .into_iter()
                    .map(|x| Mat2::diag(f, x.clone(), f.mul(&x, &x)))
                    .collect(),
            )
        }
        A13 | A12_2 | A13_3 => GroupDescription::pattern(Pattern::ScaledLower),
        A12 => {
            if nonzero(&c[0]) {
                a12_group(f, &c[0])?
            } else {
                GroupDescription::pattern(Pattern::DiagFirst)
            }
        }
        A11_3 => {
            if nonzero(&c[0]) {
                GroupDescription::explicit(vec![id, m(-1, 0, 0, 1)])
            } else if reading.is_verbatim(Erratum::A11c3ZeroAut) {
                GroupDescription::pattern(Pattern::DiagFirst)
            } else {
                GroupDescription::pattern(Pattern::UpperAffine)
            }
        }
        A3_2 => {
            if nonzero(&c[1]) {
                GroupDescription::explicit(vec![id])
            } else if c[2] != n(1) {
                GroupDescription::pattern(Pattern::DiagSecond)
            } else {
                GroupDescription::pattern(Pattern::LowerOneRow)
            }
        }
        A6_2 => {
            if nonzero(&c[1]) {
                GroupDescription::explicit(vec![id])
            } else if c[0] != n(1) {
                GroupDescription::pattern(Pattern::DiagSecond)
            } else {
                GroupDescription::pattern(Pattern::LowerOneRow)
            }
        }
        A4_2 => GroupDescription::explicit(vec![
            id,
            Mat2::new(n(1), n(0), f.add(&n(1), &c[2]), n(1)),
        ]),
        A7_2 => GroupDescription::explicit(vec![
            id,
            Mat2::new(n(1), n(0), f.add(&c[0], &n(1)), n(1)),
        ]),
        A10 => a10_group(f, &c[0], reading)?,
        A9_3 => a9c3_group(f, &c[0])?,
        A8_2 => a8c2_group(f, &c[0])?,
        A10_2 => a10c2_group(f, &c[0])?,
        A11_2 => a11c2_group(f, &c[0])?,
    };
    Ok(group)
}

/// Adds conditional members, recording any that repeat an earlier one.
fn collect_members<E: Clone + Ord + std::fmt::Debug>(
    base: Vec<Mat2<E>>,
    families: Vec<(&str, Vec<Mat2<E>>)>,
) -> GroupDescription<E> {
    let mut all = base;
    let mut notes = Vec::new();
    for (name, members) in families {
        for g in members {
            if all.contains(&g) {
                notes.push(format!("{name} member {g:?} repeats an earlier member"));
            } else {
                all.push(g);
            }
        }
    }
    let mut group = GroupDescription::explicit(all);
    group.notes = notes;
    group
}

fn a12_group<F: Field>(f: &F, b1: &F::Elem) -> Result<GroupDescription<F::Elem>, AutError> {
    let n = |x: i64| f.from_i64(x);
    let half = f.inv(&n(2))?;
    let mut members = Vec::new();
    // β1 = 3/(4b²)  <=>  4β1 b² − 3 = 0
    for b in solutions(f, &[n(-3), n(0), f.mul(&n(4), b1)])? {
        if f.is_zero(&b) {
            continue;
        }
        let c = f.div(&n(3), &f.mul(&n(4), &b))?;
        members.push(Mat2::new(half.clone(), b.clone(), c.clone(), f.neg(&half)));
        members.push(Mat2::new(f.neg(&half), b, f.neg(&c), f.neg(&half)));
    }
    Ok(collect_members(
        vec![Mat2::identity(f), Mat2::diag(f, n(-1), n(1))],
        vec![("b-family", members)],
    ))
}

fn a10_group<F: Field>(
    f: &F,
    b1: &F::Elem,
    reading: &Reading,
) -> Result<GroupDescription<F::Elem>, AutError> {
    let n = |x: i64| f.from_i64(x);
    let four_minus = f.sub(&n(4), b1);
    // (1+2d)² = β1(d²+d+1)
    let second_eq = [f.sub(&n(1), b1), four_minus.clone(), four_minus.clone()];
    // (d−1)(1+2d)² = β1 d³
    let third_eq = [n(-1), n(-3), n(0), four_minus];
    let mut second = Vec::new();
    for d in solutions(f, &second_eq)? {
        let den = f.add(&f.add(&f.mul(&d, &d), &d), &n(1));
        let t = f.add(&n(1), &f.mul(&n(2), &d));
        if f.is_zero(&den) || f.is_zero(&t) {
            continue;
        }
        second.push(Mat2::new(
            f.sub(&n(-1), &d),
            f.neg(&f.div(&den, &t)?),
            t,
            d,
        ));
    }
    let eleven = if reading.is_verbatim(Erratum::A10ThirdFamilyEntry) {
        n(11)
    } else {
        n(1)
    };
    let mut third = Vec::new();
    for d in solutions(f, &third_eq)? {
        let t = f.add(&n(1), &f.mul(&n(2), &d));
        if f.is_zero(&d) || f.is_zero(&t) {
            continue;
        }
        let top = f.sub(&f.mul(&n(2), &f.mul(&d, &d)), &f.add(&d, &eleven));
        third.push(Mat2::new(
            f.neg(&d),
            f.neg(&f.div(&f.add(&d, &f.mul(&d, &d)), &t)?),
            f.div(&top, &d)?,
            d,
        ));
    }
    Ok(collect_members(
        vec![Mat2::identity(f)],
        vec![("second-family", second), ("third-family", third)],
    ))
}

fn a9c3_group<F: Field>(f: &F, b1: &F::Elem) -> Result<GroupDescription<F::Elem>, AutError> {
    let n = |x: i64| f.from_i64(x);
    let four_minus = f.sub(&n(4), b1);
    let eq = [f.sub(&n(1), b1), four_minus.clone(), four_minus];
    let mut members = Vec::new();
    for d in solutions(f, &eq)? {
        let den = f.add(&f.add(&f.mul(&d, &d), &d), &n(1));
        let t = f.add(&n(1), &f.mul(&n(2), &d));
        if f.is_zero(&den) || f.is_zero(&t) {
            continue;
        }
        let q = f.div(&den, &t)?;
        members.push(Mat2::new(f.sub(&n(-1), &d), f.neg(&q), t.clone(), d.clone()));
        members.push(Mat2::new(d.clone(), q, f.neg(&t), f.sub(&n(-1), &d)));
    }
    Ok(collect_members(vec![Mat2::identity(f)], vec![("d-family", members)]))
}

fn a8c2_group<F: Field>(f: &F, b1: &F::Elem) -> Result<GroupDescription<F::Elem>, AutError> {
    let n = |x: i64| f.from_i64(x);
    let mut first = Vec::new();
    // β1 (d²+d+1) = 1
    for d in solutions(f, &[f.sub(b1, &n(1)), b1.clone(), b1.clone()])? {
        let den = f.add(&f.add(&f.mul(&d, &d), &d), &n(1));
        first.push(Mat2::new(f.add(&n(1), &d), den, n(1), d));
    }
    let mut second = Vec::new();
    // β1 d³ = 1 + d
    for d in solutions(f, &[n(-1), n(-1), n(0), b1.clone()])? {
        if f.is_zero(&d) {
            continue;
        }
        second.push(Mat2::new(
            d.clone(),
            f.add(&d, &f.mul(&d, &d)),
            f.div(&f.add(&n(1), &d), &d)?,
            d,
        ));
    }
    Ok(collect_members(
        vec![Mat2::identity(f)],
        vec![("first-family", first), ("second-family", second)],
    ))
}

fn a10c2_group<F: Field>(f: &F, b1: &F::Elem) -> Result<GroupDescription<F::Elem>, AutError> {
    let n = |x: i64| f.from_i64(x);
    let mut members = Vec::new();
    // β1 = d + d²
    for d in solutions(f, &[f.neg(b1), n(1), n(1)])? {
        let d1 = f.add(&n(1), &d);
        let d2 = f.mul(&d, &d);
        members.push(Mat2::new(d.clone(), n(1), f.add(&n(1), &d2), d.clone()));
        members.push(Mat2::new(d.clone(), n(1), f.add(&d1, &d2), d1.clone()));
        members.push(Mat2::new(d1.clone(), n(1), f.add(&d1, &d2), d.clone()));
        members.push(Mat2::new(d1.clone(), n(1), d2, d1));
    }
    Ok(collect_members(
        vec![Mat2::identity(f), Mat2::new(n(1), n(0), n(1), n(1))],
        vec![("d-family", members)],
    ))
}

fn a11c2_group<F: Field>(f: &F, b1: &F::Elem) -> Result<GroupDescription<F::Elem>, AutError> {
    let n = |x: i64| f.from_i64(x);
    let units = f
        .units()
        .ok_or_else(|| AutError::Infinite(f.spec().to_string()))?;
    let mut members = Vec::new();
    for a in units.into_iter().filter(|a| *a != n(1)) {
        let s = f.add(&n(1), &a);
        // β1 = (c/(1+a))²  <=>  c² = β1 (1+a)²
        for c in solutions(f, &[f.neg(&f.mul(b1, &f.mul(&s, &s))), n(0), n(1)])? {
            members.push(Mat2::new(a.clone(), n(0), c, n(1)));
        }
    }
    Ok(collect_members(vec![Mat2::identity(f)], vec![("a-family", members)]))
}

/// Whether `members` is a subgroup of GL(2): contains I, invertible,
/// closed under products and inverses.
pub fn is_subgroup<F: Field>(f: &F, members: &[Mat2<F::Elem>]) -> bool {
    use std::collections::HashSet;
    let set: HashSet<&Mat2<F::Elem>> = members.iter().collect();
    set.contains(&Mat2::identity(f))
        && members.iter().all(|g| {
            g.inverse(f).is_ok_and(|inv| set.contains(&inv))
                && members.iter().all(|h| set.contains(&g.mul(h, f)))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::canonical_msc;
    use crate::field::{FieldSpec, FiniteField, Rationals};
    use crate::msc::is_automorphism;

    fn gf(q: u64) -> FiniteField {
        FiniteField::new(FieldSpec::of_order(q).unwrap())
    }

    fn fam(tag: FamilyTag, params: &[u32]) -> CanonicalFamily<u32> {
        CanonicalFamily::new(tag, params.to_vec())
    }

    fn brute(f: &FiniteField, tag: FamilyTag, params: &[u32]) -> Vec<Mat2<u32>> {
        let a = canonical_msc(f, &fam(tag, params)).unwrap();
        automorphisms_bruteforce(f, &a).unwrap().group.elements
    }

    #[test]
    fn bruteforce_examples() {
        let f5 = gf(5);
        assert_eq!(brute(&f5, FamilyTag::A1, &[0, 1, 0, 0]), vec![Mat2::identity(&f5)]);
        let a9 = brute(&f5, FamilyTag::A9, &[]);
        assert_eq!(a9, (0..5).map(|c| Mat2::new(1, 0, c, 1)).collect::<Vec<_>>());
        let f7 = gf(7);
        let a11 = brute(&f7, FamilyTag::A11, &[3]);
        assert_eq!(a11, vec![Mat2::new(1, 0, 0, 1), Mat2::new(2, 0, 0, 4), Mat2::new(4, 0, 0, 2)]);
    }

    #[test]
    fn zero_algebra_is_fixed_by_everything() {
        let f = gf(2);
        let all = automorphisms_bruteforce(&f, &Msc::zero(&f)).unwrap();
        assert_eq!(group_order(&all.group, &f).unwrap(), 6);
        assert!(!all.filter_used);
    }

    #[test]
    fn a12_beta3_over_gf13() {
        let f = gf(13);
        let r = Reading::corrected();
        let closed = automorphisms_closed_form(&f, &fam(FamilyTag::A12, &[3]), &r).unwrap();
        let b = brute(&f, FamilyTag::A12, &[3]);
        assert_eq!(closed.materialize(&f).unwrap(), b);
        assert_eq!(b.len(), 6);
        assert!(b.contains(&Mat2::new(6, 6, 8, 6)));
    }

    #[test]
    fn a13_and_a3_orders() {
        let r = Reading::corrected();
        let f5 = gf(5);
        let g = automorphisms_closed_form(&f5, &fam(FamilyTag::A13, &[]), &r).unwrap();
        assert_eq!(g.patterns, vec![Pattern::ScaledLower]);
        assert_eq!(group_order(&g, &f5).unwrap(), 20);
        let f7 = gf(7);
        // α1 = 3, β2 = 2α1 − 1 = 5
        let g = automorphisms_closed_form(&f7, &fam(FamilyTag::A3, &[3, 0, 5]), &r).unwrap();
        assert_eq!(group_order(&g, &f7).unwrap(), 42);
        assert_eq!(g.materialize(&f7).unwrap(), brute(&f7, FamilyTag::A3, &[3, 0, 5]));
    }

    #[test]
    fn filter_never_drops_automorphisms() {
        let f = gf(5);
        for (tag, p) in [
            (FamilyTag::A9, vec![]),
            (FamilyTag::A5, vec![2]),
            (FamilyTag::A3, vec![3, 0, 0]),
            (FamilyTag::A13, vec![]),
        ] {
            let a = canonical_msc(&f, &fam(tag, &p)).unwrap();
            let with = automorphisms_bruteforce_with(&f, &a, true).unwrap();
            let without = automorphisms_bruteforce_with(&f, &a, false).unwrap();
            assert_eq!(with.group, without.group, "{tag}");
        }
    }

    #[test]
    fn a10_verbatim_third_family_is_not_an_automorphism() {
        // β1 = (d−1)(1+2d)²/d³ at d = 2 over GF(7): 1·25/8 = 4/1 = 4.
        let f = gf(7);
        let family = fam(FamilyTag::A10, &[4]);
        let a = canonical_msc_unchecked(&f, &family).unwrap();
        let corrected =
            automorphisms_closed_form_unchecked(&f, &family, &Reading::corrected()).unwrap();
        let verbatim = automorphisms_closed_form_unchecked(
            &f,
            &family,
            &Reading::verbatim([Erratum::A10ThirdFamilyEntry]),
        )
        .unwrap();
        assert!(corrected.elements.iter().all(|g| is_automorphism(&f, &a, g)));
        assert!(verbatim.elements.iter().any(|g| !is_automorphism(&f, &a, g)));
    }

    #[test]
    fn a11c3_zero_reading() {
        let f = gf(3);
        let family = fam(FamilyTag::A11_3, &[0]);
        let b = brute(&f, FamilyTag::A11_3, &[0]);
        let corrected = automorphisms_closed_form(&f, &family, &Reading::corrected()).unwrap();
        assert_eq!(corrected.materialize(&f).unwrap(), b);
        let verbatim =
            automorphisms_closed_form(&f, &family, &Reading::verbatim([Erratum::A11c3ZeroAut]))
                .unwrap();
        assert_ne!(verbatim.materialize(&f).unwrap(), b);
    }

    #[test]
    fn subgroup_check() {
        let f = gf(3);
        assert!(is_subgroup(&f, &general_linear_group(&f).unwrap()));
        assert!(!is_subgroup(&f, &[Mat2::new(1, 0, 1, 1)]));
    }

    #[test]
    fn rational_closed_forms() {
        let f = Rationals::new();
        let q = |s: &str| f.parse(s).unwrap();
        let r = Reading::corrected();
        // 3/(4β1) = 1/4 is a square: b = ±1/2.
        let g = automorphisms_closed_form(&f, &CanonicalFamily::new(FamilyTag::A12, vec![q("3")]), &r)
            .unwrap();
        assert_eq!(g.elements.len(), 6);
        let a = canonical_msc(&f, &CanonicalFamily::new(FamilyTag::A12, vec![q("3")])).unwrap();
        assert!(g.elements.iter().all(|m| is_automorphism(&f, &a, m)));
        let g = automorphisms_closed_form(&f, &CanonicalFamily::new(FamilyTag::A12, vec![q("2")]), &r)
            .unwrap();
        assert_eq!(g.elements.len(), 2);
        let g = automorphisms_closed_form(&f, &CanonicalFamily::new(FamilyTag::A13, vec![]), &r).unwrap();
        assert!(matches!(group_order(&g, &f), Err(AutError::Infinite(_))));
        let sample = Pattern::ScaledLower.instantiate(&f, &q("2/3"), &q("5")).unwrap();
        let a13 = canonical_msc(&f, &CanonicalFamily::new(FamilyTag::A13, vec![])).unwrap();
        assert!(is_automorphism(&f, &a13, &sample));
        let g = automorphisms_closed_form(&f, &CanonicalFamily::new(FamilyTag::A11, vec![q("2")]), &r)
            .unwrap();
        assert_eq!(g.elements, vec![Mat2::identity(&f)]);
    }
}
