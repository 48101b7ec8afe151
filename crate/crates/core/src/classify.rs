//! Isomorphism testing, classification against the canonical lists, and
//! exhaustive orbit censuses over small fields.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::aut::{automorphisms_bruteforce, general_linear_group, AutError};
use crate::canonical::{canonical_msc, enumerate_canonical, CanonicalError, ClassLabel};
use crate::field::{Field, FieldError};
use crate::msc::{kron2, p_invariant, transform_with, Mat2, Mat4, Msc};

/// Largest field for isomorphism witness searches.
pub const MAX_ISO_FIELD: u64 = 64;
/// Largest field for `classify_msc`.
pub const MAX_CLASSIFY_FIELD: u64 = 9;
/// Largest field for the orbit census.
pub const MAX_CENSUS_FIELD: u64 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("field of order {q} exceeds the limit {limit} for {operation}")]
    TooLarge {
        operation: &'static str,
        q: u64,
        limit: u64,
    },
    #[error(transparent)]
    Canonical(#[from] CanonicalError),
    #[error(transparent)]
    Aut(#[from] AutError),
    #[error("no canonical representative is isomorphic to {0}")]
    Unmatched(String),
    #[error("{msc} is isomorphic to several canonical representatives: {labels:?}")]
    Ambiguous { msc: String, labels: Vec<String> },
}

fn check_size<F: Field>(f: &F, operation: &'static str, limit: u64) -> Result<u64, ClassifyError> {
    let q = f.size().ok_or(FieldError::InfiniteField)?;
    if q > limit {
        return Err(ClassifyError::TooLarge { operation, q, limit });
    }
    Ok(q)
}

/// GL(2, q) with each element's `g^-1 ⊗ g^-1`, in lexicographic order.
pub(crate) struct ActingGroup<E> {
    pub elements: Vec<(Mat2<E>, Mat4<E>)>,
}

impl<E: Clone + Ord> ActingGroup<E> {
    pub fn new<F: Field<Elem = E>>(f: &F) -> Result<Self, AutError> {
        let elements = general_linear_group(f)?
            .into_iter()
            .map(|g| {
                let inv = g.inverse(f).expect("invertible");
                let k = kron2(f, &inv, &inv);
                (g, k)
            })
            .collect();
        Ok(Self { elements })
    }
}

/// The lexicographically first `g` with `transform(A, g) = B`.
pub fn are_isomorphic<F: Field>(
    f: &F,
    a: &Msc<F::Elem>,
    b: &Msc<F::Elem>,
) -> Result<Option<Mat2<F::Elem>>, ClassifyError> {
    are_isomorphic_with(f, a, b, true)
}

/// As [`are_isomorphic`], with the P-covariance prefilter optional:
/// a witness must satisfy `P(B) g = P(A)`.
pub fn are_isomorphic_with<F: Field>(
    f: &F,
    a: &Msc<F::Elem>,
    b: &Msc<F::Elem>,
    use_filter: bool,
) -> Result<Option<Mat2<F::Elem>>, ClassifyError> {
    check_size(f, "isomorphism search", MAX_ISO_FIELD)?;
    let (pa, pb) = (p_invariant(f, a).p_matrix, p_invariant(f, b).p_matrix);
    let candidates = general_linear_group(f)?;
    Ok(candidates.into_par_iter().find_first(|g| {
        if use_filter && pb.mul(g, f) != pa {
            return false;
        }
        let inv = g.inverse(f).expect("invertible");
        transform_with(f, a, g, &kron2(f, &inv, &inv)) == *b
    }))
}

/// The canonical representative isomorphic to `A`.
pub fn classify_msc<F: Field>(
    f: &F,
    a: &Msc<F::Elem>,
) -> Result<ClassLabel<F::Elem>, ClassifyError> {
    check_size(f, "classification", MAX_CLASSIFY_FIELD)?;
    if a.is_trivial(f) {
        return Ok(ClassLabel::Trivial);
    }
    let group = ActingGroup::new(f)?;
    let orbit: std::collections::HashSet<Msc<F::Elem>> = group
        .elements
        .par_iter()
        .map(|(g, k)| transform_with(f, a, g, k))
        .collect();
    let mut matches = Vec::new();
    for label in enumerate_canonical(f)? {
        if let ClassLabel::Family(fam) = &label {
            if orbit.contains(&canonical_msc(f, fam)?) {
                matches.push(label);
            }
        }
    }
    match matches.len() {
        1 => Ok(matches.pop().expect("one match")),
        0 => Err(ClassifyError::Unmatched(a.format(f))),
        _ => Err(ClassifyError::Ambiguous {
            msc: a.format(f),
            labels: matches.iter().map(|l| l.label(f)).collect(),
        }),
    }
}

/// Which canonical representatives an orbit contains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrbitMatch<E> {
    Matched(ClassLabel<E>),
    Unmatched,
    /// More than one representative in one orbit.
    Collision(Vec<ClassLabel<E>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitReport<E> {
    /// The lexicographically least MSC of the orbit.
    pub representative: Msc<E>,
    pub orbit_size: u64,
    pub stabilizer_order: u64,
    pub matched_family: OrbitMatch<E>,
}

impl<E: Clone + Ord> OrbitReport<E> {
    pub fn record<F: Field<Elem = E>>(&self, f: &F) -> OrbitRecord {
        let matched_family = match &self.matched_family {
            OrbitMatch::Matched(label) => label.label(f),
            OrbitMatch::Unmatched => "unmatched".to_string(),
            OrbitMatch::Collision(labels) => {
                let ls: Vec<String> = labels.iter().map(|l| l.label(f)).collect();
                format!("collision:{}", ls.join("|"))
            }
        };
        OrbitRecord {
            representative: self.representative.format(f),
            orbit_size: self.orbit_size,
            stabilizer_order: self.stabilizer_order,
            matched_family,
        }
    }
}

/// Serialized form of an [`OrbitReport`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitRecord {
    pub representative: String,
    pub orbit_size: u64,
    pub stabilizer_order: u64,
    pub matched_family: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusSummary {
    pub field: String,
    pub orbit_count: usize,
    pub sum_sizes: u64,
    pub unmatched_count: usize,
    pub collision_count: usize,
}

pub fn census_summary<F: Field>(f: &F, reports: &[OrbitReport<F::Elem>]) -> CensusSummary {
    CensusSummary {
        field: f.spec().to_string(),
        orbit_count: reports.len(),
        sum_sizes: reports.iter().map(|r| r.orbit_size).sum(),
        unmatched_count: reports
            .iter()
            .filter(|r| r.matched_family == OrbitMatch::Unmatched)
            .count(),
        collision_count: reports
            .iter()
            .filter(|r| matches!(r.matched_family, OrbitMatch::Collision(_)))
            .count(),
    }
}

/// Partition of all `q^8` MSCs into GL(2, q)-orbits, ordered by their least
/// element. Each orbit is matched against the canonical representatives and
/// its stabilizer is recomputed by an automorphism scan.
pub fn orbit_census<F: Field>(f: &F) -> Result<Vec<OrbitReport<F::Elem>>, ClassifyError> {
    let q = check_size(f, "orbit census", MAX_CENSUS_FIELD)? as usize;
    let els = f.elements().expect("finite field");
    let code: HashMap<F::Elem, usize> = els.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
    let total = q.pow(8);
    let index_of = |m: &Msc<F::Elem>| m.entries().iter().fold(0usize, |acc, x| acc * q + code[x]);
    let msc_at = |mut idx: usize| {
        let mut e: [F::Elem; 8] = std::array::from_fn(|_| f.zero());
        for slot in e.iter_mut().rev() {
            *slot = els[idx % q].clone();
            idx /= q;
        }
        Msc::from_entries(e)
    };

    let mut rep_at: HashMap<usize, ClassLabel<F::Elem>> = HashMap::new();
    for label in enumerate_canonical(f)? {
        let m = match &label {
            ClassLabel::Trivial => Msc::zero(f),
            ClassLabel::Family(fam) => canonical_msc(f, fam)?,
        };
        rep_at.insert(index_of(&m), label);
    }

    let group = ActingGroup::new(f)?;
    let mut visited = vec![false; total];
    let mut orbits = Vec::new();
    for idx in 0..total {
        if visited[idx] {
            continue;
        }
        let a = msc_at(idx);
        let mut members: Vec<usize> = group
            .elements
            .iter()
            .map(|(g, k)| index_of(&transform_with(f, &a, g, k)))
            .collect();
        members.sort_unstable();
        members.dedup();
        let mut labels = Vec::new();
        for &m in &members {
            visited[m] = true;
            if let Some(label) = rep_at.get(&m) {
                labels.push(label.clone());
            }
        }
        let matched = match labels.len() {
            0 => OrbitMatch::Unmatched,
            1 => OrbitMatch::Matched(labels.pop().expect("one label")),
            _ => OrbitMatch::Collision(labels),
        };
        orbits.push((a, members.len() as u64, matched));
    }

    orbits
        .into_par_iter()
        .map(|(a, orbit_size, matched_family)| {
            let stabilizer_order = automorphisms_bruteforce(f, &a)?.group.elements.len() as u64;
            Ok(OrbitReport {
                representative: a,
                orbit_size,
                stabilizer_order,
                matched_family,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{CanonicalFamily, FamilyTag};
    use crate::field::{FieldSpec, FiniteField};
    use crate::msc::transform;

    fn gf(q: u64) -> FiniteField {
        FiniteField::new(FieldSpec::of_order(q).unwrap())
    }

    fn canon(f: &FiniteField, tag: FamilyTag, params: &[u32]) -> Msc<u32> {
        canonical_msc(f, &CanonicalFamily::new(tag, params.to_vec())).unwrap()
    }

    #[test]
    fn isomorphism_examples() {
        let f7 = gf(7);
        let a = canon(&f7, FamilyTag::A13, &[]);
        assert_eq!(are_isomorphic(&f7, &a, &a).unwrap(), Some(Mat2::identity(&f7)));
        let (x, y) = (canon(&f7, FamilyTag::A11, &[2]), canon(&f7, FamilyTag::A11, &[5]));
        let g = are_isomorphic(&f7, &x, &y).unwrap().unwrap();
        assert_eq!(transform(&f7, &x, &g).unwrap(), y);
        let f5 = gf(5);
        assert_eq!(
            are_isomorphic(&f5, &canon(&f5, FamilyTag::A13, &[]), &canon(&f5, FamilyTag::A12, &[0]))
                .unwrap(),
            None
        );
    }

    #[test]
    fn filter_does_not_change_results() {
        let f = gf(3);
        let a = canon(&f, FamilyTag::A3_3, &[1, 0, 1]);
        let g = Mat2::new(1, 2, 0, 1);
        let b = transform(&f, &a, &g).unwrap();
        let c = canon(&f, FamilyTag::A5_3, &[1]);
        for target in [&b, &c] {
            assert_eq!(
                are_isomorphic_with(&f, &a, target, true).unwrap(),
                are_isomorphic_with(&f, &a, target, false).unwrap()
            );
        }
    }

    #[test]
    fn classify_examples() {
        let f2 = gf(2);
        assert_eq!(classify_msc(&f2, &Msc::zero(&f2)).unwrap(), ClassLabel::Trivial);
        let m = Msc::from_entries([0, 0, 0, 0, 1, 0, 0, 0]);
        assert_eq!(
            classify_msc(&f2, &m).unwrap(),
            ClassLabel::Family(CanonicalFamily::new(FamilyTag::A12_2, vec![]))
        );
        let f3 = gf(3);
        let a = transform(&f3, &canon(&f3, FamilyTag::A13_3, &[]), &Mat2::new(2, 1, 1, 0)).unwrap();
        assert_eq!(
            classify_msc(&f3, &a).unwrap(),
            ClassLabel::Family(CanonicalFamily::new(FamilyTag::A13_3, vec![]))
        );
        assert!(matches!(
            classify_msc(&gf(11), &m),
            Err(ClassifyError::TooLarge { .. })
        ));
    }

    #[test]
    fn census_gf2() {
        let f = gf(2);
        let reports = orbit_census(&f).unwrap();
        let summary = census_summary(&f, &reports);
        assert_eq!(summary.sum_sizes, 256);
        assert_eq!(summary.orbit_count, enumerate_canonical(&f).unwrap().len());
        assert_eq!(summary.unmatched_count, 0);
        assert_eq!(summary.collision_count, 0);
        for r in &reports {
            assert_eq!(r.orbit_size * r.stabilizer_order, 6);
        }
        assert_eq!(reports[0].representative, Msc::zero(&f));
        assert_eq!(reports[0].orbit_size, 1);
    }
}
