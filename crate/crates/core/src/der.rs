//! Derivation algebras: kernel of the linear system `DA = A(D⊗I + I⊗D)`,
//! the exhaustive oracle, and the closed-form table per canonical family.

use rayon::prelude::*;
use serde::Serialize;

use crate::canonical::{check_constraints, CanonicalError, CanonicalFamily, FamilyTag};
use crate::errata::{Erratum, Reading};
use crate::field::{Field, FieldError};
use crate::linalg;
use crate::msc::{is_derivation, kron2, mat2_times_msc, msc_times_mat4, Mat2, Mat4, Msc};

/// Coefficients of the eight scalar equations in the unknowns `(a, b, c, d)`
/// of `D = [[a, b], [c, d]]`. Row `4i + j` is entry `(i, j)` of
/// `A(D⊗I + I⊗D) − DA`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerSystem<E> {
    pub matrix: [[E; 4]; 8],
}

impl<E: Clone> DerSystem<E> {
    pub fn rows(&self) -> Vec<Vec<E>> {
        self.matrix.iter().map(|r| r.to_vec()).collect()
    }

    pub fn apply<F: Field<Elem = E>>(&self, f: &F, d: &Mat2<E>) -> [E; 8] {
        let x = d.to_array();
        std::array::from_fn(|r| {
            (0..4).fold(f.zero(), |acc, k| f.add(&acc, &f.mul(&self.matrix[r][k], &x[k])))
        })
    }
}

/// A basis of a space of 2x2 matrices, in reduced echelon form with pivot
/// order `a, b, c, d`. Two spans are equal iff their bases are equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerBasis<E> {
    pub basis: Vec<Mat2<E>>,
}

impl<E: Clone + Eq + Ord> DerBasis<E> {
    /// Echelon basis of the span of arbitrary matrices.
    pub fn spanned_by<F: Field<Elem = E>>(f: &F, mats: &[Mat2<E>]) -> Self {
        let vectors: Vec<Vec<E>> = mats.iter().map(|m| m.to_array().to_vec()).collect();
        let basis = linalg::span_basis(f, &vectors)
            .into_iter()
            .map(|v| Mat2::new(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()))
            .collect();
        Self { basis }
    }

    pub fn zero() -> Self {
        Self { basis: Vec::new() }
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn contains<F: Field<Elem = E>>(&self, f: &F, m: &Mat2<E>) -> bool {
        let mut mats = self.basis.clone();
        mats.push(m.clone());
        Self::spanned_by(f, &mats).dimension() == self.dimension()
    }

    /// Every element of the span over a finite field, sorted.
    pub fn materialize<F: Field<Elem = E>>(&self, f: &F) -> Result<Vec<Mat2<E>>, FieldError> {
        let els = f.elements().ok_or(FieldError::InfiniteField)?;
        let mut out = vec![Mat2::zero(f)];
        for b in &self.basis {
            out = out
                .iter()
                .flat_map(|m| els.iter().map(move |k| m.add(&b.scale(k, f), f)))
                .collect();
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    pub fn record<F: Field<Elem = E>>(&self, f: &F) -> DerRecord {
        DerRecord {
            dimension: self.dimension(),
            basis: self.basis.iter().map(|m| mat2_strings(f, m)).collect(),
        }
    }
}

pub(crate) fn mat2_strings<F: Field>(f: &F, m: &Mat2<F::Elem>) -> [[String; 2]; 2] {
    m.rows().map(|r| r.map(|x| f.format(&x)))
}

/// Serialized form of a [`DerBasis`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerRecord {
    pub dimension: usize,
    pub basis: Vec<[[String; 2]; 2]>,
}

pub fn build_der_system<F: Field>(f: &F, a: &Msc<F::Elem>) -> DerSystem<F::Elem> {
    let id = Mat2::identity(f);
    let columns: Vec<[F::Elem; 8]> = (0..4)
        .map(|k| {
            let mut x = [f.zero(), f.zero(), f.zero(), f.zero()];
            x[k] = f.one();
            let d = Mat2::from_array(x);
            let (k1, k2) = (kron2(f, &d, &id), kron2(f, &id, &d));
            let sum: Mat4<F::Elem> =
                std::array::from_fn(|i| std::array::from_fn(|j| f.add(&k1[i][j], &k2[i][j])));
            let rhs = msc_times_mat4(f, a, &sum);
            let lhs = mat2_times_msc(f, &d, a);
            std::array::from_fn(|r| f.sub(&rhs[r / 4][r % 4], &lhs[r / 4][r % 4]))
        })
        .collect();
    DerSystem {
        matrix: std::array::from_fn(|r| std::array::from_fn(|k| columns[k][r].clone())),
    }
}

/// Exact derivation algebra of any MSC.
pub fn derivation_algebra<F: Field>(f: &F, a: &Msc<F::Elem>) -> DerBasis<F::Elem> {
    let kernel = linalg::kernel(f, &build_der_system(f, a).rows(), 4);
    let mats: Vec<Mat2<F::Elem>> = kernel
        .into_iter()
        .map(|v| Mat2::new(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()))
        .collect();
    DerBasis::spanned_by(f, &mats)
}

/// Every `D` over a finite field with `is_derivation(A, D)`, sorted
/// lexicographically.
pub fn derivations_bruteforce<F: Field>(
    f: &F,
    a: &Msc<F::Elem>,
) -> Result<Vec<Mat2<F::Elem>>, FieldError> {
    let els = f.elements().ok_or(FieldError::InfiniteField)?;
    let mut out: Vec<Mat2<F::Elem>> = els
        .par_iter()
        .flat_map_iter(|x| {
            let els = &els;
            els.iter().flat_map(move |y| {
                els.iter().flat_map(move |z| {
                    els.iter().filter_map(move |w| {
                        let d = Mat2::new(x.clone(), y.clone(), z.clone(), w.clone());
                        is_derivation(f, a, &d).then_some(d)
                    })
                })
            })
        })
        .collect();
    out.sort();
    Ok(out)
}

/// The tabulated derivation algebra of a canonical family.
pub fn derivations_closed_form<F: Field>(
    f: &F,
    fam: &CanonicalFamily<F::Elem>,
    reading: &Reading,
) -> Result<DerBasis<F::Elem>, CanonicalError> {
    check_constraints(f, fam)?;
    derivations_closed_form_unchecked(f, fam, reading)
}

/// The table entry evaluated without the family's constraints; used to test
/// formulas at parameters no finite field admits.
pub fn derivations_closed_form_unchecked<F: Field>(
    f: &F,
    fam: &CanonicalFamily<F::Elem>,
    reading: &Reading,
) -> Result<DerBasis<F::Elem>, CanonicalError> {
    use FamilyTag::*;
    crate::canonical::canonical_msc_unchecked(f, fam)?;
    let n = |x: i64| f.from_i64(x);
    let m = |a: i64, b: i64, c: i64, d: i64| Mat2::new(n(a), n(b), n(c), n(d));
    let e11 = m(1, 0, 0, 0);
    let e12 = m(0, 1, 0, 0);
    let e21 = m(0, 0, 1, 0);
    let e22 = m(0, 0, 0, 1);
    let c = &fam.params;
    let nonzero = |x: &F::Elem| !f.is_zero(x);
    let inv_param = |x: &F::Elem| {
        f.inv(x).map_err(|_| CanonicalError::Constraint {
            tag: fam.tag,
            condition: "β1 ≠ 0 required".to_string(),
        })
    };
    let mats: Vec<Mat2<F::Elem>> = match fam.tag {
        A1 | A2 | A4 | A6 | A8 | A10 | A11 | A1_2 | A2_2 | A5_2 | A8_2 | A9_2 | A10_2 | A1_3
        | A2_3 | A4_3 | A6_3 | A8_3 => vec![],
        A3 | A3_3 => {
            let two_a1_minus_1 = f.sub(&f.mul(&n(2), &c[0]), &n(1));
            if nonzero(&c[1]) {
                vec![]
            } else if c[2] != two_a1_minus_1 {
                vec![e22]
            } else {
                vec![e21, e22]
            }
        }
        A5 | A9 | A5_3 | A12_3 | A2_2Split => vec![e21],
        A5_2Split => {
            if reading.is_verbatim(Erratum::A5c2SplitDer) {
                vec![]
            } else {
                vec![e21]
            }
        }
        A7 | A7_3 => {
            if nonzero(&c[1]) {
                vec![]
            } else if f.characteristic() == 3 || c[0] != f.inv(&n(3)).expect("char is not 3") {
                vec![e22]
            } else {
                vec![e21, e22]
            }
        }
        A12 => {
            if nonzero(&c[0]) {
                vec![]
            } else {
                vec![e11]
            }
        }
        A13 | A13_3 => vec![m(1, 0, 0, 2), e21],
        A12_2 | A11_2 => vec![e11, e21],
        A3_2 => {
            if nonzero(&c[1]) || c[2] != n(1) {
                vec![e22]
            } else {
                vec![e21, e22]
            }
        }
        A4_2 => {
            if c[2] != n(1) {
                vec![]
            } else {
                vec![e21]
            }
        }
        A6_2 => {
            if c[0] != n(1) || nonzero(&c[1]) {
                vec![e22]
            } else {
                vec![e21, e22]
            }
        }
        A7_2 => {
            if c[0] != n(1) {
                vec![]
            } else {
                vec![e21]
            }
        }
        A9_3 => vec![Mat2::new(n(2), inv_param(&c[0])?, n(-1), n(1))],
        A10_3 => vec![m(2, 0, 0, 1)],
        A11_3 => {
            if nonzero(&c[0]) {
                vec![Mat2::new(n(0), f.mul(&n(2), &inv_param(&c[0])?), n(1), n(0))]
            } else {
                vec![e11, e12]
            }
        }
    };
    Ok(DerBasis::spanned_by(f, &mats))
}
