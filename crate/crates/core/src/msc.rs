//! Two-dimensional algebras as 2x4 matrices of structure constants.
//!
//! With coordinates `u, v` in the fixed basis, the product is
//! `u.v = A (u ⊗ v)` where `u ⊗ v = (u1v1, u1v2, u2v1, u2v2)`. Row one of `A`
//! holds `α1..α4`, row two `β1..β4`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::Field;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MscError {
    #[error("matrix is singular")]
    Singular,
    #[error("entry {index} is not an element of {field}")]
    NotInField { index: usize, field: String },
}

/// Row-major 2x2 matrix `[[a, b], [c, d]]`.
///
/// The derived ordering is lexicographic in `(a, b, c, d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mat2<E> {
    pub a: E,
    pub b: E,
    pub c: E,
    pub d: E,
}

impl<E: Clone> Mat2<E> {
    pub fn new(a: E, b: E, c: E, d: E) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_array([a, b, c, d]: [E; 4]) -> Self {
        Self { a, b, c, d }
    }

    pub fn to_array(&self) -> [E; 4] {
        [self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone()]
    }

    pub fn rows(&self) -> [[E; 2]; 2] {
        [
            [self.a.clone(), self.b.clone()],
            [self.c.clone(), self.d.clone()],
        ]
    }

    pub fn identity<F: Field<Elem = E>>(f: &F) -> Self {
        Self::new(f.one(), f.zero(), f.zero(), f.one())
    }

    pub fn zero<F: Field<Elem = E>>(f: &F) -> Self {
        Self::new(f.zero(), f.zero(), f.zero(), f.zero())
    }

    pub fn diag<F: Field<Elem = E>>(f: &F, a: E, d: E) -> Self {
        Self::new(a, f.zero(), f.zero(), d)
    }

    pub fn det<F: Field<Elem = E>>(&self, f: &F) -> E {
        f.sub(&f.mul(&self.a, &self.d), &f.mul(&self.b, &self.c))
    }

    pub fn is_invertible<F: Field<Elem = E>>(&self, f: &F) -> bool {
        !f.is_zero(&self.det(f))
    }

    pub fn inverse<F: Field<Elem = E>>(&self, f: &F) -> Result<Self, MscError> {
        let inv_det = f.inv(&self.det(f)).map_err(|_| MscError::Singular)?;
        Ok(Self::new(
            f.mul(&self.d, &inv_det),
            f.neg(&f.mul(&self.b, &inv_det)),
            f.neg(&f.mul(&self.c, &inv_det)),
            f.mul(&self.a, &inv_det),
        ))
    }

    pub fn mul<F: Field<Elem = E>>(&self, rhs: &Self, f: &F) -> Self {
        let dot = |x1: &E, y1: &E, x2: &E, y2: &E| f.add(&f.mul(x1, y1), &f.mul(x2, y2));
        Self::new(
            dot(&self.a, &rhs.a, &self.b, &rhs.c),
            dot(&self.a, &rhs.b, &self.b, &rhs.d),
            dot(&self.c, &rhs.a, &self.d, &rhs.c),
            dot(&self.c, &rhs.b, &self.d, &rhs.d),
        )
    }

    pub fn add<F: Field<Elem = E>>(&self, rhs: &Self, f: &F) -> Self {
        Self::new(
            f.add(&self.a, &rhs.a),
            f.add(&self.b, &rhs.b),
            f.add(&self.c, &rhs.c),
            f.add(&self.d, &rhs.d),
        )
    }

    pub fn sub<F: Field<Elem = E>>(&self, rhs: &Self, f: &F) -> Self {
        Self::new(
            f.sub(&self.a, &rhs.a),
            f.sub(&self.b, &rhs.b),
            f.sub(&self.c, &rhs.c),
            f.sub(&self.d, &rhs.d),
        )
    }

    pub fn scale<F: Field<Elem = E>>(&self, s: &E, f: &F) -> Self {
        Self::new(
            f.mul(s, &self.a),
            f.mul(s, &self.b),
            f.mul(s, &self.c),
            f.mul(s, &self.d),
        )
    }

    /// `[self, rhs] = self*rhs - rhs*self`.
    pub fn commutator<F: Field<Elem = E>>(&self, rhs: &Self, f: &F) -> Self {
        self.mul(rhs, f).sub(&rhs.mul(self, f), f)
    }

    pub fn is_zero<F: Field<Elem = E>>(&self, f: &F) -> bool {
        [&self.a, &self.b, &self.c, &self.d]
            .into_iter()
            .all(|x| f.is_zero(x))
    }

    pub fn format<F: Field<Elem = E>>(&self, f: &F) -> String {
        format!(
            "[[{},{}],[{},{}]]",
            f.format(&self.a),
            f.format(&self.b),
            f.format(&self.c),
            f.format(&self.d)
        )
    }
}

/// Column coordinate vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vector2<E> {
    pub x1: E,
    pub x2: E,
}

impl<E> Vector2<E> {
    pub fn new(x1: E, x2: E) -> Self {
        Self { x1, x2 }
    }
}

pub type Mat4<E> = [[E; 4]; 4];

/// Matrix of structure constants of a two-dimensional algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Msc<E> {
    rows: [[E; 4]; 2],
}

impl<E: Clone> Msc<E> {
    pub fn new(alpha: [E; 4], beta: [E; 4]) -> Self {
        Self {
            rows: [alpha, beta],
        }
    }

    /// Entries in the order α1..α4, β1..β4.
    pub fn from_entries(e: [E; 8]) -> Self {
        let [a1, a2, a3, a4, b1, b2, b3, b4] = e;
        Self::new([a1, a2, a3, a4], [b1, b2, b3, b4])
    }

    pub fn zero<F: Field<Elem = E>>(f: &F) -> Self {
        Self::from_entries(std::array::from_fn(|_| f.zero()))
    }

    pub fn alpha(&self) -> &[E; 4] {
        &self.rows[0]
    }

    pub fn beta(&self) -> &[E; 4] {
        &self.rows[1]
    }

    pub fn rows(&self) -> &[[E; 4]; 2] {
        &self.rows
    }

    pub fn entry(&self, row: usize, col: usize) -> &E {
        &self.rows[row][col]
    }

    pub fn entries(&self) -> [E; 8] {
        std::array::from_fn(|i| self.rows[i / 4][i % 4].clone())
    }

    pub fn is_trivial<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.rows.iter().flatten().all(|x| f.is_zero(x))
    }

    /// Checks every entry is a canonical element of `f`.
    pub fn validate<F: Field<Elem = E>>(&self, f: &F) -> Result<(), MscError> {
        match self.rows.iter().flatten().position(|x| !f.contains(x)) {
            Some(index) => Err(MscError::NotInField {
                index,
                field: f.spec().to_string(),
            }),
            None => Ok(()),
        }
    }

    pub fn format<F: Field<Elem = E>>(&self, f: &F) -> String {
        let row = |r: &[E; 4]| r.iter().map(|x| f.format(x)).collect::<Vec<_>>().join(",");
        format!("{};{}", row(&self.rows[0]), row(&self.rows[1]))
    }
}

/// Block matrix `(g_ij * h)`.
pub fn kron2<F: Field>(f: &F, g: &Mat2<F::Elem>, h: &Mat2<F::Elem>) -> Mat4<F::Elem> {
    let (g, h) = (g.rows(), h.rows());
    std::array::from_fn(|i| std::array::from_fn(|j| f.mul(&g[i / 2][j / 2], &h[i % 2][j % 2])))
}

pub(crate) fn msc_times_mat4<F: Field>(f: &F, a: &Msc<F::Elem>, k: &Mat4<F::Elem>) -> [[F::Elem; 4]; 2] {
    std::array::from_fn(|r| {
        std::array::from_fn(|j| {
            (0..4).fold(f.zero(), |acc, i| f.add(&acc, &f.mul(&a.rows[r][i], &k[i][j])))
        })
    })
}

pub(crate) fn mat2_times_msc<F: Field>(f: &F, g: &Mat2<F::Elem>, a: &Msc<F::Elem>) -> [[F::Elem; 4]; 2] {
    let g = g.rows();
    std::array::from_fn(|r| {
        std::array::from_fn(|j| {
            f.add(
                &f.mul(&g[r][0], &a.rows[0][j]),
                &f.mul(&g[r][1], &a.rows[1][j]),
            )
        })
    })
}

/// `A (u ⊗ v)`.
pub fn multiply<F: Field>(
    f: &F,
    a: &Msc<F::Elem>,
    u: &Vector2<F::Elem>,
    v: &Vector2<F::Elem>,
) -> Vector2<F::Elem> {
    let uv = [
        f.mul(&u.x1, &v.x1),
        f.mul(&u.x1, &v.x2),
        f.mul(&u.x2, &v.x1),
        f.mul(&u.x2, &v.x2),
    ];
    let row = |r: &[F::Elem; 4]| {
        (0..4).fold(f.zero(), |acc, i| f.add(&acc, &f.mul(&r[i], &uv[i])))
    };
    Vector2::new(row(&a.rows[0]), row(&a.rows[1]))
}

/// MSC of the same algebra after the basis change `g`: `g A (g^-1 ⊗ g^-1)`.
pub fn transform<F: Field>(
    f: &F,
    a: &Msc<F::Elem>,
    g: &Mat2<F::Elem>,
) -> Result<Msc<F::Elem>, MscError> {
    let g_inv = g.inverse(f)?;
    Ok(transform_with(f, a, g, &kron2(f, &g_inv, &g_inv)))
}

/// `g A k` for a precomputed `k = g^-1 ⊗ g^-1`; used by the orbit scans.
pub(crate) fn transform_with<F: Field>(
    f: &F,
    a: &Msc<F::Elem>,
    g: &Mat2<F::Elem>,
    k: &Mat4<F::Elem>,
) -> Msc<F::Elem> {
    let ga = Msc {
        rows: mat2_times_msc(f, g, a),
    };
    Msc {
        rows: msc_times_mat4(f, &ga, k),
    }
}

/// `g` is invertible and `gA = A (g ⊗ g)`. Singular `g` gives `false`.
pub fn is_automorphism<F: Field>(f: &F, a: &Msc<F::Elem>, g: &Mat2<F::Elem>) -> bool {
    g.is_invertible(f) && satisfies_aut_equation(f, a, g)
}

/// The entrywise check `gA = A (g ⊗ g)`, exiting on the first differing entry.
pub(crate) fn satisfies_aut_equation<F: Field>(
    f: &F,
    a: &Msc<F::Elem>,
    g: &Mat2<F::Elem>,
) -> bool {
    let gr = g.rows();
    let k = kron2(f, g, g);
    for r in 0..2 {
        for j in 0..4 {
            let lhs = f.add(
                &f.mul(&gr[r][0], &a.rows[0][j]),
                &f.mul(&gr[r][1], &a.rows[1][j]),
            );
            let rhs = (0..4).fold(f.zero(), |acc, i| f.add(&acc, &f.mul(&a.rows[r][i], &k[i][j])));
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// `DA = A (D ⊗ I + I ⊗ D)`.
pub fn is_derivation<F: Field>(f: &F, a: &Msc<F::Elem>, d: &Mat2<F::Elem>) -> bool {
    let id = Mat2::identity(f);
    let (k1, k2) = (kron2(f, d, &id), kron2(f, &id, d));
    let k: Mat4<F::Elem> = std::array::from_fn(|i| std::array::from_fn(|j| f.add(&k1[i][j], &k2[i][j])));
    mat2_times_msc(f, d, a) == msc_times_mat4(f, a, &k)
}

/// The trace invariant `P(A)` with rows `(α1+β3, α2+β4)` and `(α1+β2, α3+β4)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TraceInvariant<E> {
    pub p_matrix: Mat2<E>,
}

impl<E: Clone> TraceInvariant<E> {
    pub fn row1(&self) -> [E; 2] {
        [self.p_matrix.a.clone(), self.p_matrix.b.clone()]
    }

    pub fn row2(&self) -> [E; 2] {
        [self.p_matrix.c.clone(), self.p_matrix.d.clone()]
    }
}

pub fn p_invariant<F: Field>(f: &F, a: &Msc<F::Elem>) -> TraceInvariant<F::Elem> {
    let (al, be) = (a.alpha(), a.beta());
    TraceInvariant {
        p_matrix: Mat2::new(
            f.add(&al[0], &be[2]),
            f.add(&al[1], &be[3]),
            f.add(&al[0], &be[1]),
            f.add(&al[2], &be[3]),
        ),
    }
}
