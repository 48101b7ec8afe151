//! Exact fields: prime fields GF(p), small extensions GF(p^k) with k <= 3,
//! and the rationals.
//!
//! Elements are plain values; the field they belong to is always passed
//! alongside them. All arithmetic goes through the [`Field`] trait so the
//! algebra code is written once and monomorphized per field kind.

mod finite;
mod rational;

use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use finite::FiniteField;
pub use rational::Rationals;

/// Largest supported field size.
pub const MAX_FIELD_SIZE: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field size {0} exceeds the supported maximum 2^20")]
    TooLarge(u64),
    #[error("extension degree must be 2 or 3, got {0}")]
    UnsupportedDegree(u32),
    #[error("modulus must be monic of degree {degree} with coefficients in [0, {p})")]
    MalformedModulus { degree: u32, p: u64 },
    #[error("modulus {0} is reducible")]
    ReducibleModulus(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero polynomial has no meaningful root condition")]
    ZeroPolynomial,
    #[error("coefficient {0} too large for rational root search")]
    RootSearchTooLarge(String),
    #[error("operation requires a finite field")]
    InfiniteField,
    #[error("invalid field spec {0:?}: expected \"q:<prime power>\" or \"rational\"")]
    BadSpec(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse {token:?} as an element of {field}: {reason}")]
pub struct ElementParseError {
    pub token: String,
    pub field: String,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Prime,
    Extension,
    Rational,
}

/// Validated description of a field.
///
/// `modulus` lists the coefficients of the defining polynomial from the
/// constant term upwards; it is empty unless `kind` is `Extension`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    kind: FieldKind,
    p: u64,
    k: u32,
    modulus: Vec<u64>,
}

impl FieldSpec {
    pub fn new(kind: FieldKind, p: u64, k: u32, modulus: Vec<u64>) -> Result<Self, FieldError> {
        match kind {
            FieldKind::Rational => Ok(Self::rational()),
            FieldKind::Prime => Self::prime(p),
            FieldKind::Extension => Self::extension(p, k, modulus),
        }
    }

    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if p > MAX_FIELD_SIZE {
            return Err(FieldError::TooLarge(p));
        }
        Ok(Self {
            kind: FieldKind::Prime,
            p,
            k: 1,
            modulus: Vec::new(),
        })
    }

    pub fn extension(p: u64, k: u32, modulus: Vec<u64>) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if !(2..=3).contains(&k) {
            return Err(FieldError::UnsupportedDegree(k));
        }
        let q = p.checked_pow(k).filter(|&q| q <= MAX_FIELD_SIZE);
        let Some(_) = q else {
            return Err(FieldError::TooLarge(p.saturating_pow(k)));
        };
        if modulus.len() != k as usize + 1
            || modulus[k as usize] != 1
            || modulus.iter().any(|&c| c >= p)
        {
            return Err(FieldError::MalformedModulus { degree: k, p });
        }
        // A polynomial of degree 2 or 3 is irreducible iff it has no root.
        let has_root = (0..p).any(|x| {
            modulus
                .iter()
                .rev()
                .fold(0u64, |acc, &c| (acc * x + c) % p)
                == 0
        });
        if has_root {
            return Err(FieldError::ReducibleModulus(format_modulus(&modulus)));
        }
        Ok(Self {
            kind: FieldKind::Extension,
            p,
            k,
            modulus,
        })
    }

    pub fn rational() -> Self {
        Self {
            kind: FieldKind::Rational,
            p: 0,
            k: 1,
            modulus: Vec::new(),
        }
    }

    /// The field of order `q` with its conventional defining polynomial.
    ///
    /// GF(4), GF(8), GF(9) and GF(27) use t^2+t+1, t^3+t+1, t^2+1 and
    /// t^3-t+1; other extension fields take the first monic irreducible
    /// polynomial in lexicographic order of coefficients.
    pub fn of_order(q: u64) -> Result<Self, FieldError> {
        if q > MAX_FIELD_SIZE {
            return Err(FieldError::TooLarge(q));
        }
        if is_prime(q) {
            return Self::prime(q);
        }
        let (p, k) = prime_power(q).ok_or(FieldError::NotPrime(q))?;
        let modulus = match (p, k) {
            (2, 2) => vec![1, 1, 1],
            (2, 3) => vec![1, 1, 0, 1],
            (3, 2) => vec![1, 0, 1],
            (3, 3) => vec![1, 2, 0, 1],
            (_, 2 | 3) => first_irreducible(p, k),
            _ => return Err(FieldError::UnsupportedDegree(k)),
        };
        Self::extension(p, k, modulus)
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Number of elements, or `None` for the rationals.
    pub fn size(&self) -> Option<u64> {
        match self.kind {
            FieldKind::Rational => None,
            _ => Some(self.p.pow(self.k)),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.kind != FieldKind::Rational
    }

    pub fn build(&self) -> AnyField {
        match self.kind {
            FieldKind::Rational => AnyField::Rational(Rationals::new()),
            _ => AnyField::Finite(FiniteField::new(self.clone())),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.size() {
            Some(q) => write!(f, "q:{q}"),
            None => f.write_str("rational"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let lower = s.to_ascii_lowercase();
        if lower == "rational" || lower == "q" || lower == "rationals" {
            return Ok(Self::rational());
        }
        let q = lower
            .strip_prefix("q:")
            .and_then(|n| n.trim().parse::<u64>().ok())
            .ok_or_else(|| FieldError::BadSpec(s.to_string()))?;
        Self::of_order(q)
    }
}

/// A field chosen at runtime.
#[derive(Debug, Clone)]
pub enum AnyField {
    Finite(FiniteField),
    Rational(Rationals),
}

impl AnyField {
    pub fn spec(&self) -> &FieldSpec {
        match self {
            AnyField::Finite(f) => f.spec(),
            AnyField::Rational(f) => f.spec(),
        }
    }
}

/// Exact field arithmetic on values of type [`Field::Elem`].
pub trait Field: Clone + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + Eq + Ord + Hash + fmt::Debug + Send + Sync;

    fn spec(&self) -> &FieldSpec;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    /// Image of an integer under the canonical map Z -> F.
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, FieldError>;
    /// All elements in canonical order, or `None` for an infinite field.
    fn elements(&self) -> Option<Vec<Self::Elem>>;
    /// Whether `a` is a canonical representative of an element of this field.
    fn contains(&self, a: &Self::Elem) -> bool;
    fn format(&self, a: &Self::Elem) -> String;
    fn parse(&self, s: &str) -> Result<Self::Elem, ElementParseError>;
    /// Distinct roots in the field of `poly` (coefficients from the constant
    /// term upwards), in canonical order.
    fn roots(&self, poly: &[Self::Elem]) -> Result<Vec<Self::Elem>, FieldError>;

    fn characteristic(&self) -> u64 {
        self.spec().characteristic()
    }

    fn size(&self) -> Option<u64> {
        self.spec().size()
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn eval_poly(&self, poly: &[Self::Elem], x: &Self::Elem) -> Self::Elem {
        poly.iter()
            .rev()
            .fold(self.zero(), |acc, c| self.add(&self.mul(&acc, x), c))
    }

    fn has_root(&self, poly: &[Self::Elem]) -> Result<bool, FieldError> {
        Ok(!self.roots(poly)?.is_empty())
    }

    /// Nonzero elements, or `None` for an infinite field.
    fn units(&self) -> Option<Vec<Self::Elem>> {
        self.elements()
            .map(|els| els.into_iter().filter(|x| !self.is_zero(x)).collect())
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_power(q: u64) -> Option<(u64, u32)> {
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut k = 0;
            let mut r = q;
            while r.is_multiple_of(p) {
                r /= p;
                k += 1;
            }
            return (r == 1).then_some((p, k));
        }
        p += 1;
    }
    None
}

fn first_irreducible(p: u64, k: u32) -> Vec<u64> {
    let lower = p.pow(k);
    (0..lower)
        .map(|code| {
            let mut coeffs: Vec<u64> = (0..k).map(|i| (code / p.pow(i)) % p).collect();
            coeffs.push(1);
            coeffs
        })
        .find(|m| FieldSpec::extension(p, k, m.clone()).is_ok())
        .expect("an irreducible polynomial of every degree exists")
}

fn format_modulus(modulus: &[u64]) -> String {
    let mut terms = Vec::new();
    for (i, &c) in modulus.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let coef = if c == 1 && i > 0 { String::new() } else { c.to_string() };
        let term = match i {
            0 => coef,
            1 => format!("{coef}t"),
            _ => format!("{coef}t^{i}"),
        };
        terms.push(term);
    }
    terms.join("+")
}

/// Splits an element literal into signed terms: "1-2*t+t^2" -> [(+,"1"), (-,"2*t"), (+,"t^2")].
pub(crate) fn split_terms(s: &str) -> Vec<(bool, String)> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut terms = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    for ch in compact.chars() {
        if (ch == '+' || ch == '-') && !current.is_empty() {
            terms.push((negative, std::mem::take(&mut current)));
            negative = ch == '-';
        } else if (ch == '+' || ch == '-') && current.is_empty() {
            if ch == '-' {
                negative = !negative;
            }
        } else {
            current.push(ch);
        }
    }
    if !current.is_empty() || terms.is_empty() {
        terms.push((negative, current));
    }
    terms
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_specs() {
        assert_eq!("q:7".parse::<FieldSpec>().unwrap(), FieldSpec::prime(7).unwrap());
        let gf4: FieldSpec = "q:4".parse().unwrap();
        assert_eq!(gf4.modulus(), &[1, 1, 1]);
        assert_eq!(gf4.characteristic(), 2);
        assert_eq!(gf4.size(), Some(4));
        assert_eq!("q:27".parse::<FieldSpec>().unwrap().modulus(), &[1, 2, 0, 1]);
        assert_eq!("rational".parse::<FieldSpec>().unwrap(), FieldSpec::rational());
        assert!("q:6".parse::<FieldSpec>().is_err());
        assert!("q:16".parse::<FieldSpec>().is_err());
        assert!("gf7".parse::<FieldSpec>().is_err());
    }

    #[test]
    fn field_make_examples() {
        let gf7 = FieldSpec::new(FieldKind::Prime, 7, 1, vec![]).unwrap();
        assert_eq!(gf7.characteristic(), 7);
        let gf4 = FieldSpec::new(FieldKind::Extension, 2, 2, vec![1, 1, 1]).unwrap();
        assert_eq!(gf4.size(), Some(4));
        assert_eq!(
            FieldSpec::new(FieldKind::Extension, 2, 2, vec![1, 0, 1]),
            Err(FieldError::ReducibleModulus("t^2+1".into()))
        );
        assert_eq!(FieldSpec::prime(9), Err(FieldError::NotPrime(9)));
        assert!(matches!(FieldSpec::of_order(1 << 21), Err(FieldError::TooLarge(_))));
        assert!(matches!(
            FieldSpec::extension(1031, 2, vec![1, 0, 1]),
            Err(FieldError::TooLarge(_))
        ));
    }

    #[test]
    fn other_extension_fields_get_an_irreducible_modulus() {
        for q in [25u64, 49, 125, 121] {
            let spec = FieldSpec::of_order(q).unwrap();
            assert_eq!(spec.size(), Some(q));
        }
    }

    #[test]
    fn term_splitting() {
        assert_eq!(
            split_terms("1 - 2*t + t^2"),
            vec![(false, "1".into()), (true, "2*t".into()), (false, "t^2".into())]
        );
        assert_eq!(split_terms("-3"), vec![(true, "3".into())]);
        assert_eq!(split_terms(""), vec![(false, "".into())]);
    }
}
