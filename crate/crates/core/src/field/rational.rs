use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{split_terms, ElementParseError, Field, FieldError, FieldSpec};

/// Bound on |constant term| and |leading coefficient| for the rational root
/// search; divisors are enumerated by trial division.
const ROOT_SEARCH_LIMIT: u64 = 1_000_000_000_000;

/// The rational numbers, with fractions kept in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rationals {
    spec: FieldSpec,
}

impl Rationals {
    pub fn new() -> Self {
        Self {
            spec: FieldSpec::rational(),
        }
    }
}

impl Default for Rationals {
    fn default() -> Self {
        Self::new()
    }
}

impl Field for Rationals {
    type Elem = BigRational;

    fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn inv(&self, a: &BigRational) -> Result<BigRational, FieldError> {
        if a.is_zero() {
            Err(FieldError::DivisionByZero)
        } else {
            Ok(a.recip())
        }
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn elements(&self) -> Option<Vec<BigRational>> {
        None
    }

    fn contains(&self, a: &BigRational) -> bool {
        a.denom().is_positive() && a.numer().gcd(a.denom()).is_one()
    }

    fn format(&self, a: &BigRational) -> String {
        if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }

    fn parse(&self, s: &str) -> Result<BigRational, ElementParseError> {
        let err = |reason: &str| ElementParseError {
            token: s.to_string(),
            field: "rational".to_string(),
            reason: reason.to_string(),
        };
        let mut acc = BigRational::zero();
        for (negative, term) in split_terms(s) {
            if term.contains('t') {
                return Err(err("'t' is only valid in extension fields"));
            }
            let value = match term.split_once('/') {
                Some((n, d)) => {
                    let n: BigInt = n.parse().map_err(|_| err("bad numerator"))?;
                    let d: BigInt = d.parse().map_err(|_| err("bad denominator"))?;
                    if d.is_zero() {
                        return Err(err("zero denominator"));
                    }
                    BigRational::new(n, d)
                }
                None => BigRational::from_integer(
                    term.parse::<BigInt>().map_err(|_| err("not an integer"))?,
                ),
            };
            acc = if negative { acc - value } else { acc + value };
        }
        Ok(acc)
    }

    /// Rational roots by the rational root theorem: after clearing
    /// denominators, every root is +-(divisor of a0)/(divisor of an).
    fn roots(&self, poly: &[BigRational]) -> Result<Vec<BigRational>, FieldError> {
        let Some(top) = poly.iter().rposition(|c| !c.is_zero()) else {
            return Err(FieldError::ZeroPolynomial);
        };
        let lcm = poly[..=top]
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = poly[..=top]
            .iter()
            .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let low = ints.iter().position(|c| !c.is_zero()).expect("nonzero");
        let mut roots = Vec::new();
        if low > 0 {
            roots.push(BigRational::zero());
        }
        let reduced = &ints[low..];
        if reduced.len() > 1 {
            let a0 = reduced[0].abs();
            let an = reduced[reduced.len() - 1].abs();
            let numerators = divisors(&a0)?;
            let denominators = divisors(&an)?;
            for n in &numerators {
                for d in &denominators {
                    for sign in [1i32, -1] {
                        let x = BigRational::new(BigInt::from(sign) * n, d.clone());
                        if self.eval_poly(poly, &x).is_zero() {
                            roots.push(x);
                        }
                    }
                }
            }
        }
        roots.sort();
        roots.dedup();
        Ok(roots)
    }
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>, FieldError> {
    let v = n
        .to_u64()
        .filter(|&v| v <= ROOT_SEARCH_LIMIT)
        .ok_or_else(|| FieldError::RootSearchTooLarge(n.to_string()))?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= v {
        if v % d == 0 {
            small.push(BigInt::from(d));
            if d * d != v {
                large.push(BigInt::from(v / d));
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Ok(small)
}
