use std::fmt;
use std::sync::Arc;

use super::{split_terms, ElementParseError, Field, FieldError, FieldSpec};

/// GF(p) or GF(p^k), k <= 3.
///
/// An element is encoded as the integer `c0 + c1*p + c2*p^2` where
/// `c0 + c1*t + c2*t^2` is its reduced polynomial representative. For prime
/// fields this is just the residue in `[0, p)`. Multiplication goes through
/// discrete log tables built from a primitive element.
#[derive(Clone)]
pub struct FiniteField {
    inner: Arc<Tables>,
}

struct Tables {
    spec: FieldSpec,
    p: u32,
    k: u32,
    q: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    add: Option<Vec<u32>>,
}

const ADD_TABLE_LIMIT: u32 = 1024;

impl FiniteField {
    /// Builds the arithmetic tables. Panics if `spec` is the rationals.
    pub fn new(spec: FieldSpec) -> Self {
        assert!(spec.is_finite(), "FiniteField requires a finite field spec");
        let p = spec.characteristic() as u32;
        let k = spec.degree();
        let q = p.pow(k);
        let modulus: Vec<u32> = spec.modulus().iter().map(|&c| c as u32).collect();

        let digits = |x: u32| -> [u32; 3] {
            let mut d = [0; 3];
            let mut r = x;
            for slot in d.iter_mut().take(k as usize) {
                *slot = r % p;
                r /= p;
            }
            d
        };
        let encode = |d: &[u32; 3]| -> u32 {
            d.iter()
                .take(k as usize)
                .rev()
                .fold(0u32, |acc, &c| acc * p + c)
        };
        let slow_add = |a: u32, b: u32| -> u32 {
            if k == 1 {
                return (a + b) % p;
            }
            let (da, db) = (digits(a), digits(b));
            let mut s = [0; 3];
            for i in 0..k as usize {
                s[i] = (da[i] + db[i]) % p;
            }
            encode(&s)
        };
        let slow_mul = |a: u32, b: u32| -> u32 {
            if k == 1 {
                return ((a as u64 * b as u64) % p as u64) as u32;
            }
            let (da, db) = (digits(a), digits(b));
            let mut prod = [0u64; 5];
            for i in 0..k as usize {
                for j in 0..k as usize {
                    prod[i + j] += da[i] as u64 * db[j] as u64;
                }
            }
            for deg in (k as usize..2 * k as usize - 1).rev() {
                let c = prod[deg] % p as u64;
                prod[deg] = 0;
                if c != 0 {
                    for (i, &m) in modulus.iter().enumerate().take(k as usize) {
                        let idx = deg - k as usize + i;
                        prod[idx] += (p as u64 - c) * m as u64;
                    }
                }
            }
            let mut d = [0; 3];
            for i in 0..k as usize {
                d[i] = (prod[i] % p as u64) as u32;
            }
            encode(&d)
        };

        let order = q - 1;
        let prime_factors = distinct_prime_factors(order);
        let slow_pow = |a: u32, mut e: u32| -> u32 {
            let (mut base, mut acc) = (a, 1u32);
            while e > 0 {
                if e & 1 == 1 {
                    acc = slow_mul(acc, base);
                }
                base = slow_mul(base, base);
                e >>= 1;
            }
            acc
        };
        let generator = (1..q)
            .find(|&g| prime_factors.iter().all(|&r| slow_pow(g, order / r) != 1))
            .expect("the multiplicative group of a finite field is cyclic");

        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for i in 0..order {
            exp.push(x);
            log[x as usize] = i;
            x = slow_mul(x, generator);
        }

        let neg = (0..q)
            .map(|a| {
                let d = digits(a);
                let mut n = [0; 3];
                for i in 0..k as usize {
                    n[i] = (p - d[i]) % p;
                }
                encode(&n)
            })
            .collect();

        let add = (k > 1 && q <= ADD_TABLE_LIMIT).then(|| {
            let mut t = Vec::with_capacity((q * q) as usize);
            for a in 0..q {
                for b in 0..q {
                    t.push(slow_add(a, b));
                }
            }
            t
        });

        Self {
            inner: Arc::new(Tables {
                spec,
                p,
                k,
                q,
                exp,
                log,
                neg,
                add,
            }),
        }
    }

    pub fn order(&self) -> u32 {
        self.inner.q
    }

    pub fn degree(&self) -> u32 {
        self.inner.k
    }

    /// The class of t in GF(p)[t]/(modulus). Only meaningful when `degree() > 1`.
    pub fn generator_t(&self) -> u32 {
        if self.inner.k == 1 {
            0
        } else {
            self.inner.p
        }
    }

    /// Coefficients c0, c1, ... of the polynomial representative.
    pub fn coefficients(&self, a: u32) -> Vec<u32> {
        let t = &self.inner;
        (0..t.k).map(|i| (a / t.p.pow(i)) % t.p).collect()
    }
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.inner.q)
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.inner.spec == other.inner.spec
    }
}

impl Eq for FiniteField {}

impl Field for FiniteField {
    type Elem = u32;

    fn spec(&self) -> &FieldSpec {
        &self.inner.spec
    }

    #[inline]
    fn zero(&self) -> u32 {
        0
    }

    #[inline]
    fn one(&self) -> u32 {
        1
    }

    fn from_i64(&self, n: i64) -> u32 {
        n.rem_euclid(self.inner.p as i64) as u32
    }

    #[inline]
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let t = &*self.inner;
        if t.k == 1 {
            let s = a + b;
            return if s >= t.p { s - t.p } else { s };
        }
        if let Some(table) = &t.add {
            return table[(*a * t.q + *b) as usize];
        }
        let (mut x, mut y, mut out, mut scale) = (*a, *b, 0, 1);
        for _ in 0..t.k {
            out += ((x % t.p + y % t.p) % t.p) * scale;
            x /= t.p;
            y /= t.p;
            scale *= t.p;
        }
        out
    }

    #[inline]
    fn neg(&self, a: &u32) -> u32 {
        self.inner.neg[*a as usize]
    }

    #[inline]
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        self.add(a, &self.inner.neg[*b as usize])
    }

    #[inline]
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        if *a == 0 || *b == 0 {
            return 0;
        }
        let t = &*self.inner;
        let order = t.q - 1;
        let s = t.log[*a as usize] + t.log[*b as usize];
        t.exp[(if s >= order { s - order } else { s }) as usize]
    }

    fn inv(&self, a: &u32) -> Result<u32, FieldError> {
        if *a == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let t = &*self.inner;
        let l = t.log[*a as usize];
        Ok(t.exp[((t.q - 1 - l) % (t.q - 1)) as usize])
    }

    #[inline]
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }

    fn pow(&self, a: &u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if *a == 0 {
            return 0;
        }
        let t = &*self.inner;
        let order = (t.q - 1) as u64;
        let l = t.log[*a as usize] as u64;
        t.exp[((l * (e % order)) % order) as usize]
    }

    fn elements(&self) -> Option<Vec<u32>> {
        Some((0..self.inner.q).collect())
    }

    fn contains(&self, a: &u32) -> bool {
        *a < self.inner.q
    }

    fn format(&self, a: &u32) -> String {
        let t = &*self.inner;
        if t.k == 1 {
            return a.to_string();
        }
        let coeffs = self.coefficients(*a);
        let mut terms = Vec::new();
        for (i, &c) in coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let term = match (i, c) {
                (0, _) => c.to_string(),
                (1, 1) => "t".to_string(),
                (1, _) => format!("{c}*t"),
                (_, 1) => format!("t^{i}"),
                _ => format!("{c}*t^{i}"),
            };
            terms.push(term);
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }

    fn parse(&self, s: &str) -> Result<u32, ElementParseError> {
        let err = |reason: &str| ElementParseError {
            token: s.to_string(),
            field: self.inner.spec.to_string(),
            reason: reason.to_string(),
        };
        let t = &*self.inner;
        let mut acc = 0u32;
        for (negative, term) in split_terms(s) {
            if term.is_empty() {
                return Err(err("empty term"));
            }
            let value = if let Some((num, den)) = term.split_once('/') {
                let n = parse_int(num, t.p).ok_or_else(|| err("bad numerator"))?;
                let d = parse_int(den, t.p).ok_or_else(|| err("bad denominator"))?;
                self.div(&n, &d).map_err(|_| err("denominator is zero in this field"))?
            } else if term.contains('t') {
                if t.k == 1 {
                    return Err(err("'t' is only valid in extension fields"));
                }
                let (coef, power) = match term.split_once('t') {
                    Some((c, rest)) => (c.trim_end_matches('*'), rest),
                    None => unreachable!(),
                };
                let c = if coef.is_empty() {
                    1
                } else {
                    parse_int(coef, t.p).ok_or_else(|| err("bad coefficient"))?
                };
                let e = if power.is_empty() {
                    1
                } else {
                    power
                        .strip_prefix('^')
                        .and_then(|e| e.parse::<u64>().ok())
                        .ok_or_else(|| err("bad exponent"))?
                };
                self.mul(&c, &self.pow(&self.generator_t(), e))
            } else {
                parse_int(&term, t.p).ok_or_else(|| err("not an integer"))?
            };
            let value = if negative { self.neg(&value) } else { value };
            acc = self.add(&acc, &value);
        }
        Ok(acc)
    }

    fn roots(&self, poly: &[u32]) -> Result<Vec<u32>, FieldError> {
        if poly.iter().all(|c| *c == 0) {
            return Err(FieldError::ZeroPolynomial);
        }
        Ok((0..self.inner.q)
            .filter(|x| self.eval_poly(poly, x) == 0)
            .collect())
    }

    fn has_root(&self, poly: &[u32]) -> Result<bool, FieldError> {
        if poly.iter().all(|c| *c == 0) {
            return Err(FieldError::ZeroPolynomial);
        }
        Ok((0..self.inner.q).any(|x| self.eval_poly(poly, &x) == 0))
    }
}

/// Parses a (possibly signed) decimal integer and reduces it mod p.
fn parse_int(s: &str, p: u32) -> Option<u32> {
    let s = s.trim();
    let (neg, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let r = digits
        .bytes()
        .fold(0u64, |acc, b| (acc * 10 + (b - b'0') as u64) % p as u64) as u32;
    Some(if neg { (p - r) % p } else { r })
}

fn distinct_prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}
