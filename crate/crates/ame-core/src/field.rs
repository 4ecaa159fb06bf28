//! Exact arithmetic in finite fields GF(p^n) with a canonical integer encoding.
//!
//! Elements are encoded as integers in `[0, q)` with `q = p^n`: the base-p
//! digits of the code are the polynomial coefficients, least-significant digit
//! first. Code 0 is the additive identity and code 1 the multiplicative one.
//! For `GF(8)` with the default modulus x^3 + x + 1, code 2 is x, and
//! `2 * 4 = 3` encodes x * x^2 = x + 1.
//!
//! Multiplication and inversion tables are precomputed for q <= 256, which is
//! the range the exhaustive census sweeps.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest field order with precomputed multiplication tables.
const TABLE_LIMIT: u32 = 256;

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NonPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {0} exceeds the supported maximum 2^16")]
    OrderTooLarge(u64),
    #[error("modulus must have degree {expected}, got {got}")]
    ModulusDegree { expected: u32, got: usize },
    #[error("modulus must be monic")]
    ModulusNotMonic,
    #[error("modulus coefficient {0} is outside [0, p)")]
    ModulusCoefficient(u32),
    #[error("modulus is reducible over GF({0})")]
    ModulusReducible(u32),
    #[error("prime fields use the modulus x")]
    PrimeModulus,
    #[error("element code {code} is outside [0, {order})")]
    CodeOutOfRange { code: i64, order: u32 },
    #[error("negative literals are only defined over prime fields")]
    NegativeLiteral,
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("malformed field header: {0}")]
    BadHeader(String),
}

struct FieldInner {
    p: u32,
    n: u32,
    q: u32,
    /// Monic irreducible modulus, constant term first, length n + 1.
    modulus: Vec<u32>,
    /// q*q code tables, present when q <= TABLE_LIMIT.
    add_table: Vec<u16>,
    mul_table: Vec<u16>,
    /// Per-code tables (inv_table[0] is unused).
    neg_table: Vec<u16>,
    inv_table: Vec<u16>,
}

/// A finite field GF(p^n). Cheap to clone and share; all state is immutable.
#[derive(Clone)]
pub struct Field(Arc<FieldInner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p
                && self.0.n == other.0.n
                && self.0.modulus == other.0.modulus)
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.0.q)?;
        if self.0.n > 1 {
            write!(f, " mod {:?}", self.0.modulus)?;
        }
        Ok(())
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Polynomials over GF(p) as coefficient vectors, constant term first.
mod poly {
    /// Reduce `a` modulo the monic polynomial `m`, in place; returns the
    /// remainder truncated to deg(m) coefficients.
    pub fn rem(mut a: Vec<u32>, m: &[u32], p: u32) -> Vec<u32> {
        let dm = m.len() - 1;
        for i in (dm..a.len()).rev() {
            let c = a[i] % p;
            if c != 0 {
                for (j, &mj) in m.iter().enumerate() {
                    let idx = i - dm + j;
                    a[idx] = (a[idx] + c * (p - mj % p)) % p;
                }
            }
        }
        a.truncate(dm);
        a
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut out = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        out
    }

    /// Trial division by every monic polynomial of degree <= deg(m)/2.
    pub fn is_irreducible(m: &[u32], p: u32) -> bool {
        let deg = m.len() - 1;
        for d in 1..=deg / 2 {
            // monic divisors of degree d, enumerated by their lower coefficients
            let count = (p as u64).pow(d as u32);
            for code in 0..count {
                let mut div = decode(code, d + 1, p);
                div[d] = 1;
                if rem(m.to_vec(), &div, p).iter().all(|&c| c == 0) {
                    return false;
                }
            }
        }
        true
    }

    pub fn decode(mut code: u64, len: usize, p: u32) -> Vec<u32> {
        let mut out = vec![0u32; len];
        for slot in out.iter_mut() {
            *slot = (code % p as u64) as u32;
            code /= p as u64;
        }
        out
    }

    pub fn encode(coeffs: &[u32], p: u32) -> u64 {
        coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * p as u64 + c as u64)
    }
}

impl Field {
    /// Construct GF(p^n). When `modulus` is omitted the monic irreducible of
    /// degree n with the smallest integer code is chosen, so that `(2, 3)`
    /// yields x^3 + x + 1 and `(2, 2)` yields x^2 + x + 1.
    pub fn new(p: u32, n: u32, modulus: Option<&[u32]>) -> Result<Field, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NonPrime(p));
        }
        if n == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = (p as u64).checked_pow(n).filter(|&q| q <= MAX_ORDER as u64);
        let q = q.ok_or(FieldError::OrderTooLarge((p as u64).saturating_pow(n)))? as u32;

        let modulus = match modulus {
            Some(m) => {
                if m.len() != n as usize + 1 {
                    return Err(FieldError::ModulusDegree {
                        expected: n,
                        got: m.len().saturating_sub(1),
                    });
                }
                if n == 1 {
                    if m != [0, 1] {
                        return Err(FieldError::PrimeModulus);
                    }
                    m.to_vec()
                } else {
                    if let Some(&c) = m.iter().find(|&&c| c >= p) {
                        return Err(FieldError::ModulusCoefficient(c));
                    }
                    if m[n as usize] != 1 {
                        return Err(FieldError::ModulusNotMonic);
                    }
                    if !poly::is_irreducible(m, p) {
                        return Err(FieldError::ModulusReducible(p));
                    }
                    m.to_vec()
                }
            }
            None => Self::default_modulus(p, n),
        };

        let mut inner = FieldInner {
            p,
            n,
            q,
            modulus,
            add_table: Vec::new(),
            mul_table: Vec::new(),
            neg_table: Vec::new(),
            inv_table: Vec::new(),
        };
        inner.build_tables();
        Ok(Field(Arc::new(inner)))
    }

    /// Shorthand for the prime field GF(p).
    pub fn prime(p: u32) -> Result<Field, FieldError> {
        Field::new(p, 1, None)
    }

    fn default_modulus(p: u32, n: u32) -> Vec<u32> {
        if n == 1 {
            return vec![0, 1];
        }
        // scan monic degree-n polynomials in integer-code order
        let count = (p as u64).pow(n);
        for code in 0..count {
            let mut m = poly::decode(code, n as usize + 1, p);
            m[n as usize] = 1;
            if poly::is_irreducible(&m, p) {
                return m;
            }
        }
        unreachable!("an irreducible polynomial of every degree exists over GF(p)")
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.n
    }

    /// The order q = p^n.
    pub fn order(&self) -> u32 {
        self.0.q
    }

    /// Modulus coefficients, constant term first (length n + 1).
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    // ---- code-level arithmetic ----

    fn decode_el(&self, code: u32) -> Vec<u32> {
        poly::decode(code as u64, self.0.n as usize, self.0.p)
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.0.q && b < self.0.q);
        let inner = &*self.0;
        if !inner.add_table.is_empty() {
            return inner.add_table[(a * inner.q + b) as usize] as u32;
        }
        if inner.p == 2 {
            return a ^ b;
        }
        if inner.n == 1 {
            return (a + b) % inner.p;
        }
        let sum: Vec<u32> = self
            .decode_el(a)
            .iter()
            .zip(self.decode_el(b).iter())
            .map(|(&x, &y)| (x + y) % inner.p)
            .collect();
        poly::encode(&sum, inner.p) as u32
    }

    pub fn neg(&self, a: u32) -> u32 {
        debug_assert!(a < self.0.q);
        let inner = &*self.0;
        if !inner.neg_table.is_empty() {
            return inner.neg_table[a as usize] as u32;
        }
        if inner.p == 2 {
            return a;
        }
        if inner.n == 1 {
            return if a == 0 { 0 } else { inner.p - a };
        }
        let neg: Vec<u32> = self
            .decode_el(a)
            .iter()
            .map(|&x| if x == 0 { 0 } else { inner.p - x })
            .collect();
        poly::encode(&neg, inner.p) as u32
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.0.q && b < self.0.q);
        let inner = &*self.0;
        if !inner.mul_table.is_empty() {
            return inner.mul_table[(a * inner.q + b) as usize] as u32;
        }
        self.mul_slow(a, b)
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let inner = &*self.0;
        if inner.n == 1 {
            return ((a as u64 * b as u64) % inner.p as u64) as u32;
        }
        let prod = poly::mul(&self.decode_el(a), &self.decode_el(b), inner.p);
        let red = poly::rem(prod, &inner.modulus, inner.p);
        poly::encode(&red, inner.p) as u32
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        debug_assert!(a < self.0.q);
        if a == 0 {
            return None;
        }
        let inner = &*self.0;
        if !inner.inv_table.is_empty() {
            return Some(inner.inv_table[a as usize] as u32);
        }
        // a^(q-2) in the multiplicative group
        Some(self.pow(a, (inner.q - 2) as u64))
    }

    /// `a / b`; `None` when b = 0.
    pub fn div(&self, a: u32, b: u32) -> Option<u32> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    // ---- element-level API ----

    /// Wrap a code as an element, checking the range.
    pub fn element(&self, code: u32) -> Result<FieldElement, FieldError> {
        if code >= self.0.q {
            return Err(FieldError::CodeOutOfRange {
                code: code as i64,
                order: self.0.q,
            });
        }
        Ok(FieldElement {
            field: self.clone(),
            code,
        })
    }

    /// Map a (possibly negative) integer literal into the field. Negative
    /// values are reduced mod p and allowed only for prime fields, so that
    /// -2 over GF(5) reads as 3.
    pub fn element_from_int(&self, v: i64) -> Result<FieldElement, FieldError> {
        if v < 0 {
            if self.0.n != 1 {
                return Err(FieldError::NegativeLiteral);
            }
            let p = self.0.p as i64;
            return self.element(v.rem_euclid(p) as u32);
        }
        if v >= self.0.q as i64 {
            return Err(FieldError::CodeOutOfRange {
                code: v,
                order: self.0.q,
            });
        }
        self.element(v as u32)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            field: self.clone(),
            code: 0,
        }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement {
            field: self.clone(),
            code: 1,
        }
    }

    /// All elements in ascending code order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.0.q).map(move |code| FieldElement {
            field: self.clone(),
            code,
        })
    }

    // ---- text header ----

    /// Header line used by all file formats: `field <p> <n> [<c0> .. <cn>]`.
    pub fn header(&self) -> String {
        let mut s = format!("field {} {}", self.0.p, self.0.n);
        if self.0.n > 1 {
            for c in &self.0.modulus {
                s.push(' ');
                s.push_str(&c.to_string());
            }
        }
        s
    }

    /// Parse a `field p n [c0 .. cn]` header line.
    pub fn parse_header(line: &str) -> Result<Field, FieldError> {
        let mut it = line.split_whitespace();
        if it.next() != Some("field") {
            return Err(FieldError::BadHeader("expected leading `field`".into()));
        }
        let mut nums = Vec::new();
        for tok in it {
            let v: u32 = tok
                .parse()
                .map_err(|_| FieldError::BadHeader(format!("bad number `{tok}`")))?;
            nums.push(v);
        }
        if nums.len() < 2 {
            return Err(FieldError::BadHeader("need `field p n`".into()));
        }
        let (p, n) = (nums[0], nums[1]);
        let modulus = if nums.len() > 2 { Some(&nums[2..]) } else { None };
        Field::new(p, n, modulus)
    }
}

impl FieldInner {
    fn build_tables(&mut self) {
        if self.q > TABLE_LIMIT {
            return;
        }
        let q = self.q as usize;
        let field = FieldView(self);
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        for a in 0..q as u32 {
            for b in 0..q as u32 {
                add[(a as usize) * q + b as usize] = field.add_slow(a, b) as u16;
                mul[(a as usize) * q + b as usize] = field.mul_slow(a, b) as u16;
            }
        }
        let mut neg = vec![0u16; q];
        let mut inv = vec![0u16; q];
        for a in 0..q as u32 {
            for b in 0..q as u32 {
                if add[(a as usize) * q + b as usize] == 0 {
                    neg[a as usize] = b as u16;
                }
                if a != 0 && mul[(a as usize) * q + b as usize] == 1 {
                    inv[a as usize] = b as u16;
                }
            }
        }
        self.add_table = add;
        self.mul_table = mul;
        self.neg_table = neg;
        self.inv_table = inv;
    }
}

/// Table-free arithmetic used while the tables are being built.
struct FieldView<'a>(&'a FieldInner);

impl FieldView<'_> {
    fn add_slow(&self, a: u32, b: u32) -> u32 {
        let f = self.0;
        if f.p == 2 {
            return a ^ b;
        }
        if f.n == 1 {
            return (a + b) % f.p;
        }
        let pa = poly::decode(a as u64, f.n as usize, f.p);
        let pb = poly::decode(b as u64, f.n as usize, f.p);
        let sum: Vec<u32> = pa.iter().zip(pb.iter()).map(|(&x, &y)| (x + y) % f.p).collect();
        poly::encode(&sum, f.p) as u32
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let f = self.0;
        if f.n == 1 {
            return ((a as u64 * b as u64) % f.p as u64) as u32;
        }
        let pa = poly::decode(a as u64, f.n as usize, f.p);
        let pb = poly::decode(b as u64, f.n as usize, f.p);
        let prod = poly::mul(&pa, &pb, f.p);
        let red = poly::rem(prod, &f.modulus, f.p);
        poly::encode(&red, f.p) as u32
    }
}

/// An element of a specific [`Field`], carrying its field handle.
///
/// Binary operators panic when the operands belong to different fields; the
/// methods on [`Field`] taking raw codes are the unchecked fast path.
#[derive(Clone)]
pub struct FieldElement {
    field: Field,
    code: u32,
}

impl FieldElement {
    pub fn code(&self) -> u32 {
        self.code
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.code == 0
    }

    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        let code = self.field.inv(self.code).ok_or(FieldError::ZeroInverse)?;
        Ok(FieldElement {
            field: self.field.clone(),
            code,
        })
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            code: self.field.pow(self.code, e),
        }
    }

    fn binop(&self, rhs: &FieldElement, f: impl Fn(&Field, u32, u32) -> u32) -> FieldElement {
        assert!(self.field == rhs.field, "operands belong to different fields");
        FieldElement {
            field: self.field.clone(),
            code: f(&self.field, self.code, rhs.code),
        }
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code && self.field == other.field
    }
}
impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code)
    }
}

impl std::ops::Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.binop(rhs, Field::add)
    }
}

impl std::ops::Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.binop(rhs, Field::sub)
    }
}

impl std::ops::Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.binop(rhs, Field::mul)
    }
}

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            code: self.field.neg(self.code),
        }
    }
}
