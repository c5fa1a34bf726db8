//! Arithmetic in `E = GF(2^n)` (even `n`) and its subfield `F = GF(2^{n/2})`.
//!
//! Elements are bit vectors in the polynomial basis `1, α, …, α^{n-1}` where
//! `α` is the residue class of `x` modulo a primitive polynomial. The subfield
//! is never stored at a separate bit width: an element of `F` is simply an
//! element of `E` fixed by `x ↦ x^{2^{n/2}}`.

use std::fmt;
use std::ops::{Add, AddAssign};

use thiserror::Error;

/// Smallest supported extension degree.
pub const MIN_N: u32 = 4;
/// Largest supported extension degree (log tables stay below ~12 MB).
pub const MAX_N: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("unsupported extension degree n = {0}: n must be even with {MIN_N} <= n <= {MAX_N}")]
    UnsupportedN(u32),
    #[error("polynomial {poly} does not have degree {n}")]
    WrongDegree { poly: String, n: u32 },
    #[error("polynomial {0} is not primitive")]
    NonPrimitivePolynomial(String),
    #[error("{m} does not divide {n}")]
    NonDivisor { m: u32, n: u32 },
    #[error("cannot parse polynomial {0:?}: expected a hexadecimal bitmask such as 0x13")]
    BadPolynomial(String),
}

/// Default primitive polynomial for each supported `n`, as a bitmask
/// (bit `i` is the coefficient of `x^i`).
pub fn default_polynomial(n: u32) -> Option<u32> {
    Some(match n {
        4 => 0x13,      // x^4 + x + 1
        6 => 0x43,      // x^6 + x + 1
        8 => 0x11d,     // x^8 + x^4 + x^3 + x^2 + 1
        10 => 0x409,    // x^10 + x^3 + 1
        12 => 0x1053,   // x^12 + x^6 + x^4 + x + 1
        14 => 0x4443,   // x^14 + x^10 + x^6 + x + 1
        16 => 0x1100b,  // x^16 + x^12 + x^3 + x + 1
        18 => 0x40081,  // x^18 + x^7 + 1
        20 => 0x100009, // x^20 + x^3 + 1
        _ => return None,
    })
}

/// Formats a polynomial bitmask as `0x…`.
pub fn format_polynomial(poly: u32) -> String {
    format!("{poly:#x}")
}

/// Parses a hexadecimal polynomial bitmask, with or without a `0x` prefix.
pub fn parse_polynomial(s: &str) -> Result<u32, FieldError> {
    let t = s.trim();
    let digits = t
        .strip_prefix("0x")
        .or_else(|| t.strip_prefix("0X"))
        .unwrap_or(t);
    u32::from_str_radix(digits, 16).map_err(|_| FieldError::BadPolynomial(s.to_string()))
}

/// An element of `GF(2^n)`; only the low `n` bits are meaningful.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl Add for FieldElement {
    type Output = FieldElement;

    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

impl AddAssign for FieldElement {
    #[inline]
    #[allow(clippy::suspicious_op_assign_impl)]
    fn add_assign(&mut self, rhs: FieldElement) {
        self.0 ^= rhs.0;
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

/// Immutable `GF(2^n)` context: defining polynomial, log/antilog tables,
/// trace masks and a coordinate system for the subfield `F`.
#[derive(Clone)]
pub struct FieldCtx {
    n: u32,
    poly: u32,
    order: u32,
    /// `exp[i] = α^i` for `0 <= i < 2·order`, doubled so products skip a reduction.
    exp: Vec<u32>,
    /// `log[x]` for `x != 0`; `log[0]` is unused.
    log: Vec<u32>,
    /// `tr_1^n(y) = parity(y & trace_mask)`.
    trace_mask: u32,
    /// For `y ∈ F`: `tr_1^{n/2}(y) = parity(y & half_trace_mask)`.
    half_trace_mask: u32,
    /// Reduced echelon basis of `F` as a GF(2) subspace, with its pivot bits.
    subfield_basis: Vec<u32>,
    subfield_pivots: Vec<u32>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("n", &self.n)
            .field("poly", &format_polynomial(self.poly))
            .finish()
    }
}

impl FieldCtx {
    /// Builds `GF(2^n)` from the default primitive polynomial.
    pub fn new(n: u32) -> Result<Self, FieldError> {
        Self::with_polynomial(n, None)
    }

    /// Builds `GF(2^n)`; primitivity of `poly` is always re-verified.
    pub fn with_polynomial(n: u32, poly: Option<u32>) -> Result<Self, FieldError> {
        if !n.is_multiple_of(2) || !(MIN_N..=MAX_N).contains(&n) {
            return Err(FieldError::UnsupportedN(n));
        }
        let poly = match poly {
            Some(p) => p,
            None => default_polynomial(n).ok_or(FieldError::UnsupportedN(n))?,
        };
        if poly >> n != 1 {
            return Err(FieldError::WrongDegree {
                poly: format_polynomial(poly),
                n,
            });
        }
        let order = (1u32 << n) - 1;
        let size = 1usize << n;
        let mut exp = vec![0u32; 2 * order as usize];
        let mut log = vec![u32::MAX; size];
        let mut x = 1u32;
        for i in 0..order {
            // x must walk through all nonzero residues before returning to 1
            if x == 0 || log[x as usize] != u32::MAX {
                return Err(FieldError::NonPrimitivePolynomial(format_polynomial(poly)));
            }
            exp[i as usize] = x;
            log[x as usize] = i;
            x <<= 1;
            if x >> n != 0 {
                x ^= poly;
            }
        }
        if x != 1 {
            return Err(FieldError::NonPrimitivePolynomial(format_polynomial(poly)));
        }
        for i in 0..order as usize {
            exp[i + order as usize] = exp[i];
        }
        log[0] = 0;

        let mut ctx = FieldCtx {
            n,
            poly,
            order,
            exp,
            log,
            trace_mask: 0,
            half_trace_mask: 0,
            subfield_basis: Vec::new(),
            subfield_pivots: Vec::new(),
        };
        ctx.trace_mask = (0..n)
            .filter(|&i| {
                ctx.trace_to_subfield_unchecked(FieldElement(1 << i), 1) == FieldElement::ONE
            })
            .fold(0, |m, i| m | (1 << i));
        ctx.build_subfield_coordinates();
        Ok(ctx)
    }

    fn build_subfield_coordinates(&mut self) {
        let h = self.half();
        // F* is generated by β; its powers span F over GF(2)
        let beta = self.beta();
        let mut rows: Vec<u32> = Vec::new();
        let mut g = FieldElement::ONE;
        for _ in 0..(1u32 << h) - 1 {
            let mut v = g.0;
            for &r in &rows {
                let top = 31 - r.leading_zeros();
                if v >> top & 1 == 1 {
                    v ^= r;
                }
            }
            if v != 0 {
                let top = 31 - v.leading_zeros();
                for r in rows.iter_mut() {
                    if *r >> top & 1 == 1 {
                        *r ^= v;
                    }
                }
                rows.push(v);
                rows.sort_unstable();
            }
            g = self.mul(g, beta);
        }
        debug_assert_eq!(rows.len() as u32, h);
        self.subfield_pivots = rows.iter().map(|r| 31 - r.leading_zeros()).collect();
        self.subfield_basis = rows;
        self.half_trace_mask = self
            .subfield_basis
            .iter()
            .zip(&self.subfield_pivots)
            .filter(|(&b, _)| self.half_trace_by_definition(FieldElement(b)))
            .fold(0, |m, (_, &p)| m | (1 << p));
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    /// `n / 2`, the degree of the subfield `F`.
    #[inline]
    pub fn half(&self) -> u32 {
        self.n / 2
    }

    /// `2^n − 1`, the order of `E*` and the sequence period.
    #[inline]
    pub fn order(&self) -> u32 {
        self.order
    }

    /// `2^n`.
    #[inline]
    pub fn size(&self) -> usize {
        1usize << self.n
    }

    /// `2^{n/2}`.
    #[inline]
    pub fn subfield_size(&self) -> usize {
        1usize << self.half()
    }

    pub fn polynomial(&self) -> u32 {
        self.poly
    }

    /// The primitive element `α` (residue class of `x`).
    #[inline]
    pub fn alpha(&self) -> FieldElement {
        FieldElement(self.exp[1])
    }

    /// `β = α^{2^{n/2}+1}`, a primitive element of `F`.
    pub fn beta(&self) -> FieldElement {
        self.exp_alpha((1u64 << self.half()) + 1)
    }

    /// `α^e`.
    #[inline]
    pub fn exp_alpha(&self, e: u64) -> FieldElement {
        FieldElement(self.exp[(e % self.order as u64) as usize])
    }

    /// Discrete logarithm base `α`; `None` for zero.
    #[inline]
    pub fn log(&self, x: FieldElement) -> Option<u32> {
        if x.is_zero() {
            None
        } else {
            Some(self.log[x.0 as usize])
        }
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        FieldElement(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    #[inline]
    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        let l = self.log(a)?;
        Some(FieldElement(
            self.exp[((self.order - l) % self.order) as usize],
        ))
    }

    /// `a^e`, with `0^0 = 1` and `0^e = 0` for `e > 0`.
    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        match self.log(a) {
            None if e == 0 => FieldElement::ONE,
            None => FieldElement::ZERO,
            Some(l) => {
                let r = (l as u64 * (e % self.order as u64)) % self.order as u64;
                FieldElement(self.exp[r as usize])
            }
        }
    }

    /// `x^{2^i}` (`i` is taken mod `n`).
    pub fn frobenius(&self, x: FieldElement, i: u32) -> FieldElement {
        match self.log(x) {
            None => FieldElement::ZERO,
            Some(l) => {
                let r = ((l as u64) << (i % self.n)) % self.order as u64;
                FieldElement(self.exp[r as usize])
            }
        }
    }

    /// Relative trace `tr_m^n(x) = Σ_{i < n/m} x^{2^{im}}`.
    pub fn trace_to_subfield(&self, x: FieldElement, m: u32) -> Result<FieldElement, FieldError> {
        if m == 0 || !self.n.is_multiple_of(m) {
            return Err(FieldError::NonDivisor { m, n: self.n });
        }
        Ok(self.trace_to_subfield_unchecked(x, m))
    }

    fn trace_to_subfield_unchecked(&self, x: FieldElement, m: u32) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        let mut y = x;
        for _ in 0..self.n / m {
            acc += y;
            y = self.frobenius(y, m);
        }
        acc
    }

    /// Absolute trace `tr_1^n(y)` as a bit.
    #[inline]
    pub fn trace(&self, y: FieldElement) -> bool {
        (y.0 & self.trace_mask).count_ones() & 1 == 1
    }

    /// `tr_1^{n/2}(y)` as a bit. Only meaningful for `y ∈ F`.
    #[inline]
    pub fn half_trace(&self, y: FieldElement) -> bool {
        debug_assert!(self.in_subfield(y));
        (y.0 & self.half_trace_mask).count_ones() & 1 == 1
    }

    /// `tr_1^{n/2}(y) = Σ_{i < n/2} y^{2^i}` evaluated term by term.
    pub fn half_trace_by_definition(&self, y: FieldElement) -> bool {
        let mut acc = FieldElement::ZERO;
        let mut z = y;
        for _ in 0..self.half() {
            acc += z;
            z = self.square(z);
        }
        debug_assert!(acc == FieldElement::ZERO || acc == FieldElement::ONE);
        acc == FieldElement::ONE
    }

    /// True iff `x^{2^{n/2}} = x`.
    pub fn in_subfield(&self, x: FieldElement) -> bool {
        self.frobenius(x, self.half()) == x
    }

    /// Coordinate of `c ∈ F` in `0..2^{n/2}`. GF(2)-linear:
    /// `coord(c1 + c2) = coord(c1) ^ coord(c2)`.
    #[inline]
    pub fn subfield_coord(&self, c: FieldElement) -> u32 {
        self.subfield_pivots
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &p)| acc | ((c.0 >> p) & 1) << j)
    }

    /// Mask `m` with `tr_1^{n/2}(c·q) = parity(subfield_coord(c) & m)` for
    /// `c, q ∈ F`.
    pub fn subfield_pairing_mask(&self, q: FieldElement) -> u32 {
        self.subfield_basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| self.half_trace(self.mul(FieldElement(b), q)))
            .fold(0, |m, (j, _)| m | 1 << j)
    }

    /// Inverse of [`FieldCtx::subfield_coord`].
    pub fn subfield_from_coord(&self, coord: u32) -> FieldElement {
        FieldElement(
            self.subfield_basis
                .iter()
                .enumerate()
                .filter(|(j, _)| coord >> j & 1 == 1)
                .fold(0, |acc, (_, &b)| acc ^ b),
        )
    }

    /// All elements of `E` in increasing bit order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..1u32 << self.n).map(FieldElement)
    }

    /// `E*` in increasing bit order.
    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> {
        (1..1u32 << self.n).map(FieldElement)
    }

    /// All elements of `F` in increasing bit order.
    pub fn subfield_elements(&self) -> Vec<FieldElement> {
        let mut v: Vec<FieldElement> = (0..self.subfield_size() as u32)
            .map(|c| self.subfield_from_coord(c))
            .collect();
        v.sort_unstable();
        v
    }

    /// Formats an element as a power of `α` (`"a^13"`), or `"0"`.
    pub fn format_log(&self, x: FieldElement) -> String {
        match self.log(x) {
            None => "0".to_string(),
            Some(l) => format!("a^{l}"),
        }
    }

    /// Parses the output of [`FieldCtx::format_log`].
    pub fn parse_log(&self, s: &str) -> Option<FieldElement> {
        if s == "0" {
            return Some(FieldElement::ZERO);
        }
        let e: u64 = s.strip_prefix("a^")?.parse().ok()?;
        Some(self.exp_alpha(e))
    }
}

/// Euclid's gcd on machine integers.
pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}
