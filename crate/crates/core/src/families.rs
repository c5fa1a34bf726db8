//! Sequence families of period `N = 2^n − 1`.
//!
//! With `h = n/2`, `x = α^t` and `k` admissible, the family `F^k` has two parts:
//!
//! * `s_{γδ}(t) = tr(x + γ x^{2^k+1}) + tr_h(δ x^{2^h+1})` for `(γ, δ) ∈ E × F`;
//! * `s_{ζη}(t) = tr(ζ x^{2^k+1}) + tr_h(η x^{2^h+1})` for `(ζ, η) ∈ Γ × Δ`.
//!
//! The small Kasami set is the `γ = 0` slice of the first part, and the large
//! Kasami set is `F^{h+1}`. Those two are also generated independently from
//! linear recurrences in [`shift_register`], so set equality with the trace
//! construction is a real check rather than a tautology.

use std::collections::HashSet;
use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::gf2n::{FieldCtx, FieldElement};
use crate::quadform::{check_k, dual_index, quad_exponent, QuadFormError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error(transparent)]
    InvalidK(#[from] QuadFormError),
    #[error("the generalized family needs an explicit k")]
    MissingK,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyKind {
    #[serde(rename = "fk")]
    GeneralizedFk,
    #[serde(rename = "small-kasami")]
    SmallKasami,
    #[serde(rename = "large-kasami")]
    LargeKasami,
}

impl FamilyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyKind::GeneralizedFk => "fk",
            FamilyKind::SmallKasami => "small-kasami",
            FamilyKind::LargeKasami => "large-kasami",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FamilyParams<'a> {
    pub ctx: &'a FieldCtx,
    pub k: u32,
    pub kind: FamilyKind,
}

impl<'a> FamilyParams<'a> {
    /// Validates `k` for the generalized family. Both Kasami kinds fix
    /// `k = n/2 + 1` and ignore the argument.
    pub fn new(ctx: &'a FieldCtx, kind: FamilyKind, k: Option<u32>) -> Result<Self, FamilyError> {
        let k = match kind {
            FamilyKind::GeneralizedFk => k.ok_or(FamilyError::MissingK)?,
            FamilyKind::SmallKasami | FamilyKind::LargeKasami => ctx.half() + 1,
        };
        check_k(ctx.n(), k)?;
        Ok(FamilyParams { ctx, k, kind })
    }

    pub fn generalized(ctx: &'a FieldCtx, k: u32) -> Result<Self, FamilyError> {
        Self::new(ctx, FamilyKind::GeneralizedFk, Some(k))
    }

    pub fn small_kasami(ctx: &'a FieldCtx) -> Self {
        Self::new(ctx, FamilyKind::SmallKasami, None).expect("n/2 + 1 is always admissible")
    }

    pub fn large_kasami(ctx: &'a FieldCtx) -> Self {
        Self::new(ctx, FamilyKind::LargeKasami, None).expect("n/2 + 1 is always admissible")
    }
}

/// Construction parameters of one sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SequenceTag {
    /// First part: `(γ, δ) ∈ E × F`.
    GammaDelta {
        gamma: FieldElement,
        delta: FieldElement,
    },
    /// Second part: `(ζ, η) ∈ Γ × Δ`.
    ZetaEta {
        zeta: FieldElement,
        eta: FieldElement,
    },
}

impl SequenceTag {
    /// Whether the sequence carries the `tr(x)` term.
    pub fn has_linear_term(&self) -> bool {
        matches!(self, SequenceTag::GammaDelta { .. })
    }

    /// Coefficient of `x^{2^k+1}` (`γ` or `ζ`).
    pub fn quadratic_coeff(&self) -> FieldElement {
        match *self {
            SequenceTag::GammaDelta { gamma, .. } => gamma,
            SequenceTag::ZetaEta { zeta, .. } => zeta,
        }
    }

    /// Coefficient of `x^{2^h+1}` (`δ` or `η`), an element of `F`.
    pub fn subfield_coeff(&self) -> FieldElement {
        match *self {
            SequenceTag::GammaDelta { delta, .. } => delta,
            SequenceTag::ZetaEta { eta, .. } => eta,
        }
    }

    /// JSON object with coefficients written as powers of `α`.
    pub fn to_json(&self, ctx: &FieldCtx) -> serde_json::Value {
        match *self {
            SequenceTag::GammaDelta { gamma, delta } => {
                json!({"gamma": ctx.format_log(gamma), "delta": ctx.format_log(delta)})
            }
            SequenceTag::ZetaEta { zeta, eta } => {
                json!({"zeta": ctx.format_log(zeta), "eta": ctx.format_log(eta)})
            }
        }
    }
}

/// Bit-packed binary sequence, bit `t` at word `t / 64`, position `t % 64`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinarySequence {
    words: Vec<u64>,
    len: usize,
    pub tag: SequenceTag,
}

impl BinarySequence {
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I, tag: SequenceTag) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % 64 == 0 {
                words.push(0);
            }
            if b {
                words[len / 64] |= 1 << (len % 64);
            }
            len += 1;
        }
        BinarySequence { words, len, tag }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn bit(&self, t: usize) -> bool {
        self.words[t / 64] >> (t % 64) & 1 == 1
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|t| self.bit(t))
    }

    /// Number of ones.
    pub fn weight(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Cyclic shift: bit `t` of the result is bit `t + τ (mod len)` of `self`.
    pub fn rotated(&self, tau: usize) -> BinarySequence {
        let words = rotate_words(&self.words, self.len, tau % self.len.max(1));
        BinarySequence {
            words,
            len: self.len,
            tag: self.tag,
        }
    }

    /// `'0'`/`'1'` characters, `t = 0` first.
    pub fn to_bit_string(&self) -> String {
        self.bits().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// Bytes LSB-first (`t = 8j` in bit 0 of byte `j`) as lowercase hex.
    pub fn to_hex(&self) -> String {
        let nbytes = self.len.div_ceil(8);
        let mut s = String::with_capacity(2 * nbytes);
        for j in 0..nbytes {
            let byte = (self.words[j / 8] >> (8 * (j % 8))) & 0xff;
            s.push_str(&format!("{byte:02x}"));
        }
        s
    }
}

/// Rotates a packed bit string of length `len` so that output bit `t` is input
/// bit `t + tau`.
pub fn rotate_words(words: &[u64], len: usize, tau: usize) -> Vec<u64> {
    let nw = len.div_ceil(64);
    let get = |i: usize| -> bool {
        let i = (i + tau) % len;
        words[i / 64] >> (i % 64) & 1 == 1
    };
    let mut out = vec![0u64; nw];
    let mut t = 0;
    while t < len {
        // fast path: copy a full 64-bit window when no wrap occurs inside it
        let src = t + tau;
        let end = (t + 64).min(len);
        if src + (end - t) <= len {
            let (q, off) = (src / 64, src % 64);
            let mut v = words[q] >> off;
            if off > 0 && q + 1 < words.len() {
                v |= words[q + 1] << (64 - off);
            }
            let take = end - t;
            if take < 64 {
                v &= (1u64 << take) - 1;
            }
            out[t / 64] = v;
        } else {
            for i in t..end {
                if get(i) {
                    out[i / 64] |= 1 << (i % 64);
                }
            }
        }
        t = end;
    }
    out
}

/// Number of zeros minus number of ones, `Σ_t (−1)^{s(t)}`.
pub fn imbalance(seq: &BinarySequence) -> i64 {
    seq.len() as i64 - 2 * seq.weight() as i64
}

/// All sequences of one family, first part then second part.
#[derive(Clone, Debug)]
pub struct SequenceFamily<'a> {
    pub params: FamilyParams<'a>,
    pub part1: Vec<BinarySequence>,
    pub part2: Vec<BinarySequence>,
}

impl<'a> SequenceFamily<'a> {
    pub fn len(&self) -> usize {
        self.part1.len() + self.part2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn period(&self) -> usize {
        self.params.ctx.order() as usize
    }

    pub fn sequences(&self) -> impl Iterator<Item = &BinarySequence> {
        self.part1.iter().chain(self.part2.iter())
    }

    /// Whether every sequence differs from every other as a bit string.
    pub fn all_distinct(&self) -> bool {
        let mut seen = HashSet::with_capacity(self.len());
        self.sequences().all(|s| seen.insert(s.words()))
    }

    /// Bit strings of every sequence, for set comparisons.
    pub fn bit_set(&self) -> HashSet<Vec<u64>> {
        self.sequences().map(|s| s.words().to_vec()).collect()
    }
}

/// `[0, α^0, α^1, …, α^{N−1}]`.
pub fn elements_by_log(ctx: &FieldCtx) -> Vec<FieldElement> {
    std::iter::once(FieldElement::ZERO)
        .chain((0..ctx.order() as u64).map(|e| ctx.exp_alpha(e)))
        .collect()
}

/// `[0, β^0, β^1, …, β^{2^h−2}]`.
pub fn subfield_by_log(ctx: &FieldCtx) -> Vec<FieldElement> {
    let beta = ctx.beta();
    std::iter::once(FieldElement::ZERO)
        .chain((0..ctx.subfield_size() as u64 - 1).map(|j| ctx.pow(beta, j)))
        .collect()
}

/// `(Γ, Δ)`: `({1}, F)` when `n/2` is odd, and
/// `({1, α, α²}, {β^0, …, β^{(2^h−1)/3 − 1}})` when `n/2` is even.
pub fn gamma_delta_sets(ctx: &FieldCtx) -> (Vec<FieldElement>, Vec<FieldElement>) {
    if ctx.half() % 2 == 1 {
        (vec![FieldElement::ONE], subfield_by_log(ctx))
    } else {
        let a = ctx.alpha();
        let beta = ctx.beta();
        let count = (ctx.subfield_size() as u64 - 1) / 3;
        (
            vec![FieldElement::ONE, a, ctx.square(a)],
            (0..count).map(|j| ctx.pow(beta, j)).collect(),
        )
    }
}

/// Tags of the family in canonical order.
pub fn family_tags(params: &FamilyParams) -> (Vec<SequenceTag>, Vec<SequenceTag>) {
    let ctx = params.ctx;
    let deltas = subfield_by_log(ctx);
    let gammas = match params.kind {
        FamilyKind::SmallKasami => vec![FieldElement::ZERO],
        _ => elements_by_log(ctx),
    };
    let part1 = gammas
        .iter()
        .flat_map(|&gamma| {
            deltas
                .iter()
                .map(move |&delta| SequenceTag::GammaDelta { gamma, delta })
        })
        .collect();
    let part2 = match params.kind {
        FamilyKind::SmallKasami => Vec::new(),
        _ => {
            let (zetas, etas) = gamma_delta_sets(ctx);
            zetas
                .iter()
                .flat_map(|&zeta| {
                    etas.iter()
                        .map(move |&eta| SequenceTag::ZetaEta { zeta, eta })
                })
                .collect()
        }
    };
    (part1, part2)
}

/// Term `t` of the sequence with the given tag, straight from the trace formulas.
pub fn sequence_term(params: &FamilyParams, tag: &SequenceTag, t: u64) -> bool {
    let ctx = params.ctx;
    let x = ctx.exp_alpha(t);
    let quad = ctx.pow(x, quad_exponent(params.k));
    let norm = ctx.pow(x, quad_exponent(ctx.half()));
    let lin = if tag.has_linear_term() {
        x
    } else {
        FieldElement::ZERO
    };
    ctx.trace(lin + ctx.mul(tag.quadratic_coeff(), quad))
        ^ ctx.half_trace_by_definition(ctx.mul(tag.subfield_coeff(), norm))
}

/// Builds every sequence from the trace formulas using per-`t` masks.
pub fn build_family_by_trace<'a>(params: FamilyParams<'a>) -> SequenceFamily<'a> {
    let ctx = params.ctx;
    let len = ctx.order() as usize;
    let ell = dual_index(ctx);
    let ek = quad_exponent(params.k);
    let mut lin = Vec::with_capacity(len);
    let mut quad = Vec::with_capacity(len);
    let mut norm = Vec::with_capacity(len);
    for t in 0..len as u64 {
        lin.push(ctx.trace(ctx.exp_alpha(t)));
        quad.push(ell[ctx.exp_alpha(t * ek).bits() as usize]);
        norm.push(ctx.subfield_pairing_mask(ctx.pow(ctx.beta(), t)));
    }
    let make = |tag: &SequenceTag| {
        let b = tag.quadratic_coeff().bits();
        let c = ctx.subfield_coord(tag.subfield_coeff());
        let with_lin = tag.has_linear_term();
        BinarySequence::from_bits(
            (0..len).map(|t| {
                (with_lin && lin[t])
                    ^ ((b & quad[t]).count_ones() & 1 == 1)
                    ^ ((c & norm[t]).count_ones() & 1 == 1)
            }),
            *tag,
        )
    };
    let (tags1, tags2) = family_tags(&params);
    SequenceFamily {
        params,
        part1: tags1.par_iter().map(make).collect(),
        part2: tags2.par_iter().map(make).collect(),
    }
}

/// Builds the family: trace formulas for `F^k`, linear recurrences for the
/// two Kasami kinds.
pub fn build_family<'a>(params: FamilyParams<'a>) -> SequenceFamily<'a> {
    match params.kind {
        FamilyKind::GeneralizedFk => build_family_by_trace(params),
        FamilyKind::SmallKasami => shift_register::small_kasami(params),
        FamilyKind::LargeKasami => shift_register::large_kasami(params),
    }
}

/// Output layouts for [`export`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Bits,
    Hex,
    /// One JSON object per line: `{"tag": …, "bits_hex": …}`.
    Json,
}

/// Writes one line per sequence.
pub fn export<W: Write>(
    family: &SequenceFamily,
    format: ExportFormat,
    out: &mut W,
) -> io::Result<()> {
    let ctx = family.params.ctx;
    for s in family.sequences() {
        match format {
            ExportFormat::Bits => writeln!(out, "{}", s.to_bit_string())?,
            ExportFormat::Hex => writeln!(out, "{}", s.to_hex())?,
            ExportFormat::Json => {
                let line = json!({"tag": s.tag.to_json(ctx), "bits_hex": s.to_hex()});
                writeln!(out, "{line}")?
            }
        }
    }
    Ok(())
}

/// Linear-recurrence construction of the classical Kasami sets.
///
/// `u` is the m-sequence of the defining polynomial, `w(t) = tr_h(β^t)` comes
/// from the minimal polynomial of `β`, and `v^{(r)}(t) = u(r + d t)` with
/// `d = 2^{h+1} + 1` are the decimations.
pub mod shift_register {
    use super::*;
    use num_integer::Integer;

    /// Runs `s(t + deg) = Σ_{i<deg} taps_i s(t + i)` from `seed` for `len` terms.
    pub fn run_recurrence(taps: u32, seed: &[bool], len: usize) -> Vec<bool> {
        let deg = seed.len();
        let mut s = seed.to_vec();
        while s.len() < len {
            let t = s.len() - deg;
            let next = (0..deg)
                .filter(|&i| taps >> i & 1 == 1)
                .fold(false, |a, i| a ^ s[t + i]);
            s.push(next);
        }
        s.truncate(len);
        s
    }

    /// `u(t) = tr(α^t)` for one period, generated from the defining polynomial.
    pub fn m_sequence(ctx: &FieldCtx) -> Vec<bool> {
        let n = ctx.n();
        let taps = ctx.polynomial() & ((1 << n) - 1);
        let seed: Vec<bool> = (0..n as u64).map(|i| ctx.trace(ctx.exp_alpha(i))).collect();
        run_recurrence(taps, &seed, ctx.order() as usize)
    }

    /// Minimal polynomial of `β` over GF(2) as a bitmask of degree `n/2`.
    pub fn beta_minimal_polynomial(ctx: &FieldCtx) -> u32 {
        // coefficients of Π (x + β^{2^i}), lowest degree first
        let mut coeffs = vec![FieldElement::ONE];
        let mut root = ctx.beta();
        for _ in 0..ctx.half() {
            let mut next = vec![FieldElement::ZERO; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] += ctx.mul(c, root);
            }
            coeffs = next;
            root = ctx.square(root);
        }
        coeffs.iter().enumerate().fold(0, |m, (i, c)| {
            assert!(
                c.bits() <= 1,
                "minimal polynomial must have binary coefficients"
            );
            m | (c.bits() << i)
        })
    }

    /// `w(t) = tr_h(β^t)` for one period `2^h − 1`.
    pub fn subfield_sequence(ctx: &FieldCtx) -> Vec<bool> {
        let h = ctx.half();
        let poly = beta_minimal_polynomial(ctx);
        let taps = poly & ((1 << h) - 1);
        let seed: Vec<bool> = (0..h as u64)
            .map(|i| ctx.half_trace_by_definition(ctx.pow(ctx.beta(), i)))
            .collect();
        run_recurrence(taps, &seed, ctx.subfield_size() - 1)
    }

    /// `t ↦ s(offset + step·t)` over one period of `s`.
    pub fn decimate(s: &[bool], step: usize, offset: usize, len: usize) -> Vec<bool> {
        (0..len).map(|t| s[(offset + step * t) % s.len()]).collect()
    }

    /// Index of `δ ∈ F` as a shift of `w`: `β^j ↦ Some(j)`, `0 ↦ None`.
    fn beta_shift(ctx: &FieldCtx, delta: FieldElement) -> Option<usize> {
        let l = ctx.log(delta)? as u64;
        let q = (1u64 << ctx.half()) + 1;
        Some((l / q) as usize)
    }

    fn combine(
        len: usize,
        u: Option<&[bool]>,
        v: Option<&[bool]>,
        w: &[bool],
        w_shift: Option<usize>,
        tag: SequenceTag,
    ) -> BinarySequence {
        BinarySequence::from_bits(
            (0..len).map(|t| {
                u.is_some_and(|u| u[t])
                    ^ v.is_some_and(|v| v[t])
                    ^ w_shift.is_some_and(|j| w[(t + j) % w.len()])
            }),
            tag,
        )
    }

    /// `u ⊕ T^j w` for every `j`, plus `u` itself.
    pub fn small_kasami<'a>(params: FamilyParams<'a>) -> SequenceFamily<'a> {
        let ctx = params.ctx;
        let len = ctx.order() as usize;
        let u = m_sequence(ctx);
        let w = subfield_sequence(ctx);
        let (tags, _) = family_tags(&params);
        let part1 = tags
            .iter()
            .map(|tag| {
                combine(
                    len,
                    Some(&u),
                    None,
                    &w,
                    beta_shift(ctx, tag.subfield_coeff()),
                    *tag,
                )
            })
            .collect();
        SequenceFamily {
            params,
            part1,
            part2: Vec::new(),
        }
    }

    /// `u ⊕ T^i v^{(r)} ⊕ T^j w` and `v^{(r)} ⊕ T^j w`, with the optional
    /// terms dropped when the matching coefficient is zero.
    pub fn large_kasami<'a>(params: FamilyParams<'a>) -> SequenceFamily<'a> {
        let ctx = params.ctx;
        let len = ctx.order() as usize;
        let h = ctx.half();
        let d = (1usize << (h + 1)) + 1;
        let g = d.gcd(&len);
        let u = m_sequence(ctx);
        let w = subfield_sequence(ctx);
        let v: Vec<Vec<bool>> = (0..g).map(|r| decimate(&u, d, r, len)).collect();
        // shift i with r + d·i ≡ e (mod N): i = ((e − r)/g) · (d/g)^{-1} mod N/g
        let reduced = len / g;
        let d_inv = {
            let ext = ((d / g) as i64).extended_gcd(&(reduced as i64));
            ext.x.rem_euclid(reduced as i64) as usize
        };
        let shift_of = |e: usize| -> (usize, usize) {
            let r = e % g;
            (r, ((e - r) / g * d_inv) % reduced)
        };
        let (tags1, tags2) = family_tags(&params);
        let part1 = tags1
            .par_iter()
            .map(|tag| {
                let rotated = ctx.log(tag.quadratic_coeff()).map(|e| {
                    let (r, i) = shift_of(e as usize);
                    (0..len).map(|t| v[r][(t + i) % len]).collect::<Vec<bool>>()
                });
                combine(
                    len,
                    Some(&u),
                    rotated.as_deref(),
                    &w,
                    beta_shift(ctx, tag.subfield_coeff()),
                    *tag,
                )
            })
            .collect();
        let part2 = tags2
            .iter()
            .map(|tag| {
                let r = ctx.log(tag.quadratic_coeff()).expect("zeta is nonzero") as usize;
                combine(
                    len,
                    None,
                    Some(&v[r]),
                    &w,
                    beta_shift(ctx, tag.subfield_coeff()),
                    *tag,
                )
            })
            .collect();
        SequenceFamily {
            params,
            part1,
            part2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadform::{walsh_point, QuadFormParams};

    fn ctx(n: u32) -> FieldCtx {
        FieldCtx::new(n).unwrap()
    }

    #[test]
    fn gamma_delta_set_sizes() {
        let (g, d) = gamma_delta_sets(&ctx(6));
        assert_eq!((g.len(), d.len()), (1, 8));
        let (g, d) = gamma_delta_sets(&ctx(4));
        assert_eq!(g.len(), 3);
        assert_eq!(d, vec![FieldElement::ONE]);
        let (g, d) = gamma_delta_sets(&ctx(8));
        assert_eq!(g.len() * d.len(), 15);
    }

    #[test]
    fn family_sizes() {
        for (n, k, m) in [(4, 1, 67), (6, 2, 520), (8, 1, 4111)] {
            let c = ctx(n);
            let fam = build_family(FamilyParams::generalized(&c, k).unwrap());
            assert_eq!(fam.len(), m);
            assert!(fam.sequences().all(|s| s.len() == (1 << n) - 1));
        }
    }

    #[test]
    fn invalid_k_rejected() {
        let c = ctx(6);
        assert!(matches!(
            FamilyParams::generalized(&c, 3),
            Err(FamilyError::InvalidK(_))
        ));
        assert!(matches!(
            FamilyParams::new(&c, FamilyKind::GeneralizedFk, None),
            Err(FamilyError::MissingK)
        ));
        assert_eq!(
            FamilyParams::new(&c, FamilyKind::LargeKasami, Some(2))
                .unwrap()
                .k,
            4
        );
    }

    #[test]
    fn packed_construction_matches_term_formula() {
        for (n, k) in [(4, 1), (4, 3), (6, 2)] {
            let c = ctx(n);
            let p = FamilyParams::generalized(&c, k).unwrap();
            let fam = build_family(p);
            for s in fam.sequences().step_by(3) {
                for t in 0..s.len() {
                    assert_eq!(s.bit(t), sequence_term(&p, &s.tag, t as u64));
                }
            }
        }
    }

    #[test]
    fn base_sequence_is_the_m_sequence() {
        let c = ctx(6);
        let p = FamilyParams::generalized(&c, 2).unwrap();
        let tag = SequenceTag::GammaDelta {
            gamma: FieldElement::ZERO,
            delta: FieldElement::ZERO,
        };
        let u = shift_register::m_sequence(&c);
        for (t, &bit) in u.iter().enumerate() {
            assert_eq!(sequence_term(&p, &tag, t as u64), bit);
        }
        let zeta = SequenceTag::ZetaEta {
            zeta: FieldElement::ONE,
            eta: FieldElement::ZERO,
        };
        assert!(!sequence_term(&p, &zeta, 0));
        let m = BinarySequence::from_bits(u, tag);
        assert_eq!(imbalance(&m), -1);
    }

    #[test]
    fn subfield_sequence_is_trace_of_beta_powers() {
        for n in [4, 6, 8, 10] {
            let c = ctx(n);
            let w = shift_register::subfield_sequence(&c);
            assert_eq!(w.len(), (1 << (n / 2)) - 1);
            for (t, &bit) in w.iter().enumerate() {
                assert_eq!(bit, c.half_trace_by_definition(c.pow(c.beta(), t as u64)));
            }
        }
    }

    #[test]
    fn all_zero_sequence_imbalance() {
        let tag = SequenceTag::GammaDelta {
            gamma: FieldElement::ZERO,
            delta: FieldElement::ZERO,
        };
        assert_eq!(
            imbalance(&BinarySequence::from_bits(vec![false; 63], tag)),
            63
        );
    }

    #[test]
    fn rotation_matches_index_shift() {
        let c = ctx(8);
        let tag = SequenceTag::GammaDelta {
            gamma: FieldElement::ZERO,
            delta: FieldElement::ZERO,
        };
        let s = BinarySequence::from_bits(shift_register::m_sequence(&c), tag);
        for tau in [0, 1, 63, 64, 65, 100, 191, 200, 254] {
            let r = s.rotated(tau);
            for t in 0..s.len() {
                assert_eq!(r.bit(t), s.bit((t + tau) % s.len()), "tau={tau} t={t}");
            }
        }
    }

    #[test]
    fn large_kasami_equals_fk_with_k_half_plus_one() {
        for n in [4, 6, 8] {
            let c = ctx(n);
            let lk = build_family(FamilyParams::large_kasami(&c));
            let fk = build_family(FamilyParams::generalized(&c, n / 2 + 1).unwrap());
            assert_eq!(lk.len(), fk.len());
            assert_eq!(lk.bit_set(), fk.bit_set(), "n={n}");
            // tags agree sequence by sequence
            for (a, b) in lk.sequences().zip(fk.sequences()) {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn small_kasami_is_inside_first_part() {
        for (n, k) in [(4, 1), (6, 2), (6, 4)] {
            let c = ctx(n);
            let sk = build_family(FamilyParams::small_kasami(&c));
            assert_eq!(sk.len(), 1 << (n / 2));
            assert!(sk.part2.is_empty());
            let fk = build_family(FamilyParams::generalized(&c, k).unwrap());
            let part1: HashSet<_> = fk.part1.iter().map(|s| s.words().to_vec()).collect();
            assert!(sk.sequences().all(|s| part1.contains(s.words())));
        }
    }

    #[test]
    fn sequences_are_distinct() {
        for (n, k) in [(4, 1), (6, 2), (8, 3)] {
            let c = ctx(n);
            assert!(build_family(FamilyParams::generalized(&c, k).unwrap()).all_distinct());
        }
    }

    #[test]
    fn imbalance_equals_walsh_value_minus_one() {
        for (n, k) in [(4, 1), (6, 2)] {
            let c = ctx(n);
            let fam = build_family(FamilyParams::generalized(&c, k).unwrap());
            for s in fam.sequences() {
                let p = QuadFormParams::new(&c, k, s.tag.quadratic_coeff(), s.tag.subfield_coeff())
                    .unwrap();
                let at = if s.tag.has_linear_term() {
                    FieldElement::ONE
                } else {
                    FieldElement::ZERO
                };
                assert_eq!(imbalance(s), walsh_point(&p, at) - 1);
            }
        }
    }

    #[test]
    fn export_formats() {
        let c = ctx(4);
        let fam = build_family(FamilyParams::small_kasami(&c));
        let mut buf = Vec::new();
        export(&fam, ExportFormat::Bits, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.lines().all(|l| l.len() == 15));

        let mut buf = Vec::new();
        export(&fam, ExportFormat::Hex, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().all(|l| l.len() == 4));
        let first = &fam.part1[0];
        let bits = first.to_bit_string();
        let byte0 = u8::from_str_radix(&text.lines().next().unwrap()[..2], 16).unwrap();
        for i in 0..8 {
            assert_eq!(byte0 >> i & 1 == 1, &bits[i..=i] == "1");
        }

        let mut buf = Vec::new();
        export(&fam, ExportFormat::Json, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let v: serde_json::Value = serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
        assert_eq!(v["tag"]["gamma"], "0");
        assert_eq!(v["tag"]["delta"], "a^0");
    }
}
