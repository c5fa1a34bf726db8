//! Quadratic forms `f_{b,c}(x) = tr(b x^{2^k+1}) + tr_h(c x^{2^h+1})` on `E`,
//! with `h = n/2` and `tr_h` the absolute trace of `F`.
//!
//! Walsh values `f^w(λ) = Σ_x (−1)^{f(x) + tr(λx)}` are available two ways:
//! [`walsh_point`] sums the definition directly, and [`SpectrumEngine`] runs a
//! fast Walsh–Hadamard transform on the truth table and relabels its output
//! through the trace pairing. Each route serves as the other's oracle.

use num_bigint::BigUint;
use rayon::prelude::*;
use thiserror::Error;

use crate::bitmatrix;
use crate::gf2n::{gcd, FieldCtx, FieldElement};
use crate::{Histogram, Tally};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuadFormError {
    #[error("k = {k} is not admissible for n = {n}: {reason}")]
    InvalidK { n: u32, k: u32, reason: String },
    #[error("c = {0} is not in the subfield")]
    NotInSubfield(FieldElement),
    #[error("f is identically zero (b = 0 and c = 0)")]
    ZeroForm,
}

/// Whether `k` yields the family's three-valued quadratic forms:
/// `gcd(k, n) = 2` when `n/2` is odd, `gcd(k, n) = 1` when `n/2` is even,
/// with `1 <= k < n` and `k != n/2`.
pub fn is_admissible_k(n: u32, k: u32) -> bool {
    check_k(n, k).is_ok()
}

/// [`is_admissible_k`] with a human-readable reason on failure.
pub fn check_k(n: u32, k: u32) -> Result<(), QuadFormError> {
    let fail = |reason: String| Err(QuadFormError::InvalidK { n, k, reason });
    if n < 4 || !n.is_multiple_of(2) {
        return fail("n must be even and at least 4".into());
    }
    if k == 0 || k >= n {
        return fail(format!("need 1 <= k < {n}"));
    }
    let h = n / 2;
    let want = if h % 2 == 1 { 2 } else { 1 };
    let g = gcd(k as u64, n as u64);
    if g != want {
        let parity = if h % 2 == 1 { "odd" } else { "even" };
        return fail(format!(
            "need gcd(k, n) = {want} since n/2 = {h} is {parity}, but gcd({k}, {n}) = {g}"
        ));
    }
    Ok(())
}

/// `2^k + 1`.
#[inline]
pub fn quad_exponent(k: u32) -> u64 {
    (1u64 << k) + 1
}

/// Parameters `(k, b, c)` of one form, bound to a field.
#[derive(Clone, Copy, Debug)]
pub struct QuadFormParams<'a> {
    pub ctx: &'a FieldCtx,
    pub k: u32,
    pub b: FieldElement,
    pub c: FieldElement,
}

impl<'a> QuadFormParams<'a> {
    pub fn new(
        ctx: &'a FieldCtx,
        k: u32,
        b: FieldElement,
        c: FieldElement,
    ) -> Result<Self, QuadFormError> {
        check_k(ctx.n(), k)?;
        if !ctx.in_subfield(c) {
            return Err(QuadFormError::NotInSubfield(c));
        }
        Ok(QuadFormParams { ctx, k, b, c })
    }
}

/// `f_{b,c}(x)` straight from the definition.
pub fn eval_f(p: &QuadFormParams, x: FieldElement) -> bool {
    let ctx = p.ctx;
    let h = ctx.half();
    let lin = ctx.mul(p.b, ctx.pow(x, quad_exponent(p.k)));
    let sub = ctx.mul(p.c, ctx.pow(x, quad_exponent(h)));
    ctx.trace(lin) ^ ctx.half_trace_by_definition(sub)
}

/// `f^w_{b,c}(λ)` by summing over all of `E`.
pub fn walsh_point(p: &QuadFormParams, lambda: FieldElement) -> i64 {
    p.ctx
        .elements()
        .map(|x| {
            if eval_f(p, x) ^ p.ctx.trace(p.ctx.mul(lambda, x)) {
                -1
            } else {
                1
            }
        })
        .sum()
}

/// Full Walsh spectrum, `values[λ.bits()] = f^w(λ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalshSpectrum {
    pub values: Vec<i64>,
}

impl WalshSpectrum {
    pub fn at(&self, lambda: FieldElement) -> i64 {
        self.values[lambda.bits() as usize]
    }

    /// `Σ_λ f^w(λ)^2`; equals `2^{2n}` for every Boolean function.
    pub fn parseval_sum(&self) -> i128 {
        self.values.iter().map(|&v| (v as i128) * (v as i128)).sum()
    }

    pub fn distribution(&self) -> Tally {
        Tally::of(self.values.iter().copied())
    }
}

/// Full spectrum via the fast transform.
pub fn walsh_spectrum(p: &QuadFormParams) -> WalshSpectrum {
    let engine = SpectrumEngine::new(p.ctx, p.k).expect("params were validated");
    WalshSpectrum {
        values: engine
            .spectrum(p.b, p.c)
            .into_iter()
            .map(i64::from)
            .collect(),
    }
}

/// In-place unnormalized Walsh–Hadamard transform; `a.len()` must be a power of two.
pub fn fwht(a: &mut [i32]) {
    let len = a.len();
    debug_assert!(len.is_power_of_two());
    let mut half = 1;
    while half < len {
        for block in a.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, d) = (*x + *y, *x - *y);
                *x = s;
                *y = d;
            }
        }
        half *= 2;
    }
}

/// `ℓ(y)` for every `y`, where bit `i` of `ℓ(y)` is `tr(y α^i)`.
///
/// Then `tr(b y) = parity(b & ℓ(y))`, which turns every trace pairing into a
/// bitwise dot product.
pub fn dual_index(ctx: &FieldCtx) -> Vec<u32> {
    let n = ctx.n();
    let basis: Vec<u32> = (0..n)
        .map(|j| {
            (0..n)
                .filter(|&i| ctx.trace(ctx.exp_alpha((i + j) as u64)))
                .fold(0, |m, i| m | 1 << i)
        })
        .collect();
    let mut ell = vec![0u32; ctx.size()];
    for y in 1..ctx.size() {
        let low = y.trailing_zeros() as usize;
        ell[y] = ell[y & (y - 1)] ^ basis[low];
    }
    ell
}

/// Precomputed tables for evaluating many forms sharing `(n, k)`.
pub struct SpectrumEngine<'a> {
    ctx: &'a FieldCtx,
    k: u32,
    /// `ℓ(x^{2^k+1})`.
    quad_k: Vec<u32>,
    /// Mask `m` with `tr_h(c x^{2^h+1}) = parity(coord(c) & m)`.
    quad_h: Vec<u32>,
    dual: Vec<u32>,
}

impl<'a> SpectrumEngine<'a> {
    pub fn new(ctx: &'a FieldCtx, k: u32) -> Result<Self, QuadFormError> {
        check_k(ctx.n(), k)?;
        let h = ctx.half();
        let dual = dual_index(ctx);
        let ek = quad_exponent(k);
        let eh = quad_exponent(h);
        let quad_k = ctx
            .elements()
            .map(|x| dual[ctx.pow(x, ek).bits() as usize])
            .collect();
        let quad_h = ctx
            .elements()
            .map(|x| ctx.subfield_pairing_mask(ctx.pow(x, eh)))
            .collect();
        Ok(SpectrumEngine {
            ctx,
            k,
            quad_k,
            quad_h,
            dual,
        })
    }

    pub fn ctx(&self) -> &FieldCtx {
        self.ctx
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// The `ℓ` table of [`dual_index`].
    pub fn dual(&self) -> &[u32] {
        &self.dual
    }

    /// `f_{b,c}(x)` from the tables; `c` is given by its subfield coordinate.
    #[inline]
    pub fn eval_coord(&self, b: u32, c_coord: u32, x: usize) -> bool {
        ((b & self.quad_k[x]).count_ones() ^ (c_coord & self.quad_h[x]).count_ones()) & 1 == 1
    }

    /// Transform of `(−1)^{f}` indexed by `ℓ(λ)` rather than `λ`.
    pub fn raw_transform_into(&self, b: u32, c_coord: u32, buf: &mut [i32]) {
        for (x, slot) in buf.iter_mut().enumerate() {
            *slot = if self.eval_coord(b, c_coord, x) {
                -1
            } else {
                1
            };
        }
        fwht(buf);
    }

    /// Spectrum indexed by `λ`.
    pub fn spectrum(&self, b: FieldElement, c: FieldElement) -> Vec<i32> {
        let mut buf = vec![0i32; self.ctx.size()];
        self.raw_transform_into(b.bits(), self.ctx.subfield_coord(c), &mut buf);
        self.dual.iter().map(|&u| buf[u as usize]).collect()
    }
}

/// Image of `α^i` under the radical map
/// `L(z) = b^{2^{n−k}} z^{2^{n−k}} + b z^{2^k} + c z^{2^{n/2}}`.
pub fn radical_map(p: &QuadFormParams, z: FieldElement) -> FieldElement {
    let ctx = p.ctx;
    let n = ctx.n();
    let b_conj = ctx.frobenius(p.b, n - p.k);
    ctx.mul(b_conj, ctx.frobenius(z, n - p.k))
        + ctx.mul(p.b, ctx.frobenius(z, p.k))
        + ctx.mul(p.c, ctx.frobenius(z, ctx.half()))
}

/// Rank of the symplectic form of `f_{b,c}`: `n − dim ker L`.
pub fn symplectic_rank(p: &QuadFormParams) -> Result<u32, QuadFormError> {
    if p.b.is_zero() && p.c.is_zero() {
        return Err(QuadFormError::ZeroForm);
    }
    let images: Vec<u32> = (0..p.ctx.n())
        .map(|i| radical_map(p, FieldElement(1 << i)).bits())
        .collect();
    Ok(bitmatrix::rank(&images))
}

/// Radical elements `z` with `f(x) + f(z) + f(x+z) = 0` for all `x`,
/// found by exhaustive search.
pub fn radical_by_definition(p: &QuadFormParams) -> Vec<FieldElement> {
    let vals: Vec<bool> = p.ctx.elements().map(|x| eval_f(p, x)).collect();
    p.ctx
        .elements()
        .filter(|z| {
            let fz = vals[z.bits() as usize];
            (0..vals.len()).all(|x| !(vals[x] ^ fz ^ vals[x ^ z.bits() as usize]))
        })
        .collect()
}

/// Spectrum shape for a quadratic form of rank `2h` on `n` variables with
/// `f(0) = 0`: `+2^{n−h}` occurs `2^{2h−1} + 2^{h−1}` times, `−2^{n−h}` occurs
/// `2^{2h−1} − 2^{h−1}` times, and `0` fills the remaining `2^n − 2^{2h}`.
pub fn rank_spectrum(n: u32, rank: u32) -> Histogram {
    assert!(rank.is_multiple_of(2) && rank <= n);
    let h = rank / 2;
    let big = |e: u32| BigUint::from(1u32) << e;
    let mut out = Histogram::new();
    if h == 0 {
        out.add(1 << n, BigUint::from(1u32));
        return out;
    }
    let v = 1i64 << (n - h);
    out.add(v, big(2 * h - 1) + big(h - 1));
    out.add(-v, big(2 * h - 1) - big(h - 1));
    out.add(0, big(n) - big(2 * h));
    out
}

/// Multiset of `f^w_{b,c}(λ)` over `b_set × c_set × λ_set`, each counted
/// `multiplicity` times.
pub fn spectrum_distribution(
    ctx: &FieldCtx,
    k: u32,
    b_set: &[FieldElement],
    c_set: &[FieldElement],
    lambda_set: &[FieldElement],
    multiplicity: u64,
) -> Result<Histogram, QuadFormError> {
    if let Some(&c) = c_set.iter().find(|&&c| !ctx.in_subfield(c)) {
        return Err(QuadFormError::NotInSubfield(c));
    }
    let engine = SpectrumEngine::new(ctx, k)?;
    let c_coords: Vec<u32> = c_set.iter().map(|&c| ctx.subfield_coord(c)).collect();
    let lambda_idx: Vec<usize> = lambda_set
        .iter()
        .map(|l| engine.dual[l.bits() as usize] as usize)
        .collect();
    let tally = b_set
        .par_iter()
        .fold(
            || (Tally::new(), vec![0i32; ctx.size()]),
            |(mut t, mut buf), b| {
                for &cc in &c_coords {
                    engine.raw_transform_into(b.bits(), cc, &mut buf);
                    for &u in &lambda_idx {
                        t.increment(buf[u] as i64);
                    }
                }
                (t, buf)
            },
        )
        .map(|(t, _)| t)
        .reduce(Tally::new, |mut a, b| {
            a.merge(&b);
            a
        });
    Ok(tally.scaled(multiplicity).to_exact())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(x: u32) -> FieldElement {
        FieldElement(x)
    }

    #[test]
    fn admissible_k_by_parity() {
        assert!(is_admissible_k(6, 2));
        assert!(is_admissible_k(6, 4));
        assert!(!is_admissible_k(6, 3));
        assert!(!is_admissible_k(6, 1));
        assert!(is_admissible_k(4, 1));
        assert!(is_admissible_k(4, 3));
        assert!(!is_admissible_k(4, 2));
        assert!(is_admissible_k(8, 5));
        assert!(!is_admissible_k(8, 4));
        assert!(!is_admissible_k(8, 0));
        assert!(!is_admissible_k(8, 8));
        for n in (4u32..=20).step_by(2) {
            for k in 1..n {
                let alt = gcd((n / 2).abs_diff(k) as u64, n as u64) == 1;
                assert_eq!(is_admissible_k(n, k), alt, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn invalid_k_message_names_the_gcd() {
        let msg = check_k(6, 3).unwrap_err().to_string();
        assert!(msg.contains("gcd(3, 6) = 3"), "{msg}");
    }

    #[test]
    fn coefficient_outside_subfield_rejected() {
        let ctx = FieldCtx::new(4).unwrap();
        let not_sub = ctx
            .nonzero_elements()
            .find(|&x| !ctx.in_subfield(x))
            .unwrap();
        assert!(matches!(
            QuadFormParams::new(&ctx, 1, e(0), not_sub),
            Err(QuadFormError::NotInSubfield(_))
        ));
    }

    #[test]
    fn zero_form_and_zero_point() {
        let ctx = FieldCtx::new(4).unwrap();
        let p = QuadFormParams::new(&ctx, 1, e(0), e(0)).unwrap();
        assert!(ctx.elements().all(|x| !eval_f(&p, x)));
        assert_eq!(walsh_point(&p, e(0)), 16);
        assert!(ctx.nonzero_elements().all(|l| walsh_point(&p, l) == 0));
        assert_eq!(symplectic_rank(&p), Err(QuadFormError::ZeroForm));
        let q = QuadFormParams::new(&ctx, 1, ctx.alpha(), FieldElement::ONE).unwrap();
        assert!(!eval_f(&q, e(0)));
    }

    #[test]
    fn fwht_of_delta_is_flat() {
        let mut a = vec![0i32; 8];
        a[0] = 1;
        fwht(&mut a);
        assert!(a.iter().all(|&v| v == 1));
    }

    #[test]
    fn dual_index_is_a_bijection() {
        let ctx = FieldCtx::new(6).unwrap();
        let ell = dual_index(&ctx);
        let mut seen = vec![false; ctx.size()];
        for &u in &ell {
            assert!(!seen[u as usize]);
            seen[u as usize] = true;
        }
        for y in ctx.elements().step_by(5) {
            for b in ctx.elements() {
                assert_eq!(
                    ctx.trace(ctx.mul(b, y)),
                    (b.bits() & ell[y.bits() as usize]).count_ones() & 1 == 1
                );
            }
        }
    }

    #[test]
    fn fast_spectrum_matches_direct_sum_exhaustively_at_n4() {
        let ctx = FieldCtx::new(4).unwrap();
        for k in [1, 3] {
            for b in ctx.elements() {
                for c in ctx.subfield_elements() {
                    let p = QuadFormParams::new(&ctx, k, b, c).unwrap();
                    let s = walsh_spectrum(&p);
                    for l in ctx.elements() {
                        assert_eq!(s.at(l), walsh_point(&p, l));
                    }
                    assert_eq!(s.parseval_sum(), 1 << 8);
                }
            }
        }
    }

    #[test]
    fn table_evaluation_matches_definition() {
        let ctx = FieldCtx::new(6).unwrap();
        let engine = SpectrumEngine::new(&ctx, 2).unwrap();
        for b in ctx.elements().step_by(7) {
            for c in ctx.subfield_elements() {
                let p = QuadFormParams::new(&ctx, 2, b, c).unwrap();
                for x in ctx.elements() {
                    assert_eq!(
                        engine.eval_coord(b.bits(), ctx.subfield_coord(c), x.bits() as usize),
                        eval_f(&p, x)
                    );
                }
            }
        }
    }

    #[test]
    fn subfield_only_form_has_full_rank_and_value_minus_2h_at_zero() {
        let ctx = FieldCtx::new(6).unwrap();
        for c in ctx.subfield_elements().into_iter().filter(|c| !c.is_zero()) {
            let p = QuadFormParams::new(&ctx, 2, e(0), c).unwrap();
            assert_eq!(symplectic_rank(&p).unwrap(), 6);
            assert_eq!(walsh_point(&p, e(0)), -8);
        }
    }

    #[test]
    fn radical_map_kernel_matches_definition_at_n4() {
        let ctx = FieldCtx::new(4).unwrap();
        for k in [1, 3] {
            for b in ctx.elements() {
                for c in ctx.subfield_elements() {
                    if b.is_zero() && c.is_zero() {
                        continue;
                    }
                    let p = QuadFormParams::new(&ctx, k, b, c).unwrap();
                    let rad = radical_by_definition(&p);
                    let ker: Vec<FieldElement> = ctx
                        .elements()
                        .filter(|&z| radical_map(&p, z).is_zero())
                        .collect();
                    assert_eq!(rad, ker, "b={b} c={c} k={k}");
                    assert_eq!(symplectic_rank(&p).unwrap(), 4 - rad.len().trailing_zeros());
                }
            }
        }
    }

    #[test]
    fn rank_spectrum_totals() {
        for (n, r) in [(4, 2), (4, 4), (6, 4), (8, 8)] {
            let h = rank_spectrum(n, r);
            assert_eq!(h.total(), BigUint::from(1u32) << n);
        }
        assert_eq!(
            rank_spectrum(6, 4),
            Histogram::from_u64_pairs(&[(16, 10), (-16, 6), (0, 48)])
        );
    }

    #[test]
    fn spectrum_distribution_counts_every_triple() {
        let ctx = FieldCtx::new(4).unwrap();
        let all: Vec<_> = ctx.elements().collect();
        let f = ctx.subfield_elements();
        let h = spectrum_distribution(&ctx, 1, &all, &f, &all, 1).unwrap();
        assert_eq!(h.total(), BigUint::from(1024u32));
        assert_eq!(h.get(16), BigUint::from(1u32));
        let doubled = spectrum_distribution(&ctx, 1, &all, &f, &all, 2).unwrap();
        assert_eq!(doubled.total(), BigUint::from(2048u32));
        assert!(spectrum_distribution(&ctx, 2, &all, &f, &all, 1).is_err());
    }
}
