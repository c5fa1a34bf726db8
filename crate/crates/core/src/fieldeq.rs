//! Exhaustive root counting for the field equations behind the rank
//! distribution of `f_{b,c}`, plus a census of related point counts.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::bitmatrix;
use crate::gf2n::{gcd, FieldCtx, FieldElement};
use crate::quadform::{check_k, quad_exponent, QuadFormError, SpectrumEngine};
use crate::theory::rank_deficient_count;

/// Largest `n` for the `E^3` scans without an explicit override.
pub const CUBE_SCAN_MAX_N: u32 = 6;
/// Largest `n` for the remaining census counts without an explicit override.
pub const CENSUS_MAX_N: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldEqError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("n = {n} exceeds the limit {limit} for this scan (override with force)")]
    TooLarge { n: u32, limit: u32 },
    #[error(transparent)]
    InvalidK(#[from] QuadFormError),
}

/// `L(x) = Σ_i a_i x^{2^i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearizedPoly {
    pub coeffs: Vec<FieldElement>,
}

impl LinearizedPoly {
    /// Builds `Σ a x^{2^i}` from `(i, a)` terms; repeated exponents add.
    pub fn from_terms(n: u32, terms: &[(u32, FieldElement)]) -> Self {
        let mut coeffs = vec![FieldElement::ZERO; n as usize];
        for &(i, a) in terms {
            coeffs[(i % n) as usize] += a;
        }
        LinearizedPoly { coeffs }
    }

    pub fn eval(&self, ctx: &FieldCtx, x: FieldElement) -> FieldElement {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .fold(FieldElement::ZERO, |acc, (i, &a)| {
                acc + ctx.mul(a, ctx.frobenius(x, i as u32))
            })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|a| a.is_zero())
    }
}

/// GF(2)-basis of the root space of `L`.
pub fn linearized_kernel(ctx: &FieldCtx, l: &LinearizedPoly) -> Vec<FieldElement> {
    let images: Vec<u32> = (0..ctx.n())
        .map(|i| l.eval(ctx, FieldElement(1 << i)).bits())
        .collect();
    bitmatrix::kernel(&images)
        .into_iter()
        .map(FieldElement)
        .collect()
}

/// Number of `x ∈ E` with `ε x^{2^l+1} + v x + θ = 0`, by exhaustive search.
pub fn count_affine_roots(
    ctx: &FieldCtx,
    eps: FieldElement,
    v: FieldElement,
    theta: FieldElement,
    l: u32,
) -> Result<u32, FieldEqError> {
    if eps.is_zero() || theta.is_zero() {
        return Err(FieldEqError::BadParams(
            "eps and theta must be nonzero".into(),
        ));
    }
    if l == 0 || gcd(l as u64, ctx.n() as u64) != 1 {
        return Err(FieldEqError::BadParams(format!(
            "need gcd(l, n) = 1, got l = {l}, n = {}",
            ctx.n()
        )));
    }
    let e = quad_exponent(l);
    Ok(ctx
        .elements()
        .filter(|&x| (ctx.mul(eps, ctx.pow(x, e)) + ctx.mul(v, x) + theta).is_zero())
        .count() as u32)
}

fn require_theta(theta: FieldElement) -> Result<(), FieldEqError> {
    if theta.is_zero() {
        Err(FieldEqError::BadParams("theta must be nonzero".into()))
    } else {
        Ok(())
    }
}

/// `θ^{2^{n−k}} z^{2^{n−k}} + θ z^{2^k} + z^{2^{n/2}}` as a linearized polynomial.
pub fn rank_equation(ctx: &FieldCtx, theta: FieldElement, k: u32) -> LinearizedPoly {
    let n = ctx.n();
    LinearizedPoly::from_terms(
        n,
        &[
            (n - k, ctx.frobenius(theta, n - k)),
            (k, theta),
            (ctx.half(), FieldElement::ONE),
        ],
    )
}

/// Nonzero roots `z` of [`rank_equation`], counted exhaustively; 0 or 3 for
/// admissible `k`.
pub fn count_eq32(ctx: &FieldCtx, theta: FieldElement, k: u32) -> Result<u32, FieldEqError> {
    require_theta(theta)?;
    check_k(ctx.n(), k)?;
    let l = rank_equation(ctx, theta, k);
    Ok(ctx
        .nonzero_elements()
        .filter(|&z| l.eval(ctx, z).is_zero())
        .count() as u32)
}

/// Roots of the two reduced forms of [`rank_equation`], by exhaustive search.
///
/// With `k₁ = min(k, n−k) < n/2` and `k₂ = max(k, n−k) > n/2`, returns the
/// root counts of
///
/// * `θ^{2^{n−k₁}} w^{2^{n/2−k₁}+1} + w + θ = 0`, which matches
///   `count_eq32(θ, k₁)`, and
/// * `θ w^{2^{k₂−n/2}+1} + w + θ^{2^{n−k₂}} = 0`, which matches
///   `count_eq32(θ, k₂)`.
pub fn count_eq33_34(
    ctx: &FieldCtx,
    theta: FieldElement,
    k: u32,
) -> Result<(u32, u32), FieldEqError> {
    require_theta(theta)?;
    let n = ctx.n();
    let h = ctx.half();
    check_k(n, k)?;
    let (k1, k2) = (k.min(n - k), k.max(n - k));
    let c1 = ctx.frobenius(theta, n - k1);
    let e1 = quad_exponent(h - k1);
    let low = ctx
        .elements()
        .filter(|&w| (ctx.mul(c1, ctx.pow(w, e1)) + w + theta).is_zero())
        .count() as u32;
    let c2 = ctx.frobenius(theta, n - k2);
    let e2 = quad_exponent(k2 - h);
    let high = ctx
        .elements()
        .filter(|&w| (ctx.mul(theta, ctx.pow(w, e2)) + w + c2).is_zero())
        .count() as u32;
    Ok((low, high))
}

/// Observed count beside its closed-form prediction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountCheck {
    #[serde(serialize_with = "as_decimal")]
    pub observed: BigInt,
    #[serde(serialize_with = "as_decimal")]
    pub predicted: BigInt,
    #[serde(rename = "match")]
    pub matches: bool,
}

impl CountCheck {
    pub fn new(observed: impl Into<BigInt>, predicted: impl Into<BigInt>) -> Self {
        let (observed, predicted) = (observed.into(), predicted.into());
        let matches = observed == predicted;
        CountCheck {
            observed,
            predicted,
            matches,
        }
    }
}

fn as_decimal<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Point counts over `E^3` (present only when the cube scan ran).
#[derive(Clone, Debug, Serialize)]
pub struct CubeCounts {
    /// `x^{2^k+1} + y^{2^k+1} + z^{2^k+1} = 0`.
    pub pi1: CountCheck,
    /// `x^{2^{n/2}+1} + y^{2^{n/2}+1} + z^{2^{n/2}+1} = 0`.
    pub pi2: CountCheck,
    pub pi12: CountCheck,
    /// The common solutions are exactly `(0,0,0)` and the permutations of `(x,x,0)`.
    pub pi12_solutions_as_expected: bool,
}

/// Every count the census computes, each with its prediction.
#[derive(Clone, Debug, Serialize)]
pub struct EquationCensus {
    pub n: u32,
    pub k: u32,
    /// `θ ∈ E*` for which the low reduced equation has three roots.
    pub n1: CountCheck,
    /// Same for the high reduced equation.
    pub n2: CountCheck,
    pub cube: Option<CubeCounts>,
    /// `x^{2^k+1} = y^{2^k+1}` over `E^2`.
    pub phi1: CountCheck,
    /// `x^{2^{n/2}+1} = y^{2^{n/2}+1}` over `E^2`.
    pub phi2: CountCheck,
    pub phi12: CountCheck,
    /// `Σ f^w_{b,c}(0)^d` over `E* × F*` for `d = 1, 2, 3`.
    pub power_sums: Vec<CountCheck>,
}

impl EquationCensus {
    pub fn all_match(&self) -> bool {
        let mut checks = vec![&self.n1, &self.n2, &self.phi1, &self.phi2, &self.phi12];
        checks.extend(self.power_sums.iter());
        let cube_ok = self.cube.as_ref().is_none_or(|c| {
            c.pi1.matches && c.pi2.matches && c.pi12.matches && c.pi12_solutions_as_expected
        });
        cube_ok && self.n1.observed == self.n2.observed && checks.iter().all(|c| c.matches)
    }
}

fn pow2(e: u32) -> BigInt {
    BigInt::from(1) << e
}

fn half_is_odd(n: u32) -> bool {
    (n / 2) % 2 == 1
}

/// Predicted `|{x^{2^k+1} + y^{2^k+1} + z^{2^k+1} = 0}|`.
pub fn predicted_pi1(n: u32) -> BigInt {
    let h = n / 2;
    if half_is_odd(n) {
        pow2(2 * n)
    } else {
        pow2(2 * n) - pow2(3 * h + 1) + pow2(h + 1)
    }
}

/// Predicted `|{x^{2^{n/2}+1} + y^{2^{n/2}+1} + z^{2^{n/2}+1} = 0}|`.
pub fn predicted_pi2(n: u32) -> BigInt {
    let h = n / 2;
    pow2(5 * h) - pow2(3 * h) + pow2(n)
}

/// Predicted size of the common solution set.
pub fn predicted_pi12(n: u32) -> BigInt {
    3 * pow2(n) - 2
}

/// Predicted `|{x^{2^k+1} = y^{2^k+1}}|`.
pub fn predicted_phi1(n: u32) -> BigInt {
    if half_is_odd(n) {
        pow2(n)
    } else {
        1 + 3 * (pow2(n) - 1)
    }
}

/// Predicted `|{x^{2^{n/2}+1} = y^{2^{n/2}+1}}|`.
pub fn predicted_phi2(n: u32) -> BigInt {
    1 + (pow2(n / 2) + 1) * (pow2(n) - 1)
}

pub fn predicted_phi12(n: u32) -> BigInt {
    pow2(n)
}

/// Predicted `Σ_{(b,c) ∈ E*×F*} f^w_{b,c}(0)^d` for `d ∈ {1, 2, 3}`.
pub fn predicted_power_sum(n: u32, d: u32) -> BigInt {
    let h = n / 2;
    let odd = half_is_odd(n);
    let ord = pow2(n) - 1;
    match d {
        1 => pow2(h) * ord,
        2 => pow2(n) * ord * (pow2(h) - BigInt::from(if odd { 1 } else { 3 })),
        3 => {
            let s: BigInt = pow2(3 * h) * ord * (pow2(h) - BigInt::from(if odd { 3 } else { 5 }));
            -s
        }
        _ => panic!("power sums are predicted for d = 1, 2, 3 only"),
    }
}

/// Number of `θ ∈ E*` whose low and high reduced equations have three roots.
pub fn count_three_root_thetas(ctx: &FieldCtx, k: u32) -> Result<(u64, u64), FieldEqError> {
    check_k(ctx.n(), k)?;
    let thetas: Vec<FieldElement> = ctx.nonzero_elements().collect();
    thetas
        .par_iter()
        .map(|&t| {
            let (a, b) = count_eq33_34(ctx, t, k)?;
            Ok(((a == 3) as u64, (b == 3) as u64))
        })
        .try_reduce(|| (0, 0), |x, y| Ok((x.0 + y.0, x.1 + y.1)))
}

fn count_pairs_with_equal_power(ctx: &FieldCtx, powers: &[u32], other: Option<&[u32]>) -> u64 {
    let size = ctx.size();
    (0..size)
        .into_par_iter()
        .map(|x| {
            (0..size)
                .filter(|&y| powers[x] == powers[y] && other.is_none_or(|o| o[x] == o[y]))
                .count() as u64
        })
        .sum()
}

fn cube_scan(ctx: &FieldCtx, pk: &[u32], ph: &[u32]) -> CubeCounts {
    let n = ctx.n();
    let size = ctx.size();
    let (pi1, pi2, both, shaped) = (0..size)
        .into_par_iter()
        .map(|x| {
            let mut acc = (0u64, 0u64, 0u64, true);
            for y in 0..size {
                for z in 0..size {
                    let a = pk[x] ^ pk[y] ^ pk[z] == 0;
                    let b = ph[x] ^ ph[y] ^ ph[z] == 0;
                    acc.0 += a as u64;
                    acc.1 += b as u64;
                    if a && b {
                        acc.2 += 1;
                        let expected =
                            (x == y && z == 0) || (x == z && y == 0) || (y == z && x == 0);
                        acc.3 &= expected;
                    }
                }
            }
            acc
        })
        .reduce(
            || (0, 0, 0, true),
            |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3 && b.3),
        );
    CubeCounts {
        pi1: CountCheck::new(pi1, predicted_pi1(n)),
        pi2: CountCheck::new(pi2, predicted_pi2(n)),
        pi12: CountCheck::new(both, predicted_pi12(n)),
        // the shape check above accepts only these points; the count pins them all
        pi12_solutions_as_expected: shaped && both as usize == 3 * size - 2,
    }
}

/// Runs every census count by brute force.
///
/// The `E^3` scans run for `n <= 6`, the rest for `n <= 8`; `force` lifts
/// both limits.
pub fn census(ctx: &FieldCtx, k: u32, force: bool) -> Result<EquationCensus, FieldEqError> {
    let n = ctx.n();
    check_k(n, k)?;
    if n > CENSUS_MAX_N && !force {
        return Err(FieldEqError::TooLarge {
            n,
            limit: CENSUS_MAX_N,
        });
    }
    let pk: Vec<u32> = ctx
        .elements()
        .map(|x| ctx.pow(x, quad_exponent(k)).bits())
        .collect();
    let ph: Vec<u32> = ctx
        .elements()
        .map(|x| ctx.pow(x, quad_exponent(ctx.half())).bits())
        .collect();

    let (n1, n2) = count_three_root_thetas(ctx, k)?;
    let predicted_n1 = BigInt::from(rank_deficient_count(n));

    let cube = (n <= CUBE_SCAN_MAX_N || force).then(|| cube_scan(ctx, &pk, &ph));

    let engine = SpectrumEngine::new(ctx, k)?;
    let coords: Vec<u32> = (1..ctx.subfield_size() as u32).collect();
    let bs: Vec<u32> = (1..ctx.size() as u32).collect();
    let values: Vec<i64> = bs
        .par_iter()
        .flat_map_iter(|&b| {
            let engine = &engine;
            coords.iter().map(move |&c| {
                (0..ctx.size())
                    .map(|x| if engine.eval_coord(b, c, x) { -1 } else { 1 })
                    .sum::<i64>()
            })
        })
        .collect();
    let power_sums = (1..=3)
        .map(|d| {
            let s: BigInt = values.iter().map(|&v| BigInt::from(v).pow(d)).sum();
            CountCheck::new(s, predicted_power_sum(n, d))
        })
        .collect();

    Ok(EquationCensus {
        n,
        k,
        n1: CountCheck::new(n1, predicted_n1.clone()),
        n2: CountCheck::new(n2, predicted_n1),
        cube,
        phi1: CountCheck::new(
            count_pairs_with_equal_power(ctx, &pk, None),
            predicted_phi1(n),
        ),
        phi2: CountCheck::new(
            count_pairs_with_equal_power(ctx, &ph, None),
            predicted_phi2(n),
        ),
        phi12: CountCheck::new(
            count_pairs_with_equal_power(ctx, &pk, Some(&ph)),
            predicted_phi12(n),
        ),
        power_sums,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: u32) -> FieldCtx {
        FieldCtx::new(n).unwrap()
    }

    #[test]
    fn kernels_of_simple_maps() {
        let c = ctx(6);
        let id = LinearizedPoly::from_terms(6, &[(0, FieldElement::ONE)]);
        assert!(linearized_kernel(&c, &id).is_empty());
        let artin =
            LinearizedPoly::from_terms(6, &[(1, FieldElement::ONE), (0, FieldElement::ONE)]);
        assert_eq!(linearized_kernel(&c, &artin), vec![FieldElement::ONE]);
        let sub = LinearizedPoly::from_terms(6, &[(3, FieldElement::ONE), (0, FieldElement::ONE)]);
        let ker = linearized_kernel(&c, &sub);
        assert_eq!(ker.len(), 3);
        assert!(ker.iter().all(|&x| c.in_subfield(x)));
        assert!(
            LinearizedPoly::from_terms(6, &[(2, FieldElement::ONE), (2, FieldElement::ONE)])
                .is_zero()
        );
    }

    #[test]
    fn kernel_size_matches_exhaustive_count() {
        let c = ctx(6);
        for t in c.nonzero_elements().step_by(5) {
            let l = rank_equation(&c, t, 2);
            let brute = c.elements().filter(|&z| l.eval(&c, z).is_zero()).count();
            assert_eq!(brute, 1 << linearized_kernel(&c, &l).len());
        }
    }

    #[test]
    fn cube_roots_of_unity() {
        for n in [4, 6] {
            let c = ctx(n);
            let one = FieldElement::ONE;
            assert_eq!(
                count_affine_roots(&c, one, FieldElement::ZERO, one, 1).unwrap(),
                3
            );
        }
    }

    #[test]
    fn affine_roots_never_exceed_three_at_n4() {
        let c = ctx(4);
        for eps in c.nonzero_elements() {
            for v in c.elements() {
                for t in c.nonzero_elements() {
                    assert!(count_affine_roots(&c, eps, v, t, 1).unwrap() <= 3);
                }
            }
        }
    }

    #[test]
    fn affine_roots_reject_bad_params() {
        let c = ctx(6);
        let one = FieldElement::ONE;
        assert!(count_affine_roots(&c, FieldElement::ZERO, one, one, 1).is_err());
        assert!(count_affine_roots(&c, one, one, FieldElement::ZERO, 1).is_err());
        assert!(count_affine_roots(&c, one, one, one, 2).is_err());
    }

    #[test]
    fn rank_equation_counts_are_zero_or_three() {
        for (n, k) in [(4, 1), (4, 3), (6, 2), (6, 4)] {
            let c = ctx(n);
            for t in c.nonzero_elements() {
                let r = count_eq32(&c, t, k).unwrap();
                assert!(r == 0 || r == 3, "n={n} k={k} theta={t}: {r}");
            }
        }
        assert!(count_eq32(&ctx(6), FieldElement::ONE, 3).is_err());
        assert!(count_eq32(&ctx(6), FieldElement::ZERO, 2).is_err());
    }

    #[test]
    fn reduced_equations_agree_with_rank_equation() {
        for (n, k) in [(4, 1), (4, 3), (6, 2), (6, 4), (8, 3)] {
            let c = ctx(n);
            let (k1, k2) = (k.min(n - k), k.max(n - k));
            for t in c.nonzero_elements() {
                let (a, b) = count_eq33_34(&c, t, k).unwrap();
                assert_eq!(a, count_eq32(&c, t, k1).unwrap(), "n={n} theta={t}");
                assert_eq!(b, count_eq32(&c, t, k2).unwrap(), "n={n} theta={t}");
            }
        }
    }

    #[test]
    fn three_root_counts_small_cases() {
        assert_eq!(count_three_root_thetas(&ctx(4), 1).unwrap(), (10, 10));
        assert_eq!(count_three_root_thetas(&ctx(6), 2).unwrap(), (36, 36));
    }

    #[test]
    fn census_n4_and_n6() {
        for (n, k) in [(4, 1), (6, 2)] {
            let r = census(&ctx(n), k, false).unwrap();
            assert!(
                r.all_match(),
                "{}",
                serde_json::to_string_pretty(&r).unwrap()
            );
            assert!(r.cube.is_some());
        }
        let r = census(&ctx(4), 1, false).unwrap();
        assert_eq!(r.cube.as_ref().unwrap().pi2.observed, 976.into());
        let r6 = census(&ctx(6), 2, false).unwrap();
        assert_eq!(r6.cube.as_ref().unwrap().pi12.observed, 190.into());
        assert_eq!(r6.power_sums[0].observed, 504.into());
    }

    #[test]
    fn census_limits() {
        let r = census(&ctx(8), 1, false).unwrap();
        assert!(r.cube.is_none());
        assert!(r.all_match());
        assert_eq!(
            census(&ctx(10), 2, false).unwrap_err(),
            FieldEqError::TooLarge { n: 10, limit: 8 }
        );
    }

    #[test]
    fn census_json_has_match_flags() {
        let r = census(&ctx(4), 3, false).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["n1"]["observed"], "10");
        assert_eq!(v["n1"]["match"], true);
        assert_eq!(v["power_sums"].as_array().unwrap().len(), 3);
    }
}
