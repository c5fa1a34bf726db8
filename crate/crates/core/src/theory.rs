//! Closed-form distributions, evaluated exactly with big integers, and the
//! linear code whose codewords are the traces `tr(γx + δx^{2^k+1}) + tr_h(ηx^{2^h+1})`.
//!
//! Every compressed `±` row is expanded into two signed rows. The pairing of
//! signs with counts is pinned by the exhaustive tests in this crate.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::gf2n::{FieldCtx, FieldElement};
use crate::quadform::{check_k, quad_exponent, QuadFormError};
use crate::Histogram;

/// Largest `n` for exhaustive code enumeration without an override.
pub const CODE_MAX_N: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("{name} applies only when n/2 is {expected}; n = {n}")]
    ParityMismatch {
        name: PredictionName,
        n: u32,
        expected: &'static str,
    },
    #[error("unknown prediction {0:?}")]
    UnknownName(String),
    #[error("n = {0} is not supported: n must be even and at least 4")]
    UnsupportedN(u32),
    #[error(transparent)]
    InvalidK(#[from] QuadFormError),
    #[error("{name} at n = {n}: count for value {value} is not an integer")]
    InexactDivision {
        name: PredictionName,
        n: u32,
        value: i64,
    },
    #[error("{name} at n = {n}: count for value {value} is negative")]
    NegativeCount {
        name: PredictionName,
        n: u32,
        value: i64,
    },
    #[error("dual weight B_{j} is not a non-negative integer")]
    NonIntegerResult { j: usize },
    #[error("n = {n} exceeds the limit {limit} for code enumeration (override with force)")]
    TooLarge { n: u32, limit: u32 },
    #[error("bad parameters: {0}")]
    BadParams(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    /// `n/2` odd, i.e. `n ≡ 2 (mod 4)`.
    Odd,
    /// `n/2` even, i.e. `n ≡ 0 (mod 4)`.
    Even,
}

impl Parity {
    pub fn of(n: u32) -> Parity {
        if (n / 2) % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    fn word(self) -> &'static str {
        match self {
            Parity::Odd => "odd",
            Parity::Even => "even",
        }
    }
}

/// Every distribution with a closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PredictionName {
    /// `f^w_{b,0}(1)` over `b ∈ E*`, `n/2` odd.
    MonomialAtOneOdd,
    /// `f^w_{b,0}(0)` over `b ∈ E*`, `n/2` even.
    MonomialAtZeroEven,
    /// `f^w_{b,0}(1)` over `b ∈ E*`, `n/2` even.
    MonomialAtOneEven,
    /// `f^w_{0,c}(0)` over `c ∈ F*`.
    SubfieldAtZero,
    /// `f^w_{0,c}(1)` over `c ∈ F*`.
    SubfieldAtOne,
    /// `f^w_{b,c}(λ)` over all `(b, c, λ) ∈ E × F × E`.
    WalshAll,
    /// `f^w_{b,c}(0)` over `E* × F*`, `n/2` odd.
    MixedAtZeroOdd,
    /// `f^w_{b,c}(1)` over `E* × F*`, `n/2` odd.
    MixedAtOneOdd,
    /// `f^w_{b,c}(0)` over `E* × F*`, `n/2` even.
    MixedAtZeroEven,
    /// `f^w_{b,c}(1)` over `E* × F*`, `n/2` even.
    MixedAtOneEven,
    /// `{f^w_{b,c}(1) : E × F} ∪ {f^w_{1,c}(0) : c ∈ F}`, `n/2` odd.
    JointOdd,
    /// Weighted union of `f^w(1)` and `f^w(0)` values, `n/2` even.
    JointWeightedEven,
    /// Weight distribution of the code, including the zero word.
    CodeWeights,
    /// Family correlation distribution over all `M²N` triples, `n/2` odd.
    CorrelationOdd,
    /// Same, `n/2` even.
    CorrelationEven,
    /// Family imbalance distribution, `n/2` odd.
    ImbalanceOdd,
    /// Same, `n/2` even.
    ImbalanceEven,
    /// Ranks of `f_{θ,1}` over `θ ∈ E*`: value `n−2` or `n`.
    RankSplit,
}

impl PredictionName {
    pub const ALL: [PredictionName; 18] = [
        PredictionName::MonomialAtOneOdd,
        PredictionName::MonomialAtZeroEven,
        PredictionName::MonomialAtOneEven,
        PredictionName::SubfieldAtZero,
        PredictionName::SubfieldAtOne,
        PredictionName::WalshAll,
        PredictionName::MixedAtZeroOdd,
        PredictionName::MixedAtOneOdd,
        PredictionName::MixedAtZeroEven,
        PredictionName::MixedAtOneEven,
        PredictionName::JointOdd,
        PredictionName::JointWeightedEven,
        PredictionName::CodeWeights,
        PredictionName::CorrelationOdd,
        PredictionName::CorrelationEven,
        PredictionName::ImbalanceOdd,
        PredictionName::ImbalanceEven,
        PredictionName::RankSplit,
    ];

    pub fn as_str(self) -> &'static str {
        use PredictionName::*;
        match self {
            MonomialAtOneOdd => "monomial-at-one-odd",
            MonomialAtZeroEven => "monomial-at-zero-even",
            MonomialAtOneEven => "monomial-at-one-even",
            SubfieldAtZero => "subfield-at-zero",
            SubfieldAtOne => "subfield-at-one",
            WalshAll => "walsh-all",
            MixedAtZeroOdd => "mixed-at-zero-odd",
            MixedAtOneOdd => "mixed-at-one-odd",
            MixedAtZeroEven => "mixed-at-zero-even",
            MixedAtOneEven => "mixed-at-one-even",
            JointOdd => "joint-odd",
            JointWeightedEven => "joint-weighted-even",
            CodeWeights => "code-weights",
            CorrelationOdd => "correlation-odd",
            CorrelationEven => "correlation-even",
            ImbalanceOdd => "imbalance-odd",
            ImbalanceEven => "imbalance-even",
            RankSplit => "rank-split",
        }
    }

    /// Parity the formula is stated for; `None` when it holds for both.
    pub fn parity(self) -> Option<Parity> {
        use PredictionName::*;
        match self {
            MonomialAtOneOdd | MixedAtZeroOdd | MixedAtOneOdd | JointOdd | CorrelationOdd
            | ImbalanceOdd => Some(Parity::Odd),
            MonomialAtZeroEven | MonomialAtOneEven | MixedAtZeroEven | MixedAtOneEven
            | JointWeightedEven | CorrelationEven | ImbalanceEven => Some(Parity::Even),
            SubfieldAtZero | SubfieldAtOne | WalshAll | CodeWeights | RankSplit => None,
        }
    }

    pub fn correlation(parity: Parity) -> Self {
        match parity {
            Parity::Odd => PredictionName::CorrelationOdd,
            Parity::Even => PredictionName::CorrelationEven,
        }
    }

    pub fn imbalance(parity: Parity) -> Self {
        match parity {
            Parity::Odd => PredictionName::ImbalanceOdd,
            Parity::Even => PredictionName::ImbalanceEven,
        }
    }

    /// Size of the multiset the formula describes.
    pub fn population(self, n: u32) -> BigUint {
        use PredictionName::*;
        let h = n / 2;
        let p = |e: u32| BigUint::from(1u32) << e;
        let one = || BigUint::from(1u32);
        let ord = p(n) - one();
        let sub = p(h) - one();
        let m = family_size(n);
        match self {
            MonomialAtOneOdd | MonomialAtZeroEven | MonomialAtOneEven | RankSplit => ord,
            SubfieldAtZero | SubfieldAtOne => sub,
            WalshAll | CodeWeights => p(5 * h),
            MixedAtZeroOdd | MixedAtOneOdd | MixedAtZeroEven | MixedAtOneEven => ord * sub,
            JointOdd => p(3 * h) + p(h),
            JointWeightedEven => {
                let pairs = p(h) - one();
                p(3 * h) * (p(n) + p(h) - one()) + pairs * (p(n) + p(h) - one())
            }
            CorrelationOdd | CorrelationEven => &m * &m * ord,
            ImbalanceOdd | ImbalanceEven => m,
        }
    }
}

impl fmt::Display for PredictionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PredictionName {
    type Err = TheoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PredictionName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| TheoryError::UnknownName(s.to_string()))
    }
}

impl Serialize for PredictionName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// A closed-form histogram evaluated at one `(n, k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Prediction {
    pub name: PredictionName,
    pub n: u32,
    pub k: u32,
    pub histogram: Histogram,
}

/// `|F^k| = 2^{3n/2} + 2^{n/2}` (`n/2` odd) or `2^{3n/2} + 2^{n/2} − 1` (`n/2` even).
pub fn family_size(n: u32) -> BigUint {
    let h = n / 2;
    let base = (BigUint::from(1u32) << (3 * h)) + (BigUint::from(1u32) << h);
    match Parity::of(n) {
        Parity::Odd => base,
        Parity::Even => base - 1u32,
    }
}

/// Number of `θ ∈ E*` for which `f_{θ,1}` has rank `n − 2`:
/// `(2^{n+1} − 2^{n/2+1} − 4)/3` (`n/2` odd) or `(2^{n+1} − 2)/3` (`n/2` even).
pub fn rank_deficient_count(n: u32) -> BigUint {
    let h = n / 2;
    let p = |e: u32| BigUint::from(1u32) << e;
    match Parity::of(n) {
        Parity::Odd => (p(n + 1) - p(h + 1) - 4u32) / 3u32,
        Parity::Even => (p(n + 1) - 2u32) / 3u32,
    }
}

struct Rows {
    name: PredictionName,
    n: u32,
    out: Histogram,
}

impl Rows {
    /// Adds `numer / den` occurrences of `value`; zero rows are dropped.
    fn row(&mut self, value: BigInt, numer: BigInt, den: u32) -> Result<(), TheoryError> {
        let value = value.to_i64().expect("values fit in i64 for supported n");
        let (q, r) = numer.div_rem(&BigInt::from(den));
        if !r.is_zero() {
            return Err(TheoryError::InexactDivision {
                name: self.name,
                n: self.n,
                value,
            });
        }
        if q.is_negative() {
            return Err(TheoryError::NegativeCount {
                name: self.name,
                n: self.n,
                value,
            });
        }
        self.out
            .add(value, q.to_biguint().expect("checked non-negative"));
        Ok(())
    }
}

/// Evaluates the closed form `name` at `(n, k)`.
pub fn predict(name: PredictionName, n: u32, k: u32) -> Result<Prediction, TheoryError> {
    if n < 4 || !n.is_multiple_of(2) || n > 62 {
        return Err(TheoryError::UnsupportedN(n));
    }
    check_k(n, k)?;
    if let Some(par) = name.parity() {
        if par != Parity::of(n) {
            return Err(TheoryError::ParityMismatch {
                name,
                n,
                expected: par.word(),
            });
        }
    }
    let h = n / 2;
    let p = |e: u32| BigInt::from(1) << e;
    let one = || BigInt::from(1);
    let ord: BigInt = p(n) - 1;
    let mut r = Rows {
        name,
        n,
        out: Histogram::new(),
    };
    use PredictionName::*;
    match name {
        MonomialAtOneOdd => {
            r.row(p(h + 1), p(n - 3) + p(h - 2), 1)?;
            r.row(-p(h + 1), p(n - 3) - p(h - 2), 1)?;
            r.row(0.into(), p(n) - p(n - 2) - 1, 1)?;
        }
        MonomialAtZeroEven => {
            r.row(-p(h + 1), ord.clone(), 3)?;
            r.row(p(h), 2 * ord.clone(), 3)?;
        }
        MonomialAtOneEven => {
            r.row(p(h + 1), p(n - 3) + p(h - 2), 3)?;
            r.row(-p(h + 1), p(n - 3) - p(h - 2) - 1, 3)?;
            r.row(0.into(), p(n) - p(n - 2), 3)?;
            r.row(p(h), 2 * (p(n - 1) + p(h - 1) - 1), 3)?;
            r.row(-p(h), 2 * (p(n - 1) - p(h - 1)), 3)?;
        }
        SubfieldAtZero => {
            r.row(-p(h), p(h) - 1, 1)?;
        }
        SubfieldAtOne => {
            r.row(p(h), p(h - 1), 1)?;
            r.row(-p(h), p(h - 1) - 1, 1)?;
        }
        WalshAll => {
            let s = p(h) - 1;
            let t = p(n + 1) + p(h) - 1;
            let u = p(n) + p(h + 1) + 4;
            r.row(p(n), one(), 1)?;
            r.row(p(h + 1), &s * (p(n - 3) + p(h - 2)) * &t, 3)?;
            r.row(-p(h + 1), &s * (p(n - 3) - p(h - 2)) * &t, 3)?;
            r.row(
                0.into(),
                &s * (p(2 * n - 1) + p(3 * h - 2) - p(n - 2) + p(h) + 1),
                1,
            )?;
            r.row(p(h), &s * (p(n - 1) + p(h - 1)) * &u, 3)?;
            r.row(-p(h), &s * (p(n - 1) - p(h - 1)) * &u, 3)?;
        }
        MixedAtZeroOdd => {
            r.row(-p(h + 1), &ord * (p(h - 1) - 1), 3)?;
            r.row(0.into(), &ord * (p(h - 1) - 1), 1)?;
            r.row(p(h), &ord * (p(h) + 1), 3)?;
        }
        MixedAtOneOdd => {
            r.row(p(h + 1), (p(n - 3) + p(h - 2)) * (p(h + 1) - 4), 3)?;
            r.row(-p(h + 1), p(3 * h - 2) - p(n) + p(h - 1) + 1, 3)?;
            r.row(0.into(), p(3 * h - 1) - p(n) - p(h - 1) + 1, 1)?;
            r.row(p(h), (p(n - 1) + p(h - 1) - 1) * (p(h) + 1), 3)?;
            r.row(-p(h), (p(n - 1) - p(h - 1)) * (p(h) + 1), 3)?;
        }
        MixedAtZeroEven => {
            r.row(-p(h + 1), &ord * (p(h - 1) - 2), 3)?;
            r.row(0.into(), &ord * p(h - 1), 1)?;
            r.row(p(h), &ord * (p(h) - 1), 3)?;
        }
        MixedAtOneEven => {
            r.row(p(h + 1), (p(h + 1) - 2) * (p(n - 3) + p(h - 2)), 3)?;
            r.row(-p(h + 1), p(3 * h - 2) - 3 * p(n - 2) + 2, 3)?;
            r.row(0.into(), p(3 * h - 1) - p(n - 1) - p(h - 1), 1)?;
            r.row(p(h), (p(n - 1) + p(h - 1) - 1) * (p(h) - 1), 3)?;
            r.row(-p(h), (p(n - 1) - p(h - 1)) * (p(h) - 1), 3)?;
        }
        JointOdd | ImbalanceOdd => {
            // imbalance is the joint multiset shifted by −1
            let d = if name == ImbalanceOdd {
                one()
            } else {
                BigInt::zero()
            };
            r.row(p(h + 1) - &d, (p(n - 3) + p(h - 2)) * (p(h + 1) - 1), 3)?;
            r.row(-p(h + 1) - &d, (p(n - 3) - p(h - 2)) * (p(h + 1) - 1), 3)?;
            r.row(-d.clone(), p(3 * h - 1) - p(n - 2) + 1, 1)?;
            r.row(p(h) - &d, p(3 * h - 1) + p(n) + p(h + 1), 3)?;
            r.row(-p(h) - &d, p(3 * h - 1) + p(h) - 3, 3)?;
        }
        JointWeightedEven => {
            r.row(
                p(h + 1),
                (p(n) + p(h) - 1) * (p(h + 1) - 1) * (p(n - 3) + p(h - 2)),
                3,
            )?;
            r.row(
                -p(h + 1),
                p(5 * h - 2) - 3 * p(2 * n - 3) - 5 * p(3 * h - 3) - p(n - 3) - 5 * p(h - 2) + 4,
                3,
            )?;
            r.row(
                0.into(),
                p(5 * h - 1) + p(2 * n - 2) - 3 * p(3 * h - 2) + 5 * p(n - 2) - 1,
                1,
            )?;
            r.row(
                p(h),
                p(5 * h - 1) + 3 * p(2 * n - 1) + 5 * p(3 * h - 1) - p(n) - p(h + 2) + 2,
                3,
            )?;
            r.row(
                -p(h),
                p(5 * h - 1) + p(2 * n - 1) + p(3 * h - 1) - p(n + 1) - p(h),
                3,
            )?;
        }
        CodeWeights => {
            let s = p(h) - 1;
            let t = p(n + 1) + p(h) - 1;
            let u = p(n) + p(h + 1) + 4;
            r.row(0.into(), one(), 1)?;
            r.row(p(n - 1) + p(h), &s * (p(n - 3) - p(h - 2)) * &t, 3)?;
            r.row(p(n - 1) - p(h), &s * (p(n - 3) + p(h - 2)) * &t, 3)?;
            r.row(
                p(n - 1),
                &s * (p(2 * n - 1) + p(3 * h - 2) - p(n - 2) + p(h) + 1),
                1,
            )?;
            r.row(p(n - 1) + p(h - 1), &s * (p(n - 1) - p(h - 1)) * &u, 3)?;
            r.row(p(n - 1) - p(h - 1), &s * (p(n - 1) + p(h - 1)) * &u, 3)?;
        }
        CorrelationOdd => {
            r.row(ord.clone(), p(3 * h) + p(h), 1)?;
            r.row(
                -one(),
                p(h + 1)
                    * (p(7 * h - 2) - p(3 * n - 3) + p(2 * n - 1) - p(3 * h - 1) + p(n - 2) - 1),
                1,
            )?;
            r.row(
                p(h) - 1,
                p(4 * n - 1) + p(7 * h) + p(3 * n + 1) - p(2 * n) - p(3 * h + 1) - p(n + 2),
                3,
            )?;
            r.row(
                -p(h) - 1,
                p(4 * n - 1) + p(3 * n) - 3 * p(5 * h) + p(2 * n + 1) - 3 * p(3 * h)
                    + p(n)
                    + 3 * p(h),
                3,
            )?;
            let w = p(h + 1) * (p(2 * n - 1) - 1) * (p(h + 1) - 1);
            r.row(p(h + 1) - 1, &w * (p(n - 3) + p(h - 2)), 3)?;
            r.row(-p(h + 1) - 1, &w * (p(n - 3) - p(h - 2)), 3)?;
        }
        CorrelationEven => {
            r.row(ord.clone(), p(3 * h) + p(h) - 1, 1)?;
            r.row(
                -one(),
                p(4 * n - 1) - p(7 * h - 2) - p(2 * n - 1) + 3 * p(3 * h - 1) - 5 * p(n - 1) - p(h)
                    + 2,
                1,
            )?;
            r.row(
                p(h) - 1,
                p(4 * n - 1) + p(7 * h) + p(3 * n + 1) - p(5 * h) - 3 * p(2 * n) - 5 * p(3 * h)
                    + 3 * p(h + 1)
                    - 2,
                3,
            )?;
            r.row(
                -p(h) - 1,
                p(4 * n - 1) + p(3 * n) - p(5 * h + 2) + p(2 * n + 1) - p(3 * h + 2) + 7 * p(n)
                    - p(h),
                3,
            )?;
            r.row(
                p(h + 1) - 1,
                p(4 * n - 2) + 3 * p(7 * h - 3) - p(3 * n - 2) - p(5 * h - 1) - 5 * p(2 * n - 2)
                    + p(3 * h - 2)
                    + 5 * p(n - 2)
                    - p(h - 1),
                3,
            )?;
            r.row(
                -p(h + 1) - 1,
                p(4 * n - 2) - 5 * p(7 * h - 3) + p(3 * n - 2) - p(5 * h - 1)
                    + 3 * p(2 * n - 2)
                    + 5 * p(3 * h - 2)
                    - 3 * p(n - 2)
                    + 3 * p(h - 1)
                    - 4,
                3,
            )?;
        }
        ImbalanceEven => {
            r.row(p(h + 1) - 1, (p(h + 1) - 1) * (p(n - 3) + p(h - 2)), 3)?;
            r.row(-p(h + 1) - 1, p(3 * h - 2) - 5 * p(n - 3) + p(h - 2) - 1, 3)?;
            r.row(-one(), p(3 * h - 1) - p(n - 2) + 1, 1)?;
            r.row(p(h) - 1, p(3 * h - 1) + p(n) + p(h + 1) - 2, 3)?;
            r.row(-p(h) - 1, p(3 * h - 1) + p(h) - 3, 3)?;
        }
        RankSplit => {
            let deficient = BigInt::from(rank_deficient_count(n));
            r.row(BigInt::from(n - 2), deficient.clone(), 1)?;
            r.row(BigInt::from(n), &ord - deficient, 1)?;
        }
    }
    Ok(Prediction {
        name,
        n,
        k,
        histogram: r.out,
    })
}

/// Packed codeword length in 64-bit words.
fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

fn set_bit(words: &mut [u64], t: usize) {
    words[t / 64] |= 1 << (t % 64);
}

/// `c(γ, δ, η)` evaluated at `x = α^t` for `t = 0..2^n−1`, by the definition.
pub fn codeword(
    ctx: &FieldCtx,
    k: u32,
    gamma: FieldElement,
    delta: FieldElement,
    eta: FieldElement,
) -> Vec<u64> {
    let len = ctx.order() as usize;
    let mut w = vec![0u64; words_for(len)];
    let ek = quad_exponent(k);
    let eh = quad_exponent(ctx.half());
    for t in 0..len {
        let x = ctx.exp_alpha(t as u64);
        let lin = ctx.mul(gamma, x) + ctx.mul(delta, ctx.pow(x, ek));
        let sub = ctx.mul(eta, ctx.pow(x, eh));
        if ctx.trace(lin) ^ ctx.half_trace_by_definition(sub) {
            set_bit(&mut w, t);
        }
    }
    w
}

/// Generator rows: `γ = α^i` (`i < n`), then `δ = α^i`, then `η` over a basis of `F`.
pub fn generator_rows(ctx: &FieldCtx, k: u32) -> Vec<Vec<u64>> {
    let n = ctx.n();
    let z = FieldElement::ZERO;
    let mut rows = Vec::with_capacity((5 * n / 2) as usize);
    for i in 0..n {
        rows.push(codeword(ctx, k, FieldElement(1 << i), z, z));
    }
    for i in 0..n {
        rows.push(codeword(ctx, k, z, FieldElement(1 << i), z));
    }
    for j in 0..ctx.half() {
        rows.push(codeword(ctx, k, z, z, ctx.subfield_from_coord(1 << j)));
    }
    rows
}

/// The code with its empirical weight distribution.
#[derive(Clone, Debug, Serialize)]
pub struct CodeSpec {
    pub n: u32,
    pub k: u32,
    pub length: usize,
    pub dimension: u32,
    /// Weight distribution over all `2^{5n/2}` codewords.
    pub weights: Histogram,
}

/// Enumerates every codeword (Gray-code order over the generator rows).
pub fn build_code(ctx: &FieldCtx, k: u32, force: bool) -> Result<CodeSpec, TheoryError> {
    let n = ctx.n();
    check_k(n, k)?;
    if n > CODE_MAX_N && !force {
        return Err(TheoryError::TooLarge {
            n,
            limit: CODE_MAX_N,
        });
    }
    let rows = generator_rows(ctx, k);
    let dim = rows.len() as u32;
    let len = ctx.order() as usize;
    let mut word = vec![0u64; words_for(len)];
    let mut by_weight = vec![0u64; len + 1];
    by_weight[0] = 1;
    for i in 1u64..(1u64 << dim) {
        let row = &rows[i.trailing_zeros() as usize];
        for (w, r) in word.iter_mut().zip(row) {
            *w ^= r;
        }
        let wt: u32 = word.iter().map(|w| w.count_ones()).sum();
        by_weight[wt as usize] += 1;
    }
    let weights = by_weight
        .iter()
        .enumerate()
        .map(|(w, &c)| (w as i64, BigUint::from(c)))
        .collect();
    Ok(CodeSpec {
        n,
        k,
        length: len,
        dimension: dim,
        weights,
    })
}

/// Relabels weight `w` as the Walsh value `2^n − 2w`.
pub fn weights_as_walsh_values(n: u32, weights: &Histogram) -> Histogram {
    weights.map_values(|w| (1i64 << n) - 2 * w)
}

fn binomial(n: usize, r: usize) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    num_integer::binomial(BigInt::from(n), BigInt::from(r))
}

/// Krawtchouk value `K_j(i) = Σ_s (−1)^s C(i, s) C(len − i, j − s)`.
pub fn krawtchouk(len: usize, j: usize, i: usize) -> BigInt {
    (0..=j)
        .map(|s| {
            let term = binomial(i, s) * binomial(len - i, j - s);
            if s % 2 == 1 {
                -term
            } else {
                term
            }
        })
        .sum()
}

/// Number of dual codewords of weight `j`: `2^{−dim} Σ_i A_i K_j(i)`.
pub fn dual_weight(code: &CodeSpec, j: usize) -> Result<BigUint, TheoryError> {
    let total: BigInt = code
        .weights
        .iter()
        .map(|(i, a)| BigInt::from(a.clone()) * krawtchouk(code.length, j, i as usize))
        .sum();
    let (q, r) = total.div_rem(&(BigInt::from(1) << code.dimension));
    if !r.is_zero() || q.sign() == Sign::Minus {
        return Err(TheoryError::NonIntegerResult { j });
    }
    Ok(q.to_biguint().expect("non-negative"))
}

/// `B_1, …, B_{j_max}` of the dual code, for `j_max <= 4`.
pub fn dual_low_weights(code: &CodeSpec, j_max: usize) -> Result<Vec<BigUint>, TheoryError> {
    if j_max > 4 {
        return Err(TheoryError::BadParams(format!("j_max = {j_max} exceeds 4")));
    }
    (1..=j_max).map(|j| dual_weight(code, j)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(pairs: &[(i64, u64)]) -> Histogram {
        Histogram::from_u64_pairs(pairs)
    }

    fn pr(name: PredictionName, n: u32, k: u32) -> Histogram {
        predict(name, n, k).unwrap().histogram
    }

    use PredictionName::*;

    #[test]
    fn names_round_trip() {
        for p in PredictionName::ALL {
            assert_eq!(p.as_str().parse::<PredictionName>().unwrap(), p);
        }
        assert!("nope".parse::<PredictionName>().is_err());
    }

    #[test]
    fn correlation_closed_forms_at_n4_and_n6() {
        assert_eq!(
            pr(CorrelationOdd, 6, 2),
            h(&[
                (63, 520),
                (-1, 7893232),
                (7, 3668224),
                (-9, 2853064),
                (15, 1637600),
                (-17, 982560)
            ])
        );
        assert_eq!(
            pr(CorrelationEven, 4, 1),
            h(&[
                (15, 67),
                (-1, 28598),
                (3, 18418),
                (-5, 11044),
                (7, 6902),
                (-9, 2306)
            ])
        );
    }

    #[test]
    fn parity_mismatch_is_an_error() {
        assert!(matches!(
            predict(CorrelationOdd, 4, 1),
            Err(TheoryError::ParityMismatch { .. })
        ));
        assert!(matches!(
            predict(ImbalanceEven, 6, 2),
            Err(TheoryError::ParityMismatch { .. })
        ));
        assert!(matches!(
            predict(WalshAll, 6, 3),
            Err(TheoryError::InvalidK(_))
        ));
        assert!(matches!(
            predict(WalshAll, 5, 1),
            Err(TheoryError::UnsupportedN(5))
        ));
    }

    #[test]
    fn rank_deficient_counts() {
        assert_eq!(rank_deficient_count(4), 10u32.into());
        assert_eq!(rank_deficient_count(6), 36u32.into());
        assert_eq!(rank_deficient_count(8), 170u32.into());
        assert_eq!(rank_deficient_count(10), 660u32.into());
    }

    #[test]
    fn small_tables_match_brute_force_values() {
        assert_eq!(
            pr(MonomialAtOneOdd, 6, 2),
            h(&[(16, 10), (0, 47), (-16, 6)])
        );
        assert_eq!(
            pr(MonomialAtOneEven, 4, 1),
            h(&[(8, 1), (4, 6), (0, 4), (-4, 4)])
        );
        assert_eq!(pr(MonomialAtZeroEven, 4, 1), h(&[(4, 10), (-8, 5)]));
        assert_eq!(
            pr(MixedAtZeroOdd, 6, 2),
            h(&[(8, 189), (0, 189), (-16, 63)])
        );
        assert_eq!(
            pr(MixedAtOneOdd, 6, 2),
            h(&[(16, 40), (8, 105), (0, 189), (-8, 84), (-16, 23)])
        );
        assert_eq!(pr(MixedAtZeroEven, 4, 1), h(&[(4, 15), (0, 30)]));
        assert_eq!(
            pr(MixedAtOneEven, 4, 1),
            h(&[(8, 6), (4, 9), (0, 22), (-4, 6), (-8, 2)])
        );
        assert_eq!(
            pr(JointOdd, 6, 2),
            h(&[(16, 50), (8, 112), (0, 241), (-8, 87), (-16, 30)])
        );
        assert_eq!(
            pr(ImbalanceOdd, 6, 2),
            h(&[(15, 50), (7, 112), (-1, 241), (-9, 87), (-17, 30)])
        );
        assert_eq!(
            pr(JointWeightedEven, 4, 1),
            h(&[(8, 133), (4, 342), (0, 547), (-4, 212), (-8, 39)])
        );
        assert_eq!(
            pr(ImbalanceEven, 4, 1),
            h(&[(7, 7), (3, 18), (-1, 29), (-5, 11), (-9, 2)])
        );
        assert_eq!(
            pr(ImbalanceEven, 8, 1),
            h(&[(31, 372), (15, 778), (-1, 1985), (-17, 687), (-33, 289)])
        );
        assert_eq!(
            pr(WalshAll, 4, 1),
            h(&[(16, 1), (8, 105), (4, 280), (0, 435), (-4, 168), (-8, 35)])
        );
        assert_eq!(
            pr(CodeWeights, 6, 2),
            h(&[
                (0, 1),
                (40, 1890),
                (36, 5488),
                (32, 15183),
                (28, 7056),
                (24, 3150)
            ])
        );
        assert_eq!(pr(SubfieldAtZero, 6, 2), h(&[(-8, 7)]));
        assert_eq!(pr(SubfieldAtOne, 6, 2), h(&[(8, 4), (-8, 3)]));
    }

    #[test]
    fn correlation_even_at_n8() {
        assert_eq!(
            pr(CorrelationEven, 8, 1),
            h(&[
                (255, 4111),
                (31, 389868648),
                (15, 816069322),
                (-1, 2080347506),
                (-17, 720061008),
                (-33, 303231260)
            ])
        );
    }

    #[test]
    fn populations_hold_symbolically() {
        for n in (4..=16).step_by(2) {
            let k = if Parity::of(n) == Parity::Odd { 2 } else { 1 };
            for name in PredictionName::ALL {
                match predict(name, n, k) {
                    Ok(p) => assert_eq!(p.histogram.total(), name.population(n), "{name} n={n}"),
                    Err(TheoryError::ParityMismatch { .. }) => {}
                    Err(e) => panic!("{name} n={n}: {e}"),
                }
            }
        }
    }

    #[test]
    fn code_linear_and_injective_at_n4() {
        let ctx = FieldCtx::new(4).unwrap();
        let f = ctx.subfield_elements();
        let words: Vec<_> = [(3u32, 5u32, 1usize), (9, 14, 2), (12, 0, 3)]
            .iter()
            .map(|&(g, d, e)| (FieldElement(g), FieldElement(d), f[e]))
            .collect();
        for &(g1, d1, e1) in &words {
            for &(g2, d2, e2) in &words {
                let sum: Vec<u64> = codeword(&ctx, 1, g1, d1, e1)
                    .iter()
                    .zip(codeword(&ctx, 1, g2, d2, e2))
                    .map(|(a, b)| a ^ b)
                    .collect();
                assert_eq!(sum, codeword(&ctx, 1, g1 + g2, d1 + d2, e1 + e2));
            }
        }
        let code = build_code(&ctx, 1, false).unwrap();
        assert_eq!(code.weights.get(0), BigUint::from(1u32));
        assert_eq!(code.weights, pr(CodeWeights, 4, 1));
        assert_eq!(
            code.weights.values().collect::<Vec<_>>(),
            vec![12, 10, 8, 6, 4, 0]
        );
    }

    #[test]
    fn dual_weights_vanish_below_four() {
        let ctx = FieldCtx::new(4).unwrap();
        let code = build_code(&ctx, 1, false).unwrap();
        let b = dual_low_weights(&code, 3).unwrap();
        assert!(b.iter().all(|x| x.is_zero()));
        assert_eq!(dual_weight(&code, 0).unwrap(), BigUint::from(1u32));
        assert!(dual_low_weights(&code, 5).is_err());
    }

    #[test]
    fn non_integer_dual_weight_is_detected() {
        let ctx = FieldCtx::new(4).unwrap();
        let mut code = build_code(&ctx, 1, false).unwrap();
        code.weights.add(1, BigUint::from(1u32));
        assert!(matches!(
            dual_weight(&code, 1),
            Err(TheoryError::NonIntegerResult { j: 1 })
        ));
    }

    #[test]
    fn krawtchouk_small_values() {
        assert_eq!(krawtchouk(15, 0, 7), 1.into());
        assert_eq!(krawtchouk(15, 1, 0), 15.into());
        assert_eq!(krawtchouk(15, 1, 15), (-15).into());
        assert_eq!(krawtchouk(4, 2, 1), 0.into());
    }

    #[test]
    fn code_enumeration_is_guarded() {
        let ctx = FieldCtx::new(10).unwrap();
        assert!(matches!(
            build_code(&ctx, 2, false),
            Err(TheoryError::TooLarge { n: 10, limit: 8 })
        ));
    }
}
