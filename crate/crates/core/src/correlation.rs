//! Periodic correlation distributions.
//!
//! `R_{i,j}(τ) = Σ_t (−1)^{s_i(t) + s_j(t+τ)}` over one period. Histograms count
//! every ordered triple `(i, j, τ)`, the in-phase autocorrelations included.
//!
//! Two engines compute the same histogram:
//!
//! * [`Engine::Brute`] XORs packed words and counts ones.
//! * [`Engine::Spectral`] rewrites each triple as a Walsh value. With
//!   `x = α^t`, the sum `s_i(t) + s_j(t + τ)` is `f_{b,c}(x) + tr(a x)` for
//!   `a = l_i + l_j α^τ`, `b = γ_i + γ_j α^{τ(2^k+1)}`, `c = δ_i + δ_j β^τ`,
//!   where `l = 1` on the first part and `0` on the second. So
//!   `R = f̂_{b,c}(a) − 1`, read from a table of every spectrum.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::families::{BinarySequence, FamilyKind, SequenceFamily};
use crate::gf2n::FieldElement;
use crate::histogram::{as_entry_list, as_optional_entry_list};
use crate::quadform::{quad_exponent, SpectrumEngine};
use crate::theory::{predict, Parity, PredictionName, TheoryError};
use crate::Histogram;

/// Default size limits of the two engines, used by front ends.
pub const BRUTE_MAX_N: u32 = 6;
pub const SPECTRAL_MAX_N: u32 = 10;

/// Largest spectral table the engine will allocate, in bytes.
pub const SPECTRAL_CACHE_LIMIT: usize = 2 << 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorrelationError {
    #[error("sequence lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("spectral table for n = {n} needs {bytes} bytes, above the {limit}-byte limit")]
    TooLarge { n: u32, bytes: usize, limit: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Brute,
    Spectral,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Brute => "brute",
            Engine::Spectral => "spectral",
        }
    }
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Full correlation distribution of one family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub n: u32,
    pub k: u32,
    pub kind: FamilyKind,
    pub engine: Engine,
    pub family_size: u64,
    pub period: u64,
    #[serde(with = "as_entry_list")]
    pub histogram: Histogram,
    /// Largest `|R|` over all triples other than the in-phase ones.
    pub r_max: i64,
    #[serde(with = "as_optional_entry_list")]
    pub predicted: Option<Histogram>,
    #[serde(rename = "match")]
    pub matches: Option<bool>,
}

impl CorrelationReport {
    fn new(family: &SequenceFamily, engine: Engine, histogram: Histogram) -> Self {
        let family_size = family.len() as u64;
        let period = family.period() as u64;
        CorrelationReport {
            n: family.params.ctx.n(),
            k: family.params.k,
            kind: family.params.kind,
            engine,
            family_size,
            period,
            r_max: r_max(&histogram, family_size, period),
            histogram,
            predicted: None,
            matches: None,
        }
    }

    /// Fills `predicted` and `matches` from the closed form. The small Kasami
    /// set has no closed form here and is left unset.
    pub fn attach_prediction(&mut self) -> Result<(), TheoryError> {
        if self.kind == FamilyKind::SmallKasami {
            return Ok(());
        }
        let name = PredictionName::correlation(Parity::of(self.n));
        let p = predict(name, self.n, self.k)?;
        self.matches = Some(p.histogram == self.histogram);
        self.predicted = Some(p.histogram);
        Ok(())
    }

    /// Number of times the in-phase value `N` occurs.
    pub fn in_phase_count(&self) -> u64 {
        self.histogram.get_u64(self.period as i64).unwrap_or(0)
    }

    /// Copy labelled with another engine, for comparing reports across engines.
    pub fn with_engine(&self, engine: Engine) -> Self {
        CorrelationReport {
            engine,
            ..self.clone()
        }
    }
}

/// `max |R|` once the `m` in-phase occurrences of `N` are removed.
pub fn r_max(histogram: &Histogram, m: u64, period: u64) -> i64 {
    let m = num_bigint::BigUint::from(m);
    histogram
        .iter()
        .filter(|&(v, c)| v != period as i64 || *c > m)
        .map(|(v, _)| v.abs())
        .max()
        .unwrap_or(0)
}

/// `Σ_t (−1)^{s1(t) + s2(t+τ)}`.
pub fn correlate(
    s1: &BinarySequence,
    s2: &BinarySequence,
    tau: usize,
) -> Result<i64, CorrelationError> {
    if s1.len() != s2.len() {
        return Err(CorrelationError::LengthMismatch {
            left: s1.len(),
            right: s2.len(),
        });
    }
    let shifted = s2.rotated(tau);
    let diff: u32 = s1
        .words()
        .iter()
        .zip(shifted.words())
        .map(|(a, b)| (a ^ b).count_ones())
        .sum();
    Ok(s1.len() as i64 - 2 * diff as i64)
}

/// Runs the chosen engine.
pub fn full_distribution(
    family: &SequenceFamily,
    engine: Engine,
) -> Result<CorrelationReport, CorrelationError> {
    match engine {
        Engine::Brute => Ok(full_distribution_brute(family)),
        Engine::Spectral => full_distribution_spectral(family),
    }
}

fn histogram_from_weights(period: usize, weights: &[u64]) -> Histogram {
    let pairs: Vec<(i64, u64)> = weights
        .iter()
        .enumerate()
        .map(|(w, &c)| (period as i64 - 2 * w as i64, c))
        .collect();
    Histogram::from_u64_pairs(&pairs)
}

fn add_tallies(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
    a
}

/// Direct evaluation of all `M² N` triples.
pub fn full_distribution_brute(family: &SequenceFamily) -> CorrelationReport {
    let period = family.period();
    let seqs: Vec<&BinarySequence> = family.sequences().collect();
    let nw = period.div_ceil(64);
    // rotations[j][τ] packed contiguously
    let rotations: Vec<u64> = seqs
        .par_iter()
        .flat_map_iter(|s| (0..period).flat_map(move |tau| s.rotated(tau).words().to_vec()))
        .collect();
    let stride = period * nw;
    let weights = seqs
        .par_iter()
        .fold(
            || vec![0u64; period + 1],
            |mut tally, si| {
                let a = si.words();
                for rot_j in rotations.chunks_exact(stride) {
                    for b in rot_j.chunks_exact(nw) {
                        let w: u32 = a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones()).sum();
                        tally[w as usize] += 1;
                    }
                }
                tally
            },
        )
        .reduce(|| vec![0u64; period + 1], add_tallies);
    CorrelationReport::new(
        family,
        Engine::Brute,
        histogram_from_weights(period, &weights),
    )
}

/// Walsh values divided by `2^{n/2}`, laid out `[ℓ(a)][(b << h) | coord(c)]`.
struct SpectralTable {
    rows: Vec<i8>,
    row_len: usize,
}

impl SpectralTable {
    fn build(engine: &SpectrumEngine) -> Result<Self, CorrelationError> {
        let ctx = engine.ctx();
        let (n, h) = (ctx.n(), ctx.half());
        let size = ctx.size();
        let row_len = size << h;
        let bytes = row_len * size;
        if bytes > SPECTRAL_CACHE_LIMIT {
            return Err(CorrelationError::TooLarge {
                n,
                bytes,
                limit: SPECTRAL_CACHE_LIMIT,
            });
        }
        let cmask = (1u32 << h) - 1;
        let mut by_form = vec![0i8; bytes];
        by_form.par_chunks_mut(size).enumerate().for_each_init(
            || vec![0i32; size],
            |buf, (bc, out)| {
                let bc = bc as u32;
                engine.raw_transform_into(bc >> h, bc & cmask, buf);
                for (o, &w) in out.iter_mut().zip(buf.iter()) {
                    assert!(w % (1 << h) == 0, "Walsh value {w} not divisible by 2^{h}");
                    *o = i8::try_from(w >> h).expect("scaled Walsh value fits in i8");
                }
            },
        );
        let mut rows = vec![0i8; bytes];
        rows.par_chunks_mut(row_len)
            .enumerate()
            .for_each(|(la, row)| {
                for (bc, slot) in row.iter_mut().enumerate() {
                    *slot = by_form[bc * size + la];
                }
            });
        Ok(SpectralTable { rows, row_len })
    }

    #[inline]
    fn row(&self, la: u32) -> &[i8] {
        let start = la as usize * self.row_len;
        &self.rows[start..start + self.row_len]
    }
}

/// Table lookup of every triple through the Walsh spectra of `f_{b,c}`.
pub fn full_distribution_spectral(
    family: &SequenceFamily,
) -> Result<CorrelationReport, CorrelationError> {
    let ctx = family.params.ctx;
    let h = ctx.half();
    let period = family.period();
    let engine = SpectrumEngine::new(ctx, family.params.k).expect("family k was validated");
    let table = SpectralTable::build(&engine)?;
    let dual = engine.dual();
    let ek = quad_exponent(family.params.k);

    let key = |b: FieldElement, c: FieldElement| (b.bits() << h) | ctx.subfield_coord(c);
    let class_keys = |part: &[BinarySequence]| -> Vec<u32> {
        part.iter()
            .map(|s| key(s.tag.quadratic_coeff(), s.tag.subfield_coeff()))
            .collect()
    };
    let keys1 = class_keys(&family.part1);
    let keys2 = class_keys(&family.part2);

    // coord(β^j) for one period of β
    let beta_coord: Vec<u32> = (0..ctx.subfield_size() as u64 - 1)
        .map(|j| ctx.subfield_coord(ctx.pow(ctx.beta(), j)))
        .collect();
    let beta_period = beta_coord.len();
    let norm_exp = quad_exponent(h);
    let one_dual = dual[1];

    let js: Vec<(bool, &BinarySequence)> = family
        .part1
        .iter()
        .map(|s| (true, s))
        .chain(family.part2.iter().map(|s| (false, s)))
        .collect();

    let scaled = js
        .par_iter()
        .fold(
            || vec![0u64; 256],
            |mut tally, &(lin_j, sj)| {
                let gamma_log = ctx.log(sj.tag.quadratic_coeff()).map(u64::from);
                let delta_shift = ctx
                    .log(sj.tag.subfield_coeff())
                    .map(|l| (u64::from(l) / norm_exp) as usize);
                for tau in 0..period {
                    let b = gamma_log.map_or(0, |g| ctx.exp_alpha(g + tau as u64 * ek).bits());
                    let c = delta_shift.map_or(0, |j| beta_coord[(j + tau) % beta_period]);
                    let bcj = (b << h) | c;
                    let shift = if lin_j {
                        dual[ctx.exp_alpha(tau as u64).bits() as usize]
                    } else {
                        0
                    };
                    // a = 1 + l_j α^τ on the first part, l_j α^τ on the second
                    for (keys, la) in [(&keys1, one_dual ^ shift), (&keys2, shift)] {
                        let row = table.row(la);
                        for &bci in keys.iter() {
                            tally[(row[(bci ^ bcj) as usize] as u8) as usize] += 1;
                        }
                    }
                }
                tally
            },
        )
        .reduce(|| vec![0u64; 256], add_tallies);

    let pairs: Vec<(i64, u64)> = scaled
        .iter()
        .enumerate()
        .map(|(byte, &c)| (((byte as u8 as i8 as i64) << h) - 1, c))
        .collect();
    Ok(CorrelationReport::new(
        family,
        Engine::Spectral,
        Histogram::from_u64_pairs(&pairs),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_family, shift_register, FamilyParams, SequenceTag};
    use crate::gf2n::FieldCtx;

    fn example_n4() -> Histogram {
        Histogram::from_u64_pairs(&[
            (15, 67),
            (-1, 28598),
            (3, 18418),
            (-5, 11044),
            (7, 6902),
            (-9, 2306),
        ])
    }

    #[test]
    fn m_sequence_autocorrelation_is_two_level() {
        let c = FieldCtx::new(6).unwrap();
        let tag = SequenceTag::GammaDelta {
            gamma: FieldElement::ZERO,
            delta: FieldElement::ZERO,
        };
        let u = BinarySequence::from_bits(shift_register::m_sequence(&c), tag);
        assert_eq!(correlate(&u, &u, 0).unwrap(), 63);
        for tau in 1..63 {
            assert_eq!(correlate(&u, &u, tau).unwrap(), -1);
        }
    }

    #[test]
    fn correlate_rejects_mismatched_lengths() {
        let tag = SequenceTag::GammaDelta {
            gamma: FieldElement::ZERO,
            delta: FieldElement::ZERO,
        };
        let a = BinarySequence::from_bits(vec![true; 15], tag);
        let b = BinarySequence::from_bits(vec![true; 63], tag);
        assert_eq!(
            correlate(&a, &b, 0),
            Err(CorrelationError::LengthMismatch {
                left: 15,
                right: 63
            })
        );
    }

    #[test]
    fn correlate_shift_symmetry() {
        let c = FieldCtx::new(6).unwrap();
        let fam = build_family(FamilyParams::generalized(&c, 2).unwrap());
        let n = fam.period();
        for (i, j, tau) in [(0, 5, 3), (17, 400, 62), (519, 2, 1), (100, 100, 30)] {
            let (a, b) = (
                fam.sequences().nth(i).unwrap(),
                fam.sequences().nth(j).unwrap(),
            );
            assert_eq!(
                correlate(a, b, tau).unwrap(),
                correlate(b, a, n - tau).unwrap()
            );
        }
    }

    #[test]
    fn both_engines_reproduce_n4_example() {
        let c = FieldCtx::new(4).unwrap();
        let fam = build_family(FamilyParams::generalized(&c, 1).unwrap());
        let brute = full_distribution_brute(&fam);
        let spectral = full_distribution_spectral(&fam).unwrap();
        assert_eq!(brute.histogram, example_n4());
        assert_eq!(spectral.histogram, example_n4());
        assert_eq!(brute.r_max, 9);
        assert_eq!(spectral.with_engine(Engine::Brute), brute);
    }

    #[test]
    fn engines_agree_on_every_kind_at_n4() {
        let c = FieldCtx::new(4).unwrap();
        for p in [
            FamilyParams::generalized(&c, 3).unwrap(),
            FamilyParams::small_kasami(&c),
            FamilyParams::large_kasami(&c),
        ] {
            let fam = build_family(p);
            let brute = full_distribution_brute(&fam);
            let spectral = full_distribution_spectral(&fam).unwrap();
            assert_eq!(brute.histogram, spectral.histogram, "{}", p.kind);
            let m = fam.len() as u64;
            assert_eq!(brute.histogram.total(), (m * m * 15).into());
            assert_eq!(brute.in_phase_count(), m);
        }
    }

    #[test]
    fn prediction_attaches_for_fk_only() {
        let c = FieldCtx::new(4).unwrap();
        let mut r =
            full_distribution_spectral(&build_family(FamilyParams::generalized(&c, 1).unwrap()))
                .unwrap();
        r.attach_prediction().unwrap();
        assert_eq!(r.matches, Some(true));
        let mut s = full_distribution_brute(&build_family(FamilyParams::small_kasami(&c)));
        s.attach_prediction().unwrap();
        assert_eq!((s.predicted, s.matches), (None, None));
        assert_eq!(s.r_max, 5);
    }

    #[test]
    fn r_max_counts_extra_peaks() {
        let h = Histogram::from_u64_pairs(&[(15, 3), (-1, 10)]);
        assert_eq!(r_max(&h, 3, 15), 1);
        assert_eq!(r_max(&h, 2, 15), 15);
    }

    #[test]
    fn report_json_shape() {
        let c = FieldCtx::new(4).unwrap();
        let mut r =
            full_distribution_brute(&build_family(FamilyParams::generalized(&c, 1).unwrap()));
        r.attach_prediction().unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["kind"], "fk");
        assert_eq!(v["engine"], "brute");
        assert_eq!(v["family_size"], 67);
        assert_eq!(v["histogram"][0]["value"], 15);
        assert_eq!(v["histogram"][0]["count"], "67");
        assert_eq!(v["match"], true);
        let back: CorrelationReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}
