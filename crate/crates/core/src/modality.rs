//! Hartigan's dip test of unimodality and peak counting on histograms.
//!
//! The dip is the largest deviation between the empirical CDF and the
//! closest unimodal CDF, computed with the greatest-convex-minorant /
//! least-concave-majorant iteration. Histograms are expanded to samples by
//! spreading the votes of each bin evenly across it, and p-values come from
//! a uniform(0, 1) bootstrap whose `i`-th draw uses ChaCha stream `i`, so
//! draws can be computed in any order or in parallel.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distributions::{RatingDistribution, NUM_BINS};
use crate::error::{Error, Result};

pub const DEFAULT_BOOTSTRAP: usize = 2000;
pub const DEFAULT_SIGNIFICANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalityResult {
    pub dip: f64,
    pub p_value: f64,
    /// Number of votes the dip was computed from.
    pub n: usize,
    pub mode_count: usize,
    pub unimodal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipTestOptions {
    pub bootstrap: usize,
    pub seed: u64,
    pub significance: f64,
}

impl Default for DipTestOptions {
    fn default() -> Self {
        Self { bootstrap: DEFAULT_BOOTSTRAP, seed: 42, significance: DEFAULT_SIGNIFICANCE }
    }
}

/// Dip statistic of a sorted sample. The result lies in `[1/(2n), 1/4]`.
pub fn dip_statistic(sample: &[f64]) -> Result<f64> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(Error::DomainError("sample values must be finite"));
    }
    if sample.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::UnsortedSample);
    }
    Ok(dip_sorted(sample))
}

/// Core iteration. Works with `2n * dip` internally and 1-based indices.
fn dip_sorted(sample: &[f64]) -> f64 {
    let n = sample.len();
    let mut x = Vec::with_capacity(n + 1);
    x.push(0.0);
    x.extend_from_slice(sample);

    let mut dip = 1.0;
    let (mut low, mut high) = (1usize, n);
    if x[n] == x[1] {
        return dip / (2 * n) as f64;
    }

    // mn: predecessors on the convex minorant
    let mut mn = vec![0usize; n + 1];
    mn[1] = 1;
    for j in 2..=n {
        mn[j] = j - 1;
        loop {
            let mnj = mn[j];
            let mnmnj = mn[mnj];
            if mnj == 1
                || (x[j] - x[mnj]) * ((mnj - mnmnj) as f64) < (x[mnj] - x[mnmnj]) * ((j - mnj) as f64)
            {
                break;
            }
            mn[j] = mnmnj;
        }
    }

    // mj: successors on the concave majorant
    let mut mj = vec![0usize; n + 1];
    mj[n] = n;
    for k in (1..n).rev() {
        mj[k] = k + 1;
        loop {
            let mjk = mj[k];
            let mjmjk = mj[mjk];
            if mjk == n
                || (x[k] - x[mjk]) * (mjk as f64 - mjmjk as f64)
                    < (x[mjk] - x[mjmjk]) * (k as f64 - mjk as f64)
            {
                break;
            }
            mj[k] = mjmjk;
        }
    }

    let mut gcm = vec![0usize; n + 2];
    let mut lcm = vec![0usize; n + 2];
    loop {
        // change points of the minorant from high down to low
        gcm[1] = high;
        let mut i = 1;
        while gcm[i] > low {
            gcm[i + 1] = mn[gcm[i]];
            i += 1;
        }
        let l_gcm = i;
        let mut ig = l_gcm;
        let mut ix = ig - 1;

        // change points of the majorant from low up to high
        lcm[1] = low;
        let mut i = 1;
        while lcm[i] < high {
            lcm[i + 1] = mj[lcm[i]];
            i += 1;
        }
        let l_lcm = i;
        let mut ih = l_lcm;
        let mut iv = 2;

        let mut d = 0.0;
        if l_gcm != 2 || l_lcm != 2 {
            loop {
                let gcmix = gcm[ix];
                let lcmiv = lcm[iv];
                if gcmix > lcmiv {
                    let gcmi1 = gcm[ix + 1];
                    let dx = (lcmiv as f64 - gcmi1 as f64 + 1.0)
                        - (x[lcmiv] - x[gcmi1]) * (gcmix - gcmi1) as f64 / (x[gcmix] - x[gcmi1]);
                    iv += 1;
                    if dx >= d {
                        d = dx;
                        ig = ix + 1;
                        ih = iv - 1;
                    }
                } else {
                    let lcmiv1 = lcm[iv - 1];
                    let dx = (x[gcmix] - x[lcmiv1]) * (lcmiv - lcmiv1) as f64 / (x[lcmiv] - x[lcmiv1])
                        - (gcmix as f64 - lcmiv1 as f64 - 1.0);
                    ix -= 1;
                    if dx >= d {
                        d = dx;
                        ig = ix + 1;
                        ih = iv;
                    }
                }
                if ix < 1 {
                    ix = 1;
                }
                if iv > l_lcm {
                    iv = l_lcm;
                }
                if gcm[ix] == lcm[iv] {
                    break;
                }
            }
        } else {
            d = 1.0;
        }

        if d < dip {
            break;
        }

        // dips of the minorant and majorant over the current modal interval
        let mut dip_l: f64 = 0.0;
        for j in ig..l_gcm {
            let (jb, je) = (gcm[j + 1], gcm[j]);
            let mut max_t: f64 = 1.0;
            if je - jb > 1 && x[je] != x[jb] {
                let slope = (je - jb) as f64 / (x[je] - x[jb]);
                for jj in jb..=je {
                    let t = (jj - jb + 1) as f64 - (x[jj] - x[jb]) * slope;
                    max_t = max_t.max(t);
                }
            }
            dip_l = dip_l.max(max_t);
        }
        let mut dip_u: f64 = 0.0;
        for j in ih..l_lcm {
            let (jb, je) = (lcm[j], lcm[j + 1]);
            let mut max_t: f64 = 1.0;
            if je - jb > 1 && x[je] != x[jb] {
                let slope = (je - jb) as f64 / (x[je] - x[jb]);
                for jj in jb..=je {
                    let t = (x[jj] - x[jb]) * slope - (jj as f64 - jb as f64 - 1.0);
                    max_t = max_t.max(t);
                }
            }
            dip_u = dip_u.max(max_t);
        }
        dip = dip.max(dip_l.max(dip_u));

        // no movement of the modal interval means the iteration is done
        if low == gcm[ig] && high == lcm[ih] {
            break;
        }
        low = gcm[ig];
        high = lcm[ih];
    }
    dip / (2 * n) as f64
}

/// Recovers integer vote counts from a histogram with a rater count.
pub fn vote_counts(p: &RatingDistribution) -> Result<[u64; NUM_BINS]> {
    let n = p.n_raters().ok_or(Error::MissingRaterCount)?;
    Ok(p.probs().map(|m| libm::round(m * n as f64) as u64))
}

/// Places vote `j` of `m` in bin `s` at `(s - 1)/10 + (j - 0.5)/(10 m)`.
/// The result is sorted.
pub fn expand_votes(counts: &[u64; NUM_BINS]) -> Vec<f64> {
    let width = 1.0 / NUM_BINS as f64;
    let mut out = Vec::with_capacity(counts.iter().sum::<u64>() as usize);
    for (bin, &m) in counts.iter().enumerate() {
        let left = bin as f64 * width;
        for j in 0..m {
            out.push(left + (j as f64 + 0.5) / m as f64 * width);
        }
    }
    out
}

/// Dip of the `index`-th bootstrap draw: `n` uniform(0, 1) points from
/// ChaCha stream `index` of `seed`.
pub fn bootstrap_dip(n: usize, seed: u64, index: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut sample: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    sample.sort_unstable_by(f64::total_cmp);
    dip_sorted(&sample)
}

/// Null distribution of the dip for sample size `n`, in draw order.
pub fn null_dips(n: usize, bootstrap: usize, seed: u64) -> Vec<f64> {
    (0..bootstrap as u64).map(|i| bootstrap_dip(n, seed, i)).collect()
}

/// Fraction of null draws at least as large as `dip`.
pub fn p_value(dip: f64, null: &[f64]) -> f64 {
    if null.is_empty() {
        return 1.0;
    }
    null.iter().filter(|d| **d >= dip).count() as f64 / null.len() as f64
}

/// Dip test of a histogram against a precomputed null distribution (which
/// must have been drawn for the histogram's vote count).
pub fn dip_test_with_null(p: &RatingDistribution, null: &[f64], significance: f64) -> Result<ModalityResult> {
    let counts = vote_counts(p)?;
    let sample = expand_votes(&counts);
    let dip = dip_statistic(&sample)?;
    let p_value = p_value(dip, null);
    Ok(ModalityResult {
        dip,
        p_value,
        n: sample.len(),
        mode_count: count_modes(p),
        unimodal: p_value >= significance,
    })
}

/// Dip test at the default 0.05 significance level.
pub fn dip_test(p: &RatingDistribution, boot: usize, seed: u64) -> Result<ModalityResult> {
    dip_test_with(p, &DipTestOptions { bootstrap: boot, seed, ..DipTestOptions::default() })
}

pub fn dip_test_with(p: &RatingDistribution, opts: &DipTestOptions) -> Result<ModalityResult> {
    let n = vote_counts(p)?.iter().sum::<u64>() as usize;
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    let null = null_dips(n, opts.bootstrap, opts.seed);
    dip_test_with_null(p, &null, opts.significance)
}

/// Number of peaks in the histogram after merging runs of equal bins into
/// plateaus; a plateau higher than both neighbouring plateaus is a peak.
pub fn count_modes(p: &RatingDistribution) -> usize {
    let mut plateaus: Vec<f64> = Vec::with_capacity(NUM_BINS);
    for &m in p.probs() {
        if plateaus.last() != Some(&m) {
            plateaus.push(m);
        }
    }
    let peaks = (0..plateaus.len())
        .filter(|&i| {
            let left = i == 0 || plateaus[i - 1] < plateaus[i];
            let right = i + 1 == plateaus.len() || plateaus[i + 1] < plateaus[i];
            left && right
        })
        .count();
    peaks.max(1)
}
