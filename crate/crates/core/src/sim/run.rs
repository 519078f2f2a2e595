//! Monte-Carlo driver. Each trial draws a fresh source block with its own
//! seed, so results do not depend on the number of threads.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::code::{build_cascade_code, mix_all, CascadeCode, CodeSizes, SchemeRates};
use super::nodes::{decode_node2, encode_node0, relay_node1};
use super::typical::TypicalityParams;
use crate::discrete::{AuxiliarySystem, SourceSpec};
use crate::error::{Error, Result};

/// Error events, in the order they are counted.
pub const EVENT_NAMES: [&str; 6] = ["E0", "E1", "E2", "E3", "E4", "E5"];

/// Outcome of one block.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    /// `events[k]` is true when event `Ek` occurred.
    pub events: [bool; 6],
    pub d1: f64,
    pub d2: f64,
}

impl TrialOutcome {
    pub fn flagged(&self) -> bool {
        self.events.iter().any(|&e| e)
    }
}

/// Sample mean with a normal-approximation 95% half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub half_width: f64,
}

impl Estimate {
    fn of(values: impl Iterator<Item = f64> + Clone) -> Self {
        let t = values.clone().count();
        if t == 0 {
            return Estimate {
                mean: f64::NAN,
                half_width: f64::NAN,
            };
        }
        let mean = values.clone().sum::<f64>() / t as f64;
        if t == 1 {
            return Estimate { mean, half_width: f64::INFINITY };
        }
        let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (t - 1) as f64;
        Estimate {
            mean,
            half_width: 1.96 * (var / t as f64).sqrt(),
        }
    }

    fn rate(count: usize, t: usize) -> Self {
        let p = count as f64 / t as f64;
        Estimate {
            mean: p,
            half_width: 1.96 * (p * (1.0 - p) / t as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimResult {
    pub n: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub trials: usize,
    pub rates: SchemeRates,
    pub sizes: CodeSizes,
    pub event_counts: [usize; 6],
    pub event_rates: [Estimate; 6],
    /// Trials with at least one event.
    pub flagged: usize,
    pub d1: Estimate,
    pub d2: Estimate,
    /// Distortions over the trials without any event.
    pub d1_clean: Estimate,
    pub d2_clean: Estimate,
}

impl SimResult {
    /// Plain-text summary, one quantity per line.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "n = {}, epsilon = {}, delta = {}, trials = {}\n",
            self.n, self.epsilon, self.delta, self.trials
        );
        s += &format!(
            "rates: R_l = {:.4}, R_10 = {:.4}, R_11 = {:.4}, R_2 = {:.4}\n",
            self.rates.r_l, self.rates.r_10, self.rates.r_11, self.rates.r_2
        );
        s += &format!(
            "codebook bits: l = {}, b10 = {}, m11 = {}, b2 = {}\n",
            self.sizes.l, self.sizes.b10, self.sizes.m11, self.sizes.b2
        );
        for (k, name) in EVENT_NAMES.iter().enumerate() {
            s += &format!(
                "{name}: {} ({:.4} +- {:.4})\n",
                self.event_counts[k], self.event_rates[k].mean, self.event_rates[k].half_width
            );
        }
        s += &format!("any event: {}\n", self.flagged);
        s += &format!("D1 = {:.4} +- {:.4}, D2 = {:.4} +- {:.4}\n", self.d1.mean, self.d1.half_width, self.d2.mean, self.d2.half_width);
        s += &format!(
            "without events: D1 = {:.4} +- {:.4}, D2 = {:.4} +- {:.4}\n",
            self.d1_clean.mean, self.d1_clean.half_width, self.d2_clean.mean, self.d2_clean.half_width
        );
        s
    }
}

/// Run one block through the three nodes.
pub fn run_trial(code: &CascadeCode, src: &SourceSpec, sampler: &WeightedIndex<f64>, seed: u64, t: u64) -> TrialOutcome {
    let n = code.n();
    let mut rng = ChaCha8Rng::seed_from_u64(mix_all(seed, &[3, t]));
    let (ny, nz) = (src.y_size(), src.z_size());
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    for _ in 0..n {
        let k = sampler.sample(&mut rng);
        x.push((k / (ny * nz)) as u8);
        y.push((k / nz % ny) as u8);
        z.push((k % nz) as u8);
    }

    let e0 = !code.typ_xy.contains(&[&x, &y]);
    let enc = encode_node0(code, &x, &y, &mut rng);
    let e2 = !code.typ_uxyz.contains(&[code.codeword(enc.l), &x, &y, &z]);
    let relay = relay_node1(code, enc.m10, enc.m11, &y);
    let e4 = !(relay.unique && relay.l_hat == enc.l);
    let dec = decode_node2(code, relay.m2, &z);
    let e5 = !(dec.unique && dec.l_tilde == enc.l);

    let avg = |rec: &[u8], d: &crate::discrete::DistortionTable| {
        x.iter().zip(rec).map(|(&a, &b)| d.get(a as usize, b as usize)).sum::<f64>() / n as f64
    };
    TrialOutcome {
        events: [e0, enc.e1, e2, enc.e3, e4, e5],
        d1: avg(&relay.xhat1, src.d1()),
        d2: avg(&dec.xhat2, src.d2()),
    }
}

/// Build a code and push `trials` independent blocks through it.
pub fn run_simulation(
    src: &SourceSpec,
    aux: &AuxiliarySystem,
    tp: TypicalityParams,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<SimResult> {
    if trials == 0 {
        return Err(Error::invalid("at least one trial is needed"));
    }
    let code = build_cascade_code(src, aux, tp, delta, seed)?;
    let sampler = WeightedIndex::new(src.pmf().probs()).map_err(|e| Error::NumericDomain(e.to_string()))?;
    let outcomes: Vec<TrialOutcome> = (0..trials as u64)
        .into_par_iter()
        .map(|t| run_trial(&code, src, &sampler, seed, t))
        .collect();

    let mut event_counts = [0usize; 6];
    for o in &outcomes {
        for k in 0..6 {
            event_counts[k] += o.events[k] as usize;
        }
    }
    let clean = outcomes.iter().filter(|o| !o.flagged());
    Ok(SimResult {
        n: tp.n,
        epsilon: tp.epsilon,
        delta,
        trials,
        rates: code.rates(),
        sizes: code.sizes(),
        event_counts,
        event_rates: event_counts.map(|c| Estimate::rate(c, trials)),
        flagged: outcomes.iter().filter(|o| o.flagged()).count(),
        d1: Estimate::of(outcomes.iter().map(|o| o.d1)),
        d2: Estimate::of(outcomes.iter().map(|o| o.d2)),
        d1_clean: Estimate::of(clean.clone().map(|o| o.d1)),
        d2_clean: Estimate::of(clean.map(|o| o.d2)),
    })
}
