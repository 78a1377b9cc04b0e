use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};

/// Which ion is read out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    /// Memory ion, by electron shelving from the upper hyperfine manifold.
    Memory,
    /// Coolant ion, by the presence or absence of fluorescence.
    Coolant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionModel {
    /// Probability a memory ion in the shelved-from state reads dark.
    pub p_shelve_down: f64,
    /// Probability a memory ion in the other state reads dark anyway.
    pub p_shelve_up: f64,
    pub shots_per_point: u64,
    /// Fraction of the memory ion prepared in the clock state.
    pub prep_clock_fraction: f64,
    /// Coolant readout: probability of reporting "excited" for an excited
    /// and for an unexcited ion.
    pub coolant_true_positive: f64,
    pub coolant_false_positive: f64,
    /// Replace sampling by the expected count.
    pub noiseless: bool,
}

impl Default for DetectionModel {
    fn default() -> Self {
        DetectionModel {
            p_shelve_down: 0.90,
            p_shelve_up: 0.002,
            shots_per_point: 500,
            prep_clock_fraction: 0.15,
            coolant_true_positive: 1.0,
            coolant_false_positive: 0.0,
            noiseless: false,
        }
    }
}

impl DetectionModel {
    /// Perfect readout and preparation.
    pub fn ideal(shots_per_point: u64) -> Self {
        DetectionModel {
            p_shelve_down: 1.0,
            p_shelve_up: 0.0,
            shots_per_point,
            prep_clock_fraction: 1.0,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("p_shelve_down", self.p_shelve_down),
            ("p_shelve_up", self.p_shelve_up),
            ("prep_clock_fraction", self.prep_clock_fraction),
            ("coolant_true_positive", self.coolant_true_positive),
            ("coolant_false_positive", self.coolant_false_positive),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::domain(format!("{name} = {p} is not a probability")));
            }
        }
        if self.shots_per_point == 0 {
            return Err(Error::domain("shots_per_point must be at least 1"));
        }
        Ok(())
    }

    /// Probability of a recorded success given the true state probability.
    pub fn effective_probability(&self, p_true: f64, channel: Channel) -> f64 {
        let p = p_true.clamp(0.0, 1.0);
        let (hit, false_hit) = match channel {
            Channel::Memory => (self.p_shelve_down, self.p_shelve_up),
            Channel::Coolant => (self.coolant_true_positive, self.coolant_false_positive),
        };
        p * hit + (1.0 - p) * false_hit
    }
}

/// Success count for one scan point. The stream index keeps points
/// independent while sharing one seed.
pub fn sample_point(p_true: f64, det: &DetectionModel, channel: Channel, seed: u64, stream: u64) -> Result<u64> {
    if !(0.0..=1.0).contains(&p_true) {
        return Err(Error::domain(format!("p_true = {p_true} is not a probability")));
    }
    let p = det.effective_probability(p_true, channel);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let dist = Binomial::new(det.shots_per_point, p).map_err(|e| Error::domain(e.to_string()))?;
    Ok(dist.sample(&mut rng))
}
