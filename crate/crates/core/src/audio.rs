use crate::error::{Error, Result};

/// Multichannel PCM signal in double precision.
///
/// Channels are stored planar and always have equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    channels: Vec<Vec<f64>>,
    sample_rate: u32,
}

impl AudioClip {
    pub fn new(channels: Vec<Vec<f64>>, sample_rate: u32) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::InvalidInput(
                "audio clip needs at least one channel".into(),
            ));
        }
        if sample_rate == 0 {
            return Err(Error::InvalidInput("sample rate must be positive".into()));
        }
        let len = channels[0].len();
        if let Some((i, ch)) = channels.iter().enumerate().find(|(_, c)| c.len() != len) {
            return Err(Error::InvalidInput(format!(
                "channel {i} has {} samples, channel 0 has {len}",
                ch.len()
            )));
        }
        Ok(Self {
            channels,
            sample_rate,
        })
    }

    pub fn mono(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        Self::new(vec![samples], sample_rate)
    }

    pub fn silence(num_channels: usize, len: usize, sample_rate: u32) -> Result<Self> {
        Self::new(vec![vec![0.0; len]; num_channels.max(1)], sample_rate)
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    /// Number of samples per channel.
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn duration_secs(&self) -> f64 {
        self.len() as f64 / self.sample_rate as f64
    }

    pub fn channel(&self, index: usize) -> &[f64] {
        &self.channels[index]
    }

    pub fn channels(&self) -> &[Vec<f64>] {
        &self.channels
    }

    pub fn into_channels(self) -> Vec<Vec<f64>> {
        self.channels
    }

    /// Samples of all channels, channel after channel.
    pub fn iter_concat(&self) -> impl Iterator<Item = f64> + '_ {
        self.channels.iter().flat_map(|c| c.iter().copied())
    }

    pub fn same_shape(&self, other: &AudioClip) -> bool {
        self.len() == other.len()
            && self.num_channels() == other.num_channels()
            && self.sample_rate == other.sample_rate
    }

    /// Sum of squares over every channel and sample.
    pub fn energy(&self) -> f64 {
        self.iter_concat().map(|x| x * x).sum()
    }

    pub fn rms(&self) -> f64 {
        let n = self.len() * self.num_channels();
        if n == 0 {
            0.0
        } else {
            (self.energy() / n as f64).sqrt()
        }
    }

    pub fn max_abs_diff(&self, other: &AudioClip) -> f64 {
        self.channels
            .iter()
            .zip(&other.channels)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, gain: f64) -> AudioClip {
        self.map(|x| x * gain)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> AudioClip {
        AudioClip {
            channels: self
                .channels
                .iter()
                .map(|c| c.iter().map(|&x| f(x)).collect())
                .collect(),
            sample_rate: self.sample_rate,
        }
    }

    /// Sample-wise sum. Shapes must match.
    pub fn try_add(&self, other: &AudioClip) -> Result<AudioClip> {
        if !self.same_shape(other) {
            return Err(Error::InvalidInput(format!(
                "cannot add clips of shape {}x{}@{} and {}x{}@{}",
                self.num_channels(),
                self.len(),
                self.sample_rate,
                other.num_channels(),
                other.len(),
                other.sample_rate
            )));
        }
        Ok(AudioClip {
            channels: self
                .channels
                .iter()
                .zip(&other.channels)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
            sample_rate: self.sample_rate,
        })
    }

    /// Samples `start..end` of every channel.
    pub fn slice(&self, start: usize, end: usize) -> AudioClip {
        AudioClip {
            channels: self
                .channels
                .iter()
                .map(|c| c[start..end].to_vec())
                .collect(),
            sample_rate: self.sample_rate,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_channels() {
        let err = AudioClip::new(vec![vec![0.0; 4], vec![0.0; 3]], 44_100).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn rejects_zero_rate_and_no_channels() {
        assert!(AudioClip::new(vec![vec![0.0]], 0).is_err());
        assert!(AudioClip::new(vec![], 8_000).is_err());
    }

    #[test]
    fn rms_over_all_channels() {
        let clip = AudioClip::new(vec![vec![1.0, -1.0], vec![0.0, 0.0]], 10).unwrap();
        assert!((clip.rms() - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(clip.energy(), 2.0);
    }
}
