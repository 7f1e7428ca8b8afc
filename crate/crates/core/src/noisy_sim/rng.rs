//! Counter-based random numbers: every draw is a pure function of
//! (seed, shot, stream), so results do not depend on how shots are split
//! across threads.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const SHOT_KEY: u64 = 0xD1B5_4A32_D192_ED03;

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn to_unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> CounterRng {
        CounterRng { key: mix64(seed ^ GOLDEN) }
    }

    #[inline]
    pub fn shot(&self, shot: u64) -> ShotRng {
        ShotRng {
            state: mix64(self.key ^ shot.wrapping_mul(SHOT_KEY)),
        }
    }

    pub fn uniform(&self, shot: u64, stream: u64) -> f64 {
        self.shot(shot).uniform(stream)
    }
}

/// Per-shot state; stream `s` is the s-th SplitMix64 output from it.
#[derive(Clone, Copy, Debug)]
pub struct ShotRng {
    state: u64,
}

impl ShotRng {
    #[inline]
    pub fn bits(&self, stream: u64) -> u64 {
        mix64(self.state.wrapping_add(stream.wrapping_add(1).wrapping_mul(GOLDEN)))
    }

    /// Uniform in [0, 1) with 53 random bits.
    #[inline]
    pub fn uniform(&self, stream: u64) -> f64 {
        to_unit(self.bits(stream))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_keyed() {
        let a = CounterRng::new(7);
        assert_eq!(a.uniform(3, 9), CounterRng::new(7).uniform(3, 9));
        assert_ne!(a.uniform(3, 9), a.uniform(4, 9));
        assert_ne!(a.uniform(3, 9), a.uniform(3, 10));
        assert_ne!(a.uniform(3, 9), CounterRng::new(8).uniform(3, 9));
    }

    #[test]
    fn roughly_uniform() {
        let r = CounterRng::new(1);
        let n = 200_000u64;
        let mut bins = [0u64; 10];
        let mut sum = 0.0;
        for i in 0..n {
            let u = r.uniform(i / 16, i % 16);
            assert!((0.0..1.0).contains(&u));
            bins[(u * 10.0) as usize] += 1;
            sum += u;
        }
        assert!((sum / n as f64 - 0.5).abs() < 0.005);
        let expect = n as f64 / 10.0;
        let chi2: f64 = bins.iter().map(|&b| (b as f64 - expect).powi(2) / expect).sum();
        // 9 degrees of freedom, p ≈ 1e-4 cut
        assert!(chi2 < 33.7, "chi2 = {chi2}");
    }
}
