//! Counter-based uniform stream (Philox4x32-10).
//!
//! A stream is identified by a 64-bit seed (the Philox key) and a 64-bit
//! stream id (the upper half of the counter). The variate at position `i`
//! is a pure function of `(seed, stream, i)`, so any variate can be read
//! without generating the ones before it.
//!
//! Draw-order contract for a graph on `n` vertices: positions `0..n` hold
//! the vertex weights `W_1..W_n`, then position `n + pair_index(i, j)`
//! holds `U_ij` for pairs `i < j` in ascending lexicographic order.

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;

/// Ten rounds of Philox4x32 on `counter` under `key`.
pub fn philox4x32_10(counter: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut ctr = counter;
    let mut k = key;
    for round in 0..10 {
        if round > 0 {
            k[0] = k[0].wrapping_add(PHILOX_W0);
            k[1] = k[1].wrapping_add(PHILOX_W1);
        }
        let p0 = u64::from(PHILOX_M0) * u64::from(ctr[0]);
        let p1 = u64::from(PHILOX_M1) * u64::from(ctr[2]);
        let (hi0, lo0) = ((p0 >> 32) as u32, p0 as u32);
        let (hi1, lo1) = ((p1 >> 32) as u32, p1 as u32);
        ctr = [hi1 ^ ctr[1] ^ k[0], lo1, hi0 ^ ctr[3] ^ k[1], lo0];
    }
    ctr
}

/// Deterministic, index-addressable source of uniform variates on `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UniformStream {
    seed: u64,
    stream: u64,
}

impl UniformStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream
    }

    /// Independent child stream. Children of one parent never collide
    /// with each other; the child id is the parent id mixed with `index`.
    pub fn split(&self, index: u64) -> Self {
        let out = philox4x32_10(
            [
                index as u32,
                (index >> 32) as u32,
                self.stream as u32,
                (self.stream >> 32) as u32,
            ],
            [
                PHILOX_W1 ^ self.seed as u32,
                PHILOX_W0 ^ (self.seed >> 32) as u32,
            ],
        );
        let mixed = (u64::from(out[1]) << 32) | u64::from(out[0]);
        Self {
            seed: self.seed,
            stream: mixed,
        }
    }

    /// Raw 64 random bits at `position`.
    pub fn bits_at(&self, position: u64) -> u64 {
        let out = philox4x32_10(
            [
                position as u32,
                (position >> 32) as u32,
                self.stream as u32,
                (self.stream >> 32) as u32,
            ],
            [self.seed as u32, (self.seed >> 32) as u32],
        );
        (u64::from(out[1]) << 32) | u64::from(out[0])
    }

    /// Uniform variate on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform_at(&self, position: u64) -> f64 {
        (self.bits_at(position) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// The weight `W_i` (0-based `i`).
    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        self.uniform_at(i as u64)
    }

    /// The pair variate `U_ij` for 0-based `i < j` in a graph on `n` vertices.
    #[inline]
    pub fn pair_uniform(&self, n: usize, i: usize, j: usize) -> f64 {
        debug_assert!(i < j && j < n);
        self.uniform_at(n as u64 + pair_index(n, i, j))
    }

    /// Sequential reader starting at `position`.
    pub fn reader(&self, position: u64) -> StreamReader {
        StreamReader {
            stream: *self,
            position,
        }
    }
}

/// Lexicographic rank of the pair `(i, j)`, `i < j < n`, among all pairs.
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> u64 {
    let (n, i, j) = (n as u64, i as u64, j as u64);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Sequential cursor over a [`UniformStream`].
#[derive(Debug, Clone)]
pub struct StreamReader {
    stream: UniformStream,
    position: u64,
}

impl StreamReader {
    pub fn position(&self) -> u64 {
        self.position
    }

    pub fn next_u64(&mut self) -> u64 {
        let v = self.stream.bits_at(self.position);
        self.position += 1;
        v
    }

    pub fn next_f64(&mut self) -> f64 {
        let v = self.stream.uniform_at(self.position);
        self.position += 1;
        v
    }

    /// Uniform integer in `0..bound` by rejection on the top bits.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
        loop {
            let v = self.next_u64();
            if v <= zone {
                return v % bound;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;
    use std::vec::Vec;

    // Known-answer vectors from the Random123 distribution (kat_vectors).
    #[test]
    fn philox_known_answers() {
        assert_eq!(
            philox4x32_10([0, 0, 0, 0], [0, 0]),
            [0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8]
        );
        assert_eq!(
            philox4x32_10([u32::MAX; 4], [u32::MAX; 2]),
            [0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd]
        );
        assert_eq!(
            philox4x32_10(
                [0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344],
                [0xa4093822, 0x299f31d0]
            ),
            [0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1]
        );
    }

    #[test]
    fn pair_index_is_lexicographic_rank() {
        let n = 7;
        let mut expected = 0;
        for i in 0..n {
            for j in i + 1..n {
                assert_eq!(pair_index(n, i, j), expected);
                expected += 1;
            }
        }
    }

    #[test]
    fn reader_matches_random_access() {
        let s = UniformStream::with_stream(42, 3);
        let mut r = s.reader(10);
        for p in 10..50 {
            assert_eq!(r.next_f64(), s.uniform_at(p));
        }
    }

    #[test]
    fn uniforms_in_unit_interval_with_plausible_mean() {
        let s = UniformStream::new(7);
        let xs: Vec<f64> = (0..100_000).map(|i| s.uniform_at(i)).collect();
        assert!(xs.iter().all(|&x| (0.0..1.0).contains(&x)));
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        // sd of the mean is 1/sqrt(12 * 1e5) ~ 9.1e-4
        assert!((mean - 0.5).abs() < 4e-3, "mean {mean}");
    }

    #[test]
    fn split_streams_are_distinct() {
        let s = UniformStream::new(1);
        let ids: HashSet<u64> = (0..1000).map(|t| s.split(t).stream_id()).collect();
        assert_eq!(ids.len(), 1000);
        assert_eq!(s.split(5), s.split(5));
        assert_ne!(s.split(5).uniform_at(0), s.split(6).uniform_at(0));
    }

    #[test]
    fn below_stays_in_range() {
        let mut r = UniformStream::new(9).reader(0);
        for _ in 0..1000 {
            assert!(r.below(6) < 6);
        }
    }
}
