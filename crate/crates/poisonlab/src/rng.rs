//! Seeded RNG: xorshift64* state initialized through splitmix64, uniform
//! [0,1) doubles from the top 53 bits, normals via Box-Muller. Implemented
//! in-repo so streams are identical across platforms and languages.

/// Deterministic 64-bit generator. Identical seed, identical stream.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
    cached_normal: Option<f64>,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        // splitmix64 step so that small seeds do not produce correlated
        // early output
        let mut z = seed.wrapping_add(0x9e3779b97f4a7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^= z >> 31;
        Self { state: if z == 0 { 0x853c49e6748fea9b } else { z }, cached_normal: None }
    }

    /// Independent stream derived from this seed and a stream index.
    pub fn substream(seed: u64, stream: u64) -> Self {
        Self::new(seed.wrapping_mul(0x2545f4914f6cdd1d).wrapping_add(stream))
    }

    pub fn next_u64(&mut self) -> u64 {
        // xorshift64*
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545f4914f6cdd1d)
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.cached_normal.take() {
            return z;
        }
        // u1 in (0,1] so the log is finite
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.cached_normal = Some(r * theta.sin());
        r * theta.cos()
    }
}
