//! Seeded oil-spill particle system: emission, advection, buoyancy, diffusion, aging.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geomodel::VectorField3D;
use crate::scalar::Real;
use crate::vec3::Vec3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpillError {
    #[error("invalid spill config: {0}")]
    InvalidConfig(String),
    #[error("truncated particle frame: need {needed} bytes, have {available}")]
    TruncatedFrame { needed: usize, available: usize },
}

fn default_current() -> String {
    "current".to_string()
}

fn default_steps_per_frame() -> u32 {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpillConfig<T> {
    pub source: [T; 3],
    /// Particles per second.
    pub emission_rate: T,
    pub max_particles: usize,
    /// Seconds.
    pub lifetime: T,
    /// Upward drift in m/s.
    pub buoyancy: T,
    /// Random-walk scale in m/sqrt(s).
    pub diffusion: T,
    pub seed: u64,
    pub dt: T,
    /// Name of the vector field used for advection.
    #[serde(default = "default_current")]
    pub current: String,
    /// Simulation steps between two streamed frames.
    #[serde(default = "default_steps_per_frame")]
    pub steps_per_frame: u32,
}

impl<T: Real> SpillConfig<T> {
    pub fn validate(&self) -> Result<(), SpillError> {
        let bad = |m: &str| Err(SpillError::InvalidConfig(m.to_string()));
        let finite = self.source.iter().all(|v| v.is_finite())
            && [self.emission_rate, self.lifetime, self.buoyancy, self.diffusion, self.dt]
                .iter()
                .all(|v| v.is_finite());
        if !finite {
            return bad("all numeric parameters must be finite");
        }
        if self.max_particles < 1 {
            return bad("max_particles must be at least 1");
        }
        if self.lifetime <= T::zero() {
            return bad("lifetime must be positive");
        }
        if self.dt <= T::zero() {
            return bad("dt must be positive");
        }
        if self.emission_rate < T::zero() {
            return bad("emission_rate must be non-negative");
        }
        if self.buoyancy < T::zero() {
            return bad("buoyancy must be non-negative");
        }
        if self.diffusion < T::zero() {
            return bad("diffusion must be non-negative");
        }
        if self.steps_per_frame < 1 {
            return bad("steps_per_frame must be at least 1");
        }
        Ok(())
    }
}

/// xoshiro256** seeded through splitmix64, with a cached Box-Muller spare.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpillRng {
    s: [u64; 4],
    spare: Option<f64>,
}

impl SpillRng {
    pub fn new(seed: u64) -> Self {
        let mut x = seed;
        let mut split = || {
            x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = x;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            z ^ (z >> 31)
        };
        SpillRng {
            s: [split(), split(), split(), split()],
            spare: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal variate (Box-Muller, both outputs used in turn).
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Particle<T> {
    /// Spawn sequence number; frames list particles in this order.
    pub id: u64,
    pub position: Vec3<T>,
    pub velocity: Vec3<T>,
    pub age: T,
    pub alive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleSystemState<T> {
    pub particles: Vec<Particle<T>>,
    pub rng: SpillRng,
    pub steps: u64,
    pub sim_time: T,
    /// Fractional emission carried between steps.
    pub emission_carry: T,
    pub next_id: u64,
}

impl<T: Real> ParticleSystemState<T> {
    pub fn new(config: &SpillConfig<T>) -> Self {
        ParticleSystemState {
            particles: Vec::new(),
            rng: SpillRng::new(config.seed),
            steps: 0,
            sim_time: T::zero(),
            emission_carry: T::zero(),
            next_id: 0,
        }
    }

    /// Appends a fresh particle at `position`.
    pub fn spawn(&mut self, position: Vec3<T>) {
        self.particles.push(Particle {
            id: self.next_id,
            position,
            velocity: [T::zero(); 3],
            age: T::zero(),
            alive: true,
        });
        self.next_id += 1;
    }

    pub fn live_count(&self) -> usize {
        self.particles.iter().filter(|p| p.alive).count()
    }
}

/// Advances the system by one explicit Euler step of `config.dt`.
pub fn step<T: Real>(state: &mut ParticleSystemState<T>, config: &SpillConfig<T>, current: &VectorField3D<T>) {
    let dt = config.dt;
    let kick = config.diffusion * dt.sqrt();
    for p in state.particles.iter_mut().filter(|p| p.alive) {
        let mut v = current.sample(p.position).unwrap_or([T::zero(); 3]);
        v[2] += config.buoyancy;
        let g = [
            T::lit(state.rng.next_normal()),
            T::lit(state.rng.next_normal()),
            T::lit(state.rng.next_normal()),
        ];
        for a in 0..3 {
            p.position[a] += v[a] * dt + kick * g[a];
        }
        p.velocity = v;
        p.age += dt;
        if p.age >= config.lifetime {
            p.alive = false;
        }
    }
    state.particles.retain(|p| p.alive);

    state.emission_carry += config.emission_rate * dt;
    let whole = state.emission_carry.floor();
    state.emission_carry -= whole;
    let requested = whole.to_usize().unwrap_or(usize::MAX);
    let room = config.max_particles.saturating_sub(state.particles.len());
    for _ in 0..requested.min(room) {
        state.spawn(config.source);
    }

    state.steps += 1;
    state.sim_time = T::lit(state.steps as f64) * dt;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameParticle<T> {
    pub p: [T; 3],
    pub age: T,
}

/// Live particles of one instant, in spawn order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleFrame<T> {
    pub t: T,
    pub particles: Vec<FrameParticle<T>>,
}

pub fn emit_frame<T: Real>(state: &ParticleSystemState<T>) -> ParticleFrame<T> {
    ParticleFrame {
        t: state.sim_time,
        particles: state
            .particles
            .iter()
            .filter(|p| p.alive)
            .map(|p| FrameParticle { p: p.position, age: p.age })
            .collect(),
    }
}

/// Size in bytes of the fixed binary frame header.
pub const FRAME_HEADER_BYTES: usize = 12;

impl<T: Real> ParticleFrame<T> {
    pub fn to_json(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("frame serializes")
    }

    /// Little-endian: u32 index, f32 t, u32 count, then count x (x, y, z, age) as f32.
    pub fn to_binary(&self, index: u32) -> Vec<u8> {
        let mut out = Vec::with_capacity(FRAME_HEADER_BYTES + 16 * self.particles.len());
        out.extend_from_slice(&index.to_le_bytes());
        out.extend_from_slice(&self.t.as_f32().to_le_bytes());
        out.extend_from_slice(&(self.particles.len() as u32).to_le_bytes());
        for fp in &self.particles {
            for v in [fp.p[0], fp.p[1], fp.p[2], fp.age] {
                out.extend_from_slice(&v.as_f32().to_le_bytes());
            }
        }
        out
    }
}

/// Parses one binary frame; returns the index, frame and bytes consumed.
pub fn parse_binary_frame(bytes: &[u8]) -> Result<(u32, ParticleFrame<f32>, usize), SpillError> {
    let need = |needed: usize| {
        if bytes.len() < needed {
            Err(SpillError::TruncatedFrame { needed, available: bytes.len() })
        } else {
            Ok(())
        }
    };
    need(FRAME_HEADER_BYTES)?;
    let word = |o: usize| [bytes[o], bytes[o + 1], bytes[o + 2], bytes[o + 3]];
    let index = u32::from_le_bytes(word(0));
    let t = f32::from_le_bytes(word(4));
    let count = u32::from_le_bytes(word(8)) as usize;
    let total = FRAME_HEADER_BYTES + 16 * count;
    need(total)?;
    let particles = (0..count)
        .map(|n| {
            let o = FRAME_HEADER_BYTES + 16 * n;
            let f = |k: usize| f32::from_le_bytes(word(o + 4 * k));
            FrameParticle { p: [f(0), f(1), f(2)], age: f(3) }
        })
        .collect();
    Ok((index, ParticleFrame { t, particles }, total))
}
