//! Truncated Fock vectors stored as full tensors per particle number.

use std::ops::{Add, Mul, Sub};

use crate::fockspace::tensor::tensor_len;
use crate::{Error, Result, C64};

/// Magic bytes opening a binary state dump.
pub const ZFQF_MAGIC: [u8; 4] = *b"ZFQF";

/// Version of the binary state dump format.
pub const ZFQF_VERSION: u16 = 1;

/// Length of the binary dump header in bytes.
pub const ZFQF_HEADER_LEN: usize = 16;

/// A vector in the truncated Fock space: one rank-n tensor per particle
/// number n = 0, …, N_max.
///
/// The inner product weights sector n with Δθⁿ (one quadrature weight per
/// rapidity index).
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    n_points: usize,
    dtheta: f64,
    sectors: Vec<Vec<C64>>,
}

impl FockState {
    /// The zero vector.
    pub fn zero(n_points: usize, dtheta: f64, n_max: usize) -> Self {
        let sectors = (0..=n_max).map(|n| vec![C64::new(0.0, 0.0); tensor_len(n_points, n)]).collect();
        Self { n_points, dtheta, sectors }
    }

    /// The vacuum Ω.
    pub fn vacuum(n_points: usize, dtheta: f64, n_max: usize) -> Self {
        let mut s = Self::zero(n_points, dtheta, n_max);
        s.sectors[0][0] = C64::new(1.0, 0.0);
        s
    }

    /// Truncation N_max.
    pub fn n_max(&self) -> usize {
        self.sectors.len() - 1
    }

    /// Number of grid nodes.
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Quadrature weight per rapidity index.
    pub fn dtheta(&self) -> f64 {
        self.dtheta
    }

    /// The rank-n tensor of sector n.
    pub fn sector(&self, n: usize) -> &[C64] {
        &self.sectors[n]
    }

    /// Mutable access to sector n.
    pub fn sector_mut(&mut self, n: usize) -> &mut Vec<C64> {
        &mut self.sectors[n]
    }

    /// Quadrature inner product ⟨self, other⟩, antilinear in `self`.
    pub fn inner(&self, other: &FockState) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        let mut w = 1.0;
        for (a, b) in self.sectors.iter().zip(&other.sectors) {
            let s: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
            acc += s * w;
            w *= self.dtheta;
        }
        acc
    }

    /// Quadrature norm.
    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    /// Norm of a single sector.
    pub fn sector_norm(&self, n: usize) -> f64 {
        let s: f64 = self.sectors[n].iter().map(|x| x.norm_sqr()).sum();
        (s * self.dtheta.powi(n as i32)).sqrt()
    }

    /// Keeps only sectors up to `n` (others set to zero).
    pub fn truncated_to(&self, n: usize) -> FockState {
        let mut out = self.clone();
        for k in n + 1..out.sectors.len() {
            out.sectors[k].iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
        }
        out
    }

    /// Largest absolute entry difference, for exact-equality style checks.
    pub fn max_abs_diff(&self, other: &FockState) -> f64 {
        self.sectors
            .iter()
            .zip(&other.sectors)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }

    /// Applies `f` entrywise to every sector with the sector index.
    pub fn map_sectors(&self, mut f: impl FnMut(usize, &[C64]) -> Vec<C64>) -> FockState {
        let sectors = self.sectors.iter().enumerate().map(|(n, t)| f(n, t)).collect();
        FockState { n_points: self.n_points, dtheta: self.dtheta, sectors }
    }

    /// Builds a state with the same shape from explicit sectors.
    pub fn with_sectors(&self, sectors: Vec<Vec<C64>>) -> FockState {
        assert_eq!(sectors.len(), self.sectors.len());
        FockState { n_points: self.n_points, dtheta: self.dtheta, sectors }
    }

    /// Serializes the state as a binary dump: a 16-byte header (magic
    /// "ZFQF", version, n_points and N_max as little-endian u16, six zero
    /// bytes) followed by every sector in order as little-endian (re, im)
    /// f64 pairs.
    pub fn to_zfqf_bytes(&self) -> Result<Vec<u8>> {
        let narrow = |v: usize, what: &str| {
            u16::try_from(v).map_err(|_| Error::Shape(format!("{what} = {v} does not fit the dump header")))
        };
        let n_points = narrow(self.n_points, "n_points")?;
        let n_max = narrow(self.n_max(), "N_max")?;
        let len: usize = self.sectors.iter().map(Vec::len).sum();
        let mut out = Vec::with_capacity(ZFQF_HEADER_LEN + 16 * len);
        out.extend_from_slice(&ZFQF_MAGIC);
        out.extend_from_slice(&ZFQF_VERSION.to_le_bytes());
        out.extend_from_slice(&n_points.to_le_bytes());
        out.extend_from_slice(&n_max.to_le_bytes());
        out.extend_from_slice(&[0u8; 6]);
        for z in self.sectors.iter().flatten() {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
        Ok(out)
    }

    /// Reads a binary dump written by [`FockState::to_zfqf_bytes`]. The
    /// quadrature weight is not part of the format and must be supplied.
    pub fn from_zfqf_bytes(bytes: &[u8], dtheta: f64) -> Result<Self> {
        if bytes.len() < ZFQF_HEADER_LEN || bytes[..4] != ZFQF_MAGIC {
            return Err(Error::Shape("not a ZFQF state dump".into()));
        }
        let word = |i: usize| u16::from_le_bytes([bytes[i], bytes[i + 1]]);
        if word(4) != ZFQF_VERSION {
            return Err(Error::Shape(format!("unsupported ZFQF version {}", word(4))));
        }
        let (n_points, n_max) = (word(6) as usize, word(8) as usize);
        let mut state = Self::zero(n_points, dtheta, n_max);
        let len: usize = state.sectors.iter().map(Vec::len).sum();
        let body = &bytes[ZFQF_HEADER_LEN..];
        if body.len() != 16 * len {
            return Err(Error::Shape(format!(
                "ZFQF body has {} bytes, expected {} for n_points = {n_points}, N_max = {n_max}",
                body.len(),
                16 * len
            )));
        }
        let mut chunks = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")));
        for z in state.sectors.iter_mut().flatten() {
            let re = chunks.next().expect("length checked");
            let im = chunks.next().expect("length checked");
            *z = C64::new(re, im);
        }
        Ok(state)
    }

    /// Adds `c · other` in place.
    pub fn axpy(&mut self, c: C64, other: &FockState) {
        for (a, b) in self.sectors.iter_mut().zip(&other.sectors) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += c * y;
            }
        }
    }
}

impl Add for &FockState {
    type Output = FockState;
    fn add(self, rhs: &FockState) -> FockState {
        let mut out = self.clone();
        out.axpy(C64::new(1.0, 0.0), rhs);
        out
    }
}

impl Sub for &FockState {
    type Output = FockState;
    fn sub(self, rhs: &FockState) -> FockState {
        let mut out = self.clone();
        out.axpy(C64::new(-1.0, 0.0), rhs);
        out
    }
}

impl Mul<C64> for &FockState {
    type Output = FockState;
    fn mul(self, c: C64) -> FockState {
        self.map_sectors(|_, t| t.iter().map(|x| x * c).collect())
    }
}

impl Mul<f64> for &FockState {
    type Output = FockState;
    fn mul(self, c: f64) -> FockState {
        self * C64::new(c, 0.0)
    }
}
