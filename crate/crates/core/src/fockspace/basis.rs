//! Orthonormal basis of the truncated S-symmetric Fock space.
//!
//! For every sorted multi-index m the vector u_m = P e_m / ‖P e_m‖ is
//! computed sparsely: P e_m is supported on the rearrangements of m. Vectors
//! with P e_m = 0 (repeated rapidities when S(0) = −1) are skipped. Distinct
//! sorted multi-indices have disjoint supports, so the u_m are orthonormal,
//! and they span the range of P.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DVector;

use crate::fockspace::tensor::{factorial, flat_index, inverse, inversions, permutations, sorted_multi_indices};
use crate::fockspace::{FockSpace, FockState};
use crate::{Error, Result, C64};

/// One basis vector u_m, stored as its nonzero tensor entries.
#[derive(Clone, Debug)]
pub struct BasisVector {
    /// Particle number.
    pub sector: usize,
    /// The sorted multi-index m.
    pub sorted: Vec<usize>,
    /// (flat offset within the sector tensor, value) pairs.
    pub entries: Vec<(usize, C64)>,
}

/// Orthonormal basis of the S-symmetric sectors 0..=max_sector.
#[derive(Clone, Debug)]
pub struct FockBasis {
    space: FockSpace,
    max_sector: usize,
    vectors: Vec<BasisVector>,
    sector_start: Vec<usize>,
    lookup: HashMap<Vec<usize>, usize>,
}

impl FockBasis {
    /// Basis of all sectors up to the space's N_max.
    pub fn new(space: &FockSpace) -> Self {
        Self::up_to(space, space.n_max()).expect("N_max is a valid sector bound")
    }

    /// Basis of the sectors 0..=max_sector only (used for restricted domains).
    pub fn up_to(space: &FockSpace, max_sector: usize) -> Result<Self> {
        if max_sector > space.n_max() {
            return Err(Error::Truncation(format!("sector {max_sector} exceeds N_max = {}", space.n_max())));
        }
        let n = space.n_points();
        let dt = space.dtheta();
        let mut vectors = Vec::new();
        let mut sector_start = Vec::new();
        let mut lookup = HashMap::new();
        for rank in 0..=max_sector {
            sector_start.push(vectors.len());
            let perms = permutations(rank);
            let invs: Vec<Vec<(usize, usize)>> = perms.iter().map(|p| inversions(p)).collect();
            for m in sorted_multi_indices(n, rank) {
                // (P e_m)(θ) = (1/n!) Σ_σ S^σ(θ) [θ^σ = m]; θ^σ = m means θ = m∘σ⁻¹.
                let mut acc: BTreeMap<usize, C64> = BTreeMap::new();
                for (sigma, inv) in perms.iter().zip(&invs) {
                    let sinv = inverse(sigma);
                    let theta: Vec<usize> = (0..rank).map(|j| m[sinv[j]]).collect();
                    let mut f = C64::new(1.0, 0.0);
                    for &(i, j) in inv {
                        f *= space.s_nodes(theta[sigma[i]], theta[sigma[j]]);
                    }
                    *acc.entry(flat_index(&theta, n)).or_insert(C64::new(0.0, 0.0)) += f / factorial(rank);
                }
                let norm_sqr: f64 = acc.values().map(|v| v.norm_sqr()).sum::<f64>() * dt.powi(rank as i32);
                if norm_sqr.sqrt() < 1e-10 * dt.powf(rank as f64 / 2.0) {
                    continue;
                }
                let scale = 1.0 / norm_sqr.sqrt();
                let entries = acc.into_iter().filter(|(_, v)| v.norm() > 0.0).map(|(k, v)| (k, v * scale)).collect();
                lookup.insert(m.clone(), vectors.len());
                vectors.push(BasisVector { sector: rank, sorted: m, entries });
            }
        }
        sector_start.push(vectors.len());
        Ok(Self { space: space.clone(), max_sector, vectors, sector_start, lookup })
    }

    /// The underlying space.
    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    /// Highest sector covered.
    pub fn max_sector(&self) -> usize {
        self.max_sector
    }

    /// Number of basis vectors.
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Basis vector number `i`.
    pub fn vector(&self, i: usize) -> &BasisVector {
        &self.vectors[i]
    }

    /// Index range of the basis vectors of sector n.
    pub fn sector_range(&self, n: usize) -> std::ops::Range<usize> {
        self.sector_start[n]..self.sector_start[n + 1]
    }

    /// Number of basis vectors in sectors 0..=n.
    pub fn dim_up_to(&self, n: usize) -> usize {
        self.sector_start[n.min(self.max_sector) + 1]
    }

    /// Index of the basis vector for a multi-index (any order), if present.
    pub fn index_of(&self, multi_index: &[usize]) -> Option<usize> {
        let mut m = multi_index.to_vec();
        m.sort_unstable();
        self.lookup.get(&m).copied()
    }

    /// Basis vector `i` as a full Fock state.
    pub fn state(&self, i: usize) -> FockState {
        let v = &self.vectors[i];
        let mut s = self.space.zero_state();
        let sec = s.sector_mut(v.sector);
        for &(k, c) in &v.entries {
            sec[k] = c;
        }
        s
    }

    /// Coordinates ⟨u_α, Ψ⟩ of a state (exact for S-symmetric Ψ).
    pub fn coords(&self, psi: &FockState) -> DVector<C64> {
        let dt = self.space.dtheta();
        DVector::from_iterator(
            self.dim(),
            self.vectors.iter().map(|v| {
                let sec = psi.sector(v.sector);
                let s: C64 = v.entries.iter().map(|&(k, c)| c.conj() * sec[k]).sum();
                s * dt.powi(v.sector as i32)
            }),
        )
    }

    /// The state Σ_α c_α u_α.
    pub fn state_from_coords(&self, c: &DVector<C64>) -> FockState {
        let mut s = self.space.zero_state();
        for (v, ca) in self.vectors.iter().zip(c.iter()) {
            if ca.norm() == 0.0 {
                continue;
            }
            let sec = s.sector_mut(v.sector);
            for &(k, x) in &v.entries {
                sec[k] += x * ca;
            }
        }
        s
    }

    /// Total two-momentum Σ_j p(θ_{m_j}) of basis vector `i`.
    pub fn total_momentum(&self, i: usize) -> [f64; 2] {
        let g = self.space.grid();
        self.vectors[i].sorted.iter().fold([0.0, 0.0], |acc, &k| {
            let p = g.momentum(k);
            [acc[0] + p[0], acc[1] + p[1]]
        })
    }
}
