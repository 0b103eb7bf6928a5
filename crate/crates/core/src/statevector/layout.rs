//! Unrotated planar surface code on a `(2d−1) × (2d−1)` grid.
//!
//! Data qubits sit at `(r, c)` with `r + c` even (the edges of a `d × d`
//! patch). Z plaquettes sit at `(odd, even)` and X stars at `(even, odd)`;
//! each acts on its grid neighbours. Logical `Z` runs along row 0 and logical
//! `X` down column 0.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest distance whose statevector (data + reference) fits the memory budget.
pub const MAX_DISTANCE: usize = 4;

#[derive(Clone, Debug, Serialize)]
pub struct CodeLayout {
    pub d: usize,
    /// Grid coordinates of data qubit `j`, in row-major order.
    pub coords: Vec<(usize, usize)>,
    /// Bit masks over data qubits.
    pub x_stars: Vec<u32>,
    pub z_plaquettes: Vec<u32>,
    pub logical_x: u32,
    pub logical_z: u32,
}

impl CodeLayout {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidInput(format!("code distance {d} must be at least 2")));
        }
        if d > MAX_DISTANCE {
            return Err(Error::Capacity(format!(
                "distance {d} needs 2^{} amplitudes; the limit is d = {MAX_DISTANCE}",
                Self::qubit_count(d) + 1
            )));
        }
        let side = 2 * d - 1;
        let mut coords = Vec::new();
        let mut index = vec![vec![None; side]; side];
        for r in 0..side {
            for c in 0..side {
                if (r + c) % 2 == 0 {
                    index[r][c] = Some(coords.len());
                    coords.push((r, c));
                }
            }
        }
        let neighbours = |r: usize, c: usize| -> u32 {
            let mut m = 0u32;
            let cand = [
                (r.wrapping_sub(1), c),
                (r + 1, c),
                (r, c.wrapping_sub(1)),
                (r, c + 1),
            ];
            for (rr, cc) in cand {
                if rr < side && cc < side {
                    if let Some(j) = index[rr][cc] {
                        m |= 1 << j;
                    }
                }
            }
            m
        };
        let mut x_stars = Vec::new();
        let mut z_plaquettes = Vec::new();
        for r in 0..side {
            for c in 0..side {
                match (r % 2, c % 2) {
                    (1, 0) => z_plaquettes.push(neighbours(r, c)),
                    (0, 1) => x_stars.push(neighbours(r, c)),
                    _ => {}
                }
            }
        }
        let logical_z = (0..side)
            .step_by(2)
            .fold(0u32, |m, c| m | 1 << index[0][c].unwrap());
        let logical_x = (0..side)
            .step_by(2)
            .fold(0u32, |m, r| m | 1 << index[r][0].unwrap());
        Ok(Self {
            d,
            coords,
            x_stars,
            z_plaquettes,
            logical_x,
            logical_z,
        })
    }

    /// `d² + (d − 1)²`.
    pub fn qubit_count(d: usize) -> usize {
        d * d + (d - 1) * (d - 1)
    }

    pub fn n_data(&self) -> usize {
        self.coords.len()
    }

    pub fn stabilizer_count(&self) -> usize {
        self.x_stars.len() + self.z_plaquettes.len()
    }
}

/// Whether an X-type and a Z-type Pauli with these supports commute.
pub fn commute(x_support: u32, z_support: u32) -> bool {
    (x_support & z_support).count_ones() % 2 == 0
}
