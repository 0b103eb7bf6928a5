//! Equal-area sphere histograms and the KL divergence of an ensemble of unit
//! vectors against the uniform distribution.
//!
//! The pixelization is the isolatitude ring scheme with `N = 12·4^n` patches
//! (`n_side = 2^n`): a polar cap of `n_side − 1` rings per hemisphere with
//! `4i` patches on ring `i`, and `2 n_side + 1` equatorial rings of
//! `4 n_side` patches each. Every patch has area `4π/N` exactly.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

pub const MAX_ORDER: u32 = 6;
const UNIT_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct SpherePixelization {
    order: u32,
    nside: usize,
    centers: Vec<[f64; 3]>,
}

impl SpherePixelization {
    pub fn new(order: u32) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::InvalidInput(format!(
                "pixelization order {order} exceeds {MAX_ORDER}"
            )));
        }
        let nside = 1usize << order;
        let n = 12 * nside * nside;
        let mut pix = Self {
            order,
            nside,
            centers: Vec::with_capacity(n),
        };
        pix.centers = (0..n).map(|p| pix.center_of(p)).collect();
        Ok(pix)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn len(&self) -> usize {
        12 * self.nside * self.nside
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn centers(&self) -> &[[f64; 3]] {
        &self.centers
    }

    /// Solid angle of each patch.
    pub fn patch_area(&self) -> f64 {
        4.0 * PI / self.len() as f64
    }

    /// Patch containing a unit vector.
    pub fn patch_of(&self, v: [f64; 3]) -> Result<usize> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !((norm - 1.0).abs() <= UNIT_TOL) {
            return Err(Error::InvalidInput(format!("sample norm {norm} is not 1")));
        }
        let z = (v[2] / norm).clamp(-1.0, 1.0);
        let mut phi = v[1].atan2(v[0]);
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        Ok(self.patch_of_angles(z, phi))
    }

    /// `z = cos(colatitude)`, `phi ∈ [0, 2π)`.
    pub fn patch_of_angles(&self, z: f64, phi: f64) -> usize {
        let ns = self.nside as i64;
        let npix = 12 * ns * ns;
        let ncap = 2 * ns * (ns - 1);
        let za = z.abs();
        let tt = (phi / FRAC_PI_2).rem_euclid(4.0);
        let pix = if za <= 2.0 / 3.0 {
            let t1 = ns as f64 * (0.5 + tt);
            let t2 = ns as f64 * z * 0.75;
            let jp = (t1 - t2).floor() as i64;
            let jm = (t1 + t2).floor() as i64;
            let ir = ns + 1 + jp - jm;
            let kshift = 1 - (ir & 1);
            let ip = (jp + jm - ns + kshift + 1) / 2;
            ncap + (ir - 1) * 4 * ns + ip.rem_euclid(4 * ns)
        } else {
            let tp = tt - tt.floor();
            let tmp = ns as f64 * (3.0 * (1.0 - za)).sqrt();
            let jp = (tp * tmp).floor() as i64;
            let jm = ((1.0 - tp) * tmp).floor() as i64;
            let ir = (jp + jm + 1).max(1);
            let ip = ((tt * ir as f64).floor() as i64).rem_euclid(4 * ir);
            if z > 0.0 {
                2 * ir * (ir - 1) + ip
            } else {
                npix - 2 * ir * (ir + 1) + ip
            }
        };
        pix as usize
    }

    fn center_of(&self, p: usize) -> [f64; 3] {
        let ns = self.nside;
        let npix = 12 * ns * ns;
        let ncap = 2 * ns * (ns - 1);
        let fns = ns as f64;
        let (z, phi) = if p < ncap {
            let ring = (1 + isqrt(1 + 2 * p)) / 2;
            let iphi = p - 2 * ring * (ring - 1);
            let rf = ring as f64;
            (1.0 - rf * rf / (3.0 * fns * fns), (iphi as f64 + 0.5) * FRAC_PI_2 / rf)
        } else if p < npix - ncap {
            let ip = p - ncap;
            let ring = ip / (4 * ns) + ns;
            let iphi = ip % (4 * ns);
            let shift = if (ring + ns) % 2 == 1 { 0.0 } else { 0.5 };
            (
                (2.0 * fns - ring as f64) * 2.0 / (3.0 * fns),
                (iphi as f64 + shift) * FRAC_PI_2 / fns,
            )
        } else {
            let ip = npix - p;
            let ring = (1 + isqrt(2 * ip - 1)) / 2;
            let iphi = 4 * ring + 1 - (ip - 2 * ring * (ring - 1));
            let rf = ring as f64;
            (-1.0 + rf * rf / (3.0 * fns * fns), (iphi as f64 - 0.5) * FRAC_PI_2 / rf)
        };
        let s = (1.0 - z * z).max(0.0).sqrt();
        [s * phi.cos(), s * phi.sin(), z]
    }
}

fn isqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnsembleHistogram {
    pub order: u32,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl EnsembleHistogram {
    pub fn new(pix: &SpherePixelization) -> Self {
        Self {
            order: pix.order(),
            counts: vec![0; pix.len()],
            total: 0,
        }
    }

    pub fn from_samples(pix: &SpherePixelization, samples: &[[f64; 3]]) -> Result<Self> {
        let mut h = Self::new(pix);
        for &v in samples {
            h.add(pix, v)?;
        }
        Ok(h)
    }

    pub fn add(&mut self, pix: &SpherePixelization, v: [f64; 3]) -> Result<()> {
        let p = pix.patch_of(v)?;
        self.counts[p] += 1;
        self.total += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &EnsembleHistogram) -> Result<()> {
        if self.order != other.order {
            return Err(Error::InvalidInput("histograms of different order".into()));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KlDivergence {
    pub order: u32,
    pub patches: usize,
    pub samples: u64,
    /// `Σ_i P_i ln(P_i N)`, nats.
    pub d: f64,
    /// `d / ln(N/2)`: 1 for an exactly bimodal ensemble.
    pub d_normalized: f64,
}

pub fn kl_from_histogram(h: &EnsembleHistogram) -> Result<KlDivergence> {
    if h.total == 0 {
        return Err(Error::InvalidInput("empty sample set".into()));
    }
    let n = h.counts.len() as f64;
    let total = h.total as f64;
    let d: f64 = h
        .counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            p * (p * n).ln()
        })
        .sum();
    Ok(KlDivergence {
        order: h.order,
        patches: h.counts.len(),
        samples: h.total,
        d,
        d_normalized: d / (n / 2.0).ln(),
    })
}

pub fn kl_divergence(samples: &[[f64; 3]], pix: &SpherePixelization) -> Result<KlDivergence> {
    kl_from_histogram(&EnsembleHistogram::from_samples(pix, samples)?)
}

/// Uniform point on the unit sphere.
pub fn uniform_sphere<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let z = 2.0 * rng.random::<f64>() - 1.0;
    let phi = 2.0 * PI * rng.random::<f64>();
    let s = (1.0 - z * z).sqrt();
    [s * phi.cos(), s * phi.sin(), z]
}

/// Uniform point on the great circle orthogonal to `normal`.
pub fn great_circle_point<R: Rng + ?Sized>(normal: [f64; 3], rng: &mut R) -> [f64; 3] {
    let (e1, e2) = orthonormal_pair(normal);
    let a = 2.0 * PI * rng.random::<f64>();
    let (s, c) = a.sin_cos();
    [0, 1, 2].map(|i| c * e1[i] + s * e2[i])
}

fn orthonormal_pair(n: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    let n = n.map(|x| x / norm);
    let seed = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let dot = seed[0] * n[0] + seed[1] * n[1] + seed[2] * n[2];
    let mut e1 = [0, 1, 2].map(|i| seed[i] - dot * n[i]);
    let l = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    e1 = e1.map(|x| x / l);
    let e2 = [
        n[1] * e1[2] - n[2] * e1[1],
        n[2] * e1[0] - n[0] * e1[2],
        n[0] * e1[1] - n[1] * e1[0],
    ];
    (e1, e2)
}

/// One point of the finite-sample bias curve: mean and standard error of `D`
/// for `samples` uniform draws, over `repeats` independent ensembles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BiasPoint {
    pub order: u32,
    pub patches: usize,
    pub samples: u64,
    pub mean_d: f64,
    pub std_err: f64,
}

pub fn finite_sample_bias<R: Rng + ?Sized>(
    pix: &SpherePixelization,
    samples: usize,
    repeats: usize,
    rng: &mut R,
) -> Result<BiasPoint> {
    if repeats < 2 || samples == 0 {
        return Err(Error::InvalidInput("bias curve needs ≥ 2 repeats of ≥ 1 sample".into()));
    }
    let ds = (0..repeats)
        .map(|_| {
            let mut h = EnsembleHistogram::new(pix);
            for _ in 0..samples {
                h.add(pix, uniform_sphere(rng))?;
            }
            Ok(kl_from_histogram(&h)?.d)
        })
        .collect::<Result<Vec<f64>>>()?;
    let m = ds.iter().sum::<f64>() / repeats as f64;
    let var = ds.iter().map(|d| (d - m).powi(2)).sum::<f64>() / (repeats - 1) as f64;
    Ok(BiasPoint {
        order: pix.order(),
        patches: pix.len(),
        samples: samples as u64,
        mean_d: m,
        std_err: (var / repeats as f64).sqrt(),
    })
}
