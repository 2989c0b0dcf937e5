//! Flux-pierced SU(N) Hubbard ring with symmetric long-range couplings.
//!
//! The Hamiltonian is
//!
//! ```text
//! H = -Σ_{i,s,r} t_r (e^{i 2π φ r / L} c†_{i,s} c_{i+r,s} + h.c.)
//!     + U Σ_{i, s<s'} n_{i,s} n_{i,s'}
//!     + Σ_{i,r} V_r n_i n_{i+r}
//! ```
//!
//! on a periodic ring of `L` sites with `N` colors. The flux `φ` is measured
//! in units of the bare flux quantum. A nearest-neighbor model is simply
//! `t = [t1]`, `V = [V1]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Physical parameters of the ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HubbardModel {
    /// Number of sites.
    pub sites: usize,
    /// Number of colors (spin components).
    pub colors: usize,
    /// Hopping amplitudes `t_r`, `r = 1..=R_t`.
    pub hopping: Vec<f64>,
    /// On-site interaction between different colors.
    pub onsite: f64,
    /// Density-density couplings `V_r`, `r = 1..=R_V`.
    pub density: Vec<f64>,
    /// Flux through the ring in units of the flux quantum.
    pub flux: f64,
}

/// Particle count per color.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinSector {
    pub counts: Vec<usize>,
}

impl SpinSector {
    pub fn new(counts: Vec<usize>) -> Self {
        SpinSector { counts }
    }

    /// `per_color` particles in each of `colors` colors.
    pub fn uniform(colors: usize, per_color: usize) -> Self {
        SpinSector {
            counts: vec![per_color; colors],
        }
    }

    pub fn particles(&self) -> usize {
        self.counts.iter().sum()
    }
}

impl HubbardModel {
    /// Nearest-neighbor ring: `t = [t]`, `V = [v]` (dropped when `v == 0`).
    pub fn nearest_neighbor(sites: usize, colors: usize, t: f64, u: f64, v: f64, flux: f64) -> Self {
        HubbardModel {
            sites,
            colors,
            hopping: vec![t],
            onsite: u,
            density: if v == 0.0 { Vec::new() } else { vec![v] },
            flux,
        }
    }

    pub fn with_flux(&self, flux: f64) -> Self {
        HubbardModel { flux, ..self.clone() }
    }

    pub fn qubits(&self) -> usize {
        self.sites * self.colors
    }

    /// Largest coupling range allowed on a periodic ring.
    pub fn max_range(&self) -> usize {
        self.sites / 2
    }

    pub fn is_nearest_neighbor(&self) -> bool {
        self.hopping.len() <= 1 && self.density.len() <= 1
    }

    /// Checks every model invariant.
    pub fn check(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(Error::range("sites", format!("L = {} must be >= 2", self.sites)));
        }
        if self.colors < 1 {
            return Err(Error::range("colors", "N must be >= 1"));
        }
        let max = self.max_range();
        if self.hopping.len() > max {
            return Err(Error::range(
                "hopping",
                format!("range R_t = {} exceeds floor(L/2) = {}", self.hopping.len(), max),
            ));
        }
        if self.density.len() > max {
            return Err(Error::range(
                "density",
                format!("range R_V = {} exceeds floor(L/2) = {}", self.density.len(), max),
            ));
        }
        if !(self.onsite >= 0.0) || !self.onsite.is_finite() {
            return Err(Error::range(
                "onsite",
                format!("U = {} must be finite and >= 0", self.onsite),
            ));
        }
        for (k, v) in self.density.iter().enumerate() {
            if !(*v >= 0.0) || !v.is_finite() {
                return Err(Error::range(
                    format!("density[{}]", k),
                    format!("V_{} = {} must be finite and >= 0", k + 1, v),
                ));
            }
        }
        for (k, t) in self.hopping.iter().enumerate() {
            if !t.is_finite() {
                return Err(Error::range(format!("hopping[{}]", k), "must be finite"));
            }
        }
        if !self.flux.is_finite() {
            return Err(Error::range("flux", "must be finite"));
        }
        Ok(())
    }

    /// Phase `exp(i 2π φ / L)` picked up by one hop across one bond.
    pub fn flux_phase(&self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * self.flux / self.sites as f64)
    }

    /// Phase for a hop of range `r` (crosses `r` bonds).
    pub fn hop_phase(&self, range: usize) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * self.flux * range as f64 / self.sites as f64)
    }

    /// `λ_{R_V}(V)` for this model's density couplings.
    pub fn lambda_density(&self) -> f64 {
        lambda_r(self.sites, &self.density).expect("validated model")
    }
}

/// Validates a model together with a sector and hands both back unchanged.
pub fn validate(model: HubbardModel, sector: SpinSector) -> Result<(HubbardModel, SpinSector)> {
    model.check()?;
    if sector.counts.len() != model.colors {
        return Err(Error::range(
            "counts",
            format!("{} entries given for N = {} colors", sector.counts.len(), model.colors),
        ));
    }
    for (s, &n) in sector.counts.iter().enumerate() {
        if n > model.sites {
            return Err(Error::range(
                format!("counts[{}]", s),
                format!("N_{} = {} exceeds L = {}", s, n, model.sites),
            ));
        }
    }
    Ok((model, sector))
}

/// Multiplicity of distance-`r` edges per site in the ring's circulant graph.
pub fn circulant_weight(sites: usize, range: usize) -> usize {
    if 2 * range < sites {
        2
    } else if 2 * range == sites {
        1
    } else {
        0
    }
}

/// `λ_R(V) = Σ_r g_L(r) V_r` with `g_L(r) = 2` for `r < L/2` and `1` for `r = L/2`.
pub fn lambda_r(sites: usize, couplings: &[f64]) -> Result<f64> {
    if couplings.len() > sites / 2 {
        return Err(Error::range(
            "couplings",
            format!("range {} exceeds floor(L/2) = {}", couplings.len(), sites / 2),
        ));
    }
    Ok(couplings
        .iter()
        .enumerate()
        .map(|(k, v)| circulant_weight(sites, k + 1) as f64 * v)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn su3() -> HubbardModel {
        HubbardModel::nearest_neighbor(3, 3, 1.0, 5.0, 0.0, 0.0)
    }

    #[test]
    fn validate_accepts_fig_instance() {
        let (m, s) = validate(su3(), SpinSector::uniform(3, 1)).unwrap();
        assert_eq!(m, su3());
        assert_eq!(s.counts, vec![1, 1, 1]);
    }

    #[test]
    fn validate_rejects_long_hopping() {
        let mut m = HubbardModel::nearest_neighbor(4, 1, 1.0, 0.0, 0.0, 0.0);
        m.hopping = vec![1.0, 1.0, 1.0];
        let err = validate(m, SpinSector::uniform(1, 1)).unwrap_err();
        assert!(err.to_string().contains("hopping"), "{}", err);
    }

    #[test]
    fn validate_rejects_negative_coupling() {
        let mut m = su3();
        m.onsite = -1.0;
        let err = validate(m, SpinSector::uniform(3, 1)).unwrap_err();
        assert!(err.to_string().contains("onsite"));
        let mut m = su3();
        m.density = vec![-0.5];
        assert!(validate(m, SpinSector::uniform(3, 1)).is_err());
    }

    #[test]
    fn validate_rejects_overfull_color() {
        let err = validate(su3(), SpinSector::new(vec![4, 0, 0])).unwrap_err();
        assert!(err.to_string().contains("counts[0]"));
        assert!(validate(su3(), SpinSector::new(vec![1, 1])).is_err());
    }

    #[test]
    fn flux_phase_values() {
        let m = su3();
        assert_eq!(m.flux_phase(), Complex64::new(1.0, 0.0));
        let q = HubbardModel {
            flux: 5.0 / 4.0,
            sites: 5,
            ..su3()
        }
        .flux_phase();
        assert!((q - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let h = m.with_flux(0.5).flux_phase();
        let want = Complex64::new((PI / 3.0).cos(), (PI / 3.0).sin());
        assert!((h - want).norm() < 1e-15);
    }

    #[test]
    fn flux_phase_periodic_in_l() {
        for &phi in &[0.0, 0.13, 0.5, 0.91, 2.2] {
            let m = su3().with_flux(phi);
            let p = m.with_flux(phi + 3.0);
            assert!((m.flux_phase() - p.flux_phase()).norm() < 1e-14);
        }
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_r(4, &[1.0, 1.0]).unwrap(), 3.0);
        assert_eq!(lambda_r(5, &[1.0, 1.0]).unwrap(), 4.0);
        assert_eq!(lambda_r(7, &[]).unwrap(), 0.0);
        assert!(lambda_r(4, &[1.0, 1.0, 1.0]).is_err());
    }

    /// Brute-force count of the distinct edges of the circulant graph
    /// `C_L(1..=R)`, divided by `L/2`.
    #[test]
    fn lambda_counts_circulant_edges() {
        for sites in 2..=12usize {
            for range in 0..=sites / 2 {
                let mut edges = std::collections::BTreeSet::new();
                for i in 0..sites {
                    for r in 1..=range {
                        let j = (i + r) % sites;
                        edges.insert((i.min(j), i.max(j)));
                    }
                }
                let lam = lambda_r(sites, &vec![1.0; range]).unwrap();
                assert_eq!(lam * sites as f64 / 2.0, edges.len() as f64, "L={} R={}", sites, range);
            }
        }
    }
}
