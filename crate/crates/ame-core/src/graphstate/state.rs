//! Dense complex state vectors for numeric entanglement checks: graph-state
//! construction, minimal-support states of classical maps, site-local Fourier
//! rotations, and reduced-density-matrix uniformity.
//!
//! Basis indices are mixed-radix codes of the site values with site 1 as the
//! most significant digit, matching the array encoding used everywhere else.

use num_complex::Complex64;
use rayon::prelude::*;

use itertools::Itertools;

use super::{GraphError, IncidenceMatrix};
use crate::matrix::FFMatrix;

/// Default cap on amplitude count for state construction.
pub const DEFAULT_AMPLITUDE_CAP: u64 = 10_000_000;

/// A pure state of k qudits of dimension d.
#[derive(Debug, Clone)]
pub struct StateVector {
    d: u32,
    sites: usize,
    amplitudes: Vec<Complex64>,
}

fn root_of_unity(d: u32, exponent: u32) -> Complex64 {
    let angle = 2.0 * std::f64::consts::PI * (exponent % d) as f64 / d as f64;
    Complex64::from_polar(1.0, angle)
}

impl StateVector {
    pub fn dimension(&self) -> u32 {
        self.d
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Inner product <self|other>.
    pub fn overlap(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.amplitudes.len(), other.amplitudes.len());
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    fn check_size(d: u32, sites: usize, cap: Option<u64>) -> Result<usize, GraphError> {
        let cap = cap.unwrap_or(DEFAULT_AMPLITUDE_CAP);
        let needed = (d as u64).checked_pow(sites as u32);
        match needed {
            Some(n) if n <= cap => Ok(n as usize),
            Some(n) => Err(GraphError::DimensionCap(n, cap)),
            None => Err(GraphError::DimensionCap(u64::MAX, cap)),
        }
    }

    /// The graph state of an incidence matrix: amplitudes
    /// D^(-k/2) * omega^(sum_{i<j} ell_ij x_i x_j).
    pub fn graph_state(l: &IncidenceMatrix, cap: Option<u64>) -> Result<StateVector, GraphError> {
        let d = l.dimension();
        let k = l.sites();
        let size = Self::check_size(d, k, cap)?;
        let edges: Vec<(usize, usize, u32)> = (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .filter_map(|(i, j)| {
                let w = l.matrix().get(i, j);
                (w != 0).then_some((i, j, w))
            })
            .collect();
        let scale = (d as f64).powf(-(k as f64) / 2.0);
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); size];
        let mut digits = vec![0u32; k];
        for (code, amp) in amplitudes.iter_mut().enumerate() {
            decode_into(code, d, &mut digits);
            let mut phase = 0u64;
            for &(i, j, w) in &edges {
                phase += (w as u64) * (digits[i] as u64) * (digits[j] as u64);
            }
            *amp = root_of_unity(d, (phase % d as u64) as u32) * scale;
        }
        Ok(StateVector {
            d,
            sites: k,
            amplitudes,
        })
    }

    /// The minimal-support state of the linear map b = G a: equal-weight
    /// support on the rows (a, Ga), amplitude D^(-k/4) each.
    pub fn minimal_support(g: &FFMatrix, cap: Option<u64>) -> Result<StateVector, GraphError> {
        let d = g.field().order();
        let m = g.rows();
        let k = 2 * m;
        let size = Self::check_size(d, k, cap)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); size];
        let weight = (d as f64).powf(-(k as f64) / 4.0);
        let inputs = (d as u64).pow(m as u32);
        let mut digits = vec![0u32; m];
        for code in 0..inputs {
            decode_into(code as usize, d, &mut digits);
            let image = g.apply(&digits);
            let mut index = code;
            for &b in &image {
                index = index * d as u64 + b as u64;
            }
            amplitudes[index as usize] = Complex64::new(weight, 0.0);
        }
        Ok(StateVector {
            d,
            sites: k,
            amplitudes,
        })
    }

    /// Number of amplitudes with magnitude above 1e-12.
    pub fn support_size(&self) -> usize {
        self.amplitudes.iter().filter(|a| a.norm() > 1e-12).count()
    }

    /// Apply the Fourier matrix F_ab = omega^(ab) / sqrt(D) on each listed
    /// site (1-based).
    pub fn fourier_rotate(&self, sites: &[usize]) -> Result<StateVector, GraphError> {
        let mut out = self.clone();
        for &site in sites {
            if site == 0 || site > self.sites {
                return Err(GraphError::BadSite(site, self.sites));
            }
            out = out.apply_single_site_fourier(site - 1);
        }
        Ok(out)
    }

    fn apply_single_site_fourier(&self, site: usize) -> StateVector {
        let d = self.d as usize;
        let stride = d.pow((self.sites - 1 - site) as u32);
        let scale = 1.0 / (self.d as f64).sqrt();
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (code, amp) in self.amplitudes.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let digit = (code / stride) % d;
            let base = code - digit * stride;
            for b in 0..d {
                let phase = root_of_unity(self.d, ((digit * b) % d) as u32);
                out[base + b * stride] += phase * scale * amp;
            }
        }
        StateVector {
            d: self.d,
            sites: self.sites,
            amplitudes: out,
        }
    }

    /// Relabel sites: new site i holds what old site `perm[i-1]` held.
    pub fn permute_sites(&self, perm: &[usize]) -> Result<StateVector, GraphError> {
        if perm.len() != self.sites {
            return Err(GraphError::BadSite(perm.len(), self.sites));
        }
        let d = self.d;
        let k = self.sites;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        let mut digits = vec![0u32; k];
        for (code, amp) in self.amplitudes.iter().enumerate() {
            decode_into(code, d, &mut digits);
            let mut new_code = 0usize;
            for &src in perm {
                new_code = new_code * d as usize + digits[src - 1] as usize;
            }
            out[new_code] = *amp;
        }
        Ok(StateVector {
            d,
            sites: k,
            amplitudes: out,
        })
    }

    /// Apply the permutation gate of a 2x2 field matrix on two sites: the
    /// basis values (x_i, x_j) are replaced by M (x_i, x_j)^T.
    pub fn apply_map_gate(&self, gate: &FFMatrix, sites: (usize, usize)) -> Result<StateVector, GraphError> {
        let (i, j) = sites;
        for s in [i, j] {
            if s == 0 || s > self.sites {
                return Err(GraphError::BadSite(s, self.sites));
            }
        }
        let d = self.d;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        let mut digits = vec![0u32; self.sites];
        for (code, amp) in self.amplitudes.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            decode_into(code, d, &mut digits);
            let image = gate.apply(&[digits[i - 1], digits[j - 1]]);
            let mut new_digits = digits.clone();
            new_digits[i - 1] = image[0];
            new_digits[j - 1] = image[1];
            let mut new_code = 0usize;
            for &x in &new_digits {
                new_code = new_code * d as usize + x as usize;
            }
            out[new_code] += *amp;
        }
        Ok(StateVector {
            d,
            sites: self.sites,
            amplitudes: out,
        })
    }

    /// Tensor product of maximally entangled pairs on the given site pairs
    /// (every site must appear exactly once).
    pub fn bell_pairs(d: u32, k: usize, pairs: &[(usize, usize)]) -> Result<StateVector, GraphError> {
        let size = Self::check_size(d, k, None)?;
        let mut covered = vec![false; k];
        for &(i, j) in pairs {
            for s in [i, j] {
                if s == 0 || s > k || covered[s - 1] {
                    return Err(GraphError::BadSite(s, k));
                }
                covered[s - 1] = true;
            }
        }
        if !covered.iter().all(|&c| c) {
            return Err(GraphError::OddSiteCount(k));
        }
        let weight = (d as f64).powf(-(pairs.len() as f64) / 2.0);
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); size];
        let mut digits = vec![0u32; k];
        'outer: for (code, amp) in amplitudes.iter_mut().enumerate() {
            decode_into(code, d, &mut digits);
            for &(i, j) in pairs {
                if digits[i - 1] != digits[j - 1] {
                    continue 'outer;
                }
            }
            *amp = Complex64::new(weight, 0.0);
        }
        Ok(StateVector {
            d,
            sites: k,
            amplitudes,
        })
    }

    /// Max-norm distance of each balanced reduced density matrix from
    /// identity / D^(k/2). Subsets are checked in parallel.
    pub fn uniformity_check(&self, tolerance: f64) -> Result<UniformityReport, GraphError> {
        let norm = self.norm();
        if (norm - 1.0).abs() > tolerance {
            return Err(GraphError::Unnormalized(norm));
        }
        let k = self.sites;
        if k % 2 != 0 {
            return Err(GraphError::OddSiteCount(k));
        }
        let subsets: Vec<Vec<usize>> = (0..k).combinations(k / 2).collect();
        let entries: Vec<UniformityEntry> = subsets
            .par_iter()
            .map(|subset| {
                let deviation = self.reduced_density_deviation(subset);
                UniformityEntry {
                    sites: subset.iter().map(|s| s + 1).collect(),
                    deviation,
                    pass: deviation <= tolerance,
                }
            })
            .collect();
        Ok(UniformityReport { tolerance, entries })
    }

    /// Max-norm distance of rho_A from I / D^|A| for a 0-based site subset.
    fn reduced_density_deviation(&self, subset: &[usize]) -> f64 {
        let d = self.d as usize;
        let k = self.sites;
        let a_sites = subset;
        let b_sites: Vec<usize> = (0..k).filter(|s| !a_sites.contains(s)).collect();
        let dim_a = d.pow(a_sites.len() as u32);
        let dim_b = d.pow(b_sites.len() as u32);
        // gather amplitudes into a dim_a x dim_b table
        let mut table = vec![Complex64::new(0.0, 0.0); dim_a * dim_b];
        let mut digits = vec![0u32; k];
        for (code, amp) in self.amplitudes.iter().enumerate() {
            decode_into(code, self.d, &mut digits);
            let mut ia = 0usize;
            for &s in a_sites {
                ia = ia * d + digits[s] as usize;
            }
            let mut ib = 0usize;
            for &s in &b_sites {
                ib = ib * d + digits[s] as usize;
            }
            table[ia * dim_b + ib] = *amp;
        }
        let target = 1.0 / dim_a as f64;
        let mut worst: f64 = 0.0;
        for x in 0..dim_a {
            for y in x..dim_a {
                let mut entry = Complex64::new(0.0, 0.0);
                for b in 0..dim_b {
                    entry += table[x * dim_b + b] * table[y * dim_b + b].conj();
                }
                if x == y {
                    entry -= target;
                }
                worst = worst.max(entry.norm());
            }
        }
        worst
    }
}

fn decode_into(mut code: usize, d: u32, digits: &mut [u32]) {
    for slot in digits.iter_mut().rev() {
        *slot = (code % d as usize) as u32;
        code /= d as usize;
    }
}

#[derive(Debug, Clone)]
pub struct UniformityEntry {
    /// 1-based sites of subsystem A.
    pub sites: Vec<usize>,
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct UniformityReport {
    pub tolerance: f64,
    pub entries: Vec<UniformityEntry>,
}

impl UniformityReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn max_deviation(&self) -> f64 {
        self.entries.iter().map(|e| e.deviation).fold(0.0, f64::max)
    }

    /// Number of unordered bipartitions whose both halves pass.
    pub fn passing_bipartitions(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| e.sites.contains(&1) && e.pass)
            .filter(|e| {
                let complement: Vec<usize> = (1..=self.entries[0].sites.len() * 2)
                    .filter(|s| !e.sites.contains(s))
                    .collect();
                self.entries
                    .iter()
                    .any(|o| o.sites == complement && o.pass)
            })
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_site_controlled_z_amplitudes() {
        let f2 = Field::prime(2).unwrap();
        let l = IncidenceMatrix::from_edges(f2, 2, &[(1, 2, 1)]).unwrap();
        let state = StateVector::graph_state(&l, None).unwrap();
        let expect = [0.5, 0.5, 0.5, -0.5];
        for (amp, want) in state.amplitudes().iter().zip(expect) {
            assert_abs_diff_eq!(amp.re, want, epsilon = 1e-12);
            assert_abs_diff_eq!(amp.im, 0.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(state.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn weightless_graph_is_a_product_state() {
        let f3 = Field::prime(3).unwrap();
        let l = IncidenceMatrix::new(FFMatrix::zeros(f3, 2, 2)).unwrap();
        let state = StateVector::graph_state(&l, None).unwrap();
        for amp in state.amplitudes() {
            assert_abs_diff_eq!(amp.re, 1.0 / 3.0, epsilon = 1e-12);
        }
        // every bipartition fails for a product state
        let report = state.uniformity_check(1e-9).unwrap();
        assert!(!report.all_pass());
    }

    #[test]
    fn bell_pair_is_uniform() {
        let state = StateVector::bell_pairs(2, 2, &[(1, 2)]).unwrap();
        let report = state.uniformity_check(1e-10).unwrap();
        assert!(report.all_pass());
        assert_eq!(report.passing_bipartitions(), 1);
    }

    #[test]
    fn product_state_fails_uniformity() {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 16];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        let state = StateVector {
            d: 2,
            sites: 4,
            amplitudes,
        };
        let report = state.uniformity_check(1e-9).unwrap();
        assert!(report.entries.iter().all(|e| !e.pass));
        // deviation is 1 - 1/D^(k/2) on the diagonal
        assert_abs_diff_eq!(report.max_deviation(), 0.75, epsilon = 1e-12);
    }

    #[test]
    fn unnormalized_state_is_rejected() {
        let state = StateVector {
            d: 2,
            sites: 2,
            amplitudes: vec![Complex64::new(1.0, 0.0); 4],
        };
        assert!(matches!(
            state.uniformity_check(1e-9),
            Err(GraphError::Unnormalized(_))
        ));
    }

    #[test]
    fn fourier_then_inverse_is_identity() {
        let f3 = Field::prime(3).unwrap();
        let l = IncidenceMatrix::from_edges(f3, 2, &[(1, 2, 2)]).unwrap();
        let state = StateVector::graph_state(&l, None).unwrap();
        // F^4 = 1, so rotating four times returns the state
        let mut rotated = state.clone();
        for _ in 0..4 {
            rotated = rotated.fourier_rotate(&[2]).unwrap();
        }
        let fidelity = state.overlap(&rotated).norm();
        assert_abs_diff_eq!(fidelity, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn single_site_fourier_gives_uniform_superposition() {
        let state = StateVector {
            d: 3,
            sites: 1,
            amplitudes: vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        };
        let rotated = state.fourier_rotate(&[1]).unwrap();
        for amp in rotated.amplitudes() {
            assert_abs_diff_eq!(amp.re, 1.0 / 3.0_f64.sqrt(), epsilon = 1e-12);
        }
    }

    #[test]
    fn minimal_support_counts() {
        let f5 = Field::prime(5).unwrap();
        let g = FFMatrix::from_ints(f5, &[vec![1, 1, 1], vec![1, 2, -2], vec![1, -2, -1]])
            .unwrap();
        let state = StateVector::minimal_support(&g, None).unwrap();
        assert_eq!(state.amplitudes().len(), 15625);
        assert_eq!(state.support_size(), 125);
        assert_abs_diff_eq!(state.norm(), 1.0, epsilon = 1e-12);
        // graph states are never minimal support: all amplitudes equal size
        let l = IncidenceMatrix::block_incidence(&g).unwrap();
        let graph = StateVector::graph_state(&l, None).unwrap();
        assert_eq!(graph.support_size(), 15625);
    }

    #[test]
    fn dimension_cap_enforced() {
        let f5 = Field::prime(5).unwrap();
        let g = FFMatrix::identity(f5, 3);
        assert!(matches!(
            StateVector::minimal_support(&g, Some(100)),
            Err(GraphError::DimensionCap(15625, 100))
        ));
    }

    #[test]
    fn bell_pairs_cover_check() {
        assert!(StateVector::bell_pairs(2, 4, &[(1, 2), (2, 3)]).is_err());
        assert!(StateVector::bell_pairs(2, 4, &[(1, 3)]).is_err());
        let ok = StateVector::bell_pairs(2, 4, &[(1, 3), (2, 4)]).unwrap();
        assert_abs_diff_eq!(ok.norm(), 1.0, epsilon = 1e-12);
    }
}
