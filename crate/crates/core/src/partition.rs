//! Period arithmetic and time partitions.
//!
//! A time partition splits the usable time indices `[start, T]` into `omega`
//! interleaved arithmetic progressions; indices in one subset share a causal
//! mechanism when `omega` matches the variable's true periodicity. Subset `k`
//! (1-based) is `{start + (k-1) + m*omega : m >= 0}` intersected with
//! `[start, T]`, so the anchor `start` lands in subset 1.

use num_integer::Integer;

use crate::error::{Error, Result};

/// The phase-indexed subsets of time indices used to pool samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimePartition {
    omega: usize,
    start: usize,
    subsets: Vec<Vec<usize>>,
}

impl TimePartition {
    pub fn omega(&self) -> usize {
        self.omega
    }

    pub fn start(&self) -> usize {
        self.start
    }

    /// Subsets indexed by phase; `subsets()[k-1]` is phase `k`.
    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn subset(&self, phase: usize) -> &[usize] {
        &self.subsets[phase - 1]
    }
}

/// Least common multiple of per-variable periodicities.
pub fn lcm_periodicities(omegas: &[usize]) -> Result<usize> {
    if omegas.is_empty() {
        return Err(Error::Usage("lcm_periodicities needs at least one period".into()));
    }
    if let Some(bad) = omegas.iter().find(|&&w| w == 0) {
        return Err(Error::Usage(format!("periodicity must be >= 1, got {bad}")));
    }
    Ok(omegas.iter().fold(1usize, |acc, &w| acc.lcm(&w)))
}

/// Smallest multiple of `big_omega` that is at least `tau_max + 1`: the block
/// length that lets the series be viewed as finitely many Markov chains.
pub fn chain_count(tau_max: usize, big_omega: usize) -> Result<usize> {
    if big_omega == 0 {
        return Err(Error::Usage("chain_count needs a period >= 1".into()));
    }
    Ok((tau_max + 1).div_ceil(big_omega) * big_omega)
}

/// Builds the `omega`-way partition of `[start, t_len]`.
pub fn build_partition(omega: usize, start: usize, t_len: usize) -> Result<TimePartition> {
    if omega == 0 {
        return Err(Error::Usage("partition needs omega >= 1".into()));
    }
    if start == 0 || start > t_len {
        return Err(Error::Usage(format!(
            "partition start {start} must lie in [1, {t_len}]"
        )));
    }
    let usable = t_len - start + 1;
    if usable < omega {
        return Err(Error::InsufficientData(format!(
            "cannot split {usable} usable time points (t in [{start}, {t_len}]) into omega={omega} non-empty subsets"
        )));
    }
    let mut subsets = vec![Vec::new(); omega];
    for t in start..=t_len {
        subsets[(t - start) % omega].push(t);
    }
    Ok(TimePartition {
        omega,
        start,
        subsets,
    })
}

/// Phase of time index `t` in the partition anchored at `start`: the inverse
/// of [`build_partition`] membership.
pub fn phase_of(t: usize, omega: usize, start: usize) -> Result<usize> {
    if omega == 0 {
        return Err(Error::Usage("phase_of needs omega >= 1".into()));
    }
    if t < start {
        return Err(Error::Usage(format!(
            "phase_of: t={t} precedes the partition anchor {start}"
        )));
    }
    Ok(((t - start) % omega) + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lcm_examples() {
        assert_eq!(lcm_periodicities(&[3, 2, 1]).unwrap(), 6);
        assert_eq!(lcm_periodicities(&[1]).unwrap(), 1);
        assert_eq!(lcm_periodicities(&[4, 6]).unwrap(), 12);
        assert!(lcm_periodicities(&[]).is_err());
        assert!(lcm_periodicities(&[2, 0]).is_err());
    }

    #[test]
    fn chain_count_examples() {
        assert_eq!(chain_count(3, 6).unwrap(), 6);
        assert_eq!(chain_count(0, 1).unwrap(), 1);
        // First multiple of 3 that reaches tau_max + 1 = 6.
        assert_eq!(chain_count(5, 3).unwrap(), 6);
    }

    #[test]
    fn partition_matches_worked_example() {
        let p = build_partition(3, 4, 15).unwrap();
        assert_eq!(p.subset(1), &[4, 7, 10, 13]);
        assert_eq!(p.subset(2), &[5, 8, 11, 14]);
        assert_eq!(p.subset(3), &[6, 9, 12, 15]);
    }

    #[test]
    fn omega_one_is_no_partition() {
        let p = build_partition(1, 1, 5).unwrap();
        assert_eq!(p.subsets().len(), 1);
        assert_eq!(p.subset(1), &[1, 2, 3, 4, 5]);
    }

    #[test]
    fn partition_sizes_balance() {
        let p = build_partition(4, 10, 20).unwrap();
        let sizes: Vec<usize> = p.subsets().iter().map(|s| s.len()).collect();
        assert_eq!(sizes, vec![3, 3, 3, 2]);
    }

    #[test]
    fn partition_insufficient_data_names_omega() {
        let err = build_partition(7, 10, 15).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("omega=7"), "error should name the omega: {msg}");
    }

    #[test]
    fn phase_of_examples() {
        assert_eq!(phase_of(7, 3, 4).unwrap(), 1);
        assert_eq!(phase_of(4, 3, 4).unwrap(), 1);
        assert_eq!(phase_of(14, 3, 4).unwrap(), 2);
        assert!(phase_of(3, 3, 4).is_err());
    }

    // Exhaustive partition invariants over the documented parameter ranges:
    // subsets are disjoint, cover [start, T], sizes differ by at most one, and
    // phase_of agrees with membership everywhere.
    #[test]
    fn partition_invariants_exhaustive() {
        for t_len in 1..=200usize {
            for omega in 1..=20usize.min(t_len) {
                for start in (1..=t_len).step_by(7) {
                    if t_len - start + 1 < omega {
                        assert!(build_partition(omega, start, t_len).is_err());
                        continue;
                    }
                    let p = build_partition(omega, start, t_len).unwrap();
                    let mut seen = vec![false; t_len + 1];
                    let mut min_size = usize::MAX;
                    let mut max_size = 0usize;
                    for (k0, subset) in p.subsets().iter().enumerate() {
                        min_size = min_size.min(subset.len());
                        max_size = max_size.max(subset.len());
                        for &t in subset {
                            assert!(t >= start && t <= t_len);
                            assert!(!seen[t], "overlap at t={t}");
                            seen[t] = true;
                            assert_eq!(phase_of(t, omega, start).unwrap(), k0 + 1);
                        }
                    }
                    assert!(max_size - min_size <= 1);
                    assert!(seen[start..=t_len].iter().all(|&s| s), "cover gap");
                }
            }
        }
    }

    #[test]
    fn chain_count_identities_exhaustive() {
        for tau in 0..=50usize {
            for omega in 1..=50usize {
                let d = chain_count(tau, omega).unwrap();
                assert!(d >= tau + 1);
                assert_eq!(d % omega, 0);
                // Smallest such multiple.
                assert!(d < tau + 1 + omega);
            }
        }
    }
}
