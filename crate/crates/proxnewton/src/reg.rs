//! Shipped regularizers.
//!
//! [`L0Norm`] is the workhorse: g(x) = μ₀·#{i : xᵢ ≠ 0}. Its prox is
//! componentwise hard thresholding at √(2λμ₀), its subdifferential constrains
//! v to vanish on the support of x, and its prox admits a diagonal 0/1
//! Bouligand-Jacobian element away from the threshold. [`ZeroReg`] turns the
//! composite machinery into plain smooth descent, which the tests lean on.

use crate::problem::{NewtonPath, Regularizer};

/// What the hard threshold does when |zᵢ| lands exactly on √(2λμ₀), where
/// both 0 and zᵢ minimize the prox subproblem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    /// Pick 0, the sparser candidate. Default; keeps traces deterministic.
    #[default]
    Zero,
    /// Keep zᵢ.
    Keep,
}

/// Scaled counting norm μ₀‖x‖₀.
#[derive(Debug, Clone, Copy)]
pub struct L0Norm {
    mu0: f64,
    tie: TiePolicy,
}

impl L0Norm {
    pub fn new(mu0: f64) -> Self {
        Self::with_tie_policy(mu0, TiePolicy::default())
    }

    pub fn with_tie_policy(mu0: f64, tie: TiePolicy) -> Self {
        assert!(mu0 > 0.0, "l0 weight must be positive");
        L0Norm { mu0, tie }
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    /// Keep/kill boundary √(2λμ₀) of the prox.
    pub fn threshold(&self, lambda: f64) -> f64 {
        (2.0 * lambda * self.mu0).sqrt()
    }
}

impl Regularizer for L0Norm {
    fn value(&self, x: &[f64]) -> f64 {
        // Exact zero test: the prox itself writes exact zeros, so support
        // logic downstream stays consistent without an epsilon.
        self.mu0 * x.iter().filter(|&&t| t != 0.0).count() as f64
    }

    fn coord_value(&self, t: f64) -> f64 {
        if t != 0.0 {
            self.mu0
        } else {
            0.0
        }
    }

    fn prox(&self, z: &[f64], lambda: f64) -> Vec<f64> {
        assert!(lambda > 0.0);
        let thr = self.threshold(lambda);
        z.iter()
            .map(|&zi| {
                let a = zi.abs();
                if a > thr {
                    zi
                } else if a < thr {
                    0.0
                } else {
                    match self.tie {
                        TiePolicy::Zero => 0.0,
                        TiePolicy::Keep => zi,
                    }
                }
            })
            .collect()
    }

    fn subdiff_member(&self, x: &[f64], v: &[f64]) -> bool {
        debug_assert_eq!(x.len(), v.len());
        x.iter().zip(v).all(|(&xi, &vi)| xi == 0.0 || vi == 0.0)
    }

    fn prox_jacobian_diag(&self, z: &[f64], lambda: f64) -> Option<Vec<f64>> {
        let thr = self.threshold(lambda);
        Some(
            z.iter()
                .map(|&zi| {
                    let a = zi.abs();
                    if a > thr {
                        1.0
                    } else if a < thr {
                        0.0
                    } else {
                        match self.tie {
                            TiePolicy::Zero => 0.0,
                            TiePolicy::Keep => 1.0,
                        }
                    }
                })
                .collect(),
        )
    }

    fn prox_tie(&self, z: &[f64], lambda: f64) -> Option<usize> {
        let thr = self.threshold(lambda);
        let slack = 1e-12 * (1.0 + thr);
        z.iter().position(|&zi| (zi.abs() - thr).abs() <= slack)
    }

    fn newton_path(&self) -> NewtonPath {
        NewtonPath::SupportReduced
    }
}

/// μ₀‖x‖₀ with the exact-zero support convention.
pub fn l0_value(x: &[f64], mu0: f64) -> f64 {
    L0Norm::new(mu0).value(x)
}

/// Componentwise hard threshold at √(2λμ₀), ties resolved to 0.
pub fn l0_prox(z: &[f64], lambda: f64, mu0: f64) -> Vec<f64> {
    L0Norm::new(mu0).prox(z, lambda)
}

/// Membership of v in the limiting subdifferential of μ₀‖·‖₀ at x: free off
/// the support, zero on it (the μ₀ scale does not change the cone).
pub fn l0_subdiff_member(x: &[f64], v: &[f64]) -> bool {
    L0Norm::new(1.0).subdiff_member(x, v)
}

/// Diagonal 0/1 Bouligand-Jacobian element of the hard threshold at z.
pub fn l0_prox_jacobian(z: &[f64], lambda: f64, mu0: f64) -> Vec<f64> {
    L0Norm::new(mu0)
        .prox_jacobian_diag(z, lambda)
        .expect("hard threshold always has a Jacobian element")
}

/// g ≡ 0. Prox is the identity, the subdifferential is {0}, the prox
/// Jacobian is the identity.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroReg;

impl Regularizer for ZeroReg {
    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }

    fn coord_value(&self, _t: f64) -> f64 {
        0.0
    }

    fn prox(&self, z: &[f64], _lambda: f64) -> Vec<f64> {
        z.to_vec()
    }

    fn subdiff_member(&self, _x: &[f64], v: &[f64]) -> bool {
        v.iter().all(|&vi| vi == 0.0)
    }

    fn prox_jacobian_diag(&self, z: &[f64], _lambda: f64) -> Option<Vec<f64>> {
        Some(vec![1.0; z.len()])
    }

    fn newton_path(&self) -> NewtonPath {
        NewtonPath::ProxJacobian
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_counts_exact_nonzeros() {
        let g = L0Norm::new(1.0);
        assert_eq!(g.value(&[0.0, 0.0, 0.0]), 0.0);
        assert_eq!(L0Norm::new(0.1).value(&[0.5, 0.0, -2.0]), 0.2);
        // nonzero however small
        assert_eq!(g.value(&[1e-300, 0.0]), 1.0);
    }

    #[test]
    fn prox_hard_thresholds() {
        // lambda=0.5, mu0=1 puts the threshold at exactly 1
        let g = L0Norm::new(1.0);
        assert_eq!(g.threshold(0.5), 1.0);
        assert_eq!(g.prox(&[0.5, 2.0, -1.5], 0.5), vec![0.0, 2.0, -1.5]);
        assert_eq!(g.prox(&[0.0, 0.0], 0.5), vec![0.0, 0.0]);
    }

    #[test]
    fn prox_tie_goes_to_zero_and_both_candidates_tie() {
        let g = L0Norm::new(1.0);
        let lambda = 0.5;
        // z on the boundary: objectives mu0 + 0 and 0 + z^2/(2 lambda) both equal 1
        let keep = 1.0 + 0.0_f64;
        let kill = 0.0 + 1.0 * 1.0 / (2.0 * lambda);
        assert_eq!(keep, kill);
        assert_eq!(g.prox(&[1.0], lambda), vec![0.0]);
        assert_eq!(
            L0Norm::with_tie_policy(1.0, TiePolicy::Keep).prox(&[1.0], lambda),
            vec![1.0]
        );
        assert_eq!(g.prox_tie(&[1.0], lambda), Some(0));
        assert_eq!(g.prox_tie(&[0.5, 2.0], lambda), None);
    }

    #[test]
    fn subdiff_membership() {
        let g = L0Norm::new(1.0);
        assert!(g.subdiff_member(&[1.0, 0.0], &[0.0, 7.0]));
        assert!(!g.subdiff_member(&[1.0, 0.0], &[0.1, 0.0]));
        assert!(g.subdiff_member(&[0.0, 0.0], &[3.0, -4.0]));
    }

    #[test]
    fn prox_jacobian_selector() {
        let g = L0Norm::new(1.0);
        assert_eq!(g.prox_jacobian_diag(&[2.0, 0.5], 0.5).unwrap(), vec![1.0, 0.0]);
        assert_eq!(g.prox_jacobian_diag(&[0.0, 0.0], 0.5).unwrap(), vec![0.0, 0.0]);
        // tie coordinate follows the tie policy
        assert_eq!(g.prox_jacobian_diag(&[1.0], 0.5).unwrap(), vec![0.0]);
    }

    #[test]
    fn zero_reg_is_identity_prox() {
        let g = ZeroReg;
        assert_eq!(g.value(&[1.0, 2.0]), 0.0);
        assert_eq!(g.prox(&[1.0, -2.0], 0.3), vec![1.0, -2.0]);
        assert!(g.subdiff_member(&[1.0], &[0.0]));
        assert!(!g.subdiff_member(&[1.0], &[0.5]));
    }

    #[test]
    fn free_functions_match_the_struct() {
        assert_eq!(l0_value(&[0.5, 0.0, -2.0], 0.1), 0.2);
        assert_eq!(l0_prox(&[0.5, 2.0, -1.5], 0.5, 1.0), vec![0.0, 2.0, -1.5]);
        assert!(l0_subdiff_member(&[1.0, 0.0], &[0.0, 7.0]));
        assert_eq!(l0_prox_jacobian(&[2.0, 0.5], 0.5, 1.0), vec![1.0, 0.0]);
    }
}
