//! Truncated Fock space and qubit algebra.
//!
//! The joint Hilbert space is qubit (x) oscillator with spin-major ordering:
//! index = spin * (n_max + 1) + n, spin 0 = down, spin 1 = up. This ordering
//! is the only interchange format used anywhere in the crate.

use ndarray::prelude::*;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sparse::SparseOperator;

pub const TAIL_TOL_DEFAULT: f64 = 1e-8;

/// Truncation control for the oscillator basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockConfig {
    /// Highest retained occupation number.
    pub n_max: usize,
    /// Maximum allowed probability weight in the top 5% of Fock levels.
    pub tail_tol: f64,
}

impl FockConfig {
    pub fn new(n_max: usize, tail_tol: f64) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidParameter {
                name: "n_max",
                reason: "must be at least 1".into(),
            });
        }
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(Error::InvalidParameter {
                name: "tail_tol",
                reason: format!("must lie in (0, 1), got {tail_tol}"),
            });
        }
        Ok(Self { n_max, tail_tol })
    }

    /// Default truncation for a given size parameter R. The excursion of the
    /// split wave packet stays within |x| ~ 2, i.e. occupation ~ 2R; a factor
    /// 4R leaves headroom that the tail monitor then verifies at runtime.
    pub fn for_size(r: f64) -> Result<Self> {
        if !r.is_finite() || r <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "R",
                reason: "must be positive and finite".into(),
            });
        }
        Self::new((4.0 * r).ceil() as usize, TAIL_TOL_DEFAULT)
    }

    /// Oscillator-space dimension n_max + 1.
    pub fn osc_dim(&self) -> usize {
        self.n_max + 1
    }

    /// Joint-space dimension 2 (n_max + 1).
    pub fn joint_dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    /// Lowest occupation counted as "tail" (top 5% of levels).
    pub fn tail_start(&self) -> usize {
        // strictly above 0.95 n_max
        ((0.95 * self.n_max as f64).floor() as usize + 1).min(self.n_max)
    }
}

/// Qubit basis labels; Down is the lower self-energy state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Down = 0,
    Up = 1,
}

/// Normalized amplitude vector over the joint (spin, n) basis.
#[derive(Debug, Clone)]
pub struct JointState {
    amps: Array1<Complex64>,
}

impl JointState {
    /// Wrap an amplitude vector; must have even length and unit norm to 1e-10.
    pub fn new(amps: Array1<Complex64>) -> Result<Self> {
        if amps.len() % 2 != 0 || amps.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: amps.len(),
            });
        }
        let state = Self { amps };
        let norm = state.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter {
                name: "amps",
                reason: format!("norm {norm} differs from 1 beyond 1e-10"),
            });
        }
        Ok(state)
    }

    /// Basis state |spin>|n>.
    pub fn basis(cfg: &FockConfig, spin: Spin, n: usize) -> Result<Self> {
        if n > cfg.n_max {
            return Err(Error::DimensionMismatch {
                expected: cfg.n_max + 1,
                got: n + 1,
            });
        }
        let mut amps = Array1::zeros(cfg.joint_dim());
        amps[spin as usize * cfg.osc_dim() + n] = Complex64::ONE;
        Ok(Self { amps })
    }

    pub fn amps(&self) -> &Array1<Complex64> {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn osc_dim(&self) -> usize {
        self.amps.len() / 2
    }

    pub fn n_max(&self) -> usize {
        self.osc_dim() - 1
    }

    /// Amplitude of |spin>|n>.
    pub fn amp(&self, spin: Spin, n: usize) -> Complex64 {
        self.amps[spin as usize * self.osc_dim() + n]
    }

    /// Amplitudes of one spin branch as a slice over n.
    pub fn branch(&self, spin: Spin) -> ArrayView1<'_, Complex64> {
        let d = self.osc_dim();
        self.amps.slice(ndarray::s![spin as usize * d..(spin as usize + 1) * d])
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn overlap(&self, other: &Self) -> Complex64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Probability weight above the 95% truncation mark.
    pub fn tail_weight(&self, cfg: &FockConfig) -> f64 {
        let start = cfg.tail_start();
        let mut w = 0.0;
        for spin in [Spin::Down, Spin::Up] {
            let b = self.branch(spin);
            for n in start..=cfg.n_max {
                w += b[n].norm_sqr();
            }
        }
        w
    }

    /// Abort-style truncation check used by the propagators.
    pub fn check_tail(&self, cfg: &FockConfig, time: f64) -> Result<()> {
        let w = self.tail_weight(cfg);
        if w > cfg.tail_tol {
            Err(Error::TruncationTail {
                time,
                weight: w,
                tol: cfg.tail_tol,
            })
        } else {
            Ok(())
        }
    }
}

/// Annihilation and creation operators (b, b_dagger) on the oscillator space,
/// <n-1| b |n> = sqrt(n).
pub fn ladder_ops(cfg: &FockConfig) -> (SparseOperator, SparseOperator) {
    let d = cfg.osc_dim();
    let lower = SparseOperator::from_triplets(
        d,
        (1..d).map(|n| (n - 1, n, Complex64::new((n as f64).sqrt(), 0.0))),
        false,
    )
    .expect("ladder construction is in range");
    let raise = lower.dagger();
    (lower, raise)
}

/// Number operator b_dagger b as a diagonal.
pub fn number_op(cfg: &FockConfig) -> SparseOperator {
    let d = cfg.osc_dim();
    SparseOperator::from_triplets(
        d,
        (0..d).map(|n| (n, n, Complex64::new(n as f64, 0.0))),
        true,
    )
    .expect("diagonal construction is in range")
}

/// Pauli matrices (sigma_x, sigma_y, sigma_z, sigma_plus, sigma_minus) in the
/// (down, up) basis. Note the ladder convention sigma_pm = sigma_x +- i sigma_y,
/// twice the half-spin ladder operators, so sigma_plus |down> = 2 |up>.
pub fn pauli_ops() -> (
    SparseOperator,
    SparseOperator,
    SparseOperator,
    SparseOperator,
    SparseOperator,
) {
    let c = Complex64::new;
    let sx = SparseOperator::from_triplets(2, vec![(0, 1, c(1.0, 0.0)), (1, 0, c(1.0, 0.0))], true)
        .unwrap();
    let sy = SparseOperator::from_triplets(2, vec![(0, 1, c(0.0, 1.0)), (1, 0, c(0.0, -1.0))], true)
        .unwrap();
    let sz = SparseOperator::from_triplets(2, vec![(0, 0, c(-1.0, 0.0)), (1, 1, c(1.0, 0.0))], true)
        .unwrap();
    let sp = SparseOperator::from_triplets(2, vec![(1, 0, c(2.0, 0.0))], false).unwrap();
    let sm = SparseOperator::from_triplets(2, vec![(0, 1, c(2.0, 0.0))], false).unwrap();
    (sx, sy, sz, sp, sm)
}

/// Kronecker product in the project-wide (spin, n) ordering: the qubit factor
/// comes first, so `tensor(sigma, osc_op)` acts on the joint space.
pub fn tensor(a: &SparseOperator, b: &SparseOperator) -> SparseOperator {
    a.kron(b)
}

/// Qubit operator lifted to the joint space.
pub fn lift_qubit(op: &SparseOperator, cfg: &FockConfig) -> SparseOperator {
    tensor(op, &SparseOperator::identity(cfg.osc_dim()))
}

/// Oscillator operator lifted to the joint space.
pub fn lift_osc(op: &SparseOperator, cfg: &FockConfig) -> SparseOperator {
    tensor(&SparseOperator::identity(2), op)
}

/// The factorized initial state |down>|0>, the free-Hamiltonian ground state.
pub fn initial_state(cfg: &FockConfig) -> JointState {
    JointState::basis(cfg, Spin::Down, 0).expect("n = 0 always representable")
}
