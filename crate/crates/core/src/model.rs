//! The extended Rabi Hamiltonian, its parity operator, and the effective
//! field vector seen by the qubit.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{ladder_ops, lift_osc, lift_qubit, number_op, pauli_ops, tensor, FockConfig};
use crate::sparse::SparseOperator;

/// Physical parameters of the model, all in units of the oscillator quantum.
///
/// `r` is the qubit/oscillator energy ratio and doubles as the size
/// parameter; `gamma` is the environment damping constant (0 = unitary).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub r: f64,
    pub lambda: f64,
    pub delta: f64,
    pub mu: f64,
    pub gamma: f64,
}

impl ModelParams {
    pub fn new(r: f64, lambda: f64, delta: f64, mu: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [
            ("R", r),
            ("lambda", lambda),
            ("delta", delta),
            ("mu", mu),
            ("gamma", gamma),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite { name });
            }
        }
        if r <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "R",
                reason: "must be positive".into(),
            });
        }
        if lambda < 0.0 {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: "must be non-negative".into(),
            });
        }
        if delta.abs() > 1.0 {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: "must lie in [-1, 1]".into(),
            });
        }
        if gamma < 0.0 {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: "must be non-negative".into(),
            });
        }
        Ok(Self {
            r,
            lambda,
            delta,
            mu,
            gamma,
        })
    }

    /// The benchmark double-well configuration used throughout the analysis:
    /// lambda = 0.75, delta = 0.5, mu scaled as 0.13 / R.
    pub fn benchmark(r: f64) -> Result<Self> {
        Self::new(r, 0.75, 0.5, 0.13 / r, 0.0)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: "must be non-negative and finite".into(),
            });
        }
        self.gamma = gamma;
        Ok(self)
    }

    pub fn with_mu(mut self, mu: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::NonFinite { name: "mu" });
        }
        self.mu = mu;
        Ok(self)
    }
}

/// Effective magnetic field acting on the qubit at a phase-space point.
///
/// Only |B| is physically meaningful downstream; the component signs fix one
/// concrete convention for which  H(x,p)/R = (x^2+p^2)/2 + sqrt(2) mu x - B.sigma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldVector {
    pub bx: f64,
    pub by: f64,
    pub bz: f64,
}

impl FieldVector {
    pub fn norm_sqr(&self) -> f64 {
        self.bx * self.bx + self.by * self.by + self.bz * self.bz
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

/// The radicand 1/4 + 2(lambda^2 + mu^2) x^2 + 2 (lambda delta)^2 p^2 + sqrt(2) mu x,
/// equal to |B(x, p)|^2.
pub fn field_radicand(x: f64, p: f64, params: &ModelParams) -> f64 {
    let sq2 = std::f64::consts::SQRT_2;
    0.25 + 2.0 * (params.lambda * params.lambda + params.mu * params.mu) * x * x
        + 2.0 * (params.lambda * params.delta).powi(2) * p * p
        + sq2 * params.mu * x
}

/// Field vector B(x, p) with the sign convention bx = -sqrt(2) lambda x,
/// by = +sqrt(2) lambda delta p, bz = -(1/2 + sqrt(2) mu x).
pub fn field_vector(x: f64, p: f64, params: &ModelParams) -> FieldVector {
    let sq2 = std::f64::consts::SQRT_2;
    FieldVector {
        bx: -sq2 * params.lambda * x,
        by: sq2 * params.lambda * params.delta * p,
        bz: -(0.5 + sq2 * params.mu * x),
    }
}

/// Assemble H / omega = n + (R/2) sigma_z
///   + lambda sqrt(R) [ (1+delta)/2 (b' s- + b s+) + (1-delta)/2 (b' s+ + b s-) ]
///   + mu sqrt(R) (b' + b)(sigma_z + 1),
/// block tridiagonal in n, Hermitian by construction.
pub fn hamiltonian(params: &ModelParams, cfg: &FockConfig) -> Result<SparseOperator> {
    let c = Complex64::new;
    let (b, bdag) = ladder_ops(cfg);
    let (_, _, sz, sp, sm) = pauli_ops();
    let sqrt_r = params.r.sqrt();

    let mut h = lift_osc(&number_op(cfg), cfg);
    h = h.add(&lift_qubit(&sz, cfg).scale(c(params.r / 2.0, 0.0)))?;

    let co = params.lambda * sqrt_r * (1.0 + params.delta) / 2.0;
    let counter = params.lambda * sqrt_r * (1.0 - params.delta) / 2.0;
    if co != 0.0 {
        let t = tensor(&sm, &bdag).add(&tensor(&sp, &b))?;
        h = h.add(&t.scale(c(co, 0.0)))?;
    }
    if counter != 0.0 {
        let t = tensor(&sp, &bdag).add(&tensor(&sm, &b))?;
        h = h.add(&t.scale(c(counter, 0.0)))?;
    }
    if params.mu != 0.0 {
        // sigma_z + 1 = diag(0, 2): the term annihilates the down branch
        let sz1 = SparseOperator::from_triplets(2, vec![(1, 1, c(2.0, 0.0))], true)?;
        let x_op = bdag.add(&b)?;
        h = h.add(&tensor(&sz1, &x_op).scale(c(params.mu * sqrt_r, 0.0)))?;
    }

    debug_assert_eq!(h.hermiticity_defect(), 0.0);
    let triplets: Vec<_> = h.iter().collect();
    SparseOperator::from_triplets(cfg.joint_dim(), triplets, true)
}

/// Parity operator (-1)^(n + (sigma_z + 1)/2): diagonal +-1 in the joint basis.
pub fn parity(cfg: &FockConfig) -> SparseOperator {
    let d = cfg.osc_dim();
    SparseOperator::from_triplets(
        cfg.joint_dim(),
        (0..cfg.joint_dim()).map(|i| {
            let spin = i / d;
            let n = i % d;
            let sign = if (n + spin) % 2 == 0 { 1.0 } else { -1.0 };
            (i, i, Complex64::new(sign, 0.0))
        }),
        true,
    )
    .expect("diagonal construction is in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{initial_state, JointState, Spin};
    use approx::assert_abs_diff_eq;

    fn cfg(n_max: usize) -> FockConfig {
        FockConfig::new(n_max, 1e-8).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(100.0, 0.75, 0.5, 1.3e-3, 0.0).is_ok());
        assert!(ModelParams::new(-1.0, 0.75, 0.5, 0.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, 0.75, 1.5, 0.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, 0.75, 0.5, f64::INFINITY, 0.0).is_err());
        assert!(ModelParams::new(1.0, 0.75, 0.5, 0.0, -0.1).is_err());
    }

    #[test]
    fn free_hamiltonian_is_diagonal_with_shifted_levels() {
        let p = ModelParams::new(10.0, 0.0, 0.5, 0.0, 0.0).unwrap();
        let cfg = cfg(6);
        let h = hamiltonian(&p, &cfg).unwrap();
        for (i, j, v) in h.iter() {
            assert_eq!(i, j, "off-diagonal entry at ({i},{j})");
            let spin = i / cfg.osc_dim();
            let n = (i % cfg.osc_dim()) as f64;
            let expected = n + if spin == 1 { 5.0 } else { -5.0 };
            assert_abs_diff_eq!(v.re, expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn coupling_matrix_element_matches_hand_value() {
        // <up,0| H |down,1> = lambda sqrt(R) (1+delta) through b sigma_plus
        let p = ModelParams::new(100.0, 0.75, 0.5, 0.0, 0.0).unwrap();
        let cfg = cfg(4);
        let h = hamiltonian(&p, &cfg).unwrap();
        let row = cfg.osc_dim(); // (up, 0)
        let col = 1; // (down, 1)
        assert_abs_diff_eq!(h.get(row, col).re, 11.25, epsilon = 1e-12);
        assert_abs_diff_eq!(h.get(row, col).im, 0.0);
    }

    #[test]
    fn initial_energy_is_minus_half_r() {
        for (r, lambda, delta, mu) in [
            (100.0, 0.75, 0.5, 1.3e-3),
            (10.0, 0.3, -0.8, 0.1),
            (3.0, 1.2, 0.0, 0.0),
        ] {
            let p = ModelParams::new(r, lambda, delta, mu, 0.0).unwrap();
            let cfg = cfg(12);
            let h = hamiltonian(&p, &cfg).unwrap();
            let psi = initial_state(&cfg);
            let e = h.expectation(psi.amps());
            assert!(
                (e.re + r / 2.0).abs() <= 1e-12 * (r / 2.0),
                "energy {} differs from {}",
                e.re,
                -r / 2.0
            );
            assert_abs_diff_eq!(e.im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn hamiltonian_is_exactly_hermitian_and_block_tridiagonal() {
        let p = ModelParams::new(25.0, 0.75, 0.5, 0.02, 0.0).unwrap();
        let cfg = cfg(10);
        let h = hamiltonian(&p, &cfg).unwrap();
        assert_eq!(h.hermiticity_defect(), 0.0);
        let d = cfg.osc_dim();
        for (i, j, _) in h.iter() {
            let ni = (i % d) as i64;
            let nj = (j % d) as i64;
            assert!(
                (ni - nj).abs() <= 1,
                "entry ({i},{j}) couples occupations {ni} and {nj}"
            );
        }
        // at most 8 stored entries per row
        for r in 0..cfg.joint_dim() {
            assert!(h.row(r).0.len() <= 8);
        }
    }

    #[test]
    fn parity_squares_to_identity_and_signs() {
        let cfg = cfg(7);
        let pi = parity(&cfg);
        let sq = pi.matmul(&pi).unwrap();
        for i in 0..cfg.joint_dim() {
            assert_abs_diff_eq!(sq.get(i, i).re, 1.0, epsilon = 1e-14);
        }
        let down0 = initial_state(&cfg);
        assert_abs_diff_eq!(pi.expectation(down0.amps()).re, 1.0);
        let up0 = JointState::basis(&cfg, Spin::Up, 0).unwrap();
        assert_abs_diff_eq!(pi.expectation(up0.amps()).re, -1.0);
    }

    #[test]
    fn parity_commutes_with_h_iff_mu_vanishes() {
        let cfg = cfg(10);
        let pi = parity(&cfg);
        let sym = ModelParams::new(50.0, 0.75, 0.5, 0.0, 0.0).unwrap();
        let h_sym = hamiltonian(&sym, &cfg).unwrap();
        assert!(h_sym.commutator(&pi).unwrap().max_abs() < 1e-12);

        let broken = ModelParams::new(50.0, 0.75, 0.5, 0.05, 0.0).unwrap();
        let h_broken = hamiltonian(&broken, &cfg).unwrap();
        assert!(h_broken.commutator(&pi).unwrap().max_abs() > 1e-3);
    }

    #[test]
    fn field_vector_point_values() {
        let p = ModelParams::new(100.0, 0.75, 0.5, 0.0, 0.0).unwrap();
        let b0 = field_vector(0.0, 0.0, &p);
        assert_abs_diff_eq!(b0.norm(), 0.5, epsilon = 1e-15);
        let b1 = field_vector(1.0, 0.0, &p);
        assert_abs_diff_eq!(b1.norm_sqr(), 1.375, epsilon = 1e-15);
    }

    #[test]
    fn field_norm_matches_radicand_on_samples() {
        // deterministic pseudo-random sweep over (x, p, params)
        let mut u = 0.37f64;
        let mut next = || {
            u = (u * 997.0 + 0.123).fract();
            u * 4.0 - 2.0
        };
        for _ in 0..1000 {
            let x = next();
            let p = next();
            let params = ModelParams::new(
                10.0 + next().abs() * 100.0,
                next().abs(),
                next() / 2.0,
                next() / 10.0,
                0.0,
            )
            .unwrap();
            let b = field_vector(x, p, &params);
            let rad = field_radicand(x, p, &params);
            assert!(
                (b.norm_sqr() - rad).abs() <= 1e-12 * rad.abs().max(1.0),
                "|B|^2 = {} vs radicand {}",
                b.norm_sqr(),
                rad
            );
        }
    }
}
