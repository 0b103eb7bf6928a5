//! Density-matrix reference for the measurement channel of the statevector
//! engine: explicit Pauli matrices and single-qubit conjugations on the full
//! `2^{n+1}` space.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::sync::Arc;
use surflearn::protocol::MeasurementStrength;
use surflearn::statevector::{CodeLayout, CodeState, LogicalInit};

type C = Complex64;
type M2 = [[C; 2]; 2];

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn pauli_x() -> M2 {
    [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]
}
pub fn pauli_y() -> M2 {
    [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]
}
pub fn pauli_z() -> M2 {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]]
}

fn mm(a: &M2, b: &M2) -> M2 {
    let mut r = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

/// `e^{iθY/2} e^{iφZ/2}` from `cos + i sin` of each generator.
pub fn rotation(theta: f64, phi: f64) -> M2 {
    let y = pauli_y();
    let (s, co) = (theta / 2.0).sin_cos();
    let ry = [
        [c(co, 0.0) + c(0.0, s) * y[0][0], c(0.0, s) * y[0][1]],
        [c(0.0, s) * y[1][0], c(co, 0.0) + c(0.0, s) * y[1][1]],
    ];
    let rz = [
        [C::from_polar(1.0, phi / 2.0), c(0.0, 0.0)],
        [c(0.0, 0.0), C::from_polar(1.0, -phi / 2.0)],
    ];
    mm(&ry, &rz)
}

/// `σ^{θ,φ} = sinθ cosφ X + sinθ sinφ Y + cosθ Z`.
pub fn axis_pauli(theta: f64, phi: f64) -> M2 {
    let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
    let w = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
    let mut r = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = x[i][j] * w[0] + y[i][j] * w[1] + z[i][j] * w[2];
        }
    }
    r
}

/// `O_q ρ O_q†` for a single-qubit operator on qubit `q`.
pub fn conjugate(rho: &DMatrix<C>, q: usize, o: &M2) -> DMatrix<C> {
    let dim = rho.nrows();
    let bit = 1usize << q;
    let apply_left = |m: &DMatrix<C>| {
        let mut out = DMatrix::<C>::zeros(dim, dim);
        for r in 0..dim {
            let (r0, r1) = (r & !bit, r | bit);
            let i = usize::from(r & bit != 0);
            for col in 0..dim {
                out[(r, col)] = o[i][0] * m[(r0, col)] + o[i][1] * m[(r1, col)];
            }
        }
        out
    };
    let left = apply_left(rho);
    apply_left(&left.adjoint()).adjoint()
}

pub fn outer(psi: &[C]) -> DMatrix<C> {
    DMatrix::from_fn(psi.len(), psi.len(), |i, j| psi[i] * psi[j].conj())
}

/// Max-entry deviation between `Σ_s M_s U ρ U† M_s†` from the engine and
/// `U (⊗_j N_j)(ρ) U†` with `N(ρ) = cos²t ρ + sin²t σρσ`.
pub fn channel_identity_error(d: usize, theta: f64, phi: f64, t: f64) -> f64 {
    let layout = Arc::new(CodeLayout::new(d).unwrap());
    let n = layout.n_data();
    let base = CodeState::prepare(layout.clone(), LogicalInit::EntangledWithReference).unwrap();
    let strength = MeasurementStrength::from_time(t).unwrap();

    let dim = base.amplitudes().len();
    let mut averaged = DMatrix::<C>::zeros(dim, dim);
    for mask in 0..(1usize << n) {
        let s: Vec<i8> = (0..n).map(|j| if mask >> j & 1 == 1 { -1 } else { 1 }).collect();
        let mut st = base.clone();
        st.rotate_all(theta, phi);
        st.apply_kraus_string(&strength, &s);
        averaged += outer(st.amplitudes());
    }

    let sigma = axis_pauli(theta, phi);
    let (ct, stt) = (t.cos().powi(2), t.sin().powi(2));
    let mut rho = outer(base.amplitudes());
    for q in 0..n {
        rho = rho.clone() * C::new(ct, 0.0) + conjugate(&rho, q, &sigma) * C::new(stt, 0.0);
    }
    let u = rotation(theta, phi);
    for q in 0..n {
        rho = conjugate(&rho, q, &u);
    }
    (averaged - rho).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
