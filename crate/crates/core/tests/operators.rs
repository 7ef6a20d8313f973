use epspectra::exact::{rat, ExactMatrix};
use epspectra::operators::{
    build_cartesian, build_hamiltonian, build_hamiltonian_exact, parity_matrix, perturbation_matrix,
    AngularMomentumRep, Axis, Basis, Coupling, ExactModel, ModelParams,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Float Faddeev–LeVerrier coefficients of `det(λI − A)`, highest power first.
fn float_charpoly(a: &DMatrix<Complex64>) -> Vec<Complex64> {
    let n = a.nrows();
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for k in 1..=n {
        m = a * &m + DMatrix::identity(n, n) * coeffs[k - 1];
        let am = a * &m;
        coeffs.push(-am.trace() / k as f64);
    }
    coeffs
}

#[test]
fn commutators_up_to_thirty() {
    let i = Complex64::new(0.0, 1.0);
    for n in 1..=30 {
        let rep = AngularMomentumRep::new(n).unwrap();
        let [lx, ly, lz] = [Axis::X, Axis::Y, Axis::Z].map(|a| build_cartesian(rep, a, Basis::Orthonormal).to_float(0.0));
        for (a, b, c) in [(&lx, &ly, &lz), (&ly, &lz, &lx), (&lz, &lx, &ly)] {
            let comm = a * b - b * a - c * i;
            assert!(max_abs(&comm) <= 1e-12, "N={n}: {}", max_abs(&comm));
        }
    }
}

#[test]
fn rotated_perturbation_bandwidth() {
    for n in 1..=12 {
        let rep = AngularMomentumRep::new(n).unwrap();
        for k in 1..=6u32 {
            let m: ExactMatrix = perturbation_matrix(rep, k);
            assert!(m.lower_bandwidth() <= k as usize, "N={n}, k={k}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pt_relation_and_symmetry(n in 1usize..=30, gamma in -3.0f64..3.0, v in 0.1f64..3.0, c in -2.0f64..2.0) {
        let params = ModelParams::new(n, gamma, v, c);
        let h = build_hamiltonian(&params, Basis::Orthonormal).unwrap().to_float(0.0);
        let p = parity_matrix(n + 1).to_float(0.0);
        let defect = &p * h.adjoint() * &p - &h;
        prop_assert!(max_abs(&defect) <= 1e-14 * max_abs(&h).max(1.0));
        prop_assert_eq!(h.transpose(), h.clone());
    }

    #[test]
    fn bases_share_the_characteristic_polynomial(n in 1usize..=8, gamma in 0.0f64..2.0, v in 0.2f64..2.0, c in 0.0f64..1.0) {
        let params = ModelParams::new(n, gamma, v, c);
        let ortho = float_charpoly(&build_hamiltonian(&params, Basis::Orthonormal).unwrap().to_float(0.0));
        let mono = float_charpoly(&build_hamiltonian(&params, Basis::Monomial).unwrap().to_float(0.0));
        let scale = ortho.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for (a, b) in ortho.iter().zip(&mono) {
            prop_assert!((a - b).norm() <= 1e-10 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn exact_and_float_monomial_hamiltonians_agree(n in 1usize..=10, g in -20i64..20, c in -20i64..20) {
        let model = ExactModel { particles: n, gamma: rat(g, 8), v: rat(1, 1), c: Coupling::Value(rat(c, 8)) };
        let exact = build_hamiltonian_exact(&model).unwrap().to_float(0.0);
        let params = ModelParams::new(n, g as f64 / 8.0, 1.0, c as f64 / 8.0);
        let float = build_hamiltonian(&params, Basis::Monomial).unwrap().to_float(0.0);
        prop_assert!(max_abs(&(exact - float)) <= 1e-13);
    }
}
