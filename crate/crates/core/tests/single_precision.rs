use quantum_gas::diaphragm;
use quantum_gas::linalg::StateVector;
use quantum_gas::quantum::{mixture_eigen_instrument, DensityMatrix};
use quantum_gas::thermo::GasContents;
use quantum_gas::{DensityMatrix32, GasChamber32};

#[test]
fn example_two_in_f32() {
    let zp: DensityMatrix32 = DensityMatrix::pure(&StateVector::from_real(&[1.0f32, 0.0]).unwrap()).unwrap();
    let xp = DensityMatrix::pure(&StateVector::from_real(&[1.0f32, 1.0]).unwrap()).unwrap();
    let (lambda, inst) = mixture_eigen_instrument(&[0.5f32, 0.5], &[zp, xp]).unwrap();
    let gas = GasChamber32::new("gas", 1.0, 1.0, 1.0, GasContents::pure(lambda)).unwrap();
    let sep = diaphragm::separate(&gas, &inst).unwrap();
    let lp = (2.0 + 2f64.sqrt()) / 4.0;
    let lm = 1.0 - lp;
    let exact = lp * lp.ln() + lm * lm.ln();
    assert!((sep.heat as f64 - exact).abs() < 1e-5, "{}", sep.heat);
    assert!((sep.chambers[0].volume as f64 - lp).abs() < 1e-5);

    let back = diaphragm::mix(&sep.chambers, true, "gas").unwrap();
    assert!((back.heat + sep.heat).abs() < 1e-5);
}
