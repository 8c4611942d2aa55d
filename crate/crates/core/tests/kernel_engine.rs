use congruence_kernel::algebra::{CoefficientDomain, GroupAlgebra, Scalar};
use congruence_kernel::group::{GroupParams, GroupTable};
use congruence_kernel::kernel::{left_mult_matrix, Confidence, KernelEngine, Method, OperatorMatrix};
use num_bigint::BigInt;
use num_rational::BigRational;

fn q(n: i64, d: i64) -> Scalar {
    Scalar::Rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
}

#[test]
fn group_elements_act_invertibly() {
    let params = GroupParams::new(3, 1, 1).unwrap();
    let table = GroupTable::new(params, 3).unwrap();
    for domain in [CoefficientDomain::PrimeField { p: 3 }, CoefficientDomain::Rationals, CoefficientDomain::PrimePower { p: 3, n: 2 }] {
        let alg = GroupAlgebra::new(table.clone(), domain).unwrap();
        let g = alg.embed(&params.generator(0, 0, 3).unwrap());
        let m = left_mult_matrix(&[vec![g]], &table).unwrap();
        let r = KernelEngine::new(0).kernel_dim(&m).unwrap();
        assert_eq!(r.kernel_dim, 0, "{domain}");
        assert_eq!(r.confidence, Confidence::Exact);
    }
}

#[test]
fn left_multiplication_is_functorial() {
    let params = GroupParams::new(2, 2, 2).unwrap();
    let table = GroupTable::new(params, 2).unwrap();
    let alg = GroupAlgebra::new(table.clone(), CoefficientDomain::Rationals).unwrap();
    let a = alg.add(&alg.embed(&params.generator(0, 1, 2).unwrap()), &alg.scalar(q(1, 2))).unwrap();
    let b = alg.sub(&alg.embed(&params.generator(1, 0, 2).unwrap()), &alg.scalar(q(3, 1))).unwrap();
    let ab = alg.convolve(&a, &b).unwrap();
    let ma = left_mult_matrix(&[vec![a]], &table).unwrap();
    let mb = left_mult_matrix(&[vec![b]], &table).unwrap();
    let mab = left_mult_matrix(&[vec![ab]], &table).unwrap();
    assert_eq!(ma.compose(&mb).unwrap().to_dense(), mab.to_dense());
}

#[test]
fn multimodular_agrees_with_fraction_free() {
    let rows: Vec<Vec<Scalar>> = (0..30)
        .map(|i| (0..25).map(|j| q(((i * 7 + j * 3) % 11) - 5 + (i % 3) * (j % 4), 1 + (i % 3))).collect())
        .collect();
    let m = OperatorMatrix::from_rows(CoefficientDomain::Rationals, &rows).unwrap();
    let exact = KernelEngine::new(1).kernel_dim(&m).unwrap();
    let modular = KernelEngine::new(1).with_cutover(0).kernel_dim(&m).unwrap();
    assert_eq!(exact.method, Method::FractionFree);
    assert_eq!(modular.method, Method::MultiModular);
    assert_eq!(modular.confidence, Confidence::HighProbability);
    assert_eq!(exact.rank, modular.rank);
}

#[test]
fn export_import_round_trip() {
    let rows = vec![vec![Scalar::Residue(0), Scalar::Residue(5)], vec![Scalar::Residue(3), Scalar::Residue(0)]];
    let m = OperatorMatrix::from_rows(CoefficientDomain::PrimePower { p: 3, n: 2 }, &rows).unwrap();
    let back = OperatorMatrix::import(&m.export()).unwrap();
    assert_eq!(back.to_dense(), m.to_dense());
    assert_eq!(KernelEngine::new(0).kernel_dim(&back).unwrap().kernel_dim, 0);
}
