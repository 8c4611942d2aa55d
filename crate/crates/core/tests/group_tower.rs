use congruence_kernel::group::{Extended, GroupParams, GroupTable};
use congruence_kernel::rng;
use rand::Rng;

fn depth_sum(a: Extended, b: Extended) -> Extended {
    match (a, b) {
        (Extended::Finite(x), Extended::Finite(y)) => Extended::Finite(x + y),
        _ => Extended::Infinite,
    }
}

#[test]
fn commutators_and_powers_raise_depth() {
    for (p, d, u, t) in [(2, 2, 2, 4), (3, 2, 1, 3), (3, 1, 1, 5), (5, 1, 1, 3)] {
        let params = GroupParams::new(p, d, u).unwrap();
        let table = GroupTable::new(params, t).unwrap();
        let mut rng = rng::stream(3, rng::tags::SAMPLING);
        for _ in 0..200 {
            let g = table.element(rng.gen_range(0..table.order()));
            let h = table.element(rng.gen_range(0..table.order()));
            let c = params.commutator(&g, &h).unwrap();
            let bound = depth_sum(params.depth(&g), params.depth(&h)).min(Extended::Finite(t as u64));
            assert!(params.depth(&c) >= bound, "depth of [g,h] at {params:?}");
            let gp = params.pow_p(&g);
            let up = match params.depth(&g) {
                Extended::Finite(x) => Extended::Finite((x + 1).min(t as u64)),
                e => e,
            };
            assert!(params.depth(&gp) >= up);
        }
    }
}

#[test]
fn group_axioms_on_samples() {
    let params = GroupParams::new(2, 2, 2).unwrap();
    let table = GroupTable::new(params, 3).unwrap();
    let one = params.identity(3).unwrap();
    let mut rng = rng::stream(4, rng::tags::SAMPLING);
    for _ in 0..100 {
        let a = table.element(rng.gen_range(0..table.order()));
        let b = table.element(rng.gen_range(0..table.order()));
        let c = table.element(rng.gen_range(0..table.order()));
        let ab_c = params.mul(&params.mul(&a, &b).unwrap(), &c).unwrap();
        let a_bc = params.mul(&a, &params.mul(&b, &c).unwrap()).unwrap();
        assert_eq!(ab_c, a_bc);
        assert_eq!(params.mul(&a, &params.inv(&a)).unwrap(), one);
        assert_eq!(params.inv(&params.inv(&a)), a);
        assert_eq!(params.mul(&a, &one).unwrap(), a);
    }
}

#[test]
fn index_round_trip_and_projection() {
    let params = GroupParams::new(3, 1, 1).unwrap();
    let table = GroupTable::new(params, 3).unwrap();
    for i in 0..table.order() {
        assert_eq!(table.index(&table.element(i)), i);
    }
    let g = params.generator(0, 0, 3).unwrap();
    let down = params.project(&g, 2).unwrap();
    assert_eq!(down, params.generator(0, 0, 2).unwrap());
    assert_eq!(params.project(&params.lift(&down, 3).unwrap(), 2).unwrap(), down);
}

#[test]
fn depth_profile_counts_layers() {
    let params = GroupParams::new(2, 2, 2).unwrap();
    let table = GroupTable::new(params, 3).unwrap();
    let profile = table.depth_profile();
    assert_eq!(profile.iter().sum::<u64>(), 256);
}
