use dwlab::game_value::value_exact;
use dwlab::instance_gen::{
    generate_hard_instance, make_block_instance, read_instance, width, write_instance, PolytopeDescriptor,
};
use dwlab::rational::{self, ratio};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn ones(inst: &dwlab::instance_gen::PackingInstance) -> usize {
    inst.a.entries().iter().filter(|v| v.is_one()).count()
}

#[test]
fn small_instance_is_deterministic() {
    let a = generate_hard_instance(4, &ratio(4, 1), 7).unwrap();
    assert_eq!((a.rows(), a.cols()), (4, 2));
    assert!(a.a.is_binary());
    let b = generate_hard_instance(4, &ratio(4, 1), 7).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_json(), b.to_json());
}

/// P[X outside lo..=hi] for X ~ Binomial(n, 1/4), summed term by term.
fn binomial_tail(n: u32, lo: u32, hi: u32) -> f64 {
    let p = 0.25f64;
    let mut term = (1.0 - p).powi(n as i32); // k = 0
    let mut tail = 0.0;
    for k in 0..=n {
        if !(lo..=hi).contains(&k) {
            tail += term;
        }
        term *= (n - k) as f64 / (k + 1) as f64 * p / (1.0 - p);
    }
    tail
}

#[test]
fn density_of_ones_at_m100() {
    // 100 x 10 entries; even 200 draws would leave the band with probability < 1e-3
    assert!(binomial_tail(200, 30, 70) < 1e-3);
    assert!(binomial_tail(1000, 150, 350) < 1e-12);
    for seed in 0..20 {
        let inst = generate_hard_instance(100, &ratio(4, 1), seed).unwrap();
        assert_eq!(inst.a.entries().len(), 1000);
        let frac = ones(&inst) as f64 / 1000.0;
        assert!((0.15..=0.35).contains(&frac), "seed {seed}: {frac}");
    }
    // pinned from the first run
    assert_eq!(ones(&generate_hard_instance(100, &ratio(4, 1), 1).unwrap()), 236);
}

#[test]
fn generated_instance_has_an_exact_solution() {
    let inst = generate_hard_instance(100, &ratio(4, 1), 1).unwrap();
    let cert = value_exact(&inst.a).unwrap();
    assert!(inst.b.iter().all(|b| *b == cert.upper));
    let ax = inst.a.row_payoffs(cert.primal.weights());
    assert!(ax.iter().zip(&inst.b).all(|(l, r)| l <= r));
    assert_eq!(width(&inst).unwrap() * &cert.upper, rational::one());
}

#[test]
fn width_is_bounded_at_m400() {
    for seed in 0..30 {
        let inst = generate_hard_instance(400, &ratio(4, 1), seed).unwrap();
        let w = width(&inst).unwrap();
        assert_eq!(&w * &inst.b[0], rational::one());
        assert!(w <= ratio(32, 1), "seed {seed}");
    }
}

#[test]
fn three_blocks_of_m64() {
    let blocks: Vec<_> = (0..3).map(|s| generate_hard_instance(64, &ratio(4, 1), s).unwrap()).collect();
    let inst = make_block_instance(&blocks).unwrap();
    assert_eq!((inst.rows(), inst.cols()), (192, 24));
    assert_eq!(inst.polytope, PolytopeDescriptor::Product(vec![8, 8, 8]));
    for i in 0..192 {
        for j in 0..24 {
            if i / 64 != j / 8 {
                assert!(inst.a.get(i, j).is_zero(), "({i}, {j})");
            }
        }
    }
    let widest = blocks.iter().map(|b| width(b).unwrap()).max().unwrap();
    assert_eq!(width(&inst).unwrap(), widest);
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = make_block_instance(&[
        generate_hard_instance(16, &ratio(5, 2), 3).unwrap(),
        generate_hard_instance(9, &ratio(3, 1), 4).unwrap(),
    ])
    .unwrap();
    let p = dir.path().join("i.json");
    write_instance(&p, &inst).unwrap();
    assert_eq!(read_instance(&p).unwrap(), inst);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn block_rows_recover_each_block(sizes in proptest::collection::vec(4usize..30, 1..4), seed in 0u64..1000) {
        let blocks: Vec<_> = sizes
            .iter()
            .enumerate()
            .map(|(k, &m)| generate_hard_instance(m, &ratio(4, 1), seed + k as u64).unwrap())
            .collect();
        let inst = make_block_instance(&blocks).unwrap();
        let (mut r0, mut c0) = (0, 0);
        for blk in &blocks {
            let rows: Vec<usize> = (r0..r0 + blk.rows()).collect();
            let sub = inst.a.row_submatrix(&rows).unwrap();
            for i in 0..blk.rows() {
                for j in 0..inst.cols() {
                    let inside = (c0..c0 + blk.cols()).contains(&j);
                    let expected = if inside { blk.a.get(i, j - c0).clone() } else { rational::zero() };
                    prop_assert_eq!(sub.get(i, j), &expected);
                }
            }
            prop_assert_eq!(&inst.b[r0..r0 + blk.rows()], &blk.b[..]);
            r0 += blk.rows();
            c0 += blk.cols();
        }
    }

    #[test]
    fn generation_is_deterministic(m in 4usize..80, seed in any::<u64>(), num in 5i64..40) {
        let rho = ratio(num, 2);
        prop_assert_eq!(generate_hard_instance(m, &rho, seed).unwrap(), generate_hard_instance(m, &rho, seed).unwrap());
    }
}
