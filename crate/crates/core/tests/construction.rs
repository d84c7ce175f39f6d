use walsh_greedy::counterexample::GhSplit;
use walsh_greedy::{
    assemble_expansion, choose_m_nu, choose_sequences, dirichlet_step, greedy_approximant,
    lebesgue_constant, quasi_greedy_scan, split_g_h, walsh_step, BlockSpec, ConstructionConfig,
    Expansion, Rational,
};

fn specs(v: usize) -> Vec<BlockSpec> {
    choose_sequences(&ConstructionConfig::minimal(v))
        .unwrap()
        .iter()
        .map(|s| choose_m_nu(s).unwrap())
        .collect()
}

fn setup(v: usize) -> (Vec<BlockSpec>, Expansion) {
    let s = specs(v);
    let e = assemble_expansion(&s).unwrap();
    (s, e)
}

#[test]
fn block_partial_sums_factor_through_the_kernel() {
    // sum_{i<m} W_{2^k+i} = W_{2^k} D_m on every grid that resolves the block.
    for spec in specs(4) {
        let level = spec.level();
        let w = walsh_step(spec.start, level).unwrap();
        for m in [1, 2, spec.m_nu.unwrap(), spec.block_len] {
            let direct = walsh_greedy::walsh::synthesize(
                (0..m).map(|i| (spec.start + i, Rational::one())),
                level,
            )
            .unwrap();
            let factored = w
                .pointwise_product(&dirichlet_step(m, level).unwrap())
                .unwrap();
            assert_eq!(direct, factored, "k={} m={m}", spec.k_nu);
        }
    }
}

#[test]
fn leading_part_of_the_gap_is_a_scaled_kernel() {
    // The 1/nu^2 part of the gap has norm L(m_nu)/nu^2 exactly.
    for spec in &specs(4)[1..] {
        let level = spec.level();
        let m = spec.m_nu.unwrap();
        let j1 = walsh_greedy::walsh::synthesize(
            (0..m).map(|i| (spec.start + i, Rational::inverse_square(spec.nu))),
            level,
        )
        .unwrap();
        assert_eq!(
            j1.l1_norm(),
            lebesgue_constant(m) * Rational::inverse_square(spec.nu)
        );
    }
}

#[test]
fn g_is_the_sum_of_scaled_block_kernels() {
    let s = specs(3);
    let level = s[2].level();
    let GhSplit { g, h_mass, h_bound } = split_g_h(&s, level).unwrap();
    let direct = walsh_greedy::walsh::synthesize(
        s.iter().flat_map(|b| {
            (0..b.block_len).map(move |i| (b.start + i, Rational::inverse_square(b.nu)))
        }),
        level,
    )
    .unwrap();
    assert_eq!(g, direct);
    assert!(h_mass < h_bound);
    assert!(split_g_h(&s, level - 1).is_err());
}

#[test]
fn f_minus_g_has_small_norm() {
    let (s, e) = setup(3);
    let level = s[2].level();
    let f = greedy_approximant(&e, e.len(), level).unwrap();
    let split = split_g_h(&s, level).unwrap();
    let h = (&f.step - &split.g).l1_norm();
    assert!(h <= split.h_mass);
}

#[test]
fn quasi_greedy_ratio_on_four_blocks() {
    let (s, e) = setup(4);
    let scan = quasi_greedy_scan(&e, s[3].level()).unwrap();
    // Recorded, not bounded: the truncation is a finite sum.
    println!(
        "V=4 quasi-greedy scan: ratio {:.6} at m = {}, ||f||_1 = {:.6}, remainder <= {:.3e}",
        scan.ratio.to_f64(),
        scan.argmax,
        scan.f_norm.to_f64(),
        scan.remainder.to_f64()
    );
    assert!(scan.ratio >= Rational::one());
    assert!(scan.argmax <= e.len());
}
