use phasecov_core::qubit::{self, QubitCloneSpec};
use phasecov_core::qutrit::{self, QutritCloneSpec};
use phasecov_core::{ChoiOperator, Criterion, System};

fn qubit_map(n: usize, m: usize, c: Criterion) -> ChoiOperator {
    qubit::optimal_map(QubitCloneSpec::new(n, m, c).unwrap()).unwrap()
}

fn qutrit_map(m: usize, c: Criterion) -> ChoiOperator {
    qutrit::optimal_map_qutrit(QutritCloneSpec::new(m, c).unwrap()).unwrap()
}

#[test]
fn same_parity_global_matches_closed_form() {
    for n in 1..10 {
        for m in (n + 2..=10).step_by(2) {
            let spec = QubitCloneSpec::new(n, m, Criterion::Global).unwrap();
            let closed = qubit::closed_form_global_fidelity(spec).unwrap();
            let built = qubit::optimal_map(spec).unwrap().global_fidelity();
            assert!((closed - built).abs() < 1e-12, "{n}->{m}: {closed} vs {built}");
        }
    }
}

#[test]
fn each_map_wins_under_its_own_criterion() {
    for n in 1..10 {
        for m in n + 1..=10 {
            let g = qubit_map(n, m, Criterion::Global);
            let s = qubit_map(n, m, Criterion::SingleParticle);
            assert!(s.single_particle_fidelity() >= g.single_particle_fidelity() - 1e-12, "{n}->{m}");
            assert!(g.global_fidelity() >= s.global_fidelity() - 1e-12, "{n}->{m}");
            let same = (m - n) % 2 == 0;
            assert_eq!(g.same_blocks(&s, 1e-12), same, "{n}->{m}");
        }
    }
}

#[test]
fn fidelities_do_not_increase_with_more_copies() {
    for n in 1..=4 {
        for c in [Criterion::Global, Criterion::SingleParticle] {
            let values: Vec<f64> = (n..=10).map(|m| qubit_map(n, m, c).fidelity(c)).collect();
            for w in values.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "{n} {c:?}: {values:?}");
            }
        }
    }
}

#[test]
fn single_copy_approaches_estimation_limit() {
    for m in (3..=101).step_by(2) {
        let f = qubit::closed_form_single_fidelity(QubitCloneSpec::new(1, m, Criterion::SingleParticle).unwrap()).unwrap();
        assert!((f - 0.75).abs() < 1.5 / m as f64);
    }
}

#[test]
fn opposite_parity_pairs_sum_to_two() {
    for n in 1..=5 {
        for m in (n + 1..=11).step_by(2) {
            for c in [Criterion::Global, Criterion::SingleParticle] {
                let op = qubit_map(n, m, c);
                let low = op.blocks()[0].coeffs();
                let high = op.blocks()[1].coeffs();
                for j in 0..=n {
                    assert!((low[j] - high[n - j]).abs() < 1e-15);
                    assert!((low[j] * low[j] + low[n - j] * low[n - j] - 2.0).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn qutrit_maps_are_valid_and_symmetric() {
    for m in 1..=9 {
        for c in [Criterion::Global, Criterion::SingleParticle] {
            let op = qutrit_map(m, c);
            assert!(op.trace_residual() < 1e-12);
            if m % 3 != 1 {
                let parts = op.block_contributions(c).unwrap();
                assert!(parts.iter().all(|p| (p - parts[0]).abs() < 1e-12));
            }
            if let Some(closed) = qutrit::closed_form_qutrit_fidelity(QutritCloneSpec::new(m, c).unwrap()) {
                assert!((closed - op.fidelity(c)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn qutrit_single_particle_converges_downwards() {
    let f: Vec<f64> = (2..=12).map(|m| qutrit_map(m, Criterion::SingleParticle).single_particle_fidelity()).collect();
    let limit = 5.0 / 9.0;
    for w in f.windows(2) {
        assert!(w[1] <= w[0]);
        assert!(w[1] > limit);
    }
    // The decrements follow a period-three pattern; they shrink along each
    // residue class of M.
    let d: Vec<f64> = f.windows(2).map(|w| w[0] - w[1]).collect();
    for i in 0..d.len() - 3 {
        assert!(d[i + 3] < d[i], "{d:?}");
    }
}

#[test]
fn qutrit_below_qubit() {
    for m in 2..=12 {
        for c in [Criterion::Global, Criterion::SingleParticle] {
            let t = qutrit_map(m, c).fidelity(c);
            let q = qubit_map(1, m, c).fidelity(c);
            assert!(t < q, "M={m} {c:?}: {t} vs {q}");
        }
    }
}

#[test]
fn identity_channel_is_optimal_without_copies_to_make() {
    for c in [Criterion::Global, Criterion::SingleParticle] {
        assert!(qubit_map(3, 3, c).same_blocks(&ChoiOperator::identity(System::Qubit, 3).unwrap(), 0.0));
        assert!(qutrit_map(1, c).same_blocks(&ChoiOperator::identity(System::Qutrit, 1).unwrap(), 0.0));
    }
}
