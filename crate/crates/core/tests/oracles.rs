//! Main engines against independent oracles.

use qic_core::field_kernel::oracle::{mode_function_oracle, pairing_oracle};
use qic_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn origin(d: Dimension) -> Vec<f64> {
    vec![0.0; d.get()]
}

fn scenario_smearings(d: Dimension) -> Vec<RadialSmearing> {
    vec![
        RadialSmearing::gaussian(0.2, origin(d)).unwrap(),
        RadialSmearing::hard_shell(0.0, 1.0, origin(d)).unwrap(),
        RadialSmearing::hard_shell(0.0, 0.9, origin(d)).unwrap(),
        RadialSmearing::hard_shell(1.1, 2.9, origin(d)).unwrap(),
        RadialSmearing::hard_shell(3.1, 4.0, origin(d)).unwrap(),
    ]
}

#[test]
fn radial_transform_matches_spatial_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for d in [Dimension::Two, Dimension::Three] {
        let smearings = scenario_smearings(d);
        for n in 0..100 {
            let s = &smearings[n % smearings.len()];
            let k = 10f64.powf(rng.gen_range(-3.0..1.5));
            let mut kv = origin(d);
            kv[0] = k;
            let fast = radial_ft(s, k).unwrap();
            let slow = ft_oracle(s, &kv).unwrap();
            let scale = radial_ft(s, 0.0).unwrap().abs();
            assert!(
                (fast - slow.re).abs() <= 1e-8 * scale && slow.im.abs() <= 1e-8 * scale,
                "{d:?} {:?} k={k}: {fast} vs {slow}",
                s.kind()
            );
        }
    }
}

fn table_generators(d: Dimension) -> Vec<Generator> {
    let sc = table1_scenario(d);
    let mut g = vec![sc.alice.clone()];
    g.extend(sc.bobs.iter().cloned());
    g
}

#[test]
fn pairings_agree_with_dual_quadrature() {
    let opts = KernelOptions::default();
    for d in [Dimension::Two, Dimension::Three] {
        let mut sets = vec![table_generators(d), shockwave_scenario(d)];
        // gaussian against hard shell
        let mut mixed = single_qic_scenario(d);
        mixed.push(table_generators(d)[2].clone());
        sets.push(mixed);
        for gens in sets {
            for i in 0..gens.len() {
                for j in i..gens.len() {
                    let fast = pairing(&gens[i], &gens[j], &opts).unwrap();
                    let slow = pairing_oracle(&gens[i], &gens[j]).unwrap();
                    let sii = pairing(&gens[i], &gens[i], &opts).unwrap().value.re;
                    let sjj = pairing(&gens[j], &gens[j], &opts).unwrap().value.re;
                    let scale = (sii * sjj).sqrt();
                    let diff = (fast.value - slow.value).norm();
                    assert!(diff <= 1e-8 * scale, "{d:?} ({i},{j}): {} vs {} ({diff:e})", fast.value, slow.value);
                }
            }
        }
    }
}

#[test]
fn closed_form_and_quadrature_pairings_agree() {
    let closed = KernelOptions::default();
    let quad = KernelOptions::default().quadrature_only();
    let gens = shockwave_scenario(Dimension::Three);
    for i in 0..3 {
        for j in 0..3 {
            let a = pairing(&gens[i], &gens[j], &closed).unwrap().value;
            let b = pairing(&gens[i], &gens[j], &quad).unwrap().value;
            assert!((a - b).norm() <= 1e-10 * pairing(&gens[i], &gens[i], &closed).unwrap().value.norm());
        }
    }
}

#[test]
fn time_derivative_matches_finite_differences() {
    let opts = KernelOptions::default();
    let h = 1e-4;
    for d in [Dimension::Two, Dimension::Three] {
        let mut gens = single_qic_scenario(d);
        gens.push(table_generators(d)[0].clone());
        for g in &gens {
            for (t, r) in [(1.0, 0.5), (2.0, 1.7), (4.0, 3.9), (3.0, 0.0), (0.5, 2.5)] {
                let mut x = origin(d);
                x[0] = r;
                let dt = mode_function_dt(g, t, &x, &opts).unwrap().value;
                let plus = mode_function(g, t + h, &x, &opts).unwrap().value;
                let minus = mode_function(g, t - h, &x, &opts).unwrap().value;
                let fd = (plus - minus) / (2.0 * h);
                let scale = dt.norm().max(1.0);
                assert!((dt - fd).norm() <= 1e-6 * scale, "{d:?} t={t} r={r}: {dt} vs {fd}");
            }
        }
    }
}

#[test]
fn mode_functions_agree_with_oracle() {
    let opts = KernelOptions::default();
    for d in [Dimension::Two, Dimension::Three] {
        let g = &table_generators(d)[0];
        for (t, r, deriv) in [(2.0, 0.5, false), (2.0, 2.5, true), (1.0, 3.5, false)] {
            let mut x = origin(d);
            x[0] = r;
            let fast = if deriv { mode_function_dt(g, t, &x, &opts) } else { mode_function(g, t, &x, &opts) };
            let fast = fast.unwrap().value;
            let slow = mode_function_oracle(g, t, &x, deriv).unwrap().value;
            assert!((fast - slow).norm() <= 1e-8 * fast.norm().max(1.0), "{d:?} {t} {r}: {fast} vs {slow}");
        }
    }
}
