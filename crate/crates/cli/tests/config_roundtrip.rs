use proptest::prelude::*;

use icflow_cli::config::parse_config;

fn initial() -> impl Strategy<Value = String> {
    prop_oneof![
        (0.1f64..5.0).prop_map(|r| format!("sphere {r}")),
        (0.1f64..5.0, 0.2f64..3.0).prop_map(|(a, c)| format!("ellipsoid {a} {c}")),
        (0.5f64..3.0, prop::collection::vec((1u32..6, -0.1f64..0.1), 0..3)).prop_map(|(r, modes)| {
            let m: Vec<String> = modes.iter().map(|(k, a)| format!("{k}:{a}")).collect();
            format!("perturbed_sphere {r} {}", m.join(","))
        }),
    ]
}

fn config_text() -> impl Strategy<Value = String> {
    (
        0.1f64..3.0,
        prop_oneof![Just("sigma_k:1"), Just("sigma_k:2"), Just("harmonic")],
        initial(),
        any::<bool>(),
        16usize..128,
        prop::option::of(0.05f64..0.5),
        prop::option::of(0.1f64..2.0),
        prop::option::of("[a-z]{1,8}"),
        any::<u64>(),
    )
        .prop_map(|(p, f, init, full, nt, safety, interval, ck, seed)| {
            let mut text = format!("p = {p}\nF = {f}\ninitial = {init}\n# comment\n");
            if full {
                text.push_str(&format!("mode = full2d\nN_theta = {nt}\n"));
            } else {
                text.push_str(&format!("N_theta = {nt}\n"));
            }
            if let Some(s) = safety {
                text.push_str(&format!("safety = {s}\n"));
            }
            if let Some(i) = interval {
                text.push_str(&format!("sample_interval = {i}\ntheta_end = {}\n", 10.0 + i));
            }
            if let Some(dir) = ck {
                text.push_str(&format!("checkpoint_dir = {dir}\ncheckpoint_every = 1.5\n"));
            }
            text.push_str(&format!("seed = {seed}\n"));
            text
        })
}

proptest! {
    #[test]
    fn canonical_form_is_a_fixed_point(text in config_text()) {
        let cfg = parse_config(&text).unwrap();
        let canonical = cfg.to_canonical();
        let again = parse_config(&canonical).unwrap();
        prop_assert_eq!(&again, &cfg);
        prop_assert_eq!(again.to_canonical(), canonical);
    }
}
