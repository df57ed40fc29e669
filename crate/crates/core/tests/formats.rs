use proptest::prelude::*;
use xdual_core::io::{parse_instances, parse_model, serialize_model, write_instances};
use xdual_core::synth::{random_ensemble, random_instances, random_tree_model, TreeParams};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn tree_models_round_trip(seed in any::<u64>()) {
        let m = random_tree_model(seed, &TreeParams::default());
        let text = serialize_model(&m);
        let back = parse_model(&text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(serialize_model(&back), text);
    }

    #[test]
    fn ensembles_round_trip(seed in any::<u64>()) {
        let m = random_ensemble(seed, 5, 3, 2, 2, 100_000);
        let text = serialize_model(&m);
        prop_assert_eq!(parse_model(&text).unwrap(), m);
    }

    #[test]
    fn instance_csv_round_trips(seed in any::<u64>()) {
        let m = random_tree_model(seed, &TreeParams::default());
        let xs = random_instances(seed, m.space(), 4);
        let rows = parse_instances(&write_instances(m.space(), &xs), m.space()).unwrap();
        prop_assert_eq!(rows.iter().map(|r| r.row).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        prop_assert_eq!(rows.into_iter().map(|r| r.instance).collect::<Vec<_>>(), xs);
    }
}
