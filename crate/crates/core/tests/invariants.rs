mod common;

use common::*;
use irbm::checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
use irbm::data_io::{decode_packed, encode_packed, Dataset};
use irbm::energy::{free_energy, irbm_zv_log_partition, p_z_given_v};
use irbm::gradients::free_energy_grads;
use irbm::model::{ModelParams, Variant};
use irbm::RngStream;
use proptest::prelude::*;

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::Rbm), Just(Variant::Orbm), Just(Variant::Irbm)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn free_energy_matches_enumeration(variant in variant(), d in 1usize..6, k in 1usize..4, seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 0);
        let p = random_model(variant, d, k, 2.0, &mut rng);
        let v = random_binary(d, &mut rng);
        let f = free_energy(&p, &v).unwrap();
        prop_assert!(rel_err(-f, brute_neg_free_energy(&p, &v)) < 1e-11);
    }

    #[test]
    fn z_posterior_is_normalized_and_matches_ratio(ordered in prop_oneof![Just(Variant::Orbm), Just(Variant::Irbm)],
                                                   d in 1usize..6, k in 1usize..5, seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 0);
        let p = random_model(ordered, d, k, 2.0, &mut rng);
        let v = random_binary(d, &mut rng);
        let dist = p_z_given_v(&p, &v).unwrap();
        let total: f64 = dist.probs.iter().sum::<f64>() + dist.tail_mass;
        prop_assert!((total - 1.0).abs() < 1e-12);
        let log_norm = -brute_neg_free_energy(&p, &v);
        for (z, &prob) in dist.probs.iter().enumerate() {
            let expected = (brute_neg_free_energy_vz(&p, &v, z + 1) + log_norm).exp();
            prop_assert!((prob - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_trailing_unit_leaves_irbm_unchanged(d in 1usize..6, l in 0usize..4, seed in any::<u64>()) {
        // appending an all-zero unit moves it from the implicit tail into the
        // explicit prefix without changing the distribution
        let mut rng = RngStream::new(seed, 0);
        let p = random_model(Variant::Irbm, d, l, 2.0, &mut rng);
        let mut grown = p.clone();
        grown.grow_hidden_unit().unwrap();
        let v = random_binary(d, &mut rng);
        let a = irbm_zv_log_partition(&p, &v).unwrap();
        let b = irbm_zv_log_partition(&grown, &v).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        let ga = free_energy_grads(&p, &v).unwrap();
        let gb = free_energy_grads(&grown, &v).unwrap();
        prop_assert!((ga.visible_bias.iter().zip(&gb.visible_bias)).all(|(x, y)| (x - y).abs() < 1e-12));
        let mut shrunk = grown.clone();
        prop_assert_eq!(shrunk.shrink_trailing_zero_units().unwrap() >= 1, true);
        prop_assert_eq!(shrunk.num_hidden() <= p.num_hidden(), true);
    }

    #[test]
    fn packed_round_trip(rows in 1usize..20, dims in 1usize..20, seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 0);
        let bits: Vec<u8> = (0..rows * dims).map(|_| rng.bernoulli(0.5) as u8).collect();
        let data = Dataset::new(rows, dims, bits).unwrap();
        prop_assert_eq!(decode_packed(&encode_packed(&data)).unwrap(), data);
    }

    #[test]
    fn checkpoint_round_trip_is_bit_exact(variant in variant(), d in 1usize..6, k in 1usize..5, seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 0);
        let p = random_model(variant, d, k, 1e3, &mut rng);
        let dir = tempfile::tempdir().unwrap();
        let ckpt = Checkpoint::from_params(p, seed);
        save_checkpoint(dir.path(), &ckpt).unwrap();
        let back = load_checkpoint(dir.path()).unwrap();
        let bits = |m: &ModelParams| m.weights.as_slice().iter().chain(&m.visible_bias).chain(&m.hidden_bias).map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&back.params), bits(&ckpt.params));
    }
}
