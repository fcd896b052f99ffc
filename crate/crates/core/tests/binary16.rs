use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tpfem::precision::{ec_split, from_half, to_half, Binary16};

const FIXTURE: &str = include_str!("fixtures/binary16_reference.txt");

fn fixture_cases() -> Vec<(u32, u16)> {
    FIXTURE
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let mut it = l.split_whitespace();
            let x = u32::from_str_radix(it.next().unwrap(), 16).unwrap();
            let h = u16::from_str_radix(it.next().unwrap(), 16).unwrap();
            (x, h)
        })
        .collect()
}

#[test]
fn reference_vectors_agree() {
    let cases = fixture_cases();
    assert!(cases.len() >= 10_000);
    let mismatches: Vec<_> = cases
        .iter()
        .filter(|&&(x, h)| to_half(f32::from_bits(x)).to_bits() != h)
        .collect();
    assert!(mismatches.is_empty(), "{} mismatches, first {:x?}", mismatches.len(), &mismatches[..1]);
}

#[test]
fn reference_vectors_cover_edge_classes() {
    let cases = fixture_cases();
    let subnormal = cases.iter().filter(|(_, h)| Binary16::from_bits(*h).is_subnormal()).count();
    let overflow = cases.iter().filter(|(x, h)| f32::from_bits(*x).is_finite() && *h & 0x7FFF == 0x7C00).count();
    assert!(subnormal > 1000);
    assert!(overflow > 10);
    assert!(cases.iter().any(|&(x, h)| x == 65520f32.to_bits() && h == 0x7C00));
}

#[test]
fn ec_reconstruction_bound_on_random_normals() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100_000 {
        let e: f32 = rng.random_range(-14.0..15.999);
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let x = (sign * 2f32.powf(e)).clamp(-65504.0, 65504.0);
        let p = ec_split(x).unwrap();
        let err = (p.reconstruct() - x as f64).abs();
        assert!(err <= 2f64.powi(-20) * (x as f64).abs(), "x = {x}, err = {err}");
    }
}

proptest! {
    #[test]
    fn rounding_is_idempotent(bits in any::<u32>()) {
        let x = f32::from_bits(bits);
        let h = to_half(x);
        if !h.is_nan() {
            prop_assert_eq!(to_half(from_half(h)).to_bits(), h.to_bits());
        }
    }

    #[test]
    fn rounding_is_monotone(a in -70000f32..70000f32, b in -70000f32..70000f32) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(from_half(to_half(lo)) <= from_half(to_half(hi)));
    }

    #[test]
    fn rounding_picks_a_nearest_half(x in -65504f32..65504f32) {
        let h = from_half(to_half(x)) as f64;
        let bits = to_half(x).to_bits();
        for nb in [bits.wrapping_sub(1), bits.wrapping_add(1)] {
            let n = from_half(Binary16::from_bits(nb));
            if n.is_finite() {
                prop_assert!((h - x as f64).abs() <= (n as f64 - x as f64).abs());
            }
        }
    }

    #[test]
    fn rounding_is_odd_symmetric(x in any::<f32>()) {
        prop_assume!(!x.is_nan());
        prop_assert_eq!(to_half(-x).to_bits(), to_half(x).to_bits() ^ 0x8000);
    }
}
