use proptest::prelude::*;

use vissig::path::{PiecewiseLinearPath, Stream};
use vissig::pipeline::{extract, FeatureKind, RunConfig, StreamRecord};
use vissig::signature::signature;
use vissig::tensor::{word_count, TensorSeries, Word};
use vissig::theorems::{check_general1, check_general2, check_preservation, with_spur};
use vissig::transforms::{
    lead_lag, visibility_discrete, visibility_lift, visibility_prefix_path, visibility_suffix_path, TransformSpec,
    Visibility,
};

fn series(alphabet: usize, depth: usize) -> impl Strategy<Value = TensorSeries> {
    let n = 1 + word_count(alphabet, depth);
    prop::collection::vec(-2.0..2.0f64, n)
        .prop_map(move |v| TensorSeries::unflatten(alphabet, depth, &v, true).unwrap())
}

fn shape() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=3, 1usize..=4)
}

fn path_strategy(dim: usize, max_knots: usize) -> impl Strategy<Value = PiecewiseLinearPath> {
    prop::collection::vec(prop::collection::vec(-2.0..2.0f64, dim), 1..=max_knots)
        .prop_map(|points| PiecewiseLinearPath::from_points(points).unwrap())
}

fn any_path() -> impl Strategy<Value = PiecewiseLinearPath> {
    (1usize..=3).prop_flat_map(|d| path_strategy(d, 7))
}

fn close(a: &TensorSeries, b: &TensorSeries, tol: f64) -> bool {
    a.max_abs_diff(b).unwrap() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_product_is_associative(
        (a, b, c) in shape().prop_flat_map(|(d, p)| (series(d, p), series(d, p), series(d, p)))
    ) {
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(close(&left, &right, 1e-12));
    }

    #[test]
    fn unit_laws_are_exact(a in shape().prop_flat_map(|(d, p)| series(d, p))) {
        let u = TensorSeries::unit(a.alphabet(), a.depth());
        prop_assert_eq!(&u.mul(&a).unwrap(), &a);
        prop_assert_eq!(&a.mul(&u).unwrap(), &a);
    }

    #[test]
    fn log_inverts_exp(a in shape().prop_flat_map(|(d, p)| series(d, p))) {
        let mut v = a.flatten(true);
        v[0] = 0.0;
        let x = TensorSeries::unflatten(a.alphabet(), a.depth(), &v, true).unwrap();
        let back = x.exp().unwrap().log().unwrap();
        prop_assert!(close(&back, &x, 1e-10));
        prop_assert_eq!(back.constant(), 0.0);
    }

    #[test]
    fn product_is_graded(
        (a, b, level) in shape().prop_flat_map(|(d, p)| (series(d, p), series(d, p), 0..=p))
    ) {
        // zeroing every level above `level` leaves levels up to `level` unchanged
        let cut = |t: &TensorSeries| TensorSeries::from_fn(t.alphabet(), t.depth(), |w| {
            if w.len() <= level { t.coeff(w).unwrap() } else { 0.0 }
        });
        let full = a.mul(&b).unwrap();
        let partial = cut(&a).mul(&cut(&b)).unwrap();
        for k in 0..=level {
            prop_assert_eq!(full.level(k), partial.level(k));
        }
    }

    #[test]
    fn flatten_unflatten_round_trip(a in shape().prop_flat_map(|(d, p)| series(d, p)), with_constant in any::<bool>()) {
        let v = a.flatten(with_constant);
        prop_assert_eq!(v.len(), word_count(a.alphabet(), a.depth()) + usize::from(with_constant));
        let back = TensorSeries::unflatten(a.alphabet(), a.depth(), &v, with_constant).unwrap();
        prop_assert_eq!(back.flatten(with_constant), v);
    }

    #[test]
    fn concatenation_is_associative_on_signatures(
        (x, y, z, depth) in (1usize..=3).prop_flat_map(|d| (path_strategy(d, 5), path_strategy(d, 5), path_strategy(d, 5), 1usize..=5))
    ) {
        let y = y.translate(&offset(y.initial(), x.tail())).unwrap();
        let z = z.translate(&offset(z.initial(), y.tail())).unwrap();
        let left = signature(&x.concat(&y).unwrap().concat(&z).unwrap(), depth);
        let right = signature(&x.concat(&y.concat(&z).unwrap()).unwrap(), depth);
        prop_assert!(close(&left, &right, 1e-12));
    }

    #[test]
    fn reversal_of_concatenation(
        (x, y, depth) in (1usize..=3).prop_flat_map(|d| (path_strategy(d, 5), path_strategy(d, 5), 1usize..=4))
    ) {
        let y = y.translate(&offset(y.initial(), x.tail())).unwrap();
        let lhs = signature(&x.concat(&y).unwrap().reverse(), depth);
        let rhs = signature(&y.reverse().concat(&x.reverse()).unwrap(), depth);
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn reverse_is_an_involution(x in any_path()) {
        prop_assert_eq!(x.reverse().reverse(), x);
    }

    #[test]
    fn signature_ignores_translation_and_refinement(
        x in any_path(), shift in prop::collection::vec(-2.0..2.0f64, 3), m in prop::sample::select(vec![2usize, 3, 7])
    ) {
        let s = signature(&x, 4);
        let moved = x.translate(&shift[..x.dim()]).unwrap();
        prop_assert!(close(&signature(&moved, 4), &s, 1e-12));
        prop_assert!(close(&signature(&x.refine(m).unwrap(), 4), &s, 1e-10));
    }

    #[test]
    fn log_signature_of_a_segment_is_its_increment(x in (1usize..=3).prop_flat_map(|d| path_strategy(d, 2))) {
        let inc: Vec<f64> = x.tail().iter().zip(x.initial()).map(|(b, a)| b - a).collect();
        let l = vissig::log_signature(&x, 4);
        prop_assert!(close(&l, &TensorSeries::from_level1(&inc, 4), 1e-10));
    }

    #[test]
    fn lifted_signature_theorems(x in any_path(), depth in 2usize..=4) {
        prop_assert!(check_general1(&x, depth).passed);
        prop_assert!(check_general2(&x, Visibility::I, depth).passed);
        prop_assert!(check_general2(&x, Visibility::T, depth).passed);
        prop_assert!(check_preservation(&x, depth).passed);
    }

    #[test]
    fn spur_is_invisible_after_lifting(x in any_path(), v in prop::collection::vec(-1.0..1.0f64, 3)) {
        let spurred = with_spur(&x, &v[..x.dim()]);
        for variant in [Visibility::I, Visibility::T] {
            let a = signature(&visibility_lift(&x, variant), 4);
            let b = signature(&visibility_lift(&spurred, variant), 4);
            prop_assert!(close(&a, &b, 1e-10));
        }
    }

    #[test]
    fn discrete_visibility_matches_continuous(x in any_path(), depth in 1usize..=4) {
        let stream = Stream::new(x.knots().map(<[f64]>::to_vec).collect()).unwrap();
        let path = PiecewiseLinearPath::from_stream(&stream);
        let lifted_i = visibility_prefix_path(stream.first()).concat(&vissig::transforms::lift_visible(&path)).unwrap();
        let lifted_t = vissig::transforms::lift_visible(&path).concat(&visibility_suffix_path(stream.last())).unwrap();
        for (variant, continuous) in [(Visibility::I, lifted_i), (Visibility::T, lifted_t)] {
            let discrete = PiecewiseLinearPath::from_stream(&visibility_discrete(&stream, variant));
            prop_assert!(close(&signature(&discrete, depth), &signature(&continuous, depth), 1e-12));
        }
    }

    #[test]
    fn lead_lag_halves_span_the_stream(x in (1usize..=3).prop_flat_map(|d| path_strategy(d, 7))) {
        prop_assume!(x.num_knots() >= 2);
        let stream = Stream::new(x.knots().map(<[f64]>::to_vec).collect()).unwrap();
        let ll = lead_lag(&stream).unwrap();
        let d = stream.dim();
        prop_assert_eq!(&ll.first()[..d], stream.first());
        prop_assert_eq!(&ll.first()[d..], stream.first());
        prop_assert_eq!(&ll.last()[..d], stream.last());
        prop_assert_eq!(&ll.last()[d..], stream.last());
    }

    #[test]
    fn extraction_is_order_independent(
        streams in prop::collection::vec(prop::collection::vec(prop::collection::vec(-3.0..3.0f64, 2), 2..6), 1..8),
        seed in any::<u64>()
    ) {
        let records: Vec<StreamRecord> = streams
            .into_iter()
            .enumerate()
            .map(|(i, rows)| StreamRecord { id: format!("r{i}"), label: None, stream: Stream::new(rows).unwrap() })
            .collect();
        let config = RunConfig::new(3, vec![TransformSpec::LeadLag, TransformSpec::VisI], FeatureKind::Signature);
        let forward = extract(&records, &config).unwrap();
        let mut shuffled = records.clone();
        let k = (seed as usize) % shuffled.len();
        shuffled.rotate_left(k);
        shuffled.reverse();
        let permuted = extract(&shuffled, &config).unwrap();
        for rec in &forward {
            let other = permuted.iter().find(|r| r.id == rec.id).unwrap();
            prop_assert_eq!(&other.features, &rec.features);
            prop_assert_eq!(rec.features.len(), word_count(5, 3));
        }
    }
}

fn offset(from: &[f64], to: &[f64]) -> Vec<f64> {
    to.iter().zip(from).map(|(t, f)| t - f).collect()
}

#[test]
fn word_enumeration_matches_flatten_order() {
    let t = TensorSeries::from_fn(3, 3, |w| w.letters().iter().fold(0.0, |acc, &l| acc * 10.0 + l as f64));
    let names: Vec<f64> = Word::all(3, 3).skip(1).map(|w| t.coeff(&w).unwrap()).collect();
    assert_eq!(names, t.flatten(false));
}
