use fq_core::constructions::{enumerate_roots_example1, lambda_p0, Example1Homotopy, Example1Spec};
use fq_core::rootfind::continuation_track;

#[test]
fn lattice_points_flow_to_ks_roots() {
    let spec = Example1Spec::kurasov_sarnak();
    let h = Example1Homotopy::new(&spec).unwrap();
    let step = lambda_p0(&spec).unwrap().basis[0][0];
    let target = enumerate_roots_example1(&spec, 12.0).unwrap();
    let grid: Vec<f64> = (0..=64).map(|k| k as f64 / 64.0).collect();
    for k in -6..=6 {
        let path = continuation_track(&h, &[k as f64 * step], &grid).unwrap();
        let x = path.end()[0];
        let d = target.points.iter().map(|(p, _)| (p[0] - x).abs()).fold(f64::INFINITY, f64::min);
        assert!(d < 1e-9, "k = {k}: end {x} is {d} from the nearest root");
    }
}
