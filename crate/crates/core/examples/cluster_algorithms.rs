//! Run the three clustering algorithms on the same points.

use proofmine::cluster::ClusterAlgorithm;

fn main() -> proofmine::Result<()> {
    let points: Vec<Vec<f64>> = [
        [0.0, 0.0],
        [0.1, 0.2],
        [0.2, 0.1],
        [5.0, 5.0],
        [5.1, 4.9],
        [4.8, 5.2],
        [9.0, 0.0],
        [9.2, 0.3],
    ]
    .iter()
    .map(|p| p.to_vec())
    .collect();
    for alg in ClusterAlgorithm::ALL {
        let a = alg.run(&points, 3, 42)?;
        println!("{alg}: labels {:?}, objective {:.4}", a.labels, a.objective);
        println!("  proximity {:.3?}", a.proximity);
    }
    Ok(())
}
