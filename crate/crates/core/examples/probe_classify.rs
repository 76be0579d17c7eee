// scratch probe; removed before finishing
use infogame::compare::classify_sequence;
use infogame::scenarios::gen_gaussian_sequence;
use std::time::Instant;

fn main() {
    for gy in [9usize, 13, 17, 21] {
        for pair in [[3u32, 4], [5, 6], [8, 9], [12, 13]] {
            let t = Instant::now();
            let seq: Vec<_> = pair
                .iter()
                .map(|&m| gen_gaussian_sequence(3, gy, m).unwrap())
                .collect();
            match classify_sequence(&seq, 1e-3) {
                Ok(r) => println!(
                    "gy={gy} m={}->{}: kind={} max={:.2e} min={:.2e} ({:.2?})",
                    pair[0], pair[1], r.kind,
                    r.maximizer_residual[0], r.minimizer_residual[0],
                    t.elapsed()
                ),
                Err(e) => println!("gy={gy} m={:?}: err {e}", pair),
            }
        }
    }
}
