use num_bigint::{BigInt, BigUint};
use rigid_zeta::{run_hyperelliptic, RunOptions};

fn main() {
    let f: Vec<BigInt> = [1i64, 1, 0, 1].iter().map(|&c| BigInt::from(c)).collect();
    for n in 3..=8 {
        let opts = RunOptions {
            forced_n: Some(n),
            ..Default::default()
        };
        match run_hyperelliptic(&BigUint::from(5u8), 1, &f, &opts) {
            Ok(r) => {
                let p = r.precision.unwrap();
                println!(
                    "N={n}: chi={:?} floor={} steploss={} coordloss={}",
                    r.chi, p.frobenius_entry_floor, p.max_finite_step_loss, p.coordinate_loss
                );
            }
            Err(e) => println!("N={n}: ERR {e}"),
        }
    }
}
