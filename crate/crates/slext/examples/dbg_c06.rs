use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slext::boundary::extension_data_pack;
use slext::extensions::{classify_dim2, compare_dim2, AuxB2};
use slext::problem::{builtin_regular, Interval};
use slext::spectra::lowest_eigenvalue;
use slext::NumericsConfig;

fn main() {
    let cfg = NumericsConfig::default();
    let p = builtin_regular(Interval::new(0.0, 1.0).unwrap(), 1.0, 0.0, 1.0).unwrap();
    let pack = extension_data_pack(&p, &cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let draw = |rng: &mut ChaCha8Rng| -> AuxB2 {
        let b11: f64 = rng.gen_range(0.0..2.0);
        let b22: f64 = rng.gen_range(0.0..2.0);
        let t: f64 = rng.gen_range(-0.9..0.9);
        let b12 = t * (b11 * b22 * pack.norm2_u / pack.norm2_v).sqrt();
        AuxB2::real(b11, b12, b22)
    };
    for pair in 0..10 {
        let b = draw(&mut rng);
        let bh = if pair < 5 {
            let d = draw(&mut rng);
            AuxB2::real(b.b11 + d.b11, (b.b12 + d.b12).re, b.b22 + d.b22)
        } else {
            draw(&mut rng)
        };
        let verdict = compare_dim2(&b, &bh, &pack);
        let s1 = classify_dim2(&pack, &b).unwrap();
        let s2 = classify_dim2(&pack, &bh).unwrap();
        println!("pair {pair} verdict {verdict:?}");
        println!("  b  = ({:.4}, {:.4}, {:.4}) -> {s1:?}", b.b11, b.b12.re, b.b22);
        println!("  bh = ({:.4}, {:.4}, {:.4}) -> {s2:?}", bh.b11, bh.b12.re, bh.b22);
        for (tag, s) in [("b", &s1), ("bh", &s2)] {
            match lowest_eigenvalue(&p, s, &cfg) {
                Ok(l) => println!("    lambda_min({tag}) = {l:.10e}"),
                Err(e) => println!("    lambda_min({tag}) ERROR: {e}"),
            }
        }
    }
}
