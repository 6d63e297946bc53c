use ckn_symbreak::special::gamma;
use ckn_symbreak::spectral::halfline_weight_integral;

fn main() {
    for s in [0.1, 0.5, 0.9] {
        for x in [0.1f64, 1.0, 10.0] {
            let q = halfline_weight_integral(s, x);
            let exact = 0.5 * gamma(s) * gamma(1.0 - s) * x.powf(-2.0 * s);
            println!("s={s:<4} |x|={x:<5} quad={:.12} exact={:.12} rel={:.1e}", q.value, exact, (q.value - exact).abs() / exact);
        }
    }
}
