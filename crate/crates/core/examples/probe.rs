use fdiv::*;
fn main() {
    let pi = FiniteDistribution::new(vec![0.5, 0.5]).unwrap();
    let h = MeasurableFunction::new(vec![0.0, 3f64.ln()]).unwrap();
    let nu = FiniteDistribution::new(vec![0.25, 0.75]).unwrap();
    let d = fdiv::divergence::kl_divergence(&nu, &pi);
    let res = optimize_free_params(&Generator::kl(), &pi, &h, d, OptimMode::Tight).unwrap();
    println!("value={} lambda={:?} c={:?}", res.value, res.lambda, res.c);
    let (c, l) = (res.c.unwrap(), res.lambda.unwrap());
    let scaled = h.scaled_shifted(l, c);
    let t = tight_transform(&Generator::kl(), &pi, &scaled).unwrap();
    let cr = crude_transform(&Generator::kl(), &pi, &scaled).unwrap();
    println!("tight(scaled)={} crude={} at c={c} l={l}", t, cr);
    println!("by hand: c + (tight+d)/l = {}", c + (t.raw() + d.raw())/l);
}
