use dopasym::asymptotics::confinement_distances;
use dopasym::equilibrium::{hahn_equilibrium, hahn_field, variational_derivative};
use dopasym::lattice::{make_weights, FamilySpec, NodeSet, RealFn};
use dopasym::orthopoly::stieltjes_recurrence;
use std::sync::Arc;
fn main() {
    let (a, b, c) = (1.0, 5.0, 0.6);
    let m = hahn_equilibrium(a, b, c).unwrap();
    let phi: RealFn = Arc::new(move |x| hahn_field(x, a, b));
    let alpha = m.bands[0].0;
    println!("alpha = {alpha}");
    for rel in [0.2, 0.4, 0.5, 0.6, 0.8] {
        let x = alpha * (1.0 - rel);
        let xi = m.ell_c - variational_derivative(&m, &phi, c, x).unwrap();
        println!("x={x:.4} (margin {rel}): xi = {xi:.4}");
    }
    for n in [30usize, 40, 50, 60] {
        let prec = (8 * n as u32).max(256);
        let k = (c * n as f64).round() as usize;
        let nf = n as f64;
        let ns = NodeSet::uniform(n, prec);
        let w = make_weights(FamilySpec::Hahn { n_param: nf * a + 1.0, q_param: nf * b + 1.0 }, &ns).unwrap();
        let sys = stieltjes_recurrence(&w, k).unwrap();
        let d = confinement_distances(&sys, &m, k, 0.5).unwrap();
        let mx = d.iter().cloned().fold(0.0f64, f64::max);
        println!("N={n}: {} nodes tested, log max dist = {:.3}", d.len(), mx.ln());
    }
}
