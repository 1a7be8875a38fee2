use crate::autodiff::{Tape, Tensor, Var};
use crate::error::{invalid, shape_err, Result};

use super::params::HarrisWilsonParams;

/// Smallest destination size kept after a step.
pub const W_FLOOR: f64 = 1e-12;

/// Demand `D = W^α ⊙ (C^β)ᵀ (O ⊙ Z)` with `Z⁻¹ = C^β W^α`, recorded on a
/// tape. `w` is `[M, 1]`, `o` is `[N, 1]` and `c` is `[N, M]`.
pub fn demand_taped(tape: &mut Tape, w: Var, o: Var, c: Var, params: &HarrisWilsonParams) -> Result<Var> {
    let (cs, ws, os) = (
        tape.value(c)?.shape().to_vec(),
        tape.value(w)?.shape().to_vec(),
        tape.value(o)?.shape().to_vec(),
    );
    if cs.len() != 2 || ws != [cs[1], 1] || os != [cs[0], 1] {
        return shape_err(
            "harris_wilson_demand",
            format!("C {cs:?}, W {ws:?}, O {os:?}; expected C [N, M], W [M, 1], O [N, 1]"),
        );
    }
    let cb = tape.pow(c, params.beta)?;
    let wa = tape.pow(w, params.alpha)?;
    let z_inv = tape.matmul(cb, wa)?;
    let z = tape.pow(z_inv, -1.0)?;
    let oz = tape.mul(o, z)?;
    let cbt = tape.transpose(cb)?;
    let routed = tape.matmul(cbt, oz)?;
    tape.mul(wa, routed)
}

/// One recorded step of `dW = εW(D − κW)dt + σW∘dB`. `noise` holds one
/// standard normal draw per destination; `None` gives the deterministic
/// path. Sizes are not clamped here, so a step that leaves the positive
/// orthant is reported as an error.
pub fn harris_wilson_step(
    tape: &mut Tape,
    w: Var,
    o: Var,
    c: Var,
    params: &HarrisWilsonParams,
    noise: Option<&[f64]>,
) -> Result<Var> {
    params.validate()?;
    let d = demand_taped(tape, w, o, c, params)?;
    let kw = tape.scale(w, params.kappa)?;
    let gap = tape.sub(d, kw)?;
    let growth = tape.mul(w, gap)?;
    let mut drift = tape.scale(growth, params.epsilon * params.dt)?;
    let corr = params.drift_correction();
    if corr != 0.0 {
        let extra = tape.scale(w, corr * params.dt)?;
        drift = tape.add(drift, extra)?;
    }
    let mut next = tape.add(w, drift)?;
    if let Some(xi) = noise {
        let m = tape.value(w)?.rows();
        if xi.len() != m {
            return shape_err("harris_wilson_step", format!("{} noise draws for {m} destinations", xi.len()));
        }
        let amp = params.sigma * params.dt.sqrt();
        let dz = tape.constant(Tensor::column(xi.iter().map(|x| amp * x).collect())?);
        let kick = tape.mul(w, dz)?;
        next = tape.add(next, kick)?;
    }
    if let Some(j) = tape.value(next)?.data().iter().position(|&x| x <= 0.0) {
        return invalid(format!("destination {j} left the positive orthant during a recorded step"));
    }
    Ok(next)
}

/// Demand by explicit sums over origins and destinations. `c` is row-major
/// `N × M`.
pub fn demand_plain(w: &[f64], o: &[f64], c: &[f64], params: &HarrisWilsonParams) -> Vec<f64> {
    let m = w.len();
    let wa: Vec<f64> = w.iter().map(|x| x.powf(params.alpha)).collect();
    let mut d = vec![0.0; m];
    for (i, &oi) in o.iter().enumerate() {
        let row = &c[i * m..(i + 1) * m];
        let weights: Vec<f64> = row.iter().zip(&wa).map(|(cij, wj)| cij.powf(params.beta) * wj).collect();
        let z: f64 = weights.iter().sum();
        for (dj, wij) in d.iter_mut().zip(&weights) {
            *dj += oi * wij / z;
        }
    }
    d
}

/// Untaped step used by the generators. Sizes that would drop to zero or
/// below are clamped to [`W_FLOOR`] with a warning.
pub fn harris_wilson_step_plain(
    w: &[f64],
    o: &[f64],
    c: &[f64],
    params: &HarrisWilsonParams,
    noise: Option<&[f64]>,
) -> Vec<f64> {
    let d = demand_plain(w, o, c, params);
    let corr = params.drift_correction();
    let amp = params.sigma * params.dt.sqrt();
    w.iter()
        .zip(&d)
        .enumerate()
        .map(|(j, (&wj, &dj))| {
            let drift = params.epsilon * wj * (dj - params.kappa * wj) + corr * wj;
            let kick = noise.map_or(0.0, |z| amp * wj * z[j]);
            let next = wj + drift * params.dt + kick;
            if next <= 0.0 {
                log::warn!("destination {j} size {next:.3e} clamped to {W_FLOOR:e}");
                W_FLOOR
            } else {
                next
            }
        })
        .collect()
}
