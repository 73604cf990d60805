//! Deterministic scalar grid sweeps. Each sweep checks one scalar inequality
//! family over a fixed grid (no RNG, reproducible by construction) and
//! reports the worst violation with a witness point.

use crate::scalar::{
    big_m_v, exp_v, expv_bound_direction, expv_bounds, kantorovich, ln_v, m_v, HhDirection,
};

/// Result of one grid sweep.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub label: &'static str,
    pub points: usize,
    pub violations: usize,
    /// Largest normalized violation observed (0 when the sweep passes).
    pub worst: f64,
    pub witness: Option<String>,
}

impl SweepOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

struct Sweep {
    label: &'static str,
    points: usize,
    violations: usize,
    worst: f64,
    witness: Option<String>,
    tol: f64,
}

impl Sweep {
    fn new(label: &'static str, tol: f64) -> Self {
        Self {
            label,
            points: 0,
            violations: 0,
            worst: 0.0,
            witness: None,
            tol,
        }
    }

    /// Record the check `lhs <= rhs` at a described point.
    fn check_leq(&mut self, lhs: f64, rhs: f64, describe: impl Fn() -> String) {
        self.points += 1;
        let scale = 1f64.max(lhs.abs()).max(rhs.abs());
        let violation = (lhs - rhs) / scale;
        if violation > self.tol {
            self.violations += 1;
            if violation > self.worst {
                self.worst = violation;
                self.witness = Some(describe());
            }
        }
    }

    fn finish(self) -> SweepOutcome {
        SweepOutcome {
            label: self.label,
            points: self.points,
            violations: self.violations,
            worst: self.worst,
            witness: self.witness,
        }
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |i| lo + (hi - lo) * (i as f64) / (n as f64))
}

const SWEEP_TOL: f64 = 1e-12;

/// Refined two-sided arithmetic-geometric mean bound:
/// `m_v(b/a) a^{1-v} b^v <= (1-v)a + vb <= M_v(b/a) a^{1-v} b^v`
/// for `0 < b <= a`, `v` in `[0, 1]`.
pub fn refined_young(n: usize) -> SweepOutcome {
    let mut s = Sweep::new("refined_young", SWEEP_TOL);
    for a_exp in grid(-1.0, 2.0, n / 500) {
        let a = 10f64.powf(a_exp);
        for x in grid(0.02, 1.0, 49) {
            let b = a * x;
            for v in grid(0.0, 1.0, 9) {
                let geo = a.powf(1.0 - v) * b.powf(v);
                let mean = (1.0 - v) * a + v * b;
                let lo = m_v(x, v).unwrap() * geo;
                let hi = big_m_v(x, v).unwrap() * geo;
                s.check_leq(lo, mean, || format!("a={a} b={b} v={v} (lower)"));
                s.check_leq(mean, hi, || format!("a={a} b={b} v={v} (upper)"));
            }
        }
    }
    s.finish()
}

/// Five-term scalar chain on `0 < x <= 1`, `0 < v <= 1`:
/// `1 - 1/x <= (1/M_v)((1-v)/v + x) - 1/v <= ln_v(x)
///  <= (1/m_v)((1-v)/v + x) - 1/v <= x - 1 <= 0`.
///
/// The final comparison is `x - 1 <= 0`: it reaches equality at `x = 1`, so
/// strict negativity is not asserted.
pub fn chain_five(n: usize) -> SweepOutcome {
    let mut s = Sweep::new("chain_five", SWEEP_TOL);
    let side = (n as f64).sqrt().ceil() as usize;
    for v in grid(1.0 / side as f64, 1.0, side - 1) {
        for x in grid(1.0 / side as f64, 1.0, side - 1) {
            let c1 = 1.0 - 1.0 / x;
            let c2 = ((1.0 - v) / v + x) / big_m_v(x, v).unwrap() - 1.0 / v;
            let c3 = ln_v(x, v).unwrap();
            let c4 = ((1.0 - v) / v + x) / m_v(x, v).unwrap() - 1.0 / v;
            let c5 = x - 1.0;
            s.check_leq(c1, c2, || format!("x={x} v={v} link 1"));
            s.check_leq(c2, c3, || format!("x={x} v={v} link 2"));
            s.check_leq(c3, c4, || format!("x={x} v={v} link 3"));
            s.check_leq(c4, c5, || format!("x={x} v={v} link 4"));
            s.check_leq(c5, 0.0, || format!("x={x} v={v} link 5"));
        }
    }
    s.finish()
}

/// The true parts of the reversed-window weight bound for `v` in `[-1, 0]`,
/// `0 < x <= 1`: the sandwich `M_v(x) <= ((1-v)+vx)/x^v <= m_v(x)`, both
/// weights nondecreasing in `x`, and `M_v(x) <= m_v(x) <= 1` with
/// `m_v(x) > 0`.
pub fn eq16_sandwich_monotone_bounds(n: usize) -> SweepOutcome {
    let mut s = Sweep::new("eq16_sandwich_monotone_bounds", SWEEP_TOL);
    let side = (n as f64).sqrt().ceil() as usize;
    for v in grid(-1.0, 0.0, side - 1) {
        let mut prev: Option<(f64, f64)> = None;
        for x in grid(1.0 / side as f64, 1.0, side - 1) {
            let lo = big_m_v(x, v).unwrap();
            let hi = m_v(x, v).unwrap();
            let ratio = ((1.0 - v) + v * x) / x.powf(v);
            s.check_leq(lo, ratio, || format!("x={x} v={v} (M_v <= ratio)"));
            s.check_leq(ratio, hi, || format!("x={x} v={v} (ratio <= m_v)"));
            s.check_leq(lo, hi, || format!("x={x} v={v} (M_v <= m_v)"));
            s.check_leq(hi, 1.0, || format!("x={x} v={v} (m_v <= 1)"));
            s.check_leq(f64::MIN_POSITIVE, hi, || format!("x={x} v={v} (0 < m_v)"));
            if let Some((pl, ph)) = prev {
                s.check_leq(pl, lo, || format!("x={x} v={v} (M_v monotone)"));
                s.check_leq(ph, hi, || format!("x={x} v={v} (m_v monotone)"));
            }
            prev = Some((lo, hi));
        }
    }
    s.finish()
}

/// The claimed positivity `0 < M_v(x)` on `0 < x <= 1`, `v` in `[-1, 0]`.
///
/// This claim is numerically false for interior `v` once `x` drops below
/// roughly 0.1 (e.g. `M_{-0.5}(0.01) = -2.675...`); the sweep documents the
/// violation region rather than hiding it.
pub fn eq16_mv_positivity(n: usize) -> SweepOutcome {
    let mut s = Sweep::new("eq16_mv_positivity", SWEEP_TOL);
    let side = (n as f64).sqrt().ceil() as usize;
    for v in grid(-1.0, 0.0, side - 1) {
        for x in grid(1.0 / side as f64, 1.0, side - 1) {
            let val = big_m_v(x, v).unwrap();
            s.check_leq(f64::MIN_POSITIVE, val, || {
                format!("x={x} v={v}: M_v(x) = {val}")
            });
        }
    }
    s.finish()
}

/// Bernoulli-type bound `(1-v) + vx <= x^v` for `v` in `[-1, 0)`, `x > 0`.
pub fn eq15_bernoulli(n: usize) -> SweepOutcome {
    let mut s = Sweep::new("eq15_bernoulli", SWEEP_TOL);
    let side = (n as f64).sqrt().ceil() as usize;
    for v in grid(-1.0, -0.01, side - 1) {
        for x in grid(0.01, 5.0, side - 1) {
            s.check_leq((1.0 - v) + v * x, x.powf(v), || format!("x={x} v={v}"));
        }
    }
    s.finish()
}

/// Kantorovich-power bounds `K(x)^r x^v <= (1-v) + vx <= K(x)^R x^v` with
/// `r = min(v, 1-v)`, `R = max(v, 1-v)`, for `v` in `[0, 1]`, `0 < x <= 1`.
pub fn dragomir_scalar(n: usize) -> SweepOutcome {
    let mut s = Sweep::new("dragomir_scalar", SWEEP_TOL);
    let side = (n as f64).sqrt().ceil() as usize;
    for v in grid(0.0, 1.0, side - 1) {
        let r = v.min(1.0 - v);
        let big_r = v.max(1.0 - v);
        for x in grid(1.0 / side as f64, 1.0, side - 1) {
            let k = kantorovich(x).unwrap();
            let mean = (1.0 - v) + v * x;
            let xv = x.powf(v);
            s.check_leq(k.powf(r) * xv, mean, || format!("x={x} v={v} (lower)"));
            s.check_leq(mean, k.powf(big_r) * xv, || format!("x={x} v={v} (upper)"));
        }
    }
    s.finish()
}

/// Hermite-Hadamard bounds for the deformed exponential with the direction
/// determined by the convexity sign `(1-v)(1-2v)` of the integrand:
/// for `v` in `[-1,0) u (0,1/2]` the chain is
/// `t exp_{v/2}(t)^{(1-v)/2} <= exp_v(t) - 1 <= (t/2)(1 + exp_v(t)^{1-v})`
/// and it reverses on `[1/2, 1]` (equality throughout at `v = 1/2`).
pub fn lemma_expv_bounds(n: usize) -> SweepOutcome {
    lemma_expv_impl("lemma_expv_bounds", n, expv_bound_direction)
}

/// The same bounds evaluated with the direction labels attached to the sign
/// of `v` alone (reversed chain for every `v > 0`). Numerically false on
/// `0 < v < 1/2`; kept as a documented finding.
pub fn lemma_expv_bounds_v_sign_labels(n: usize) -> SweepOutcome {
    lemma_expv_impl("lemma_expv_bounds_v_sign_labels", n, |v: f64| {
        if v < 0.0 {
            HhDirection::Convex
        } else {
            HhDirection::Concave
        }
    })
}

fn lemma_expv_impl(
    label: &'static str,
    n: usize,
    direction: impl Fn(f64) -> HhDirection,
) -> SweepOutcome {
    let mut s = Sweep::new(label, SWEEP_TOL);
    let side = (n as f64).sqrt().ceil() as usize;
    let mut vs: Vec<f64> = grid(-1.0, 1.0, side - 1).filter(|v| v.abs() > 1e-3).collect();
    vs.push(0.5);
    for v in vs {
        let t_max = if v < 0.0 { 0.999 / v.abs() } else { 5.0 };
        for t in grid(t_max / side as f64, t_max * (1.0 - 1.0 / side as f64), side - 1) {
            let (mid, trap) = expv_bounds(t, v).unwrap();
            let e = exp_v(t, v).unwrap() - 1.0;
            match direction(v) {
                HhDirection::Convex => {
                    s.check_leq(mid, e, || format!("t={t} v={v} (mid <= e)"));
                    s.check_leq(e, trap, || format!("t={t} v={v} (e <= trap)"));
                }
                HhDirection::Concave => {
                    s.check_leq(trap, e, || format!("t={t} v={v} (trap <= e)"));
                    s.check_leq(e, mid, || format!("t={t} v={v} (e <= mid)"));
                }
            }
        }
    }
    s.finish()
}

/// `exp_v(ln_v(y)) = y` to 1e-12 relative on a log grid of `y`.
pub fn inversion(n: usize) -> SweepOutcome {
    let mut s = Sweep::new("inversion", SWEEP_TOL);
    let side = (n as f64).sqrt().ceil() as usize;
    for v in grid(-1.0, 1.0, side - 1) {
        if v.abs() < 1e-3 {
            continue;
        }
        for y_exp in grid(-3.0, 3.0, side - 1) {
            let y = 10f64.powf(y_exp);
            let back = exp_v(ln_v(y, v).unwrap(), v).unwrap();
            let err = (back - y).abs() / y;
            s.check_leq(err, 1e-12, || format!("y={y} v={v} err={err:e}"));
        }
    }
    s.finish()
}

/// Scalar ingredients of the four-operator chain for `0 < v <= 1`:
/// `ln(t) <= ln_v(t) <= exp_v(t) <= exp(t)`.
pub fn four_chain_scalar_pos(n: usize) -> SweepOutcome {
    let mut s = Sweep::new("four_chain_scalar_pos", SWEEP_TOL);
    let side = (n as f64).sqrt().ceil() as usize;
    for v in grid(1.0 / side as f64, 1.0, side - 1) {
        for t in grid(5.0 / side as f64, 5.0, side - 1) {
            let l0 = t.ln();
            let lv = ln_v(t, v).unwrap();
            let ev = exp_v(t, v).unwrap();
            let e0 = t.exp();
            s.check_leq(l0, lv, || format!("t={t} v={v} (ln <= ln_v)"));
            s.check_leq(lv, ev, || format!("t={t} v={v} (ln_v <= exp_v)"));
            s.check_leq(ev, e0, || format!("t={t} v={v} (exp_v <= exp)"));
        }
    }
    s.finish()
}

/// Empirical validity region of the claimed scalar comparison
/// `exp_v(t) <= ln_v(t)` for `v` in `[-1, 0)` (no domain is known on which
/// it holds; this reports the observed fraction instead of asserting).
pub fn four_chain_scalar_neg_region(n: usize) -> (usize, usize) {
    let side = (n as f64).sqrt().ceil() as usize;
    let mut holds = 0usize;
    let mut total = 0usize;
    for v in grid(-1.0, -0.05, side - 1) {
        let t_max = 0.999 / v.abs();
        for t in grid(t_max / side as f64, t_max * (1.0 - 1.0 / side as f64), side - 1) {
            total += 1;
            let ev = exp_v(t, v).unwrap();
            let lv = ln_v(t, v).unwrap();
            if ev <= lv + 1e-12 {
                holds += 1;
            }
        }
    }
    (holds, total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refined_young_grid() {
        let o = refined_young(10_000);
        assert!(o.points >= 10_000, "{} points", o.points);
        assert!(o.passed(), "{:?}", o);
    }

    #[test]
    fn chain_five_grid() {
        let o = chain_five(10_000);
        assert!(o.points >= 10_000);
        assert!(o.passed(), "{:?}", o);
    }

    #[test]
    fn eq16_true_parts_grid() {
        let o = eq16_sandwich_monotone_bounds(10_000);
        assert!(o.points >= 10_000);
        assert!(o.passed(), "{:?}", o);
    }

    #[test]
    fn eq16_mv_positivity_counterexample_is_real() {
        // documents the violation region of the claimed 0 < M_v(x)
        let val = big_m_v(0.01, -0.5).unwrap();
        assert!(val < -2.6 && val > -2.7, "M_-0.5(0.01) = {val}");
        let o = eq16_mv_positivity(10_000);
        assert!(
            !o.passed(),
            "positivity of M_v unexpectedly held on the whole grid"
        );
    }

    #[test]
    fn eq15_grid() {
        let o = eq15_bernoulli(10_000);
        assert!(o.points >= 10_000);
        assert!(o.passed(), "{:?}", o);
    }

    #[test]
    fn dragomir_scalar_grid() {
        let o = dragomir_scalar(10_000);
        assert!(o.points >= 10_000);
        assert!(o.passed(), "{:?}", o);
    }

    #[test]
    fn lemma_expv_grid_with_convexity_split() {
        let o = lemma_expv_bounds(10_000);
        assert!(o.points >= 10_000);
        assert!(o.passed(), "{:?}", o);
    }

    #[test]
    fn lemma_expv_v_sign_labels_fail_below_half() {
        let o = lemma_expv_bounds_v_sign_labels(10_000);
        assert!(!o.passed(), "v-sign labels unexpectedly verified");
        let w = o.witness.unwrap();
        assert!(w.contains("v=0.") || w.contains("v=0,"), "witness: {w}");
    }

    #[test]
    fn inversion_grid() {
        let o = inversion(10_000);
        assert!(o.passed(), "{:?}", o);
    }

    #[test]
    fn four_chain_pos_grid() {
        let o = four_chain_scalar_pos(10_000);
        assert!(o.passed(), "{:?}", o);
    }

    #[test]
    fn four_chain_neg_region_is_essentially_empty() {
        let (holds, total) = four_chain_scalar_neg_region(10_000);
        assert!(total >= 9_000);
        // no (t, v) region found where the claimed reversal holds
        assert!(
            (holds as f64) < 0.01 * total as f64,
            "claimed reversal held at {holds}/{total} points"
        );
    }
}
