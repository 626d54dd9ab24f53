//! Logit quantal response equilibrium by damped fixed-point iteration.

use crate::equilibrium::sc_profile::{receiver_utilities, sc_expected_utilities, ClaimProfile};
use crate::error::{Error, Result};
use crate::games::sc::{MAX_VALUE, NEVER_CHALLENGE};

/// Logit response `exp(λ U_a) / Σ exp(λ U_a')`, max-shifted so `λ U` up to
/// hundreds of units cannot overflow.
pub fn logit(utilities: &[f64], lambda: f64) -> Vec<f64> {
    let max = utilities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = utilities.iter().map(|&u| (lambda * (u - max)).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

/// A finite game in which each player's expected utility depends on the
/// others' mixed strategies.
pub trait StageGame {
    fn num_players(&self) -> usize;
    fn num_actions(&self, player: usize) -> usize;
    /// `U_i(a, σ_{-i})` for every action `a` of `player`.
    fn utilities(&self, player: usize, profile: &[Vec<f64>]) -> Vec<f64>;
}

/// Two-player normal-form game; `row[i][j]` and `col[i][j]` are the payoffs
/// when row plays `i` and column plays `j`.
#[derive(Clone, Debug)]
pub struct Bimatrix {
    pub row: Vec<Vec<f64>>,
    pub col: Vec<Vec<f64>>,
}

impl Bimatrix {
    pub fn new(row: Vec<Vec<f64>>, col: Vec<Vec<f64>>) -> Result<Self> {
        let m = row.len();
        let n = row.first().map_or(0, Vec::len);
        if m == 0 || n == 0 || col.len() != m || row.iter().chain(&col).any(|r| r.len() != n) {
            return Err(Error::invalid("payoff matrices must be non-empty and the same shape"));
        }
        if row.iter().chain(&col).flatten().any(|x| !x.is_finite()) {
            return Err(Error::invalid("payoffs must be finite"));
        }
        Ok(Bimatrix { row, col })
    }

    /// Symmetric game with `col = row^T`.
    pub fn symmetric(row: Vec<Vec<f64>>) -> Result<Self> {
        let n = row.len();
        let col = (0..n).map(|i| (0..n).map(|j| row[j][i]).collect()).collect();
        Bimatrix::new(row, col)
    }
}

impl StageGame for Bimatrix {
    fn num_players(&self) -> usize {
        2
    }

    fn num_actions(&self, player: usize) -> usize {
        if player == 0 {
            self.row.len()
        } else {
            self.row[0].len()
        }
    }

    fn utilities(&self, player: usize, profile: &[Vec<f64>]) -> Vec<f64> {
        if player == 0 {
            self.row
                .iter()
                .map(|r| r.iter().zip(&profile[1]).map(|(u, p)| u * p).sum())
                .collect()
        } else {
            (0..self.row[0].len())
                .map(|j| self.col.iter().zip(&profile[0]).map(|(r, p)| r[j] * p).sum())
                .collect()
        }
    }
}

/// Strategic Claim in agent form: components 0..6 are the sender types
/// `v = 1..=6` (claims `v..=6`), component 6 is the receiver (thresholds
/// `1..=7`). The profile is symmetric, so the opponent plays the same mix.
#[derive(Clone, Copy, Debug, Default)]
pub struct ScAgentForm;

impl ScAgentForm {
    pub const RECEIVER: usize = 6;

    pub fn claim_profile(profile: &[Vec<f64>]) -> ClaimProfile {
        let mut p = ClaimProfile::zero();
        for v in 1..=MAX_VALUE {
            for (k, &prob) in profile[(v - 1) as usize].iter().enumerate() {
                let c = v as usize + k;
                let mass = prob / 6.0;
                if c > v as usize {
                    p.bluff[c] += mass;
                } else {
                    p.honest[c] += mass;
                }
            }
        }
        p
    }

    pub fn challenge_freq(receiver: &[f64]) -> [f64; 7] {
        let mut q = [0.0; 7];
        for c in 1..=MAX_VALUE as usize {
            q[c] = receiver[..c].iter().sum::<f64>().min(1.0);
        }
        q
    }
}

impl StageGame for ScAgentForm {
    fn num_players(&self) -> usize {
        7
    }

    fn num_actions(&self, player: usize) -> usize {
        if player == Self::RECEIVER {
            NEVER_CHALLENGE as usize
        } else {
            (MAX_VALUE as usize) - player
        }
    }

    fn utilities(&self, player: usize, profile: &[Vec<f64>]) -> Vec<f64> {
        if player == Self::RECEIVER {
            receiver_utilities(&Self::claim_profile(profile)).to_vec()
        } else {
            let q = Self::challenge_freq(&profile[Self::RECEIVER]);
            sc_expected_utilities(player as u8 + 1, &q).expect("valid value and frequencies")
        }
    }
}

pub const DAMPING_DECAY: f64 = 0.9;
pub const MIN_DAMPING: f64 = 0.01;

#[derive(Clone, Copy, Debug)]
pub struct QreSettings {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for QreSettings {
    fn default() -> Self {
        QreSettings {
            damping: 0.5,
            tol: 1e-10,
            max_iter: 10_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct QreProfile {
    pub lambda: f64,
    pub strategies: Vec<Vec<f64>>,
    /// Sup-norm distance between the profile and its logit response.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn response(game: &dyn StageGame, profile: &[Vec<f64>], lambda: f64) -> Vec<Vec<f64>> {
    (0..game.num_players())
        .map(|i| logit(&game.utilities(i, profile), lambda))
        .collect()
}

fn sup_dist(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Iterates `σ ← (1-α)σ + α·logit_λ(U(σ))` from the uniform profile until the
/// sup-norm step falls below `tol`. Whenever a step grows, `α` shrinks by
/// `DAMPING_DECAY` (down to `MIN_DAMPING`) to break period-2 cycles.
/// Non-convergence is reported through `converged = false` with the last iterate.
pub fn qre_fixed_point(game: &dyn StageGame, lambda: f64, settings: QreSettings) -> Result<QreProfile> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda {lambda} must be finite and >= 0")));
    }
    if !(settings.tol > 0.0) || !(0.0 < settings.damping && settings.damping <= 1.0) {
        return Err(Error::invalid("tol must be > 0 and damping in (0, 1]"));
    }
    let mut sigma: Vec<Vec<f64>> = (0..game.num_players())
        .map(|i| {
            let n = game.num_actions(i);
            vec![1.0 / n as f64; n]
        })
        .collect();
    let mut alpha = settings.damping;
    let mut prev_step = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < settings.max_iter {
        iterations += 1;
        let br = response(game, &sigma, lambda);
        let next: Vec<Vec<f64>> = sigma
            .iter()
            .zip(&br)
            .map(|(s, r)| {
                let mut v: Vec<f64> = s.iter().zip(r).map(|(a, b)| (1.0 - alpha) * a + alpha * b).collect();
                let z: f64 = v.iter().sum();
                v.iter_mut().for_each(|x| *x /= z);
                v
            })
            .collect();
        let step = sup_dist(&next, &sigma);
        sigma = next;
        if step < settings.tol {
            converged = true;
            break;
        }
        if step > prev_step {
            alpha = (alpha * DAMPING_DECAY).max(MIN_DAMPING.min(settings.damping));
        }
        prev_step = step;
    }
    let residual = sup_dist(&sigma, &response(game, &sigma, lambda));
    Ok(QreProfile {
        lambda,
        strategies: sigma,
        residual,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prisoners_dilemma() -> Bimatrix {
        // actions: 0 = C, 1 = D
        Bimatrix::symmetric(vec![vec![3.0, 0.0], vec![5.0, 1.0]]).unwrap()
    }

    fn matching_pennies() -> Bimatrix {
        Bimatrix::new(
            vec![vec![1.0, -1.0], vec![-1.0, 1.0]],
            vec![vec![-1.0, 1.0], vec![1.0, -1.0]],
        )
        .unwrap()
    }

    /// Exhaustive best response: the action maximizing utility against every
    /// pure opponent action, if one exists.
    fn strictly_dominant_action(g: &Bimatrix) -> Option<usize> {
        let m = g.row.len();
        (0..m).find(|&i| (0..m).all(|k| k == i || g.row[i].iter().zip(&g.row[k]).all(|(a, b)| a > b)))
    }

    #[test]
    fn logit_is_shift_invariant_and_safe() {
        let p = logit(&[1.0, 0.0], 1.0);
        assert!((p[0] - std::f64::consts::E / (std::f64::consts::E + 1.0)).abs() < 1e-15);
        let big = logit(&[700.0, 0.0, -700.0], 10.0);
        assert!(big.iter().all(|x| x.is_finite()));
        assert!((big[0] - 1.0).abs() < 1e-12);
        assert_eq!(logit(&[3.0, 3.0, 3.0, 3.0], 5.0), vec![0.25; 4]);
    }

    #[test]
    fn lambda_zero_is_uniform() {
        let q = qre_fixed_point(&ScAgentForm, 0.0, QreSettings::default()).unwrap();
        assert!(q.residual < 1e-15);
        for (i, s) in q.strategies.iter().enumerate() {
            let n = ScAgentForm.num_actions(i) as f64;
            assert!(s.iter().all(|&x| (x - 1.0 / n).abs() < 1e-10));
        }
    }

    #[test]
    fn matching_pennies_stays_centered() {
        for lambda in [0.0, 0.5, 3.0, 50.0] {
            let q = qre_fixed_point(&matching_pennies(), lambda, QreSettings::default()).unwrap();
            for s in &q.strategies {
                assert!((s[0] - 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn large_lambda_concentrates_on_dominant_action() {
        let g = prisoners_dilemma();
        let dom = strictly_dominant_action(&g).unwrap();
        assert_eq!(dom, 1);
        let q = qre_fixed_point(&g, 100.0, QreSettings::default()).unwrap();
        assert!(q.converged);
        assert!(q.strategies[0][dom] >= 0.999);
        assert!(q.strategies[1][dom] >= 0.999);
    }

    #[test]
    fn best_response_mass_monotone_in_lambda() {
        let g = prisoners_dilemma();
        let mut prev = 0.0;
        for lambda in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0] {
            let q = qre_fixed_point(&g, lambda, QreSettings::default()).unwrap();
            let p = q.strategies[0][1];
            assert!(p >= prev - 1e-12, "lambda {lambda}: {p} < {prev}");
            prev = p;
        }
    }

    #[test]
    fn strategies_are_probability_vectors() {
        for lambda in [0.3, 1.0, 2.5, 4.0, 10.0] {
            let q = qre_fixed_point(&ScAgentForm, lambda, QreSettings::default()).unwrap();
            assert!(q.converged, "lambda {lambda}");
            assert!(q.residual < 1e-8);
            for s in &q.strategies {
                assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(s.iter().all(|&x| x >= 0.0));
            }
        }
    }

    #[test]
    fn rejects_bad_settings() {
        let g = prisoners_dilemma();
        assert!(qre_fixed_point(&g, -1.0, QreSettings::default()).is_err());
        let bad = QreSettings { tol: 0.0, ..QreSettings::default() };
        assert!(qre_fixed_point(&g, 1.0, bad).is_err());
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let s = QreSettings { max_iter: 2, ..QreSettings::default() };
        let q = qre_fixed_point(&prisoners_dilemma(), 5.0, s).unwrap();
        assert!(!q.converged);
        assert_eq!(q.iterations, 2);
        assert!(q.residual > 0.0);
    }
}
