use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use super::mealy::{extract, MealyStrategy};
use super::verify::{verify_capped, VerificationReport, DEFAULT_VERIFY_BUDGET};
use super::compute_bound;
use crate::arena::{build_game, solve, AbstractionGame, Player, Solution};
use crate::automata::{determinize_capped, ltl_to_nba_capped, Dpa, DEFAULT_DPA_CAP, DEFAULT_NBA_CAP};
use crate::error::{Error, Result, Stage};
use crate::logic::{relativize, Alphabet, Formula, Partition, COLOR_PROP};
use crate::tracking::{Abstraction, Tracking, DEFAULT_BUDGET};

/// State caps for the pipeline stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budgets {
    pub nba_states: usize,
    pub dpa_states: usize,
    pub behavior_states: usize,
    pub product_edges: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            nba_states: DEFAULT_NBA_CAP,
            dpa_states: DEFAULT_DPA_CAP,
            behavior_states: DEFAULT_BUDGET,
            product_edges: DEFAULT_VERIFY_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Sizes {
    pub formula: Option<usize>,
    pub relativized: Option<usize>,
    pub nba_states: Option<usize>,
    pub dpa_states: usize,
    pub tracking_states: usize,
    pub domains: usize,
    pub behaviors: usize,
    pub behavior_dfa_states: usize,
    pub block_length: usize,
    pub game_vertices: usize,
    pub game_edges: usize,
}

/// Everything the pipeline built on the way to a verdict.
#[derive(Debug, Clone)]
pub struct Solved {
    pub dpa: Dpa,
    pub abstraction: Arc<Abstraction>,
    pub game: AbstractionGame,
    pub solution: Solution,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub winner: Player,
    /// lookahead `2d`
    pub f0: usize,
    /// present iff Player O wins a condition with prompt operators
    pub k: Option<usize>,
    /// `2 (B + 1) d`, also computed for plain LTL conditions where Player
    /// O wins
    pub internal_k: Option<usize>,
    pub sizes: Sizes,
    /// unstripped; [`MealyStrategy::strip`] gives the deliverable
    pub strategy: Option<MealyStrategy>,
    pub verification: Option<VerificationReport>,
    pub solved: Arc<Solved>,
}

impl Verdict {
    /// Structured summary. The strategy table is included (with the
    /// coloring proposition stripped) when it has at most `table_cap`
    /// transitions.
    pub fn document(&self, table_cap: usize) -> Result<Value> {
        let strategy = match &self.strategy {
            None => Value::Null,
            Some(m) => {
                let stripped = m.strip();
                let table = stripped.table(table_cap)?;
                let t = m.abstraction().tracking();
                let aps = t.dpa().alphabet().aps();
                json!({
                    "block_length": m.block_length(),
                    "inputs": &aps[..t.inputs()],
                    "outputs": &aps[t.inputs()..aps.len() - 1],
                    "table": table,
                    "table_omitted": table.is_none(),
                })
            }
        };
        Ok(json!({
            "winner": self.winner,
            "f0": self.f0,
            "k": self.k,
            "sizes": self.sizes,
            "strategy": strategy,
            "verification": self.verification,
        }))
    }
}

pub fn decide(formula: &Formula, part: &Partition) -> Result<Verdict> {
    decide_with(formula, part, Budgets::default())
}

/// The full pipeline for a formula over `part`.
pub fn decide_with(formula: &Formula, part: &Partition, budgets: Budgets) -> Result<Verdict> {
    let rel = relativize(formula);
    let alphabet = part.colored_alphabet();
    let nba = ltl_to_nba_capped(&rel, &alphabet, budgets.nba_states)?;
    let dpa = determinize_capped(&nba, budgets.dpa_states)?;
    log::info!("rel: {} subformulas, NBA {} states, DPA {} states", rel.size(), nba.states(), dpa.states());
    let mut verdict = solve_dpa(dpa, part.inputs().len(), !formula.is_ltl(), budgets)?;
    verdict.sizes.formula = Some(formula.size());
    verdict.sizes.relativized = Some(rel.size());
    verdict.sizes.nba_states = Some(nba.states());
    Ok(verdict)
}

/// The pipeline for a condition given as a parity automaton whose first
/// `inputs` propositions are inputs. An automaton that does not mention
/// the coloring proposition is extended by the requirement that it
/// changes infinitely often; the verdict then carries no prompt bound.
pub fn decide_automaton(dpa: &Dpa, inputs: usize, budgets: Budgets) -> Result<Verdict> {
    let aps = dpa.alphabet().aps();
    if inputs > aps.len() {
        return Err(Error::Invalid(format!("{inputs} inputs declared for {} propositions", aps.len())));
    }
    if aps.last().map(String::as_str) == Some(COLOR_PROP) {
        return solve_dpa(dpa.clone(), inputs, false, budgets);
    }
    if aps.iter().any(|a| a == COLOR_PROP) {
        return Err(Error::Alphabet(format!("`{COLOR_PROP}` must be the last proposition")));
    }
    let colored = Alphabet::new(aps.iter().cloned().chain([COLOR_PROP.to_string()]))?;
    let wide = dpa.over(&colored)?.with_alternation(aps.len()).minimize();
    solve_dpa(wide, inputs, false, budgets)
}

fn solve_dpa(dpa: Dpa, inputs: usize, prompt: bool, budgets: Budgets) -> Result<Verdict> {
    let tracking = Tracking::new(dpa.clone(), inputs)?;
    let abstraction = Arc::new(Abstraction::build(tracking, budgets.behavior_states)?);
    let d = abstraction.block_length();
    let game = build_game(&abstraction)?;
    let solution = solve(&game.game);
    let winner = solution.winner(game.game.initial());
    log::info!(
        "abstraction: {} tracking states, {} behaviors, d = {d}; game {} vertices; winner {winner}",
        abstraction.tracking().len(),
        abstraction.behavior_count(),
        game.game.len()
    );
    let sizes = Sizes {
        formula: None,
        relativized: None,
        nba_states: None,
        dpa_states: dpa.states(),
        tracking_states: abstraction.tracking().len(),
        domains: abstraction.domains().len(),
        behaviors: abstraction.behavior_count(),
        behavior_dfa_states: abstraction.dfa_states(),
        block_length: d,
        game_vertices: game.game.len(),
        game_edges: game.game.edge_count(),
    };
    let (strategy, internal_k, verification) = if winner == Player::O {
        let m = extract(&solution, &game, abstraction.clone(), d)?;
        let k = compute_bound(&abstraction, d)?;
        let report = verify_capped(&m, &dpa, k, budgets.product_edges)?;
        if !report.passed {
            return Err(Error::internal(
                Stage::Verification,
                format!(
                    "extracted strategy failed verification: {}",
                    serde_json::to_string(&report).unwrap_or_default()
                ),
            ));
        }
        (Some(m), Some(k), Some(report))
    } else {
        (None, None, None)
    };
    Ok(Verdict {
        winner,
        f0: 2 * d,
        k: if prompt { internal_k } else { None },
        internal_k,
        sizes,
        strategy,
        verification,
        solved: Arc::new(Solved {
            dpa,
            abstraction,
            game,
            solution,
        }),
    })
}
