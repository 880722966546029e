use std::fs;
use std::io::Write;

use anyhow::{bail, Context, Result};
use promptdelay::arena::Player;
use promptdelay::automata::{determinize_capped, ltl_to_nba_capped, read_automaton, write_automaton, Automaton, Dpa};
use promptdelay::logic::{eval, relativize as rel, LassoWord, COLOR_PROP, REL_SIZE_FACTOR};
use promptdelay::lowerbounds::{gen_theorem2, gen_theorem3};
use promptdelay::oracle::{solve_explicit_capped, unroll_prompt, DEFAULT_ORACLE_BUDGET};
use promptdelay::strategy::{decide_automaton, decide_with};
use serde_json::{json, Value};

use crate::condition::{budgets, load, load_formula, read_text, Condition};
use crate::{BudgetArgs, ConditionArgs, Family, OutputArgs, EXIT_I, EXIT_O};

/// Largest strategy table (in transitions) written into a verdict.
const TABLE_CAP: usize = 4096;

fn emit_text(text: &str, output: &OutputArgs) -> Result<()> {
    match &output.out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn emit(doc: &Value, output: &OutputArgs) -> Result<()> {
    emit_text(&(serde_json::to_string_pretty(doc)? + "\n"), output)
}

fn exit_for(winner: Player) -> u8 {
    match winner {
        Player::O => EXIT_O,
        Player::I => EXIT_I,
    }
}

pub fn solve(args: &ConditionArgs, budget: BudgetArgs, output: &OutputArgs) -> Result<u8> {
    let b = budgets(budget);
    let verdict = match load(args, budget)? {
        Condition::Formula { formula, partition } => decide_with(&formula, &partition, b)?,
        Condition::Automaton { dpa, inputs } => decide_automaton(&dpa, inputs, b)?,
    };
    emit(&verdict.document(TABLE_CAP)?, output)?;
    match verdict.k {
        Some(k) => eprintln!("winner: {}, f0 = {}, k = {k}", verdict.winner, verdict.f0),
        None => eprintln!("winner: {}, f0 = {}", verdict.winner, verdict.f0),
    }
    Ok(exit_for(verdict.winner))
}

/// The parity automaton the explicit search runs on, with prompt
/// operators unrolled up to `k`.
pub fn oracle_dpa(args: &ConditionArgs, budget: BudgetArgs, k: usize) -> Result<(Dpa, usize)> {
    match load(args, budget)? {
        Condition::Formula { formula, partition } => {
            let b = budgets(budget);
            let ltl = unroll_prompt(&formula, k);
            let nba = ltl_to_nba_capped(&ltl, &partition.alphabet(), b.nba_states)?;
            Ok((determinize_capped(&nba, b.dpa_states)?, partition.inputs().len()))
        }
        Condition::Automaton { dpa, inputs } => Ok((dpa, inputs)),
    }
}

pub fn oracle(args: &ConditionArgs, budget: BudgetArgs, f0: usize, k: usize, output: &OutputArgs) -> Result<u8> {
    let (dpa, inputs) = oracle_dpa(args, budget, k)?;
    let cap = budget.budget_states.map_or(DEFAULT_ORACLE_BUDGET, |b| b as usize);
    let outcome = solve_explicit_capped(&dpa, inputs, f0, cap)?;
    emit(
        &json!({
            "winner": outcome.winner,
            "f0": f0,
            "k": k,
            "dpa_states": dpa.states(),
            "positions": outcome.positions(),
        }),
        output,
    )?;
    eprintln!("winner with lookahead {f0}: {}", outcome.winner);
    Ok(exit_for(outcome.winner))
}

pub fn gen(family: Family, n: usize, output: &OutputArgs) -> Result<u8> {
    let (name, g) = match family {
        Family::Thm2 => ("thm2", gen_theorem2(n)?),
        Family::Thm3 => ("thm3", gen_theorem3(n)?),
    };
    emit(
        &json!({
            "family": name,
            "n": n,
            "inputs": g.partition.inputs(),
            "outputs": g.partition.outputs(),
            "formula": g.formula.to_string(),
            "size": g.formula.size(),
        }),
        output,
    )?;
    Ok(0)
}

pub fn relativize(args: &ConditionArgs, output: &OutputArgs) -> Result<u8> {
    let (formula, _) = load_formula(args)?;
    let r = rel(&formula);
    emit(
        &json!({
            "formula": formula.to_string(),
            "relativized": r.to_string(),
            "color": COLOR_PROP,
            "size": formula.size(),
            "relativized_size": r.size(),
            "size_factor": REL_SIZE_FACTOR,
        }),
        output,
    )?;
    Ok(0)
}

pub fn translate(args: &ConditionArgs, budget: BudgetArgs, k: Option<usize>, nba: bool, output: &OutputArgs) -> Result<u8> {
    let (formula, partition) = load_formula(args)?;
    let b = budgets(budget);
    let (ltl, alphabet) = match k {
        Some(k) => (unroll_prompt(&formula, k), partition.alphabet()),
        None if formula.is_ltl() => (formula, partition.alphabet()),
        None => (rel(&formula), partition.colored_alphabet()),
    };
    let buchi = ltl_to_nba_capped(&ltl, &alphabet, b.nba_states)?;
    let automaton = if nba {
        Automaton::Nba(buchi)
    } else {
        Automaton::Dpa(determinize_capped(&buchi, b.dpa_states)?)
    };
    emit_text(&write_automaton(&automaton), output)?;
    match &automaton {
        Automaton::Nba(a) => eprintln!("NBA with {} states over {}", a.states(), alphabet),
        Automaton::Dpa(a) => eprintln!("DPA with {} states over {}", a.states(), alphabet),
    }
    Ok(0)
}

pub fn check(args: &ConditionArgs, lasso: &str, k: usize, output: &OutputArgs) -> Result<u8> {
    let (formula, partition) = load_formula(args)?;
    let alphabet = partition.alphabet();
    let word = LassoWord::parse(lasso, &alphabet)?;
    let holds = eval(&word, &alphabet, 0, k, &formula);
    emit(
        &json!({
            "holds": holds,
            "k": k,
            "lasso": word.render(&alphabet),
        }),
        output,
    )?;
    Ok(0)
}

pub fn inspect(args: &ConditionArgs, output: &OutputArgs) -> Result<u8> {
    let doc = if let Some(path) = &args.dpa {
        match read_automaton(&read_text(path)?)? {
            Automaton::Dpa(d) => {
                let mut colors = d.colors().to_vec();
                colors.sort_unstable();
                colors.dedup();
                json!({
                    "type": "dpa",
                    "aps": d.alphabet().aps(),
                    "states": d.states(),
                    "initial": d.initial(),
                    "colors": colors,
                })
            }
            Automaton::Nba(n) => {
                let accepting = (0..n.states()).filter(|&q| n.is_accepting(q)).count();
                json!({
                    "type": "nba",
                    "aps": n.alphabet().aps(),
                    "states": n.states(),
                    "initial": n.initial(),
                    "accepting": accepting,
                })
            }
        }
    } else if args.formula.is_some() {
        let (formula, partition) = load_formula(args)?;
        json!({
            "type": "formula",
            "formula": formula.to_string(),
            "inputs": partition.inputs(),
            "outputs": partition.outputs(),
            "atoms": formula.atoms(),
            "ltl": formula.is_ltl(),
            "size": formula.size(),
            "relativized_size": rel(&formula).size(),
        })
    } else {
        bail!("one of --formula or --dpa is required");
    };
    emit(&doc, output)?;
    Ok(0)
}
