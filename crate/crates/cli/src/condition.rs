use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use promptdelay::automata::{determinize_capped, read_automaton, Automaton, Dpa, DEFAULT_DPA_CAP};
use promptdelay::logic::{parse_formula, Formula, Partition};
use promptdelay::strategy::Budgets;

use crate::{BudgetArgs, ConditionArgs};

/// A winning condition as given on the command line.
pub enum Condition {
    Formula { formula: Formula, partition: Partition },
    /// parity automaton whose first `inputs` propositions are inputs
    Automaton { dpa: Dpa, inputs: usize },
}

pub fn budgets(args: BudgetArgs) -> Budgets {
    let mut b = Budgets::default();
    if let Some(n) = args.budget_states {
        let n = n as usize;
        b.nba_states = n;
        b.dpa_states = n;
        b.behavior_states = n;
    }
    b
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// `text` itself, or the contents of the file named after a leading `@`.
fn formula_text(arg: &str) -> Result<String> {
    match arg.strip_prefix('@') {
        Some(path) => Ok(read_text(Path::new(path))?.trim().to_string()),
        None => Ok(arg.to_string()),
    }
}

pub fn partition(args: &ConditionArgs) -> Result<Partition> {
    Ok(Partition::new(args.inputs.iter().cloned(), args.outputs.iter().cloned())?)
}

pub fn load(args: &ConditionArgs, budget: BudgetArgs) -> Result<Condition> {
    if let Some(f) = &args.formula {
        let partition = partition(args)?;
        let formula = parse_formula(&formula_text(f)?, &partition)?;
        return Ok(Condition::Formula { formula, partition });
    }
    let Some(path) = &args.dpa else {
        bail!("one of --formula or --dpa is required");
    };
    let dpa = match read_automaton(&read_text(path)?)? {
        Automaton::Dpa(d) => d,
        Automaton::Nba(n) => {
            let cap = budget.budget_states.map_or(DEFAULT_DPA_CAP, |b| b as usize);
            determinize_capped(&n, cap)?
        }
    };
    let aps = dpa.alphabet().aps();
    let inputs = args.inputs.len();
    if inputs > aps.len() || aps[..inputs] != args.inputs[..] {
        bail!(
            "--inputs must list the first propositions of the automaton, which are {}",
            dpa.alphabet()
        );
    }
    if !args.outputs.is_empty() && aps[inputs..] != args.outputs[..] {
        bail!("--outputs must list the remaining propositions of the automaton in order");
    }
    Ok(Condition::Automaton { dpa, inputs })
}

/// Only formulas make sense for this command.
pub fn load_formula(args: &ConditionArgs) -> Result<(Formula, Partition)> {
    if args.dpa.is_some() {
        bail!("this command takes --formula, not --dpa");
    }
    match load(args, BudgetArgs { budget_states: None })? {
        Condition::Formula { formula, partition } => Ok((formula, partition)),
        Condition::Automaton { .. } => unreachable!("no automaton path given"),
    }
}
