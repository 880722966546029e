//! Text-mode play against a machine strategy.
//!
//! The machine plays Player O with the extracted block strategy, or Player
//! I with a positional strategy of the explicit lookahead game. Human moves
//! are read line by line, from standard input or from a transcript file;
//! every line of output is determined by the moves, so replaying a
//! transcript reproduces the session.

use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use promptdelay::arena::Player;
use promptdelay::logic::{Alphabet, Letter};
use promptdelay::oracle::{solve_explicit_capped, OracleOutcome, DEFAULT_ORACLE_BUDGET};
use promptdelay::strategy::{decide_automaton, decide_with, MealyState, MealyStrategy, Verdict};

use crate::commands::oracle_dpa;
use crate::condition::{budgets, load, Condition};
use crate::{BudgetArgs, ConditionArgs, Side};

pub struct PlayConfig {
    pub condition: ConditionArgs,
    pub budget: BudgetArgs,
    /// side of the human player
    pub side: Option<Side>,
    pub f0: usize,
    pub k: usize,
    pub transcript: Option<PathBuf>,
    pub record: Option<PathBuf>,
}

/// Line-based terminal: prompts, reads human moves, optionally records
/// them.
struct Console {
    input: Box<dyn BufRead>,
    replay: bool,
    out: io::StdoutLock<'static>,
    record: Option<File>,
}

enum Line {
    Move(String),
    Trace,
    Help,
    Quit,
}

impl Console {
    fn say(&mut self, text: impl AsRef<str>) -> Result<()> {
        writeln!(self.out, "{}", text.as_ref())?;
        Ok(())
    }

    /// Next meaningful line after `prompt`; `Quit` at end of input.
    fn read(&mut self, prompt: &str) -> Result<Line> {
        loop {
            write!(self.out, "{prompt}")?;
            self.out.flush()?;
            let mut buf = String::new();
            if self.input.read_line(&mut buf)? == 0 {
                writeln!(self.out)?;
                return Ok(Line::Quit);
            }
            let line = buf.trim();
            if self.replay {
                writeln!(self.out, "{line}")?;
            }
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            return Ok(match line {
                "quit" | "exit" => {
                    self.log("quit")?;
                    Line::Quit
                }
                "trace" => Line::Trace,
                "help" => Line::Help,
                _ => Line::Move(line.to_string()),
            });
        }
    }

    fn log(&mut self, line: &str) -> Result<()> {
        if let Some(f) = &mut self.record {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// Letters written as `{a,b} {} ...` over `alphabet`.
fn parse_letters(text: &str, alphabet: &Alphabet) -> Result<Vec<Letter>, String> {
    let mut letters = Vec::new();
    let mut rest = text.trim_start();
    while !rest.is_empty() {
        let Some(body) = rest.strip_prefix('{') else {
            return Err(format!("expected `{{` at `{rest}`"));
        };
        let end = body.find('}').ok_or("unterminated letter")?;
        let names: Vec<&str> = body[..end].split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        letters.push(alphabet.letter(names).map_err(|e| e.to_string())?);
        rest = body[end + 1..].trim_start();
    }
    Ok(letters)
}

pub fn run(cfg: &PlayConfig) -> Result<u8> {
    let (input, replay): (Box<dyn BufRead>, bool) = match &cfg.transcript {
        Some(path) => {
            let f = File::open(path).with_context(|| format!("cannot open transcript {}", path.display()))?;
            (Box::new(BufReader::new(f)), true)
        }
        None => (Box::new(io::stdin().lock()), false),
    };
    let record = match &cfg.record {
        Some(path) => Some(
            OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .with_context(|| format!("cannot open {}", path.display()))?,
        ),
        None => None,
    };
    let mut console = Console {
        input,
        replay,
        out: io::stdout().lock(),
        record,
    };

    let machine_o = match cfg.side {
        Some(Side::I) => Some(verdict(cfg)?),
        Some(Side::O) => None,
        None => {
            let v = verdict(cfg)?;
            (v.winner == Player::O).then_some(v)
        }
    };
    match machine_o {
        Some(v) => {
            let Some(m) = &v.strategy else {
                bail!("Player I wins this game; the machine has no strategy for Player O");
            };
            play_as_o(&mut console, &v, &m.strip())?;
        }
        None => {
            let (dpa, inputs) = oracle_dpa(&cfg.condition, cfg.budget, cfg.k)?;
            let cap = cfg.budget.budget_states.map_or(DEFAULT_ORACLE_BUDGET, |b| b as usize);
            let outcome = solve_explicit_capped(&dpa, inputs, cfg.f0, cap)?;
            if outcome.winner != Player::I {
                bail!(
                    "Player O wins with lookahead {} and bound {}; the machine has no strategy for Player I",
                    cfg.f0,
                    cfg.k
                );
            }
            play_as_i(&mut console, &outcome, cfg)?;
        }
    }
    Ok(0)
}

fn verdict(cfg: &PlayConfig) -> Result<Verdict> {
    let b = budgets(cfg.budget);
    Ok(match load(&cfg.condition, cfg.budget)? {
        Condition::Formula { formula, partition } => decide_with(&formula, &partition, b)?,
        Condition::Automaton { dpa, inputs } => decide_automaton(&dpa, inputs, b)?,
    })
}

fn sub_alphabet(aps: &[String]) -> Result<Alphabet> {
    Ok(Alphabet::new(aps.iter().cloned())?)
}

fn render(alphabet: &Alphabet, letters: &[Letter]) -> String {
    letters.iter().map(|&l| alphabet.render(l)).collect::<Vec<_>>().join(" ")
}

fn play_as_o(console: &mut Console, verdict: &Verdict, m: &MealyStrategy) -> Result<()> {
    let t = m.abstraction().tracking();
    let aps = t.dpa().alphabet().aps();
    let inputs = sub_alphabet(&aps[..t.inputs()])?;
    let outputs = sub_alphabet(&aps[t.inputs()..aps.len() - 1])?;
    let both = sub_alphabet(&aps[..aps.len() - 1])?;
    let d = m.block_length();

    console.say(format!("machine: Player O, lookahead {} letters, blocks of {d}", verdict.f0))?;
    if let Some(k) = verdict.k {
        console.say(format!("prompt bound k = {k}"))?;
    }
    console.say(format!(
        "you: Player I over {inputs}; enter {d} letters per block, e.g. `{}`; commands: trace, help, quit",
        render(&inputs, &vec![Letter(0); d])
    ))?;

    let mut state = m.initial();
    let mut owed: Vec<Vec<Letter>> = Vec::new();
    let mut trace: Vec<Letter> = Vec::new();
    loop {
        let i = owed.len();
        let line = match console.read(&format!("block {i}> "))? {
            Line::Quit => break,
            Line::Help => {
                console.say(format!("enter {d} letters over {inputs}, each in braces"))?;
                continue;
            }
            Line::Trace => {
                console.say(format!("trace: {}", render(&both, &trace)))?;
                continue;
            }
            Line::Move(line) => line,
        };
        let block = match parse_letters(&line, &inputs) {
            Ok(b) if b.len() == d => b,
            Ok(b) => {
                console.say(format!("illegal move: {} letters, expected {d}", b.len()))?;
                continue;
            }
            Err(e) => {
                console.say(format!("illegal move: {e}"))?;
                continue;
            }
        };
        console.log(&line)?;
        let (next, out) = m.step(&state, &block).map_err(|e| anyhow!(e))?;
        console.say(format!("I  block {i}: {}", render(&inputs, &block)))?;
        if let Some(out) = out {
            let answered = &owed[i - 1];
            trace.extend(answered.iter().zip(&out).map(|(&a, &b)| t.combine(a, b)));
            console.say(format!("O  block {}: {}", i - 1, render(&outputs, &out)))?;
        }
        if let MealyState::Running { r, .. } = &next {
            console.say(format!("   machine state: behavior {r}"))?;
        }
        owed.push(block);
        state = next;
    }
    console.say(format!("session over after {} blocks", owed.len()))?;
    Ok(())
}

fn play_as_i(console: &mut Console, outcome: &OracleOutcome, cfg: &PlayConfig) -> Result<()> {
    let game = &outcome.game;
    let dpa = game.dpa();
    let aps = dpa.alphabet().aps();
    let inputs = sub_alphabet(&aps[..game.inputs()])?;
    let outputs = sub_alphabet(&aps[game.inputs()..])?;
    let strategy = outcome.solution.strategy(Player::I);

    console.say(format!("machine: Player I, you answer with lookahead {} letters", cfg.f0))?;
    console.say(format!(
        "you: Player O over {outputs}; answer the oldest unanswered input with one letter, e.g. `{}`; commands: trace, help, quit",
        outputs.render(Letter(0))
    ))?;

    let mut v = game.game().initial();
    let mut trace: Vec<Letter> = Vec::new();
    loop {
        while game.vertex(v).turn == Player::I {
            let w = strategy
                .choice(v)
                .ok_or_else(|| anyhow!("no strategy move at position {v}"))?;
            let a = *game.vertex(w).queue.last().expect("input was just appended");
            console.say(format!("I  letter {}: {}", trace.len() + game.vertex(v).queue.len(), inputs.render(Letter(a))))?;
            v = w;
        }
        let here = game.vertex(v).clone();
        let line = match console.read(&format!("answer {} at {}> ", inputs.render(Letter(here.queue[0])), trace.len()))? {
            Line::Quit => break,
            Line::Help => {
                console.say(format!("enter one letter over {outputs}"))?;
                continue;
            }
            Line::Trace => {
                console.say(format!("trace: {}", render(dpa.alphabet(), &trace)))?;
                continue;
            }
            Line::Move(line) => line,
        };
        let b = match parse_letters(&line, &outputs) {
            Ok(b) if b.len() == 1 => b[0],
            Ok(b) => {
                console.say(format!("illegal move: {} letters, expected 1", b.len()))?;
                continue;
            }
            Err(e) => {
                console.say(format!("illegal move: {e}"))?;
                continue;
            }
        };
        console.log(&line)?;
        let letter = Letter(here.queue[0] | b.0 << game.inputs());
        let state = dpa.step(here.state, letter);
        v = *game
            .game()
            .successors(v)
            .iter()
            .find(|&&w| {
                let next = game.vertex(w);
                next.state == state && next.queue[..] == here.queue[1..]
            })
            .ok_or_else(|| anyhow!("answer has no position in the game"))?;
        trace.push(letter);
        console.say(format!(
            "O  letter {}: {}   automaton state {state}, color {}",
            trace.len() - 1,
            outputs.render(b),
            dpa.color(state)
        ))?;
    }
    console.say(format!("session over after {} answered letters", trace.len()))?;
    Ok(())
}
