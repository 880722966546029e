use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use promptdelay::automata::{read_automaton, write_automaton};
use promptdelay::logic::{eval, parse_formula, parse_with_atoms, relativize, Formula, LassoWord, Letter, Partition};
use promptdelay::lowerbounds::{gen_theorem2, gen_theorem3};
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_promptdelay"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn qr() -> Partition {
    Partition::new(["q"], ["r"]).unwrap()
}

#[test]
fn solve_exit_codes() {
    let o = run(&["solve", "--formula", "G (q -> FP r)", "--inputs", "q", "--outputs", "r"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc = json(&o);
    assert_eq!(doc["winner"], "O");
    let d = doc["strategy"]["block_length"].as_u64().unwrap();
    assert_eq!(doc["f0"].as_u64().unwrap(), 2 * d);
    assert!(doc["k"].as_u64().is_some());
    assert_eq!(doc["verification"]["passed"], true);

    // Player I controls q
    let o = run(&["solve", "--formula", "G q", "--inputs", "q", "--outputs", "r"]);
    assert_eq!(code(&o), 10);
    let doc = json(&o);
    assert_eq!(doc["winner"], "I");
    assert!(doc["strategy"].is_null());
    assert!(doc["k"].is_null());

    let o = run(&["solve", "--formula", "G (q ->", "--inputs", "q", "--outputs", "r"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("parse error"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());

    let o = run(&["solve", "--formula", "G z", "--inputs", "q", "--outputs", "r"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn capacity_errors_name_the_stage() {
    let o = run(&[
        "solve",
        "--formula",
        "G (q -> FP r)",
        "--inputs",
        "q",
        "--outputs",
        "r",
        "--budget-states",
        "2",
    ]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("capacity exceeded"), "{err}");
    assert!(err.contains("translation") || err.contains("determinization"), "{err}");

    let o = run(&["solve", "--formula", "G q", "--inputs", "q", "--budget-states", "0"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn oracle_needs_one_letter_of_lookahead_for_prediction() {
    let args = |f0: &'static str| ["oracle", "--formula", "G (r <-> X q)", "--inputs", "q", "--outputs", "r", "--f0", f0];
    let o = run(&args("1"));
    assert_eq!(code(&o), 10);
    assert_eq!(json(&o)["winner"], "I");
    let o = run(&args("2"));
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["winner"], "O");

    let o = run(&["oracle", "--formula", "G (q | !q)", "--inputs", "q", "--outputs", "r"]);
    assert_eq!(code(&o), 0);

    // r is forbidden at the first two positions, so O needs k ≥ 2
    let prompt = |k: &'static str| ["oracle", "--formula", "!r & X !r & FP r", "--inputs", "q", "--outputs", "r", "--k", k];
    assert_eq!(code(&run(&prompt("1"))), 10);
    assert_eq!(code(&run(&prompt("2"))), 0);

    let o = run(&["oracle", "--formula", "G q", "--inputs", "q", "--f0", "0"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn generated_formulas_reparse() {
    for n in 1..=3 {
        let o = run(&["gen", "--family", "thm2", "--n", &n.to_string()]);
        assert_eq!(code(&o), 0);
        let doc = json(&o);
        let names = |key: &str| -> Vec<String> {
            doc[key].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect()
        };
        let part = Partition::new(names("inputs"), names("outputs")).unwrap();
        let f = parse_formula(doc["formula"].as_str().unwrap(), &part).unwrap();
        let expected = gen_theorem2(n).unwrap();
        assert_eq!(part, expected.partition);
        assert_eq!(f, expected.formula);
        assert_eq!(doc["size"].as_u64().unwrap() as usize, f.size());
    }

    let o = run(&["gen", "--family", "thm3", "--n", "1"]);
    assert_eq!(code(&o), 0);
    let doc = json(&o);
    let g = gen_theorem3(1).unwrap();
    let f = parse_formula(doc["formula"].as_str().unwrap(), &g.partition).unwrap();
    assert_eq!(f, g.formula);
    assert!(!f.is_ltl());
    assert!(doc["formula"].as_str().unwrap().contains("FP right_mark"));

    assert_eq!(code(&run(&["gen", "--family", "thm2", "--n", "25"])), 2);
    assert_eq!(code(&run(&["gen", "--family", "thm2", "--n", "0"])), 2);
}

#[test]
fn relativize_prompt_eventually() {
    let o = run(&["relativize", "--formula", "FP q", "--inputs", "q"]);
    assert_eq!(code(&o), 0);
    let doc = json(&o);
    let color = doc["color"].as_str().unwrap();
    let got = parse_with_atoms(doc["relativized"].as_str().unwrap(), &["q", color]).unwrap();
    // within one color change, plus infinitely many changes
    let expected = parse_with_atoms(
        &format!(
            "(({c} -> ({c} U (!{c} U q))) & (!{c} -> (!{c} U ({c} U q)))) & G F {c} & G F !{c}",
            c = color
        ),
        &["q", color],
    )
    .unwrap();
    let conjuncts = |f: &Formula| -> Vec<Formula> {
        let mut out = Vec::new();
        let mut stack = vec![f.clone()];
        while let Some(g) = stack.pop() {
            match g {
                Formula::And(a, b) => {
                    stack.push(*a);
                    stack.push(*b);
                }
                other => out.push(other),
            }
        }
        out.sort_by_key(|g| g.to_string());
        out
    };
    assert_eq!(conjuncts(&got), conjuncts(&expected));
    let size = doc["size"].as_u64().unwrap();
    let rel_size = doc["relativized_size"].as_u64().unwrap();
    assert!(rel_size <= doc["size_factor"].as_u64().unwrap() * size);
    assert_eq!(got, relativize(&parse_formula("FP q", &Partition::new(["q"], Vec::<&str>::new()).unwrap()).unwrap()));
}

#[test]
fn translated_automata_round_trip() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("g.json");
    let p = path.to_str().unwrap();
    let o = run(&["translate", "--formula", "G q", "--inputs", "q", "--outputs", "r", "--out", p]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&path).unwrap();
    let automaton = read_automaton(&text).unwrap();
    assert_eq!(write_automaton(&automaton), text);

    let o = run(&["inspect", "--dpa", p]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["type"], "dpa");

    // the automaton file is a valid condition: I holds q false once
    let o = run(&["solve", "--dpa", p, "--inputs", "q"]);
    assert_eq!(code(&o), 10, "{}", stderr(&o));
    let o = run(&["solve", "--dpa", p, "--inputs", "r"]);
    assert_eq!(code(&o), 2);

    let nba = dir.path().join("n.json");
    let o = run(&[
        "translate",
        "--formula",
        "G (r <-> X q)",
        "--inputs",
        "q",
        "--outputs",
        "r",
        "--nba",
        "--out",
        nba.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let o = run(&["oracle", "--dpa", nba.to_str().unwrap(), "--inputs", "q", "--f0", "2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = run(&["oracle", "--dpa", nba.to_str().unwrap(), "--inputs", "q", "--f0", "1"]);
    assert_eq!(code(&o), 10);

    // a prompt formula without a bound is translated through relativization
    let o = run(&["translate", "--formula", "G FP r", "--inputs", "q", "--outputs", "r"]);
    assert_eq!(code(&o), 0);
    let Ok(promptdelay::automata::Automaton::Dpa(d)) = read_automaton(&stdout(&o)) else { panic!() };
    assert_eq!(d.alphabet().aps().len(), 3);
}

#[test]
fn check_matches_evaluation() {
    let f = parse_formula("G (q -> FP r)", &qr()).unwrap();
    let ab = qr().alphabet();
    for (lasso, k) in [("({q} {} {r})", 2), ("({q} {} {r})", 1), ("{q} ({r})", 0), ("{q} ({})", 5), ("({q,r})", 0)] {
        let o = run(&["check", "--formula", "G (q -> FP r)", "--inputs", "q", "--outputs", "r", "--lasso", lasso, "--k", &k.to_string()]);
        assert_eq!(code(&o), 0);
        let w = LassoWord::parse(lasso, &ab).unwrap();
        assert_eq!(json(&o)["holds"].as_bool().unwrap(), eval(&w, &ab, 0, k, &f), "{lasso} at {k}");
    }
    let o = run(&["check", "--formula", "G q", "--inputs", "q", "--lasso", "{q}"]);
    assert_eq!(code(&o), 2);
}

fn play(args: &[&str], transcript: &Path) -> Output {
    let mut all = vec!["play"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--transcript", transcript.to_str().unwrap()]);
    run(&all)
}

const REQUEST: [&str; 6] = ["--formula", "G (q -> FP r)", "--inputs", "q", "--outputs", "r"];

#[test]
fn play_replay_is_deterministic_and_quits_cleanly() {
    let dir = TempDir::new().unwrap();
    let t = dir.path().join("t.txt");
    fs::write(
        &t,
        "# a session\n{q} {} {} {} {} {}\nnot a move\n{q}\n{} {} {q} {} {} {}\ntrace\n{q} {q} {q} {q} {q} {q}\nquit\n{} {} {} {} {} {}\n",
    )
    .unwrap();
    let first = play(&REQUEST, &t);
    assert_eq!(code(&first), 0, "{}", stderr(&first));
    let text = stdout(&first);
    assert_eq!(text.matches("illegal move").count(), 2);
    assert_eq!(text.matches("O  block").count(), 2);
    // nothing after quit is read
    assert!(text.contains("session over after 3 blocks"), "{text}");
    assert!(text.contains("trace: "));

    let second = play(&REQUEST, &t);
    assert_eq!(first.stdout, second.stdout);

    // a recorded session replays to the same machine moves
    let rec = dir.path().join("rec.txt");
    let third = run(&[
        "play",
        REQUEST[0],
        REQUEST[1],
        REQUEST[2],
        REQUEST[3],
        REQUEST[4],
        REQUEST[5],
        "--transcript",
        t.to_str().unwrap(),
        "--record",
        rec.to_str().unwrap(),
    ]);
    assert_eq!(code(&third), 0);
    let recorded = fs::read_to_string(&rec).unwrap();
    assert_eq!(recorded.lines().count(), 4);
    let replayed = play(&REQUEST, &rec);
    let moves = |s: &str| -> Vec<String> {
        s.lines()
            .filter(|l| l.starts_with("O  ") || l.starts_with("I  ") || l.contains("machine state"))
            .map(str::to_string)
            .collect()
    };
    assert_eq!(moves(&stdout(&replayed)), moves(&text));
}

fn letters(line: &str, alphabet: &promptdelay::logic::Alphabet) -> Vec<Letter> {
    let word = LassoWord::parse(&format!("{line} ({{}})"), alphabet).unwrap();
    let n = word.span() - 1;
    (0..n).map(|i| word.letter(i)).collect()
}

/// Drives the machine with eventually periodic input blocks, reads the
/// played word off the session and checks it against the formula at the
/// announced bound.
#[test]
fn machine_answers_requests_within_the_bound() {
    let dir = TempDir::new().unwrap();
    let prefix = ["{q} {} {} {} {} {}", "{} {} {} {} {} {}", "{q} {q} {} {} {q} {}"];
    let cycle = ["{} {} {} {} {} {q}", "{q} {q} {q} {q} {q} {q}", "{} {} {} {} {} {}"];
    let mut lines: Vec<&str> = prefix.to_vec();
    for _ in 0..40 {
        lines.extend_from_slice(&cycle);
    }
    let t = dir.path().join("t.txt");
    fs::write(&t, lines.join("\n") + "\n").unwrap();
    let o = play(&REQUEST, &t);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);

    let k: usize = text
        .lines()
        .find_map(|l| l.strip_prefix("prompt bound k = "))
        .unwrap()
        .parse()
        .unwrap();
    let mut outputs: Vec<String> = Vec::new();
    let mut states: Vec<String> = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("O  block ") {
            let (i, out) = rest.split_once(": ").unwrap();
            assert_eq!(i.parse::<usize>().unwrap(), outputs.len());
            outputs.push(out.to_string());
        } else if let Some(r) = line.trim().strip_prefix("machine state: ") {
            states.push(r.to_string());
        }
    }
    assert_eq!(states.len(), lines.len());

    // state after block t is (behavior, block t); with periodic input from
    // block `prefix.len()` on, a repeated (behavior, phase) closes the play
    let p = prefix.len();
    let mut loop_at = None;
    'search: for j in p..states.len() {
        for i in p..j {
            if (j - i) % cycle.len() == 0 && states[i] == states[j] && j <= outputs.len() {
                loop_at = Some((i, j));
                break 'search;
            }
        }
    }
    let (i, j) = loop_at.expect("the machine state repeats");

    let part = qr();
    let ab = part.alphabet();
    let ins = Partition::new(["q"], Vec::<&str>::new()).unwrap().alphabet();
    let outs = Partition::new(["r"], Vec::<&str>::new()).unwrap().alphabet();
    let combined = |t: usize| -> Vec<Letter> {
        letters(lines[t], &ins)
            .into_iter()
            .zip(letters(&outputs[t], &outs))
            .map(|(a, b)| Letter(a.0 | b.0 << 1))
            .collect()
    };
    let word = LassoWord::new((0..i).flat_map(combined).collect(), (i..j).flat_map(combined).collect()).unwrap();
    let f = parse_formula("G (q -> FP r)", &part).unwrap();
    assert!(eval(&word, &ab, 0, k, &f), "{}", word.render(&ab));
    // requests are answered at all, not only within a huge bound
    assert!(outputs.iter().any(|o| o.contains('r')));
}

#[test]
fn machine_can_play_player_i() {
    let dir = TempDir::new().unwrap();
    let t = dir.path().join("t.txt");
    fs::write(&t, "{}\n{r}\n{x}\n{} {}\n{}\ntrace\nquit\n").unwrap();
    let args = ["--formula", "G (r <-> X q)", "--inputs", "q", "--outputs", "r", "--side", "o", "--f0", "1"];
    let first = play(&args, &t);
    assert_eq!(code(&first), 0, "{}", stderr(&first));
    let text = stdout(&first);
    assert_eq!(text.matches("O  letter").count(), 3, "{text}");
    assert_eq!(text.matches("illegal move").count(), 2, "{text}");
    assert!(text.contains("session over after 3 answered letters"));
    assert_eq!(play(&args, &t).stdout, first.stdout);

    // with two letters of lookahead Player O wins, so there is no machine I
    let mut two = args;
    two[9] = "2";
    let o = play(&two, &t);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("no strategy for Player I"));
}

#[test]
fn play_defaults_to_the_losing_side() {
    let dir = TempDir::new().unwrap();
    let t = dir.path().join("t.txt");
    fs::write(&t, "{}\nquit\n").unwrap();
    let o = play(&["--formula", "G q", "--inputs", "q", "--outputs", "r"], &t);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("machine: Player I"));

    let o = play(&["--formula", "G q", "--inputs", "q", "--outputs", "r", "--side", "i"], &t);
    assert_eq!(code(&o), 2);
}
