use std::collections::HashMap;

use super::alphabet::Alphabet;
use super::formula::Formula;
use super::lasso::LassoWord;

#[derive(Debug, Clone, Copy)]
enum Node {
    /// `None` for propositions outside the alphabet; they never hold.
    Atom(Option<usize>),
    NegAtom(Option<usize>),
    And(usize, usize),
    Or(usize, usize),
    Next(usize),
    Finally(usize),
    Globally(usize),
    Until(usize, usize),
    Release(usize, usize),
    Prompt(usize),
}

/// A formula flattened into its distinct subformulas, children first.
#[derive(Debug, Clone)]
pub struct Evaluator {
    nodes: Vec<Node>,
}

impl Evaluator {
    pub fn new(formula: &Formula, alphabet: &Alphabet) -> Self {
        let mut index = HashMap::new();
        let mut nodes = Vec::new();
        compile(formula, alphabet, &mut index, &mut nodes);
        Evaluator { nodes }
    }

    /// Truth of the root formula at every folded position of `w` under
    /// prompt bound `k`.
    pub fn table(&self, w: &LassoWord, k: usize) -> Vec<bool> {
        let n = w.span();
        let letters: Vec<_> = w.letters().collect();
        let succ: Vec<usize> = (0..n).map(|i| w.succ(i)).collect();
        let mut vals: Vec<Vec<bool>> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let row = match *node {
                Node::Atom(bit) => letters.iter().map(|l| bit.is_some_and(|b| l.has(b))).collect(),
                Node::NegAtom(bit) => letters.iter().map(|l| !bit.is_some_and(|b| l.has(b))).collect(),
                Node::And(a, b) => (0..n).map(|i| vals[a][i] && vals[b][i]).collect(),
                Node::Or(a, b) => (0..n).map(|i| vals[a][i] || vals[b][i]).collect(),
                Node::Next(a) => (0..n).map(|i| vals[a][succ[i]]).collect(),
                Node::Until(a, b) => fixpoint(&succ, false, |i, next| vals[b][i] || (vals[a][i] && next)),
                Node::Finally(b) => fixpoint(&succ, false, |i, next| vals[b][i] || next),
                Node::Release(a, b) => fixpoint(&succ, true, |i, next| vals[b][i] && (vals[a][i] || next)),
                Node::Globally(b) => fixpoint(&succ, true, |i, next| vals[b][i] && next),
                Node::Prompt(a) => {
                    // after `span` steps every reachable position has been seen
                    let horizon = k.min(n);
                    (0..n)
                        .map(|i| {
                            let mut j = i;
                            for step in 0..=horizon {
                                if vals[a][j] {
                                    return true;
                                }
                                if step < horizon {
                                    j = succ[j];
                                }
                            }
                            false
                        })
                        .collect()
                }
            };
            vals.push(row);
        }
        vals.pop().unwrap_or_default()
    }

    pub fn eval(&self, w: &LassoWord, i: usize, k: usize) -> bool {
        self.table(w, k)[w.fold(i)]
    }
}

/// Least (`init = false`) or greatest (`init = true`) fixpoint of a
/// position-wise step over the folded successor relation.
fn fixpoint(succ: &[usize], init: bool, step: impl Fn(usize, bool) -> bool) -> Vec<bool> {
    let n = succ.len();
    let mut val = vec![init; n];
    loop {
        let mut changed = false;
        for i in (0..n).rev() {
            let v = step(i, val[succ[i]]);
            if v != val[i] {
                val[i] = v;
                changed = true;
            }
        }
        if !changed {
            return val;
        }
    }
}

fn compile<'f>(
    f: &'f Formula,
    alphabet: &Alphabet,
    index: &mut HashMap<&'f Formula, usize>,
    nodes: &mut Vec<Node>,
) -> usize {
    if let Some(&i) = index.get(f) {
        return i;
    }
    let mut go = |g: &'f Formula| compile(g, alphabet, index, nodes);
    let node = match f {
        Formula::Atom(a) => Node::Atom(alphabet.index_of(a)),
        Formula::NegAtom(a) => Node::NegAtom(alphabet.index_of(a)),
        Formula::And(a, b) => Node::And(go(a), go(b)),
        Formula::Or(a, b) => Node::Or(go(a), go(b)),
        Formula::Next(a) => Node::Next(go(a)),
        Formula::Finally(a) => Node::Finally(go(a)),
        Formula::Globally(a) => Node::Globally(go(a)),
        Formula::Until(a, b) => Node::Until(go(a), go(b)),
        Formula::Release(a, b) => Node::Release(go(a), go(b)),
        Formula::PromptFinally(a) => Node::Prompt(go(a)),
    };
    nodes.push(node);
    index.insert(f, nodes.len() - 1);
    nodes.len() - 1
}

/// `(w, i, k) ⊨ φ`.
pub fn eval(w: &LassoWord, alphabet: &Alphabet, i: usize, k: usize, formula: &Formula) -> bool {
    Evaluator::new(formula, alphabet).eval(w, i, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::alphabet::Letter;
    use crate::logic::parser::parse_with_atoms;

    fn ab() -> Alphabet {
        Alphabet::new(["q", "r", "a"]).unwrap()
    }

    fn f(text: &str) -> Formula {
        parse_with_atoms(text, &["q", "r", "a"]).unwrap()
    }

    fn word(prefix: &[&[&str]], cycle: &[&[&str]]) -> LassoWord {
        let ab = ab();
        let conv = |ls: &[&[&str]]| ls.iter().map(|l| ab.letter(l.iter()).unwrap()).collect();
        LassoWord::new(conv(prefix), conv(cycle)).unwrap()
    }

    #[test]
    fn request_response_everywhere() {
        let w = word(&[], &[&["q", "r"]]);
        assert!(eval(&w, &ab(), 0, 0, &f("G (q -> FP r)")));
    }

    #[test]
    fn prompt_needs_enough_bound() {
        // a first holds at position 3
        let w = word(&[&[], &[], &[]], &[&["a"]]);
        let fp = f("FP a");
        assert!(!eval(&w, &ab(), 0, 2, &fp));
        assert!(eval(&w, &ab(), 0, 3, &fp));
        assert!(eval(&w, &ab(), 0, 1000, &fp));
    }

    #[test]
    fn recurrence_on_loop() {
        let w = word(&[], &[&["a"], &[]]);
        for k in 0..4 {
            assert!(eval(&w, &ab(), 0, k, &f("G F a")));
        }
        assert!(!eval(&w, &ab(), 0, 0, &f("G FP a")));
        assert!(eval(&w, &ab(), 0, 1, &f("G FP a")));
    }

    #[test]
    fn classical_operators() {
        let w = word(&[&["q"], &["q"], &["r"]], &[&[]]);
        let ab = ab();
        assert!(eval(&w, &ab, 0, 0, &f("q U r")));
        assert!(!eval(&w, &ab, 0, 0, &f("q U a")));
        assert!(eval(&w, &ab, 0, 0, &f("X X r")));
        assert!(eval(&w, &ab, 0, 0, &f("F G !q")));
        assert!(eval(&w, &ab, 0, 0, &f("a R !a")));
        assert!(!eval(&w, &ab, 0, 0, &f("r R q")));
        assert!(eval(&w, &ab, 3, 0, &f("G (!q & !r)")));
    }

    #[test]
    fn unknown_atom_is_false() {
        let w = LassoWord::new(vec![], vec![Letter(0b111)]).unwrap();
        let zz = Formula::atom("zz");
        assert!(!eval(&w, &ab(), 0, 0, &zz));
        assert!(eval(&w, &ab(), 0, 0, &zz.negate().unwrap()));
    }
}
