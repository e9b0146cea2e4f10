//! Base-2 deterministic automata: acceptors and transducers with per-state
//! output, reading numbers most-significant digit first.
//!
//! Hosts the 4-state classifier for cubefree truncated morphisms, which is
//! learned once from a membership oracle and frozen here as a constant.

use std::collections::HashMap;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exponent::Rational;

/// Deterministic finite acceptor over digits {0,1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    initial: u32,
    transitions: Vec<[u32; 2]>,
    accepting: Vec<bool>,
}

/// Deterministic finite automaton with an output letter per state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfao {
    initial: u32,
    transitions: Vec<[u32; 2]>,
    outputs: Vec<u8>,
}

/// Result of parsing the line-oriented text format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedAutomaton {
    Dfa(Dfa),
    Dfao(Dfao),
}

/// Canonical base-2 digits of `n`, most significant first; zero is `[0]`.
pub fn canonical_digits(n: u64) -> Vec<u8> {
    if n == 0 {
        return vec![0];
    }
    let bits = 64 - n.leading_zeros();
    (0..bits).rev().map(|i| ((n >> i) & 1) as u8).collect()
}

fn check_states(state_count: usize, initial: u32, transitions: &[[u32; 2]]) -> Result<()> {
    let bad = transitions
        .iter()
        .flatten()
        .chain(std::iter::once(&initial))
        .any(|&s| s as usize >= state_count);
    if bad || state_count == 0 {
        return Err(Error::AutomatonParse { line: 0, reason: "state index out of range".into() });
    }
    Ok(())
}

impl Dfa {
    pub fn new(initial: u32, transitions: Vec<[u32; 2]>, accepting: Vec<bool>) -> Result<Self> {
        if transitions.len() != accepting.len() {
            return Err(Error::AutomatonParse {
                line: 0,
                reason: "transition and accepting tables disagree on state count".into(),
            });
        }
        check_states(transitions.len(), initial, &transitions)?;
        Ok(Dfa { initial, transitions, accepting })
    }

    pub fn state_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    pub fn run<I: IntoIterator<Item = u8>>(&self, digits: I) -> bool {
        let mut s = self.initial;
        for d in digits {
            s = self.transitions[s as usize][(d & 1) as usize];
        }
        self.accepting[s as usize]
    }

    pub fn accepts_number(&self, n: u64) -> bool {
        self.run(canonical_digits(n))
    }

    /// Language-equivalent minimal automaton with canonical breadth-first
    /// state numbering, so serialization is reproducible.
    pub fn minimize(&self) -> Dfa {
        let colors: Vec<u8> = self.accepting.iter().map(|&a| a as u8).collect();
        let (initial, transitions, colors) = minimize_colored(self.initial, &self.transitions, &colors);
        Dfa { initial, transitions, accepting: colors.into_iter().map(|c| c != 0).collect() }
    }

    /// Exact number of `n` in `[0, limit)` whose canonical representation is
    /// accepted, by dynamic programming over digits.
    pub fn count_accepted_below(&self, limit: u64) -> u64 {
        if limit == 0 {
            return 0;
        }
        let mut count = u64::from(self.accepts_number(0));
        if limit == 1 {
            return count;
        }
        let digits = canonical_digits(limit);
        let total_len = digits.len();
        // ways[s][r]: accepted completions of length r starting from state s
        let states = self.state_count();
        let mut ways = vec![vec![0u64; total_len]; states];
        for (s, row) in ways.iter_mut().enumerate() {
            row[0] = u64::from(self.accepting[s]);
        }
        for r in 1..total_len {
            for s in 0..states {
                let [t0, t1] = self.transitions[s];
                ways[s][r] = ways[t0 as usize][r - 1] + ways[t1 as usize][r - 1];
            }
        }
        // shorter representations: leading 1, then any l-1 digits
        for l in 1..total_len {
            let s1 = self.transitions[self.initial as usize][1];
            count += ways[s1 as usize][l - 1];
        }
        // same length, strictly below the limit, digit by digit
        let mut state = self.initial;
        for (i, &d) in digits.iter().enumerate() {
            if d == 1 {
                // place 0 here (a leading 0 is not canonical at i = 0)
                if i > 0 {
                    let t = self.transitions[state as usize][0];
                    count += ways[t as usize][total_len - 1 - i];
                }
            }
            state = self.transitions[state as usize][(d & 1) as usize];
        }
        count
    }

    /// Fraction of accepted numbers below `limit`, exact.
    pub fn density(&self, limit: u64) -> Rational {
        assert!(limit >= 1 && limit <= i64::MAX as u64);
        Rational::new(self.count_accepted_below(limit) as i64, limit as i64)
    }

    pub fn serialize(&self) -> String {
        let mut out = String::from("dfa\n");
        out.push_str(&format!("states {}\n", self.state_count()));
        out.push_str(&format!("initial {}\n", self.initial));
        let acc: Vec<String> =
            (0..self.state_count()).filter(|&s| self.accepting[s]).map(|s| s.to_string()).collect();
        out.push_str(&format!("accepting {}\n", acc.join(" ")));
        push_transitions(&mut out, &self.transitions);
        out
    }
}

impl Dfao {
    pub fn new(initial: u32, transitions: Vec<[u32; 2]>, outputs: Vec<u8>) -> Result<Self> {
        if transitions.len() != outputs.len() {
            return Err(Error::AutomatonParse {
                line: 0,
                reason: "transition and output tables disagree on state count".into(),
            });
        }
        check_states(transitions.len(), initial, &transitions)?;
        Ok(Dfao { initial, transitions, outputs })
    }

    pub fn state_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn run<I: IntoIterator<Item = u8>>(&self, digits: I) -> u8 {
        let mut s = self.initial;
        for d in digits {
            s = self.transitions[s as usize][(d & 1) as usize];
        }
        self.outputs[s as usize]
    }

    pub fn output_for_number(&self, n: u64) -> u8 {
        self.run(canonical_digits(n))
    }

    pub fn minimize(&self) -> Dfao {
        let (initial, transitions, outputs) =
            minimize_colored(self.initial, &self.transitions, &self.outputs);
        Dfao { initial, transitions, outputs }
    }

    pub fn serialize(&self) -> String {
        let mut out = String::from("dfao\n");
        out.push_str(&format!("states {}\n", self.state_count()));
        out.push_str(&format!("initial {}\n", self.initial));
        let outs: Vec<String> = self.outputs.iter().map(|o| o.to_string()).collect();
        out.push_str(&format!("outputs {}\n", outs.join(" ")));
        push_transitions(&mut out, &self.transitions);
        out
    }
}

fn push_transitions(out: &mut String, transitions: &[[u32; 2]]) {
    for (s, t) in transitions.iter().enumerate() {
        out.push_str(&format!("{} 0 {}\n", s, t[0]));
        out.push_str(&format!("{} 1 {}\n", s, t[1]));
    }
}

/// Parses the text format produced by [`Dfa::serialize`] / [`Dfao::serialize`].
pub fn parse(text: &str) -> Result<ParsedAutomaton> {
    let err = |line: usize, reason: &str| Error::AutomatonParse { line, reason: reason.into() };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (line, kind) = lines.next().ok_or_else(|| err(1, "empty input"))?;
    if kind != "dfa" && kind != "dfao" {
        return Err(err(line, "expected 'dfa' or 'dfao'"));
    }
    let (line, states_line) = lines.next().ok_or_else(|| err(line, "missing states line"))?;
    let state_count: usize = states_line
        .strip_prefix("states ")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| err(line, "expected 'states <count>'"))?;
    let (line, init_line) = lines.next().ok_or_else(|| err(line, "missing initial line"))?;
    let initial: u32 = init_line
        .strip_prefix("initial ")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| err(line, "expected 'initial <state>'"))?;

    let (line, head) = lines.next().ok_or_else(|| err(line, "missing accepting/outputs line"))?;
    let mut accepting = vec![false; state_count];
    let mut outputs = vec![0u8; state_count];
    if kind == "dfa" {
        let rest =
            head.strip_prefix("accepting").ok_or_else(|| err(line, "expected 'accepting ...'"))?;
        for tok in rest.split_whitespace() {
            let s: usize = tok.parse().map_err(|_| err(line, "bad state in accepting list"))?;
            if s >= state_count {
                return Err(err(line, "accepting state out of range"));
            }
            accepting[s] = true;
        }
    } else {
        let rest =
            head.strip_prefix("outputs").ok_or_else(|| err(line, "expected 'outputs ...'"))?;
        let toks: Vec<&str> = rest.split_whitespace().collect();
        if toks.len() != state_count {
            return Err(err(line, "outputs list length differs from state count"));
        }
        for (s, tok) in toks.iter().enumerate() {
            outputs[s] = tok.parse().map_err(|_| err(line, "bad output value"))?;
        }
    }

    let mut transitions = vec![[u32::MAX; 2]; state_count];
    let mut last_line = line;
    for (line, l) in lines {
        last_line = line;
        let mut it = l.split_whitespace();
        let parse_tok = |t: Option<&str>| t.and_then(|v| v.parse::<u32>().ok());
        let (s, d, t) = match (parse_tok(it.next()), parse_tok(it.next()), parse_tok(it.next())) {
            (Some(s), Some(d), Some(t)) if it.next().is_none() && d <= 1 => (s, d, t),
            _ => return Err(err(line, "expected '<state> <digit> <target>'")),
        };
        if s as usize >= state_count || t as usize >= state_count {
            return Err(err(line, "transition state out of range"));
        }
        if transitions[s as usize][d as usize] != u32::MAX {
            return Err(err(line, "duplicate transition"));
        }
        transitions[s as usize][d as usize] = t;
    }
    for (s, t) in transitions.iter().enumerate() {
        for (d, &target) in t.iter().enumerate() {
            if target == u32::MAX {
                return Err(err(
                    last_line,
                    &format!("missing transition for state {s} on digit {d}"),
                ));
            }
        }
    }

    if kind == "dfa" {
        Ok(ParsedAutomaton::Dfa(Dfa::new(initial, transitions, accepting)?))
    } else {
        Ok(ParsedAutomaton::Dfao(Dfao::new(initial, transitions, outputs)?))
    }
}

/// Trims unreachable states, merges equivalent ones by partition refinement
/// on the colors, and renumbers states in breadth-first discovery order.
fn minimize_colored<C: Eq + std::hash::Hash + Copy>(
    initial: u32,
    transitions: &[[u32; 2]],
    colors: &[C],
) -> (u32, Vec<[u32; 2]>, Vec<C>) {
    // reachable states, in BFS order
    let mut order = vec![initial as usize];
    let mut seen = vec![false; transitions.len()];
    seen[initial as usize] = true;
    let mut head = 0;
    while head < order.len() {
        let s = order[head];
        head += 1;
        for d in 0..2 {
            let t = transitions[s][d] as usize;
            if !seen[t] {
                seen[t] = true;
                order.push(t);
            }
        }
    }

    // partition refinement: start from colors, split on successor classes;
    // each pass only refines, so a constant class count means stability
    let mut class = vec![0u32; transitions.len()];
    let mut class_count;
    {
        let mut by_color: HashMap<C, u32> = HashMap::new();
        for &s in &order {
            let next = by_color.len() as u32;
            class[s] = *by_color.entry(colors[s]).or_insert(next);
        }
        class_count = by_color.len();
    }
    loop {
        let mut sig_to_class: HashMap<(u32, u32, u32), u32> = HashMap::new();
        let mut next_class = vec![0u32; transitions.len()];
        for &s in &order {
            let sig =
                (class[s], class[transitions[s][0] as usize], class[transitions[s][1] as usize]);
            let fresh = sig_to_class.len() as u32;
            next_class[s] = *sig_to_class.entry(sig).or_insert(fresh);
        }
        let next_count = sig_to_class.len();
        class = next_class;
        if next_count == class_count {
            break;
        }
        class_count = next_count;
    }

    // quotient, renumbered by BFS over classes
    let mut class_rep: HashMap<u32, usize> = HashMap::new();
    for &s in &order {
        class_rep.entry(class[s]).or_insert(s);
    }
    let mut new_id: HashMap<u32, u32> = HashMap::new();
    let mut queue = vec![class[initial as usize]];
    new_id.insert(class[initial as usize], 0);
    let mut head = 0;
    while head < queue.len() {
        let c = queue[head];
        head += 1;
        let rep = class_rep[&c];
        for d in 0..2 {
            let tc = class[transitions[rep][d] as usize];
            if let std::collections::hash_map::Entry::Vacant(e) = new_id.entry(tc) {
                e.insert(queue.len() as u32);
                queue.push(tc);
            }
        }
    }
    let n = new_id.len();
    let mut new_transitions = vec![[0u32; 2]; n];
    let mut new_colors: Vec<Option<C>> = vec![None; n];
    for (&c, &id) in &new_id {
        let rep = class_rep[&c];
        for d in 0..2 {
            new_transitions[id as usize][d] = new_id[&class[transitions[rep][d] as usize]];
        }
        new_colors[id as usize] = Some(colors[rep]);
    }
    (0, new_transitions, new_colors.into_iter().map(|c| c.unwrap()).collect())
}

const LEARN_VERIFY_SAMPLES: usize = 10_000;
const LEARN_VERIFY_SEED: u64 = 0x5eed_0001;

/// Learns the DFA of a number language from a membership oracle.
///
/// Every binary string of length at most `depth` is labelled by the oracle
/// applied to its value, so leading zeros are invariant by construction.
/// Prefixes are merged when their labels agree on all extensions within the
/// depth; the hypothesis is then minimized and verified against the oracle on
/// all values below `2^depth` and on random values below `2^(depth+4)`.
pub fn learn_from_oracle<F>(member: F, depth: u32) -> Result<Dfa>
where
    F: Fn(u64) -> bool + Sync,
{
    let learned = learn_labels(&|n| u8::from(member(n)), depth)?;
    let labels = learned.labels;
    let accepting = learned.outputs.iter().map(|&o| o != 0).collect();
    let hypothesis = Dfa::new(learned.initial, learned.transitions, accepting)?.minimize();

    let size = 1u64 << depth;
    let bad = (0..size)
        .into_par_iter()
        .find_any(|&n| hypothesis.accepts_number(n) != (labels[n as usize] != 0));
    if let Some(n) = bad {
        return Err(Error::LearnDepthTooSmall(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(LEARN_VERIFY_SEED);
    let samples: Vec<u64> =
        (0..LEARN_VERIFY_SAMPLES).map(|_| rng.gen_range(0..1u64 << (depth + 4))).collect();
    let bad = samples.into_par_iter().find_any(|&n| hypothesis.accepts_number(n) != member(n));
    if let Some(n) = bad {
        return Err(Error::LearnDepthTooSmall(n));
    }
    Ok(hypothesis)
}

/// Learns a DFAO the same way, with output labels instead of acceptance;
/// verified exhaustively below `2^depth`.
pub fn learn_dfao_from_oracle<F>(output: F, depth: u32) -> Result<Dfao>
where
    F: Fn(u64) -> u8 + Sync,
{
    let learned = learn_labels(&|n| output(n), depth)?;
    let labels = learned.labels;
    let hypothesis = Dfao::new(learned.initial, learned.transitions, learned.outputs)?.minimize();
    let size = 1u64 << depth;
    let bad = (0..size)
        .into_par_iter()
        .find_any(|&n| hypothesis.output_for_number(n) != labels[n as usize]);
    if let Some(n) = bad {
        return Err(Error::LearnDepthTooSmall(n));
    }
    Ok(hypothesis)
}

struct Learned {
    initial: u32,
    transitions: Vec<[u32; 2]>,
    outputs: Vec<u8>,
    labels: Vec<u8>,
}

fn learn_labels(label_of: &(dyn Fn(u64) -> u8 + Sync), depth: u32) -> Result<Learned> {
    assert!((4..=24).contains(&depth), "learning depth out of range");
    let size = 1usize << depth;
    let labels: Vec<u8> = (0..size as u64).into_par_iter().map(label_of).collect();

    // prefixes (as length/value pairs) agree when their labels coincide on
    // every extension that stays within the depth
    let agree = |(la, va): (u32, u64), (lb, vb): (u32, u64)| -> bool {
        let free = depth - la.max(lb);
        for el in 0..=free {
            for ev in 0..(1u64 << el) {
                if labels[((va << el) | ev) as usize] != labels[((vb << el) | ev) as usize] {
                    return false;
                }
            }
        }
        true
    };

    let mut reps: Vec<(u32, u64)> = vec![(0, 0)];
    let mut transitions: Vec<[u32; 2]> = Vec::new();
    let mut frontier = 0usize;
    while frontier < reps.len() {
        let (l, v) = reps[frontier];
        if l + 1 > depth {
            return Err(Error::LearnDepthTooSmall(v));
        }
        let mut row = [0u32; 2];
        for d in 0..2u64 {
            let child = (l + 1, (v << 1) | d);
            row[d as usize] = match reps.iter().position(|&r| agree(r, child)) {
                Some(i) => i as u32,
                None => {
                    reps.push(child);
                    (reps.len() - 1) as u32
                }
            };
        }
        transitions.push(row);
        frontier += 1;
    }
    let outputs: Vec<u8> = reps.iter().map(|&(_, v)| labels[v as usize]).collect();
    Ok(Learned { initial: 0, transitions, outputs, labels })
}

/// Depth used to learn (and re-verify) the classifier.
pub const CLASSIFIER_LEARN_DEPTH: u32 = 14;

const CLASSIFIER_TEXT: &str = include_str!("classifier_hk.dfa");

static CLASSIFIER: OnceLock<Dfa> = OnceLock::new();

/// The frozen 4-state classifier: accepts exactly those `k` for which the
/// truncated morphism of length `k+1` is cubefree. Learned once by
/// [`learn_classifier`], verified, and checked in as a constant.
pub fn classifier_hk() -> &'static Dfa {
    CLASSIFIER.get_or_init(|| match parse(CLASSIFIER_TEXT) {
        Ok(ParsedAutomaton::Dfa(d)) => d,
        _ => unreachable!("embedded classifier must parse as a dfa"),
    })
}

/// Re-learns the classifier from the live membership oracle: condition (c)
/// of the freeness criterion for the length-`k+1` truncated morphism at
/// threshold 3 (the other criterion conditions hold for every truncated
/// morphism; see the freeness module).
pub fn learn_classifier() -> Result<Dfa> {
    learn_from_oracle(
        |k| crate::freeness::truncated_morphism_condition_c(k as usize + 1),
        CLASSIFIER_LEARN_DEPTH,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn suffix_100_oracle(n: u64) -> bool {
        n % 8 == 4
    }

    #[test]
    fn canonical_digit_encoding() {
        assert_eq!(canonical_digits(0), vec![0]);
        assert_eq!(canonical_digits(5), vec![1, 0, 1]);
        assert_eq!(canonical_digits(8), vec![1, 0, 0, 0]);
    }

    #[test]
    fn learn_residue_languages() {
        let even = learn_from_oracle(|n| n % 2 == 0, 6).unwrap();
        assert_eq!(even.state_count(), 2);
        let suffix = learn_from_oracle(suffix_100_oracle, 10).unwrap();
        assert_eq!(suffix.state_count(), 4);
        for n in 0..512 {
            assert_eq!(suffix.accepts_number(n), n % 8 == 4);
        }
    }

    #[test]
    fn counting_matches_enumeration() {
        let suffix = learn_from_oracle(suffix_100_oracle, 10).unwrap();
        for limit in [1u64, 2, 3, 100, 1000, 1 << 16] {
            let direct = (0..limit).filter(|&n| suffix.accepts_number(n)).count() as u64;
            assert_eq!(suffix.count_accepted_below(limit), direct, "limit {limit}");
        }
        assert_eq!(suffix.count_accepted_below(1 << 16), 1 << 13);
        let all = Dfa::new(0, vec![[0, 0]], vec![true]).unwrap();
        assert_eq!(all.count_accepted_below(12345), 12345);
    }

    #[test]
    fn minimize_merges_and_is_idempotent() {
        let dfa = Dfa::new(0, vec![[1, 2], [1, 2], [1, 2]], vec![false, true, true]).unwrap();
        let min = dfa.minimize();
        assert_eq!(min.state_count(), 2);
        assert_eq!(min.minimize(), min);
        for n in 0..64 {
            assert_eq!(dfa.accepts_number(n), min.accepts_number(n));
        }
    }

    #[test]
    fn minimize_preserves_language_on_random_dfas() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.gen_range(1..=8u32);
            let transitions: Vec<[u32; 2]> =
                (0..n).map(|_| [rng.gen_range(0..n), rng.gen_range(0..n)]).collect();
            let accepting: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
            let dfa = Dfa::new(rng.gen_range(0..n), transitions, accepting).unwrap();
            let min = dfa.minimize();
            assert!(min.state_count() <= dfa.state_count());
            assert_eq!(min.minimize(), min);
            for x in 0..1000u64 {
                assert_eq!(dfa.accepts_number(x), min.accepts_number(x));
            }
        }
    }

    #[test]
    fn serialize_parse_round_trip() {
        let dfa = learn_from_oracle(suffix_100_oracle, 10).unwrap();
        let text = dfa.serialize();
        match parse(&text).unwrap() {
            ParsedAutomaton::Dfa(back) => {
                assert_eq!(back, dfa);
                assert_eq!(back.serialize(), text);
            }
            _ => panic!("expected dfa"),
        }
    }

    #[test]
    fn parse_reports_missing_transition() {
        let text = "dfa\nstates 2\ninitial 0\naccepting 1\n0 0 1\n0 1 1\n1 0 0\n";
        match parse(text) {
            Err(Error::AutomatonParse { reason, .. }) => {
                assert!(reason.contains("state 1"), "{reason}");
                assert!(reason.contains("digit 1"), "{reason}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_accepts_comments_and_reports_line_numbers() {
        let text = "# header\ndfa\nstates 1\ninitial 0\naccepting 0\n0 0 0\nbogus line\n";
        match parse(text) {
            Err(Error::AutomatonParse { line, .. }) => assert_eq!(line, 7),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
