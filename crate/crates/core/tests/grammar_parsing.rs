//! Parsing sentences and word lattices with the built-in grammars.

use muse_core::cdg::{build_network, builtin_grammar, parse, prune, Builtin, Grammar, WordGraph};
use muse_core::muse_ac1;

fn parse_rows(wg: &WordGraph, g: Builtin) -> Vec<Vec<(String, String, String)>> {
    let res = parse(wg, &builtin_grammar(g)).unwrap();
    res.parses
        .iter()
        .map(|a| {
            res.network
                .role_values(a)
                .into_iter()
                .map(|(w, _, v)| {
                    let word = &res.network.words[w];
                    (word.span.to_string(), word.cat.clone(), v.to_string())
                })
                .collect()
        })
        .collect()
}

fn row(span: &str, cat: &str, value: &str) -> (String, String, String) {
    (span.into(), cat.into(), value.into())
}

#[test]
fn determiner_noun_verb_sentence_has_one_parse() {
    let wg = WordGraph::sentence(&[("the", "det"), ("dog", "noun"), ("eats", "verb")]);
    let parses = parse_rows(&wg, Builtin::G1);
    assert_eq!(
        parses,
        vec![vec![
            row("(1,2)", "det", "det-(2,3)"),
            row("(2,3)", "noun", "subj-(3,4)"),
            row("(3,4)", "verb", "root-nil"),
        ]]
    );
}

#[test]
fn unary_constraints_leave_one_determiner_value_per_target() {
    let wg = WordGraph::sentence(&[("the", "det"), ("dog", "noun"), ("eats", "verb")]);
    let mut net = build_network(&wg, &builtin_grammar(Builtin::G1)).unwrap();
    // det, root, subj each with nil or one of the two other words' spans.
    assert_eq!(net.muse.csp().domain(0).len(), 9);
    prune(&mut net);
    let left: Vec<String> = net.muse.csp().domain(0).iter().map(|x| net.values[x].to_string()).collect();
    assert_eq!(left, vec!["det-(2,3)", "det-(3,4)"]);
}

#[test]
fn abc_lattice_of_length_nine_keeps_exactly_the_canonical_parse() {
    let wg = WordGraph::full_lattice(9, &["a", "b", "c"]);
    let res = parse(&wg, &builtin_grammar(Builtin::G2)).unwrap();
    assert_eq!(res.surviving_values(), 9);
    let parses = parse_rows(&wg, Builtin::G2);
    assert_eq!(
        parses,
        vec![vec![
            row("(1,2)", "a", "a-(9,10)"),
            row("(2,3)", "a", "a-(8,9)"),
            row("(3,4)", "a", "a-(7,8)"),
            row("(4,5)", "b", "b-(3,4)"),
            row("(5,6)", "b", "b-(2,3)"),
            row("(6,7)", "b", "b-(1,2)"),
            row("(7,8)", "c", "c-(6,7)"),
            row("(8,9)", "c", "c-(5,6)"),
            row("(9,10)", "c", "c-(4,5)"),
        ]]
    );
}

#[test]
fn abc_lattice_lengths_not_divisible_by_three_wipe_out() {
    for len in [1, 2, 4, 5, 7, 8] {
        let res = parse(&WordGraph::full_lattice(len, &["a", "b", "c"]), &builtin_grammar(Builtin::G2)).unwrap();
        assert_eq!(res.surviving_values(), 0, "length {len}");
        assert!(res.parses.is_empty());
    }
}

#[test]
fn abc_lattice_has_one_parse_for_small_n() {
    for n in 1..=4 {
        let res = parse(&WordGraph::full_lattice(3 * n, &["a", "b", "c"]), &builtin_grammar(Builtin::G2)).unwrap();
        assert_eq!(res.parses.len(), 1, "n = {n}");
        let want: Vec<String> = ["a", "b", "c"].iter().flat_map(|c| vec![c.to_string(); n]).collect();
        assert_eq!(res.sentences().into_iter().collect::<Vec<_>>(), vec![want]);
    }
}

#[test]
fn abc_constraints_without_ordering_rules_do_not_decide_the_language() {
    // Only the rules before the "b block before c block" comment.
    let src = muse_core::cdg::grammars::G2;
    let cut = src.find("; b block before c block").unwrap();
    let weak = Grammar::parse(&src[..cut]).unwrap();
    let mut net = build_network(&WordGraph::full_lattice(4, &["a", "b", "c"]), &weak).unwrap();
    prune(&mut net);
    let (m, _) = muse_ac1(net.muse);
    assert!(m.csp().total_labels() > 0);
}

#[test]
fn copy_language_counts_strings_by_half_length() {
    for (len, want) in [(2, 3), (4, 9), (6, 27)] {
        let res = parse(&WordGraph::full_lattice(len, &["a", "b", "c"]), &builtin_grammar(Builtin::G3)).unwrap();
        let sentences = res.sentences();
        assert_eq!(sentences.len(), want, "length {len}");
        assert_eq!(res.parses.len(), want, "one parse per string at length {len}");
        for s in &sentences {
            let half = s.len() / 2;
            assert_eq!(s[..half], s[half..]);
        }
    }
}

#[test]
fn copy_language_odd_lengths_wipe_out() {
    for len in [1, 3, 5] {
        let res = parse(&WordGraph::full_lattice(len, &["a", "b", "c"]), &builtin_grammar(Builtin::G3)).unwrap();
        assert_eq!(res.surviving_values(), 0, "length {len}");
    }
}

#[test]
fn word_graph_text_round_trips() {
    let wg = WordGraph::full_lattice(3, &["a", "b"]);
    let back = WordGraph::parse(&wg.to_text()).unwrap();
    assert_eq!(back.to_text(), wg.to_text());
    assert_eq!(back.len(), 6);
}

#[test]
fn grammar_errors_carry_line_and_column() {
    let err = Grammar::parse("(categories a)\n(roles governor)\n(labels x)\n(if (= (cat x) q) (= (lab x) x))").unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("4:"), "{msg}");
}
