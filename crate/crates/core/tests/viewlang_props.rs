#[path = "common/commands.rs"]
mod commands;

use commands::{base_session, command, risky_line};
use proptest::prelude::*;
use viz_core::viewlang::{evaluate, format, parse, run_script, EvalContext, VERBS};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn parse_inverts_format(cmd in command()) {
        let text = format(&cmd);
        let back = parse(&text);
        prop_assert_eq!(back.as_ref(), Ok(&cmd), "text: {}", text);
        prop_assert_eq!(format(&back.unwrap()), text);
    }
}

#[test]
fn generated_corpus_reaches_every_verb() {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;
    let mut runner = TestRunner::deterministic();
    let strategy = command();
    let mut seen = std::collections::BTreeSet::new();
    for _ in 0..1000 {
        seen.insert(strategy.new_tree(&mut runner).unwrap().current().verb());
    }
    assert_eq!(seen.len(), VERBS.len(), "{seen:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn failed_lines_leave_the_session_untouched(lines in prop::collection::vec(risky_line(), 1..12)) {
        let ctx = EvalContext::new(std::env::temp_dir());
        let mut session = base_session();
        for line in &lines {
            let cmd = parse(line).unwrap();
            let before = session.clone();
            match evaluate(&session, &cmd, &ctx) {
                Ok((next, _)) => session = next,
                Err(_) => prop_assert_eq!(&session, &before),
            }
        }
        // The script runner keeps the same state line by line.
        let text = lines.join("\n");
        let out = run_script(&base_session(), &text, &ctx);
        prop_assert_eq!(&out.session, &session);
        for e in &out.errors {
            let upto = lines[..e.line - 1].join("\n");
            let through = lines[..e.line].join("\n");
            prop_assert_eq!(
                run_script(&base_session(), &upto, &ctx).session,
                run_script(&base_session(), &through, &ctx).session
            );
        }
        prop_assert_eq!(run_script(&base_session(), &text, &ctx), out);
    }
}

#[test]
fn failing_source_line_rolls_back_the_whole_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("inner.vl"), "view add m\niso add view=2 level=0.01\nview add nope\n").unwrap();
    let ctx = EvalContext::new(dir.path()).with_script_dir(dir.path());
    let s = base_session();
    let cmd = parse("source \"inner.vl\"").unwrap();
    assert!(evaluate(&s, &cmd, &ctx).is_err());
    let out = run_script(&s, "source \"inner.vl\"", &ctx);
    assert_eq!(out.errors.len(), 1);
    assert_eq!(out.session, s);
}
