use recurrence::arena::{Bits, Player};
use recurrence::adjudicator::{ComponentReport, VerdictReport};
use recurrence::harness::rescued_lines;
use recurrence::strategies::{k_expected_layout, KStageLayout};

fn bits(s: &[&str]) -> Vec<Bits> {
    s.iter().map(|w| w.parse().unwrap()).collect()
}

fn layout(splits: &[&str]) -> KStageLayout {
    k_expected_layout(&bits(splits)).unwrap()
}

#[test]
fn golden_stages() {
    let cases: [(&[&str], &str); 4] = [
        (&[], include_str!("golden/stage1.txt")),
        (&[""], include_str!("golden/stage2.txt")),
        (&["", "1"], include_str!("golden/stage3.txt")),
        (&["", "1", "0"], include_str!("golden/stage4.txt")),
    ];
    for (splits, want) in cases {
        assert_eq!(layout(splits).render(), want, "after splits {splits:?}");
    }
}

#[test]
fn stage_two_lines() {
    let l = layout(&["", "1"]);
    assert_eq!(l.reserve, "111".parse().unwrap());
    let line = &l.lines[1];
    assert_eq!(line.left, "10".parse().unwrap());
    assert_eq!(line.right, bits(&["100", "010"]));
    assert_eq!(line.bang, "10".parse().unwrap());
}

#[test]
fn split_of_inner_node_is_rejected() {
    assert!(k_expected_layout(&bits(&["", ""])).is_err());
    assert!(k_expected_layout(&bits(&["0"])).is_err());
}

#[test]
fn split_order_changes_layout() {
    assert_ne!(layout(&["", "0", "1"]), layout(&["", "1", "0"]));
}

fn report(left: &[(&str, Player)], right: &[(&str, Player)], bang: &[(&str, Player)], rf: Player) -> VerdictReport {
    let comp = |index, name: &str, threads: &[(&str, Player)]| ComponentReport {
        index,
        name: name.to_string(),
        winner: Player::Env,
        threads: threads.iter().map(|(w, p)| (format!("thread {}", w.parse::<Bits>().unwrap()), *p)).collect(),
    };
    VerdictReport {
        winner: Player::Env,
        illegal: None,
        components: vec![
            ComponentReport { index: 1, name: "recurrence-free".into(), winner: rf, threads: vec![] },
            comp(2, "left ?-component", left),
            comp(3, "right ?-component", right),
            comp(4, "!-component", bang),
        ],
    }
}

#[test]
fn lost_line_needs_a_rescue_above_it() {
    use Player::{Env, Machine};
    let l = layout(&["", "1"]);
    // line 2 lost, nothing on lines 1..=2 won
    let r = report(&[("0", Env), ("10", Env), ("110", Machine)], &[], &[("0", Machine), ("10", Env), ("11", Machine)], Env);
    assert!(rescued_lines(&l, &r).unwrap_err().starts_with("line 2"));
    // a right thread of line 2 rescues it
    let r = report(&[("0", Env)], &[("010", Machine)], &[("0", Machine), ("10", Env), ("11", Machine)], Env);
    assert!(rescued_lines(&l, &r).is_ok());
    // a won recurrence-free component rescues everything
    let r = report(&[], &[], &[("0", Env), ("10", Env), ("11", Env)], Machine);
    assert!(rescued_lines(&l, &r).is_ok());
}
