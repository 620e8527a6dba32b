use std::collections::BTreeMap;
use std::path::Path;

use gaspp_harness::reproduce::{cases, reproduce, Suite};

fn csvs(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect()
}

#[test]
fn fig2_is_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = reproduce(Suite::Fig2, a.path(), None).unwrap();
    let rb = reproduce(Suite::Fig2, b.path(), None).unwrap();
    assert!(ra.passed() && rb.passed(), "{}", ra.table());

    let (fa, fb) = (csvs(&a.path().join("fig2")), csvs(&b.path().join("fig2")));
    assert_eq!(fa.len(), 8);
    assert_eq!(fa.keys().collect::<Vec<_>>(), fb.keys().collect::<Vec<_>>());
    for (name, bytes) in &fa {
        assert!(bytes == &fb[name], "{name} differs");
    }
    assert!(a.path().join("fig2/report.json").is_file());
    assert!(a.path().join("fig2/chicken_start1.summary.json").is_file());
}

#[test]
fn suites_have_the_expected_runs() {
    let labels = |s| cases(s).into_iter().map(|c| c.label).collect::<Vec<_>>();
    assert_eq!(labels(Suite::Fig2).len(), 8);
    assert_eq!(
        labels(Suite::Fig3),
        ["shapleys_game_gaspp", "shapleys_game_gigawolf", "shapleys_game_igapp"]
    );
    assert_eq!(labels(Suite::Fig4).len(), 4);
    assert_eq!(labels(Suite::Fig5).len(), 1);
    for s in Suite::ALL {
        assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        for c in cases(s) {
            c.config.prepare().unwrap();
        }
    }
}

#[test]
fn iteration_cap_applies_to_every_run() {
    let dir = tempfile::tempdir().unwrap();
    let r = reproduce(Suite::Fig3, dir.path(), Some(500)).unwrap();
    assert!(r.runs.iter().all(|c| c.summary.iterations == 500));
    assert!(!r.passed());
}
