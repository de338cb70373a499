use std::fs;

use kahlerdyn::arith::Gq;
use kahlerdyn::config::{matrix_from, parse_config, raw_model_of, Command, Exact, Format, ModelConfig, RunConfig};
use kahlerdyn::cohomology::{torus_action, TorusAutomorphism};
use kahlerdyn::error::Error;
use kahlerdyn::matrix::ExactMatrix;
use proptest::prelude::*;
use rug::Rational;

fn configs_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn minimal_torus_config() {
    let cfg = parse_config("command = \"degrees\"\n[model]\ntype = \"torus\"\nA = [[2, 1], [1, 1]]\n").unwrap();
    assert_eq!(cfg.command, Some(Command::Degrees));
    assert_eq!(cfg.precision_bits, 128);
    let Some(ModelConfig::Torus { a }) = &cfg.model else { panic!("torus expected") };
    assert_eq!(matrix_from(a).unwrap(), ExactMatrix::from_ints(&[&[2, 1], &[1, 1]]));
    assert_eq!(cfg.output.format, Format::Json);
}

#[test]
fn exact_strings_are_not_rounded() {
    let cfg = parse_config("[model]\ntype = \"torus\"\nA = [[\"1.5\", \"0.1+0.2i\"], [\"-3/2\", \"2e-3\"]]\n").unwrap();
    let Some(ModelConfig::Torus { a }) = &cfg.model else { panic!() };
    let m = matrix_from(a).unwrap();
    assert_eq!(*m.get(0, 0), Gq::real(Rational::from((3, 2))));
    assert_eq!(*m.get(0, 1), Gq::new(Rational::from((1, 10)), Rational::from((1, 5))));
    assert_eq!(*m.get(1, 0), Gq::real(Rational::from((-3, 2))));
    assert_eq!(*m.get(1, 1), Gq::real(Rational::from((1, 500))));
}

#[test]
fn parse_errors_carry_positions() {
    let err = parse_config("n_max = 10\n[model]\ntype = \"torus\"\nA = [[2, 1.5], [1, 1]]\n").unwrap_err();
    let Error::ParseError { line, column, message } = err else { panic!("{err:?}") };
    assert_eq!(line, 4);
    assert!(column > 1);
    assert!(message.contains("inexact"), "{message}");

    let err = parse_config("n_max = 10\nbogus = 3\n").unwrap_err();
    assert!(matches!(err, Error::ParseError { line: 2, .. }), "{err:?}");

    let err = parse_config("[model]\ntype = \"torus\"\nA = [[\"1/0\"]]\n").unwrap_err();
    assert!(matches!(err, Error::ParseError { line: 3, .. }), "{err:?}");

    let err = parse_config("[model]\ntype = \"klein\"\n").unwrap_err();
    assert_eq!(err.code(), "ParseError");
}

#[test]
fn validation_errors_name_the_invariant() {
    let cases = [
        ("precision_bits = 32\n", "precision_bits"),
        ("n_max = 0\n", "n_max"),
        ("[model]\ntype = \"mazur\"\nk = 2\nword = [1, 4]\n", "word letter"),
        ("[model]\ntype = \"torus\"\nA = [[1, 2], [3]]\n", "equal length"),
        ("[mixing]\nm = [1, 0]\n", "m_prime"),
        ("[mixing]\nm = [1, 0]\nm_prime = [0, 1]\nn_range = [5, 2]\n", "n_range"),
        ("[relative]\nclass = \"explicit\"\ns = 1\n", "explicit"),
        ("[grid]\nresolution = 4\n", "resolution"),
    ];
    for (text, needle) in cases {
        match parse_config(text) {
            Err(Error::ValidationError(msg)) => assert!(msg.contains(needle), "{text}: {msg}"),
            other => panic!("{text}: {other:?}"),
        }
    }
}

#[test]
fn resolve_applies_overrides_and_checks_command() {
    let cfg = parse_config("command = \"jordan\"\n[jordan]\nmatrix = [[2, 1], [0, 2]]\n").unwrap();
    let r = cfg.clone().resolve(Command::Jordan, Some("out.csv".into()), Some(Format::Csv), Some(256)).unwrap();
    assert_eq!(r.output.path.as_deref(), Some("out.csv"));
    assert_eq!(r.output.format, Format::Csv);
    assert_eq!(r.precision_bits, 256);
    assert!(matches!(cfg.clone().resolve(Command::Degrees, None, None, None), Err(Error::ValidationError(_))));
    assert!(matches!(cfg.resolve(Command::Jordan, None, None, Some(16)), Err(Error::ValidationError(_))));
}

#[test]
fn shipped_configs_round_trip() {
    let mut seen = 0;
    for entry in fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        let cfg = parse_config(&fs::read_to_string(&path).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let command = cfg.command.expect("shipped configs name their command");
        let resolved = cfg.resolve(command, Some("x.json".into()), None, None).unwrap();
        let again = parse_config(&resolved.to_toml()).unwrap();
        assert_eq!(again, resolved, "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 3);
}

#[test]
fn raw_export_reproduces_the_model() {
    let t = TorusAutomorphism::new(ExactMatrix::from_ints(&[&[2, 1], &[1, 1]])).unwrap();
    let action = torus_action(&t).unwrap();
    let mut cfg: RunConfig = parse_config("").unwrap();
    cfg.model = Some(raw_model_of(&action));
    let back = parse_config(&cfg.to_toml()).unwrap();
    assert_eq!(back, cfg);
    let Some(ModelConfig::Raw { blocks, .. }) = &back.model else { panic!() };
    for (b, m) in blocks.iter().zip(&action.blocks) {
        assert_eq!(&matrix_from(b).unwrap(), m);
    }
}

fn gq_string() -> impl Strategy<Value = String> {
    (-50i64..50, 1i64..20, -50i64..50, 1i64..20).prop_map(|(a, b, c, d)| {
        Gq::new(Rational::from((a, b)), Rational::from((c, d))).to_string()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_entries_round_trip(entries in proptest::collection::vec(gq_string(), 4)) {
        let rows: Vec<Vec<Exact>> = entries.chunks(2).map(|r| r.iter().map(|s| Exact::Str(s.clone())).collect()).collect();
        let mut cfg: RunConfig = parse_config("").unwrap();
        cfg.model = Some(ModelConfig::Torus { a: rows.clone() });
        let back = parse_config(&cfg.to_toml()).unwrap();
        prop_assert_eq!(&back, &cfg);
        let m = matrix_from(&rows).unwrap();
        let parsed: Vec<Gq> = entries.iter().map(|s| s.parse().unwrap()).collect();
        prop_assert_eq!(m.entries(), &parsed[..]);
    }
}
